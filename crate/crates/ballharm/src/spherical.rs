//! An explicit Cartesian basis of spherical harmonics built from a Chebyshev
//! seed in two variables and a tower of Gegenbauer factors, together with the
//! recursions that expand partial derivatives and harmonic projections of
//! x_i-multiples in the same basis one degree down or up.

use std::collections::HashMap;
use std::sync::Mutex;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::orthopoly::{chebyshev_t_exact, chebyshev_u_exact, gegenbauer_exact};
use crate::polyalg::{poch_rat, rat, ratio, ExactPoly, SphereMoments};

/// Multi-index labelling a basis harmonic: components (n_1, ..., n_d) with
/// n_1 in {0, 1}; the polynomial degree is the component sum.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HarmonicIndex {
    comps: Vec<u32>,
}

impl HarmonicIndex {
    pub fn new(comps: Vec<u32>) -> Result<Self> {
        if comps.len() < 2 {
            return Err(Error::UnsupportedDimension(comps.len()));
        }
        if comps[0] > 1 {
            return Err(Error::InvalidParameter(format!(
                "first component must be 0 or 1, got {}",
                comps[0]
            )));
        }
        Ok(HarmonicIndex { comps })
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn degree(&self) -> u32 {
        self.comps.iter().sum()
    }

    pub fn comps(&self) -> &[u32] {
        &self.comps
    }

    /// lambda_j = n_1 + ... + n_{j-1} + (j-2)/2 for slot j in 3..=d, kept
    /// exact so the recursion coefficients never round.
    pub fn lambda(&self, slot: usize) -> BigRational {
        assert!((3..=self.dim()).contains(&slot));
        let prefix: u32 = self.comps[..slot - 1].iter().sum();
        rat(prefix as i64) + ratio(slot as i64 - 2, 2)
    }

    /// Split off the last slot: (n', n_d). Only valid for d >= 3.
    pub fn parent(&self) -> (HarmonicIndex, u32) {
        assert!(self.dim() >= 3);
        let nd = *self.comps.last().unwrap();
        let parent = HarmonicIndex { comps: self.comps[..self.dim() - 1].to_vec() };
        (parent, nd)
    }

    pub fn child(parent: &HarmonicIndex, nd: u32) -> HarmonicIndex {
        let mut comps = parent.comps.clone();
        comps.push(nd);
        HarmonicIndex { comps }
    }

    /// Dash-joined multi-index, e.g. "0-2-1".
    pub fn encode(&self) -> String {
        self.comps
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// dim H_n^d = C(n+d-1, n) - C(n+d-3, n-2): homogeneous polynomials of
/// degree n minus the |x|^2-multiples of degree n-2.
pub fn harmonic_space_dim(d: usize, n: u32) -> u64 {
    fn binom(n: i64, k: i64) -> u64 {
        if k < 0 || n < 0 || k > n {
            return 0;
        }
        let mut v: u64 = 1;
        for i in 0..k {
            v = v * (n - i) as u64 / (i + 1) as u64;
        }
        v
    }
    let n = n as i64;
    let d = d as i64;
    binom(n + d - 1, n) - binom(n + d - 3, n - 2)
}

/// All indices of one degree, in lexicographic component order.
pub fn enumerate_degree(d: usize, degree: u32) -> Vec<HarmonicIndex> {
    let mut out = Vec::new();
    let mut comps = vec![0u32; d];
    fn rec(comps: &mut Vec<u32>, slot: usize, left: u32, out: &mut Vec<HarmonicIndex>) {
        let d = comps.len();
        if slot == d - 1 {
            comps[slot] = left;
            out.push(HarmonicIndex { comps: comps.clone() });
            return;
        }
        let hi = if slot == 0 { left.min(1) } else { left };
        for v in 0..=hi {
            comps[slot] = v;
            rec(comps, slot + 1, left - v, out);
            comps[slot] = 0;
        }
    }
    rec(&mut comps, 0, degree, &mut out);
    out
}

/// Linear combination of basis harmonics, all of one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicExpansion {
    pub terms: Vec<(BigRational, HarmonicIndex)>,
}

impl HarmonicExpansion {
    pub fn empty() -> Self {
        HarmonicExpansion { terms: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Assemble the expansion into an explicit polynomial.
    pub fn to_poly(&self, dim: usize) -> ExactPoly {
        let mut acc = ExactPoly::zero(dim);
        for (c, idx) in &self.terms {
            acc = acc.add(&harmonic_basis(idx).scale(c)).unwrap();
        }
        acc
    }

    fn push(&mut self, c: BigRational, idx: HarmonicIndex) {
        if !Zero::is_zero(&c) {
            self.terms.push((c, idx));
        }
    }

    fn extend_scaled(&mut self, inner: HarmonicExpansion, factor: &BigRational, nd: u32) {
        for (c, idx) in inner.terms {
            self.push(factor * c, HarmonicIndex::child(&idx, nd));
        }
    }
}

/// The homogeneous polynomial |x|^n C_n^lambda(x_d / |x|) in d variables;
/// polynomial because C_n^lambda has the parity of n. Zero for n < 0.
pub fn f_lambda(d: usize, n: i64, lambda: &BigRational) -> ExactPoly {
    assert!(d >= 1);
    if n < 0 {
        return ExactPoly::zero(d);
    }
    let n = n as u32;
    let geg = gegenbauer_exact(n, lambda);
    let mut r2 = ExactPoly::zero(d);
    for i in 0..d {
        r2 = r2.add(&ExactPoly::var(d, i).pow(2)).unwrap();
    }
    let mut out = ExactPoly::zero(d);
    for (e, c) in geg.terms() {
        let k = e.0[0];
        assert!(
            (n - k) % 2 == 0,
            "Gegenbauer parity violated; non-polynomial parameter combination"
        );
        let term = ExactPoly::var(d, d - 1)
            .pow(k)
            .mul(&r2.pow((n - k) / 2))
            .unwrap()
            .scale(c);
        out = out.add(&term).unwrap();
    }
    out
}

/// Structured form of a partial derivative of F_n^lambda: a scalar factor, an
/// optional x_i prefactor, and the target (degree, lambda).
#[derive(Clone, Debug)]
pub struct FLambdaDerivative {
    /// Scalar multiplier in front of the target.
    pub factor: BigRational,
    /// Whether the target is multiplied by x_axis (tangential case).
    pub x_prefactor: bool,
    /// Degree of the target F (may be negative, meaning zero).
    pub target_degree: i64,
    /// Parameter of the target F.
    pub target_lambda: BigRational,
}

/// d/dx_i F_n^lambda: for i < d the result is -2 lambda x_i F_{n-2}^{lambda+1};
/// for i = d it is (n + 2 lambda - 1) F_{n-1}^lambda. Axes are 0-based.
pub fn partial_f_lambda(d: usize, n: i64, lambda: &BigRational, axis: usize) -> FLambdaDerivative {
    assert!(axis < d);
    if axis + 1 < d {
        FLambdaDerivative {
            factor: rat(-2) * lambda,
            x_prefactor: true,
            target_degree: n - 2,
            target_lambda: lambda + rat(1),
        }
    } else {
        FLambdaDerivative {
            factor: rat(n) + rat(2) * lambda - rat(1),
            x_prefactor: false,
            target_degree: n - 1,
            target_lambda: lambda.clone(),
        }
    }
}

/// The d = 2 seed g_{n_1, n_2}: a Chebyshev-T column for n_1 = 0 and an
/// x_1-times-Chebyshev-U column for n_1 = 1, both homogenized.
fn g_seed(n1: u32, n2: u32) -> ExactPoly {
    let mut rho2 = ExactPoly::var(2, 0).pow(2);
    rho2 = rho2.add(&ExactPoly::var(2, 1).pow(2)).unwrap();
    let homogenize = |univ: &ExactPoly, deg: u32| -> ExactPoly {
        // univ(u) with u = x_2 / rho, multiplied by rho^deg
        let mut out = ExactPoly::zero(2);
        for (e, c) in univ.terms() {
            let k = e.0[0];
            assert!((deg - k) % 2 == 0);
            let term = ExactPoly::var(2, 1)
                .pow(k)
                .mul(&rho2.pow((deg - k) / 2))
                .unwrap()
                .scale(c);
            out = out.add(&term).unwrap();
        }
        out
    };
    if n1 == 0 {
        homogenize(&chebyshev_t_exact(n2), n2)
    } else {
        let u = homogenize(&chebyshev_u_exact(n2), n2);
        ExactPoly::var(2, 0).mul(&u).unwrap()
    }
}

/// The basis harmonic Y_n as an explicit homogeneous polynomial, built by the
/// product recursion over slots.
pub fn harmonic_basis(idx: &HarmonicIndex) -> ExactPoly {
    let d = idx.dim();
    let c = idx.comps();
    let mut p = g_seed(c[0], c[1]);
    for slot in 3..=d {
        let lambda = idx.lambda(slot);
        let f = f_lambda(slot, c[slot - 1] as i64, &lambda);
        p = p.embed(slot).mul(&f).unwrap();
    }
    p
}

/// Thread-safe memo cache for [`harmonic_basis`].
#[derive(Default)]
pub struct BasisCache {
    map: Mutex<HashMap<HarmonicIndex, std::sync::Arc<ExactPoly>>>,
}

impl BasisCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, idx: &HarmonicIndex) -> std::sync::Arc<ExactPoly> {
        if let Some(p) = self.map.lock().unwrap().get(idx) {
            return p.clone();
        }
        let p = std::sync::Arc::new(harmonic_basis(idx));
        self.map.lock().unwrap().entry(idx.clone()).or_insert(p).clone()
    }
}

/// Orthogonal projection of a homogeneous polynomial onto the harmonics of
/// the same degree: sum_j |x|^{2j} Delta^j P / (4^j j! (-n+2-d/2)_j).
pub fn project_to_harmonic(p: &ExactPoly) -> Result<ExactPoly> {
    let n = p
        .homogeneous_degree()
        .ok_or_else(|| Error::InvalidParameter("projection requires a homogeneous polynomial".into()))?;
    let d = p.dim();
    let mut r2 = ExactPoly::zero(d);
    for i in 0..d {
        r2 = r2.add(&ExactPoly::var(d, i).pow(2)).unwrap();
    }
    let base = rat(-(n as i64)) + rat(2) - ratio(d as i64, 2);
    let mut out = p.clone();
    let mut lap = p.clone();
    let mut r2j = ExactPoly::one(d);
    let mut factorial = BigRational::one();
    for j in 1..=(n / 2) {
        lap = lap.laplacian();
        if lap.is_zero() {
            break;
        }
        r2j = r2j.mul(&r2).unwrap();
        factorial *= rat(j as i64);
        let denom = rat(4).pow(j as i32) * &factorial * poch_rat(&base, j);
        debug_assert!(!Zero::is_zero(&denom));
        out = out
            .add(&r2j.mul(&lap).unwrap().scale(&(BigRational::one() / denom)))
            .unwrap();
    }
    Ok(out)
}

/// Expansion of d/dx_axis Y_n in basis harmonics one degree down. At most
/// 2^{d-2} terms. Degree-0 input gives the empty expansion.
pub fn derivative_expansion(idx: &HarmonicIndex, axis: usize) -> HarmonicExpansion {
    let d = idx.dim();
    assert!(axis < d);
    let mut out = HarmonicExpansion::empty();
    let n = idx.degree();
    if n == 0 {
        return out;
    }
    if d == 2 {
        let (n1, n2) = (idx.comps()[0], idx.comps()[1]);
        match (n1, axis) {
            (0, 0) => {
                // cosine column against x_1: -n * sine element of degree n-1
                if n >= 2 {
                    out.push(rat(-(n as i64)), HarmonicIndex { comps: vec![1, n - 2] });
                }
            }
            (0, 1) => {
                out.push(rat(n as i64), HarmonicIndex { comps: vec![0, n - 1] });
            }
            (1, 0) => {
                out.push(rat(n as i64), HarmonicIndex { comps: vec![0, n - 1] });
            }
            (1, 1) => {
                if n2 >= 1 {
                    out.push(rat(n as i64), HarmonicIndex { comps: vec![1, n2 - 1] });
                }
            }
            _ => unreachable!(),
        }
        return out;
    }
    let (parent, nd) = idx.parent();
    let lambda = idx.lambda(d);
    let np = parent.degree();
    if axis + 1 == d {
        if nd >= 1 {
            let coef = rat(nd as i64) + rat(2) * &lambda - rat(1);
            out.push(coef, HarmonicIndex::child(&parent, nd - 1));
        }
        return out;
    }
    // tangential axis: raise term lands at slot degree nd - 2
    if nd >= 2 {
        let raised = raise_expansion(&parent, axis);
        out.extend_scaled(raised, &(rat(-2) * &lambda), nd - 2);
    }
    // derivative term keeps slot degree nd; vanishes identically when the
    // prefix is constant, which also guards the removable (2 lambda - 1)(2 lambda - 2)
    // denominators at lambda = 1/2 and lambda = 1
    if np >= 1 {
        let two_lam = rat(2) * &lambda;
        let coef = (rat(nd as i64) + &two_lam - rat(1)) * (rat(nd as i64) + &two_lam - rat(2))
            / ((&two_lam - rat(1)) * (&two_lam - rat(2)));
        let inner = derivative_expansion(&parent, axis);
        out.extend_scaled(inner, &coef, nd);
    }
    out
}

/// Expansion of proj(x_axis Y_n) in basis harmonics one degree up. At most
/// 2^{d-2} terms.
pub fn raise_expansion(idx: &HarmonicIndex, axis: usize) -> HarmonicExpansion {
    let d = idx.dim();
    assert!(axis < d);
    let mut out = HarmonicExpansion::empty();
    let n = idx.degree();
    if d == 2 {
        let (n1, n2) = (idx.comps()[0], idx.comps()[1]);
        if n == 0 {
            // x_i itself is a basis harmonic
            let target = if axis == 0 { vec![1, 0] } else { vec![0, 1] };
            out.push(rat(1), HarmonicIndex { comps: target });
            return out;
        }
        match (n1, axis) {
            (0, 0) => out.push(ratio(1, 2), HarmonicIndex { comps: vec![1, n - 1] }),
            (0, 1) => out.push(ratio(1, 2), HarmonicIndex { comps: vec![0, n + 1] }),
            (1, 0) => out.push(ratio(-1, 2), HarmonicIndex { comps: vec![0, n + 1] }),
            (1, 1) => out.push(ratio(1, 2), HarmonicIndex { comps: vec![1, n2 + 1] }),
            _ => unreachable!(),
        }
        return out;
    }
    let (parent, nd) = idx.parent();
    let lambda = idx.lambda(d);
    let np = parent.degree();
    if axis + 1 == d {
        let coef = rat(nd as i64 + 1) / (rat(2) * (rat(nd as i64) + &lambda));
        out.push(coef, HarmonicIndex::child(&parent, nd + 1));
        return out;
    }
    // raise term: slot degree stays nd
    let coef_a = &lambda / (rat(nd as i64) + &lambda);
    let raised = raise_expansion(&parent, axis);
    out.extend_scaled(raised, &coef_a, nd);
    // derivative term: slot degree jumps to nd + 2; same constant-prefix guard
    if np >= 1 {
        let two_lam = rat(2) * &lambda;
        let coef_b = -(rat(nd as i64 + 1) * rat(nd as i64 + 2))
            / ((&two_lam - rat(1)) * (&two_lam - rat(2)) * rat(2) * (rat(nd as i64) + &lambda));
        let inner = derivative_expansion(&parent, axis);
        out.extend_scaled(inner, &coef_b, nd + 2);
    }
    out
}

/// Exact squared sphere norm h = (1/sigma) int Y^2 dsigma, via closed-form
/// sphere moments on the explicit polynomial.
pub fn sphere_norm(idx: &HarmonicIndex) -> BigRational {
    let y = harmonic_basis(idx);
    let moments = SphereMoments::new(idx.dim(), 2 * idx.degree());
    moments.ip(&y, &y).unwrap()
}

/// Same, reusing a prebuilt moment table and basis polynomial.
pub fn sphere_norm_with(moments: &SphereMoments, y: &ExactPoly) -> BigRational {
    moments.ip(y, y).unwrap()
}

// ---------------------------------------------------------------------------
// Numeric fast path: evaluate every basis harmonic at a point by pole-safe
// homogeneous recurrences.
// ---------------------------------------------------------------------------

/// Enumeration of all basis indices with degree <= max_degree in a fixed
/// lexicographic order, plus per-degree position lists. The order matches the
/// traversal in [`HarmonicTable::eval_all`].
pub struct HarmonicTable {
    d: usize,
    max_degree: u32,
    indices: Vec<HarmonicIndex>,
    by_degree: Vec<Vec<u32>>,
}

impl HarmonicTable {
    pub fn new(d: usize, max_degree: u32) -> Self {
        assert!(d >= 2);
        let mut indices = Vec::new();
        let mut comps = vec![0u32; d];
        fn rec(comps: &mut Vec<u32>, slot: usize, left: u32, out: &mut Vec<HarmonicIndex>) {
            let d = comps.len();
            if slot == d {
                out.push(HarmonicIndex { comps: comps.clone() });
                return;
            }
            let hi = if slot == 0 { left.min(1) } else { left };
            for v in 0..=hi {
                comps[slot] = v;
                rec(comps, slot + 1, left - v, out);
                comps[slot] = 0;
            }
        }
        rec(&mut comps, 0, max_degree, &mut indices);
        let mut by_degree = vec![Vec::new(); max_degree as usize + 1];
        for (pos, idx) in indices.iter().enumerate() {
            by_degree[idx.degree() as usize].push(pos as u32);
        }
        HarmonicTable { d, max_degree, indices, by_degree }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[HarmonicIndex] {
        &self.indices
    }

    pub fn positions_of_degree(&self, degree: u32) -> &[u32] {
        &self.by_degree[degree as usize]
    }

    /// Exact sphere norms h_nu for every index, as doubles, computed from
    /// closed-form moments. Only sensible at small max_degree; the expansion
    /// pipeline computes these by certified quadrature instead.
    pub fn exact_norms_f64(&self) -> Vec<f64> {
        let moments = SphereMoments::new(self.d, 2 * self.max_degree);
        self.indices
            .iter()
            .map(|idx| {
                let y = harmonic_basis(idx);
                moments.ip(&y, &y).unwrap().to_f64().unwrap()
            })
            .collect()
    }

    /// Evaluate every (unnormalized) basis harmonic at x. `out` must have
    /// length `self.len()`. Uses homogeneous three-term recurrences in each
    /// slot, so no divisions by radii occur and poles are safe.
    pub fn eval_all(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.d);
        assert_eq!(out.len(), self.indices.len());
        let maxd = self.max_degree as usize;
        // z-powers for the two-variable seed: z = x_2 + i x_1
        let mut c = vec![0.0; maxd + 2];
        let mut s = vec![0.0; maxd + 2];
        c[0] = 1.0;
        s[0] = 0.0;
        for m in 0..maxd + 1 {
            c[m + 1] = x[1] * c[m] - x[0] * s[m];
            s[m + 1] = x[0] * c[m] + x[1] * s[m];
        }
        // prefix squared radii r_j^2 = x_1^2 + ... + x_j^2
        let mut prefix_sq = vec![0.0; self.d + 1];
        for j in 1..=self.d {
            prefix_sq[j] = prefix_sq[j - 1] + x[j - 1] * x[j - 1];
        }
        let mut pos = 0usize;
        // recursive walk over slots 3..=d with the running product
        fn walk(
            table: &HarmonicTable,
            x: &[f64],
            prefix_sq: &[f64],
            slot: usize,
            prefix_deg: usize,
            val: f64,
            out: &mut [f64],
            pos: &mut usize,
        ) {
            if slot > table.d {
                out[*pos] = val;
                *pos += 1;
                return;
            }
            let lambda = prefix_deg as f64 + (slot as f64 - 2.0) / 2.0;
            let r2 = prefix_sq[slot];
            let xj = x[slot - 1];
            let left = table.max_degree as usize - prefix_deg;
            // u_m = r^m C_m^lambda(x_j / r), rolled without divisions by r
            let mut um2 = 0.0;
            let mut um1 = 0.0;
            for m in 0..=left {
                let um = if m == 0 {
                    1.0
                } else if m == 1 {
                    2.0 * lambda * xj
                } else {
                    (2.0 * (m as f64 + lambda - 1.0) * xj * um1
                        - (m as f64 + 2.0 * lambda - 2.0) * r2 * um2)
                        / m as f64
                };
                walk(table, x, prefix_sq, slot + 1, prefix_deg + m, val * um, out, pos);
                um2 = um1;
                um1 = um;
            }
        }
        for n1 in 0..=1u32.min(self.max_degree) {
            let hi = maxd - n1 as usize;
            for n2 in 0..=hi {
                let g = if n1 == 0 { c[n2] } else { s[n2 + 1] };
                walk(self, x, &prefix_sq, 3, n1 as usize + n2, g, out, &mut pos);
            }
        }
        debug_assert_eq!(pos, self.indices.len());
    }
}
