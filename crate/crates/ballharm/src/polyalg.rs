//! Exact multivariate polynomial arithmetic over the rationals, together with
//! closed-form normalized moment integrals on the unit ball and the unit
//! sphere. Everything here is exact; this module is the oracle the rest of the
//! crate is verified against.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for n/d.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Pochhammer symbol (a)_n over the rationals.
pub fn poch_rat(a: &BigRational, n: u32) -> BigRational {
    let mut p = BigRational::one();
    for i in 0..n {
        p *= a + rat(i as i64);
    }
    p
}

/// Exponent vector of a monomial, ordered graded-lexicographically so that
/// term maps have one canonical layout.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Expo(pub Vec<u32>);

impl Expo {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl PartialOrd for Expo {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expo {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Coefficient ring abstraction: exact rationals for the oracle path,
/// doubles for the production path.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn c_zero() -> Self;
    fn c_one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_int(i: i64) -> Self;
    fn as_f64(&self) -> f64;
}

impl Coeff for BigRational {
    fn c_zero() -> Self {
        BigRational::zero()
    }
    fn c_one() -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_int(i: i64) -> Self {
        rat(i)
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Coeff for f64 {
    fn c_zero() -> Self {
        0.0
    }
    fn c_one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_int(i: i64) -> Self {
        i as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

/// Sparse multivariate polynomial: a map from exponent vectors to nonzero
/// coefficients. Two polynomials are equal iff their term maps are equal.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C: Coeff> {
    dim: usize,
    terms: BTreeMap<Expo, C>,
}

pub type ExactPoly = Poly<BigRational>;
pub type FloatPoly = Poly<f64>;

impl<C: Coeff> Poly<C> {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        let mut p = Poly::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Expo(vec![0; dim]), c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::c_one())
    }

    /// The coordinate polynomial x_axis (axis is 0-based).
    pub fn var(dim: usize, axis: usize) -> Self {
        assert!(axis < dim);
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self::monomial(dim, e, C::c_one())
    }

    pub fn monomial(dim: usize, exps: Vec<u32>, c: C) -> Self {
        assert_eq!(exps.len(), dim);
        let mut p = Poly::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Expo(exps), c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; the zero polynomial has degree -1.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|e| e.total() as i64).max().unwrap_or(-1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &C)> {
        self.terms.iter()
    }

    fn accumulate(&mut self, e: Expo, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect();
        Poly { dim: self.dim, terms }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        let terms = self.terms.iter().map(|(e, v)| (e.clone(), v.mul(c))).collect();
        Poly { dim: self.dim, terms }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Poly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = Expo(ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect());
                out.accumulate(e, ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Poly::one(self.dim);
        for _ in 0..k {
            out = out.mul(self).expect("same dim");
        }
        out
    }

    /// Exact partial derivative with respect to the (0-based) axis.
    pub fn diff(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e.0[axis];
            if k == 0 {
                continue;
            }
            let mut ne = e.0.clone();
            ne[axis] = k - 1;
            out.accumulate(Expo(ne), c.mul(&C::from_int(k as i64)));
        }
        Ok(out)
    }

    /// Laplacian.
    pub fn laplacian(&self) -> Self {
        let mut out = Poly::zero(self.dim);
        for axis in 0..self.dim {
            let dd = self.diff(axis).unwrap().diff(axis).unwrap();
            out = out.add(&dd).unwrap();
        }
        out
    }

    /// Angular derivative x_i d_j - x_j d_i (0-based axes, i < j).
    pub fn angular_derivative(&self, i: usize, j: usize) -> Result<Self> {
        if i >= j || j >= self.dim {
            return Err(Error::AxisOutOfRange { axis: j, dim: self.dim });
        }
        let xi = Poly::var(self.dim, i);
        let xj = Poly::var(self.dim, j);
        xi.mul(&self.diff(j)?)?.sub(&xj.mul(&self.diff(i)?)?)
    }

    /// x . grad p.
    pub fn x_dot_grad(&self) -> Self {
        let mut out = Poly::zero(self.dim);
        for axis in 0..self.dim {
            let t = Poly::var(self.dim, axis).mul(&self.diff(axis).unwrap()).unwrap();
            out = out.add(&t).unwrap();
        }
        out
    }

    /// Reinterpret in a larger dimension, padding exponents with zeros.
    pub fn embed(&self, new_dim: usize) -> Self {
        assert!(new_dim >= self.dim);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut v = e.0.clone();
                v.resize(new_dim, 0);
                (Expo(v), c.clone())
            })
            .collect();
        Poly { dim: new_dim, terms }
    }

    /// Substitute q for the single variable of a univariate polynomial.
    pub fn subst_univariate(&self, q: &Self) -> Self {
        assert_eq!(self.dim, 1, "subst_univariate requires a univariate polynomial");
        // Horner over the dense coefficient list of self.
        let deg = self.degree();
        if deg < 0 {
            return Poly::zero(q.dim);
        }
        let mut coefs = vec![C::c_zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            coefs[e.0[0] as usize] = c.clone();
        }
        let mut out = Poly::constant(q.dim, coefs[deg as usize].clone());
        for k in (0..deg as usize).rev() {
            out = out.mul(q).unwrap();
            out = out.add(&Poly::constant(q.dim, coefs[k].clone())).unwrap();
        }
        out
    }

    /// Swap two coordinates (used to map between angular conventions).
    pub fn swap_axes(&self, i: usize, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut v = e.0.clone();
                v.swap(i, j);
                (Expo(v), c.clone())
            })
            .collect();
        Poly { dim: self.dim, terms }
    }

    /// Degree of homogeneity, if the polynomial is homogeneous. The zero
    /// polynomial counts as homogeneous of every degree; returns Some(0).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d0 = match it.next() {
            None => return Some(0),
            Some(e) => e.total(),
        };
        if it.all(|e| e.total() == d0) {
            Some(d0)
        } else {
            None
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.as_f64();
            for (xi, &k) in x.iter().zip(&e.0) {
                t *= xi.powi(k as i32);
            }
            acc += t;
        }
        acc
    }
}

impl ExactPoly {
    pub fn to_float(&self) -> FloatPoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), Coeff::as_f64(c)))
            .collect();
        Poly { dim: self.dim, terms }
    }

    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.dim);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(&e.0) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})", c)?;
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    write!(f, "*x{}^{}", i + 1, k)?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// Gamma value at a half-integer argument, represented exactly as
/// rat * (sqrt pi)^sqrt_pi_pow.
struct GammaHalf {
    rat: BigRational,
    sqrt_pi_pow: i32,
}

/// Gamma(two_x / 2) for two_x >= 1.
fn gamma_half(two_x: u32) -> GammaHalf {
    assert!(two_x >= 1);
    if two_x % 2 == 0 {
        // Gamma(m) = (m-1)!
        let m = two_x / 2;
        let mut v = BigRational::one();
        for i in 1..m {
            v *= rat(i as i64);
        }
        GammaHalf { rat: v, sqrt_pi_pow: 0 }
    } else {
        // Gamma(k + 1/2) = (2k)! / (4^k k!) * sqrt(pi)
        let k = (two_x - 1) / 2;
        let mut num = BigRational::one();
        for i in 1..=(2 * k) {
            num *= rat(i as i64);
        }
        let mut den = BigRational::one();
        for i in 1..=k {
            den *= rat(4) * rat(i as i64);
        }
        GammaHalf { rat: num / den, sqrt_pi_pow: 1 }
    }
}

/// Normalized sphere moment (1/sigma_{d-1}) int_{S^{d-1}} xi^alpha dsigma.
/// Zero whenever any exponent is odd; otherwise an exact rational obtained by
/// cancelling the half-integer Gamma factors symbolically (the powers of
/// sqrt(pi) must cancel, which is asserted).
pub fn sphere_monomial_moment(alpha: &[u32]) -> BigRational {
    let d = alpha.len();
    assert!(d >= 2, "sphere moments need d >= 2");
    if alpha.iter().any(|&a| a % 2 == 1) {
        return BigRational::zero();
    }
    let m: u32 = alpha.iter().sum();
    // Gamma(d/2) * prod Gamma((a_i+1)/2) / ( (sqrt pi)^d * Gamma((m+d)/2) )
    let mut num = gamma_half(d as u32);
    for &a in alpha {
        let g = gamma_half(a + 1);
        num.rat *= g.rat;
        num.sqrt_pi_pow += g.sqrt_pi_pow;
    }
    let den = gamma_half(m + d as u32);
    let sqrt_pi = num.sqrt_pi_pow - d as i32 - den.sqrt_pi_pow;
    assert_eq!(sqrt_pi, 0, "sqrt(pi) powers must cancel in sphere moments");
    num.rat / den.rat
}

/// Same closed form evaluated in doubles via a stable product of small
/// rational factors (no Gamma evaluations, so it stays accurate at high
/// degree).
pub fn sphere_monomial_moment_f64(alpha: &[u32]) -> f64 {
    let d = alpha.len();
    assert!(d >= 2);
    if alpha.iter().any(|&a| a % 2 == 1) {
        return 0.0;
    }
    // Reduce exponents two at a time: M(alpha) / M(alpha - 2 e_i) = (a_i - 1) / (m + d - 2).
    let mut cur: Vec<u32> = alpha.to_vec();
    let mut m: u32 = cur.iter().sum();
    let mut val = 1.0;
    for i in 0..d {
        while cur[i] > 0 {
            val *= (cur[i] - 1) as f64 / (m + d as u32 - 2) as f64;
            cur[i] -= 2;
            m -= 2;
        }
    }
    val
}

/// Normalized ball moment b_mu int_{B^d} x^alpha (1-|x|^2)^mu dx for rational
/// mu > -1. Radial Beta-ratio times the sphere moment, all exact.
pub fn ball_monomial_moment(alpha: &[u32], mu: &BigRational) -> Result<BigRational> {
    let d = alpha.len();
    if *mu <= rat(-1) {
        return Err(Error::InvalidParameter(format!("mu must be > -1, got {}", mu)));
    }
    let s = sphere_monomial_moment(alpha);
    if Zero::is_zero(&s) {
        return Ok(BigRational::zero());
    }
    let m: u32 = alpha.iter().sum();
    let half_d = ratio(d as i64, 2);
    let mut radial = BigRational::one();
    for i in 0..(m / 2) {
        radial *= (&half_d + rat(i as i64)) / (&half_d + mu + rat(1 + i as i64));
    }
    Ok(s * radial)
}

/// Floating-point image of the same closed form, for arbitrary mu > -1.
pub fn ball_monomial_moment_f64(alpha: &[u32], mu: f64) -> f64 {
    let d = alpha.len();
    assert!(mu > -1.0);
    let s = sphere_monomial_moment_f64(alpha);
    if s == 0.0 {
        return 0.0;
    }
    let m: u32 = alpha.iter().sum();
    let half_d = d as f64 / 2.0;
    let mut radial = 1.0;
    for i in 0..(m / 2) {
        radial *= (half_d + i as f64) / (half_d + mu + 1.0 + i as f64);
    }
    s * radial
}

/// b_mu / b_{mu+1} = (mu + 1) / (mu + 1 + d/2).
pub fn b_mu_ratio(mu: &BigRational, d: usize) -> BigRational {
    let one_plus = mu + rat(1);
    &one_plus / (&one_plus + ratio(d as i64, 2))
}

/// b_mu = Gamma(mu + d/2 + 1) / (pi^{d/2} Gamma(mu + 1)), in doubles.
pub fn b_mu_f64(mu: f64, d: usize) -> f64 {
    use crate::util::ln_gamma;
    let half_d = d as f64 / 2.0;
    (ln_gamma(mu + half_d + 1.0) - half_d * std::f64::consts::PI.ln() - ln_gamma(mu + 1.0)).exp()
}

/// Precomputed table of exact normalized ball moments for all even exponent
/// vectors up to a total degree. Immutable after construction, shareable
/// across threads.
pub struct BallMoments {
    dim: usize,
    mu: BigRational,
    max_degree: u32,
    table: HashMap<Vec<u32>, BigRational>,
}

fn for_each_even_expo(dim: usize, max_degree: u32, f: &mut impl FnMut(&[u32])) {
    fn rec(cur: &mut Vec<u32>, slot: usize, left: u32, f: &mut impl FnMut(&[u32])) {
        if slot == cur.len() - 1 {
            let mut a = 0;
            while a <= left {
                cur[slot] = a;
                f(cur);
                a += 2;
            }
            cur[slot] = 0;
            return;
        }
        let mut a = 0;
        while a <= left {
            cur[slot] = a;
            rec(cur, slot + 1, left - a, f);
            a += 2;
        }
        cur[slot] = 0;
    }
    let mut cur = vec![0u32; dim];
    rec(&mut cur, 0, max_degree, f);
}

impl BallMoments {
    pub fn new(dim: usize, mu: &BigRational, max_degree: u32) -> Result<Self> {
        if *mu <= rat(-1) {
            return Err(Error::InvalidParameter(format!("mu must be > -1, got {}", mu)));
        }
        let mut table = HashMap::new();
        let mut err = None;
        for_each_even_expo(dim, max_degree, &mut |alpha| {
            if err.is_some() {
                return;
            }
            match ball_monomial_moment(alpha, mu) {
                Ok(v) => {
                    table.insert(alpha.to_vec(), v);
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(BallMoments { dim, mu: mu.clone(), max_degree, table })
    }

    pub fn mu(&self) -> &BigRational {
        &self.mu
    }

    pub fn moment(&self, alpha: &[u32]) -> BigRational {
        if alpha.iter().any(|&a| a % 2 == 1) {
            return BigRational::zero();
        }
        debug_assert!(alpha.iter().sum::<u32>() <= self.max_degree);
        self.table
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| ball_monomial_moment(alpha, &self.mu).expect("validated mu"))
    }

    /// Exact <p, q>_mu with the b_mu-normalized ball measure.
    pub fn ip(&self, p: &ExactPoly, q: &ExactPoly) -> Result<BigRational> {
        if p.dim() != q.dim() {
            return Err(Error::DimensionMismatch(p.dim(), q.dim()));
        }
        assert_eq!(p.dim(), self.dim);
        let mut acc = BigRational::zero();
        let mut e = vec![0u32; self.dim];
        for (ea, ca) in p.terms() {
            for (eb, cb) in q.terms() {
                for i in 0..self.dim {
                    e[i] = ea.0[i] + eb.0[i];
                }
                if e.iter().any(|&a| a % 2 == 1) {
                    continue;
                }
                acc += ca * cb * self.moment(&e);
            }
        }
        Ok(acc)
    }
}

/// Precomputed normalized sphere moments up to a total degree.
pub struct SphereMoments {
    dim: usize,
    max_degree: u32,
    table: HashMap<Vec<u32>, BigRational>,
}

impl SphereMoments {
    pub fn new(dim: usize, max_degree: u32) -> Self {
        let mut table = HashMap::new();
        for_each_even_expo(dim, max_degree, &mut |alpha| {
            table.insert(alpha.to_vec(), sphere_monomial_moment(alpha));
        });
        SphereMoments { dim, max_degree, table }
    }

    pub fn moment(&self, alpha: &[u32]) -> BigRational {
        if alpha.iter().any(|&a| a % 2 == 1) {
            return BigRational::zero();
        }
        debug_assert!(alpha.iter().sum::<u32>() <= self.max_degree);
        self.table
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| sphere_monomial_moment(alpha))
    }

    /// Exact (1/sigma) int_S p q dsigma.
    pub fn ip(&self, p: &ExactPoly, q: &ExactPoly) -> Result<BigRational> {
        if p.dim() != q.dim() {
            return Err(Error::DimensionMismatch(p.dim(), q.dim()));
        }
        assert_eq!(p.dim(), self.dim);
        let mut acc = BigRational::zero();
        let mut e = vec![0u32; self.dim];
        for (ea, ca) in p.terms() {
            for (eb, cb) in q.terms() {
                for i in 0..self.dim {
                    e[i] = ea.0[i] + eb.0[i];
                }
                if e.iter().any(|&a| a % 2 == 1) {
                    continue;
                }
                acc += ca * cb * self.moment(&e);
            }
        }
        Ok(acc)
    }
}

/// One-off exact inner product <p, q>_mu (convenience wrapper; builds no
/// table, so prefer [`BallMoments`] in loops).
pub fn exact_inner_product(p: &ExactPoly, q: &ExactPoly, mu: &BigRational) -> Result<BigRational> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    if *mu <= rat(-1) {
        return Err(Error::InvalidParameter(format!("mu must be > -1, got {}", mu)));
    }
    let mut acc = BigRational::zero();
    let d = p.dim();
    let mut e = vec![0u32; d];
    for (ea, ca) in p.terms() {
        for (eb, cb) in q.terms() {
            for i in 0..d {
                e[i] = ea.0[i] + eb.0[i];
            }
            if e.iter().any(|&a| a % 2 == 1) {
                continue;
            }
            acc += ca * cb * ball_monomial_moment(&e, mu)?;
        }
    }
    Ok(acc)
}

/// Exact gradient bilinear form b_mu int grad p . grad q (1-|x|^2)^{mu+1} dx.
/// Note the normalization pairs b_mu with the mu+1 weight.
pub fn exact_gradient_form(p: &ExactPoly, q: &ExactPoly, mu: &BigRational) -> Result<BigRational> {
    let d = p.dim();
    let mut acc = BigRational::zero();
    let mu1 = mu + rat(1);
    for axis in 0..d {
        acc += exact_inner_product(&p.diff(axis)?, &q.diff(axis)?, &mu1)?;
    }
    Ok(acc * b_mu_ratio(mu, d))
}

/// Exact angular bilinear form b_mu int sum_{i<j} D_ij p D_ij q (1-|x|^2)^mu dx.
pub fn exact_angular_form(p: &ExactPoly, q: &ExactPoly, mu: &BigRational) -> Result<BigRational> {
    let d = p.dim();
    let mut acc = BigRational::zero();
    for i in 0..d {
        for j in (i + 1)..d {
            acc += exact_inner_product(
                &p.angular_derivative(i, j)?,
                &q.angular_derivative(i, j)?,
                mu,
            )?;
        }
    }
    Ok(acc)
}

/// Is |p - q| elementwise below tol after conversion to doubles? For debugging
/// float paths against the oracle.
pub fn float_close(p: &FloatPoly, q: &FloatPoly, tol: f64) -> bool {
    if p.dim() != q.dim() {
        return false;
    }
    let diff = p.sub(q).unwrap();
    let ok = diff.terms().all(|(_, c)| c.abs() <= tol);
    ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(dim: usize, i: usize) -> ExactPoly {
        ExactPoly::var(dim, i)
    }

    #[test]
    fn arithmetic_examples() {
        let x1 = x(2, 0);
        let x2 = x(2, 1);
        // x1 * x1 = x1^2
        assert_eq!(x1.mul(&x1).unwrap(), ExactPoly::monomial(2, vec![2, 0], rat(1)));
        // p - p = 0
        let p = x1.mul(&x2).unwrap().add(&x2.pow(3)).unwrap();
        assert!(p.sub(&p).unwrap().is_zero());
        // (x1^2 - x2^2)(x1^2 + x2^2) = x1^4 - x2^4
        let a = x1.pow(2).sub(&x2.pow(2)).unwrap();
        let b = x1.pow(2).add(&x2.pow(2)).unwrap();
        let expect = x1.pow(4).sub(&x2.pow(4)).unwrap();
        assert_eq!(a.mul(&b).unwrap(), expect);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = x(2, 0);
        let q = x(3, 0);
        assert!(matches!(p.add(&q), Err(Error::DimensionMismatch(2, 3))));
        assert!(matches!(p.mul(&q), Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn diff_examples() {
        let x1 = x(2, 0);
        assert_eq!(x1.pow(2).diff(0).unwrap(), x1.scale(&rat(2)));
        assert!(x1.diff(1).unwrap().is_zero());
        // d/dx1 (x1^2 x2^3) = 2 x1 x2^3
        let p = ExactPoly::monomial(2, vec![2, 3], rat(1));
        assert_eq!(p.diff(0).unwrap(), ExactPoly::monomial(2, vec![1, 3], rat(2)));
        assert!(matches!(x1.diff(5), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn laplacian_and_angular_examples() {
        let x1 = x(2, 0);
        let x2 = x(2, 1);
        let r2 = x1.pow(2).add(&x2.pow(2)).unwrap();
        assert_eq!(r2.laplacian(), ExactPoly::constant(2, rat(4)));
        // D_{1,2} x1 = -x2
        assert_eq!(x1.angular_derivative(0, 1).unwrap(), x2.neg());
        // harmonic: Delta(x2^2 - x1^2) = 0
        assert!(x2.pow(2).sub(&x1.pow(2)).unwrap().laplacian().is_zero());
    }

    #[test]
    fn sphere_moment_examples() {
        assert_eq!(sphere_monomial_moment(&[0, 0]), rat(1));
        assert_eq!(sphere_monomial_moment(&[1, 0]), rat(0));
        assert_eq!(sphere_monomial_moment(&[2, 0]), ratio(1, 2));
        // d=3 spot values: <xi_3^2> = 1/3, <xi_1^2 xi_2^2> = 1/15
        assert_eq!(sphere_monomial_moment(&[0, 0, 2]), ratio(1, 3));
        assert_eq!(sphere_monomial_moment(&[2, 2, 0]), ratio(1, 15));
    }

    #[test]
    fn sphere_moment_f64_matches_exact() {
        for alpha in [
            vec![0u32, 0],
            vec![2, 0],
            vec![4, 2],
            vec![0, 0, 2],
            vec![2, 2, 2],
            vec![6, 0, 4],
            vec![8, 2, 0, 4],
        ] {
            let exact = Coeff::as_f64(&sphere_monomial_moment(&alpha));
            let fl = sphere_monomial_moment_f64(&alpha);
            assert!((exact - fl).abs() <= 1e-14 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn ball_moment_examples() {
        let mu0 = rat(0);
        assert_eq!(ball_monomial_moment(&[0, 0], &mu0).unwrap(), rat(1));
        assert_eq!(ball_monomial_moment(&[2, 0], &mu0).unwrap(), ratio(1, 4));
        assert_eq!(ball_monomial_moment(&[1, 1], &ratio(7, 3)).unwrap(), rat(0));
        assert!(ball_monomial_moment(&[0, 0], &rat(-2)).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let x1 = x(2, 0);
        let x2 = x(2, 1);
        let one = ExactPoly::one(2);
        let mu0 = rat(0);
        assert_eq!(exact_inner_product(&one, &one, &ratio(5, 7)).unwrap(), rat(1));
        assert_eq!(exact_inner_product(&x1, &x2, &mu0).unwrap(), rat(0));
        assert_eq!(exact_inner_product(&x1, &x1, &mu0).unwrap(), ratio(1, 4));
        // symmetry matches the moment table path
        let bm = BallMoments::new(2, &mu0, 8).unwrap();
        let p = x1.pow(2).sub(&x2.pow(2)).unwrap();
        let q = x1.mul(&x2).unwrap().add(&x2.pow(2)).unwrap();
        assert_eq!(bm.ip(&p, &q).unwrap(), bm.ip(&q, &p).unwrap());
        assert_eq!(bm.ip(&p, &q).unwrap(), exact_inner_product(&p, &q, &mu0).unwrap());
    }

    #[test]
    fn angular_derivative_annihilates_radial_polynomials() {
        for d in 2..=4usize {
            let mut r2 = ExactPoly::zero(d);
            for i in 0..d {
                r2 = r2.add(&x(d, i).pow(2)).unwrap();
            }
            // q(|x|^2) = 3 (|x|^2)^3 - |x|^2 + 5
            let q = r2
                .pow(3)
                .scale(&rat(3))
                .sub(&r2)
                .unwrap()
                .add(&ExactPoly::constant(d, rat(5)))
                .unwrap();
            for i in 0..d {
                for j in (i + 1)..d {
                    assert!(q.angular_derivative(i, j).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn green_type_consistency_on_fixtures() {
        // b_mu int grad p . grad q w_{mu+1} = -b_mu int q [(1-|x|^2) Lap - 2(mu+1) x.grad] p w_mu
        let fixtures: Vec<(ExactPoly, ExactPoly)> = vec![
            (x(2, 0).pow(3), x(2, 1).pow(2)),
            (
                x(2, 0).pow(2).mul(&x(2, 1)).unwrap(),
                x(2, 0).add(&x(2, 1).pow(3)).unwrap(),
            ),
            (x(3, 0).mul(&x(3, 2)).unwrap(), x(3, 1).pow(4)),
        ];
        for mu in [rat(0), rat(1), ratio(1, 2)] {
            for (p, q) in &fixtures {
                let d = p.dim();
                let lhs = exact_gradient_form(p, q, &mu).unwrap();
                let mut r2 = ExactPoly::zero(d);
                for i in 0..d {
                    r2 = r2.add(&ExactPoly::var(d, i).pow(2)).unwrap();
                }
                let one_minus = ExactPoly::one(d).sub(&r2).unwrap();
                let op = one_minus
                    .mul(&p.laplacian())
                    .unwrap()
                    .sub(&p.x_dot_grad().scale(&(rat(2) * (&mu + rat(1)))))
                    .unwrap();
                let rhs = -exact_inner_product(&op, q, &mu).unwrap();
                assert_eq!(lhs, rhs, "Green consistency failed at mu={}", mu);
            }
        }
    }

    #[test]
    fn subst_univariate_composes() {
        // p(t) = 2t^2 - 1 composed with q = x1 + x2^2
        let t = ExactPoly::var(1, 0);
        let p = t.pow(2).scale(&rat(2)).sub(&ExactPoly::one(1)).unwrap();
        let q = x(2, 0).add(&x(2, 1).pow(2)).unwrap();
        let composed = p.subst_univariate(&q);
        let direct = q.mul(&q).unwrap().scale(&rat(2)).sub(&ExactPoly::one(2)).unwrap();
        assert_eq!(composed, direct);
    }

    #[test]
    fn positivity_of_inner_product() {
        let p = x(3, 0)
            .pow(2)
            .sub(&x(3, 1).mul(&x(3, 2)).unwrap())
            .unwrap()
            .add(&ExactPoly::constant(3, ratio(1, 3)))
            .unwrap();
        let v = exact_inner_product(&p, &p, &ratio(1, 2)).unwrap();
        assert!(v > rat(0));
    }
}
