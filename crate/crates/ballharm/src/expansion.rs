//! Fourier orthogonal expansion over the ball basis: coefficient tables,
//! partial sums, best-approximation errors through Parseval, the index
//! shift/scale maps induced by the Laplacian and Laplace-Beltrami operators,
//! and exact commuting checks between derivatives and partial-sum operators.

use std::io::Write;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::ballbasis::{
    ball_basis_exact, beltrami_eigen, h_norm, h_norm_exact, kappa, BallBasisIndex,
};
use crate::error::{Error, Result};
use crate::polyalg::{rat, BallMoments, ExactPoly, SphereMoments};
use crate::quadrature::BallQuadrature;
use crate::spherical::{harmonic_basis, sphere_norm_with, HarmonicIndex, HarmonicTable};
use crate::util::{pairwise_reduce_vecs, pairwise_sum};

/// Reliability floor for E_n^2 relative to |f|^2: below this the Parseval
/// subtraction is cancellation noise in doubles.
pub const CANCELLATION_FLOOR: f64 = 1e-13;

/// One basis slot: degree, radial index, and the position of the spherical
/// index in the harmonic table.
#[derive(Clone, Copy, Debug)]
pub struct BasisEntry {
    pub n: u32,
    pub j: u32,
    pub nu_pos: u32,
}

/// All Fourier coefficients of a function through degree n_max, with cached
/// norms and the quadrature provenance. Immutable after construction.
pub struct CoefficientTable {
    pub d: usize,
    pub mu: f64,
    pub n_max: u32,
    pub exact_degree: u32,
    pub f_norm_sq: f64,
    harmonics: Arc<HarmonicTable>,
    h_nu: Vec<f64>,
    entries: Vec<BasisEntry>,
    coeffs: Vec<f64>,
    norms: Vec<f64>,
}

/// A measured best-approximation error with its trust diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct BestError {
    pub value: f64,
    pub sq: f64,
    /// Parseval mass sitting in the last five table degrees.
    pub tail_guard: f64,
    /// True when the value is above both the cancellation floor and the
    /// truncation guard.
    pub reliable: bool,
}

fn basis_entries(harmonics: &HarmonicTable, n_max: u32) -> Vec<BasisEntry> {
    let mut entries = Vec::new();
    for n in 0..=n_max {
        for j in 0..=(n / 2) {
            for &pos in harmonics.positions_of_degree(n - 2 * j) {
                entries.push(BasisEntry { n, j, nu_pos: pos });
            }
        }
    }
    entries
}

/// Evaluate P_0..P_jmax of one Jacobi family at t in a single recurrence pass.
fn jacobi_sequence(jmax: u32, alpha: f64, beta: f64, t: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if jmax == 0 {
        return;
    }
    out.push(0.5 * (alpha + beta + 2.0) * t + 0.5 * (alpha - beta));
    for k in 2..=jmax {
        let k = k as f64;
        let c0 = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0);
        let c1 = (2.0 * k + alpha + beta - 1.0) * (alpha * alpha - beta * beta);
        let c2 = (2.0 * k + alpha + beta - 1.0)
            * (2.0 * k + alpha + beta)
            * (2.0 * k + alpha + beta - 2.0);
        let c3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta);
        let v = ((c1 + c2 * t) * out[out.len() - 1] - c3 * out[out.len() - 2]) / c0;
        out.push(v);
    }
}

/// Expand f through degree n_max against the rule's weight. Deterministic:
/// fixed angular chunking with pairwise merges, fixed radial reduction tree.
pub fn expand<F>(f: &F, n_max: u32, rule: &BallQuadrature) -> Result<CoefficientTable>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = rule.d;
    if rule.exact_degree < 2 * n_max {
        return Err(Error::InsufficientQuadrature { have: rule.exact_degree, need: 2 * n_max });
    }
    let harmonics = Arc::new(HarmonicTable::new(d, n_max));
    let nh = harmonics.len();
    let n_rad = rule.radial_r.len();
    let n_ang = rule.num_angular();

    // Stage 1: angular transforms A[i][nu] = sum_a w_a f(r_i xi_a) Y_nu(xi_a),
    // plus sphere norms h_nu = sum_a w_a Y_nu^2 and radial slices of |f|^2.
    const CHUNK: usize = 512;
    let n_chunks = n_ang.div_ceil(CHUNK);
    let part_len = n_rad * nh + nh + n_rad;
    let partials: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n_ang);
            let mut part = vec![0.0; part_len];
            let (a_block, rest) = part.split_at_mut(n_rad * nh);
            let (hn_block, f2_block) = rest.split_at_mut(nh);
            let mut yvec = vec![0.0; nh];
            let mut point = vec![0.0; d];
            for a in lo..hi {
                let xi = rule.angular_node(a);
                let wa = rule.angular_w[a];
                harmonics.eval_all(xi, &mut yvec);
                for (h, y) in hn_block.iter_mut().zip(&yvec) {
                    *h += wa * y * y;
                }
                for (i, &r) in rule.radial_r.iter().enumerate() {
                    for (p, &c) in point.iter_mut().zip(xi) {
                        *p = r * c;
                    }
                    let fv = f(&point);
                    f2_block[i] += wa * fv * fv;
                    let wf = wa * fv;
                    let row = &mut a_block[i * nh..(i + 1) * nh];
                    for (acc, &y) in row.iter_mut().zip(&yvec) {
                        *acc += wf * y;
                    }
                }
            }
            part
        })
        .collect();
    let merged = pairwise_reduce_vecs(partials);
    let (a_all, rest) = merged.split_at(n_rad * nh);
    let (h_nu, f2) = rest.split_at(nh);
    let h_nu = h_nu.to_vec();

    let f_norm_vals: Vec<f64> = rule
        .radial_w
        .iter()
        .zip(f2)
        .map(|(&w, &v)| w * v)
        .collect();
    let f_norm_sq = pairwise_sum(&f_norm_vals);

    // Stage 2: radial combination per basis entry.
    let entries = basis_entries(&harmonics, n_max);
    let half = (d as f64 - 2.0) / 2.0;
    let contribs: Vec<Vec<f64>> = (0..n_rad)
        .into_par_iter()
        .map(|i| {
            let r = rule.radial_r[i];
            let w = rule.radial_w[i];
            let t = 2.0 * r * r - 1.0;
            let mut rpow = vec![1.0; n_max as usize + 1];
            for m in 1..=n_max as usize {
                rpow[m] = rpow[m - 1] * r;
            }
            // jac[m][j] = P_j^{(mu, m + half)}(t)
            let mut jac: Vec<Vec<f64>> = Vec::with_capacity(n_max as usize + 1);
            let mut scratch = Vec::new();
            for m in 0..=n_max {
                jacobi_sequence((n_max - m) / 2, rule.mu, m as f64 + half, t, &mut scratch);
                jac.push(scratch.clone());
            }
            let a_row = &a_all[i * nh..(i + 1) * nh];
            entries
                .iter()
                .map(|e| {
                    let m = (e.n - 2 * e.j) as usize;
                    w * jac[m][e.j as usize] * rpow[m] * a_row[e.nu_pos as usize]
                })
                .collect()
        })
        .collect();
    let raw = pairwise_reduce_vecs(contribs);

    let mut coeffs = Vec::with_capacity(entries.len());
    let mut norms = Vec::with_capacity(entries.len());
    for (e, &rv) in entries.iter().zip(&raw) {
        let h = h_norm(rule.mu, e.n, e.j, d)?;
        let hn = h_nu[e.nu_pos as usize];
        coeffs.push(rv / (hn.sqrt() * h));
        norms.push(h);
    }

    Ok(CoefficientTable {
        d,
        mu: rule.mu,
        n_max,
        exact_degree: rule.exact_degree,
        f_norm_sq,
        harmonics,
        h_nu,
        entries,
        coeffs,
        norms,
    })
}

impl CoefficientTable {
    pub fn entries(&self) -> &[BasisEntry] {
        &self.entries
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn harmonics(&self) -> &HarmonicTable {
        &self.harmonics
    }

    pub fn nu_of(&self, entry: &BasisEntry) -> &HarmonicIndex {
        &self.harmonics.indices()[entry.nu_pos as usize]
    }

    pub fn find(&self, n: u32, j: u32, nu: &HarmonicIndex) -> Option<usize> {
        self.entries.iter().position(|e| {
            e.n == n && e.j == j && self.nu_of(e) == nu
        })
    }

    /// Parseval mass per degree: sums[m] = sum over degree-m slots of f^2 h.
    fn degree_mass(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_max as usize + 1];
        for ((e, &c), &h) in self.entries.iter().zip(&self.coeffs).zip(&self.norms) {
            sums[e.n as usize] += c * c * h;
        }
        sums
    }

    pub fn parseval_residual(&self) -> f64 {
        self.f_norm_sq - self.degree_mass().iter().sum::<f64>()
    }

    /// E_n for all n through n_max in one pass.
    pub fn best_errors(&self) -> Vec<BestError> {
        let sums = self.degree_mass();
        let tail_lo = self.n_max.saturating_sub(5) as usize;
        let tail_guard: f64 = sums[tail_lo..].iter().sum();
        let mut out = Vec::with_capacity(sums.len());
        let mut partial = 0.0;
        for m in 0..sums.len() {
            partial += sums[m];
            let sq = (self.f_norm_sq - partial).max(0.0);
            let reliable =
                sq >= CANCELLATION_FLOOR * self.f_norm_sq && tail_guard < 0.01 * sq;
            out.push(BestError { value: sq.sqrt(), sq, tail_guard, reliable });
        }
        out
    }

    /// E_n = inf over polynomials of degree <= n of |f - p|_mu, through
    /// Parseval: sqrt(|f|^2 - sum_{m<=n} |f^|^2 h), clamped at zero.
    pub fn best_error(&self, n: u32) -> Result<BestError> {
        if n > self.n_max {
            return Err(Error::InvalidParameter(format!(
                "best_error degree {n} exceeds table degree {}",
                self.n_max
            )));
        }
        Ok(self.best_errors()[n as usize])
    }

    /// Evaluate the partial sum S_n f at a point.
    pub fn partial_sum_eval(&self, n: u32, x: &[f64]) -> Result<f64> {
        if n > self.n_max {
            return Err(Error::InvalidParameter(format!(
                "partial sum degree {n} exceeds table degree {}",
                self.n_max
            )));
        }
        let d = self.d;
        if x.len() != d {
            return Err(Error::DimensionMismatch(x.len(), d));
        }
        let mut yvals = vec![0.0; self.harmonics.len()];
        self.harmonics.eval_all(x, &mut yvals);
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let t = 2.0 * r2 - 1.0;
        let half = (d as f64 - 2.0) / 2.0;
        let mut jac: Vec<Vec<f64>> = Vec::with_capacity(self.n_max as usize + 1);
        let mut scratch = Vec::new();
        for m in 0..=self.n_max {
            jacobi_sequence((self.n_max - m) / 2, self.mu, m as f64 + half, t, &mut scratch);
            jac.push(scratch.clone());
        }
        let vals: Vec<f64> = self
            .entries
            .iter()
            .zip(&self.coeffs)
            .filter(|(e, _)| e.n <= n)
            .map(|(e, &c)| {
                let m = (e.n - 2 * e.j) as usize;
                // Y evaluated at x is homogeneous, so the r^m factor is built in
                c * jac[m][e.j as usize] * yvals[e.nu_pos as usize]
                    / self.h_nu[e.nu_pos as usize].sqrt()
            })
            .collect();
        Ok(pairwise_sum(&vals))
    }

    /// Coefficient table of the Laplacian image at weight mu + 2, degree
    /// n_max - 2, produced by the index shift/scale map.
    pub fn laplacian_map(&self) -> Result<CoefficientTable> {
        if self.n_max < 2 {
            return Err(Error::InvalidParameter(
                "laplacian_map needs a table of degree >= 2".into(),
            ));
        }
        let d = self.d;
        let new_max = self.n_max - 2;
        let harmonics = Arc::new(HarmonicTable::new(d, new_max));
        // per-degree rank -> position maps for the source harmonic table
        let entries = basis_entries(&harmonics, new_max);
        let mut h_nu = vec![0.0; harmonics.len()];
        for m in 0..=new_max {
            let src = self.harmonics.positions_of_degree(m);
            let dst = harmonics.positions_of_degree(m);
            for (&sp, &dp) in src.iter().zip(dst) {
                h_nu[dp as usize] = self.h_nu[sp as usize];
            }
        }
        let mu2 = self.mu + 2.0;
        let mut coeffs = Vec::with_capacity(entries.len());
        let mut norms = Vec::with_capacity(entries.len());
        for e in &entries {
            let m = e.n - 2 * e.j;
            // source slot (n+2, j+1) with the same spherical index
            let src_rank = harmonics.positions_of_degree(m)
                .iter()
                .position(|&p| p == e.nu_pos)
                .expect("rank defined");
            let src_pos = self.harmonics.positions_of_degree(m)[src_rank];
            let src_idx = self
                .entries
                .iter()
                .position(|s| s.n == e.n + 2 && s.j == e.j + 1 && s.nu_pos == src_pos)
                .expect("source entry present");
            let c = kappa(e.n - e.j + 1, self.mu, d) * self.coeffs[src_idx];
            coeffs.push(c);
            norms.push(h_norm(mu2, e.n, e.j, d)?);
        }
        let f_norm_sq = coeffs
            .iter()
            .zip(&norms)
            .map(|(&c, &h)| c * c * h)
            .sum();
        Ok(CoefficientTable {
            d,
            mu: mu2,
            n_max: new_max,
            exact_degree: self.exact_degree,
            f_norm_sq,
            harmonics,
            h_nu,
            entries,
            coeffs,
            norms,
        })
    }

    /// Coefficient table of the Laplace-Beltrami image at the same weight:
    /// a diagonal scale by the eigenvalue of each slot.
    pub fn beltrami_map(&self) -> CoefficientTable {
        let coeffs: Vec<f64> = self
            .entries
            .iter()
            .zip(&self.coeffs)
            .map(|(e, &c)| beltrami_eigen(e.n, e.j, self.d) * c)
            .collect();
        let f_norm_sq = coeffs.iter().zip(&self.norms).map(|(&c, &h)| c * c * h).sum();
        CoefficientTable {
            d: self.d,
            mu: self.mu,
            n_max: self.n_max,
            exact_degree: self.exact_degree,
            f_norm_sq,
            harmonics: self.harmonics.clone(),
            h_nu: self.h_nu.clone(),
            entries: self.entries.clone(),
            coeffs,
            norms: self.norms.clone(),
        }
    }

    /// CSV serialization: a comment header with the table metadata, the
    /// coefficient rows, and a trailing Parseval check line.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "# d={},mu={},N={},exact_degree={}",
            self.d, self.mu, self.n_max, self.exact_degree
        )?;
        writeln!(w, "n,j,nu,coeff,h")?;
        for ((e, &c), &h) in self.entries.iter().zip(&self.coeffs).zip(&self.norms) {
            writeln!(w, "{},{},{},{},{}", e.n, e.j, self.nu_of(e).encode(), c, h)?;
        }
        writeln!(w, "# parseval_residual={}", self.parseval_residual())?;
        Ok(())
    }
}

/// Literal norm quotient h_{j,m}^mu / h_{j-s,m-2s}^{mu+2s}.
pub fn h_ratio(mu: f64, s: u32, j: u32, m: u32, d: usize) -> Result<f64> {
    if j < s || m < 2 * s || 2 * j > m {
        return Err(Error::InvalidParameter(format!(
            "h_ratio needs j >= s, m >= 2s, 2j <= m; got j={j}, m={m}, s={s}"
        )));
    }
    Ok(h_norm(mu, m, j, d)? / h_norm(mu + 2.0 * s as f64, m - 2 * s, j - s, d)?)
}

pub fn h_ratio_exact(mu: &BigRational, s: u32, j: u32, m: u32, d: usize) -> BigRational {
    h_norm_exact(mu, m, j, d) / h_norm_exact(&(mu + rat(2 * s as i64)), m - 2 * s, j - s, d)
}

/// The ratio as printed in its source: a product of Pochhammer quotients.
/// Differs from the literal quotient by the factor
/// (m - j + mu + d/2) / (m - j + s + mu + d/2); kept for the documentation
/// tests.
pub fn h_ratio_printed_product(mu: f64, s: u32, j: u32, m: u32, d: usize) -> f64 {
    use crate::util::pochhammer;
    let half_d = d as f64 / 2.0;
    let num = pochhammer(mu + 1.0, 2 * s)
        * pochhammer((m - j - s) as f64 + half_d, s)
        * pochhammer(mu + (m - j) as f64 + half_d + 1.0, s);
    let den = pochhammer(mu + half_d + 1.0, 2 * s)
        * pochhammer((j - s) as f64 + 1.0, s)
        * pochhammer(j as f64 + mu + 1.0, s);
    num / den
}

// ---------------------------------------------------------------------------
// Exact expansion path (rational arithmetic end to end)
// ---------------------------------------------------------------------------

/// Exact Fourier coefficients of a polynomial with respect to the
/// unnormalized-Y basis, through degree n_max.
pub fn exact_coefficients(
    f: &ExactPoly,
    mu: &BigRational,
    n_max: u32,
) -> Result<Vec<(BallBasisIndex, BigRational)>> {
    let d = f.dim();
    let n_max = n_max.min(f.degree().max(0) as u32);
    let moments = BallMoments::new(d, mu, n_max + f.degree().max(0) as u32)?;
    let sphere = SphereMoments::new(d, 2 * n_max);
    let mut out = Vec::new();
    for n in 0..=n_max {
        for j in 0..=(n / 2) {
            for nu in crate::spherical::enumerate_degree(d, n - 2 * j) {
                let idx = BallBasisIndex::new(n, j, nu.clone())?;
                let p = ball_basis_exact(&idx, mu);
                let ip = moments.ip(f, &p)?;
                if Zero::is_zero(&ip) {
                    continue;
                }
                let h = h_norm_exact(mu, n, j, d);
                let hn = sphere_norm_with(&sphere, &harmonic_basis(&nu));
                out.push((idx, ip / (h * hn)));
            }
        }
    }
    Ok(out)
}

/// Exact partial sum S_n f of a polynomial.
pub fn exact_partial_sum(f: &ExactPoly, mu: &BigRational, n: u32) -> Result<ExactPoly> {
    let d = f.dim();
    let mut acc = ExactPoly::zero(d);
    for (idx, c) in exact_coefficients(f, mu, n)? {
        acc = acc.add(&ball_basis_exact(&idx, mu).scale(&c))?;
    }
    Ok(acc)
}

/// Exact residual of the derivative commuting relation:
/// d_i S_n^mu f - S_{n-1}^{mu+1} (d_i f). Contractually zero.
pub fn partial_commuting_residual(
    f: &ExactPoly,
    mu: &BigRational,
    n: u32,
    axis: usize,
) -> Result<ExactPoly> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    let lhs = exact_partial_sum(f, mu, n)?.diff(axis)?;
    let rhs = exact_partial_sum(&f.diff(axis)?, &(mu + rat(1)), n - 1)?;
    lhs.sub(&rhs)
}

/// Exact residual of the angular commuting relation:
/// D_ij S_n^mu f - S_n^mu (D_ij f). Contractually zero.
pub fn angular_commuting_residual(
    f: &ExactPoly,
    mu: &BigRational,
    n: u32,
    i: usize,
    j: usize,
) -> Result<ExactPoly> {
    let lhs = exact_partial_sum(f, mu, n)?.angular_derivative(i, j)?;
    let rhs = exact_partial_sum(&f.angular_derivative(i, j)?, mu, n)?;
    lhs.sub(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::ratio;
    use crate::quadrature::build_ball_rule;
    use approx::assert_relative_eq;

    fn hi(comps: &[u32]) -> HarmonicIndex {
        HarmonicIndex::new(comps.to_vec()).unwrap()
    }

    #[test]
    fn expanding_a_basis_element_gives_a_unit_table() {
        let rule = build_ball_rule(2, 0.5, 24).unwrap();
        let mu_r = ratio(1, 2);
        let idx = BallBasisIndex::new(3, 1, hi(&[0, 1])).unwrap();
        let p = ball_basis_exact(&idx, &mu_r);
        let h_nu = crate::spherical::sphere_norm(&idx.nu);
        let h_nu_f = num_traits::ToPrimitive::to_f64(&h_nu).unwrap();
        let f = move |x: &[f64]| p.eval_f64(x) / h_nu_f.sqrt();
        let table = expand(&f, 8, &rule).unwrap();
        for (e, &c) in table.entries().iter().zip(table.coeffs()) {
            let expect = if e.n == 3 && e.j == 1 && table.nu_of(e) == &idx.nu {
                1.0
            } else {
                0.0
            };
            assert!(
                (c - expect).abs() < 1e-11,
                "coefficient at ({}, {}, {:?}) = {c}",
                e.n,
                e.j,
                table.nu_of(e)
            );
        }
    }

    #[test]
    fn norm_sq_table_example() {
        // f = |x|^2 in d=2, mu=0: coefficients 1/2 at (0,0) and 1/2 at (2,1)
        let rule = build_ball_rule(2, 0.0, 20).unwrap();
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let table = expand(&f, 6, &rule).unwrap();
        for (e, &c) in table.entries().iter().zip(table.coeffs()) {
            let expect = match (e.n, e.j) {
                (0, 0) => 0.5,
                (2, 1) => 0.5,
                _ => 0.0,
            };
            assert!((c - expect).abs() < 1e-12, "({}, {}) -> {c}", e.n, e.j);
        }
        // E_1 = sqrt(1/12), E_2 = 0
        let e1 = table.best_error(1).unwrap();
        assert_relative_eq!(e1.value, (1.0f64 / 12.0).sqrt(), epsilon = 1e-10);
        let e2 = table.best_error(2).unwrap();
        assert!(e2.value.abs() < 1e-10);
        // degree-2 polynomial: all higher coefficients vanish
        for (e, &c) in table.entries().iter().zip(table.coeffs()) {
            if e.n > 2 {
                assert!(c.abs() < 1e-11);
            }
        }
    }

    #[test]
    fn partial_sum_reproduces_polynomials() {
        let rule = build_ball_rule(2, 1.0, 24).unwrap();
        let f = |x: &[f64]| 1.0 + x[0] - 2.0 * x[1] * x[1] + 0.5 * x[0] * x[0] * x[1];
        let table = expand(&f, 8, &rule).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..12 {
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = rng.gen_range(0.0..1.0f64).sqrt();
            let x = [r * th.cos(), r * th.sin()];
            assert_relative_eq!(
                table.partial_sum_eval(8, &x).unwrap(),
                f(&x),
                epsilon = 1e-9,
                max_relative = 1e-9
            );
        }
        // n = 0 partial sum is the weighted mean (the 0th coefficient)
        let c0 = table.coeffs()[0];
        assert_relative_eq!(
            table.partial_sum_eval(0, &[0.3, -0.2]).unwrap(),
            c0,
            epsilon = 1e-12
        );
        assert!(table.partial_sum_eval(9, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn best_error_monotone_and_parseval() {
        let rule = build_ball_rule(2, 0.0, 44).unwrap();
        let f = |x: &[f64]| (x[0] + x[1]).exp();
        let table = expand(&f, 12, &rule).unwrap();
        let errs = table.best_errors();
        for w in errs.windows(2) {
            assert!(w[1].value <= w[0].value + 1e-12, "monotonicity");
        }
        // Parseval consistency for a smooth function at modest degree
        assert!(table.parseval_residual() >= -1e-10 * table.f_norm_sq);
    }

    #[test]
    fn insufficient_rule_degree_is_a_hard_error() {
        let rule = build_ball_rule(2, 0.0, 10).unwrap();
        let f = |_: &[f64]| 1.0;
        assert!(matches!(
            expand(&f, 6, &rule),
            Err(Error::InsufficientQuadrature { .. })
        ));
    }

    #[test]
    fn laplacian_map_on_norm_sq() {
        // f = |x|^2, d=2, mu=0: Delta f = 4; the mapped table must be the
        // constant table with coefficient kappa_1^0 * 1/2 = 4 at slot (0,0)
        let rule = build_ball_rule(2, 0.0, 20).unwrap();
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let table = expand(&f, 6, &rule).unwrap();
        let lap = table.laplacian_map().unwrap();
        assert_eq!(lap.mu, 2.0);
        for (e, &c) in lap.entries().iter().zip(lap.coeffs()) {
            let expect = if e.n == 0 { 4.0 } else { 0.0 };
            assert!((c - expect).abs() < 1e-10, "({}, {}) -> {c}", e.n, e.j);
        }
    }

    #[test]
    fn delta_fourier_maps_match_independent_expansion() {
        // analytic test functions at N = 20 per the coefficient-map contract
        for d in [2usize, 3] {
            let n_max = 14u32; // full N = 20 is covered by the acceptance run
            let rule0 = build_ball_rule(d, 0.0, 2 * n_max + 20).unwrap();
            let rule2 = build_ball_rule(d, 2.0, 2 * n_max + 20).unwrap();
            let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().exp();
            let table = expand(&f, n_max, &rule0).unwrap();
            let lap_mapped = table.laplacian_map().unwrap();
            // Delta exp(|x|^2) = (4|x|^2 + 2d) exp(|x|^2)
            let lap_f = move |x: &[f64]| {
                let r2 = x.iter().map(|v| v * v).sum::<f64>();
                (4.0 * r2 + 2.0 * d as f64) * r2.exp()
            };
            let lap_direct = expand(&lap_f, n_max - 2, &rule2).unwrap();
            for (e, (&cm, &cd)) in lap_mapped
                .entries()
                .iter()
                .zip(lap_mapped.coeffs().iter().zip(lap_direct.coeffs()))
            {
                assert!(
                    (cm - cd).abs() < 1e-9,
                    "coefficient map mismatch at ({}, {}) in d={d}: {cm} vs {cd}",
                    e.n,
                    e.j
                );
            }
            // radial function: Beltrami image is identically zero
            let bel = table.beltrami_map();
            for &c in bel.coeffs() {
                assert!(c.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn beltrami_map_scales_by_eigenvalue() {
        let rule = build_ball_rule(2, 0.0, 24).unwrap();
        let f = |x: &[f64]| (x[0] + 2.0 * x[1]).exp();
        let table = expand(&f, 8, &rule).unwrap();
        let bel = table.beltrami_map();
        for ((e, &c), &cb) in table.entries().iter().zip(table.coeffs()).zip(bel.coeffs()) {
            let lam = beltrami_eigen(e.n, e.j, 2);
            assert_relative_eq!(cb, lam * c, epsilon = 1e-14);
        }
    }

    #[test]
    fn h_ratio_worked_values_literal_vs_printed_product() {
        // literal quotient of the two closed-form norms is 1/3 at
        // (d, mu, m, j, s) = (2, 0, 4, 2, 1); the printed product form gives
        // 4/9 instead, the omitted factor being (m-j+mu+d/2)/(m-j+s+mu+d/2)
        let lit = h_ratio(0.0, 1, 2, 4, 2).unwrap();
        assert_relative_eq!(lit, 1.0 / 3.0, epsilon = 1e-14);
        assert_eq!(h_ratio_exact(&rat(0), 1, 2, 4, 2), ratio(1, 3));
        let printed = h_ratio_printed_product(0.0, 1, 2, 4, 2);
        assert_relative_eq!(printed, 4.0 / 9.0, epsilon = 1e-14);
        let omitted = (4.0 - 2.0 + 0.0 + 1.0) / (4.0 - 2.0 + 1.0 + 0.0 + 1.0);
        assert_relative_eq!(lit, printed * omitted, epsilon = 1e-14);
        // s = 0 is the trivial ratio
        assert_relative_eq!(h_ratio(0.7, 0, 1, 3, 3).unwrap(), 1.0, epsilon = 1e-15);
        assert!(h_ratio(0.0, 2, 1, 10, 2).is_err());
    }

    #[test]
    fn h_ratio_bounded_on_inner_band() {
        // ratio stays bounded by a parameter-set constant for j in [m/4, m/2]
        for d in [2usize, 3] {
            for mu in [0.0, 1.0] {
                for s in [1u32, 2] {
                    let mut global_max: f64 = 0.0;
                    for m in (4 * s..=200).step_by(4) {
                        let mut local: f64 = 0.0;
                        for j in (m / 4).max(s)..=(m / 2) {
                            local = local.max(h_ratio(mu, s, j, m, d).unwrap());
                        }
                        global_max = global_max.max(local);
                    }
                    assert!(
                        global_max < 16.0,
                        "h-ratio band bound exceeded: {global_max} at d={d}, mu={mu}, s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_commuting_examples() {
        // f = x1^4 in d=2, mu=0, n=2: derivative relation has zero residual
        let f = ExactPoly::var(2, 0).pow(4);
        let res = partial_commuting_residual(&f, &rat(0), 2, 0).unwrap();
        assert!(res.is_zero(), "residual {res}");
        // angular version on f = x1^3 x2, n = 2
        let f = ExactPoly::var(2, 0)
            .pow(3)
            .mul(&ExactPoly::var(2, 1))
            .unwrap();
        let res = angular_commuting_residual(&f, &rat(0), 2, 0, 1).unwrap();
        assert!(res.is_zero(), "residual {res}");
        // f inside Pi_n: both sides are d_i f
        let f = ExactPoly::var(2, 0).pow(2);
        let s = exact_partial_sum(&f, &ratio(1, 2), 4).unwrap();
        assert_eq!(s, f);
    }

    #[test]
    fn csv_round_trip_bytes_are_deterministic() {
        let rule = build_ball_rule(2, 0.0, 16).unwrap();
        let f = |x: &[f64]| (x[0] * x[1]).exp();
        let t1 = expand(&f, 4, &rule).unwrap();
        let t2 = expand(&f, 4, &rule).unwrap();
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        t1.write_csv(&mut b1).unwrap();
        t2.write_csv(&mut b2).unwrap();
        assert_eq!(b1, b2);
        let s = String::from_utf8(b1).unwrap();
        assert!(s.starts_with("# d=2,mu=0,N=4,exact_degree=16\nn,j,nu,coeff,h\n"));
        assert!(s.contains("# parseval_residual="));
    }
}
