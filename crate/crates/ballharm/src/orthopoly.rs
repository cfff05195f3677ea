//! Classical one-dimensional orthogonal polynomial families (Jacobi,
//! Gegenbauer, Chebyshev T/U): floating-point evaluation by forward
//! recurrence, exact variants producing polynomials with rational
//! coefficients, the contiguous identities the rest of the crate leans on,
//! and Gauss-Jacobi quadrature rules via the Jacobi-matrix eigenproblem.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::polyalg::{poch_rat, rat, ratio, ExactPoly};
use crate::util::{ln_beta, pochhammer};

/// Parameters (alpha, beta) of the Jacobi weight (1-t)^alpha (1+t)^beta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) || !(beta > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi parameters must satisfy alpha, beta > -1, got ({alpha}, {beta})"
            )));
        }
        Ok(JacobiParams { alpha, beta })
    }
}

/// P_n^{(alpha,beta)}(t) by the three-term recurrence. Stable for the degree
/// range used here (n <= 200).
pub fn jacobi_eval(n: u32, p: &JacobiParams, t: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    if n == 0 {
        return 1.0;
    }
    let mut pm1 = 1.0;
    let mut pn = 0.5 * (a + b + 2.0) * t + 0.5 * (a - b);
    for k in 2..=n {
        let k = k as f64;
        let c0 = 2.0 * k * (k + a + b) * (2.0 * k + a + b - 2.0);
        let c1 = (2.0 * k + a + b - 1.0) * (a * a - b * b);
        let c2 = (2.0 * k + a + b - 1.0) * (2.0 * k + a + b) * (2.0 * k + a + b - 2.0);
        let c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + a + b);
        let pnext = ((c1 + c2 * t) * pn - c3 * pm1) / c0;
        pm1 = pn;
        pn = pnext;
    }
    pn
}

/// Exact P_n^{(alpha,beta)} as a univariate polynomial in t, for rational
/// parameters.
pub fn jacobi_exact(n: u32, alpha: &BigRational, beta: &BigRational) -> ExactPoly {
    let t = ExactPoly::var(1, 0);
    if n == 0 {
        return ExactPoly::one(1);
    }
    let mut pm1 = ExactPoly::one(1);
    let mut pn = t
        .scale(&((alpha + beta + rat(2)) * ratio(1, 2)))
        .add(&ExactPoly::constant(1, (alpha - beta) * ratio(1, 2)))
        .unwrap();
    for k in 2..=n {
        let k = rat(k as i64);
        let s = alpha + beta;
        let c0 = rat(2) * &k * (&k + &s) * (rat(2) * &k + &s - rat(2));
        let c1 = (rat(2) * &k + &s - rat(1)) * (alpha * alpha - beta * beta);
        let c2 = (rat(2) * &k + &s - rat(1)) * (rat(2) * &k + &s) * (rat(2) * &k + &s - rat(2));
        let c3 = rat(2) * (&k + alpha - rat(1)) * (&k + beta - rat(1)) * (rat(2) * &k + &s);
        let pnext = t
            .scale(&c2)
            .add(&ExactPoly::constant(1, c1))
            .unwrap()
            .mul(&pn)
            .unwrap()
            .sub(&pm1.scale(&c3))
            .unwrap()
            .scale(&(BigRational::one() / c0));
        pm1 = pn;
        pn = pnext;
    }
    pn
}

/// d/dt P_n^{(alpha,beta)}(t) = (n + alpha + beta + 1)/2 * P_{n-1}^{(alpha+1,beta+1)}(t).
pub fn jacobi_deriv(n: u32, p: &JacobiParams, t: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let raised = JacobiParams { alpha: p.alpha + 1.0, beta: p.beta + 1.0 };
    0.5 * (n as f64 + p.alpha + p.beta + 1.0) * jacobi_eval(n - 1, &raised, t)
}

pub fn jacobi_deriv_exact(n: u32, alpha: &BigRational, beta: &BigRational) -> ExactPoly {
    if n == 0 {
        return ExactPoly::zero(1);
    }
    let c = (rat(n as i64) + alpha + beta + rat(1)) * ratio(1, 2);
    jacobi_exact(n - 1, &(alpha + rat(1)), &(beta + rat(1))).scale(&c)
}

/// Gegenbauer C_n^lambda(u) by the three-term recurrence, lambda > -1/2.
pub fn gegenbauer_eval(n: u32, lambda: f64, u: f64) -> Result<f64> {
    if !(lambda > -0.5) {
        return Err(Error::InvalidParameter(format!(
            "Gegenbauer parameter must be > -1/2, got {lambda}"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut cm1 = 1.0;
    let mut cn = 2.0 * lambda * u;
    for m in 2..=n {
        let m = m as f64;
        let cnext = (2.0 * (m + lambda - 1.0) * u * cn - (m + 2.0 * lambda - 2.0) * cm1) / m;
        cm1 = cn;
        cn = cnext;
    }
    Ok(cn)
}

/// Exact C_n^lambda for rational lambda.
pub fn gegenbauer_exact(n: u32, lambda: &BigRational) -> ExactPoly {
    let u = ExactPoly::var(1, 0);
    if n == 0 {
        return ExactPoly::one(1);
    }
    let mut cm1 = ExactPoly::one(1);
    let mut cn = u.scale(&(rat(2) * lambda));
    for m in 2..=n {
        let mr = rat(m as i64);
        let a = rat(2) * (&mr + lambda - rat(1));
        let b = &mr + rat(2) * lambda - rat(2);
        let cnext = u
            .scale(&a)
            .mul(&cn)
            .unwrap()
            .sub(&cm1.scale(&b))
            .unwrap()
            .scale(&(BigRational::one() / mr));
        cm1 = cn;
        cn = cnext;
    }
    cn
}

/// Chebyshev polynomial of the first kind, exact coefficients.
pub fn chebyshev_t_exact(n: u32) -> ExactPoly {
    let u = ExactPoly::var(1, 0);
    if n == 0 {
        return ExactPoly::one(1);
    }
    let mut tm1 = ExactPoly::one(1);
    let mut tn = u.clone();
    for _ in 2..=n {
        let tnext = u.scale(&rat(2)).mul(&tn).unwrap().sub(&tm1).unwrap();
        tm1 = tn;
        tn = tnext;
    }
    tn
}

/// Chebyshev polynomial of the second kind, exact coefficients.
pub fn chebyshev_u_exact(n: u32) -> ExactPoly {
    let u = ExactPoly::var(1, 0);
    if n == 0 {
        return ExactPoly::one(1);
    }
    let mut um1 = ExactPoly::one(1);
    let mut un = u.scale(&rat(2));
    for _ in 2..=n {
        let unext = u.scale(&rat(2)).mul(&un).unwrap().sub(&um1).unwrap();
        um1 = un;
        un = unext;
    }
    un
}

/// Left-hand side of the mixed raising relation
/// beta P_n^{(a,b)}(t) + (1+t) d/dt P_n^{(a,b)}(t), contractually equal to
/// (beta + n) P_n^{(a+1,b-1)}(t).
pub fn jacobi_contiguous_raise_mixed(n: u32, p: &JacobiParams, t: f64) -> f64 {
    p.beta * jacobi_eval(n, p, t) + (1.0 + t) * jacobi_deriv(n, p, t)
}

/// Gauss rule on [-1,1]: exact for polynomial degree <= exactness against
/// the weight (1-t)^alpha (1+t)^beta.
#[derive(Clone, Debug)]
pub struct GaussRule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl GaussRule1D {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        crate::util::pairwise_sum(&vals)
    }

    /// Total weight mass 2^{alpha+beta+1} B(alpha+1, beta+1).
    pub fn mass(&self) -> f64 {
        ((self.alpha + self.beta + 1.0) * 2.0_f64.ln() + ln_beta(self.alpha + 1.0, self.beta + 1.0))
            .exp()
    }
}

/// k-point Gauss-Jacobi rule from the symmetric tridiagonal Jacobi matrix:
/// nodes are its eigenvalues, weights come from the first components of the
/// normalized eigenvectors scaled by the total mass.
pub fn gauss_jacobi(k: u32, p: &JacobiParams) -> Result<GaussRule1D> {
    if k == 0 {
        return Err(Error::InvalidParameter("gauss_jacobi needs k >= 1".into()));
    }
    let (a, b) = (p.alpha, p.beta);
    let n = k as usize;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    diag[0] = (b - a) / (a + b + 2.0);
    for (i, d) in diag.iter_mut().enumerate().skip(1) {
        let m = i as f64;
        *d = (b * b - a * a) / ((2.0 * m + a + b) * (2.0 * m + a + b + 2.0));
    }
    for (i, o) in off.iter_mut().enumerate() {
        let m = (i + 1) as f64;
        let sq = if i == 0 {
            // the (m + a + b) factor cancels against (2m + a + b - 1) at m = 1
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (a + b + 3.0))
        } else {
            4.0 * m * (m + a) * (m + b) * (m + a + b)
                / ((2.0 * m + a + b).powi(2) * (2.0 * m + a + b + 1.0) * (2.0 * m + a + b - 1.0))
        };
        if !(sq > 0.0) || !sq.is_finite() {
            return Err(Error::Eigen(format!(
                "invalid off-diagonal element at row {i} for (alpha, beta) = ({a}, {b})"
            )));
        }
        *o = sq.sqrt();
    }

    let mat = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            diag[r]
        } else if r + 1 == c || c + 1 == r {
            off[r.min(c)]
        } else {
            0.0
        }
    });
    let eig = mat
        .try_symmetric_eigen(1e-15, 200 * n)
        .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;

    let mass = ((a + b + 1.0) * 2.0_f64.ln() + ln_beta(a + 1.0, b + 1.0)).exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let node = eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)];
            (node, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    for w in nodes.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Eigen("Gauss nodes are not strictly increasing".into()));
        }
    }
    if nodes.iter().any(|&x| !(-1.0 < x && x < 1.0)) {
        return Err(Error::Eigen("Gauss node escaped (-1, 1)".into()));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::Eigen("non-positive Gauss weight".into()));
    }
    Ok(GaussRule1D { nodes, weights, exactness: 2 * k - 1, alpha: a, beta: b })
}

/// Exact value of int_{-1}^{1} t^m (1-t)^alpha (1+t)^beta dt divided by the
/// total mass, for rational parameters: sum_k C(m,k) (-2)^k (a+1)_k / (a+b+2)_k.
pub fn jacobi_moment_ratio_exact(m: u32, alpha: &BigRational, beta: &BigRational) -> BigRational {
    let mut acc = BigRational::one() - BigRational::one();
    let mut binom = BigRational::one();
    for k in 0..=m {
        if k > 0 {
            binom = binom * rat((m - k + 1) as i64) / rat(k as i64);
        }
        let sign = if k % 2 == 0 { rat(1) } else { rat(-1) };
        let num = poch_rat(&(alpha + rat(1)), k);
        let den = poch_rat(&(alpha + beta + rat(2)), k);
        acc += sign * &binom * rat(2).pow(k as i32) * num / den;
    }
    acc
}

/// Floating-point image of [`jacobi_moment_ratio_exact`]: the alternating
/// sum cancels badly in doubles, so every f64 parameter (itself a rational)
/// is routed through the exact path.
pub fn jacobi_moment_ratio(m: u32, alpha: f64, beta: f64) -> f64 {
    let a = BigRational::from_float(alpha).expect("finite alpha");
    let b = BigRational::from_float(beta).expect("finite beta");
    num_traits::ToPrimitive::to_f64(&jacobi_moment_ratio_exact(m, &a, &b)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_traits::ToPrimitive;

    #[test]
    fn jacobi_basic_values() {
        let p = JacobiParams::new(0.7, 1.3).unwrap();
        assert_eq!(jacobi_eval(0, &p, 0.3), 1.0);
        // P_n(1) = (alpha+1)_n / n!
        for n in 1..=8u32 {
            let expect = pochhammer(p.alpha + 1.0, n) / pochhammer(1.0, n);
            assert_relative_eq!(jacobi_eval(n, &p, 1.0), expect, max_relative = 1e-12);
        }
        // Legendre: P_2(0) = -1/2
        let leg = JacobiParams::new(0.0, 0.0).unwrap();
        assert_relative_eq!(jacobi_eval(2, &leg, 0.0), -0.5, epsilon = 1e-15);
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn jacobi_exact_matches_float() {
        let alpha = ratio(1, 2);
        let beta = rat(2);
        let p = JacobiParams::new(0.5, 2.0).unwrap();
        for n in 0..=10u32 {
            let pe = jacobi_exact(n, &alpha, &beta);
            for &t in &[-0.9, -0.3, 0.0, 0.4, 1.0] {
                assert_relative_eq!(
                    pe.eval_f64(&[t]),
                    jacobi_eval(n, &p, t),
                    max_relative = 1e-11,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn jacobi_deriv_examples() {
        let p = JacobiParams::new(0.25, 0.75).unwrap();
        // n = 1: slope (alpha+beta+2)/2 everywhere
        for &t in &[-0.5, 0.0, 0.8] {
            assert_relative_eq!(jacobi_deriv(1, &p, t), (p.alpha + p.beta + 2.0) / 2.0);
        }
        assert_eq!(jacobi_deriv(0, &p, 0.1), 0.0);
        // finite differences
        let h = 1e-6;
        for n in 1..=6u32 {
            for &t in &[-0.7, -0.1, 0.2, 0.6] {
                let fd = (jacobi_eval(n, &p, t + h) - jacobi_eval(n, &p, t - h)) / (2.0 * h);
                assert_relative_eq!(jacobi_deriv(n, &p, t), fd, epsilon = 1e-8, max_relative = 1e-7);
            }
        }
        // exact-variant derivative equals poly_diff of the exact polynomial
        let alpha = ratio(1, 4);
        let beta = ratio(3, 4);
        for n in 0..=9u32 {
            let lhs = jacobi_deriv_exact(n, &alpha, &beta);
            let rhs = jacobi_exact(n, &alpha, &beta).diff(0).unwrap();
            assert_eq!(lhs, rhs, "derivative formula at n={n}");
        }
    }

    #[test]
    fn gegenbauer_examples() {
        assert_eq!(gegenbauer_eval(0, 0.3, 0.5).unwrap(), 1.0);
        for &(lam, u) in &[(0.5, 0.3), (1.5, -0.2), (3.0, 0.9)] {
            assert_relative_eq!(gegenbauer_eval(1, lam, u).unwrap(), 2.0 * lam * u);
        }
        // C_2^1(1) = 3 and generally C_n^l(1) = (2l)_n / n!
        assert_relative_eq!(gegenbauer_eval(2, 1.0, 1.0).unwrap(), 3.0);
        for n in 0..=8u32 {
            for &lam in &[0.5, 1.0, 2.5] {
                let expect = pochhammer(2.0 * lam, n) / pochhammer(1.0, n);
                assert_relative_eq!(
                    gegenbauer_eval(n, lam, 1.0).unwrap(),
                    expect,
                    max_relative = 1e-12
                );
            }
        }
        assert!(gegenbauer_eval(3, -0.5, 0.0).is_err());
    }

    #[test]
    fn chebyshev_connections() {
        // T_2 = 2u^2 - 1, U_1 = 2u
        let u = ExactPoly::var(1, 0);
        assert_eq!(chebyshev_t_exact(2), u.pow(2).scale(&rat(2)).sub(&ExactPoly::one(1)).unwrap());
        assert_eq!(chebyshev_u_exact(1), u.scale(&rat(2)));
        // U_{n-1} is C_{n-1}^1
        for n in 1..=8 {
            assert_eq!(chebyshev_u_exact(n - 1), gegenbauer_exact(n - 1, &rat(1)));
        }
    }

    #[test]
    fn contiguous_raise_mixed() {
        // n = 0: both sides are beta
        let p = JacobiParams::new(0.3, 1.7).unwrap();
        assert_relative_eq!(jacobi_contiguous_raise_mixed(0, &p, 0.4), p.beta);
        // worked case: n=1, alpha=0, beta=1, t=0 gives 1 on both sides
        let p01 = JacobiParams::new(0.0, 1.0).unwrap();
        let lhs = jacobi_contiguous_raise_mixed(1, &p01, 0.0);
        let rhs = (p01.beta + 1.0) * jacobi_eval(1, &JacobiParams::new(1.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(lhs, 1.0, epsilon = 1e-15);
        assert_relative_eq!(rhs, 1.0, epsilon = 1e-15);
        // exact-variant identity for n <= 10
        let (alpha, beta) = (ratio(1, 2), rat(2));
        for n in 0..=10u32 {
            let lhs = jacobi_exact(n, &alpha, &beta)
                .scale(&beta)
                .add(
                    &ExactPoly::var(1, 0)
                        .add(&ExactPoly::one(1))
                        .unwrap()
                        .mul(&jacobi_deriv_exact(n, &alpha, &beta))
                        .unwrap(),
                )
                .unwrap();
            let rhs = jacobi_exact(n, &(&alpha + rat(1)), &(&beta - rat(1)))
                .scale(&(&beta + rat(n as i64)));
            assert_eq!(lhs, rhs, "raise-mixed identity at n={n}");
        }
    }

    // The four Gegenbauer relations and the Jacobi differential equation the
    // recursion proofs rely on, each pinned exactly (rational parameters) and
    // in floating point.
    #[test]
    fn gegenbauer_identity_suite_exact() {
        let u = ExactPoly::var(1, 0);
        let one = ExactPoly::one(1);
        let one_minus_u2 = one.sub(&u.pow(2)).unwrap();
        for n in 0..=12u32 {
            for lam in [ratio(1, 2), rat(1), ratio(3, 2), rat(2), ratio(7, 2)] {
                let c = |m: i64, l: &BigRational| -> ExactPoly {
                    if m < 0 {
                        ExactPoly::zero(1)
                    } else {
                        gegenbauer_exact(m as u32, l)
                    }
                };
                let lam1 = &lam + rat(1);
                // (a) n C_n^l - 2 l u C_{n-1}^{l+1} + 2 l C_{n-2}^{l+1} = 0
                let lhs = c(n as i64, &lam)
                    .scale(&rat(n as i64))
                    .sub(&u.mul(&c(n as i64 - 1, &lam1)).unwrap().scale(&(rat(2) * &lam)))
                    .unwrap()
                    .add(&c(n as i64 - 2, &lam1).scale(&(rat(2) * &lam)))
                    .unwrap();
                assert!(lhs.is_zero(), "identity (a) at n={n} lam={lam}");
                // (b) n u C_n^l + 2 l (1-u^2) C_{n-1}^{l+1} = (n+2l-1) C_{n-1}^l
                if n >= 1 {
                    let lhs = u
                        .mul(&c(n as i64, &lam))
                        .unwrap()
                        .scale(&rat(n as i64))
                        .add(&one_minus_u2.mul(&c(n as i64 - 1, &lam1)).unwrap().scale(&(rat(2) * &lam)))
                        .unwrap();
                    let rhs = c(n as i64 - 1, &lam).scale(&(rat(n as i64) + rat(2) * &lam - rat(1)));
                    assert_eq!(lhs, rhs, "identity (b) at n={n} lam={lam}");
                }
                // (c) C_n^l + l/(n+l) C_{n-2}^{l+1} = l/(n+l) C_n^{l+1}
                let f = &lam / (rat(n as i64) + &lam);
                let lhs = c(n as i64, &lam).add(&c(n as i64 - 2, &lam1).scale(&f)).unwrap();
                let rhs = c(n as i64, &lam1).scale(&f);
                assert_eq!(lhs, rhs, "identity (c) at n={n} lam={lam}");
                // (d) C_n^l - 2l/(2l-1) (1-u^2) C_{n-2}^{l+1}
                //        = (n+2l-1)(n+2l-2)/((2l-1)(2l-2)) C_n^{l-1}, needs l > 1
                if lam > rat(1) {
                    let f = rat(2) * &lam / (rat(2) * &lam - rat(1));
                    let lhs = c(n as i64, &lam)
                        .sub(&one_minus_u2.mul(&c(n as i64 - 2, &lam1)).unwrap().scale(&f))
                        .unwrap();
                    let nn = rat(n as i64);
                    let coef = (&nn + rat(2) * &lam - rat(1)) * (&nn + rat(2) * &lam - rat(2))
                        / ((rat(2) * &lam - rat(1)) * (rat(2) * &lam - rat(2)));
                    let rhs = c(n as i64, &(&lam - rat(1))).scale(&coef);
                    assert_eq!(lhs, rhs, "identity (d) at n={n} lam={lam}");
                }
                // (e) (1-u^2) C_n^l - (n+2l-1)(n+2l-2)/(2(n+l)(2l-2)) C_n^{l-1}
                //        = -(n+1)(n+2)/(2(n+l)(2l-2)) C_{n+2}^{l-1}, needs l > 1
                if lam > rat(1) {
                    let nn = rat(n as i64);
                    let den = rat(2) * (&nn + &lam) * (rat(2) * &lam - rat(2));
                    let c1 = (&nn + rat(2) * &lam - rat(1)) * (&nn + rat(2) * &lam - rat(2)) / &den;
                    let c2 = (&nn + rat(1)) * (&nn + rat(2)) / &den;
                    let lhs = one_minus_u2
                        .mul(&c(n as i64, &lam))
                        .unwrap()
                        .sub(&c(n as i64, &(&lam - rat(1))).scale(&c1))
                        .unwrap();
                    let rhs = c(n as i64 + 2, &(&lam - rat(1))).scale(&c2).neg();
                    assert_eq!(lhs, rhs, "identity (e) at n={n} lam={lam}");
                }
            }
        }
    }

    #[test]
    fn gegenbauer_identity_suite_float() {
        let pts = [-0.95, -0.61, -0.17, 0.02, 0.44, 0.78, 0.99];
        for n in 1..=12u32 {
            for &lam in &[0.5, 1.0, 1.75, 3.25] {
                for &t in &pts {
                    let c = |m: i64, l: f64| -> f64 {
                        if m < 0 {
                            0.0
                        } else {
                            gegenbauer_eval(m as u32, l, t).unwrap()
                        }
                    };
                    let nf = n as f64;
                    let a = nf * c(n as i64, lam) - 2.0 * lam * t * c(n as i64 - 1, lam + 1.0)
                        + 2.0 * lam * c(n as i64 - 2, lam + 1.0);
                    assert!(a.abs() < 1e-10 * c(n as i64, lam).abs().max(1.0));
                    let b = nf * t * c(n as i64, lam)
                        + 2.0 * lam * (1.0 - t * t) * c(n as i64 - 1, lam + 1.0)
                        - (nf + 2.0 * lam - 1.0) * c(n as i64 - 1, lam);
                    assert!(b.abs() < 1e-10 * c(n as i64, lam).abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn jacobi_differential_equation_exact() {
        // (1-t^2) y'' + (beta - alpha - (alpha+beta+2) t) y' + n(n+alpha+beta+1) y = 0
        let t = ExactPoly::var(1, 0);
        let one = ExactPoly::one(1);
        for n in 0..=12u32 {
            for (alpha, beta) in [
                (rat(0), rat(0)),
                (ratio(1, 2), rat(1)),
                (rat(1), ratio(5, 2)),
                (ratio(-1, 3), ratio(2, 5)),
            ] {
                let y = jacobi_exact(n, &alpha, &beta);
                let y1 = y.diff(0).unwrap();
                let y2 = y1.diff(0).unwrap();
                let lin = t
                    .scale(&(-(&alpha + &beta + rat(2))))
                    .add(&ExactPoly::constant(1, &beta - &alpha))
                    .unwrap();
                let res = one
                    .sub(&t.pow(2))
                    .unwrap()
                    .mul(&y2)
                    .unwrap()
                    .add(&lin.mul(&y1).unwrap())
                    .unwrap()
                    .add(&y.scale(&(rat(n as i64) * (rat(n as i64) + &alpha + &beta + rat(1)))))
                    .unwrap();
                assert!(res.is_zero(), "Jacobi ODE failed at n={n}, ({alpha},{beta})");
            }
        }
    }

    #[test]
    fn gauss_rule_basics() {
        // symmetric weight: single node at 0
        let r = gauss_jacobi(1, &JacobiParams::new(1.5, 1.5).unwrap()).unwrap();
        assert!(r.nodes[0].abs() < 1e-14);
        // Legendre 2-point integrates t^2 to 2/3
        let r = gauss_jacobi(2, &JacobiParams::new(0.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(r.integrate(|t| t * t), 2.0 / 3.0, epsilon = 1e-14);
        // mass formula
        for &(a, b) in &[(0.0, 0.0), (0.5, 1.0), (2.0, 0.25), (-0.5, -0.5)] {
            let r = gauss_jacobi(5, &JacobiParams::new(a, b).unwrap()).unwrap();
            let sum: f64 = r.weights.iter().sum();
            assert_relative_eq!(sum, r.mass(), max_relative = 1e-13);
        }
    }

    #[test]
    fn gauss_rules_reproduce_moments_to_1e13() {
        for k in 1..=10u32 {
            for &(a, b) in &[(0.0, 0.0), (0.5, 0.0), (1.0, 2.5), (-0.25, 0.75)] {
                let r = gauss_jacobi(k, &JacobiParams::new(a, b).unwrap()).unwrap();
                let mass = r.mass();
                for m in 0..=(2 * k - 1) {
                    let want = jacobi_moment_ratio(m, a, b) * mass;
                    let got = r.integrate(|t| t.powi(m as i32));
                    assert!(
                        (got - want).abs() <= 1e-13 * want.abs().max(mass),
                        "moment {m} at k={k}, (a,b)=({a},{b}): got {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_moment_ratio_matches_float() {
        let alpha = ratio(1, 2);
        let beta = rat(2);
        for m in 0..=9u32 {
            let e = jacobi_moment_ratio_exact(m, &alpha, &beta).to_f64().unwrap();
            let f = jacobi_moment_ratio(m, 0.5, 2.0);
            assert_relative_eq!(e, f, epsilon = 1e-13, max_relative = 1e-12);
        }
    }
}
