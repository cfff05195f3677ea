//! Numerical integration on the weighted ball with a certified polynomial
//! exactness degree, for d = 2 and d = 3. Rules are tensor products of a
//! Gauss-Jacobi rule in t = 2r^2 - 1 with an angular rule that is exact for
//! the trigonometric degree required.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::orthopoly::{gauss_jacobi, JacobiParams};
use crate::polyalg::ball_monomial_moment_f64;
use crate::util::pairwise_sum;

/// Node/weight set for b_mu-normalized integration over the ball: the
/// weights sum to 1 and every monomial of total degree <= exact_degree is
/// integrated to relative 1e-12 against the closed-form moments.
pub struct BallQuadrature {
    pub d: usize,
    pub mu: f64,
    pub exact_degree: u32,
    /// radial nodes r in (0,1) with weights summing to 1
    pub radial_r: Vec<f64>,
    pub radial_w: Vec<f64>,
    /// angular nodes on the unit sphere (flat, stride d) with weights summing to 1
    pub angular_xi: Vec<f64>,
    pub angular_w: Vec<f64>,
    /// full tensor-product nodes (flat, stride d) and weights
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl BallQuadrature {
    pub fn num_nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn num_angular(&self) -> usize {
        self.angular_w.len()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.d..(i + 1) * self.d]
    }

    pub fn angular_node(&self, a: usize) -> &[f64] {
        &self.angular_xi[a * self.d..(a + 1) * self.d]
    }

    /// b_mu-normalized integral of f over the ball, pairwise-summed.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let vals: Vec<f64> = (0..self.num_nodes())
            .map(|i| self.weights[i] * f(self.node(i)))
            .collect();
        pairwise_sum(&vals)
    }

    /// <f, g>_mu by quadrature; exact when f*g is a polynomial of degree at
    /// most exact_degree.
    pub fn inner_product(&self, f: impl Fn(&[f64]) -> f64, g: impl Fn(&[f64]) -> f64) -> f64 {
        self.integrate(|x| f(x) * g(x))
    }

    /// Re-run the constructor postcondition: weights sum to 1, every even
    /// monomial up to exact_degree matches the closed-form moment to relative
    /// 1e-12, and sampled odd monomials vanish below 1e-14.
    pub fn certify(&self) -> Result<()> {
        let total = pairwise_sum(&self.weights);
        if (total - 1.0).abs() > 1e-13 {
            return Err(Error::Reliability(format!(
                "weight sum {total} deviates from 1 by {:e}",
                (total - 1.0).abs()
            )));
        }
        let deg = self.exact_degree;
        // radial moments sum w r^m for m <= exact_degree
        let mut radial_moments = vec![0.0; deg as usize + 1];
        for (m, rm) in radial_moments.iter_mut().enumerate() {
            let vals: Vec<f64> = self
                .radial_r
                .iter()
                .zip(&self.radial_w)
                .map(|(&r, &w)| w * r.powi(m as i32))
                .collect();
            *rm = pairwise_sum(&vals);
        }
        // power tables per angular node
        let na = self.num_angular();
        let mut pows = vec![0.0; na * self.d * (deg as usize + 1)];
        for a in 0..na {
            let xi = self.angular_node(a);
            for (i, &c) in xi.iter().enumerate() {
                let base = (a * self.d + i) * (deg as usize + 1);
                pows[base] = 1.0;
                for k in 1..=deg as usize {
                    pows[base + k] = pows[base + k - 1] * c;
                }
            }
        }
        // enumerate even alphas
        let mut alphas: Vec<Vec<u32>> = Vec::new();
        fn rec(cur: &mut Vec<u32>, slot: usize, left: u32, out: &mut Vec<Vec<u32>>) {
            if slot == cur.len() - 1 {
                let mut a = 0;
                while a <= left {
                    cur[slot] = a;
                    out.push(cur.clone());
                    a += 2;
                }
                cur[slot] = 0;
                return;
            }
            let mut a = 0;
            while a <= left {
                cur[slot] = a;
                rec(cur, slot + 1, left - a, out);
                a += 2;
            }
            cur[slot] = 0;
        }
        let mut cur = vec![0u32; self.d];
        rec(&mut cur, 0, deg, &mut alphas);

        let stride = deg as usize + 1;
        let failures: Vec<String> = alphas
            .par_iter()
            .filter_map(|alpha| {
                let m: u32 = alpha.iter().sum();
                let vals: Vec<f64> = (0..na)
                    .map(|a| {
                        let mut v = self.angular_w[a];
                        for (i, &k) in alpha.iter().enumerate() {
                            v *= pows[(a * self.d + i) * stride + k as usize];
                        }
                        v
                    })
                    .collect();
                let ang = pairwise_sum(&vals);
                let got = radial_moments[m as usize] * ang;
                let want = ball_monomial_moment_f64(alpha, self.mu);
                let tol = 1e-12 * want.abs().max(1e-300);
                if (got - want).abs() > tol {
                    Some(format!(
                        "moment {:?}: got {got:e}, want {want:e}",
                        alpha
                    ))
                } else {
                    None
                }
            })
            .collect();
        if !failures.is_empty() {
            return Err(Error::Reliability(format!(
                "{} moment(s) failed certification; first: {}",
                failures.len(),
                failures[0]
            )));
        }
        // sampled odd monomials across the full node set
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0x0dd);
        for _ in 0..200 {
            let mut alpha = vec![0u32; self.d];
            loop {
                for a in alpha.iter_mut() {
                    *a = rng.gen_range(0..=deg / self.d as u32);
                }
                if alpha.iter().sum::<u32>() % 2 == 1 && alpha.iter().sum::<u32>() <= deg {
                    break;
                }
            }
            let vals: Vec<f64> = (0..self.num_nodes())
                .map(|i| {
                    let x = self.node(i);
                    let mut v = self.weights[i];
                    for (xi, &k) in x.iter().zip(&alpha) {
                        v *= xi.powi(k as i32);
                    }
                    v
                })
                .collect();
            let got = pairwise_sum(&vals);
            if got.abs() > 1e-14 {
                return Err(Error::Reliability(format!(
                    "odd monomial {:?} integrated to {got:e}",
                    alpha
                )));
            }
        }
        Ok(())
    }
}

/// Build a certified rule for (B^d, w_mu) exact through `degree`. The radial
/// factor is Gauss-Jacobi in t = 2r^2 - 1 against (1-t)^mu (1+t)^{(d-2)/2};
/// the angular factor is an equispaced trapezoid (d = 2) or Gauss-Legendre in
/// cos(theta) times a trapezoid in phi (d = 3).
pub fn build_ball_rule(d: usize, mu: f64, degree: u32) -> Result<BallQuadrature> {
    if !(mu > -1.0) {
        return Err(Error::InvalidParameter(format!("mu must be > -1, got {mu}")));
    }
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let k_rad = (degree + 2).div_ceil(2);
    let radial_rule = gauss_jacobi(k_rad, &JacobiParams::new(mu, (d as f64 - 2.0) / 2.0)?)?;
    let rad_total = pairwise_sum(&radial_rule.weights);
    let radial_r: Vec<f64> = radial_rule.nodes.iter().map(|&t| ((1.0 + t) / 2.0).sqrt()).collect();
    let radial_w: Vec<f64> = radial_rule.weights.iter().map(|&w| w / rad_total).collect();

    let mut angular_xi = Vec::new();
    let mut angular_w = Vec::new();
    match d {
        2 => {
            let m = (degree + 2) as usize;
            for k in 0..m {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                angular_xi.push(th.cos());
                angular_xi.push(th.sin());
                angular_w.push(1.0 / m as f64);
            }
        }
        3 => {
            let k_gl = (degree + 1).div_ceil(2);
            let gl = gauss_jacobi(k_gl, &JacobiParams::new(0.0, 0.0)?)?;
            // symmetrize so odd powers of cos(theta) vanish structurally
            let kk = gl.nodes.len();
            let mut u = vec![0.0; kk];
            let mut wu = vec![0.0; kk];
            for i in 0..kk {
                u[i] = 0.5 * (gl.nodes[i] - gl.nodes[kk - 1 - i]);
                wu[i] = 0.25 * (gl.weights[i] + gl.weights[kk - 1 - i]);
                // total GL mass is 2; normalize to 1/2 per factor such that
                // (1/2) int du * (1/m) sum phi reproduces the sphere average
            }
            let m = (degree + 2) as usize;
            for i in 0..kk {
                let sin_t = (1.0 - u[i] * u[i]).max(0.0).sqrt();
                for k in 0..m {
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    angular_xi.push(sin_t * phi.cos());
                    angular_xi.push(sin_t * phi.sin());
                    angular_xi.push(u[i]);
                    angular_w.push(wu[i] / m as f64);
                }
            }
        }
        _ => unreachable!(),
    }
    let ang_total = pairwise_sum(&angular_w);
    for w in angular_w.iter_mut() {
        *w /= ang_total;
    }

    let n_nodes = radial_r.len() * angular_w.len();
    let mut nodes = Vec::with_capacity(n_nodes * d);
    let mut weights = Vec::with_capacity(n_nodes);
    for (i, &r) in radial_r.iter().enumerate() {
        for a in 0..angular_w.len() {
            for c in 0..d {
                nodes.push(r * angular_xi[a * d + c]);
            }
            weights.push(radial_w[i] * angular_w[a]);
        }
    }

    let rule = BallQuadrature {
        d,
        mu,
        exact_degree: degree,
        radial_r,
        radial_w,
        angular_xi,
        angular_w,
        nodes,
        weights,
    };
    rule.certify()?;
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballbasis::{ball_basis_exact, h_norm, BallBasisIndex};
    use crate::polyalg::{rat, ratio, ExactPoly};
    use crate::spherical::HarmonicIndex;
    use approx::assert_relative_eq;

    #[test]
    fn normalization_and_basic_moments_d2() {
        let rule = build_ball_rule(2, 0.0, 12).unwrap();
        assert_relative_eq!(rule.integrate(|_| 1.0), 1.0, epsilon = 1e-13);
        assert_relative_eq!(rule.integrate(|x| x[0] * x[0]), 0.25, epsilon = 1e-13);
    }

    #[test]
    fn moments_d3_weighted() {
        let rule = build_ball_rule(3, 1.0, 10).unwrap();
        let want = ball_monomial_moment_f64(&[0, 0, 4], 1.0);
        assert_relative_eq!(
            rule.integrate(|x| x[2].powi(4)),
            want,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_ball_rule(2, -1.0, 4).is_err());
        assert!(build_ball_rule(4, 0.0, 4).is_err());
        assert!(build_ball_rule(5, 0.5, 4).is_err());
    }

    #[test]
    fn certification_reruns() {
        for (d, mu, deg) in [(2usize, 0.0, 16u32), (2, 0.5, 9), (3, 0.0, 8), (3, 2.5, 11)] {
            let rule = build_ball_rule(d, mu, deg).unwrap();
            rule.certify().unwrap();
        }
    }

    #[test]
    fn orthogonality_and_norms_by_quadrature() {
        let mu = 0.5;
        let rule = build_ball_rule(2, mu, 16).unwrap();
        let mu_r = ratio(1, 2);
        let p1 = ball_basis_exact(
            &BallBasisIndex::new(1, 0, HarmonicIndex::new(vec![0, 1]).unwrap()).unwrap(),
            &mu_r,
        );
        let p3 = ball_basis_exact(
            &BallBasisIndex::new(3, 1, HarmonicIndex::new(vec![0, 1]).unwrap()).unwrap(),
            &mu_r,
        );
        let ip = rule.inner_product(|x| p1.eval_f64(x), |x| p3.eval_f64(x));
        assert!(ip.abs() < 1e-12, "cross inner product {ip:e}");
        // <P,P> = h * h_nu with unnormalized Y (h_nu = 1/2 here)
        let ip = rule.inner_product(|x| p1.eval_f64(x), |x| p1.eval_f64(x));
        assert_relative_eq!(
            ip,
            h_norm(mu, 1, 0, 2).unwrap() * 0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn odd_degree_monomials_vanish() {
        let rule = build_ball_rule(3, 0.25, 9).unwrap();
        for alpha in [[1u32, 0, 0], [1, 2, 0], [3, 2, 2], [0, 0, 5]] {
            let v = rule.integrate(|x| {
                x.iter()
                    .zip(&alpha)
                    .map(|(xi, &k)| xi.powi(k as i32))
                    .product()
            });
            assert!(v.abs() < 1e-14, "odd monomial {alpha:?} gave {v:e}");
        }
    }

    #[test]
    fn exactness_on_polynomial_inner_products() {
        // quadrature value equals the exact rational inner product
        let mu = rat(1);
        let rule = build_ball_rule(2, 1.0, 12).unwrap();
        let p = ExactPoly::var(2, 0)
            .pow(3)
            .add(&ExactPoly::var(2, 1).pow(2))
            .unwrap();
        let q = ExactPoly::var(2, 0).mul(&ExactPoly::var(2, 1)).unwrap();
        let exact = crate::polyalg::exact_inner_product(&p, &q, &mu).unwrap();
        let got = rule.inner_product(|x| p.eval_f64(x), |x| q.eval_f64(x));
        assert_relative_eq!(
            got,
            num_traits::ToPrimitive::to_f64(&exact).unwrap(),
            epsilon = 1e-14,
            max_relative = 1e-12
        );
    }
}
