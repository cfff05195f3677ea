//! The mutually orthogonal basis of the weighted ball: a Jacobi factor in
//! 2|x|^2 - 1 times a spherical harmonic. Closed-form norms under the plain,
//! gradient and angular bilinear forms, the Laplacian / Laplace-Beltrami
//! actions, and the expansion of partial derivatives one degree down.

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::orthopoly::jacobi_exact;
use crate::polyalg::{poch_rat, rat, ratio, ExactPoly};
use crate::spherical::{
    derivative_expansion, harmonic_basis, raise_expansion, HarmonicIndex,
};
use crate::util::pochhammer;

/// Index triple (n, j, nu) of a basis element: degree n, radial index j with
/// 0 <= 2j <= n, spherical index of degree n - 2j.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BallBasisIndex {
    pub n: u32,
    pub j: u32,
    pub nu: HarmonicIndex,
}

impl BallBasisIndex {
    pub fn new(n: u32, j: u32, nu: HarmonicIndex) -> Result<Self> {
        if 2 * j > n {
            return Err(Error::InvalidParameter(format!(
                "radial index out of range: need 2j <= n, got j={j}, n={n}"
            )));
        }
        if nu.degree() != n - 2 * j {
            return Err(Error::InvalidParameter(format!(
                "spherical degree {} does not match n - 2j = {}",
                nu.degree(),
                n - 2 * j
            )));
        }
        Ok(BallBasisIndex { n, j, nu })
    }

    pub fn dim(&self) -> usize {
        self.nu.dim()
    }

    /// beta_j = n - 2j + (d-2)/2.
    pub fn beta(&self) -> BigRational {
        rat((self.n - 2 * self.j) as i64) + ratio(self.dim() as i64 - 2, 2)
    }
}

/// L^2, gradient and angular squared norms of one basis element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormTriple {
    pub h: f64,
    pub h_grad: f64,
    pub h_ang: f64,
}

fn check_params(mu: f64, n: u32, j: u32) -> Result<()> {
    if !(mu > -1.0) {
        return Err(Error::InvalidParameter(format!("mu must be > -1, got {mu}")));
    }
    if 2 * j > n {
        return Err(Error::InvalidParameter(format!("need 2j <= n, got j={j}, n={n}")));
    }
    Ok(())
}

/// h_{j,n}^mu = (mu+1)_j (d/2)_{n-j} (n-j+mu+d/2) / (j! (mu+(d+2)/2)_{n-j} (n+mu+d/2)).
pub fn h_norm(mu: f64, n: u32, j: u32, d: usize) -> Result<f64> {
    check_params(mu, n, j)?;
    let half_d = d as f64 / 2.0;
    let num = pochhammer(mu + 1.0, j) * pochhammer(half_d, n - j) * (n as f64 - j as f64 + mu + half_d);
    let den = pochhammer(1.0, j)
        * pochhammer(mu + half_d + 1.0, n - j)
        * (n as f64 + mu + half_d);
    Ok(num / den)
}

pub fn h_norm_exact(mu: &BigRational, n: u32, j: u32, d: usize) -> BigRational {
    let half_d = ratio(d as i64, 2);
    let num = poch_rat(&(mu + rat(1)), j)
        * poch_rat(&half_d, n - j)
        * (rat((n - j) as i64) + mu + &half_d);
    let den = poch_rat(&BigRational::one(), j)
        * poch_rat(&(mu + &half_d + rat(1)), n - j)
        * (rat(n as i64) + mu + &half_d);
    num / den
}

/// Gradient-form eigenvalue 4j(n-j+mu+d/2) + 2(n-2j)(mu+1).
pub fn grad_eigenvalue(mu: f64, n: u32, j: u32, d: usize) -> f64 {
    let half_d = d as f64 / 2.0;
    4.0 * j as f64 * (n as f64 - j as f64 + mu + half_d)
        + 2.0 * (n - 2 * j) as f64 * (mu + 1.0)
}

pub fn grad_eigenvalue_exact(mu: &BigRational, n: u32, j: u32, d: usize) -> BigRational {
    let half_d = ratio(d as i64, 2);
    rat(4 * j as i64) * (rat((n - j) as i64) + mu + &half_d)
        + rat(2 * (n - 2 * j) as i64) * (mu + rat(1))
}

/// h_{j,n}^mu(grad) = eigenvalue * h_{j,n}^mu.
pub fn h_grad(mu: f64, n: u32, j: u32, d: usize) -> Result<f64> {
    Ok(grad_eigenvalue(mu, n, j, d) * h_norm(mu, n, j, d)?)
}

pub fn h_grad_exact(mu: &BigRational, n: u32, j: u32, d: usize) -> BigRational {
    grad_eigenvalue_exact(mu, n, j, d) * h_norm_exact(mu, n, j, d)
}

/// h_{l,n}^mu(D) = (n-2l)(n-2l+d-2) h_{l,n}^mu.
pub fn h_ang(mu: f64, n: u32, l: u32, d: usize) -> Result<f64> {
    let m = (n - 2 * l) as f64;
    Ok(m * (m + d as f64 - 2.0) * h_norm(mu, n, l, d)?)
}

pub fn h_ang_exact(mu: &BigRational, n: u32, l: u32, d: usize) -> BigRational {
    let m = rat((n - 2 * l) as i64);
    &m * (&m + rat(d as i64 - 2)) * h_norm_exact(mu, n, l, d)
}

/// kappa_n^mu = 4 (n + mu + d/2)(n + (d-2)/2).
pub fn kappa(n: u32, mu: f64, d: usize) -> f64 {
    4.0 * (n as f64 + mu + d as f64 / 2.0) * (n as f64 + (d as f64 - 2.0) / 2.0)
}

pub fn kappa_exact(n: u32, mu: &BigRational, d: usize) -> BigRational {
    rat(4) * (rat(n as i64) + mu + ratio(d as i64, 2)) * (rat(n as i64) + ratio(d as i64 - 2, 2))
}

/// The Laplacian sends (n, j, nu) at mu to kappa_{n-j}^mu times (n-2, j-1, nu)
/// at mu + 2; harmonic elements (j = 0) are annihilated.
pub fn laplacian_image(n: u32, j: u32, mu: f64, d: usize) -> Option<(f64, (u32, u32))> {
    if j == 0 {
        return None;
    }
    Some((kappa(n - j, mu, d), (n - 2, j - 1)))
}

/// Laplace-Beltrami eigenvalue -(n-2j)(n-2j+d-2).
pub fn beltrami_eigen(n: u32, j: u32, d: usize) -> f64 {
    let m = (n - 2 * j) as f64;
    -m * (m + d as f64 - 2.0)
}

/// The basis element with *unnormalized* spherical part, as an exact
/// polynomial: P_j^{(mu, beta_j)}(2|x|^2 - 1) * Y_nu.
pub fn ball_basis_exact(idx: &BallBasisIndex, mu: &BigRational) -> ExactPoly {
    let d = idx.dim();
    let beta = idx.beta();
    let jac = jacobi_exact(idx.j, mu, &beta);
    let mut r2 = ExactPoly::zero(d);
    for i in 0..d {
        r2 = r2.add(&ExactPoly::var(d, i).pow(2)).unwrap();
    }
    let arg = r2.scale(&rat(2)).sub(&ExactPoly::one(d)).unwrap();
    let radial = jac.subst_univariate(&arg);
    radial.mul(&harmonic_basis(&idx.nu)).unwrap()
}

/// Numeric evaluation of the basis element with orthonormalized spherical
/// part; `h_nu` is the squared sphere norm of Y_nu.
pub fn ball_basis_eval(idx: &BallBasisIndex, mu: f64, h_nu: f64, x: &[f64]) -> Result<f64> {
    check_params(mu, idx.n, idx.j)?;
    let d = idx.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch(x.len(), d));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let beta = (idx.n - 2 * idx.j) as f64 + (d as f64 - 2.0) / 2.0;
    let params = crate::orthopoly::JacobiParams::new(mu, beta)?;
    let jac = crate::orthopoly::jacobi_eval(idx.j, &params, 2.0 * r2 - 1.0);
    let y = harmonic_basis(&idx.nu).eval_f64(x);
    Ok(jac * y / h_nu.sqrt())
}

/// One term of a derivative expansion in the degree-(n-1), weight-(mu+1)
/// basis, in the unnormalized-Y convention.
#[derive(Clone, Debug)]
pub struct BallExpansionTerm {
    pub coeff: BigRational,
    pub k: u32,
    pub nu: HarmonicIndex,
}

/// Expansion of d/dx_axis P_{l,eta}^{n,mu} over {P_{k,tau}^{n-1,mu+1}}: the
/// radial index only takes the values l and l-1, with at most 2^{d-1} terms
/// in total.
pub fn ball_derivative_expansion(
    idx: &BallBasisIndex,
    mu: &BigRational,
    axis: usize,
) -> Result<Vec<BallExpansionTerm>> {
    let d = idx.dim();
    if axis >= d {
        return Err(Error::AxisOutOfRange { axis, dim: d });
    }
    if idx.n == 0 {
        return Ok(Vec::new());
    }
    let l = idx.j;
    let beta = idx.beta();
    let mut out = Vec::new();
    // spherical-derivative block keeps the radial index; it vanishes when the
    // spherical part is constant (which is also the only place beta can be 0)
    if idx.n - 2 * l >= 1 {
        let coef = (&beta + rat(l as i64)) / &beta;
        for (a, m) in derivative_expansion(&idx.nu, axis).terms {
            out.push(BallExpansionTerm { coeff: &coef * a, k: l, nu: m });
        }
    }
    // raising block lowers the radial index; absent for l = 0
    if l >= 1 {
        let coef = rat(2) * (rat(l as i64) + mu + &beta + rat(1));
        for (b, m) in raise_expansion(&idx.nu, axis).terms {
            out.push(BallExpansionTerm { coeff: &coef * b, k: l - 1, nu: m });
        }
    }
    Ok(out)
}

/// Assemble an expansion back into a polynomial against the (n-1, mu+1)
/// unnormalized basis; test helper for the exact contract.
pub fn assemble_ball_expansion(
    terms: &[BallExpansionTerm],
    n_minus_1: u32,
    mu_plus_1: &BigRational,
    d: usize,
) -> ExactPoly {
    let mut acc = ExactPoly::zero(d);
    for t in terms {
        let idx = BallBasisIndex::new(n_minus_1, t.k, t.nu.clone()).unwrap();
        acc = acc.add(&ball_basis_exact(&idx, mu_plus_1).scale(&t.coeff)).unwrap();
    }
    acc
}
