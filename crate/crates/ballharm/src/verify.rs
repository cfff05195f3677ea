//! Named verification suites behind the CLI: each check carries a stable
//! identity name and verifies one algebraic fact, exactly where rational
//! arithmetic applies and in floating point where it does not.

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ballbasis::{
    ball_basis_exact, ball_derivative_expansion, assemble_ball_expansion, h_ang_exact,
    h_grad_exact, h_norm_exact, kappa_exact, BallBasisIndex,
};
use crate::expansion::{angular_commuting_residual, partial_commuting_residual};
use crate::orthopoly::{
    gauss_jacobi, gegenbauer_exact, jacobi_deriv_exact, jacobi_exact, jacobi_moment_ratio,
    JacobiParams,
};
use crate::polyalg::{
    exact_angular_form, exact_gradient_form, rat, ratio, BallMoments, ExactPoly, SphereMoments,
};
use crate::spherical::{
    derivative_expansion, enumerate_degree, f_lambda, harmonic_basis, partial_f_lambda,
    project_to_harmonic, raise_expansion, sphere_norm, HarmonicIndex,
};

/// Result of one named check.
pub struct CheckResult {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn ok(label: &str) -> Self {
        CheckResult { label: label.into(), pass: true, detail: String::new() }
    }

    fn fail(label: &str, detail: String) -> Self {
        CheckResult { label: label.into(), pass: false, detail }
    }
}

fn run_check(label: &str, body: impl FnOnce() -> std::result::Result<(), String>) -> CheckResult {
    match body() {
        Ok(()) => CheckResult::ok(label),
        Err(d) => CheckResult::fail(label, d),
    }
}

/// Suite names with the identity labels each one runs; printed by --list.
pub fn suite_catalog() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        (
            "identities",
            vec![
                "gegenbauer-lower-shift",
                "gegenbauer-axial-shift",
                "gegenbauer-raise-mixing",
                "gegenbauer-parameter-lower",
                "gegenbauer-projection-bracket",
                "jacobi-differential-equation",
                "jacobi-derivative-shift",
                "jacobi-raise-mixed",
                "radial-factor-tangential-derivative",
                "radial-factor-axial-derivative",
                "gauss-moment-exactness",
            ],
        ),
        (
            "orthogonality",
            vec![
                "harmonicity",
                "sphere-orthogonality",
                "beltrami-polynomial-eigenvalue",
                "ball-orthogonality-norms",
                "ball-gradient-norms",
                "ball-angular-norms",
                "laplacian-shift-action",
                "derivative-expansion-oracle",
                "raise-expansion-oracle",
                "ball-derivative-oracle",
            ],
        ),
        (
            "appendix",
            vec![
                "planar-derivative-rules",
                "planar-swap-equivalence",
                "spatial-derivative-rules",
                "spatial-derivative-rules-zonal-doubled",
            ],
        ),
        (
            "commuting",
            vec![
                "partial-sum-derivative-commute",
                "partial-sum-angular-commute",
                "laplacian-coefficient-map",
                "beltrami-coefficient-map",
            ],
        ),
    ]
}

pub fn suite_identities() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let lams = [ratio(1, 2), rat(1), ratio(3, 2), rat(2), ratio(7, 2)];
    let u = ExactPoly::var(1, 0);
    let one = ExactPoly::one(1);
    let one_minus_u2 = one.sub(&u.pow(2)).unwrap();
    let c = |m: i64, l: &BigRational| -> ExactPoly {
        if m < 0 {
            ExactPoly::zero(1)
        } else {
            gegenbauer_exact(m as u32, l)
        }
    };

    out.push(run_check("gegenbauer-lower-shift", || {
        for n in 0..=12i64 {
            for lam in &lams {
                let lam1 = lam + rat(1);
                let lhs = c(n, lam)
                    .scale(&rat(n))
                    .sub(&u.mul(&c(n - 1, &lam1)).unwrap().scale(&(rat(2) * lam)))
                    .unwrap()
                    .add(&c(n - 2, &lam1).scale(&(rat(2) * lam)))
                    .unwrap();
                if !lhs.is_zero() {
                    return Err(format!("residual at n={n}, lambda={lam}"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("gegenbauer-axial-shift", || {
        for n in 1..=12i64 {
            for lam in &lams {
                let lam1 = lam + rat(1);
                let lhs = u
                    .mul(&c(n, lam))
                    .unwrap()
                    .scale(&rat(n))
                    .add(&one_minus_u2.mul(&c(n - 1, &lam1)).unwrap().scale(&(rat(2) * lam)))
                    .unwrap();
                let rhs = c(n - 1, lam).scale(&(rat(n) + rat(2) * lam - rat(1)));
                if lhs != rhs {
                    return Err(format!("residual at n={n}, lambda={lam}"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("gegenbauer-raise-mixing", || {
        for n in 0..=12i64 {
            for lam in &lams {
                let f = lam / (rat(n) + lam);
                let lhs = c(n, lam).add(&c(n - 2, &(lam + rat(1))).scale(&f)).unwrap();
                if lhs != c(n, &(lam + rat(1))).scale(&f) {
                    return Err(format!("residual at n={n}, lambda={lam}"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("gegenbauer-parameter-lower", || {
        for n in 0..=12i64 {
            for lam in lams.iter().filter(|l| **l > rat(1)) {
                let f = rat(2) * lam / (rat(2) * lam - rat(1));
                let lhs = c(n, lam)
                    .sub(&one_minus_u2.mul(&c(n - 2, &(lam + rat(1)))).unwrap().scale(&f))
                    .unwrap();
                let coef = (rat(n) + rat(2) * lam - rat(1)) * (rat(n) + rat(2) * lam - rat(2))
                    / ((rat(2) * lam - rat(1)) * (rat(2) * lam - rat(2)));
                if lhs != c(n, &(lam - rat(1))).scale(&coef) {
                    return Err(format!("residual at n={n}, lambda={lam}"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("gegenbauer-projection-bracket", || {
        for n in 0..=12i64 {
            for lam in lams.iter().filter(|l| **l > rat(1)) {
                let den = rat(2) * (rat(n) + lam) * (rat(2) * lam - rat(2));
                let c1 = (rat(n) + rat(2) * lam - rat(1)) * (rat(n) + rat(2) * lam - rat(2)) / &den;
                let c2 = (rat(n) + rat(1)) * (rat(n) + rat(2)) / &den;
                let lhs = one_minus_u2
                    .mul(&c(n, lam))
                    .unwrap()
                    .sub(&c(n, &(lam - rat(1))).scale(&c1))
                    .unwrap();
                if lhs != c(n + 2, &(lam - rat(1))).scale(&c2).neg() {
                    return Err(format!("residual at n={n}, lambda={lam}"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("jacobi-differential-equation", || {
        let t = ExactPoly::var(1, 0);
        let one = ExactPoly::one(1);
        for n in 0..=12u32 {
            for (alpha, beta) in [(rat(0), rat(0)), (ratio(1, 2), rat(1)), (rat(1), ratio(5, 2))] {
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
                if !res.is_zero() {
                    return Err(format!("residual at n={n}, ({alpha}, {beta})"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("jacobi-derivative-shift", || {
        for n in 0..=10u32 {
            for (alpha, beta) in [(rat(0), ratio(1, 2)), (ratio(1, 3), rat(2))] {
                if jacobi_deriv_exact(n, &alpha, &beta) != jacobi_exact(n, &alpha, &beta).diff(0).unwrap() {
                    return Err(format!("mismatch at n={n}"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("jacobi-raise-mixed", || {
        for n in 0..=10u32 {
            for (alpha, beta) in [(rat(0), rat(1)), (ratio(1, 2), rat(2)), (rat(1), ratio(3, 2))] {
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
                if lhs != rhs {
                    return Err(format!("mismatch at n={n}, ({alpha}, {beta})"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("radial-factor-tangential-derivative", || {
        for d in 2..=4usize {
            for n in 0..=6i64 {
                for lam in [ratio(1, 2), ratio(5, 2)] {
                    for axis in 0..d - 1 {
                        let spec = partial_f_lambda(d, n, &lam, axis);
                        let mut target =
                            f_lambda(d, spec.target_degree, &spec.target_lambda).scale(&spec.factor);
                        if spec.x_prefactor {
                            target = ExactPoly::var(d, axis).mul(&target).unwrap();
                        }
                        if f_lambda(d, n, &lam).diff(axis).unwrap() != target {
                            return Err(format!("mismatch at d={d}, n={n}, axis={axis}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("radial-factor-axial-derivative", || {
        for d in 2..=4usize {
            for n in 0..=6i64 {
                for lam in [ratio(1, 2), rat(2)] {
                    let spec = partial_f_lambda(d, n, &lam, d - 1);
                    let target = f_lambda(d, spec.target_degree, &spec.target_lambda).scale(&spec.factor);
                    if f_lambda(d, n, &lam).diff(d - 1).unwrap() != target {
                        return Err(format!("mismatch at d={d}, n={n}"));
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("gauss-moment-exactness", || {
        for k in 1..=10u32 {
            for (a, b) in [(0.0, 0.0), (0.5, 0.0), (1.0, 2.5)] {
                let r = gauss_jacobi(k, &JacobiParams::new(a, b).unwrap())
                    .map_err(|e| e.to_string())?;
                let mass = r.mass();
                for m in 0..=(2 * k - 1) {
                    let want = jacobi_moment_ratio(m, a, b) * mass;
                    let got = r.integrate(|t| t.powi(m as i32));
                    if (got - want).abs() > 1e-13 * want.abs().max(mass) {
                        return Err(format!("moment {m} failed at k={k}, ({a}, {b})"));
                    }
                }
            }
        }
        Ok(())
    }));

    out
}

fn mu_list(mu: Option<&BigRational>) -> Vec<BigRational> {
    match mu {
        Some(m) => vec![m.clone()],
        None => vec![rat(0), rat(1), ratio(1, 2)],
    }
}

fn d_list(d: Option<usize>, default: &[usize]) -> Vec<usize> {
    match d {
        Some(v) => vec![v],
        None => default.to_vec(),
    }
}

pub fn suite_orthogonality(d: Option<usize>, mu: Option<&BigRational>) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let dims = d_list(d, &[2, 3]);
    let mus = mu_list(mu);
    let max_deg = 4u32;

    out.push(run_check("harmonicity", || {
        for &d in &dims {
            for n in 0..=max_deg + 2 {
                for idx in enumerate_degree(d, n) {
                    if !harmonic_basis(&idx).laplacian().is_zero() {
                        return Err(format!("non-harmonic at {:?}", idx));
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("sphere-orthogonality", || {
        for &d in &dims {
            let moments = SphereMoments::new(d, 2 * (max_deg + 2));
            for n in 0..=max_deg + 2 {
                let list = enumerate_degree(d, n);
                for (i, a) in list.iter().enumerate() {
                    let ya = harmonic_basis(a);
                    for b in list.iter().skip(i + 1) {
                        if !num_traits::Zero::is_zero(&moments.ip(&ya, &harmonic_basis(b)).unwrap())
                        {
                            return Err(format!("not orthogonal: {:?} vs {:?}", a, b));
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("beltrami-polynomial-eigenvalue", || {
        for &d in &dims {
            for n in 0..=max_deg {
                for idx in enumerate_degree(d, n) {
                    let y = harmonic_basis(&idx);
                    let mut acc = ExactPoly::zero(d);
                    for i in 0..d {
                        for j in (i + 1)..d {
                            let dij = y.angular_derivative(i, j).unwrap();
                            acc = acc.add(&dij.angular_derivative(i, j).unwrap()).unwrap();
                        }
                    }
                    if acc != y.scale(&rat(-(n as i64) * (n as i64 + d as i64 - 2))) {
                        return Err(format!("eigenvalue law failed at {:?}", idx));
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("ball-orthogonality-norms", || {
        for &d in &dims {
            for mu in &mus {
                let moments = BallMoments::new(d, mu, 2 * max_deg + 2).unwrap();
                let mut basis = Vec::new();
                for n in 0..=max_deg {
                    for j in 0..=(n / 2) {
                        for nu in enumerate_degree(d, n - 2 * j) {
                            let idx = BallBasisIndex::new(n, j, nu.clone()).unwrap();
                            let p = ball_basis_exact(&idx, mu);
                            basis.push((idx, p, sphere_norm(&nu)));
                        }
                    }
                }
                for (i, (ia, pa, ha)) in basis.iter().enumerate() {
                    for (ib, pb, _) in basis.iter().skip(i) {
                        let ip = moments.ip(pa, pb).unwrap();
                        let expect = if ia == ib {
                            h_norm_exact(mu, ia.n, ia.j, d) * ha
                        } else {
                            rat(0)
                        };
                        if ip != expect {
                            return Err(format!("Gram failure at {:?} vs {:?}, mu={mu}", ia, ib));
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("ball-gradient-norms", || {
        for &d in &dims {
            for mu in &mus {
                for n in 0..=max_deg {
                    for j in 0..=(n / 2) {
                        for nu in enumerate_degree(d, n - 2 * j) {
                            let idx = BallBasisIndex::new(n, j, nu.clone()).unwrap();
                            let p = ball_basis_exact(&idx, mu);
                            let got = exact_gradient_form(&p, &p, mu).unwrap();
                            if got != h_grad_exact(mu, n, j, d) * sphere_norm(&nu) {
                                return Err(format!("gradient norm at {:?}, mu={mu}", idx));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("ball-angular-norms", || {
        for &d in &dims {
            for mu in &mus {
                for n in 0..=max_deg {
                    for j in 0..=(n / 2) {
                        for nu in enumerate_degree(d, n - 2 * j) {
                            let idx = BallBasisIndex::new(n, j, nu.clone()).unwrap();
                            let p = ball_basis_exact(&idx, mu);
                            let got = exact_angular_form(&p, &p, mu).unwrap();
                            if got != h_ang_exact(mu, n, j, d) * sphere_norm(&nu) {
                                return Err(format!("angular norm at {:?}, mu={mu}", idx));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("laplacian-shift-action", || {
        for &d in &dims {
            for mu in &mus {
                for n in 0..=max_deg + 2 {
                    for j in 0..=(n / 2) {
                        for nu in enumerate_degree(d, n - 2 * j) {
                            let idx = BallBasisIndex::new(n, j, nu.clone()).unwrap();
                            let lap = ball_basis_exact(&idx, mu).laplacian();
                            let expect = if j == 0 {
                                ExactPoly::zero(d)
                            } else {
                                let tgt = BallBasisIndex::new(n - 2, j - 1, nu.clone()).unwrap();
                                ball_basis_exact(&tgt, &(mu + rat(2)))
                                    .scale(&kappa_exact(n - j, mu, d))
                            };
                            if lap != expect {
                                return Err(format!("Laplacian action at {:?}, mu={mu}", idx));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("derivative-expansion-oracle", || {
        for &d in &dims {
            for n in 0..=max_deg {
                for idx in enumerate_degree(d, n) {
                    let y = harmonic_basis(&idx);
                    for axis in 0..d {
                        let exp = derivative_expansion(&idx, axis);
                        if exp.len() as u64 > 1u64 << (d - 2) {
                            return Err(format!("sparsity bound at {:?}", idx));
                        }
                        if exp.to_poly(d) != y.diff(axis).unwrap() {
                            return Err(format!("derivative mismatch at {:?}, axis {axis}", idx));
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("raise-expansion-oracle", || {
        for &d in &dims {
            for n in 0..=max_deg {
                for idx in enumerate_degree(d, n) {
                    let y = harmonic_basis(&idx);
                    for axis in 0..d {
                        let exp = raise_expansion(&idx, axis);
                        if exp.len() as u64 > 1u64 << (d - 2) {
                            return Err(format!("sparsity bound at {:?}", idx));
                        }
                        let direct =
                            project_to_harmonic(&ExactPoly::var(d, axis).mul(&y).unwrap()).unwrap();
                        if exp.to_poly(d) != direct {
                            return Err(format!("raise mismatch at {:?}, axis {axis}", idx));
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("ball-derivative-oracle", || {
        for &d in &dims {
            for mu in &mus {
                for n in 1..=max_deg {
                    for j in 0..=(n / 2) {
                        for nu in enumerate_degree(d, n - 2 * j) {
                            let idx = BallBasisIndex::new(n, j, nu).unwrap();
                            let p = ball_basis_exact(&idx, mu);
                            for axis in 0..d {
                                let terms = ball_derivative_expansion(&idx, mu, axis).unwrap();
                                if terms.len() as u64 > 1u64 << (d - 1) {
                                    return Err(format!("term bound at {:?}", idx));
                                }
                                if terms.iter().any(|t| t.k != idx.j && t.k + 1 != idx.j) {
                                    return Err(format!("radial sparsity at {:?}", idx));
                                }
                                let assembled =
                                    assemble_ball_expansion(&terms, n - 1, &(mu + rat(1)), d);
                                if assembled != p.diff(axis).unwrap() {
                                    return Err(format!("ball derivative at {:?}", idx));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    out
}

/// Appendix-style closed forms in their own conventions.
pub fn suite_appendix(d: Option<usize>) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let dims = d_list(d, &[2, 3]);
    let n_top = 10u32;

    if dims.contains(&2) {
        // planar convention: cosine on x_1; the two families are the real and
        // imaginary parts of (x_1 + i x_2)^n
        let planar = |kind: u32, n: i64| -> ExactPoly {
            if n < 0 || (kind == 2 && n == 0) {
                return ExactPoly::zero(2);
            }
            let x1 = ExactPoly::var(2, 0);
            let x2 = ExactPoly::var(2, 1);
            let mut re = ExactPoly::zero(2);
            let mut im = ExactPoly::zero(2);
            let mut binom = BigRational::one();
            for k in 0..=n {
                if k > 0 {
                    binom = binom * rat(n - k + 1) / rat(k);
                }
                let term = x1.pow((n - k) as u32).mul(&x2.pow(k as u32)).unwrap().scale(&binom);
                match k % 4 {
                    0 => re = re.add(&term).unwrap(),
                    1 => im = im.add(&term).unwrap(),
                    2 => re = re.sub(&term).unwrap(),
                    _ => im = im.sub(&term).unwrap(),
                }
            }
            if kind == 1 {
                re
            } else {
                im
            }
        };
        out.push(run_check("planar-derivative-rules", || {
            for n in 1..=n_top as i64 {
                let nr = rat(n);
                let checks = [
                    (planar(1, n).diff(0).unwrap(), planar(1, n - 1).scale(&nr)),
                    (planar(2, n).diff(0).unwrap(), planar(2, n - 1).scale(&nr)),
                    (planar(1, n).diff(1).unwrap(), planar(2, n - 1).scale(&nr).neg()),
                    (planar(2, n).diff(1).unwrap(), planar(1, n - 1).scale(&nr)),
                ];
                for (i, (lhs, rhs)) in checks.iter().enumerate() {
                    if lhs != rhs {
                        return Err(format!("planar rule {i} failed at n={n}"));
                    }
                }
            }
            Ok(())
        }));
        out.push(run_check("planar-swap-equivalence", || {
            for n in 1..=n_top {
                let a = harmonic_basis(&HarmonicIndex::new(vec![0, n]).unwrap()).swap_axes(0, 1);
                if a != planar(1, n as i64) {
                    return Err(format!("cosine column mismatch at n={n}"));
                }
                let b =
                    harmonic_basis(&HarmonicIndex::new(vec![1, n - 1]).unwrap()).swap_axes(0, 1);
                if b != planar(2, n as i64) {
                    return Err(format!("sine column mismatch at n={n}"));
                }
            }
            Ok(())
        }));
    }

    if dims.contains(&3) {
        // spatial convention: family 1 is Y_{(0,k,n-k)}, family 2 is
        // Y_{(1,k-1,n-k)}; out-of-range indices are zero
        let spatial = |family: u32, k: i64, n: i64| -> ExactPoly {
            if k < 0 || k > n || n < 0 || (family == 2 && k == 0) {
                return ExactPoly::zero(3);
            }
            let idx = if family == 1 {
                HarmonicIndex::new(vec![0, k as u32, (n - k) as u32]).unwrap()
            } else {
                HarmonicIndex::new(vec![1, (k - 1) as u32, (n - k) as u32]).unwrap()
            };
            harmonic_basis(&idx)
        };
        let half = ratio(1, 2);
        out.push(run_check("spatial-derivative-rules", || {
            // the six closed forms for k >= 1, exactly as printed
            for n in 1..=n_top as i64 {
                for k in 1..=n {
                    let low = rat((n + k) * (n + k - 1)) / rat(2 * (2 * k - 1));
                    let hig = rat(k) + &half;
                    let cases = [
                        (
                            spatial(1, k, n).diff(0).unwrap(),
                            spatial(2, k - 1, n - 1)
                                .scale(&low)
                                .neg()
                                .sub(&spatial(2, k + 1, n - 1).scale(&hig))
                                .unwrap(),
                        ),
                        (
                            spatial(1, k, n).diff(1).unwrap(),
                            spatial(1, k - 1, n - 1)
                                .scale(&low)
                                .sub(&spatial(1, k + 1, n - 1).scale(&hig))
                                .unwrap(),
                        ),
                        (
                            spatial(1, k, n).diff(2).unwrap(),
                            spatial(1, k, n - 1).scale(&rat(n + k)),
                        ),
                        (
                            spatial(2, k, n).diff(0).unwrap(),
                            spatial(1, k - 1, n - 1)
                                .scale(&low)
                                .add(&spatial(1, k + 1, n - 1).scale(&hig))
                                .unwrap(),
                        ),
                        (
                            spatial(2, k, n).diff(1).unwrap(),
                            spatial(2, k - 1, n - 1)
                                .scale(&low)
                                .sub(&spatial(2, k + 1, n - 1).scale(&hig))
                                .unwrap(),
                        ),
                        (
                            spatial(2, k, n).diff(2).unwrap(),
                            spatial(2, k, n - 1).scale(&rat(n + k)),
                        ),
                    ];
                    for (i, (lhs, rhs)) in cases.iter().enumerate() {
                        if lhs != rhs {
                            return Err(format!("spatial rule {i} failed at n={n}, k={k}"));
                        }
                    }
                }
            }
            Ok(())
        }));
        out.push(run_check("spatial-derivative-rules-zonal-doubled", || {
            // k = 0: the tangential rules hold with the k+1 coefficient
            // doubled relative to the printed table (the k-1 term vanishes);
            // the oracle fixes the coefficient at -2(k + 1/2) = -1
            for n in 1..=n_top as i64 {
                let hig = rat(1); // 2 * (0 + 1/2)
                let d1 = spatial(1, 0, n).diff(0).unwrap();
                if d1 != spatial(2, 1, n - 1).scale(&hig).neg() {
                    return Err(format!("zonal x1 rule failed at n={n}"));
                }
                let d2 = spatial(1, 0, n).diff(1).unwrap();
                if d2 != spatial(1, 1, n - 1).scale(&hig).neg() {
                    return Err(format!("zonal x2 rule failed at n={n}"));
                }
                let d3 = spatial(1, 0, n).diff(2).unwrap();
                if d3 != spatial(1, 0, n - 1).scale(&rat(n)) {
                    return Err(format!("zonal x3 rule failed at n={n}"));
                }
            }
            Ok(())
        }));
    }

    out
}

/// Random rational polynomial with integer coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng, d: usize, max_degree: u32, terms: usize) -> ExactPoly {
    let mut p = ExactPoly::zero(d);
    for _ in 0..terms {
        let mut exps = vec![0u32; d];
        let mut left = max_degree;
        for e in exps.iter_mut() {
            *e = rng.gen_range(0..=left);
            left -= *e;
        }
        let c = loop {
            let v = rng.gen_range(-4i64..=4);
            if v != 0 {
                break v;
            }
        };
        p = p.add(&ExactPoly::monomial(d, exps, rat(c))).unwrap();
    }
    p
}

pub fn suite_commuting(seed: u64, d: Option<usize>, mu: Option<&BigRational>) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let dims = d_list(d, &[2, 3]);
    let mus = mu_list(mu);
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let fixtures: Vec<ExactPoly> = (0..20)
        .map(|i| {
            let d = dims[i % dims.len()];
            random_poly(&mut rng, d, 6, 4)
        })
        .collect();

    out.push(run_check("partial-sum-derivative-commute", || {
        for (i, f) in fixtures.iter().enumerate() {
            let mu = &mus[i % mus.len()];
            let n = 2 + (i as u32 % 4);
            for axis in 0..f.dim() {
                let res = partial_commuting_residual(f, mu, n, axis).map_err(|e| e.to_string())?;
                if !res.is_zero() {
                    return Err(format!("nonzero residual on fixture {i}, axis {axis}"));
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("partial-sum-angular-commute", || {
        for (i, f) in fixtures.iter().enumerate() {
            let mu = &mus[i % mus.len()];
            let n = 2 + (i as u32 % 4);
            let d = f.dim();
            for a in 0..d {
                for b in (a + 1)..d {
                    let res =
                        angular_commuting_residual(f, mu, n, a, b).map_err(|e| e.to_string())?;
                    if !res.is_zero() {
                        return Err(format!("nonzero residual on fixture {i}, pair ({a},{b})"));
                    }
                }
            }
        }
        Ok(())
    }));

    out.push(run_check("laplacian-coefficient-map", || {
        let rule = crate::quadrature::build_ball_rule(2, 0.0, 40).map_err(|e| e.to_string())?;
        let rule2 = crate::quadrature::build_ball_rule(2, 2.0, 40).map_err(|e| e.to_string())?;
        let f = |x: &[f64]| (x[0] + 0.5 * x[1]).exp();
        let table = crate::expansion::expand(&f, 10, &rule).map_err(|e| e.to_string())?;
        let mapped = table.laplacian_map().map_err(|e| e.to_string())?;
        let lap = |x: &[f64]| 1.25 * (x[0] + 0.5 * x[1]).exp();
        let direct = crate::expansion::expand(&lap, 8, &rule2).map_err(|e| e.to_string())?;
        for (e, (&a, &b)) in mapped
            .entries()
            .iter()
            .zip(mapped.coeffs().iter().zip(direct.coeffs()))
        {
            if (a - b).abs() > 1e-9 {
                return Err(format!("coefficient mismatch at ({}, {}): {a} vs {b}", e.n, e.j));
            }
        }
        Ok(())
    }));

    out.push(run_check("beltrami-coefficient-map", || {
        let rule = crate::quadrature::build_ball_rule(2, 0.0, 40).map_err(|e| e.to_string())?;
        let f = |x: &[f64]| (x[0] + 0.5 * x[1]).exp();
        let table = crate::expansion::expand(&f, 10, &rule).map_err(|e| e.to_string())?;
        let mapped = table.beltrami_map();
        // Bel f: for f = exp(a.x), D f = (a_2 x_1 - a_1 x_2) f and
        // Bel f = D^2 f = ((a_2 x_1 - a_1 x_2)^2 - (a_1 x_1 + a_2 x_2)) f
        let bel = |x: &[f64]| {
            let w = 0.5 * x[0] - x[1];
            let g = (x[0] + 0.5 * x[1]).exp();
            (w * w - (x[0] + 0.5 * x[1])) * g
        };
        let direct = crate::expansion::expand(&bel, 10, &rule).map_err(|e| e.to_string())?;
        for (e, (&a, &b)) in mapped
            .entries()
            .iter()
            .zip(mapped.coeffs().iter().zip(direct.coeffs()))
        {
            if (a - b).abs() > 1e-9 {
                return Err(format!("coefficient mismatch at ({}, {}): {a} vs {b}", e.n, e.j));
            }
        }
        Ok(())
    }));

    out
}

/// Run a named suite (or all of them).
pub fn run_suite(
    name: &str,
    d: Option<usize>,
    mu: Option<&BigRational>,
    seed: u64,
) -> crate::Result<Vec<CheckResult>> {
    match name {
        "identities" => Ok(suite_identities()),
        "orthogonality" => Ok(suite_orthogonality(d, mu)),
        "appendix" => Ok(suite_appendix(d)),
        "commuting" => Ok(suite_commuting(seed, d, mu)),
        "all" => {
            let mut out = suite_identities();
            out.extend(suite_orthogonality(d, mu));
            out.extend(suite_appendix(d));
            out.extend(suite_commuting(seed, d, mu));
            Ok(out)
        }
        other => Err(crate::Error::InvalidParameter(format!("unknown suite `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn identity_suite_passes() {
        for r in suite_identities() {
            assert!(r.pass, "{}: {}", r.label, r.detail);
        }
    }

    #[test]
    fn appendix_suite_passes() {
        for r in suite_appendix(None) {
            assert!(r.pass, "{}: {}", r.label, r.detail);
        }
    }

    #[test]
    fn catalog_covers_all_suites() {
        let names: Vec<&str> = suite_catalog().iter().map(|(n, _)| *n).collect();
        assert_eq!(names, vec!["identities", "orthogonality", "appendix", "commuting"]);
    }

    #[test]
    fn to_f64_of_exact_norm_is_finite() {
        let h = sphere_norm(&HarmonicIndex::new(vec![0, 2, 1]).unwrap());
        assert!(h.to_f64().unwrap() > 0.0);
    }
}
