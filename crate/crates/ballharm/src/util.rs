//! Small numeric utilities shared across modules.

/// Pairwise (cascade) summation over a slice. Fixed recursion tree, so the
/// result depends only on the input order, never on chunking or thread count.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise reduction of equally sized vectors (elementwise sum), merging in a
/// fixed tree over the input index.
pub fn pairwise_reduce_vecs(mut parts: Vec<Vec<f64>>) -> Vec<f64> {
    assert!(!parts.is_empty());
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x += *y;
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().unwrap()
}

/// Lanczos approximation of ln Γ(x) for x > 0 (g = 7, n = 9 coefficients).
/// Relative accuracy is ~1e-15 over the range used here.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Pochhammer symbol (a)_n = a (a+1) ... (a+n-1) in floating point.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    let mut p = 1.0;
    for i in 0..n {
        p *= a + i as f64;
    }
    p
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b).
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_matches_factorials_and_half_integers() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(5.0), 24.0_f64.ln(), epsilon = 1e-13);
        assert_relative_eq!(ln_gamma(12.0), 39_916_800.0_f64.ln(), epsilon = 1e-13);
        // Gamma(1/2) = sqrt(pi), Gamma(7/2) = 15/8 sqrt(pi)
        assert_relative_eq!(ln_gamma(0.5), std::f64::consts::PI.sqrt().ln(), epsilon = 1e-13);
        assert_relative_eq!(
            ln_gamma(3.5),
            (15.0 / 8.0 * std::f64::consts::PI.sqrt()).ln(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn pairwise_sum_matches_naive_on_smooth_data() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert_relative_eq!(pairwise_sum(&v), naive, epsilon = 1e-12);
    }

    #[test]
    fn pairwise_reduce_matches_elementwise_sum() {
        let parts: Vec<Vec<f64>> = (0..7)
            .map(|k| (0..5).map(|i| (k * 5 + i) as f64).collect())
            .collect();
        let r = pairwise_reduce_vecs(parts);
        // element i collects sum_k (5k + i) over k = 0..7
        assert_eq!(r, vec![105.0, 112.0, 119.0, 126.0, 133.0]);
    }
}
