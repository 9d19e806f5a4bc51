//! Small numerical helpers shared by the distribution code.

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Rising factorial `k (k+1) ... (k+t-1) = Γ(k+t)/Γ(k)` for integer `k ≥ 1`.
pub fn rising_factorial(k: usize, t: usize) -> f64 {
    (0..t).map(|i| (k + i) as f64).product()
}

/// Poisson(`lambda`) probabilities for counts `0..len`.
///
/// Evaluated from the mode outward with the ratio recurrence so that no
/// intermediate `e^{-lambda}` or `lambda^j` is ever formed; entries that
/// underflow are left at zero.
pub fn poisson_pmf(lambda: f64, len: usize) -> Vec<f64> {
    let mut p = vec![0.0; len];
    if len == 0 {
        return p;
    }
    if lambda <= 0.0 {
        p[0] = 1.0;
        return p;
    }
    let mode = (lambda.floor() as usize).min(len - 1);
    let peak = (mode as f64 * lambda.ln() - lambda - ln_factorial(mode)).exp();
    p[mode] = peak;
    let mut v = peak;
    for (j, slot) in p.iter_mut().enumerate().skip(mode + 1) {
        v *= lambda / j as f64;
        if v == 0.0 {
            break;
        }
        *slot = v;
    }
    v = peak;
    for j in (0..mode).rev() {
        v *= (j + 1) as f64 / lambda;
        if v == 0.0 {
            break;
        }
        p[j] = v;
    }
    p
}

/// Poisson(`lambda`) cumulative probabilities `P(N ≤ j)` for `j in 0..len`.
///
/// Entry `k-1` is the Erlang survival `W̄_k(x, β)` with `lambda = βx`.
pub fn poisson_cdf(lambda: f64, len: usize) -> Vec<f64> {
    let mut c = poisson_pmf(lambda, len);
    let mut acc = 0.0;
    for v in c.iter_mut() {
        acc += *v;
        *v = acc.min(1.0);
    }
    c
}

/// Suffix sums `out[j] = Σ_{k ≥ j} v[k]`.
pub fn suffix_sums(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    let mut acc = 0.0;
    for (o, x) in out.iter_mut().zip(v).rev() {
        acc += x;
        *o = acc;
    }
    out
}

/// Full discrete convolution of two coefficient vectors.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// `ln Σ exp(v)`; `-inf` for an empty or all-`-inf` slice.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Smallest `x ≥ 0` with `f(x) ≥ target` for a nondecreasing `f`, found by
/// doubling an upper bracket from `start` and bisecting to relative width
/// `1e-14`. Returns `None` if no bracket is found.
pub fn invert_increasing<F>(f: F, target: f64, start: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut lo = 0.0;
    let mut hi = if start.is_finite() && start > 0.0 { start } else { 1.0 };
    let mut guard = 0;
    while f(hi) < target {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 1100 || !hi.is_finite() {
            return None;
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1e-300) {
            break;
        }
    }
    Some(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_pmf_matches_closed_form() {
        let p = poisson_pmf(2.5, 8);
        for (j, v) in p.iter().enumerate() {
            let exact = (-2.5f64).exp() * 2.5f64.powi(j as i32) / (1..=j).map(|i| i as f64).product::<f64>();
            assert!((v - exact).abs() < 1e-15, "j={j}");
        }
    }

    #[test]
    fn poisson_pmf_large_lambda_sums_to_one() {
        let p = poisson_pmf(5000.0, 12_000);
        let s: f64 = p.iter().sum();
        assert!((s - 1.0).abs() < 1e-11, "{s}");
        assert_eq!(p[0], 0.0);
    }

    #[test]
    fn poisson_at_zero_is_point_mass() {
        assert_eq!(poisson_pmf(0.0, 3), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn convolve_small() {
        assert_eq!(convolve(&[1.0, 2.0], &[3.0, 4.0]), vec![3.0, 10.0, 8.0]);
    }

    #[test]
    fn invert_finds_exponential_quantile() {
        let x = invert_increasing(|x| 1.0 - (-x).exp(), 0.5, 1.0).unwrap();
        assert!((x - 2f64.ln()).abs() < 1e-13);
    }
}
