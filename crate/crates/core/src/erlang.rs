//! Erlang and mixed Erlang distributions with a common scale (rate).
//!
//! A [`MixedErlang`] stores the rate `β` and a truncated weight vector where
//! `weights[k]` is the probability of the Erlang component with shape `k + 1`.
//! The class is closed under the operations implemented here: raising the
//! rate ([`MixedErlang::rescale`]), summing independent risks that share a
//! rate ([`MixedErlang::convolve`]) and kernel tilting
//! ([`MixedErlang::kernel_transform`]). Every weight vector produced by these
//! operations is cut at the first index whose remaining mass is below
//! [`WEIGHT_TOLERANCE`] and renormalized.

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::numeric::{self, ln_binomial, ln_factorial, log_sum_exp, poisson_pmf, suffix_sums};

/// Mass allowed beyond the last stored weight.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Upper bound on the number of stored components.
pub const DEFAULT_MAX_COMPONENTS: usize = 10_000;

/// Tolerance on the total of user supplied weights.
const INPUT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Pdf,
    Cdf,
    Sf,
}

/// Shape and rate of a single Erlang law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErlangParams {
    shape: u32,
    scale: f64,
}

impl ErlangParams {
    pub fn new(shape: u32, scale: f64) -> Result<Self> {
        if shape == 0 {
            return Err(Error::Domain("Erlang shape must be at least 1".into()));
        }
        check_scale(scale)?;
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> u32 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("scale must be positive and finite, got {scale}")))
    }
}

fn check_point(x: f64) -> Result<()> {
    if x >= 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("evaluation point must be non-negative, got {x}")))
    }
}

/// Erlang density `w_k(x, β)`.
fn erlang_pdf(shape: usize, beta: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if shape == 1 { beta } else { 0.0 };
    }
    if x.is_infinite() {
        return 0.0;
    }
    let k1 = (shape - 1) as f64;
    (beta.ln() + k1 * (beta * x).ln() - beta * x - ln_factorial(shape - 1)).exp()
}

/// Erlang survival `W̄_k(x, β)` from its finite Poisson sum.
fn erlang_sf(shape: usize, beta: f64, x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    poisson_pmf(beta * x, shape).iter().sum::<f64>().min(1.0)
}

/// Evaluate the pdf, cdf or survival function of an Erlang law.
pub fn erlang_eval(params: ErlangParams, x: f64, which: Evaluation) -> Result<f64> {
    check_point(x)?;
    let k = params.shape as usize;
    let b = params.scale;
    Ok(match which {
        Evaluation::Pdf => erlang_pdf(k, b, x),
        Evaluation::Sf => erlang_sf(k, b, x),
        Evaluation::Cdf => 1.0 - erlang_sf(k, b, x),
    })
}

/// Raw-moment derived summary statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    /// Non-excess kurtosis `μ₄ / σ⁴`.
    pub kurtosis: f64,
}

/// Result of `g(x) f(x) / E[g(X)]` for a kernel `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct TiltResult {
    pub tilted: MixedErlang,
    /// `E[g(X)]`.
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedErlang {
    scale: f64,
    weights: Vec<f64>,
    tail_mass: f64,
    /// `tails[j] = Σ_{k ≥ j} weights[k]`, i.e. the mass on shapes `> j`.
    tails: Vec<f64>,
}

impl MixedErlang {
    /// Construct from user supplied weights, which must be non-negative and
    /// sum to one within `1e-9`.
    pub fn new(scale: f64, weights: Vec<f64>) -> Result<Self> {
        check_scale(scale)?;
        if weights.is_empty() {
            return Err(Error::InvalidModel("weight vector is empty".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidModel(format!("weight {} is {w}; weights must be non-negative", i + 1)));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > INPUT_SUM_TOLERANCE {
            return Err(Error::InvalidModel(format!("weights sum to {total}, expected 1")));
        }
        Self::from_masses(scale, weights, 0.0)
    }

    /// Exponential law with rate `scale`.
    pub fn exponential(scale: f64) -> Result<Self> {
        Self::new(scale, vec![1.0])
    }

    /// Pure Erlang law.
    pub fn erlang(params: ErlangParams) -> Self {
        let mut w = vec![0.0; params.shape as usize];
        w[params.shape as usize - 1] = 1.0;
        Self::from_masses(params.scale, w, 0.0).expect("a single unit weight is always valid")
    }

    /// Build from non-negative masses whose total, together with `missing`
    /// (mass known to lie beyond the vector), is one. Truncates and
    /// renormalizes.
    pub(crate) fn from_masses(scale: f64, mut masses: Vec<f64>, missing: f64) -> Result<Self> {
        for m in masses.iter_mut() {
            if *m < 0.0 {
                // roundoff only; every producer works with positive terms
                *m = 0.0;
            }
        }
        let tails = suffix_sums(&masses);
        let cut = (0..=masses.len())
            .find(|&m| tails.get(m).copied().unwrap_or(0.0) + missing < WEIGHT_TOLERANCE)
            .ok_or(Error::TruncationCap { cap: masses.len() })?;
        if cut > DEFAULT_MAX_COMPONENTS {
            return Err(Error::TruncationCap { cap: DEFAULT_MAX_COMPONENTS });
        }
        let tail_mass = tails.get(cut).copied().unwrap_or(0.0) + missing;
        masses.truncate(cut);
        let kept: f64 = masses.iter().sum();
        if kept.is_nan() || kept <= 0.0 {
            return Err(Error::InvalidModel("weight vector carries no mass".into()));
        }
        for m in masses.iter_mut() {
            *m /= kept;
        }
        let tails = suffix_sums(&masses);
        Ok(Self { scale, weights: masses, tail_mass, tails })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `weights()[k]` is the weight of shape `k + 1`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Largest shape carrying stored weight.
    pub fn max_shape(&self) -> usize {
        self.weights.len()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x == 0.0 {
            return self.weights[0] * self.scale;
        }
        if x.is_infinite() {
            return 0.0;
        }
        let p = poisson_pmf(self.scale * x, self.weights.len());
        self.scale * self.weights.iter().zip(&p).map(|(q, p)| q * p).sum::<f64>()
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x.is_infinite() {
            return 0.0;
        }
        let p = poisson_pmf(self.scale * x, self.tails.len());
        p.iter().zip(&self.tails).map(|(p, t)| p * t).sum::<f64>().clamp(0.0, 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.sf(x)
    }

    pub fn eval(&self, x: f64, which: Evaluation) -> Result<f64> {
        check_point(x)?;
        Ok(match which {
            Evaluation::Pdf => self.pdf(x),
            Evaluation::Cdf => self.cdf(x),
            Evaluation::Sf => self.sf(x),
        })
    }

    /// `E[X^order] = Σ q_k Γ(k + order) / (Γ(k) β^order)`.
    pub fn moment(&self, order: u32) -> Result<f64> {
        if order == 0 {
            return Err(Error::Domain("moment order must be at least 1".into()));
        }
        let n = order as usize;
        let s: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, q)| q * numeric::rising_factorial(i + 1, n))
            .sum();
        Ok(s / self.scale.powi(order as i32))
    }

    pub fn mean(&self) -> f64 {
        self.moment(1).expect("order 1 is valid")
    }

    pub fn moments(&self) -> Moments {
        let m: Vec<f64> = (1..=4).map(|o| self.moment(o).expect("positive order")).collect();
        let mu = m[0];
        let var = m[1] - mu * mu;
        let c3 = m[2] - 3.0 * mu * m[1] + 2.0 * mu.powi(3);
        let c4 = m[3] - 4.0 * mu * m[2] + 6.0 * mu * mu * m[1] - 3.0 * mu.powi(4);
        Moments {
            mean: mu,
            variance: var,
            skewness: c3 / var.powf(1.5),
            kurtosis: c4 / (var * var),
        }
    }

    /// Re-express the same law with a larger rate.
    ///
    /// Each Erlang(k, β₁) is a negative-binomial mixture of Erlang(·, β₂), so
    /// `ψ(z) = Σ q_k G(z)^k` with the geometric generating function
    /// `G(z) = r z / (1 - (1-r) z)`, `r = β₁/β₂`. The sum is evaluated in
    /// Horner form, where each application of `G` is a first-order positive
    /// recurrence.
    pub fn rescale(&self, new_scale: f64) -> Result<Self> {
        check_scale(new_scale)?;
        if new_scale < self.scale {
            return Err(Error::RescaleDirection { from: self.scale, to: new_scale });
        }
        if new_scale == self.scale {
            return Ok(self.clone());
        }
        let r = self.scale / new_scale;
        let m = self.weights.len() as f64;
        let mut len = ((m + 8.0 * m.sqrt() + 40.0) / r).ceil() as usize;
        loop {
            let capped = len.min(DEFAULT_MAX_COMPONENTS + 1);
            let psi = horner_geometric(&self.weights, r, capped);
            let missing = (1.0 - psi.iter().sum::<f64>()).max(0.0);
            if missing < 0.5 * WEIGHT_TOLERANCE {
                // index 0 is shape 0, which never carries mass
                return Self::from_masses(new_scale, psi[1..].to_vec(), missing);
            }
            if capped > DEFAULT_MAX_COMPONENTS {
                return Err(Error::TruncationCap { cap: DEFAULT_MAX_COMPONENTS });
            }
            len *= 2;
        }
    }

    /// Law of the sum of two independent mixed Erlangs with the same rate.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if !same_scale(self.scale, other.scale) {
            return Err(Error::ScaleMismatch { expected: self.scale, found: other.scale });
        }
        // shape (i+1) + (j+1) lands on index i + j + 1
        let mut c = vec![0.0];
        c.extend(numeric::convolve(&self.weights, &other.weights));
        Self::from_masses(self.scale, c, 0.0)
    }

    /// Tilt the density by `g`: returns the mixed Erlang with density
    /// `g(x) f(x) / E[g(X)]` and `E[g(X)]`.
    pub fn kernel_transform(&self, kernel: &KernelSpec) -> Result<TiltResult> {
        match *kernel {
            KernelSpec::Fgm => self.fgm_tilt(),
            KernelSpec::Power { t } => self.power_tilt(t as usize),
            KernelSpec::Laplace { t } => self.laplace_tilt(t),
        }
    }

    fn fgm_tilt(&self) -> Result<TiltResult> {
        // θ_s = 2^{1-s} Σ_j C(s-1, j-1) q_j Σ_{l ≥ s-j+1} q_l
        let m = self.weights.len();
        let len = 2 * m - 1;
        let ln2 = std::f64::consts::LN_2;
        let mut theta = vec![0.0; len];
        for (si, th) in theta.iter_mut().enumerate() {
            let s = si + 1;
            let lo = s.saturating_sub(m).max(1);
            let hi = s.min(m);
            let mut acc = 0.0;
            for j in lo..=hi {
                let tail = self.tails.get(s - j).copied().unwrap_or(0.0);
                let qj = self.weights[j - 1];
                if tail == 0.0 || qj == 0.0 {
                    continue;
                }
                let w = (ln_binomial(s - 1, j - 1) - (s - 1) as f64 * ln2).exp();
                acc += w * qj * tail;
            }
            *th = acc;
        }
        Ok(TiltResult {
            tilted: Self::from_masses(2.0 * self.scale, theta, 0.0)?,
            gamma: 1.0,
        })
    }

    fn power_tilt(&self, t: usize) -> Result<TiltResult> {
        let logs: Vec<f64> = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                if q == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    q.ln() + ln_factorial(i + t) - ln_factorial(i)
                }
            })
            .collect();
        let norm = log_sum_exp(&logs);
        let mut theta = vec![0.0; t];
        theta.extend(logs.iter().map(|l| (l - norm).exp()));
        let gamma = (norm - t as f64 * self.scale.ln()).exp();
        Ok(TiltResult { tilted: Self::from_masses(self.scale, theta, 0.0)?, gamma })
    }

    fn laplace_tilt(&self, t: f64) -> Result<TiltResult> {
        let lb = (self.scale / (self.scale + t)).ln();
        let logs: Vec<f64> = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &q)| if q == 0.0 { f64::NEG_INFINITY } else { q.ln() + (i + 1) as f64 * lb })
            .collect();
        let norm = log_sum_exp(&logs);
        let theta = logs.iter().map(|l| (l - norm).exp()).collect();
        Ok(TiltResult {
            tilted: Self::from_masses(self.scale + t, theta, 0.0)?,
            gamma: norm.exp(),
        })
    }

    /// Smallest `x` with `F(x) ≥ p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
        }
        numeric::invert_increasing(|x| self.cdf(x), p, self.mean())
            .ok_or_else(|| Error::Domain(format!("no quantile bracket found for p = {p}")))
    }
}

/// Evaluate `Σ_k q_k G(z)^k` truncated to `len` coefficients (index = shape).
fn horner_geometric(q: &[f64], r: f64, len: usize) -> Vec<f64> {
    let mut a = vec![0.0; len];
    let mut next = vec![0.0; len];
    a[0] = *q.last().expect("non-empty weights");
    for i in (0..q.len()).rev() {
        // a ← G(a)
        next[0] = 0.0;
        for k in 1..len {
            next[k] = r * a[k - 1] + (1.0 - r) * next[k - 1];
        }
        std::mem::swap(&mut a, &mut next);
        if i > 0 {
            a[0] += q[i - 1];
        }
    }
    a
}

pub(crate) fn same_scale(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Sum of independent mixed Erlangs sharing one rate.
pub fn convolve_all(xs: &[MixedErlang]) -> Result<MixedErlang> {
    let (first, rest) = xs
        .split_first()
        .ok_or_else(|| Error::Domain("cannot convolve an empty list".into()))?;
    rest.iter().try_fold(first.clone(), |acc, x| acc.convolve(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x1() -> MixedErlang {
        MixedErlang::new(0.12, vec![0.4, 0.6]).unwrap()
    }
    fn x2() -> MixedErlang {
        MixedErlang::new(0.14, vec![0.3, 0.7]).unwrap()
    }
    fn x3() -> MixedErlang {
        MixedErlang::new(0.15, vec![0.5, 0.5]).unwrap()
    }
    fn x4() -> MixedErlang {
        MixedErlang::new(0.16, vec![0.8, 0.2]).unwrap()
    }

    /// Independent oracle: density written directly from `β^k x^{k-1} e^{-βx}/(k-1)!`.
    fn direct_pdf(x: &MixedErlang, t: f64) -> f64 {
        let b = x.scale();
        x.weights()
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let k = i as i32 + 1;
                let fact: f64 = (1..k).map(|j| j as f64).product();
                q * b.powi(k) * t.powi(k - 1) * (-b * t).exp() / fact
            })
            .sum()
    }

    fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        quadrature::integrate(f, a, b, 1e-13).integral
    }

    #[test]
    fn erlang_trivial_values() {
        let e1 = ErlangParams::new(1, 1.0).unwrap();
        assert_eq!(erlang_eval(e1, 0.0, Evaluation::Pdf).unwrap(), 1.0);
        let e3 = ErlangParams::new(3, 0.5).unwrap();
        assert_eq!(erlang_eval(e3, 0.0, Evaluation::Cdf).unwrap(), 0.0);
        let e2 = ErlangParams::new(2, 1.0).unwrap();
        let v = erlang_eval(e2, 1.0, Evaluation::Cdf).unwrap();
        assert!((v - (1.0 - 2.0 * (-1f64).exp())).abs() < 1e-15);
        assert!((v - 0.2642411).abs() < 1e-7);
    }

    #[test]
    fn erlang_domain_errors() {
        assert!(ErlangParams::new(2, 0.0).is_err());
        assert!(ErlangParams::new(0, 1.0).is_err());
        let e = ErlangParams::new(2, 1.0).unwrap();
        assert!(erlang_eval(e, -1.0, Evaluation::Pdf).is_err());
    }

    #[test]
    fn erlang_large_shape_is_finite() {
        let e = ErlangParams::new(3000, 2.0).unwrap();
        let pdf = erlang_eval(e, 1500.0, Evaluation::Pdf).unwrap();
        assert!(pdf.is_finite() && pdf > 0.0);
        let sf = erlang_eval(e, 1500.0, Evaluation::Sf).unwrap();
        assert!((sf - 0.5).abs() < 0.01);
    }

    #[test]
    fn me_eval_examples() {
        assert!((x1().pdf(0.0) - 0.048).abs() < 1e-15);
        let e = MixedErlang::exponential(1.0).unwrap();
        assert!((e.sf(1.0) - (-1f64).exp()).abs() < 1e-15);
        // quadrature of the directly written pdf
        let x = x1();
        let q = integrate(|t| direct_pdf(&x, t), 0.0, 20.0);
        assert!((x.cdf(20.0) - q).abs() < 1e-8, "{} vs {q}", x.cdf(20.0));
        assert!(x.eval(-0.1, Evaluation::Cdf).is_err());
    }

    #[test]
    fn moments_match_table_one() {
        let m = x1().moments();
        assert!((m.mean - 13.33).abs() < 5e-3);
        assert!((m.variance - 127.78).abs() < 5e-3);
        let m4 = x4().moments();
        assert!((m4.mean - 7.50).abs() < 5e-3);
        assert!((m4.variance - 53.13).abs() < 1e-2);
        // skewness and kurtosis columns for X1, X3, X4
        assert!((m.skewness - 1.55).abs() < 5e-3);
        assert!((m.kurtosis - 6.50).abs() < 5e-3);
        assert!((x3().moments().kurtosis - 6.80).abs() < 5e-3);
        assert!((m4.kurtosis - 8.16).abs() < 5e-3);
        assert_eq!(MixedErlang::exponential(1.0).unwrap().moment(2).unwrap(), 2.0);
    }

    #[test]
    fn rescale_identity_and_geometric() {
        let x = x1();
        assert_eq!(x.rescale(0.12).unwrap().weights(), x.weights());
        let e = MixedErlang::exponential(1.0).unwrap().rescale(2.0).unwrap();
        for (i, w) in e.weights().iter().take(30).enumerate() {
            assert!((w - 0.5f64.powi(i as i32 + 1)).abs() < 1e-12, "k={}", i + 1);
        }
        assert!(x.rescale(0.1).is_err());
    }

    #[test]
    fn rescale_preserves_cdf() {
        let x = x1();
        for target in [0.2, 1.16, 5.0] {
            let y = x.rescale(target).unwrap();
            for t in [0.5, 1.0, 5.0] {
                assert!((x.cdf(t) - y.cdf(t)).abs() < 1e-10, "target {target} x {t}");
            }
        }
    }

    #[test]
    fn convolution_examples() {
        let e = MixedErlang::exponential(0.7).unwrap();
        let s = e.convolve(&e).unwrap();
        assert_eq!(s.weights(), &[0.0, 1.0]);
        assert_eq!(convolve_all(std::slice::from_ref(&e)).unwrap(), e);
        let z = 0.14;
        let s = convolve_all(&[x1().rescale(z).unwrap(), x2()]).unwrap();
        assert!((s.mean() - (x1().mean() + x2().mean())).abs() < 1e-6);
        assert!((s.mean() - 25.476).abs() < 1e-3);
        assert!(x1().convolve(&x2()).is_err());
        assert!(convolve_all(&[]).is_err());
    }

    #[test]
    fn tilt_examples() {
        let e = MixedErlang::exponential(0.3).unwrap();
        let f = e.kernel_transform(&KernelSpec::Fgm).unwrap();
        assert!((f.tilted.scale() - 0.6).abs() < 1e-15);
        assert!((f.tilted.weights()[0] - 1.0).abs() < 1e-15 && f.gamma == 1.0);
        let l = e.kernel_transform(&KernelSpec::Laplace { t: 0.9 }).unwrap();
        assert!((l.tilted.scale() - 1.2).abs() < 1e-15);
        assert!((l.gamma - 0.3 / 1.2).abs() < 1e-15);
        let x = x3();
        let f = x.kernel_transform(&KernelSpec::Fgm).unwrap();
        assert!((f.tilted.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let q = integrate(|t| t * direct_pdf(&x, t) * 2.0 * x.sf(t), 0.0, 2000.0);
        assert!((f.tilted.mean() - q).abs() < 1e-8, "{} {q}", f.tilted.mean());
    }

    #[test]
    fn tilt_moments_match_quadrature_for_all_kernels() {
        let kernels = [KernelSpec::Fgm, KernelSpec::Power { t: 2 }, KernelSpec::Laplace { t: 1.0 }];
        for x in [x1(), x2(), x3(), x4()] {
            for k in &kernels {
                let tr = x.kernel_transform(k).unwrap();
                let g = |t: f64| match *k {
                    KernelSpec::Fgm => 2.0 * x.sf(t),
                    KernelSpec::Power { t: p } => t.powi(p as i32),
                    KernelSpec::Laplace { t: s } => (-s * t).exp(),
                };
                for n in 0..=2 {
                    let lhs = if n == 0 { tr.gamma } else { tr.gamma * tr.tilted.moment(n).unwrap() };
                    let rhs = integrate(|t| t.powi(n as i32) * g(t) * direct_pdf(&x, t), 0.0, 3000.0);
                    assert!((lhs - rhs).abs() <= 1e-7 * rhs.abs().max(1.0), "{k} n={n}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn quantile_examples() {
        let e = MixedErlang::exponential(1.0).unwrap();
        let q = e.quantile(1.0 - (-1f64).exp()).unwrap();
        assert!((q - 1.0).abs() < 1e-9);
        assert!(e.quantile(1e-12).unwrap() < 1e-9);
        let x = x1();
        let q = x.quantile(0.99).unwrap();
        assert!((x.cdf(q) - 0.99).abs() < 1e-10);
        assert!(x.quantile(0.0).is_err() && x.quantile(1.0).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(MixedErlang::new(1.0, vec![0.5, 0.4]).is_err());
        assert!(MixedErlang::new(1.0, vec![-0.1, 1.1]).is_err());
        assert!(MixedErlang::new(0.0, vec![1.0]).is_err());
        assert!(MixedErlang::new(1.0, vec![]).is_err());
    }

    fn arb_me() -> impl Strategy<Value = MixedErlang> {
        (0.05f64..2.0, prop::collection::vec(0.0f64..1.0, 1..6)).prop_filter_map("mass", |(b, w)| {
            let s: f64 = w.iter().sum();
            (s > 1e-3).then(|| MixedErlang::new(b, w.iter().map(|v| v / s).collect()).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normalization_and_complement(x in arb_me(), t in 0.0f64..60.0) {
            prop_assert!((x.weights().iter().sum::<f64>() + x.tail_mass() - 1.0).abs() <= 1e-12);
            prop_assert!((x.cdf(t) + x.sf(t) - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn cdf_is_monotone(x in arb_me(), a in 0.0f64..40.0, h in 0.0f64..40.0) {
            prop_assert!(x.cdf(a) <= x.cdf(a + h) + 1e-15);
        }

        #[test]
        fn rescale_invariance(x in arb_me(), factor in 1.0f64..12.0) {
            let y = x.rescale(x.scale() * factor).unwrap();
            let hi = x.quantile(0.999).unwrap();
            for i in 0..20 {
                let t = hi * i as f64 / 19.0;
                prop_assert!((x.cdf(t) - y.cdf(t)).abs() <= 1e-10);
            }
        }

        #[test]
        fn convolution_additivity(a in arb_me(), b in arb_me()) {
            let z = a.scale().max(b.scale());
            let (ra, rb) = (a.rescale(z).unwrap(), b.rescale(z).unwrap());
            let s = ra.convolve(&rb).unwrap();
            let (ma, mb) = (a.moments(), b.moments());
            let ms = s.moments();
            prop_assert!((ms.mean - ma.mean - mb.mean).abs() <= 1e-9 * ms.mean);
            // truncating the rescaled tail costs a little more on the second moment
            prop_assert!((ms.variance - ma.variance - mb.variance).abs() <= 1e-7 * ms.variance);
        }

        #[test]
        fn quantile_round_trip(x in arb_me(), p in 0.001f64..0.999) {
            let q = x.quantile(p).unwrap();
            prop_assert!((x.cdf(q) - p).abs() <= 1e-9);
        }
    }
}
