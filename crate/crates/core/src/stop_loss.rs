//! Stop-loss transforms of mixed Erlang risks.
//!
//! For `Y = (X - d)₊` with `X ~ ME(β, q)`, the continuous part of `Y` is again
//! a mixture of Erlangs with the same rate: on `y > 0`,
//! `f_X(d + y) = Σ_k Δ_k w_{k+1}(y, β)` with
//! `Δ_k = Σ_j q_{j+k+1} (βd)^j e^{-βd} / j!`.
//! The Δ's carry the mass `F̄_X(d)`; the atom `P(Y = 0) = F_X(d)` is kept
//! separately, so `F_Y(y) = F_X(d) + Σ_k Δ_k W_{k+1}(y, β)` for `y > 0`.

use crate::erlang::{same_scale, MixedErlang, WEIGHT_TOLERANCE};
use crate::error::{Error, Result};
use crate::numeric::{convolve, poisson_cdf, poisson_pmf, suffix_sums};

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaCoeffs {
    pub deductible: f64,
    pub base_scale: f64,
    /// `coeffs[k]` multiplies the Erlang law of shape `k + 1`.
    pub coeffs: Vec<f64>,
}

impl DeltaCoeffs {
    pub fn total(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}

fn check_deductible(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("deductible must be positive, got {d}")))
    }
}

pub fn delta_coeffs(x: &MixedErlang, d: f64) -> Result<DeltaCoeffs> {
    check_deductible(d)?;
    let q = x.weights();
    let m = q.len();
    let pois = poisson_pmf(x.scale() * d, m);
    let mut coeffs: Vec<f64> = (0..m)
        .map(|k| q[k..].iter().zip(&pois).map(|(a, b)| a * b).sum())
        .collect();
    let tails = suffix_sums(&coeffs);
    let keep = tails.iter().position(|&t| t < WEIGHT_TOLERANCE).unwrap_or(m).max(1);
    coeffs.truncate(keep);
    Ok(DeltaCoeffs { deductible: d, base_scale: x.scale(), coeffs })
}

/// `Y = (X - d)₊` for a single mixed Erlang risk.
#[derive(Clone, Debug)]
pub struct StopLossRisk {
    scale: f64,
    atom: f64,
    delta: DeltaCoeffs,
}

impl StopLossRisk {
    pub fn new(x: &MixedErlang, d: f64) -> Result<Self> {
        let delta = delta_coeffs(x, d)?;
        Ok(Self { scale: x.scale(), atom: x.cdf(d), delta })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn deductible(&self) -> f64 {
        self.delta.deductible
    }

    /// `P(Y = 0) = F_X(d)`.
    pub fn atom(&self) -> f64 {
        self.atom
    }

    pub fn delta(&self) -> &DeltaCoeffs {
        &self.delta
    }

    /// `P(0 < Y ≤ y) = Σ Δ_k W_{k+1}(y)`.
    pub fn increment(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let c = &self.delta.coeffs;
        let wbar = poisson_cdf(self.scale * y, c.len());
        c.iter().zip(&wbar).map(|(d, w)| d * (1.0 - w)).sum()
    }

    /// `F_Y(y)`.
    pub fn df(&self, y: f64) -> f64 {
        self.atom + self.increment(y)
    }

    /// `E[Y · 1{Y > c}] = (1/β) Σ (k+1) Δ_k W̄_{k+2}(c)`.
    pub fn upper_partial(&self, c: f64) -> f64 {
        let d = &self.delta.coeffs;
        let wbar = poisson_cdf(self.scale * c.max(0.0), d.len() + 1);
        d.iter()
            .enumerate()
            .map(|(k, dk)| (k + 1) as f64 * dk * wbar[k + 1])
            .sum::<f64>()
            / self.scale
    }

    /// `E[Y]`.
    pub fn premium(&self) -> f64 {
        self.upper_partial(0.0)
    }
}

pub fn stoploss_df(x: &MixedErlang, d: f64, y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::Domain(format!("stop-loss argument must be non-negative, got {y}")));
    }
    Ok(StopLossRisk::new(x, d)?.df(y))
}

pub fn partial_expectation_single(x: &MixedErlang, d: f64, c: f64) -> Result<f64> {
    if c < 0.0 {
        return Err(Error::Domain(format!("threshold must be non-negative, got {c}")));
    }
    Ok(StopLossRisk::new(x, d)?.upper_partial(c))
}

/// Which factor weights the double series of the pair partial expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairPart {
    /// `(k + 1)`: the first risk's share.
    First,
    /// `(j + 1)`: the second risk's share.
    Second,
    /// `(k + j + 2)`: the sum.
    Sum,
}

/// Two independent stop-loss risks sharing one rate, with the double series
/// over `(k, j)` collapsed onto diagonals `n = k + j`.
#[derive(Clone, Debug)]
pub struct StopLossPair {
    first: StopLossRisk,
    second: StopLossRisk,
    /// `Σ_{k+j=n} Δ_k Δ'_j`
    both: Vec<f64>,
    /// `Σ_{k+j=n} (k+1) Δ_k Δ'_j`
    first_weighted: Vec<f64>,
    /// `Σ_{k+j=n} (j+1) Δ_k Δ'_j`
    second_weighted: Vec<f64>,
}

impl StopLossPair {
    pub fn new(x1: &MixedErlang, d1: f64, x2: &MixedErlang, d2: f64) -> Result<Self> {
        if !same_scale(x1.scale(), x2.scale()) {
            return Err(Error::ScaleMismatch { expected: x1.scale(), found: x2.scale() });
        }
        Ok(Self::from_risks(StopLossRisk::new(x1, d1)?, StopLossRisk::new(x2, d2)?))
    }

    pub(crate) fn from_risks(first: StopLossRisk, second: StopLossRisk) -> Self {
        let a = &first.delta.coeffs;
        let b = &second.delta.coeffs;
        let wa: Vec<f64> = a.iter().enumerate().map(|(k, v)| (k + 1) as f64 * v).collect();
        let wb: Vec<f64> = b.iter().enumerate().map(|(j, v)| (j + 1) as f64 * v).collect();
        let both = convolve(a, b);
        let first_weighted = convolve(&wa, b);
        let second_weighted = convolve(a, &wb);
        Self { first, second, both, first_weighted, second_weighted }
    }

    pub fn first(&self) -> &StopLossRisk {
        &self.first
    }

    pub fn second(&self) -> &StopLossRisk {
        &self.second
    }

    fn scale(&self) -> f64 {
        self.first.scale
    }

    /// `P(Y₁ + Y₂ ≤ s, Y₁ > 0, Y₂ > 0) = Σ Δ_k Δ'_j W_{k+j+2}(s)`.
    pub fn continuous_df(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let wbar = poisson_cdf(self.scale() * s, self.both.len() + 2);
        self.both.iter().enumerate().map(|(n, v)| v * (1.0 - wbar[n + 1])).sum()
    }

    /// `E[Y · 1{Y₁ + Y₂ > c, Y₁ > 0, Y₂ > 0}]` for `Y` the selected part.
    pub fn upper_partial(&self, c: f64, which: PairPart) -> f64 {
        let c = c.max(0.0);
        let len = self.both.len() + 3;
        let wbar = poisson_cdf(self.scale() * c, len);
        let series = |v: &[f64]| -> f64 { v.iter().enumerate().map(|(n, x)| x * wbar[n + 2]).sum() };
        let total = match which {
            PairPart::First => series(&self.first_weighted),
            PairPart::Second => series(&self.second_weighted),
            PairPart::Sum => series(&self.first_weighted) + series(&self.second_weighted),
        };
        total / self.scale()
    }

    /// `P(Y₁ + Y₂ ≤ s)` by the four-event decomposition over `{Yᵢ = 0}` and `{Yᵢ > 0}`.
    pub fn sum_df(&self, s: f64) -> f64 {
        let (a1, a2) = (self.first.atom, self.second.atom);
        let mut v = a1 * a2;
        if s > 0.0 {
            v += a1 * self.second.increment(s) + a2 * self.first.increment(s) + self.continuous_df(s);
        }
        v
    }

    /// `E[(Y₁ + Y₂) · 1{Y₁ + Y₂ > c}]`.
    pub fn sum_upper_partial(&self, c: f64) -> f64 {
        self.first.atom * self.second.upper_partial(c)
            + self.second.atom * self.first.upper_partial(c)
            + self.upper_partial(c, PairPart::Sum)
    }

    /// `E[Y₁ · 1{Y₁ + Y₂ > c}]`.
    pub fn first_upper_partial(&self, c: f64) -> f64 {
        self.second.atom * self.first.upper_partial(c) + self.upper_partial(c, PairPart::First)
    }

    /// `E[Y₂ · 1{Y₁ + Y₂ > c}]`.
    pub fn second_upper_partial(&self, c: f64) -> f64 {
        self.first.atom * self.second.upper_partial(c) + self.upper_partial(c, PairPart::Second)
    }
}

pub fn stoploss_sum_continuous_df(
    x1: &MixedErlang,
    x2: &MixedErlang,
    d1: f64,
    d2: f64,
    s: f64,
) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::Domain(format!("argument must be non-negative, got {s}")));
    }
    Ok(StopLossPair::new(x1, d1, x2, d2)?.continuous_df(s))
}

pub fn partial_expectation_pair(
    x1: &MixedErlang,
    x2: &MixedErlang,
    d1: f64,
    d2: f64,
    c: f64,
    which: PairPart,
) -> Result<f64> {
    if c < 0.0 {
        return Err(Error::Domain(format!("threshold must be non-negative, got {c}")));
    }
    Ok(StopLossPair::new(x1, d1, x2, d2)?.upper_partial(c, which))
}
