//! Independent checks for the closed-form engine: a Monte Carlo sampler of
//! the Sarmanov law, plug-in estimators with standard errors, and direct
//! quadrature of the joint density in low dimension.
//!
//! Kernel values, survival functions and `γ` are evaluated here from the
//! model's raw parameters rather than through the engine's routines.

mod estimate;
mod integrate;
mod sample;

pub use estimate::{estimate, Estimate, Projection, Quantity};
pub use integrate::{quadrature_check, QuadratureReport};
pub use sample::{sample, sample_weighted, sample_with, write_csv, SampleBatch, Scheme};

use crate::erlang::MixedErlang;
use crate::kernel::KernelSpec;
use crate::numeric::suffix_sums;
use crate::sarmanov::SarmanovModel;

/// `g` and `φ = g − γ` for one marginal, from its raw parameters.
#[derive(Clone, Debug)]
pub(crate) struct KernelEval {
    kernel: KernelSpec,
    beta: f64,
    weights: Vec<f64>,
    tails: Vec<f64>,
    gamma: f64,
}

impl KernelEval {
    pub(crate) fn new(x: &MixedErlang, kernel: KernelSpec) -> Self {
        let beta = x.scale();
        let weights = x.weights().to_vec();
        let tails = suffix_sums(&weights);
        let gamma = match kernel {
            KernelSpec::Fgm => 1.0,
            KernelSpec::Power { t } => {
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, q)| q * (0..t).map(|j| (i + 1 + j as usize) as f64).product::<f64>())
                    .sum::<f64>()
                    / beta.powi(t as i32)
            }
            KernelSpec::Laplace { t } => {
                let b = beta / (beta + t);
                weights.iter().enumerate().map(|(i, q)| q * b.powi(i as i32 + 1)).sum()
            }
        };
        Self { kernel, beta, weights, tails, gamma }
    }

    #[cfg(test)]
    pub(crate) fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Plain forward Poisson recurrence; adequate for the modest shapes the
    /// oracle is used with.
    pub(crate) fn sf(&self, x: f64) -> f64 {
        let l = self.beta * x;
        let mut term = (-l).exp();
        let mut s = 0.0;
        for (j, t) in self.tails.iter().enumerate() {
            if j > 0 {
                term *= l / j as f64;
            }
            s += term * t;
        }
        s.min(1.0)
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        let l = self.beta * x;
        let mut term = (-l).exp();
        let mut s = 0.0;
        for (j, q) in self.weights.iter().enumerate() {
            if j > 0 {
                term *= l / j as f64;
            }
            s += term * q;
        }
        self.beta * s
    }

    pub(crate) fn g(&self, x: f64) -> f64 {
        match self.kernel {
            KernelSpec::Fgm => 2.0 * self.sf(x),
            KernelSpec::Power { t } => x.powi(t as i32),
            KernelSpec::Laplace { t } => (-t * x).exp(),
        }
    }

    pub(crate) fn phi(&self, x: f64) -> f64 {
        self.g(x) - self.gamma
    }
}

pub(crate) fn kernel_evals(model: &SarmanovModel) -> Vec<KernelEval> {
    model.marginals().iter().map(|m| KernelEval::new(m, model.kernel())).collect()
}

/// Dependence terms as `(bit mask, α)` pairs for fast bracket evaluation.
pub(crate) fn alpha_terms(model: &SarmanovModel) -> Vec<(u32, f64)> {
    model.alphas().iter().map(|(t, a)| (t.bits(), *a)).collect()
}

pub(crate) fn bracket_at(terms: &[(u32, f64)], phi: &[f64]) -> f64 {
    let mut b = 1.0;
    for &(mask, a) in terms {
        let mut p = a;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            p *= phi[i];
            m &= m - 1;
        }
        b += p;
    }
    b
}
