use super::{alpha_terms, bracket_at, kernel_evals};
use crate::error::{Error, Result};
use crate::sarmanov::SarmanovModel;

/// Marginal mass left outside the integration box, per coordinate.
const BOX_TAIL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureReport {
    pub dim: usize,
    /// `∫ h − 1` over the truncated box.
    pub integral_minus_one: f64,
    /// Largest `|γ · E[Y^n] − ∫ x^n g f|` over margins and `n ∈ {0, 1, 2}`,
    /// relative to `max(1, |∫ x^n g f|)`, where `Y` is the engine's tilt.
    pub max_tilt_residual: f64,
    /// Smallest joint density value on a regular grid over the box.
    pub min_grid_density: f64,
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    quadrature::integrate(f, a, b, tol).integral
}

/// Direct quadrature of the joint density for `n ≤ 3`.
pub fn quadrature_check(model: &SarmanovModel) -> Result<QuadratureReport> {
    let n = model.dim();
    if n > 3 {
        return Err(Error::Unsupported(format!("quadrature check is limited to three risks, got {n}")));
    }
    let ev = kernel_evals(model);
    let terms = alpha_terms(model);
    let upper: Vec<f64> = model.marginals().iter().map(|m| m.quantile(1.0 - BOX_TAIL)).collect::<Result<_>>()?;
    let density = |x: &[f64]| -> f64 {
        let mut phi = [0.0; 3];
        let mut f = 1.0;
        for (i, &xi) in x.iter().enumerate() {
            f *= ev[i].pdf(xi);
            phi[i] = ev[i].phi(xi);
        }
        f * bracket_at(&terms, &phi[..x.len()])
    };

    let total = match n {
        1 => integrate(|a| density(&[a]), 0.0, upper[0], 1e-13),
        2 => integrate(
            |a| integrate(|b| density(&[a, b]), 0.0, upper[1], 1e-13),
            0.0,
            upper[0],
            1e-12,
        ),
        _ => integrate(
            |a| {
                integrate(
                    |b| integrate(|c| density(&[a, b, c]), 0.0, upper[2], 1e-11),
                    0.0,
                    upper[1],
                    1e-10,
                )
            },
            0.0,
            upper[0],
            1e-9,
        ),
    };

    let tilts = model.tilts()?;
    let mut max_tilt_residual: f64 = 0.0;
    for ((e, t), u) in ev.iter().zip(&tilts).zip(&upper) {
        // the tilt may have a heavier tail than the margin under the power kernel
        let hi = u * 4.0;
        for order in 0..=2i32 {
            let direct = integrate(|x| x.powi(order) * e.g(x) * e.pdf(x), 0.0, hi, 1e-14);
            let engine = if order == 0 { t.gamma } else { t.gamma * t.tilted.moment(order as u32)? };
            max_tilt_residual = max_tilt_residual.max((engine - direct).abs() / direct.abs().max(1.0));
        }
    }

    let steps = match n {
        1 => 2000,
        2 => 200,
        _ => 40,
    };
    let mut min_grid_density = f64::INFINITY;
    let mut idx = vec![1usize; n];
    loop {
        let x: Vec<f64> = idx.iter().zip(&upper).map(|(&k, u)| u * k as f64 / steps as f64).collect();
        min_grid_density = min_grid_density.min(density(&x));
        let mut d = 0;
        loop {
            if d == n {
                return Ok(QuadratureReport {
                    dim: n,
                    integral_minus_one: total - 1.0,
                    max_tilt_residual,
                    min_grid_density,
                });
            }
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = 1;
            d += 1;
        }
    }
}
