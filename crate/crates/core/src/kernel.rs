use std::fmt;

use crate::error::{Error, Result};

/// The three kernel families `g` whose centred versions drive Sarmanov dependence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// `g(x) = 2 F̄(x)`.
    Fgm,
    /// `g(x) = x^t`.
    Power,
    /// `g(x) = e^{-t x}`.
    Laplace,
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fgm" => Ok(KernelFamily::Fgm),
            "power" => Ok(KernelFamily::Power),
            "laplace" => Ok(KernelFamily::Laplace),
            other => Err(Error::Parse(format!(
                "unknown kernel family `{other}` (expected fgm, power or laplace)"
            ))),
        }
    }
}

/// A kernel family together with its parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    Fgm,
    /// Only positive integer exponents are supported; the tilted weight
    /// vector is an index shift by `t`.
    Power { t: u32 },
    /// Any `t > 0`.
    Laplace { t: f64 },
}

impl KernelSpec {
    pub fn new(family: KernelFamily, t: Option<f64>) -> Result<Self> {
        match family {
            KernelFamily::Fgm => Ok(KernelSpec::Fgm),
            KernelFamily::Power => {
                let t = t.ok_or_else(|| Error::InvalidModel("power kernel needs `t`".into()))?;
                if t < 1.0 || t.fract() != 0.0 || t > u32::MAX as f64 {
                    return Err(Error::Unsupported(format!(
                        "power kernel exponent must be a positive integer, got {t}"
                    )));
                }
                Ok(KernelSpec::Power { t: t as u32 })
            }
            KernelFamily::Laplace => {
                let t = t.ok_or_else(|| Error::InvalidModel("laplace kernel needs `t`".into()))?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "laplace kernel parameter must be positive, got {t}"
                    )));
                }
                Ok(KernelSpec::Laplace { t })
            }
        }
    }

    pub fn family(&self) -> KernelFamily {
        match self {
            KernelSpec::Fgm => KernelFamily::Fgm,
            KernelSpec::Power { .. } => KernelFamily::Power,
            KernelSpec::Laplace { .. } => KernelFamily::Laplace,
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match *self {
            KernelSpec::Fgm => None,
            KernelSpec::Power { t } => Some(t as f64),
            KernelSpec::Laplace { t } => Some(t),
        }
    }

    /// Scale of the tilted mixed Erlang obtained from one of scale `beta`.
    pub fn tilted_scale(&self, beta: f64) -> f64 {
        match *self {
            KernelSpec::Fgm => 2.0 * beta,
            KernelSpec::Power { .. } => beta,
            KernelSpec::Laplace { t } => beta + t,
        }
    }

    /// Whether `g` is bounded, which is what rejection sampling and the
    /// corner-based admissibility proof need.
    pub fn is_bounded(&self) -> bool {
        !matches!(self, KernelSpec::Power { .. })
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Fgm => write!(f, "fgm"),
            KernelSpec::Power { t } => write!(f, "power(t={t})"),
            KernelSpec::Laplace { t } => write!(f, "laplace(t={t})"),
        }
    }
}
