//! Sarmanov dependence over mixed Erlang marginals.
//!
//! The joint density is `h(x) = Π f_i(x_i) · [1 + Σ_T α_T Π_{i∈T} φ_i(x_i)]`
//! with `φ_i = g_i − γ_i` and `γ_i = E[g_i(X_i)]`. Expanding the products
//! turns `h` into a signed mixture over subsets `J` of risks whose densities
//! are replaced by their `g`-tilts; the coefficients of that mixture are the
//! ξ values computed here.

use std::collections::BTreeMap;
use std::fmt;

use crate::erlang::{MixedErlang, TiltResult};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;

/// Largest model size a [`Subset`] can index.
pub const MAX_RISKS: usize = 32;

/// Largest model size for which corner enumeration is attempted.
pub const MAX_CHECKED_RISKS: usize = 24;

/// Slack below zero still accepted by the admissibility check.
const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// A set of 0-based risk indices stored as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    /// Build from 0-based indices; duplicates and indices ≥ 32 are rejected.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut bits = 0u32;
        for i in indices {
            if i >= MAX_RISKS {
                return Err(Error::InvalidModel(format!("risk index {} out of range", i + 1)));
            }
            if bits & (1 << i) != 0 {
                return Err(Error::InvalidModel(format!("risk index {} repeated", i + 1)));
            }
            bits |= 1 << i;
        }
        Ok(Subset(bits))
    }

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_RISKS);
        if n == MAX_RISKS {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_RISKS && self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Highest index plus one.
    pub fn span(self) -> usize {
        (32 - self.0.leading_zeros()) as usize
    }

    /// Members in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_RISKS).filter(move |i| bits & (1 << i) != 0)
    }

    /// Every subset of `self`, the empty set and `self` included.
    pub fn submasks(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(Subset(cur))
        })
    }
}

impl fmt::Display for Subset {
    /// 1-based, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SarmanovModel {
    marginals: Vec<MixedErlang>,
    kernel: KernelSpec,
    alphas: BTreeMap<Subset, f64>,
}

impl SarmanovModel {
    /// Zero coefficients are dropped; repeated subsets are an error.
    pub fn new<I>(marginals: Vec<MixedErlang>, kernel: KernelSpec, alphas: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let n = marginals.len();
        if n == 0 {
            return Err(Error::InvalidModel("model has no risks".into()));
        }
        if n > MAX_RISKS {
            return Err(Error::InvalidModel(format!("at most {MAX_RISKS} risks are supported, got {n}")));
        }
        let full = Subset::full(n);
        let mut map = BTreeMap::new();
        for (t, a) in alphas {
            if t.len() < 2 {
                return Err(Error::InvalidModel(format!("dependence subset {t} needs at least two risks")));
            }
            if !t.is_subset_of(full) {
                return Err(Error::InvalidModel(format!("dependence subset {t} refers to a risk beyond {n}")));
            }
            if !a.is_finite() {
                return Err(Error::InvalidModel(format!("coefficient of {t} is {a}")));
            }
            if map.insert(t, a).is_some() {
                return Err(Error::InvalidModel(format!("dependence subset {t} given twice")));
            }
        }
        map.retain(|_, a| *a != 0.0);
        Ok(Self { marginals, kernel, alphas: map })
    }

    pub fn independent(marginals: Vec<MixedErlang>, kernel: KernelSpec) -> Result<Self> {
        Self::new(marginals, kernel, std::iter::empty())
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[MixedErlang] {
        &self.marginals
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn alphas(&self) -> &BTreeMap<Subset, f64> {
        &self.alphas
    }

    pub fn alpha(&self, t: Subset) -> f64 {
        self.alphas.get(&t).copied().unwrap_or(0.0)
    }

    pub fn is_independent(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Kernel tilt of every marginal.
    pub fn tilts(&self) -> Result<Vec<TiltResult>> {
        self.marginals.iter().map(|m| m.kernel_transform(&self.kernel)).collect()
    }

    /// Sub-model on `keep`, re-indexed in increasing order of the kept
    /// indices. Subsets touching a dropped risk integrate out because every
    /// `φ_i` has mean zero.
    pub fn marginalize(&self, keep: Subset) -> Result<SarmanovModel> {
        if keep.is_empty() {
            return Err(Error::InvalidModel("cannot marginalize onto an empty set".into()));
        }
        if !keep.is_subset_of(Subset::full(self.dim())) {
            return Err(Error::InvalidModel(format!("subset {keep} refers to a risk beyond {}", self.dim())));
        }
        let order: Vec<usize> = keep.indices().collect();
        let reindex = |t: Subset| Subset::from_indices(t.indices().map(|i| order.iter().position(|&k| k == i).unwrap()));
        let marginals = order.iter().map(|&i| self.marginals[i].clone()).collect();
        let mut alphas = Vec::new();
        for (&t, &a) in &self.alphas {
            if t.is_subset_of(keep) {
                alphas.push((reindex(t)?, a));
            }
        }
        SarmanovModel::new(marginals, self.kernel, alphas)
    }
}

/// `γ_i = E[g(X_i)]` for every risk.
pub fn gamma_values(model: &SarmanovModel) -> Result<Vec<f64>> {
    Ok(model.tilts()?.into_iter().map(|t| t.gamma).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationStatus {
    /// The bracket is non-negative on the whole kernel range.
    Ok,
    /// Some attainable kernel values make the bracket negative.
    Violation,
    /// Unbounded kernel: the bracket passes on the closure of its range,
    /// but no finite envelope exists.
    Conditional,
    /// Too many risks to enumerate the corners.
    Unchecked,
}

impl fmt::Display for ValidationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationStatus::Ok => "ok",
            ValidationStatus::Violation => "violation",
            ValidationStatus::Conditional => "conditional",
            ValidationStatus::Unchecked => "unchecked",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub status: ValidationStatus,
    /// Smallest bracket value over the corners (for unbounded kernels, the
    /// most negative growth coefficient when that is what fails).
    pub min_bracket: f64,
    /// Largest bracket value over the corners; infinite for unbounded kernels.
    pub max_bracket: f64,
    /// Kernel values `φ_i` at the minimizing corner (`+∞` marks a growth direction).
    pub worst_corner: Vec<f64>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.status == ValidationStatus::Ok
    }
}

/// Range endpoints `[lo, hi]` of `φ_i = g_i − γ_i`.
pub fn kernel_ranges(model: &SarmanovModel) -> Result<Vec<(f64, f64)>> {
    let gammas = gamma_values(model)?;
    Ok(gammas
        .iter()
        .map(|&g| match model.kernel {
            KernelSpec::Fgm => (-1.0, 1.0),
            KernelSpec::Laplace { .. } => (-g, 1.0 - g),
            KernelSpec::Power { .. } => (-g, f64::INFINITY),
        })
        .collect())
}

/// Dense coefficient vector of the multilinear bracket, indexed by subset bits.
fn dense_coefficients(model: &SarmanovModel) -> Vec<f64> {
    let mut a = vec![0.0; 1usize << model.dim()];
    a[0] = 1.0;
    for (t, v) in &model.alphas {
        a[t.bits() as usize] = *v;
    }
    a
}

/// In place: coefficients `c_T` of `Σ c_T Π_{T} φ` become values at every
/// corner, where bit `i` of the index selects `hi_i` over `lo_i`.
fn corner_values(coeffs: &mut [f64], ranges: &[(f64, f64)]) {
    for (i, &(lo, hi)) in ranges.iter().enumerate() {
        let bit = 1usize << i;
        for m in 0..coeffs.len() {
            if m & bit == 0 {
                let (a, b) = (coeffs[m], coeffs[m | bit]);
                coeffs[m] = a + lo * b;
                coeffs[m | bit] = a + hi * b;
            }
        }
    }
}

/// In place: re-expand around `φ_i = lo_i + s_i`, giving the coefficients
/// of the multilinear polynomial in `s ≥ 0`.
fn shift_coefficients(coeffs: &mut [f64], lows: &[f64]) {
    for (i, &lo) in lows.iter().enumerate() {
        let bit = 1usize << i;
        for m in 0..coeffs.len() {
            if m & bit == 0 {
                coeffs[m] += lo * coeffs[m | bit];
            }
        }
    }
}

/// Check that the Sarmanov bracket is non-negative over the kernel range.
///
/// The bracket is multilinear in `(φ₁, …, φ_n)`, so over a box it attains
/// its extremes at corners. For the unbounded power kernel the bracket is
/// re-expanded in `s_i = φ_i + γ_i ≥ 0`; it is non-negative on that orthant
/// exactly when every coefficient is.
pub fn validate_model(model: &SarmanovModel) -> Result<ValidationReport> {
    let n = model.dim();
    if n > MAX_CHECKED_RISKS {
        return Ok(ValidationReport {
            status: ValidationStatus::Unchecked,
            min_bracket: f64::NAN,
            max_bracket: f64::NAN,
            worst_corner: Vec::new(),
        });
    }
    let ranges = kernel_ranges(model)?;
    let mut c = dense_coefficients(model);
    if model.kernel.is_bounded() {
        corner_values(&mut c, &ranges);
        let (mut imin, mut imax) = (0, 0);
        for (m, v) in c.iter().enumerate() {
            if *v < c[imin] {
                imin = m;
            }
            if *v > c[imax] {
                imax = m;
            }
        }
        let worst_corner = ranges
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| if imin & (1 << i) != 0 { hi } else { lo })
            .collect();
        let status = if c[imin] >= -ADMISSIBILITY_SLACK {
            ValidationStatus::Ok
        } else {
            ValidationStatus::Violation
        };
        Ok(ValidationReport { status, min_bracket: c[imin], max_bracket: c[imax], worst_corner })
    } else {
        let lows: Vec<f64> = ranges.iter().map(|r| r.0).collect();
        shift_coefficients(&mut c, &lows);
        let imin = (0..c.len()).fold(0, |best, m| if c[m] < c[best] { m } else { best });
        let worst_corner = lows
            .iter()
            .enumerate()
            .map(|(i, &lo)| if imin & (1 << i) != 0 { f64::INFINITY } else { lo })
            .collect();
        let status = if c[imin] >= -ADMISSIBILITY_SLACK {
            ValidationStatus::Conditional
        } else {
            ValidationStatus::Violation
        };
        Ok(ValidationReport { status, min_bracket: c[imin], max_bracket: f64::INFINITY, worst_corner })
    }
}

/// Bracket value `1 + Σ α_T Π_{i∈T} φ_i` at given kernel values.
pub fn bracket(model: &SarmanovModel, phi: &[f64]) -> f64 {
    debug_assert_eq!(phi.len(), model.dim());
    1.0 + model
        .alphas
        .iter()
        .map(|(t, a)| a * t.indices().map(|i| phi[i]).product::<f64>())
        .sum::<f64>()
}

/// Signed-mixture coefficients `ξ_J`, keyed by the set `J` of tilted risks.
#[derive(Clone, Debug, PartialEq)]
pub struct XiTable {
    entries: BTreeMap<Subset, f64>,
}

impl XiTable {
    pub fn get(&self, j: Subset) -> f64 {
        self.entries.get(&j).copied().unwrap_or(0.0)
    }

    /// Non-zero entries in subset order, always including `∅`.
    pub fn iter(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `ξ_∅ + Σ_{J≠∅} ξ_J Π_{m∈J} γ_m`, which equals one.
    pub fn total_probability(&self, gammas: &[f64]) -> f64 {
        self.iter().map(|(j, x)| x * j.indices().map(|i| gammas[i]).product::<f64>()).sum()
    }
}

/// `ξ_J = [J = ∅] + Σ_{T ⊇ J} (−1)^{|T∖J|} α_T Π_{i∈T∖J} γ_i`.
pub fn xi_coefficients(model: &SarmanovModel) -> Result<XiTable> {
    let gammas = gamma_values(model)?;
    Ok(xi_from_gammas(model, &gammas))
}

pub(crate) fn xi_from_gammas(model: &SarmanovModel, gammas: &[f64]) -> XiTable {
    let mut entries = BTreeMap::new();
    entries.insert(Subset::EMPTY, 1.0);
    for (&t, &a) in &model.alphas {
        for j in t.submasks() {
            let rest = t.difference(j);
            let sign = if rest.len() % 2 == 0 { 1.0 } else { -1.0 };
            let prod: f64 = rest.indices().map(|i| gammas[i]).product();
            *entries.entry(j).or_insert(0.0) += sign * a * prod;
        }
    }
    entries.retain(|j, v| j.is_empty() || *v != 0.0);
    XiTable { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn table1() -> Vec<MixedErlang> {
        vec![
            MixedErlang::new(0.12, vec![0.4, 0.6]).unwrap(),
            MixedErlang::new(0.14, vec![0.3, 0.7]).unwrap(),
            MixedErlang::new(0.15, vec![0.5, 0.5]).unwrap(),
            MixedErlang::new(0.16, vec![0.8, 0.2]).unwrap(),
        ]
    }

    fn s(ix: &[usize]) -> Subset {
        Subset::from_indices(ix.iter().map(|i| i - 1)).unwrap()
    }

    fn fgm_table2() -> SarmanovModel {
        let a = [
            (s(&[1, 2]), 0.6),
            (s(&[1, 3]), 0.1),
            (s(&[1, 4]), 0.1),
            (s(&[2, 3]), 0.1),
            (s(&[2, 4]), 0.04),
            (s(&[3, 4]), 0.5),
            (s(&[1, 2, 3]), 0.11),
            (s(&[1, 2, 4]), 0.12),
            (s(&[1, 3, 4]), 0.10),
            (s(&[2, 3, 4]), 0.15),
            (s(&[1, 2, 3, 4]), 0.07),
        ];
        SarmanovModel::new(table1(), KernelSpec::Fgm, a).unwrap()
    }

    fn laplace_table2() -> SarmanovModel {
        let v = [16.0, 5.0, 3.0, 5.0, 3.0, 8.0, 56.0, 30.0, 15.0, 20.0, 170.0];
        let order = [
            s(&[1, 2]),
            s(&[1, 3]),
            s(&[1, 4]),
            s(&[2, 3]),
            s(&[2, 4]),
            s(&[3, 4]),
            s(&[1, 2, 3]),
            s(&[1, 2, 4]),
            s(&[1, 3, 4]),
            s(&[2, 3, 4]),
            s(&[1, 2, 3, 4]),
        ];
        SarmanovModel::new(table1(), KernelSpec::Laplace { t: 1.0 }, order.into_iter().zip(v)).unwrap()
    }

    #[test]
    fn subset_basics() {
        let t = s(&[1, 3]);
        assert_eq!(t.to_string(), "{1,3}");
        assert_eq!(t.submasks().count(), 4);
        assert!(Subset::from_indices([0, 0]).is_err());
        assert_eq!(Subset::full(3).len(), 3);
    }

    #[test]
    fn model_construction_errors() {
        let m = table1();
        assert!(SarmanovModel::new(m.clone(), KernelSpec::Fgm, [(s(&[1]), 0.1)]).is_err());
        assert!(SarmanovModel::new(m.clone(), KernelSpec::Fgm, [(s(&[1, 5]), 0.1)]).is_err());
        assert!(SarmanovModel::new(m, KernelSpec::Fgm, [(s(&[1, 2]), 0.1), (s(&[1, 2]), 0.2)]).is_err());
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_values(&fgm_table2()).unwrap();
        assert!(g.iter().all(|v| *v == 1.0));
        let e = SarmanovModel::independent(vec![MixedErlang::exponential(1.0).unwrap()], KernelSpec::Laplace { t: 1.0 })
            .unwrap();
        assert!((gamma_values(&e).unwrap()[0] - 0.5).abs() < 1e-15);
        let g = gamma_values(&laplace_table2()).unwrap();
        let b: f64 = 0.12 / 1.12;
        assert!((g[0] - (0.4 * b + 0.6 * b * b)).abs() < 1e-15);
        let x = &table1()[0];
        let q = quadrature::integrate(|t| (-t).exp() * x.pdf(t), 0.0, 1000.0, 1e-14).integral;
        assert!((g[0] - q).abs() < 1e-12, "{} vs {q}", g[0]);
    }

    #[test]
    fn validation_examples() {
        let ind = SarmanovModel::independent(table1(), KernelSpec::Fgm).unwrap();
        assert!(validate_model(&ind).unwrap().is_ok());
        let bad = SarmanovModel::new(table1()[..2].to_vec(), KernelSpec::Fgm, [(s(&[1, 2]), 2.0)]).unwrap();
        let r = validate_model(&bad).unwrap();
        assert_eq!(r.status, ValidationStatus::Violation);
        assert!((r.min_bracket + 1.0).abs() < 1e-15);
        assert_eq!(r.worst_corner[0] * r.worst_corner[1], -1.0);
    }

    #[test]
    fn table2_sets_fail_the_corner_check() {
        // every pairwise sub-model is fine, the full four-risk sets are not
        let f = validate_model(&fgm_table2()).unwrap();
        assert_eq!(f.status, ValidationStatus::Violation);
        assert!((f.min_bracket + 0.15).abs() < 1e-12, "{}", f.min_bracket);
        let l = validate_model(&laplace_table2()).unwrap();
        assert_eq!(l.status, ValidationStatus::Violation);
        for model in [fgm_table2(), laplace_table2()] {
            for i in 0..4 {
                for j in i + 1..4 {
                    let sub = model.marginalize(Subset::from_indices([i, j]).unwrap()).unwrap();
                    assert!(validate_model(&sub).unwrap().is_ok(), "{i}{j}");
                }
            }
        }
    }

    #[test]
    fn corner_values_agree_with_direct_bracket() {
        let m = laplace_table2();
        let ranges = kernel_ranges(&m).unwrap();
        let mut c = dense_coefficients(&m);
        corner_values(&mut c, &ranges);
        for (mask, v) in c.iter().enumerate() {
            let phi: Vec<f64> =
                ranges.iter().enumerate().map(|(i, r)| if mask & (1 << i) != 0 { r.1 } else { r.0 }).collect();
            assert!((bracket(&m, &phi) - v).abs() < 1e-10 * v.abs().max(1.0));
        }
    }

    #[test]
    fn power_validation_is_directional() {
        let m = table1()[..2].to_vec();
        let k = KernelSpec::Power { t: 1 };
        let pos = SarmanovModel::new(m.clone(), k, [(s(&[1, 2]), 1e-3)]).unwrap();
        // 1 + α(x₁−μ₁)(x₂−μ₂) grows like −αμ₂ x₁ along x₁ → ∞ with x₂ → 0
        assert_eq!(validate_model(&pos).unwrap().status, ValidationStatus::Violation);
        let ind = SarmanovModel::independent(m, k).unwrap();
        assert_eq!(validate_model(&ind).unwrap().status, ValidationStatus::Conditional);
    }

    #[test]
    fn xi_examples() {
        let ind = SarmanovModel::independent(table1(), KernelSpec::Fgm).unwrap();
        let x = xi_coefficients(&ind).unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(x.get(Subset::EMPTY), 1.0);

        let m = SarmanovModel::new(table1()[..2].to_vec(), KernelSpec::Laplace { t: 1.0 }, [(s(&[1, 2]), 3.0)]).unwrap();
        let g = gamma_values(&m).unwrap();
        let x = xi_coefficients(&m).unwrap();
        assert!((x.get(Subset::EMPTY) - (1.0 + 3.0 * g[0] * g[1])).abs() < 1e-15);
        assert!((x.get(s(&[1])) + 3.0 * g[1]).abs() < 1e-15);
        assert!((x.get(s(&[2])) + 3.0 * g[0]).abs() < 1e-15);
        assert_eq!(x.get(s(&[1, 2])), 3.0);

        let m = laplace_table2();
        let g = gamma_values(&m).unwrap();
        assert!((xi_coefficients(&m).unwrap().total_probability(&g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xi_matches_brute_force_expansion() {
        // h/Πf at kernel values g equals Σ_J ξ_J Π_J g_i
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for model in [fgm_table2(), laplace_table2()] {
            let gam = gamma_values(&model).unwrap();
            let xi = xi_coefficients(&model).unwrap();
            for _ in 0..50 {
                let g: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..2.0)).collect();
                let phi: Vec<f64> = g.iter().zip(&gam).map(|(a, b)| a - b).collect();
                let lhs = bracket(&model, &phi);
                let rhs: f64 = xi.iter().map(|(j, v)| v * j.indices().map(|i| g[i]).product::<f64>()).sum();
                assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn xi_matches_written_out_four_risk_forms() {
        // ξ for J = {1}, {1,2}, {1,2,3} written term by term for n = 4
        let m = laplace_table2();
        let g = gamma_values(&m).unwrap();
        let a = |ix: &[usize]| m.alpha(s(ix));
        let x = xi_coefficients(&m).unwrap();
        let (g2, g3, g4) = (g[1], g[2], g[3]);
        let xi1 = -(a(&[1, 2]) * g2 + a(&[1, 3]) * g3 + a(&[1, 4]) * g4)
            + (a(&[1, 2, 3]) * g2 * g3 + a(&[1, 2, 4]) * g2 * g4 + a(&[1, 3, 4]) * g3 * g4)
            - a(&[1, 2, 3, 4]) * g2 * g3 * g4;
        assert!((x.get(s(&[1])) - xi1).abs() < 1e-12);
        let xi12 = a(&[1, 2]) - a(&[1, 2, 3]) * g3 - a(&[1, 2, 4]) * g4 + a(&[1, 2, 3, 4]) * g3 * g4;
        assert!((x.get(s(&[1, 2])) - xi12).abs() < 1e-12);
        let xi123 = a(&[1, 2, 3]) - a(&[1, 2, 3, 4]) * g4;
        assert!((x.get(s(&[1, 2, 3])) - xi123).abs() < 1e-12);
        let mut xi0 = 1.0;
        for (t, v) in m.alphas() {
            let p: f64 = t.indices().map(|i| g[i]).product();
            xi0 += if t.len() % 2 == 0 { v * p } else { -v * p };
        }
        assert!((x.get(Subset::EMPTY) - xi0).abs() < 1e-12);
    }

    #[test]
    fn marginalize_examples() {
        let m = fgm_table2();
        assert_eq!(m.marginalize(Subset::full(4)).unwrap(), m);
        let sub = m.marginalize(s(&[1, 2])).unwrap();
        assert_eq!(sub.alphas().len(), 1);
        assert_eq!(sub.alpha(s(&[1, 2])), 0.6);
        let sub = m.marginalize(s(&[3, 4])).unwrap();
        assert_eq!(sub.alpha(s(&[1, 2])), 0.5);
        assert!(m.marginalize(Subset::EMPTY).is_err());
        assert!(m.marginalize(s(&[5])).is_err());
        let l = laplace_table2();
        let g = gamma_values(&l).unwrap();
        let gs = gamma_values(&l.marginalize(s(&[2, 4])).unwrap()).unwrap();
        assert_eq!(gs, vec![g[1], g[3]]);
    }
}
