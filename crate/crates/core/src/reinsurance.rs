//! Two-portfolio stop-loss reinsurance under Sarmanov dependence.
//!
//! Risks are split into two portfolios with aggregate losses `S₁`, `S₂`;
//! the reinsurer pays `T_i = (S_i − d_i)₊` and carries `R = T₁ + T₂`.
//! Expanding the Sarmanov density gives a signed mixture of independent
//! pairs `(S̃₁ᵣ, S̃₂ᵣ)`, each a mixed Erlang with one common rate, so every
//! quantity below is a coefficient-weighted sum of independent-pair results.

use std::collections::HashMap;
use std::fmt;

use crate::erlang::{convolve_all, MixedErlang};
use crate::error::{Error, Result};
use crate::numeric::invert_increasing;
use crate::sarmanov::{xi_from_gammas, SarmanovModel, Subset};
use crate::stop_loss::StopLossPair;
use crate::stop_loss::StopLossRisk;

/// Probabilities straying outside `[0, 1]` by less than this are clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Portfolio {
    First,
    Second,
}

impl Portfolio {
    pub fn other(self) -> Portfolio {
        match self {
            Portfolio::First => Portfolio::Second,
            Portfolio::Second => Portfolio::First,
        }
    }
}

impl fmt::Display for Portfolio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Portfolio::First => "1",
            Portfolio::Second => "2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReinsuranceProgram {
    pub portfolio_1: Subset,
    pub portfolio_2: Subset,
    pub d1: f64,
    pub d2: f64,
}

impl ReinsuranceProgram {
    pub fn new(portfolio_1: Subset, portfolio_2: Subset, d1: f64, d2: f64) -> Result<Self> {
        if portfolio_1.is_empty() || portfolio_2.is_empty() {
            return Err(Error::InvalidProgram("both portfolios need at least one risk".into()));
        }
        if !portfolio_1.intersection(portfolio_2).is_empty() {
            return Err(Error::InvalidProgram(format!(
                "portfolios {portfolio_1} and {portfolio_2} overlap"
            )));
        }
        for (name, d) in [("d1", d1), ("d2", d2)] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidProgram(format!("deductible {name} must be positive, got {d}")));
            }
        }
        Ok(Self { portfolio_1, portfolio_2, d1, d2 })
    }

    /// The program must cover exactly the risks `1..=n`.
    pub fn check_against(&self, model: &SarmanovModel) -> Result<()> {
        let cover = self.portfolio_1.union(self.portfolio_2);
        if cover != Subset::full(model.dim()) {
            return Err(Error::InvalidProgram(format!(
                "portfolios {} and {} do not cover risks 1..{} exactly",
                self.portfolio_1,
                self.portfolio_2,
                model.dim()
            )));
        }
        Ok(())
    }

    pub fn members(&self, which: Portfolio) -> Subset {
        match which {
            Portfolio::First => self.portfolio_1,
            Portfolio::Second => self.portfolio_2,
        }
    }

    pub fn deductible(&self, which: Portfolio) -> f64 {
        match which {
            Portfolio::First => self.d1,
            Portfolio::Second => self.d2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BivariateTerm {
    /// Set of tilted risks this term comes from.
    pub tilted: Subset,
    pub coeff: f64,
    pub left: MixedErlang,
    pub right: MixedErlang,
}

/// `P(S₁ ∈ ·, S₂ ∈ ·) = Σ_r c_r P(S̃₁ᵣ ∈ ·) P(S̃₂ᵣ ∈ ·)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateTermList {
    pub terms: Vec<BivariateTerm>,
    pub common_scale: f64,
}

impl BivariateTermList {
    pub fn joint_tail_raw(&self, u1: f64, u2: f64) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.left.sf(u1) * t.right.sf(u2)).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateTermList {
    pub terms: Vec<(f64, MixedErlang)>,
}

impl UnivariateTermList {
    pub fn df(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, m)| c * m.cdf(x)).sum()
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, m)| c * m.sf(x)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.terms.iter().map(|(c, m)| c * m.mean()).sum()
    }

    pub fn total_coefficient(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c).sum()
    }
}

fn probability(quantity: &'static str, v: f64) -> Result<f64> {
    if !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&v) {
        Err(Error::NumericalQuality { quantity, value: v })
    } else {
        Ok(v.clamp(0.0, 1.0))
    }
}

fn check_level(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability level must lie in (0, 1), got {p}")))
    }
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be non-negative, got {v}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// Signed mixture over the subsets of `members`, each risk either tilted or
/// not and all rescaled to a common rate, then convolved.
struct Blocks {
    scale: f64,
    gammas: Vec<f64>,
    base: Vec<MixedErlang>,
    tilted: Vec<MixedErlang>,
    cache: HashMap<(u32, u32), MixedErlang>,
}

impl Blocks {
    fn new(model: &SarmanovModel) -> Result<Self> {
        let beta_max = model.marginals().iter().map(|m| m.scale()).fold(0.0, f64::max);
        let scale = model.kernel().tilted_scale(beta_max);
        let tilts = model.tilts()?;
        let mut base = Vec::with_capacity(model.dim());
        let mut tilted = Vec::with_capacity(model.dim());
        for (m, t) in model.marginals().iter().zip(&tilts) {
            base.push(m.rescale(scale)?);
            tilted.push(t.tilted.rescale(scale)?);
        }
        Ok(Self { scale, gammas: tilts.iter().map(|t| t.gamma).collect(), base, tilted, cache: HashMap::new() })
    }

    fn sum(&mut self, members: Subset, tilted: Subset) -> Result<MixedErlang> {
        let key = (members.bits(), tilted.intersection(members).bits());
        if let Some(m) = self.cache.get(&key) {
            return Ok(m.clone());
        }
        let parts: Vec<MixedErlang> = members
            .indices()
            .map(|i| if tilted.contains(i) { self.tilted[i].clone() } else { self.base[i].clone() })
            .collect();
        let s = convolve_all(&parts)?;
        self.cache.insert(key, s.clone());
        Ok(s)
    }

    fn coefficient(&self, xi: f64, tilted: Subset) -> f64 {
        xi * tilted.indices().map(|i| self.gammas[i]).product::<f64>()
    }
}

pub fn build_term_list(model: &SarmanovModel, program: &ReinsuranceProgram) -> Result<BivariateTermList> {
    program.check_against(model)?;
    let mut blocks = Blocks::new(model)?;
    let xi = xi_from_gammas(model, &blocks.gammas.clone());
    let mut terms = Vec::with_capacity(xi.len());
    for (j, x) in xi.iter() {
        let coeff = blocks.coefficient(x, j);
        if coeff == 0.0 {
            continue;
        }
        let left = blocks.sum(program.portfolio_1, j)?;
        let right = blocks.sum(program.portfolio_2, j)?;
        terms.push(BivariateTerm { tilted: j, coeff, left, right });
    }
    Ok(BivariateTermList { terms, common_scale: blocks.scale })
}

/// Law of one portfolio's aggregate loss under the sub-model on its risks.
pub fn portfolio_df(model: &SarmanovModel, program: &ReinsuranceProgram, which: Portfolio) -> Result<UnivariateTermList> {
    program.check_against(model)?;
    let sub = model.marginalize(program.members(which))?;
    let mut blocks = Blocks::new(&sub)?;
    let xi = xi_from_gammas(&sub, &blocks.gammas.clone());
    let all = Subset::full(sub.dim());
    let mut terms = Vec::new();
    for (j, x) in xi.iter() {
        let c = blocks.coefficient(x, j);
        if c != 0.0 {
            terms.push((c, blocks.sum(all, j)?));
        }
    }
    Ok(UnivariateTermList { terms })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarTvar {
    pub var: f64,
    pub tvar: f64,
    /// `p` falls inside the point mass at zero, so `VaR = 0`.
    pub in_atom: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Allocation {
    pub var: f64,
    pub tvar: f64,
    pub k1: f64,
    pub k2: f64,
}

/// Stop-loss layer `(S − d)₊` of a signed mixture.
#[derive(Clone, Debug)]
pub struct StandaloneTreaty {
    terms: Vec<(f64, StopLossRisk)>,
}

impl StandaloneTreaty {
    pub fn new(dist: &UnivariateTermList, d: f64) -> Result<Self> {
        let terms = dist
            .terms
            .iter()
            .map(|(c, m)| Ok((*c, StopLossRisk::new(m, d)?)))
            .collect::<Result<_>>()?;
        Ok(Self { terms })
    }

    fn df_raw(&self, y: f64) -> f64 {
        self.terms.iter().map(|(c, r)| c * r.df(y)).sum()
    }

    pub fn df(&self, y: f64) -> Result<f64> {
        check_nonnegative("argument", y)?;
        probability("stand-alone df", self.df_raw(y))
    }

    pub fn atom(&self) -> f64 {
        self.df_raw(0.0)
    }

    pub fn upper_partial(&self, c: f64) -> f64 {
        self.terms.iter().map(|(k, r)| k * r.upper_partial(c)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.upper_partial(0.0)
    }

    pub fn var_tvar(&self, p: f64) -> Result<VarTvar> {
        check_level(p)?;
        let (var, in_atom) = quantile(|y| self.df_raw(y), self.atom(), p, self.mean())?;
        let excess = self.upper_partial(var) - var * (1.0 - self.df_raw(var));
        Ok(VarTvar { var, tvar: var + excess / (1.0 - p), in_atom })
    }
}

fn quantile(df: impl Fn(f64) -> f64, atom: f64, p: f64, start: f64) -> Result<(f64, bool)> {
    if p <= atom {
        return Ok((0.0, true));
    }
    let v = invert_increasing(df, p, start.max(1e-3))
        .ok_or_else(|| Error::Domain(format!("no quantile bracket found for p = {p}")))?;
    Ok((v, false))
}

/// Precomputed evaluation state for one model and program.
#[derive(Clone, Debug)]
pub struct Aggregation {
    program: ReinsuranceProgram,
    terms: BivariateTermList,
    pairs: Vec<(f64, StopLossPair)>,
    standalone: [UnivariateTermList; 2],
}

impl Aggregation {
    pub fn new(model: &SarmanovModel, program: &ReinsuranceProgram) -> Result<Self> {
        let terms = build_term_list(model, program)?;
        let mut left_cache: HashMap<u32, StopLossRisk> = HashMap::new();
        let mut right_cache: HashMap<u32, StopLossRisk> = HashMap::new();
        let mut pairs = Vec::with_capacity(terms.terms.len());
        for t in &terms.terms {
            let lkey = t.tilted.intersection(program.portfolio_1).bits();
            let rkey = t.tilted.intersection(program.portfolio_2).bits();
            let l = match left_cache.get(&lkey) {
                Some(r) => r.clone(),
                None => {
                    let r = StopLossRisk::new(&t.left, program.d1)?;
                    left_cache.insert(lkey, r.clone());
                    r
                }
            };
            let r = match right_cache.get(&rkey) {
                Some(r) => r.clone(),
                None => {
                    let r = StopLossRisk::new(&t.right, program.d2)?;
                    right_cache.insert(rkey, r.clone());
                    r
                }
            };
            pairs.push((t.coeff, StopLossPair::from_risks(l, r)));
        }
        let standalone = [
            portfolio_df(model, program, Portfolio::First)?,
            portfolio_df(model, program, Portfolio::Second)?,
        ];
        Ok(Self { program: *program, terms, pairs, standalone })
    }

    pub fn program(&self) -> &ReinsuranceProgram {
        &self.program
    }

    pub fn term_list(&self) -> &BivariateTermList {
        &self.terms
    }

    pub fn portfolio(&self, which: Portfolio) -> &UnivariateTermList {
        match which {
            Portfolio::First => &self.standalone[0],
            Portfolio::Second => &self.standalone[1],
        }
    }

    /// `P(S₁ > u₁, S₂ > u₂)`.
    pub fn joint_tail(&self, u1: f64, u2: f64) -> Result<f64> {
        check_nonnegative("u1", u1)?;
        check_nonnegative("u2", u2)?;
        probability("joint tail", self.terms.joint_tail_raw(u1, u2))
    }

    fn df_raw(&self, s: f64) -> f64 {
        self.pairs.iter().map(|(c, p)| c * p.sum_df(s)).sum()
    }

    /// `P(R = 0) = P(S₁ ≤ d₁, S₂ ≤ d₂)`.
    pub fn atom(&self) -> Result<f64> {
        probability("atom", self.df_raw(0.0))
    }

    /// `P(R ≤ s)`.
    pub fn aggregate_df(&self, s: f64) -> Result<f64> {
        check_nonnegative("s", s)?;
        probability("aggregate df", self.df_raw(s))
    }

    /// `E[R · 1{R > c}]`.
    pub fn upper_partial(&self, c: f64) -> f64 {
        self.pairs.iter().map(|(k, p)| k * p.sum_upper_partial(c)).sum()
    }

    /// `E[T_i · 1{R > c}]`.
    pub fn upper_partial_of(&self, which: Portfolio, c: f64) -> f64 {
        self.pairs
            .iter()
            .map(|(k, p)| {
                k * match which {
                    Portfolio::First => p.first_upper_partial(c),
                    Portfolio::Second => p.second_upper_partial(c),
                }
            })
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.upper_partial(0.0)
    }

    /// `E[R − c | R > c]`.
    pub fn mean_excess(&self, c: f64) -> Result<f64> {
        check_nonnegative("threshold", c)?;
        let sf = 1.0 - self.df_raw(c);
        if sf <= 0.0 {
            return Err(Error::Domain(format!("no mass above {c}")));
        }
        Ok((self.upper_partial(c) - c * sf) / sf)
    }

    pub fn var_tvar(&self, p: f64) -> Result<VarTvar> {
        check_level(p)?;
        let atom = self.atom()?;
        let (var, in_atom) = quantile(|s| self.df_raw(s), atom, p, self.mean())?;
        let excess = self.upper_partial(var) - var * (1.0 - self.df_raw(var));
        Ok(VarTvar { var, tvar: var + excess / (1.0 - p), in_atom })
    }

    /// TVaR split `K_i = E[T_i · 1{R > VaR_p}] / (1 − p)`. When `VaR_p` is
    /// positive `R` has no atom there, so the two parts add up to TVaR; when
    /// `p` is inside the atom, `VaR_p = 0` and both sides reduce to `E[·]/(1−p)`.
    pub fn tvar_allocate(&self, p: f64) -> Result<Allocation> {
        let vt = self.var_tvar(p)?;
        let k1 = self.upper_partial_of(Portfolio::First, vt.var) / (1.0 - p);
        let k2 = self.upper_partial_of(Portfolio::Second, vt.var) / (1.0 - p);
        Ok(Allocation { var: vt.var, tvar: vt.tvar, k1, k2 })
    }

    /// `U(K) = E[(R − K)₊]`.
    pub fn default_value(&self, k: f64) -> Result<f64> {
        check_positive("capital", k)?;
        let sf = 1.0 - self.df_raw(k);
        Ok(self.upper_partial(k) - k * sf)
    }

    /// `P(R > K)`.
    pub fn default_prob(&self, k: f64) -> Result<f64> {
        check_positive("capital", k)?;
        probability("default probability", 1.0 - self.df_raw(k))
    }

    /// `(E[(T₁ − K₁) 1{R > K}], E[(T₂ − K₂) 1{R > K}])` with `K = K₁ + K₂`.
    pub fn unpaid_losses(&self, k1: f64, k2: f64) -> Result<(f64, f64)> {
        check_nonnegative("k1", k1)?;
        check_nonnegative("k2", k2)?;
        let k = k1 + k2;
        check_positive("capital", k)?;
        let sf = 1.0 - self.df_raw(k);
        let u1 = self.upper_partial_of(Portfolio::First, k) - k1 * sf;
        let u2 = self.upper_partial_of(Portfolio::Second, k) - k2 * sf;
        Ok((u1, u2))
    }

    pub fn standalone(&self, which: Portfolio) -> Result<StandaloneTreaty> {
        StandaloneTreaty::new(self.portfolio(which), self.program.deductible(which))
    }

    pub fn diversification(&self, p: f64) -> Result<Diversification> {
        let r = self.var_tvar(p)?;
        let t1 = self.standalone(Portfolio::First)?.var_tvar(p)?;
        let t2 = self.standalone(Portfolio::Second)?.var_tvar(p)?;
        Ok(Diversification {
            tvar_t1: t1.tvar,
            tvar_t2: t2.tvar,
            tvar_r: r.tvar,
            benefit: 1.0 - r.tvar / (t1.tvar + t2.tvar),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diversification {
    pub tvar_t1: f64,
    pub tvar_t2: f64,
    pub tvar_r: f64,
    /// `1 − TVaR(R) / (TVaR(T₁) + TVaR(T₂))`.
    pub benefit: f64,
}

pub fn joint_tail(model: &SarmanovModel, program: &ReinsuranceProgram, u1: f64, u2: f64) -> Result<f64> {
    check_nonnegative("u1", u1)?;
    check_nonnegative("u2", u2)?;
    probability("joint tail", build_term_list(model, program)?.joint_tail_raw(u1, u2))
}

pub fn aggregate_df(model: &SarmanovModel, program: &ReinsuranceProgram, s: f64) -> Result<f64> {
    Aggregation::new(model, program)?.aggregate_df(s)
}

pub fn var_tvar(model: &SarmanovModel, program: &ReinsuranceProgram, p: f64) -> Result<VarTvar> {
    Aggregation::new(model, program)?.var_tvar(p)
}

pub fn tvar_allocate(model: &SarmanovModel, program: &ReinsuranceProgram, p: f64) -> Result<Allocation> {
    Aggregation::new(model, program)?.tvar_allocate(p)
}

pub fn default_value(model: &SarmanovModel, program: &ReinsuranceProgram, k: f64) -> Result<f64> {
    Aggregation::new(model, program)?.default_value(k)
}

pub fn default_prob(model: &SarmanovModel, program: &ReinsuranceProgram, k: f64) -> Result<f64> {
    Aggregation::new(model, program)?.default_prob(k)
}

pub fn unpaid_losses(model: &SarmanovModel, program: &ReinsuranceProgram, k1: f64, k2: f64) -> Result<(f64, f64)> {
    Aggregation::new(model, program)?.unpaid_losses(k1, k2)
}

pub fn diversification(model: &SarmanovModel, program: &ReinsuranceProgram, p: f64) -> Result<Diversification> {
    Aggregation::new(model, program)?.diversification(p)
}
