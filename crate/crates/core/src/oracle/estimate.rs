use super::sample::SampleBatch;
use crate::error::{Error, Result};
use crate::reinsurance::{Portfolio, ReinsuranceProgram};
use crate::sarmanov::Subset;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    /// `P(S₁ > u₁, S₂ > u₂)`
    JointTail { u1: f64, u2: f64 },
    /// `P(R ≤ s)`
    AggDf { s: f64 },
    Tvar { p: f64 },
    /// TVaR of one treaty's payment `T_i` on its own.
    TreatyTvar { p: f64, portfolio: Portfolio },
    /// `E[T_i · 1{R > VaR_p}] / (1 − p)`
    Alloc { p: f64, portfolio: Portfolio },
    /// `E[(R − K)₊]`
    Default { k: f64 },
    /// `P(R > K)`
    DefaultProb { k: f64 },
    /// `E[(T_i − K_i) · 1{R > K₁ + K₂}]`
    Unpaid { k1: f64, k2: f64, portfolio: Portfolio },
    /// `E[S_i]`
    PortfolioMean { portfolio: Portfolio },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Standardized distance to a reference value.
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = self.value - reference;
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY * d.signum()
        }
    }
}

/// A batch reduced to the portfolio sums, ready for repeated estimation.
#[derive(Clone, Debug)]
pub struct Projection {
    s1: Vec<f64>,
    s2: Vec<f64>,
    weights: Option<Vec<f64>>,
    d1: f64,
    d2: f64,
    wsum: f64,
    /// `(R, index)` sorted by `R`, built on first use.
    sorted: std::sync::OnceLock<Vec<(f64, u32)>>,
}

impl Projection {
    pub fn new(batch: &SampleBatch, program: &ReinsuranceProgram) -> Result<Self> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if program.portfolio_1.union(program.portfolio_2) != Subset::full(batch.dim) {
            return Err(Error::InvalidProgram(format!("program does not match a {}-dimensional batch", batch.dim)));
        }
        let p1: Vec<usize> = program.portfolio_1.indices().collect();
        let p2: Vec<usize> = program.portfolio_2.indices().collect();
        let n = batch.len();
        let mut s1 = Vec::with_capacity(n);
        let mut s2 = Vec::with_capacity(n);
        for i in 0..n {
            let row = batch.row(i);
            s1.push(p1.iter().map(|&j| row[j]).sum());
            s2.push(p2.iter().map(|&j| row[j]).sum());
        }
        let wsum = batch.weights.as_ref().map_or(n as f64, |w| w.iter().sum());
        Ok(Self {
            s1,
            s2,
            weights: batch.weights.clone(),
            d1: program.d1,
            d2: program.d2,
            wsum,
            sorted: std::sync::OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.s1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s1.is_empty()
    }

    fn w(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    fn t1(&self, i: usize) -> f64 {
        (self.s1[i] - self.d1).max(0.0)
    }

    fn t2(&self, i: usize) -> f64 {
        (self.s2[i] - self.d2).max(0.0)
    }

    fn r(&self, i: usize) -> f64 {
        self.t1(i) + self.t2(i)
    }

    fn t(&self, which: Portfolio, i: usize) -> f64 {
        match which {
            Portfolio::First => self.t1(i),
            Portfolio::Second => self.t2(i),
        }
    }

    /// Self-normalized `Σ w h / Σ w` with its delta-method standard error.
    fn mean_of(&self, h: impl Fn(usize) -> f64) -> Estimate {
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.w(i) * h(i);
        }
        let value = acc / self.wsum;
        let mut ss = 0.0;
        for i in 0..n {
            let d = self.w(i) * (h(i) - value);
            ss += d * d;
        }
        Estimate { value, stderr: ss.sqrt() / self.wsum.abs() }
    }

    fn sorted(&self) -> &[(f64, u32)] {
        self.sorted.get_or_init(|| {
            let mut v: Vec<(f64, u32)> = (0..self.len()).map(|i| (self.r(i), i as u32)).collect();
            v.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            v
        })
    }

    /// Position in sorted order of the empirical `p`-quantile of `R`.
    fn quantile_position(&self, p: f64) -> usize {
        let sorted = self.sorted();
        let target = p * self.wsum;
        let mut acc = 0.0;
        for (pos, &(_, i)) in sorted.iter().enumerate() {
            acc += self.w(i as usize);
            if acc >= target {
                return pos;
            }
        }
        sorted.len() - 1
    }

    fn tvar(&self, p: f64) -> (f64, Estimate) {
        let v = self.sorted()[self.quantile_position(p)].0;
        let e = self.mean_of(|i| (self.r(i) - v).max(0.0));
        (v, Estimate { value: v + e.value / (1.0 - p), stderr: e.stderr / (1.0 - p) })
    }

    fn treaty_tvar(&self, p: f64, which: Portfolio) -> Estimate {
        let mut v: Vec<(f64, u32)> = (0..self.len()).map(|i| (self.t(which, i), i as u32)).collect();
        v.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let target = p * self.wsum;
        let mut acc = 0.0;
        let mut q = v[v.len() - 1].0;
        for &(x, i) in &v {
            acc += self.w(i as usize);
            if acc >= target {
                q = x;
                break;
            }
        }
        let e = self.mean_of(|i| (self.t(which, i) - q).max(0.0));
        Estimate { value: q + e.value / (1.0 - p), stderr: e.stderr / (1.0 - p) }
    }

    /// Shares of the quantile draw's `R` held by `T₁` and `T₂`.
    fn quantile_share(&self, pos: usize, which: Portfolio) -> f64 {
        let i = self.sorted()[pos].1 as usize;
        let r = self.r(i);
        if r > 0.0 {
            self.t(which, i) / r
        } else {
            0.5
        }
    }

    /// `E[T_i | R ≈ v]` from a band of draws around the quantile.
    fn conditional_share(&self, pos: usize, which: Portfolio) -> f64 {
        let sorted = self.sorted();
        let half = (sorted.len() / 500).max(50);
        let lo = pos.saturating_sub(half);
        let hi = (pos + half + 1).min(sorted.len());
        let (mut num, mut den) = (0.0, 0.0);
        for &(_, i) in &sorted[lo..hi] {
            let i = i as usize;
            num += self.w(i) * self.t(which, i);
            den += self.w(i);
        }
        if den != 0.0 {
            num / den
        } else {
            0.0
        }
    }

    fn alloc(&self, p: f64, which: Portfolio) -> Estimate {
        let pos = self.quantile_position(p);
        let v = self.sorted()[pos].0;
        let above = self.mean_of(|i| if self.r(i) > v { 1.0 } else { 0.0 }).value;
        let part = self.mean_of(|i| if self.r(i) > v { self.t(which, i) } else { 0.0 }).value;
        // the empirical df jumps past p at v; that slice of mass is split in
        // the proportions of the draw sitting there, so K₁ + K₂ = TVaR exactly
        let gap = (1.0 - p) - above;
        let value = (part + self.quantile_share(pos, which) * v * gap) / (1.0 - p);
        let m = self.conditional_share(pos, which);
        let infl = self.mean_of(|i| {
            let r = self.r(i);
            let tail = if r > v { self.t(which, i) } else { 0.0 };
            let below = if r <= v { 1.0 } else { 0.0 };
            (tail + m * (below - p)) / (1.0 - p)
        });
        Estimate { value, stderr: infl.stderr }
    }

    pub fn estimate(&self, quantity: Quantity) -> Result<Estimate> {
        Ok(match quantity {
            Quantity::JointTail { u1, u2 } => {
                self.mean_of(|i| if self.s1[i] > u1 && self.s2[i] > u2 { 1.0 } else { 0.0 })
            }
            Quantity::AggDf { s } => self.mean_of(|i| if self.r(i) <= s { 1.0 } else { 0.0 }),
            Quantity::Tvar { p } => {
                check_level(p)?;
                self.tvar(p).1
            }
            Quantity::TreatyTvar { p, portfolio } => {
                check_level(p)?;
                self.treaty_tvar(p, portfolio)
            }
            Quantity::Alloc { p, portfolio } => {
                check_level(p)?;
                self.alloc(p, portfolio)
            }
            Quantity::Default { k } => self.mean_of(|i| (self.r(i) - k).max(0.0)),
            Quantity::DefaultProb { k } => self.mean_of(|i| if self.r(i) > k { 1.0 } else { 0.0 }),
            Quantity::Unpaid { k1, k2, portfolio } => {
                let k = k1 + k2;
                let ki = match portfolio {
                    Portfolio::First => k1,
                    Portfolio::Second => k2,
                };
                self.mean_of(|i| if self.r(i) > k { self.t(portfolio, i) - ki } else { 0.0 })
            }
            Quantity::PortfolioMean { portfolio } => self.mean_of(|i| match portfolio {
                Portfolio::First => self.s1[i],
                Portfolio::Second => self.s2[i],
            }),
        })
    }
}

fn check_level(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability level must lie in (0, 1), got {p}")))
    }
}

pub fn estimate(batch: &SampleBatch, program: &ReinsuranceProgram, quantity: Quantity) -> Result<Estimate> {
    Projection::new(batch, program)?.estimate(quantity)
}
