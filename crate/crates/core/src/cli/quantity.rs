use crate::error::Result;
use crate::oracle::Quantity;
use crate::reinsurance::{Aggregation, Portfolio};

fn portfolio(v: f64) -> std::result::Result<Portfolio, String> {
    if v == 1.0 {
        Ok(Portfolio::First)
    } else if v == 2.0 {
        Ok(Portfolio::Second)
    } else {
        Err(format!("portfolio must be 1 or 2, got {v}"))
    }
}

/// `name(a,b,...)`, e.g. `joint-tail(20,15)`, `alloc(0.95,1)`, `treaty-tvar(0.99,2)` or `unpaid(19.7,10.4,2)`.
pub fn parse_quantity(s: &str) -> std::result::Result<Quantity, String> {
    let s = s.trim();
    let (name, rest) = s.split_once('(').ok_or_else(|| format!("`{s}`: expected name(arguments)"))?;
    let inner = rest.strip_suffix(')').ok_or_else(|| format!("`{s}`: missing closing parenthesis"))?;
    let args: Vec<f64> = inner
        .split(',')
        .map(|a| a.trim().parse::<f64>().map_err(|_| format!("`{s}`: `{}` is not a number", a.trim())))
        .collect::<std::result::Result<_, _>>()?;
    let want = |k: usize| {
        if args.len() == k {
            Ok(())
        } else {
            Err(format!("`{s}`: {name} takes {k} argument(s), got {}", args.len()))
        }
    };
    match name.trim() {
        "joint-tail" => want(2).map(|_| Quantity::JointTail { u1: args[0], u2: args[1] }),
        "cdf" => want(1).map(|_| Quantity::AggDf { s: args[0] }),
        "tvar" => want(1).map(|_| Quantity::Tvar { p: args[0] }),
        "treaty-tvar" => {
            want(2)?;
            Ok(Quantity::TreatyTvar { p: args[0], portfolio: portfolio(args[1])? })
        }
        "alloc" => {
            want(2)?;
            Ok(Quantity::Alloc { p: args[0], portfolio: portfolio(args[1])? })
        }
        "default" => want(1).map(|_| Quantity::Default { k: args[0] }),
        "default-prob" => want(1).map(|_| Quantity::DefaultProb { k: args[0] }),
        "unpaid" => {
            want(3)?;
            Ok(Quantity::Unpaid { k1: args[0], k2: args[1], portfolio: portfolio(args[2])? })
        }
        "mean" => {
            want(1)?;
            Ok(Quantity::PortfolioMean { portfolio: portfolio(args[0])? })
        }
        other => Err(format!(
            "unknown quantity `{other}` (joint-tail, cdf, tvar, treaty-tvar, alloc, default, default-prob, unpaid, mean)"
        )),
    }
}

/// Output label; arguments are separated by `;` so the label stays one CSV field.
pub(crate) fn label(q: Quantity) -> String {
    match q {
        Quantity::JointTail { u1, u2 } => format!("joint-tail({u1};{u2})"),
        Quantity::AggDf { s } => format!("cdf({s})"),
        Quantity::Tvar { p } => format!("tvar({p})"),
        Quantity::TreatyTvar { p, portfolio } => format!("treaty-tvar({p};{portfolio})"),
        Quantity::Alloc { p, portfolio } => format!("alloc({p};{portfolio})"),
        Quantity::Default { k } => format!("default({k})"),
        Quantity::DefaultProb { k } => format!("default-prob({k})"),
        Quantity::Unpaid { k1, k2, portfolio } => format!("unpaid({k1};{k2};{portfolio})"),
        Quantity::PortfolioMean { portfolio } => format!("mean({portfolio})"),
    }
}

pub(crate) fn closed_form(a: &Aggregation, q: Quantity) -> Result<f64> {
    let pick = |p: Portfolio, x: f64, y: f64| match p {
        Portfolio::First => x,
        Portfolio::Second => y,
    };
    Ok(match q {
        Quantity::JointTail { u1, u2 } => a.joint_tail(u1, u2)?,
        Quantity::AggDf { s } => a.aggregate_df(s)?,
        Quantity::Tvar { p } => a.var_tvar(p)?.tvar,
        Quantity::TreatyTvar { p, portfolio } => a.standalone(portfolio)?.var_tvar(p)?.tvar,
        Quantity::Alloc { p, portfolio } => {
            let al = a.tvar_allocate(p)?;
            pick(portfolio, al.k1, al.k2)
        }
        Quantity::Default { k } => a.default_value(k)?,
        Quantity::DefaultProb { k } => a.default_prob(k)?,
        Quantity::Unpaid { k1, k2, portfolio } => {
            let (u1, u2) = a.unpaid_losses(k1, k2)?;
            pick(portfolio, u1, u2)
        }
        Quantity::PortfolioMean { portfolio } => a.portfolio(portfolio).mean(),
    })
}
