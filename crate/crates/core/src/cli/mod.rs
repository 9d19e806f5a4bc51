//! The `stoploss` command line: model ingestion, dispatch and CSV output.

mod quantity;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::model_file::{fixtures, parse_model, parse_model_str, LoadedModel};
use crate::oracle::{sample_with, write_csv, Projection, Scheme};
use crate::reinsurance::Aggregation;
use crate::sarmanov::ValidationStatus;
use crate::tables::TableModels;

pub use quantity::parse_quantity;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "stoploss", version, about = "Dependent stop-loss reinsurance risks under Sarmanov mixed Erlang models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// JSON model file.
    #[arg(long, value_name = "PATH", conflicts_with = "fixture", required_unless_present = "fixture")]
    model: Option<PathBuf>,
    /// Embedded model: independence, laplace or fgm.
    #[arg(long, value_name = "NAME")]
    fixture: Option<String>,
    /// Evaluate even when the dependence parameters fail the admissibility check.
    #[arg(long)]
    force: bool,
    /// Decimals in numeric output.
    #[arg(long, default_value_t = 5)]
    digits: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SchemeArg {
    Rejection,
    Weighted,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Admissibility check of the dependence parameters.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// P(S1 > u1, S2 > u2); lists pair up element by element.
    JointTail {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        u1: Vec<f64>,
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        u2: Vec<f64>,
    },
    /// Distribution function of the reinsurer's aggregate payment.
    Cdf {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        s: Vec<f64>,
    },
    /// Value-at-risk of the aggregate payment.
    Var {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "p", required = true, value_delimiter = ',', allow_negative_numbers = true)]
        p: Vec<f64>,
    },
    /// Value-at-risk and tail value-at-risk.
    Tvar {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "p", required = true, value_delimiter = ',', allow_negative_numbers = true)]
        p: Vec<f64>,
    },
    /// TVaR capital allocated to the two treaties.
    Allocate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "p", required = true, value_delimiter = ',', allow_negative_numbers = true)]
        p: Vec<f64>,
    },
    /// Default probability and default option value at a capital level.
    Default {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        capital: Vec<f64>,
    },
    /// Unpaid losses of each treaty given the allocated capitals.
    Unpaid {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        k1: Vec<f64>,
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        k2: Vec<f64>,
    },
    /// Diversification benefit of pooling the two treaties.
    Diversify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "p", required = true, value_delimiter = ',', allow_negative_numbers = true)]
        p: Vec<f64>,
    },
    /// Monte Carlo estimates next to the closed-form values.
    Mc {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of draws; scientific notation such as 1e7 is accepted.
        #[arg(long, default_value = "1e7", value_parser = parse_count)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// e.g. joint-tail(20,15), cdf(30), tvar(0.95), treaty-tvar(0.95,2), alloc(0.95,1), default(30.1),
        /// default-prob(30.1), unpaid(19.7,10.4,2), mean(1). Repeatable.
        #[arg(long, required = true, value_parser = parse_quantity)]
        quantity: Vec<crate::oracle::Quantity>,
        /// Rejection when the model is admissible, weighted otherwise.
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
        /// Write the draws as CSV.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
    /// Recompute the published tables from the embedded fixtures.
    ReproduceTables {
        /// One of 3 to 7; all tables when absent.
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=7))]
        table: Option<u8>,
        /// Decimals for every numeric column; the published precision when absent.
        #[arg(long)]
        digits: Option<usize>,
    },
}

fn parse_count(s: &str) -> Result<usize, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e12 {
        Ok(v as usize)
    } else {
        Err(format!("`{s}` is not a positive whole number"))
    }
}

enum Failure {
    Engine(Error),
    Io(io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidModel(_) | Error::InvalidProgram(_) | Error::Inadmissible(_) => {
            EXIT_VALIDATION
        }
        Error::NumericalQuality { .. } | Error::TruncationCap { .. } => EXIT_NUMERICAL,
        Error::Domain(_)
        | Error::Unsupported(_)
        | Error::ScaleMismatch { .. }
        | Error::RescaleDirection { .. }
        | Error::EmptyBatch => EXIT_USAGE,
    }
}

struct Session<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Session<'_> {
    fn read(&mut self, args: &ModelArgs) -> std::result::Result<LoadedModel, Failure> {
        Ok(match (&args.model, &args.fixture) {
            (Some(path), _) => parse_model(path)?,
            (None, Some(name)) => {
                let json = fixtures::by_name(name).ok_or_else(|| {
                    Failure::Usage(format!("unknown fixture `{name}` (expected independence, laplace or fgm)"))
                })?;
                parse_model_str(json)?
            }
            (None, None) => return Err(Failure::Usage("one of --model or --fixture is required".into())),
        })
    }

    fn load(&mut self, args: &ModelArgs) -> std::result::Result<LoadedModel, Failure> {
        let loaded = self.read(args)?;
        let v = &loaded.validation;
        match v.status {
            ValidationStatus::Violation if !args.force => {
                return Err(Error::Inadmissible(format!(
                    "bracket reaches {:.6e} at corner [{}]; pass --force to evaluate anyway",
                    v.min_bracket,
                    join(&v.worst_corner, 6)
                ))
                .into())
            }
            ValidationStatus::Violation => writeln!(
                self.err,
                "warning: density bracket reaches {:.6e}; results are those of a signed model",
                v.min_bracket
            )?,
            ValidationStatus::Unchecked => {
                writeln!(self.err, "warning: too many risks for the admissibility check; not verified")?
            }
            ValidationStatus::Ok | ValidationStatus::Conditional => {}
        }
        Ok(loaded)
    }

    fn engine(&mut self, args: &ModelArgs) -> std::result::Result<(LoadedModel, Aggregation), Failure> {
        let loaded = self.load(args)?;
        let agg = Aggregation::new(&loaded.model, &loaded.program)?;
        Ok((loaded, agg))
    }

    fn csv(&mut self, header: &str, rows: impl IntoIterator<Item = Vec<f64>>, digits: usize) -> Outcome {
        let mut s = String::with_capacity(256);
        s.push_str(header);
        s.push('\n');
        for row in rows {
            s.push_str(&join(&row, digits));
            s.push('\n');
        }
        self.out.write_all(s.as_bytes())?;
        Ok(EXIT_OK)
    }

    fn dispatch(&mut self, command: Command) -> Outcome {
        match command {
            Command::Validate { model } => {
                let loaded = self.read(&model)?;
                let v = &loaded.validation;
                let d = model.digits;
                writeln!(self.out, "status,min_bracket,max_bracket,worst_corner")?;
                writeln!(
                    self.out,
                    "{},{},{},{}",
                    v.status,
                    fixed(v.min_bracket, d),
                    fixed(v.max_bracket, d),
                    v.worst_corner.iter().map(|c| fixed(*c, d)).collect::<Vec<_>>().join(";")
                )?;
                Ok(if v.status == ValidationStatus::Violation { EXIT_VALIDATION } else { EXIT_OK })
            }
            Command::JointTail { model, u1, u2 } => {
                let pairs = paired("--u1", &u1, "--u2", &u2)?;
                let (_, a) = self.engine(&model)?;
                let rows = pairs
                    .into_iter()
                    .map(|(x, y)| Ok(vec![x, y, a.joint_tail(x, y)?]))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                self.csv("u1,u2,joint_tail", rows, model.digits)
            }
            Command::Cdf { model, s } => {
                let (_, a) = self.engine(&model)?;
                let rows = s
                    .iter()
                    .map(|&x| Ok(vec![x, a.aggregate_df(x)?]))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                self.csv("s,cdf", rows, model.digits)
            }
            Command::Var { model, p } => {
                let (_, a) = self.engine(&model)?;
                let mut rows = Vec::new();
                for &q in &p {
                    let v = a.var_tvar(q)?;
                    if v.in_atom {
                        writeln!(self.err, "note: p = {q} lies in the point mass at zero; VaR is 0")?;
                    }
                    rows.push(vec![q, v.var]);
                }
                self.csv("p,var", rows, model.digits)
            }
            Command::Tvar { model, p } => {
                let (_, a) = self.engine(&model)?;
                let rows = p
                    .iter()
                    .map(|&q| a.var_tvar(q).map(|v| vec![q, v.var, v.tvar]))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                self.csv("p,var,tvar", rows, model.digits)
            }
            Command::Allocate { model, p } => {
                let (_, a) = self.engine(&model)?;
                let rows = p
                    .iter()
                    .map(|&q| a.tvar_allocate(q).map(|v| vec![q, v.tvar, v.k1, v.k2]))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                self.csv("p,tvar,k1,k2", rows, model.digits)
            }
            Command::Default { model, capital } => {
                let (_, a) = self.engine(&model)?;
                let rows = capital
                    .iter()
                    .map(|&k| Ok(vec![k, a.default_prob(k)?, a.default_value(k)?]))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                self.csv("capital,default_prob,default_value", rows, model.digits)
            }
            Command::Unpaid { model, k1, k2 } => {
                let pairs = paired("--k1", &k1, "--k2", &k2)?;
                let (_, a) = self.engine(&model)?;
                let rows = pairs
                    .into_iter()
                    .map(|(x, y)| a.unpaid_losses(x, y).map(|(u1, u2)| vec![x, y, u1, u2]))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                self.csv("k1,k2,unpaid_1,unpaid_2", rows, model.digits)
            }
            Command::Diversify { model, p } => {
                let (_, a) = self.engine(&model)?;
                let rows = p
                    .iter()
                    .map(|&q| a.diversification(q).map(|d| vec![q, d.tvar_r, d.tvar_t1, d.tvar_t2, 100.0 * d.benefit]))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                self.csv("p,tvar_r,tvar_t1,tvar_t2,benefit_pct", rows, model.digits)
            }
            Command::Mc { model, n, seed, quantity, scheme, dump } => self.monte_carlo(&model, n, seed, &quantity, scheme, dump),
            Command::ReproduceTables { table, digits } => self.reproduce(table, digits),
        }
    }

    fn monte_carlo(
        &mut self,
        args: &ModelArgs,
        n: usize,
        seed: u64,
        quantities: &[crate::oracle::Quantity],
        scheme: Option<SchemeArg>,
        dump: Option<PathBuf>,
    ) -> Outcome {
        let (loaded, agg) = self.engine(args)?;
        let scheme = match scheme {
            Some(SchemeArg::Rejection) => Scheme::Rejection,
            Some(SchemeArg::Weighted) => Scheme::Weighted,
            None if loaded.validation.is_ok() => Scheme::Rejection,
            None => Scheme::Weighted,
        };
        let batch = sample_with(&loaded.model, n, seed, scheme)?;
        if let Some(path) = dump {
            let file = std::fs::File::create(&path)?;
            write_csv(&batch, io::BufWriter::new(file))?;
        }
        let proj = Projection::new(&batch, &loaded.program)?;
        let d = args.digits;
        let scheme_name = match scheme {
            Scheme::Rejection => "rejection",
            Scheme::Weighted => "weighted",
        };
        let mut s = String::from("quantity,n,seed,scheme,estimate,stderr,closed_form,z\n");
        for q in quantities {
            let e = proj.estimate(*q)?;
            let exact = quantity::closed_form(&agg, *q)?;
            writeln!(
                s,
                "{},{n},{seed},{scheme_name},{},{},{},{}",
                quantity::label(*q),
                fixed(e.value, d),
                fixed(e.stderr, d),
                fixed(exact, d),
                fixed(e.z_score(exact), 2)
            )
            .unwrap();
        }
        self.out.write_all(s.as_bytes())?;
        Ok(EXIT_OK)
    }

    fn reproduce(&mut self, table: Option<u8>, digits: Option<usize>) -> Outcome {
        writeln!(
            self.err,
            "note: the laplace and fgm fixtures are evaluated as published, although their dependence parameters fail the admissibility check"
        )?;
        let models = TableModels::load()?;
        let numbers: Vec<u8> = table.map_or_else(|| (3..=7).collect(), |t| vec![t]);
        let mut s = String::new();
        for (k, t) in numbers.into_iter().enumerate() {
            if k > 0 {
                s.push('\n');
            }
            s.push_str(&models.table(t)?.to_csv(digits));
        }
        self.out.write_all(s.as_bytes())?;
        Ok(EXIT_OK)
    }
}

fn paired(na: &str, a: &[f64], nb: &str, b: &[f64]) -> std::result::Result<Vec<(f64, f64)>, Failure> {
    if a.len() != b.len() {
        return Err(Failure::Usage(format!(
            "{na} and {nb} need the same number of values ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().copied().zip(b.iter().copied()).collect())
}

fn fixed(v: f64, digits: usize) -> String {
    format!("{v:.digits$}")
}

fn join(values: &[f64], digits: usize) -> String {
    values.iter().map(|v| fixed(*v, digits)).collect::<Vec<_>>().join(",")
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut session = Session { out, err };
    let result = session.dispatch(cli.command);
    match result {
        Ok(code) => code,
        Err(Failure::Engine(e)) => {
            let _ = writeln!(session.err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(session.err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(session.err, "error: {e}");
            EXIT_IO
        }
    }
}
