//! Argument definitions and dispatch.

use std::ffi::OsString;
use std::io::Write;

use clap::{ArgGroup, Args, Parser, Subcommand};
use hvlab::oracle::BasisKind;
use hvlab::spin_one::RepeatedEigenvalue;

use crate::config::{parse_fixed, parse_probs, parse_reals, parse_state, RunConfig, UsageError};
use crate::experiments::{
    EpsilonSource, Experiment, ExperimentRegistry, Homogeneity, KsDispersion, KsEpsilon, KsEpsilonSweep, KsScan,
    OracleCheck, SignAverages, SpinHalf, SpinHalfRuleKind, SpinOne, SpinOneInput,
};
use crate::report::{write_report, Format};

/// Hidden-variable models for spin-1/2 and spin-1: exact statistics checked
/// against Monte Carlo and a quantum reference.
#[derive(Parser, Debug)]
#[command(name = "hvlab", version)]
pub struct Cli {
    /// Base seed for all Monte Carlo streams.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Monte Carlo samples per estimate.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,

    /// Index n of the hidden-variable density (2n+1)N λ^(2n).
    #[arg(long, global = true, default_value_t = 0)]
    index: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Simplex grid spacing; 1/step must be an integer.
    #[arg(long, global = true, default_value_t = 0.01)]
    grid_step: f64,

    /// Monte Carlo agreement band in standard errors.
    #[arg(long, global = true, default_value_t = 4.0)]
    sigma: f64,

    /// Worker threads for Monte Carlo (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Consistency checks of the quantum reference.
    OracleCheck,
    /// Averages of sign functions.
    SgnAverages {
        /// Comma-separated ξ values in [-1, 1].
        #[arg(long, allow_hyphen_values = true, default_value = "-1,-0.5,0,0.5,1")]
        xi: String,
    },
    /// Spin-1/2 outcome rules for β·σ.
    SpinHalf(SpinHalfArgs),
    /// Subensemble averages of α + β·σ.
    Homogeneity(HomogeneityArgs),
    /// Spin-1 outcome formula for one case assignment.
    SpinOne(SpinOneArgs),
    /// Average and dispersion of S_x² + S_y² + S_z².
    KsDispersion(KsDispersionArgs),
    /// The (1+ε)S_x² + S_y² + (1−ε)S_z² model.
    KsEpsilon(KsEpsilonArgs),
    /// Runs the standard experiment set.
    VerifyAll,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("rule").args(["original", "modified"])))]
struct SpinHalfArgs {
    /// β as bx,by,bz.
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Pure state as two complex amplitudes, e.g. 0.6,0.8i.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "epsilon")]
    state: Option<String>,
    /// ε = ⟨σ⟩ as ex,ey,ez.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    /// |β| sign(λ|β| + ½|β_z|) sign(β_z …).
    #[arg(long)]
    original: bool,
    /// |β| sign(β·ε) sign(λ + |β·ε|/2|β|) (default).
    #[arg(long)]
    modified: bool,
}

#[derive(Args, Debug)]
struct HomogeneityArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: String,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").args(["probs", "beta"]).required(true)))]
struct SpinOneArgs {
    /// I..VI, optionally suffixed -swapped.
    #[arg(long, default_value = "III")]
    case: String,
    /// λ1 (repeated),λ2,λ3; defaults to 0,1,-1.
    #[arg(long, allow_hyphen_values = true, requires = "probs")]
    lambdas: Option<String>,
    /// p1,p2,p3.
    #[arg(long)]
    probs: Option<String>,
    /// Observable coefficients: 3 for β·S, 8 for Gell-Mann.
    #[arg(long, allow_hyphen_values = true, requires = "state")]
    beta: Option<String>,
    /// Pure state as three complex amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    #[arg(long, default_value = "angular-momentum")]
    basis: String,
    /// Which eigenvalue is the repeated outcome: largest, middle or smallest.
    #[arg(long, default_value = "middle")]
    repeated: String,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").args(["probs", "scan"]).required(true)))]
struct KsDispersionArgs {
    /// p1,p2,p3: probabilities that S_x², S_y², S_z² read 0.
    #[arg(long)]
    probs: Option<String>,
    /// Emit every point of the simplex grid.
    #[arg(long)]
    scan: bool,
}

#[derive(Args, Debug)]
struct KsEpsilonArgs {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// p+,p0,p-: probabilities of 2+ε, 2 and 2−ε.
    #[arg(long, default_value = "0.25,0.5,0.25")]
    probs: String,
    /// Variance over a log grid of ε with the fitted slope.
    #[arg(long)]
    sweep: bool,
}

impl Cli {
    fn config(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            samples: self.samples,
            n: self.index,
            format: self.format,
            grid_step: self.grid_step,
            sigma: self.sigma,
            workers: self.workers,
        }
    }
}

fn experiment(cmd: &Command) -> Result<Box<dyn Experiment>, UsageError> {
    Ok(match cmd {
        Command::OracleCheck => Box::new(OracleCheck),
        Command::SgnAverages { xi } => Box::new(SignAverages { xis: parse_reals(xi)? }),
        Command::SpinHalf(a) => {
            let source = match (&a.state, &a.epsilon) {
                (Some(s), _) => EpsilonSource::State(parse_state(s)?),
                (_, Some(e)) => EpsilonSource::Epsilon(parse_fixed(e, "--epsilon")?),
                _ => EpsilonSource::None,
            };
            let rule = if a.original {
                SpinHalfRuleKind::Original
            } else {
                SpinHalfRuleKind::Modified
            };
            if rule == SpinHalfRuleKind::Modified && matches!(source, EpsilonSource::None) {
                return Err(UsageError("the modified rule needs --state or --epsilon".into()));
            }
            Box::new(SpinHalf {
                beta: parse_fixed(&a.beta, "--beta")?,
                rule,
                source,
            })
        }
        Command::Homogeneity(a) => Box::new(Homogeneity {
            alpha: a.alpha,
            beta: parse_fixed(&a.beta, "--beta")?,
            epsilon: parse_fixed(&a.epsilon, "--epsilon")?,
        }),
        Command::SpinOne(a) => {
            let input = match (&a.lambdas, &a.probs, &a.beta, &a.state) {
                (l, Some(p), None, None) => SpinOneInput::Triple {
                    lambdas: match l {
                        Some(l) => parse_fixed(l, "--lambdas")?,
                        None => [0.0, 1.0, -1.0],
                    },
                    probs: parse_probs(p)?,
                },
                (None, None, Some(b), Some(s)) => SpinOneInput::Operator {
                    coeffs: parse_reals(b)?,
                    state: parse_state(s)?,
                    basis: a.basis.parse::<BasisKind>()?,
                },
                _ => {
                    return Err(UsageError(
                        "give either --probs (with optional --lambdas), or --beta with --state".into(),
                    ))
                }
            };
            Box::new(SpinOne {
                case: a.case.clone(),
                input,
                repeated: a.repeated.parse::<RepeatedEigenvalue>()?,
            })
        }
        Command::KsDispersion(a) => match &a.probs {
            Some(p) => Box::new(KsDispersion { probs: parse_probs(p)? }),
            None => Box::new(KsScan),
        },
        Command::KsEpsilon(a) => {
            let probs = parse_probs(&a.probs)?;
            if !(a.eps > 0.0 && a.eps.is_finite()) {
                return Err(UsageError(format!("--eps must be positive, got {}", a.eps)));
            }
            if a.sweep {
                Box::new(KsEpsilonSweep { probs })
            } else {
                Box::new(KsEpsilon { eps: a.eps, probs })
            }
        }
        Command::VerifyAll => unreachable!("handled by the registry"),
    })
}

/// Parses `args`, runs the command and writes the report. Returns the exit
/// code: 0 when every row passes, 1 on a failed check, 2 on a usage error.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let cfg = cli.config();
    if let Err(e) = cfg.validate() {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    let report = match &cli.command {
        Command::VerifyAll => ExperimentRegistry::standard().run_all(&cfg),
        cmd => {
            let result = experiment(cmd).and_then(|x| x.run(&cfg).map_err(UsageError::from));
            match result {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
            }
        }
    };
    if let Err(e) = write_report(&report, cfg.format, out, err) {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    if report.all_pass() {
        0
    } else {
        1
    }
}
