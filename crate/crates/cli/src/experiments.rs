//! Named experiments. Each subcommand builds one; `verify-all` runs the
//! standard registry in order.

use hvlab::distributions::{chi_product_mean_analytic, SignFunction};
use hvlab::ks::{self, EpsilonKsModel, KsModel};
use hvlab::oracle::{self, build_basis, BasisKind, QuantumState};
use hvlab::spin_half::{self, BellOriginal, EpsilonRule, SpinHalfRule};
use hvlab::spin_one::{self, CaseRegistry, RepeatedEigenvalue, SpectralTriple};
use hvlab::{Error, Result};
use num_complex::Complex64;

use crate::config::{fmt_list, RunConfig};
use crate::report::{Report, ReportRow};

pub trait Experiment: Send + Sync {
    fn name(&self) -> &str;
    fn run(&self, cfg: &RunConfig) -> Result<Report>;
}

#[derive(Default)]
pub struct ExperimentRegistry {
    entries: Vec<Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, e: Box<dyn Experiment>) -> &mut Self {
        self.entries.push(e);
        self
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Runs every entry in registration order. An experiment that errors
    /// contributes one failing row instead of aborting the rest.
    pub fn run_all(&self, cfg: &RunConfig) -> Report {
        let mut report = Report::default();
        for e in &self.entries {
            match e.run(cfg) {
                Ok(r) => report.extend(r),
                Err(err) => report
                    .rows
                    .push(ReportRow::new(e.name(), format!("error: {err}"), 0.0).require(false)),
            }
        }
        report
    }

    /// The experiments behind `verify-all`.
    pub fn standard() -> Self {
        let beta = [0.3, -0.5, 0.8];
        let c = |re, im| Complex64::new(re, im);
        let qubit = QuantumState::pure_normalized(vec![c(0.6, 0.0), c(0.0, 0.8)]).expect("valid state");
        let qutrit = QuantumState::pure_normalized(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.6, -0.4)]).expect("valid state");
        let triple = SpinOneInput::Triple {
            lambdas: [0.0, 1.0, -1.0],
            probs: [0.25, 0.5, 0.25],
        };
        let mut reg = Self::new();
        reg.register(Box::new(OracleCheck))
            .register(Box::new(SignAverages {
                xis: vec![-1.0, -0.5, 0.0, 0.3, 1.0],
            }))
            .register(Box::new(SpinHalf {
                beta,
                rule: SpinHalfRuleKind::Modified,
                source: EpsilonSource::State(qubit),
            }))
            .register(Box::new(SpinHalf {
                beta,
                rule: SpinHalfRuleKind::Original,
                source: EpsilonSource::None,
            }))
            .register(Box::new(Homogeneity {
                alpha: 0.5,
                beta,
                epsilon: [0.2, 0.4, -0.6],
            }));
        for case in ["III", "IV", "V", "VI", "III-swapped"] {
            reg.register(Box::new(SpinOne {
                case: case.into(),
                input: triple.clone(),
                repeated: RepeatedEigenvalue::Middle,
            }));
        }
        reg.register(Box::new(SpinOne {
            case: "III".into(),
            input: SpinOneInput::Operator {
                coeffs: vec![0.48, -0.6, 0.64],
                state: qutrit.clone(),
                basis: BasisKind::AngularMomentum,
            },
            repeated: RepeatedEigenvalue::Middle,
        }))
        .register(Box::new(SpinOne {
            case: "IV".into(),
            input: SpinOneInput::Operator {
                coeffs: vec![0.5, -1.0, 0.25, 0.0, 0.75, -0.5, 0.1, 0.3],
                state: qutrit,
                basis: BasisKind::GellMann,
            },
            repeated: RepeatedEigenvalue::Middle,
        }))
        .register(Box::new(SpinOne {
            case: "I".into(),
            input: SpinOneInput::Triple {
                lambdas: [0.0, 1.0, -1.0],
                probs: [0.0, 0.5, 0.5],
            },
            repeated: RepeatedEigenvalue::Middle,
        }));
        for p in [[0.0, 0.0, 1.0], [1.0 / 3.0; 3], [0.5, 0.5, 0.0], [0.2, 0.5, 0.3]] {
            reg.register(Box::new(KsDispersion { probs: p }));
        }
        reg.register(Box::new(KsScanSummary))
            .register(Box::new(KsEpsilon {
                eps: 0.1,
                probs: [0.3, 0.45, 0.25],
            }))
            .register(Box::new(KsEpsilonSweep {
                probs: [0.25, 0.5, 0.25],
            }));
        reg
    }
}

pub struct OracleCheck;

impl Experiment for OracleCheck {
    fn name(&self) -> &str {
        "oracle-check"
    }

    fn run(&self, _cfg: &RunConfig) -> Result<Report> {
        let pauli = build_basis(BasisKind::Pauli);
        let gm = build_basis(BasisKind::GellMann);
        let am = build_basis(BasisKind::AngularMomentum);
        let mut rows = vec![
            ReportRow::new("oracle-ks-identity", "basis=angular-momentum", 0.0)
                .with_oracle(oracle::verify_ks_identity(&am).residual),
            ReportRow::new("oracle-structure-constant", "basis=pauli;f(x,y,z)", 1.0).with_oracle(pauli.f.get(0, 1, 2)),
            ReportRow::new("oracle-structure-constant", "basis=gell-mann;f(1,2,3)", 1.0).with_oracle(gm.f.get(0, 1, 2)),
            ReportRow::new("oracle-structure-constant", "basis=gell-mann;f(4,5,8)", 3f64.sqrt() / 2.0)
                .with_oracle(gm.f.get(3, 4, 7)),
            ReportRow::new("oracle-structure-constant", "basis=angular-momentum;f(x,y,z)", 0.5)
                .with_oracle(am.f.get(0, 1, 2)),
        ];
        let gram = gm.gram();
        let defect = (0..gm.len())
            .flat_map(|i| (0..gm.len()).map(move |j| (i, j)))
            .map(|(i, j)| (gram[i][j] - if i == j { 2.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        rows.push(ReportRow::new("oracle-orthonormality", "basis=gell-mann;Tr(ab)=2delta", 0.0).with_oracle(defect));

        let beta = [0.48, -0.6, 0.64];
        let h = oracle::linear_observable(&beta, &am)?;
        for (pair, want) in oracle::spectral_decompose(&h).iter().zip([1.0, 0.0, -1.0]) {
            rows.push(
                ReportRow::new("oracle-spectrum", format!("beta.S;beta={}", fmt_list(&beta)), want)
                    .with_oracle(pair.value),
            );
        }

        let squares = oracle::sigma_squares();
        let b = squares[0].add(&squares[1])?.add(&squares[2])?;
        let state = QuantumState::pure_normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-1.0, 0.0),
        ])?;
        rows.push(
            ReportRow::new("oracle-ks-variance", "state=(1,2i,-1)/sqrt6", 0.0).with_oracle(oracle::variance(&b, &state)?),
        );
        Ok(Report {
            rows,
            notes: Vec::new(),
        })
    }
}

pub struct SignAverages {
    pub xis: Vec<f64>,
}

impl Experiment for SignAverages {
    fn name(&self) -> &str {
        "sgn-averages"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Report> {
        let dist = cfg.distribution();
        let partner = SignFunction::new(0.5, dist, false)?;
        let mut rows = Vec::new();
        for (k, &xi) in self.xis.iter().enumerate() {
            let chi = SignFunction::new(xi, dist, false)?;
            let est = cfg.mc(2 * k as u64).mean(&dist, |x| chi.eval(x));
            rows.push(
                ReportRow::new("sgn-average", format!("n={};xi={xi}", cfg.n), chi.mean_analytic())
                    .with_mc(&est, cfg.sigma)
                    .require(chi.mean_analytic() == xi.abs()),
            );
            let est = cfg.mc(2 * k as u64 + 1).mean(&dist, |x| chi.eval(x) * partner.eval(x));
            rows.push(
                ReportRow::new(
                    "sgn-product",
                    format!("n={};xi1={xi};xi2=0.5", cfg.n),
                    chi_product_mean_analytic(&chi, &partner)?,
                )
                .with_mc(&est, cfg.sigma),
            );
        }
        Ok(Report {
            rows,
            notes: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinHalfRuleKind {
    Original,
    Modified,
}

#[derive(Debug, Clone)]
pub enum EpsilonSource {
    None,
    State(QuantumState),
    Epsilon([f64; 3]),
}

pub struct SpinHalf {
    pub beta: [f64; 3],
    pub rule: SpinHalfRuleKind,
    pub source: EpsilonSource,
}

impl Experiment for SpinHalf {
    fn name(&self) -> &str {
        "spin-half"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Report> {
        let beta = self.beta;
        let (rule, state, label): (Box<dyn SpinHalfRule>, QuantumState, String) = match self.rule {
            SpinHalfRuleKind::Original => (
                Box::new(BellOriginal),
                QuantumState::from_real(&[1.0, 0.0])?,
                "state=up".into(),
            ),
            SpinHalfRuleKind::Modified => {
                let (eps, state) = match &self.source {
                    EpsilonSource::State(s) => (spin_half::epsilon_of(s)?, s.clone()),
                    EpsilonSource::Epsilon(e) => (*e, QuantumState::from_bloch(*e)?),
                    EpsilonSource::None => {
                        return Err(Error::InvalidParameter(
                            "the modified rule needs --state or --epsilon".into(),
                        ))
                    }
                };
                (Box::new(EpsilonRule::new(eps)?), state, format!("epsilon={}", fmt_list(&eps)))
            }
        };
        let params = format!("rule={};beta={};{label}", rule.name(), fmt_list(&beta));
        let h = oracle::linear_observable(&beta, &build_basis(BasisKind::Pauli))?;
        let (mean, second) = spin_half::mc_statistics(rule.as_ref(), &beta, &cfg.mc(0))?;
        let norm_sq: f64 = beta.iter().map(|b| b * b).sum();
        let rows = vec![
            ReportRow::new("spin-half-mean", params.clone(), rule.mean_analytic(&beta)?)
                .with_mc(&mean, cfg.sigma)
                .with_oracle(oracle::expectation(&h, &state)?),
            ReportRow::new("spin-half-second-moment", params.clone(), norm_sq)
                .with_mc(&second, cfg.sigma)
                .with_oracle(oracle::expectation(&h.square(), &state)?),
            ReportRow::new("spin-half-variance", params, rule.variance_analytic(&beta)?)
                .with_oracle(oracle::variance(&h, &state)?),
        ];
        Ok(Report {
            rows,
            notes: Vec::new(),
        })
    }
}

pub struct Homogeneity {
    pub alpha: f64,
    pub beta: [f64; 3],
    pub epsilon: [f64; 3],
}

impl Experiment for Homogeneity {
    fn name(&self) -> &str {
        "homogeneity"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Report> {
        let (a, beta, eps) = (self.alpha, self.beta, self.epsilon);
        let split = spin_half::homogeneity_split(a, &beta, &eps)?;
        let (plus, minus) = spin_half::mc_homogeneity(a, &beta, &eps, &cfg.mc(0))?;
        let state = QuantumState::from_bloch(eps)?;
        let h = oracle::linear_observable(&beta, &build_basis(BasisKind::Pauli))?;
        let base = format!("alpha={a};beta={};epsilon={}", fmt_list(&beta), fmt_list(&eps));
        let rows = vec![
            ReportRow::new(
                "homogeneity-plus",
                format!("{base};weight={}", split.weight_plus),
                split.mean_plus,
            )
            .with_mc(&plus, cfg.sigma),
            ReportRow::new(
                "homogeneity-minus",
                format!("{base};weight={}", split.weight_minus),
                split.mean_minus,
            )
            .with_mc(&minus, cfg.sigma),
            ReportRow::new("homogeneity-recombined", base, split.recombined())
                .with_oracle(a + oracle::expectation(&h, &state)?),
        ];
        let notes = vec![format!(
            "subensembles split at lambda* = {}: averages {} and {} differ from the whole-ensemble {}",
            split.threshold, split.mean_plus, split.mean_minus, split.whole
        )];
        Ok(Report { rows, notes })
    }
}

#[derive(Debug, Clone)]
pub enum SpinOneInput {
    Triple { lambdas: [f64; 3], probs: [f64; 3] },
    Operator { coeffs: Vec<f64>, state: QuantumState, basis: BasisKind },
}

pub struct SpinOne {
    pub case: String,
    pub input: SpinOneInput,
    pub repeated: RepeatedEigenvalue,
}

impl Experiment for SpinOne {
    fn name(&self) -> &str {
        "spin-one"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Report> {
        let registry = CaseRegistry::standard();
        let rule = registry.get(&self.case).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown case '{}'; expected one of {}",
                self.case,
                registry.names().join(", ")
            ))
        })?;
        let dist = cfg.distribution();
        let built = match &self.input {
            SpinOneInput::Triple { lambdas, probs } => {
                let triple = SpectralTriple::new(*lambdas, *probs, false)?;
                let params = format!(
                    "case={};lambdas={};p={}",
                    rule.name(),
                    fmt_list(lambdas),
                    fmt_list(probs)
                );
                spin_one::build_formula(rule, &triple, dist)
                    .map(|f| (f, triple.mean(), triple.second_moment(), params.clone()))
                    .map_err(|e| (e, params))
            }
            SpinOneInput::Operator { coeffs, state, basis } => {
                let params = format!("case={};basis={basis};coeffs={}", rule.name(), fmt_list(coeffs));
                spin_one::beable_from_operator(coeffs, *basis, state, rule, self.repeated, dist)
                    .map(|b| {
                        let second = b.oracle_variance + b.oracle_mean * b.oracle_mean;
                        let params = format!("{params};p={}", fmt_list(&b.triple.probabilities));
                        (b.formula, b.oracle_mean, second, params)
                    })
                    .map_err(|e| (e, params))
            }
        };
        let (formula, q_mean, q_second, params) = match built {
            Ok(x) => x,
            Err((Error::Infeasible(inf), params)) => {
                let row = ReportRow::new(
                    "spin-one-infeasible",
                    format!("{params};reason={}", inf.reason),
                    inf.discriminant.unwrap_or(0.0),
                );
                return Ok(Report {
                    rows: vec![row],
                    notes: vec![format!("infeasible: {}", inf.reason)],
                });
            }
            Err((e, _)) => return Err(e),
        };
        let hv = spin_one::hv_statistics(&formula);
        let (mean, second) = spin_one::mc_statistics(&formula, &cfg.mc(0));
        let k = formula.coefficients();
        let t = formula.targets();
        let notes = vec![format!(
            "case {}: B = {} + {} chi1 + {} chi2 + {} chi1 chi2, <chi1> = {}, <chi2> = {}",
            formula.case_name(),
            k.a,
            k.b,
            k.c,
            k.d,
            t.chi1,
            t.chi2
        )];
        let rows = vec![
            ReportRow::new("spin-one-mean", params.clone(), hv.mean)
                .with_mc(&mean, cfg.sigma)
                .with_oracle(q_mean),
            ReportRow::new("spin-one-second-moment", params, hv.second_moment)
                .with_mc(&second, cfg.sigma)
                .with_oracle(q_second),
        ];
        Ok(Report { rows, notes })
    }
}

pub struct KsDispersion {
    pub probs: [f64; 3],
}

impl Experiment for KsDispersion {
    fn name(&self) -> &str {
        "ks-dispersion"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Report> {
        let model = KsModel::new(self.probs)?;
        let params = format!("p={}", fmt_list(&self.probs));
        let (mean, second) = ks::mc_shared(&model, &cfg.mc(0));
        let closed = ks::ks_second_moment(&model);
        let terms = ks::ks_second_moment_from_terms(&model);
        let d = ks::ks_dispersion(&model);
        let mut shifted = second;
        shifted.mean -= 4.0;
        let rows = vec![
            // quantum mechanically B = 2I
            ReportRow::new("ks-average", params.clone(), ks::ks_average(&model))
                .with_mc(&mean, cfg.sigma)
                .with_oracle(2.0),
            ReportRow::new("ks-second-moment", params.clone(), closed)
                .with_mc(&second, cfg.sigma)
                .require((closed - terms).abs() < 1e-12),
            ReportRow::new("ks-dispersion", params, d)
                .with_mc(&shifted, cfg.sigma)
                .require((-1e-12..=2.0 + 1e-12).contains(&d)),
        ];
        let notes = match ks::violation_witness(&model) {
            Some((mu, total)) => vec![format!(
                "p = ({}): mu = {mu} gives S_x^2 + S_y^2 + S_z^2 = {total}",
                fmt_list(&self.probs)
            )],
            None => vec![format!(
                "p = ({}): every mu gives S_x^2 + S_y^2 + S_z^2 = 2",
                fmt_list(&self.probs)
            )],
        };
        Ok(Report { rows, notes })
    }
}

/// Every simplex grid point with its dispersion.
pub struct KsScan;

impl Experiment for KsScan {
    fn name(&self) -> &str {
        "ks-scan"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Report> {
        let rows = ks::dispersion_scan(cfg.grid_step)?
            .into_iter()
            .map(|pt| {
                ReportRow::new("ks-scan", format!("p={}", fmt_list(&pt.probabilities)), pt.dispersion)
                    .require((-1e-12..=2.0 + 1e-12).contains(&pt.dispersion))
            })
            .collect();
        Ok(Report {
            rows,
            notes: Vec::new(),
        })
    }
}

/// Extremes of the grid scan.
pub struct KsScanSummary;

impl Experiment for KsScanSummary {
    fn name(&self) -> &str {
        "ks-scan-summary"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Report> {
        let scan = ks::dispersion_scan(cfg.grid_step)?;
        let s = ks::summarize_scan(&scan).ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
        let in_range = scan.iter().all(|p| (-1e-12..=2.0 + 1e-12).contains(&p.dispersion));
        let step = format!("step={}", cfg.grid_step);
        let rows = vec![
            ReportRow::new(
                "ks-scan-min",
                format!("{step};at={}", fmt_list(&s.min.probabilities)),
                s.min.dispersion,
            )
            .require(in_range && s.min.dispersion.abs() < 1e-12),
            ReportRow::new(
                "ks-scan-max",
                format!("{step};at={}", fmt_list(&s.max.probabilities)),
                s.max.dispersion,
            )
            .require(in_range),
        ];
        let notes = vec![format!(
            "{} grid points; the supremum 2 is reached only at p = (1/3,1/3,1/3)",
            s.points
        )];
        Ok(Report { rows, notes })
    }
}

/// `probs` is `(p₊, p₀, p₋)`.
pub struct KsEpsilon {
    pub eps: f64,
    pub probs: [f64; 3],
}

fn direct_moments(model: &EpsilonKsModel) -> (f64, f64) {
    let outs = model.outcomes();
    let mean: f64 = outs.iter().map(|(o, p)| o * p).sum();
    let second: f64 = outs.iter().map(|(o, p)| o * o * p).sum();
    (mean, second)
}

impl Experiment for KsEpsilon {
    fn name(&self) -> &str {
        "ks-epsilon"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Report> {
        let model = EpsilonKsModel::new(self.eps, self.probs)?;
        let s = ks::epsilon_statistics(&model);
        let (mean, second) = ks::mc_epsilon(&model, &cfg.mc(0))?;
        let (m, m2) = direct_moments(&model);
        let params = format!("eps={};p={}", self.eps, fmt_list(&self.probs));
        let rows = vec![
            ReportRow::new("ks-epsilon-mean", params.clone(), s.mean)
                .with_mc(&mean, cfg.sigma)
                .with_oracle(m),
            ReportRow::new("ks-epsilon-second-moment", params.clone(), s.second_moment)
                .with_mc(&second, cfg.sigma)
                .with_oracle(m2),
            ReportRow::new("ks-epsilon-variance", params, s.variance).with_oracle(m2 - m * m),
        ];
        Ok(Report {
            rows,
            notes: Vec::new(),
        })
    }
}

/// Variance against ε on a log grid from 1e-4 to 1e-1, with the fitted
/// log-log slope.
pub struct KsEpsilonSweep {
    pub probs: [f64; 3],
}

impl Experiment for KsEpsilonSweep {
    fn name(&self) -> &str {
        "ks-epsilon-sweep"
    }

    fn run(&self, _cfg: &RunConfig) -> Result<Report> {
        let sweep = ks::log_sweep(1e-4, 1e-1, 13);
        let mut rows = Vec::new();
        for &eps in &sweep {
            let model = EpsilonKsModel::new(eps, self.probs)?;
            let (m, m2) = direct_moments(&model);
            rows.push(
                ReportRow::new(
                    "ks-epsilon-variance",
                    format!("eps={eps};p={}", fmt_list(&self.probs)),
                    ks::epsilon_statistics(&model).variance,
                )
                .with_oracle(m2 - m * m)
                .require(ks::epsilon_statistics(&model).variance > 0.0 || self.probs[1] == 1.0),
            );
        }
        let slope = ks::variance_slope(&sweep, self.probs)?;
        rows.push(
            ReportRow::new("ks-epsilon-slope", format!("p={}", fmt_list(&self.probs)), slope)
                .require((slope - 2.0).abs() <= 0.01),
        );
        Ok(Report {
            rows,
            notes: Vec::new(),
        })
    }
}
