//! Spin-1 beables with three outcomes built from two independent sign
//! functions.
//!
//! The outcome formula is `a + b χ₁ + c χ₂ + d χ₁χ₂` with `χᵢ = χᵢ(μᵢ)`.
//! A [`CaseRule`] fixes which sign pattern gives which eigenvalue, the
//! coefficients follow from that table, and the sign-function averages follow
//! from the Born probabilities.

mod cases;

pub use cases::{
    base_rule, CaseI, CaseII, CaseIII, CaseIV, CaseId, CaseRegistry, CaseRule, CaseV, CaseVI, ChiTargets,
    Slot, Swapped, SIGN_PATTERNS,
};

use std::fmt;
use std::str::FromStr;

use crate::distributions::{McEstimate, MonteCarlo, PowerLawDistribution, SignFunction};
use crate::oracle::{
    self, build_basis, BasisKind, EpsilonVector, HermitianOperator, QuantumState,
};
use crate::{Error, Result};

const PROB_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const SNAP_TOL: f64 = 1e-9;

/// Eigenvalues `(λ₁, λ₂, λ₃)` with λ₁ the repeated outcome, and their
/// probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTriple {
    pub lambdas: [f64; 3],
    pub probabilities: [f64; 3],
    pub traceless: bool,
}

impl SpectralTriple {
    /// Probabilities within 1e-12 of `[0, 1]` are clamped.
    pub fn new(lambdas: [f64; 3], probabilities: [f64; 3], traceless: bool) -> Result<Self> {
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter("eigenvalues must be finite".into()));
        }
        if probabilities.iter().any(|p| !(-1e-12..=1.0 + 1e-12).contains(p)) {
            return Err(Error::InvalidParameter(format!(
                "probabilities must lie in [0, 1], got {probabilities:?}"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidParameter(format!(
                "probabilities must sum to 1, got {total}"
            )));
        }
        if traceless {
            let scale = lambdas.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
            let trace: f64 = lambdas.iter().sum();
            if trace.abs() > TRACE_TOL * scale {
                return Err(Error::InvalidParameter(format!(
                    "eigenvalues must sum to 0, got {trace}"
                )));
            }
        }
        Ok(Self {
            lambdas,
            probabilities: probabilities.map(|p| p.clamp(0.0, 1.0)),
            traceless,
        })
    }

    pub fn mean(&self) -> f64 {
        self.lambdas.iter().zip(&self.probabilities).map(|(l, p)| l * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.probabilities)
            .map(|(l, p)| l * l * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        self.second_moment() - self.mean().powi(2)
    }
}

/// `(a, b, c, d)` of `a + b χ₁ + c χ₂ + d χ₁χ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Coefficients {
    pub fn eval(&self, chi1: f64, chi2: f64) -> f64 {
        self.a + self.b * chi1 + self.c * chi2 + self.d * chi1 * chi2
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Outcome per sign pattern, in [`SIGN_PATTERNS`] order.
pub fn case_outcomes(rule: &dyn CaseRule, lambdas: [f64; 3]) -> [f64; 4] {
    rule.table().map(|s| lambdas[s.index()])
}

/// Inverts the 4×4 system. Its rows are the sign patterns, which are
/// mutually orthogonal, so the inverse is the transpose over four.
pub fn solve_coefficients(rule: &dyn CaseRule, lambdas: [f64; 3]) -> Coefficients {
    let [pp, pm, mp, mm] = case_outcomes(rule, lambdas);
    Coefficients {
        a: (pp + pm + mp + mm) / 4.0,
        b: (pp + pm - mp - mm) / 4.0,
        c: (pp - pm + mp - mm) / 4.0,
        d: (pp - pm - mp + mm) / 4.0,
    }
}

/// A built outcome formula: coefficients plus the two sign functions.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeFormula {
    case: String,
    coefficients: Coefficients,
    lambdas: [f64; 3],
    outcomes: [f64; 4],
    chi1: SignFunction,
    chi2: SignFunction,
}

impl OutcomeFormula {
    pub fn case_name(&self) -> &str {
        &self.case
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coefficients
    }

    pub fn lambdas(&self) -> [f64; 3] {
        self.lambdas
    }

    /// Outcome per sign pattern, in [`SIGN_PATTERNS`] order.
    pub fn outcomes(&self) -> [f64; 4] {
        self.outcomes
    }

    pub fn chi1(&self) -> &SignFunction {
        &self.chi1
    }

    pub fn chi2(&self) -> &SignFunction {
        &self.chi2
    }

    pub fn targets(&self) -> ChiTargets {
        ChiTargets {
            chi1: self.chi1.mean_analytic(),
            chi2: self.chi2.mean_analytic(),
        }
    }

    pub fn distribution(&self) -> &PowerLawDistribution {
        self.chi1.distribution()
    }

    /// Outcome for fixed signs, snapped to the nearest eigenvalue.
    pub fn evaluate_signs(&self, chi1: f64, chi2: f64) -> f64 {
        let raw = self.coefficients.eval(chi1, chi2);
        let nearest = self
            .lambdas
            .iter()
            .copied()
            .min_by(|x, y| (x - raw).abs().total_cmp(&(y - raw).abs()))
            .expect("three eigenvalues");
        assert!(
            (nearest - raw).abs() < SNAP_TOL * nearest.abs().max(1.0),
            "outcome {raw} is not an eigenvalue of {:?}",
            self.lambdas
        );
        nearest
    }

    pub fn evaluate(&self, mu1: f64, mu2: f64) -> f64 {
        self.evaluate_signs(self.chi1.eval(mu1), self.chi2.eval(mu2))
    }

    /// Same statistics with `χ₁ → −χ₁` and/or `χ₂ → −χ₂`: the coefficients
    /// and targets change sign accordingly.
    pub fn relabeled(&self, flip1: bool, flip2: bool) -> OutcomeFormula {
        let s1 = if flip1 { -1.0 } else { 1.0 };
        let s2 = if flip2 { -1.0 } else { 1.0 };
        let k = self.coefficients;
        let coefficients = Coefficients {
            a: k.a,
            b: s1 * k.b,
            c: s2 * k.c,
            d: s1 * s2 * k.d,
        };
        let dist = *self.distribution();
        let t = self.targets();
        OutcomeFormula {
            case: self.case.clone(),
            coefficients,
            lambdas: self.lambdas,
            outcomes: SIGN_PATTERNS.map(|(c1, c2)| coefficients.eval(c1, c2)),
            chi1: SignFunction::with_mean(s1 * t.chi1, dist).expect("target in range"),
            chi2: SignFunction::with_mean(s2 * t.chi2, dist).expect("target in range"),
        }
    }
}

/// χᵢ(μᵢ) = sign(μᵢ + |⟨χᵢ⟩/2N|^(1/(2n+1))) · sign(⟨χᵢ⟩).
pub fn build_formula(
    rule: &dyn CaseRule,
    triple: &SpectralTriple,
    dist: PowerLawDistribution,
) -> Result<OutcomeFormula> {
    let targets = rule.chi_targets(triple.probabilities)?;
    let coefficients = solve_coefficients(rule, triple.lambdas);
    Ok(OutcomeFormula {
        case: rule.name(),
        coefficients,
        lambdas: triple.lambdas,
        outcomes: case_outcomes(rule, triple.lambdas),
        chi1: SignFunction::with_mean(targets.chi1, dist)?,
        chi2: SignFunction::with_mean(targets.chi2, dist)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// Exact moments using `⟨χᵢ²⟩ = 1` and `⟨χ₁χ₂⟩ = ⟨χ₁⟩⟨χ₂⟩`; the square of
/// the beable is taken as the square of its outcome.
pub fn hv_statistics(formula: &OutcomeFormula) -> Moments {
    let Coefficients { a, b, c, d } = formula.coefficients;
    let ChiTargets { chi1: m1, chi2: m2 } = formula.targets();
    let mean = a + b * m1 + c * m2 + d * m1 * m2;
    let second_moment = a * a
        + b * b
        + c * c
        + d * d
        + 2.0 * (a * b + c * d) * m1
        + 2.0 * (a * c + b * d) * m2
        + 2.0 * (a * d + b * c) * m1 * m2;
    Moments {
        mean,
        second_moment,
        variance: second_moment - mean * mean,
    }
}

/// Monte Carlo `(mean, second moment)` over independent `μ₁, μ₂`.
pub fn mc_statistics(formula: &OutcomeFormula, mc: &MonteCarlo) -> (McEstimate, McEstimate) {
    let [m, s] = mc.means(formula.distribution(), |[mu1, mu2]| {
        let o = formula.evaluate(mu1, mu2);
        [o, o * o]
    });
    (m, s)
}

/// Which eigenvalue plays the repeated outcome λ₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepeatedEigenvalue {
    Largest,
    #[default]
    Middle,
    Smallest,
}

impl fmt::Display for RepeatedEigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepeatedEigenvalue::Largest => "largest",
            RepeatedEigenvalue::Middle => "middle",
            RepeatedEigenvalue::Smallest => "smallest",
        })
    }
}

impl FromStr for RepeatedEigenvalue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "largest" => Ok(RepeatedEigenvalue::Largest),
            "middle" => Ok(RepeatedEigenvalue::Middle),
            "smallest" => Ok(RepeatedEigenvalue::Smallest),
            other => Err(Error::InvalidParameter(format!(
                "repeated eigenvalue must be largest, middle or smallest, got '{other}'"
            ))),
        }
    }
}

/// Spectrum of a 3×3 observable arranged as a triple. λ₂ and λ₃ are the
/// two remaining eigenvalues in descending order; each probability is the
/// weight of its own eigenvector, so degenerate eigenvalues keep separate
/// slots.
pub fn spectral_triple(
    h: &HermitianOperator,
    state: &QuantumState,
    repeated: RepeatedEigenvalue,
    traceless: bool,
) -> Result<SpectralTriple> {
    if h.dim() != 3 || state.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: if h.dim() != 3 { h.dim() } else { state.dim() },
        });
    }
    let pairs = oracle::spectral_decompose(h);
    let first = match repeated {
        RepeatedEigenvalue::Largest => 0,
        RepeatedEigenvalue::Middle => 1,
        RepeatedEigenvalue::Smallest => 2,
    };
    let order: Vec<usize> = std::iter::once(first).chain((0..3).filter(|&k| k != first)).collect();
    let lambdas = [0, 1, 2].map(|i| pairs[order[i]].value);
    let probabilities = [0, 1, 2].map(|i| state.weight(&pairs[order[i]].vector));
    SpectralTriple::new(lambdas, probabilities, traceless)
}

/// A spin-1 observable, its HV formula, and the state labels it came from.
#[derive(Debug, Clone)]
pub struct OperatorBeable {
    pub operator: HermitianOperator,
    pub epsilon: EpsilonVector,
    pub triple: SpectralTriple,
    pub formula: OutcomeFormula,
    pub oracle_mean: f64,
    pub oracle_variance: f64,
}

/// Observable → spectrum → triple → outcome formula. The state enters the
/// formula only through the three probabilities; its ε labels are kept
/// alongside.
pub fn beable_from_operator(
    coeffs: &[f64],
    kind: BasisKind,
    state: &QuantumState,
    rule: &dyn CaseRule,
    repeated: RepeatedEigenvalue,
    dist: PowerLawDistribution,
) -> Result<OperatorBeable> {
    if kind.dim() != 3 {
        return Err(Error::InvalidParameter(format!(
            "spin-1 beables need a 3-dimensional basis, got {kind}"
        )));
    }
    let basis = build_basis(kind);
    let operator = oracle::linear_observable(coeffs, &basis)?;
    let born = oracle::born_distribution(&operator, state)?;
    let triple = spectral_triple(&operator, state, repeated, true)?;
    let formula = build_formula(rule, &triple, dist)?;
    Ok(OperatorBeable {
        epsilon: oracle::epsilon_vector(state, &basis)?,
        oracle_mean: born.mean(),
        oracle_variance: born.variance(),
        operator,
        triple,
        formula,
    })
}
