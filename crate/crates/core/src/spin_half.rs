//! Spin-1/2 outcome rules: Bell's original rule and the ε-vector rule.
//!
//! Both rules return `±|β|` for the beable `β·S` from one flat hidden
//! variable `λ ∈ (−½, ½)`. The ε-vector rule reproduces `⟨β·σ⟩ = β·ε` for any
//! state; Bell's rule does so only for `ψ₀ = (1, 0)`.

use crate::distributions::{McEstimate, MonteCarlo, PowerLawDistribution};
use crate::oracle::{build_basis, epsilon_vector, BasisKind, QuantumState};
use crate::{sign, Error, Result};

/// `α + β·S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeableCoefficients {
    pub alpha: f64,
    pub beta: [f64; 3],
}

impl BeableCoefficients {
    pub fn new(alpha: f64, beta: [f64; 3]) -> Result<Self> {
        if norm(&beta) == 0.0 {
            return Err(Error::ZeroCoefficients);
        }
        Ok(Self { alpha, beta })
    }

    pub fn linear(beta: [f64; 3]) -> Result<Self> {
        Self::new(0.0, beta)
    }

    pub fn beta_norm(&self) -> f64 {
        norm(&self.beta)
    }
}

/// Hidden-variable state `(λ, ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvStateSpinHalf {
    pub epsilon: [f64; 3],
    pub lambda: f64,
}

impl HvStateSpinHalf {
    pub fn new(epsilon: [f64; 3], lambda: f64) -> Result<Self> {
        check_epsilon(&epsilon)?;
        Ok(Self { epsilon, lambda })
    }
}

fn norm(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_epsilon(eps: &[f64; 3]) -> Result<()> {
    if norm(eps) > 1.0 + 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "|epsilon| = {} exceeds 1",
            norm(eps)
        )));
    }
    Ok(())
}

fn check_beta(beta: &[f64; 3]) -> Result<f64> {
    let n = norm(beta);
    if n == 0.0 {
        Err(Error::ZeroCoefficients)
    } else {
        Ok(n)
    }
}

/// `ε = ⟨ψ|σ|ψ⟩` (or `Tr ρσ`) of a qubit state.
pub fn epsilon_of(state: &QuantumState) -> Result<[f64; 3]> {
    let e = epsilon_vector(state, &build_basis(BasisKind::Pauli))?;
    Ok([e.0[0], e.0[1], e.0[2]])
}

/// A deterministic spin-1/2 outcome rule for `β·S`.
pub trait SpinHalfRule: Send + Sync {
    fn name(&self) -> &'static str;

    /// `±|β|` at hidden variable `λ`.
    fn outcome(&self, beta: &[f64; 3], lambda: f64) -> Result<f64>;

    /// Exact average over the flat `λ` distribution.
    fn mean_analytic(&self, beta: &[f64; 3]) -> Result<f64>;

    /// Exact variance over the flat `λ` distribution.
    fn variance_analytic(&self, beta: &[f64; 3]) -> Result<f64> {
        let m = self.mean_analytic(beta)?;
        Ok(dot(beta, beta) - m * m)
    }
}

/// `|β| sign(λ|β| + ½|β_z|) sign X`, with `X = β_z`, else `β_x`, else `β_y`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BellOriginal;

impl BellOriginal {
    fn selector(beta: &[f64; 3]) -> f64 {
        let [bx, by, bz] = *beta;
        if bz != 0.0 {
            bz
        } else if bx != 0.0 {
            bx
        } else {
            by
        }
    }

    /// Closed-form `P(outcome = +|β|)` over flat `λ`.
    pub fn probability_plus(beta: &[f64; 3]) -> Result<f64> {
        let n = check_beta(beta)?;
        let p_upper = 0.5 + beta[2].abs() / (2.0 * n);
        Ok(if sign(Self::selector(beta)) > 0.0 {
            p_upper
        } else {
            1.0 - p_upper
        })
    }
}

impl SpinHalfRule for BellOriginal {
    fn name(&self) -> &'static str {
        "original"
    }

    fn outcome(&self, beta: &[f64; 3], lambda: f64) -> Result<f64> {
        let n = check_beta(beta)?;
        Ok(n * sign(lambda * n + 0.5 * beta[2].abs()) * sign(Self::selector(beta)))
    }

    fn mean_analytic(&self, beta: &[f64; 3]) -> Result<f64> {
        let n = check_beta(beta)?;
        Ok(n * (2.0 * Self::probability_plus(beta)? - 1.0))
    }
}

/// `|β| sign(β·ε) χ(λ)` with `χ = sign(λ + |β·ε|/(2|β|))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonRule {
    epsilon: [f64; 3],
}

impl EpsilonRule {
    pub fn new(epsilon: [f64; 3]) -> Result<Self> {
        check_epsilon(&epsilon)?;
        Ok(Self { epsilon })
    }

    pub fn from_state(state: &QuantumState) -> Result<Self> {
        Self::new(epsilon_of(state)?)
    }

    pub fn epsilon(&self) -> [f64; 3] {
        self.epsilon
    }

    /// `λ* = −|β·ε|/(2|β|)`; the outcome is `|β|sign(β·ε)` above it.
    pub fn threshold(&self, beta: &[f64; 3]) -> Result<f64> {
        let n = check_beta(beta)?;
        Ok(-dot(beta, &self.epsilon).abs() / (2.0 * n))
    }

    /// `P₊ = ½ + β·ε/(2|β|)`.
    pub fn probability_plus(&self, beta: &[f64; 3]) -> Result<f64> {
        let n = check_beta(beta)?;
        Ok(0.5 + dot(beta, &self.epsilon) / (2.0 * n))
    }
}

impl SpinHalfRule for EpsilonRule {
    fn name(&self) -> &'static str {
        "modified"
    }

    fn outcome(&self, beta: &[f64; 3], lambda: f64) -> Result<f64> {
        let n = check_beta(beta)?;
        let be = dot(beta, &self.epsilon);
        Ok(n * sign(be) * sign(lambda + be.abs() / (2.0 * n)))
    }

    fn mean_analytic(&self, beta: &[f64; 3]) -> Result<f64> {
        check_beta(beta)?;
        Ok(dot(beta, &self.epsilon))
    }
}

/// Rule by CLI name (`original` or `modified`).
pub fn rule_by_name(name: &str, epsilon: [f64; 3]) -> Result<Box<dyn SpinHalfRule>> {
    match name {
        "original" | "bell" => Ok(Box::new(BellOriginal)),
        "modified" | "epsilon" => Ok(Box::new(EpsilonRule::new(epsilon)?)),
        other => Err(Error::InvalidParameter(format!("unknown spin-1/2 rule '{other}'"))),
    }
}

pub fn bell_outcome_original(beta: &[f64; 3], lambda: f64) -> Result<f64> {
    BellOriginal.outcome(beta, lambda)
}

pub fn bell_outcome_modified(beta: &[f64; 3], epsilon: &[f64; 3], lambda: f64) -> Result<f64> {
    EpsilonRule::new(*epsilon)?.outcome(beta, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvStatistics {
    pub mean: f64,
    pub variance: f64,
}

/// Mean `β·ε` and variance `|β|² − (β·ε)²` of the ε-vector rule.
pub fn hv_statistics(beta: &[f64; 3], epsilon: &[f64; 3]) -> Result<HvStatistics> {
    let rule = EpsilonRule::new(*epsilon)?;
    Ok(HvStatistics {
        mean: rule.mean_analytic(beta)?,
        variance: rule.variance_analytic(beta)?,
    })
}

/// Monte Carlo `(mean, second moment)` of a rule over flat `λ`.
pub fn mc_statistics(
    rule: &dyn SpinHalfRule,
    beta: &[f64; 3],
    mc: &MonteCarlo,
) -> Result<(McEstimate, McEstimate)> {
    check_beta(beta)?;
    let [m1, m2] = mc.means(&PowerLawDistribution::flat(), |[lambda]| {
        let o = rule.outcome(beta, lambda).expect("beta checked");
        [o, o * o]
    });
    Ok((m1, m2))
}

/// Split of the `λ` ensemble at `λ*` into the part where `β·S` reads `+|β|`
/// and the part where it reads `−|β|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneitySplit {
    pub threshold: f64,
    /// `⟨α + β·S⟩` over the `+|β|` subensemble, `α + |β|`.
    pub mean_plus: f64,
    /// `⟨α + β·S⟩` over the `−|β|` subensemble, `α − |β|`.
    pub mean_minus: f64,
    pub weight_plus: f64,
    pub weight_minus: f64,
    /// Whole-ensemble mean, `α + β·ε`.
    pub whole: f64,
}

impl HomogeneitySplit {
    pub fn recombined(&self) -> f64 {
        self.weight_plus * self.mean_plus + self.weight_minus * self.mean_minus
    }
}

/// For `β·ε ≥ 0` the `+` subensemble is `λ > λ*`; for `β·ε < 0` the roles of
/// the two intervals swap.
pub fn homogeneity_split(alpha: f64, beta: &[f64; 3], epsilon: &[f64; 3]) -> Result<HomogeneitySplit> {
    let rule = EpsilonRule::new(*epsilon)?;
    let n = check_beta(beta)?;
    let threshold = rule.threshold(beta)?;
    let weight_plus = rule.probability_plus(beta)?;
    Ok(HomogeneitySplit {
        threshold,
        mean_plus: alpha + n,
        mean_minus: alpha - n,
        weight_plus,
        weight_minus: 1.0 - weight_plus,
        whole: alpha + rule.mean_analytic(beta)?,
    })
}

/// Filtered Monte Carlo means over the `+` and `−` subensembles, selected by
/// `λ` interval.
pub fn mc_homogeneity(
    alpha: f64,
    beta: &[f64; 3],
    epsilon: &[f64; 3],
    mc: &MonteCarlo,
) -> Result<(McEstimate, McEstimate)> {
    let rule = EpsilonRule::new(*epsilon)?;
    let threshold = rule.threshold(beta)?;
    let upper_is_plus = sign(dot(beta, epsilon)) > 0.0;
    let flat = PowerLawDistribution::flat();
    let value = |lambda: f64| alpha + rule.outcome(beta, lambda).expect("beta checked");
    let in_plus = move |lambda: f64| (lambda >= threshold) == upper_is_plus;
    let plus = mc.conditional_mean(&flat, |[l]| in_plus(l).then(|| value(l)));
    let minus = mc.conditional_mean(&flat, |[l]| (!in_plus(l)).then(|| value(l)));
    Ok((plus, minus))
}
