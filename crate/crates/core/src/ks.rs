//! The Kochen-Specker beable `B = S_x² + S_y² + S_z²` in the hidden-variable
//! model, and its ε-deformed variant.
//!
//! Each squared component has outcomes {0, 1} and is modelled as
//! `½(1 − χ)` with `χ = sign(μ + ½|2pᵢ − 1|)·sign(2pᵢ − 1)`, where `pᵢ` is the
//! probability of reading 0. All three share one flat hidden variable `μ`.
//! On average `B = 2`, but individual configurations give other sums and the
//! ensemble has nonzero dispersion, which quantum mechanics forbids.

use crate::distributions::{McEstimate, MonteCarlo, PowerLawDistribution, SignFunction};
use crate::oracle::{self, QuantumState};
use crate::spin_one::{self, CaseIII, Coefficients, OutcomeFormula, SpectralTriple};
use crate::{sign, Error, Result};

const PROB_TOL: f64 = 1e-10;

fn check_probabilities(p: &[f64; 3]) -> Result<[f64; 3]> {
    if p.iter().any(|x| !(-1e-12..=1.0 + 1e-12).contains(x)) {
        return Err(Error::InvalidParameter(format!(
            "probabilities must lie in [0, 1], got {p:?}"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidParameter(format!(
            "probabilities must sum to 1, got {total}"
        )));
    }
    Ok(p.map(|x| x.clamp(0.0, 1.0)))
}

/// `(p₁, p₂, p₃)`: probabilities that `S_x²`, `S_y²`, `S_z²` read 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsModel {
    probabilities: [f64; 3],
}

impl KsModel {
    pub fn new(probabilities: [f64; 3]) -> Result<Self> {
        Ok(Self {
            probabilities: check_probabilities(&probabilities)?,
        })
    }

    /// Probabilities from the simultaneous eigenbasis of the squares.
    pub fn from_state(state: &QuantumState) -> Result<Self> {
        Self::new(oracle::ks_probabilities(state)?)
    }

    pub fn probabilities(&self) -> [f64; 3] {
        self.probabilities
    }

    /// `⟨χᵢ⟩ = 2pᵢ − 1`.
    pub fn chi_means(&self) -> [f64; 3] {
        self.probabilities.map(|p| 2.0 * p - 1.0)
    }

    pub fn sign_functions(&self) -> [SignFunction; 3] {
        self.chi_means()
            .map(|m| SignFunction::with_mean(m, PowerLawDistribution::flat()).expect("mean in [-1, 1]"))
    }
}

/// Outcomes of `(S_x², S_y², S_z²)` at hidden variable `μ`.
pub fn ks_square_outcomes(model: &KsModel, mu: f64) -> [f64; 3] {
    model.sign_functions().map(|chi| 0.5 * (1.0 - chi.eval(mu)))
}

/// `Σ(1 − pᵢ)`, which is 2 on the simplex.
pub fn ks_average(model: &KsModel) -> f64 {
    model.probabilities.iter().map(|p| 1.0 - p).sum()
}

/// `⟨S_i² S_j²⟩` over one shared `μ`:
/// `¼[1 − mᵢ − mⱼ + (1 − ||mᵢ| − |mⱼ||)·sign(mᵢ)·sign(mⱼ)]`, `m = 2p − 1`.
pub fn ks_cross_term(p_i: f64, p_j: f64) -> f64 {
    let (mi, mj) = (2.0 * p_i - 1.0, 2.0 * p_j - 1.0);
    0.25 * (1.0 - mi - mj + pair_correlation(mi, mj))
}

/// `⟨χᵢχⱼ⟩` for flat sign functions of one variable.
fn pair_correlation(mi: f64, mj: f64) -> f64 {
    (1.0 - (mi.abs() - mj.abs()).abs()) * sign(mi) * sign(mj)
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// `4 + ½[1 + Σ_{i<j} ⟨χᵢχⱼ⟩]`.
pub fn ks_second_moment(model: &KsModel) -> f64 {
    let m = model.chi_means();
    let sum: f64 = PAIRS.iter().map(|&(i, j)| pair_correlation(m[i], m[j])).sum();
    4.0 + 0.5 * (1.0 + sum)
}

/// `Σ⟨(S_i²)²⟩ + 2Σ_{i<j}⟨S_i²S_j²⟩`, using `(S_i²)² = S_i²` for outcomes
/// in {0, 1}. Agrees with [`ks_second_moment`] on the simplex.
pub fn ks_second_moment_from_terms(model: &KsModel) -> f64 {
    let p = model.probabilities;
    let cross: f64 = PAIRS.iter().map(|&(i, j)| ks_cross_term(p[i], p[j])).sum();
    ks_average(model) + 2.0 * cross
}

/// `⟨B²⟩ − ⟨B⟩²`, in `[0, 2]`.
pub fn ks_dispersion(model: &KsModel) -> f64 {
    ks_second_moment(model) - 4.0
}

/// Simplex points `(i, j, k)/m` with `m = 1/step`, which must be an
/// integer. Coordinates are exact multiples of `1/m`.
pub fn simplex_grid(step: f64) -> Result<Vec<[f64; 3]>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "grid step must lie in (0, 0.5], got {step}"
        )));
    }
    let m = (1.0 / step).round();
    if ((1.0 / step) - m).abs() > 1e-9 * m {
        return Err(Error::InvalidParameter(format!(
            "1/step must be an integer, got step {step}"
        )));
    }
    let m = m as usize;
    let mut out = Vec::with_capacity((m + 1) * (m + 2) / 2);
    for i in 0..=m {
        for j in 0..=(m - i) {
            let k = m - i - j;
            out.push([i as f64 / m as f64, j as f64 / m as f64, k as f64 / m as f64]);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub probabilities: [f64; 3],
    pub dispersion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSummary {
    pub points: usize,
    pub min: ScanPoint,
    pub max: ScanPoint,
}

pub fn dispersion_scan(step: f64) -> Result<Vec<ScanPoint>> {
    simplex_grid(step)?
        .into_iter()
        .map(|p| {
            Ok(ScanPoint {
                probabilities: p,
                dispersion: ks_dispersion(&KsModel::new(p)?),
            })
        })
        .collect()
}

/// Extremes of a scan; the first point wins ties.
pub fn summarize_scan(scan: &[ScanPoint]) -> Option<ScanSummary> {
    let first = *scan.first()?;
    let (mut min, mut max) = (first, first);
    for pt in &scan[1..] {
        if pt.dispersion < min.dispersion {
            min = *pt;
        }
        if pt.dispersion > max.dispersion {
            max = *pt;
        }
    }
    Some(ScanSummary {
        points: scan.len(),
        min,
        max,
    })
}

/// A `μ` at which `S_x² + S_y² + S_z² ≠ 2`, with that sum. The outcomes are
/// piecewise constant in `μ`, so checking one point per piece is exhaustive.
pub fn violation_witness(model: &KsModel) -> Option<(f64, f64)> {
    let half = PowerLawDistribution::flat().half_width();
    let mut cuts: Vec<f64> = model
        .sign_functions()
        .iter()
        .map(|chi| -chi.threshold())
        .filter(|&x| x > -half && x < half)
        .collect();
    cuts.push(-half);
    cuts.push(half);
    cuts.sort_by(f64::total_cmp);
    // thresholds of ±m differ by rounding; such slivers are not pieces
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    cuts.windows(2).find_map(|w| {
        let mu = 0.5 * (w[0] + w[1]);
        let total: f64 = ks_square_outcomes(model, mu).iter().sum();
        (total != 2.0).then_some((mu, total))
    })
}

/// Monte Carlo `(⟨B⟩, ⟨B²⟩)` with one `μ` shared by the three squares.
pub fn mc_shared(model: &KsModel, mc: &MonteCarlo) -> (McEstimate, McEstimate) {
    let chis = model.sign_functions();
    let [m, s] = mc.means(&PowerLawDistribution::flat(), |[mu]| {
        let b: f64 = chis.iter().map(|c| 0.5 * (1.0 - c.eval(mu))).sum();
        [b, b * b]
    });
    (m, s)
}

/// As [`mc_shared`] but with an independent `μ` per square; the mean is
/// unchanged, the second moment is not.
pub fn mc_independent(model: &KsModel, mc: &MonteCarlo) -> (McEstimate, McEstimate) {
    let chis = model.sign_functions();
    let [m, s] = mc.means(&PowerLawDistribution::flat(), |mu: [f64; 3]| {
        let b: f64 = chis.iter().zip(mu).map(|(c, x)| 0.5 * (1.0 - c.eval(x))).sum();
        [b, b * b]
    });
    (m, s)
}

/// `⟨B²⟩` for independent `μ`s: cross terms factorise into `(1−pᵢ)(1−pⱼ)`.
pub fn independent_second_moment(model: &KsModel) -> f64 {
    let p = model.probabilities;
    let cross: f64 = PAIRS.iter().map(|&(i, j)| (1.0 - p[i]) * (1.0 - p[j])).sum();
    ks_average(model) + 2.0 * cross
}

/// `B_ε = (1+ε)S_x² + S_y² + (1−ε)S_z²` with outcome probabilities
/// `p₊` for `2+ε`, `p₀` for 2 and `p₋` for `2−ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonKsModel {
    eps: f64,
    p_plus: f64,
    p_zero: f64,
    p_minus: f64,
}

impl EpsilonKsModel {
    /// `probabilities = (p₊, p₀, p₋)`.
    pub fn new(eps: f64, probabilities: [f64; 3]) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        let [p_plus, p_zero, p_minus] = check_probabilities(&probabilities)?;
        Ok(Self {
            eps,
            p_plus,
            p_zero,
            p_minus,
        })
    }

    /// From KS probabilities: the eigenvector with `S_z² = 0` gives `2+ε`,
    /// `S_y² = 0` gives 2, `S_x² = 0` gives `2−ε`.
    pub fn from_ks_probabilities(eps: f64, p: [f64; 3]) -> Result<Self> {
        Self::new(eps, [p[2], p[1], p[0]])
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `(p₊, p₀, p₋)`.
    pub fn probabilities(&self) -> [f64; 3] {
        [self.p_plus, self.p_zero, self.p_minus]
    }

    /// `[(2+ε, p₊), (2, p₀), (2−ε, p₋)]`.
    pub fn outcomes(&self) -> [(f64, f64); 3] {
        [
            (2.0 + self.eps, self.p_plus),
            (2.0, self.p_zero),
            (2.0 - self.eps, self.p_minus),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonStatistics {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// Mean `2 + ε(p₊−p₋)`, second moment `4 + 4ε(p₊−p₋) + ε²(p₊+p₋)` and
/// their difference `ε²(p₊+p₋ − (p₊−p₋)²)`.
pub fn epsilon_statistics(model: &EpsilonKsModel) -> EpsilonStatistics {
    let e = model.eps;
    let diff = model.p_plus - model.p_minus;
    let off = model.p_plus + model.p_minus;
    EpsilonStatistics {
        mean: 2.0 + e * diff,
        second_moment: 4.0 + 4.0 * e * diff + e * e * off,
        variance: e * e * (off - diff * diff),
    }
}

/// `ε²(p₊+p₋ − (p₊+p₋)²)`. Equals the variance only when `p₊p₋ = 0`; the
/// general value is [`epsilon_statistics`]`.variance`, larger by `4ε²p₊p₋`.
pub fn printed_epsilon_variance(model: &EpsilonKsModel) -> f64 {
    let off = model.p_plus + model.p_minus;
    model.eps * model.eps * (off - off * off)
}

/// Coefficients of the outcome formula for one squared component with
/// outcome 1 repeated and 0 on one pattern: `¾ − ¼χ₁ + ¼χ₂ + ¼χ₁χ₂`.
pub fn epsilon_square_formula() -> Coefficients {
    spin_one::solve_coefficients(&CaseIII, [1.0, 0.0, 1.0])
}

/// Three-outcome formula for `B_ε` (case III, 2 repeated).
pub fn epsilon_formula(model: &EpsilonKsModel) -> Result<OutcomeFormula> {
    let e = model.eps;
    let triple = SpectralTriple::new(
        [2.0, 2.0 + e, 2.0 - e],
        [model.p_zero, model.p_plus, model.p_minus],
        false,
    )?;
    spin_one::build_formula(&CaseIII, &triple, PowerLawDistribution::flat())
}

/// Monte Carlo `(mean, second moment)` of [`epsilon_formula`].
pub fn mc_epsilon(model: &EpsilonKsModel, mc: &MonteCarlo) -> Result<(McEstimate, McEstimate)> {
    Ok(spin_one::mc_statistics(&epsilon_formula(model)?, mc))
}

/// Least-squares slope of `ln Var` against `ln ε`.
pub fn variance_slope(eps: &[f64], probabilities: [f64; 3]) -> Result<f64> {
    if eps.len() < 2 {
        return Err(Error::InvalidParameter("need at least two eps values".into()));
    }
    let pts = eps
        .iter()
        .map(|&e| {
            let v = epsilon_statistics(&EpsilonKsModel::new(e, probabilities)?).variance;
            if v <= 0.0 {
                return Err(Error::InvalidParameter(
                    "variance vanishes; slope undefined".into(),
                ));
            }
            Ok((e.ln(), v.ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    Ok(sxy / sxx)
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_sweep(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}
