//! The twelve case assignments of outcomes to sign patterns.
//!
//! A beable with three outcomes built from two sign functions must repeat one
//! outcome (λ₁). Each case fixes which of the four `(χ₁, χ₂)` patterns yields
//! which outcome. The six base cases are listed below; the other six swap
//! λ₂ and λ₃.
//!
//! ```text
//!  χ₁  χ₂ |  I   II  III  IV   V   VI
//!  +   +  |  λ₁  λ₂  λ₁   λ₁   λ₂  λ₂
//!  +   −  |  λ₂  λ₁  λ₂   λ₁   λ₁  λ₃
//!  −   +  |  λ₃  λ₁  λ₁   λ₂   λ₃  λ₁
//!  −   −  |  λ₁  λ₃  λ₃   λ₃   λ₁  λ₁
//! ```

use std::fmt;
use std::str::FromStr;

use crate::{Error, Infeasible};

/// `(χ₁, χ₂)` in table row order.
pub const SIGN_PATTERNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Bound slack on `|⟨χ⟩| ≤ 1` for rounding in the probability relations.
const BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl CaseId {
    pub const ALL: [CaseId; 6] = [CaseId::I, CaseId::II, CaseId::III, CaseId::IV, CaseId::V, CaseId::VI];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::I => "I",
            CaseId::II => "II",
            CaseId::III => "III",
            CaseId::IV => "IV",
            CaseId::V => "V",
            CaseId::VI => "VI",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown case '{s}'")))
    }
}

/// Outcome slot: λ₁ is the repeated one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    L1,
    L2,
    L3,
}

impl Slot {
    pub fn index(self) -> usize {
        match self {
            Slot::L1 => 0,
            Slot::L2 => 1,
            Slot::L3 => 2,
        }
    }

    fn swap23(self) -> Slot {
        match self {
            Slot::L1 => Slot::L1,
            Slot::L2 => Slot::L3,
            Slot::L3 => Slot::L2,
        }
    }
}

/// Required `(⟨χ₁⟩, ⟨χ₂⟩)` for independent sign functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiTargets {
    pub chi1: f64,
    pub chi2: f64,
}

/// One assignment of outcomes to sign patterns together with its
/// probability-to-average relations.
pub trait CaseRule: Send + Sync + fmt::Debug {
    fn id(&self) -> CaseId;

    /// Whether λ₂ and λ₃ are interchanged relative to the base table.
    fn is_swapped(&self) -> bool {
        false
    }

    fn name(&self) -> String {
        if self.is_swapped() {
            format!("{}-swapped", self.id())
        } else {
            self.id().to_string()
        }
    }

    /// Outcome slot per sign pattern, in [`SIGN_PATTERNS`] order.
    fn table(&self) -> [Slot; 4];

    /// Averages the two sign functions must have so that the outcome
    /// probabilities come out as `p = (p₁, p₂, p₃)`.
    fn chi_targets(&self, p: [f64; 3]) -> Result<ChiTargets, Infeasible>;
}

use Slot::{L1, L2, L3};

/// `(p₂ − p₃)/(1 − p₁)`, set to 0 when λ₁ is certain.
fn ratio(p: [f64; 3]) -> f64 {
    let rest = 1.0 - p[0];
    if rest.abs() < 1e-14 {
        0.0
    } else {
        ((p[1] - p[2]) / rest).clamp(-1.0, 1.0)
    }
}

fn in_bounds(x: f64) -> bool {
    x.abs() <= 1.0 + BOUND_TOL
}

fn clamp_targets(chi1: f64, chi2: f64) -> ChiTargets {
    ChiTargets {
        chi1: chi1.clamp(-1.0, 1.0),
        chi2: chi2.clamp(-1.0, 1.0),
    }
}

/// Cases I and II lead to the same quadratic with discriminant
/// `(p₂−p₃)² + 2p₁ − 1`. `roots(sign)` returns `(⟨χ₁⟩, ⟨χ₂⟩)` for one branch.
fn quadratic_case(
    case: CaseId,
    p: [f64; 3],
    roots: impl Fn(f64, f64, f64) -> (f64, f64),
) -> Result<ChiTargets, Infeasible> {
    let delta = p[1] - p[2];
    let disc = delta * delta + 2.0 * p[0] - 1.0;
    if disc < 0.0 {
        return Err(Infeasible {
            case: case.to_string(),
            reason: "square root becomes imaginary".into(),
            discriminant: Some(disc),
        });
    }
    let root = disc.sqrt();
    for branch in [1.0, -1.0] {
        let (m1, m2) = roots(delta, root, branch);
        if in_bounds(m1) && in_bounds(m2) {
            return Ok(clamp_targets(m1, m2));
        }
    }
    Err(Infeasible {
        case: case.to_string(),
        reason: "sign-function averages exceed the bound |<chi>| <= 1".into(),
        discriminant: Some(disc),
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CaseI;
#[derive(Debug, Clone, Copy, Default)]
pub struct CaseII;
#[derive(Debug, Clone, Copy, Default)]
pub struct CaseIII;
#[derive(Debug, Clone, Copy, Default)]
pub struct CaseIV;
#[derive(Debug, Clone, Copy, Default)]
pub struct CaseV;
#[derive(Debug, Clone, Copy, Default)]
pub struct CaseVI;

impl CaseRule for CaseI {
    fn id(&self) -> CaseId {
        CaseId::I
    }
    fn table(&self) -> [Slot; 4] {
        [L1, L2, L3, L1]
    }
    // ⟨χ₁⟩⟨χ₂⟩ = 2p₁ − 1, ⟨χ₁⟩ − ⟨χ₂⟩ = 2(p₂ − p₃)
    fn chi_targets(&self, p: [f64; 3]) -> Result<ChiTargets, Infeasible> {
        quadratic_case(CaseId::I, p, |delta, root, s| {
            let m2 = -delta + s * root;
            (m2 + 2.0 * delta, m2)
        })
    }
}

impl CaseRule for CaseII {
    fn id(&self) -> CaseId {
        CaseId::II
    }
    fn table(&self) -> [Slot; 4] {
        [L2, L1, L1, L3]
    }
    // ⟨χ₁⟩⟨χ₂⟩ = 1 − 2p₁, ⟨χ₁⟩ + ⟨χ₂⟩ = 2(p₂ − p₃)
    fn chi_targets(&self, p: [f64; 3]) -> Result<ChiTargets, Infeasible> {
        quadratic_case(CaseId::II, p, |delta, root, s| {
            let m1 = delta + s * root;
            (m1, 2.0 * delta - m1)
        })
    }
}

impl CaseRule for CaseIII {
    fn id(&self) -> CaseId {
        CaseId::III
    }
    fn table(&self) -> [Slot; 4] {
        [L1, L2, L1, L3]
    }
    fn chi_targets(&self, p: [f64; 3]) -> Result<ChiTargets, Infeasible> {
        Ok(clamp_targets(ratio(p), 2.0 * p[0] - 1.0))
    }
}

impl CaseRule for CaseIV {
    fn id(&self) -> CaseId {
        CaseId::IV
    }
    fn table(&self) -> [Slot; 4] {
        [L1, L1, L2, L3]
    }
    fn chi_targets(&self, p: [f64; 3]) -> Result<ChiTargets, Infeasible> {
        Ok(clamp_targets(2.0 * p[0] - 1.0, ratio(p)))
    }
}

impl CaseRule for CaseV {
    fn id(&self) -> CaseId {
        CaseId::V
    }
    fn table(&self) -> [Slot; 4] {
        [L2, L1, L3, L1]
    }
    fn chi_targets(&self, p: [f64; 3]) -> Result<ChiTargets, Infeasible> {
        Ok(clamp_targets(ratio(p), 1.0 - 2.0 * p[0]))
    }
}

impl CaseRule for CaseVI {
    fn id(&self) -> CaseId {
        CaseId::VI
    }
    fn table(&self) -> [Slot; 4] {
        [L2, L3, L1, L1]
    }
    fn chi_targets(&self, p: [f64; 3]) -> Result<ChiTargets, Infeasible> {
        Ok(clamp_targets(1.0 - 2.0 * p[0], ratio(p)))
    }
}

/// A base case with λ₂ and λ₃ interchanged.
#[derive(Debug)]
pub struct Swapped(pub Box<dyn CaseRule>);

impl CaseRule for Swapped {
    fn id(&self) -> CaseId {
        self.0.id()
    }
    fn is_swapped(&self) -> bool {
        !self.0.is_swapped()
    }
    fn table(&self) -> [Slot; 4] {
        self.0.table().map(Slot::swap23)
    }
    fn chi_targets(&self, p: [f64; 3]) -> Result<ChiTargets, Infeasible> {
        self.0.chi_targets([p[0], p[2], p[1]]).map_err(|mut e| {
            e.case = self.name();
            e
        })
    }
}

pub fn base_rule(id: CaseId) -> Box<dyn CaseRule> {
    match id {
        CaseId::I => Box::new(CaseI),
        CaseId::II => Box::new(CaseII),
        CaseId::III => Box::new(CaseIII),
        CaseId::IV => Box::new(CaseIV),
        CaseId::V => Box::new(CaseV),
        CaseId::VI => Box::new(CaseVI),
    }
}

/// Named case rules, selected at runtime.
#[derive(Debug)]
pub struct CaseRegistry {
    rules: Vec<Box<dyn CaseRule>>,
}

impl Default for CaseRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl CaseRegistry {
    pub fn empty() -> Self {
        Self { rules: Vec::new() }
    }

    /// All twelve assignments: I..VI, then their swapped variants.
    pub fn standard() -> Self {
        let mut reg = Self::empty();
        for id in CaseId::ALL {
            reg.register(base_rule(id));
        }
        for id in CaseId::ALL {
            reg.register(Box::new(Swapped(base_rule(id))));
        }
        reg
    }

    /// Replaces any rule with the same name.
    pub fn register(&mut self, rule: Box<dyn CaseRule>) {
        let name = rule.name();
        self.rules.retain(|r| r.name() != name);
        self.rules.push(rule);
    }

    pub fn get(&self, name: &str) -> Option<&dyn CaseRule> {
        self.rules
            .iter()
            .find(|r| r.name().eq_ignore_ascii_case(name))
            .map(|r| r.as_ref())
    }

    pub fn names(&self) -> Vec<String> {
        self.rules.iter().map(|r| r.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn CaseRule> {
        self.rules.iter().map(|r| r.as_ref())
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Probability of each slot when χ₁, χ₂ are independent with the given
    /// means.
    fn slot_probabilities(rule: &dyn CaseRule, t: ChiTargets) -> [f64; 3] {
        let q1 = (1.0 + t.chi1) / 2.0;
        let q2 = (1.0 + t.chi2) / 2.0;
        let mut p = [0.0; 3];
        for ((c1, c2), slot) in SIGN_PATTERNS.iter().zip(rule.table()) {
            let a = if *c1 > 0.0 { q1 } else { 1.0 - q1 };
            let b = if *c2 > 0.0 { q2 } else { 1.0 - q2 };
            p[slot.index()] += a * b;
        }
        p
    }

    #[test]
    fn every_table_repeats_lambda_one() {
        for rule in CaseRegistry::standard().iter() {
            let t = rule.table();
            let count = |s| t.iter().filter(|&&x| x == s).count();
            assert_eq!((count(L1), count(L2), count(L3)), (2, 1, 1), "{}", rule.name());
        }
    }

    #[test]
    fn registry_has_twelve_distinct_tables() {
        let reg = CaseRegistry::standard();
        assert_eq!(reg.len(), 12);
        let mut tables: Vec<[Slot; 4]> = reg.iter().map(|r| r.table()).collect();
        tables.dedup();
        let unique: std::collections::HashSet<_> = tables.into_iter().collect();
        assert_eq!(unique.len(), 12);
        assert_eq!(reg.get("iii-swapped").unwrap().name(), "III-swapped");
        assert!(reg.get("VII").is_none());
    }

    #[test]
    fn case_one_rejected_example() {
        let err = CaseI.chi_targets([0.0, 0.5, 0.5]).unwrap_err();
        assert_eq!(err.reason, "square root becomes imaginary");
        assert_eq!(err.discriminant, Some(-1.0));
        assert!(CaseII.chi_targets([0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn case_three_examples() {
        let t = CaseIII.chi_targets([1.0, 0.0, 0.0]).unwrap();
        assert_eq!((t.chi1, t.chi2), (0.0, 1.0));
        let t = CaseIII.chi_targets([0.25, 0.5, 0.25]).unwrap();
        assert!((t.chi2 - -0.5).abs() < 1e-15);
        assert!((t.chi1 - 1.0 / 3.0).abs() < 1e-15);
        // the two printed relations, solved for p₂ and p₃
        let q1 = (1.0 + t.chi1) / 2.0;
        assert!((q1 * (1.0 - 0.25) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn targets_reproduce_probabilities() {
        let p = [0.2, 0.5, 0.3];
        for rule in CaseRegistry::standard().iter() {
            if matches!(rule.id(), CaseId::I | CaseId::II) {
                continue;
            }
            let t = rule.chi_targets(p).unwrap();
            let got = slot_probabilities(rule, t);
            for k in 0..3 {
                assert!((got[k] - p[k]).abs() < 1e-14, "{} slot {k}", rule.name());
            }
        }
    }

    #[test]
    fn feasible_quadratic_cases_reproduce_probabilities() {
        // discriminant (0.5)² + 0.8 − 1 = 0.05 ≥ 0
        let p = [0.4, 0.55, 0.05];
        for rule in [&CaseI as &dyn CaseRule, &CaseII] {
            let t = rule.chi_targets(p).unwrap();
            let got = slot_probabilities(rule, t);
            for k in 0..3 {
                assert!((got[k] - p[k]).abs() < 1e-12, "{} slot {k}", rule.name());
            }
        }
    }

    #[test]
    fn swapped_rules_swap_probabilities() {
        let p = [0.1, 0.6, 0.3];
        let rule = Swapped(Box::new(CaseIV));
        let t = rule.chi_targets(p).unwrap();
        let got = slot_probabilities(&rule, t);
        for k in 0..3 {
            assert!((got[k] - p[k]).abs() < 1e-14);
        }
        let err = Swapped(Box::new(CaseI)).chi_targets([0.0, 0.5, 0.5]).unwrap_err();
        assert_eq!(err.case, "I-swapped");
    }
}
