//! End-to-end acceptance criteria. Each test prints one `criterion N:` line
//! straight to stdout (bypassing capture) and then asserts.

mod common;

use std::io::Write;

use hvlab::distributions::{seeded_rng, MonteCarlo, PowerLawDistribution, SignFunction};
use hvlab::ks::{self, EpsilonKsModel, KsModel};
use hvlab::oracle::{self, build_basis, BasisKind, QuantumState};
use hvlab::quadrature;
use hvlab::spin_half::{self, BellOriginal, EpsilonRule, SpinHalfRule};
use hvlab::spin_one::{
    self, base_rule, CaseI, CaseII, CaseId, CaseRegistry, RepeatedEigenvalue, SpectralTriple, SIGN_PATTERNS,
};
use hvlab::Error;
use rand::Rng;

use common::{random_pure, random_simplex, random_traceless, random_vector};

const SAMPLES: u64 = 1_000_000;
const SIGMA: f64 = 4.0;
const SEED: u64 = 42;

/// Collects named sub-checks for one criterion.
struct Criterion {
    id: u32,
    failures: Vec<String>,
    checks: usize,
}

impl Criterion {
    fn new(id: u32) -> Self {
        Self {
            id,
            failures: Vec::new(),
            checks: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) {
        let line = if self.failures.is_empty() {
            format!("criterion {}: PASS ({} checks)\n", self.id, self.checks)
        } else {
            let mut s = format!(
                "criterion {}: FAIL ({} of {} checks failed)\n",
                self.id,
                self.failures.len(),
                self.checks
            );
            for f in self.failures.iter().take(5) {
                s.push_str(&format!("    {f}\n"));
            }
            s
        };
        let out = std::io::stdout();
        let mut lock = out.lock();
        let _ = lock.write_all(line.as_bytes());
        let _ = lock.flush();
        assert!(self.failures.is_empty(), "{line}");
    }
}

fn mc(stream: u64) -> MonteCarlo {
    MonteCarlo::new(SAMPLES, SEED.wrapping_add(stream))
}

#[test]
fn criterion_1_sign_average_law() {
    let mut c = Criterion::new(1);
    let mut stream = 0;
    for n in 0..=6 {
        let dist = PowerLawDistribution::with_index(n);
        let w = dist.half_width();
        for k in -10..=10 {
            let xi = k as f64 / 10.0;
            let chi = SignFunction::new(xi, dist, false).unwrap();
            let analytic = chi.mean_analytic();
            c.check(analytic == xi.abs(), || format!("n={n} xi={xi}: analytic {analytic}"));
            let q = quadrature::integrate_steps(|x| dist.density(x), -w, w, &[&|x| chi.eval(x)], 200_000);
            c.check((q - xi.abs()).abs() < 1e-6, || format!("n={n} xi={xi}: quadrature {q}"));
            let est = mc(stream).mean(&dist, |x| chi.eval(x));
            stream += 1;
            c.check(est.agrees_with(xi.abs(), SIGMA), || {
                format!("n={n} xi={xi}: MC {} ± {}", est.mean, est.stderr)
            });
        }
    }
    c.finish();
}

#[test]
fn criterion_2_bell_spin_half() {
    let mut c = Criterion::new(2);
    let mut rng = seeded_rng(SEED, 2);
    let pauli = build_basis(BasisKind::Pauli);
    for _ in 0..200 {
        let beta: [f64; 3] = random_vector(&mut rng);
        let state = random_pure(2, &mut rng);
        let h = oracle::linear_observable(&beta, &pauli).unwrap();
        let q_mean = oracle::expectation(&h, &state).unwrap();
        let q_var = oracle::variance(&h, &state).unwrap();
        let eps = spin_half::epsilon_of(&state).unwrap();
        let hv = spin_half::hv_statistics(&beta, &eps).unwrap();
        c.check((hv.mean - q_mean).abs() < 1e-10, || format!("mean {} vs {q_mean}", hv.mean));
        c.check((hv.variance - q_var).abs() < 1e-10, || {
            format!("variance {} vs {q_var}", hv.variance)
        });
    }
    let up = QuantumState::from_real(&[1.0, 0.0]).unwrap();
    for k in 0..10 {
        let beta: [f64; 3] = random_vector(&mut rng);
        let h = oracle::linear_observable(&beta, &pauli).unwrap();
        let q = oracle::expectation(&h, &up).unwrap();
        c.check((q - beta[2]).abs() < 1e-12, || format!("oracle <beta.sigma> {q} vs {}", beta[2]));
        // exact integral of the piecewise-constant outcome over flat λ
        let rule = BellOriginal;
        let f = |l: f64| rule.outcome(&beta, l).unwrap();
        let integral = quadrature::integrate_steps(|_| 1.0, -0.5, 0.5, &[&f], 10_000);
        c.check((integral - beta[2]).abs() < 1e-10, || format!("integral {integral} vs {}", beta[2]));
        let analytic = rule.mean_analytic(&beta).unwrap();
        c.check((analytic - beta[2]).abs() < 1e-10, || format!("analytic {analytic} vs {}", beta[2]));
        if k < 5 {
            let (m, _) = spin_half::mc_statistics(&rule, &beta, &mc(200 + k)).unwrap();
            c.check(m.agrees_with(beta[2], SIGMA), || format!("MC {} ± {} vs {}", m.mean, m.stderr, beta[2]));
        }
    }
    c.finish();
}

#[test]
fn criterion_3_homogeneity() {
    let mut c = Criterion::new(3);
    let mut rng = seeded_rng(SEED, 3);
    for k in 0..20 {
        let alpha = common::normal(&mut rng);
        let beta: [f64; 3] = random_vector(&mut rng);
        let state = random_pure(2, &mut rng);
        let eps = spin_half::epsilon_of(&state).unwrap();
        let n = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
        let split = spin_half::homogeneity_split(alpha, &beta, &eps).unwrap();
        // subensemble averages by integrating the outcome over each λ interval
        let rule = EpsilonRule::new(eps).unwrap();
        let t = split.threshold;
        let f = |l: f64| alpha + rule.outcome(&beta, l).unwrap();
        let lower = quadrature::integrate_steps(|_| 1.0, -0.5, t, &[&f], 10_000) / (t + 0.5);
        let upper = quadrature::integrate_steps(|_| 1.0, t, 0.5, &[&f], 10_000) / (0.5 - t);
        let be: f64 = beta.iter().zip(&eps).map(|(b, e)| b * e).sum();
        let (plus_q, minus_q) = if be >= 0.0 { (upper, lower) } else { (lower, upper) };
        for (got, want, label) in [
            (split.mean_plus, alpha + n, "analytic plus"),
            (split.mean_minus, alpha - n, "analytic minus"),
            (plus_q, alpha + n, "integrated plus"),
            (minus_q, alpha - n, "integrated minus"),
            (split.recombined(), alpha + be, "recombined"),
            (split.whole, alpha + be, "whole"),
        ] {
            c.check((got - want).abs() < 1e-10, || format!("{label}: {got} vs {want}"));
        }
        if k < 5 {
            let (p, m) = spin_half::mc_homogeneity(alpha, &beta, &eps, &mc(300 + k)).unwrap();
            c.check(p.agrees_with(alpha + n, SIGMA), || format!("MC plus {} vs {}", p.mean, alpha + n));
            c.check(m.agrees_with(alpha - n, SIGMA), || format!("MC minus {} vs {}", m.mean, alpha - n));
        }
    }
    c.finish();
}

#[test]
fn criterion_4_spin_one_constructor() {
    let mut c = Criterion::new(4);
    let reg = CaseRegistry::standard();
    c.check(reg.len() == 12, || format!("{} registered cases", reg.len()));
    let mut rng = seeded_rng(SEED, 4);
    let dist = PowerLawDistribution::flat();
    for _ in 0..10 {
        let lambdas = random_traceless(&mut rng);
        for rule in reg.iter() {
            let want = spin_one::case_outcomes(rule, lambdas);
            let k = spin_one::solve_coefficients(rule, lambdas);
            for ((c1, c2), w) in SIGN_PATTERNS.iter().zip(want) {
                let raw = k.eval(*c1, *c2);
                c.check((raw - w).abs() < 1e-12, || format!("{} pattern ({c1},{c2})", rule.name()));
            }
            // evaluate() on a feasible triple for the same table
            let triple = SpectralTriple::new(lambdas, [0.4, 0.35, 0.25], true).unwrap();
            if let Ok(f) = spin_one::build_formula(rule, &triple, dist) {
                for ((c1, c2), w) in SIGN_PATTERNS.iter().zip(want) {
                    c.check(f.evaluate_signs(*c1, *c2) == w, || format!("{} evaluate", rule.name()));
                }
            }
        }
    }
    for p in ks::simplex_grid(0.05).unwrap() {
        for rule in reg.iter().filter(|r| r.id() >= CaseId::III) {
            match rule.chi_targets(p) {
                Ok(t) => c.check(t.chi1.abs() <= 1.0 && t.chi2.abs() <= 1.0, || {
                    format!("{} at {p:?}: {t:?}", rule.name())
                }),
                Err(e) => c.check(false, || format!("{} at {p:?}: {e}", rule.name())),
            }
        }
    }
    for rule in [&CaseI as &dyn spin_one::CaseRule, &CaseII] {
        let r = rule.chi_targets([0.0, 0.5, 0.5]);
        c.check(
            matches!(&r, Err(e) if e.reason == "square root becomes imaginary"),
            || format!("{} at (0,1/2,1/2): {r:?}", rule.name()),
        );
    }
    c.finish();
}

#[test]
fn criterion_5_quadratic_consistency() {
    let mut c = Criterion::new(5);
    let mut rng = seeded_rng(SEED, 5);
    let dist = PowerLawDistribution::flat();
    for _ in 0..50 {
        let triple = SpectralTriple::new(random_traceless(&mut rng), random_simplex(&mut rng), true).unwrap();
        let mut stats = Vec::new();
        for id in [CaseId::III, CaseId::IV, CaseId::V, CaseId::VI] {
            let f = spin_one::build_formula(base_rule(id).as_ref(), &triple, dist).unwrap();
            let m = spin_one::hv_statistics(&f);
            c.check((m.second_moment - triple.second_moment()).abs() < 1e-12, || {
                format!("case {id}: {} vs {}", m.second_moment, triple.second_moment())
            });
            c.check((m.mean - triple.mean()).abs() < 1e-12, || format!("case {id} mean"));
            stats.push((f, m));
        }
        for (from, to, flips) in [(0, 2, (false, true)), (1, 3, (true, false))] {
            let mapped = stats[from].0.relabeled(flips.0, flips.1);
            let target = &stats[to].0;
            let same_coeffs = mapped
                .coefficients()
                .to_array()
                .iter()
                .zip(target.coefficients().to_array())
                .all(|(a, b)| (a - b).abs() < 1e-12);
            c.check(same_coeffs && mapped.targets() == target.targets(), || {
                format!("mapping {from}->{to}")
            });
            let (a, b) = (stats[from].1, stats[to].1);
            c.check(
                (a.mean - b.mean).abs() < 1e-12 && (a.variance - b.variance).abs() < 1e-12,
                || format!("statistics {from} vs {to}: {a:?} {b:?}"),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_6_spin_one_oracle_equivalence() {
    let mut c = Criterion::new(6);
    let mut rng = seeded_rng(SEED, 6);
    let dist = PowerLawDistribution::flat();
    let rule = base_rule(CaseId::III);
    let run = |coeffs: &[f64], kind: BasisKind, state: &QuantumState, c: &mut Criterion, mc_stream: Option<u64>| {
        let out = spin_one::beable_from_operator(coeffs, kind, state, rule.as_ref(), RepeatedEigenvalue::Middle, dist)
            .unwrap();
        let h = &out.operator;
        let q_mean = oracle::expectation(h, state).unwrap();
        let q_var = oracle::variance(h, state).unwrap();
        let hv = spin_one::hv_statistics(&out.formula);
        c.check((hv.mean - q_mean).abs() < 1e-10, || format!("{kind} mean {} vs {q_mean}", hv.mean));
        c.check((hv.variance - q_var).abs() < 1e-10, || format!("{kind} variance {} vs {q_var}", hv.variance));
        if let Some(s) = mc_stream {
            let (m, _) = spin_one::mc_statistics(&out.formula, &mc(s));
            c.check(m.agrees_with(q_mean, SIGMA), || format!("{kind} MC {} vs {q_mean}", m.mean));
        }
        let ks = KsModel::from_state(state).unwrap();
        let b = ks::ks_average(&ks);
        c.check((b - 2.0).abs() < 1e-10, || format!("KS average {b}"));
    };
    for k in 0..100 {
        let coeffs: [f64; 8] = random_vector(&mut rng);
        let state = random_pure(3, &mut rng);
        run(&coeffs, BasisKind::GellMann, &state, &mut c, (k < 3).then_some(600 + k));
    }
    for k in 0..100 {
        let beta: [f64; 3] = random_vector(&mut rng);
        let state = random_pure(3, &mut rng);
        run(&beta, BasisKind::AngularMomentum, &state, &mut c, (k < 3).then_some(700 + k));
    }
    c.finish();
}

#[test]
fn criterion_7_ks_dispersion() {
    let mut c = Criterion::new(7);
    let lo = KsModel::new([0.0, 0.0, 1.0]).unwrap();
    let hi = KsModel::new([1.0 / 3.0; 3]).unwrap();
    c.check(ks::ks_second_moment(&lo) == 4.0, || format!("<B^2> at (0,0,1) = {}", ks::ks_second_moment(&lo)));
    let six = ks::ks_second_moment(&hi);
    c.check((six - 6.0).abs() < 1e-14, || format!("<B^2> at (1/3,1/3,1/3) = {six}"));

    let scan = ks::dispersion_scan(0.01).unwrap();
    let outside = scan.iter().filter(|s| !(0.0..=2.0).contains(&s.dispersion)).count();
    c.check(outside == 0, || format!("{outside} grid points outside [0, 2]"));
    let summary = ks::summarize_scan(&scan).unwrap();
    c.check(summary.min.dispersion.abs() < 1e-4, || {
        format!("grid minimum {} at {:?}", summary.min.dispersion, summary.min.probabilities)
    });
    c.check((summary.max.dispersion - 2.0).abs() < 1e-4, || {
        format!(
            "grid maximum {} at {:?} is not within 1e-4 of 2",
            summary.max.dispersion, summary.max.probabilities
        )
    });

    let mut rng = seeded_rng(SEED, 7);
    for k in 0..10 {
        let m = KsModel::new(random_simplex(&mut rng)).unwrap();
        let (mean, second) = ks::mc_shared(&m, &mc(800 + k));
        let want = ks::ks_second_moment(&m);
        c.check(second.agrees_with(want, SIGMA), || {
            format!("{:?}: MC {} ± {} vs {want}", m.probabilities(), second.mean, second.stderr)
        });
        c.check(mean.agrees_with(2.0, SIGMA), || format!("MC mean {}", mean.mean));
    }
    c.finish();
}

#[test]
fn criterion_8_epsilon_model() {
    let mut c = Criterion::new(8);
    let mut rng = seeded_rng(SEED, 8);
    let mut worst_printed: f64 = 0.0;
    let mut worst_correct: f64 = 0.0;
    for _ in 0..50 {
        let eps = 10f64.powf(rng.gen_range(-4.0..0.0));
        let model = EpsilonKsModel::new(eps, random_simplex(&mut rng)).unwrap();
        let outcomes = model.outcomes();
        let mean: f64 = outcomes.iter().map(|(o, p)| o * p).sum();
        let var: f64 = outcomes.iter().map(|(o, p)| p * (o - mean).powi(2)).sum();
        let s = ks::epsilon_statistics(&model);
        c.check((s.mean - mean).abs() < 1e-12, || format!("mean {} vs {mean}", s.mean));
        let printed = ks::printed_epsilon_variance(&model);
        worst_printed = worst_printed.max((printed - var).abs());
        worst_correct = worst_correct.max((s.variance - var).abs());
    }
    c.check(worst_printed < 1e-12, || {
        format!(
            "printed variance eps^2(p+ + p- - (p+ + p-)^2) deviates from the direct three-outcome \
             variance by up to {worst_printed:.3e}; eps^2(p+ + p- - (p+ - p-)^2) deviates by {worst_correct:.3e}"
        )
    });
    c.check(worst_correct < 1e-12, || format!("corrected variance deviates by {worst_correct:.3e}"));

    let sweep = ks::log_sweep(1e-4, 1e-1, 31);
    let slope = ks::variance_slope(&sweep, [0.25, 0.5, 0.25]).unwrap();
    c.check((slope - 2.0).abs() <= 0.01, || format!("log-log slope {slope}"));

    let model = EpsilonKsModel::new(0.05, [0.3, 0.45, 0.25]).unwrap();
    let (m, s2) = ks::mc_epsilon(&model, &mc(900)).unwrap();
    let st = ks::epsilon_statistics(&model);
    c.check(m.agrees_with(st.mean, SIGMA), || format!("MC mean {} vs {}", m.mean, st.mean));
    c.check(s2.agrees_with(st.second_moment, SIGMA), || {
        format!("MC second moment {} vs {}", s2.mean, st.second_moment)
    });
    c.finish();
}

#[test]
fn criterion_9_contradiction() {
    let mut c = Criterion::new(9);
    let squares = oracle::sigma_squares();
    let b = squares[0].add(&squares[1]).unwrap().add(&squares[2]).unwrap();
    let mut rng = seeded_rng(SEED, 9);
    for _ in 0..20 {
        let state = random_pure(3, &mut rng);
        let v = oracle::variance(&b, &state).unwrap();
        c.check(v.abs() < 1e-12, || format!("oracle variance {v}"));
    }
    let hv = ks::ks_dispersion(&KsModel::new([1.0 / 3.0; 3]).unwrap());
    c.check((hv - 2.0).abs() < 1e-12, || format!("HV dispersion {hv}"));
    c.finish();
}

#[test]
fn infeasible_is_an_error_variant() {
    let t = SpectralTriple::new([0.0, 1.0, -1.0], [0.0, 0.5, 0.5], true).unwrap();
    let e = spin_one::build_formula(&CaseI, &t, PowerLawDistribution::flat()).unwrap_err();
    assert!(matches!(e, Error::Infeasible(_)));
}
