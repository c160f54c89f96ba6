//! Piecewise composite trapezoid rule.
//!
//! Used as the numerical cross-check on closed-form sign-function averages.
//! Jumps of piecewise-constant factors are located by scanning and bisection,
//! never from the closed-form thresholds.

/// Step function factor in an integrand.
pub type Step<'a> = &'a dyn Fn(f64) -> f64;

/// `∫ₐᵇ f` with the interval split at `breakpoints` and `points` trapezoid
/// nodes shared out in proportion to piece length.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breakpoints: &[f64], points: usize) -> f64 {
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| {
            let share = ((points as f64) * (w[1] - w[0]) / (b - a)).ceil() as usize;
            trapezoid(&f, w[0], w[1], share.max(2))
        })
        .sum()
}

fn trapezoid<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let intervals = nodes - 1;
    let h = (b - a) / intervals as f64;
    let interior: f64 = (1..intervals).map(|k| f(a + k as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + interior)
}

/// Points in `(a, b)` where `step` changes value, to bisection precision.
pub fn find_jumps(step: Step<'_>, a: f64, b: f64, scan: usize) -> Vec<f64> {
    let h = (b - a) / scan as f64;
    // stay strictly inside so open-interval supports are respected
    let x = |k: usize| a + (k as f64 + 0.5) * h;
    let mut jumps = Vec::new();
    let mut prev = step(x(0));
    for k in 1..scan {
        let cur = step(x(k));
        if cur != prev {
            let (mut lo, mut hi) = (x(k - 1), x(k));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if step(mid) == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            jumps.push(hi);
        }
        prev = cur;
    }
    jumps
}

/// `∫ₐᵇ density(x)·Πᵢ stepᵢ(x) dx`. Each piece between jumps is integrated
/// with the step product frozen at the piece midpoint.
pub fn integrate_steps<F: Fn(f64) -> f64>(density: F, a: f64, b: f64, steps: &[Step<'_>], points: usize) -> f64 {
    let mut cuts = vec![a, b];
    for s in steps {
        cuts.extend(find_jumps(*s, a, b, points));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let factor: f64 = steps.iter().map(|s| s(mid)).product();
            if factor == 0.0 {
                return 0.0;
            }
            let share = ((points as f64) * (w[1] - w[0]) / (b - a)).ceil() as usize;
            factor * trapezoid(&density, w[0], w[1], share.max(2))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial() {
        let v = integrate(|x| x * x, 0.0, 1.0, &[], 100_000);
        assert!((v - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn step_is_exact_on_flat_density() {
        let step = |x: f64| if x >= -0.123 { 1.0 } else { -1.0 };
        let v = integrate_steps(|_| 1.0, -0.5, 0.5, &[&step], 1000);
        assert!((v - (0.623 - 0.377)).abs() < 1e-13);
    }

    #[test]
    fn locates_jump() {
        let step = |x: f64| if x >= 0.3 { 1.0 } else { 0.0 };
        let j = find_jumps(&step, 0.0, 1.0, 17);
        assert_eq!(j.len(), 1);
        assert!((j[0] - 0.3).abs() < 1e-15);
    }
}
