//! Power-law hidden-variable densities, sign functions and Monte Carlo.
//!
//! The density family is `ρₙ(λ) = Nₙ(2n+1)λ²ⁿ` on `|λ| < Sₙ^(1/(2n+1))` with
//! `Sₙ = 1/(2Nₙ)`. The sign function
//!
//! ```text
//! χₙ(λ, ξ) = sign(λ + |ξ/2Nₙ|^(1/(2n+1)))
//! ```
//!
//! averages to `|ξ|` for every `n` and `Nₙ`, which is what lets outcome
//! formulas be tuned to any target probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{sign, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawDistribution {
    n: u32,
    norm: f64,
}

impl Default for PowerLawDistribution {
    fn default() -> Self {
        Self::flat()
    }
}

impl PowerLawDistribution {
    pub fn new(n: u32, norm: f64) -> Result<Self> {
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "normalisation must be positive, got {norm}"
            )));
        }
        Ok(Self { n, norm })
    }

    /// `Nₙ = 1`.
    pub fn with_index(n: u32) -> Self {
        Self { n, norm: 1.0 }
    }

    /// Uniform on `(−½, ½)`.
    pub fn flat() -> Self {
        Self { n: 0, norm: 1.0 }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `Sₙ = 1/(2Nₙ)`.
    pub fn scale(&self) -> f64 {
        0.5 / self.norm
    }

    fn exponent(&self) -> f64 {
        (2 * self.n + 1) as f64
    }

    /// `x^(1/(2n+1))` for `x ≥ 0`.
    fn root(&self, x: f64) -> f64 {
        if self.n == 0 {
            x
        } else {
            x.powf(1.0 / self.exponent())
        }
    }

    /// Edge of the support, `Sₙ^(1/(2n+1))`.
    pub fn half_width(&self) -> f64 {
        self.root(self.scale())
    }

    /// Zero outside the closed support `|λ| ≤ Sₙ^(1/(2n+1))`.
    pub fn density(&self, lambda: f64) -> f64 {
        if lambda.abs() > self.half_width() {
            return 0.0;
        }
        self.norm * self.exponent() * lambda.powi(2 * self.n as i32)
    }

    /// `Nₙ(λ^(2n+1) + Sₙ)`, clamped to `[0, 1]`.
    pub fn cdf(&self, lambda: f64) -> f64 {
        let w = self.half_width();
        if lambda <= -w {
            0.0
        } else if lambda >= w {
            1.0
        } else {
            (self.norm * (lambda.powi(2 * self.n as i32 + 1) + self.scale())).clamp(0.0, 1.0)
        }
    }

    /// `sign(2u−1)·(|2u−1|·Sₙ)^(1/(2n+1))`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let t = 2.0 * u - 1.0;
        sign(t) * self.root(t.abs() * self.scale())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse_cdf(rng.gen::<f64>())
    }
}

/// `χ(λ) = sign(λ + |ξ/2Nₙ|^(1/(2n+1)))`, optionally times `sign(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignFunction {
    xi: f64,
    dist: PowerLawDistribution,
    with_prefactor: bool,
}

impl SignFunction {
    pub fn new(xi: f64, dist: PowerLawDistribution, with_prefactor: bool) -> Result<Self> {
        if !(xi.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("|xi| must be <= 1, got {xi}")));
        }
        Ok(Self {
            xi,
            dist,
            with_prefactor,
        })
    }

    /// The sign function whose mean is exactly `target` (prefactor form).
    /// Targets within 1e-12 outside `[−1, 1]` are clamped.
    pub fn with_mean(target: f64, dist: PowerLawDistribution) -> Result<Self> {
        let xi = if target.abs() <= 1.0 + 1e-12 {
            target.clamp(-1.0, 1.0)
        } else {
            target
        };
        Self::new(xi, dist, true)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn distribution(&self) -> &PowerLawDistribution {
        &self.dist
    }

    pub fn has_prefactor(&self) -> bool {
        self.with_prefactor
    }

    /// `|ξ/2Nₙ|^(1/(2n+1))`; `χ` flips at `λ = −threshold`.
    pub fn threshold(&self) -> f64 {
        self.dist.root((self.xi / (2.0 * self.dist.norm)).abs())
    }

    fn prefactor(&self) -> f64 {
        if self.with_prefactor {
            sign(self.xi)
        } else {
            1.0
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        sign(lambda + self.threshold()) * self.prefactor()
    }

    /// `|ξ|`, or `ξ` with the prefactor; independent of `n` and `Nₙ`.
    pub fn mean_analytic(&self) -> f64 {
        self.xi.abs() * self.prefactor()
    }
}

/// `⟨χ₁χ₂⟩ = s₁s₂(1 − ||ξ₁| − |ξ₂||)` for two sign functions of the same
/// variable, where `sᵢ` is `sign(ξᵢ)` if that function carries the prefactor
/// and 1 otherwise.
pub fn chi_product_mean_analytic(a: &SignFunction, b: &SignFunction) -> Result<f64> {
    if a.dist != b.dist {
        return Err(Error::InvalidParameter(
            "sign functions must share one distribution".into(),
        ));
    }
    Ok(a.prefactor() * b.prefactor() * (1.0 - (a.xi.abs() - b.xi.abs()).abs()))
}

/// ChaCha8 stream `stream` of the generator seeded with `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√samples`.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean − target| ≤ sigmas·stderr` (plus 1e-12 for exact zero-variance
    /// estimates).
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr + 1e-12
    }

    pub fn deviation_in_sigmas(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Welford {
            n,
            mean: self.mean + delta * (other.n as f64 / n as f64),
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64),
        }
    }

    fn estimate(self, seed: u64) -> McEstimate {
        let (mean, stderr) = match self.n {
            0 => (f64::NAN, f64::NAN),
            1 => (self.mean, 0.0),
            n => (self.mean, (self.m2.max(0.0) / (n - 1) as f64).sqrt() / (n as f64).sqrt()),
        };
        McEstimate {
            mean,
            stderr,
            samples: self.n,
            seed,
        }
    }
}

/// Samples are drawn in fixed chunks; each chunk uses its own ChaCha stream
/// and per-chunk statistics are merged in chunk order, so results do not
/// depend on how many threads run them.
const CHUNK: u64 = 1 << 15;

/// Seeded, chunk-parallel Monte Carlo over independent draws from one
/// hidden-variable distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub samples: u64,
    pub seed: u64,
    workers: Option<usize>,
}

impl MonteCarlo {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples: samples.max(1),
            seed,
            workers: None,
        }
    }

    /// Runs on a dedicated pool of `workers` threads.
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers.max(1));
        self
    }

    /// `E[f(λ)]` for one hidden variable.
    pub fn mean<F>(&self, dist: &PowerLawDistribution, f: F) -> McEstimate
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let [est] = self.run::<1, 1, _>(dist, |[x]| [Some(f(x))]);
        est
    }

    /// `E[f(λ₁, …, λ_D)]` for `D` independent hidden variables.
    pub fn mean_nd<const D: usize, F>(&self, dist: &PowerLawDistribution, f: F) -> McEstimate
    where
        F: Fn([f64; D]) -> f64 + Sync,
    {
        let [est] = self.run::<D, 1, _>(dist, |x| [Some(f(x))]);
        est
    }

    /// Several estimates from one shared sample stream.
    pub fn means<const D: usize, const K: usize, F>(
        &self,
        dist: &PowerLawDistribution,
        f: F,
    ) -> [McEstimate; K]
    where
        F: Fn([f64; D]) -> [f64; K] + Sync,
    {
        self.run::<D, K, _>(dist, |x| f(x).map(Some))
    }

    /// Mean over the draws where `f` returns `Some`; `samples` in the result
    /// counts accepted draws only.
    pub fn conditional_mean<const D: usize, F>(&self, dist: &PowerLawDistribution, f: F) -> McEstimate
    where
        F: Fn([f64; D]) -> Option<f64> + Sync,
    {
        let [est] = self.run::<D, 1, _>(dist, |x| [f(x)]);
        est
    }

    fn run<const D: usize, const K: usize, F>(
        &self,
        dist: &PowerLawDistribution,
        f: F,
    ) -> [McEstimate; K]
    where
        F: Fn([f64; D]) -> [Option<f64>; K] + Sync,
    {
        let chunks = self.samples.div_ceil(CHUNK);
        let work = || {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let len = CHUNK.min(self.samples - c * CHUNK);
                    let mut rng = seeded_rng(self.seed, c);
                    let mut acc = [Welford::default(); K];
                    for _ in 0..len {
                        let draws: [f64; D] = std::array::from_fn(|_| dist.sample(&mut rng));
                        for (a, v) in acc.iter_mut().zip(f(draws)) {
                            if let Some(v) = v {
                                a.push(v);
                            }
                        }
                    }
                    acc
                })
                .collect::<Vec<_>>()
        };
        let parts = match self.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("thread pool")
                .install(work),
            None => work(),
        };
        let total = parts
            .into_iter()
            .fold([Welford::default(); K], |mut tot, part| {
                for (t, p) in tot.iter_mut().zip(part) {
                    *t = t.merge(p);
                }
                tot
            });
        total.map(|w| w.estimate(self.seed))
    }
}
