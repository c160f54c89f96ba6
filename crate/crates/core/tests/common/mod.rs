#![allow(dead_code)]

use hvlab::oracle::QuantumState;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_vector<const D: usize, R: Rng>(rng: &mut R) -> [f64; D] {
    std::array::from_fn(|_| normal(rng))
}

pub fn random_pure<R: Rng>(dim: usize, rng: &mut R) -> QuantumState {
    let amps = (0..dim)
        .map(|_| Complex64::new(normal(rng), normal(rng)))
        .collect();
    QuantumState::pure_normalized(amps).expect("nonzero amplitudes")
}

/// Uniform point on the probability simplex.
pub fn random_simplex<R: Rng>(rng: &mut R) -> [f64; 3] {
    let e: [f64; 3] = std::array::from_fn(|_| -rng.gen::<f64>().max(1e-300).ln());
    let s: f64 = e.iter().sum();
    e.map(|x| x / s)
}

/// Random traceless triple of eigenvalues.
pub fn random_traceless<R: Rng>(rng: &mut R) -> [f64; 3] {
    let a = normal(rng);
    let b = normal(rng);
    [a, b, -a - b]
}
