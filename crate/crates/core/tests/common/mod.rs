#![allow(dead_code)]

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rmpbe::linalg::{CMat, CVec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn diag(v: &[f64]) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
}

pub fn cnormal(rng: &mut impl Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vec(n: usize, rng: &mut impl Rng) -> CVec {
    CVec::from_fn(n, |_, _| cnormal(rng))
}

pub fn random_mat(n: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(n, n, |_, _| cnormal(rng))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Smallest singular value from nalgebra's SVD, independent of the library helpers.
pub fn svd_min(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn svd_max(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}
