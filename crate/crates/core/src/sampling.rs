//! Counter-based uniform sampling on `S^{2m−1} ⊂ ℂ^m`.
//!
//! Sample `i` is drawn from its own ChaCha stream (`seed`, stream `i`), so any
//! partition of the index range across workers yields the same points.

use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereSampler {
    m: usize,
    seed: u64,
}

impl SphereSampler {
    pub fn new(m: usize, seed: u64) -> Self {
        assert!(m >= 1, "sphere sampling needs m >= 1");
        Self { m, seed }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The `index`-th sample: a normalized standard Gaussian in `ℝ^{2m}`.
    pub fn point(&self, index: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        loop {
            let v: Vec<Complex64> = (0..self.m)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-100 {
                return v.into_iter().map(|c| c / norm).collect();
            }
        }
    }

    /// Deterministic substream over a range of sample indices.
    pub fn substream(&self, range: Range<u64>) -> impl Iterator<Item = Vec<Complex64>> + '_ {
        range.map(move |i| self.point(i))
    }
}

/// The first `count` samples of `SphereSampler::new(m, seed)`.
pub fn sample_sphere(m: usize, count: u64, seed: u64) -> impl Iterator<Item = Vec<Complex64>> {
    let sampler = SphereSampler::new(m, seed);
    (0..count).map(move |i| sampler.point(i))
}

/// Projects a nonzero vector back onto the unit sphere.
pub fn normalize(z: &[Complex64]) -> Vec<Complex64> {
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    z.iter().map(|c| c / norm).collect()
}
