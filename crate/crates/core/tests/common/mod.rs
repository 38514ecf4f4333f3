#![allow(dead_code)]

use crsphere::{Complex64, GaussianRational, MultiDegree, WPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn unit_point(rng: &mut impl Rng, m: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..m)
        .map(|_| c(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng)))
        .collect();
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Random polynomial of total degree ≤ `max_degree` with up to `max_terms`
/// terms and coefficients in {±1, ±i}.
pub fn random_unit_poly(rng: &mut impl Rng, m: usize, max_degree: u32, max_terms: usize) -> WPolynomial {
    let units = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    let count = rng.random_range(1..=max_terms);
    let terms = (0..count).map(|_| {
        let (re, im) = units[rng.random_range(0..4)];
        (random_degree(rng, m, max_degree), GaussianRational::from_integers(re, im))
    });
    WPolynomial::from_terms(m, terms.collect::<Vec<_>>()).unwrap()
}

pub fn random_degree(rng: &mut impl Rng, m: usize, max_degree: u32) -> MultiDegree {
    let target = rng.random_range(0..=max_degree);
    let mut alpha = vec![0u32; m];
    let mut beta = vec![0u32; m];
    for _ in 0..target {
        let j = rng.random_range(0..m);
        if rng.random_bool(0.5) {
            alpha[j] += 1;
        } else {
            beta[j] += 1;
        }
    }
    MultiDegree::new(alpha, beta).unwrap()
}

/// Relative-or-absolute closeness used for the finite-difference checks.
pub fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * (1.0 + b.norm())
}

/// Singular values of a 2×2 complex matrix from `σ² = (F ± √(F² − 4|det|²)) / 2`.
pub fn singular_values_2x2(m: [[Complex64; 2]; 2]) -> (f64, f64) {
    let fro: f64 = m.iter().flatten().map(|x| x.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm_sqr();
    let disc = (fro * fro - 4.0 * det).max(0.0).sqrt();
    let hi = ((fro + disc) / 2.0).sqrt();
    // small root via the product to avoid cancellation
    let lo = if hi > 0.0 { det.sqrt() / hi } else { 0.0 };
    (lo, hi)
}

/// Independence matrix of the Ahern–Rudin embedding from the hand-derived
/// formulas `∂P/∂z̄₁ = z₂z̄₂² + 2i z₁z̄₁z̄₂`, `∂P/∂z̄₂ = 2z₂z̄₁z̄₂ + i z₁z̄₁²`.
pub fn ar_matrix_by_hand(z1: Complex64, z2: Complex64) -> [[Complex64; 2]; 2] {
    let i = c(0.0, 1.0);
    let (b1, b2) = (z1.conj(), z2.conj());
    [[z1, z2], [z2 * b2 * b2 + 2.0 * i * z1 * b1 * b2, 2.0 * z2 * b1 * b2 + i * z1 * b1 * b1]]
}

/// σ_min of the Ahern–Rudin matrix on S³ as a function of `t = |z₁|²`.
pub fn ar_sigma_min_of_t(t: f64) -> f64 {
    let m = ar_matrix_by_hand(c(t.sqrt(), 0.0), c((1.0 - t).max(0.0).sqrt(), 0.0));
    singular_values_2x2(m).0
}

/// Golden-section refinement of a dense scan; the global minimum of σ_min
/// over S³ for the Ahern–Rudin embedding.
pub fn ar_sigma_min_global() -> (f64, f64) {
    let n = 100_000;
    let (k, _) = (0..=n)
        .map(|k| (k, ar_sigma_min_of_t(k as f64 / n as f64)))
        .fold((0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
    let (mut a, mut b) = ((k.max(1) - 1) as f64 / n as f64, ((k + 1).min(n)) as f64 / n as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if ar_sigma_min_of_t(x1) < ar_sigma_min_of_t(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let t = 0.5 * (a + b);
    (t, ar_sigma_min_of_t(t))
}
