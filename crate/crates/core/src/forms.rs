//! Pointwise `(1,0)`-forms and their wedge products.

use std::ops::Sub;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CrError, Result};
use crate::linalg::{complex_singular_values, numeric_rank};

/// `Σ_j c_j dz_j` at a point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneForm {
    #[serde(with = "crate::serde_complex::vec")]
    pub coeffs: Vec<Complex64>,
}

impl OneForm {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); dim] }
    }

    /// `dz_j` in dimension `dim`.
    pub fn basis(dim: usize, j: usize) -> Self {
        let mut f = Self::zero(dim);
        f.coeffs[j] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// `α ∧ β` with coefficient `α_i β_j − α_j β_i` on `dz_i ∧ dz_j`.
    pub fn wedge(&self, other: &OneForm) -> Result<TwoForm> {
        if self.dim() != other.dim() {
            return Err(CrError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let n = self.dim();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    coeffs[i * n + j] = self.coeffs[i] * other.coeffs[j] - self.coeffs[j] * other.coeffs[i];
                }
            }
        }
        Ok(TwoForm { dim: n, coeffs })
    }
}

/// `Σ_{i,j} c_{ij} dz_i ∧ dz_j` stored as a full antisymmetric matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoForm {
    pub dim: usize,
    #[serde(with = "crate::serde_complex::vec")]
    coeffs: Vec<Complex64>,
}

impl TwoForm {
    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs[i * self.dim + j]
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { dim: self.dim, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| (self.get(i, j) + self.get(j, i)).norm() <= tol))
    }
}

impl Sub for &TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: &TwoForm) -> TwoForm {
        assert_eq!(self.dim, rhs.dim, "two-form dimensions differ");
        TwoForm {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Whether `forms[0] ∧ … ∧ forms[k−1] ≠ 0`, decided as full row rank of the
/// coefficient matrix under the relative singular-value rule.
pub fn wedge_nonzero(forms: &[OneForm], tol: f64) -> Result<bool> {
    let Some(first) = forms.first() else { return Ok(true) };
    let dim = first.dim();
    if let Some(bad) = forms.iter().find(|f| f.dim() != dim) {
        return Err(CrError::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    if forms.len() > dim {
        return Ok(false);
    }
    let rows: Vec<Vec<Complex64>> = forms.iter().map(|f| f.coeffs.clone()).collect();
    Ok(numeric_rank(&complex_singular_values(&rows), tol) == forms.len())
}
