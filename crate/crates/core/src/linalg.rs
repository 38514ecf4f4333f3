//! Small dense helpers on top of nalgebra: singular values and the relative
//! rank rule used by every pointwise check.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Default relative rank threshold: `σ_i` counts iff `σ_i > tol · σ_max`.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Singular values of a row-major complex matrix, largest first.
pub fn complex_singular_values(rows: &[Vec<Complex64>]) -> Vec<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_fn(r, c, |i, j| rows[i][j]);
    sorted_desc(m.singular_values().iter().copied().collect())
}

/// Singular values of a column-major real matrix given as a list of columns.
pub fn real_singular_values_of_columns(columns: &[Vec<f64>]) -> Vec<f64> {
    let c = columns.len();
    let r = columns.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_fn(r, c, |i, j| columns[j][i]);
    sorted_desc(m.singular_values().iter().copied().collect())
}

pub fn numeric_rank(singular_values: &[f64], tol: f64) -> usize {
    let Some(&max) = singular_values.first() else { return 0 };
    if max <= 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > tol * max).count()
}

/// `det(M)` for a square complex matrix.
pub fn complex_determinant(rows: &[Vec<Complex64>]) -> Complex64 {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// `det(M M*)`, the product of the squared singular values.
pub fn gram_determinant(rows: &[Vec<Complex64>]) -> f64 {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    let m = DMatrix::from_fn(r, c, |i, j| rows[i][j]);
    (&m * m.adjoint()).determinant().re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_rule() {
        assert_eq!(numeric_rank(&[1.0, 1e-9], 1e-8), 1);
        assert_eq!(numeric_rank(&[1.0, 2e-8], 1e-8), 2);
        assert_eq!(numeric_rank(&[0.0, 0.0], 1e-8), 0);
        assert_eq!(numeric_rank(&[], 1e-8), 0);
    }

    #[test]
    fn diagonal_singular_values() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let sv = complex_singular_values(&[vec![one * 3.0, z], vec![z, i]]);
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 1.0).abs() < 1e-14);
        assert!((gram_determinant(&[vec![one * 3.0, z], vec![z, i]]) - 9.0).abs() < 1e-12);
    }
}
