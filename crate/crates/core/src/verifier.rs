//! Pointwise CR-regularity checks for graph embeddings of spheres.
//!
//! Three routes decide the same question at a point `z ∈ S^{2m−1}`:
//!
//! * the independence matrix with rows `z` and `∂f_j/∂z̄(z)` has full rank;
//! * the `(1,0)`-differentials of the real defining functions `ρ_1..ρ_{2q+1}`
//!   are linearly independent (their wedge is nonzero);
//! * the complex tangent `T ∩ JT` of the embedded sphere has the minimal
//!   dimension `m − q − 1`, computed from real tangent vectors.
//!
//! The third route does not touch the independence matrix or the defining
//! functions and serves as the oracle for the other two.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{check_on_sphere, GraphEmbedding};
use crate::error::{CrError, Result};
use crate::forms::{wedge_nonzero, OneForm, TwoForm};
use crate::gaussian::GaussianRational;
use crate::linalg::{complex_singular_values, numeric_rank, real_singular_values_of_columns};
use crate::poly::{CompiledPoly, WPolynomial};

/// Points whose `σ_min` lies within this factor of the rank threshold are
/// flagged as marginal.
pub const MARGINAL_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    #[serde(with = "crate::serde_complex::vec")]
    pub z: Vec<Complex64>,
    pub singular_values: Vec<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rank: usize,
    pub cr_regular: bool,
    pub marginal: bool,
}

impl IndependenceReport {
    fn from_singular_values(z: Vec<Complex64>, singular_values: Vec<f64>, rows: usize, tol: f64) -> Self {
        let sigma_max = singular_values.first().copied().unwrap_or(0.0);
        // Fewer singular values than rows means rank is bounded by m.
        let sigma_min = if singular_values.len() < rows { 0.0 } else { *singular_values.last().unwrap() };
        let rank = numeric_rank(&singular_values, tol);
        let threshold = tol * sigma_max;
        let marginal = sigma_min > threshold / MARGINAL_FACTOR && sigma_min <= threshold * MARGINAL_FACTOR;
        Self { z, singular_values, sigma_min, sigma_max, rank, cr_regular: rank == rows, marginal }
    }
}

/// Derivative tables of an embedding compiled once for repeated pointwise use.
#[derive(Clone, Debug)]
pub struct PreparedEmbedding {
    embedding: GraphEmbedding,
    f: Vec<CompiledPoly>,
    dz: Vec<Vec<CompiledPoly>>,
    dzbar: Vec<Vec<CompiledPoly>>,
    rhos: Vec<WPolynomial>,
    rho_dz: Vec<Vec<CompiledPoly>>,
}

impl PreparedEmbedding {
    pub fn new(embedding: &GraphEmbedding) -> Self {
        let compile_all = |ps: Vec<WPolynomial>| ps.iter().map(WPolynomial::compile).collect::<Vec<_>>();
        let fs = embedding.functions();
        let rhos = defining_functions(embedding);
        Self {
            f: fs.iter().map(WPolynomial::compile).collect(),
            dz: fs.iter().map(|f| compile_all(f.z_gradient())).collect(),
            dzbar: fs.iter().map(|f| compile_all(f.zbar_gradient())).collect(),
            rho_dz: rhos.iter().map(|r| compile_all(r.z_gradient())).collect(),
            rhos,
            embedding: embedding.clone(),
        }
    }

    pub fn embedding(&self) -> &GraphEmbedding {
        &self.embedding
    }

    pub fn m(&self) -> usize {
        self.embedding.m()
    }

    pub fn q(&self) -> usize {
        self.embedding.q()
    }

    pub fn defining_functions(&self) -> &[WPolynomial] {
        &self.rhos
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.m() {
            return Err(CrError::DimensionMismatch { expected: self.m(), found: z.len() });
        }
        check_on_sphere(z)
    }

    /// Rows `z, ∂f_1/∂z̄(z), …, ∂f_q/∂z̄(z)`; no sphere check.
    pub fn matrix_at(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        let mut rows = Vec::with_capacity(self.q() + 1);
        rows.push(z.to_vec());
        for grad in &self.dzbar {
            rows.push(grad.iter().map(|d| d.eval_unchecked(z)).collect());
        }
        rows
    }

    pub fn independence_matrix(&self, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        self.check_point(z)?;
        Ok(self.matrix_at(z))
    }

    pub fn point_report(&self, z: &[Complex64], tol: f64) -> Result<IndependenceReport> {
        check_tol(tol)?;
        let rows = self.independence_matrix(z)?;
        Ok(IndependenceReport::from_singular_values(
            z.to_vec(),
            complex_singular_values(&rows),
            rows.len(),
            tol,
        ))
    }

    /// Point on the embedded sphere, `(z, f(z))`.
    pub fn graph_point(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut w = z.to_vec();
        w.extend(self.f.iter().map(|f| f.eval_unchecked(z)));
        w
    }

    /// `∂ρ_1, …, ∂ρ_{2q+1}` at the graph point over `z`.
    pub fn defining_forms_at(&self, z: &[Complex64]) -> Result<Vec<OneForm>> {
        self.check_point(z)?;
        let w = self.graph_point(z);
        Ok(self
            .rho_dz
            .iter()
            .map(|grad| OneForm::new(grad.iter().map(|d| d.eval_unchecked(&w)).collect()))
            .collect())
    }

    /// `dF_z(w) = (w, Df(w))` with `Df_j(w) = Σ_k ∂f_j/∂z_k w_k + ∂f_j/∂z̄_k w̄_k`.
    fn push_forward(&self, z: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
        let mut out = w.to_vec();
        for (dz, dzbar) in self.dz.iter().zip(&self.dzbar) {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..w.len() {
                acc += dz[k].eval_unchecked(z) * w[k] + dzbar[k].eval_unchecked(z) * w[k].conj();
            }
            out.push(acc);
        }
        out
    }

    /// `dim_ℂ(T ∩ JT)` for `T = dF(T_z S^{2m−1})`, in real coordinates.
    pub fn cr_dim_at(&self, z: &[Complex64], tol: f64) -> Result<usize> {
        check_tol(tol)?;
        self.check_point(z)?;
        let basis = sphere_tangent_basis(z);
        let mut t_cols = Vec::with_capacity(basis.len());
        let mut jt_cols = Vec::with_capacity(basis.len());
        for w in &basis {
            let v = self.push_forward(z, w);
            t_cols.push(to_real(&v));
            let jv: Vec<Complex64> = v.iter().map(|c| c * Complex64::i()).collect();
            jt_cols.push(to_real(&jv));
        }
        let rank_t = numeric_rank(&real_singular_values_of_columns(&t_cols), tol);
        let rank_jt = numeric_rank(&real_singular_values_of_columns(&jt_cols), tol);
        let mut both = t_cols;
        both.extend(jt_cols);
        let sv = real_singular_values_of_columns(&both);
        let rank_sum = numeric_rank(&sv, tol);
        let overlap = (rank_t + rank_jt).checked_sub(rank_sum).ok_or_else(|| {
            CrError::RankTolerance(format!("rank of T + JT ({rank_sum}) exceeds rank T + rank JT"))
        })?;
        if overlap % 2 != 0 || rank_t != basis.len() {
            let threshold = tol * sv.first().copied().unwrap_or(0.0);
            let below = sv.iter().copied().filter(|&s| s <= threshold).fold(0.0, f64::max);
            let above = sv.iter().copied().filter(|&s| s > threshold).fold(f64::INFINITY, f64::min);
            return Err(CrError::RankTolerance(format!(
                "rank T = {rank_t}, rank JT = {rank_jt}, rank [T|JT] = {rank_sum}; \
                 singular-value gap {above:e} / {below:e} around threshold {threshold:e}"
            )));
        }
        Ok(overlap / 2)
    }

    pub fn equivalence_check(&self, z: &[Complex64], tol: f64) -> Result<EquivalenceOutcome> {
        let report = self.point_report(z, tol)?;
        let forms = self.defining_forms_at(z)?;
        let wedge = wedge_nonzero(&forms, tol)?;
        let cr_dim = self.cr_dim_at(z, tol)?;
        Ok(EquivalenceOutcome {
            z: z.to_vec(),
            wedge_nonzero: wedge,
            matrix_full_rank: report.cr_regular,
            cr_dim,
            expected_cr_dim: self.embedding.expected_cr_dim(),
            sigma_min: report.sigma_min,
        })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CrError::InvalidArgument(format!("rank tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// `[Re z_1, Im z_1, Re z_2, …]`.
fn to_real(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn from_real(v: &[f64]) -> Vec<Complex64> {
    v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

/// Orthonormal real basis of `{w : Re⟨z, w⟩ = 0}`, the tangent space of the
/// sphere at a unit `z`, by Gram–Schmidt on the coordinate axes least aligned
/// with the radial direction.
pub fn sphere_tangent_basis(z: &[Complex64]) -> Vec<Vec<Complex64>> {
    let radial = to_real(z);
    let n = radial.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radial[a].abs().total_cmp(&radial[b].abs()).then(a.cmp(&b)));

    let norm = radial.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut accepted: Vec<Vec<f64>> = vec![radial.iter().map(|x| x / norm).collect()];
    for &axis in order.iter().take(n - 1) {
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &accepted {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        accepted.push(v.into_iter().map(|x| x / len).collect());
    }
    accepted.iter().skip(1).map(|v| from_real(v)).collect()
}

/// Outcome of the three-way criterion comparison at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceOutcome {
    #[serde(with = "crate::serde_complex::vec")]
    pub z: Vec<Complex64>,
    pub wedge_nonzero: bool,
    pub matrix_full_rank: bool,
    pub cr_dim: usize,
    pub expected_cr_dim: usize,
    pub sigma_min: f64,
}

impl EquivalenceOutcome {
    pub fn tangent_minimal(&self) -> bool {
        self.cr_dim == self.expected_cr_dim
    }

    /// All three criteria pass or all three fail.
    pub fn agree(&self) -> bool {
        self.wedge_nonzero == self.matrix_full_rank && self.matrix_full_rank == self.tangent_minimal()
    }

    /// The common verdict when the criteria agree.
    pub fn verdict(&self) -> Option<bool> {
        self.agree().then_some(self.matrix_full_rank)
    }
}

pub fn independence_matrix(e: &GraphEmbedding, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    PreparedEmbedding::new(e).independence_matrix(z)
}

pub fn point_report(e: &GraphEmbedding, z: &[Complex64], tol: f64) -> Result<IndependenceReport> {
    PreparedEmbedding::new(e).point_report(z, tol)
}

pub fn cr_dim_at(e: &GraphEmbedding, z: &[Complex64], tol: f64) -> Result<usize> {
    PreparedEmbedding::new(e).cr_dim_at(z, tol)
}

pub fn equivalence_check(e: &GraphEmbedding, z: &[Complex64], tol: f64) -> Result<EquivalenceOutcome> {
    PreparedEmbedding::new(e).equivalence_check(z, tol)
}

/// `ρ_1 = −1 + Σ z_k z̄_k` and `z_{m+j} − f_j = ρ_{2j} + i ρ_{2j+1}`, all as
/// real polynomials in `m + q` variables.
pub fn defining_functions(e: &GraphEmbedding) -> Vec<WPolynomial> {
    let m = e.m();
    let total = m + e.q();
    let mut rho1 = WPolynomial::constant(total, GaussianRational::from_integers(-1, 0));
    for k in 0..m {
        rho1 = &rho1 + &WPolynomial::abs_sq(total, k).expect("k < m");
    }
    let mut out = vec![rho1];
    for (j, f) in e.functions().iter().enumerate() {
        let g = &WPolynomial::z(total, m + j).expect("m + j < m + q") - &f.extend_vars(total).expect("m <= m + q");
        out.push(g.real_part());
        out.push(g.imag_part());
    }
    out
}

/// `∂ρ = Σ ∂ρ/∂z_j dz_j` at `w`, for real `ρ`.
pub fn del_form(rho: &WPolynomial, w: &[Complex64]) -> Result<OneForm> {
    if !rho.is_real() {
        return Err(CrError::NotReal);
    }
    if w.len() != rho.m() {
        return Err(CrError::DimensionMismatch { expected: rho.m(), found: w.len() });
    }
    let coeffs = (0..rho.m()).map(|j| rho.d_z(j)?.eval(w)).collect::<Result<_>>()?;
    Ok(OneForm::new(coeffs))
}

/// Both sides of `∂u ∧ ∂v = (i/2) ∂f ∧ conj(∂̄f)` with `u + iv = f`.
pub fn lemma_two_forms(f: &WPolynomial, w: &[Complex64]) -> Result<(TwoForm, TwoForm)> {
    if w.len() != f.m() {
        return Err(CrError::DimensionMismatch { expected: f.m(), found: w.len() });
    }
    let du = del_form(&f.real_part(), w)?;
    let dv = del_form(&f.imag_part(), w)?;
    let lhs = du.wedge(&dv)?;

    let df = OneForm::new((0..f.m()).map(|j| f.d_z(j)?.eval(w)).collect::<Result<_>>()?);
    let conj_dbar = OneForm::new(
        (0..f.m()).map(|j| Ok(f.d_zbar(j)?.eval(w)?.conj())).collect::<Result<_>>()?,
    );
    let rhs = df.wedge(&conj_dbar)?.scale(Complex64::new(0.0, 0.5));
    Ok((lhs, rhs))
}

/// Largest entry modulus of the difference between the two sides of the
/// two-form identity.
pub fn lemma_two_form_check(f: &WPolynomial, w: &[Complex64]) -> Result<f64> {
    let (lhs, rhs) = lemma_two_forms(f, w)?;
    Ok((&lhs - &rhs).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::ahern_rudin_embedding;

    #[test]
    fn tangent_basis_is_orthonormal_and_tangent() {
        let s = 0.5f64.sqrt();
        let z = vec![Complex64::new(s * 0.6, s * 0.8), Complex64::new(0.0, -s)];
        let basis = sphere_tangent_basis(&z);
        assert_eq!(basis.len(), 3);
        for (a, u) in basis.iter().enumerate() {
            let radial: f64 = u.iter().zip(&z).map(|(w, z)| (z.conj() * w).re).sum();
            assert!(radial.abs() < 1e-14);
            for (b, v) in basis.iter().enumerate() {
                let d: f64 = u.iter().zip(v).map(|(x, y)| (x.conj() * y).re).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn non_positive_tolerance_is_rejected() {
        let e = ahern_rudin_embedding();
        let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(point_report(&e, &z, 0.0).is_err());
        assert!(cr_dim_at(&e, &z, -1.0).is_err());
    }

    #[test]
    fn del_form_rejects_complex_input() {
        let p = WPolynomial::z(2, 0).unwrap();
        assert_eq!(del_form(&p, &[Complex64::new(1.0, 0.0); 2]), Err(CrError::NotReal));
    }
}
