//! The explicit embeddings: the Ahern–Rudin quartic `P`, its block sums `Q`,
//! graph embeddings built from them, and negative controls that fail the
//! independence criterion everywhere.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{CrError, Result};
use crate::gaussian::GaussianRational;
use crate::poly::WPolynomial;

/// Absolute tolerance on `| ‖z‖ − 1 |` for points fed to pointwise checks.
pub const SPHERE_TOL: f64 = 1e-12;

/// `P(z₁, z₂) = z₂ z̄₁ z̄₂² + i z₁ z̄₁² z̄₂`.
pub fn make_p() -> WPolynomial {
    let a = WPolynomial::monomial(vec![0, 1], vec![1, 2], GaussianRational::one()).unwrap();
    let b = WPolynomial::monomial(vec![1, 0], vec![2, 1], GaussianRational::i()).unwrap();
    &a + &b
}

/// `Q(z₁, …, z_{2n}) = Σ_k P(z_{2k−1}, z_{2k})`.
pub fn make_q(n: usize) -> Result<WPolynomial> {
    if n == 0 {
        return Err(CrError::InvalidArgument("block count n must be at least 1".into()));
    }
    let p = make_p();
    let mut q = WPolynomial::zero(2 * n);
    for k in 0..n {
        q = &q + &p.relabel(2 * n, &[2 * k, 2 * k + 1])?;
    }
    Ok(q)
}

/// `F(z) = (z, f₁(z), …, f_q(z))` restricted to `S^{2m−1} ⊂ ℂ^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddingJson", into = "EmbeddingJson")]
pub struct GraphEmbedding {
    m: usize,
    label: String,
    f: Vec<WPolynomial>,
}

impl GraphEmbedding {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.f.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn functions(&self) -> &[WPolynomial] {
        &self.f
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same graph functions, ignoring the label.
    pub fn same_graph(&self, other: &GraphEmbedding) -> bool {
        self.m == other.m && self.f == other.f
    }

    /// Real dimension of the source sphere, `2m − 1`.
    pub fn sphere_dim(&self) -> usize {
        2 * self.m - 1
    }

    /// Complex-tangent dimension of a CR regular graph, `m − q − 1`.
    pub fn expected_cr_dim(&self) -> usize {
        self.m - self.q() - 1
    }
}

pub fn make_graph_embedding(
    m: usize,
    fs: Vec<WPolynomial>,
    label: impl Into<String>,
) -> Result<GraphEmbedding> {
    if m < 2 {
        return Err(CrError::InvalidEmbedding(format!("m = {m}; need m >= 2")));
    }
    let q = fs.len();
    if q < 1 || q > m - 1 {
        return Err(CrError::InvalidEmbedding(format!(
            "q = {q} graph functions; need 1 <= q <= m - 1 = {}",
            m - 1
        )));
    }
    if let Some((j, f)) = fs.iter().enumerate().find(|(_, f)| f.m() != m) {
        return Err(CrError::InvalidEmbedding(format!(
            "graph function {j} has {} variables, expected {m}",
            f.m()
        )));
    }
    Ok(GraphEmbedding { m, label: label.into(), f: fs })
}

/// The totally real embedding `S³ → ℂ³`, `z ↦ (z, P(z))`.
pub fn ahern_rudin_embedding() -> GraphEmbedding {
    make_graph_embedding(2, vec![make_p()], "ahern-rudin").unwrap()
}

/// `S^{4n−1} → ℂ^{2n+1}`, `z ↦ (z, Q(z))`.
pub fn q_block_embedding(n: usize) -> Result<GraphEmbedding> {
    make_graph_embedding(2 * n, vec![make_q(n)?], format!("q-block-n{n}"))
}

pub fn check_on_sphere(z: &[Complex64]) -> Result<()> {
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let distance = (norm - 1.0).abs();
    // NaN fails the comparison and is rejected too.
    if distance.is_nan() || distance > SPHERE_TOL {
        return Err(CrError::OffSphere { distance, tolerance: SPHERE_TOL });
    }
    Ok(())
}

pub fn eval_embedding(e: &GraphEmbedding, z: &[Complex64]) -> Result<Vec<Complex64>> {
    if z.len() != e.m {
        return Err(CrError::DimensionMismatch { expected: e.m, found: z.len() });
    }
    check_on_sphere(z)?;
    let mut out = z.to_vec();
    for f in &e.f {
        out.push(f.eval(z)?);
    }
    Ok(out)
}

/// Both sides of `z₂ ∂P/∂z̄₁ − z₁ ∂P/∂z̄₂ = |z₂|²(|z₂|² − 2|z₁|²) − i|z₁|²(|z₁|² − 2|z₂|²)`,
/// with `|z_k|²` expanded as `z_k z̄_k`.
pub fn ar_identity_sides() -> (WPolynomial, WPolynomial) {
    let p = make_p();
    let z1 = WPolynomial::z(2, 0).unwrap();
    let z2 = WPolynomial::z(2, 1).unwrap();
    let lhs = &(&z2 * &p.d_zbar(0).unwrap()) - &(&z1 * &p.d_zbar(1).unwrap());

    let r1 = WPolynomial::abs_sq(2, 0).unwrap();
    let r2 = WPolynomial::abs_sq(2, 1).unwrap();
    let two = GaussianRational::from_integers(2, 0);
    let first = &r2 * &(&r2 - &r1.scale(&two));
    let second = (&r1 * &(&r1 - &r2.scale(&two))).scale(&GaussianRational::i());
    let rhs = &first - &second;
    (lhs, rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    pub lhs: WPolynomial,
    pub rhs: WPolynomial,
    pub residual: WPolynomial,
}

/// Compares two sides exactly; the residual is `lhs − rhs`.
pub fn identity_check(lhs: WPolynomial, rhs: WPolynomial) -> Result<IdentityCheck> {
    let residual = lhs.try_sub(&rhs)?;
    Ok(IdentityCheck { holds: residual.is_zero(), lhs, rhs, residual })
}

pub fn verify_ar_identity() -> IdentityCheck {
    let (lhs, rhs) = ar_identity_sides();
    identity_check(lhs, rhs).expect("both sides live in two variables")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlKind {
    /// `f₁ = z₁²`, so `∂f/∂z̄ ≡ 0`.
    Holomorphic,
    /// `f₁ = 0`.
    Zero,
    /// `f₁ = Σ z_k z̄_k`, so `∂f/∂z̄ = z`.
    Radial,
}

impl ControlKind {
    pub const ALL: [ControlKind; 3] = [ControlKind::Holomorphic, ControlKind::Zero, ControlKind::Radial];

    pub fn name(self) -> &'static str {
        match self {
            ControlKind::Holomorphic => "holomorphic",
            ControlKind::Zero => "zero",
            ControlKind::Radial => "radial",
        }
    }
}

impl fmt::Display for ControlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControlKind {
    type Err = CrError;
    fn from_str(s: &str) -> Result<Self> {
        ControlKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CrError::InvalidArgument(format!("unknown negative control kind {s:?}")))
    }
}

pub fn make_negative_control(kind: ControlKind, m: usize) -> Result<GraphEmbedding> {
    if m < 2 {
        return Err(CrError::InvalidArgument(format!("negative controls need m >= 2, got {m}")));
    }
    let f = match kind {
        ControlKind::Holomorphic => {
            let z1 = WPolynomial::z(m, 0)?;
            &z1 * &z1
        }
        ControlKind::Zero => WPolynomial::zero(m),
        ControlKind::Radial => (0..m).try_fold(WPolynomial::zero(m), |acc, k| {
            Ok::<_, CrError>(&acc + &WPolynomial::abs_sq(m, k)?)
        })?,
    };
    make_graph_embedding(m, vec![f], format!("{}-control-m{m}", kind.name()))
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    m: usize,
    q: usize,
    label: String,
    f: Vec<WPolynomial>,
}

impl TryFrom<EmbeddingJson> for GraphEmbedding {
    type Error = CrError;
    fn try_from(raw: EmbeddingJson) -> Result<Self> {
        if raw.q != raw.f.len() {
            return Err(CrError::InvalidEmbedding(format!(
                "q = {} but {} graph functions given",
                raw.q,
                raw.f.len()
            )));
        }
        make_graph_embedding(raw.m, raw.f, raw.label)
    }
}

impl From<GraphEmbedding> for EmbeddingJson {
    fn from(e: GraphEmbedding) -> Self {
        EmbeddingJson { m: e.m, q: e.f.len(), label: e.label, f: e.f }
    }
}
