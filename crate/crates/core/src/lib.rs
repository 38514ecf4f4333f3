//! Explicit CR regular embeddings of odd-dimensional spheres as polynomial
//! graphs `z ↦ (z, f(z))`, and tools to verify CR regularity of such
//! embeddings: exact symbolic identities, pointwise rank criteria, and
//! sampling/minimization certificates over the whole sphere.

pub mod catalog;
pub mod certifier;
pub mod cli;
pub mod error;
pub mod forms;
pub mod gaussian;
pub mod linalg;
pub mod poly;
pub mod sampling;
mod serde_complex;
pub mod verifier;

pub use catalog::{
    ahern_rudin_embedding, eval_embedding, make_graph_embedding, make_negative_control, make_p, make_q,
    q_block_embedding, verify_ar_identity, ControlKind, GraphEmbedding, IdentityCheck,
};
pub use certifier::{
    local_minimize, multistart_minimize, profile_ar, sweep, CertificateReport, MinimizeOptions,
    MultistartOptions, Objective, SweepConfig, Verdict,
};
pub use error::{CrError, Result};
pub use gaussian::GaussianRational;
pub use num_complex::Complex64;
pub use poly::{poly_arith, wirtinger_fd, ArithOp, MultiDegree, WPolynomial};
pub use verifier::{
    cr_dim_at, defining_functions, del_form, equivalence_check, independence_matrix, lemma_two_form_check,
    point_report, EquivalenceOutcome, IndependenceReport, PreparedEmbedding,
};
