//! Two-stage image classification with a sparse-representation teacher and a
//! collaborative-representation student.
//!
//! The teacher codes a query over every training sample with an L1 penalty
//! (SRC), scores each class by its reconstruction residual, and picks the
//! `M` closest classes as candidates. The student codes the query over the
//! candidate samples only with a ridge penalty (CRC). When the two disagree,
//! the student wins only if its top score strictly exceeds the teacher's
//! gate value.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below name the concrete instantiations.
//!
//! ```
//! use tsstss::data::{generate_synthetic, SyntheticSpec};
//! use tsstss::{CandidateCount, Pipeline64, PipelineConfig};
//!
//! let spec = SyntheticSpec {
//!     classes: 4,
//!     subspace_dim: 2,
//!     ambient_dim: 20,
//!     train_per_class: 10,
//!     test_per_class: 3,
//!     noise_sigma: 0.01,
//!     seed: 7,
//! };
//! let (train, test) = generate_synthetic(&spec)?;
//! let config = PipelineConfig {
//!     num_candidates: CandidateCount::Fixed(2),
//!     ..PipelineConfig::default()
//! };
//! let pipeline = Pipeline64::new(train, config)?;
//! let decision = pipeline.classify(test.sample(0))?;
//! assert!(decision.teacher.candidates.contains(&decision.label));
//! println!("{} via {}", decision.label, decision.provenance.as_str());
//! # Ok::<(), tsstss::Error>(())
//! ```

// `!(x > 0)` style checks are how NaN gets rejected along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod linsolve;
pub mod represent;
pub mod scalar;
pub mod tsstss;

pub use error::{Error, Result};
pub use linsolve::{
    kkt_violation, ridge_projector, solve_lasso, solve_ridge, CoefficientVector, DenseMatrix,
    RidgeProjector, SolverConfig,
};
pub use represent::{
    class_residuals, classify_crc, classify_crc_with, classify_knn, classify_src,
    confidence_scores, ClassGroup, ClassId, Dataset, LabeledVerdict, ResidualVector, ScoreVector,
};
pub use scalar::Scalar;
pub use tsstss::{
    classify, decide, select_candidates, student_stage, teacher_stage, CandidateCount, Decision,
    Pipeline, PipelineConfig, Provenance, StudentVerdict, TeacherVerdict,
};

pub type DenseMatrix64 = DenseMatrix<f64>;
pub type DenseMatrix32 = DenseMatrix<f32>;
pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type PipelineConfig64 = PipelineConfig<f64>;
pub type PipelineConfig32 = PipelineConfig<f32>;
pub type Pipeline64 = Pipeline<f64>;
pub type Pipeline32 = Pipeline<f32>;
pub type Decision64 = Decision<f64>;
pub type Decision32 = Decision<f32>;
