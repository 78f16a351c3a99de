//! Finite-field Frobenius forms: F-pure threshold computation, recognition
//! and normalization of Frobenius forms, sparse normal forms with replayable
//! coordinate-change certificates, sparse-pattern classification, and
//! geometric reports for the associated hypersurfaces.

pub mod classify;
pub mod error;
pub mod ff;
pub mod fpt;
pub mod geom;
pub mod frobform;
pub mod matrix;
pub mod normalize;
pub mod poly;
pub mod uni;

pub use error::{Budget, Error, Result};
pub use ff::{Embedding, Fe, FieldCtx};
pub use matrix::Mat;
pub use poly::{Monomial, MultiPoly};
