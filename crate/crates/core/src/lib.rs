//! Exact computation of higher Hochschild homology of finite-dimensional
//! graded-commutative algebras over finite simplicial sets, together with
//! bar/cobar gluing, poset homology and spectral sequences.

pub mod algebra;
pub mod chains;
pub mod colim;
pub mod compare;
pub mod corpus;
pub mod error;
pub mod glue;
pub mod linalg;
pub mod loday;
pub mod scalar;
pub mod simplicial;
pub mod sseq;

pub use error::{Error, Result};
pub use scalar::{Field, Scalar};
