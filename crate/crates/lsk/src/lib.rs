//! Dense randomized sketching with fast transforms, sketched least
//! squares (plain and degree-2 Kronecker), and a Monte-Carlo harness that
//! verifies subspace-embedding, coordinate-wise-embedding, and per-
//! coordinate forward-error behavior of the sketches.

pub mod error;
pub mod io;
pub mod linalg;
pub mod regress;
pub mod rng;
pub mod sketch;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector};
pub use rng::SeedSpec;
pub use sketch::{build_sketch, recommend_m, Sketch, SketchConfig, SketchKind};
