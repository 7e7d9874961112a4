//! Matrix product states, block entropies, and the approximation bounds
//! that relate them.

pub mod entropy;
pub mod error;
pub mod linalg;
pub mod mps;
pub mod quench;
pub mod spectrum;
pub mod verify;
pub mod zoo;

pub use entropy::{BoundReport, BoundStatus, RenyiOrder};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use mps::{distances, overlap, CanonicalForm, DistanceReport, MatrixProductState, SiteTensor, TruncationReport};
pub use spectrum::Spectrum;
pub use quench::{IsingSpec, QuenchResult};
