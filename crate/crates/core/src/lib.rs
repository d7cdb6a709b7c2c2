//! Classical pre-processing for Laurent-polynomial quantum signal processing.
//!
//! The pipeline takes a target pair `(A, B)` of real-on-circle Laurent polynomials, completes
//! it with `(C, D)` so that `A^2 + B^2 + C^2 + D^2 = 1` via a Fejér factorisation, peels the
//! resulting SU(2)-valued polynomial into a projector sequence and measures how well the
//! sequence reproduces `A + iB`.

pub mod chebyshev;
pub mod completion;
pub mod decompose;
pub mod error;
pub mod fejer;
pub mod laurent;
pub mod linalg;
pub mod mat2;
pub mod pipeline;
pub mod special;
pub mod targets;
pub mod verify;

pub use error::{Error, Result};
pub use laurent::LaurentPolynomial;
