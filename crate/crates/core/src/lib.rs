//! Exact constructions around exotic rays and exotic roofs on the punctured
//! torus: Sturmian cutting sequences, admissibility, leaf approximations,
//! transverse-measure growth and the bent support-plane radius recursion.

// `!(x > 0.0)` is how NaN gets rejected along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flat;
pub mod hyperbolic;
pub mod io;
pub mod numeric;
pub mod roof;
pub mod words;

pub use error::{Error, Result};
