pub mod error;
pub mod haar;
pub mod schatten;
pub mod special_fn;
pub mod quadrature;
pub mod gelfand;
pub mod symplectic;
pub mod coset_geometry;
pub mod decay_certificate;

pub use error::{Error, Result};
