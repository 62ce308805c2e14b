pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod measures;
pub mod model;
pub mod par;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
