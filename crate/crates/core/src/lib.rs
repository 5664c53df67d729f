pub mod bounds;
pub mod cli;
pub mod coeff;
pub mod degiorgi;
pub mod discrete;
pub mod ellipticity;
pub mod error;
pub mod linalg;
pub mod optimize;

pub use error::{Error, Result};
