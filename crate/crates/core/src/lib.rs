//! Exact computation of Jacquet-module generators for spherical principal
//! series of small real semisimple Lie algebras.

pub mod analysis;
pub mod boundary;
pub mod cache;
pub mod cli;
pub mod completion;
pub mod enveloping;
pub mod error;
pub mod linalg;
pub mod lie;
pub mod poly;
pub mod rational;
pub mod spherical;

pub use error::{JacquetError, Result};
pub use rational::Rational;
