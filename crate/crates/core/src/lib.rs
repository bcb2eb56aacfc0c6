//! Exact Hecke traces on `S_k(Gamma_0(N))` and the measure, moment, and discrepancy
//! machinery for the joint vertical Sato-Tate distribution of normalized eigenvalues.

pub mod binary_quadratic;
pub mod chebyshev_moments;
pub mod eichler_selberg;
pub mod equidistribution;
pub mod error;
pub mod exact_arith;
pub mod level_one_oracle;
pub mod sato_tate_measure;

pub use error::{Error, Result};
