//! Exact computational algebra for centres of group algebras of the finite
//! classical groups GL_n, U_n, Sp_2n, O_n^± over F_q.
//!
//! The crate enumerates small classical groups exactly, computes their
//! conjugacy-class structure constants with arbitrary-precision integers,
//! checks the closed-form centralizer and orbit-count formulas against brute
//! force, and interpolates structure constants as exact polynomials in q^n
//! (resp. (-q)^n, q^2n) with degree bounds and holdout verification.

pub mod error;
pub mod qcombinat;
pub mod gf;
pub mod fqpoly;
pub mod matfq;
pub mod types;
pub mod centrformulas;
pub mod forms;
pub mod groups;
pub mod classalg;
pub mod bounding;
pub mod interp;
pub mod cli;

pub use error::{Error, Result};
