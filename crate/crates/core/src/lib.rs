//! Classification and Kulkarni limit sets of cyclic subgroups of PSL(n+1, ℍ).
//!
//! The crate is `no_std` (it needs `alloc`). Everything is a pure function of
//! its inputs; randomized verification draws from a caller-supplied seed.
//!
//! Module layout follows the pipeline: scalar arithmetic ([`quat`]), matrices
//! and Jordan analysis ([`qmat`]), points and subspaces of ℙⁿ_ℍ
//! ([`projective`]), the catalog of element classes ([`classify`]), closed-form
//! limit sets ([`limitset`]) and the numerical witnesses ([`dynamics`]).
#![no_std]

extern crate alloc;

pub mod classify;
pub mod dynamics;
mod error;
pub mod limitset;
pub mod projective;
pub mod qmat;
pub mod quat;

pub use error::Error;

// Modules import `num_traits::Float` for float math without std. When std is linked
// anyway (tests, std dependents) the inherent methods win and the import is unused,
// so each such import carries an allow.

/// Zero test threshold shared by every module.
pub const EPSILON: f64 = 1e-10;

pub type Result<T> = core::result::Result<T, Error>;
