//! Finite-space workbench for maximal linked systems, functionals and regular extension operators.
//!
//! Everything here works over a finite discrete ground set, where closed
//! sets are simply subsets. The crate covers:
//!
//! - [`setkit`]: bit-encoded subsets and set families,
//! - [`superext`]: maximal linked systems and the superextension `λX`,
//! - [`functionals`]: monotone, homogeneous, weakly additive functionals,
//! - [`subbase`]: binary and normal subbases, hulls and convexity,
//! - [`embed`]: finite topologies, regular operators and usco maps,
//! - [`inclusion`]: inclusion hyperspaces `GX`,
//! - [`verify`]: the named verification suites and their reports.
//!
//! All arithmetic on function values is exact ([`Rational`]).

pub mod clique;
pub mod embed;
mod error;
pub mod functionals;
pub mod inclusion;
pub mod io;
pub mod rational;
pub mod setkit;
pub mod subbase;
pub mod superext;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
pub use setkit::{GroundSet, PointMap, SetFamily, Subset};
pub use superext::{MaxLinkedSystem, Superextension};
