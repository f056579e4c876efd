//! Exact wall-and-chamber, flop, stratification and fixed-locus data for the
//! Lagrangian-fibered moduli spaces `M_h(0, h, 0)` and `M_h(0, h, 1 − g)` on a
//! genus `g` K3 surface of Picard rank one.
//!
//! No floating point is used anywhere: lattice classes are big integers and
//! wall slopes are exact rationals.

pub mod error;
pub mod fixed;
pub mod lattice;
pub mod report;
pub mod strata;
pub mod verify;
pub mod walls;

pub use error::{Error, Result};
pub use lattice::{Divisibility, GenusContext, MukaiVector};
