//! Finite p-group computations: polycyclic presentations, the p-quotient algorithm,
//! Beauville structures, groups of maximal class and the Nottingham group.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod gf;
pub mod group;
pub mod pcp;

pub use error::{Error, Result};
pub mod par;
pub mod pquotient;
pub mod concrete;
pub mod table;
pub mod beauville;
pub mod maxclass;
pub mod nottingham;
pub mod series;
pub mod checks;
