//! Exact supercharacter theory of the unitriangular groups `U_n(F_q)`.
//!
//! Superclasses are two-sided orbits `1 + G a G`; supercharacters are orbit
//! sums of characters of the additive group of `u_n(F_q)`. Both are labelled
//! by coloured set partitions, and supercharacter values are computed two
//! ways: by summing over dual orbits, and by the closed nesting formula.
//! Field towers `GF(p^{c_1}) ⊂ GF(p^{c_2}) ⊂ …` give the finite levels of the
//! unitriangular group over the algebraic closure of `GF(p)`.

pub mod aftower;
pub mod caps;
pub mod cyclo;
pub mod dualspace;
pub mod error;
pub mod exactfield;
pub mod nilalg;
pub mod sctheory;
pub mod setpartitions;
pub mod superclasses;

pub use caps::Caps;
pub use cyclo::Cyclotomic;
pub use error::{Error, Result};
pub use exactfield::{FieldElement, FieldEmbedding, FiniteField};
pub use nilalg::{GroupElement, NilMatrix};
pub use setpartitions::{ColouredSetPartition, SetPartition};
