//! Bredon homology with coefficients in the complex representation ring, and
//! the equivariant K-groups of the classifying space for proper actions, for
//! groups given by aspherical, Hempel, one-relator and NEC-style presentations.

pub mod bredon;
pub mod cli;
pub mod finite_oracle;
pub mod fox;
pub mod free_group;
pub mod hempel;
pub mod int_linalg;
pub mod presentation;

pub use free_group::{Alphabet, GeneratorId, Letter, Word};
pub use int_linalg::{AbelianGroupInvariants, IntMatrix};
pub use presentation::{Presentation, TorsionMode};
