//! Semiflows of `ℕ₀ᵏ` on metric spaces and the chaos-related properties of
//! their dynamics: transitivity, density of periodic points, minimality,
//! sensitivity, eventual sensitivity and uniform equicontinuity.

pub mod corpus;
pub mod error;
pub mod monoid;
pub mod probe;
pub mod sft_decide;
pub mod systems;
pub mod theorems;

pub use error::{Error, Result};
