//! Exact-arithmetic engine for ADE configurations of roots in the rank-10
//! even unimodular hyperbolic lattice, and for deciding which configurations
//! are realized by RDP-Enriques surfaces.
//!
//! The crate is organized along the pipeline:
//!
//! - [`matrix`], [`exact`]: integer/rational linear algebra,
//! - [`lattice`]: Gram matrices, duals, saturation, complements,
//! - [`roots`]: root enumeration, Dynkin diagrams, Weyl-group words,
//! - [`chambers`]: the rank-10 lattice, chamber walks, sigma orbits,
//! - [`discform`]: finite quadratic forms, overlattices, genus existence,
//! - [`embed`]: configuration classes inside the rank-10 lattice,
//! - [`stab`]: orbit-stabilizer machinery and configuration stabilizers,
//! - [`realize`]: the double-cover lattices and the strong classification.

pub mod cache;
pub mod chambers;
pub mod discform;
pub mod genus;
pub mod embed;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod pipeline;
pub mod realize;
pub mod roots;
pub mod stabilizers;
pub mod orbits;

pub use error::{Error, Result};
