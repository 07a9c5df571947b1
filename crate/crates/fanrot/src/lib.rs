//! Exact rotation numbers for piecewise linear automorphisms of Z².
//!
//! Elements of Thompson's group T are modelled here as orientation-preserving
//! piecewise linear homeomorphisms of the plane that restrict to bijections of
//! the integer lattice: a complete fan of rational cones plus one SL(2, Z)
//! matrix per sector. On top of that model the crate provides, all in exact
//! arbitrary-precision arithmetic:
//!
//! - fan machinery: validation, regularization, simple splits and merges,
//!   split sequences, common refinements ([`lattice`], [`refine`]);
//! - the group structure: composition, inversion, canonical forms, finite
//!   rotation elements of any rational rotation number ([`plmap`]);
//! - the approximate cone map F♯, orbit tracing, decomposition into simple
//!   maps, and the refinement that makes every ray's orbit cyclic ([`sharp`]);
//! - exact rational rotation numbers, finite-order detection, and a
//!   floating-point Birkhoff estimator used as a cross-check ([`rotation`]);
//! - the exact bridge to the classical presentation of T by dyadic circle
//!   homeomorphisms, via the sector-wise Minkowski question-mark conjugacy
//!   ([`dyadic`]).
//!
//! Start with the runnable examples (`cargo run --example rotation_numbers`)
//! or the `fanrot` command-line tool, which exposes the same operations.

pub mod error;
pub mod lattice;
pub mod plmap;
pub mod refine;
pub mod rotation;
pub mod sharp;

pub use error::{Error, Result};
pub use plmap::{Mat2, PLAutomorphism};
pub use refine::{common_refinement, regularize_fan, regularize_sector, simple_merge, simple_split, split_sequence, SplitStep};
pub use sharp::{decompose_simple, deterministic_refinement, ray_orbit_status, sharp_image, OrbitOutcome, OrbitStatus, SimpleMapStep, SimpleStepKind};
pub use rotation::{estimate_rotation, finite_order, rotation_number, wrap_step, RotationNumber};
pub use lattice::{ccw_compare, cross, Cone, ConeRef, Fan, IntVector, Ray, Sector};
