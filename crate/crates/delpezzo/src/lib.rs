//! Picard lattices of blown-up planes, negative-curve configurations, total
//! dual VMRT classes, and exact certificates deciding bigness of the tangent
//! bundle of rational surfaces with nef anticanonical divisor.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`picard`] builds and validates a surface from a bubble-point
//!   configuration and provides the lattice arithmetic;
//! * [`curves`] enumerates negative curves, recognizes the ADE type, and
//!   certifies effectivity of surface classes;
//! * [`fibration`] computes pencils, their reducible members, and the total
//!   dual VMRT class on the projectivized tangent bundle;
//! * [`certify`] verifies and searches bigness and non-bigness certificates
//!   with an exact rational LP kernel ([`lp`]);
//! * [`elliptic`] mechanizes the fiber-type bookkeeping for rational elliptic
//!   surfaces;
//! * [`orbifold`] computes orbifold Chern numbers of the anticanonical model;
//! * [`hierarchy`] propagates Big/NotBig facts over the specialization
//!   hierarchies and reassembles the published classifications;
//! * [`corpus`] ships the fixture configurations and certificates and runs
//!   the whole verification suite.
//!
//! All arithmetic is exact; nothing in this crate touches floating point.
//! With the default `parallel` feature, independent suite items and search
//! subproblems fan out over rayon; disabling the feature falls back to
//! sequential execution with identical results.

pub mod certify;
pub mod corpus;
pub mod curves;
pub mod elliptic;
mod error;
mod exec;
pub mod fibration;
pub mod hierarchy;
pub mod linalg;
pub mod lp;
pub mod num;
pub mod orbifold;
pub mod picard;

pub use error::{Error, Result};
