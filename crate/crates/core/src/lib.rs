//! Verification toolkit for Morse kernels of nonpositively curved
//! complexes and their finite-order symmetries.
//!
//! The library constructs polygonal 2-complexes and formal products,
//! certifies nonpositive curvature through link conditions, validates
//! circle-valued Morse functions given as integer edge weightings, analyzes
//! ascending and descending links, and mechanically checks the hypothesis
//! package under which the kernel of the induced map to Z, extended by a
//! finite-order symmetry, contains infinitely many conjugacy classes of
//! finite-order elements. Independent algebraic oracles (semidirect-product
//! arithmetic, a twisted-conjugacy invariant, and exhaustive conjugator
//! search) cross-check the conclusion, and a free-group automorphism module
//! realizes the same finite extensions inside automorphism groups of free
//! groups, with ping-pong freeness certificates.

#![forbid(unsafe_code)]

pub mod autf;
pub mod builders;
pub mod complex;
pub mod curvature;
pub mod group;
pub mod morse;
pub mod symmetry;
pub mod words;
