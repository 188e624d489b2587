//! Exact, desk-scale computations with finite simplicial G-sets,
//! Gamma-G-spaces, and truncated symmetric G-spectra.
//!
//! Everything is finite and exact: a group is a multiplication table, a
//! simplicial set is truncated at a dimension cap and stores every simplex
//! (including the degenerate ones) as an indexed pointed set, homology is
//! integer Smith normal form. No floating point, no approximation, no
//! modular shortcuts. Any answer that depends on a cap says so.

pub mod colim;
pub mod gamma;
pub mod groups;
pub mod homology;
pub mod par;
pub mod spectra;
pub mod sset;
