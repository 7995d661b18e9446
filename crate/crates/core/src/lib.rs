//! Exact formal calculus for vertex-algebra axioms.

pub mod scalars;
pub mod expansion;
pub mod series;
pub mod elemprop;
pub mod valg;
pub mod vmod;
