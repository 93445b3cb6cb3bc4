//! Kirchhoff polynomials of multigraphs, Jacobian-ideal membership
//! conditions on them, and certificate builders for series-parallel families.

pub mod graph;
pub mod kirchhoff;
pub mod poly;
pub mod spbuild;
pub mod linsolve;
pub mod conditions;
pub mod certbuild;
pub mod random;
