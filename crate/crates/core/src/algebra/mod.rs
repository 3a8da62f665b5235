//! Algebraic lattice factories: ideal lattices of totally complex number fields through the
//! canonical embedding, multi-block matrix lattices of cyclic division algebras, their
//! codifferent duals, and the resulting rate-gap constants.

pub mod catalog;
pub mod constants;
pub mod cyclic;
pub mod exact;
pub mod field;

pub use catalog::{resolve, CatalogLattice};
pub use constants::{conway_thompson_gap, rate_constants, RateConstants, MARTINET_RD};
pub use cyclic::{AlgElem, CyclicAlgebraCtx, ExtElem};
pub use field::{FieldElem, FractionalIdealBasis, NumberFieldCtx};
