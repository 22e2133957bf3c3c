//! Exact computation of Tate cohomology of finite groups acting on integer
//! lattices, verification and construction of flasque resolutions of algebraic
//! tori at the character-lattice level, and counting of R-equivalence classes
//! of torsor sets for 2-power cyclic group schemes over number fields via
//! Brauer-group local invariants.
//!
//! Everything is computed over exact integers (`num_bigint::BigInt`) or exact
//! rationals; there is no floating point on any mathematical path.

pub mod arith;
pub mod brauer;
pub mod exactlin;
pub mod family;
pub mod gmod;
pub mod tate;

pub use arith::{ArithError, BaseField, FieldTowerSpec, Place, PlaceAnalysis, TowerVariant};
pub use brauer::{BrauerError, LocalInvariantVector, RClassReport};
pub use exactlin::{FiniteAbelianGroup, IntMatrix, LatticeError, NormalFormResult};
pub use family::{FamilyError, FamilyReport, TorusFamilyParams};
pub use gmod::{FiniteGModule, FiniteGroup, GLattice, GLatticeMap, GroupError, Subgroup};
pub use tate::{CohomologyReport, FlasqueEvidence, ResolutionCheck};
