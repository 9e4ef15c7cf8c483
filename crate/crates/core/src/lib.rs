//! Homological invariants of persistence modules over finite posets.
//!
//! Modules are commutative representations of a poset's Hasse quiver over a
//! prime field. On top of exact linear algebra the crate computes Hom spaces,
//! minimal approximations and resolutions by families of spread modules,
//! relative Grothendieck classes, rank invariants (directly and through hook
//! modules), generalized ranks and their Möbius inversions.

pub mod approx;
pub mod error;
pub mod field;
pub mod gen;
pub mod hom;
pub mod invariants;
pub mod module;
pub mod poset;

pub use approx::{Family, Resolution, ResolutionStatus, XDimension};
pub use error::{Error, Result};
pub use field::{FieldElem, Fp, Mat, DEFAULT_PRIME};
pub use invariants::{Comparison, GrothClass, Invariant, InvariantValue, RankInvariant, SignedDiagram};
pub use hom::{dim_hom, hom_basis, spread_hom_dim, HomBasis};
pub use module::{Diagram, Morphism, PersistenceModule};
pub use poset::{containment_poset, enumerate_spreads, ElemSet, Poset, Spread, SpreadKind, SubPoset};
