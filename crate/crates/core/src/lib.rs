//! Exact computational engine for the Jonah-Konvisser groups of order p^8
//! (p = 2, 3, 5) and their endomorphism monoids.
//!
//! The crate is organized bottom-up:
//!
//! * [`fp`] - arithmetic over the prime field F_p, 4-vectors and 4x4 matrices;
//! * [`jk`] - normal-form arithmetic in the groups G(p, lambda) themselves;
//! * [`endo`] - endomorphisms given by validated generator images, their
//!   algebra (composition, pointwise sum, the `id + f` automorphisms) and the
//!   normalized/central decomposition;
//! * [`census`] - pruned exhaustive enumeration of normalized endomorphisms
//!   and the structural checks built on it (end-commutativity, the
//!   exceptional composition tables at p = 2);
//! * [`tsdp`] - generic two-sided semidirect products of monoids and the two
//!   concrete models for End(G), with the isomorphism onto them;
//! * [`orbit`] - censuses of the conjugation action of Aut(G) on End(G);
//! * [`structure`] - omega-subgroup and nil/per decomposition checks;
//! * [`accept`] - the acceptance suite exercised by `tests/acceptance.rs` and
//!   the `endomon verify all` command.
//!
//! All values are immutable and all operations are pure functions, so every
//! enumeration parallelizes without coordination; results are merged in a
//! deterministic order so that equal seeds give byte-identical reports.

pub mod accept;
pub mod census;
pub mod endo;
pub mod fp;
pub mod jk;
pub mod orbit;
pub mod report;
pub mod rng;
pub mod structure;
pub mod tsdp;

pub use endo::{CentralHom, Endo, GenImages, NormalizedEndo};
pub use fp::{FpMat4, FpScalar, FpVec4};
pub use jk::{Element, GroupParams, Subgroup};
