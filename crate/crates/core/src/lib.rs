//! Exact Kan-injectivity over finite posets.
//!
//! The crate works in the order-enriched category of posets and monotone maps,
//! restricted to finite carriers so that every quantifier can be decided by
//! enumeration:
//!
//! * [`poset`]: posets, monotone maps, the pointwise hom-order, quotients.
//! * [`constructions`]: inserters, equalizers, (co)products, coinserters,
//!   pushouts, wide pushouts and cocomma objects.
//! * [`kan`]: left/right Kan extensions and (weak) Kan-injectivity of objects
//!   and morphisms with respect to a finite set of maps.
//! * [`reflection`]: the chain of alternating wide pushouts and coinserter
//!   quotients that reflects a poset into the Kan-injective ones.
//! * [`monads`]: the lowerset monad, its Kock-Zöberlein inequality, algebras
//!   and coprojections.
//! * [`oracles`]: independent constructions and brute-force checkers.
//! * [`text`]: the plain-text workspace format.

pub mod constructions;
pub mod error;
pub mod kan;
pub mod monads;
pub mod oracles;
pub mod poset;
pub mod reflection;
pub mod samples;
pub mod text;

pub use error::{Error, Result};
pub use fixedbitset::FixedBitSet;
pub use poset::{FinPoset, MonotoneMap};
