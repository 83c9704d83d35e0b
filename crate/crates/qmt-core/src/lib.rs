//! Quantum measure theory at desk scale.
//!
//! A finite histories theory is a sample space together with a Hermitian
//! decoherence functional; the induced quantum measure obeys the quantum sum
//! rule but in general fails additivity. This crate builds the combinatorial
//! structures hanging off such a theory:
//!
//! * [`measure`] — sample spaces, events, decoherence matrices, the measure
//!   cache, and the classical/quantum sum-rule checks;
//! * [`partition`] / [`grainings`] — set partitions, the refinement poset of
//!   partition-generated Boolean sublattices, and its decoherent (`D`),
//!   preclusively separable (`P`), `PD`, and user-designated (`O`/`E`)
//!   sub-posets;
//! * [`coevents`] — Z2-valued truth valuations on the full event algebra,
//!   multiplicativity and the dual-event representation, preclusion,
//!   domination, and the `M`, `Cons_D`, `Cons_C`, `Cons_M` schemes;
//! * [`valuations`] — classical homomorphic valuations on consistent
//!   sublattices, their preclusive subsets, restriction, and pooling;
//! * [`topos`] — varying sets (set-valued functors) over finite posets,
//!   subobjects, sieves, characteristic maps, global elements, and Heyting
//!   algebras of upper sets;
//! * [`io`] / [`report`] / [`samples`] / [`oracle`] / [`dot`] — the file
//!   format, deterministic reports, built-in example theories, and the
//!   naive-recomputation oracles that back the fast paths.

pub mod coevents;
pub mod dot;
pub mod error;
pub mod grainings;
pub mod io;
pub mod measure;
pub mod oracle;
pub mod partition;
pub mod poset;
pub mod report;
pub mod samples;
pub mod scalar;
pub mod space;
pub mod topos;
pub mod valuations;

pub use error::{Error, Result};
pub use measure::{DecoherenceMatrix, HistoriesTheory, MeasureValue};
pub use scalar::{Mode, Real, Scalar};
pub use space::{Event, SampleSpace, Z2};
