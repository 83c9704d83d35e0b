//! Varying sets over finite posets and the logic living on them.
//!
//! A varying set is a covariant set-valued functor on a poset; here the poset
//! is a tagged family of coarse grainings ordered by refinement. The
//! subobject classifier at an element is the set of sieves (upper sets above
//! that element), a global element of it is canonically an upper set of the
//! whole poset, and the upper sets form a Heyting algebra. The constructions
//! instantiate twice: the constant event-algebra functor with its accessible
//! subobject, and the valuation functor with restriction transitions.

mod functor;
mod heyting;
mod instances;

pub use functor::{
    characteristic, characteristic_is_natural, constant_varying_set, gamma_iso_check, sieves_at,
    Sieve, Subobject, VaryingSet, GAMMA_ENUM_LIMIT,
};
pub use heyting::{HeytingAlgebra, Implication};
pub use instances::{valuation_varying_set, EventTopos, GlobalElement, HMap, ValuationTopos};
