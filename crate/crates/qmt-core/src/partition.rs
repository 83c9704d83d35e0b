//! Set partitions of the sample space and the Boolean sublattices they
//! generate.
//!
//! Canonical form: blocks sorted by smallest member, so listings and poset
//! indices are deterministic across runs. Enumeration walks restricted
//! growth strings in lexicographic order, which yields exactly Bell(n)
//! partitions with the canonical block order built in.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::measure::{HistoriesTheory, MeasureValue};
use crate::scalar::Real;
use crate::space::{Event, DEFAULT_CAP, HARD_CAP};

/// A partition of the sample space into disjoint nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Event>,
}

impl Partition {
    /// Validates and canonicalizes a block list: blocks must be nonempty,
    /// pairwise disjoint, and cover the space.
    pub fn new(blocks: Vec<Event>) -> Result<Self> {
        let width = match blocks.first() {
            Some(b) => b.width(),
            None => {
                return Err(Error::BadPartition {
                    reason: "no blocks".into(),
                })
            }
        };
        let mut seen = 0u32;
        for b in &blocks {
            if b.width() != width {
                return Err(Error::SpaceMismatch);
            }
            if b.is_empty() {
                return Err(Error::BadPartition {
                    reason: "empty block".into(),
                });
            }
            if seen & b.mask() != 0 {
                return Err(Error::BadPartition {
                    reason: "blocks overlap".into(),
                });
            }
            seen |= b.mask();
        }
        if seen != Event::full(width).mask() {
            return Err(Error::BadPartition {
                reason: "blocks do not cover the sample space".into(),
            });
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.mask().trailing_zeros());
        Ok(Partition { blocks })
    }

    /// The partition into singletons.
    pub fn finest(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|i| Event::singleton(i, n)).collect(),
        }
    }

    /// The one-block partition.
    pub fn coarsest(n: usize) -> Self {
        Partition {
            blocks: vec![Event::full(n)],
        }
    }

    /// Build from a restricted growth string: element i joins the block the
    /// string names at position i.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let n = rgs.len();
        let k = rgs.iter().max().map(|m| m + 1).unwrap_or(0);
        let mut masks = vec![0u32; k];
        for (i, &b) in rgs.iter().enumerate() {
            masks[b] |= 1 << i;
        }
        Partition {
            blocks: masks.into_iter().map(|m| Event::from_mask(m, n)).collect(),
        }
    }

    /// The restricted growth string of the canonical block order.
    pub fn rgs(&self) -> Vec<usize> {
        let n = self.width();
        let mut out = vec![0usize; n];
        for (bi, b) in self.blocks.iter().enumerate() {
            for i in b.members() {
                out[i] = bi;
            }
        }
        out
    }

    pub fn blocks(&self) -> &[Event] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn width(&self) -> usize {
        self.blocks[0].width()
    }

    pub fn is_finest(&self) -> bool {
        self.block_count() == self.width()
    }

    pub fn is_coarsest(&self) -> bool {
        self.block_count() == 1
    }

    /// The block containing history index i.
    pub fn block_of(&self, i: usize) -> Event {
        *self
            .blocks
            .iter()
            .find(|b| b.contains(i))
            .expect("blocks cover the space")
    }

    /// Index of `block` within the canonical block list, if it is a block.
    pub fn block_index(&self, block: Event) -> Option<usize> {
        self.blocks.iter().position(|b| *b == block)
    }

    /// Refinement: true iff every block of `self` lies inside a block of
    /// `other`. The finest partition refines everything; refinement is
    /// reflexive.
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        if self.width() != other.width() {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .blocks
            .iter()
            .all(|b| other.blocks.iter().any(|c| b.is_subset_of(*c))))
    }

    /// The Boolean sublattice generated by this partition: all unions of
    /// blocks, 2^k events for k blocks.
    pub fn sublattice(&self) -> Sublattice {
        let n = self.width();
        let k = self.block_count();
        let mut events: Vec<Event> = Vec::with_capacity(1 << k);
        for choice in 0u32..(1 << k) {
            let mut mask = 0u32;
            for (bi, b) in self.blocks.iter().enumerate() {
                if choice & (1 << bi) != 0 {
                    mask |= b.mask();
                }
            }
            events.push(Event::from_mask(mask, n));
        }
        events.sort();
        let mut member = FixedBitSet::with_capacity(1 << n);
        for e in &events {
            member.insert(e.mask() as usize);
        }
        Sublattice {
            source: self.clone(),
            events,
            member,
        }
    }

    /// The partition isolating `block` against singletons: {A} plus {x} for
    /// every history x outside A.
    pub fn isolating(block: Event) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::BadPartition {
                reason: "cannot isolate the empty event".into(),
            });
        }
        let n = block.width();
        let mut blocks = vec![block];
        for i in 0..n {
            if !block.contains(i) {
                blocks.push(Event::singleton(i, n));
            }
        }
        Partition::new(blocks)
    }
}

/// A partition-generated Boolean sublattice of the event algebra.
#[derive(Clone, Debug)]
pub struct Sublattice {
    source: Partition,
    events: Vec<Event>,
    member: FixedBitSet, // indexed by event mask
}

impl Sublattice {
    pub fn source(&self) -> &Partition {
        &self.source
    }

    /// All member events in canonical order.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always contains the empty and full events
    }

    pub fn contains(&self, e: Event) -> bool {
        e.width() == self.source.width() && self.member.contains(e.mask() as usize)
    }

    /// Null members of the sublattice under the theory's measure.
    pub fn null_events(&self, theory: &HistoriesTheory) -> Result<Vec<Event>> {
        let mut out = Vec::new();
        for &e in &self.events {
            if theory.is_null(e)? {
                out.push(e);
            }
        }
        Ok(out)
    }
}

/// A theory restricted to the sublattice generated by a partition: the
/// coarse-grained view answers measure queries only on block unions.
pub struct CoarseGrained<'a> {
    theory: &'a HistoriesTheory,
    lattice: Sublattice,
}

impl<'a> CoarseGrained<'a> {
    pub fn new(theory: &'a HistoriesTheory, partition: &Partition) -> Result<Self> {
        if partition.width() != theory.n() {
            return Err(Error::SpaceMismatch);
        }
        Ok(CoarseGrained {
            theory,
            lattice: partition.sublattice(),
        })
    }

    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn partition(&self) -> &Partition {
        self.lattice.source()
    }

    /// The restricted measure; events outside the sublattice are rejected.
    pub fn mu(&self, e: Event) -> Result<MeasureValue> {
        if !self.lattice.contains(e) {
            return Err(Error::ForeignEvent {
                event: self.theory.space().render_event(e),
            });
        }
        self.theory.mu(e)
    }

    pub fn null_events(&self) -> Vec<Event> {
        self.lattice
            .events()
            .iter()
            .copied()
            .filter(|e| self.theory.is_null(*e).expect("member event"))
            .collect()
    }

    /// Kolmogorov sum rule over the restricted algebra: additivity on every
    /// disjoint pair of member events.
    pub fn kolmogorov_holds(&self) -> bool {
        let events = self.lattice.events();
        for (i, a) in events.iter().enumerate() {
            for b in &events[i..] {
                if a.is_disjoint_from(*b)
                    && !self
                        .theory
                        .interference(*a, *b)
                        .expect("member events")
                        .is_zero_within(self.theory.tol())
                {
                    return false;
                }
            }
        }
        true
    }

    /// The restricted measure as a table over the member events.
    pub fn mu_table(&self) -> Vec<(Event, Real)> {
        self.lattice
            .events()
            .iter()
            .map(|e| {
                (
                    *e,
                    self.theory.mu(*e).expect("member event").value().clone(),
                )
            })
            .collect()
    }
}

/// Bell number: how many partitions an n-element set has.
pub fn bell_number(n: usize) -> u128 {
    // Bell triangle
    let mut row = vec![1u128];
    for _ in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            next.push(next.last().unwrap() + v);
        }
        row = next;
    }
    row[0]
}

/// All partitions of {0..n-1} in lexicographic restricted-growth order.
/// The first is the coarsest partition, the last the finest.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_capped(n, DEFAULT_CAP)
}

pub fn enumerate_partitions_capped(n: usize, cap: usize) -> Result<Vec<Partition>> {
    let cap = cap.min(HARD_CAP);
    if n == 0 || n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut rgs = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        out.push(Partition::from_rgs(&rgs));
        // advance to the next restricted growth string
        let mut pos = None;
        for i in (1..n).rev() {
            let prefix_max = *rgs[..i].iter().max().unwrap();
            if rgs[i] <= prefix_max {
                pos = Some(i);
                break;
            }
        }
        match pos {
            None => break,
            Some(i) => {
                rgs[i] += 1;
                rgs[i + 1..].fill(0);
            }
        }
    }
    Ok(out)
}
