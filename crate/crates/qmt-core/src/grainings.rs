//! The refinement poset of coarse grainings and its tagged sub-posets.
//!
//! Partitions are ordered by refinement: P <= Q when P refines Q, i.e. the
//! sublattice of P contains the sublattice of Q. A partition is decoherent
//! when the restricted measure is additive there, and preclusively separable
//! when every null event meets every block in a null event. Both properties
//! are upward closed, so the tagged sub-posets are upper sets; a computed tag
//! that fails upward closure is a bug and is surfaced as such.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::measure::HistoriesTheory;
use crate::partition::{enumerate_partitions_capped, Partition};
use crate::poset::FinitePoset;
use crate::space::HARD_CAP;

/// Partitions beyond this many make the quadratic order relation unreasonable
/// to materialize; Bell(9) = 21147 is the last count under the limit.
pub const POSET_SIZE_LIMIT: usize = 25_000;

/// Tag names for the sub-posets of the graining poset.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    /// Decoherent (dynamically classical) partitions.
    Decoherent,
    /// Preclusively separable partitions.
    Separable,
    /// Both decoherent and preclusively separable.
    SeparableDecoherent,
    /// User-designated observable partitions.
    Observable,
    /// User-designated experiment partitions.
    Experiment,
}

impl Tag {
    pub fn parse(text: &str) -> Option<Tag> {
        match text.to_ascii_lowercase().as_str() {
            "d" | "decoherent" => Some(Tag::Decoherent),
            "p" | "separable" => Some(Tag::Separable),
            "pd" | "dp" => Some(Tag::SeparableDecoherent),
            "o" | "observable" => Some(Tag::Observable),
            "e" | "experiment" => Some(Tag::Experiment),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::Decoherent => "d",
            Tag::Separable => "p",
            Tag::SeparableDecoherent => "pd",
            Tag::Observable => "o",
            Tag::Experiment => "e",
        }
    }
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// Decoherence of a partition: pairwise block additivity,
/// mu(A_i | A_j) = mu(A_i) + mu(A_j) for all block pairs. For quantum
/// measures this is equivalent to additivity over every disjoint pair of the
/// generated sublattice (the naive route lives in the oracle module).
pub fn is_decoherent(theory: &HistoriesTheory, p: &Partition) -> Result<bool> {
    if p.width() != theory.n() {
        return Err(Error::SpaceMismatch);
    }
    let blocks = p.blocks();
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            if !theory.interference(*a, *b)?.is_zero_within(theory.tol()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Preclusive separability: for every null event Z of the full algebra and
/// every block A, the intersection A n Z is null.
pub fn is_preclusively_separable(theory: &HistoriesTheory, p: &Partition) -> Result<bool> {
    if p.width() != theory.n() {
        return Err(Error::SpaceMismatch);
    }
    for z in theory.null_events() {
        for a in p.blocks() {
            if !theory.is_null(a.intersect(z))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Per-partition tag flags.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PartitionFlags {
    pub decoherent: bool,
    pub separable: bool,
}

impl PartitionFlags {
    pub fn separable_decoherent(&self) -> bool {
        self.decoherent && self.separable
    }
}

/// Classify every partition without materializing the order relation.
pub fn classify_partitions(theory: &HistoriesTheory) -> Result<Vec<(Partition, PartitionFlags)>> {
    let parts = enumerate_partitions_capped(theory.n(), HARD_CAP)?;
    parts
        .into_iter()
        .map(|p| {
            let flags = PartitionFlags {
                decoherent: is_decoherent(theory, &p)?,
                separable: is_preclusively_separable(theory, &p)?,
            };
            Ok((p, flags))
        })
        .collect()
}

/// All decoherent partitions in canonical enumeration order.
pub fn decoherent_partitions(theory: &HistoriesTheory) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for p in enumerate_partitions_capped(theory.n(), HARD_CAP)? {
        if is_decoherent(theory, &p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Partitions that are both decoherent and preclusively separable.
pub fn separable_decoherent_partitions(theory: &HistoriesTheory) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for p in enumerate_partitions_capped(theory.n(), HARD_CAP)? {
        if is_decoherent(theory, &p)? && is_preclusively_separable(theory, &p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// A tagged subset of the graining poset, verified upward closed.
#[derive(Clone, Debug)]
pub struct PosetTag {
    pub tag: Tag,
    /// Member indices into the graining poset's partition list.
    pub members: FixedBitSet,
}

/// A tagged sub-poset extracted as a poset in its own right, for the topos
/// constructions. `global[i]` maps local element i back to the partition
/// index in the full graining poset.
#[derive(Clone, Debug)]
pub struct TaggedPoset {
    pub tag: Tag,
    pub global: Vec<usize>,
    pub partitions: Vec<Partition>,
    pub poset: FinitePoset,
}

impl TaggedPoset {
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }
}

/// The full poset of coarse grainings with computed and designated tags.
#[derive(Clone, Debug)]
pub struct GrainingPoset {
    partitions: Vec<Partition>,
    poset: FinitePoset,
    decoherent: FixedBitSet,
    separable: FixedBitSet,
    observable: Option<FixedBitSet>,
    experiment: Option<FixedBitSet>,
}

impl GrainingPoset {
    pub fn build(theory: &HistoriesTheory) -> Result<Self> {
        let classified = classify_partitions(theory)?;
        let m = classified.len();
        if m > POSET_SIZE_LIMIT {
            return Err(Error::PosetTooLarge {
                len: m,
                limit: POSET_SIZE_LIMIT,
                operation: "graining poset order relation".into(),
            });
        }
        let mut partitions = Vec::with_capacity(m);
        let mut decoherent = FixedBitSet::with_capacity(m);
        let mut separable = FixedBitSet::with_capacity(m);
        for (i, (p, flags)) in classified.into_iter().enumerate() {
            partitions.push(p);
            decoherent.set(i, flags.decoherent);
            separable.set(i, flags.separable);
        }
        let poset = FinitePoset::from_leq(m, |i, j| {
            partitions[i]
                .refines(&partitions[j])
                .expect("same sample space")
        })?;
        Ok(GrainingPoset {
            partitions,
            poset,
            decoherent,
            separable,
            observable: None,
            experiment: None,
        })
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }

    pub fn flags(&self, idx: usize) -> PartitionFlags {
        PartitionFlags {
            decoherent: self.decoherent.contains(idx),
            separable: self.separable.contains(idx),
        }
    }

    fn render(&self, idx: usize) -> String {
        format!("{:?}", self.partitions[idx].blocks())
    }

    fn computed_members(&self, tag: Tag) -> Result<FixedBitSet> {
        Ok(match tag {
            Tag::Decoherent => self.decoherent.clone(),
            Tag::Separable => self.separable.clone(),
            Tag::SeparableDecoherent => {
                let mut s = self.decoherent.clone();
                s.intersect_with(&self.separable);
                s
            }
            Tag::Observable => self
                .observable
                .clone()
                .ok_or_else(|| Error::NoDesignation {
                    tag: "observable".into(),
                })?,
            Tag::Experiment => self
                .experiment
                .clone()
                .ok_or_else(|| Error::NoDesignation {
                    tag: "experiment".into(),
                })?,
        })
    }

    /// The tagged sub-poset, with upward closure verified. For the computed
    /// tags a violation is an internal error: decoherence and separability
    /// are upward closed properties, so the classifier, not the input, is at
    /// fault.
    pub fn sub_poset(&self, tag: Tag) -> Result<PosetTag> {
        let members = self.computed_members(tag)?;
        if let Some((p, q)) = self.poset.upper_violation(&members) {
            return Err(Error::InternalUpperSetViolation {
                tag: tag.to_string(),
                member: self.render(p),
                missing: self.render(q),
            });
        }
        Ok(PosetTag { tag, members })
    }

    /// Record a user-designated upper set (observable or experiment poset).
    /// Rejects non-upper designations with a witness pair.
    pub fn designate_upper(&mut self, member_indices: &[usize], tag: Tag) -> Result<PosetTag> {
        if !matches!(tag, Tag::Observable | Tag::Experiment) {
            return Err(Error::Schema(format!(
                "tag {tag} is computed, not designated"
            )));
        }
        let mut members = FixedBitSet::with_capacity(self.len());
        for &i in member_indices {
            if i >= self.len() {
                return Err(Error::ForeignElement { index: i });
            }
            members.insert(i);
        }
        if let Some((p, q)) = self.poset.upper_violation(&members) {
            return Err(Error::NotAnUpperSet {
                member: self.render(p),
                missing: self.render(q),
            });
        }
        match tag {
            Tag::Observable => self.observable = Some(members.clone()),
            Tag::Experiment => self.experiment = Some(members.clone()),
            _ => unreachable!(),
        }
        Ok(PosetTag { tag, members })
    }

    /// Designate by partition values rather than indices.
    pub fn designate_upper_partitions(
        &mut self,
        members: &[Partition],
        tag: Tag,
    ) -> Result<PosetTag> {
        let mut indices = Vec::with_capacity(members.len());
        for p in members {
            let i = self.index_of(p).ok_or_else(|| Error::BadPartition {
                reason: format!("designated partition {:?} not found", p.blocks()),
            })?;
            indices.push(i);
        }
        self.designate_upper(&indices, tag)
    }

    /// Extract a tagged sub-poset as a standalone poset for the topos layer.
    pub fn tagged(&self, tag: Tag) -> Result<TaggedPoset> {
        let members = self.sub_poset(tag)?.members;
        let global: Vec<usize> = members.ones().collect();
        let partitions: Vec<Partition> =
            global.iter().map(|&i| self.partitions[i].clone()).collect();
        let poset = self.poset.restrict(&global)?;
        Ok(TaggedPoset {
            tag,
            global,
            partitions,
            poset,
        })
    }

    /// The full poset as a TaggedPoset (every partition, no filter).
    pub fn full_tagged(&self) -> TaggedPoset {
        TaggedPoset {
            tag: Tag::Decoherent,
            global: (0..self.len()).collect(),
            partitions: self.partitions.clone(),
            poset: self.poset.clone(),
        }
    }
}

/// An upper set around explicit partitions: the principal filter union.
pub fn principal_upper(poset: &GrainingPoset, seeds: &[usize]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(poset.len());
    for &i in seeds {
        s.union_with(poset.poset().up_set(i));
    }
    s
}
