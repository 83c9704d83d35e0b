//! Classical truth valuations on consistent sublattices.
//!
//! On the sublattice generated by a partition, the nonzero lattice
//! homomorphisms to Z2 are exactly the maps picking out one block: B goes to
//! 1 iff the block sits inside B. A valuation is therefore stored as its
//! (partition, block) pair; the partition index matters, because the same
//! block under different partitions gives maps with different domains.

use crate::coevents::MultiplicativeCoevent;
use crate::error::{Error, Result};
use crate::grainings::{decoherent_partitions, separable_decoherent_partitions};
use crate::measure::HistoriesTheory;
use crate::partition::Partition;
use crate::space::{Event, Z2Lattice, Z2};

/// The homomorphic valuation on a partition's sublattice selecting one block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomValuation {
    partition: Partition,
    block_idx: usize,
}

impl HomValuation {
    pub fn new(partition: Partition, block: Event) -> Result<Self> {
        let block_idx = partition
            .block_index(block)
            .ok_or_else(|| Error::NotABlock {
                block: format!("{block:?}"),
            })?;
        Ok(HomValuation {
            partition,
            block_idx,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn block(&self) -> Event {
        self.partition.blocks()[self.block_idx]
    }

    /// Evaluate on a member of the sublattice; events outside it are
    /// unanswerable rather than false, so they error.
    pub fn eval(&self, b: Event) -> Result<Z2> {
        if b.width() != self.partition.width() || !self.partition.sublattice().contains(b) {
            return Err(Error::OutsideDomain {
                event: format!("{b:?}"),
            });
        }
        Ok(Z2::from_bool(self.block().is_subset_of(b)))
    }

    /// The events of the sublattice valued true, in canonical order.
    pub fn support(&self) -> Vec<Event> {
        let block = self.block();
        self.partition
            .sublattice()
            .events()
            .iter()
            .copied()
            .filter(|e| block.is_subset_of(*e))
            .collect()
    }

    /// Restriction to a coarser partition: the unique valuation selecting the
    /// block that absorbs this one.
    pub fn restrict_to(&self, coarser: &Partition) -> Result<HomValuation> {
        if !self.partition.refines(coarser)? {
            return Err(Error::NotComparable);
        }
        let mine = self.block();
        let host = coarser
            .blocks()
            .iter()
            .position(|b| mine.is_subset_of(*b))
            .expect("refinement places each block inside a coarser block");
        Ok(HomValuation {
            partition: coarser.clone(),
            block_idx: host,
        })
    }

    /// Whether this valuation is the restriction of the given multiplicative
    /// coevent to its sublattice: evaluation agrees on every member event.
    pub fn is_restriction_of(&self, coevent: &MultiplicativeCoevent) -> bool {
        if coevent.width() != self.partition.width() {
            return false;
        }
        self.partition
            .sublattice()
            .events()
            .iter()
            .all(|e| self.eval(*e).expect("member event") == coevent.eval(*e).expect("same space"))
    }

    /// The support relation with the block's dual coevent: the support of
    /// this valuation equals the dual's support intersected with the
    /// sublattice, and the valuation is the dual's restriction.
    pub fn support_relation_holds(&self) -> bool {
        let dual = MultiplicativeCoevent::new(self.block()).expect("blocks are nonempty");
        let from_dual: Vec<Event> = self
            .partition
            .sublattice()
            .events()
            .iter()
            .copied()
            .filter(|e| dual.dual().is_subset_of(*e))
            .collect();
        self.support() == from_dual && self.is_restriction_of(&dual)
    }
}

/// All nonzero homomorphic valuations on the partition's sublattice: exactly
/// one per block.
pub fn homs(p: &Partition) -> Vec<HomValuation> {
    (0..p.block_count())
        .map(|block_idx| HomValuation {
            partition: p.clone(),
            block_idx,
        })
        .collect()
}

/// The preclusive valuations on the partition's sublattice: those whose
/// support avoids every null member. For decoherent partitions this equals
/// the valuations of positive-measure blocks.
pub fn cl(theory: &HistoriesTheory, p: &Partition) -> Result<Vec<HomValuation>> {
    if p.width() != theory.n() {
        return Err(Error::SpaceMismatch);
    }
    let lat = p.sublattice();
    let nulls: Vec<Event> = lat
        .events()
        .iter()
        .copied()
        .filter(|e| theory.is_null(*e).expect("member event"))
        .collect();
    Ok(homs(p)
        .into_iter()
        .filter(|v| {
            let block = v.block();
            !nulls.iter().any(|z| block.is_subset_of(*z))
        })
        .collect())
}

/// Which pooled valuation set to build.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ValuationKind {
    /// All homomorphic valuations over decoherent partitions.
    VD,
    /// The preclusive valuations over decoherent partitions.
    VC,
    /// All homomorphic valuations over decoherent, preclusively separable
    /// partitions.
    VPD,
    /// The preclusive variant over the same poset.
    VPDPreclusive,
}

impl ValuationKind {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "vd" => Some(ValuationKind::VD),
            "vc" => Some(ValuationKind::VC),
            "vpd" => Some(ValuationKind::VPD),
            "vpd-preclusive" | "vpdp" => Some(ValuationKind::VPDPreclusive),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ValuationKind::VD => "vd",
            ValuationKind::VC => "vc",
            ValuationKind::VPD => "vpd",
            ValuationKind::VPDPreclusive => "vpd-preclusive",
        }
    }
}

/// A pooled set of valuations, each carrying its home partition.
#[derive(Clone, Debug)]
pub struct ValuationSet {
    pub kind: ValuationKind,
    pub members: Vec<HomValuation>,
}

impl ValuationSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Pool valuations across the tagged partitions: the union over the poset of
/// per-partition valuations, in enumeration order.
pub fn pooled(theory: &HistoriesTheory, kind: ValuationKind) -> Result<ValuationSet> {
    let partitions = match kind {
        ValuationKind::VD | ValuationKind::VC => decoherent_partitions(theory)?,
        ValuationKind::VPD | ValuationKind::VPDPreclusive => {
            separable_decoherent_partitions(theory)?
        }
    };
    let mut members = Vec::new();
    for p in &partitions {
        match kind {
            ValuationKind::VD | ValuationKind::VPD => members.extend(homs(p)),
            ValuationKind::VC | ValuationKind::VPDPreclusive => members.extend(cl(theory, p)?),
        }
    }
    Ok(ValuationSet { kind, members })
}

/// A logical framework: a family of domains, the allowed valuations from
/// single domains, and the truth-value lattice (fixed to Z2).
#[derive(Clone, Debug)]
pub struct LogicalFramework {
    pub domains: Vec<Partition>,
    pub valuations: ValuationSet,
    pub truth: Z2Lattice,
}

impl LogicalFramework {
    /// Every valuation's home partition must be one of the domains.
    pub fn verify(&self) -> bool {
        self.valuations
            .members
            .iter()
            .all(|v| self.domains.contains(v.partition()))
    }
}

/// The framework for the requested pooled set, over the matching poset.
pub fn framework(theory: &HistoriesTheory, kind: ValuationKind) -> Result<LogicalFramework> {
    let domains = match kind {
        ValuationKind::VD | ValuationKind::VC => decoherent_partitions(theory)?,
        ValuationKind::VPD | ValuationKind::VPDPreclusive => {
            separable_decoherent_partitions(theory)?
        }
    };
    Ok(LogicalFramework {
        domains,
        valuations: pooled(theory, kind)?,
        truth: Z2Lattice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn three_path() -> HistoriesTheory {
        HistoriesTheory::from_amplitudes(
            ["a", "b", "c"],
            vec![
                Scalar::exact_int(1, 0),
                Scalar::exact_int(1, 0),
                Scalar::exact_int(-1, 0),
            ],
        )
        .unwrap()
    }

    fn ev(t: &HistoriesTheory, labels: &[&str]) -> Event {
        t.space().event_from_labels(labels.iter().copied()).unwrap()
    }

    fn part(t: &HistoriesTheory, blocks: &[&[&str]]) -> Partition {
        Partition::new(blocks.iter().map(|b| ev(t, b)).collect()).unwrap()
    }

    #[test]
    fn homs_are_one_per_block() {
        assert_eq!(homs(&Partition::coarsest(3)).len(), 1);
        assert_eq!(homs(&Partition::finest(3)).len(), 3);
        let t = three_path();
        let p = part(&t, &[&["a"], &["b", "c"]]);
        let vs = homs(&p);
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[0].block(), ev(&t, &["a"]));
        assert_eq!(vs[1].block(), ev(&t, &["b", "c"]));
    }

    #[test]
    fn eval_inside_and_outside_the_domain() {
        let t = three_path();
        let fine = Partition::finest(3);
        let va = HomValuation::new(fine.clone(), ev(&t, &["a"])).unwrap();
        assert_eq!(va.eval(ev(&t, &["a", "c"])).unwrap(), Z2::One);
        assert_eq!(va.eval(ev(&t, &["b", "c"])).unwrap(), Z2::Zero);

        let p = part(&t, &[&["a"], &["b", "c"]]);
        let v = HomValuation::new(p, ev(&t, &["a"])).unwrap();
        assert!(matches!(
            v.eval(ev(&t, &["a", "b"])),
            Err(Error::OutsideDomain { .. })
        ));

        let top = HomValuation::new(Partition::coarsest(3), Event::full(3)).unwrap();
        assert_eq!(top.eval(Event::full(3)).unwrap(), Z2::One);

        assert!(matches!(
            HomValuation::new(Partition::coarsest(3), ev(&t, &["a"])),
            Err(Error::NotABlock { .. })
        ));
    }

    #[test]
    fn hom_valuations_are_lattice_homomorphisms() {
        // against brute force: over small sublattices, the nonzero maps
        // preserving meet and join are exactly the block valuations
        let t = three_path();
        for p in [
            Partition::coarsest(3),
            part(&t, &[&["a"], &["b", "c"]]),
            Partition::finest(3),
        ] {
            let lat = p.sublattice();
            let events = lat.events();
            let k = events.len();
            let mut found = Vec::new();
            for assignment in 1u32..(1 << k) {
                let val = |e: Event| -> bool {
                    let idx = events.iter().position(|x| *x == e).unwrap();
                    assignment & (1 << idx) != 0
                };
                // bounded-lattice homomorphism: preserves bottom as well as
                // meet and join (otherwise the constant-1 map slips through)
                let mut is_hom = !val(Event::empty(3));
                for a in events {
                    for b in events {
                        let meet = val(a.intersect(*b)) == (val(*a) && val(*b));
                        let join = val(a.union(*b)) == (val(*a) || val(*b));
                        if !meet || !join {
                            is_hom = false;
                            break;
                        }
                    }
                    if !is_hom {
                        break;
                    }
                }
                if is_hom {
                    found.push(assignment);
                }
            }
            assert_eq!(found.len(), p.block_count(), "partition {p:?}");
            for v in homs(&p) {
                let mask: u32 = events
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| v.eval(**e).unwrap().as_bool())
                    .map(|(i, _)| 1 << i)
                    .sum();
                assert!(found.contains(&mask));
            }
        }
    }

    #[test]
    fn cl_excludes_null_block_valuations() {
        let t = three_path();
        let p = part(&t, &[&["b"], &["a", "c"]]);
        let c = cl(&t, &p).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].block(), ev(&t, &["b"]));
        // on the finest partition every singleton has a null superset in the
        // full sublattice, so the preclusive set is empty
        let fine = Partition::finest(3);
        assert!(cl(&t, &fine).unwrap().is_empty());
    }

    #[test]
    fn restriction_cases() {
        let t = three_path();
        let fine = Partition::finest(3);
        let coarse = part(&t, &[&["a"], &["b", "c"]]);
        let va = HomValuation::new(fine.clone(), ev(&t, &["a"])).unwrap();
        assert_eq!(va.restrict_to(&coarse).unwrap().block(), ev(&t, &["a"]));
        let vb = HomValuation::new(fine.clone(), ev(&t, &["b"])).unwrap();
        assert_eq!(
            vb.restrict_to(&coarse).unwrap().block(),
            ev(&t, &["b", "c"])
        );
        let top = Partition::coarsest(3);
        assert_eq!(vb.restrict_to(&top).unwrap().block(), Event::full(3));
        // identity restriction
        assert_eq!(vb.restrict_to(&fine).unwrap(), vb);
        // incomparable partitions refuse
        let other = part(&t, &[&["b"], &["a", "c"]]);
        let vc = HomValuation::new(coarse, ev(&t, &["a"])).unwrap();
        assert!(matches!(vc.restrict_to(&other), Err(Error::NotComparable)));
    }

    #[test]
    fn restriction_is_functorial_and_surjective() {
        let t = three_path();
        let fine = Partition::finest(3);
        let mid = part(&t, &[&["a"], &["b", "c"]]);
        let top = Partition::coarsest(3);
        for v in homs(&fine) {
            let two_step = v.restrict_to(&mid).unwrap().restrict_to(&top).unwrap();
            let one_step = v.restrict_to(&top).unwrap();
            assert_eq!(two_step, one_step);
        }
        // surjectivity: every coarse valuation arises from the finer side
        for target in homs(&mid) {
            assert!(homs(&fine)
                .into_iter()
                .any(|v| v.restrict_to(&mid).unwrap() == target));
        }
    }

    #[test]
    fn pooled_counts_on_three_path() {
        let t = three_path();
        let vd = pooled(&t, ValuationKind::VD).unwrap();
        assert_eq!(vd.len(), 5); // 1 + 2 + 2 over the three decoherent partitions
        let vc = pooled(&t, ValuationKind::VC).unwrap();
        assert_eq!(vc.len(), 3);
        let excluded_blocks: Vec<Event> = vc.members.iter().map(|v| v.block()).collect();
        assert!(!excluded_blocks.contains(&ev(&t, &["a", "c"])));
        assert!(!excluded_blocks.contains(&ev(&t, &["b", "c"])));
        let vpd = pooled(&t, ValuationKind::VPD).unwrap();
        assert_eq!(vpd.len(), 1); // only the coarsest partition is separable
        let fw = framework(&t, ValuationKind::VD).unwrap();
        assert!(fw.verify());
        assert_eq!(fw.domains.len(), 3);
    }

    #[test]
    fn support_relation() {
        let t = three_path();
        let p = part(&t, &[&["a"], &["b", "c"]]);
        let v = HomValuation::new(p, ev(&t, &["a"])).unwrap();
        assert_eq!(v.support(), vec![ev(&t, &["a"]), Event::full(3)]);
        assert!(v.support_relation_holds());
        let top = HomValuation::new(Partition::coarsest(3), Event::full(3)).unwrap();
        assert_eq!(top.support(), vec![Event::full(3)]);
        assert!(top.support_relation_holds());
    }
}
