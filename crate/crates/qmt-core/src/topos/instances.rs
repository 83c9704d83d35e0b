//! The two instantiations of the functor machinery over a tagged graining
//! poset: the constant event-algebra functor with its accessible subobject,
//! and the valuation functor with restriction transitions and its generated
//! subobject.
//!
//! Global elements of the classifier are represented as upper sets of the
//! poset (the census in [`super::gamma_iso_check`] backs this encoding); the
//! element's sieve at any stage is the intersection with the cone above it.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::grainings::TaggedPoset;
use crate::measure::HistoriesTheory;
use crate::space::{all_events, Event};
use crate::topos::functor::{Subobject, VaryingSet};
use crate::valuations::{homs, HomValuation};

/// A global element of the subobject classifier, represented as an upper
/// set of the poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalElement {
    pub members: FixedBitSet,
}

impl GlobalElement {
    /// The element's sieve at a stage: the members at or above it.
    pub fn sieve_at(&self, tp: &TaggedPoset, p: usize) -> FixedBitSet {
        let mut s = self.members.clone();
        s.intersect_with(tp.poset.up_set(p));
        s
    }
}

/// The constant event-algebra functor over a tagged poset, with the
/// accessible subobject: at each partition, the events belonging to some
/// finer (or equal) member of the poset.
pub struct EventTopos {
    pub tagged: TaggedPoset,
    pub varying: VaryingSet<Event>,
    pub accessible: Subobject,
}

impl EventTopos {
    pub fn build(theory: &HistoriesTheory, tagged: TaggedPoset) -> Result<Self> {
        let n = theory.n();
        let fiber: Vec<Event> = all_events(n).collect();
        let varying = super::functor::constant_varying_set(tagged.poset.clone(), fiber)?;
        // membership bitsets per stage, indexed by event mask
        let per_member: Vec<FixedBitSet> = tagged
            .partitions
            .iter()
            .map(|p| {
                let lat = p.sublattice();
                let mut b = FixedBitSet::with_capacity(1 << n);
                for e in lat.events() {
                    b.insert(e.mask() as usize);
                }
                b
            })
            .collect();
        let stages: Vec<FixedBitSet> = (0..tagged.len())
            .map(|p| {
                let mut acc = FixedBitSet::with_capacity(1 << n);
                for q in 0..tagged.len() {
                    if tagged.poset.leq(q, p) {
                        acc.union_with(&per_member[q]);
                    }
                }
                acc
            })
            .collect();
        let accessible = Subobject::new(&varying, stages)?;
        Ok(EventTopos {
            tagged,
            varying,
            accessible,
        })
    }

    /// The events accessible at a stage, in canonical order.
    pub fn accessible_events(&self, p: usize) -> Vec<Event> {
        let n = self.tagged.partitions[p].width();
        self.accessible
            .stage(p)
            .ones()
            .map(|m| Event::from_mask(m as u32, n))
            .collect()
    }

    /// The global element of an event: the upper set of stages from which the
    /// event is accessible. Errors when the event belongs to no member.
    pub fn global_element(&self, a: Event) -> Result<GlobalElement> {
        let mut members = FixedBitSet::with_capacity(self.tagged.len());
        for p in 0..self.tagged.len() {
            if self.accessible.contains_index(p, a.mask() as usize) {
                members.insert(p);
            }
        }
        if members.is_clear() {
            return Err(Error::NotAccessibleAnywhere {
                event: format!("{a:?}"),
            });
        }
        if let Some((p, q)) = self.tagged.poset.upper_violation(&members) {
            return Err(Error::FunctorLaw {
                detail: format!("event global element not upward closed: {p} without {q}"),
            });
        }
        Ok(GlobalElement { members })
    }
}

/// The valuation functor: at each partition its homomorphic valuations, with
/// restriction along coarsening.
pub fn valuation_varying_set(tagged: &TaggedPoset) -> Result<VaryingSet<HomValuation>> {
    let stages: Vec<Vec<HomValuation>> = tagged.partitions.iter().map(homs).collect();
    let partitions = tagged.partitions.clone();
    VaryingSet::build(
        tagged.poset.clone(),
        stages,
        move |_, q, v: &HomValuation| {
            v.restrict_to(&partitions[q])
                .expect("poset order is refinement")
        },
    )
}

/// The valuation functor together with a generated subobject: at each stage,
/// the restrictions of valuations living on generator-poset members at or
/// below it. With the generator set equal to the whole poset the subobject
/// collapses to the full functor (reflexivity supplies every stage), and the
/// degeneracy flag records that.
pub struct ValuationTopos {
    pub tagged: TaggedPoset,
    pub varying: VaryingSet<HomValuation>,
    pub subobject: Subobject,
    /// Local indices of the generator sub-poset Q.
    pub generators: FixedBitSet,
    /// Set when the subobject equals the whole functor stage-wise.
    pub degenerate: bool,
}

impl ValuationTopos {
    /// The verbatim construction: generators are the entire poset.
    pub fn literal(tagged: TaggedPoset) -> Result<Self> {
        let mut q = FixedBitSet::with_capacity(tagged.len());
        q.insert_range(..);
        Self::with_generators(tagged, q)
    }

    /// Generators restricted to a sub-poset Q (given by local indices).
    pub fn with_generators(tagged: TaggedPoset, generators: FixedBitSet) -> Result<Self> {
        let varying = valuation_varying_set(&tagged)?;
        let mut stages = Vec::with_capacity(tagged.len());
        for p in 0..tagged.len() {
            let mut present = FixedBitSet::with_capacity(varying.stage(p).len());
            for q in generators.ones() {
                if !tagged.poset.leq(q, p) {
                    continue;
                }
                for w in varying.stage(q) {
                    let restricted = w
                        .restrict_to(&tagged.partitions[p])
                        .expect("q refines p in the poset");
                    let idx = varying
                        .index_in_stage(p, &restricted)
                        .expect("restriction is a valuation of the stage");
                    present.insert(idx);
                }
            }
            stages.push(present);
        }
        let subobject = Subobject::new(&varying, stages)?;
        let degenerate = subobject.is_total(&varying);
        Ok(ValuationTopos {
            tagged,
            varying,
            subobject,
            generators,
            degenerate,
        })
    }

    /// The global element of a pooled valuation: the stages at or above its
    /// home partition where its restriction lands in the subobject. With the
    /// literal subobject this is exactly the cone above the home.
    pub fn global_element(&self, v: &HomValuation) -> Result<GlobalElement> {
        let home = self
            .tagged
            .index_of(v.partition())
            .ok_or(Error::HomeNotInPoset)?;
        let mut members = FixedBitSet::with_capacity(self.tagged.len());
        for p in self.tagged.poset.up_set(home).ones() {
            let restricted = v
                .restrict_to(&self.tagged.partitions[p])
                .expect("p is a coarsening of the home");
            let idx = self
                .varying
                .index_in_stage(p, &restricted)
                .expect("restriction is a stage valuation");
            if self.subobject.contains_index(p, idx) {
                members.insert(p);
            }
        }
        if let Some((p, q)) = self.tagged.poset.upper_violation(&members) {
            return Err(Error::FunctorLaw {
                detail: format!("valuation global element not upward closed: {p} without {q}"),
            });
        }
        Ok(GlobalElement { members })
    }

    /// The embedding of every pooled valuation into upper sets, with the
    /// collision report: groups of distinct valuations sharing one image.
    pub fn h_map(&self) -> Result<HMap> {
        let mut entries = Vec::new();
        for p in 0..self.tagged.len() {
            for v in self.varying.stage(p) {
                let g = self.global_element(v)?;
                entries.push((v.clone(), g));
            }
        }
        let mut collisions: Vec<Vec<usize>> = Vec::new();
        let mut seen: Vec<(FixedBitSet, Vec<usize>)> = Vec::new();
        for (i, (_, g)) in entries.iter().enumerate() {
            match seen.iter_mut().find(|(s, _)| *s == g.members) {
                Some((_, bucket)) => bucket.push(i),
                None => seen.push((g.members.clone(), vec![i])),
            }
        }
        for (_, bucket) in seen {
            if bucket.len() > 1 {
                collisions.push(bucket);
            }
        }
        Ok(HMap {
            entries,
            collisions,
        })
    }
}

/// The valuation-to-upper-set table and its collisions.
#[derive(Clone, Debug)]
pub struct HMap {
    pub entries: Vec<(HomValuation, GlobalElement)>,
    /// Indices into `entries`, grouped when images coincide.
    pub collisions: Vec<Vec<usize>>,
}

impl HMap {
    /// Distinct images, in first-appearance order.
    pub fn image_count(&self) -> usize {
        let mut seen: Vec<&FixedBitSet> = Vec::new();
        for (_, g) in &self.entries {
            if !seen.contains(&&g.members) {
                seen.push(&g.members);
            }
        }
        seen.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grainings::{GrainingPoset, Tag};
    use crate::partition::Partition;
    use crate::scalar::Scalar;
    use crate::topos::functor::{characteristic, characteristic_is_natural};

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

    fn bd(t: &HistoriesTheory) -> TaggedPoset {
        GrainingPoset::build(t)
            .unwrap()
            .tagged(Tag::Decoherent)
            .unwrap()
    }

    // a genuine two-history probability theory (uniform diagonal matrix)
    fn two_coin() -> HistoriesTheory {
        let half = crate::scalar::parse_rational("1/2").unwrap();
        let zero = crate::scalar::parse_rational("0").unwrap();
        let rows = vec![
            vec![
                Scalar::exact(half.clone(), zero.clone()),
                Scalar::exact_int(0, 0),
            ],
            vec![Scalar::exact_int(0, 0), Scalar::exact(half, zero)],
        ];
        HistoriesTheory::new(
            crate::space::SampleSpace::new(["a", "b"]).unwrap(),
            crate::measure::DecoherenceMatrix::new(rows).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn accessible_stages_on_three_path() {
        let t = three_path();
        let et = EventTopos::build(&t, bd(&t)).unwrap();
        // stage at the coarsest partition: union of the three sublattices
        let top = et.tagged.index_of(&Partition::coarsest(3)).unwrap();
        let events = et.accessible_events(top);
        assert_eq!(events.len(), 6);
        for e in [
            Event::empty(3),
            ev(&t, &["a"]),
            ev(&t, &["b"]),
            ev(&t, &["a", "c"]),
            ev(&t, &["b", "c"]),
            Event::full(3),
        ] {
            assert!(events.contains(&e));
        }
        // at a minimal element the stage is its own sublattice
        let fine = et
            .tagged
            .index_of(&Partition::new(vec![ev(&t, &["a"]), ev(&t, &["b", "c"])]).unwrap())
            .unwrap();
        assert_eq!(et.accessible_events(fine).len(), 4);
        et.accessible.verify(&et.varying).unwrap();
        characteristic_is_natural(&et.varying, &et.accessible).unwrap();
    }

    #[test]
    fn full_algebra_stage_when_finest_is_present() {
        // probability theory: every partition decoherent, so the finest is in
        // the poset and every event is accessible everywhere above it
        let t = two_coin();
        let et = EventTopos::build(&t, bd(&t)).unwrap();
        let fine = et.tagged.index_of(&Partition::finest(2)).unwrap();
        assert_eq!(et.accessible_events(fine).len(), 4);
    }

    #[test]
    fn event_global_elements() {
        let t = three_path();
        let et = EventTopos::build(&t, bd(&t)).unwrap();
        // the full and empty events are accessible everywhere
        for e in [Event::full(3), Event::empty(3)] {
            let g = et.global_element(e).unwrap();
            assert_eq!(g.members.count_ones(..), et.tagged.len());
        }
        // {a} is accessible from its own partition and the coarsest
        let g = et.global_element(ev(&t, &["a"])).unwrap();
        let expect: Vec<usize> = vec![
            et.tagged
                .index_of(&Partition::new(vec![ev(&t, &["a"]), ev(&t, &["b", "c"])]).unwrap())
                .unwrap(),
            et.tagged.index_of(&Partition::coarsest(3)).unwrap(),
        ];
        let mut got: Vec<usize> = g.members.ones().collect();
        got.sort_unstable();
        let mut expect = expect;
        expect.sort_unstable();
        assert_eq!(got, expect);
        // {a,b} is in no decoherent sublattice
        assert!(matches!(
            et.global_element(ev(&t, &["a", "b"])),
            Err(Error::NotAccessibleAnywhere { .. })
        ));
        // characteristic at the top stage agrees with the global element
        let top = et.tagged.index_of(&Partition::coarsest(3)).unwrap();
        let sieve = characteristic(&et.varying, &et.accessible, top, &ev(&t, &["a"])).unwrap();
        assert_eq!(
            sieve.members,
            et.global_element(ev(&t, &["a"]))
                .unwrap()
                .sieve_at(&et.tagged, top)
        );
    }

    #[test]
    fn literal_subobject_is_degenerate() {
        let t = three_path();
        let vt = ValuationTopos::literal(bd(&t)).unwrap();
        assert!(vt.degenerate);
        assert_eq!(vt.varying.stage_sizes(), vec![1, 2, 2]);
        // every global element is the cone above the home partition
        for p in 0..vt.tagged.len() {
            for v in vt.varying.stage(p) {
                let g = vt.global_element(v).unwrap();
                assert_eq!(&g.members, vt.tagged.poset.up_set(p));
            }
        }
        // valuations sharing a home partition collide
        let hm = vt.h_map().unwrap();
        assert_eq!(hm.entries.len(), 5);
        assert_eq!(hm.collisions.len(), 2);
        assert_eq!(hm.image_count(), 3);
    }

    #[test]
    fn generated_subobject_from_separable_poset() {
        let t = three_path();
        let gp = GrainingPoset::build(&t).unwrap();
        let tagged = gp.tagged(Tag::Decoherent).unwrap();
        // Q = the separable-decoherent members, locally indexed
        let pd = gp.sub_poset(Tag::SeparableDecoherent).unwrap();
        let mut q = FixedBitSet::with_capacity(tagged.len());
        for (local, &global) in tagged.global.iter().enumerate() {
            if pd.members.contains(global) {
                q.insert(local);
            }
        }
        let vt = ValuationTopos::with_generators(tagged, q).unwrap();
        assert!(!vt.degenerate);
        // only the coarsest partition generates: its stage keeps one
        // valuation, the finer stages are empty
        let top = vt.tagged.index_of(&Partition::coarsest(3)).unwrap();
        assert_eq!(vt.subobject.stage_sizes().iter().sum::<usize>(), 1);
        assert!(vt.subobject.contains_index(top, 0));
        // all five valuations now map to the same global element {top}
        let hm = vt.h_map().unwrap();
        assert_eq!(hm.image_count(), 1);
        let expect: Vec<usize> = vec![top];
        for (_, g) in &hm.entries {
            assert_eq!(g.members.ones().collect::<Vec<_>>(), expect);
        }
    }

    #[test]
    fn empty_generator_set_gives_empty_subobject() {
        let t = three_path();
        let tagged = bd(&t);
        let q = FixedBitSet::with_capacity(tagged.len());
        let vt = ValuationTopos::with_generators(tagged, q).unwrap();
        assert!(!vt.degenerate);
        assert_eq!(vt.subobject.stage_sizes(), vec![0, 0, 0]);
        // every global element is empty
        for p in 0..vt.tagged.len() {
            for v in vt.varying.stage(p) {
                assert!(vt.global_element(v).unwrap().members.is_clear());
            }
        }
    }

    #[test]
    fn home_outside_poset_is_rejected() {
        let t = three_path();
        let vt = ValuationTopos::literal(bd(&t)).unwrap();
        let foreign = HomValuation::new(Partition::finest(3), ev(&t, &["a"])).unwrap();
        assert!(matches!(
            vt.global_element(&foreign),
            Err(Error::HomeNotInPoset)
        ));
    }

    #[test]
    fn bottom_home_covers_whole_poset() {
        // probability theory on two histories: all partitions decoherent,
        // finest is the poset bottom; literal subobject puts its valuations
        // everywhere above
        let t = two_coin();
        let vt = ValuationTopos::literal(bd(&t)).unwrap();
        let fine = vt.tagged.index_of(&Partition::finest(2)).unwrap();
        let v = &vt.varying.stage(fine)[0].clone();
        let g = vt.global_element(v).unwrap();
        assert_eq!(g.members.count_ones(..), vt.tagged.len());
    }
}
