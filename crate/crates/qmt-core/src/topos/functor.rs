//! The functor core: varying sets, subobjects, sieves, characteristic maps,
//! and the bijection between global sections of the classifier and upper
//! sets.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::FinitePoset;

/// Posets beyond this size are rejected by the global-section census; the
/// candidate count is 2^len.
pub const GAMMA_ENUM_LIMIT: usize = 16;

/// A covariant set-valued functor on a finite poset: a finite set at each
/// element and a transition function along every relation, satisfying the
/// identity and composition laws (verified at construction).
#[derive(Clone, Debug)]
pub struct VaryingSet<T> {
    poset: FinitePoset,
    stages: Vec<Vec<T>>,
    // transitions[(p,q)][i] = index in stage q of the image of stage p's i-th
    // element, for every p <= q
    transitions: BTreeMap<(usize, usize), Vec<usize>>,
}

impl<T: Clone + Eq + std::fmt::Debug> VaryingSet<T> {
    /// Build from stages and a transition rule. The rule is applied along
    /// every p <= q; its outputs must land in the target stage, and the
    /// resulting family must satisfy the functor laws.
    pub fn build<F>(poset: FinitePoset, stages: Vec<Vec<T>>, mut map: F) -> Result<Self>
    where
        F: FnMut(usize, usize, &T) -> T,
    {
        if stages.len() != poset.len() {
            return Err(Error::FunctorLaw {
                detail: format!(
                    "{} stages for a poset of {} elements",
                    stages.len(),
                    poset.len()
                ),
            });
        }
        let mut transitions = BTreeMap::new();
        for p in 0..poset.len() {
            for q in poset.up_set(p).ones() {
                let mut row = Vec::with_capacity(stages[p].len());
                for x in &stages[p] {
                    let y = map(p, q, x);
                    let idx = stages[q].iter().position(|e| *e == y).ok_or_else(|| {
                        Error::FunctorLaw {
                            detail: format!(
                                "transition {p} -> {q} leaves the target stage at {x:?}"
                            ),
                        }
                    })?;
                    row.push(idx);
                }
                transitions.insert((p, q), row);
            }
        }
        let vs = VaryingSet {
            poset,
            stages,
            transitions,
        };
        vs.verify_functor_laws()?;
        Ok(vs)
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn stage(&self, p: usize) -> &[T] {
        &self.stages[p]
    }

    pub fn stage_sizes(&self) -> Vec<usize> {
        self.stages.iter().map(Vec::len).collect()
    }

    pub fn index_in_stage(&self, p: usize, x: &T) -> Option<usize> {
        self.stages[p].iter().position(|e| e == x)
    }

    /// Transport a stage element along p <= q, by index.
    pub fn transition_index(&self, p: usize, q: usize, i: usize) -> Result<usize> {
        self.transitions
            .get(&(p, q))
            .and_then(|row| row.get(i).copied())
            .ok_or(Error::ForeignElement { index: q })
    }

    /// Transport a stage element along p <= q, by value.
    pub fn transport(&self, p: usize, q: usize, x: &T) -> Result<&T> {
        let i = self.index_in_stage(p, x).ok_or_else(|| Error::FunctorLaw {
            detail: format!("{x:?} is not in stage {p}"),
        })?;
        let j = self.transition_index(p, q, i)?;
        Ok(&self.stages[q][j])
    }

    /// Identity and composition laws over every comparable pair and triple.
    pub fn verify_functor_laws(&self) -> Result<()> {
        let n = self.poset.len();
        for p in 0..n {
            let id = &self.transitions[&(p, p)];
            if id.iter().enumerate().any(|(i, &j)| i != j) {
                return Err(Error::FunctorLaw {
                    detail: format!("transition {p} -> {p} is not the identity"),
                });
            }
            for q in self.poset.up_set(p).ones() {
                for r in self.poset.up_set(q).ones() {
                    let pq = &self.transitions[&(p, q)];
                    let qr = &self.transitions[&(q, r)];
                    let pr = &self.transitions[&(p, r)];
                    for i in 0..self.stages[p].len() {
                        if qr[pq[i]] != pr[i] {
                            return Err(Error::FunctorLaw {
                                detail: format!(
                                    "composition fails at {p} <= {q} <= {r}, element {i}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The subobject containing every stage completely.
    pub fn full_subobject(&self) -> Subobject {
        let stages = self
            .stages
            .iter()
            .map(|s| {
                let mut b = FixedBitSet::with_capacity(s.len());
                b.insert_range(..);
                b
            })
            .collect();
        Subobject { stages }
    }

    /// The empty subobject.
    pub fn empty_subobject(&self) -> Subobject {
        Subobject {
            stages: self
                .stages
                .iter()
                .map(|s| FixedBitSet::with_capacity(s.len()))
                .collect(),
        }
    }
}

/// The constant varying set: the same fiber at every stage, identity
/// transitions. With a singleton fiber this is the terminal object.
pub fn constant_varying_set<T: Clone + Eq + std::fmt::Debug>(
    poset: FinitePoset,
    fiber: Vec<T>,
) -> Result<VaryingSet<T>> {
    let stages = vec![fiber; poset.len()];
    VaryingSet::build(poset, stages, |_, _, x| x.clone())
}

/// A subobject of a varying set: a subset of each stage such that every
/// transition maps the subset into the target subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subobject {
    stages: Vec<FixedBitSet>,
}

impl Subobject {
    /// Verify the commuting squares and wrap the stage subsets.
    pub fn new<T: Clone + Eq + std::fmt::Debug>(
        vs: &VaryingSet<T>,
        stages: Vec<FixedBitSet>,
    ) -> Result<Self> {
        let sub = Subobject { stages };
        sub.verify(vs)?;
        Ok(sub)
    }

    pub fn verify<T: Clone + Eq + std::fmt::Debug>(&self, vs: &VaryingSet<T>) -> Result<()> {
        if self.stages.len() != vs.poset().len() {
            return Err(Error::NotASubobject {
                stage: self.stages.len(),
                element: "stage count mismatch".into(),
                target: vs.poset().len(),
            });
        }
        for p in 0..vs.poset().len() {
            for q in vs.poset().up_set(p).ones() {
                for i in self.stages[p].ones() {
                    let j = vs.transition_index(p, q, i)?;
                    if !self.stages[q].contains(j) {
                        return Err(Error::NotASubobject {
                            stage: p,
                            element: format!("{:?}", vs.stage(p)[i]),
                            target: q,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn stage(&self, p: usize) -> &FixedBitSet {
        &self.stages[p]
    }

    pub fn contains_index(&self, p: usize, i: usize) -> bool {
        self.stages[p].contains(i)
    }

    pub fn stage_sizes(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.count_ones(..)).collect()
    }

    /// Stage-wise equality with the whole varying set.
    pub fn is_total<T>(&self, vs: &VaryingSet<T>) -> bool {
        self.stages
            .iter()
            .enumerate()
            .all(|(p, s)| s.count_ones(..) == vs.stages[p].len())
    }
}

/// A sieve at a poset element: an upward-closed set of elements above it.
/// The sieves at p are the stage of the subobject classifier there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sieve {
    pub at: usize,
    pub members: FixedBitSet,
}

impl Sieve {
    pub fn verify(&self, poset: &FinitePoset) -> Result<()> {
        poset.check_element(self.at)?;
        for m in self.members.ones() {
            if !poset.leq(self.at, m) {
                return Err(Error::NotAPartialOrder {
                    reason: format!("sieve at {} contains {} below it", self.at, m),
                });
            }
        }
        if let Some((p, q)) = poset.upper_violation(&self.members) {
            return Err(Error::NotAPartialOrder {
                reason: format!("sieve at {} not upward closed: {p} without {q}", self.at),
            });
        }
        Ok(())
    }

    /// The maximal sieve at its base.
    pub fn is_full(&self, poset: &FinitePoset) -> bool {
        self.members == *poset.up_set(self.at)
    }

    /// Classifier restriction along at <= q: intersect with the upper cone.
    pub fn restrict(&self, poset: &FinitePoset, q: usize) -> Result<Sieve> {
        poset.check_element(q)?;
        if !poset.leq(self.at, q) {
            return Err(Error::NotComparable);
        }
        let mut members = self.members.clone();
        members.intersect_with(poset.up_set(q));
        Ok(Sieve { at: q, members })
    }
}

/// All sieves at an element: the upper sets of the cone above it.
pub fn sieves_at(poset: &FinitePoset, p: usize) -> Result<Vec<Sieve>> {
    poset.check_element(p)?;
    let cone: Vec<usize> = poset.up_set(p).ones().collect();
    let local = poset.restrict(&cone)?;
    let mut out = Vec::new();
    for s in local.upper_sets()? {
        let mut members = FixedBitSet::with_capacity(poset.len());
        for i in s.ones() {
            members.insert(cone[i]);
        }
        out.push(Sieve { at: p, members });
    }
    Ok(out)
}

/// The characteristic map of a subobject, evaluated at one stage element:
/// the sieve of elements above p where the transported element lands inside
/// the subobject.
pub fn characteristic<T: Clone + Eq + std::fmt::Debug>(
    vs: &VaryingSet<T>,
    sub: &Subobject,
    p: usize,
    x: &T,
) -> Result<Sieve> {
    sub.verify(vs)?;
    vs.poset().check_element(p)?;
    let i = vs.index_in_stage(p, x).ok_or_else(|| Error::FunctorLaw {
        detail: format!("{x:?} is not in stage {p}"),
    })?;
    let mut members = FixedBitSet::with_capacity(vs.poset().len());
    for q in vs.poset().up_set(p).ones() {
        let j = vs.transition_index(p, q, i)?;
        if sub.contains_index(q, j) {
            members.insert(q);
        }
    }
    let sieve = Sieve { at: p, members };
    sieve.verify(vs.poset())?;
    Ok(sieve)
}

/// Naturality of the characteristic family: for p <= q and every x at p,
/// the sieve of the transported element equals the restricted sieve.
pub fn characteristic_is_natural<T: Clone + Eq + std::fmt::Debug>(
    vs: &VaryingSet<T>,
    sub: &Subobject,
) -> Result<()> {
    for p in 0..vs.poset().len() {
        for q in vs.poset().up_set(p).ones() {
            for x in vs.stage(p) {
                let here = characteristic(vs, sub, p, x)?;
                let there = characteristic(vs, sub, q, vs.transport(p, q, x)?)?;
                if here.restrict(vs.poset(), q)? != there {
                    return Err(Error::FunctorLaw {
                        detail: format!("characteristic not natural along {p} <= {q} at {x:?}"),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Census of the classifier's global sections.
///
/// A global section assigns a sieve to every element, compatibly with
/// restriction. Compatibility forces the section to be determined by its
/// diagonal {p : p in sieve(p)}, so enumerating all 2^len diagonals and
/// filtering by full verification enumerates all sections exactly. The check
/// succeeds when the valid sections are precisely the upper sets of the
/// poset, under the canonical map U -> (p -> U n up(p)).
pub fn gamma_iso_check(poset: &FinitePoset) -> Result<bool> {
    let n = poset.len();
    if n > GAMMA_ENUM_LIMIT {
        return Err(Error::PosetTooLarge {
            len: n,
            limit: GAMMA_ENUM_LIMIT,
            operation: "global section census".into(),
        });
    }
    let uppers = poset.upper_sets()?;
    let mut valid_diagonals: Vec<FixedBitSet> = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let mut s = FixedBitSet::with_capacity(n);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                s.insert(i);
            }
        }
        // candidate family: sieve(p) = {r >= p : r in s}
        let family: Vec<FixedBitSet> = (0..n)
            .map(|p| {
                let mut f = s.clone();
                f.intersect_with(poset.up_set(p));
                f
            })
            .collect();
        // every candidate sieve must be upward closed, and the family must
        // be compatible under restriction
        let sieves_ok = family.iter().all(|f| poset.is_upper(f));
        let compatible = (0..n).all(|p| {
            poset.up_set(p).ones().all(|q| {
                let mut restricted = family[p].clone();
                restricted.intersect_with(poset.up_set(q));
                restricted == family[q]
            })
        });
        if sieves_ok && compatible {
            valid_diagonals.push(s);
        }
    }
    // bijection: the valid sections are exactly the upper sets
    if valid_diagonals.len() != uppers.len() {
        return Ok(false);
    }
    for u in &uppers {
        if !valid_diagonals.contains(u) {
            return Ok(false);
        }
        // the canonical family of u recovers u on the diagonal
        let recovered: FixedBitSet = {
            let mut r = FixedBitSet::with_capacity(n);
            for p in 0..n {
                let mut f = u.clone();
                f.intersect_with(poset.up_set(p));
                if f.contains(p) {
                    r.insert(p);
                }
            }
            r
        };
        if recovered != *u {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_functor_and_terminal_object() {
        let p = FinitePoset::chain(3);
        let vs = constant_varying_set(p.clone(), vec!['x', 'y']).unwrap();
        assert_eq!(vs.stage_sizes(), vec![2, 2, 2]);
        assert_eq!(vs.transport(0, 2, &'x').unwrap(), &'x');
        let terminal = constant_varying_set(p, vec![()]).unwrap();
        assert_eq!(terminal.stage_sizes(), vec![1, 1, 1]);
        // empty poset: empty functor
        let empty = constant_varying_set(FinitePoset::antichain(0), Vec::<u8>::new()).unwrap();
        assert_eq!(empty.stage_sizes(), Vec::<usize>::new());
    }

    #[test]
    fn functor_law_violations_are_caught() {
        // swapping along 0 -> 1 but nowhere else breaks composition:
        // (1 -> 2) after (0 -> 1) is a swap, (0 -> 2) is the identity
        let p = FinitePoset::chain(3);
        let stages = vec![vec![0u8, 1], vec![0, 1], vec![0, 1]];
        let bad = VaryingSet::build(
            p,
            stages,
            |p, q, x| {
                if (p, q) == (0, 1) {
                    1 - *x
                } else {
                    *x
                }
            },
        );
        assert!(matches!(bad, Err(Error::FunctorLaw { .. })));
    }

    #[test]
    fn map_leaving_stage_is_caught() {
        let p = FinitePoset::chain(2);
        let stages = vec![vec![5u8], vec![7u8]];
        let bad = VaryingSet::build(p, stages, |_, _, _| 9);
        assert!(matches!(bad, Err(Error::FunctorLaw { .. })));
    }

    #[test]
    fn subobject_squares() {
        let p = FinitePoset::chain(2);
        let vs = constant_varying_set(p, vec![0u8, 1]).unwrap();
        // keeping {0} at both stages commutes (identity transitions)
        let mut s0 = FixedBitSet::with_capacity(2);
        s0.insert(0);
        let sub = Subobject::new(&vs, vec![s0.clone(), s0.clone()]).unwrap();
        assert_eq!(sub.stage_sizes(), vec![1, 1]);
        // keeping {0} below and {} above escapes
        let bad = Subobject::new(&vs, vec![s0, FixedBitSet::with_capacity(2)]);
        assert!(matches!(bad, Err(Error::NotASubobject { .. })));
    }

    #[test]
    fn sieve_counts_on_small_posets() {
        // chain p < q: 2 sieves at the top, 3 at the bottom
        let c = FinitePoset::chain(2);
        assert_eq!(sieves_at(&c, 1).unwrap().len(), 2);
        assert_eq!(sieves_at(&c, 0).unwrap().len(), 3);
        // a maximal element always has exactly 2 sieves
        let v = FinitePoset::from_leq(3, |i, j| i == j || j == 2).unwrap();
        assert_eq!(sieves_at(&v, 2).unwrap().len(), 2);
        // antichain: 2 sieves at each element
        let a = FinitePoset::antichain(4);
        for p in 0..4 {
            assert_eq!(sieves_at(&a, p).unwrap().len(), 2);
        }
        for s in sieves_at(&v, 0).unwrap() {
            s.verify(&v).unwrap();
        }
    }

    #[test]
    fn characteristic_of_full_and_empty() {
        let p = FinitePoset::chain(3);
        let vs = constant_varying_set(p.clone(), vec![42u8]).unwrap();
        let full = vs.full_subobject();
        for q in 0..3 {
            let s = characteristic(&vs, &full, q, &42).unwrap();
            assert!(s.is_full(vs.poset()));
        }
        let empty = vs.empty_subobject();
        for q in 0..3 {
            let s = characteristic(&vs, &empty, q, &42).unwrap();
            assert_eq!(s.members.count_ones(..), 0);
        }
        characteristic_is_natural(&vs, &full).unwrap();
        characteristic_is_natural(&vs, &empty).unwrap();
    }

    #[test]
    fn characteristic_cuts_at_the_boundary() {
        // subobject present only at the top of a chain
        let p = FinitePoset::chain(3);
        let vs = constant_varying_set(p, vec![0u8]).unwrap();
        let mut stages = vec![
            FixedBitSet::with_capacity(1),
            FixedBitSet::with_capacity(1),
            FixedBitSet::with_capacity(1),
        ];
        stages[1].insert(0);
        stages[2].insert(0);
        let sub = Subobject::new(&vs, stages).unwrap();
        let s = characteristic(&vs, &sub, 0, &0).unwrap();
        let members: Vec<usize> = s.members.ones().collect();
        assert_eq!(members, vec![1, 2]);
        characteristic_is_natural(&vs, &sub).unwrap();
    }

    #[test]
    fn gamma_census_on_small_posets() {
        // chain of 2: 3 upper sets, 3 sections
        assert!(gamma_iso_check(&FinitePoset::chain(2)).unwrap());
        // antichain of 2: 4 and 4
        assert!(gamma_iso_check(&FinitePoset::antichain(2)).unwrap());
        // V-shaped poset (two minimal, one top)
        let v = FinitePoset::from_leq(3, |i, j| i == j || j == 2).unwrap();
        assert_eq!(v.upper_sets().unwrap().len(), 5);
        assert!(gamma_iso_check(&v).unwrap());
        assert!(gamma_iso_check(&FinitePoset::chain(5)).unwrap());
    }

    #[test]
    fn gamma_census_by_product_brute_force() {
        // for tiny posets, enumerate the full product of per-element sieves
        // and confirm the census matches
        for poset in [
            FinitePoset::chain(3),
            FinitePoset::antichain(3),
            FinitePoset::from_leq(3, |i, j| i == j || j == 2).unwrap(),
        ] {
            let n = poset.len();
            let per_element: Vec<Vec<Sieve>> =
                (0..n).map(|p| sieves_at(&poset, p).unwrap()).collect();
            let mut count = 0usize;
            let mut idx = vec![0usize; n];
            'outer: loop {
                let family: Vec<&Sieve> = (0..n).map(|p| &per_element[p][idx[p]]).collect();
                let compatible = (0..n).all(|p| {
                    poset
                        .up_set(p)
                        .ones()
                        .all(|q| family[p].restrict(&poset, q).unwrap() == *family[q])
                });
                if compatible {
                    count += 1;
                }
                // advance the mixed-radix counter
                for p in 0..n {
                    idx[p] += 1;
                    if idx[p] < per_element[p].len() {
                        continue 'outer;
                    }
                    idx[p] = 0;
                }
                break;
            }
            assert_eq!(count, poset.upper_sets().unwrap().len());
            assert!(gamma_iso_check(&poset).unwrap());
        }
    }
}
