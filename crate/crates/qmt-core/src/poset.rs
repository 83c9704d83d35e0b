//! Finite posets stored as an explicit order relation, plus the upper-set
//! machinery the topos constructions run on.
//!
//! An upper set is upward closed: p in U and p <= q imply q in U. Upper sets
//! are the global truth values of the functor topos over the poset, so most
//! of the crate's order theory funnels through here.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Elements with upper-set enumeration beyond this are rejected; the output
/// can be exponential in the element count.
pub const UPPER_SET_ENUM_LIMIT: usize = 20;

/// A finite partial order. `up[i]` is the principal upper set of `i`
/// (including `i` itself).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    up: Vec<FixedBitSet>,
}

impl FinitePoset {
    /// Build from a comparison closure; the relation is validated to be
    /// reflexive, antisymmetric, and transitive.
    pub fn from_leq<F>(n: usize, mut leq: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> bool,
    {
        let mut up = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = FixedBitSet::with_capacity(n);
            for j in 0..n {
                if leq(i, j) {
                    row.insert(j);
                }
            }
            up.push(row);
        }
        let poset = FinitePoset { up };
        poset.verify_laws()?;
        Ok(poset)
    }

    /// A total order 0 < 1 < ... < n-1.
    pub fn chain(n: usize) -> Self {
        FinitePoset::from_leq(n, |i, j| i <= j).expect("chain is a partial order")
    }

    /// n pairwise-incomparable elements.
    pub fn antichain(n: usize) -> Self {
        FinitePoset::from_leq(n, |i, j| i == j).expect("antichain is a partial order")
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn check_element(&self, p: usize) -> Result<()> {
        if p >= self.len() {
            return Err(Error::ForeignElement { index: p });
        }
        Ok(())
    }

    /// The principal upper set of p, including p.
    pub fn up_set(&self, p: usize) -> &FixedBitSet {
        &self.up[p]
    }

    pub fn verify_laws(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if !self.up[i].contains(i) {
                return Err(Error::NotAPartialOrder {
                    reason: format!("not reflexive at {i}"),
                });
            }
            for j in self.up[i].ones() {
                if i != j && self.up[j].contains(i) {
                    return Err(Error::NotAPartialOrder {
                        reason: format!("antisymmetry fails at ({i},{j})"),
                    });
                }
                if !self.up[j].is_subset(&self.up[i]) {
                    return Err(Error::NotAPartialOrder {
                        reason: format!("transitivity fails at ({i},{j})"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_upper(&self, s: &FixedBitSet) -> bool {
        self.upper_violation(s).is_none()
    }

    /// A witness that `s` fails upward closure: (member, missing element
    /// above it), if any.
    pub fn upper_violation(&self, s: &FixedBitSet) -> Option<(usize, usize)> {
        for p in s.ones() {
            for q in self.up[p].ones() {
                if !s.contains(q) {
                    return Some((p, q));
                }
            }
        }
        None
    }

    /// Smallest upper set containing `s`.
    pub fn up_closure(&self, s: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        for p in s.ones() {
            out.union_with(&self.up[p]);
        }
        out
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// Elements with nothing strictly below them.
    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&p| (0..self.len()).all(|q| q == p || !self.leq(q, p)))
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&p| self.up[p].count_ones(..) == 1)
            .collect()
    }

    /// Covering pairs (a, b): a < b with nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in self.up[a].ones() {
                if a == b {
                    continue;
                }
                let has_middle = self.up[a]
                    .ones()
                    .any(|c| c != a && c != b && self.up[c].contains(b));
                if !has_middle {
                    edges.push((a, b));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// The induced subposet on `keep`; element k of the result corresponds to
    /// `keep[k]`.
    pub fn restrict(&self, keep: &[usize]) -> Result<FinitePoset> {
        for &p in keep {
            self.check_element(p)?;
        }
        FinitePoset::from_leq(keep.len(), |i, j| self.leq(keep[i], keep[j]))
    }

    /// A linear extension listing maximal elements first. Processing in this
    /// order means every element strictly above `p` appears before `p`.
    pub fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.up[i].count_ones(..), i));
        order
    }

    /// All upper sets of the poset, sorted canonically (by size, then
    /// members). The count can be exponential, so enumeration is limited to
    /// small posets.
    pub fn upper_sets(&self) -> Result<Vec<FixedBitSet>> {
        let n = self.len();
        if n > UPPER_SET_ENUM_LIMIT {
            return Err(Error::PosetTooLarge {
                len: n,
                limit: UPPER_SET_ENUM_LIMIT,
                operation: "upper set enumeration".into(),
            });
        }
        let order = self.descending_order();
        let mut out = Vec::new();
        let mut cur = FixedBitSet::with_capacity(n);
        self.collect_upper(&order, 0, &mut cur, &mut out);
        out.sort_by_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
        Ok(out)
    }

    fn collect_upper(
        &self,
        order: &[usize],
        idx: usize,
        cur: &mut FixedBitSet,
        out: &mut Vec<FixedBitSet>,
    ) {
        if idx == order.len() {
            out.push(cur.clone());
            return;
        }
        let e = order[idx];
        // excluding e is always allowed
        self.collect_upper(order, idx + 1, cur, out);
        // including e requires everything above it (already decided) present
        let can_include = self.up[e].ones().all(|q| q == e || cur.contains(q));
        if can_include {
            cur.insert(e);
            self.collect_upper(order, idx + 1, cur, out);
            cur.set(e, false);
        }
    }
}

/// Render a bitset as a sorted index list, for witnesses and reports.
pub fn set_to_string(s: &FixedBitSet) -> String {
    let v: Vec<String> = s.ones().map(|i| i.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize, members: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &m in members {
            s.insert(m);
        }
        s
    }

    #[test]
    fn law_validation() {
        assert!(FinitePoset::from_leq(3, |i, j| i <= j).is_ok());
        // not reflexive
        assert!(matches!(
            FinitePoset::from_leq(2, |i, j| i < j),
            Err(Error::NotAPartialOrder { .. })
        ));
        // not antisymmetric
        assert!(matches!(
            FinitePoset::from_leq(2, |_, _| true),
            Err(Error::NotAPartialOrder { .. })
        ));
        // not transitive: 0<=1, 1<=2, but not 0<=2
        assert!(matches!(
            FinitePoset::from_leq(3, |i, j| i == j || (i, j) == (0, 1) || (i, j) == (1, 2)),
            Err(Error::NotAPartialOrder { .. })
        ));
    }

    #[test]
    fn chain_structure() {
        let c = FinitePoset::chain(3);
        assert!(c.leq(0, 2));
        assert!(!c.leq(2, 0));
        assert_eq!(c.minimal_elements(), vec![0]);
        assert_eq!(c.maximal_elements(), vec![2]);
        assert_eq!(c.hasse_edges(), vec![(0, 1), (1, 2)]);
        // upper sets of a 3-chain: {}, {2}, {1,2}, {0,1,2}
        let ups = c.upper_sets().unwrap();
        assert_eq!(ups.len(), 4);
        assert!(ups.contains(&bits(3, &[])));
        assert!(ups.contains(&bits(3, &[2])));
        assert!(ups.contains(&bits(3, &[1, 2])));
        assert!(ups.contains(&bits(3, &[0, 1, 2])));
    }

    #[test]
    fn antichain_structure() {
        let a = FinitePoset::antichain(3);
        assert_eq!(a.upper_sets().unwrap().len(), 8);
        assert!(a.hasse_edges().is_empty());
        assert_eq!(a.minimal_elements(), vec![0, 1, 2]);
    }

    #[test]
    fn upper_set_checks() {
        let c = FinitePoset::chain(3);
        assert!(c.is_upper(&bits(3, &[1, 2])));
        assert!(!c.is_upper(&bits(3, &[1])));
        assert_eq!(c.upper_violation(&bits(3, &[1])), Some((1, 2)));
        assert_eq!(c.up_closure(&bits(3, &[0])), bits(3, &[0, 1, 2]));
        assert!(c.is_upper(&c.empty_set()));
        assert!(c.is_upper(&c.full_set()));
    }

    #[test]
    fn restriction_keeps_order() {
        let c = FinitePoset::chain(4);
        let r = c.restrict(&[1, 3]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.leq(0, 1));
        assert!(!r.leq(1, 0));
    }

    #[test]
    fn diamond_hasse() {
        // 0 < 1, 0 < 2, 1 < 3, 2 < 3
        let leq = |i: usize, j: usize| i == j || (i == 0) || (j == 3);
        let d = FinitePoset::from_leq(4, leq).unwrap();
        assert_eq!(d.hasse_edges(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        // upper sets: {}, {3}, {1,3}, {2,3}, {1,2,3}, all = 6
        assert_eq!(d.upper_sets().unwrap().len(), 6);
    }
}
