//! Heyting algebras of upper sets.
//!
//! The upper sets of a finite poset form a Heyting algebra: meet is
//! intersection, join is union, and the relative pseudocomplement is
//! U => V = {p : up(p) n U is contained in V}. A generated algebra closes a
//! set of upper sets under meet and join only; its carrier need not contain
//! the ambient implication, so implication is additionally computed as the
//! relative pseudocomplement within the carrier, and the two are compared.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::FinitePoset;

/// Both routes to an implication value, and whether they agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Implication {
    /// The ambient upper-set implication {p : up(p) n U <= V}.
    pub ambient: FixedBitSet,
    /// Index of the ambient value in the carrier, when it happens to lie
    /// there.
    pub ambient_index: Option<usize>,
    /// The relative pseudocomplement within the carrier: the greatest
    /// carrier element c with c n U <= V.
    pub within_index: usize,
    /// Whether the ambient value and the carrier value coincide.
    pub agree: bool,
}

/// A Heyting algebra whose carrier is a family of upper sets closed under
/// intersection and union.
#[derive(Clone, Debug)]
pub struct HeytingAlgebra {
    poset: FinitePoset,
    carrier: Vec<FixedBitSet>,
    is_full: bool,
}

impl HeytingAlgebra {
    /// The algebra of all upper sets.
    pub fn full(poset: FinitePoset) -> Result<Self> {
        let carrier = poset.upper_sets()?;
        Ok(HeytingAlgebra {
            poset,
            carrier,
            is_full: true,
        })
    }

    /// Close a family of upper sets under pairwise meet and join. The result
    /// is finite (it lives inside the full upper-set algebra) so the
    /// iteration terminates.
    pub fn generated(poset: FinitePoset, generators: &[FixedBitSet]) -> Result<Self> {
        for g in generators {
            if let Some((p, q)) = poset.upper_violation(g) {
                return Err(Error::NotAnUpperSet {
                    member: format!("element {p}"),
                    missing: format!("element {q}"),
                });
            }
        }
        // saturate under pairwise meet and join: each new element is paired
        // against everything already present, exactly once
        let mut seen: std::collections::HashSet<FixedBitSet> = std::collections::HashSet::new();
        let mut carrier: Vec<FixedBitSet> = Vec::new();
        for g in generators {
            if seen.insert(g.clone()) {
                carrier.push(g.clone());
            }
        }
        let mut next = 0;
        while next < carrier.len() {
            let current = carrier[next].clone();
            for i in 0..next {
                let mut meet = current.clone();
                meet.intersect_with(&carrier[i]);
                let mut join = current.clone();
                join.union_with(&carrier[i]);
                for cand in [meet, join] {
                    if seen.insert(cand.clone()) {
                        carrier.push(cand);
                    }
                }
            }
            next += 1;
        }
        carrier.sort_by_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
        Ok(HeytingAlgebra {
            poset,
            carrier,
            is_full: false,
        })
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn carrier(&self) -> &[FixedBitSet] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.is_full
    }

    pub fn index_of(&self, u: &FixedBitSet) -> Option<usize> {
        self.carrier.iter().position(|c| c == u)
    }

    pub fn element(&self, i: usize) -> &FixedBitSet {
        &self.carrier[i]
    }

    /// Order: subset inclusion.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.carrier[i].is_subset(&self.carrier[j])
    }

    /// Meet (intersection). The carrier is closed, so the result is a member.
    pub fn meet(&self, i: usize, j: usize) -> Result<usize> {
        let mut m = self.carrier[i].clone();
        m.intersect_with(&self.carrier[j]);
        self.index_of(&m).ok_or(Error::EmptyCarrier)
    }

    /// Join (union).
    pub fn join(&self, i: usize, j: usize) -> Result<usize> {
        let mut m = self.carrier[i].clone();
        m.union_with(&self.carrier[j]);
        self.index_of(&m).ok_or(Error::EmptyCarrier)
    }

    /// Greatest element: the union of the whole carrier.
    pub fn top(&self) -> Result<usize> {
        let mut t = FixedBitSet::with_capacity(self.poset.len());
        if self.carrier.is_empty() {
            return Err(Error::EmptyCarrier);
        }
        for c in &self.carrier {
            t.union_with(c);
        }
        self.index_of(&t).ok_or(Error::EmptyCarrier)
    }

    /// Least element: the intersection of the whole carrier.
    pub fn bottom(&self) -> Result<usize> {
        if self.carrier.is_empty() {
            return Err(Error::EmptyCarrier);
        }
        let mut b = self.carrier[0].clone();
        for c in &self.carrier[1..] {
            b.intersect_with(c);
        }
        self.index_of(&b).ok_or(Error::EmptyCarrier)
    }

    /// The ambient implication {p : up(p) n U <= V}, an upper set of the
    /// poset (not necessarily in the carrier).
    pub fn implies_ambient(&self, u: &FixedBitSet, v: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.poset.len());
        for p in 0..self.poset.len() {
            let mut cone = self.poset.up_set(p).clone();
            cone.intersect_with(u);
            if cone.is_subset(v) {
                out.insert(p);
            }
        }
        out
    }

    /// Implication both ways: ambient formula, and the relative
    /// pseudocomplement within the carrier (the join of every carrier
    /// element c with c n U <= V; closure under join keeps it inside).
    pub fn implies(&self, i: usize, j: usize) -> Result<Implication> {
        let u = &self.carrier[i];
        let v = &self.carrier[j];
        let ambient = self.implies_ambient(u, v);
        let ambient_index = self.index_of(&ambient);
        let mut within = FixedBitSet::with_capacity(self.poset.len());
        let mut any = false;
        for c in &self.carrier {
            let mut m = c.clone();
            m.intersect_with(u);
            if m.is_subset(v) {
                within.union_with(c);
                any = true;
            }
        }
        if !any {
            // the carrier bottom always satisfies bottom n U <= V, since
            // bottom <= V fails only on an empty carrier
            return Err(Error::EmptyCarrier);
        }
        let within_index = self.index_of(&within).ok_or(Error::EmptyCarrier)?;
        let agree = ambient == within;
        Ok(Implication {
            ambient,
            ambient_index,
            within_index,
            agree,
        })
    }

    /// Verify the algebra laws on the carrier: distributivity and the
    /// residuation property of the within-carrier implication
    /// (c <= (u => v) iff c n u <= v). For the full algebra the ambient
    /// implication must also coincide with the carrier implication.
    pub fn verify(&self) -> Result<()> {
        let k = self.len();
        let fail = |detail: String| Error::FunctorLaw { detail };
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    let left = self.meet(a, self.join(b, c)?)?;
                    let right = self.join(self.meet(a, b)?, self.meet(a, c)?)?;
                    if left != right {
                        return Err(fail(format!("distributivity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                let imp = self.implies(a, b)?;
                if self.is_full && !imp.agree {
                    return Err(fail(format!(
                        "full algebra implication disagrees at ({a},{b})"
                    )));
                }
                for c in 0..k {
                    let lhs = self.leq(c, imp.within_index);
                    let rhs = self.leq(self.meet(c, a)?, b);
                    if lhs != rhs {
                        return Err(fail(format!("residuation fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(())
    }
}
