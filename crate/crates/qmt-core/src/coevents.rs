//! Coevents: Z2-valued truth valuations on the full event algebra that need
//! not be homomorphisms.
//!
//! A coevent is multiplicative when it preserves meets, equivalently when its
//! support is a filter; a multiplicative coevent is determined by its dual
//! event, the principal element of that filter, and `*` is an involution
//! between nonempty events and these coevents. Preclusion demands that null
//! events be valued false. The schemes here pick out distinguished sets of
//! preclusive multiplicative coevents:
//!
//! * the multiplicative scheme `M`: minimal preclusive multiplicative
//!   coevents;
//! * `Cons_D` / `Cons_C`: duals of events isolated by a decoherent partition
//!   (with or without the preclusivity of the induced valuation);
//! * `M_PC` / `Cons_M`: coevents preclusive and classical on every decoherent
//!   partition, and the minimal ones among them.
//!
//! Two readings are implemented wherever the definitions underdetermine the
//! outcome. Domination runs in the direction "phi dominates psi iff
//! supp(phi) is contained in supp(psi)", which for duals reverses inclusion;
//! combining that with minimality verbatim selects dual-inclusion-maximal
//! coevents and breaks the scheme's classical reduction, so the default
//! `Primitive` mode takes dual-inclusion-minimal coevents and the `Literal`
//! mode keeps the verbatim reading demonstrable behind a flag. Similarly the
//! `Cons` schemes default to the support-equality (`Literal`) reading, which
//! forces the isolating partition, with the block-membership (`Loose`)
//! reading selectable.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::grainings::{decoherent_partitions, is_decoherent};
use crate::measure::HistoriesTheory;
use crate::partition::Partition;
use crate::space::{all_events, Event, Z2};

/// An arbitrary coevent, stored by its support (the events it maps to 1).
/// The everywhere-zero map is excluded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coevent {
    width: usize,
    support: Vec<Event>,
    member: FixedBitSet, // indexed by event mask
}

impl Coevent {
    pub fn new(n: usize, support: Vec<Event>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptyCoevent);
        }
        let mut member = FixedBitSet::with_capacity(1 << n);
        for e in &support {
            if e.width() != n {
                return Err(Error::ForeignEvent {
                    event: format!("{e:?}"),
                });
            }
            member.insert(e.mask() as usize);
        }
        let mut support: Vec<Event> = member
            .ones()
            .map(|m| Event::from_mask(m as u32, n))
            .collect();
        support.sort();
        Ok(Coevent {
            width: n,
            support,
            member,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The support, in canonical event order.
    pub fn support(&self) -> &[Event] {
        &self.support
    }

    pub fn eval(&self, b: Event) -> Result<Z2> {
        if b.width() != self.width {
            return Err(Error::ForeignEvent {
                event: format!("{b:?}"),
            });
        }
        Ok(Z2::from_bool(self.member.contains(b.mask() as usize)))
    }

    fn contains(&self, e: Event) -> bool {
        self.member.contains(e.mask() as usize)
    }

    /// Filter test: the support is upward closed and closed under pairwise
    /// intersection. Agrees with the pairwise multiplicative rule; the rule
    /// itself is checked by [`Coevent::multiplicative_rule_witness`].
    pub fn is_multiplicative(&self) -> bool {
        for e in &self.support {
            // upward closure
            if !e.supersets().all(|s| self.contains(s)) {
                return false;
            }
        }
        for (i, a) in self.support.iter().enumerate() {
            for b in &self.support[i..] {
                if !self.contains(a.intersect(*b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Direct check of phi(A n B) = phi(A) n phi(B) over all event pairs.
    /// Returns a violating pair, or None when the rule holds. This is the
    /// second, definition-literal route; it must agree with
    /// [`Coevent::is_multiplicative`].
    pub fn multiplicative_rule_witness(&self) -> Option<(Event, Event)> {
        for a in all_events(self.width) {
            for b in all_events(self.width) {
                let lhs = self.contains(a.intersect(b));
                let rhs = self.contains(a) && self.contains(b);
                if lhs != rhs {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// The dual event: the principal element of the support filter.
    pub fn dual(&self) -> Result<MultiplicativeCoevent> {
        if let Some((a, b)) = self.multiplicative_rule_witness() {
            return Err(Error::NotMultiplicative {
                a: format!("{a:?}"),
                b: format!("{b:?}"),
            });
        }
        let mut meet = Event::full(self.width);
        for e in &self.support {
            meet = meet.intersect(*e);
        }
        MultiplicativeCoevent::new(meet)
    }

    /// Preclusion: no null event is valued true.
    pub fn is_preclusive(&self, theory: &HistoriesTheory) -> Result<bool> {
        if theory.n() != self.width {
            return Err(Error::SpaceMismatch);
        }
        Ok(!theory.null_events().into_iter().any(|z| self.contains(z)))
    }

    /// Domination: wherever `self` is true, `other` is true.
    pub fn dominates(&self, other: &Coevent) -> Result<bool> {
        if self.width != other.width {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.member.is_subset(&other.member))
    }

    /// Classicality on a partition: exactly one block is valued true,
    /// equivalently the restriction to the generated sublattice is a nonzero
    /// homomorphism.
    pub fn is_classical_on(&self, p: &Partition) -> Result<bool> {
        if p.width() != self.width {
            return Err(Error::SpaceMismatch);
        }
        let hits = p.blocks().iter().filter(|b| self.contains(**b)).count();
        Ok(hits == 1)
    }
}

/// A multiplicative coevent, represented by its dual event: the coevent maps
/// B to 1 exactly when the dual is a subset of B. The dual is nonempty; the
/// coevent with empty dual (true everywhere) is never preclusive and is
/// excluded by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiplicativeCoevent {
    dual: Event,
}

impl MultiplicativeCoevent {
    pub fn new(dual: Event) -> Result<Self> {
        if dual.is_empty() {
            return Err(Error::EmptyDual);
        }
        Ok(MultiplicativeCoevent { dual })
    }

    pub fn dual(&self) -> Event {
        self.dual
    }

    pub fn width(&self) -> usize {
        self.dual.width()
    }

    pub fn eval(&self, b: Event) -> Result<Z2> {
        if b.width() != self.width() {
            return Err(Error::ForeignEvent {
                event: format!("{b:?}"),
            });
        }
        Ok(Z2::from_bool(self.dual.is_subset_of(b)))
    }

    /// Expand to the general representation (the principal filter).
    pub fn to_coevent(&self) -> Coevent {
        Coevent::new(self.width(), self.dual.supersets().collect())
            .expect("principal filter is nonempty")
    }

    /// Preclusion via the dual: preclusive iff no null event contains the
    /// dual.
    pub fn is_preclusive(&self, theory: &HistoriesTheory) -> Result<bool> {
        if theory.n() != self.width() {
            return Err(Error::SpaceMismatch);
        }
        Ok(!theory
            .null_events()
            .into_iter()
            .any(|z| self.dual.is_subset_of(z)))
    }

    /// Domination in dual form: phi dominates psi iff psi's dual is a subset
    /// of phi's dual.
    pub fn dominates(&self, other: &MultiplicativeCoevent) -> Result<bool> {
        if self.width() != other.width() {
            return Err(Error::SpaceMismatch);
        }
        Ok(other.dual.is_subset_of(self.dual))
    }

    /// Classical on a partition iff some (necessarily unique) block contains
    /// the dual.
    pub fn is_classical_on(&self, p: &Partition) -> Result<bool> {
        if p.width() != self.width() {
            return Err(Error::SpaceMismatch);
        }
        Ok(p.blocks().iter().any(|b| self.dual.is_subset_of(*b)))
    }
}

/// The duality map on events: A maps to the coevent valuing B true iff A is
/// a subset of B.
pub fn co_dual(a: Event) -> Result<MultiplicativeCoevent> {
    MultiplicativeCoevent::new(a)
}

/// Which minimality reading a scheme was computed under.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MinimalityMode {
    /// Dual-inclusion-minimal (primitive) coevents; the default, and the
    /// reading under which the scheme reduces to the classical valuations on
    /// probability theories.
    Primitive,
    /// The verbatim domination direction: keeps coevents not strictly
    /// dominated by another candidate, which selects dual-inclusion-maximal
    /// duals.
    Literal,
}

impl MinimalityMode {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "primitive" | "default" => Some(MinimalityMode::Primitive),
            "literal" => Some(MinimalityMode::Literal),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MinimalityMode::Primitive => "primitive",
            MinimalityMode::Literal => "literal",
        }
    }
}

/// Which reading of the consistency-scheme membership condition is in force.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Reading {
    /// Support equality: the dual's support must equal the support of the
    /// induced valuation on some decoherent partition containing the event
    /// as a block. This forces the isolating partition of the event.
    Literal,
    /// Block membership: the event is a block of some decoherent partition.
    Loose,
}

impl Reading {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "literal" | "default" => Some(Reading::Literal),
            "loose" => Some(Reading::Loose),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Reading::Literal => "literal",
            Reading::Loose => "loose",
        }
    }
}

/// Scheme identifiers.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Multiplicative,
    ConsD,
    ConsC,
    ConsM,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Multiplicative => "m",
            SchemeKind::ConsD => "cons-d",
            SchemeKind::ConsC => "cons-c",
            SchemeKind::ConsM => "cons-m",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "m" | "multiplicative" => Some(SchemeKind::Multiplicative),
            "cons-d" | "consd" => Some(SchemeKind::ConsD),
            "cons-c" | "consc" => Some(SchemeKind::ConsC),
            "cons-m" | "consm" => Some(SchemeKind::ConsM),
            _ => None,
        }
    }
}

/// The outcome of a scheme computation: the selected coevents (sorted by
/// dual), and which mode/reading produced them. An empty scheme is legal and
/// flagged.
#[derive(Clone, Debug)]
pub struct SchemeResult {
    pub kind: SchemeKind,
    pub minimality: Option<MinimalityMode>,
    pub reading: Option<Reading>,
    pub coevents: Vec<MultiplicativeCoevent>,
}

impl SchemeResult {
    pub fn is_empty(&self) -> bool {
        self.coevents.is_empty()
    }

    pub fn duals(&self) -> Vec<Event> {
        self.coevents.iter().map(|c| c.dual()).collect()
    }

    /// Re-verify that every member satisfies the scheme's defining
    /// predicates, from scratch.
    pub fn verify(&self, theory: &HistoriesTheory) -> Result<()> {
        let recomputed = match self.kind {
            SchemeKind::Multiplicative => {
                multiplicative_scheme(theory, self.minimality.unwrap_or(MinimalityMode::Primitive))
            }
            SchemeKind::ConsM => {
                cons_m(theory, self.minimality.unwrap_or(MinimalityMode::Primitive))?
            }
            SchemeKind::ConsD => cons_d(theory, self.reading.unwrap_or(Reading::Literal))?,
            SchemeKind::ConsC => cons_c(theory, self.reading.unwrap_or(Reading::Literal))?,
        };
        if recomputed.coevents != self.coevents {
            return Err(Error::OracleMismatch {
                check: format!("scheme {}", self.kind.as_str()),
                witness: format!(
                    "recomputation yields {:?}, stored {:?}",
                    recomputed.duals(),
                    self.duals()
                ),
            });
        }
        Ok(())
    }
}

/// All preclusive multiplicative coevents, by dual, in canonical order.
pub fn preclusive_duals(theory: &HistoriesTheory) -> Vec<MultiplicativeCoevent> {
    let n = theory.n();
    let nulls = theory.null_masks();
    all_events(n)
        .filter(|d| !d.is_empty())
        .filter(|d| !nulls.iter().any(|&z| d.mask() & !z == 0))
        .map(|d| MultiplicativeCoevent { dual: d })
        .collect()
}

fn select_minimal(
    candidates: Vec<MultiplicativeCoevent>,
    mode: MinimalityMode,
) -> Vec<MultiplicativeCoevent> {
    let keep = |c: &MultiplicativeCoevent| -> bool {
        candidates.iter().all(|other| {
            if other == c {
                return true;
            }
            match mode {
                // no other candidate with strictly smaller dual
                MinimalityMode::Primitive => !other.dual().is_subset_of(c.dual()),
                // no other candidate dominating c: other dominates c iff
                // c's dual is a subset of other's dual
                MinimalityMode::Literal => !c.dual().is_subset_of(other.dual()),
            }
        })
    };
    candidates.iter().copied().filter(keep).collect()
}

/// The multiplicative scheme: minimal preclusive multiplicative coevents,
/// under the requested minimality reading.
pub fn multiplicative_scheme(theory: &HistoriesTheory, mode: MinimalityMode) -> SchemeResult {
    let coevents = select_minimal(preclusive_duals(theory), mode);
    SchemeResult {
        kind: SchemeKind::Multiplicative,
        minimality: Some(mode),
        reading: None,
        coevents,
    }
}

/// Multiplicative coevents that are preclusive and classical on every
/// decoherent partition.
pub fn m_pc(theory: &HistoriesTheory) -> Result<Vec<MultiplicativeCoevent>> {
    let dec = decoherent_partitions(theory)?;
    Ok(preclusive_duals(theory)
        .into_iter()
        .filter(|c| {
            dec.iter()
                .all(|p| c.is_classical_on(p).expect("same space"))
        })
        .collect())
}

/// Minimal elements of M_PC. May legitimately be empty.
pub fn cons_m(theory: &HistoriesTheory, mode: MinimalityMode) -> Result<SchemeResult> {
    let coevents = select_minimal(m_pc(theory)?, mode);
    Ok(SchemeResult {
        kind: SchemeKind::ConsM,
        minimality: Some(mode),
        reading: None,
        coevents,
    })
}

/// Membership test shared by the consistency schemes: which decoherent
/// partitions host the event under the given reading. The literal reading
/// forces the partition isolating the event.
fn cons_hosts(
    theory: &HistoriesTheory,
    a: Event,
    reading: Reading,
    decoherent: &[Partition],
) -> Result<Vec<Partition>> {
    match reading {
        Reading::Literal => {
            // support equality requires every superset of the event to lie in
            // the sublattice, which only the isolating partition provides
            let iso = Partition::isolating(a)?;
            if is_decoherent(theory, &iso)? {
                Ok(vec![iso])
            } else {
                Ok(Vec::new())
            }
        }
        Reading::Loose => Ok(decoherent
            .iter()
            .filter(|p| p.block_index(a).is_some())
            .cloned()
            .collect()),
    }
}

/// Duals of events carried by a decoherent partition. Members are
/// multiplicative by construction but need not be preclusive.
pub fn cons_d(theory: &HistoriesTheory, reading: Reading) -> Result<SchemeResult> {
    let decoherent = match reading {
        Reading::Literal => Vec::new(),
        Reading::Loose => decoherent_partitions(theory)?,
    };
    let mut coevents = Vec::new();
    for a in all_events(theory.n()).filter(|a| !a.is_empty()) {
        if !cons_hosts(theory, a, reading, &decoherent)?.is_empty() {
            coevents.push(MultiplicativeCoevent { dual: a });
        }
    }
    Ok(SchemeResult {
        kind: SchemeKind::ConsD,
        minimality: None,
        reading: Some(reading),
        coevents,
    })
}

/// As `cons_d`, but additionally requiring the induced valuation on a
/// hosting partition to be preclusive there (no null member of the
/// sublattice is valued true).
pub fn cons_c(theory: &HistoriesTheory, reading: Reading) -> Result<SchemeResult> {
    let decoherent = match reading {
        Reading::Literal => Vec::new(),
        Reading::Loose => decoherent_partitions(theory)?,
    };
    let mut coevents = Vec::new();
    for a in all_events(theory.n()).filter(|a| !a.is_empty()) {
        let hosts = cons_hosts(theory, a, reading, &decoherent)?;
        let ok = hosts.iter().any(|p| {
            let lat = p.sublattice();
            lat.events()
                .iter()
                .all(|e| !(a.is_subset_of(*e) && theory.is_null(*e).expect("member event")))
        });
        if ok {
            coevents.push(MultiplicativeCoevent { dual: a });
        }
    }
    Ok(SchemeResult {
        kind: SchemeKind::ConsC,
        minimality: None,
        reading: Some(reading),
        coevents,
    })
}

/// Classicality of each coevent across the decoherent partitions; the
/// per-coevent table reported alongside scheme output.
pub fn classicality_table(
    theory: &HistoriesTheory,
    coevents: &[MultiplicativeCoevent],
) -> Result<Vec<(MultiplicativeCoevent, Vec<(Partition, bool)>)>> {
    let dec = decoherent_partitions(theory)?;
    coevents
        .iter()
        .map(|c| {
            let rows = dec
                .iter()
                .map(|p| Ok((p.clone(), c.is_classical_on(p)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((*c, rows))
        })
        .collect()
}
