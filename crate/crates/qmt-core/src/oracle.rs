//! Naive recomputation oracles.
//!
//! Every fast path with a representation shortcut has a slow twin here that
//! works from raw definitions: the measure by the double sum over the
//! matrix, decoherence by checking every disjoint pair of the sublattice,
//! schemes by materializing support sets and filtering predicates, and
//! Heyting implication by exhaustive greatest-element search. A diff between
//! the two is an implementation bug and surfaces as `OracleMismatch`.

use fixedbitset::FixedBitSet;

use crate::coevents::{
    cons_c, cons_d, cons_m, multiplicative_scheme, MinimalityMode, Reading, SchemeKind,
    SchemeResult,
};
use crate::error::{Error, Result};
use crate::grainings::{is_decoherent, is_preclusively_separable};
use crate::measure::HistoriesTheory;
use crate::partition::{enumerate_partitions_capped, Partition};
use crate::scalar::Real;
use crate::space::{all_events, Event, HARD_CAP};
use crate::topos::HeytingAlgebra;

/// The measure by brute force: the double sum of matrix entries over the
/// event, independent of the incremental cache.
pub fn mu_naive(theory: &HistoriesTheory, e: Event) -> Result<Real> {
    let d = theory.d_of(e, e)?;
    debug_assert!(d.im().is_zero_within(theory.tol()));
    Ok(d.re().clone())
}

/// Null events recomputed from the naive measure.
pub fn null_events_naive(theory: &HistoriesTheory) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    for e in all_events(theory.n()) {
        if mu_naive(theory, e)?.is_zero_within(theory.tol()) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Decoherence by the full definition: additivity over every disjoint pair
/// of the generated sublattice, with measures recomputed naively.
pub fn is_decoherent_naive(theory: &HistoriesTheory, p: &Partition) -> Result<bool> {
    if p.width() != theory.n() {
        return Err(Error::SpaceMismatch);
    }
    let lat = p.sublattice();
    for a in lat.events() {
        for b in lat.events() {
            if !a.is_disjoint_from(*b) {
                continue;
            }
            let joint = mu_naive(theory, a.union(*b))?;
            let split = mu_naive(theory, *a)?.add(&mu_naive(theory, *b)?);
            if !joint.eq_within(&split, theory.tol()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Separability from raw definitions: every naive null event meets every
/// block in a naive null event.
pub fn is_preclusively_separable_naive(theory: &HistoriesTheory, p: &Partition) -> Result<bool> {
    if p.width() != theory.n() {
        return Err(Error::SpaceMismatch);
    }
    for z in null_events_naive(theory)? {
        for block in p.blocks() {
            if !mu_naive(theory, block.intersect(z))?.is_zero_within(theory.tol()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// -- scheme oracle ---------------------------------------------------------
//
// Works on explicit support sets (lists of events valued 1) rather than dual
// masks, and re-derives the decoherent partitions with the naive additivity
// test.

fn support_of(dual: Event) -> Vec<Event> {
    dual.supersets().collect()
}

fn preclusive_naive(theory: &HistoriesTheory, support: &[Event]) -> Result<bool> {
    let nulls = null_events_naive(theory)?;
    Ok(!support.iter().any(|e| nulls.contains(e)))
}

fn classical_on_naive(support: &[Event], p: &Partition) -> bool {
    p.blocks().iter().filter(|b| support.contains(b)).count() == 1
}

fn decoherent_partitions_naive(theory: &HistoriesTheory) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for p in enumerate_partitions_capped(theory.n(), HARD_CAP)? {
        if is_decoherent_naive(theory, &p)? {
            out.push(p);
        }
    }
    Ok(out)
}

fn minimal_by_support(candidates: Vec<Event>, mode: MinimalityMode) -> Vec<Event> {
    let supports: Vec<(Event, Vec<Event>)> =
        candidates.iter().map(|d| (*d, support_of(*d))).collect();
    supports
        .iter()
        .filter(|(d, support)| {
            supports.iter().all(|(other, other_support)| {
                if other == d {
                    return true;
                }
                // containment of explicit support sets, both directions
                let ours_in_theirs = support.iter().all(|e| other_support.contains(e));
                let theirs_in_ours = other_support.iter().all(|e| support.contains(e));
                match mode {
                    // a strictly larger support (strictly smaller dual)
                    // disqualifies us
                    MinimalityMode::Primitive => !(ours_in_theirs && !theirs_in_ours),
                    // verbatim domination: a strictly smaller support
                    // (a distinct coevent dominating us) disqualifies us
                    MinimalityMode::Literal => !(theirs_in_ours && !ours_in_theirs),
                }
            })
        })
        .map(|(d, _)| *d)
        .collect()
}

/// Recompute a scheme by raw predicate filtering over explicit supports.
pub fn scheme_naive(
    theory: &HistoriesTheory,
    kind: SchemeKind,
    minimality: MinimalityMode,
    reading: Reading,
) -> Result<Vec<Event>> {
    let n = theory.n();
    let nonempty: Vec<Event> = all_events(n).filter(|e| !e.is_empty()).collect();
    match kind {
        SchemeKind::Multiplicative => {
            let mut preclusive = Vec::new();
            for d in &nonempty {
                if preclusive_naive(theory, &support_of(*d))? {
                    preclusive.push(*d);
                }
            }
            Ok(minimal_by_support(preclusive, minimality))
        }
        SchemeKind::ConsM => {
            let dec = decoherent_partitions_naive(theory)?;
            let mut pc = Vec::new();
            for d in &nonempty {
                let support = support_of(*d);
                if preclusive_naive(theory, &support)?
                    && dec.iter().all(|p| classical_on_naive(&support, p))
                {
                    pc.push(*d);
                }
            }
            Ok(minimal_by_support(pc, minimality))
        }
        SchemeKind::ConsD | SchemeKind::ConsC => {
            let dec = decoherent_partitions_naive(theory)?;
            let mut out = Vec::new();
            for d in &nonempty {
                let support = support_of(*d);
                // hosting partitions whose sublattice support matches the
                // full support (support equality) or that carry the event as
                // a block (loose reading)
                let hosts: Vec<&Partition> = dec
                    .iter()
                    .filter(|p| {
                        if p.block_index(*d).is_none() {
                            return false;
                        }
                        match reading {
                            Reading::Loose => true,
                            Reading::Literal => {
                                // supp(A*) must lie inside the sublattice
                                let lat = p.sublattice();
                                support.iter().all(|e| lat.contains(*e))
                            }
                        }
                    })
                    .collect();
                let selected = match kind {
                    SchemeKind::ConsD => !hosts.is_empty(),
                    SchemeKind::ConsC => hosts.iter().any(|p| {
                        let lat = p.sublattice();
                        let restricted: Vec<Event> = support
                            .iter()
                            .copied()
                            .filter(|e| lat.contains(*e))
                            .collect();
                        let nulls: Vec<Event> = lat
                            .events()
                            .iter()
                            .copied()
                            .filter(|e| {
                                mu_naive(theory, *e)
                                    .expect("member event")
                                    .is_zero_within(theory.tol())
                            })
                            .collect();
                        restricted.iter().all(|e| !nulls.contains(e))
                    }),
                    _ => unreachable!(),
                };
                if selected {
                    out.push(*d);
                }
            }
            Ok(out)
        }
    }
}

/// Heyting implication by exhaustive greatest-element search over the
/// carrier: collect every element whose meet with `u` lands below `v`, and
/// demand a single greatest one.
pub fn implies_naive(algebra: &HeytingAlgebra, u: usize, v: usize) -> Result<usize> {
    let mut satisfying: Vec<usize> = Vec::new();
    for c in 0..algebra.len() {
        let m = algebra.meet(c, u)?;
        if algebra.leq(m, v) {
            satisfying.push(c);
        }
    }
    let greatest = satisfying
        .iter()
        .copied()
        .find(|&c| satisfying.iter().all(|&d| algebra.leq(d, c)));
    greatest.ok_or_else(|| Error::OracleMismatch {
        check: "heyting implication".into(),
        witness: format!("no greatest element below ({u} => {v})"),
    })
}

/// One oracle comparison outcome.
#[derive(Clone, Debug)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

impl OracleCheck {
    fn pass(name: &str) -> Self {
        OracleCheck {
            name: name.to_string(),
            passed: true,
            witness: None,
        }
    }

    fn fail(name: &str, witness: String) -> Self {
        OracleCheck {
            name: name.to_string(),
            passed: false,
            witness: Some(witness),
        }
    }
}

/// Which oracle families to run.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Mu,
    Decoherence,
    Schemes,
    Heyting,
}

impl CheckKind {
    pub fn parse(text: &str) -> Option<Vec<CheckKind>> {
        match text.to_ascii_lowercase().as_str() {
            "mu" | "measure" => Some(vec![CheckKind::Mu]),
            "decoherence" => Some(vec![CheckKind::Decoherence]),
            "schemes" => Some(vec![CheckKind::Schemes]),
            "heyting" => Some(vec![CheckKind::Heyting]),
            "all" => Some(vec![
                CheckKind::Mu,
                CheckKind::Decoherence,
                CheckKind::Schemes,
                CheckKind::Heyting,
            ]),
            _ => None,
        }
    }
}

fn render_events(theory: &HistoriesTheory, events: &[Event]) -> String {
    let parts: Vec<String> = events
        .iter()
        .map(|e| theory.space().render_event(*e))
        .collect();
    format!("[{}]", parts.join(" "))
}

fn check_mu(theory: &HistoriesTheory) -> Result<OracleCheck> {
    for e in all_events(theory.n()) {
        let fast = theory.mu(e)?;
        let slow = mu_naive(theory, e)?;
        if !fast.value().eq_within(&slow, theory.tol()) {
            return Ok(OracleCheck::fail(
                "mu",
                format!(
                    "event {}: cached {} vs naive {}",
                    theory.space().render_event(e),
                    fast,
                    slow
                ),
            ));
        }
    }
    let fast_nulls = theory.null_events();
    let slow_nulls = null_events_naive(theory)?;
    if fast_nulls != slow_nulls {
        return Ok(OracleCheck::fail(
            "mu",
            format!(
                "null events: cached {} vs naive {}",
                render_events(theory, &fast_nulls),
                render_events(theory, &slow_nulls)
            ),
        ));
    }
    Ok(OracleCheck::pass("mu"))
}

fn check_decoherence(theory: &HistoriesTheory) -> Result<OracleCheck> {
    for p in enumerate_partitions_capped(theory.n(), HARD_CAP)? {
        let fast = is_decoherent(theory, &p)?;
        let slow = is_decoherent_naive(theory, &p)?;
        if fast != slow {
            return Ok(OracleCheck::fail(
                "decoherence",
                format!("partition {:?}: pairwise {fast} vs full {slow}", p.blocks()),
            ));
        }
        let fast_sep = is_preclusively_separable(theory, &p)?;
        let slow_sep = is_preclusively_separable_naive(theory, &p)?;
        if fast_sep != slow_sep {
            return Ok(OracleCheck::fail(
                "decoherence",
                format!(
                    "partition {:?}: separability {fast_sep} vs naive {slow_sep}",
                    p.blocks()
                ),
            ));
        }
    }
    Ok(OracleCheck::pass("decoherence"))
}

fn check_schemes(theory: &HistoriesTheory) -> Result<OracleCheck> {
    let cases: Vec<(SchemeKind, MinimalityMode, Reading, SchemeResult)> = vec![
        (
            SchemeKind::Multiplicative,
            MinimalityMode::Primitive,
            Reading::Literal,
            multiplicative_scheme(theory, MinimalityMode::Primitive),
        ),
        (
            SchemeKind::Multiplicative,
            MinimalityMode::Literal,
            Reading::Literal,
            multiplicative_scheme(theory, MinimalityMode::Literal),
        ),
        (
            SchemeKind::ConsM,
            MinimalityMode::Primitive,
            Reading::Literal,
            cons_m(theory, MinimalityMode::Primitive)?,
        ),
        (
            SchemeKind::ConsD,
            MinimalityMode::Primitive,
            Reading::Literal,
            cons_d(theory, Reading::Literal)?,
        ),
        (
            SchemeKind::ConsD,
            MinimalityMode::Primitive,
            Reading::Loose,
            cons_d(theory, Reading::Loose)?,
        ),
        (
            SchemeKind::ConsC,
            MinimalityMode::Primitive,
            Reading::Literal,
            cons_c(theory, Reading::Literal)?,
        ),
        (
            SchemeKind::ConsC,
            MinimalityMode::Primitive,
            Reading::Loose,
            cons_c(theory, Reading::Loose)?,
        ),
    ];
    for (kind, minimality, reading, fast) in cases {
        let slow = scheme_naive(theory, kind, minimality, reading)?;
        if fast.duals() != slow {
            return Ok(OracleCheck::fail(
                "schemes",
                format!(
                    "{} ({}/{}): fast {} vs naive {}",
                    kind.as_str(),
                    minimality.as_str(),
                    reading.as_str(),
                    render_events(theory, &fast.duals()),
                    render_events(theory, &slow)
                ),
            ));
        }
    }
    Ok(OracleCheck::pass("schemes"))
}

/// The exhaustive implication diff is quartic in the carrier size, so it is
/// run in full only up to this many carrier elements; larger algebras are
/// diffed on the generator images plus top and bottom.
const HEYTING_FULL_DIFF_LIMIT: usize = 64;

fn diff_implications(algebra: &HeytingAlgebra, indices: &[usize]) -> Result<Option<String>> {
    for &u in indices {
        for &v in indices {
            let fast = algebra.implies(u, v)?.within_index;
            let slow = implies_naive(algebra, u, v)?;
            if fast != slow {
                return Ok(Some(format!(
                    "implication ({u} => {v}): fast {fast} vs search {slow}"
                )));
            }
        }
    }
    Ok(None)
}

fn check_heyting(theory: &HistoriesTheory) -> Result<OracleCheck> {
    let gp = crate::grainings::GrainingPoset::build(theory)?;
    let tagged = gp.tagged(crate::grainings::Tag::Decoherent)?;
    // the generated algebra over the principal cones (the literal global
    // elements), always; the full upper-set algebra when small enough
    let gens: Vec<FixedBitSet> = (0..tagged.len())
        .map(|p| tagged.poset.up_set(p).clone())
        .collect();
    let mut algebras = vec![HeytingAlgebra::generated(tagged.poset.clone(), &gens)?];
    if tagged.len() <= 5 {
        algebras.push(HeytingAlgebra::full(tagged.poset.clone())?);
    }
    let mut note = None;
    for algebra in &algebras {
        let witness = if algebra.len() <= HEYTING_FULL_DIFF_LIMIT {
            let all: Vec<usize> = (0..algebra.len()).collect();
            diff_implications(algebra, &all)?
        } else {
            let mut sample: Vec<usize> = gens.iter().filter_map(|g| algebra.index_of(g)).collect();
            sample.push(algebra.top()?);
            sample.push(algebra.bottom()?);
            sample.sort_unstable();
            sample.dedup();
            note = Some(format!(
                "carrier of {} elements: implication diff bounded to the {} generator images",
                algebra.len(),
                sample.len()
            ));
            diff_implications(algebra, &sample)?
        };
        if let Some(w) = witness {
            return Ok(OracleCheck::fail("heyting", w));
        }
    }
    Ok(OracleCheck {
        name: "heyting".into(),
        passed: true,
        witness: note,
    })
}

/// Run the requested oracle families and report each outcome.
pub fn run_checks(theory: &HistoriesTheory, kinds: &[CheckKind]) -> Result<Vec<OracleCheck>> {
    kinds
        .iter()
        .map(|k| match k {
            CheckKind::Mu => check_mu(theory),
            CheckKind::Decoherence => check_decoherence(theory),
            CheckKind::Schemes => check_schemes(theory),
            CheckKind::Heyting => check_heyting(theory),
        })
        .collect()
}

/// As [`run_checks`], but the first diff is an error.
pub fn verify_all(theory: &HistoriesTheory, kinds: &[CheckKind]) -> Result<Vec<OracleCheck>> {
    let checks = run_checks(theory, kinds)?;
    for c in &checks {
        if !c.passed {
            return Err(Error::OracleMismatch {
                check: c.name.clone(),
                witness: c.witness.clone().unwrap_or_default(),
            });
        }
    }
    Ok(checks)
}
