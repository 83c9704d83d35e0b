//! Deterministic report payloads.
//!
//! Every command's result is assembled here from core types, with events
//! rendered as label lists and measure values as canonical strings, so that
//! identical input and flags produce identical bytes.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::coevents::{
    classicality_table, cons_c, cons_d, cons_m, multiplicative_scheme, MinimalityMode, Reading,
    SchemeKind, SchemeResult,
};
use crate::error::{Error, Result};
use crate::grainings::{classify_partitions, GrainingPoset, Tag};
use crate::io::LoadedTheory;
use crate::measure::HistoriesTheory;
use crate::oracle::{run_checks, CheckKind};
use crate::partition::{bell_number, Partition};
use crate::scalar::Mode;
use crate::space::{all_events, Event};
use crate::topos::{characteristic, HeytingAlgebra, ValuationTopos};
use crate::valuations::{cl, pooled, ValuationKind};

/// The envelope around every command result.
#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub fingerprint: String,
    pub mode: Mode,
    pub flags: BTreeMap<String, String>,
    pub diagnostics: Vec<String>,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, loaded: &LoadedTheory, result: T) -> Self {
        let mut diagnostics = Vec::new();
        if loaded.theory.mode() == Mode::Float {
            diagnostics.push(format!(
                "float mode: every zero test and equality is an epsilon test with eps = {}",
                loaded.theory.tol()
            ));
        }
        Report {
            command: command.to_string(),
            fingerprint: loaded.fingerprint.clone(),
            mode: loaded.theory.mode(),
            flags: BTreeMap::new(),
            diagnostics,
            result,
        }
    }

    pub fn flag(mut self, key: &str, value: &str) -> Self {
        self.flags.insert(key.to_string(), value.to_string());
        self
    }

    pub fn diagnostic(mut self, text: String) -> Self {
        self.diagnostics.push(text);
        self
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

fn event_labels(theory: &HistoriesTheory, e: Event) -> Vec<String> {
    theory.space().event_labels(e)
}

fn partition_labels(theory: &HistoriesTheory, p: &Partition) -> Vec<Vec<String>> {
    p.blocks()
        .iter()
        .map(|b| event_labels(theory, *b))
        .collect()
}

// -- check -------------------------------------------------------------------

#[derive(Serialize)]
pub struct MuRow {
    pub event: Vec<String>,
    pub value: String,
}

#[derive(Serialize)]
pub struct CheckResult {
    pub histories: Vec<String>,
    pub n: usize,
    pub kolmogorov: bool,
    pub quantum_sum_rule_ok: bool,
    pub quantum_sum_rule_violations: Vec<[Vec<String>; 3]>,
    pub null_events: Vec<Vec<String>>,
    pub strongly_positive: bool,
    pub mu: Vec<MuRow>,
}

pub fn check_result(theory: &HistoriesTheory) -> CheckResult {
    let violations = theory.quantum_sum_rule_violations();
    CheckResult {
        histories: theory.space().labels().to_vec(),
        n: theory.n(),
        kolmogorov: theory.kolmogorov_holds(),
        quantum_sum_rule_ok: violations.is_empty(),
        quantum_sum_rule_violations: violations
            .iter()
            .map(|(a, b, c)| {
                [
                    event_labels(theory, *a),
                    event_labels(theory, *b),
                    event_labels(theory, *c),
                ]
            })
            .collect(),
        null_events: theory
            .null_events()
            .into_iter()
            .map(|e| event_labels(theory, e))
            .collect(),
        strongly_positive: theory.is_strongly_positive(),
        mu: all_events(theory.n())
            .map(|e| MuRow {
                event: event_labels(theory, e),
                value: theory.mu(e).expect("own event").to_string(),
            })
            .collect(),
    }
}

// -- partitions ---------------------------------------------------------------

#[derive(Serialize)]
pub struct PartitionRow {
    pub blocks: Vec<Vec<String>>,
    pub decoherent: bool,
    pub separable: bool,
    pub separable_decoherent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<bool>,
}

#[derive(Serialize)]
pub struct PartitionsResult {
    pub total: String,
    pub listed: usize,
    pub rows: Vec<PartitionRow>,
}

/// Classify and list partitions, optionally filtered by tag. Streaming: the
/// quadratic order relation is not materialized here.
pub fn partitions_result(
    loaded: &LoadedTheory,
    tag_filter: Option<Tag>,
) -> Result<PartitionsResult> {
    let theory = &loaded.theory;
    let classified = classify_partitions(theory)?;
    let mut rows = Vec::new();
    for (p, flags) in &classified {
        let observable = loaded
            .observable
            .as_ref()
            .map(|members| members.contains(p));
        let experiment = loaded
            .experiment
            .as_ref()
            .map(|members| members.contains(p));
        let keep = match tag_filter {
            None => true,
            Some(Tag::Decoherent) => flags.decoherent,
            Some(Tag::Separable) => flags.separable,
            Some(Tag::SeparableDecoherent) => flags.separable_decoherent(),
            Some(Tag::Observable) => observable.ok_or_else(|| Error::NoDesignation {
                tag: "observable".into(),
            })?,
            Some(Tag::Experiment) => experiment.ok_or_else(|| Error::NoDesignation {
                tag: "experiment".into(),
            })?,
        };
        if keep {
            rows.push(PartitionRow {
                blocks: partition_labels(theory, p),
                decoherent: flags.decoherent,
                separable: flags.separable,
                separable_decoherent: flags.separable_decoherent(),
                observable,
                experiment,
            });
        }
    }
    Ok(PartitionsResult {
        total: bell_number(theory.n()).to_string(),
        listed: rows.len(),
        rows,
    })
}

// -- coevents ------------------------------------------------------------------

#[derive(Serialize)]
pub struct ClassicalityRow {
    pub partition: Vec<Vec<String>>,
    pub classical: bool,
}

#[derive(Serialize)]
pub struct CoeventRow {
    pub dual: Vec<String>,
    pub preclusive: bool,
    pub classicality: Vec<ClassicalityRow>,
}

#[derive(Serialize)]
pub struct CoeventsResult {
    pub scheme: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimality: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reading: Option<String>,
    pub empty: bool,
    pub coevents: Vec<CoeventRow>,
}

pub fn scheme_result(
    theory: &HistoriesTheory,
    kind: SchemeKind,
    minimality: MinimalityMode,
    reading: Reading,
) -> Result<(SchemeResult, CoeventsResult)> {
    let scheme = match kind {
        SchemeKind::Multiplicative => multiplicative_scheme(theory, minimality),
        SchemeKind::ConsM => cons_m(theory, minimality)?,
        SchemeKind::ConsD => cons_d(theory, reading)?,
        SchemeKind::ConsC => cons_c(theory, reading)?,
    };
    let table = classicality_table(theory, &scheme.coevents)?;
    let coevents = scheme
        .coevents
        .iter()
        .zip(&table)
        .map(|(c, (_, rows))| {
            Ok(CoeventRow {
                dual: event_labels(theory, c.dual()),
                preclusive: c.is_preclusive(theory)?,
                classicality: rows
                    .iter()
                    .map(|(p, classical)| ClassicalityRow {
                        partition: partition_labels(theory, p),
                        classical: *classical,
                    })
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let payload = CoeventsResult {
        scheme: kind.as_str().to_string(),
        minimality: scheme.minimality.map(|m| m.as_str().to_string()),
        reading: scheme.reading.map(|r| r.as_str().to_string()),
        empty: scheme.is_empty(),
        coevents,
    };
    Ok((scheme, payload))
}

// -- valuations -----------------------------------------------------------------

#[derive(Serialize)]
pub struct TruthRow {
    pub event: Vec<String>,
    pub value: u8,
}

#[derive(Serialize)]
pub struct ValuationRow {
    pub partition: Vec<Vec<String>>,
    pub block: Vec<String>,
    pub preclusive: bool,
    pub truth_table: Vec<TruthRow>,
}

#[derive(Serialize)]
pub struct ValuationsResult {
    pub set: String,
    pub count: usize,
    pub rows: Vec<ValuationRow>,
}

pub fn valuations_result(
    theory: &HistoriesTheory,
    kind: ValuationKind,
    partition_filter: Option<&Partition>,
) -> Result<ValuationsResult> {
    let set = pooled(theory, kind)?;
    let mut rows = Vec::new();
    for v in &set.members {
        if let Some(p) = partition_filter {
            if v.partition() != p {
                continue;
            }
        }
        let preclusive = cl(theory, v.partition())?.contains(v);
        rows.push(ValuationRow {
            partition: partition_labels(theory, v.partition()),
            block: event_labels(theory, v.block()),
            preclusive,
            truth_table: v
                .partition()
                .sublattice()
                .events()
                .iter()
                .map(|e| TruthRow {
                    event: event_labels(theory, *e),
                    value: if v.eval(*e).expect("member event").as_bool() {
                        1
                    } else {
                        0
                    },
                })
                .collect(),
        });
    }
    Ok(ValuationsResult {
        set: kind.as_str().to_string(),
        count: rows.len(),
        rows,
    })
}

// -- topos ------------------------------------------------------------------------

/// How the generator sub-poset of the valuation subobject is chosen.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GeneratorChoice {
    /// Q = the whole poset (the verbatim construction).
    Literal,
    /// Q = the members of another tag, intersected with the poset.
    Tagged(Tag),
}

impl GeneratorChoice {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "literal" => Some(GeneratorChoice::Literal),
            other => {
                let tag = other.strip_prefix("q=")?;
                Tag::parse(tag).map(GeneratorChoice::Tagged)
            }
        }
    }

    pub fn as_str(&self) -> String {
        match self {
            GeneratorChoice::Literal => "literal".to_string(),
            GeneratorChoice::Tagged(tag) => format!("q={tag}"),
        }
    }
}

#[derive(Serialize)]
pub struct GlobalRow {
    pub partition: Vec<Vec<String>>,
    pub block: Vec<String>,
    pub upper_set: Vec<usize>,
}

#[derive(Serialize)]
pub struct AlgebraTables {
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
    pub implies: Vec<Vec<usize>>,
    pub implies_matches_ambient: Vec<Vec<bool>>,
}

#[derive(Serialize)]
pub struct AlgebraResult {
    pub size: usize,
    pub carrier: Vec<Vec<usize>>,
    pub top: usize,
    pub bottom: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<AlgebraTables>,
}

#[derive(Serialize)]
pub struct ToposResult {
    pub poset_tag: String,
    pub generator: String,
    pub elements: Vec<Vec<Vec<String>>>,
    pub hasse: Vec<[usize; 2]>,
    pub stage_sizes: Vec<usize>,
    pub subobject_sizes: Vec<usize>,
    pub degenerate: bool,
    pub chi_is_top: bool,
    pub globals: Vec<GlobalRow>,
    pub collisions: Vec<Vec<usize>>,
    pub algebra: AlgebraResult,
}

/// Tables stay readable up to this carrier size.
const TABLE_LIMIT: usize = 32;

pub struct ToposOutcome {
    pub payload: ToposResult,
    pub dot: String,
    pub algebra: HeytingAlgebra,
    pub topos: ValuationTopos,
}

pub fn topos_result(
    loaded: &LoadedTheory,
    poset_tag: Tag,
    generator: GeneratorChoice,
) -> Result<ToposOutcome> {
    let theory = &loaded.theory;
    let mut gp = GrainingPoset::build(theory)?;
    if let Some(obs) = &loaded.observable {
        gp.designate_upper_partitions(obs, Tag::Observable)?;
    }
    if let Some(exp) = &loaded.experiment {
        gp.designate_upper_partitions(exp, Tag::Experiment)?;
    }
    let tagged = gp.tagged(poset_tag)?;
    let dot = crate::dot::tagged_dot(theory.space(), &tagged);

    let vt = match generator {
        GeneratorChoice::Literal => ValuationTopos::literal(tagged)?,
        GeneratorChoice::Tagged(tag) => {
            let members = gp.sub_poset(tag)?.members;
            let mut q = FixedBitSet::with_capacity(tagged.len());
            for (local, &global) in tagged.global.iter().enumerate() {
                if members.contains(global) {
                    q.insert(local);
                }
            }
            ValuationTopos::with_generators(tagged, q)?
        }
    };

    // the characteristic map of the subobject is the top morphism exactly
    // when every value is the full sieve; computed, not inferred
    let mut chi_is_top = true;
    for p in 0..vt.tagged.len() {
        for x in vt.varying.stage(p) {
            let sieve = characteristic(&vt.varying, &vt.subobject, p, x)?;
            if !sieve.is_full(&vt.tagged.poset) {
                chi_is_top = false;
            }
        }
    }

    let hmap = vt.h_map()?;
    let globals: Vec<GlobalRow> = hmap
        .entries
        .iter()
        .map(|(v, g)| GlobalRow {
            partition: partition_labels(theory, v.partition()),
            block: event_labels(theory, v.block()),
            upper_set: g.members.ones().collect(),
        })
        .collect();

    // the algebra generated by the distinct images
    let mut gens: Vec<FixedBitSet> = Vec::new();
    for (_, g) in &hmap.entries {
        if !gens.contains(&g.members) {
            gens.push(g.members.clone());
        }
    }
    let algebra = HeytingAlgebra::generated(vt.tagged.poset.clone(), &gens)?;
    let tables = if algebra.len() <= TABLE_LIMIT && !algebra.is_empty() {
        let k = algebra.len();
        let mut meet = vec![vec![0; k]; k];
        let mut join = vec![vec![0; k]; k];
        let mut implies = vec![vec![0; k]; k];
        let mut agrees = vec![vec![false; k]; k];
        for i in 0..k {
            for j in 0..k {
                meet[i][j] = algebra.meet(i, j)?;
                join[i][j] = algebra.join(i, j)?;
                let imp = algebra.implies(i, j)?;
                implies[i][j] = imp.within_index;
                agrees[i][j] = imp.agree;
            }
        }
        Some(AlgebraTables {
            meet,
            join,
            implies,
            implies_matches_ambient: agrees,
        })
    } else {
        None
    };
    let algebra_result = AlgebraResult {
        size: algebra.len(),
        carrier: algebra
            .carrier()
            .iter()
            .map(|s| s.ones().collect())
            .collect(),
        top: if algebra.is_empty() {
            0
        } else {
            algebra.top()?
        },
        bottom: if algebra.is_empty() {
            0
        } else {
            algebra.bottom()?
        },
        tables,
    };

    let payload = ToposResult {
        poset_tag: poset_tag.to_string(),
        generator: generator.as_str(),
        elements: vt
            .tagged
            .partitions
            .iter()
            .map(|p| partition_labels(theory, p))
            .collect(),
        hasse: vt
            .tagged
            .poset
            .hasse_edges()
            .into_iter()
            .map(|(a, b)| [a, b])
            .collect(),
        stage_sizes: vt.varying.stage_sizes(),
        subobject_sizes: vt.subobject.stage_sizes(),
        degenerate: vt.degenerate,
        chi_is_top,
        globals,
        collisions: hmap.collisions.clone(),
        algebra: algebra_result,
    };
    Ok(ToposOutcome {
        payload,
        dot,
        algebra,
        topos: vt,
    })
}

// -- oracle ---------------------------------------------------------------------

#[derive(Serialize)]
pub struct OracleRow {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Serialize)]
pub struct OracleResult {
    pub all_passed: bool,
    pub checks: Vec<OracleRow>,
}

pub fn oracle_result(theory: &HistoriesTheory, kinds: &[CheckKind]) -> Result<OracleResult> {
    let checks = run_checks(theory, kinds)?;
    Ok(OracleResult {
        all_passed: checks.iter().all(|c| c.passed),
        checks: checks
            .into_iter()
            .map(|c| OracleRow {
                name: c.name,
                passed: c.passed,
                witness: c.witness,
            })
            .collect(),
    })
}
