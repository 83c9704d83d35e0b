//! The theory file format.
//!
//! A theory file names the histories and gives the dynamics either as a
//! Hermitian decoherence matrix on singleton pairs or as an amplitude
//! vector. Numbers are rational strings ("p/q" or integers) in exact mode;
//! float mode opts in via the "mode" field and accepts plain JSON numbers.
//! Designated observable/experiment posets ride along as block lists.
//! Canonical re-emission is byte-deterministic, and the fingerprint is the
//! SHA-256 of the canonical form.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measure::{DecoherenceMatrix, HistoriesTheory};
use crate::partition::{enumerate_partitions_capped, Partition};
use crate::scalar::{format_rational, parse_rational, Mode, Scalar, DEFAULT_TOLERANCE};
use crate::space::{SampleSpace, DEFAULT_CAP, HARD_CAP};

/// A number literal as found in a theory file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberLit {
    Int(i64),
    Num(f64),
    Text(String),
}

impl NumberLit {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            NumberLit::Int(v) => Ok(BigRational::from_integer((*v).into())),
            NumberLit::Num(v) => Err(Error::BadNumber {
                text: v.to_string(),
                reason: "float literal in exact mode; quote a rational like \"1/2\"".into(),
            }),
            NumberLit::Text(s) => parse_rational(s),
        }
    }

    fn to_float(&self) -> Result<f64> {
        match self {
            NumberLit::Int(v) => Ok(*v as f64),
            NumberLit::Num(v) => Ok(*v),
            NumberLit::Text(s) => {
                let r = parse_rational(s)?;
                r.to_f64().ok_or_else(|| Error::BadNumber {
                    text: s.clone(),
                    reason: "rational does not fit in a float".into(),
                })
            }
        }
    }

    fn to_scalar_part(&self, mode: Mode) -> Result<crate::scalar::Real> {
        Ok(match mode {
            Mode::Exact => crate::scalar::Real::Exact(self.to_rational()?),
            Mode::Float => crate::scalar::Real::Float(self.to_float()?),
        })
    }

    fn canonical(&self, mode: Mode) -> Result<NumberLit> {
        Ok(match mode {
            Mode::Exact => NumberLit::Text(format_rational(&self.to_rational()?)),
            Mode::Float => NumberLit::Num(self.to_float()?),
        })
    }
}

/// A matrix of number literals, split into real and imaginary parts. An
/// absent imaginary part means zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub re: Vec<Vec<NumberLit>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<NumberLit>>>,
}

/// A vector of number literals, split like [`MatrixData`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorData {
    pub re: Vec<NumberLit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<NumberLit>>,
}

/// Designated partitions: a list of partitions, each a list of blocks, each
/// a list of history labels.
pub type PartitionLabels = Vec<Vec<Vec<String>>>;

/// The on-disk form of a histories theory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryFile {
    pub histories: Vec<String>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoherence: Option<MatrixData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<VectorData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<PartitionLabels>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<PartitionLabels>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// A parsed and validated theory, ready for the pipelines.
#[derive(Debug)]
pub struct LoadedTheory {
    pub theory: HistoriesTheory,
    pub file: TheoryFile,
    pub observable: Option<Vec<Partition>>,
    pub experiment: Option<Vec<Partition>>,
    pub fingerprint: String,
}

pub fn parse_str(text: &str) -> Result<TheoryFile> {
    serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))
}

pub fn parse_path(path: &std::path::Path) -> Result<TheoryFile> {
    let text = std::fs::read_to_string(path)?;
    parse_str(&text)
}

fn scalar_from_parts(re: &NumberLit, im: Option<&NumberLit>, mode: Mode) -> Result<Scalar> {
    let re = re.to_scalar_part(mode)?;
    let im = match im {
        Some(v) => v.to_scalar_part(mode)?,
        None => crate::scalar::Real::zero(mode),
    };
    Scalar::new(re, im)
}

fn matrix_scalars(data: &MatrixData, mode: Mode, n: usize) -> Result<Vec<Vec<Scalar>>> {
    if data.re.len() != n || data.re.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            rows: data.re.len(),
            cols: data.re.first().map(Vec::len).unwrap_or(0),
        });
    }
    if let Some(im) = &data.im {
        if im.len() != n || im.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                rows: im.len(),
                cols: im.first().map(Vec::len).unwrap_or(0),
            });
        }
    }
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    scalar_from_parts(&data.re[a][b], data.im.as_ref().map(|im| &im[a][b]), mode)
                })
                .collect()
        })
        .collect()
}

fn vector_scalars(data: &VectorData, mode: Mode, n: usize) -> Result<Vec<Scalar>> {
    if data.re.len() != n || data.im.as_ref().is_some_and(|im| im.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            rows: data.re.len(),
            cols: data.im.as_ref().map(Vec::len).unwrap_or(n),
        });
    }
    (0..n)
        .map(|i| scalar_from_parts(&data.re[i], data.im.as_ref().map(|im| &im[i]), mode))
        .collect()
}

fn parse_designation(space: &SampleSpace, labels: &PartitionLabels) -> Result<Vec<Partition>> {
    labels
        .iter()
        .map(|blocks| {
            let events = blocks
                .iter()
                .map(|b| space.event_from_labels(b))
                .collect::<Result<Vec<_>>>()?;
            Partition::new(events)
        })
        .collect()
}

/// Designated partitions must form an upper set under refinement: every
/// coarsening of a member is a member.
fn check_designation_upper(members: &[Partition], n: usize, cap: usize) -> Result<()> {
    let all = enumerate_partitions_capped(n, cap)?;
    for m in members {
        for coarser in &all {
            if m.refines(coarser)? && !members.contains(coarser) {
                return Err(Error::NotAnUpperSet {
                    member: format!("{:?}", m.blocks()),
                    missing: format!("{:?}", coarser.blocks()),
                });
            }
        }
    }
    Ok(())
}

/// Build the validated theory from a parsed file. `cap_override` (e.g. from
/// the environment) takes precedence over the file's own cap.
pub fn realize(file: &TheoryFile, cap_override: Option<usize>) -> Result<LoadedTheory> {
    let cap = cap_override
        .or(file.cap)
        .unwrap_or(DEFAULT_CAP)
        .min(HARD_CAP);
    let tol = file.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let space = SampleSpace::with_cap(file.histories.clone(), cap)?;
    let n = space.len();
    let mode = file.mode;

    let theory = match (&file.decoherence, &file.amplitudes) {
        (Some(_), Some(_)) => {
            return Err(Error::Schema(
                "give either \"decoherence\" or \"amplitudes\", not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Schema(
                "one of \"decoherence\" or \"amplitudes\" is required".into(),
            ))
        }
        (Some(m), None) => {
            let rows = matrix_scalars(m, mode, n)?;
            HistoriesTheory::with_tolerance(space, DecoherenceMatrix::new(rows)?, tol)?
        }
        (None, Some(v)) => {
            let amps = vector_scalars(v, mode, n)?;
            HistoriesTheory::from_amplitudes_with(file.histories.clone(), amps, cap, tol)?
        }
    };

    let observable = file
        .observable
        .as_ref()
        .map(|labels| parse_designation(theory.space(), labels))
        .transpose()?;
    let experiment = file
        .experiment
        .as_ref()
        .map(|labels| parse_designation(theory.space(), labels))
        .transpose()?;
    for designation in [&observable, &experiment].into_iter().flatten() {
        check_designation_upper(designation, n, cap)?;
    }

    let file = canonicalize(file)?;
    let fingerprint = fingerprint(&file)?;
    Ok(LoadedTheory {
        theory,
        file,
        observable,
        experiment,
        fingerprint,
    })
}

/// Load and validate a theory from disk.
pub fn load_path(path: &std::path::Path, cap_override: Option<usize>) -> Result<LoadedTheory> {
    realize(&parse_path(path)?, cap_override)
}

/// Normalize every number literal to its canonical form for the file's mode.
pub fn canonicalize(file: &TheoryFile) -> Result<TheoryFile> {
    let mode = file.mode;
    let canon_rows = |rows: &Vec<Vec<NumberLit>>| -> Result<Vec<Vec<NumberLit>>> {
        rows.iter()
            .map(|row| row.iter().map(|v| v.canonical(mode)).collect())
            .collect()
    };
    let canon_vec = |row: &Vec<NumberLit>| -> Result<Vec<NumberLit>> {
        row.iter().map(|v| v.canonical(mode)).collect()
    };
    Ok(TheoryFile {
        histories: file.histories.clone(),
        mode,
        decoherence: match &file.decoherence {
            Some(m) => Some(MatrixData {
                re: canon_rows(&m.re)?,
                im: match &m.im {
                    Some(im) => Some(canon_rows(im)?),
                    None => None,
                },
            }),
            None => None,
        },
        amplitudes: match &file.amplitudes {
            Some(v) => Some(VectorData {
                re: canon_vec(&v.re)?,
                im: match &v.im {
                    Some(im) => Some(canon_vec(im)?),
                    None => None,
                },
            }),
            None => None,
        },
        observable: file.observable.clone(),
        experiment: file.experiment.clone(),
        cap: file.cap,
        tolerance: file.tolerance,
    })
}

/// The canonical byte form: pretty JSON of the canonicalized file plus a
/// trailing newline. Identical theories emit identical bytes.
pub fn canonical_json(file: &TheoryFile) -> Result<String> {
    let canon = canonicalize(file)?;
    let mut text =
        serde_json::to_string_pretty(&canon).map_err(|e| Error::Schema(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// SHA-256 of the canonical byte form, as lowercase hex.
pub fn fingerprint(file: &TheoryFile) -> Result<String> {
    let bytes = canonical_json(file)?;
    let digest = Sha256::digest(bytes.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Parse a partition argument like "a|b,c": blocks separated by '|',
/// members by ','.
pub fn parse_partition_arg(space: &SampleSpace, text: &str) -> Result<Partition> {
    let blocks = text
        .split('|')
        .map(|block| space.event_from_labels(block.split(',').map(str::trim)))
        .collect::<Result<Vec<_>>>()?;
    Partition::new(blocks)
}
