//! Python bindings: a `Theory` class wrapping a validated histories theory,
//! with the measure, graining, coevent, valuation, and topos pipelines as
//! methods. Structured results come back as plain Python lists and tuples;
//! the full topos report is returned as a JSON string.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qmt_core::coevents::{co_dual, MinimalityMode, Reading, SchemeKind};
use qmt_core::error::Error;
use qmt_core::grainings::{self, GrainingPoset, Tag};
use qmt_core::io::{self, LoadedTheory};
use qmt_core::oracle::CheckKind;
use qmt_core::partition::{bell_number, Partition};
use qmt_core::report::{self, GeneratorChoice};
use qmt_core::space::Event;
use qmt_core::valuations::{cl, pooled, ValuationKind};

fn to_py_err(err: Error) -> PyErr {
    match err.exit_code() {
        2 => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn flag_err(what: &str, value: &str) -> PyErr {
    PyValueError::new_err(format!("unknown {what}: {value:?}"))
}

/// A validated histories theory.
#[pyclass]
struct Theory {
    loaded: LoadedTheory,
}

impl Theory {
    fn event(&self, labels: Vec<String>) -> PyResult<Event> {
        self.loaded
            .theory
            .space()
            .event_from_labels(labels)
            .map_err(to_py_err)
    }

    fn partition(&self, blocks: Vec<Vec<String>>) -> PyResult<Partition> {
        let events = blocks
            .into_iter()
            .map(|b| self.event(b))
            .collect::<PyResult<Vec<_>>>()?;
        Partition::new(events).map_err(to_py_err)
    }

    fn labels_of(&self, e: Event) -> Vec<String> {
        self.loaded.theory.space().event_labels(e)
    }

    fn blocks_of(&self, p: &Partition) -> Vec<Vec<String>> {
        p.blocks().iter().map(|b| self.labels_of(*b)).collect()
    }
}

#[pymethods]
impl Theory {
    /// Parse and validate a theory from JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file = io::parse_str(text).map_err(to_py_err)?;
        let loaded = io::realize(&file, None).map_err(to_py_err)?;
        Ok(Theory { loaded })
    }

    /// Load a theory file from disk.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let loaded = io::load_path(std::path::Path::new(path), None).map_err(to_py_err)?;
        Ok(Theory { loaded })
    }

    /// One of the built-in examples: coin, three-path, single, or random.
    #[staticmethod]
    #[pyo3(signature = (name, seed = 0, n = 3))]
    fn example(name: &str, seed: u64, n: usize) -> PyResult<Self> {
        let file = qmt_core::samples::by_name(name, seed, n).map_err(to_py_err)?;
        let loaded = io::realize(&file, None).map_err(to_py_err)?;
        Ok(Theory { loaded })
    }

    #[getter]
    fn histories(&self) -> Vec<String> {
        self.loaded.theory.space().labels().to_vec()
    }

    #[getter]
    fn n(&self) -> usize {
        self.loaded.theory.n()
    }

    #[getter]
    fn mode(&self) -> String {
        self.loaded.theory.mode().to_string()
    }

    #[getter]
    fn fingerprint(&self) -> String {
        self.loaded.fingerprint.clone()
    }

    /// The canonical theory file.
    fn to_json(&self) -> PyResult<String> {
        io::canonical_json(&self.loaded.file).map_err(to_py_err)
    }

    /// The measure of an event (as a float; see mu_exact for the rational).
    fn mu(&self, event: Vec<String>) -> PyResult<f64> {
        let e = self.event(event)?;
        Ok(self.loaded.theory.mu(e).map_err(to_py_err)?.to_f64())
    }

    /// The measure as a canonical string ("p/q" in exact mode).
    fn mu_exact(&self, event: Vec<String>) -> PyResult<String> {
        let e = self.event(event)?;
        Ok(self.loaded.theory.mu(e).map_err(to_py_err)?.to_string())
    }

    fn is_null(&self, event: Vec<String>) -> PyResult<bool> {
        let e = self.event(event)?;
        self.loaded.theory.is_null(e).map_err(to_py_err)
    }

    fn null_events(&self) -> Vec<Vec<String>> {
        self.loaded
            .theory
            .null_events()
            .into_iter()
            .map(|e| self.labels_of(e))
            .collect()
    }

    fn kolmogorov_holds(&self) -> bool {
        self.loaded.theory.kolmogorov_holds()
    }

    fn quantum_sum_rule_violations(&self) -> Vec<(Vec<String>, Vec<String>, Vec<String>)> {
        self.loaded
            .theory
            .quantum_sum_rule_violations()
            .into_iter()
            .map(|(a, b, c)| (self.labels_of(a), self.labels_of(b), self.labels_of(c)))
            .collect()
    }

    fn is_strongly_positive(&self) -> bool {
        self.loaded.theory.is_strongly_positive()
    }

    /// All partitions with their tags: (blocks, decoherent, separable).
    #[pyo3(signature = (tag = None))]
    fn partitions(&self, tag: Option<String>) -> PyResult<Vec<(Vec<Vec<String>>, bool, bool)>> {
        let filter = match &tag {
            None => None,
            Some(t) => Some(Tag::parse(t).ok_or_else(|| flag_err("tag", t))?),
        };
        let designated = |which: &Option<Vec<Partition>>, name: &str| -> PyResult<Vec<Partition>> {
            which
                .clone()
                .ok_or_else(|| PyValueError::new_err(format!("no {name} designation supplied")))
        };
        let classified = grainings::classify_partitions(&self.loaded.theory).map_err(to_py_err)?;
        let mut out = Vec::new();
        for (p, flags) in classified {
            let keep = match filter {
                None => true,
                Some(Tag::Decoherent) => flags.decoherent,
                Some(Tag::Separable) => flags.separable,
                Some(Tag::SeparableDecoherent) => flags.separable_decoherent(),
                Some(Tag::Observable) => {
                    designated(&self.loaded.observable, "observable")?.contains(&p)
                }
                Some(Tag::Experiment) => {
                    designated(&self.loaded.experiment, "experiment")?.contains(&p)
                }
            };
            if keep {
                out.push((self.blocks_of(&p), flags.decoherent, flags.separable));
            }
        }
        Ok(out)
    }

    fn is_decoherent(&self, blocks: Vec<Vec<String>>) -> PyResult<bool> {
        let p = self.partition(blocks)?;
        grainings::is_decoherent(&self.loaded.theory, &p).map_err(to_py_err)
    }

    fn is_preclusively_separable(&self, blocks: Vec<Vec<String>>) -> PyResult<bool> {
        let p = self.partition(blocks)?;
        grainings::is_preclusively_separable(&self.loaded.theory, &p).map_err(to_py_err)
    }

    /// A coevent scheme's duals: m, cons-d, cons-c, or cons-m.
    #[pyo3(signature = (name, mode = "primitive", reading = "literal"))]
    fn scheme(&self, name: &str, mode: &str, reading: &str) -> PyResult<Vec<Vec<String>>> {
        let kind = SchemeKind::parse(name).ok_or_else(|| flag_err("scheme", name))?;
        let minimality = MinimalityMode::parse(mode).ok_or_else(|| flag_err("mode", mode))?;
        let read = Reading::parse(reading).ok_or_else(|| flag_err("reading", reading))?;
        let (result, _) = report::scheme_result(&self.loaded.theory, kind, minimality, read)
            .map_err(to_py_err)?;
        Ok(result
            .duals()
            .into_iter()
            .map(|d| self.labels_of(d))
            .collect())
    }

    /// Whether the dual event's coevent is preclusive.
    fn is_preclusive(&self, dual: Vec<String>) -> PyResult<bool> {
        let d = self.event(dual)?;
        co_dual(d)
            .map_err(to_py_err)?
            .is_preclusive(&self.loaded.theory)
            .map_err(to_py_err)
    }

    /// Whether the dual event's coevent is classical on the partition.
    fn is_classical_on(&self, dual: Vec<String>, blocks: Vec<Vec<String>>) -> PyResult<bool> {
        let d = self.event(dual)?;
        let p = self.partition(blocks)?;
        co_dual(d)
            .map_err(to_py_err)?
            .is_classical_on(&p)
            .map_err(to_py_err)
    }

    /// Pooled valuations: (partition blocks, selected block, preclusive).
    fn valuations(&self, kind: &str) -> PyResult<Vec<(Vec<Vec<String>>, Vec<String>, bool)>> {
        let kind = ValuationKind::parse(kind).ok_or_else(|| flag_err("valuation set", kind))?;
        let set = pooled(&self.loaded.theory, kind).map_err(to_py_err)?;
        set.members
            .into_iter()
            .map(|v| {
                let preclusive = cl(&self.loaded.theory, v.partition())
                    .map_err(to_py_err)?
                    .contains(&v);
                Ok((
                    self.blocks_of(v.partition()),
                    self.labels_of(v.block()),
                    preclusive,
                ))
            })
            .collect()
    }

    /// The full topos report (poset, subobject, global elements, generated
    /// Heyting algebra) as a JSON string.
    #[pyo3(signature = (poset = "bd", subobject = "literal"))]
    fn topos_json(&self, poset: &str, subobject: &str) -> PyResult<String> {
        let tag = match poset.to_ascii_lowercase().as_str() {
            "bd" | "d" => Tag::Decoherent,
            "bpd" | "pd" => Tag::SeparableDecoherent,
            "bo" | "o" => Tag::Observable,
            "be" | "e" => Tag::Experiment,
            other => return Err(flag_err("poset", other)),
        };
        let generator =
            GeneratorChoice::parse(subobject).ok_or_else(|| flag_err("subobject", subobject))?;
        let outcome = report::topos_result(&self.loaded, tag, generator).map_err(to_py_err)?;
        serde_json::to_string_pretty(&outcome.payload)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Run the naive-recomputation oracles; returns (name, passed) pairs.
    #[pyo3(signature = (check = "all"))]
    fn oracle(&self, check: &str) -> PyResult<Vec<(String, bool)>> {
        let kinds = CheckKind::parse(check).ok_or_else(|| flag_err("check", check))?;
        let checks =
            qmt_core::oracle::run_checks(&self.loaded.theory, &kinds).map_err(to_py_err)?;
        Ok(checks.into_iter().map(|c| (c.name, c.passed)).collect())
    }

    /// DOT rendering of the graining poset's Hasse diagram with tag colors.
    fn dot(&self) -> PyResult<String> {
        let gp = GrainingPoset::build(&self.loaded.theory).map_err(to_py_err)?;
        Ok(qmt_core::dot::graining_dot(self.loaded.theory.space(), &gp))
    }

    fn __repr__(&self) -> String {
        format!(
            "Theory(histories={:?}, mode={})",
            self.loaded.theory.space().labels(),
            self.loaded.theory.mode()
        )
    }
}

/// Number of partitions of an n-element set.
#[pyfunction]
fn bell(n: usize) -> PyResult<u64> {
    if n > qmt_core::space::HARD_CAP {
        return Err(PyValueError::new_err(format!(
            "n must be at most {}",
            qmt_core::space::HARD_CAP
        )));
    }
    Ok(bell_number(n) as u64)
}

/// A built-in example theory file as canonical JSON text.
#[pyfunction]
#[pyo3(signature = (name, seed = 0, n = 3))]
fn example_json(name: &str, seed: u64, n: usize) -> PyResult<String> {
    let file = qmt_core::samples::by_name(name, seed, n).map_err(to_py_err)?;
    io::canonical_json(&file).map_err(to_py_err)
}

#[pymodule]
fn qmt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Theory>()?;
    m.add_function(wrap_pyfunction!(bell, m)?)?;
    m.add_function(wrap_pyfunction!(example_json, m)?)?;
    Ok(())
}
