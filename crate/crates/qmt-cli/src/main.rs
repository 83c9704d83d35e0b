//! The `qmt` command: load a histories theory, run one of the analysis
//! pipelines, and emit a deterministic report (human text by default, the
//! JSON envelope with `--json`).
//!
//! Exit codes: 0 success, 1 bad input, 2 broken internal invariant or oracle
//! mismatch. Errors go to stderr as one-line JSON.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qmt_core::coevents::{MinimalityMode, Reading, SchemeKind};
use qmt_core::error::Error;
use qmt_core::grainings::Tag;
use qmt_core::io::{self, LoadedTheory};
use qmt_core::oracle::CheckKind;
use qmt_core::report::{self, GeneratorChoice, Report};
use qmt_core::valuations::ValuationKind;

#[derive(Parser)]
#[command(
    name = "qmt",
    about = "Quantum measure theory toolkit: decoherence, coarse grainings, coevents, valuations, and Heyting embeddings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TheoryArg {
    /// Path to a theory file (JSON).
    theory: PathBuf,
    /// Emit the machine-readable report on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the theory and report the sum rules, null events, and
    /// positivity diagnostics.
    Check(TheoryArg),
    /// List partitions with decoherence/separability tags.
    Partitions {
        #[command(flatten)]
        common: TheoryArg,
        /// Keep only partitions with this tag: d, p, pd, o, or e.
        #[arg(long)]
        tag: Option<String>,
        /// Also write the Hasse diagram of the full graining poset as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate a coevent scheme.
    Coevents {
        #[command(flatten)]
        common: TheoryArg,
        /// Scheme: m, cons-d, cons-c, or cons-m.
        #[arg(long)]
        scheme: String,
        /// Minimality reading for m / cons-m: primitive (default) or literal.
        #[arg(long, default_value = "primitive")]
        mode: String,
        /// Membership reading for cons-d / cons-c: literal (default) or loose.
        #[arg(long, default_value = "literal")]
        reading: String,
    },
    /// List pooled valuations.
    Valuations {
        #[command(flatten)]
        common: TheoryArg,
        /// Set: vd, vc, vpd, or vpd-preclusive.
        #[arg(long)]
        set: String,
        /// Restrict to one partition, written as "a|b,c".
        #[arg(long)]
        partition: Option<String>,
    },
    /// Build the varying-set constructions and the generated Heyting algebra.
    Topos {
        #[command(flatten)]
        common: TheoryArg,
        /// Poset: bd (default), bpd, bo, or be.
        #[arg(long, default_value = "bd")]
        poset: String,
        /// Subobject generators: literal (default) or q=TAG (e.g. q=pd).
        #[arg(long, default_value = "literal")]
        subobject: String,
        /// Also write the poset Hasse diagram as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Recompute with naive oracles and diff against the fast paths.
    Oracle {
        #[command(flatten)]
        common: TheoryArg,
        /// Which family: mu, decoherence, schemes, heyting, or all.
        #[arg(long, default_value = "all")]
        check: String,
    },
    /// Write a built-in example theory file.
    Examples {
        /// Name: coin, three-path, single, or random.
        name: String,
        /// Seed for the random example.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of histories for the random example.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Output path; defaults to NAME.json in the working directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn cap_override() -> Option<usize> {
    std::env::var("QMT_MAX_HISTORIES")
        .ok()
        .and_then(|v| v.parse().ok())
}

fn load(path: &PathBuf) -> Result<LoadedTheory, Error> {
    io::load_path(path, cap_override())
}

fn bad_flag(flag: &str, value: &str) -> Error {
    Error::Schema(format!("unknown value {value:?} for --{flag}"))
}

fn poset_tag(text: &str) -> Result<Tag, Error> {
    match text.to_ascii_lowercase().as_str() {
        "bd" | "d" => Ok(Tag::Decoherent),
        "bpd" | "pd" => Ok(Tag::SeparableDecoherent),
        "bo" | "o" => Ok(Tag::Observable),
        "be" | "e" => Ok(Tag::Experiment),
        other => Err(bad_flag("poset", other)),
    }
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Check(common) => {
            let loaded = load(&common.theory)?;
            let result = report::check_result(&loaded.theory);
            let rep = Report::new("check", &loaded, result);
            if common.json {
                print!("{}", rep.to_json());
            } else {
                let r = &rep.result;
                println!(
                    "theory {} ({} histories, {} mode)",
                    rep.fingerprint, r.n, rep.mode
                );
                println!("kolmogorov: {}", r.kolmogorov);
                println!(
                    "quantum sum rule: {} ({} violations)",
                    if r.quantum_sum_rule_ok {
                        "ok"
                    } else {
                        "violated"
                    },
                    r.quantum_sum_rule_violations.len()
                );
                println!(
                    "null events ({}): {}",
                    r.null_events.len(),
                    r.null_events
                        .iter()
                        .map(|e| format!("{{{}}}", e.join(",")))
                        .collect::<Vec<_>>()
                        .join(" ")
                );
                println!("strongly positive: {}", r.strongly_positive);
                for d in &rep.diagnostics {
                    println!("note: {d}");
                }
            }
            Ok(())
        }
        Command::Partitions { common, tag, dot } => {
            let loaded = load(&common.theory)?;
            let tag_filter = match &tag {
                None => None,
                Some(t) => Some(Tag::parse(t).ok_or_else(|| bad_flag("tag", t))?),
            };
            let result = report::partitions_result(&loaded, tag_filter)?;
            if let Some(path) = &dot {
                let gp = qmt_core::grainings::GrainingPoset::build(&loaded.theory)?;
                std::fs::write(
                    path,
                    qmt_core::dot::graining_dot(loaded.theory.space(), &gp),
                )?;
            }
            let mut rep = Report::new("partitions", &loaded, result);
            if let Some(t) = &tag {
                rep = rep.flag("tag", t);
            }
            if let Some(path) = &dot {
                rep = rep.flag("dot", &path.display().to_string());
            }
            if common.json {
                print!("{}", rep.to_json());
            } else {
                let r = &rep.result;
                println!("{} of {} partitions listed", r.listed, r.total);
                for row in &r.rows {
                    let blocks = row
                        .blocks
                        .iter()
                        .map(|b| format!("{{{}}}", b.join(",")))
                        .collect::<Vec<_>>()
                        .join(" ");
                    let mut tags = Vec::new();
                    if row.decoherent {
                        tags.push("d");
                    }
                    if row.separable {
                        tags.push("p");
                    }
                    if row.observable == Some(true) {
                        tags.push("o");
                    }
                    if row.experiment == Some(true) {
                        tags.push("e");
                    }
                    println!("{blocks}  [{}]", tags.join(","));
                }
            }
            Ok(())
        }
        Command::Coevents {
            common,
            scheme,
            mode,
            reading,
        } => {
            let loaded = load(&common.theory)?;
            let kind = SchemeKind::parse(&scheme).ok_or_else(|| bad_flag("scheme", &scheme))?;
            let minimality = MinimalityMode::parse(&mode).ok_or_else(|| bad_flag("mode", &mode))?;
            let read = Reading::parse(&reading).ok_or_else(|| bad_flag("reading", &reading))?;
            let (_, result) = report::scheme_result(&loaded.theory, kind, minimality, read)?;
            let mut rep = Report::new("coevents", &loaded, result)
                .flag("scheme", kind.as_str())
                .flag("mode", minimality.as_str())
                .flag("reading", read.as_str());
            if rep.result.empty {
                rep = rep.diagnostic("scheme is empty".to_string());
            }
            if common.json {
                print!("{}", rep.to_json());
            } else {
                let r = &rep.result;
                println!(
                    "scheme {} ({} coevents{})",
                    r.scheme,
                    r.coevents.len(),
                    if r.empty { ", empty" } else { "" }
                );
                for c in &r.coevents {
                    let classical = c.classicality.iter().filter(|row| row.classical).count();
                    println!(
                        "{{{}}}*  preclusive={}  classical on {classical}/{} decoherent partitions",
                        c.dual.join(","),
                        c.preclusive,
                        c.classicality.len()
                    );
                }
            }
            Ok(())
        }
        Command::Valuations {
            common,
            set,
            partition,
        } => {
            let loaded = load(&common.theory)?;
            let kind = ValuationKind::parse(&set).ok_or_else(|| bad_flag("set", &set))?;
            let filter = partition
                .as_ref()
                .map(|text| io::parse_partition_arg(loaded.theory.space(), text))
                .transpose()?;
            let result = report::valuations_result(&loaded.theory, kind, filter.as_ref())?;
            let mut rep = Report::new("valuations", &loaded, result).flag("set", kind.as_str());
            if let Some(p) = &partition {
                rep = rep.flag("partition", p);
            }
            if common.json {
                print!("{}", rep.to_json());
            } else {
                let r = &rep.result;
                println!("{} valuations in {}", r.count, r.set);
                for row in &r.rows {
                    let blocks = row
                        .partition
                        .iter()
                        .map(|b| format!("{{{}}}", b.join(",")))
                        .collect::<Vec<_>>()
                        .join(" ");
                    println!(
                        "partition {blocks}: block {{{}}} -> 1{}",
                        row.block.join(","),
                        if row.preclusive { "  (preclusive)" } else { "" }
                    );
                }
            }
            Ok(())
        }
        Command::Topos {
            common,
            poset,
            subobject,
            dot,
        } => {
            let loaded = load(&common.theory)?;
            let tag = poset_tag(&poset)?;
            let generator = GeneratorChoice::parse(&subobject)
                .ok_or_else(|| bad_flag("subobject", &subobject))?;
            let outcome = report::topos_result(&loaded, tag, generator)?;
            if let Some(path) = &dot {
                std::fs::write(path, &outcome.dot)?;
            }
            let mut rep = Report::new("topos", &loaded, outcome.payload)
                .flag("poset", &poset)
                .flag("subobject", &subobject);
            if let Some(path) = &dot {
                rep = rep.flag("dot", &path.display().to_string());
            }
            if rep.result.degenerate {
                rep = rep.diagnostic(
                    "subobject equals the whole varying set (the verbatim construction collapses)"
                        .to_string(),
                );
            }
            if common.json {
                print!("{}", rep.to_json());
            } else {
                let r = &rep.result;
                println!(
                    "poset {} with {} elements, subobject {}",
                    r.poset_tag,
                    r.elements.len(),
                    r.generator
                );
                println!("stage sizes: {:?}", r.stage_sizes);
                println!("subobject sizes: {:?}", r.subobject_sizes);
                println!("degenerate: {}", r.degenerate);
                println!("characteristic map is top: {}", r.chi_is_top);
                println!(
                    "global elements: {} valuations onto {} upper sets ({} collision groups)",
                    r.globals.len(),
                    r.globals.len() - r.collisions.iter().map(|g| g.len() - 1).sum::<usize>(),
                    r.collisions.len()
                );
                println!("generated Heyting algebra: {} elements", r.algebra.size);
                for d in &rep.diagnostics {
                    println!("note: {d}");
                }
            }
            Ok(())
        }
        Command::Oracle { common, check } => {
            let loaded = load(&common.theory)?;
            let kinds = CheckKind::parse(&check).ok_or_else(|| bad_flag("check", &check))?;
            let result = report::oracle_result(&loaded.theory, &kinds)?;
            let rep = Report::new("oracle", &loaded, result).flag("check", &check);
            let all_passed = rep.result.all_passed;
            if common.json {
                print!("{}", rep.to_json());
            } else {
                for c in &rep.result.checks {
                    match (&c.passed, &c.witness) {
                        (true, None) => println!("{}: ok", c.name),
                        (true, Some(w)) => println!("{}: ok ({w})", c.name),
                        (false, w) => {
                            println!("{}: MISMATCH {}", c.name, w.clone().unwrap_or_default())
                        }
                    }
                }
            }
            if !all_passed {
                let failing = rep
                    .result
                    .checks
                    .iter()
                    .find(|c| !c.passed)
                    .expect("some check failed");
                return Err(Error::OracleMismatch {
                    check: failing.name.clone(),
                    witness: failing.witness.clone().unwrap_or_default(),
                });
            }
            Ok(())
        }
        Command::Examples {
            name,
            seed,
            n,
            out,
            json,
        } => {
            let file = qmt_core::samples::by_name(&name, seed, n)?;
            let text = io::canonical_json(&file)?;
            let path = out.unwrap_or_else(|| PathBuf::from(format!("{name}.json")));
            std::fs::write(&path, &text)?;
            let loaded = io::realize(&file, None)?;
            #[derive(serde::Serialize)]
            struct Written {
                name: String,
                path: String,
                histories: usize,
            }
            let rep = Report::new(
                "examples",
                &loaded,
                Written {
                    name: name.clone(),
                    path: path.display().to_string(),
                    histories: loaded.theory.n(),
                },
            )
            .flag("seed", &seed.to_string())
            .flag("n", &n.to_string());
            if json {
                print!("{}", rep.to_json());
            } else {
                println!(
                    "wrote {} ({} histories, fingerprint {})",
                    path.display(),
                    loaded.theory.n(),
                    rep.fingerprint
                );
            }
            Ok(())
        }
    }
}

// restore default SIGPIPE handling so `qmt ... | head` terminates quietly
// instead of panicking on the closed pipe
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let envelope = serde_json::json!({
                "error": {
                    "kind": err.kind(),
                    "message": err.to_string(),
                    "exit": err.exit_code(),
                }
            });
            eprintln!("{envelope}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
