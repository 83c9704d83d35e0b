//! DOT emission for graining posets.
//!
//! Draws the Hasse reduction (covering pairs only), bottom-up, with node
//! fill encoding the computed tags: decoherent, preclusively separable,
//! both, or neither. Output is deterministic.

use crate::grainings::{GrainingPoset, TaggedPoset};
use crate::partition::Partition;
use crate::poset::FinitePoset;
use crate::space::SampleSpace;

fn partition_label(space: &SampleSpace, p: &Partition) -> String {
    p.blocks()
        .iter()
        .map(|b| {
            b.members()
                .map(|i| space.label(i))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

fn emit(poset: &FinitePoset, labels: &[String], fills: &[&'static str]) -> String {
    let mut out = String::new();
    out.push_str("digraph grainings {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=box, style=filled, fontname=\"Helvetica\"];\n");
    for (i, label) in labels.iter().enumerate() {
        out.push_str(&format!(
            "  p{i} [label=\"{}\", fillcolor=\"{}\"];\n",
            label.replace('"', "\\\""),
            fills[i]
        ));
    }
    for (a, b) in poset.hasse_edges() {
        out.push_str(&format!("  p{a} -> p{b};\n"));
    }
    out.push_str("}\n");
    out
}

const FILL_BOTH: &str = "mediumpurple1";
const FILL_DECOHERENT: &str = "lightblue";
const FILL_SEPARABLE: &str = "palegreen";
const FILL_PLAIN: &str = "white";

/// The full graining poset with tag coloring.
pub fn graining_dot(space: &SampleSpace, poset: &GrainingPoset) -> String {
    let labels: Vec<String> = poset
        .partitions()
        .iter()
        .map(|p| partition_label(space, p))
        .collect();
    let fills: Vec<&'static str> = (0..poset.len())
        .map(|i| {
            let f = poset.flags(i);
            match (f.decoherent, f.separable) {
                (true, true) => FILL_BOTH,
                (true, false) => FILL_DECOHERENT,
                (false, true) => FILL_SEPARABLE,
                (false, false) => FILL_PLAIN,
            }
        })
        .collect();
    emit(poset.poset(), &labels, &fills)
}

/// A tagged sub-poset, uniformly filled.
pub fn tagged_dot(space: &SampleSpace, tagged: &TaggedPoset) -> String {
    let labels: Vec<String> = tagged
        .partitions
        .iter()
        .map(|p| partition_label(space, p))
        .collect();
    let fills = vec![FILL_DECOHERENT; tagged.len()];
    emit(&tagged.poset, &labels, &fills)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::HistoriesTheory;
    use crate::scalar::Scalar;

    #[test]
    fn dot_output_is_deterministic_and_edges_are_covers() {
        let t = HistoriesTheory::from_amplitudes(
            ["a", "b", "c"],
            vec![
                Scalar::exact_int(1, 0),
                Scalar::exact_int(1, 0),
                Scalar::exact_int(-1, 0),
            ],
        )
        .unwrap();
        let gp = GrainingPoset::build(&t).unwrap();
        let first = graining_dot(t.space(), &gp);
        let second = graining_dot(t.space(), &gp);
        assert_eq!(first, second);
        // Hasse reduction of the 5-element partition poset of a 3-set:
        // finest -> each two-block partition -> coarsest: 3 + 3 = 6 edges
        assert_eq!(first.matches(" -> ").count(), 6);
        assert!(first.contains("a | b,c"));
        assert!(first.contains("mediumpurple1")); // coarsest is decoherent + separable
    }
}
