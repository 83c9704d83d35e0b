//! Shared fixtures for the integration suites: the worked examples and the
//! seeded random theory families. Each test target uses its own slice of
//! these, so the unused-code lint is silenced per item.
#![allow(dead_code)]

use qmt_core::io::realize;
use qmt_core::measure::HistoriesTheory;
use qmt_core::samples;
use qmt_core::space::Event;

pub fn three_path() -> HistoriesTheory {
    realize(&samples::three_path(), None).unwrap().theory
}

pub fn coin() -> HistoriesTheory {
    realize(&samples::coin(), None).unwrap().theory
}

/// Seeded random decoherence-matrix theories with n cycling over 1..=max_n.
pub fn matrix_suite(count: usize, max_n: usize) -> Vec<HistoriesTheory> {
    (0..count)
        .map(|seed| {
            let n = (seed % max_n) + 1;
            realize(&samples::random(seed as u64, n), None)
                .unwrap()
                .theory
        })
        .collect()
}

/// Seeded random rational probability theories at fixed n.
pub fn probability_suite(count: usize, n: usize) -> Vec<HistoriesTheory> {
    (0..count)
        .map(|seed| {
            realize(&samples::random_probability(seed as u64, n), None)
                .unwrap()
                .theory
        })
        .collect()
}

/// Events rendered with labels, for assertion messages.
pub fn show(theory: &HistoriesTheory, e: Event) -> String {
    theory.space().render_event(e)
}
