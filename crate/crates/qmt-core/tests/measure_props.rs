//! Measure-layer properties: sum rules, oracle equivalence of the cached
//! measure, and the null structure of classical theories.

mod common;

use proptest::prelude::*;
use qmt_core::measure::table_sum_rule_violations;
use qmt_core::oracle;
use qmt_core::scalar::Real;
use qmt_core::space::{all_events, Event};

#[test]
fn quantum_sum_rule_holds_for_matrix_theories() {
    for theory in common::matrix_suite(40, 5) {
        assert!(
            theory.quantum_sum_rule_violations().is_empty(),
            "sum rule violated for a matrix-built theory"
        );
    }
}

#[test]
fn kolmogorov_implies_quantum_sum_rule() {
    for theory in common::probability_suite(20, 4) {
        assert!(theory.kolmogorov_holds());
        assert!(theory.quantum_sum_rule_violations().is_empty());
    }
}

#[test]
fn cached_measure_matches_double_sum() {
    for theory in common::matrix_suite(30, 4) {
        for e in all_events(theory.n()) {
            let fast = theory.mu(e).unwrap();
            let slow = oracle::mu_naive(&theory, e).unwrap();
            assert!(
                fast.value().eq_within(&slow, theory.tol()),
                "mu mismatch at {}",
                common::show(&theory, e)
            );
        }
    }
}

#[test]
fn interference_is_twice_the_real_cross_term() {
    for theory in common::matrix_suite(20, 4) {
        let n = theory.n();
        for a in all_events(n) {
            for b in a.complement().subsets() {
                let i = theory.interference(a, b).unwrap();
                let d = theory.d_of(a, b).unwrap();
                let two = Real::from_integer(2, theory.mode());
                assert!(
                    i.eq_within(&two.mul(d.re()), theory.tol()),
                    "bilinearity fails at ({}, {})",
                    common::show(&theory, a),
                    common::show(&theory, b)
                );
            }
        }
    }
}

#[test]
fn classical_null_events_are_the_power_set_of_null_singletons() {
    for n in 1..=5 {
        for theory in common::probability_suite(10, n) {
            let null_singletons: Vec<usize> = (0..n)
                .filter(|&i| theory.is_null(Event::singleton(i, n)).unwrap())
                .collect();
            let mut expected: Vec<Event> = Event::from_indices(&null_singletons, n)
                .unwrap()
                .subsets()
                .collect();
            expected.sort();
            assert_eq!(theory.null_events(), expected, "n={n}");
        }
    }
}

proptest! {
    // perturbing a single nonempty, non-full event of a probability table
    // breaks the quantum sum rule whenever n >= 3 gives room for a triple
    // through the perturbed point
    #[test]
    fn perturbation_is_detected(seed in 0u64..200) {
        let theory = common::probability_suite(1 + seed as usize, 3).pop().unwrap();
        let n = theory.n();
        let mut table: Vec<Real> = all_events(n)
            .map(|e| theory.mu(e).unwrap().value().clone())
            .collect();
        let target = 0b011usize; // a two-element event, inside some triple
        table[target] = table[target].add(&Real::one(theory.mode()));
        let violations = table_sum_rule_violations(n, &table, theory.tol());
        prop_assert!(!violations.is_empty());
    }
}

proptest! {
    // the three-way inclusion-exclusion identity written through the cache:
    // mu(A|B|C) is determined by the pair values, for random disjoint triples
    #[test]
    fn sum_rule_pointwise(seed in 0u64..100, pick in 0u32..4096) {
        let theory = common::matrix_suite(1 + (seed as usize % 30), 5).pop().unwrap();
        let n = theory.n();
        let full = (1u32 << n) - 1;
        let a = pick & full;
        let b = (pick >> 4) & full & !a;
        let c = (pick >> 8) & full & !a & !b;
        let ev = |m: u32| Event::from_mask(m, n);
        let lhs = theory.mu(ev(a | b | c)).unwrap().value().clone();
        let rhs = theory.mu(ev(a | b)).unwrap().value()
            .add(theory.mu(ev(b | c)).unwrap().value())
            .add(theory.mu(ev(c | a)).unwrap().value())
            .sub(theory.mu(ev(a)).unwrap().value())
            .sub(theory.mu(ev(b)).unwrap().value())
            .sub(theory.mu(ev(c)).unwrap().value());
        prop_assert!(lhs.eq_within(&rhs, theory.tol()));
    }
}
