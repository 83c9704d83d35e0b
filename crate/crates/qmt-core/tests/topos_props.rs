//! Topos-layer properties over posets arising from theories: functor laws,
//! subobject squares, characteristic naturality, sieve well-formedness,
//! global-element compatibility, the global-section census, and the Heyting
//! laws for full and generated algebras.

mod common;

use fixedbitset::FixedBitSet;
use qmt_core::grainings::{GrainingPoset, Tag};
use qmt_core::space::all_events;
use qmt_core::topos::{
    characteristic, characteristic_is_natural, gamma_iso_check, EventTopos, HeytingAlgebra,
    ValuationTopos,
};

fn bd_topos(theory: &qmt_core::measure::HistoriesTheory) -> (GrainingPoset, ValuationTopos) {
    let gp = GrainingPoset::build(theory).unwrap();
    let tagged = gp.tagged(Tag::Decoherent).unwrap();
    let vt = ValuationTopos::literal(tagged).unwrap();
    (gp, vt)
}

#[test]
fn functor_laws_hold_for_valuation_functors() {
    for theory in common::matrix_suite(20, 4) {
        let (gp, vt) = bd_topos(&theory);
        vt.varying.verify_functor_laws().unwrap();
        // and over the full graining poset, not just the decoherent part
        let full = qmt_core::topos::valuation_varying_set(&gp.full_tagged()).unwrap();
        full.verify_functor_laws().unwrap();
    }
}

#[test]
fn subobject_squares_commute() {
    for theory in common::matrix_suite(20, 4) {
        let (gp, vt) = bd_topos(&theory);
        vt.subobject.verify(&vt.varying).unwrap();
        let et = EventTopos::build(&theory, gp.tagged(Tag::Decoherent).unwrap()).unwrap();
        et.accessible.verify(&et.varying).unwrap();
        // the generated variant as well
        let tagged = gp.tagged(Tag::Decoherent).unwrap();
        let pd = gp.sub_poset(Tag::SeparableDecoherent).unwrap().members;
        let mut q = FixedBitSet::with_capacity(tagged.len());
        for (local, &global) in tagged.global.iter().enumerate() {
            if pd.contains(global) {
                q.insert(local);
            }
        }
        let vt_pd = ValuationTopos::with_generators(tagged, q).unwrap();
        vt_pd.subobject.verify(&vt_pd.varying).unwrap();
    }
}

#[test]
fn characteristic_values_are_sieves_and_natural() {
    for theory in common::matrix_suite(15, 4) {
        let (gp, vt) = bd_topos(&theory);
        for p in 0..vt.tagged.len() {
            for x in vt.varying.stage(p) {
                let sieve = characteristic(&vt.varying, &vt.subobject, p, x).unwrap();
                sieve.verify(&vt.tagged.poset).unwrap();
            }
        }
        characteristic_is_natural(&vt.varying, &vt.subobject).unwrap();
        let et = EventTopos::build(&theory, gp.tagged(Tag::Decoherent).unwrap()).unwrap();
        characteristic_is_natural(&et.varying, &et.accessible).unwrap();
    }
}

#[test]
fn global_elements_are_upward_closed_and_compatible() {
    for theory in common::matrix_suite(15, 4) {
        let (gp, vt) = bd_topos(&theory);
        let poset = &vt.tagged.poset;
        for p in 0..vt.tagged.len() {
            for v in vt.varying.stage(p) {
                let g = vt.global_element(v).unwrap();
                assert!(poset.is_upper(&g.members));
                // stage-wise sieves restrict compatibly
                for a in 0..poset.len() {
                    for b in poset.up_set(a).ones() {
                        let mut down = g.sieve_at(&vt.tagged, a);
                        down.intersect_with(poset.up_set(b));
                        assert_eq!(down, g.sieve_at(&vt.tagged, b));
                    }
                }
            }
        }
        let et = EventTopos::build(&theory, gp.tagged(Tag::Decoherent).unwrap()).unwrap();
        for e in all_events(theory.n()) {
            if let Ok(g) = et.global_element(e) {
                assert!(et.tagged.poset.is_upper(&g.members));
            }
        }
    }
}

#[test]
fn global_section_census_matches_upper_sets() {
    for theory in common::matrix_suite(15, 4) {
        let gp = GrainingPoset::build(&theory).unwrap();
        let tagged = gp.tagged(Tag::Decoherent).unwrap();
        assert!(gamma_iso_check(&tagged.poset).unwrap());
        if gp.len() <= 16 {
            assert!(gamma_iso_check(gp.poset()).unwrap());
        }
    }
}

#[test]
fn full_heyting_algebras_verify_on_small_posets() {
    for theory in common::matrix_suite(25, 5) {
        let gp = GrainingPoset::build(&theory).unwrap();
        let tagged = gp.tagged(Tag::Decoherent).unwrap();
        if tagged.len() <= 5 {
            HeytingAlgebra::full(tagged.poset.clone())
                .unwrap()
                .verify()
                .unwrap();
        }
    }
}

#[test]
fn generated_algebras_have_sound_pseudocomplements() {
    for theory in common::matrix_suite(20, 4) {
        let (_, vt) = bd_topos(&theory);
        let hm = vt.h_map().unwrap();
        let mut gens: Vec<FixedBitSet> = Vec::new();
        for (_, g) in &hm.entries {
            if !gens.contains(&g.members) {
                gens.push(g.members.clone());
            }
        }
        if gens.is_empty() {
            continue;
        }
        let algebra = HeytingAlgebra::generated(vt.tagged.poset.clone(), &gens).unwrap();
        algebra.verify().unwrap();
    }
}

#[test]
fn literal_construction_degenerates() {
    for theory in common::matrix_suite(20, 4) {
        let (_, vt) = bd_topos(&theory);
        assert!(vt.degenerate, "literal subobject must equal the functor");
        // chi is the top morphism
        for p in 0..vt.tagged.len() {
            for x in vt.varying.stage(p) {
                let sieve = characteristic(&vt.varying, &vt.subobject, p, x).unwrap();
                assert!(sieve.is_full(&vt.tagged.poset));
            }
        }
        // every global element is the cone above its home
        for p in 0..vt.tagged.len() {
            for v in vt.varying.stage(p) {
                let g = vt.global_element(v).unwrap();
                assert_eq!(&g.members, vt.tagged.poset.up_set(p));
            }
        }
    }
}

#[test]
fn terminal_object_sends_valuations_to_top() {
    // a poset with a single element: every global element is the whole poset
    let theory = common::three_path();
    let gp = GrainingPoset::build(&theory).unwrap();
    let tagged = gp.tagged(Tag::SeparableDecoherent).unwrap();
    assert_eq!(tagged.len(), 1);
    let vt = ValuationTopos::literal(tagged).unwrap();
    for v in vt.varying.stage(0) {
        let g = vt.global_element(v).unwrap();
        assert_eq!(g.members.count_ones(..), 1);
    }
}
