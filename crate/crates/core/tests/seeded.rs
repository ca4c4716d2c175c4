//! Seeded-corpus workflows that cross module boundaries: three-set
//! covers, self-cover comparison maps, morphism pullbacks, and byte-exact
//! bundle round trips on randomized content.

use cechdol::{
    bundle_from_str, bundle_to_string, canonical_map, load_bundle, load_bundle_dir,
    random_morphism, random_self_cover, random_three_set_diagram, random_valid_diagram,
    save_bundle, save_bundle_dir, total_complex_full, total_pullback, Bidegree, BigradedComplex,
    ModelBundle, SizeBounds,
};

fn qq_window(c: &BigradedComplex) -> Vec<Bidegree> {
    let mut window = c.support();
    window.extend(c.support().iter().map(|at| at.down_q()));
    window.sort();
    window.dedup();
    window
}

#[test]
fn three_set_diagrams_assemble_valid_totals() {
    for seed in 0..50 {
        let d = random_three_set_diagram(seed);
        d.check().unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let total = total_complex_full(&d).unwrap().complex;
        assert!(!total.support().is_empty(), "seed {seed} has no content");
        for &at in &qq_window(&total) {
            let twice = total.diff_at(at.up_q()).mul(&total.diff_at(at)).unwrap();
            assert!(twice.is_zero(), "seed {seed}: D o D is nonzero at {at}");
        }
    }
}

#[test]
fn self_cover_comparison_maps_are_isomorphisms() {
    for seed in 0..12 {
        let (d, global, to_pieces) = random_self_cover(seed);
        let map =
            canonical_map(&d, &global, &to_pieces).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        for &at in &global.support() {
            assert!(
                map.is_iso_on_cohomology(at).unwrap(),
                "seed {seed}: comparison map fails at {at}"
            );
        }
    }
}

#[test]
fn seeded_pullbacks_commute_with_the_total_differential() {
    let mut nonzero = 0usize;
    for seed in 0..20 {
        let m = random_morphism(seed);
        // total_pullback verifies the chain condition while assembling
        let pull = total_pullback(&m).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        nonzero += pull.blocks().values().filter(|b| !b.is_zero()).count();
    }
    assert!(nonzero > 0, "every seeded pullback was zero");
}

#[test]
fn randomized_bundles_round_trip_byte_exactly() {
    for seed in [0u64, 3, 9] {
        let mut bundle = ModelBundle {
            name: format!("seeded{seed}"),
            ..ModelBundle::default()
        };
        let d = random_valid_diagram(seed, SizeBounds::default());
        bundle.diagrams.insert(d.name.clone(), d);
        let m = random_morphism(seed);
        bundle
            .diagrams
            .insert(m.source.name.clone(), m.source.clone());
        bundle
            .diagrams
            .insert(m.target.name.clone(), m.target.clone());
        bundle.morphisms.insert(m.name.clone(), m);

        let text = bundle_to_string(&bundle);
        let reparsed = bundle_from_str("mem", &text).unwrap();
        assert_eq!(bundle_to_string(&reparsed), text, "seed {seed}");

        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("bundle.txt");
        save_bundle(&file, &bundle).unwrap();
        assert_eq!(bundle_to_string(&load_bundle(&file).unwrap()), text);

        let as_dir = dir.path().join("bundle");
        save_bundle_dir(&as_dir, &bundle).unwrap();
        assert_eq!(bundle_to_string(&load_bundle_dir(&as_dir).unwrap()), text);
    }
}
