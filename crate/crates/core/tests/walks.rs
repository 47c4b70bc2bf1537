//! Full chamber-walk classification: every admissible subset's walk class
//! must coincide with its ADE-type class, giving 86 classes in all.

use l10_ade::chambers::{
    enumerate_s, orbit_of_sigma, sigma_type, stab_sigma, E10, LongestCache, SigmaTypes,
};
use rayon::prelude::*;
use std::collections::BTreeSet;

#[test]
fn walk_classes_match_type_classes() {
    let e10 = E10::new();
    let longest = LongestCache::build_all(&e10);
    let types = SigmaTypes::compute(&e10);

    let all = enumerate_s();
    let orbits: Vec<_> = all
        .par_iter()
        .map(|&s| orbit_of_sigma(&e10, &longest, s).expect("walk"))
        .collect();

    let mut classes: BTreeSet<Vec<u16>> = BTreeSet::new();
    for orbit in &orbits {
        let mut class: Vec<u16> = orbit.class.iter().map(|s| s.0).collect();
        class.sort_unstable();
        // the walk class is exactly the set of subsets of equal type
        let t = sigma_type(&e10, orbit.sigma).unwrap();
        let mut expect: Vec<u16> = types.by_type[&t].iter().map(|s| s.0).collect();
        expect.sort_unstable();
        assert_eq!(class, expect, "class of {} disagrees with its type", orbit.sigma.describe());
        classes.insert(class);
    }
    assert_eq!(classes.len(), 86);

    // soundness of the generators on a sample: each preserves the span
    let sample = &orbits[17];
    for g in &sample.gens {
        assert!(e10.lattice.is_isometry(g));
    }
    let stab = stab_sigma(&e10, sample).expect("stab");
    for (k, p) in stab.set_stab_gens.iter().zip(&stab.perms) {
        assert!(e10.lattice.is_isometry(k));
        assert!(!p.is_empty());
    }
}
