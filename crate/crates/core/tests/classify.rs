//! Classification of configuration classes: counts, the completeness of
//! the emitted pairs against an independent subsystem oracle, and spot
//! checks from the known rows.

use l10_ade::embed::{classify_configurations, EmbedContext};
use l10_ade::oracle::full_rank_subsystem_types;
use l10_ade::roots::AdeType;
use std::collections::BTreeSet;

#[test]
fn classify_configuration_classes() {
    let ctx = EmbedContext::build().expect("context");
    let classes = classify_configurations(&ctx).expect("classification");
    assert_eq!(classes.len(), 184, "configuration class count");

    // 39 classes have configurations of full rank 9 (the table's final
    // block); the 31 realizable ones among them are checked at the strong
    // classification stage
    let rank9 = classes.iter().filter(|c| c.rank() == 9).count();
    assert_eq!(rank9, 39, "rank-9 classes");

    // 2A1+2A3 pairs with exactly these overlattice types
    let got: Vec<String> = classes
        .iter()
        .filter(|c| c.tau_phi.to_string() == "2A1+2A3")
        .map(|c| c.tau_rbar.to_string())
        .collect();
    assert_eq!(got, vec!["A1+E7", "A3+D5", "D8", "E8"]);

    // pair completeness both ways against the subsystem-closure oracle:
    // a pair (t, tbar) appears iff rank(t) < 10, tbar is a basis-subset
    // type, and t is a full-rank subsystem type of tbar
    let emitted: BTreeSet<(AdeType, AdeType)> =
        classes.iter().map(|c| (c.tau_phi.clone(), c.tau_rbar.clone())).collect();
    let mut expected: BTreeSet<(AdeType, AdeType)> = BTreeSet::new();
    for tbar in ctx.types.by_type.keys() {
        for t in full_rank_subsystem_types(tbar) {
            expected.insert((t, tbar.clone()));
        }
    }
    assert_eq!(emitted, expected, "pair sets disagree with the subsystem oracle");

    // keys are unique and sorted canonically
    let keys: Vec<String> = classes.iter().map(|c| c.key()).collect();
    let unique: BTreeSet<&String> = keys.iter().collect();
    assert_eq!(unique.len(), keys.len());
}
