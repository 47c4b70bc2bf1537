//! Independent combinatorial oracles used by the test suites: these
//! deliberately avoid the lattice pipeline so dual-route checks stay
//! meaningful.

use crate::roots::{AdeType, Kind};
use std::collections::{BTreeSet, HashMap};

/// Deletion results of one node from the affine extension of a single
/// component: the classical maximal full-rank subsystems.
fn affine_deletions(kind: Kind, rank: usize) -> Vec<Vec<(Kind, usize)>> {
    let d = |r: usize| -> Vec<(Kind, usize)> {
        // D_2 = 2A1, D_3 = A3 conventions for small forks
        match r {
            2 => vec![(Kind::A, 1), (Kind::A, 1)],
            3 => vec![(Kind::A, 3)],
            _ => vec![(Kind::D, r)],
        }
    };
    match (kind, rank) {
        (Kind::A, r) => vec![vec![(Kind::A, r)]],
        (Kind::D, r) => {
            let mut out = vec![vec![(Kind::D, r)]];
            for k in 2..=r - 2 {
                let mut parts = d(k);
                parts.extend(d(r - k));
                out.push(parts);
            }
            out
        }
        (Kind::E, 6) => vec![
            vec![(Kind::E, 6)],
            vec![(Kind::A, 1), (Kind::A, 5)],
            vec![(Kind::A, 2), (Kind::A, 2), (Kind::A, 2)],
        ],
        (Kind::E, 7) => vec![
            vec![(Kind::E, 7)],
            vec![(Kind::A, 7)],
            vec![(Kind::A, 1), (Kind::D, 6)],
            vec![(Kind::A, 2), (Kind::A, 5)],
            vec![(Kind::A, 1), (Kind::A, 3), (Kind::A, 3)],
        ],
        (Kind::E, 8) => vec![
            vec![(Kind::E, 8)],
            vec![(Kind::A, 8)],
            vec![(Kind::D, 8)],
            vec![(Kind::A, 1), (Kind::A, 7)],
            vec![(Kind::A, 1), (Kind::E, 7)],
            vec![(Kind::A, 2), (Kind::E, 6)],
            vec![(Kind::A, 3), (Kind::D, 5)],
            vec![(Kind::A, 4), (Kind::A, 4)],
            vec![(Kind::A, 1), (Kind::A, 2), (Kind::A, 5)],
        ],
        _ => unreachable!(),
    }
}

/// All ADE types of full-rank root subsystems of `R(t)` (equivalently, the
/// types `t'` with `R(t)` a finite-index even overlattice of `R(t')`),
/// by iterated affine-extension node deletion.
pub fn full_rank_subsystem_types(t: &AdeType) -> BTreeSet<AdeType> {
    let mut memo: HashMap<AdeType, BTreeSet<AdeType>> = HashMap::new();
    closure(t, &mut memo)
}

fn closure(t: &AdeType, memo: &mut HashMap<AdeType, BTreeSet<AdeType>>) -> BTreeSet<AdeType> {
    if let Some(hit) = memo.get(t) {
        return hit.clone();
    }
    // seed with t itself to break cycles
    memo.insert(t.clone(), BTreeSet::from([t.clone()]));
    let mut out: BTreeSet<AdeType> = BTreeSet::from([t.clone()]);
    let comps = t.components().to_vec();
    for (i, &(k, r)) in comps.iter().enumerate() {
        for replacement in affine_deletions(k, r) {
            let mut parts: Vec<(Kind, usize)> = comps.clone();
            parts.remove(i);
            parts.extend(replacement);
            let next = AdeType::new(parts);
            if next != *t && out.insert(next.clone()) {
                for deeper in closure(&next, memo) {
                    out.insert(deeper);
                }
            }
        }
    }
    memo.insert(t.clone(), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn types(t: &str) -> Vec<String> {
        full_rank_subsystem_types(&t.parse().unwrap())
            .into_iter()
            .map(|x| x.to_string())
            .collect()
    }

    #[test]
    fn a_types_are_rigid() {
        assert_eq!(types("A5"), vec!["A5"]);
        assert_eq!(types("A1+A2"), vec!["A1+A2"]);
    }

    #[test]
    fn d4_contains_4a1() {
        let t = types("D4");
        assert_eq!(t, vec!["4A1".to_string(), "D4".to_string()]);
    }

    #[test]
    fn e8_contains_classical_subsystems() {
        let t = types("E8");
        for s in ["E8", "D8", "A8", "8A1", "2A4", "4A2", "2A1+2A3", "A1+E7", "2D4"] {
            assert!(t.contains(&s.to_string()), "{s} missing from E8 closure");
        }
        assert!(!t.contains(&"A1+A8".to_string())); // rank 9
    }

    #[test]
    fn all_members_have_full_rank() {
        for base in ["E7", "D6", "A4+D5"] {
            let b: AdeType = base.parse().unwrap();
            for sub in full_rank_subsystem_types(&b) {
                assert_eq!(sub.rank(), b.rank());
            }
        }
    }
}
