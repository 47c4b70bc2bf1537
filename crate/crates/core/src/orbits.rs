//! Orbit-stabilizer machinery: the generic worklist algorithm producing a
//! transversal plus Schreier generators of the stabilizer, and permutation
//! group helpers.

use crate::error::{Error, Result};
use std::collections::{HashMap, HashSet};
use std::hash::Hash;

/// Permutations compose left-to-right, matching the right action used for
/// isometries: `apply(mul(p, q), i) = q[p[i]]`.
pub fn perm_mul(p: &[usize], q: &[usize]) -> Vec<usize> {
    p.iter().map(|&i| q[i]).collect()
}

pub fn perm_inv(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        out[pi] = i;
    }
    out
}

pub fn perm_identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Full closure of a permutation generator set.
pub fn perm_closure(n: usize, gens: &[Vec<usize>], cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let id = perm_identity(n);
    seen.insert(id.clone());
    let mut queue = vec![id];
    let mut qi = 0;
    while qi < queue.len() {
        let x = queue[qi].clone();
        qi += 1;
        for g in gens {
            let y = perm_mul(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::OrbitCapExceeded(cap));
                }
                queue.push(y);
            }
        }
    }
    queue.sort();
    Ok(queue)
}

/// Evaluate a Schreier word over permutation generators: positive entries
/// are generators (1-based), negative their inverses.
pub fn perm_word(n: usize, gens: &[Vec<usize>], word: &[isize]) -> Vec<usize> {
    let mut p = perm_identity(n);
    for &s in word {
        let g = &gens[(s.unsigned_abs()) - 1];
        if s > 0 {
            p = perm_mul(&p, g);
        } else {
            p = perm_mul(&p, &perm_inv(g));
        }
    }
    p
}

/// Result of the orbit-stabilizer worklist: a transversal mapping
/// bijectively onto the orbit, and Schreier generators of the stabilizer
/// of the base point.
pub struct OrbitStabilizer<S, G> {
    pub orbit: Vec<S>,
    pub transversal: Vec<G>,
    pub stab_gens: Vec<G>,
}

impl<S: Eq + Hash + Clone, G> OrbitStabilizer<S, G> {
    pub fn position(&self, s: &S) -> Option<usize> {
        self.orbit.iter().position(|x| x == s)
    }
}

/// Generic worklist orbit-stabilizer. `gens` must be closed under inverse
/// or `inv` is used to add the missing inverses; `compose` is in action
/// order (`x^{compose(g, h)} = (x^g)^h`).
pub fn orbit_stabilizer<S, G>(
    s0: S,
    gens: &[G],
    identity: G,
    act: impl Fn(&S, &G) -> S,
    compose: impl Fn(&G, &G) -> G,
    inv: impl Fn(&G) -> G,
    cap: usize,
) -> Result<OrbitStabilizer<S, G>>
where
    S: Clone + Eq + Hash,
    G: Clone + Eq + Hash,
{
    let mut all_gens: Vec<G> = Vec::with_capacity(gens.len() * 2);
    for g in gens {
        all_gens.push(g.clone());
        let gi = inv(g);
        if &gi != g {
            all_gens.push(gi);
        }
    }
    let mut orbit: Vec<S> = vec![s0.clone()];
    let mut transversal: Vec<G> = vec![identity];
    let mut pos: HashMap<S, usize> = HashMap::new();
    pos.insert(s0, 0);
    let mut stab_gens: Vec<G> = Vec::new();
    let mut stab_seen: HashSet<G> = HashSet::new();
    let mut i = 0;
    while i < orbit.len() {
        for g in &all_gens {
            let img = act(&orbit[i], g);
            match pos.get(&img) {
                None => {
                    if orbit.len() >= cap {
                        return Err(Error::OrbitCapExceeded(cap));
                    }
                    pos.insert(img.clone(), orbit.len());
                    transversal.push(compose(&transversal[i], g));
                    orbit.push(img);
                }
                Some(&m) => {
                    let s = compose(&compose(&transversal[i], g), &inv(&transversal[m]));
                    if stab_seen.insert(s.clone()) {
                        stab_gens.push(s);
                    }
                }
            }
        }
        i += 1;
    }
    // identity Schreier generators carry no information
    stab_gens.retain(|g| {
        let fixed = act(&orbit[0], g) == orbit[0];
        debug_assert!(fixed, "Schreier generator moves the base point");
        fixed
    });
    Ok(OrbitStabilizer { orbit, transversal, stab_gens })
}

/// Orbit-stabilizer for permutations acting on points.
pub fn perm_orbit_stabilizer(
    n: usize,
    point: usize,
    gens: &[Vec<usize>],
    cap: usize,
) -> Result<OrbitStabilizer<usize, Vec<usize>>> {
    orbit_stabilizer(
        point,
        gens,
        perm_identity(n),
        |&s, g| g[s],
        |a, b| perm_mul(a, b),
        |g| perm_inv(g),
        cap,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group() {
        let r = perm_orbit_stabilizer(3, 0, &[], 10).unwrap();
        assert_eq!(r.orbit, vec![0]);
        assert_eq!(r.transversal.len(), 1);
        assert!(r.stab_gens.is_empty());
    }

    #[test]
    fn s3_on_points() {
        // S3 generated by a transposition and a 3-cycle
        let gens = vec![vec![1, 0, 2], vec![1, 2, 0]];
        let r = perm_orbit_stabilizer(3, 0, &gens, 10).unwrap();
        assert_eq!(r.orbit.len(), 3);
        // stabilizer of a point in S3 has order 2
        let stab = perm_closure(3, &r.stab_gens, 100).unwrap();
        assert_eq!(stab.len(), 2);
        for g in &r.stab_gens {
            assert_eq!(g[0], 0);
        }
        // transversal really maps the base point onto the orbit
        for (s, t) in r.orbit.iter().zip(&r.transversal) {
            assert_eq!(t[0], *s);
        }
    }

    #[test]
    fn closure_and_words() {
        let gens = vec![vec![1, 0, 2], vec![1, 2, 0]];
        let all = perm_closure(3, &gens, 100).unwrap();
        assert_eq!(all.len(), 6);
        let w = perm_word(3, &gens, &[1, 2, -1]);
        // consistency: evaluating the inverse word gives the inverse
        let wi = perm_word(3, &gens, &[1, -2, -1]);
        assert_eq!(perm_mul(&w, &wi), perm_identity(3));
    }

    #[test]
    fn orbit_cap() {
        let gens = vec![vec![1, 2, 0]];
        assert!(perm_orbit_stabilizer(3, 0, &gens, 2).is_err());
    }

    #[test]
    fn matrix_action_orbit() {
        use crate::matrix::Mat;
        // the four sign patterns of a pair under coordinate swaps/negation
        let swap = Mat::from_rows(vec![vec![0, 1], vec![1, 0]]);
        let neg0 = Mat::from_rows(vec![vec![-1, 0], vec![0, 1]]);
        let r = orbit_stabilizer(
            vec![1i64, 2],
            &[swap, neg0],
            Mat::identity(2),
            |v, g| g.apply_row_i64(v).unwrap(),
            |a, b| a.mul(b),
            |g| crate::exact::inverse_unimodular(g),
            100,
        )
        .unwrap();
        assert_eq!(r.orbit.len(), 8);
        for g in &r.stab_gens {
            assert_eq!(g.apply_row_i64(&[1, 2]).unwrap(), vec![1, 2]);
        }
    }
}
