//! Finite generating sets of the stabilizer of an embedded configuration
//! in `O^+(L10)`: the coset sieve over the Weyl chambers contained in the
//! configuration's positive cone, and the explicit shortcut for the two
//! heavy classes whose overlattice contains a unimodular summand.

use crate::chambers::{restrict_to_sigma, RANK};
use crate::embed::{EmbedContext, EmbeddingClass, SigmaRepData};
use crate::error::{Error, Result};
use crate::exact;
use crate::lattice::{Lattice, Sublattice};
use crate::matrix::Mat;
use crate::orbits::{orbit_stabilizer, perm_orbit_stabilizer};
use crate::roots::{analyze_configuration, Kind};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::{HashMap, HashSet};
use std::time::Instant;

/// Output of the stabilizer computation for one class.
pub struct ConfStabilizer {
    /// Generators of the stabilizer of the configuration (as a set of
    /// vectors) in `O^+(L10)`.
    pub gens: Vec<Mat>,
    /// Group order when the group is finite (the shortcut classes).
    pub order_if_finite: Option<BigInt>,
}

/// Sorted-row canonical form of a set of vectors.
fn canon_rows(rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let mut r = rows;
    r.sort();
    r
}

fn apply_rows(rows: &[Vec<i64>], m: &Mat) -> Option<Vec<Vec<i64>>> {
    rows.iter().map(|r| m.apply_row_i64(r)).collect()
}

/// The two classes the sieve refuses: their stabilizers are computed via
/// the orthogonal splitting off of the unimodular summand instead.
pub fn has_unimodular_shortcut(class: &EmbeddingClass) -> bool {
    let key = (class.tau_phi.to_string(), class.tau_rbar.to_string());
    key == ("8A1".into(), "E8".into()) || key == ("9A1".into(), "A1+E8".into())
}

/// Stabilizer generators for a configuration class. Dispatches to the
/// splitting shortcut for the two classes where the sieve is too slow.
pub fn stab_phi_f(
    ctx: &EmbedContext,
    class: &EmbeddingClass,
    deadline: Option<Instant>,
) -> Result<ConfStabilizer> {
    if has_unimodular_shortcut(class) {
        return stab_unimodular_shortcut(ctx, class);
    }
    stab_phi_f_sieve(ctx, class, deadline)
}

/// The generic method: orbit-stabilizer of the configuration under the
/// subset stabilizer, then a walk over all Weyl chambers of the span
/// contained in the configuration's positive cone, emitting one coset
/// generator per chamber whose translate returns the configuration to
/// itself.
pub fn stab_phi_f_sieve(
    ctx: &EmbedContext,
    class: &EmbeddingClass,
    deadline: Option<Instant>,
) -> Result<ConfStabilizer> {
    let rep = ctx.reps.get(&class.sigma.0).ok_or_else(|| {
        Error::Invalid("class subset has no representative data".into())
    })?;
    let k = class.sigma.len();
    let n = class.tau_phi.rank();
    let phi_rows: Vec<Vec<i64>> = (0..n)
        .map(|i| class.phi_sigma.row_i64(i).ok_or_else(|| Error::Invalid("wide row".into())))
        .collect::<Result<_>>()?;
    let phi_set = canon_rows(phi_rows.clone());

    // orbit of the configuration under the subset stabilizer; group
    // elements carried as (full matrix, restriction) pairs
    let gens: Vec<(Mat, Mat)> = rep
        .stab
        .set_stab_gens
        .iter()
        .map(|g| Ok((g.clone(), restrict_to_sigma(g, class.sigma)?)))
        .collect::<Result<_>>()?;
    let os = orbit_stabilizer(
        phi_set.clone(),
        &gens,
        (Mat::identity(RANK), Mat::identity(k)),
        |s, g| canon_rows(apply_rows(s, &g.1).expect("restricted action stays small")),
        |a, b| (a.0.mul(&b.0), a.1.mul(&b.1)),
        |g| (exact::inverse_unimodular(&g.0), exact::inverse_unimodular(&g.1)),
        10_000_000,
    )?;
    let orbit_pos: HashMap<Vec<Vec<i64>>, usize> =
        os.orbit.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();

    let mut out_gens: Vec<Mat> = Vec::new();
    let mut seen: HashSet<Mat> = HashSet::new();
    for (g, _) in &os.stab_gens {
        if !g.is_identity() && seen.insert(g.clone()) {
            out_gens.push(g.clone());
        }
    }

    // chamber sieve preparation
    let gram = rep.rs.lattice.gram().clone();
    let (adj, det) = exact::inverse(&gram).expect("definite");
    // rows of `dual` are positive multiples of the dual basis vectors
    let dual = if det.is_negative() { adj.neg() } else { adj };
    let pair_cols = gram.mul(&class.phi_sigma.transpose()); // k x n
    let c_int = rep.rs.lattice.weyl_vector_int();
    // simple reflections of the span, as k x k and as lifted 10 x 10
    let mut refl_k = Vec::with_capacity(k);
    let mut refl_full = Vec::with_capacity(k);
    for (j, &mem) in class.sigma.members().iter().enumerate() {
        let mut r = vec![0i64; k];
        r[j] = 1;
        refl_k.push(rep.rs.lattice.reflection(&r)?);
        let mut rf = vec![0i64; RANK];
        rf[mem] = 1;
        refl_full.push(ctx.e10.lattice.reflection(&rf)?);
    }
    let inside = |m: &Mat| -> bool {
        // every dual-basis image must pair >= 0 with every configuration root
        let t = dual.mul(m).mul(&pair_cols);
        for i in 0..k {
            for j in 0..n {
                match t.entry_i64(i, j) {
                    Some(v) if v >= 0 => {}
                    Some(_) => return false,
                    None => return !t.entry(i, j).is_negative(),
                }
            }
        }
        true
    };

    // BFS over chambers within the cone, keyed by the Weyl-vector image
    struct Node {
        m: Mat,
        m_inv: Mat,
    }
    let id = Mat::identity(k);
    debug_assert!(inside(&id), "base chamber not inside the configuration cone");
    let mut visited: HashMap<Vec<i64>, u32> = HashMap::new();
    visited.insert(c_int.clone(), 0);
    let mut parents: Vec<(u32, u8)> = vec![(u32::MAX, 0)];
    let mut queue: Vec<Node> = vec![Node { m: id.clone(), m_inv: id }];
    let mut head = 0;
    let mut hits: Vec<(u32, usize)> = Vec::new(); // (node index, orbit position)
    while head < queue.len() {
        if let Some(d) = deadline {
            if Instant::now() > d {
                return Err(Error::BudgetExceeded);
            }
        }
        let cur = std::mem::replace(
            &mut queue[head],
            Node { m: Mat::zero(0, 0), m_inv: Mat::zero(0, 0) },
        );
        // check for a coset hit at this chamber
        let phi_back = canon_rows(
            apply_rows(&phi_rows, &cur.m_inv).ok_or_else(|| Error::Invalid("overflow".into()))?,
        );
        if let Some(&pos) = orbit_pos.get(&phi_back) {
            hits.push((head as u32, pos));
        }
        for (j, s) in refl_k.iter().enumerate() {
            let m2 = s.mul(&cur.m);
            if !inside(&m2) {
                continue;
            }
            let key = m2_key(&m2, &c_int)?;
            if visited.contains_key(&key) {
                continue;
            }
            visited.insert(key, queue.len() as u32);
            parents.push((head as u32, j as u8));
            let m2_inv = cur.m_inv.mul(s);
            queue.push(Node { m: m2, m_inv: m2_inv });
        }
        head += 1;
    }

    // assemble one generator per hit: transversal element times the
    // lifted chamber word
    for (node, pos) in hits {
        if node == 0 && pos == 0 {
            continue; // identity coset
        }
        // reconstruct the lifted word along the parent chain
        let mut word_rev: Vec<u8> = Vec::new();
        let mut at = node;
        while parents[at as usize].0 != u32::MAX {
            word_rev.push(parents[at as usize].1);
            at = parents[at as usize].0;
        }
        let mut w_full = Mat::identity(RANK);
        for &j in word_rev.iter().rev() {
            w_full = refl_full[j as usize].mul(&w_full);
        }
        let g = os.transversal[pos].0.mul(&w_full);
        debug_assert_eq!(
            canon_rows(
                apply_rows(
                    &phi_to_full(&phi_rows, class),
                    &g
                )
                .expect("apply")
            ),
            canon_rows(phi_to_full(&phi_rows, class)),
            "sieve generator does not stabilize the configuration"
        );
        if !g.is_identity() && seen.insert(g.clone()) {
            out_gens.push(g);
        }
    }
    Ok(ConfStabilizer { gens: out_gens, order_if_finite: None })
}

fn m2_key(m: &Mat, c: &[i64]) -> Result<Vec<i64>> {
    m.apply_row_i64(c).ok_or_else(|| Error::Invalid("chamber key overflow".into()))
}

fn phi_to_full(phi_rows_sigma: &[Vec<i64>], class: &EmbeddingClass) -> Vec<Vec<i64>> {
    let members = class.sigma.members();
    phi_rows_sigma
        .iter()
        .map(|r| {
            let mut full = vec![0i64; RANK];
            for (j, &mem) in members.iter().enumerate() {
                full[mem] = r[j];
            }
            full
        })
        .collect()
}

/// The kernel/image construction for the two classes whose span splits
/// off a unimodular summand: the stabilizer is finite, built from the
/// code-stabilizing coordinate permutations and (when the configuration
/// misses the complement) the isometry swapping the two isotropic rays of
/// the complementary hyperbolic plane.
pub fn stab_unimodular_shortcut(
    ctx: &EmbedContext,
    class: &EmbeddingClass,
) -> Result<ConfStabilizer> {
    if !has_unimodular_shortcut(class) {
        return Err(Error::Invalid(format!(
            "no unimodular shortcut for {}",
            class.key()
        )));
    }
    let rep: &SigmaRepData = ctx
        .reps
        .get(&class.sigma.0)
        .ok_or_else(|| Error::Invalid("missing subset data".into()))?;
    let members = class.sigma.members();
    // locate the rank-8 E component of the span
    let comps = analyze_configuration(rep.rs.lattice.gram())?;
    let e8_comp = comps
        .comps
        .iter()
        .find(|c| c.kind == Kind::E && c.rank == 8)
        .ok_or_else(|| Error::Invalid("span has no E8 component".into()))?;
    let e8_positions: Vec<usize> = {
        let mut v = e8_comp.vertices.clone();
        v.sort_unstable();
        v
    };
    let e8_members: Vec<usize> = e8_positions.iter().map(|&p| members[p]).collect();

    // configuration roots inside / outside the E8 part (span coordinates)
    let n = class.tau_phi.rank();
    let mut in_e8: Vec<Vec<i64>> = Vec::new();
    let mut outside: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        let row = class.phi_sigma.row_i64(i).expect("small");
        let supported = (0..class.sigma.len())
            .all(|j| row[j] == 0 || e8_positions.contains(&j));
        if supported {
            in_e8.push(e8_positions.iter().map(|&j| row[j]).collect());
        } else {
            outside.push(row);
        }
    }
    assert_eq!(in_e8.len(), 8, "eight orthogonal roots must sit in the E8 part");
    assert!(outside.len() <= 1);

    // the glue code of the eight roots inside the E8 lattice
    let a = Mat::from_rows(in_e8.clone());
    let (a_adj, a_det) = exact::inverse(&a).expect("independent roots");
    // codeword of x: coordinates of 2 x A^{-1} mod 2
    let code_gens: Vec<u16> = (0..8)
        .map(|i| {
            let mut w = 0u16;
            for j in 0..8 {
                let num = BigInt::from(2) * a_adj.entry(i, j);
                let q = &num / &a_det;
                assert!((&num % &a_det).is_zero(), "glue denominator is not 2");
                if !(&q % BigInt::from(2)).is_zero() {
                    w |= 1 << j;
                }
            }
            w
        })
        .collect();
    let code = close_code(&code_gens);
    assert_eq!(code.len(), 16, "glue code of an E8 overlattice of 8A1 has dimension 4");

    // stabilizer of the code inside S8, by orbit-stabilizer on codes
    let s8_gens: Vec<Vec<usize>> = vec![vec![1, 0, 2, 3, 4, 5, 6, 7], vec![1, 2, 3, 4, 5, 6, 7, 0]];
    let os = orbit_stabilizer(
        code.clone(),
        &s8_gens,
        crate::orbits::perm_identity(8),
        |c, p| apply_perm_to_code(c, p),
        |a, b| crate::orbits::perm_mul(a, b),
        |p| crate::orbits::perm_inv(p),
        50_000,
    )?;
    let stab_order = BigInt::from(40320i64 / os.orbit.len() as i64);
    assert_eq!(stab_order, BigInt::from(1344), "code stabilizer order");

    // complement of the E8 part: a hyperbolic plane
    let sel = Mat::from_rows(
        e8_members
            .iter()
            .map(|&m| {
                let mut r = vec![0i64; RANK];
                r[m] = 1;
                r
            })
            .collect(),
    );
    let comp = Sublattice::new(sel.clone())?.orthogonal_complement(&ctx.e10.lattice);
    let u_basis = comp.sublattice.basis().clone();
    assert_eq!(u_basis.rows(), 2);
    let split = Mat::vstack(&sel, &u_basis);
    assert_eq!(exact::det(&split).abs(), BigInt::from(1), "E8 + U must fill the lattice");
    let split_inv = exact::inverse_unimodular(&split);

    let mut gens: Vec<Mat> = Vec::new();
    // code-stabilizing permutations of the eight roots, acting as identity
    // on the complement
    for p in &os.stab_gens {
        let mut pm = Mat::zero(8, 8);
        for (i, &pi) in p.iter().enumerate() {
            pm.set_i64(i, pi, 1);
        }
        let m8 = {
            let raw = a_adj.mul(&pm).mul(&a);
            let mut rows = Vec::with_capacity(8);
            for i in 0..8 {
                let mut row = Vec::with_capacity(8);
                for j in 0..8 {
                    let e = raw.entry(i, j);
                    assert!(
                        (&e % &a_det).is_zero(),
                        "code stabilizer does not extend to the overlattice"
                    );
                    row.push(e / &a_det);
                }
                rows.push(row);
            }
            Mat::from_big_rows(rows)
        };
        let g10 = split_inv.mul(&Mat::block_diag(&m8, &Mat::identity(2))).mul(&split);
        debug_assert!(ctx.e10.lattice.is_isometry(&g10));
        gens.push(g10);
    }

    let order = if outside.is_empty() {
        // 8A1 in E8: the hyperbolic-plane swap joins in
        let k_gram = comp.sublattice.gram_in(&ctx.e10.lattice);
        let swap2 = hyperbolic_swap(&k_gram)?;
        let g10 = split_inv.mul(&Mat::block_diag(&Mat::identity(8), &swap2)).mul(&split);
        debug_assert!(ctx.e10.lattice.is_isometry(&g10));
        gens.push(g10);
        stab_order * BigInt::from(2)
    } else {
        stab_order
    };

    // every generator fixes the configuration as a set
    let phi_rows: Vec<Vec<i64>> = (0..n).map(|i| class.phi_sigma.row_i64(i).unwrap()).collect();
    let phi_full = canon_rows(phi_to_full(&phi_rows, class));
    for g in &gens {
        assert_eq!(canon_rows(apply_rows(&phi_full, g).unwrap()), phi_full);
    }
    Ok(ConfStabilizer { gens, order_if_finite: Some(order) })
}

fn close_code(gens: &[u16]) -> Vec<u16> {
    let mut seen: HashSet<u16> = HashSet::new();
    seen.insert(0);
    let mut queue = vec![0u16];
    let mut qi = 0;
    while qi < queue.len() {
        let x = queue[qi];
        qi += 1;
        for &g in gens {
            let y = x ^ g;
            if seen.insert(y) {
                queue.push(y);
            }
        }
    }
    let mut v: Vec<u16> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

fn apply_perm_to_code(code: &Vec<u16>, p: &Vec<usize>) -> Vec<u16> {
    let mut out: Vec<u16> = code
        .iter()
        .map(|&w| {
            let mut o = 0u16;
            for (from, &to) in p.iter().enumerate() {
                if w & (1 << from) != 0 {
                    o |= 1 << to;
                }
            }
            o
        })
        .collect();
    out.sort_unstable();
    out
}

/// Find the isometry of a rank-2 even unimodular hyperbolic lattice that
/// swaps its two isotropic rays (the nontrivial cone-preserving isometry).
fn hyperbolic_swap(gram: &Mat) -> Result<Mat> {
    let l = Lattice::new(gram.clone())?;
    for x in -6i64..=6 {
        for y in -6i64..=6 {
            if (x, y) == (0, 0) || num_integer::gcd(x, y) != 1 {
                continue;
            }
            let u1 = vec![x, y];
            if !l.norm(&u1)?.is_zero() {
                continue;
            }
            for x2 in -6i64..=6 {
                for y2 in -6i64..=6 {
                    let u2 = vec![x2, y2];
                    if !l.norm(&u2)?.is_zero() || l.inner(&u1, &u2)? != BigInt::from(1) {
                        continue;
                    }
                    let p = Mat::from_rows(vec![u1.clone(), u2.clone()]);
                    if exact::det(&p).abs() != BigInt::from(1) {
                        continue;
                    }
                    let pinv = exact::inverse_unimodular(&p);
                    let swap = Mat::from_rows(vec![vec![0, 1], vec![1, 0]]);
                    let m = pinv.mul(&swap).mul(&p);
                    debug_assert!(l.is_isometry(&m));
                    return Ok(m);
                }
            }
        }
    }
    Err(Error::Invalid("no isotropic basis found in the hyperbolic plane".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::classify_configurations;
    use crate::orbits::perm_closure;
    use std::sync::OnceLock;

    fn context() -> &'static (EmbedContext, Vec<EmbeddingClass>) {
        static CTX: OnceLock<(EmbedContext, Vec<EmbeddingClass>)> = OnceLock::new();
        CTX.get_or_init(|| {
            let ctx = EmbedContext::build().unwrap();
            let classes = classify_configurations(&ctx).unwrap();
            (ctx, classes)
        })
    }

    fn class_by_key<'a>(classes: &'a [EmbeddingClass], key: &str) -> &'a EmbeddingClass {
        classes.iter().find(|c| c.key() == key).unwrap()
    }

    #[test]
    fn shortcut_orders() {
        let (ctx, classes) = context();
        let c = class_by_key(classes, "8A1/E8");
        let s = stab_unimodular_shortcut(ctx, c).unwrap();
        assert_eq!(s.order_if_finite, Some(BigInt::from(2688)));
        let c = class_by_key(classes, "9A1/A1+E8");
        let s = stab_unimodular_shortcut(ctx, c).unwrap();
        assert_eq!(s.order_if_finite, Some(BigInt::from(1344)));
        // no shortcut elsewhere
        let c = class_by_key(classes, "A1/A1");
        assert!(stab_unimodular_shortcut(ctx, c).is_err());
    }

    #[test]
    fn sieve_on_small_classes() {
        let (ctx, classes) = context();
        for key in ["A1/A1", "2A1/2A1", "A2/A2", "4A1/D4", "7A1/E7"] {
            let c = class_by_key(classes, key);
            let s = stab_phi_f_sieve(ctx, c, None).unwrap();
            let phi: Vec<Vec<i64>> = (0..c.tau_phi.rank())
                .map(|i| c.phi_sigma.row_i64(i).unwrap())
                .collect();
            let full = canon_rows(phi_to_full(&phi, c));
            for g in &s.gens {
                assert!(ctx.e10.lattice.is_isometry(g), "{key}");
                assert_eq!(canon_rows(apply_rows(&full, g).unwrap()), full, "{key}");
            }
            // random words of bounded length also fix the configuration
            let mut w = Mat::identity(RANK);
            for (i, g) in s.gens.iter().enumerate().take(6) {
                if i % 2 == 0 {
                    w = w.mul(g);
                } else {
                    w = w.mul(&exact::inverse_unimodular(g));
                }
                assert_eq!(canon_rows(apply_rows(&full, &w).unwrap()), full, "{key}");
            }
        }
    }

    #[test]
    fn sieve_agrees_with_permutation_count_on_4a1_d4() {
        // for 4A1 with span D4 the image of the stabilizer in Aut(Phi) is
        // all of S4 (triality plus the subset stabilizer); check that the
        // induced permutation group of the sieve generators is S4
        let (ctx, classes) = context();
        let c = class_by_key(classes, "4A1/D4");
        let s = stab_phi_f_sieve(ctx, c, None).unwrap();
        let phi: Vec<Vec<i64>> = (0..4).map(|i| c.phi_sigma.row_i64(i).unwrap()).collect();
        let full: Vec<Vec<i64>> = phi_to_full(&phi, c);
        let mut perms: Vec<Vec<usize>> = Vec::new();
        for g in &s.gens {
            let imgs = apply_rows(&full, g).unwrap();
            let p: Vec<usize> = imgs
                .iter()
                .map(|im| full.iter().position(|r| r == im).unwrap())
                .collect();
            perms.push(p);
        }
        let group = perm_closure(4, &perms, 1000).unwrap();
        assert_eq!(group.len(), 24);
    }
}
