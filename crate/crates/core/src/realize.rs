//! Realizability of configuration classes: the rank-(10+n) double-cover
//! lattice built from the doubled rank-10 lattice and half-integral lifts,
//! the four overlattice conditions, and the enumeration of strong classes
//! with their quotient invariants.

use crate::chambers::RANK;
use crate::discform::{
    discriminant_form, isotropic_elements, overlattice_from_isotropic, subgroup_orbit,
    Discriminant, Overlattice, Subgroup,
};
use crate::embed::{EmbedContext, EmbeddingClass};
use crate::error::{Error, Result};
use crate::exact;
use crate::genus::even_lattice_exists;
use crate::lattice::Lattice;
use crate::matrix::Mat;
use crate::roots::{short_vectors, standard_gram};
use crate::stabilizers::ConfStabilizer;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{HashMap, HashSet};
use std::time::Instant;

/// The double-cover lattice of a configuration class: basis rows are the
/// ten doubled basis vectors followed by one half-integral lift per
/// configuration vertex.
pub struct MfRecord {
    pub lattice: Lattice,
    pub n: usize,
    /// Configuration roots in rank-10 coordinates (standard vertex order).
    pub f_rows: Mat,
    /// Vertex ranges of the configuration components.
    pub components: Vec<Vec<usize>>,
}

/// Build the double-cover lattice of a class.
pub fn build_mf(ctx: &EmbedContext, class: &EmbeddingClass) -> Result<MfRecord> {
    let n = class.tau_phi.rank();
    let g10 = ctx.e10.lattice.gram();
    let g_phi = standard_gram(&class.tau_phi);
    let f = &class.phi_l10;
    debug_assert_eq!(f.mul(g10).mul(&f.transpose()), g_phi, "configuration pairing");
    let p = f.mul(g10); // n x 10
    let mut gram = Mat::zero(RANK + n, RANK + n);
    for i in 0..RANK {
        for j in 0..RANK {
            gram.set_big(i, j, g10.entry(i, j) * BigInt::from(2));
        }
    }
    for i in 0..n {
        for j in 0..RANK {
            gram.set_big(RANK + i, j, p.entry(i, j));
            gram.set_big(j, RANK + i, p.entry(i, j));
        }
        for j in 0..n {
            gram.set_big(RANK + i, RANK + j, g_phi.entry(i, j));
        }
    }
    let lattice = Lattice::new(gram)?;
    debug_assert!(lattice.is_even());
    debug_assert_eq!(lattice.signature(), (1, 9 + n));
    // |det M_f| = 2^{10-n} |det G_Phi|
    let want = BigInt::from(2).pow(10 - n as u32) * exact::det(&g_phi).abs();
    debug_assert_eq!(lattice.det().abs(), want);
    let mut components = Vec::new();
    let mut off = 0;
    for &(_, r) in class.tau_phi.components() {
        components.push((off..off + r).collect());
        off += r;
    }
    Ok(MfRecord { lattice, n, f_rows: f.clone(), components })
}

/// Generators of the isometries of the double cover preserving both the
/// doubled sublattice and the lifted configuration: images of the
/// configuration stabilizer plus the per-component sign involutions.
pub fn u_mf_generators(mf: &MfRecord, stab: &ConfStabilizer) -> Result<Vec<Mat>> {
    let n = mf.n;
    let dim = RANK + n;
    let mut gens = Vec::new();
    let f_rows: Vec<Vec<i64>> =
        (0..n).map(|i| mf.f_rows.row_i64(i).expect("small coordinates")).collect();
    let row_index: HashMap<&Vec<i64>, usize> =
        f_rows.iter().enumerate().map(|(i, r)| (r, i)).collect();
    for g in &stab.gens {
        // permutation induced on the configuration vertices
        let mut perm = vec![usize::MAX; n];
        for (i, r) in f_rows.iter().enumerate() {
            let img = g
                .apply_row_i64(r)
                .ok_or_else(|| Error::Invalid("stabilizer image overflow".into()))?;
            perm[i] = *row_index
                .get(&img)
                .ok_or_else(|| Error::Invalid("generator does not permute the roots".into()))?;
        }
        let mut m = Mat::zero(dim, dim);
        for i in 0..RANK {
            for j in 0..RANK {
                m.set_big(i, j, g.entry(i, j));
            }
        }
        for (i, &pi) in perm.iter().enumerate() {
            m.set_i64(RANK + i, RANK + pi, 1);
        }
        debug_assert!(mf.lattice.is_isometry(&m), "lifted stabilizer generator");
        gens.push(m);
    }
    // component sign flips: swap each lift r' with r'' = pi* r - r'
    for comp in &mf.components {
        let mut m = Mat::identity(dim);
        for &i in comp {
            for j in 0..RANK {
                m.set_big(RANK + i, j, mf.f_rows.entry(i, j));
            }
            m.set_i64(RANK + i, RANK + i, -1);
        }
        debug_assert!(mf.lattice.is_isometry(&m), "sign involution");
        gens.push(m);
    }
    Ok(gens)
}

/// All data needed to evaluate the overlattice conditions on one even
/// overlattice of the double cover.
struct OverlatticeChecks<'a> {
    mf: &'a MfRecord,
    ctx: &'a EmbedContext,
    class: &'a EmbeddingClass,
    /// Roots of the primitive closure, in rank-10 coordinates (both signs).
    rbar_roots: Vec<Vec<i64>>,
    /// Is a given closure root inside the configuration's span?
    in_rf: Vec<bool>,
}

impl<'a> OverlatticeChecks<'a> {
    fn new(ctx: &'a EmbedContext, class: &'a EmbeddingClass, mf: &'a MfRecord) -> Result<Self> {
        let rep = ctx
            .reps
            .get(&class.sigma.0)
            .ok_or_else(|| Error::Invalid("missing subset data".into()))?;
        let members = class.sigma.members();
        let rbar_roots: Vec<Vec<i64>> = rep
            .rs
            .roots
            .iter()
            .map(|r| {
                let mut full = vec![0i64; RANK];
                for (j, &m) in members.iter().enumerate() {
                    full[m] = r[j];
                }
                full
            })
            .collect();
        // span membership of each closure root
        let phi_sigma = &class.phi_sigma;
        let in_rf = rep
            .rs
            .roots
            .iter()
            .map(|r| {
                let target: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
                exact::solve_row_integral(phi_sigma, &target).is_some()
            })
            .collect();
        Ok(OverlatticeChecks { mf, ctx, class, rbar_roots, in_rf })
    }

    /// (C2) on the subgroup itself: the doubled rank-10 part stays
    /// primitive iff no nonzero glue class lies over its rational span,
    /// i.e. every nonzero element has a nontrivial lift component on some
    /// configuration coordinate.
    fn c2_subgroup(&self, disc: &Discriminant, h: &Subgroup) -> bool {
        let n = self.mf.n;
        // fractional configuration-part of each generator lift
        let tails: Vec<Vec<BigRational>> =
            disc.lifts.iter().map(|l| l[RANK..RANK + n].to_vec()).collect();
        'elems: for &x in &h.0 {
            if x == 0 {
                continue;
            }
            let c = disc.form.coords(x);
            for j in 0..n {
                let mut acc = BigRational::zero();
                for (ci, tail) in c.iter().zip(&tails) {
                    if *ci != 0 {
                        acc += &tail[j] * BigRational::from_integer(BigInt::from(*ci));
                    }
                }
                if !acc.is_integer() {
                    continue 'elems;
                }
            }
            return false; // this class saturates the doubled part
        }
        true
    }

    /// The orthogonal complement of the doubled sublattice inside the
    /// overlattice: integer basis in overlattice coordinates plus Gram.
    fn n_lattice(&self, over: &Overlattice) -> Result<(Mat, Lattice)> {
        let dim = RANK + self.mf.n;
        // pairings of overlattice basis rows with pi* e_j
        let gram_mf = self.mf.lattice.gram();
        let mut pair_rows = Vec::with_capacity(dim);
        for i in 0..over.basis_num.rows() {
            let mut row = Vec::with_capacity(RANK);
            for j in 0..RANK {
                let mut acc = BigInt::zero();
                for c in 0..dim {
                    let e = over.basis_num.entry(i, c);
                    if !e.is_zero() {
                        acc += e * gram_mf.entry(c, j);
                    }
                }
                debug_assert!((&acc % &over.den).is_zero());
                row.push(acc / &over.den);
            }
            pair_rows.push(row);
        }
        let kernel = exact::left_kernel(&Mat::from_big_rows(pair_rows));
        debug_assert_eq!(kernel.rows(), self.mf.n);
        let gram_over = over.lattice.gram();
        let k_gram = kernel.mul(gram_over).mul(&kernel.transpose());
        Ok((kernel, Lattice::new(k_gram)?))
    }

    /// (C3): the complement contains no roots; returns the complement for
    /// reuse when it passes.
    fn c3(&self, over: &Overlattice) -> Result<Option<(Mat, Lattice)>> {
        let (basis, nl) = self.n_lattice(over)?;
        if short_vectors(&nl, -2)?.is_empty() {
            Ok(Some((basis, nl)))
        } else {
            Ok(None)
        }
    }

    /// (C4): exactly the roots of the configuration's span lift. Returns
    /// false as soon as a closure root outside the span lifts; asserts the
    /// two-lift property on the span's roots.
    fn c4(&self, over: &Overlattice, n_basis: &Mat, nl: &Lattice) -> Result<bool> {
        let dim = RANK + self.mf.n;
        let (adj, det) = exact::inverse(&over.basis_num).ok_or(Error::Degenerate)?;
        // mod-2 class (in overlattice coordinates) of a vector of M_f given
        // in integral M_f coordinates
        let class_mod2 = |v: &[BigInt]| -> Result<Vec<u8>> {
            let mut out = Vec::with_capacity(dim);
            for c in 0..dim {
                let mut acc = BigInt::zero();
                for (i, vi) in v.iter().enumerate() {
                    if !vi.is_zero() {
                        acc += vi * adj.entry(i, c);
                    }
                }
                acc *= &over.den;
                if !(&acc % &det).is_zero() {
                    return Err(Error::Invalid("vector not in overlattice".into()));
                }
                let q = acc / &det;
                out.push((num_integer::Integer::mod_floor(&q, &BigInt::from(2)))
                    .to_u8()
                    .unwrap());
            }
            Ok(out)
        };
        // classes of the norm -4 vectors of the complement
        let t_vectors = short_vectors(nl, -4)?;
        let mut t_classes: HashMap<Vec<u8>, usize> = HashMap::new();
        for t in &t_vectors {
            // overlattice coordinates of t: t * n_basis (already integral)
            let mut coords = vec![BigInt::zero(); dim];
            for (i, &ti) in t.iter().enumerate() {
                if ti != 0 {
                    for c in 0..dim {
                        coords[c] += n_basis.entry(i, c) * ti;
                    }
                }
            }
            let cls: Vec<u8> = coords
                .iter()
                .map(|x| num_integer::Integer::mod_floor(x, &BigInt::from(2)).to_u8().unwrap())
                .collect();
            *t_classes.entry(cls).or_insert(0) += 1;
        }
        for (ri, r) in self.rbar_roots.iter().enumerate() {
            // pi* r in M_f coordinates: (r | 0)
            let mut v = vec![BigInt::zero(); dim];
            for j in 0..RANK {
                v[j] = BigInt::from(r[j]);
            }
            let cls = class_mod2(&v)?;
            let lifts = t_classes.get(&cls).copied().unwrap_or(0);
            if self.in_rf[ri] {
                // two-lift property: exactly the pair {t, -t}
                assert_eq!(lifts, 2, "span root must have exactly two lifts");
            } else if lifts > 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// (C1): primitive embedding into the even unimodular (3,19) lattice.
    fn c1(&self, over: &Overlattice) -> Result<bool> {
        let disc = discriminant_form(&over.lattice)?;
        let neg = disc.form.negate();
        let (sp, sm) = over.lattice.signature();
        debug_assert_eq!((sp, sm), (1, 9 + self.mf.n));
        Ok(even_lattice_exists(3 - sp, 19 - sm, &neg).exists)
    }

    /// (C3) and (C4) on a built overlattice; (C2) is checked beforehand on
    /// the subgroup.
    fn passes_c34(&self, over: &Overlattice) -> Result<bool> {
        match self.c3(over)? {
            None => Ok(false),
            Some((basis, nl)) => self.c4(over, &basis, &nl),
        }
    }
}

/// One strong class: the overlattice subgroup, its quotient invariant, and
/// the Gram matrix of the overlattice.
#[derive(Clone, Debug)]
pub struct StrongClass {
    pub subgroup_order: usize,
    /// Elementary divisors of the quotient, descending.
    pub q_divisors: Vec<i64>,
    pub mbar_gram: Mat,
}

impl StrongClass {
    /// Abbreviated quotient label: divisors concatenated, `0` for trivial.
    pub fn q_label(&self) -> String {
        if self.q_divisors.is_empty() {
            "0".to_string()
        } else {
            let mut divs = self.q_divisors.clone();
            divs.sort_unstable_by(|a, b| b.cmp(a));
            divs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("")
        }
    }
}

/// Enumerate the strong classes of one configuration class: walk isotropic
/// subgroups of the double cover's discriminant form, pruning by the
/// hereditary conditions, dedupe orbits under the finite image of the
/// stabilizer-induced isometries, and filter survivors by the embedding
/// condition.
pub fn enumerate_strong_classes(
    ctx: &EmbedContext,
    class: &EmbeddingClass,
    stab: &ConfStabilizer,
    deadline: Option<Instant>,
) -> Result<Vec<StrongClass>> {
    let mf = build_mf(ctx, class)?;
    let disc = discriminant_form(&mf.lattice)?;
    let checks = OverlatticeChecks::new(ctx, class, &mf)?;

    // finite action on the discriminant group, deduped
    let mut actions: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut action_seen: HashSet<Vec<Vec<i64>>> = HashSet::new();
    for g in u_mf_generators(&mf, stab)? {
        let a = disc.action_of(&g)?;
        if action_seen.insert(a.clone()) {
            actions.push(a);
        }
    }

    let iso = isotropic_elements(&disc.form);
    let zero = Subgroup::zero();
    let over0 = overlattice_from_isotropic(&mf.lattice, &disc, &zero)?;
    if !checks.passes_c34(&over0)? {
        return Ok(Vec::new());
    }
    let mut passing: Vec<(Subgroup, Overlattice)> = vec![(zero.clone(), over0)];
    // orbits of passing reps are recorded wholesale; failing candidates
    // are memoized individually (their orbits never get extended, so a
    // per-member revisit costs one hash lookup)
    let mut seen: HashSet<Subgroup> = subgroup_orbit(&disc.form, &actions, &zero)
        .0
        .into_iter()
        .collect();
    let mut failed: HashSet<Subgroup> = HashSet::new();
    let mut qi = 0;
    while qi < passing.len() {
        if let Some(d) = deadline {
            if Instant::now() > d {
                return Err(Error::BudgetExceeded);
            }
        }
        let h = passing[qi].0.clone();
        for &x in &iso {
            if h.contains(x) {
                continue;
            }
            if !h.0.iter().all(|&y| disc.form.b_value(x, y).is_zero()) {
                continue;
            }
            let bigger = h.extend(&disc.form, x);
            if !bigger.is_totally_isotropic(&disc.form)
                || seen.contains(&bigger)
                || failed.contains(&bigger)
            {
                continue;
            }
            // hereditary conditions, cheapest first
            if !checks.c2_subgroup(&disc, &bigger) {
                failed.insert(bigger);
                continue;
            }
            let over = overlattice_from_isotropic(&mf.lattice, &disc, &bigger)?;
            if !checks.passes_c34(&over)? {
                failed.insert(bigger);
                continue;
            }
            let (orbit, _) = subgroup_orbit(&disc.form, &actions, &bigger);
            for m in orbit {
                seen.insert(m);
            }
            passing.push((bigger, over));
        }
        qi += 1;
    }

    let mut out = Vec::new();
    for (h, over) in &passing {
        if checks.c1(over)? {
            let mut divs = h.elementary_divisors(&disc.form);
            divs.sort_unstable_by(|a, b| b.cmp(a));
            out.push(StrongClass {
                subgroup_order: h.order(),
                q_divisors: divs,
                mbar_gram: over.lattice.gram().clone(),
            });
        }
    }
    // canonical order: by quotient size then label
    out.sort_by_key(|s| (s.subgroup_order, s.q_label()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::classify_configurations;
    use crate::stabilizers::stab_phi_f;
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
    fn mf_of_a1() {
        let (ctx, classes) = context();
        let c = class_by_key(classes, "A1/A1");
        let mf = build_mf(ctx, c).unwrap();
        assert_eq!(mf.lattice.rank(), 11);
        assert_eq!(mf.lattice.signature(), (1, 10));
        // N(M_f) = [-4]
        let checks = OverlatticeChecks::new(ctx, c, &mf).unwrap();
        let disc = discriminant_form(&mf.lattice).unwrap();
        let over0 =
            overlattice_from_isotropic(&mf.lattice, &disc, &Subgroup::zero()).unwrap();
        let (_, nl) = checks.n_lattice(&over0).unwrap();
        assert_eq!(nl.gram(), &Mat::from_rows(vec![vec![-4]]));
        // |A_{M_f}| = 2^10
        assert_eq!(disc.form.group_order(), 1 << 10);
    }

    #[test]
    fn mf_disc_order_of_8a1() {
        let (ctx, classes) = context();
        let c = class_by_key(classes, "8A1/E8");
        let mf = build_mf(ctx, c).unwrap();
        let disc = discriminant_form(&mf.lattice).unwrap();
        // 2^26 / 2^16 = 2^10
        assert_eq!(disc.form.group_order(), 1 << 10);
    }

    #[test]
    fn a1_class_realizes() {
        let (ctx, classes) = context();
        let c = class_by_key(classes, "A1/A1");
        let stab = stab_phi_f(ctx, c, None).unwrap();
        let strong = enumerate_strong_classes(ctx, c, &stab, None).unwrap();
        assert!(!strong.is_empty(), "the single-vertex class is realizable");
        for s in &strong {
            assert_eq!(s.mbar_gram.rows(), 11);
        }
    }

    #[test]
    fn six_a1_plus_a2_is_empty() {
        let (ctx, classes) = context();
        // every overlattice class of this configuration fails: no
        // realizations at all
        let keys: Vec<&EmbeddingClass> =
            classes.iter().filter(|c| c.tau_phi.to_string() == "6A1+A2").collect();
        assert!(!keys.is_empty());
        for c in keys {
            let stab = stab_phi_f(ctx, c, None).unwrap();
            let strong = enumerate_strong_classes(ctx, c, &stab, None).unwrap();
            assert!(strong.is_empty(), "{} should not realize", c.key());
        }
    }

    #[test]
    fn two_a1_two_a3_split() {
        let (ctx, classes) = context();
        let expect = [("A1+E7", 3), ("A3+D5", 2), ("D8", 7), ("E8", 4)];
        for (rbar, count) in expect {
            let c = class_by_key(classes, &format!("2A1+2A3/{rbar}"));
            let stab = stab_phi_f(ctx, c, None).unwrap();
            let strong = enumerate_strong_classes(ctx, c, &stab, None).unwrap();
            assert_eq!(strong.len(), count, "2A1+2A3/{rbar}");
        }
    }
}
