//! Classification of ADE-configuration embeddings into the rank-10
//! lattice up to `Aut(Phi) x O^+`: overlattice orbits, the sub-diagram
//! condition, reference isometries onto the basis-subset models, and the
//! double-coset count that pins one class per admissible pair.

use crate::chambers::{
    orbit_of_sigma, sigma_type, stab_sigma, E10, LongestCache, SigmaOrbit, SigmaSet,
    SigmaStabilizer, SigmaTypes, RANK,
};
use crate::discform::{discriminant_form, isotropic_subgroups_up_to, overlattice_from_isotropic};
use crate::error::{Error, Result};
use crate::exact;
use crate::lattice::{scale_to_int, Lattice, Sublattice};
use crate::matrix::Mat;
use crate::roots::{
    ade_type_of, analyze_configuration, aut_generators, connecting_word_over,
    generic_linear_form, ade_basis_from_linear_form, standard_gram, AdeType, RootSystem,
};
use crate::orbits::{perm_closure, perm_identity, perm_inv, perm_mul, perm_word};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap, HashSet};

/// Everything the classification needs about one canonical basis subset:
/// its walk, the subset-stabilizer generators, and the finite groups
/// `Aut(Sigma)` and `H_Sigma` as permutations of the members (ascending).
pub struct SigmaRepData {
    pub sigma: SigmaSet,
    pub orbit: SigmaOrbit,
    pub stab: SigmaStabilizer,
    pub aut_sigma: Vec<Vec<usize>>,
    pub rs: RootSystem,
}

impl SigmaRepData {
    fn build(e10: &E10, longest: &LongestCache, sigma: SigmaSet) -> Result<SigmaRepData> {
        let orbit = orbit_of_sigma(e10, longest, sigma)?;
        let stab = stab_sigma(e10, &orbit)?;
        let idx = sigma.members();
        let sub = Lattice::new(e10.lattice.gram().select(&idx, &idx))?;
        let rs = RootSystem::new(sub)?;
        // Aut(Sigma) in ascending-member coordinates
        let t = sigma_type(e10, sigma)?;
        let comps = analyze_configuration(rs.lattice.gram())?;
        let ord = comps.standard_order();
        let (gens_std, order) = aut_generators(&t);
        let k = sigma.len();
        let mut gens_asc = Vec::with_capacity(gens_std.len());
        for g in &gens_std {
            let mut p = vec![0usize; k];
            for (pos, &asc) in ord.iter().enumerate() {
                p[asc] = ord[g[pos]];
            }
            gens_asc.push(p);
        }
        let aut_sigma = perm_closure(k, &gens_asc, 2_000_000)?;
        debug_assert_eq!(BigInt::from(aut_sigma.len() as i64), order);
        Ok(SigmaRepData { sigma, orbit, stab, aut_sigma, rs })
    }
}

/// Shared context for the embedding and realizability stages.
pub struct EmbedContext {
    pub e10: E10,
    pub longest: LongestCache,
    pub types: SigmaTypes,
    pub reps: BTreeMap<u16, SigmaRepData>,
}

impl EmbedContext {
    pub fn build() -> Result<EmbedContext> {
        let e10 = E10::new();
        let longest = LongestCache::build_all(&e10);
        let types = SigmaTypes::compute(&e10);
        let rep_sets: Vec<SigmaSet> = types.by_type.values().map(|v| v[0]).collect();
        let built: Result<Vec<(u16, SigmaRepData)>> = rep_sets
            .par_iter()
            .map(|&s| SigmaRepData::build(&e10, &longest, s).map(|d| (s.0, d)))
            .collect();
        let reps = built?.into_iter().collect();
        Ok(EmbedContext { e10, longest, types, reps })
    }

    pub fn rep_for_type(&self, t: &AdeType) -> Option<&SigmaRepData> {
        let s = self.types.representative(t)?;
        self.reps.get(&s.0)
    }
}

/// One equivalence class of configurations: the pair of types plus an
/// explicit representative inside the lattice.
#[derive(Clone, Debug)]
pub struct EmbeddingClass {
    pub tau_phi: AdeType,
    pub tau_rbar: AdeType,
    pub sigma: SigmaSet,
    /// Representative roots, one per configuration vertex (standard
    /// order of `tau_phi`), in full lattice coordinates.
    pub phi_l10: Mat,
    /// The same roots in the coordinates of the subset members.
    pub phi_sigma: Mat,
}

impl EmbeddingClass {
    pub fn key(&self) -> String {
        format!("{}/{}", self.tau_phi, self.tau_rbar)
    }

    pub fn rank(&self) -> usize {
        self.tau_phi.rank()
    }
}

/// Canonical table order: by configuration rank, then the two type labels.
pub fn class_sort_key(t: &AdeType, tb: &AdeType) -> (usize, Vec<(crate::roots::Kind, usize)>, Vec<(crate::roots::Kind, usize)>) {
    (t.rank(), t.components().to_vec(), tb.components().to_vec())
}

/// Number of double cosets `H1 \ G / H2` inside an explicitly listed
/// finite permutation group.
pub fn double_coset_count(
    group: &[Vec<usize>],
    h1_gens: &[Vec<usize>],
    h2_gens: &[Vec<usize>],
) -> usize {
    let index: HashMap<&Vec<usize>, usize> =
        group.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut uf: Vec<usize> = (0..group.len()).collect();
    fn find(uf: &mut Vec<usize>, mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for (i, x) in group.iter().enumerate() {
        for h in h1_gens {
            let y = perm_mul(h, x);
            let j = index[&y];
            let (a, b) = (find(&mut uf, i), find(&mut uf, j));
            uf[a] = b;
        }
        for h in h2_gens {
            let y = perm_mul(x, h);
            let j = index[&y];
            let (a, b) = (find(&mut uf, i), find(&mut uf, j));
            uf[a] = b;
        }
    }
    let mut roots = HashSet::new();
    for i in 0..group.len() {
        roots.insert(find(&mut uf, i));
    }
    roots.len()
}

/// All overlattice classes of the abstract configuration `t`, up to its
/// automorphism group, with per-class data needed downstream.
struct OverlatticeClass {
    /// The overlattice, with its basis in configuration coordinates.
    over: crate::discform::Overlattice,
    /// Inverse basis: configuration vectors in overlattice coordinates.
    conf_in_over: Mat,
    /// Generators of the stabilizer of the overlattice in `Aut(Phi)`.
    stab_perms: Vec<Vec<usize>>,
    /// Is the overlattice a root lattice, and of which type?
    root_type: Option<AdeType>,
}

fn overlattice_classes(t: &AdeType) -> Result<Vec<OverlatticeClass>> {
    let n = t.rank();
    let phi = Lattice::new(standard_gram(t))?;
    let disc = discriminant_form(&phi)?;
    let (aut_gens, _) = aut_generators(t);
    let mut actions = Vec::with_capacity(aut_gens.len());
    for p in &aut_gens {
        let mut pm = Mat::zero(n, n);
        for (i, &pi) in p.iter().enumerate() {
            pm.set_i64(i, pi, 1);
        }
        debug_assert!(phi.is_isometry(&pm));
        actions.push(disc.action_of(&pm)?);
    }
    let orbits = isotropic_subgroups_up_to(&disc.form, &actions);
    let mut out = Vec::new();
    for (h, words) in orbits.reps.iter().zip(&orbits.stab_words) {
        let over = overlattice_from_isotropic(&phi, &disc, h)?;
        // configuration vectors in overlattice coordinates: the integer
        // inverse of the basis matrix times the denominator
        let (adj, det) = exact::inverse(&over.basis_num).ok_or(Error::Degenerate)?;
        let conf_rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let num = &over.den * adj.entry(i, j);
                        assert!((&num % &det).is_zero(), "configuration not inside overlattice");
                        num / &det
                    })
                    .collect()
            })
            .collect();
        let conf_in_over = Mat::from_big_rows(conf_rows);
        // thin the Schreier words into a small generating set of the
        // overlattice stabilizer inside Aut(Phi)
        let mut closure: HashSet<Vec<usize>> = HashSet::new();
        closure.insert(perm_identity(n));
        let mut stab_perms: Vec<Vec<usize>> = Vec::new();
        for w in words {
            let p = perm_word(n, &aut_gens, w);
            if !closure.contains(&p) {
                stab_perms.push(p.clone());
                let cl = perm_closure(n, &stab_perms, 5_000_000)?;
                closure = cl.into_iter().collect();
            }
        }
        // root lattice test: the roots must span the overlattice
        let rs = RootSystem::new(over.lattice.clone())?;
        let root_type = if rs.roots.len() >= 2 * n {
            let basis = exact::row_basis(&Mat::from_rows(rs.roots.clone()));
            if basis.rows() == n && basis.is_identity() {
                let ell = generic_linear_form(&rs);
                let ade = ade_basis_from_linear_form(&rs, &ell)?;
                let sub = Sublattice::new(Mat::from_rows(ade))?;
                Some(ade_type_of(&sub.gram_in(&over.lattice))?)
            } else {
                None
            }
        } else {
            None
        };
        out.push(OverlatticeClass { over, conf_in_over, stab_perms, root_type });
    }
    Ok(out)
}

/// The sub-diagram condition: the overlattice is a root lattice whose
/// type occurs among the basis subsets.
pub fn condition_sharp(root_type: &Option<AdeType>, types: &SigmaTypes) -> bool {
    match root_type {
        Some(t) => types.contains_type(t),
        None => false,
    }
}

/// Classify all embeddings of configurations of rank < 10 up to
/// equivalence. Returns classes in canonical table order.
pub fn classify_configurations(ctx: &EmbedContext) -> Result<Vec<EmbeddingClass>> {
    let all_types = AdeType::all_up_to_rank(9);
    let per_type: Result<Vec<Vec<EmbeddingClass>>> = all_types
        .par_iter()
        .map(|t| classify_one_type(ctx, t))
        .collect();
    let mut classes: Vec<EmbeddingClass> = per_type?.into_iter().flatten().collect();
    classes.sort_by_key(|c| class_sort_key(&c.tau_phi, &c.tau_rbar));
    Ok(classes)
}

fn classify_one_type(ctx: &EmbedContext, t: &AdeType) -> Result<Vec<EmbeddingClass>> {
    let n = t.rank();
    let mut out = Vec::new();
    let mut seen_rbar_types: HashSet<AdeType> = HashSet::new();
    for class in overlattice_classes(t)? {
        let Some(rbar_type) = class.root_type.clone() else { continue };
        if !ctx.types.contains_type(&rbar_type) {
            continue;
        }
        // distinct overlattice orbits of equal root type would break the
        // uniqueness this classification rests on
        assert!(
            seen_rbar_types.insert(rbar_type.clone()),
            "two overlattice orbits of {t} share the root type {rbar_type}"
        );
        let rep = ctx.rep_for_type(&rbar_type).expect("type has a representative");
        let emb = embed_class(ctx, t, &class, &rbar_type, rep)?;
        out.push(emb);
    }
    Ok(out)
}

/// Construct the explicit representative for one `(tau_phi, tau_rbar)`
/// pair and verify the double-coset count is one.
fn embed_class(
    ctx: &EmbedContext,
    t: &AdeType,
    class: &OverlatticeClass,
    rbar_type: &AdeType,
    rep: &SigmaRepData,
) -> Result<EmbeddingClass> {
    let n = t.rank();
    let rbar = &class.over.lattice;
    let rs_rbar = RootSystem::new(rbar.clone())?;
    // ADE basis of the overlattice, in standard component order
    let ell = generic_linear_form(&rs_rbar);
    let ade = ade_basis_from_linear_form(&rs_rbar, &ell)?;
    let sub = Sublattice::new(Mat::from_rows(ade.clone()))?;
    let comps = analyze_configuration(&sub.gram_in(rbar))?;
    debug_assert_eq!(comps.ade_type(), *rbar_type);
    let order = comps.standard_order();
    let b_std = Mat::from_rows(order.iter().map(|&i| ade[i].clone()).collect());
    debug_assert_eq!(
        Sublattice::new(b_std.clone())?.gram_in(rbar),
        standard_gram(rbar_type)
    );
    // target vertices: the subset members in its own standard order
    let sigma_members = rep.sigma.members();
    let k = sigma_members.len();
    let sigma_comps = analyze_configuration(rep.rs.lattice.gram())?;
    let sigma_order = sigma_comps.standard_order();
    let mut p_sigma = Mat::zero(k, k);
    for (p, &asc) in sigma_order.iter().enumerate() {
        p_sigma.set_i64(p, asc, 1);
    }
    // reference isometry: overlattice coords -> subset coords
    let mut f = exact::inverse_unimodular(&b_std).mul(&p_sigma);
    debug_assert_eq!(f.mul(rep.rs.lattice.gram()).mul(&f.transpose()), *rbar.gram());

    // normalization: the image of the configuration-positive cone must
    // contain the base chamber of the subset
    let c_sigma = rep.rs.lattice.weyl_vector_int();
    let f_inv = exact::inverse_unimodular(&f);
    let u: Vec<i64> = f_inv
        .apply_row_i64(&c_sigma)
        .ok_or_else(|| Error::Invalid("chamber point exceeds i64".into()))?;
    // the configuration's root subsystem inside the overlattice
    let phi_lat = Lattice::new(standard_gram(t))?;
    let phi_roots = crate::roots::short_vectors(&phi_lat, -2)?;
    let sub_roots: Vec<Vec<i64>> = phi_roots
        .iter()
        .map(|r| {
            let mut img = vec![0i64; n];
            for (i, &ri) in r.iter().enumerate() {
                if ri != 0 {
                    for j in 0..n {
                        img[j] += ri
                            * class.conf_in_over.entry_i64(i, j).expect("small coordinates");
                    }
                }
            }
            img
        })
        .collect();
    let c_phi = scale_to_int(&phi_lat.weyl_vector());
    let mut v_target = vec![0i64; n];
    for (i, &ci) in c_phi.iter().enumerate() {
        if ci != 0 {
            for j in 0..n {
                v_target[j] += ci * class.conf_in_over.entry_i64(i, j).expect("small");
            }
        }
    }
    let word = connecting_word_over(rbar, &sub_roots, &u, &v_target)?;
    let mut w = Mat::identity(n);
    for r in &word {
        w = w.mul(&rbar.reflection(r)?);
    }
    f = exact::inverse_unimodular(&w).mul(&f);

    // the representative configuration in subset coordinates
    let phi_sigma = class.conf_in_over.mul(&f);
    // positivity check: every configuration vertex pairs positively with
    // the base chamber point of the subset
    {
        let f_inv2 = exact::inverse_unimodular(&f);
        let u2 = f_inv2.apply_row_i64(&c_sigma).expect("small");
        for i in 0..n {
            let row = class.conf_in_over.row_i64(i).expect("small");
            let p = rbar.inner(&u2, &row)?;
            assert!(p.is_positive(), "normalization failed");
        }
    }
    // lift to full lattice coordinates
    let mut phi_l10 = Mat::zero(n, RANK);
    for i in 0..n {
        for (jj, &mem) in sigma_members.iter().enumerate() {
            phi_l10.set_big(i, mem, phi_sigma.entry(i, jj));
        }
    }
    // verification: the primitive closure of the span is the subset span,
    // and the configuration has the right type
    let span = Sublattice::new(phi_l10.clone())?;
    let closure = span.primitive_closure();
    let sigma_basis = Mat::from_rows(
        sigma_members
            .iter()
            .map(|&m| {
                let mut r = vec![0i64; RANK];
                r[m] = 1;
                r
            })
            .collect(),
    );
    assert_eq!(closure.basis(), &sigma_basis, "primitive closure is not the subset span");
    let pair = span.gram_in(&ctx.e10.lattice);
    assert_eq!(ade_type_of(&pair)?, *t, "configuration type changed");

    // H_Phi: image of the overlattice stabilizer in Aut(Sigma), via the
    // reference isometry and the chamber splitting
    let mut h_phi: Vec<Vec<usize>> = Vec::new();
    let mut seen = HashSet::new();
    for p in &class.stab_perms {
        let mut pm = Mat::zero(n, n);
        for (i, &pi) in p.iter().enumerate() {
            pm.set_i64(i, pi, 1);
        }
        // conjugate from configuration coordinates to overlattice coords
        let m_r = rational_conjugate(&class.over.basis_num, &pm)?;
        // and along f to subset coordinates
        let g_sigma = exact::inverse_unimodular(&f).mul(&m_r).mul(&f);
        debug_assert!(rep.rs.lattice.is_isometry(&g_sigma));
        let perm = rep.rs.kappa(&g_sigma)?;
        if seen.insert(perm.clone()) {
            h_phi.push(perm);
        }
    }
    let cosets = double_coset_count(&rep.aut_sigma, &h_phi, &rep.stab.perms);
    assert_eq!(cosets, 1, "double coset count {cosets} != 1 for {t} in {rbar_type}");

    Ok(EmbeddingClass {
        tau_phi: t.clone(),
        tau_rbar: rbar_type.clone(),
        sigma: rep.sigma,
        phi_l10,
        phi_sigma,
    })
}

/// Conjugate an isometry given in configuration coordinates into the
/// overlattice coordinates: `B P B^{-1}` for the rational basis matrix.
fn rational_conjugate(basis_num: &Mat, p: &Mat) -> Result<Mat> {
    // (basis_num/den) * P * (basis_num/den)^{-1} = basis_num * P * adj / det
    let (adj, det) = exact::inverse(basis_num).ok_or(Error::Degenerate)?;
    let raw = basis_num.mul(p).mul(&adj);
    let n = raw.rows();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let e = raw.entry(i, j);
            if !(&e % &det).is_zero() {
                return Err(Error::Invalid("stabilizer does not preserve overlattice".into()));
            }
            row.push(e / &det);
        }
        rows.push(row);
    }
    Ok(Mat::from_big_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_cosets_in_s3() {
        let gens = vec![vec![1, 0, 2], vec![1, 2, 0]];
        let s3 = perm_closure(3, &gens, 100).unwrap();
        // trivial subgroups: 6 cosets
        assert_eq!(double_coset_count(&s3, &[], &[]), 6);
        // full group on either side: 1
        assert_eq!(double_coset_count(&s3, &gens, &[]), 1);
        // point stabilizer vs point stabilizer: S2 \ S3 / S2 has 2 classes
        let h = vec![vec![0, 2, 1]];
        assert_eq!(double_coset_count(&s3, &h, &h), 2);
    }
}
