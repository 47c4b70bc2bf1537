//! The rank-10 even unimodular hyperbolic lattice, its Vinberg chamber
//! geometry, and the chamber walk that classifies negative-definite
//! primitive root sublattices up to `O^+`.
//!
//! A subset of the ten basis roots is a 10-bit mask; the walk over a fixed
//! subset `Sigma` visits induced chambers of the orthogonal slice, keyed by
//! their face label, and collects stabilizer generators from revisits.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::Mat;
use crate::roots::{ade_type_of, AdeType, RootSystem};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

/// Number of basis roots.
pub const RANK: usize = 10;
/// All ten bits set.
pub const FULL_MASK: u16 = (1 << RANK) - 1;
/// The excluded rank-9 subset `{e1, ..., e9}` (an affine diagram).
pub const AFFINE_MASK: u16 = (1 << 9) - 1;
/// Number of admissible subsets.
pub const S_SIZE: usize = 1021;

/// Dynkin edges of the basis: one branch vertex plus a chain.
const EDGES: [(usize, usize); 9] =
    [(0, 3), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9)];

pub fn e10_gram() -> Mat {
    let mut g = Mat::zero(RANK, RANK);
    for i in 0..RANK {
        g.set_i64(i, i, -2);
    }
    for &(a, b) in &EDGES {
        g.set_i64(a, b, 1);
        g.set_i64(b, a, 1);
    }
    g
}

/// The lattice together with its cached basis data.
pub struct E10 {
    pub lattice: Lattice,
    /// Sum of the dual basis vectors; interior point of the base chamber.
    pub c0: Vec<i64>,
}

impl E10 {
    pub fn new() -> E10 {
        let lattice = Lattice::new(e10_gram()).expect("non-degenerate");
        debug_assert_eq!(lattice.signature(), (1, 9));
        debug_assert_eq!(lattice.det(), BigInt::from(-1));
        let c0 = lattice.weyl_vector_int();
        E10 { lattice, c0 }
    }
}

impl Default for E10 {
    fn default() -> Self {
        Self::new()
    }
}

/// Subset of the ten basis roots, encoded as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct SigmaSet(pub u16);

impl SigmaSet {
    pub fn is_admissible(self) -> bool {
        self.0 != 0 && self.0 != FULL_MASK && self.0 != AFFINE_MASK && self.0 <= FULL_MASK
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn members(self) -> Vec<usize> {
        (0..RANK).filter(|&i| self.0 & (1 << i) != 0).collect()
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// Parse `e1,e4` style lists or a plain bitmask integer.
    pub fn parse(s: &str) -> Result<SigmaSet> {
        let s = s.trim();
        if let Ok(mask) = s.parse::<u16>() {
            return Ok(SigmaSet(mask));
        }
        let mut mask = 0u16;
        for part in s.split(',') {
            let part = part.trim();
            let idx: usize = part
                .strip_prefix('e')
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Error::Invalid(format!("bad basis root name: {part}")))?;
            if !(1..=RANK).contains(&idx) {
                return Err(Error::Invalid(format!("basis root out of range: {part}")));
            }
            mask |= 1 << (idx - 1);
        }
        Ok(SigmaSet(mask))
    }

    pub fn describe(self) -> String {
        self.members().iter().map(|i| format!("e{}", i + 1)).collect::<Vec<_>>().join(",")
    }
}

/// All 1021 admissible subsets, ordered by bitmask.
pub fn enumerate_s() -> Vec<SigmaSet> {
    (1..=FULL_MASK).filter(|&m| SigmaSet(m).is_admissible()).map(SigmaSet).collect()
}

/// ADE type of the sublattice spanned by an admissible subset.
pub fn sigma_type(e10: &E10, sigma: SigmaSet) -> Result<AdeType> {
    if !sigma.is_admissible() {
        return Err(Error::NotInS(sigma.describe()));
    }
    let idx = sigma.members();
    ade_type_of(&e10.lattice.gram().select(&idx, &idx))
}

/// Map from ADE type to the admissible subsets carrying it.
pub struct SigmaTypes {
    pub by_type: BTreeMap<AdeType, Vec<SigmaSet>>,
}

impl SigmaTypes {
    pub fn compute(e10: &E10) -> SigmaTypes {
        let mut by_type: BTreeMap<AdeType, Vec<SigmaSet>> = BTreeMap::new();
        for s in enumerate_s() {
            let t = sigma_type(e10, s).expect("admissible subsets are ADE");
            by_type.entry(t).or_default().push(s);
        }
        SigmaTypes { by_type }
    }

    /// Smallest-bitmask subset of the given type.
    pub fn representative(&self, t: &AdeType) -> Option<SigmaSet> {
        self.by_type.get(t).map(|v| v[0])
    }

    pub fn contains_type(&self, t: &AdeType) -> bool {
        self.by_type.contains_key(t)
    }
}

/// Precomputed longest elements of the finite Weyl groups `W(<Xi>)`,
/// lifted to isometries of the full lattice.
pub struct LongestCache {
    map: HashMap<u16, Mat>,
}

impl LongestCache {
    /// Build the cache for every admissible subset.
    pub fn build_all(e10: &E10) -> LongestCache {
        use rayon::prelude::*;
        let entries: Vec<(u16, Mat)> =
            enumerate_s().par_iter().map(|&s| (s.0, longest_lift(e10, s))).collect();
        LongestCache { map: entries.into_iter().collect() }
    }

    pub fn get(&self, xi: SigmaSet) -> &Mat {
        &self.map[&xi.0]
    }
}

/// Longest element of `W(Xi, L10)` as a 10x10 isometry.
fn longest_lift(e10: &E10, xi: SigmaSet) -> Mat {
    let idx = xi.members();
    let sub = Lattice::new(e10.lattice.gram().select(&idx, &idx)).expect("definite");
    let rs = RootSystem::new(sub).expect("negative definite");
    let word = rs.longest_element().expect("longest element");
    let mut g = Mat::identity(RANK);
    for r in &word {
        // lift the root from Xi-coordinates to full coordinates
        let mut full = vec![0i64; RANK];
        for (pos, &coord) in idx.iter().zip(r) {
            full[*pos] = coord;
        }
        let s = e10.lattice.reflection(&full).expect("root");
        g = g.mul(&s);
    }
    debug_assert!(g.mul(&g).is_identity());
    g
}

/// A Vinberg chamber on the walk: its isometry, the inverse, and its label.
#[derive(Clone)]
struct ChamberRecord {
    gamma: Mat,
    gamma_inv: Mat,
    sigma: SigmaSet,
}

/// Output of the walk over one admissible subset.
#[derive(Clone, Serialize, Deserialize)]
pub struct SigmaOrbit {
    pub sigma: SigmaSet,
    /// All subsets equivalent to `sigma`, in visit order (starts with it).
    pub class: Vec<SigmaSet>,
    /// `gamma` isometries matching `class` entry-by-entry.
    pub gammas: Vec<Mat>,
    /// Closing isometries; together with `W(sigma, L10)` they generate the
    /// stabilizer of the spanned sublattice.
    pub gens: Vec<Mat>,
}

/// Face label of the chamber: the set of basis positions supporting the
/// `sigma` rows of `gamma^-1`.
fn sigma_of(gamma_inv: &Mat, sigma: SigmaSet) -> SigmaSet {
    let mut mask = 0u16;
    for s in sigma.members() {
        for j in 0..RANK {
            if gamma_inv.entry_i64(s, j) != Some(0) {
                mask |= 1 << j;
            }
        }
    }
    SigmaSet(mask)
}

/// The defining equation of the label: `gamma` maps the span of the label
/// onto the span of `sigma`.
fn label_sound(gamma: &Mat, label: SigmaSet, sigma: SigmaSet) -> bool {
    if label.len() != sigma.len() {
        return false;
    }
    for s in label.members() {
        for j in 0..RANK {
            if !sigma.contains(j) && gamma.entry_i64(s, j) != Some(0) {
                return false;
            }
        }
    }
    true
}

/// Walk all induced chambers of the orthogonal slice of `sigma`, deduping
/// on face labels, and collect the closing isometries.
pub fn orbit_of_sigma(e10: &E10, longest: &LongestCache, sigma: SigmaSet) -> Result<SigmaOrbit> {
    if !sigma.is_admissible() {
        return Err(Error::NotInS(sigma.describe()));
    }
    let mut records: Vec<ChamberRecord> =
        vec![ChamberRecord { gamma: Mat::identity(RANK), gamma_inv: Mat::identity(RANK), sigma }];
    let mut pos: HashMap<u16, usize> = HashMap::new();
    pos.insert(sigma.0, 0);
    let mut gens: Vec<Mat> = Vec::new();
    let mut gen_seen: HashSet<Mat> = HashSet::new();

    let mut i = 0;
    while i < records.len() {
        let current = records[i].clone();
        for add in 0..RANK {
            if current.sigma.contains(add) {
                continue;
            }
            let xi = SigmaSet(current.sigma.0 | (1 << add));
            if !xi.is_admissible() {
                continue;
            }
            let xi_long = longest.get(xi);
            let gamma = xi_long.mul(&current.gamma);
            let gamma_inv = current.gamma_inv.mul(xi_long);
            let label = sigma_of(&gamma_inv, sigma);
            debug_assert!(label_sound(&gamma, label, sigma));
            match pos.get(&label.0) {
                None => {
                    pos.insert(label.0, records.len());
                    records.push(ChamberRecord { gamma, gamma_inv, sigma: label });
                    if records.len() > S_SIZE {
                        return Err(Error::OrbitCapExceeded(S_SIZE));
                    }
                }
                Some(&m) => {
                    let g = gamma_inv.mul(&records[m].gamma);
                    if !g.is_identity() && !gen_seen.contains(&g) {
                        debug_assert!(label_sound(&g, sigma, sigma));
                        gen_seen.insert(g.clone());
                        gens.push(g);
                    }
                }
            }
        }
        i += 1;
    }

    Ok(SigmaOrbit {
        sigma,
        class: records.iter().map(|r| r.sigma).collect(),
        gammas: records.iter().map(|r| r.gamma.clone()).collect(),
        gens,
    })
}

/// Restriction of an isometry preserving the span of `sigma` to that span,
/// in the coordinates of the subset's members (ascending).
pub fn restrict_to_sigma(g: &Mat, sigma: SigmaSet) -> Result<Mat> {
    let idx = sigma.members();
    let mut rows = Vec::with_capacity(idx.len());
    for &s in &idx {
        let mut row = Vec::with_capacity(idx.len());
        for j in 0..RANK {
            let v = g
                .entry_i64(s, j)
                .ok_or_else(|| Error::Invalid("restriction entry exceeds i64".into()))?;
            if sigma.contains(j) {
                row.push(v);
            } else if v != 0 {
                return Err(Error::Invalid("isometry does not preserve the span".into()));
            }
        }
        rows.push(row);
    }
    Ok(Mat::from_rows(rows))
}

/// Stabilizer data at the level of the subset itself.
pub struct SigmaStabilizer {
    /// Generators of the subset stabilizer in `O^+(L10)` (`kappa~` images
    /// of the walk generators).
    pub set_stab_gens: Vec<Mat>,
    /// Induced permutations of the members (ascending order), matching
    /// `set_stab_gens` entry by entry.
    pub perms: Vec<Vec<usize>>,
}

/// Compute `kappa~` of every walk generator: multiply by the connecting
/// word inside the span so the result fixes the base chamber of the span,
/// hence permutes the subset.
pub fn stab_sigma(e10: &E10, orbit: &SigmaOrbit) -> Result<SigmaStabilizer> {
    let sigma = orbit.sigma;
    let idx = sigma.members();
    let sub = Lattice::new(e10.lattice.gram().select(&idx, &idx))?;
    let rs = RootSystem::new(sub)?;
    let c = rs.lattice.weyl_vector_int();
    let mut set_stab_gens = Vec::new();
    let mut perms = Vec::new();
    let mut seen: HashSet<Mat> = HashSet::new();
    for g in &orbit.gens {
        let g_sub = restrict_to_sigma(g, sigma)?;
        let u = g_sub
            .apply_row_i64(&c)
            .ok_or_else(|| Error::Invalid("restricted action exceeds i64".into()))?;
        let word = rs.connecting_word(&u, &c)?;
        // lift the word to the full lattice and fold it onto g
        let mut k = g.clone();
        for r in &word {
            let mut full = vec![0i64; RANK];
            for (pos, &coord) in idx.iter().zip(r) {
                full[*pos] = coord;
            }
            k = k.mul(&e10.lattice.reflection(&full)?);
        }
        if seen.contains(&k) {
            continue;
        }
        seen.insert(k.clone());
        let k_sub = restrict_to_sigma(&k, sigma)?;
        let perm = crate::roots::permutation_of_basis(&k_sub)
            .ok_or_else(|| Error::Invalid("kappa~ does not permute the subset".into()))?;
        set_stab_gens.push(k);
        perms.push(perm);
    }
    Ok(SigmaStabilizer { set_stab_gens, perms })
}

/// Reflections in the members of the subset: generators of `W(sigma, L10)`.
pub fn weyl_sigma_gens(e10: &E10, sigma: SigmaSet) -> Vec<Mat> {
    sigma
        .members()
        .iter()
        .map(|&i| {
            let mut r = vec![0i64; RANK];
            r[i] = 1;
            e10.lattice.reflection(&r).expect("basis roots")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(i: usize) -> Vec<i64> {
        let mut v = vec![0i64; RANK];
        v[i] = 1;
        v
    }

    #[test]
    fn e10_basics() {
        let e10 = E10::new();
        assert_eq!(e10.lattice.signature(), (1, 9));
        assert_eq!(e10.lattice.det(), BigInt::from(-1));
        // edges of the diagram
        assert_eq!(e10.lattice.inner(&unit(0), &unit(3)).unwrap(), BigInt::from(1));
        assert_eq!(e10.lattice.inner(&unit(1), &unit(9)).unwrap(), BigInt::from(0));
        // the interior point has square-norm 1240
        assert_eq!(e10.lattice.norm(&e10.c0).unwrap(), BigInt::from(1240));
    }

    #[test]
    fn s_enumeration() {
        let s = enumerate_s();
        assert_eq!(s.len(), S_SIZE);
        assert!(!s.contains(&SigmaSet(AFFINE_MASK)));
        assert!(!s.contains(&SigmaSet(FULL_MASK)));
        for i in 0..RANK {
            assert!(s.contains(&SigmaSet(1 << i)));
        }
        let e10 = E10::new();
        for i in 0..RANK {
            assert_eq!(sigma_type(&e10, SigmaSet(1 << i)).unwrap().to_string(), "A1");
        }
        // {e2..e10} is a chain of nine
        assert_eq!(sigma_type(&e10, SigmaSet(FULL_MASK & !1)).unwrap().to_string(), "A9");
        // the excluded rank-9 subset is not ADE
        let aff = SigmaSet(AFFINE_MASK).members();
        assert!(ade_type_of(&e10.lattice.gram().select(&aff, &aff)).is_err());
    }

    #[test]
    fn sigma_type_table() {
        let e10 = E10::new();
        let types = SigmaTypes::compute(&e10);
        assert_eq!(types.by_type.len(), 86);
        let total: usize = types.by_type.values().map(|v| v.len()).sum();
        assert_eq!(total, S_SIZE);
        assert!(types.contains_type(&"E8".parse().unwrap()));
        assert!(types.contains_type(&"A1+E8".parse().unwrap()));
        assert!(!types.contains_type(&"8A1".parse().unwrap()));
        assert!(!types.contains_type(&"2D4".parse().unwrap()));
    }

    #[test]
    fn single_walk_a1() {
        let e10 = E10::new();
        let longest = LongestCache::build_all(&e10);
        let orbit = orbit_of_sigma(&e10, &longest, SigmaSet(1)).unwrap();
        // all ten singletons are equivalent
        assert_eq!(orbit.class.len(), 10);
        for i in 0..RANK {
            assert!(orbit.class.contains(&SigmaSet(1 << i)));
        }
        for g in &orbit.gens {
            assert!(e10.lattice.is_isometry(g));
            assert!(label_sound(g, orbit.sigma, orbit.sigma));
        }
        let stab = stab_sigma(&e10, &orbit).unwrap();
        // Aut(A1) is trivial, so every perm is the identity
        for p in &stab.perms {
            assert_eq!(p, &vec![0]);
        }
        assert!(!stab.set_stab_gens.is_empty());
    }

    #[test]
    fn adjacency_step_example() {
        // crossing the wall {e1,e4} composes the longest element of W(A2)
        let e10 = E10::new();
        let xi = SigmaSet((1 << 0) | (1 << 3));
        assert_eq!(sigma_type(&e10, xi).unwrap().to_string(), "A2");
        let lift = longest_lift(&e10, xi);
        assert!(lift.mul(&lift).is_identity());
        assert!(e10.lattice.is_isometry(&lift));
        // the lift maps the span of {e1,e4} to itself and acts as the
        // longest element there: both simple roots go negative
        let idx = xi.members();
        for &i in &idx {
            let img = lift.apply_row_i64(&unit(i)).unwrap();
            for (j, &v) in img.iter().enumerate() {
                if !idx.contains(&j) {
                    assert_eq!(v, 0);
                }
            }
            let c_sub: i64 = idx.iter().map(|&j| img[j]).sum();
            assert!(c_sub < 0, "longest element sends positive roots negative");
        }
    }
}
