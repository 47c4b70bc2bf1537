//! Finite quadratic forms: discriminant groups of even lattices, their
//! isotropic subgroups, even overlattices, and the doubly-even code view
//! of the nA1 case.

use crate::error::{Error, Result};
use crate::exact;
use crate::lattice::Lattice;
use crate::matrix::Mat;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

pub type Rat = Ratio<i64>;

/// Reduce into `[0, m)`.
fn rat_mod(x: Rat, m: i64) -> Rat {
    let m = Rat::from_integer(m);
    let mut r = x - (x / m).floor() * m;
    if r < Rat::zero() {
        r += m;
    }
    if r >= m {
        r -= m;
    }
    r
}

pub fn mod2(x: Rat) -> Rat {
    rat_mod(x, 2)
}

pub fn mod1(x: Rat) -> Rat {
    rat_mod(x, 1)
}

/// Finite abelian group with a `Q/2Z`-valued quadratic form: generator
/// orders (each > 1), their norms mod 2, and pairwise pairings mod 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Fqf {
    pub orders: Vec<i64>,
    pub q: Vec<Rat>,
    pub b: Vec<Vec<Rat>>,
}

#[derive(Serialize, Deserialize)]
struct FqfJson {
    orders: Vec<i64>,
    q: Vec<String>,
    b: Vec<Vec<String>>,
}

fn rat_to_string(x: &Rat) -> String {
    if x.denom() == &1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn rat_from_string(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| Error::Invalid(format!("bad rational: {s}")))?;
        let q: i64 = q.trim().parse().map_err(|_| Error::Invalid(format!("bad rational: {s}")))?;
        if q == 0 {
            return Err(Error::Invalid("zero denominator".into()));
        }
        Ok(Rat::new(p, q))
    } else {
        let p: i64 = s.parse().map_err(|_| Error::Invalid(format!("bad rational: {s}")))?;
        Ok(Rat::from_integer(p))
    }
}

impl Serialize for Fqf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FqfJson {
            orders: self.orders.clone(),
            q: self.q.iter().map(rat_to_string).collect(),
            b: self.b.iter().map(|row| row.iter().map(rat_to_string).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fqf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Fqf, D::Error> {
        let j = FqfJson::deserialize(d)?;
        let q: Result<Vec<Rat>> = j.q.iter().map(|s| rat_from_string(s)).collect();
        let b: Result<Vec<Vec<Rat>>> =
            j.b.iter().map(|row| row.iter().map(|s| rat_from_string(s)).collect()).collect();
        let f = Fqf {
            orders: j.orders,
            q: q.map_err(serde::de::Error::custom)?.into_iter().map(mod2).collect(),
            b: b.map_err(serde::de::Error::custom)?
                .into_iter()
                .map(|r| r.into_iter().map(mod1).collect())
                .collect(),
        };
        f.validate().map_err(serde::de::Error::custom)?;
        Ok(f)
    }
}

impl Fqf {
    pub fn trivial() -> Fqf {
        Fqf { orders: vec![], q: vec![], b: vec![] }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.orders.len();
        if self.q.len() != n || self.b.len() != n || self.b.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("form component sizes disagree".into()));
        }
        for (i, &d) in self.orders.iter().enumerate() {
            if d < 2 {
                return Err(Error::Invalid("generator orders must be > 1".into()));
            }
            let dq = self.q[i] * Rat::from_integer(d * d);
            if !mod2(dq).is_zero() {
                return Err(Error::Invalid(format!("q[{i}] incompatible with its order")));
            }
            for j in 0..n {
                if mod1(self.b[i][j] - self.b[j][i]) != Rat::zero() {
                    return Err(Error::Invalid("pairing not symmetric".into()));
                }
                if !mod1(self.b[i][j] * Rat::from_integer(d)).is_zero() {
                    return Err(Error::Invalid("pairing incompatible with order".into()));
                }
            }
            if mod1(self.q[i] - self.b[i][i]) != Rat::zero() {
                return Err(Error::Invalid("q and b diagonals disagree".into()));
            }
        }
        Ok(())
    }

    pub fn num_gens(&self) -> usize {
        self.orders.len()
    }

    pub fn group_order(&self) -> i64 {
        self.orders.iter().product()
    }

    pub fn len(&self) -> usize {
        self.group_order() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coords(&self, mut idx: u32) -> Vec<i64> {
        let mut c = Vec::with_capacity(self.orders.len());
        for &d in &self.orders {
            c.push((idx % d as u32) as i64);
            idx /= d as u32;
        }
        c
    }

    pub fn index_of(&self, coords: &[i64]) -> u32 {
        let mut idx = 0u64;
        for (i, &d) in self.orders.iter().enumerate().rev() {
            let c = coords[i].rem_euclid(d);
            idx = idx * d as u64 + c as u64;
        }
        idx as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let sum: Vec<i64> = ca.iter().zip(&cb).map(|(x, y)| x + y).collect();
        self.index_of(&sum)
    }

    pub fn q_value(&self, a: u32) -> Rat {
        let c = self.coords(a);
        let n = self.orders.len();
        let mut acc = Rat::zero();
        for i in 0..n {
            if c[i] == 0 {
                continue;
            }
            acc += self.q[i] * Rat::from_integer(c[i] * c[i]);
            for j in i + 1..n {
                if c[j] != 0 {
                    acc += Rat::from_integer(2 * c[i] * c[j]) * self.b[i][j];
                }
            }
            acc = mod2(acc);
        }
        mod2(acc)
    }

    pub fn b_value(&self, a: u32, b: u32) -> Rat {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let n = self.orders.len();
        let mut acc = Rat::zero();
        for i in 0..n {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..n {
                if cb[j] != 0 {
                    acc += Rat::from_integer(ca[i] * cb[j]) * self.b[i][j];
                }
            }
            acc = mod1(acc);
        }
        mod1(acc)
    }

    pub fn negate(&self) -> Fqf {
        Fqf {
            orders: self.orders.clone(),
            q: self.q.iter().map(|x| mod2(-*x)).collect(),
            b: self.b.iter().map(|r| r.iter().map(|x| mod1(-*x)).collect()).collect(),
        }
    }

    pub fn elem_order(&self, a: u32) -> i64 {
        let c = self.coords(a);
        let mut m = 1i64;
        for (ci, &d) in c.iter().zip(&self.orders) {
            let o = d / num_integer::gcd(*ci, d);
            m = num_integer::lcm(m, o);
        }
        m
    }
}

/// A discriminant group remembering rational lifts of its generators in the
/// coordinates of the source lattice.
pub struct Discriminant {
    pub form: Fqf,
    /// Lift of generator `i` as a rational row in lattice coordinates.
    pub lifts: Vec<Vec<BigRational>>,
    snf_v: Mat,
    full_orders: Vec<BigInt>,
    gen_slots: Vec<usize>,
    gram: Mat,
}

impl Discriminant {
    /// Convert a rational vector in lattice coordinates (an element of the
    /// dual) to group coordinates over the form's generators.
    pub fn group_coords(&self, v: &[BigRational]) -> Result<Vec<i64>> {
        let n = self.gram.rows();
        let mut z = vec![BigRational::zero(); n];
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..n {
                z[j] += &v[i] * BigRational::from_integer(self.gram.entry(i, j));
            }
        }
        if z.iter().any(|x| !x.is_integer()) {
            return Err(Error::Invalid("vector is not in the dual lattice".into()));
        }
        let zi: Vec<BigInt> = z.iter().map(|x| x.to_integer()).collect();
        let mut w = vec![BigInt::zero(); n];
        for (i, x) in zi.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                w[j] += x * self.snf_v.entry(i, j);
            }
        }
        let mut coords = Vec::with_capacity(self.gen_slots.len());
        for &slot in &self.gen_slots {
            let c = num_integer::Integer::mod_floor(&w[slot], &self.full_orders[slot]);
            coords.push(
                c.to_i64().ok_or_else(|| Error::Invalid("group coordinate overflow".into()))?,
            );
        }
        Ok(coords)
    }

    /// The action of an isometry of the source lattice on the group, as a
    /// coordinate matrix: row `i` is the image of generator `i`.
    pub fn action_of(&self, g: &Mat) -> Result<Vec<Vec<i64>>> {
        let n = self.gram.rows();
        let mut rows = Vec::with_capacity(self.lifts.len());
        for lift in &self.lifts {
            let mut img = vec![BigRational::zero(); n];
            for i in 0..n {
                if lift[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    img[j] += &lift[i] * BigRational::from_integer(g.entry(i, j));
                }
            }
            rows.push(self.group_coords(&img)?);
        }
        Ok(rows)
    }
}

/// Discriminant form `A_L = L^dual / L` of an even lattice.
pub fn discriminant_form(l: &Lattice) -> Result<Discriminant> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    let n = l.rank();
    let (u, d, v) = exact::smith_normal_form(l.gram());
    let full_orders: Vec<BigInt> = (0..n).map(|i| d.entry(i, i)).collect();
    let gen_slots: Vec<usize> = (0..n).filter(|&i| full_orders[i] > BigInt::from(1)).collect();
    let mut lifts = Vec::with_capacity(gen_slots.len());
    let mut orders = Vec::with_capacity(gen_slots.len());
    for &s in &gen_slots {
        let ds = &full_orders[s];
        let row: Vec<BigRational> =
            (0..n).map(|j| BigRational::new(u.entry(s, j), ds.clone())).collect();
        lifts.push(row);
        orders.push(ds.to_i64().ok_or_else(|| Error::Invalid("order overflow".into()))?);
    }
    let mut q = Vec::with_capacity(lifts.len());
    let mut b = vec![vec![Rat::zero(); lifts.len()]; lifts.len()];
    for (i, li) in lifts.iter().enumerate() {
        let qi = l.inner_rat(li, li)?;
        q.push(big_to_rat(&big_mod(&qi, 2))?);
        for (j, lj) in lifts.iter().enumerate() {
            let bij = l.inner_rat(li, lj)?;
            b[i][j] = big_to_rat(&big_mod(&bij, 1))?;
        }
    }
    let form = Fqf { orders, q, b };
    form.validate()?;
    debug_assert_eq!(BigInt::from(form.group_order()), l.det().abs());
    Ok(Discriminant { form, lifts, snf_v: v, full_orders, gen_slots, gram: l.gram().clone() })
}

fn big_to_rat(x: &BigRational) -> Result<Rat> {
    let n = x.numer().to_i64().ok_or_else(|| Error::Invalid("rational overflow".into()))?;
    let d = x.denom().to_i64().ok_or_else(|| Error::Invalid("rational overflow".into()))?;
    Ok(Rat::new(n, d))
}

/// Reduce into `[0, m)` while still in arbitrary precision.
fn big_mod(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(m));
    let mut r = x - (x / &m).floor() * &m;
    if r < BigRational::zero() {
        r += &m;
    }
    if r >= m {
        r -= &m;
    }
    r
}

/// A subgroup, stored as the sorted list of all its element indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Subgroup(pub Vec<u32>);

impl Subgroup {
    pub fn zero() -> Subgroup {
        Subgroup(vec![0])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn close(fqf: &Fqf, gens: &[u32]) -> Subgroup {
        let mut seen: HashSet<u32> = HashSet::new();
        seen.insert(0);
        let mut queue: Vec<u32> = vec![0];
        let mut qi = 0;
        while qi < queue.len() {
            let x = queue[qi];
            qi += 1;
            for &g in gens {
                let y = fqf.add(x, g);
                if seen.insert(y) {
                    queue.push(y);
                }
            }
        }
        let mut v: Vec<u32> = seen.into_iter().collect();
        v.sort_unstable();
        Subgroup(v)
    }

    pub fn contains(&self, x: u32) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn extend(&self, fqf: &Fqf, x: u32) -> Subgroup {
        let mut gens = self.0.clone();
        gens.push(x);
        Subgroup::close(fqf, &gens)
    }

    pub fn is_totally_isotropic(&self, fqf: &Fqf) -> bool {
        self.0.iter().all(|&x| fqf.q_value(x).is_zero())
    }

    /// Apply a coordinate-matrix automorphism.
    pub fn apply(&self, fqf: &Fqf, action: &[Vec<i64>]) -> Subgroup {
        let k = fqf.orders.len();
        let mut out: Vec<u32> = self
            .0
            .iter()
            .map(|&x| {
                let c = fqf.coords(x);
                let mut img = vec![0i64; k];
                for i in 0..k {
                    if c[i] != 0 {
                        for j in 0..k {
                            img[j] += c[i] * action[i][j];
                        }
                    }
                }
                fqf.index_of(&img)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        debug_assert_eq!(out.len(), self.0.len(), "action is not injective on subgroup");
        Subgroup(out)
    }

    /// Elementary divisors of the subgroup as an abstract abelian group.
    pub fn elementary_divisors(&self, fqf: &Fqf) -> Vec<i64> {
        if self.0.len() == 1 {
            return vec![];
        }
        let k = fqf.orders.len();
        let gens: Vec<Vec<BigInt>> = self
            .0
            .iter()
            .map(|&x| fqf.coords(x).into_iter().map(BigInt::from).collect())
            .collect();
        let mut rows = gens;
        for (i, &d) in fqf.orders.iter().enumerate() {
            let mut r = vec![BigInt::zero(); k];
            r[i] = BigInt::from(d);
            rows.push(r);
        }
        let pre = exact::row_basis(&Mat::from_big_rows(rows));
        // the subgroup is preimage / diag(orders); read the quotient off the
        // relation matrix expressing diag(orders) in the preimage basis
        let mut rel = Vec::new();
        for (i, &d) in fqf.orders.iter().enumerate() {
            let mut target = vec![BigInt::zero(); k];
            target[i] = BigInt::from(d);
            let x = exact::solve_row_integral(&pre, &target).expect("relation lattice contains D");
            rel.push(x);
        }
        let (_, dmat, _) = exact::smith_normal_form(&Mat::from_big_rows(rel));
        let mut divs: Vec<i64> = (0..k)
            .map(|i| dmat.entry(i, i).to_i64().expect("divisor overflow"))
            .filter(|&x| x > 1)
            .collect();
        divs.sort_unstable();
        divs
    }
}

/// Even overlattice built from a totally isotropic subgroup.
pub struct Overlattice {
    pub lattice: Lattice,
    /// Basis rows in source-lattice coordinates, scaled by `den`.
    pub basis_num: Mat,
    pub den: BigInt,
    pub index: BigInt,
}

impl Overlattice {
    pub fn basis_rat(&self) -> Vec<Vec<BigRational>> {
        (0..self.basis_num.rows())
            .map(|i| {
                (0..self.basis_num.cols())
                    .map(|j| BigRational::new(self.basis_num.entry(i, j), self.den.clone()))
                    .collect()
            })
            .collect()
    }

    /// Is the rational vector (in source coordinates) a member?
    pub fn contains(&self, v: &[BigRational]) -> bool {
        let scaled: Vec<BigRational> =
            v.iter().map(|x| x * BigRational::from_integer(self.den.clone())).collect();
        match exact::solve_row(&self.basis_num, &scaled) {
            Some(sol) => sol.iter().all(|c| c.is_integer()),
            None => false,
        }
    }
}

/// The even overlattice `M` of `L` with `M/L = H`.
pub fn overlattice_from_isotropic(
    l: &Lattice,
    disc: &Discriminant,
    h: &Subgroup,
) -> Result<Overlattice> {
    if !h.is_totally_isotropic(&disc.form) {
        return Err(Error::NotIsotropic);
    }
    let n = l.rank();
    let mut den = BigInt::from(1);
    for &x in &h.0 {
        den = num_integer::lcm(den, BigInt::from(disc.form.elem_order(x)));
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        r[i] = den.clone();
        rows.push(r);
    }
    for &x in &h.0 {
        let c = disc.form.coords(x);
        let mut lift = vec![BigRational::zero(); n];
        for (ci, gl) in c.iter().zip(&disc.lifts) {
            if *ci != 0 {
                for j in 0..n {
                    lift[j] += &gl[j] * BigRational::from_integer(BigInt::from(*ci));
                }
            }
        }
        let scaled: Vec<BigInt> = lift
            .iter()
            .map(|v| {
                let s = v * BigRational::from_integer(den.clone());
                assert!(s.is_integer(), "exponent does not clear lift denominator");
                s.to_integer()
            })
            .collect();
        rows.push(scaled);
    }
    let basis_num = exact::row_basis(&Mat::from_big_rows(rows));
    assert_eq!(basis_num.rows(), n);
    let gram_scaled = basis_num.mul(l.gram()).mul(&basis_num.transpose());
    let den2 = &den * &den;
    let gram_rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = gram_scaled.entry(i, j);
                    assert!(num_integer::Integer::mod_floor(&e, &den2).is_zero());
                    e / &den2
                })
                .collect()
        })
        .collect();
    let lattice = Lattice::new(Mat::from_big_rows(gram_rows))?;
    if !lattice.is_even() {
        return Err(Error::NotIsotropic);
    }
    let index = BigInt::from(h.order() as i64);
    debug_assert_eq!(lattice.det().abs() * &index * &index, l.det().abs());
    Ok(Overlattice { lattice, basis_num, den, index })
}

/// Doubly-even binary codes of length `n` up to coordinate permutation,
/// classified by brute force over all permutations. Returns one sorted
/// codeword list per class, ordered by dimension.
pub fn classify_doubly_even_codes(n: usize) -> Vec<Vec<u16>> {
    assert!(n <= 8, "full-permutation canonicalization is for short lengths");
    let weight = |w: u16| w.count_ones() as usize;
    let candidates: Vec<u16> = (1u16..(1 << n)).filter(|&w| weight(w) % 4 == 0).collect();
    let close = |gens: &[u16]| -> Option<Vec<u16>> {
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
                    if weight(y) % 4 != 0 {
                        return None;
                    }
                    queue.push(y);
                }
            }
        }
        let mut v: Vec<u16> = seen.into_iter().collect();
        v.sort_unstable();
        Some(v)
    };
    let canon = |code: &[u16]| -> Vec<u16> {
        let idx: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<u16>> = None;
        permute_all(&idx, &mut |perm| {
            let mut mapped: Vec<u16> = code
                .iter()
                .map(|&w| {
                    let mut out = 0u16;
                    for (to, &from) in perm.iter().enumerate() {
                        if w & (1 << from) != 0 {
                            out |= 1 << to;
                        }
                    }
                    out
                })
                .collect();
            mapped.sort_unstable();
            if best.as_ref().map_or(true, |b| &mapped < b) {
                best = Some(mapped);
            }
        });
        best.unwrap()
    };
    let mut reps: HashSet<Vec<u16>> = HashSet::new();
    reps.insert(vec![0]);
    let mut frontier: Vec<Vec<u16>> = vec![vec![0]];
    while let Some(code) = frontier.pop() {
        for &c in &candidates {
            if code.contains(&c) {
                continue;
            }
            let mut gens: Vec<u16> = code.iter().copied().filter(|&x| x != 0).collect();
            gens.push(c);
            if let Some(bigger) = close(&gens) {
                let k = canon(&bigger);
                if reps.insert(k.clone()) {
                    frontier.push(k);
                }
            }
        }
    }
    let mut out: Vec<Vec<u16>> = reps.into_iter().collect();
    out.sort_by_key(|c| (c.len(), c.clone()));
    out
}

fn permute_all(items: &[usize], f: &mut impl FnMut(&[usize])) {
    let mut v = items.to_vec();
    permute_rec(&mut v, 0, f);
}

fn permute_rec(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute_rec(v, k + 1, f);
        v.swap(k, i);
    }
}

/// All isotropic element indices of a form, excluding zero.
pub fn isotropic_elements(fqf: &Fqf) -> Vec<u32> {
    (1..fqf.len() as u32).filter(|&x| fqf.q_value(x).is_zero()).collect()
}

/// Orbit representatives of totally isotropic subgroups under a finite
/// group of automorphisms given by coordinate matrices.
pub struct IsotropicOrbits {
    /// One representative per orbit, in discovery order (zero first).
    pub reps: Vec<Subgroup>,
    /// Schreier words over the input generators stabilizing each rep
    /// (negative entry = inverse of generator `|s|-1`).
    pub stab_words: Vec<Vec<Vec<isize>>>,
}

/// Enumerate all totally isotropic subgroups up to the given action by
/// successive one-element enlargements, deduping whole orbits.
pub fn isotropic_subgroups_up_to(fqf: &Fqf, actions: &[Vec<Vec<i64>>]) -> IsotropicOrbits {
    let iso = isotropic_elements(fqf);
    let (zero_orbit, zero_words) = subgroup_orbit(fqf, actions, &Subgroup::zero());
    let mut reps: Vec<Subgroup> = vec![Subgroup::zero()];
    let mut stab_words: Vec<Vec<Vec<isize>>> = vec![zero_words];
    let mut seen: HashSet<Subgroup> = zero_orbit.into_iter().collect();

    let mut qi = 0;
    while qi < reps.len() {
        let h = reps[qi].clone();
        for &x in &iso {
            if h.contains(x) {
                continue;
            }
            if !h.0.iter().all(|&y| fqf.b_value(x, y).is_zero()) {
                continue;
            }
            let bigger = h.extend(fqf, x);
            if !bigger.is_totally_isotropic(fqf) {
                continue;
            }
            if !seen.contains(&bigger) {
                let (orbit, words) = subgroup_orbit(fqf, actions, &bigger);
                for m in orbit {
                    seen.insert(m);
                }
                reps.push(bigger);
                stab_words.push(words);
            }
        }
        qi += 1;
    }
    IsotropicOrbits { reps, stab_words }
}

/// Orbit of a subgroup under coordinate-matrix generators; also returns
/// Schreier words for the stabilizer (positive entries only in the tree
/// part; closing words may reference inverses as negative entries).
pub fn subgroup_orbit(
    fqf: &Fqf,
    actions: &[Vec<Vec<i64>>],
    start: &Subgroup,
) -> (Vec<Subgroup>, Vec<Vec<isize>>) {
    let mut orbit: Vec<Subgroup> = vec![start.clone()];
    let mut pos: HashMap<Subgroup, usize> = HashMap::new();
    pos.insert(start.clone(), 0);
    let mut parent: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    let mut stab: Vec<Vec<isize>> = Vec::new();
    let mut seen_words: HashSet<Vec<isize>> = HashSet::new();
    let mut qi = 0;
    while qi < orbit.len() {
        let h = orbit[qi].clone();
        for (gi, a) in actions.iter().enumerate() {
            let img = h.apply(fqf, a);
            match pos.get(&img) {
                None => {
                    pos.insert(img.clone(), orbit.len());
                    parent.push((qi, gi));
                    orbit.push(img);
                }
                Some(&m) => {
                    let mut w = trace_word(&parent, qi);
                    w.push(gi as isize + 1);
                    let back = trace_word(&parent, m);
                    for &s in back.iter().rev() {
                        w.push(-s);
                    }
                    if !w.is_empty() && seen_words.insert(w.clone()) {
                        stab.push(w);
                    }
                }
            }
        }
        qi += 1;
    }
    (orbit, stab)
}

fn trace_word(parent: &[(usize, usize)], mut i: usize) -> Vec<isize> {
    let mut w = Vec::new();
    while parent[i].0 != usize::MAX {
        let (p, g) = parent[i];
        w.push(g as isize + 1);
        i = p;
    }
    w.reverse();
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::standard_gram;

    fn lat(t: &str) -> Lattice {
        Lattice::new(standard_gram(&t.parse().unwrap())).unwrap()
    }

    #[test]
    fn discriminant_of_a1() {
        let d = discriminant_form(&lat("A1")).unwrap();
        assert_eq!(d.form.orders, vec![2]);
        // q = -1/2 mod 2Z = 3/2
        assert_eq!(d.form.q[0], Rat::new(3, 2));
        assert_eq!(d.form.group_order(), 2);
    }

    #[test]
    fn discriminant_of_e8_is_trivial() {
        let d = discriminant_form(&lat("E8")).unwrap();
        assert_eq!(d.form.num_gens(), 0);
        assert_eq!(d.form.group_order(), 1);
    }

    #[test]
    fn discriminant_of_rescaled_l10() {
        let e10 = crate::chambers::E10::new();
        let l2 = e10.lattice.rescale(2);
        let d = discriminant_form(&l2).unwrap();
        assert_eq!(d.form.group_order(), 1 << 10);
        assert!(d.form.orders.iter().all(|&o| o == 2));
    }

    #[test]
    fn odd_lattice_rejected() {
        let odd = Lattice::new(Mat::from_rows(vec![vec![1]])).unwrap();
        assert!(discriminant_form(&odd).is_err());
    }

    #[test]
    fn overlattice_round_trip() {
        // <8A1> plus the extended Hamming code gives E8
        let l = lat("8A1");
        let d = discriminant_form(&l).unwrap();
        assert_eq!(d.form.group_order(), 256);
        let code_words: [[i64; 8]; 4] = [
            [1, 0, 0, 0, 0, 1, 1, 1],
            [0, 1, 0, 0, 1, 0, 1, 1],
            [0, 0, 1, 0, 1, 1, 0, 1],
            [0, 0, 0, 1, 1, 1, 1, 0],
        ];
        let gens: Vec<u32> = code_words.iter().map(|c| d.form.index_of(c)).collect();
        let h = Subgroup::close(&d.form, &gens);
        assert_eq!(h.order(), 16);
        assert!(h.is_totally_isotropic(&d.form));
        let m = overlattice_from_isotropic(&l, &d, &h).unwrap();
        assert_eq!(m.index, BigInt::from(16));
        assert_eq!(m.lattice.det().abs(), BigInt::from(1));
        let rs = crate::roots::RootSystem::new(m.lattice.clone()).unwrap();
        assert_eq!(rs.roots.len(), 240);
        // round trip: recover the subgroup from the overlattice basis
        let mut rec: Vec<u32> = Vec::new();
        for row in m.basis_rat() {
            let c = d.group_coords(&row).unwrap();
            rec.push(d.form.index_of(&c));
        }
        let h2 = Subgroup::close(&d.form, &rec);
        assert_eq!(h2, h);
    }

    #[test]
    fn non_root_overlattice_of_8a1() {
        // the all-ones codeword glues to a non-root lattice
        let l = lat("8A1");
        let d = discriminant_form(&l).unwrap();
        let g = d.form.index_of(&[1; 8]);
        let h = Subgroup::close(&d.form, &[g]);
        let m = overlattice_from_isotropic(&l, &d, &h).unwrap();
        let rs = crate::roots::RootSystem::new(m.lattice.clone()).unwrap();
        // roots do not span: still only the sixteen 8A1 roots
        assert_eq!(rs.roots.len(), 16);
    }

    #[test]
    fn zero_subgroup_overlattice_is_identity() {
        let l = lat("A2");
        let d = discriminant_form(&l).unwrap();
        let m = overlattice_from_isotropic(&l, &d, &Subgroup::zero()).unwrap();
        assert_eq!(m.lattice.gram(), l.gram());
        assert_eq!(m.index, BigInt::from(1));
    }

    #[test]
    fn a1_form_has_no_isotropic_elements() {
        let d = discriminant_form(&lat("A1")).unwrap();
        assert!(isotropic_elements(&d.form).is_empty());
    }

    #[test]
    fn doubly_even_code_counts() {
        assert_eq!(classify_doubly_even_codes(3).len(), 1); // zero code only
        assert_eq!(classify_doubly_even_codes(4).len(), 2); // zero and [1234]
        let codes8 = classify_doubly_even_codes(8);
        assert_eq!(codes8.len(), 8);
        let dims: Vec<u32> = codes8.iter().map(|c| c.len().trailing_zeros()).collect();
        assert_eq!(dims, vec![0, 1, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn isotropic_subgroups_of_8a1_match_codes() {
        let l = lat("8A1");
        let d = discriminant_form(&l).unwrap();
        let (perm_gens, _) = crate::roots::aut_generators(&"8A1".parse().unwrap());
        let actions: Vec<Vec<Vec<i64>>> = perm_gens
            .iter()
            .map(|p| {
                let k = 8;
                let mut m = vec![vec![0i64; k]; k];
                for (i, &pi) in p.iter().enumerate() {
                    m[i][pi] = 1;
                }
                m
            })
            .collect();
        let orbits = isotropic_subgroups_up_to(&d.form, &actions);
        assert_eq!(orbits.reps.len(), 8);
    }

    #[test]
    fn elementary_divisors_of_subgroups() {
        let l = lat("8A1");
        let d = discriminant_form(&l).unwrap();
        let g1 = d.form.index_of(&[1, 1, 1, 1, 0, 0, 0, 0]);
        let g2 = d.form.index_of(&[0, 0, 1, 1, 1, 1, 0, 0]);
        let h = Subgroup::close(&d.form, &[g1, g2]);
        assert_eq!(h.order(), 4);
        assert_eq!(h.elementary_divisors(&d.form), vec![2, 2]);
    }

    #[test]
    fn fqf_json_round_trip() {
        let d = discriminant_form(&lat("A2")).unwrap();
        let s = serde_json::to_string(&d.form).unwrap();
        let back: Fqf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d.form);
    }
}
