//! Roots, Dynkin diagrams, ADE types and the Weyl-group word algorithms:
//! short-vector enumeration, chamber-connecting words, longest elements,
//! and the splitting `O(R) -> Aut(Phi)`.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

/// Simple-component letter; the derived order `A < D < E` is the canonical
/// component order everywhere.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Kind {
    A,
    D,
    E,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::A => write!(f, "A"),
            Kind::D => write!(f, "D"),
            Kind::E => write!(f, "E"),
        }
    }
}

/// Multiset of simple-component labels, kept sorted by `(letter, rank)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct AdeType {
    comps: Vec<(Kind, usize)>,
}

impl AdeType {
    pub fn new(mut comps: Vec<(Kind, usize)>) -> AdeType {
        for &(k, r) in &comps {
            match k {
                Kind::A => assert!(r >= 1),
                Kind::D => assert!(r >= 4),
                Kind::E => assert!((6..=8).contains(&r)),
            }
        }
        comps.sort();
        AdeType { comps }
    }

    pub fn components(&self) -> &[(Kind, usize)] {
        &self.comps
    }

    pub fn rank(&self) -> usize {
        self.comps.iter().map(|&(_, r)| r).sum()
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    /// All ADE types of total rank between 1 and `max_rank`.
    pub fn all_up_to_rank(max_rank: usize) -> Vec<AdeType> {
        let mut singles: Vec<(Kind, usize)> = Vec::new();
        for r in 1..=max_rank {
            singles.push((Kind::A, r));
        }
        for r in 4..=max_rank {
            singles.push((Kind::D, r));
        }
        for r in 6..=max_rank.min(8) {
            singles.push((Kind::E, r));
        }
        singles.sort();
        let mut out = Vec::new();
        let mut stack: Vec<(usize, usize, Vec<(Kind, usize)>)> = vec![(0, 0, Vec::new())];
        while let Some((start, used, comps)) = stack.pop() {
            if !comps.is_empty() {
                out.push(AdeType { comps: comps.clone() });
            }
            for (i, &c) in singles.iter().enumerate().skip(start) {
                if used + c.1 <= max_rank {
                    let mut next = comps.clone();
                    next.push(c);
                    stack.push((i, used + c.1, next));
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.comps.len() {
            let (k, r) = self.comps[i];
            let mut j = i;
            while j < self.comps.len() && self.comps[j] == (k, r) {
                j += 1;
            }
            let mult = j - i;
            if mult > 1 {
                parts.push(format!("{}{}{}", mult, k, r));
            } else {
                parts.push(format!("{}{}", k, r));
            }
            i = j;
        }
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for AdeType {
    type Err = Error;

    fn from_str(s: &str) -> Result<AdeType> {
        let mut comps = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let letter_pos = part
                .find(|c| c == 'A' || c == 'D' || c == 'E')
                .ok_or_else(|| Error::Invalid(format!("bad ADE component: {part}")))?;
            let mult: usize = if letter_pos == 0 {
                1
            } else {
                part[..letter_pos]
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad multiplicity in: {part}")))?
            };
            let kind = match &part[letter_pos..letter_pos + 1] {
                "A" => Kind::A,
                "D" => Kind::D,
                _ => Kind::E,
            };
            let rank: usize = part[letter_pos + 1..]
                .parse()
                .map_err(|_| Error::Invalid(format!("bad rank in: {part}")))?;
            let ok = match kind {
                Kind::A => rank >= 1,
                Kind::D => rank >= 4,
                Kind::E => (6..=8).contains(&rank),
            };
            if !ok {
                return Err(Error::Invalid(format!("no such ADE component: {part}")));
            }
            for _ in 0..mult {
                comps.push((kind, rank));
            }
        }
        if comps.is_empty() {
            return Err(Error::Invalid("empty ADE type".into()));
        }
        Ok(AdeType::new(comps))
    }
}

/// One connected component of a Dynkin diagram, with its vertices listed in
/// the standard order for its type.
#[derive(Clone, Debug)]
pub struct Component {
    pub kind: Kind,
    pub rank: usize,
    /// Indices into the analyzed configuration, in standard order.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Components {
    pub comps: Vec<Component>,
}

impl Components {
    pub fn ade_type(&self) -> AdeType {
        AdeType::new(self.comps.iter().map(|c| (c.kind, c.rank)).collect())
    }

    /// Concatenated standard-order vertex list: position `p` of the standard
    /// form is original vertex `perm[p]`.
    pub fn standard_order(&self) -> Vec<usize> {
        self.comps.iter().flat_map(|c| c.vertices.iter().copied()).collect()
    }
}

/// Edge set of the standard diagram of a single component.
fn standard_edges(kind: Kind, rank: usize) -> Vec<(usize, usize)> {
    match kind {
        Kind::A => (0..rank - 1).map(|i| (i, i + 1)).collect(),
        Kind::D => {
            let mut e: Vec<(usize, usize)> = (0..rank - 3).map(|i| (i, i + 1)).collect();
            e.push((rank - 3, rank - 2));
            e.push((rank - 3, rank - 1));
            e
        }
        Kind::E => {
            let mut e: Vec<(usize, usize)> = (0..rank - 2).map(|i| (i, i + 1)).collect();
            e.push((2, rank - 1));
            e
        }
    }
}

/// Standard Gram matrix of a type, components in canonical order.
pub fn standard_gram(t: &AdeType) -> Mat {
    let n = t.rank();
    let mut g = Mat::zero(n, n);
    for i in 0..n {
        g.set_i64(i, i, -2);
    }
    let mut off = 0;
    for &(k, r) in t.components() {
        for (a, b) in standard_edges(k, r) {
            g.set_i64(off + a, off + b, 1);
            g.set_i64(off + b, off + a, 1);
        }
        off += r;
    }
    g
}

/// Analyze a pairing matrix (diagonal -2, off-diagonal 0/1) into ADE
/// components with canonically ordered vertices.
pub fn analyze_configuration(pair: &Mat) -> Result<Components> {
    let n = pair.rows();
    if !pair.is_symmetric() {
        return Err(Error::NotAde("pairing matrix not symmetric".into()));
    }
    for i in 0..n {
        if pair.entry_i64(i, i) != Some(-2) {
            return Err(Error::NotAde(format!("vertex {i} has square-norm != -2")));
        }
        for j in 0..n {
            if i != j && !matches!(pair.entry_i64(i, j), Some(0) | Some(1)) {
                return Err(Error::NotAde(format!("pairing <{i},{j}> outside {{0,1}}")));
            }
        }
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && pair.entry_i64(i, j) == Some(1)).collect())
        .collect();

    // connected components, in order of smallest vertex
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut verts = vec![start];
        seen[start] = true;
        let mut qi = 0;
        while qi < verts.len() {
            let v = verts[qi];
            qi += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    verts.push(w);
                }
            }
        }
        verts.sort_unstable();
        comps.push(classify_component(&verts, &adj)?);
    }
    comps.sort_by_key(|c| (c.kind, c.rank, c.vertices.clone()));
    Ok(Components { comps })
}

fn classify_component(verts: &[usize], adj: &[Vec<usize>]) -> Result<Component> {
    let m = verts.len();
    let deg = |v: usize| adj[v].iter().filter(|w| verts.contains(w)).count();
    let edges: usize = verts.iter().map(|&v| deg(v)).sum::<usize>() / 2;
    if edges != m - 1 {
        return Err(Error::NotAde("component contains a cycle".into()));
    }
    let deg3: Vec<usize> = verts.iter().copied().filter(|&v| deg(v) == 3).collect();
    if verts.iter().any(|&v| deg(v) > 3) || deg3.len() > 1 {
        return Err(Error::NotAde("component branches too much".into()));
    }

    if deg3.is_empty() {
        // path: A_m
        if m == 1 {
            return Ok(Component { kind: Kind::A, rank: 1, vertices: verts.to_vec() });
        }
        let ends: Vec<usize> = verts.iter().copied().filter(|&v| deg(v) == 1).collect();
        let walk = |from: usize| -> Vec<usize> {
            let mut path = vec![from];
            let mut prev = usize::MAX;
            let mut cur = from;
            while path.len() < m {
                let next = *adj[cur].iter().find(|&&w| w != prev).unwrap();
                path.push(next);
                prev = cur;
                cur = next;
            }
            path
        };
        let p1 = walk(ends[0]);
        let p2 = walk(ends[1]);
        let path = if p1 <= p2 { p1 } else { p2 };
        return Ok(Component { kind: Kind::A, rank: m, vertices: path });
    }

    let center = deg3[0];
    // arms out of the center, outer end first
    let mut arms: Vec<Vec<usize>> = Vec::new();
    for &first in &adj[center] {
        let mut arm = vec![first];
        let mut prev = center;
        let mut cur = first;
        while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
            arm.push(next);
            prev = cur;
            cur = next;
        }
        arm.reverse(); // outer end first, center-adjacent last
        arms.push(arm);
    }
    arms.sort_by_key(|a| (a.len(), a.clone()));
    let (l1, l2, l3) = (arms[0].len(), arms[1].len(), arms[2].len());
    debug_assert_eq!(l1 + l2 + l3 + 1, m);
    if l1 == 1 && l2 == 1 {
        // D_m: long tail then the two short legs
        let mut vertices = arms[2].clone();
        vertices.push(center);
        vertices.push(arms[0][0]);
        vertices.push(arms[1][0]);
        return Ok(Component { kind: Kind::D, rank: m, vertices });
    }
    if l1 == 1 && l2 == 2 && (2..=4).contains(&l3) {
        // E_m: [arm2 outer..in] center [arm3 in..out] , short leg last
        let mut vertices: Vec<usize> = arms[1].clone();
        vertices.push(center);
        let mut long = arms[2].clone();
        long.reverse(); // center-adjacent first
        vertices.extend(long);
        vertices.push(arms[0][0]);
        return Ok(Component { kind: Kind::E, rank: m, vertices });
    }
    Err(Error::NotAde(format!("T({},{},{}) branch shape", l1 + 1, l2 + 1, l3 + 1)))
}

/// ADE type of a configuration given by its pairing matrix.
pub fn ade_type_of(pair: &Mat) -> Result<AdeType> {
    Ok(analyze_configuration(pair)?.ade_type())
}

/// Per-component diagram symmetry order.
fn component_aut_order(kind: Kind, rank: usize) -> u64 {
    match kind {
        Kind::A => {
            if rank == 1 {
                1
            } else {
                2
            }
        }
        Kind::D => {
            if rank == 4 {
                6
            } else {
                2
            }
        }
        Kind::E => {
            if rank == 6 {
                2
            } else {
                1
            }
        }
    }
}

/// Diagram symmetries of one standard component, as permutations of `0..rank`.
fn component_aut_gens(kind: Kind, rank: usize) -> Vec<Vec<usize>> {
    match kind {
        Kind::A => {
            if rank == 1 {
                vec![]
            } else {
                vec![(0..rank).rev().collect()]
            }
        }
        Kind::D => {
            if rank == 4 {
                // legs are positions 0, 2, 3 around the center 1
                vec![vec![0, 1, 3, 2], vec![2, 1, 0, 3]]
            } else {
                let mut p: Vec<usize> = (0..rank).collect();
                p.swap(rank - 2, rank - 1);
                vec![p]
            }
        }
        Kind::E => {
            if rank == 6 {
                // flip the two long arms: 0<->4, 1<->3
                vec![vec![4, 3, 2, 1, 0, 5]]
            } else {
                vec![]
            }
        }
    }
}

/// Generators and order of the full automorphism group of the standard
/// configuration of type `t`: per-component diagram symmetries plus
/// transpositions of isomorphic components.
pub fn aut_generators(t: &AdeType) -> (Vec<Vec<usize>>, BigInt) {
    let n = t.rank();
    let comps = t.components();
    let offsets: Vec<usize> = comps
        .iter()
        .scan(0usize, |acc, &(_, r)| {
            let o = *acc;
            *acc += r;
            Some(o)
        })
        .collect();
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut order = BigInt::from(1);
    let mut i = 0;
    while i < comps.len() {
        let (k, r) = comps[i];
        let mut j = i;
        while j < comps.len() && comps[j] == (k, r) {
            j += 1;
        }
        let mult = j - i;
        for g in component_aut_gens(k, r) {
            let mut p: Vec<usize> = (0..n).collect();
            for (a, &b) in g.iter().enumerate() {
                p[offsets[i] + a] = offsets[i] + b;
            }
            gens.push(p);
        }
        for c in i..j - 1 {
            let mut p: Vec<usize> = (0..n).collect();
            for a in 0..r {
                p[offsets[c] + a] = offsets[c + 1] + a;
                p[offsets[c + 1] + a] = offsets[c] + a;
            }
            gens.push(p);
        }
        let ca = BigInt::from(component_aut_order(k, r));
        let mut fact = BigInt::from(1);
        for f in 1..=mult {
            fact *= f as u64;
        }
        order *= num_traits::pow::pow(ca, mult) * fact;
        i = j;
    }
    (gens, order)
}

fn isqrt_big(x: &BigInt) -> BigInt {
    assert!(!x.is_negative());
    x.sqrt()
}

/// Complete set `{ v : <v,v> = norm }` of a negative-definite lattice,
/// enumerated by exact branch-and-bound over the LDL^T diagonalization,
/// sorted lexicographically.
pub fn short_vectors(l: &Lattice, norm: i64) -> Result<Vec<Vec<i64>>> {
    if norm >= 0 {
        return Err(Error::Invalid("norm must be negative".into()));
    }
    let n = l.rank();
    if !l.is_negative_definite() {
        return Err(Error::NotNegativeDefinite);
    }
    // positive definite M = -gram; M = L D L^T, L unit lower triangular
    let mut m: Vec<Vec<BigRational>> = l
        .gram()
        .to_big_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|x| BigRational::from_integer(-x)).collect())
        .collect();
    let mut low: Vec<Vec<BigRational>> =
        vec![vec![BigRational::zero(); n]; n];
    for k in 0..n {
        let d = m[k][k].clone();
        low[k][k] = BigRational::from_integer(BigInt::from(1));
        for i in k + 1..n {
            low[i][k] = &m[i][k] / &d;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = &low[i][k] * &m[k][j];
                m[i][j] -= x;
            }
        }
        for i in k + 1..n {
            m[i][k] = BigRational::zero();
            m[k][i] = BigRational::zero();
        }
    }
    let diag: Vec<BigRational> = (0..n).map(|k| m[k][k].clone()).collect();

    let target = BigRational::from_integer(BigInt::from(-norm));
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut x = vec![0i64; n];
    // Q(x) = sum_k d_k (x_k + c_k)^2 with c_k = sum_{i>k} L[i][k] x_i
    fn rec(
        k: isize,
        x: &mut Vec<i64>,
        rem: &BigRational,
        diag: &[BigRational],
        low: &[Vec<BigRational>],
        out: &mut Vec<Vec<i64>>,
    ) {
        if k < 0 {
            if rem.is_zero() {
                out.push(x.clone());
            }
            return;
        }
        let k = k as usize;
        let n = x.len();
        let mut c = BigRational::zero();
        for i in k + 1..n {
            if x[i] != 0 {
                c += &low[i][k] * BigRational::from_integer(BigInt::from(x[i]));
            }
        }
        // d_k (x_k + c)^2 <= rem, so |x_k + c| <= sqrt(rem / d_k); bracket
        // conservatively in exact arithmetic and filter each candidate.
        let bound2 = rem / &diag[k];
        let b = isqrt_big(&num_integer::Integer::div_ceil(bound2.numer(), bound2.denom()))
            + BigInt::from(1);
        let lo = (-&b - c.ceil().to_integer()).to_i64().expect("bound exceeds i64");
        let hi = (b - c.floor().to_integer()).to_i64().expect("bound exceeds i64");
        for v in lo..=hi {
            let y = BigRational::from_integer(BigInt::from(v)) + &c;
            let used = &diag[k] * &y * &y;
            if used <= *rem {
                x[k] = v;
                let next = rem - &used;
                rec(k as isize - 1, x, &next, diag, low, out);
                x[k] = 0;
            }
        }
    }
    rec(n as isize - 1, &mut x, &target, &diag, &low, &mut out);
    out.retain(|v| v.iter().any(|&c| c != 0));
    out.sort();
    Ok(out)
}

/// A negative-definite root lattice together with its full root set.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub lattice: Lattice,
    pub roots: Vec<Vec<i64>>,
    index: HashSet<Vec<i64>>,
}

impl RootSystem {
    pub fn new(lattice: Lattice) -> Result<RootSystem> {
        let roots = short_vectors(&lattice, -2)?;
        let index = roots.iter().cloned().collect();
        Ok(RootSystem { lattice, roots, index })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn is_root(&self, v: &[i64]) -> bool {
        self.index.contains(v)
    }

    fn pair(&self, v: &[BigInt], r: &[i64]) -> BigInt {
        let g = self.lattice.gram();
        let n = self.rank();
        let mut acc = BigInt::zero();
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if r[j] != 0 {
                    acc += &v[i] * g.entry(i, j) * r[j];
                }
            }
        }
        acc
    }

    /// Apply the reflection in `r` to a (big) integer row vector.
    fn reflect(&self, v: &[BigInt], r: &[i64]) -> Vec<BigInt> {
        let coef = self.pair(v, r);
        v.iter().zip(r).map(|(x, &ri)| x + &coef * ri).collect()
    }

    /// Algorithm: the unique Weyl element `g` with `Gamma(u)^g = Gamma(v)`,
    /// as a reflection word. `u`, `v` must avoid all root walls.
    pub fn connecting_word(&self, u: &[i64], v: &[i64]) -> Result<Vec<Vec<i64>>> {
        connecting_word_over(&self.lattice, &self.roots, u, v)
    }

    /// Product matrix of a reflection word (identity for the empty word).
    pub fn word_matrix(&self, word: &[Vec<i64>]) -> Mat {
        let mut g = Mat::identity(self.rank());
        for r in word {
            let s = self.lattice.reflection(r).expect("word entry is a root");
            g = g.mul(&s);
        }
        g
    }

    /// Longest element of the Weyl group: `Gamma(c)^l = -Gamma(c)`.
    pub fn longest_element(&self) -> Result<Vec<Vec<i64>>> {
        let c = self.lattice.weyl_vector_int();
        let neg: Vec<i64> = c.iter().map(|&x| -x).collect();
        let w = self.connecting_word(&c, &neg)?;
        debug_assert_eq!(w.len(), self.roots.len() / 2);
        Ok(w)
    }

    /// Image of `g` under the splitting `O(R) -> Aut(Phi)`, assuming the
    /// lattice basis is itself an ADE basis `Phi`. Returned as the
    /// permutation `p` with `basis_i ^ kappa(g) = basis_{p[i]}`.
    pub fn kappa(&self, g: &Mat) -> Result<Vec<usize>> {
        let c = self.lattice.weyl_vector_int();
        let u = g.apply_row_i64(&c).ok_or_else(|| Error::Invalid("kappa overflow".into()))?;
        let word = self.connecting_word(&u, &c)?;
        let k = g.mul(&self.word_matrix(&word));
        permutation_of_basis(&k)
            .ok_or_else(|| Error::Invalid("kappa image is not a basis permutation".into()))
    }
}

fn pair_in(l: &Lattice, v: &[BigInt], r: &[i64]) -> BigInt {
    let g = l.gram();
    let n = l.rank();
    let mut acc = BigInt::zero();
    for i in 0..n {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if r[j] != 0 {
                acc += &v[i] * g.entry(i, j) * r[j];
            }
        }
    }
    acc
}

/// Chamber-connecting word over an arbitrary set of roots of `l` (a root
/// subsystem): walks the segment from `u` towards a perturbation of `v`,
/// crossing one wall at a time, and verifies the resulting sign pattern.
pub fn connecting_word_over(
    l: &Lattice,
    roots: &[Vec<i64>],
    u: &[i64],
    v: &[i64],
) -> Result<Vec<Vec<i64>>> {
    let ub: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x)).collect();
    let vb: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    for r in roots {
        if pair_in(l, &ub, r).is_zero() || pair_in(l, &vb, r).is_zero() {
            return Err(Error::OnWall);
        }
    }
    // deterministic perturbation schedule; the range must be large, since
    // any pair of crossing roots at equal height ties unless the
    // perturbation separates them
    let mut seed = 0x5EED_1234_ABCDu64;
    let mut next_small = move || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((seed >> 16) % (1 << 21)) as i64 - (1 << 20)
    };
    'attempt: for attempt in 0..64 {
        let xi: Vec<i64> = if attempt == 0 {
            vec![0; l.rank()]
        } else {
            (0..l.rank()).map(|_| next_small()).collect()
        };
        let xib: Vec<BigInt> = xi.iter().map(|&x| BigInt::from(x)).collect();
        // scale factor making sign<w, r> = sign<v, r> for all roots
        let mut scale = BigInt::from(1);
        for r in roots {
            let pv = pair_in(l, &vb, r).abs();
            let px = pair_in(l, &xib, r).abs();
            let needed = num_integer::Integer::div_ceil(&px, &pv) + 1;
            if needed > scale {
                scale = needed;
            }
        }
        let w: Vec<BigInt> =
            vb.iter().zip(&xib).map(|(a, b)| a * (BigInt::from(2) * &scale) + b).collect();
        // crossing roots: <u,r> < 0 < <v,r>
        let mut crossings: Vec<(BigRational, Vec<i64>)> = Vec::new();
        for r in roots {
            let pu = pair_in(l, &ub, r);
            let pv = pair_in(l, &vb, r);
            if pu.is_negative() && pv.is_positive() {
                let pw = pair_in(l, &w, r);
                debug_assert!(pw.is_positive());
                crossings.push((BigRational::new(-pu, pw), r.clone()));
            }
        }
        crossings.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for pair in crossings.windows(2) {
            if pair[0].0 == pair[1].0 {
                continue 'attempt; // tie: perturbation not generic enough
            }
        }
        let word: Vec<Vec<i64>> = crossings.into_iter().map(|(_, r)| r).collect();
        // postcondition: u^g lies in the chamber of v (equal sign patterns)
        let mut ug = ub.clone();
        for r in &word {
            let coef = pair_in(l, &ug, r);
            ug = ug.iter().zip(r).map(|(x, &ri)| x + &coef * ri).collect();
        }
        for r in roots {
            let a = pair_in(l, &ug, r);
            let b = pair_in(l, &vb, r);
            if a.is_positive() != b.is_positive() {
                continue 'attempt;
            }
        }
        return Ok(word);
    }
    Err(Error::Invalid("no generic perturbation found".into()))
}

/// Interpret a matrix as a permutation of the standard basis rows, if it is
/// one: row `i` equals `e_{p[i]}`.
pub fn permutation_of_basis(m: &Mat) -> Option<Vec<usize>> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let mut p = vec![usize::MAX; n];
    let mut hit = vec![false; n];
    for i in 0..n {
        let mut img = None;
        for j in 0..n {
            match m.entry_i64(i, j) {
                Some(0) => {}
                Some(1) if img.is_none() => img = Some(j),
                _ => return None,
            }
        }
        let j = img?;
        if hit[j] {
            return None;
        }
        hit[j] = true;
        p[i] = j;
    }
    Some(p)
}

/// The set of indecomposable roots positive on the linear form `ell`
/// (given by its values on the basis): an ADE basis of the root lattice.
pub fn ade_basis_from_linear_form(rs: &RootSystem, ell: &[i64]) -> Result<Vec<Vec<i64>>> {
    let n = rs.rank();
    if ell.len() != n {
        return Err(Error::DimensionMismatch("linear form length".into()));
    }
    let val = |r: &[i64]| -> i64 { r.iter().zip(ell).map(|(&a, &b)| a * b).sum() };
    let mut positive: Vec<Vec<i64>> = Vec::new();
    for r in &rs.roots {
        match val(r).cmp(&0) {
            std::cmp::Ordering::Equal => return Err(Error::OnWall),
            std::cmp::Ordering::Greater => positive.push(r.clone()),
            std::cmp::Ordering::Less => {}
        }
    }
    let pos_set: HashSet<&[i64]> = positive.iter().map(|v| v.as_slice()).collect();
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for r in &positive {
        let decomposable = positive.iter().any(|a| {
            if a == r {
                return false;
            }
            let b: Vec<i64> = r.iter().zip(a).map(|(x, y)| x - y).collect();
            pos_set.contains(b.as_slice())
        });
        if !decomposable {
            basis.push(r.clone());
        }
    }
    basis.sort();
    if basis.len() != n {
        return Err(Error::NotAde(format!(
            "indecomposable positive roots: {} of rank {n}",
            basis.len()
        )));
    }
    Ok(basis)
}

/// A deterministic linear form avoiding all root walls of `rs`.
pub fn generic_linear_form(rs: &RootSystem) -> Vec<i64> {
    let n = rs.rank();
    let generic = |ell: &[i64]| {
        rs.roots.iter().all(|r| r.iter().zip(ell).map(|(&a, &b)| a * b).sum::<i64>() != 0)
    };
    // start from the all-ones functional, then walk a deterministic
    // pseudo-random schedule until no root vanishes
    let ones = vec![1i64; n];
    if generic(&ones) {
        return ones;
    }
    let mut seed = 0xC0FFEEu64;
    loop {
        let ell: Vec<i64> = (0..n)
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((seed >> 20) % 100_003) as i64 + 1
            })
            .collect();
        if generic(&ell) {
            return ell;
        }
    }
}

/// Count of ADE types of rank at most 9 (the abstract configurations with
/// fewer than 10 vertices up to isomorphism).
pub fn count_types_up_to_rank_9() -> usize {
    AdeType::all_up_to_rank(9).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;

    fn lat(t: &str) -> Lattice {
        Lattice::new(standard_gram(&t.parse().unwrap())).unwrap()
    }

    #[test]
    fn type_strings() {
        let t: AdeType = "2A1+2A3".parse().unwrap();
        assert_eq!(t.to_string(), "2A1+2A3");
        assert_eq!(t.rank(), 8);
        let t: AdeType = "A1+E7".parse().unwrap();
        assert_eq!(t.to_string(), "A1+E7");
        assert!("D3".parse::<AdeType>().is_err());
        assert!("E9".parse::<AdeType>().is_err());
    }

    #[test]
    fn count_of_small_types_is_157() {
        assert_eq!(count_types_up_to_rank_9(), 157);
    }

    #[test]
    fn classify_components() {
        // single root
        let g = standard_gram(&"A1".parse().unwrap());
        assert_eq!(ade_type_of(&g).unwrap().to_string(), "A1");
        // chain of 9
        let g = standard_gram(&"A9".parse().unwrap());
        assert_eq!(ade_type_of(&g).unwrap().to_string(), "A9");
        // standard grams round-trip for a spread of types
        for s in ["D4", "D5", "E6", "E7", "E8", "2A1+A3", "A2+D6", "4A1", "A1+2A2+D4"] {
            let t: AdeType = s.parse().unwrap();
            assert_eq!(ade_type_of(&standard_gram(&t)).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn rejects_non_ade() {
        // affine A2: triangle
        let g = Mat::from_rows(vec![vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]]);
        assert!(ade_type_of(&g).is_err());
        // star with four legs
        let mut m = Mat::zero(5, 5);
        for i in 0..5 {
            m.set_i64(i, i, -2);
        }
        for leg in 1..5 {
            m.set_i64(0, leg, 1);
            m.set_i64(leg, 0, 1);
        }
        assert!(ade_type_of(&m).is_err());
    }

    #[test]
    fn short_vector_counts() {
        assert_eq!(short_vectors(&lat("A1"), -2).unwrap().len(), 2);
        assert_eq!(short_vectors(&lat("A2"), -2).unwrap().len(), 6);
        assert_eq!(short_vectors(&lat("D4"), -2).unwrap().len(), 24);
        assert_eq!(short_vectors(&lat("E8"), -2).unwrap().len(), 240);
    }

    #[test]
    fn short_vectors_match_brute_force_on_a2() {
        let l = lat("A2");
        let fast = short_vectors(&l, -2).unwrap();
        let mut brute = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                let v = vec![a, b];
                if l.norm(&v).unwrap() == BigInt::from(-2) {
                    brute.push(v);
                }
            }
        }
        brute.sort();
        assert_eq!(fast, brute);
    }

    #[test]
    fn connecting_word_a1_a2() {
        let rs = RootSystem::new(lat("A1")).unwrap();
        let c = rs.lattice.weyl_vector_int();
        let neg: Vec<i64> = c.iter().map(|&x| -x).collect();
        assert_eq!(rs.connecting_word(&c, &c).unwrap().len(), 0);
        assert_eq!(rs.connecting_word(&c, &neg).unwrap().len(), 1);

        let rs = RootSystem::new(lat("A2")).unwrap();
        let c = rs.lattice.weyl_vector_int();
        let neg: Vec<i64> = c.iter().map(|&x| -x).collect();
        let w = rs.connecting_word(&c, &neg).unwrap();
        assert_eq!(w.len(), 3); // longest element of W(A2)
        let m = rs.word_matrix(&w);
        assert!(m.mul(&m).is_identity());
    }

    #[test]
    fn longest_element_lengths() {
        for (t, len) in [("A1", 1usize), ("A2", 3), ("A3", 6), ("D4", 12)] {
            let rs = RootSystem::new(lat(t)).unwrap();
            assert_eq!(rs.longest_element().unwrap().len(), len, "{t}");
        }
    }

    #[test]
    fn kappa_identity_and_flip() {
        let rs = RootSystem::new(lat("A2")).unwrap();
        assert_eq!(rs.kappa(&Mat::identity(2)).unwrap(), vec![0, 1]);
        // -1 = longest element composed with the diagram flip
        let neg = Mat::identity(2).neg();
        assert_eq!(rs.kappa(&neg).unwrap(), vec![1, 0]);
        // kappa of a reflection in a basis root is trivial
        let s = rs.lattice.reflection(&[1, 0]).unwrap();
        assert_eq!(rs.kappa(&s).unwrap(), vec![0, 1]);
    }

    #[test]
    fn kappa_is_a_homomorphism_on_samples() {
        let rs = RootSystem::new(lat("A2")).unwrap();
        let neg = Mat::identity(2).neg();
        let s = rs.lattice.reflection(&[1, 0]).unwrap();
        for g in [&neg, &s] {
            for h in [&neg, &s] {
                let gh = g.mul(h);
                let pg = rs.kappa(g).unwrap();
                let ph = rs.kappa(h).unwrap();
                let pgh = rs.kappa(&gh).unwrap();
                let composed: Vec<usize> = (0..2).map(|i| ph[pg[i]]).collect();
                assert_eq!(pgh, composed);
            }
        }
    }

    #[test]
    fn ade_basis_from_generic_form() {
        for t in ["A1", "A2", "A3", "A4", "D4", "D5", "E6"] {
            let rs = RootSystem::new(lat(t)).unwrap();
            let ell = generic_linear_form(&rs);
            let basis = ade_basis_from_linear_form(&rs, &ell).unwrap();
            assert_eq!(basis.len(), rs.rank(), "{t}");
            // basis spans the lattice
            let b = Mat::from_rows(basis.clone());
            let (_, d, _) = exact::smith_normal_form(&b);
            for i in 0..rs.rank() {
                assert_eq!(d.entry_i64(i, i), Some(1), "{t}");
            }
            // and is an ADE configuration of the right type
            let sub = crate::lattice::Sublattice::new(b).unwrap();
            let pair = sub.gram_in(&rs.lattice);
            assert_eq!(ade_type_of(&pair).unwrap(), t.parse().unwrap(), "{t}");
        }
    }

    #[test]
    fn aut_orders() {
        let (g, order) = aut_generators(&"A1".parse().unwrap());
        assert!(g.is_empty());
        assert_eq!(order, BigInt::from(1));
        let (_, order) = aut_generators(&"8A1".parse().unwrap());
        assert_eq!(order, BigInt::from(40320));
        let (_, order) = aut_generators(&"A3".parse().unwrap());
        assert_eq!(order, BigInt::from(2));
        let (_, order) = aut_generators(&"D4".parse().unwrap());
        assert_eq!(order, BigInt::from(6));
        let (_, order) = aut_generators(&"2A2+D4".parse().unwrap());
        assert_eq!(order, BigInt::from(2 * 2 * 2 * 6));
        // generators really preserve the standard gram
        for t in ["2A1+2A3", "D4", "E6", "3A2"] {
            let t: AdeType = t.parse().unwrap();
            let g = standard_gram(&t);
            let (gens, _) = aut_generators(&t);
            for p in gens {
                for i in 0..t.rank() {
                    for j in 0..t.rank() {
                        assert_eq!(g.entry(i, j), g.entry(p[i], p[j]));
                    }
                }
            }
        }
    }
}
