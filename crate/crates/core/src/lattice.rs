//! Lattices as integer Gram matrices, with the basic vocabulary: inner
//! products, duals, signatures, sublattices, saturation, orthogonal
//! complements, rescaling and direct sums.
//!
//! A lattice here is always a free Z-module with a fixed basis; vectors are
//! coordinate rows in that basis and isometries act on rows from the right.

use crate::error::{Error, Result};
use crate::exact;
use crate::matrix::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Non-degenerate symmetric bilinear form on Z^rank.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lattice {
    gram: Mat,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    rank: usize,
    gram: Mat,
}

impl Serialize for Lattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeJson { rank: self.rank(), gram: self.gram.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Lattice, D::Error> {
        let j = LatticeJson::deserialize(d)?;
        if j.gram.rows() != j.rank {
            return Err(serde::de::Error::custom("rank does not match gram size"));
        }
        Lattice::new(j.gram).map_err(serde::de::Error::custom)
    }
}

impl Lattice {
    pub fn new(gram: Mat) -> Result<Lattice> {
        if !gram.is_symmetric() {
            return Err(Error::Invalid("gram matrix is not symmetric".into()));
        }
        if exact::det(&gram).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(Lattice { gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn det(&self) -> BigInt {
        exact::det(&self.gram)
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| (self.gram.entry(i, i) % BigInt::from(2)).is_zero())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == BigInt::from(1)
    }

    /// `v * gram * w^T` for integer coordinate rows.
    pub fn inner(&self, v: &[i64], w: &[i64]) -> Result<BigInt> {
        let n = self.rank();
        if v.len() != n || w.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vectors of length {}/{} in rank-{} lattice",
                v.len(),
                w.len(),
                n
            )));
        }
        let mut acc = BigInt::zero();
        for i in 0..n {
            if v[i] == 0 {
                continue;
            }
            for j in 0..n {
                if w[j] != 0 {
                    acc += self.gram.entry(i, j) * v[i] * w[j];
                }
            }
        }
        Ok(acc)
    }

    /// Rational inner product, for dual vectors.
    pub fn inner_rat(&self, v: &[BigRational], w: &[BigRational]) -> Result<BigRational> {
        let n = self.rank();
        if v.len() != n || w.len() != n {
            return Err(Error::DimensionMismatch("rational vector length".into()));
        }
        let mut acc = BigRational::zero();
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if !w[j].is_zero() {
                    acc += &v[i] * &w[j] * BigRational::from_integer(self.gram.entry(i, j));
                }
            }
        }
        Ok(acc)
    }

    pub fn norm(&self, v: &[i64]) -> Result<BigInt> {
        self.inner(v, v)
    }

    /// Exact signature `(s_plus, s_minus)` by symmetric congruence
    /// diagonalization with pivoting; no floating point.
    pub fn signature(&self) -> (usize, usize) {
        let n = self.rank();
        let mut a: Vec<Vec<BigRational>> = self
            .gram
            .to_big_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        let mut plus = 0;
        let mut minus = 0;
        let mut k = 0;
        while k < n {
            if a[k][k].is_zero() {
                // prefer a later nonzero diagonal entry
                if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                    a.swap(k, i);
                    for row in a.iter_mut() {
                        row.swap(k, i);
                    }
                } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                    // congruence: add row/col j into k, making a_kk = 2 a_kj != 0
                    for idx in 0..n {
                        let x = a[j][idx].clone();
                        a[k][idx] += x;
                    }
                    for row in a.iter_mut() {
                        let x = row[j].clone();
                        row[k] += x;
                    }
                } else {
                    // zero row: degenerate (excluded by construction)
                    unreachable!("degenerate form in signature");
                }
                continue;
            }
            let piv = a[k][k].clone();
            if piv.is_positive() {
                plus += 1;
            } else {
                minus += 1;
            }
            for i in k + 1..n {
                if !a[i][k].is_zero() {
                    let f = &a[i][k] / &piv;
                    for j in k..n {
                        let x = &f * &a[k][j];
                        a[i][j] -= x;
                    }
                }
            }
            for j in k + 1..n {
                a[k][j] = BigRational::zero();
                a[j][k] = BigRational::zero();
            }
            k += 1;
        }
        (plus, minus)
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature() == (0, self.rank())
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.signature() == (1, self.rank() - 1)
    }

    /// Rows of `gram^-1`: the dual basis, with `<r_i, r_j^v> = delta_ij`.
    pub fn dual_basis(&self) -> Vec<Vec<BigRational>> {
        let (adj, den) = exact::inverse(&self.gram).expect("non-degenerate by construction");
        let den = BigRational::from_integer(den);
        (0..self.rank())
            .map(|i| {
                (0..self.rank())
                    .map(|j| BigRational::from_integer(adj.entry(i, j)) / den.clone())
                    .collect()
            })
            .collect()
    }

    /// Sum of the dual basis vectors (the Weyl vector of a simple-root basis).
    pub fn weyl_vector(&self) -> Vec<BigRational> {
        let dual = self.dual_basis();
        let n = self.rank();
        (0..n).map(|j| dual.iter().map(|r| r[j].clone()).sum()).collect()
    }

    /// Same Weyl vector scaled to primitive integer coordinates.
    pub fn weyl_vector_int(&self) -> Vec<i64> {
        scale_to_int(&self.weyl_vector())
    }

    pub fn rescale(&self, k: i64) -> Lattice {
        assert!(k > 0, "rescale factor must be positive");
        Lattice { gram: self.gram.scale(k) }
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice { gram: Mat::block_diag(&self.gram, &other.gram) }
    }

    /// `g * gram * g^T == gram`.
    pub fn is_isometry(&self, g: &Mat) -> bool {
        g.is_square()
            && g.rows() == self.rank()
            && g.mul(&self.gram).mul(&g.transpose()) == self.gram
    }

    /// Reflection in a root (`<r,r> = -2`): `x -> x + <x,r> r`.
    pub fn reflection(&self, r: &[i64]) -> Result<Mat> {
        if self.norm(r)? != BigInt::from(-2) {
            return Err(Error::Invalid("reflection vector is not a root".into()));
        }
        let n = self.rank();
        let mut m = Mat::identity(n);
        // row j of the reflection matrix: e_j + <e_j, r> r
        for j in 0..n {
            let mut coef = BigInt::zero();
            for i in 0..n {
                if r[i] != 0 {
                    coef += self.gram.entry(j, i) * r[i];
                }
            }
            for k in 0..n {
                if r[k] != 0 {
                    let v = m.entry(j, k) + &coef * r[k];
                    m.set_big(j, k, v);
                }
            }
        }
        debug_assert!(self.is_isometry(&m));
        Ok(m)
    }
}

/// Clear denominators and divide by the content, keeping orientation.
pub fn scale_to_int(v: &[BigRational]) -> Vec<i64> {
    let mut lcm = BigInt::from(1);
    for x in v {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = num_integer::gcd(g, x.clone());
    }
    if g.is_zero() {
        g = BigInt::from(1);
    }
    ints.iter()
        .map(|x| {
            use num_traits::ToPrimitive;
            (x / &g).to_i64().expect("scaled vector exceeds i64")
        })
        .collect()
}

/// Sublattice of an ambient lattice, spanned by independent coordinate rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    basis: Mat,
}

/// Orthogonal complement together with an explicit degeneracy verdict for
/// the induced form (the boundary case of a complement touching the cone).
pub struct Complement {
    pub sublattice: Sublattice,
    pub degenerate: bool,
}

impl Sublattice {
    pub fn new(basis: Mat) -> Result<Sublattice> {
        let k = basis.rows();
        if k > 0 {
            let (_, d, _) = exact::smith_normal_form(&basis);
            let rank = (0..k.min(basis.cols())).filter(|&i| !d.entry(i, i).is_zero()).count();
            if rank != k {
                return Err(Error::Invalid("sublattice basis rows are dependent".into()));
            }
        }
        Ok(Sublattice { basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    /// Induced Gram matrix `basis * gram * basis^T`.
    pub fn gram_in(&self, ambient: &Lattice) -> Mat {
        self.basis.mul(ambient.gram()).mul(&self.basis.transpose())
    }

    /// Saturation of the row span inside the ambient lattice: the smallest
    /// primitive sublattice containing this one.
    pub fn primitive_closure(&self) -> Sublattice {
        if self.basis.rows() == 0 {
            return self.clone();
        }
        let (_, d, v) = exact::smith_normal_form(&self.basis);
        let vinv = exact::inverse_unimodular(&v);
        let k = (0..self.rank()).filter(|&i| !d.entry(i, i).is_zero()).count();
        debug_assert_eq!(k, self.rank());
        // B = U^-1 (D V^-1), so the row span of B over Z equals that of
        // D V^-1; dividing row i by its content d_i yields row i of the
        // unimodular V^-1, which is a saturated set.
        let dv = d.mul(&vinv);
        let mut out: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..k {
            let row = dv.row_big(i);
            let mut g = BigInt::zero();
            for x in &row {
                g = num_integer::gcd(g, x.clone());
            }
            out.push(row.into_iter().map(|x| x / &g).collect());
        }
        Sublattice { basis: exact::row_basis(&Mat::from_big_rows(out)) }
    }

    pub fn is_primitive(&self) -> bool {
        self.index_in_closure() == BigInt::from(1)
    }

    /// Index of this sublattice inside its primitive closure.
    pub fn index_in_closure(&self) -> BigInt {
        if self.basis.rows() == 0 {
            return BigInt::from(1);
        }
        let (_, d, _) = exact::smith_normal_form(&self.basis);
        let mut idx = BigInt::from(1);
        for i in 0..self.rank() {
            idx *= d.entry(i, i);
        }
        idx.abs()
    }

    /// All ambient vectors orthogonal to this sublattice (always primitive).
    pub fn orthogonal_complement(&self, ambient: &Lattice) -> Complement {
        let pair = ambient.gram().mul(&self.basis.transpose());
        let ker = exact::left_kernel(&pair);
        let sub = Sublattice { basis: ker };
        let degenerate = if sub.rank() == 0 {
            false
        } else {
            exact::det(&sub.gram_in(ambient)).is_zero()
        };
        Complement { sublattice: sub, degenerate }
    }

    /// Does the integer row span contain `v`?
    pub fn contains(&self, v: &[BigInt]) -> bool {
        exact::solve_row_integral(&self.basis, v).is_some()
    }

    pub fn contains_rat(&self, v: &[BigRational]) -> bool {
        exact::solve_row(&self.basis, v).map_or(false, |x| x.iter().all(|c| c.is_integer()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> Lattice {
        Lattice::new(Mat::from_rows(vec![vec![-2]])).unwrap()
    }

    fn a2() -> Lattice {
        Lattice::new(Mat::from_rows(vec![vec![-2, 1], vec![1, -2]])).unwrap()
    }

    #[test]
    fn inner_products() {
        let l = a2();
        assert_eq!(l.inner(&[1, 0], &[0, 1]).unwrap(), BigInt::from(1));
        assert_eq!(l.inner(&[0, 0], &[5, -3]).unwrap(), BigInt::from(0));
        assert!(l.inner(&[1], &[0, 1]).is_err());
    }

    #[test]
    fn signatures() {
        assert_eq!(a1().signature(), (0, 1));
        assert_eq!(a2().signature(), (0, 2));
        let u = Lattice::new(Mat::from_rows(vec![vec![0, 1], vec![1, 0]])).unwrap();
        assert_eq!(u.signature(), (1, 1));
        // block sums add signatures
        let s = u.direct_sum(&a2()).direct_sum(&a1());
        assert_eq!(s.signature(), (1, 4));
    }

    #[test]
    fn dual_basis_examples() {
        let l = a1();
        let d = l.dual_basis();
        assert_eq!(d[0][0], BigRational::new(BigInt::from(-1), BigInt::from(2)));

        let l = a2();
        let d = l.dual_basis();
        for (i, di) in d.iter().enumerate() {
            for j in 0..2 {
                let ej: Vec<BigRational> = (0..2)
                    .map(|k| BigRational::from_integer(BigInt::from(i64::from(k == j))))
                    .collect();
                let p = l.inner_rat(di, &ej).unwrap();
                assert_eq!(p, BigRational::from_integer(BigInt::from(i64::from(i == j))));
            }
            // dual vectors of A2 have norm -2/3
            assert_eq!(
                l.inner_rat(di, di).unwrap(),
                BigRational::new(BigInt::from(-2), BigInt::from(3))
            );
        }
    }

    #[test]
    fn rescale_and_sum() {
        assert_eq!(a1().rescale(2).gram(), &Mat::from_rows(vec![vec![-4]]));
        let s = a1().direct_sum(&a1());
        assert_eq!(s.gram(), &Mat::from_rows(vec![vec![-2, 0], vec![0, -2]]));
    }

    #[test]
    fn saturation() {
        // span of 2*e1 inside Z^2 saturates to e1
        let s = Sublattice::new(Mat::from_rows(vec![vec![2, 0]])).unwrap();
        let c = s.primitive_closure();
        assert_eq!(c.basis(), &Mat::from_rows(vec![vec![1, 0]]));
        assert_eq!(s.index_in_closure(), BigInt::from(2));
        // idempotent
        assert_eq!(c.primitive_closure().basis(), c.basis());
        assert!(c.is_primitive());
    }

    #[test]
    fn complement_and_double_complement() {
        let l = a2().direct_sum(&a1());
        let s = Sublattice::new(Mat::from_rows(vec![vec![1, 0, 0], vec![0, 1, 0]])).unwrap();
        let c = s.orthogonal_complement(&l);
        assert!(!c.degenerate);
        assert_eq!(c.sublattice.rank(), 1);
        let back = c.sublattice.orthogonal_complement(&l);
        // complement of complement = primitive closure (here s itself)
        assert_eq!(back.sublattice.basis(), s.primitive_closure().basis());

        // zero sublattice: complement is everything
        let z = Sublattice::new(Mat::zero(0, 3)).unwrap();
        assert_eq!(z.orthogonal_complement(&l).sublattice.rank(), 3);
    }

    #[test]
    fn reflection_involution() {
        let l = a2();
        let r = vec![1i64, 0];
        let s = l.reflection(&r).unwrap();
        assert!(s.mul(&s).is_identity());
        assert!(l.is_isometry(&s));
        // fixes the orthogonal line pointwise: <x, r> = 0 => x^s = x
        let x = vec![1i64, 2]; // <(1,2),(1,0)> = -2+2 = 0
        assert_eq!(l.inner(&x, &r).unwrap(), BigInt::from(0));
        assert_eq!(s.apply_row_i64(&x).unwrap(), x);
    }

    #[test]
    fn lattice_json_round_trip() {
        let l = a2();
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"rank":2,"gram":[[-2,1],[1,-2]]}"#);
        let back: Lattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
    }
}
