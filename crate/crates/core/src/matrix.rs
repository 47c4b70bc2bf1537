//! Dense integer matrices with machine-word fast path.
//!
//! All row vectors act on the right: `x^g = x * M_g`. Entries live in `i64`
//! until an operation overflows, at which point the whole matrix is widened
//! to `BigInt`. Matrices are kept normalized (narrowed back to `i64` whenever
//! every entry fits), so derived equality and hashing are sound.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Data {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

/// Dense `rows x cols` integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Data,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: Data::Small(rows.into_iter().flatten().collect()) }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        let mut m = Mat { rows: r, cols: c, data: Data::Big(rows.into_iter().flatten().collect()) };
        m.normalize();
        m
    }

    pub fn zero(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: Data::Small(vec![0; rows * cols]) }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set_i64(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Narrow `Big` storage back to `i64` when every entry fits.
    fn normalize(&mut self) {
        if let Data::Big(d) = &self.data {
            if d.iter().all(|x| x.to_i64().is_some()) {
                let small = d.iter().map(|x| x.to_i64().unwrap()).collect();
                self.data = Data::Small(small);
            }
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self.data, Data::Small(_))
    }

    pub fn entry(&self, i: usize, j: usize) -> BigInt {
        match &self.data {
            Data::Small(d) => BigInt::from(d[i * self.cols + j]),
            Data::Big(d) => d[i * self.cols + j].clone(),
        }
    }

    pub fn entry_i64(&self, i: usize, j: usize) -> Option<i64> {
        match &self.data {
            Data::Small(d) => Some(d[i * self.cols + j]),
            Data::Big(d) => d[i * self.cols + j].to_i64(),
        }
    }

    pub fn set_i64(&mut self, i: usize, j: usize, v: i64) {
        let c = self.cols;
        match &mut self.data {
            Data::Small(d) => d[i * c + j] = v,
            Data::Big(d) => d[i * c + j] = BigInt::from(v),
        }
    }

    pub fn set_big(&mut self, i: usize, j: usize, v: BigInt) {
        self.widen();
        let c = self.cols;
        if let Data::Big(d) = &mut self.data {
            d[i * c + j] = v;
        }
        self.normalize();
    }

    fn widen(&mut self) {
        if let Data::Small(d) = &self.data {
            self.data = Data::Big(d.iter().map(|&x| BigInt::from(x)).collect());
        }
    }

    /// Borrow the underlying `i64` slice, if the matrix is in the small
    /// representation.
    pub fn as_small(&self) -> Option<&[i64]> {
        match &self.data {
            Data::Small(d) => Some(d),
            Data::Big(_) => None,
        }
    }

    pub fn row_i64(&self, i: usize) -> Option<Vec<i64>> {
        (0..self.cols).map(|j| self.entry_i64(i, j)).collect()
    }

    pub fn row_big(&self, i: usize) -> Vec<BigInt> {
        (0..self.cols).map(|j| self.entry(i, j)).collect()
    }

    pub fn to_big_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_big(i)).collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row_i64(i)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.cols, self.rows);
        match &self.data {
            Data::Small(d) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        out.set_i64(j, i, d[i * self.cols + j]);
                    }
                }
            }
            Data::Big(d) => {
                out.widen();
                if let Data::Big(o) = &mut out.data {
                    for i in 0..self.rows {
                        for j in 0..self.cols {
                            o[j * self.rows + i] = d[i * self.cols + j].clone();
                        }
                    }
                }
                out.normalize();
            }
        }
        out
    }

    pub fn neg(&self) -> Mat {
        let mut out = self.clone();
        match &mut out.data {
            Data::Small(d) => {
                if d.iter().all(|&x| x != i64::MIN) {
                    for x in d.iter_mut() {
                        *x = -*x;
                    }
                } else {
                    out.widen();
                    return out.neg();
                }
            }
            Data::Big(d) => {
                for x in d.iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        out
    }

    fn mul_small(a: &[i64], b: &[i64], n: usize, k: usize, m: usize) -> Option<Vec<i64>> {
        let mut out = vec![0i64; n * m];
        for i in 0..n {
            for l in 0..k {
                let alv = a[i * k + l];
                if alv == 0 {
                    continue;
                }
                for j in 0..m {
                    let p = alv.checked_mul(b[l * m + j])?;
                    out[i * m + j] = out[i * m + j].checked_add(p)?;
                }
            }
        }
        Some(out)
    }

    fn mul_big(a: &Mat, b: &Mat) -> Mat {
        let (n, k, m) = (a.rows, a.cols, b.cols);
        let mut out = vec![BigInt::zero(); n * m];
        for i in 0..n {
            for l in 0..k {
                let alv = a.entry(i, l);
                if alv.is_zero() {
                    continue;
                }
                for j in 0..m {
                    out[i * m + j] += &alv * b.entry(l, j);
                }
            }
        }
        let mut r = Mat { rows: n, cols: m, data: Data::Big(out) };
        r.normalize();
        r
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        if let (Data::Small(a), Data::Small(b)) = (&self.data, &rhs.data) {
            if let Some(out) = Self::mul_small(a, b, self.rows, self.cols, rhs.cols) {
                return Mat { rows: self.rows, cols: rhs.cols, data: Data::Small(out) };
            }
        }
        Self::mul_big(self, rhs)
    }

    /// `v * M` for an integer row vector `v`.
    pub fn apply_row(&self, v: &[i64]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for j in 0..self.cols {
                out[j] += self.entry(i, j) * vi;
            }
        }
        out
    }

    /// `v * M` staying in `i64`; `None` on overflow or wide entries.
    pub fn apply_row_i64(&self, v: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(v.len(), self.rows);
        let d = self.as_small()?;
        let mut out = vec![0i64; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for j in 0..self.cols {
                out[j] = out[j].checked_add(vi.checked_mul(d[i * self.cols + j])?)?;
            }
        }
        Some(out)
    }

    pub fn is_identity(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = i64::from(i == j);
                match self.entry_i64(i, j) {
                    Some(v) if v == want => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Submatrix given by row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut out = Mat::zero(rows.len(), cols.len());
        out.widen();
        if let Data::Big(o) = &mut out.data {
            for (i, &ri) in rows.iter().enumerate() {
                for (j, &cj) in cols.iter().enumerate() {
                    o[i * cols.len() + j] = self.entry(ri, cj);
                }
            }
        }
        out.normalize();
        out
    }

    pub fn vstack(top: &Mat, bottom: &Mat) -> Mat {
        assert_eq!(top.cols, bottom.cols);
        let mut rows = top.to_big_rows();
        rows.extend(bottom.to_big_rows());
        Mat::from_big_rows(rows)
    }

    pub fn block_diag(a: &Mat, b: &Mat) -> Mat {
        let mut out = Mat::zero(a.rows + b.rows, a.cols + b.cols);
        out.widen();
        if let Data::Big(o) = &mut out.data {
            let cols = a.cols + b.cols;
            for i in 0..a.rows {
                for j in 0..a.cols {
                    o[i * cols + j] = a.entry(i, j);
                }
            }
            for i in 0..b.rows {
                for j in 0..b.cols {
                    o[(a.rows + i) * cols + a.cols + j] = b.entry(i, j);
                }
            }
        }
        out.normalize();
        out
    }

    pub fn scale(&self, k: i64) -> Mat {
        let mut out = self.clone();
        match &mut out.data {
            Data::Small(d) => {
                if d.iter().all(|x| x.checked_mul(k).is_some()) {
                    for x in d.iter_mut() {
                        *x *= k;
                    }
                } else {
                    out.widen();
                    return out.scale(k);
                }
            }
            Data::Big(d) => {
                for x in d.iter_mut() {
                    *x = &*x * k;
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    pub fn max_abs(&self) -> BigInt {
        let mut best = BigInt::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.entry(i, j).abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<serde_json::Number>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        serde_json::Number::from_string_unchecked(self.entry(i, j).to_string())
                    })
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Mat, D::Error> {
        let rows: Vec<Vec<serde_json::Number>> = Vec::deserialize(deserializer)?;
        let big: Result<Vec<Vec<BigInt>>, D::Error> = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|n| {
                        n.to_string()
                            .parse::<BigInt>()
                            .map_err(|_| D::Error::custom("matrix entry is not an integer"))
                    })
                    .collect()
            })
            .collect();
        Ok(Mat::from_big_rows(big?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_product() {
        let a = Mat::from_rows(vec![vec![1, 2], vec![3, 4]]);
        let b = Mat::from_rows(vec![vec![0, 1], vec![1, 0]]);
        let c = a.mul(&b);
        assert_eq!(c, Mat::from_rows(vec![vec![2, 1], vec![4, 3]]));
        assert!(c.is_small());
    }

    #[test]
    fn overflow_escalates_and_narrows() {
        let big = 1i64 << 62;
        let a = Mat::from_rows(vec![vec![big, 0], vec![0, big]]);
        let sq = a.mul(&a);
        assert!(!sq.is_small());
        assert_eq!(sq.entry(0, 0), BigInt::from(big) * BigInt::from(big));
        // multiplying by zero narrows back down
        let z = sq.mul(&Mat::zero(2, 2));
        assert!(z.is_small());
        assert_eq!(z, Mat::zero(2, 2));
    }

    #[test]
    fn serde_round_trip() {
        let big = 1i64 << 62;
        let a = Mat::from_rows(vec![vec![big, -3], vec![7, 0]]);
        let sq = a.mul(&a);
        let s = serde_json::to_string(&sq).unwrap();
        let back: Mat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sq);
    }
}
