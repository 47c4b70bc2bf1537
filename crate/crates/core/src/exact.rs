//! Exact integer and rational linear algebra on top of [`Mat`].
//!
//! Everything here runs in `BigInt` / `BigRational`; these routines sit on
//! the cold paths (discriminant groups, saturations, overlattice bases)
//! where intermediate entry growth must never corrupt a result.

use crate::matrix::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Smith normal form: returns `(u, d, v)` with `u * m * v = d`, `u`, `v`
/// unimodular and `d` diagonal with each entry dividing the next.
///
/// Alternates row and column Hermite passes (with full reduction of the
/// already-processed entries, which keeps coefficient growth polynomial)
/// until the matrix is diagonal, then repairs the divisor chain with
/// bounded 2x2 transforms.
pub fn smith_normal_form(m: &Mat) -> (Mat, Mat, Mat) {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.to_big_rows();
    let mut u = Mat::identity(rows).to_big_rows();
    let mut v = Mat::identity(cols).to_big_rows();

    loop {
        while !is_diagonal(&a) {
            hermite_rows(&mut a, &mut u);
            if is_diagonal(&a) {
                break;
            }
            hermite_cols(&mut a, &mut v);
        }
        // move zero diagonal entries to the end
        let n = rows.min(cols);
        let mut nonzero: Vec<usize> = (0..n).filter(|&i| !a[i][i].is_zero()).collect();
        nonzero.extend((0..n).filter(|&i| a[i][i].is_zero()));
        for (tgt, &src) in nonzero.iter().enumerate() {
            if src != tgt && !a[src][src].is_zero() {
                // bubble the nonzero entry forward
                a.swap(src, tgt);
                u.swap(src, tgt);
                swap_cols(&mut a, src, tgt);
                swap_cols(&mut v, src, tgt);
            }
        }
        // repair divisibility: fold the first offender into its
        // predecessor's column and rediagonalize
        let mut dirty = false;
        'scan: for i in 0..n {
            if a[i][i].is_zero() {
                break;
            }
            for j in i + 1..n {
                if !a[j][j].is_zero() && !(&a[j][j] % &a[i][i]).is_zero() {
                    // col_i += col_j introduces a[j][i] = d_j under d_i
                    for r in 0..rows {
                        let x = a[r][j].clone();
                        a[r][i] += x;
                    }
                    for r in 0..cols {
                        let x = v[r][j].clone();
                        v[r][i] += x;
                    }
                    dirty = true;
                    break 'scan;
                }
            }
        }
        if !dirty {
            break;
        }
    }
    // normalize signs
    let n = rows.min(cols);
    for i in 0..n {
        if a[i][i].is_negative() {
            for k in 0..cols {
                a[i][k] = -a[i][k].clone();
            }
            for k in 0..rows {
                u[i][k] = -u[i][k].clone();
            }
        }
    }
    (Mat::from_big_rows(u), Mat::from_big_rows(a), Mat::from_big_rows(v))
}

fn is_diagonal(a: &[Vec<BigInt>]) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, x)| i == j || x.is_zero()))
}

/// One full row-Hermite pass: row operations only; pivots are cleared
/// below by Euclid and all entries above each pivot are reduced modulo
/// it, which caps entry growth.
fn hermite_rows(a: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pr = 0;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in pr..rows {
                if !a[i][col].is_zero()
                    && best.map_or(true, |b| a[i][col].abs() < a[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(pr, b);
            u.swap(pr, b);
            let mut done = true;
            for i in pr + 1..rows {
                if !a[i][col].is_zero() {
                    let q = div_round(&a[i][col], &a[pr][col]);
                    if !q.is_zero() {
                        row_sub(a, i, pr, &q);
                        row_sub(u, i, pr, &q);
                    }
                    if !a[i][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pr < rows && !a[pr][col].is_zero() {
            if a[pr][col].is_negative() {
                for k in 0..cols {
                    a[pr][k] = -a[pr][k].clone();
                }
                for k in 0..u[pr].len() {
                    u[pr][k] = -u[pr][k].clone();
                }
            }
            for i in 0..pr {
                let q = num_integer::Integer::div_floor(&a[i][col], &a[pr][col]);
                if !q.is_zero() {
                    row_sub(a, i, pr, &q);
                    row_sub(u, i, pr, &q);
                }
            }
            pr += 1;
        }
    }
}

/// Column dual of `hermite_rows`.
fn hermite_cols(a: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pc = 0;
    for row in 0..rows {
        if pc == cols {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in pc..cols {
                if !a[row][j].is_zero()
                    && best.map_or(true, |b| a[row][j].abs() < a[row][b].abs())
                {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            swap_cols(a, pc, b);
            swap_cols(v, pc, b);
            let mut done = true;
            for j in pc + 1..cols {
                if !a[row][j].is_zero() {
                    let q = div_round(&a[row][j], &a[row][pc]);
                    if !q.is_zero() {
                        col_sub(a, j, pc, &q);
                        col_sub(v, j, pc, &q);
                    }
                    if !a[row][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pc < cols && !a[row][pc].is_zero() {
            if a[row][pc].is_negative() {
                for r in a.iter_mut() {
                    r[pc] = -r[pc].clone();
                }
                for r in v.iter_mut() {
                    r[pc] = -r[pc].clone();
                }
            }
            for j in 0..pc {
                let q = num_integer::Integer::div_floor(&a[row][j], &a[row][pc]);
                if !q.is_zero() {
                    col_sub(a, j, pc, &q);
                    col_sub(v, j, pc, &q);
                }
            }
            pc += 1;
        }
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn row_sub(a: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt) {
    let (lo, hi) = if i < t { (i, t) } else { (t, i) };
    let (first, second) = a.split_at_mut(hi);
    let (ri, rt) = if i < t { (&mut first[lo], &second[0]) } else { (&mut second[0], &first[lo]) };
    for k in 0..ri.len() {
        ri[k] -= q * &rt[k];
    }
}

fn col_sub(a: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let x = q * &row[t];
        row[j] -= x;
    }
}

/// Nearest-integer quotient, so remainders shrink fast.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num_integer::Integer::div_mod_floor(a, b);
    if &two * &r >= b.abs() {
        q + BigInt::one()
    } else {
        q
    }
}

/// Row Hermite form of the row span; zero rows dropped. The result is a
/// canonical basis of the lattice generated by the rows of `m`.
pub fn row_basis(m: &Mat) -> Mat {
    let mut a = m.to_big_rows();
    let rows = a.len();
    let cols = m.cols();
    let mut pivot_row = 0;
    for col in 0..cols {
        // gcd-eliminate below pivot_row in this column
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows {
                if !a[i][col].is_zero()
                    && best.map_or(true, |b| a[i][col].abs() < a[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..rows {
                if !a[i][col].is_zero() {
                    let q = div_round(&a[i][col], &a[pivot_row][col]);
                    row_sub(&mut a, i, pivot_row, &q);
                    if !a[i][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < rows && !a[pivot_row][col].is_zero() {
            if a[pivot_row][col].is_negative() {
                for k in 0..cols {
                    a[pivot_row][k] = -a[pivot_row][k].clone();
                }
            }
            // reduce the rows above
            for i in 0..pivot_row {
                let q = num_integer::Integer::div_floor(&a[i][col], &a[pivot_row][col]);
                if !q.is_zero() {
                    row_sub(&mut a, i, pivot_row, &q);
                }
            }
            pivot_row += 1;
        }
    }
    a.truncate(pivot_row);
    if a.is_empty() {
        Mat::zero(0, cols)
    } else {
        Mat::from_big_rows(a)
    }
}

/// Basis of `{ x : x * m = 0 }` (integer left kernel), in Hermite form.
pub fn left_kernel(m: &Mat) -> Mat {
    // Run row reduction on [m | I]; rows whose m-part vanishes give the kernel.
    let rows = m.rows();
    let aug = Mat::vstack(&m.transpose(), &Mat::identity(rows)).transpose();
    // aug is rows x (cols + rows): [m | I]
    let reduced = row_echelon_int(&aug, m.cols());
    let mut ker = Vec::new();
    for row in reduced {
        if row[..m.cols()].iter().all(|x| x.is_zero()) {
            ker.push(row[m.cols()..].to_vec());
        }
    }
    if ker.is_empty() {
        Mat::zero(0, rows)
    } else {
        row_basis(&Mat::from_big_rows(ker))
    }
}

/// Integer row echelon pass over the first `lead_cols` columns, keeping all
/// rows (used with an identity block glued on the right).
fn row_echelon_int(m: &Mat, lead_cols: usize) -> Vec<Vec<BigInt>> {
    let mut a = m.to_big_rows();
    let rows = a.len();
    let mut pivot_row = 0;
    for col in 0..lead_cols {
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows {
                if !a[i][col].is_zero()
                    && best.map_or(true, |b| a[i][col].abs() < a[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..rows {
                if !a[i][col].is_zero() {
                    let q = div_round(&a[i][col], &a[pivot_row][col]);
                    row_sub(&mut a, i, pivot_row, &q);
                    if !a[i][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < rows && !a[pivot_row][col].is_zero() {
            pivot_row += 1;
        }
    }
    a
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(m: &Mat) -> BigInt {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_big_rows();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !a[i][k].is_zero());
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}

/// Exact inverse of a nonsingular square matrix, returned as `(adj, den)`
/// with `m^-1 = adj / den`.
pub fn inverse(m: &Mat) -> Option<(Mat, BigInt)> {
    assert!(m.is_square());
    let n = m.rows();
    let d = det(m);
    if d.is_zero() {
        return None;
    }
    // Gauss-Jordan over rationals, then clear denominators with det.
    let mut a: Vec<Vec<BigRational>> = m
        .to_big_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(BigInt::from(i64::from(i == j))))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= p.clone();
            inv[col][j] /= p.clone();
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..n {
                    let x = &f * &a[col][j];
                    a[i][j] -= x;
                    let y = &f * &inv[col][j];
                    inv[i][j] -= y;
                }
            }
        }
    }
    let rows: Vec<Vec<BigInt>> = inv
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let scaled = x * BigRational::from_integer(d.clone());
                    assert!(scaled.is_integer(), "inverse scaling failed");
                    scaled.to_integer()
                })
                .collect()
        })
        .collect();
    Some((Mat::from_big_rows(rows), d))
}

/// Inverse of a matrix with determinant ±1.
pub fn inverse_unimodular(m: &Mat) -> Mat {
    let (adj, d) = inverse(m).expect("matrix is singular");
    if d == BigInt::one() {
        adj
    } else {
        assert_eq!(d, -BigInt::one(), "matrix is not unimodular");
        adj.neg()
    }
}

/// Solve `x * a = b` over the rationals, if a solution exists.
pub fn solve_row(a: &Mat, b: &[BigRational]) -> Option<Vec<BigRational>> {
    // Transpose to the usual a^T x^T = b^T and run Gaussian elimination.
    let n = a.rows();
    let m = a.cols();
    assert_eq!(b.len(), m);
    let mut aug: Vec<Vec<BigRational>> = (0..m)
        .map(|j| {
            let mut row: Vec<BigRational> =
                (0..n).map(|i| BigRational::from_integer(a.entry(i, j))).collect();
            row.push(b[j].clone());
            row
        })
        .collect();
    let rows = m;
    let cols = n + 1;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut pr = 0;
    for pc in 0..n {
        let piv = (pr..rows).find(|&i| !aug[i][pc].is_zero());
        let Some(piv) = piv else { continue };
        aug.swap(pr, piv);
        let p = aug[pr][pc].clone();
        for j in 0..cols {
            aug[pr][j] /= p.clone();
        }
        for i in 0..rows {
            if i != pr && !aug[i][pc].is_zero() {
                let f = aug[i][pc].clone();
                for j in 0..cols {
                    let x = &f * &aug[pr][j];
                    aug[i][j] -= x;
                }
            }
        }
        pivots.push((pr, pc));
        pr += 1;
        if pr == rows {
            break;
        }
    }
    // consistency
    for i in pr..rows {
        if !aug[i][n].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for &(r, c) in &pivots {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

/// Solve `x * a = b` over the integers.
pub fn solve_row_integral(a: &Mat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let br: Vec<BigRational> = b.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let x = solve_row(a, &br)?;
    if x.iter().all(|v| v.is_integer()) {
        Some(x.iter().map(|v| v.to_integer()).collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &Mat) {
        let (u, d, v) = smith_normal_form(m);
        assert_eq!(u.mul(m).mul(&v), d);
        assert_eq!(det(&u).abs(), BigInt::one());
        assert_eq!(det(&v).abs(), BigInt::one());
        let k = m.rows().min(m.cols());
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    assert!(d.entry(i, j).is_zero());
                }
            }
        }
        for i in 0..k.saturating_sub(1) {
            let a = d.entry(i, i);
            let b = d.entry(i + 1, i + 1);
            if !a.is_zero() {
                assert!(b.is_zero() || (&b % &a).is_zero(), "divisibility chain broken");
            } else {
                assert!(b.is_zero());
            }
        }
    }

    #[test]
    fn snf_examples() {
        // already diagonal
        let m = Mat::from_rows(vec![vec![2, 0], vec![0, 2]]);
        let (_, d, _) = smith_normal_form(&m);
        assert_eq!(d, Mat::from_rows(vec![vec![2, 0], vec![0, 2]]));
        check_snf(&m);

        // [[2,1],[0,2]] -> diag(1,4), by hand row/column reduction
        let m = Mat::from_rows(vec![vec![2, 1], vec![0, 2]]);
        let (_, d, _) = smith_normal_form(&m);
        assert_eq!(d, Mat::from_rows(vec![vec![1, 0], vec![0, 4]]));

        // A2 Gram -> diag(1,3); |det| = 3
        let m = Mat::from_rows(vec![vec![-2, 1], vec![1, -2]]);
        let (_, d, _) = smith_normal_form(&m);
        assert_eq!(d, Mat::from_rows(vec![vec![1, 0], vec![0, 3]]));
        assert_eq!(det(&m), BigInt::from(3));
        check_snf(&m);
    }

    #[test]
    fn snf_random_battery() {
        // deterministic pseudo-random small matrices
        let mut state = 0x5EED5EEDu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 15) as i64 - 7
        };
        for rows in 1..5usize {
            for cols in 1..5usize {
                for _ in 0..8 {
                    let m = Mat::from_rows(
                        (0..rows).map(|_| (0..cols).map(|_| next()).collect()).collect(),
                    );
                    check_snf(&m);
                }
            }
        }
    }

    #[test]
    fn kernel_and_basis() {
        let m = Mat::from_rows(vec![vec![1, 2, 3], vec![2, 4, 6]]);
        let k = left_kernel(&m);
        assert_eq!(k.rows(), 1);
        let prod = k.mul(&m);
        assert!(prod.to_big_rows().iter().all(|r| r.iter().all(|x| x.is_zero())));

        let b = row_basis(&Mat::from_rows(vec![vec![2, 0], vec![3, 0]]));
        assert_eq!(b, Mat::from_rows(vec![vec![1, 0]]));
    }

    #[test]
    fn inverse_and_solve() {
        let m = Mat::from_rows(vec![vec![1, 2], vec![3, 5]]);
        let inv = inverse_unimodular(&m);
        assert!(m.mul(&inv).is_identity());

        let b = vec![BigRational::from_integer(BigInt::from(5)), BigRational::from_integer(BigInt::from(9))];
        let x = solve_row(&m, &b).unwrap();
        // x * m = b
        let got0 = &x[0] * BigRational::from_integer(m.entry(0, 0))
            + &x[1] * BigRational::from_integer(m.entry(1, 0));
        assert_eq!(got0, b[0]);
    }
}
