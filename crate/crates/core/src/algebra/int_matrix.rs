//! Dense integer matrices and Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Determinant by fraction-free elimination. Panics on non-square input.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        if n == 0 {
            return BigInt::one();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * f;
            self.data[dst * self.cols + j] += v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * f;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = -std::mem::take(&mut self.data[idx]);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `s = u * a * v` with `u`, `v` unimodular and `s` diagonal, `d1 | d2 | ...`, all `di >= 0`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with transforms. Pivots are chosen as the smallest nonzero
/// absolute value in the remaining block, ties broken by (row, column).
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            // Smallest pivot in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = s.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(s, u, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = s.get(i, t).div_floor(s.get(t, t));
                let f = -q;
                s.add_row(i, t, &f);
                u.add_row(i, t, &f);
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = s.get(t, j).div_floor(s.get(t, t));
                let f = -q;
                s.add_col(j, t, &f);
                v.add_col(j, t, &f);
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into row t and go again.
            let p = s.get(t, t).clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(s, u, v)
}

fn finish(s: IntMatrix, u: IntMatrix, v: IntMatrix) -> SnfResult {
    SnfResult { s, u, v }
}

/// The group `Z^m / (column space of a)` for an `m x k` matrix `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
    pub rank: usize,
    /// Image of each standard basis vector in the free quotient, as an exponent vector of
    /// length `rank`. The basis is normalized by a Hermite form, so it does not depend on
    /// the particular Smith transform.
    pub projection: Vec<Vec<i64>>,
}

pub fn cokernel(a: &IntMatrix) -> Cokernel {
    let m = a.rows;
    let snf = smith_normal_form(a);
    let rank_a = snf.rank();
    let rank = m - rank_a;
    let torsion = snf.diagonal().into_iter().filter(|x| *x > BigInt::one()).collect();
    let mut p = IntMatrix::zeros(rank, m);
    for j in 0..rank {
        for i in 0..m {
            p.set(j, i, snf.u.get(rank_a + j, i).clone());
        }
    }
    let p = hermite_normal_form(&p);
    let projection = (0..m)
        .map(|i| (0..rank).map(|j| p.get(j, i).to_i64().expect("coordinate fits in i64")).collect())
        .collect();
    Cokernel { torsion, rank, projection }
}

/// Row-style Hermite normal form: the canonical representative of the row space under
/// unimodular row operations. Pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, and zero rows sink to the bottom.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let (m, n) = (h.rows, h.cols);
    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        // Euclid down the column until a single nonzero entry remains at row r.
        loop {
            let nz: Vec<usize> = (r..m).filter(|&i| !h.get(i, j).is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| h.get(i, j).abs()).unwrap();
            h.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = h.get(i, j).div_floor(h.get(r, j));
                h.add_row(i, r, &-q);
                if !h.get(i, j).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, j).is_zero() {
            continue;
        }
        if h.get(r, j).is_negative() {
            h.negate_row(r);
        }
        let p = h.get(r, j).clone();
        for i in 0..r {
            let q = h.get(i, j).div_floor(&p);
            if !q.is_zero() {
                h.add_row(i, r, &-q);
            }
        }
        r += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> SnfResult {
        let r = smith_normal_form(a);
        assert_eq!(r.u.mul(a).mul(&r.v), r.s);
        assert!(r.u.determinant().abs().is_one());
        assert!(r.v.determinant().abs().is_one());
        let d = r.diagonal();
        for i in 0..r.s.rows() {
            for j in 0..r.s.cols() {
                if i != j {
                    assert!(r.s.get(i, j).is_zero());
                }
            }
        }
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        r
    }

    #[test]
    fn three_by_two_example() {
        let a = IntMatrix::from_rows(&[vec![-4, 0], vec![0, 0], vec![4, 0]]);
        let r = check(&a);
        assert_eq!(r.diagonal(), vec![BigInt::from(4), BigInt::zero()]);
    }

    #[test]
    fn needs_divisibility_fix() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let r = check(&a);
        assert_eq!(r.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn empty_and_zero() {
        check(&IntMatrix::zeros(0, 3));
        let r = check(&IntMatrix::zeros(2, 2));
        assert_eq!(r.rank(), 0);
    }

    #[test]
    fn hermite_form_is_canonical() {
        let a = IntMatrix::from_rows(&[vec![2, 3, 1], vec![1, 1, 0]]);
        let h = hermite_normal_form(&a);
        assert_eq!(h, IntMatrix::from_rows(&[vec![1, 0, -1], vec![0, 1, 1]]));
        // any unimodular change of rows gives the same form
        let b = IntMatrix::from_rows(&[vec![-1, -1, 0], vec![3, 4, 1]]);
        assert_eq!(hermite_normal_form(&b), h);
    }

    #[test]
    fn cokernel_of_cyclic_relation() {
        // Z^2 / <(2, 0)> = Z/2 + Z
        let c = cokernel(&IntMatrix::from_rows(&[vec![2], vec![0]]));
        assert_eq!(c.torsion, vec![BigInt::from(2)]);
        assert_eq!(c.rank, 1);
        assert_eq!(c.projection, vec![vec![0], vec![1]]);
    }

    #[test]
    fn determinant_small() {
        let a = IntMatrix::from_rows(&[vec![0, 2, 1], vec![1, 0, 0], vec![3, 1, 4]]);
        // 0*(0-0) - 2*(4-0) + 1*(1-0)
        assert_eq!(a.determinant(), BigInt::from(-7));
    }
}
