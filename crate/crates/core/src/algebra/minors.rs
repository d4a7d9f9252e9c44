//! Matrices over Laurent polynomial rings and gcds of their minors.

use super::laurent::LaurentPoly;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    data: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> PolyMatrix {
        PolyMatrix { rows, cols, nvars, data: vec![LaurentPoly::zero(nvars); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>, nvars: usize) -> Result<PolyMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::IndexMismatch("ragged matrix rows".into()));
            }
            if row.iter().any(|p| p.nvars() != nvars) {
                return Err(Error::IndexMismatch("entries with different variable counts".into()));
            }
            data.extend(row);
        }
        Ok(PolyMatrix { rows: r, cols: c, nvars, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut LaurentPoly {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: LaurentPoly) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[LaurentPoly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(rows.len(), cols.len(), self.nvars);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn without_column(&self, j: usize) -> PolyMatrix {
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), &cols)
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = PolyMatrix::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Rows as lists of printed entries.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|p| p.to_string()).collect()).collect()
    }

    pub fn from_strings(rows: &[Vec<String>], nvars: usize) -> Result<PolyMatrix> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| LaurentPoly::parse(s, nvars)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        PolyMatrix::from_rows(parsed, nvars)
    }

    /// Determinant by Bareiss elimination with exact division.
    pub fn determinant(&self) -> LaurentPoly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return LaurentPoly::one(self.nvars);
        }
        let mut a = self.clone();
        let mut negate = false;
        let mut prev = LaurentPoly::one(self.nvars);
        for k in 0..n {
            // sparsest nonzero pivot in column k
            let pivot = (k..n)
                .filter(|&i| !a.get(i, k).is_zero())
                .min_by_key(|&i| a.get(i, k).term_count());
            let Some(p) = pivot else {
                return LaurentPoly::zero(self.nvars);
            };
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                negate = !negate;
            }
            let akk = a.get(k, k).clone();
            for i in k + 1..n {
                let aik = a.get(i, k).clone();
                for j in k + 1..n {
                    let num = &(a.get(i, j) * &akk) - &(&aik * a.get(k, j));
                    let v = num.div_exact(&prev).expect("Bareiss division is exact");
                    a.set(i, j, v);
                }
            }
            prev = akk;
        }
        let d = a.get(n - 1, n - 1).clone();
        if negate {
            -d
        } else {
            d
        }
    }
}

/// Lexicographic `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        // advance
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                cur = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// gcd of all `size`-by-`size` minors, normalized. The empty minor is 1;
/// if `size` exceeds either dimension there are no minors and the result is 0.
/// Stops early once the gcd is a unit.
pub fn minors_gcd(m: &PolyMatrix, size: usize) -> LaurentPoly {
    let mut g = LaurentPoly::zero(m.nvars);
    if size == 0 {
        return LaurentPoly::one(m.nvars);
    }
    for rows in subsets(m.rows, size) {
        for cols in subsets(m.cols, size) {
            let d = m.submatrix(&rows, &cols).determinant();
            if d.is_zero() {
                continue;
            }
            g = g.gcd(&d);
            if g.is_unit() {
                return g.normalized();
            }
        }
    }
    g.normalized()
}

/// gcd of the maximal minors.
pub fn maximal_minors_gcd(m: &PolyMatrix) -> LaurentPoly {
    minors_gcd(m, m.rows.min(m.cols))
}
