//! The taut polynomial via branch relations matrices.
//!
//! `H` is the free part of `H_1(M)`, read off a Smith normal form of the boundary map
//! from sectors to non-tree dual edges. Each face gets an `H`-pairing, each sector side
//! an `H`-coefficient, and the switch relations of the stable train tracks assemble into
//! the branch relations matrix, one row per triangulation edge and one column per face.

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::{cokernel, maximal_minors_gcd, Exponent, IntMatrix, LaurentPoly, PolyMatrix};
use crate::branched_surface::BranchedSurface;
use crate::error::{Error, Result};
use crate::triangulation::{spanning_tree, SpanningTree, TautStructure, Triangulation, TreeStrategy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPairing {
    /// Rank of `H`.
    pub rank: usize,
    /// Invariant factors greater than one: the torsion of `H_1`.
    pub torsion: Vec<BigInt>,
    /// Exponent vector of each face; zero on tree faces.
    pub pairings: Vec<Exponent>,
}

impl HPairing {
    pub fn monomial(&self, face: usize) -> LaurentPoly {
        LaurentPoly::monomial(self.rank, self.pairings[face].clone(), 1)
    }

    /// Image of a signed dual-edge word in `H`.
    pub fn of_word(&self, word: &[(usize, i32)]) -> Exponent {
        let mut out = vec![0; self.rank];
        for &(f, d) in word {
            for (o, x) in out.iter_mut().zip(&self.pairings[f]) {
                *o += d as i64 * x;
            }
        }
        out
    }
}

/// Cellular boundary map from sectors (columns) to non-tree dual edges (rows). The entry
/// is the signed number of times the dual edge occurs in the sector boundary word.
pub fn boundary_matrix(bs: &BranchedSurface, tree: &SpanningTree) -> (IntMatrix, Vec<usize>) {
    let nf = bs.spine.edges.len();
    let free: Vec<usize> = (0..nf).filter(|&f| !tree.contains(f)).collect();
    let mut row_of = vec![usize::MAX; nf];
    for (i, &f) in free.iter().enumerate() {
        row_of[f] = i;
    }
    let mut rows = vec![vec![0i64; bs.sectors.len()]; free.len()];
    for s in &bs.sectors {
        for &(f, d) in &s.word {
            if row_of[f] != usize::MAX {
                rows[row_of[f]][s.edge] += d as i64;
            }
        }
    }
    (IntMatrix::from_rows(&rows), free)
}

pub fn h_pairings(bs: &BranchedSurface, tree: &SpanningTree) -> HPairing {
    let (d, free) = boundary_matrix(bs, tree);
    let c = cokernel(&d);
    let mut pairings = vec![vec![0i64; c.rank]; bs.spine.edges.len()];
    for (i, &f) in free.iter().enumerate() {
        pairings[f] = c.projection[i].clone();
    }
    HPairing { rank: c.rank, torsion: c.torsion, pairings }
}

/// `H`-coefficients of every sector side: uppermost sides get 1, and going down a side
/// arc the coefficient picks up the inverse pairing of the edge just passed.
pub fn h_coefficients(bs: &BranchedSurface, h: &HPairing) -> Vec<Vec<Exponent>> {
    bs.sectors
        .iter()
        .map(|s| {
            let mut c = vec![vec![0i64; h.rank]; s.len()];
            for arc in s.side_arcs() {
                // arc runs bottom to top
                for w in (0..arc.len().saturating_sub(1)).rev() {
                    let (above, below) = (arc[w + 1], arc[w]);
                    let f = s.word[above].0;
                    c[below] = c[above].iter().zip(&h.pairings[f]).map(|(x, y)| x - y).collect();
                }
            }
            c
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchRelationsMatrix {
    /// Rows are triangulation edges, columns faces.
    pub full: PolyMatrix,
    pub tree: Vec<usize>,
}

impl BranchRelationsMatrix {
    pub fn nvars(&self) -> usize {
        self.full.nvars()
    }

    pub fn free_faces(&self) -> Vec<usize> {
        (0..self.full.cols()).filter(|f| !self.tree.contains(f)).collect()
    }

    /// Tree columns removed.
    pub fn reduced(&self) -> PolyMatrix {
        let rows: Vec<usize> = (0..self.full.rows()).collect();
        self.full.submatrix(&rows, &self.free_faces())
    }

    pub fn column(&self, f: usize) -> Vec<LaurentPoly> {
        (0..self.full.rows()).map(|i| self.full.get(i, f).clone()).collect()
    }

    /// Entries as lists of `[exponents, coefficient]` pairs.
    pub fn to_json(&self) -> Value {
        let enc = |m: &PolyMatrix| -> Value {
            (0..m.rows())
                .map(|i| {
                    m.row(i)
                        .iter()
                        .map(|p| p.terms().map(|(e, c)| json!([e, c.to_string()])).collect::<Vec<_>>())
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
                .into()
        };
        json!({
            "nvars": self.nvars(),
            "tree": self.tree,
            "full": enc(&self.full),
            "reduced_columns": self.free_faces(),
            "reduced": enc(&self.reduced()),
        })
    }
}

pub fn branch_relations_matrix(bs: &BranchedSurface, tree: &SpanningTree) -> (BranchRelationsMatrix, HPairing) {
    let h = h_pairings(bs, tree);
    let coeffs = h_coefficients(bs, &h);
    let nf = bs.spine.edges.len();
    let mut full = PolyMatrix::zeros(bs.sectors.len(), nf, h.rank);
    for s in &bs.sectors {
        for (k, &(f, _)) in s.word.iter().enumerate() {
            let inv: Exponent = coeffs[s.edge][k].iter().map(|x| -x).collect();
            let sign = if s.is_uppermost(k) { 1 } else { -1 };
            let term = LaurentPoly::monomial(h.rank, inv, sign);
            let entry = full.get_mut(s.edge, f);
            *entry = &*entry + &term;
        }
    }
    (BranchRelationsMatrix { full, tree: tree.edges.clone() }, h)
}

pub fn taut_polynomial_with_tree(bs: &BranchedSurface, tree: &SpanningTree) -> LaurentPoly {
    let (d, _) = branch_relations_matrix(bs, tree);
    maximal_minors_gcd(&d.reduced())
}

pub fn taut_polynomial(tri: &Triangulation, taut: &TautStructure) -> Result<LaurentPoly> {
    let bs = BranchedSurface::build(tri, taut)?;
    let tree = spanning_tree(&bs.dual_graph(), &TreeStrategy::FirstBfs)?;
    Ok(taut_polynomial_with_tree(&bs, &tree))
}

/// Checks that `sum coefficient * column` vanishes.
pub fn verify_dependency(d: &BranchRelationsMatrix, coefficients: &[(usize, LaurentPoly)]) -> Result<bool> {
    let mut acc = vec![LaurentPoly::zero(d.nvars()); d.full.rows()];
    for (f, c) in coefficients {
        if *f >= d.full.cols() {
            return Err(Error::IndexMismatch(format!("no column {f}")));
        }
        if c.nvars() != d.nvars() {
            return Err(Error::IndexMismatch(format!(
                "coefficient has {} variables, matrix has {}",
                c.nvars(),
                d.nvars()
            )));
        }
        for (i, a) in acc.iter_mut().enumerate() {
            *a = &*a + &(c * d.full.get(i, *f));
        }
    }
    Ok(acc.iter().all(|x| x.is_zero()))
}

/// Convenience for callers that only need the order of `H_1` torsion and rank.
pub fn homology_invariants(h: &HPairing) -> Vec<BigInt> {
    let mut out = h.torsion.clone();
    out.extend(std::iter::repeat(BigInt::zero()).take(h.rank));
    out
}
