//! The stable branched surface of a veering triangulation, and the more general
//! branched spines produced by blowing up and surgery.
//!
//! A [`Spine`] is purely combinatorial: an oriented graph, a list of sectors given by
//! their cyclic boundary words, and for every edge the one sector occurrence lying on
//! its one-sheeted side. That is enough to recover the orientation character of the
//! tangent plane field and, when every vertex looks like a taut tetrahedron, the dual
//! triangulation.
//!
//! A [`BranchedSurface`] adds what only a veering triangulation knows: top and bottom
//! vertices of sectors, left and right sectors, and colours.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::perm::{edge_index, edge_pair, Perm4};
use crate::triangulation::{
    check_veering, Color, DualGraph, TautStructure, Triangulation, Veering,
};

/// A dual-graph edge together with a traversal direction (+1 along, -1 against).
pub type Letter = (usize, i32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: usize,
    pub head: bool,
}

/// The corner of a sector between letters `position - 1` and `position` (cyclically).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corner {
    pub vertex: usize,
    pub sector: usize,
    pub position: usize,
    /// End through which the boundary arrives, then the end through which it leaves.
    pub ends: [EdgeEnd; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spine {
    pub vertex_count: usize,
    /// `(tail, head)` per edge.
    pub edges: Vec<(usize, usize)>,
    /// Cyclic boundary words.
    pub sectors: Vec<Vec<Letter>>,
    /// For each edge, the `(sector, position)` on its one-sheeted side.
    pub one_sheeted: Vec<(usize, usize)>,
}

impl Spine {
    pub fn letter_start(&self, (e, d): Letter) -> usize {
        let (t, h) = self.edges[e];
        if d > 0 {
            t
        } else {
            h
        }
    }

    pub fn letter_end(&self, (e, d): Letter) -> usize {
        let (t, h) = self.edges[e];
        if d > 0 {
            h
        } else {
            t
        }
    }

    fn leaving_end((e, d): Letter) -> EdgeEnd {
        EdgeEnd { edge: e, head: d < 0 }
    }

    fn arriving_end((e, d): Letter) -> EdgeEnd {
        EdgeEnd { edge: e, head: d > 0 }
    }

    pub fn end_vertex(&self, end: EdgeEnd) -> usize {
        let (t, h) = self.edges[end.edge];
        if end.head {
            h
        } else {
            t
        }
    }

    pub fn dual_graph(&self) -> DualGraph {
        DualGraph { vertex_count: self.vertex_count, edges: self.edges.clone() }
    }

    /// Occurrences `(sector, position)` of every edge.
    pub fn occurrences(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.edges.len()];
        for (s, word) in self.sectors.iter().enumerate() {
            for (p, &(e, _)) in word.iter().enumerate() {
                out[e].push((s, p));
            }
        }
        out
    }

    pub fn corners(&self) -> Vec<Corner> {
        let mut out = Vec::new();
        for (s, word) in self.sectors.iter().enumerate() {
            let n = word.len();
            for p in 0..n {
                let prev = word[(p + n - 1) % n];
                let cur = word[p];
                out.push(Corner {
                    vertex: self.letter_start(cur),
                    sector: s,
                    position: p,
                    ends: [Self::arriving_end(prev), Self::leaving_end(cur)],
                });
            }
        }
        out
    }

    /// Structural checks: words close up, every edge lies on exactly three sector
    /// sides, and the one-sheeted occurrence is one of them.
    pub fn validate(&self) -> Result<()> {
        for (e, &(t, h)) in self.edges.iter().enumerate() {
            if t >= self.vertex_count || h >= self.vertex_count {
                return Err(Error::InternalInconsistency(format!("edge {e} has an endpoint out of range")));
            }
        }
        for (s, word) in self.sectors.iter().enumerate() {
            if word.is_empty() {
                return Err(Error::InternalInconsistency(format!("sector {s} has empty boundary")));
            }
            if let Some(&(e, _)) = word.iter().find(|(e, _)| *e >= self.edges.len()) {
                return Err(Error::InternalInconsistency(format!("sector {s} uses unknown edge {e}")));
            }
            self.check_closed(word)
                .map_err(|_| Error::InternalInconsistency(format!("boundary of sector {s} is not a closed path")))?;
        }
        let occ = self.occurrences();
        for (e, list) in occ.iter().enumerate() {
            if list.len() != 3 {
                return Err(Error::InternalInconsistency(format!(
                    "edge {e} lies on {} sector sides, expected 3",
                    list.len()
                )));
            }
            if !list.contains(&self.one_sheeted[e]) {
                return Err(Error::InternalInconsistency(format!(
                    "one-sheeted side of edge {e} is not among its occurrences"
                )));
            }
        }
        Ok(())
    }

    fn check_closed(&self, word: &[Letter]) -> Result<()> {
        let n = word.len();
        for i in 0..n {
            let a = word[i];
            let b = word[(i + 1) % n];
            if a.0 >= self.edges.len() || b.0 >= self.edges.len() {
                return Err(Error::NotAClosedCycle(format!("unknown edge in {word:?}")));
            }
            if self.letter_end(a) != self.letter_start(b) {
                return Err(Error::NotAClosedCycle(format!(
                    "letter {i} ends at vertex {} but the next one starts at {}",
                    self.letter_end(a),
                    self.letter_start(b)
                )));
            }
        }
        Ok(())
    }

    /// Validates a closed edge path.
    pub fn check_cycle(&self, word: &[Letter]) -> Result<()> {
        if word.is_empty() {
            return Err(Error::NotAClosedCycle("empty word".into()));
        }
        if word.iter().any(|&(_, d)| d != 1 && d != -1) {
            return Err(Error::NotAClosedCycle("letter exponents must be ±1".into()));
        }
        self.check_closed(word)
    }

    /// Transport of the tangent plane orientation along each edge: +1 if going along the
    /// edge preserves a local orientation of the branched surface, -1 otherwise.
    ///
    /// Each sector is oriented so its boundary word runs counterclockwise. Along an edge
    /// the tangent plane is oriented by the one-sheeted sector; a two-sheeted sector
    /// continues it smoothly, so the two agree iff they induce opposite directions on the
    /// edge. At a vertex the same comparison, chained around the corners, fixes the
    /// orientation of every edge end relative to a reference.
    pub fn edge_weights(&self) -> Result<Vec<i32>> {
        self.validate()?;
        let sign_of = |s: usize, p: usize| -> i32 {
            let (e, d) = self.sectors[s][p];
            let (s0, p0) = self.one_sheeted[e];
            if (s0, p0) == (s, p) {
                1
            } else {
                -self.sectors[s0][p0].1 * d
            }
        };
        // Link graph: ends are nodes, corners are edges labelled by a parity.
        let mut links: HashMap<EdgeEnd, Vec<(EdgeEnd, i32)>> = HashMap::new();
        for c in self.corners() {
            let n = self.sectors[c.sector].len();
            let prev = (c.position + n - 1) % n;
            let parity = sign_of(c.sector, prev) * sign_of(c.sector, c.position);
            links.entry(c.ends[0]).or_default().push((c.ends[1], parity));
            links.entry(c.ends[1]).or_default().push((c.ends[0], parity));
        }
        let mut b: HashMap<EdgeEnd, i32> = HashMap::new();
        let mut ends: Vec<EdgeEnd> = links.keys().copied().collect();
        ends.sort();
        for start in ends {
            if b.contains_key(&start) {
                continue;
            }
            b.insert(start, 1);
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let bx = b[&x];
                for &(y, parity) in &links[&x] {
                    let want = bx * parity;
                    match b.get(&y) {
                        None => {
                            b.insert(y, want);
                            queue.push_back(y);
                        }
                        Some(&v) if v != want => {
                            return Err(Error::InternalInconsistency(format!(
                                "tangent plane is not coherently oriented around vertex {}",
                                self.end_vertex(x)
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        let mut w = Vec::with_capacity(self.edges.len());
        for e in 0..self.edges.len() {
            let t = b.get(&EdgeEnd { edge: e, head: false });
            let h = b.get(&EdgeEnd { edge: e, head: true });
            match (t, h) {
                (Some(t), Some(h)) => w.push(t * h),
                _ => return Err(Error::InternalInconsistency(format!("edge {e} bounds no sector"))),
            }
        }
        // Links at distinct vertices are independent, but the reference at each vertex
        // must be single: check each vertex's link is connected.
        let mut comps: HashMap<usize, usize> = HashMap::new();
        let mut seen: HashMap<EdgeEnd, bool> = HashMap::new();
        let mut keys: Vec<EdgeEnd> = links.keys().copied().collect();
        keys.sort();
        for k in keys {
            if seen.contains_key(&k) {
                continue;
            }
            *comps.entry(self.end_vertex(k)).or_default() += 1;
            let mut stack = vec![k];
            seen.insert(k, true);
            while let Some(x) = stack.pop() {
                for &(y, _) in &links[&x] {
                    if seen.insert(y, true).is_none() {
                        stack.push(y);
                    }
                }
            }
        }
        if let Some((v, _)) = comps.iter().find(|(_, &c)| c > 1) {
            return Err(Error::InternalInconsistency(format!("link of vertex {v} is disconnected")));
        }
        Ok(w)
    }

    /// Orientation character of a closed path.
    pub fn omega(&self, weights: &[i32], word: &[Letter]) -> Result<i32> {
        self.check_cycle(word)?;
        Ok(word.iter().map(|&(e, _)| weights[e]).product())
    }

    /// The taut ideal triangulation dual to this spine. Every vertex must have two
    /// incoming and two outgoing edge ends, and one corner between each pair of ends.
    pub fn dualize(&self) -> Result<(Triangulation, TautStructure)> {
        self.validate()?;
        let n = self.vertex_count;
        let mut ends_at: Vec<Vec<EdgeEnd>> = vec![Vec::new(); n];
        for e in 0..self.edges.len() {
            for head in [false, true] {
                let end = EdgeEnd { edge: e, head };
                ends_at[self.end_vertex(end)].push(end);
            }
        }
        for (v, ends) in ends_at.iter_mut().enumerate() {
            ends.sort();
            if ends.len() != 4 || ends.iter().filter(|x| x.head).count() != 2 {
                return Err(Error::InvalidGluing(format!("vertex {v} is not a taut tetrahedron")));
            }
        }
        let index = |end: EdgeEnd| -> usize {
            ends_at[self.end_vertex(end)].iter().position(|&x| x == end).unwrap()
        };
        // Which corner joins which pair of ends.
        let mut pairs: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let corners = self.corners();
        for c in &corners {
            let (i, j) = (index(c.ends[0]), index(c.ends[1]));
            if i == j {
                return Err(Error::InvalidGluing(format!("sector {} turns back at vertex {}", c.sector, c.vertex)));
            }
            let key = (c.vertex, i.min(j), i.max(j));
            if pairs.insert(key, 1).is_some() {
                return Err(Error::InvalidGluing(format!("two corners between the same ends at vertex {}", c.vertex)));
            }
        }
        if pairs.len() != 6 * n {
            return Err(Error::InvalidGluing("some pair of edge ends has no corner".into()));
        }
        let mut corner_at: HashMap<(usize, usize), &Corner> = HashMap::new();
        for c in &corners {
            corner_at.insert((c.sector, c.position), c);
        }
        let mut adj: Vec<[Option<(usize, Perm4)>; 4]> = vec![[None; 4]; n];
        let occ = self.occurrences();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            let tail = EdgeEnd { edge: e, head: false };
            let head = EdgeEnd { edge: e, head: true };
            let (iu, iv) = (index(tail), index(head));
            let mut images = [u8::MAX; 4];
            images[iu] = iv as u8;
            for &(s, p) in &occ[e] {
                let len = self.sectors[s].len();
                let here = corner_at[&(s, p)];
                let there = corner_at[&(s, (p + 1) % len)];
                // `here` is where the letter starts, `there` where it ends.
                let other = |c: &Corner, own: EdgeEnd| if c.ends[0] == own { c.ends[1] } else { c.ends[0] };
                let (at_tail, at_head) = if self.sectors[s][p].1 > 0 {
                    (other(here, tail), other(there, head))
                } else {
                    (other(there, tail), other(here, head))
                };
                images[index(at_tail)] = index(at_head) as u8;
            }
            let g = Perm4::new(images)
                .ok_or_else(|| Error::InvalidGluing(format!("edge {e} does not induce a bijection of vertices")))?;
            adj[u][iu] = Some((v, g));
            adj[v][iv] = Some((u, g.inverse()));
        }
        let adj = adj
            .into_iter()
            .map(|row| {
                let mut out = [(0, Perm4::IDENTITY); 4];
                for (i, x) in row.into_iter().enumerate() {
                    out[i] = x.ok_or_else(|| Error::InvalidGluing("unglued facet".into()))?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let tri = Triangulation::new(adj)?;
        let mut angles = Vec::with_capacity(n);
        let mut top = Vec::with_capacity(n);
        for ends in &ends_at {
            let ins: Vec<usize> = (0..4).filter(|&i| ends[i].head).collect();
            angles.push(edge_pair(edge_index(ins[0], ins[1])) as u8);
            top.push([0, 1, 2, 3].map(|i| !ends[i].head));
        }
        Ok((tri, TautStructure { angles, top }))
    }
}

/// Removes backtracks, including across the end of the word.
pub fn cyclically_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if let Some(&last) = out.last() {
            if last.0 == l.0 && last.1 == -l.1 {
                out.pop();
                continue;
            }
        }
        out.push(l);
    }
    let mut lo = 0;
    let mut hi = out.len();
    while hi - lo >= 2 && out[lo].0 == out[hi - 1].0 && out[lo].1 == -out[hi - 1].1 {
        lo += 1;
        hi -= 1;
    }
    out[lo..hi].to_vec()
}

pub fn inverse_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|&(e, d)| (e, -d)).collect()
}

// --- veering branched surfaces ----------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A sector of the stable branched surface, dual to the triangulation edge of the same index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub edge: usize,
    /// Boundary word starting at the bottom vertex: up one side arc, down the other.
    pub word: Vec<Letter>,
    /// `vertices[k]` is where `word[k]` starts.
    pub vertices: Vec<usize>,
    /// Index in `vertices` of the top vertex.
    pub top: usize,
    pub color: Color,
}

impl Sector {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn bottom_vertex(&self) -> usize {
        self.vertices[0]
    }

    pub fn top_vertex(&self) -> usize {
        self.vertices[self.top]
    }

    pub fn is_uppermost(&self, k: usize) -> bool {
        k + 1 == self.top || k == self.top
    }

    pub fn is_lowermost(&self, k: usize) -> bool {
        k == 0 || k + 1 == self.len()
    }

    /// Positions of the two side arcs, each listed from the bottom vertex up.
    pub fn side_arcs(&self) -> [Vec<usize>; 2] {
        [(0..self.top).collect(), (self.top..self.len()).rev().collect()]
    }
}

/// The stable train track in a face: which sector occurrences carry the large half-branch
/// and the two small ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceTrack {
    pub large: (usize, usize),
    pub left: (usize, usize),
    pub right: (usize, usize),
}

impl FaceTrack {
    pub fn side_of(&self, occ: (usize, usize)) -> Option<Side> {
        if occ == self.left {
            Some(Side::Left)
        } else if occ == self.right {
            Some(Side::Right)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TurnKind {
    /// Positively oriented (or its reverse), the second edge uppermost in the sector at
    /// the corner: the sheet folds over.
    Cusped,
    /// Positively oriented (or its reverse) and smooth.
    Smooth,
    /// Both edges point into the common vertex.
    Converging,
    /// Both edges point out of it.
    Diverging,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Turn {
    pub first: Letter,
    pub second: Letter,
    pub vertex: usize,
    pub kind: TurnKind,
    /// Sector corner between the two edges, for positively oriented turns and their reverses.
    pub witness: Option<(usize, usize)>,
}

impl Turn {
    pub fn sign(&self) -> i32 {
        if self.kind == TurnKind::Cusped {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Debug)]
pub struct BranchedSurface {
    pub spine: Spine,
    pub sectors: Vec<Sector>,
    pub tracks: Vec<FaceTrack>,
    pub veering: Veering,
    corner_index: HashMap<(EdgeEnd, EdgeEnd), (usize, usize)>,
}

// Regular tetrahedron. This labelling is left-handed, so positively oriented
// tetrahedra get the mirror image.
const VERTEX_COORDS: [[i64; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

fn sub(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale(a: [i64; 3], k: i64) -> [i64; 3] {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn add(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Is the small edge of facet `facet` opposite vertex `x` on the right of an observer
/// standing on the dual edge, facing away from the large edge (which is opposite `o`),
/// with the coorientation as up?
fn small_edge_is_right(facet: usize, o: usize, x: usize, orientation: i32) -> bool {
    let p = |v: usize| VERTEX_COORDS[v];
    let y = (0..4).find(|&v| v != facet && v != o && v != x).unwrap();
    // forward = p_o - (p_x + p_y)/2, up ~ p_facet - centroid; scaled to stay integral
    let forward = sub(scale(p(o), 2), add(p(x), p(y)));
    let up = sub(scale(p(facet), 3), add(add(p(o), p(x)), p(y)));
    let right = cross(forward, up);
    // edge opposite x contains y
    let s = dot(sub(p(y), p(x)), right);
    debug_assert!(s != 0);
    (s > 0) == (orientation < 0)
}

impl BranchedSurface {
    pub fn build(tri: &Triangulation, taut: &TautStructure) -> Result<BranchedSurface> {
        let veering = check_veering(tri, taut)?;
        let (_faces, face_of) = tri.faces();
        let (edge_classes, _) = tri.edges();
        let nf = 2 * tri.size();
        let mut edges = vec![(usize::MAX, usize::MAX); nf];
        for t in 0..tri.size() {
            for i in 0..4 {
                let f = face_of[t][i];
                if taut.top[t][i] {
                    edges[f].0 = t;
                } else {
                    edges[f].1 = t;
                }
            }
        }
        // Occurrence key: (face, vertex of the face opposite the edge, labelled in the
        // tetrahedron above the face).
        let mut occ_of: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut sectors = Vec::with_capacity(edge_classes.len());
        for (e, class) in edge_classes.iter().enumerate() {
            let embs = &class.embeddings;
            let d = embs.len();
            let bottom = embs
                .iter()
                .position(|m| m.local_edge() == taut.top_diagonal(m.tet))
                .ok_or_else(|| Error::InternalInconsistency(format!("edge {e} has no tetrahedron below")))?;
            let mut word = Vec::with_capacity(d);
            let mut vertices = Vec::with_capacity(d);
            let mut keys = Vec::with_capacity(d);
            let mut top = None;
            for k in 0..d {
                let m = embs[(bottom + k) % d];
                let facet = m.verts[3];
                let f = face_of[m.tet][facet];
                let dir = if taut.top[m.tet][facet] { 1 } else { -1 };
                let opp = if dir > 0 {
                    let (_, g) = tri.adjacent(m.tet, facet);
                    g.apply(m.verts[2])
                } else {
                    m.verts[2]
                };
                if m.local_edge() == taut.bottom_diagonal(m.tet) {
                    top = Some(k);
                }
                word.push((f, dir));
                vertices.push(m.tet);
                keys.push((f, opp));
            }
            let top = top.ok_or_else(|| Error::InternalInconsistency(format!("edge {e} has no tetrahedron above")))?;
            for (k, &(_, dir)) in word.iter().enumerate() {
                if (k < top) != (dir > 0) {
                    return Err(Error::InternalInconsistency(format!("side arcs of sector {e} are not monotone")));
                }
            }
            for (k, key) in keys.into_iter().enumerate() {
                occ_of.insert(key, (e, k));
            }
            sectors.push(Sector { edge: e, word, vertices, top, color: Color::Red });
        }

        let orientation = &veering.orientation;
        let mut tracks = Vec::with_capacity(nf);
        let mut one_sheeted = Vec::with_capacity(nf);
        for f in 0..nf {
            let above = edges[f].1;
            let facet = (0..4)
                .find(|&i| face_of[above][i] == f && !taut.top[above][i])
                .expect("face is a bottom face of the tetrahedron above it");
            let o = (0..4)
                .find(|&i| i != facet && !taut.top[above][i])
                .expect("two bottom faces");
            let others: Vec<usize> = (0..4).filter(|&v| v != facet && v != o).collect();
            let get = |v: usize| {
                occ_of
                    .get(&(f, v))
                    .copied()
                    .ok_or_else(|| Error::InternalInconsistency(format!("face {f} misses a sector side")))
            };
            let large = get(o)?;
            let (a, b) = (get(others[0])?, get(others[1])?);
            let (left, right) = if small_edge_is_right(facet, o, others[0], orientation[above]) {
                (b, a)
            } else {
                (a, b)
            };
            let s = &sectors[large.0];
            if !s.is_uppermost(large.1) {
                return Err(Error::InternalInconsistency(format!(
                    "large half-branch of face {f} is not uppermost in sector {}",
                    large.0
                )));
            }
            tracks.push(FaceTrack { large, left, right });
            one_sheeted.push(large);
        }

        for s in 0..sectors.len() {
            let mut side = None;
            for k in 0..sectors[s].len() {
                if sectors[s].is_uppermost(k) {
                    continue;
                }
                let f = sectors[s].word[k].0;
                let here = tracks[f].side_of((s, k)).ok_or_else(|| {
                    Error::InternalInconsistency(format!("lower edge {f} of sector {s} is on its one-sheeted side"))
                })?;
                match side {
                    None => side = Some(here),
                    Some(prev) if prev != here => {
                        return Err(Error::InternalInconsistency(format!(
                            "sector {s} is left of some lower edges and right of others"
                        )))
                    }
                    _ => {}
                }
            }
            let side = side.ok_or_else(|| Error::InternalInconsistency(format!("sector {s} has no lower edges")))?;
            sectors[s].color = if side == Side::Left { Color::Red } else { Color::Blue };
        }

        let spine = Spine {
            vertex_count: tri.size(),
            edges,
            sectors: sectors.iter().map(|s| s.word.clone()).collect(),
            one_sheeted,
        };
        spine.validate()?;
        let mut corner_index = HashMap::new();
        for c in spine.corners() {
            corner_index.insert((c.ends[0], c.ends[1]), (c.sector, c.position));
            corner_index.insert((c.ends[1], c.ends[0]), (c.sector, c.position));
        }
        Ok(BranchedSurface { spine, sectors, tracks, veering, corner_index })
    }

    pub fn dual_graph(&self) -> DualGraph {
        self.spine.dual_graph()
    }

    /// The sector on the one-sheeted side of dual edge `f`.
    pub fn one_sheeted_sector(&self, f: usize) -> usize {
        self.tracks[f].large.0
    }

    pub fn left_sector(&self, f: usize) -> usize {
        self.tracks[f].left.0
    }

    pub fn right_sector(&self, f: usize) -> usize {
        self.tracks[f].right.0
    }

    /// The sector corner between two edge ends meeting at a vertex.
    pub fn corner_between(&self, a: EdgeEnd, b: EdgeEnd) -> Option<(usize, usize)> {
        self.corner_index.get(&(a, b)).copied()
    }

    pub fn classify_turn(&self, first: Letter, second: Letter) -> Result<Turn> {
        let ne = self.spine.edges.len();
        if first.0 >= ne || second.0 >= ne || first.1.abs() != 1 || second.1.abs() != 1 {
            return Err(Error::NotATurn(format!("{first:?}, {second:?}: unknown edge or bad exponent")));
        }
        let vertex = self.spine.letter_end(first);
        if vertex != self.spine.letter_start(second) {
            return Err(Error::NotATurn(format!("{first:?} does not end where {second:?} starts")));
        }
        if first.0 == second.0 && first.1 == -second.1 {
            return Err(Error::NotATurn(format!("{first:?}, {second:?} backtracks")));
        }
        let (kind, witness) = match (first.1, second.1) {
            (1, -1) => (TurnKind::Converging, None),
            (-1, 1) => (TurnKind::Diverging, None),
            _ => {
                // Orient as a positive turn (in, out).
                let (inc, out) = if first.1 > 0 { (first.0, second.0) } else { (second.0, first.0) };
                let a = EdgeEnd { edge: inc, head: true };
                let b = EdgeEnd { edge: out, head: false };
                let (s, p) = self
                    .corner_between(a, b)
                    .ok_or_else(|| Error::InternalInconsistency(format!("no corner between {a:?} and {b:?}")))?;
                let sector = &self.sectors[s];
                // The out-edge sits at position p or p-1 depending on the walking direction.
                let n = sector.len();
                let q = if sector.word[p].0 == out && sector.word[p].1 > 0 && Spine::leaving_end(sector.word[p]) == b {
                    p
                } else {
                    (p + n - 1) % n
                };
                debug_assert_eq!(sector.word[q].0, out);
                let kind = if sector.is_uppermost(q) { TurnKind::Cusped } else { TurnKind::Smooth };
                (kind, Some((s, p)))
            }
        };
        Ok(Turn { first, second, vertex, kind, witness })
    }

    pub fn turn_sign(&self, first: Letter, second: Letter) -> Result<i32> {
        Ok(self.classify_turn(first, second)?.sign())
    }

    /// Product of turn signs around a closed path (after cyclic reduction).
    pub fn orientation_image(&self, word: &[Letter]) -> Result<i32> {
        self.spine.check_cycle(word)?;
        let w = cyclically_reduce(word);
        if w.is_empty() {
            return Ok(1);
        }
        let n = w.len();
        let mut sign = 1;
        for i in 0..n {
            sign *= self.turn_sign(w[i], w[(i + 1) % n])?;
        }
        Ok(sign)
    }
}
