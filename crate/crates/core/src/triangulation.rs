//! Ideal triangulations, taut structures, veering colorings, dual graphs and spanning trees.
//!
//! Faces and edges are numbered the way the census tooling numbers them: faces by
//! scanning tetrahedra in order and their facets from 3 down to 0, edges by scanning
//! tetrahedra in order and their local edges from 0 up to 5, assigning a fresh index
//! to every class not seen before.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{edge_index, edge_pair, opposite_edge, Perm4, EDGE_VERTICES};

/// A closed gluing of `n` tetrahedra: facet `i` of tetrahedron `t` is glued to
/// facet `gluing.apply(i)` of tetrahedron `adjacent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    adj: Vec<[(usize, Perm4); 4]>,
}

/// One position of an edge class inside a tetrahedron. `verts[0..2]` are the endpoints
/// of the edge, `verts[2..4]` the remaining vertices. Consecutive embeddings in
/// [`EdgeClass::embeddings`] are related by crossing the facet opposite `verts[3]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeEmbedding {
    pub tet: usize,
    pub verts: [usize; 4],
}

impl EdgeEmbedding {
    pub fn local_edge(&self) -> usize {
        edge_index(self.verts[0], self.verts[1])
    }
}

#[derive(Clone, Debug)]
pub struct EdgeClass {
    pub embeddings: Vec<EdgeEmbedding>,
}

/// A face of the triangulation, seen from the two tetrahedra it separates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    pub sides: [(usize, usize); 2],
}

impl Triangulation {
    /// Builds a triangulation from an adjacency table, checking that the gluing is an
    /// involution on `(tetrahedron, facet)` pairs without fixed points.
    pub fn new(adj: Vec<[(usize, Perm4); 4]>) -> Result<Triangulation> {
        let n = adj.len();
        if n == 0 {
            return Err(Error::InvalidGluing("no tetrahedra".into()));
        }
        for (t, row) in adj.iter().enumerate() {
            for (f, &(u, g)) in row.iter().enumerate() {
                if u >= n {
                    return Err(Error::InvalidGluing(format!("tet {t} facet {f} -> missing tet {u}")));
                }
                let back = adj[u][g.apply(f)];
                if back.0 != t || back.1 != g.inverse() {
                    return Err(Error::InvalidGluing(format!(
                        "tet {t} facet {f} gluing is not reciprocated"
                    )));
                }
                if u == t && g.apply(f) == f {
                    return Err(Error::InvalidGluing(format!("tet {t} facet {f} glued to itself")));
                }
            }
        }
        Ok(Triangulation { adj })
    }

    pub fn size(&self) -> usize {
        self.adj.len()
    }

    pub fn adjacent(&self, tet: usize, facet: usize) -> (usize, Perm4) {
        self.adj[tet][facet]
    }

    pub fn adjacency(&self) -> &[[(usize, Perm4); 4]] {
        &self.adj
    }

    /// Orientation sign of each tetrahedron's vertex labelling, with tetrahedron 0 positive.
    /// `None` if the triangulation is not orientable (or not connected).
    pub fn orientation(&self) -> Option<Vec<i32>> {
        let n = self.size();
        let mut sign = vec![0i32; n];
        sign[0] = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(t) = queue.pop_front() {
            for f in 0..4 {
                let (u, g) = self.adj[t][f];
                let want = -g.sign() * sign[t];
                if sign[u] == 0 {
                    sign[u] = want;
                    queue.push_back(u);
                } else if sign[u] != want {
                    return None;
                }
            }
        }
        if sign.iter().any(|&s| s == 0) {
            return None;
        }
        Some(sign)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.size();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(t) = stack.pop() {
            for f in 0..4 {
                let u = self.adj[t][f].0;
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Face numbering: `face_of[t][i]` is the face index of facet `i` of tetrahedron `t`.
    pub fn faces(&self) -> (Vec<Face>, Vec<[usize; 4]>) {
        let n = self.size();
        let mut face_of = vec![[usize::MAX; 4]; n];
        let mut faces = Vec::with_capacity(2 * n);
        for t in 0..n {
            for i in (0..4).rev() {
                if face_of[t][i] != usize::MAX {
                    continue;
                }
                let (u, g) = self.adj[t][i];
                let j = g.apply(i);
                let id = faces.len();
                face_of[t][i] = id;
                face_of[u][j] = id;
                faces.push(Face { sides: [(t, i), (u, j)] });
            }
        }
        (faces, face_of)
    }

    /// Edge classes and the map `edge_of[t][local edge]`.
    pub fn edges(&self) -> (Vec<EdgeClass>, Vec<[usize; 6]>) {
        let n = self.size();
        let mut edge_of = vec![[usize::MAX; 6]; n];
        let mut classes = Vec::new();
        for t in 0..n {
            for e in 0..6 {
                if edge_of[t][e] != usize::MAX {
                    continue;
                }
                let (a, b) = EDGE_VERTICES[e];
                let (c, d) = EDGE_VERTICES[opposite_edge(e)];
                let start = EdgeEmbedding { tet: t, verts: [a, b, c, d] };
                let id = classes.len();
                let mut embeddings = Vec::new();
                let mut cur = start;
                loop {
                    edge_of[cur.tet][cur.local_edge()] = id;
                    embeddings.push(cur);
                    let (u, g) = self.adj[cur.tet][cur.verts[3]];
                    let v = cur.verts;
                    let next = EdgeEmbedding {
                        tet: u,
                        verts: [g.apply(v[0]), g.apply(v[1]), g.apply(v[3]), g.apply(v[2])],
                    };
                    if next.tet == start.tet && next.local_edge() == start.local_edge() {
                        break;
                    }
                    cur = next;
                    if embeddings.len() > 6 * n {
                        unreachable!("edge orbit does not close");
                    }
                }
                classes.push(EdgeClass { embeddings });
            }
        }
        (classes, edge_of)
    }

    /// Applies a relabelling: tetrahedron `t` becomes `tet_map[t]` and its vertex `v`
    /// becomes `vertex_maps[t].apply(v)`.
    pub fn relabel(&self, tet_map: &[usize], vertex_maps: &[Perm4]) -> Triangulation {
        let n = self.size();
        let mut adj = vec![[(0usize, Perm4::IDENTITY); 4]; n];
        for t in 0..n {
            for f in 0..4 {
                let (u, g) = self.adj[t][f];
                let nf = vertex_maps[t].apply(f);
                let ng = vertex_maps[u].compose(g).compose(vertex_maps[t].inverse());
                adj[tet_map[t]][nf] = (tet_map[u], ng);
            }
        }
        Triangulation { adj }
    }

    /// Debug dump: for each tetrahedron, its four gluings as `[tet, facet, perm]`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<serde_json::Value>> = self
            .adj
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(f, (u, g))| serde_json::json!([u, g.apply(f), g.to_string()]))
                    .collect()
            })
            .collect();
        serde_json::json!(rows)
    }
}

/// A taut structure given by the position of the π angles, with a chosen coorientation.
///
/// `angles[t] ∈ {0,1,2}` selects the pair of opposite edges {01,23}, {02,13} or {03,12}
/// carrying angle π. `top[t][i]` is true when facet `i` of `t` is a top face
/// (its coorientation points out of `t`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TautStructure {
    pub angles: Vec<u8>,
    pub top: Vec<[bool; 4]>,
}

impl TautStructure {
    /// Local edge index of the top diagonal of tetrahedron `t`.
    pub fn top_diagonal(&self, t: usize) -> usize {
        let p = self.angles[t] as usize;
        // Faces containing the first edge of the pair are the facets opposite its complement.
        let (c, _) = EDGE_VERTICES[opposite_edge(p)];
        if self.top[t][c] {
            p
        } else {
            opposite_edge(p)
        }
    }

    pub fn bottom_diagonal(&self, t: usize) -> usize {
        opposite_edge(self.top_diagonal(t))
    }

    /// Coorientation reversed everywhere.
    pub fn reversed(&self) -> TautStructure {
        TautStructure {
            angles: self.angles.clone(),
            top: self.top.iter().map(|r| [!r[0], !r[1], !r[2], !r[3]]).collect(),
        }
    }

    /// Recovers the coorientation from an angle assignment. The coorientation of
    /// tetrahedron 0 is chosen so that faces containing the first edge of its π pair are bottom
    /// faces; for the base example this matches the reference dual graph.
    pub fn from_angles(tri: &Triangulation, angles: &[u8]) -> Result<TautStructure> {
        let n = tri.size();
        if angles.len() != n {
            return Err(Error::AngleCountMismatch { angles: angles.len(), tetrahedra: n });
        }
        if let Some(a) = angles.iter().find(|&&a| a > 2) {
            return Err(Error::MalformedSignature(format!("angle digit {a} out of range")));
        }
        // flip[t] = false: faces containing edge EDGE_VERTICES[p] (facets opposite the
        // complementary pair) are top.
        let facet_is_top = |t: usize, flip: bool, i: usize| -> bool {
            let p = angles[t] as usize;
            let (a, b) = EDGE_VERTICES[p];
            let contains_first = i != a && i != b;
            contains_first != flip
        };
        let mut flip: Vec<Option<bool>> = vec![None; n];
        flip[0] = Some(true);
        let mut queue = VecDeque::from([0usize]);
        while let Some(t) = queue.pop_front() {
            let ft = flip[t].unwrap();
            for i in 0..4 {
                let (u, g) = tri.adjacent(t, i);
                let j = g.apply(i);
                let top_here = facet_is_top(t, ft, i);
                // The same face must be a bottom face on the other side.
                let want = if facet_is_top(u, false, j) == top_here { true } else { false };
                match flip[u] {
                    None => {
                        flip[u] = Some(want);
                        queue.push_back(u);
                    }
                    Some(fu) if fu != want => {
                        return Err(Error::NotTaut(format!(
                            "coorientations disagree across facet {i} of tetrahedron {t}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        let top = (0..n)
            .map(|t| {
                let f = flip[t].expect("connected");
                [0, 1, 2, 3].map(|i| facet_is_top(t, f, i))
            })
            .collect();
        Ok(TautStructure { angles: angles.to_vec(), top })
    }
}

/// Outcome of [`check_taut`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TautVerdict {
    Taut,
    Rejected(String),
}

impl TautVerdict {
    pub fn is_taut(&self) -> bool {
        matches!(self, TautVerdict::Taut)
    }
}

/// Verifies the taut conditions: two top and two bottom faces per tetrahedron, top/bottom
/// faces consistent across gluings, and around every edge exactly one tetrahedron having it
/// as top diagonal and exactly one having it as bottom diagonal.
pub fn check_taut(tri: &Triangulation, taut: &TautStructure) -> TautVerdict {
    let n = tri.size();
    if taut.angles.len() != n || taut.top.len() != n {
        return TautVerdict::Rejected(format!("structure covers {} tetrahedra, expected {n}", taut.angles.len()));
    }
    for t in 0..n {
        if taut.angles[t] > 2 {
            return TautVerdict::Rejected(format!("tetrahedron {t}: angle digit out of range"));
        }
        let tops = taut.top[t].iter().filter(|&&x| x).count();
        if tops != 2 {
            return TautVerdict::Rejected(format!("tetrahedron {t} has {tops} top faces"));
        }
        // The two top faces must share an edge of the π pair.
        let facets: Vec<usize> = (0..4).filter(|&i| taut.top[t][i]).collect();
        let bottoms: Vec<usize> = (0..4).filter(|&i| !taut.top[t][i]).collect();
        // The edge shared by the top faces joins the two bottom-facet vertices.
        let shared = edge_index(bottoms[0], bottoms[1]);
        if edge_pair(shared) != taut.angles[t] as usize {
            return TautVerdict::Rejected(format!(
                "tetrahedron {t}: top faces {facets:?} do not meet along a π edge"
            ));
        }
        for i in 0..4 {
            let (u, g) = tri.adjacent(t, i);
            if taut.top[u][g.apply(i)] == taut.top[t][i] {
                return TautVerdict::Rejected(format!(
                    "tetrahedron {t} facet {i}: coorientation not consistent with tetrahedron {u}"
                ));
            }
        }
    }
    let (edges, _) = tri.edges();
    for (id, class) in edges.iter().enumerate() {
        let mut pi_count = 0;
        let mut tops = 0;
        let mut bottoms = 0;
        for emb in &class.embeddings {
            let le = emb.local_edge();
            if edge_pair(le) == taut.angles[emb.tet] as usize {
                pi_count += 1;
            }
            if le == taut.top_diagonal(emb.tet) {
                tops += 1;
            }
            if le == taut.bottom_diagonal(emb.tet) {
                bottoms += 1;
            }
        }
        if pi_count != 2 {
            return TautVerdict::Rejected(format!("edge {id}: angle sum is {pi_count}π, expected 2π"));
        }
        if tops != 1 || bottoms != 1 {
            return TautVerdict::Rejected(format!(
                "edge {id}: {tops} tetrahedra below and {bottoms} above, expected one of each"
            ));
        }
    }
    TautVerdict::Taut
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

/// Edge colouring of a veering triangulation, relative to the orientation in which
/// tetrahedron 0 is positively labelled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Veering {
    pub colors: Vec<Color>,
    pub orientation: Vec<i32>,
}

/// In a tetrahedron whose labelling `(v, w, x, y)` is positively oriented, with top
/// diagonal `vw` and bottom diagonal `xy`, the equatorial edges `vx` and `wy` are red,
/// `vy` and `wx` blue.
pub fn equatorial_colors(taut: &TautStructure, orientation: &[i32], t: usize) -> [Option<Color>; 6] {
    let top = taut.top_diagonal(t);
    let (v, w) = EDGE_VERTICES[top];
    let (x, y) = EDGE_VERTICES[opposite_edge(top)];
    let p = Perm4::new([v as u8, w as u8, x as u8, y as u8]).unwrap();
    let (x, y) = if p.sign() * orientation[t] > 0 { (x, y) } else { (y, x) };
    let mut out = [None; 6];
    out[edge_index(v, x)] = Some(Color::Red);
    out[edge_index(w, y)] = Some(Color::Red);
    out[edge_index(v, y)] = Some(Color::Blue);
    out[edge_index(w, x)] = Some(Color::Blue);
    out
}

/// Checks the veering condition and returns the edge colouring.
pub fn check_veering(tri: &Triangulation, taut: &TautStructure) -> Result<Veering> {
    if let TautVerdict::Rejected(msg) = check_taut(tri, taut) {
        return Err(Error::NotTaut(msg));
    }
    let orientation = tri.orientation().ok_or(Error::NonOrientable)?;
    let (edges, edge_of) = tri.edges();
    let mut colors: Vec<Option<Color>> = vec![None; edges.len()];
    for t in 0..tri.size() {
        for (le, c) in equatorial_colors(taut, &orientation, t).into_iter().enumerate() {
            let Some(c) = c else { continue };
            let e = edge_of[t][le];
            match colors[e] {
                None => colors[e] = Some(c),
                Some(prev) if prev != c => {
                    return Err(Error::NotVeering(format!(
                        "edge {e} receives both colours (tetrahedron {t})"
                    )))
                }
                _ => {}
            }
        }
    }
    let colors = colors
        .into_iter()
        .enumerate()
        .map(|(e, c)| c.ok_or_else(|| Error::NotVeering(format!("edge {e} is never equatorial"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Veering { colors, orientation })
}

/// Directed dual graph: one vertex per tetrahedron, one edge per face, pointing from the
/// tetrahedron below the face to the tetrahedron above it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    pub vertex_count: usize,
    /// `(tail, head)` per dual edge, indexed by face.
    pub edges: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].0 == v).collect()
    }

    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].1 == v).collect()
    }
}

pub fn dual_graph(tri: &Triangulation, taut: &TautStructure) -> DualGraph {
    let (faces, _) = tri.faces();
    let edges = faces
        .iter()
        .map(|face| {
            let (t, i) = face.sides[0];
            let (u, _) = face.sides[1];
            if taut.top[t][i] {
                (t, u)
            } else {
                (u, t)
            }
        })
        .collect();
    DualGraph { vertex_count: tri.size(), edges }
}

/// A spanning tree of a dual graph, as a set of dual edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    pub edges: Vec<usize>,
    in_tree: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeStrategy {
    /// Breadth first search from vertex 0, taking dual edges in increasing index order.
    FirstBfs,
    /// Breadth first search from vertex 0 visiting edges in the given priority order.
    Ordered(Vec<usize>),
    Prescribed(Vec<usize>),
}

impl SpanningTree {
    pub fn contains(&self, edge: usize) -> bool {
        self.in_tree.get(edge).copied().unwrap_or(false)
    }

    /// The path in the tree from `from` to `to` as signed dual edges.
    pub fn path(&self, graph: &DualGraph, from: usize, to: usize) -> Vec<(usize, i32)> {
        // BFS over tree edges.
        let n = graph.vertex_count;
        let mut prev: Vec<Option<(usize, (usize, i32))>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &e in &self.edges {
                let (a, b) = graph.edges[e];
                let step = if a == v && !seen[b] {
                    Some((b, (e, 1)))
                } else if b == v && !seen[a] {
                    Some((a, (e, -1)))
                } else {
                    None
                };
                if let Some((w, letter)) = step {
                    seen[w] = true;
                    prev[w] = Some((v, letter));
                    queue.push_back(w);
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = to;
        while cur != from {
            let (p, letter) = prev[cur].expect("tree spans the graph");
            out.push(letter);
            cur = p;
        }
        out.reverse();
        out
    }

    /// The fundamental cycle of a non-tree edge: the edge itself, then the tree path back.
    pub fn fundamental_cycle(&self, graph: &DualGraph, edge: usize) -> Vec<(usize, i32)> {
        let (a, b) = graph.edges[edge];
        let mut word = vec![(edge, 1)];
        word.extend(self.path(graph, b, a));
        word
    }
}

pub fn spanning_tree(graph: &DualGraph, strategy: &TreeStrategy) -> Result<SpanningTree> {
    let n = graph.vertex_count;
    let m = graph.edges.len();
    match strategy {
        TreeStrategy::FirstBfs => {
            let order: Vec<usize> = (0..m).collect();
            bfs_tree(graph, &order)
        }
        TreeStrategy::Ordered(order) => bfs_tree(graph, order),
        TreeStrategy::Prescribed(edges) => {
            let mut sorted = edges.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != edges.len() {
                return Err(Error::NotATree("repeated edge".into()));
            }
            if let Some(&e) = sorted.iter().find(|&&e| e >= m) {
                return Err(Error::NotATree(format!("edge {e} does not exist")));
            }
            if sorted.len() + 1 != n {
                return Err(Error::NotATree(format!(
                    "{} edges given, a spanning tree of {n} vertices has {}",
                    sorted.len(),
                    n - 1
                )));
            }
            // Union-find acyclicity check; n-1 acyclic edges then span.
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                let mut c = x;
                while p[c] != r {
                    let nx = p[c];
                    p[c] = r;
                    c = nx;
                }
                r
            }
            for &e in &sorted {
                let (a, b) = graph.edges[e];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    return Err(Error::NotATree(format!("edge {e} closes a cycle")));
                }
                parent[ra] = rb;
            }
            let mut in_tree = vec![false; m];
            for &e in &sorted {
                in_tree[e] = true;
            }
            Ok(SpanningTree { root: 0, edges: sorted, in_tree })
        }
    }
}

fn bfs_tree(graph: &DualGraph, order: &[usize]) -> Result<SpanningTree> {
    let n = graph.vertex_count;
    let m = graph.edges.len();
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; m];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &e in order {
            let (a, b) = graph.edges[e];
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                in_tree[e] = true;
                queue.push_back(other);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::NotATree("dual graph is disconnected".into()));
    }
    let edges = (0..m).filter(|&e| in_tree[e]).collect();
    Ok(SpanningTree { root: 0, edges, in_tree })
}
