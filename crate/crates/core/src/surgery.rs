//! Vertical surgery curves, blowing up along them, and (1,k)-vertical surgery.
//!
//! A curve is a cyclic list of sector crossings. Crossing `c` enters sector `S_c` through a
//! lowermost edge and leaves through an uppermost one; the edge `ε_c` it enters by is the
//! edge it left the previous sector by. A thin annulus `A` around the curve is coordinatised
//! as `θ ∈ R/m`, `s ∈ [0, 1]`, with crossing `c` at `θ = c`. Inside `A` the branch locus is
//! one arc per crossing, carrying the third sector at `ε_c` (the fin) on one side of `A`.
//!
//! Surgery keeps the arcs on one side straight and shears the arcs on the other side `k`
//! times around `A`. Blowing up doubles `A` into a tube instead. Both are built by cutting
//! every sector along the bands of `A` and gluing the pieces back to new faces.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::branched_surface::{BranchedSurface, Letter, Side, Spine};
use crate::error::{Error, Result};
use crate::triangulation::{check_veering, Color, TautStructure, Triangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub sector: usize,
    /// Position of the entry edge in the sector word (which starts at the bottom vertex).
    pub entry: usize,
    /// Position of the exit edge.
    pub exit: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryCurve {
    pub crossings: Vec<Crossing>,
}

impl SurgeryCurve {
    pub fn from_json(text: &str) -> Result<SurgeryCurve> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("curve: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serializes")
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }
}

/// Everything derived from a valid curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveLayout {
    /// Branch edge `ε_c` entered at crossing `c`.
    pub edges: Vec<usize>,
    /// Third occurrence of `ε_c`.
    pub fins: Vec<(usize, usize)>,
    /// Whether the `s` axis of band `c` points left (+1) of the curve in sector `S_c`.
    pub band_orientation: Vec<i32>,
    /// Direction of `ε_c` along `s`.
    pub direction: Vec<i32>,
    /// Side of `A` carrying the fin at crossing `c`.
    pub side: Vec<i32>,
    /// Crossings along each crossed edge, in the direction of the edge.
    pub order: BTreeMap<usize, Vec<usize>>,
    pub color: Color,
    crossings: Vec<Crossing>,
}

impl CurveLayout {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn arcs_on_side(&self, z: i32) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.side[c] == z).collect()
    }

    /// Number of branch arcs on the `+1` and `-1` sides.
    pub fn n1(&self) -> usize {
        self.arcs_on_side(1).len()
    }

    pub fn n2(&self) -> usize {
        self.arcs_on_side(-1).len()
    }

    fn entry_occ(&self, c: usize) -> (usize, usize) {
        (self.crossings[c].sector, self.crossings[c].entry)
    }

    // the occurrence through which the curve leaves towards crossing c
    fn exit_occ(&self, c: usize) -> (usize, usize) {
        let m = self.len();
        let x = self.crossings[(c + m - 1) % m];
        (x.sector, x.exit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveVerdict {
    pub accepted: bool,
    pub diagnostics: Vec<String>,
    pub layout: Option<CurveLayout>,
}

pub fn validate_surgery_curve(curve: &SurgeryCurve, bs: &BranchedSurface) -> CurveVerdict {
    match analyze(curve, bs) {
        Ok(layout) => CurveVerdict { accepted: true, diagnostics: Vec::new(), layout: Some(layout) },
        Err(diagnostics) => CurveVerdict { accepted: false, diagnostics, layout: None },
    }
}

fn layout_of(curve: &SurgeryCurve, bs: &BranchedSurface) -> Result<CurveLayout> {
    analyze(curve, bs).map_err(|d| Error::InvalidCurve(d.join("; ")))
}

fn analyze(curve: &SurgeryCurve, bs: &BranchedSurface) -> std::result::Result<CurveLayout, Vec<String>> {
    let m = curve.len();
    if m == 0 {
        return Err(vec!["curve has no crossings".into()]);
    }
    let xs = &curve.crossings;
    let mut diag = Vec::new();
    for (c, x) in xs.iter().enumerate() {
        let Some(s) = bs.sectors.get(x.sector) else {
            diag.push(format!("crossing {c}: no sector {}", x.sector));
            continue;
        };
        if x.entry >= s.len() || x.exit >= s.len() {
            diag.push(format!("crossing {c}: sector {} has only {} edges", x.sector, s.len()));
            continue;
        }
        if !s.is_lowermost(x.entry) {
            diag.push(format!("crossing {c}: entry edge is not lowermost in sector {}", x.sector));
        }
        if !s.is_uppermost(x.exit) {
            diag.push(format!("crossing {c}: exit edge is not uppermost in sector {}", x.sector));
        }
        let f = s.word[x.exit].0;
        if bs.spine.one_sheeted[f] != (x.sector, x.exit) {
            diag.push(format!("crossing {c}: curve leaves sector {} through a two-sheeted side", x.sector));
        }
        if bs.spine.one_sheeted[s.word[x.entry].0] == (x.sector, x.entry) {
            diag.push(format!("crossing {c}: curve enters sector {} from its one-sheeted side", x.sector));
        }
    }
    if !diag.is_empty() {
        return Err(diag);
    }
    let edge_at = |s: usize, p: usize| bs.sectors[s].word[p];
    for c in 0..m {
        let prev = xs[(c + m - 1) % m];
        if edge_at(xs[c].sector, xs[c].entry).0 != edge_at(prev.sector, prev.exit).0 {
            diag.push(format!("crossings {} and {c} do not share an edge", (c + m - 1) % m));
        }
    }
    let color = bs.sectors[xs[0].sector].color;
    if xs.iter().any(|x| bs.sectors[x.sector].color != color) {
        diag.push("curve crosses sectors of both colours".into());
    }
    if !diag.is_empty() {
        return Err(diag);
    }

    let edges: Vec<usize> = xs.iter().map(|x| edge_at(x.sector, x.entry).0).collect();
    let occ = bs.spine.occurrences();
    let mut fins = Vec::with_capacity(m);
    for c in 0..m {
        let prev = xs[(c + m - 1) % m];
        let rest: Vec<_> = occ[edges[c]]
            .iter()
            .copied()
            .filter(|&o| o != (xs[c].sector, xs[c].entry) && o != (prev.sector, prev.exit))
            .collect();
        if rest.len() != 1 {
            return Err(vec![format!("crossing {c}: entry and exit are the same side of edge {}", edges[c])]);
        }
        fins.push(rest[0]);
    }

    let dp = |c: usize| edge_at(xs[c].sector, xs[c].entry).1;
    let dq = |c: usize| edge_at(xs[c].sector, xs[c].exit).1;
    let mut o = vec![1i32; m];
    for c in 0..m - 1 {
        o[c + 1] = -o[c] * dq(c) * dp(c + 1);
    }
    if -o[m - 1] * dq(m - 1) * dp(0) != o[0] {
        return Err(vec!["neighbourhood of the curve is a Möbius band, not an annulus".into()]);
    }
    let direction: Vec<i32> = (0..m).map(|c| o[(c + m - 1) % m] * dq((c + m - 1) % m)).collect();
    let mut hands = Vec::with_capacity(m);
    for c in 0..m {
        match bs.tracks[edges[c]].side_of(fins[c]) {
            Some(h) => hands.push(h),
            None => return Err(vec![format!("crossing {c}: fin is on the one-sheeted side")]),
        }
    }
    if hands.iter().any(|&h| h != hands[0]) {
        return Err(vec!["branch arcs on one side of the curve are not consistently oriented".into()]);
    }
    let side: Vec<i32> = (0..m).map(|c| if hands[c] == Side::Right { direction[c] } else { -direction[c] }).collect();

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (c, &e) in edges.iter().enumerate() {
        groups.entry(e).or_default().push(c);
    }
    let mut layout = CurveLayout {
        edges,
        fins,
        band_orientation: o,
        direction,
        side,
        order: groups.clone(),
        color,
        crossings: xs.clone(),
    };
    match find_order(bs, &layout, &groups) {
        Some(order) => {
            layout.order = order;
            Ok(layout)
        }
        None => Err(vec!["curve is not simple: no ordering of crossings along the edges avoids self-intersection".into()]),
    }
}

/// First ordering of crossings along the edges for which the bands in every sector are disjoint.
fn find_order(
    bs: &BranchedSurface,
    lay: &CurveLayout,
    groups: &BTreeMap<usize, Vec<usize>>,
) -> Option<BTreeMap<usize, Vec<usize>>> {
    let keys: Vec<usize> = groups.keys().copied().collect();
    let perms: Vec<Vec<Vec<usize>>> = keys.iter().map(|k| permutations(&groups[k])).collect();
    let total: usize = perms.iter().map(|p| p.len()).product();
    if total > 200_000 {
        return None;
    }
    let mut idx = vec![0usize; keys.len()];
    loop {
        let order: BTreeMap<usize, Vec<usize>> =
            keys.iter().enumerate().map(|(i, &k)| (k, perms[i][idx[i]].clone())).collect();
        if bands_disjoint(bs, lay, &order) {
            return Some(order);
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return None;
            }
            idx[i] += 1;
            if idx[i] < perms[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn permutations(xs: &[usize]) -> Vec<Vec<usize>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Entry,
    Exit,
    Fin,
}

fn role(lay: &CurveLayout, c: usize, occ: (usize, usize)) -> Role {
    if occ == lay.entry_occ(c) {
        Role::Entry
    } else if occ == lay.exit_occ(c) {
        Role::Exit
    } else {
        Role::Fin
    }
}

fn band_of(m: usize, c: usize, entry: bool) -> usize {
    if entry {
        c
    } else {
        (c + m - 1) % m
    }
}

fn bands_disjoint(bs: &BranchedSurface, lay: &CurveLayout, order: &BTreeMap<usize, Vec<usize>>) -> bool {
    let m = lay.len();
    for (s, sector) in bs.sectors.iter().enumerate() {
        let mut seq: Vec<usize> = Vec::new();
        for (r, &(e, d)) in sector.word.iter().enumerate() {
            let Some(list) = order.get(&e) else { continue };
            let mut here: Vec<usize> = list
                .iter()
                .filter_map(|&c| match role(lay, c, (s, r)) {
                    Role::Entry => Some(band_of(m, c, true)),
                    Role::Exit => Some(band_of(m, c, false)),
                    Role::Fin => None,
                })
                .collect();
            if d < 0 {
                here.reverse();
            }
            seq.extend(here);
        }
        let mut chords: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &b) in seq.iter().enumerate() {
            chords.entry(b).or_default().push(i);
        }
        let chords: Vec<(usize, usize)> = chords.values().map(|v| (v[0], v[1])).collect();
        for (i, &(a1, b1)) in chords.iter().enumerate() {
            for &(a2, b2) in &chords[i + 1..] {
                let inside = |x: usize| a1 < x && x < b1;
                if inside(a2) != inside(b2) {
                    return false;
                }
            }
        }
    }
    true
}

// --- cutting and regluing -----------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Item {
    /// `open` marks the ends (in traversal order) where the edge continues into another face.
    Edge { sub: usize, dir: i32, one: bool, open: (bool, bool) },
    Marker { crossing: usize, entry: bool },
    /// A side of band `band`: the low (`s = 0`) or high (`s = 1`) chord, `dir` along `θ`.
    Gate { band: usize, high: bool, dir: i32 },
}

impl Item {
    fn reversed(self) -> Item {
        match self {
            Item::Edge { sub, dir, one, open } => Item::Edge { sub, dir: -dir, one, open: (open.1, open.0) },
            Item::Gate { band, high, dir } => Item::Gate { band, high, dir: -dir },
            m => m,
        }
    }
}

/// The subdivision of crossed edges by the vertices on their arcs.
struct SubEdges {
    ids: Vec<Vec<usize>>,
    ends: Vec<(usize, usize)>,
    base: Vec<usize>,
    nverts: Vec<usize>,
}

impl SubEdges {
    /// `verts[c]` lists the vertices on arc `c` by increasing `s`.
    fn build(spine: &Spine, lay: &CurveLayout, verts: &[Vec<usize>]) -> SubEdges {
        let mut ids: Vec<Vec<usize>> = (0..spine.edges.len()).map(|e| vec![e]).collect();
        let mut ends = spine.edges.clone();
        let mut base = vec![0; lay.len()];
        for (&e, list) in &lay.order {
            let (tail, head) = spine.edges[e];
            let mut path = vec![tail];
            for &c in list {
                base[c] = path.len() - 1;
                if lay.direction[c] > 0 {
                    path.extend(verts[c].iter().copied());
                } else {
                    path.extend(verts[c].iter().rev().copied());
                }
            }
            path.push(head);
            ends[e] = (path[0], path[1]);
            for w in path[1..].windows(2) {
                ids[e].push(ends.len());
                ends.push((w[0], w[1]));
            }
        }
        SubEdges { ids, ends, base, nverts: verts.iter().map(|v| v.len()).collect() }
    }

    /// Segment `idx` of arc `c`, counted by increasing `s`.
    fn arc(&self, lay: &CurveLayout, c: usize, idx: usize) -> usize {
        let nseg = self.nverts[c] + 1;
        let k = if lay.direction[c] > 0 { idx } else { nseg - 1 - idx };
        self.ids[lay.edges[c]][self.base[c] + k]
    }
}

/// Cuts every sector along the bands. Chords of bands become gates.
fn pieces(bs: &BranchedSurface, lay: &CurveLayout, subs: &SubEdges) -> Result<Vec<Vec<Item>>> {
    let m = lay.len();
    let mut out = Vec::new();
    for (s, sector) in bs.sectors.iter().enumerate() {
        let mut items: Vec<Item> = Vec::new();
        for (r, &(e, d)) in sector.word.iter().enumerate() {
            let one = bs.spine.one_sheeted[e] == (s, r);
            let Some(list) = lay.order.get(&e) else {
                items.push(Item::Edge { sub: e, dir: d, one, open: (false, false) });
                continue;
            };
            let edge = |k: usize, start: bool| Item::Edge { sub: subs.ids[e][k], dir: 1, one, open: (start, false) };
            let mut run = vec![edge(0, false)];
            let mut cur = 0;
            for &c in list {
                match role(lay, c, (s, r)) {
                    Role::Fin => {
                        for _ in 0..subs.nverts[c] {
                            cur += 1;
                            run.push(edge(cur, false));
                        }
                    }
                    rl => {
                        if let Some(Item::Edge { open, .. }) = run.last_mut() {
                            open.1 = true;
                        }
                        run.push(Item::Marker { crossing: c, entry: rl == Role::Entry });
                        cur += subs.nverts[c];
                        run.push(edge(cur, true));
                    }
                }
            }
            if d < 0 {
                run = run.into_iter().rev().map(Item::reversed).collect();
            }
            items.extend(run);
        }

        let n = items.len();
        let mut pos: HashMap<(usize, bool), usize> = HashMap::new();
        for (i, it) in items.iter().enumerate() {
            if let Item::Marker { crossing, entry } = *it {
                pos.insert((crossing, entry), i);
            }
        }
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] || !matches!(items[start], Item::Edge { .. }) {
                continue;
            }
            let mut piece = Vec::new();
            let mut i = start;
            loop {
                match items[i] {
                    Item::Edge { .. } => {
                        if seen[i] {
                            if i != start {
                                return Err(Error::InternalInconsistency(format!(
                                    "sector {s} does not split into discs along the curve"
                                )));
                            }
                            break;
                        }
                        seen[i] = true;
                        piece.push(items[i]);
                        i = (i + 1) % n;
                    }
                    Item::Marker { crossing, entry } => {
                        let band = band_of(m, crossing, entry);
                        let t = if entry { 1 } else { -1 };
                        piece.push(Item::Gate { band, high: t * lay.band_orientation[band] > 0, dir: t });
                        let partner = if entry { ((crossing + 1) % m, false) } else { ((crossing + m - 1) % m, true) };
                        let j = *pos.get(&partner).ok_or_else(|| {
                            Error::InternalInconsistency(format!("band {band} does not cross sector {s}"))
                        })?;
                        i = (j + 1) % n;
                    }
                    Item::Gate { .. } => unreachable!(),
                }
            }
            out.push(piece);
        }
    }
    Ok(out)
}

/// Glues faces along matching gates until none are left.
fn splice(mut faces: Vec<Vec<Item>>) -> Result<Vec<Vec<Item>>> {
    let gate_key = |it: &Item| match *it {
        Item::Gate { band, high, .. } => Some((band, high)),
        _ => None,
    };
    let mut i = 0;
    while i < faces.len() {
        let Some(g) = faces[i].iter().position(|it| gate_key(it).is_some()) else {
            i += 1;
            continue;
        };
        let key = gate_key(&faces[i][g]).unwrap();
        let others: Vec<(usize, usize)> = faces
            .iter()
            .enumerate()
            .flat_map(|(f, w)| w.iter().enumerate().map(move |(p, it)| (f, p, *it)))
            .filter(|&(f, p, it)| gate_key(&it) == Some(key) && (f, p) != (i, g))
            .map(|(f, p, _)| (f, p))
            .collect();
        let &[(j, h)] = others.as_slice() else {
            return Err(Error::InternalInconsistency(format!("gate {key:?} is not shared by exactly two faces")));
        };
        if j == i {
            return Err(Error::InternalInconsistency(format!("a face is glued to itself along gate {key:?}")));
        }
        let mut a = faces[i].clone();
        a.rotate_left(g);
        let mut b = faces[j].clone();
        b.rotate_left(h);
        let (Item::Gate { dir: da, .. }, Item::Gate { dir: db, .. }) = (a[0], b[0]) else { unreachable!() };
        if da == db {
            b = b.into_iter().rev().map(Item::reversed).collect();
            b.rotate_right(1);
        }
        let mut merged: Vec<Item> = a[1..].to_vec();
        merged.extend_from_slice(&b[1..]);
        faces[i] = merged;
        faces.remove(j);
        if j < i {
            i -= 1;
        }
    }
    Ok(faces)
}

/// Turns finished faces into a spine, merging the parts of an edge that were cut apart.
fn assemble(vertex_count: usize, ends: Vec<(usize, usize)>, faces: Vec<Vec<Item>>) -> Result<Spine> {
    let mut sectors = Vec::with_capacity(faces.len());
    let mut one_sheeted = vec![None; ends.len()];
    for face in faces {
        let mut w: Vec<(usize, i32, bool, (bool, bool))> = Vec::with_capacity(face.len());
        let joins = |a: &(usize, i32, bool, (bool, bool)), b: &(usize, i32, bool, (bool, bool))| {
            a.3 .1 && b.3 .0 && a.0 == b.0 && a.1 == b.1
        };
        for it in face {
            let Item::Edge { sub, dir, one, open } = it else {
                return Err(Error::InternalInconsistency("unglued gate".into()));
            };
            let cur = (sub, dir, one, open);
            match w.last_mut() {
                Some(last) if joins(last, &cur) => {
                    if last.2 != one {
                        return Err(Error::InternalInconsistency(format!("edge {sub} changes sheets")));
                    }
                    last.3 .1 = open.1;
                }
                _ => w.push(cur),
            }
        }
        while w.len() > 1 && joins(&w[w.len() - 1], &w[0]) {
            let first = w.remove(0);
            let last = w.last_mut().unwrap();
            if last.2 != first.2 {
                return Err(Error::InternalInconsistency(format!("edge {} changes sheets", first.0)));
            }
            last.3 .1 = first.3 .1;
        }
        let s = sectors.len();
        for (p, &(sub, _, one, _)) in w.iter().enumerate() {
            if one {
                if one_sheeted[sub].is_some() {
                    return Err(Error::InternalInconsistency(format!("edge {sub} has two one-sheeted sides")));
                }
                one_sheeted[sub] = Some((s, p));
            }
        }
        sectors.push(w.iter().map(|&(e, d, _, _)| (e, d)).collect::<Vec<Letter>>());
    }
    let one_sheeted = one_sheeted
        .into_iter()
        .enumerate()
        .map(|(e, o)| o.ok_or_else(|| Error::InternalInconsistency(format!("edge {e} has no one-sheeted side"))))
        .collect::<Result<Vec<_>>>()?;
    let spine = Spine { vertex_count, edges: ends, sectors, one_sheeted };
    spine.validate()?;
    Ok(spine)
}

// --- surgery ---------------------------------------------------------------

/// Direction of the shear relative to the orientation of the sheared arcs. Fixed by
/// matching the reference signatures of the surgered triangulations.
const TWIST: i32 = 1;

#[derive(Clone, Copy, Debug)]
enum End {
    Gate(usize),
    Vertex,
}

#[derive(Clone, Debug)]
struct Region {
    bottom: End,
    top: End,
    left: Vec<(usize, usize)>,
    right: Vec<(usize, usize)>,
}

/// Faces of `A` after shearing the `+1` arcs by `k` turns. Returns the faces (as segment
/// chains) and the vertices on every arc.
fn sweep(lay: &CurveLayout, k: usize, first_vertex: usize) -> (Vec<Region>, Vec<Vec<usize>>) {
    let m = lay.len();
    let spiral: Vec<bool> = lay.side.iter().map(|&z| z > 0).collect();
    let e_plus = (0..m).find(|&c| spiral[c]).map_or(1, |c| lay.direction[c]);
    let sgn = TWIST * e_plus;
    let steps = k * m;
    let mut order: Vec<usize> = (0..m).collect();
    let mut regions: Vec<Region> = (0..m)
        .map(|c| Region { bottom: End::Gate(c), top: End::Vertex, left: Vec::new(), right: Vec::new() })
        .collect();
    let mut gaps: Vec<usize> = (0..m).collect();
    let mut verts: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut next_vertex = first_vertex;
    let pos = |c: usize, step: usize| -> usize {
        let shift = if spiral[c] { (sgn as i64 * step as i64).rem_euclid(m as i64) as usize } else { 0 };
        (c + shift) % m
    };
    for step in 1..steps {
        let hits: Vec<usize> = (0..m)
            .filter(|&i| {
                let (p, q) = (order[i], order[(i + 1) % m]);
                let moving = if sgn > 0 { p } else { q };
                let fixed = if sgn > 0 { q } else { p };
                spiral[moving] && !spiral[fixed] && pos(moving, step) == fixed
            })
            .collect();
        for i in hits {
            let j = (i + 1) % m;
            let (p, q) = (order[i], order[j]);
            let v = next_vertex;
            next_vertex += 1;
            let sp = (p, verts[p].len());
            let sq = (q, verts[q].len());
            verts[p].push(v);
            verts[q].push(v);
            let il = (i + m - 1) % m;
            regions[gaps[il]].right.push(sp);
            regions[gaps[j]].left.push(sq);
            let mid = gaps[i];
            regions[mid].left.push(sp);
            regions[mid].right.push(sq);
            regions[mid].top = End::Vertex;
            regions.push(Region { bottom: End::Vertex, top: End::Vertex, left: Vec::new(), right: Vec::new() });
            gaps[i] = regions.len() - 1;
            order.swap(i, j);
        }
    }
    for i in 0..m {
        let (p, q) = (order[i], order[(i + 1) % m]);
        debug_assert_eq!(q, (p + 1) % m);
        let r = &mut regions[gaps[i]];
        r.left.push((p, verts[p].len()));
        r.right.push((q, verts[q].len()));
        r.top = End::Gate(p);
    }
    (regions, verts)
}

/// The spine of the (1,k)-vertical surgery along a validated curve.
pub fn surgered_spine(bs: &BranchedSurface, lay: &CurveLayout, k: usize) -> Result<Spine> {
    let n = bs.spine.vertex_count;
    let (regions, verts) = sweep(lay, k, n);
    let vertex_count = n + verts.iter().map(|v| v.len()).sum::<usize>() / 2;
    let subs = SubEdges::build(&bs.spine, lay, &verts);
    let mut faces = pieces(bs, lay, &subs)?;
    let seg = |(c, idx): (usize, usize), up: bool| {
        let last = subs.nverts[c];
        Item::Edge {
            sub: subs.arc(lay, c, idx),
            dir: if up { lay.direction[c] } else { -lay.direction[c] },
            one: up,
            open: if up { (idx == 0, idx == last) } else { (idx == last, idx == 0) },
        }
    };
    for r in &regions {
        let mut w = Vec::new();
        if let End::Gate(c) = r.bottom {
            w.push(Item::Gate { band: c, high: false, dir: 1 });
        }
        w.extend(r.right.iter().map(|&s| seg(s, true)));
        if let End::Gate(c) = r.top {
            w.push(Item::Gate { band: c, high: true, dir: -1 });
        }
        w.extend(r.left.iter().rev().map(|&s| seg(s, false)));
        faces.push(w);
    }
    let faces = splice(faces)?;
    assemble(vertex_count, subs.ends, faces)
}

/// (1,k)-vertical surgery. The result is veering with `n + k·n1·n2` tetrahedra.
pub fn vertical_surgery(
    tri: &Triangulation,
    taut: &TautStructure,
    curve: &SurgeryCurve,
    k: usize,
) -> Result<(Triangulation, TautStructure)> {
    let bs = BranchedSurface::build(tri, taut)?;
    let lay = layout_of(curve, &bs)?;
    let spine = surgered_spine(&bs, &lay, k)?;
    let (t, tt) = spine.dualize()?;
    check_veering(&t, &tt)?;
    let want = tri.size() + k * lay.n1() * lay.n2();
    if t.size() != want {
        return Err(Error::InternalInconsistency(format!("surgery produced {} tetrahedra, expected {want}", t.size())));
    }
    Ok((t, tt))
}

// --- blowing up ------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BlowUp {
    pub spine: Spine,
    pub layout: CurveLayout,
    /// Vertex where arc `c` meets the low suture `λ` (`s = 0`), and the high one `λ'`.
    pub low_vertices: Vec<usize>,
    pub high_vertices: Vec<usize>,
    /// The edge carrying arc `c`.
    pub arcs: Vec<usize>,
    /// Low suture edge from crossing `c` to `c + 1`, and the high one.
    pub low_sutures: Vec<usize>,
    pub high_sutures: Vec<usize>,
    /// Each crossed edge as a path of new edges, in its own direction.
    pub edge_paths: BTreeMap<usize, Vec<usize>>,
    /// Sectors of the tube, for the `+1` side and the `-1` side.
    pub tube_sectors: Vec<usize>,
}

pub fn blow_up(tri: &Triangulation, taut: &TautStructure, curve: &SurgeryCurve) -> Result<BlowUp> {
    let bs = BranchedSurface::build(tri, taut)?;
    let lay = layout_of(curve, &bs)?;
    blow_up_surface(&bs, &lay)
}

pub fn blow_up_surface(bs: &BranchedSurface, lay: &CurveLayout) -> Result<BlowUp> {
    let m = lay.len();
    let mut low = vec![0; m];
    let mut high = vec![0; m];
    let mut next = bs.spine.vertex_count;
    for list in lay.order.values() {
        for &c in list {
            let (a, b) = if lay.direction[c] > 0 { (&mut low, &mut high) } else { (&mut high, &mut low) };
            a[c] = next;
            b[c] = next + 1;
            next += 2;
        }
    }
    let verts: Vec<Vec<usize>> = (0..m).map(|c| vec![low[c], high[c]]).collect();
    let subs = SubEdges::build(&bs.spine, lay, &verts);
    let mut ends = subs.ends.clone();
    let suture = |vs: &[usize], ends: &mut Vec<(usize, usize)>| -> Vec<usize> {
        (0..m)
            .map(|c| {
                ends.push((vs[c], vs[(c + 1) % m]));
                ends.len() - 1
            })
            .collect()
    };
    let low_sutures = suture(&low, &mut ends);
    let high_sutures = suture(&high, &mut ends);
    let arcs: Vec<usize> = (0..m).map(|c| subs.arc(lay, c, 1)).collect();

    let mut faces = pieces(bs, lay, &subs)?;
    for face in &mut faces {
        for it in face.iter_mut() {
            if let Item::Gate { band, high, dir } = *it {
                let sub = if high { high_sutures[band] } else { low_sutures[band] };
                *it = Item::Edge { sub, dir, one: true, open: (false, false) };
            }
        }
    }
    let edge = |sub: usize, dir: i32, one: bool| Item::Edge { sub, dir, one, open: (false, false) };
    let mut tube_sectors = Vec::new();
    for z in [1, -1] {
        let on = lay.arcs_on_side(z);
        for (i, &a) in on.iter().enumerate() {
            let b = on[(i + 1) % on.len()];
            let span = (b + m - a - 1) % m + 1;
            let mut w = Vec::new();
            for t in 0..span {
                w.push(edge(low_sutures[(a + t) % m], 1, false));
            }
            w.push(edge(arcs[b], lay.direction[b], true));
            for t in (0..span).rev() {
                w.push(edge(high_sutures[(a + t) % m], -1, false));
            }
            w.push(edge(arcs[a], -lay.direction[a], false));
            tube_sectors.push(faces.len());
            faces.push(w);
        }
    }
    let spine = assemble(next, ends, faces)?;
    let edge_paths = lay.order.keys().map(|&e| (e, subs.ids[e].clone())).collect();
    Ok(BlowUp {
        spine,
        layout: lay.clone(),
        low_vertices: low,
        high_vertices: high,
        arcs,
        low_sutures,
        high_sutures,
        edge_paths,
        tube_sectors,
    })
}

// --- filling slope ---------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingSlope {
    pub mu: Vec<Letter>,
    pub lambda: Vec<Letter>,
    pub k: usize,
    /// `μ λ^k`.
    pub slope: Vec<Letter>,
}

/// Meridian and longitude on the tube, both based at the low end of the first `+1` arc.
///
/// `λ` runs along the low suture in the direction of the curve. `μ` goes up the first `+1`
/// arc, along the high suture to the first `-1` arc, down it and back along the low suture.
pub fn filling_slope(b: &BlowUp, k: usize) -> Result<FillingSlope> {
    let lay = &b.layout;
    let m = lay.len();
    let (Some(&a), Some(&c)) = (lay.arcs_on_side(1).first(), lay.arcs_on_side(-1).first()) else {
        return Err(Error::InvalidCurve("the curve needs branch arcs on both sides".into()));
    };
    let lambda: Vec<Letter> = (0..m).map(|t| (b.low_sutures[(a + t) % m], 1)).collect();
    let span = (c + m - a) % m;
    let mut mu: Vec<Letter> = vec![(b.arcs[a], lay.direction[a])];
    // for the base example this runs against both arcs, as in the reference word
    mu.extend((0..span).map(|t| (b.high_sutures[(a + t) % m], 1)));
    mu.push((b.arcs[c], -lay.direction[c]));
    mu.extend((0..span).rev().map(|t| (b.low_sutures[(a + t) % m], -1)));
    let mut slope = mu.clone();
    for _ in 0..k {
        slope.extend_from_slice(&lambda);
    }
    b.spine.check_cycle(&mu)?;
    b.spine.check_cycle(&lambda)?;
    b.spine.check_cycle(&slope)?;
    Ok(FillingSlope { mu, lambda, k, slope })
}
