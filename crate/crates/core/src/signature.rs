//! Taut signatures `isoSig_angles`.
//!
//! The isomorphism signature is the lexicographically smallest encoding of a
//! breadth-first relabelling of the triangulation over every choice of starting
//! tetrahedron and starting vertex labelling. The angle string lists, for every
//! tetrahedron in the canonical order, which pair of opposite edges carries angle π.

use crate::error::{Error, Result};
use crate::perm::{edge_index, edge_pair, Perm4, EDGE_VERTICES};
use crate::triangulation::{check_taut, TautStructure, TautVerdict, Triangulation};

fn char_of(v: u32) -> char {
    let v = v as u8;
    match v {
        0..=25 => (b'a' + v) as char,
        26..=51 => (b'A' + v - 26) as char,
        52..=61 => (b'0' + v - 52) as char,
        62 => '+',
        63 => '-',
        _ => unreachable!(),
    }
}

fn value_of(c: char) -> Option<u32> {
    let v = match c {
        'a'..='z' => c as u32 - 'a' as u32,
        'A'..='Z' => c as u32 - 'A' as u32 + 26,
        '0'..='9' => c as u32 - '0' as u32 + 52,
        '+' => 62,
        '-' => 63,
        _ => return None,
    };
    Some(v)
}

fn append_value(out: &mut String, mut value: usize, n_chars: usize) {
    for _ in 0..n_chars {
        out.push(char_of((value & 0x3f) as u32));
        value >>= 6;
    }
}

fn chars_for(n: usize) -> usize {
    let mut k = 0;
    let mut t = n;
    while t > 0 {
        t >>= 6;
        k += 1;
    }
    k
}

/// Result of encoding from one starting point: the signature and the relabelling used.
struct Labelling {
    sig: String,
    tet_map: Vec<usize>,
    vertex_maps: Vec<Perm4>,
}

fn encode_from(tri: &Triangulation, start: usize, vertices: Perm4) -> Labelling {
    let n = tri.size();
    let mut image = vec![usize::MAX; n];
    let mut pre_image = vec![usize::MAX; n];
    let mut vertex_map = vec![Perm4::IDENTITY; n];
    image[start] = 0;
    pre_image[0] = start;
    vertex_map[start] = vertices.inverse();
    let mut actions = Vec::with_capacity(2 * n);
    let mut join_dest = Vec::new();
    let mut join_gluing = Vec::new();
    let mut next_unused = 1;
    for simp_img in 0..n {
        let src = pre_image[simp_img];
        for facet_img in 0..4 {
            let facet_src = vertex_map[src].pre_image_of(facet_img);
            let (dest, g) = tri.adjacent(src, facet_src);
            let dest_img = image[dest];
            if dest_img != usize::MAX
                && (dest_img < simp_img
                    || (dest_img == simp_img && vertex_map[src].apply(g.apply(facet_src)) < facet_img))
            {
                continue;
            }
            if dest_img == usize::MAX {
                image[dest] = next_unused;
                pre_image[next_unused] = dest;
                vertex_map[dest] = vertex_map[src].compose(g.inverse());
                next_unused += 1;
                actions.push(1u8);
                continue;
            }
            actions.push(2u8);
            join_dest.push(dest_img);
            join_gluing.push(vertex_map[dest].compose(g).compose(vertex_map[src].inverse()));
        }
    }
    let n_chars = chars_for(n);
    let mut sig = String::new();
    if n_chars <= 1 {
        sig.push(char_of(n as u32));
    } else {
        sig.push(char_of(63));
        sig.push(char_of(n_chars as u32));
        append_value(&mut sig, n, n_chars);
    }
    for chunk in actions.chunks(3) {
        let mut v = 0u32;
        for (k, &a) in chunk.iter().enumerate() {
            v |= (a as u32) << (2 * k);
        }
        sig.push(char_of(v));
    }
    for &d in &join_dest {
        append_value(&mut sig, d, n_chars);
    }
    for g in &join_gluing {
        append_value(&mut sig, g.s4_index(), 1);
    }
    Labelling { sig, tet_map: image, vertex_maps: vertex_map }
}

/// Canonical isomorphism signature of a connected closed triangulation.
pub fn iso_sig(tri: &Triangulation) -> String {
    canonical_labellings(tri).0
}

fn canonical_labellings(tri: &Triangulation) -> (String, Vec<Labelling>) {
    let mut best: Option<String> = None;
    let mut ties = Vec::new();
    for start in 0..tri.size() {
        for p in Perm4::all() {
            let lab = encode_from(tri, start, p);
            match &best {
                Some(b) if lab.sig.as_bytes() > b.as_bytes() => {}
                Some(b) if lab.sig == *b => ties.push(lab),
                _ => {
                    best = Some(lab.sig.clone());
                    ties.clear();
                    ties.push(lab);
                }
            }
        }
    }
    (best.expect("non-empty triangulation"), ties)
}

/// Decodes an isomorphism signature of a closed, connected triangulation.
pub fn decode_iso_sig(sig: &str) -> Result<Triangulation> {
    let bad = |msg: &str| Error::MalformedSignature(format!("{sig:?}: {msg}"));
    let values: Vec<u32> = sig
        .chars()
        .map(|c| value_of(c).ok_or_else(|| bad(&format!("character {c:?} outside the alphabet"))))
        .collect::<Result<_>>()?;
    let mut pos = 0;
    let mut next = |pos: &mut usize| -> Result<u32> {
        let v = *values.get(*pos).ok_or_else(|| bad("truncated"))?;
        *pos += 1;
        Ok(v)
    };
    let read_value = |pos: &mut usize, n_chars: usize, next: &mut dyn FnMut(&mut usize) -> Result<u32>| -> Result<usize> {
        let mut v = 0usize;
        for k in 0..n_chars {
            v |= (next(pos)? as usize) << (6 * k);
        }
        Ok(v)
    };
    let first = next(&mut pos)?;
    let (n, n_chars) = if first < 63 {
        (first as usize, 1)
    } else {
        let n_chars = next(&mut pos)? as usize;
        (read_value(&mut pos, n_chars, &mut next)?, n_chars)
    };
    if n == 0 {
        return Err(bad("empty triangulation"));
    }
    let total = 4 * n;
    let mut actions = Vec::new();
    let mut covered = 0;
    while covered < total {
        let c = next(&mut pos)?;
        for k in 0..3 {
            let a = ((c >> (2 * k)) & 3) as u8;
            if covered >= total {
                break;
            }
            match a {
                0 => return Err(bad("boundary facets are not supported")),
                1 | 2 => covered += 2,
                _ => return Err(bad("invalid facet action")),
            }
            if covered > total {
                return Err(bad("facet actions overrun"));
            }
            actions.push(a);
        }
    }
    let joins = actions.iter().filter(|&&a| a == 2).count();
    let mut dests = Vec::with_capacity(joins);
    for _ in 0..joins {
        dests.push(read_value(&mut pos, n_chars, &mut next)?);
    }
    let mut gluings = Vec::with_capacity(joins);
    for _ in 0..joins {
        let idx = next(&mut pos)? as usize;
        gluings.push(Perm4::from_s4_index(idx).ok_or_else(|| bad("permutation index out of range"))?);
    }
    if pos != values.len() {
        return Err(bad("trailing characters"));
    }
    let mut adj: Vec<[Option<(usize, Perm4)>; 4]> = vec![[None; 4]; n];
    let mut next_unused = 1;
    let mut action_pos = 0;
    let mut join_pos = 0;
    for t in 0..n {
        for f in 0..4 {
            if adj[t][f].is_some() {
                continue;
            }
            let a = *actions.get(action_pos).ok_or_else(|| bad("too few facet actions"))?;
            action_pos += 1;
            let (u, g) = if a == 1 {
                if next_unused >= n {
                    return Err(bad("too many new tetrahedra"));
                }
                next_unused += 1;
                (next_unused - 1, Perm4::IDENTITY)
            } else {
                let u = dests[join_pos];
                let g = gluings[join_pos];
                join_pos += 1;
                if u >= next_unused {
                    return Err(bad("join to an unseen tetrahedron"));
                }
                (u, g)
            };
            let j = g.apply(f);
            if adj[u][j].is_some() || (u == t && j == f) {
                return Err(bad("facet glued twice"));
            }
            adj[t][f] = Some((u, g));
            adj[u][j] = Some((t, g.inverse()));
        }
    }
    if action_pos != actions.len() || next_unused != n {
        return Err(bad("inconsistent facet actions"));
    }
    let adj = adj
        .into_iter()
        .map(|row| row.map(|x| x.expect("all facets glued")))
        .collect();
    Triangulation::new(adj)
}

/// A taut signature string, split into its two parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TautSignature {
    pub iso_sig: String,
    pub angle_string: String,
}

impl TautSignature {
    pub fn parse(s: &str) -> Result<TautSignature> {
        let s = s.trim();
        let (iso, angles) = s
            .split_once('_')
            .ok_or_else(|| Error::MalformedSignature(format!("{s:?}: missing '_' separator")))?;
        if iso.is_empty() || angles.is_empty() {
            return Err(Error::MalformedSignature(format!("{s:?}: empty part")));
        }
        if let Some(c) = angles.chars().find(|c| !matches!(c, '0' | '1' | '2')) {
            return Err(Error::MalformedSignature(format!("{s:?}: angle digit {c:?}")));
        }
        if let Some(c) = iso.chars().find(|&c| value_of(c).is_none()) {
            return Err(Error::MalformedSignature(format!("{s:?}: character {c:?} outside the alphabet")));
        }
        Ok(TautSignature { iso_sig: iso.to_string(), angle_string: angles.to_string() })
    }
}

impl std::fmt::Display for TautSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_{}", self.iso_sig, self.angle_string)
    }
}

impl std::str::FromStr for TautSignature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TautSignature::parse(s)
    }
}

/// Decodes a taut signature into a triangulation and its taut structure.
pub fn decode_taut_signature(sig: &TautSignature) -> Result<(Triangulation, TautStructure)> {
    let tri = decode_iso_sig(&sig.iso_sig)?;
    if tri.orientation().is_none() {
        return Err(Error::NonOrientable);
    }
    let angles: Vec<u8> = sig.angle_string.bytes().map(|b| b - b'0').collect();
    if angles.len() != tri.size() {
        return Err(Error::AngleCountMismatch { angles: angles.len(), tetrahedra: tri.size() });
    }
    let taut = TautStructure::from_angles(&tri, &angles)?;
    if let TautVerdict::Rejected(msg) = check_taut(&tri, &taut) {
        return Err(Error::NotTaut(msg));
    }
    Ok((tri, taut))
}

pub fn decode_str(s: &str) -> Result<(Triangulation, TautStructure)> {
    decode_taut_signature(&TautSignature::parse(s)?)
}

/// Canonical taut signature. Among canonical labellings (which differ by automorphisms
/// of the triangulation) the smallest angle string is chosen. Angle strings do not see
/// the coorientation, so both global coorientations give the same signature.
pub fn encode_taut_signature(tri: &Triangulation, taut: &TautStructure) -> Result<TautSignature> {
    if let TautVerdict::Rejected(msg) = check_taut(tri, taut) {
        return Err(Error::NotTaut(msg));
    }
    let (iso, labellings) = canonical_labellings(tri);
    let angle_string = labellings
        .iter()
        .map(|lab| relabelled_angles(&taut.angles, lab))
        .min()
        .expect("at least one canonical labelling");
    Ok(TautSignature { iso_sig: iso, angle_string })
}

fn relabelled_angles(angles: &[u8], lab: &Labelling) -> String {
    let mut out = vec![b'0'; angles.len()];
    for (t, &a) in angles.iter().enumerate() {
        let (x, y) = EDGE_VERTICES[a as usize];
        let vm = lab.vertex_maps[t];
        let p = edge_pair(edge_index(vm.apply(x), vm.apply(y)));
        out[lab.tet_map[t]] = b'0' + p as u8;
    }
    String::from_utf8(out).unwrap()
}

/// Reads a census file: one taut signature per line, blank lines and `#` comments ignored.
pub fn parse_census(text: &str) -> Result<Vec<TautSignature>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(TautSignature::parse)
        .collect()
}
