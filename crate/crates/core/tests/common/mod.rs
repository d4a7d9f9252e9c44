#![allow(dead_code)]

use veerkit::algebra::LaurentPoly;
use veerkit::branched_surface::BranchedSurface;
use veerkit::group_theory::{Character, FreeWord, Presentation};
use veerkit::signature::{decode_str, parse_census, TautSignature};
use veerkit::surgery::SurgeryCurve;
use veerkit::triangulation::{spanning_tree, SpanningTree, TautStructure, TreeStrategy, Triangulation};

pub const V0: &str = "iLLAwQcccedfghhhlnhcqeesr_12001122";
pub const REMARK_SIG: &str = "jLLAMLQacdefgihiijkaqqhuuwj_200210022";

pub const FAMILY: &str = include_str!("../../fixtures/family.txt");
pub const CENSUS: &str = include_str!("../../fixtures/census_lt8.txt");
pub const FOX_TERMS: &str = include_str!("../../fixtures/fox_terms.txt");
pub const DRILLED: &str = include_str!("../../fixtures/presentation_drilled.txt");
pub const BLOWN_UP: &str = include_str!("../../fixtures/presentation_blown_up.txt");
pub const SIMPLIFICATION: &str = include_str!("../../fixtures/simplification_map.txt");
pub const LAMBDA0: &str = include_str!("../../fixtures/lambda0.json");
pub const SIGMA2: &str = include_str!("../../fixtures/sigma2_curve.json");

/// Dual edges of V0 as `(lower tet, upper tet)`, in the reference face order.
pub const REFERENCE_PAIRS: [(usize, usize); 16] = [
    (3, 0),
    (0, 2),
    (2, 0),
    (0, 1),
    (1, 2),
    (1, 4),
    (4, 1),
    (2, 3),
    (3, 5),
    (5, 3),
    (7, 4),
    (4, 6),
    (5, 7),
    (6, 5),
    (6, 7),
    (7, 6),
];

pub const REFERENCE_TREE: [usize; 7] = [0, 4, 6, 8, 11, 12, 15];

pub fn family() -> Vec<TautSignature> {
    parse_census(FAMILY).unwrap()
}

pub fn census() -> Vec<TautSignature> {
    parse_census(CENSUS).unwrap()
}

pub fn v0() -> (Triangulation, TautStructure) {
    decode_str(V0).unwrap()
}

pub fn b0() -> BranchedSurface {
    let (tri, taut) = v0();
    BranchedSurface::build(&tri, &taut).unwrap()
}

pub fn lambda0() -> SurgeryCurve {
    SurgeryCurve::from_json(LAMBDA0).unwrap()
}

pub fn sigma2() -> SurgeryCurve {
    SurgeryCurve::from_json(SIGMA2).unwrap()
}

/// `to_reference[f]` is the reference label of our face `f`. Tetrahedra already agree, and
/// no two faces of V0 have the same (tail, head), so the dual graph pins the labels down.
pub fn to_reference(bs: &BranchedSurface) -> Vec<usize> {
    bs.spine
        .edges
        .iter()
        .map(|e| REFERENCE_PAIRS.iter().position(|p| p == e).expect("dual edge not in the reference list"))
        .collect()
}

pub fn from_reference(bs: &BranchedSurface) -> Vec<usize> {
    let fwd = to_reference(bs);
    let mut inv = vec![0; fwd.len()];
    for (f, &p) in fwd.iter().enumerate() {
        inv[p] = f;
    }
    inv
}

pub fn reference_tree(bs: &BranchedSurface) -> SpanningTree {
    let fp = from_reference(bs);
    spanning_tree(&bs.dual_graph(), &TreeStrategy::Prescribed(REFERENCE_TREE.iter().map(|&p| fp[p]).collect())).unwrap()
}

pub fn a(s: &str) -> LaurentPoly {
    LaurentPoly::parse(s, 1).unwrap()
}

pub const D0: [[&str; 16]; 8] = [
    ["-a", "-a", "0", "0", "0", "0", "0", "1", "-a", "1", "0", "0", "0", "0", "0", "0"],
    ["1", "0", "1", "0", "-1", "0", "-1", "0", "0", "-1", "-1", "0", "-a", "0", "0", "0"],
    ["0", "0", "-1", "-1", "1", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0"],
    ["-1", "0", "0", "1", "-a", "-1", "1", "-1", "0", "0", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "-a", "-a", "0", "-1", "0", "-1", "1", "0", "0", "-1", "0", "1", "0", "0"],
    ["0", "0", "0", "0", "0", "1", "-a", "0", "0", "0", "1", "-a", "0", "0", "-a", "0"],
    ["0", "0", "0", "0", "0", "0", "0", "0", "-1", "-1", "-1", "1", "-1", "-a", "0", "1-a"],
    ["0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "1", "-1", "0", "-1"],
];

pub fn drilled() -> Presentation {
    Presentation::parse(DRILLED).unwrap()
}

/// ω = -1 on every generator, π = (1, c, 1).
pub fn reference_character() -> Character {
    Character { omega: vec![-1, -1, -1], pi: vec![vec![0], vec![1], vec![0]], nvars: 1 }
}

pub struct FoxTerm {
    pub relator: usize,
    pub generator: usize,
    pub word: FreeWord,
    pub sign: i32,
    pub image: (i32, i64),
}

// "+c^{-2}" -> (1, -2)
pub fn parse_image(s: &str) -> (i32, i64) {
    let (sign, rest) = s.split_at(1);
    let sign = if sign == "+" { 1 } else { -1 };
    let exp = match rest {
        "1" => 0,
        "c" => 1,
        _ => rest.trim_start_matches("c^{").trim_end_matches('}').parse().unwrap(),
    };
    (sign, exp)
}

pub fn fox_terms(p: &Presentation) -> Vec<FoxTerm> {
    FOX_TERMS
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.split('|').map(str::trim).collect();
            let head: Vec<&str> = parts[0].split_whitespace().collect();
            let (sign, word) = parts[1].split_at(1);
            FoxTerm {
                relator: head[0][1..].parse::<usize>().unwrap() - 1,
                generator: p.generator_index(head[1]).unwrap(),
                word: p.parse_word(word).unwrap(),
                sign: if sign == "+" { 1 } else { -1 },
                image: parse_image(parts[2]),
            }
        })
        .collect()
}

pub fn sorted_terms(mut v: Vec<(FreeWord, i32)>) -> Vec<(FreeWord, i32)> {
    v.sort();
    v
}

/// Images of the blown-up spine generators in the three-generator presentation.
pub fn simplification_images(blown: &Presentation, drilled: &Presentation) -> Vec<FreeWord> {
    let mut images = vec![None; blown.generators.len()];
    for l in SIMPLIFICATION.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let (lhs, rhs) = l.split_once('=').unwrap();
        let g = blown.generator_index(lhs.trim()).unwrap();
        images[g] = Some(drilled.parse_word(rhs).unwrap());
    }
    images.into_iter().map(|w| w.expect("every generator has an image")).collect()
}

/// Meridian and longitude of the drilled curve, pushed into the three-generator group.
pub fn meridian_longitude() -> (FreeWord, FreeWord) {
    let blown = Presentation::parse(BLOWN_UP).unwrap();
    let p = drilled();
    let images = simplification_images(&blown, &p);
    // μ = ε21 ε17⁻¹ ε18⁻¹ ε23⁻¹ and λ = ε18 ε19; ε17, ε23 lie in the tree
    let mu = blown.parse_word("z21 Z18").unwrap().substitute(&images);
    let lambda = blown.parse_word("z18 z19").unwrap().substitute(&images);
    (mu, lambda)
}

pub fn filled(k: usize) -> Presentation {
    let (mu, lambda) = meridian_longitude();
    let mut p = drilled();
    p.relators.push(mu.mul(&lambda.pow(k as i64)));
    p
}

