mod common;

use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use veerkit::algebra::LaurentPoly;
use veerkit::branched_surface::BranchedSurface;
use veerkit::group_theory::*;
use veerkit::signature::decode_taut_signature;
use veerkit::taut_polynomial::taut_polynomial_with_tree;
use veerkit::triangulation::{spanning_tree, TreeStrategy};

#[test]
fn jacobian_matches_reference_terms() {
    let p = drilled();
    let terms = fox_terms(&p);
    assert_eq!(terms.len(), 50);
    let j = jacobian(&p);
    for (r, row) in j.iter().enumerate() {
        for (g, entry) in row.iter().enumerate() {
            let want: Vec<(FreeWord, i32)> = terms
                .iter()
                .filter(|t| t.relator == r && t.generator == g)
                .map(|t| (t.word.clone(), t.sign))
                .collect();
            assert_eq!(sorted_terms(entry.signed_terms()), sorted_terms(want), "entry ({r}, {g})");
        }
    }
}

#[test]
fn reference_images_under_the_character() {
    let p = drilled();
    let ch = reference_character();
    let mut flips = 0;
    let mut listed = std::collections::BTreeMap::new();
    for t in fox_terms(&p) {
        let got = ch.omega_of(&t.word) * t.sign;
        assert_eq!(ch.pi_of(&t.word)[0], t.image.1, "{}", t.word.to_text(&p.generators));
        if got != t.image.0 {
            flips += 1;
        }
        *listed.entry((t.relator, t.generator, t.image.1)).or_insert(0) += t.image.0;
    }
    // The printed column gets the sign of 14 terms wrong, in cancelling pairs, so every
    // entry still sums to zero as printed.
    assert_eq!(flips, 14);
    assert!(listed.values().all(|&c| c == 0));
}

#[test]
fn projected_jacobian_vanishes() {
    let p = drilled();
    let ch = reference_character();
    ch.check(&p).unwrap();
    let m = projected_jacobian(&p, &ch);
    assert_eq!((m.rows(), m.cols()), (2, 3));
    for i in 0..2 {
        for j in 0..3 {
            assert!(m.get(i, j).is_zero(), "({i}, {j}) = {}", m.get(i, j));
        }
    }
}

#[test]
fn simplification_map_is_a_homomorphism() {
    let blown = Presentation::parse(BLOWN_UP).unwrap();
    let p = drilled();
    let images = simplification_images(&blown, &p);
    for (i, r) in blown.relators.iter().enumerate() {
        let w = r.substitute(&images).cyclically_reduced();
        let ok = w.is_empty() || p.relators.iter().any(|q| w.same_relator(q));
        assert!(ok, "relator {i} maps to {}", w.to_text(&p.generators));
    }
    // and both relators of the simplified group are hit
    for q in &p.relators {
        assert!(blown.relators.iter().any(|r| r.substitute(&images).same_relator(q)));
    }
}

#[test]
fn drilled_homology() {
    let p = drilled();
    let ab = abelianization(&p);
    assert_eq!(invariant_factors(&ab), vec![BigInt::from(4), BigInt::from(0), BigInt::from(0)]);
    let (mu, lambda) = meridian_longitude();
    let class = |w: &FreeWord| -> Vec<i64> {
        let v = exponent_vector(&p, w);
        let mut out = vec![0i64; ab.rank];
        for (g, &e) in v.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(&ab.projection[g]) {
                *o += e * x;
            }
        }
        out
    };
    // b = [ζ1], a = b - [ζ21]
    let b = class(&p.parse_word("z1").unwrap());
    let s = class(&p.parse_word("z21").unwrap());
    let a: Vec<i64> = b.iter().zip(&s).map(|(x, y)| x - y).collect();
    let comb = |x: i64, y: i64| -> Vec<i64> { a.iter().zip(&b).map(|(p, q)| x * p + y * q).collect() };
    assert_eq!(class(&mu), comb(-1, 4));
    assert_eq!(class(&lambda), comb(-2, 2));
    for k in 0..=10i64 {
        let slope = mu.mul(&lambda.pow(k));
        assert_eq!(class(&slope), comb(-(2 * k + 1), 2 * k + 4));
    }
}

#[test]
fn filled_homology_and_vanishing() {
    for k in 0..=10 {
        let p = filled(k);
        let ab = invariant_factors(&abelianization(&p));
        assert_eq!(ab, vec![BigInt::from(8 * k + 16), BigInt::from(0)], "k = {k}");
        let ch = character_with_omega(&p, vec![-1, -1, -1]).unwrap();
        assert!(twisted_alexander(&p, &ch).is_zero(), "k = {k}");
    }
}

#[test]
fn routes_agree_on_family_and_census() {
    let census = census();
    let mut nonzero = 0;
    for (i, sig) in family().iter().chain(census.iter()).enumerate() {
        let (tri, taut) = decode_taut_signature(sig).unwrap();
        let bs = BranchedSurface::build(&tri, &taut).unwrap();
        let tree = spanning_tree(&bs.dual_graph(), &TreeStrategy::FirstBfs).unwrap();
        let theta = taut_polynomial_with_tree(&bs, &tree);
        let (pres, ch) = presentation_from_spine(&bs.spine, &tree).unwrap();
        let fox = twisted_alexander(&pres, &ch);
        assert!(theta.eq_up_to_unit(&fox), "{sig}: {theta} vs {fox}");
        if i >= 11 && !theta.is_zero() {
            nonzero += 1;
        }
    }
    assert!(nonzero >= 5);
}

#[test]
fn tietze_preserves_homology() {
    let blown = Presentation::parse(BLOWN_UP).unwrap();
    let s = tietze_simplify(&blown, 10_000).unwrap();
    assert!(s.generators.len() < blown.generators.len());
    assert_eq!(invariant_factors(&abelianization(&s)), invariant_factors(&abelianization(&blown)));
}

#[test]
fn parse_errors() {
    assert!(Presentation::parse("rel: a b").is_err());
    assert!(Presentation::parse("gens: a,b\nrel: a c").is_err());
    assert!(Presentation::parse("gens: A").is_err());
    assert!(Presentation::parse("gens: a\ngens: b").is_err());
    let p = Presentation::parse("gens: a,b\nrel: a B A b\n# comment\n").unwrap();
    assert_eq!(Presentation::parse(&p.to_text()).unwrap(), p);
}

// Σ_j (∂r/∂x_j)(x_j - 1) = r - 1 in the free group ring.
fn fundamental_identity(w: &FreeWord, ngens: usize) -> bool {
    let mut lhs = GroupRingElement::zero();
    for g in 0..ngens {
        let xg = GroupRingElement::word(FreeWord::generator(g)).add(&GroupRingElement::word(FreeWord::identity()).neg());
        lhs = lhs.add(&fox_derivative(w, g).mul(&xg));
    }
    let rhs = GroupRingElement::word(w.clone()).add(&GroupRingElement::word(FreeWord::identity()).neg());
    lhs == rhs
}

#[test]
fn fundamental_identity_on_fixture_relators() {
    for text in [DRILLED, BLOWN_UP] {
        let p = Presentation::parse(text).unwrap();
        for r in &p.relators {
            assert!(fundamental_identity(r, p.generators.len()));
        }
    }
    let (tri, taut) = v0();
    let bs = BranchedSurface::build(&tri, &taut).unwrap();
    let tree = spanning_tree(&bs.dual_graph(), &TreeStrategy::FirstBfs).unwrap();
    let (p, _) = presentation_from_spine(&bs.spine, &tree).unwrap();
    for r in &p.relators {
        assert!(fundamental_identity(r, p.generators.len()));
    }
}

fn word_strategy() -> impl Strategy<Value = FreeWord> {
    proptest::collection::vec((0usize..4, prop_oneof![Just(1i32), Just(-1i32)]), 0..30).prop_map(FreeWord::new)
}

proptest! {
    #[test]
    fn fundamental_identity_random(w in word_strategy()) {
        prop_assert!(fundamental_identity(&w, 4));
    }

    #[test]
    fn fox_product_rule(u in word_strategy(), v in word_strategy(), g in 0usize..4) {
        let lhs = fox_derivative(&u.mul(&v), g);
        let rhs = fox_derivative(&u, g).add(&GroupRingElement::word(u.clone()).mul(&fox_derivative(&v, g)));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn single_generator_convention() {
    // the only (m-1)-minor of a one-generator presentation is empty
    let p = Presentation::parse("gens: a\nrel: a a").unwrap();
    let ch = Character { omega: vec![1], pi: vec![vec![]], nvars: 0 };
    assert_eq!(twisted_alexander(&p, &ch), LaurentPoly::one(0));
}

#[test]
fn twisted_alexander_survives_simplification() {
    let mut sigs = vec![V0.to_string()];
    sigs.extend(census().iter().take(6).map(|s| s.to_string()));
    for sig in &sigs {
        let (tri, taut) = veerkit::signature::decode_str(sig).unwrap();
        let bs = BranchedSurface::build(&tri, &taut).unwrap();
        let tree = spanning_tree(&bs.dual_graph(), &TreeStrategy::FirstBfs).unwrap();
        let (p, ch) = presentation_from_spine(&bs.spine, &tree).unwrap();
        let s = tietze_simplify(&p, 10_000).unwrap();
        let ch_s = ch.restrict(&p, &s).unwrap();
        ch_s.check(&s).unwrap();
        assert!(twisted_alexander(&s, &ch_s).eq_up_to_unit(&twisted_alexander(&p, &ch)), "{sig}");
    }
}

#[test]
fn filled_characters_match_reference() {
    // for every k the free quotient of H_1 is detected by z10 alone: π = (1, c^±1, 1)
    let (mu, lambda) = meridian_longitude();
    for k in 0..=10 {
        let p = filled(k);
        let ch = character_with_omega(&p, vec![-1, -1, -1]).unwrap();
        ch.check(&p).unwrap();
        assert_eq!(ch.nvars, 1);
        assert_eq!(ch.pi[0], vec![0]);
        assert_eq!(ch.pi[1][0].abs(), 1);
        assert_eq!(ch.pi[2], vec![0]);
        // so the meridian and longitude both become torsion
        assert_eq!((ch.pi_of(&mu), ch.pi_of(&lambda)), (vec![0], vec![0]));
    }
}
