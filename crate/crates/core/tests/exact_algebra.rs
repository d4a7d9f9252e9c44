use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use veerkit::algebra::*;

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-9i64..=9, c), r))
}

// Rank over Q by fraction-free elimination, independent of the library.
fn rank_oracle(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (nr, nc) = (m.len(), m[0].len());
    let mut rank = 0;
    for j in 0..nc {
        let Some(p) = (rank..nr).find(|&i| m[i][j] != 0) else { continue };
        m.swap(rank, p);
        for i in rank + 1..nr {
            let (a, b) = (m[rank][j], m[i][j]);
            for k in 0..nc {
                m[i][k] = m[i][k] * a - m[rank][k] * b;
            }
            let g = m[i].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                m[i].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn is_diagonal_chain(s: &IntMatrix) -> bool {
    for i in 0..s.rows() {
        for j in 0..s.cols() {
            if i != j && !s.get(i, j).is_zero() {
                return false;
            }
        }
    }
    let d: Vec<BigInt> = (0..s.rows().min(s.cols())).map(|i| s.get(i, i).clone()).collect();
    d.iter().all(|x| !x.is_negative())
        && d.windows(2).all(|w| if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() })
}

fn unimodular(m: &IntMatrix) -> bool {
    m.determinant().abs() == BigInt::from(1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn snf_remultiplies(rows in small_matrix()) {
        let a = IntMatrix::from_rows(&rows);
        let r = smith_normal_form(&a);
        prop_assert_eq!(&r.u.mul(&a).mul(&r.v), &r.s);
        prop_assert!(is_diagonal_chain(&r.s));
        prop_assert!(unimodular(&r.u) && unimodular(&r.v));
        prop_assert_eq!(r.rank(), rank_oracle(&rows));
        if a.rows() == a.cols() {
            let prod = r.diagonal().iter().fold(BigInt::from(1), |p, d| p * d);
            prop_assert_eq!(prod, a.determinant().abs());
        }
    }

    #[test]
    fn hnf_is_canonical(rows in small_matrix(), ops in proptest::collection::vec((0usize..8, 0usize..8, -3i64..=3), 0..12)) {
        let a = IntMatrix::from_rows(&rows);
        let n = a.rows();
        // a random unimodular row operation sequence
        let mut u = IntMatrix::identity(n);
        for (i, j, k) in ops {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            let mut e = IntMatrix::identity(n);
            e.set(i, j, BigInt::from(k));
            u = e.mul(&u);
        }
        let h = hermite_normal_form(&a);
        prop_assert_eq!(&hermite_normal_form(&u.mul(&a)), &h);
        prop_assert_eq!(&hermite_normal_form(&h), &h);
    }

    #[test]
    fn cokernel_counts(rows in small_matrix()) {
        let a = IntMatrix::from_rows(&rows);
        let c = cokernel(&a);
        prop_assert_eq!(c.rank, a.rows() - rank_oracle(&rows));
        prop_assert_eq!(c.projection.len(), a.rows());
        // columns of a die in the free quotient
        for j in 0..a.cols() {
            for k in 0..c.rank {
                let s: i64 = (0..a.rows()).map(|i| rows[i][j] * c.projection[i][k]).sum();
                prop_assert_eq!(s, 0);
            }
        }
    }
}

#[test]
fn cokernel_examples() {
    let c = cokernel(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
    assert_eq!((c.torsion, c.rank), (vec![BigInt::from(6)], 0));
    let c = cokernel(&IntMatrix::from_rows(&[vec![4], vec![0]]));
    assert_eq!((c.torsion, c.rank), (vec![BigInt::from(4)], 1));
    assert_eq!(c.projection, vec![vec![0], vec![1]]);
    let c = cokernel(&IntMatrix::zeros(3, 0));
    assert_eq!(c.rank, 3);
}

fn p2(s: &str) -> LaurentPoly {
    LaurentPoly::parse(s, 2).unwrap()
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    proptest::collection::vec(((-2i64..=2, -2i64..=2), -3i64..=3), 1..4).prop_map(|terms| {
        terms
            .into_iter()
            .fold(LaurentPoly::zero(2), |acc, ((x, y), c)| acc + LaurentPoly::monomial(2, vec![x, y], c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]
    #[test]
    fn ring_axioms(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(LaurentPoly::parse(&p.to_string(), 2).unwrap(), p);
    }

    #[test]
    fn exact_division(p in poly(), q in poly()) {
        prop_assume!(!q.is_zero());
        prop_assert_eq!((&p * &q).div_exact(&q), Some(p));
    }

    #[test]
    fn gcd_divides_and_contains_common_factor(p in poly(), q in poly(), r in poly()) {
        prop_assume!(!r.is_zero() && !p.is_zero() && !q.is_zero());
        let (a, b) = (&p * &r, &q * &r);
        let g = a.gcd(&b);
        prop_assert!(a.div_exact(&g).is_some());
        prop_assert!(b.div_exact(&g).is_some());
        prop_assert!(g.div_exact(&r.normalized()).is_some() || g.div_exact(&(-r.normalized())).is_some());
    }
}

#[test]
fn laurent_examples() {
    let g = p2("a^2*b - a*b + a - 1").gcd(&p2("a^2 - 1"));
    assert_eq!(g, p2("a - 1"));
    assert!(p2("a^-1*b^3").is_unit());
    assert!(p2("2*a").eq_up_to_unit(&p2("-2*a^-5")));
    assert!(!p2("2*a").eq_up_to_unit(&p2("a")));
    assert_eq!(p2("a^2 - 1").div_exact(&p2("a + 1")), Some(p2("a - 1")));
    assert_eq!(p2("a^2 + 1").div_exact(&p2("a + 1")), None);
    assert!(LaurentPoly::parse("a + z", 2).is_err());
    assert!(LaurentPoly::parse("a +", 2).is_err());
}

#[test]
fn minors() {
    let m = PolyMatrix::from_strings(
        &[vec!["a - 1".into(), "0".into()], vec!["0".into(), "a^2 - 1".into()]],
        1,
    )
    .unwrap();
    assert_eq!(minors_gcd(&m, 1), LaurentPoly::parse("a - 1", 1).unwrap());
    assert_eq!(maximal_minors_gcd(&m), LaurentPoly::parse("a^3 - a^2 - a + 1", 1).unwrap());
    assert_eq!(minors_gcd(&m, 0), LaurentPoly::one(1));
    assert!(minors_gcd(&m, 3).is_zero());
    assert_eq!(subsets(4, 2).count(), 6);
    // 3x3 determinant against the cofactor expansion
    let m = PolyMatrix::from_strings(
        &[
            vec!["a".into(), "1".into(), "b".into()],
            vec!["1".into(), "a - b".into(), "0".into()],
            vec!["b^-1".into(), "2".into(), "a".into()],
        ],
        2,
    )
    .unwrap();
    let e = |i: usize, j: usize| m.get(i, j).clone();
    let det2 = |a: LaurentPoly, b: LaurentPoly, c: LaurentPoly, d: LaurentPoly| &a * &d - &b * &c;
    let cof = &(&e(0, 0) * &det2(e(1, 1), e(1, 2), e(2, 1), e(2, 2)))
        - &(&e(0, 1) * &det2(e(1, 0), e(1, 2), e(2, 0), e(2, 2)));
    let cof = &cof + &(&e(0, 2) * &det2(e(1, 0), e(1, 1), e(2, 0), e(2, 1)));
    assert_eq!(m.determinant(), cof);
}
