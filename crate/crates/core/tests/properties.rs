use bifib_core::lattice::{cokernel, smith_normal_form, Matrix};
use bifib_core::mcg::{hurwitz_move, pl_twist, total_monodromy, Direction, HomologyClass, IntersectionForm, PlumbingTree};
use bifib_core::roots::{roots_of_coeffs, RootOptions};
use bifib_core::IntMatrix;
use num_bigint::BigInt;
use num_complex::Complex64 as C;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

// Cofactor expansion, kept independent of the library's elimination.
fn det_cofactor(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] as i128 * det_cofactor(&minor)
        })
        .sum()
}

fn big_rows(m: &Matrix<BigInt>) -> Vec<Vec<i64>> {
    m.rows().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn tree_strategy() -> impl Strategy<Value = PlumbingTree> {
    (2usize..7).prop_flat_map(|n| {
        (proptest::collection::vec(any::<u32>(), n - 1), proptest::collection::vec(prop::bool::ANY, n - 1)).prop_map(move |(parents, signs)| {
            let edges = (1..n).map(|v| ((parents[v - 1] as usize) % v, v, if signs[v - 1] { 1 } else { -1 })).collect();
            PlumbingTree::new((0..n).map(|i| format!("v{i}")).collect(), edges).unwrap()
        })
    })
}

fn class(n: usize, seed: &[i64]) -> HomologyClass {
    HomologyClass { coords: (0..n).map(|i| seed[i % seed.len()]).collect() }
}

fn pair(q: &IntersectionForm, a: &HomologyClass, b: &HomologyClass) -> i64 {
    q.pair(a, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalisation(rows in 1usize..5, cols in 1usize..5, entries in proptest::collection::vec(-9i64..10, 16)) {
        let m: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| entries[i * 4 + j]).collect()).collect();
        let mm = IntMatrix::from_i64(&m).unwrap();
        let s = smith_normal_form(&mm);
        prop_assert_eq!(s.u.mul(&mm).mul(&s.v), s.d.clone());
        let du = det_cofactor(&big_rows(&s.u));
        let dv = det_cofactor(&big_rows(&s.v));
        prop_assert_eq!(du.abs(), 1);
        prop_assert_eq!(dv.abs(), 1);
        let dd = big_rows(&s.d);
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    prop_assert_eq!(dd[i][j], 0);
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                prop_assert!(!w[0].is_zero() && (&w[1] % &w[0]).is_zero());
            }
            prop_assert!(!w[0].is_negative());
        }
        // first invariant factor = gcd of all entries
        let g = m.iter().flatten().fold(0i128, |g, &x| gcd(g, x as i128));
        prop_assert_eq!(diag[0].to_i64().unwrap() as i128, g);
        if rows == cols {
            let prod: BigInt = diag.iter().fold(BigInt::one(), |p, d| p * d);
            prop_assert_eq!(prod.to_i64().unwrap() as i128, det_cofactor(&m).abs());
        }
    }

    #[test]
    fn square_cokernel_order_is_the_determinant(n in 1usize..5, entries in proptest::collection::vec(-6i64..7, 16)) {
        let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| entries[i * 4 + j]).collect()).collect();
        let g = cokernel(&IntMatrix::from_i64(&m).unwrap());
        let d = det_cofactor(&m);
        if d == 0 {
            prop_assert!(g.free_rank > 0);
        } else {
            prop_assert_eq!(g.free_rank, 0);
            prop_assert_eq!(g.order().unwrap().to_i64().unwrap() as i128, d.abs());
        }
    }

    #[test]
    fn hurwitz_moves_preserve_total_monodromy(
        tree in tree_strategy(),
        k in 2usize..7,
        coords in proptest::collection::vec(-1i64..2, 42),
        moves in proptest::collection::vec((any::<u32>(), prop::bool::ANY), 1..5),
    ) {
        let n = tree.vertices.len();
        let q = tree.form();
        let mut t: Vec<HomologyClass> = (0..k).map(|i| class(n, &coords[i * 6..i * 6 + 6])).collect();
        let before = total_monodromy(&t, &q).unwrap();
        for (i, fwd) in moves {
            let i = 1 + (i as usize) % (k - 1);
            t = hurwitz_move(&t, i, if fwd { Direction::Fwd } else { Direction::Inv }, &q).unwrap();
        }
        prop_assert_eq!(total_monodromy(&t, &q).unwrap(), before);
    }

    #[test]
    fn inverse_hurwitz_move_undoes_the_move(tree in tree_strategy(), coords in proptest::collection::vec(-3i64..4, 18), i in 1usize..3) {
        let n = tree.vertices.len();
        let q = tree.form();
        let t: Vec<HomologyClass> = (0..3).map(|j| class(n, &coords[j * 6..j * 6 + 6])).collect();
        let there = hurwitz_move(&t, i, Direction::Fwd, &q).unwrap();
        prop_assert_eq!(hurwitz_move(&there, i, Direction::Inv, &q).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn transvections_preserve_the_intersection_form(
        tree in tree_strategy(),
        coords in proptest::collection::vec(-4i64..5, 18),
        e in prop::sample::select(vec![-1i64, 1]),
    ) {
        let n = tree.vertices.len();
        let q = tree.form();
        let (a, b, s) = (class(n, &coords[0..6]), class(n, &coords[6..12]), class(n, &coords[12..18]));
        let (ta, tb) = (pl_twist(&a, &s, e, &q).unwrap(), pl_twist(&b, &s, e, &q).unwrap());
        prop_assert_eq!(pair(&q, &ta, &tb), pair(&q, &a, &b));
        // the twist fixes its own core and inverts with the opposite exponent
        prop_assert_eq!(pl_twist(&s, &s, e, &q).unwrap(), s.clone());
        prop_assert_eq!(pl_twist(&ta, &s, -e, &q).unwrap(), a);
    }
}

fn expand(roots: &[C], lead: C) -> Vec<C> {
    let mut c = vec![lead];
    for r in roots {
        let mut next = vec![C::new(0.0, 0.0); c.len() + 1];
        for (i, x) in c.iter().enumerate() {
            next[i + 1] += x;
            next[i] -= x * r;
        }
        c = next;
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn roots_reconstruct_the_polynomial(
        deg in 1usize..13,
        parts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12),
        lead in (0.5f64..2.0, -1.0f64..1.0),
    ) {
        let roots: Vec<C> = parts[..deg].iter().map(|&(a, b)| C::new(2.0 * a, 2.0 * b)).collect();
        let coeffs = expand(&roots, C::new(lead.0, lead.1));
        let found = roots_of_coeffs(&coeffs, &RootOptions::default()).unwrap();
        let all: Vec<C> = found.clusters().iter().flat_map(|c| std::iter::repeat_n(c.center, c.multiplicity)).collect();
        prop_assert_eq!(all.len(), deg);
        let back = expand(&all, coeffs[deg]);
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let err = coeffs.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
        prop_assert!(err < 1e-8, "relative reconstruction error {err:e}");
    }
}
