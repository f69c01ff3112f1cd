use bifib_core::fibration::{self, Smoothness};
use bifib_core::painleve::{get_case, verify_factorization, Catalog};
use bifib_core::roots::ElimOptions;
use bifib_core::Poly;
use num_complex::Complex64 as C;

const GATED: [(&str, usize); 8] = [("II", 6), ("II(FN)", 6), ("III(D6)", 7), ("III(D7)", 6), ("III(D8)", 5), ("IV", 7), ("V", 8), ("VI", 9)];

#[test]
fn catalog_lists_ten_cases() {
    let cat = Catalog::builtin();
    assert_eq!(cat.ids(), ["I", "II", "II(FN)", "III(D6)", "V(deg)", "III(D7)", "III(D8)", "IV", "V", "VI"]);
    assert_eq!(cat.filter("III").len(), 3);
    assert_eq!(cat.filter("").len(), 10);
    assert!(get_case("iii_d8").is_ok());
    assert!(get_case("VII").is_err());
}

#[test]
fn base_points() {
    let d8 = get_case("III(D8)").unwrap();
    assert_eq!(d8.base_pi(), Some(C::new(0.0, 0.0)));
    assert_eq!(d8.base_rho(), Some(C::new(1.0, 0.0)));
    assert_eq!(get_case("VI").unwrap().base_rho(), Some(C::new(0.0, -15.0)));
    assert_eq!(get_case("II").unwrap().expected_k, Some(6));
}

#[test]
fn vi_vanishes_at_root_three() {
    let f = get_case("VI").unwrap().surface().unwrap();
    let v = f.eval(&[C::new(3f64.sqrt(), 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]).unwrap();
    assert!(v.norm() < 1e-12, "{v}");
}

#[test]
fn specializations() {
    for id in ["I", "II", "III(D6)", "III(D7)", "III(D8)", "IV", "V", "VI", "V(deg)"] {
        let chk = get_case(id).unwrap().verify_specialization().unwrap();
        assert!(chk.matches, "{id}: {:?}", chk.diff);
    }
    let fn_ = get_case("II(FN)").unwrap().verify_specialization().unwrap();
    assert!(!fn_.matches);
    assert!(fn_.as_expected());
    assert_eq!(fn_.diff.len(), 1);
}

#[test]
fn critical_value_counts_and_fibres() {
    let opts = ElimOptions::default();
    for (id, k) in GATED {
        let b = get_case(id).unwrap().bifibration().unwrap();
        let crit = fibration::critvals_pi(&b, &opts).unwrap();
        assert_eq!(crit.distinct().len(), k, "{id}");
        let branch = fibration::critvals_rho(&b, b.base_pi, &opts).unwrap();
        assert_eq!(branch.distinct().len(), 6, "{id}");
        let pts = fibration::fibre_points(&b, b.base_pi, b.base_rho, &opts).unwrap();
        assert_eq!(pts.points.len(), 3, "{id}");
        // every fibre point lies on the surface, over both base points
        for uv in &pts.points {
            let p = b.lift(b.base_pi, *uv);
            let vars = b.vars().to_vec();
            assert!(b.surface.eval(&p).unwrap().norm() < 1e-8 * (1.0 + b.surface.l1_norm()), "{id}");
            assert!((b.pi.eval_at(&vars, &p) - b.base_pi).norm() < 1e-9, "{id}");
            assert!((b.rho.eval_at(&vars, &p) - b.base_rho).norm() < 1e-9, "{id}");
        }
        let fib = fibration::fibre_poly(&b, b.base_pi).unwrap();
        assert_eq!(fib.newton_genus().unwrap(), 1, "{id}");
        assert_eq!(fib.punctures_at_infinity().unwrap(), 3, "{id}");
    }
}

#[test]
fn all_cubics_are_smooth_and_the_cone_is_not() {
    let opts = ElimOptions::default();
    for case in &Catalog::builtin().cases {
        assert_eq!(fibration::is_smooth(&case.surface().unwrap(), &opts), Smoothness::Smooth, "{}", case.id);
    }
    let cone = Poly::parse("x^2 + y^2 + z^2", &["x", "y", "z"]).unwrap();
    match fibration::is_smooth(&cone, &opts) {
        Smoothness::Singular { witness } => assert!(witness.iter().all(|c| c.norm() < 1e-6)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn factorization_tables_give_the_expected_homology() {
    for (id, _) in GATED {
        let case = get_case(id).unwrap();
        let chk = verify_factorization(case, &case.tree().unwrap()).unwrap();
        assert!(chk.steps_ok(), "{id}: {:?}", chk.steps);
        let want = if id == "III(D8)" { "Z/2" } else { "0" };
        for g in chk.h1.iter().flatten() {
            assert_eq!(g.to_string(), want, "{id}");
        }
        assert!(chk.h1.iter().any(Option::is_some), "{id}");
    }
}

#[test]
fn homology_is_independent_of_edge_signs() {
    use bifib_core::mcg::h1_total_space;
    use bifib_core::painleve::table_classes;
    for (id, _) in GATED {
        let case = get_case(id).unwrap();
        let f = case.factorization.as_ref().unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for tree in case.tree().unwrap().sign_patterns() {
            for col in table_classes(f, &tree).unwrap() {
                if col.iter().all(Option::is_some) {
                    let t: Vec<_> = col.iter().map(|e| e.as_ref().unwrap()[0].clone()).collect();
                    seen.insert(h1_total_space(&t).unwrap().to_string());
                }
            }
        }
        assert_eq!(seen.len(), 1, "{id}: {seen:?}");
    }
}
