use bifib_core::analysis::{check_basis, track_default_paths, AnalysisConfig};
use bifib_core::fibration::{self, Bifibration};
use bifib_core::painleve::get_case;
use bifib_core::tracking::{self, Cover, PathKind, PlanarPath, TrackOptions};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GATED: [&str; 8] = ["II", "II(FN)", "III(D6)", "III(D7)", "III(D8)", "IV", "V", "VI"];

fn setup(id: &str) -> (Bifibration, Cover, TrackOptions) {
    let b = get_case(id).unwrap().bifibration().unwrap();
    let opts = TrackOptions::default();
    let cover = Cover::new(&b, b.base_pi, &opts).unwrap();
    (b, cover, opts)
}

fn segment_clearance(a: C, b: C, pts: &[C]) -> f64 {
    pts.iter()
        .map(|p| {
            let d = b - a;
            let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            (a + d * t - p).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Base point, out to a convex polygon enclosing no branch value, around
/// it and back: null-homotopic in the punctured plane.
fn contractible_loop(rng: &mut ChaCha8Rng, base: C, branch: &[C], scale: f64) -> PlanarPath {
    let centre_of_mass = branch.iter().sum::<C>() / branch.len() as f64;
    loop {
        let c = centre_of_mass + C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
        let free = branch.iter().map(|b| (b - c).norm()).fold(f64::INFINITY, f64::min);
        if free < 0.03 * scale {
            continue;
        }
        let r = 0.7 * free.min(scale);
        let m = rng.gen_range(3..9);
        let mut angles: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let poly: Vec<C> = angles.iter().map(|&a| c + C::from_polar(r * rng.gen_range(0.5..1.0), a)).collect();
        if segment_clearance(base, poly[0], branch) < 0.02 * scale || (base - poly[0]).norm() < 1e-3 * scale {
            continue;
        }
        let mut w = vec![base];
        w.extend(poly.iter().copied());
        w.push(poly[0]);
        w.push(base);
        return PlanarPath::new(w, PathKind::Loop).unwrap();
    }
}

#[test]
fn contractible_loops_have_trivial_monodromy() {
    for id in GATED {
        let (b, cover, _) = setup(id);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..20 {
            let l = contractible_loop(&mut rng, b.base_rho, &cover.branch_values, cover.scale());
            let m = cover.monodromy(&l).unwrap_or_else(|e| panic!("{id} loop {k}: {e}"));
            assert!(m.is_identity(), "{id} loop {k}: {:?}", m);
        }
    }
}

#[test]
fn lassos_are_transpositions_matching_the_sphere_table() {
    for id in GATED {
        let (b, cover, _) = setup(id);
        let table = tracking::sphere_table(&cover, b.base_rho).unwrap();
        for row in table.iter().filter(|r| !r.detoured) {
            let r = 0.2 * cover.branch_values.iter().filter(|v| **v != row.branch_value).map(|v| (v - row.branch_value).norm()).fold(f64::INFINITY, f64::min);
            let l = tracking::lasso(b.base_rho, row.branch_value, r, 64);
            let m = cover.monodromy(&l).unwrap();
            let (i, j) = m.as_transposition().unwrap_or_else(|| panic!("{id}: {:?}", m));
            assert_eq!((i.min(j), i.max(j)), row.sphere.sheets, "{id}");
        }
        // the local monodromies generate a transitive group: the fibre is connected
        let spheres: Vec<_> = table.iter().map(|r| r.sphere).collect();
        assert!(tracking::is_transitive(3, &spheres), "{id}");
    }
}

#[test]
fn merges_are_unique_and_stable_under_step_halving() {
    for id in GATED {
        let (b, _, opts) = setup(id);
        let crit = fibration::critvals_pi(&b, &opts.elim).unwrap().distinct();
        let fine = TrackOptions { max_step: opts.max_step / 2.0, ..opts };
        let coarse = track_default_paths(&b, &crit, &opts);
        let halved = track_default_paths(&b, &crit, &fine);
        assert_eq!(coarse.len(), crit.len());
        for ((i, _, bent, a), (_, _, bent2, h)) in coarse.iter().zip(&halved) {
            let (a, h) = (a.as_ref().unwrap(), h.as_ref().unwrap());
            assert!(a.final_gap > 10.0 * a.merge_tol, "{id} path {i}");
            assert_eq!(a.merge_pair, h.merge_pair, "{id} path {i}");
            assert_eq!(bent, bent2, "{id} path {i}");
        }
    }
}

#[test]
fn catalog_bases_are_d4_trees_of_matching_paths() {
    let cfg = AnalysisConfig::default();
    for id in GATED {
        let case = get_case(id).unwrap();
        let (_, cover, _) = setup(id);
        let radius = cfg.tolerances.snap * cover.scale();
        let paths: Vec<_> = case.basis_paths().unwrap().iter().map(|p| cover.snap(p, radius).unwrap()).collect();
        let rep = check_basis(&cover, &case.basis.as_ref().unwrap().labels, paths, "catalog");
        assert_eq!(rep.verdicts, vec![true; 4], "{id}: {:?}", rep.error);
        assert!(rep.is_d4, "{id}: {:?}", rep.counts);
    }
}
