//! End-to-end analysis of one case: critical values, isotopies of the
//! branch values, matching paths, the sphere table, a basis of matching
//! paths and its intersection tree, factorization tables and homology.

use num_bigint::BigInt;
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fibration::{self, Bifibration, FibrationError, Smoothness};
use crate::lattice::{self, IndexChain, LatticeError};
use crate::mcg::{self, HomologyClass, McgError, PlumbingTree};
use crate::painleve::{self, Catalog, FactorizationCheck, PainleveCase, PainleveError, SpecializationCheck};
use crate::roots::ElimOptions;
use crate::tracking::{self, Cover, MatchingBasis, PlanarPath, TrackError, TrackOptions};
use crate::IntMatrix;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Painleve(#[from] PainleveError),
    #[error(transparent)]
    Fibration(#[from] FibrationError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Mcg(#[from] McgError),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
    #[error("thread pool: {0}")]
    Threads(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Root residual tolerance.
    pub root: f64,
    /// Relative cluster radius for repeated roots.
    pub cluster: f64,
    /// Merge threshold relative to the initial frame diameter.
    pub merge: f64,
    /// Largest continuation step in the path parameter.
    pub max_step: f64,
    /// Snap radius for stored basis endpoints, relative to the branch-value spread.
    pub snap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let r = crate::roots::RootOptions::default();
        let t = TrackOptions::default();
        Tolerances { root: r.tol, cluster: r.cluster, merge: t.merge_tol, max_step: t.max_step, snap: 0.15 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("root", self.root), ("cluster", self.cluster), ("merge", self.merge), ("max_step", self.max_step), ("snap", self.snap)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Worker threads for per-path jobs; `None` uses the global pool.
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Search for a basis when the case carries none.
    pub search_basis: bool,
    /// Frames kept per isotopy trail in the report.
    pub trail_frames: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { tolerances: Tolerances::default(), seed: 0, threads: None, search_basis: true, trail_frames: 48 }
    }
}

impl AnalysisConfig {
    pub fn track_options(&self) -> TrackOptions {
        let mut elim = ElimOptions { seed: self.seed, ..ElimOptions::default() };
        elim.roots.tol = self.tolerances.root;
        elim.roots.cluster = self.tolerances.cluster;
        elim.roots.seed = self.seed;
        TrackOptions { merge_tol: self.tolerances.merge, max_step: self.tolerances.max_step, elim, ..TrackOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub case: String,
    pub analysed_as: String,
    pub surface: String,
    pub pi: String,
    pub rho: String,
    pub base_pi: C,
    pub base_rho: C,
    pub bifibration_canonical: bool,
    pub config: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SmoothnessReport {
    Smooth,
    Singular { witness: [C; 3] },
    Unknown { diagnostics: Vec<String> },
}

impl From<Smoothness> for SmoothnessReport {
    fn from(s: Smoothness) -> Self {
        match s {
            Smoothness::Smooth => SmoothnessReport::Smooth,
            Smoothness::Singular { witness } => SmoothnessReport::Singular { witness },
            Smoothness::Unknown { diagnostics } => SmoothnessReport::Unknown { diagnostics },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritValue {
    pub value: C,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreReport {
    pub genus: u64,
    pub punctures: usize,
    pub rank_h1: u64,
    pub points: Vec<[C; 2]>,
    pub branch_values: Vec<C>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotopySummary {
    pub index: usize,
    pub target: C,
    pub bent: bool,
    pub path: Vec<C>,
    pub merge_pair: Option<(usize, usize)>,
    pub merge_distance: Option<f64>,
    pub final_gap: Option<f64>,
    pub merge_tol: Option<f64>,
    pub collision: Option<C>,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Subsampled frames, first and last included.
    pub trail: Vec<Vec<C>>,
    pub matching_path: Option<Vec<C>>,
    pub matching_verdict: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereRow {
    pub branch_value: C,
    pub sheets: (usize, usize),
    pub detoured: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisReport {
    /// `"catalog"` or `"search"`.
    pub source: String,
    pub labels: Vec<String>,
    pub paths: Vec<Vec<C>>,
    pub verdicts: Vec<bool>,
    pub counts: Vec<Vec<usize>>,
    pub tree: Option<PlumbingTree>,
    pub is_d4: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologyReport {
    /// `H₁` of the total space for each complete table column.
    pub h1: Vec<Option<String>>,
    pub expected: Option<String>,
    pub gauge_invariant: bool,
    pub sign_patterns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexChainReport {
    pub lattice_index: String,
    pub discriminant_order: String,
    pub image_index: String,
    pub quotient_index: String,
}

impl From<IndexChain> for IndexChainReport {
    fn from(c: IndexChain) -> Self {
        IndexChainReport {
            lattice_index: c.lattice_index.to_string(),
            discriminant_order: c.discriminant_order.to_string(),
            image_index: c.image_index.to_string(),
            quotient_index: c.quotient_index.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub rows: usize,
    pub cols: usize,
    pub determinant: Option<String>,
    pub smith_diagonal: Vec<String>,
    pub cokernel: String,
    pub discriminant_group: Option<String>,
    pub index_chain: Option<IndexChainReport>,
    pub errors: Vec<String>,
}

/// Smith form, cokernel and (for square nondegenerate input) discriminant
/// data of an integer matrix; with `disc_lambda` and `coker_order`, also
/// the index chain.
pub fn lattice_report(m: &IntMatrix, chain: Option<(BigInt, BigInt)>) -> LatticeReport {
    let smith = lattice::smith_normal_form(m);
    let mut errors = Vec::new();
    let det = if m.nrows() == m.ncols() {
        match lattice::gram_determinant(m) {
            Ok(d) => Some(d),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        }
    } else {
        None
    };
    let disc = if det.is_some() {
        match lattice::discriminant_group(m) {
            Ok(g) => Some(g.to_string()),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        }
    } else {
        None
    };
    let index_chain = match (&det, chain) {
        (Some(d), Some((dl, co))) => {
            let d: BigInt = if d < &BigInt::from(0) { -d.clone() } else { d.clone() };
            match lattice::index_chain(&d, &dl, &co) {
                Ok(c) => Some(c.into()),
                Err(e) => {
                    errors.push(e.to_string());
                    None
                }
            }
        }
        _ => None,
    };
    LatticeReport {
        rows: m.nrows(),
        cols: m.ncols(),
        determinant: det.map(|d| d.to_string()),
        smith_diagonal: smith.diagonal().iter().map(|d| d.to_string()).collect(),
        cokernel: lattice::cokernel(m).to_string(),
        discriminant_group: disc,
        index_chain,
        errors,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub input: InputEcho,
    pub specialization: Option<SpecializationCheck>,
    pub smoothness: SmoothnessReport,
    pub expected_k: Option<usize>,
    pub critvals_pi: Vec<CritValue>,
    pub fibre: FibreReport,
    pub isotopies: Vec<IsotopySummary>,
    pub sphere_table: Vec<SphereRow>,
    pub basis: Option<BasisReport>,
    pub factorization: Option<FactorizationCheck>,
    pub homology: Option<HomologyReport>,
    pub lattice: Option<LatticeReport>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
}

impl Report {
    /// 0 clean, 2 warnings only, 3 verification failures.
    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            3
        } else if !self.warnings.is_empty() {
            2
        } else {
            0
        }
    }
}

fn fmt_c(z: C) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn subsample(frames: &[Vec<C>], keep: usize) -> Vec<Vec<C>> {
    let n = frames.len();
    if n <= keep.max(2) {
        return frames.to_vec();
    }
    let keep = keep.max(2);
    (0..keep).map(|j| frames[(j * (n - 1) + (keep - 1) / 2) / (keep - 1)].clone()).collect()
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, AnalysisError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().map_err(|e| AnalysisError::Threads(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn is_d4(tree: &PlumbingTree) -> bool {
    tree.vertices.len() == 4 && tree.edges.len() == 3 && (0..4).any(|v| tree.degree(v) == 3)
}

/// Tracks every default vanishing path independently, bending paths that
/// run into a degenerate fibre.
pub fn track_default_paths(b: &Bifibration, crit: &[C], opts: &TrackOptions) -> Vec<(usize, PlanarPath, bool, Result<tracking::CritvalIsotopy, TrackError>)> {
    let paths = tracking::default_vanishing_paths(b.base_pi, crit, opts.detour);
    paths
        .into_par_iter()
        .map(|(i, p, bent)| match tracking::track_default_path(b, crit, &p, opts) {
            Ok((q, redirected, iso)) => (i, q, bent || redirected, Ok(iso)),
            Err(e) => (i, p, bent, Err(e)),
        })
        .collect()
}

/// Searches for a `D₄` basis: extracted and straight matching paths on a
/// grid of base points first, then a finer grid, then random bent paths.
pub fn find_basis(cover: &Cover, extracted: &[PlanarPath], seed: u64) -> Result<Option<MatchingBasis>, TrackError> {
    for grid in [8, 16] {
        let cands = tracking::candidate_matching_paths(cover, extracted, grid)?;
        if let Some(b) = tracking::search_basis(cover, &cands)? {
            return Ok(Some(b));
        }
    }
    let mut cands = tracking::candidate_matching_paths(cover, extracted, 8)?;
    cands.extend(tracking::random_matching_paths(cover, 3000, seed)?);
    tracking::search_basis(cover, &cands)
}

pub fn basis_labels() -> Vec<String> {
    ["alpha", "beta", "gamma", "delta"].iter().map(|s| s.to_string()).collect()
}

pub fn check_basis(cover: &Cover, labels: &[String], paths: Vec<PlanarPath>, source: &str) -> BasisReport {
    let mut rep = BasisReport {
        source: source.into(),
        labels: labels.to_vec(),
        paths: paths.iter().map(|p| p.waypoints.clone()).collect(),
        verdicts: vec![],
        counts: vec![],
        tree: None,
        is_d4: false,
        error: None,
    };
    for p in &paths {
        match cover.is_matching_path(p) {
            Ok(v) => rep.verdicts.push(v),
            Err(e) => {
                rep.verdicts.push(false);
                rep.error.get_or_insert(e.to_string());
            }
        }
    }
    match tracking::intersection_tree(cover, labels, &paths) {
        Ok((counts, tree)) => {
            rep.is_d4 = is_d4(&tree);
            rep.counts = counts;
            rep.tree = Some(tree);
        }
        Err(e) => {
            rep.error.get_or_insert(e.to_string());
        }
    }
    rep
}

fn homology(case: &PainleveCase, chk: &FactorizationCheck) -> Result<HomologyReport, AnalysisError> {
    let tree = case.tree()?;
    let f = case.factorization.as_ref().expect("checked by caller");
    let h1 = |t: &PlumbingTree| -> Result<Vec<Option<String>>, AnalysisError> {
        painleve::table_classes(f, t)?
            .iter()
            .map(|col| {
                if col.iter().any(Option::is_none) {
                    return Ok(None);
                }
                let t: Vec<HomologyClass> = col.iter().map(|e| e.as_ref().unwrap()[0].clone()).collect();
                Ok(Some(mcg::h1_total_space(&t)?.to_string()))
            })
            .collect()
    };
    let base: Vec<Option<String>> = chk.h1.iter().map(|g| g.as_ref().map(|g| g.to_string())).collect();
    let patterns = tree.sign_patterns();
    let mut gauge_invariant = true;
    for p in &patterns {
        if h1(p)? != base {
            gauge_invariant = false;
        }
    }
    Ok(HomologyReport { h1: base, expected: case.expected_h1.clone(), gauge_invariant, sign_patterns: patterns.len() })
}

/// Runs the full pipeline on a catalog case (or a problem with the same
/// schema). Aliased cases are analysed through their stand-in.
pub fn analyze(case: &PainleveCase, catalog: &Catalog, cfg: &AnalysisConfig) -> Result<Report, AnalysisError> {
    cfg.tolerances.validate().map_err(PainleveError::Format)?;
    let target = catalog.analysis_case(case)?;
    with_pool(cfg.threads, || analyze_inner(case, target, cfg))?
}

fn analyze_inner(case: &PainleveCase, target: &PainleveCase, cfg: &AnalysisConfig) -> Result<Report, AnalysisError> {
    let opts = cfg.track_options();
    let mut notes: Vec<String> = case.notes.clone();
    let mut warnings = Vec::new();
    let mut failures = Vec::new();
    let gated = target.bifibration.as_ref().is_some_and(|b| b.canonical);

    let specialization = if case.family.is_empty() {
        None
    } else {
        let chk = case.verify_specialization()?;
        if !chk.as_expected() {
            failures.push(format!("specialization of {} does not match: {}", case.id, chk.diff.join("; ")));
        } else if !chk.matches {
            notes.push(format!("known specialization mismatch: {}", chk.diff.join("; ")));
        }
        Some(chk)
    };

    let smoothness: SmoothnessReport = fibration::is_smooth(&case.surface()?, &opts.elim).into();
    match &smoothness {
        SmoothnessReport::Smooth => {}
        SmoothnessReport::Singular { witness } => failures.push(format!("surface is singular at ({})", witness.map(fmt_c).join(", "))),
        SmoothnessReport::Unknown { .. } => warnings.push("smoothness could not be decided".into()),
    }

    let b = target.bifibration()?;
    let spec = target.bifibration.as_ref().unwrap();
    let input = InputEcho {
        case: case.id.clone(),
        analysed_as: target.id.clone(),
        surface: target.specialized.clone(),
        pi: spec.pi.clone(),
        rho: spec.rho.clone(),
        base_pi: b.base_pi,
        base_rho: b.base_rho,
        bifibration_canonical: spec.canonical,
        config: cfg.clone(),
    };

    let cset = fibration::critvals_pi(&b, &opts.elim)?;
    warnings.extend(cset.warnings.iter().map(|w| format!("critical values: {w}")));
    let critvals_pi: Vec<CritValue> = cset.clusters().iter().map(|c| CritValue { value: c.center, multiplicity: c.multiplicity }).collect();
    if critvals_pi.iter().any(|c| c.multiplicity > 1) {
        warnings.push("repeated critical values of pi".into());
    }
    let crit = cset.distinct();
    if let Some(k) = target.expected_k {
        if crit.len() != k {
            failures.push(format!("expected {k} critical values of pi, found {}", crit.len()));
        }
    }

    let fib = b.fibre(b.base_pi)?;
    let genus = fib.poly.newton_genus()?;
    let punctures = fib.poly.punctures_at_infinity()?;
    let points = fibration::fibre_points(&b, b.base_pi, b.base_rho, &opts.elim)?.points;
    let cover = Cover::new(&b, b.base_pi, &opts)?;
    let fibre = FibreReport { genus, punctures, rank_h1: 2 * genus + punctures as u64 - 1, points, branch_values: cover.branch_values.clone() };
    if gated {
        if fibre.points.len() != 3 {
            failures.push(format!("expected a degree-3 cover, found {} fibre points", fibre.points.len()));
        }
        if fibre.branch_values.len() != 6 {
            failures.push(format!("expected 6 branch values of rho, found {}", fibre.branch_values.len()));
        }
        if genus != 1 || punctures != 3 {
            failures.push(format!("expected a genus-1 fibre with 3 punctures, found genus {genus} with {punctures}"));
        }
    }

    let tracked = track_default_paths(&b, &crit, &opts);
    let verdicts: Vec<(Option<PlanarPath>, Option<bool>, Option<String>)> = tracked
        .par_iter()
        .map(|(_, _, _, iso)| match iso {
            Err(_) => (None, None, None),
            Ok(iso) => match tracking::extract_matching_path(iso).and_then(|m| cover.snap(&m, 1e-6 * cover.scale())) {
                Err(e) => (None, None, Some(e.to_string())),
                Ok(m) => match cover.is_matching_path(&m) {
                    Ok(v) => (Some(m), Some(v), None),
                    Err(e) => (Some(m), None, Some(e.to_string())),
                },
            },
        })
        .collect();
    let mut isotopies = Vec::new();
    let mut extracted = Vec::new();
    for ((i, path, bent, iso), (m, verdict, merr)) in tracked.into_iter().zip(verdicts) {
        let mut s = IsotopySummary {
            index: i,
            target: crit[i],
            bent,
            path: path.waypoints.clone(),
            merge_pair: None,
            merge_distance: None,
            final_gap: None,
            merge_tol: None,
            collision: None,
            steps: 0,
            rejected_steps: 0,
            trail: vec![],
            matching_path: m.as_ref().map(|m| m.waypoints.clone()),
            matching_verdict: verdict,
            error: merr.clone(),
        };
        if bent {
            notes.push(format!("vanishing path {i} detours around another critical value"));
        }
        match iso {
            Ok(iso) => {
                s.merge_pair = Some(iso.merge_pair);
                s.merge_distance = Some(iso.merge_distance);
                s.final_gap = Some(iso.final_gap);
                s.merge_tol = Some(iso.merge_tol);
                s.collision = Some(iso.collision);
                s.steps = iso.steps();
                s.rejected_steps = iso.rejected_steps;
                s.trail = subsample(&iso.frames, cfg.trail_frames);
                if iso.final_gap <= 10.0 * iso.merge_tol {
                    failures.push(format!("vanishing path {i}: non-merging branch values come within {:.3e}", iso.final_gap));
                }
                match verdict {
                    Some(true) => {}
                    Some(false) => failures.push(format!("extracted path {i} is not a matching path")),
                    None => warnings.push(format!("extracted path {i}: {}", merr.unwrap_or_default())),
                }
            }
            Err(e) => {
                failures.push(format!("vanishing path {i}: {e}"));
                s.error = Some(e.to_string());
            }
        }
        if let Some(m) = m {
            extracted.push(m);
        }
        isotopies.push(s);
    }

    let sphere_table = match tracking::sphere_table(&cover, b.base_rho) {
        Ok(t) => t.into_iter().map(|e| SphereRow { branch_value: e.branch_value, sheets: e.sphere.sheets, detoured: e.detoured }).collect(),
        Err(e) => {
            failures.push(format!("sphere table: {e}"));
            vec![]
        }
    };

    let labels = target.basis.as_ref().map(|b| b.labels.clone()).unwrap_or_else(basis_labels);
    let basis = if let Some(paths) = target.basis_paths() {
        let radius = cfg.tolerances.snap * cover.scale();
        match paths.iter().map(|p| cover.snap(p, radius)).collect::<Result<Vec<_>, _>>() {
            Ok(snapped) => Some(check_basis(&cover, &labels, snapped, "catalog")),
            Err(e) => {
                failures.push(format!("basis endpoints do not snap to branch values: {e}"));
                None
            }
        }
    } else if cfg.search_basis && fibre.rank_h1 == 4 && fibre.points.len() == 3 {
        match find_basis(&cover, &extracted, cfg.seed)? {
            Some(mb) => Some(check_basis(&cover, &labels, mb.paths, "search")),
            None => {
                warnings.push("no basis of matching paths found".into());
                None
            }
        }
    } else {
        None
    };
    if let Some(br) = &basis {
        if gated && !(br.verdicts.iter().all(|v| *v) && br.is_d4) {
            failures.push(format!("basis check failed: verdicts {:?}, D4 {}{}", br.verdicts, br.is_d4, br.error.as_ref().map(|e| format!(", {e}")).unwrap_or_default()));
        }
    }

    let (factorization, homology) = if target.factorization.is_some() {
        let chk = painleve::verify_factorization(target, &target.tree()?)?;
        for s in &chk.steps {
            if !s.ok {
                failures.push(format!("factorization moves {:?} from column {} disagree at {:?}", s.moves, s.from, s.mismatches.iter().map(|m| m.index).collect::<Vec<_>>()));
            }
            if !s.alternative_used.is_empty() {
                notes.push(format!("column {}: entries {:?} match only a stated alternative", s.from + 1, s.alternative_used));
            }
            if !s.skipped.is_empty() {
                notes.push(format!("column {}: entries {:?} not checkable", s.from + 1, s.skipped));
            }
        }
        if !chk.h1_ok() {
            failures.push(format!("H1 {:?} differs from expected {:?}", chk.h1.iter().map(|g| g.as_ref().map(|g| g.to_string())).collect::<Vec<_>>(), chk.expected_h1));
        }
        let h = homology(target, &chk)?;
        if !h.gauge_invariant {
            failures.push("H1 depends on the edge-sign gauge".into());
        }
        (Some(chk), Some(h))
    } else {
        (None, None)
    };

    let lattice = if target.id == "III(D8)" {
        let order = factorization.as_ref().and_then(|f| f.h1.iter().flatten().next()).and_then(|g| g.order());
        let rep = lattice_report(&lattice::d8_divisor_gram(), order.map(|o| (BigInt::from(1), o)));
        failures.extend(rep.errors.iter().map(|e| format!("lattice: {e}")));
        Some(rep)
    } else {
        None
    };

    Ok(Report {
        schema: REPORT_SCHEMA,
        input,
        specialization,
        smoothness,
        expected_k: target.expected_k,
        critvals_pi,
        fibre,
        isotopies,
        sphere_table,
        basis,
        factorization,
        homology,
        lattice,
        notes,
        warnings,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsample_keeps_ends() {
        let frames: Vec<Vec<C>> = (0..100).map(|i| vec![C::new(i as f64, 0.0)]).collect();
        let s = subsample(&frames, 5);
        assert_eq!(s.len(), 5);
        assert_eq!(s[0][0].re, 0.0);
        assert_eq!(s[4][0].re, 99.0);
        assert_eq!(subsample(&frames[..3], 5).len(), 3);
    }

    #[test]
    fn identity_lattice_is_trivial() {
        let r = lattice_report(&IntMatrix::identity(3), None);
        assert_eq!(r.determinant.as_deref(), Some("1"));
        assert_eq!(r.cokernel, "0");
        assert_eq!(r.discriminant_group.as_deref(), Some("0"));
    }

    #[test]
    fn d8_chain() {
        let r = lattice_report(&lattice::d8_divisor_gram(), Some((BigInt::from(1), BigInt::from(2))));
        assert_eq!(r.determinant.as_deref().map(|d| d.trim_start_matches('-')), Some("4"));
        assert_eq!(r.discriminant_group.as_deref(), Some("Z/2 + Z/2"));
        let c = r.index_chain.unwrap();
        assert_eq!((c.lattice_index.as_str(), c.quotient_index.as_str()), ("2", "2"));
    }

    #[test]
    fn tolerances_must_be_positive() {
        let t = Tolerances { merge: 0.0, ..Tolerances::default() };
        assert!(t.validate().is_err());
        assert!(Tolerances::default().validate().is_ok());
    }
}
