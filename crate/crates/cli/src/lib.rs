//! Commands behind the `bifib` binary. Everything here is callable
//! directly, which is how the integration tests drive it.

pub mod json;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bifib_core::analysis::{self, AnalysisConfig, AnalysisError, LatticeReport, Report};
use bifib_core::fibration::FibrationError;
use bifib_core::painleve::{Catalog, PainleveCase};
use bifib_core::tracking::{self, Cover};
use bifib_core::IntMatrix;
use num_bigint::BigInt;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_WARNINGS: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Failure(_) => EXIT_VERIFICATION,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        let input = match &e {
            AnalysisError::Painleve(_) | AnalysisError::Poly(_) | AnalysisError::Threads(_) => true,
            AnalysisError::Fibration(f) => {
                matches!(f, FibrationError::BadSurface | FibrationError::DependentForms | FibrationError::ConstantRho | FibrationError::Poly(_))
            }
            _ => false,
        };
        if input {
            CliError::Input(e.to_string())
        } else {
            CliError::Failure(e.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseSource {
    Case(String),
    Problem(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: CaseSource,
    pub analysis: AnalysisConfig,
    pub out: Option<PathBuf>,
}

/// `BIFIB_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("BIFIB_THREADS") {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Input(format!("BIFIB_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}

/// File-name friendly case id: `III(D8)` becomes `III_D8`.
pub fn slug(id: &str) -> String {
    let s: String = id.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    s.trim_matches('_').to_string()
}

fn fmt_point(p: Option<num_complex::Complex64>) -> String {
    match p {
        None => "-".into(),
        Some(z) if z.im == 0.0 => format!("{}", z.re),
        Some(z) if z.re == 0.0 => format!("{}i", z.im),
        Some(z) => format!("{}{:+}i", z.re, z.im),
    }
}

/// One line per case whose id contains `filter`.
pub fn cmd_list(filter: &str) -> String {
    let cat = Catalog::builtin();
    let mut out = format!("{:<9} {:>3}  {:<8} {:<8} {}\n", "case", "k", "base_pi", "base_rho", "notes");
    for c in cat.filter(filter) {
        let k = c.expected_k.map(|k| k.to_string()).unwrap_or_else(|| "-".into());
        let note = match (&c.analysis_alias, &c.bifibration) {
            (Some(a), _) => format!("analysed as {a}"),
            (None, Some(b)) if !b.canonical => "default bifibration".into(),
            _ => String::new(),
        };
        out.push_str(format!("{:<9} {:>3}  {:<8} {:<8} {}\n", c.id, k, fmt_point(c.base_pi()), fmt_point(c.base_rho()), note).trim_end());
        out.push('\n');
    }
    out
}

pub fn load_problem(path: &Path) -> Result<PainleveCase, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub struct Analysis {
    pub report: Report,
    pub json: String,
    pub svg: Option<String>,
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Analysis, CliError> {
    let cat = Catalog::builtin();
    let problem;
    let case = match &cfg.source {
        CaseSource::Case(id) => cat.get(id).map_err(|e| CliError::Input(e.to_string()))?,
        CaseSource::Problem(p) => {
            problem = load_problem(p)?;
            &problem
        }
    };
    cfg.analysis.tolerances.validate().map_err(CliError::Input)?;
    let report = analysis::analyze(case, cat, &cfg.analysis)?;
    let json = json::to_string(&report);
    let svg = svg::render(&report).ok();
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        let stem = dir.join(slug(&case.id));
        fs::write(stem.with_extension("json"), &json).map_err(|e| CliError::Input(e.to_string()))?;
        if let Some(s) = &svg {
            fs::write(stem.with_extension("svg"), s).map_err(|e| CliError::Input(e.to_string()))?;
        }
    }
    Ok(Analysis { report, json, svg })
}

pub fn cmd_plot(report_json: &str) -> Result<String, CliError> {
    let report: Report = serde_json::from_str(report_json).map_err(|e| CliError::Input(format!("report: {e}")))?;
    svg::render(&report).map_err(|e| CliError::Input(e.to_string()))
}

/// A JSON array of equal-length rows of integers; entries too large for
/// 64 bits may be given as decimal strings.
pub fn read_matrix(text: &str) -> Result<IntMatrix, CliError> {
    let bad = |m: String| CliError::Input(format!("matrix: {m}"));
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let rows = v.as_array().ok_or_else(|| bad("expected an array of rows".into()))?;
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let r = r.as_array().ok_or_else(|| bad("each row must be an array".into()))?;
        let mut row = Vec::with_capacity(r.len());
        for x in r {
            let n = match x {
                serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => BigInt::from_str(&n.to_string()).unwrap(),
                serde_json::Value::String(s) => BigInt::from_str(s.trim()).map_err(|_| bad(format!("not an integer: {s:?}")))?,
                other => return Err(bad(format!("not an integer: {other}"))),
            };
            row.push(n);
        }
        out.push(row);
    }
    if out.is_empty() || out[0].is_empty() {
        return Err(bad("empty matrix".into()));
    }
    IntMatrix::from_rows(out).map_err(|e| bad(e.to_string()))
}

/// Smith form, cokernel and discriminant data of a matrix; `chain` is
/// `(disc Λ, |coker Φ|)` for the index chain.
pub fn cmd_lattice(text: &str, chain: Option<(BigInt, BigInt)>) -> Result<LatticeReport, CliError> {
    let m = read_matrix(text)?;
    Ok(analysis::lattice_report(&m, chain))
}

#[derive(Serialize)]
struct BasisOut {
    digitized: bool,
    labels: Vec<String>,
    paths: Vec<Vec<[f64; 2]>>,
}

/// Searches a basis of matching paths for a case and prints it in the
/// catalog's format.
pub fn cmd_basis(id: &str, cfg: &AnalysisConfig) -> Result<String, CliError> {
    let cat = Catalog::builtin();
    let case = cat.get(id).map_err(|e| CliError::Input(e.to_string()))?;
    let target = cat.analysis_case(case).map_err(|e| CliError::Input(e.to_string()))?;
    let b = target.bifibration().map_err(|e| CliError::Input(e.to_string()))?;
    let opts = cfg.track_options();
    let cover = Cover::new(&b, b.base_pi, &opts).map_err(|e| CliError::Failure(e.to_string()))?;
    let crit = bifib_core::fibration::critvals_pi(&b, &opts.elim).map_err(|e| CliError::Failure(e.to_string()))?.distinct();
    let mut extracted = Vec::new();
    for (_, _, _, iso) in analysis::track_default_paths(&b, &crit, &opts) {
        if let Ok(m) = iso.and_then(|iso| tracking::extract_matching_path(&iso)).and_then(|m| cover.snap(&m, 1e-6 * cover.scale())) {
            extracted.push(m);
        }
    }
    let basis = analysis::find_basis(&cover, &extracted, cfg.seed)
        .map_err(|e| CliError::Failure(e.to_string()))?
        .ok_or_else(|| CliError::Failure(format!("no basis of matching paths found for {id}")))?;
    let out = BasisOut { digitized: false, labels: analysis::basis_labels(), paths: basis.paths.iter().map(|p| p.waypoints.iter().map(|z| [z.re, z.im]).collect()).collect() };
    Ok(serde_json::to_string_pretty(&out).unwrap() + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("III(D8)"), "III_D8");
        assert_eq!(slug("V(deg)"), "V_deg");
        assert_eq!(slug("VI"), "VI");
    }

    #[test]
    fn list_filters() {
        let all = cmd_list("");
        assert_eq!(all.lines().count(), 11);
        assert_eq!(cmd_list("III").lines().count(), 4);
        assert!(all.contains("III(D8)"));
        assert!(all.lines().any(|l| l.starts_with("VI ") && l.contains("-15i")));
    }

    #[test]
    fn matrices() {
        let m = read_matrix(r#"[[2, 0], ["0", 3]]"#).unwrap();
        assert_eq!(m.nrows(), 2);
        assert!(read_matrix("[[1, 2], [3]]").is_err());
        assert!(read_matrix("[[1.5]]").is_err());
        assert!(read_matrix("[]").is_err());
        let r = cmd_lattice("[[2, 0], [0, 3]]", None).unwrap();
        assert_eq!(r.cokernel, "Z/6");
    }
}
