//! Built-in catalog of the ten Painlevé cubic surfaces: family equations,
//! parameter choices, bifibrations and base points, bases of matching
//! paths, and vanishing-cycle factorization tables.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64 as C;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fibration::{Bifibration, FibrationError};
use crate::lattice::FinAbGroup;
use crate::mcg::{self, Direction, HomologyClass, McgError, PlumbingTree, TwistWord};
use crate::poly::{AffineExpr, PolyError};
use crate::tracking::{PathKind, PlanarPath};
use crate::{ExactPoly, LinearForm, Poly};

pub const SCHEMA: u32 = 1;
pub const VARIABLES: [&str; 3] = ["x", "y", "z"];

const BUILTIN: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PainleveError {
    #[error("unknown case {0:?}")]
    UnknownCase(String),
    #[error("unsupported catalog schema {0}")]
    Schema(u32),
    #[error("catalog: {0}")]
    Format(String),
    #[error("case {0} has no bifibration")]
    NoBifibration(String),
    #[error("case {0} has no {1}")]
    Missing(String, &'static str),
    #[error("bad move {0:?}")]
    BadMove(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Fibration(#[from] FibrationError),
    #[error(transparent)]
    Mcg(#[from] McgError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub schema: u32,
    pub cases: Vec<PainleveCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifibrationSpec {
    pub pi: String,
    pub rho: String,
    pub base_pi: [f64; 2],
    pub base_rho: [f64; 2],
    /// False for a convenience choice not tied to a computed handlebody.
    pub canonical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, i64)>,
    #[serde(default)]
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    /// True when traced from a drawing, false when found by search.
    pub digitized: bool,
    pub labels: Vec<String>,
    pub paths: Vec<Vec<[f64; 2]>>,
}

/// Vanishing-cycle tables: `columns[c][i]` is the twist word of cycle `i`
/// in column `c`, `hurwitz_script[c]` the moves from column `c` to `c + 1`.
/// An entry may list equal alternatives separated by `" = "`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationSpec {
    pub labels: Vec<String>,
    pub columns: Vec<Vec<String>>,
    pub hurwitz_script: Vec<Vec<String>>,
    /// `[column, index]` entries that are incomplete as stated.
    #[serde(default)]
    pub unverifiable: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PainleveCase {
    pub id: String,
    #[serde(default)]
    pub family: String,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default)]
    pub parameter_choice: BTreeMap<String, String>,
    pub specialized: String,
    /// Whether `specialized` is expected to equal the substituted family.
    #[serde(default = "yes")]
    pub specialization_expected: bool,
    pub bifibration: Option<BifibrationSpec>,
    /// Case whose bifibration and tables stand in for this one.
    pub analysis_alias: Option<String>,
    pub expected_k: Option<usize>,
    pub expected_h1: Option<String>,
    pub tree: Option<TreeSpec>,
    pub basis: Option<BasisSpec>,
    pub factorization: Option<FactorizationSpec>,
    #[serde(default)]
    pub notes: Vec<String>,
}

fn yes() -> bool {
    true
}

fn c2(p: [f64; 2]) -> C {
    C::new(p[0], p[1])
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Self, PainleveError> {
        let cat: Catalog = serde_json::from_str(text).map_err(|e| PainleveError::Format(e.to_string()))?;
        if cat.schema != SCHEMA {
            return Err(PainleveError::Schema(cat.schema));
        }
        Ok(cat)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("catalog serializes");
        s.push('\n');
        s
    }

    /// The catalog shipped with the library.
    pub fn builtin() -> &'static Catalog {
        static CAT: OnceLock<Catalog> = OnceLock::new();
        CAT.get_or_init(|| Catalog::from_json(BUILTIN).expect("built-in catalog parses"))
    }

    pub fn ids(&self) -> Vec<&str> {
        self.cases.iter().map(|c| c.id.as_str()).collect()
    }

    /// Exact id, or case-insensitive match ignoring parentheses
    /// (`"iii(d8)"`, `"IIID8"`).
    pub fn get(&self, id: &str) -> Result<&PainleveCase, PainleveError> {
        let norm = |s: &str| s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_ascii_lowercase();
        self.cases.iter().find(|c| c.id == id).or_else(|| self.cases.iter().find(|c| norm(&c.id) == norm(id))).ok_or_else(|| PainleveError::UnknownCase(id.to_string()))
    }

    /// Cases whose id contains `filter` (empty filter lists everything).
    pub fn filter(&self, filter: &str) -> Vec<&PainleveCase> {
        self.cases.iter().filter(|c| c.id.contains(filter)).collect()
    }

    /// The case itself, or its analysis stand-in.
    pub fn analysis_case<'a>(&'a self, case: &'a PainleveCase) -> Result<&'a PainleveCase, PainleveError> {
        match &case.analysis_alias {
            Some(a) => self.get(a),
            None => Ok(case),
        }
    }
}

pub fn get_case(id: &str) -> Result<&'static PainleveCase, PainleveError> {
    Catalog::builtin().get(id)
}

/// Outcome of substituting the parameter choice into the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecializationCheck {
    pub matches: bool,
    pub expected: bool,
    /// Monomials where the two sides differ, as `monomial: family vs stated`.
    pub diff: Vec<String>,
    pub substituted: String,
}

impl SpecializationCheck {
    /// Matching, or mismatching where a mismatch is recorded as known.
    pub fn as_expected(&self) -> bool {
        self.matches == self.expected
    }
}

fn exact_constant(text: &str) -> Result<num_complex::Complex<num_rational::BigRational>, PainleveError> {
    let none: [&str; 0] = [];
    let p = ExactPoly::parse(text, &none)?;
    Ok(p.coefficient(&[]))
}

fn monomial_text(vars: &[String], m: &[u32]) -> String {
    let parts: Vec<String> = vars.iter().zip(m).filter(|(_, e)| **e > 0).map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") }).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl PainleveCase {
    pub fn surface(&self) -> Result<Poly, PainleveError> {
        Ok(Poly::parse(&self.specialized, &VARIABLES)?)
    }

    pub fn exact_surface(&self) -> Result<ExactPoly, PainleveError> {
        Ok(ExactPoly::parse(&self.specialized, &VARIABLES)?)
    }

    pub fn bifibration(&self) -> Result<Bifibration, PainleveError> {
        let spec = self.bifibration.as_ref().ok_or_else(|| PainleveError::NoBifibration(self.id.clone()))?;
        let pi = LinearForm::parse(&spec.pi, &VARIABLES)?;
        let rho = LinearForm::parse(&spec.rho, &VARIABLES)?;
        Ok(Bifibration::new(self.surface()?, pi, rho, c2(spec.base_pi), c2(spec.base_rho))?)
    }

    pub fn base_pi(&self) -> Option<C> {
        self.bifibration.as_ref().map(|b| c2(b.base_pi))
    }

    pub fn base_rho(&self) -> Option<C> {
        self.bifibration.as_ref().map(|b| c2(b.base_rho))
    }

    /// Substitutes the parameter choice into the family and compares term
    /// maps exactly with the stated specialization.
    pub fn verify_specialization(&self) -> Result<SpecializationCheck, PainleveError> {
        let mut vars: Vec<String> = VARIABLES.iter().map(|s| s.to_string()).collect();
        vars.extend(self.parameters.iter().cloned());
        let mut p = ExactPoly::parse(&self.family, &vars)?;
        for name in &self.parameters {
            let value = self.parameter_choice.get(name).ok_or(PainleveError::Missing(self.id.clone(), "parameter value"))?;
            p = p.substitute_linear(name, &AffineExpr::constant(exact_constant(value)?))?;
        }
        let stated = self.exact_surface()?;
        let p = p.reorder(stated.vars())?;
        let mut diff = Vec::new();
        let mut monomials: Vec<&Vec<u32>> = p.terms().keys().chain(stated.terms().keys()).collect();
        monomials.sort();
        monomials.dedup();
        for m in monomials {
            let (a, b) = (p.coefficient(m), stated.coefficient(m));
            if a != b {
                let show = |c: &num_complex::Complex<num_rational::BigRational>| {
                    if c.is_zero() {
                        "0".to_string()
                    } else if c.im.is_zero() {
                        c.re.to_string()
                    } else {
                        format!("{}+{}i", c.re, c.im)
                    }
                };
                diff.push(format!("{}: {} vs {}", monomial_text(stated.vars(), m), show(&a), show(&b)));
            }
        }
        Ok(SpecializationCheck { matches: diff.is_empty(), expected: self.specialization_expected, diff, substituted: p.to_string() })
    }

    pub fn tree(&self) -> Result<PlumbingTree, PainleveError> {
        let t = self.tree.as_ref().ok_or(PainleveError::Missing(self.id.clone(), "tree"))?;
        let idx = |l: &str| t.vertices.iter().position(|v| v == l).ok_or_else(|| McgError::UnknownLabel(l.to_string()));
        let edges = t.edges.iter().map(|(a, b, s)| Ok((idx(a)?, idx(b)?, *s))).collect::<Result<Vec<_>, McgError>>()?;
        Ok(PlumbingTree::new(t.vertices.clone(), edges)?)
    }

    /// Basis paths as stored (endpoints not yet snapped).
    pub fn basis_paths(&self) -> Option<Vec<PlanarPath>> {
        self.basis.as_ref().map(|b| b.paths.iter().map(|w| PlanarPath { waypoints: w.iter().map(|p| c2(*p)).collect(), kind: PathKind::MatchingPath }).collect())
    }

    pub fn expected_h1(&self) -> Option<&str> {
        self.expected_h1.as_deref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    Hurwitz(usize, Direction),
    Cyclic,
}

impl Move {
    /// `"H4"`, `"H4^-1"`, or `"cyc"`.
    pub fn parse(text: &str) -> Result<Self, PainleveError> {
        let t = text.trim();
        if t == "cyc" {
            return Ok(Move::Cyclic);
        }
        let bad = || PainleveError::BadMove(text.to_string());
        let rest = t.strip_prefix('H').ok_or_else(bad)?;
        let (num, dir) = match rest.strip_suffix("^-1") {
            Some(n) => (n, Direction::Inv),
            None => (rest, Direction::Fwd),
        };
        let i: usize = num.parse().map_err(|_| bad())?;
        Ok(Move::Hurwitz(i, dir))
    }

    pub fn apply(&self, t: &[HomologyClass], q: &mcg::IntersectionForm) -> Result<Vec<HomologyClass>, PainleveError> {
        Ok(match self {
            Move::Hurwitz(i, d) => mcg::hurwitz_move(t, *i, *d, q)?,
            Move::Cyclic => mcg::cyclic_permute(t),
        })
    }
}

/// A table entry in homology: the classes of its alternatives, or `None`
/// if the entry is marked unverifiable.
pub type Entry = Option<Vec<HomologyClass>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryMismatch {
    pub index: usize,
    pub expected: Vec<String>,
    pub computed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCheck {
    pub from: usize,
    pub moves: Vec<String>,
    pub ok: bool,
    pub skipped: Vec<usize>,
    /// Entries matched only by a later alternative.
    pub alternative_used: Vec<usize>,
    pub mismatches: Vec<EntryMismatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub classes: Vec<Vec<Option<String>>>,
    pub steps: Vec<StepCheck>,
    /// `None` for columns containing an unverifiable entry.
    pub h1: Vec<Option<FinAbGroup>>,
    pub expected_h1: Option<String>,
}

impl FactorizationCheck {
    pub fn steps_ok(&self) -> bool {
        self.steps.iter().all(|s| s.ok)
    }

    pub fn h1_ok(&self) -> bool {
        let Some(e) = &self.expected_h1 else { return true };
        self.h1.iter().flatten().all(|g| &g.to_string() == e) && self.h1.iter().any(Option::is_some)
    }

    pub fn ok(&self) -> bool {
        self.steps_ok() && self.h1_ok()
    }
}

/// Classes of every table entry on `tree`.
pub fn table_classes(f: &FactorizationSpec, tree: &PlumbingTree) -> Result<Vec<Vec<Entry>>, PainleveError> {
    f.columns
        .iter()
        .enumerate()
        .map(|(c, col)| {
            col.iter()
                .enumerate()
                .map(|(i, text)| {
                    if f.unverifiable.contains(&[c, i]) {
                        return Ok(None);
                    }
                    let alts = text.split(" = ").map(|w| Ok(mcg::class_of_word(&TwistWord::parse(w)?, tree)?)).collect::<Result<Vec<_>, PainleveError>>()?;
                    Ok(Some(alts))
                })
                .collect()
        })
        .collect()
}

/// Runs the stated moves on each column and compares with the next, up to
/// sign entrywise; computes `H₁` of the total space for every complete
/// column.
pub fn verify_factorization(case: &PainleveCase, tree: &PlumbingTree) -> Result<FactorizationCheck, PainleveError> {
    let f = case.factorization.as_ref().ok_or(PainleveError::Missing(case.id.clone(), "factorization"))?;
    let q = tree.form();
    let classes = table_classes(f, tree)?;
    let first = |e: &Entry| e.as_ref().map(|a| a[0].clone());
    let mut steps = Vec::new();
    for (c, moves) in f.hurwitz_script.iter().enumerate() {
        let from = &classes[c];
        let to = &classes[c + 1];
        let mut check = StepCheck { from: c, moves: moves.clone(), ok: true, skipped: vec![], alternative_used: vec![], mismatches: vec![] };
        if from.iter().any(Option::is_none) {
            check.ok = false;
            check.skipped = (0..from.len()).collect();
            steps.push(check);
            continue;
        }
        let mut t: Vec<HomologyClass> = from.iter().map(|e| first(e).unwrap()).collect();
        for m in moves {
            t = Move::parse(m)?.apply(&t, &q)?;
        }
        for (i, (got, want)) in t.iter().zip(to).enumerate() {
            match want {
                None => check.skipped.push(i),
                Some(alts) => match alts.iter().position(|a| a.eq_up_to_sign(got)) {
                    Some(0) => {}
                    Some(_) => check.alternative_used.push(i),
                    None => {
                        check.ok = false;
                        check.mismatches.push(EntryMismatch {
                            index: i,
                            expected: alts.iter().map(|a| a.display_with(&tree.vertices)).collect(),
                            computed: got.display_with(&tree.vertices),
                        });
                    }
                },
            }
        }
        steps.push(check);
    }
    let h1 = classes
        .iter()
        .map(|col| {
            if col.iter().any(Option::is_none) {
                return Ok(None);
            }
            let t: Vec<HomologyClass> = col.iter().map(|e| first(e).unwrap()).collect();
            Ok(Some(mcg::h1_total_space(&t)?))
        })
        .collect::<Result<Vec<_>, PainleveError>>()?;
    let shown = classes.iter().map(|col| col.iter().map(|e| first(e).map(|c| c.display_with(&tree.vertices))).collect()).collect();
    Ok(FactorizationCheck { classes: shown, steps, h1, expected_h1: case.expected_h1.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_round_trips_byte_for_byte() {
        let cat = Catalog::builtin();
        assert_eq!(cat.to_json(), BUILTIN);
        assert_eq!(Catalog::from_json(&cat.to_json()).unwrap(), *cat);
    }

    #[test]
    fn ten_cases() {
        let cat = Catalog::builtin();
        assert_eq!(cat.cases.len(), 10);
        assert_eq!(cat.filter("III").len(), 3);
        assert_eq!(cat.filter("").len(), 10);
        assert_eq!(get_case("iii(d8)").unwrap().id, "III(D8)");
        assert!(get_case("VII").is_err());
    }

    #[test]
    fn stated_values() {
        assert_eq!(get_case("II").unwrap().expected_k, Some(6));
        assert_eq!(get_case("III(D8)").unwrap().base_rho(), Some(C::new(1.0, 0.0)));
        assert_eq!(get_case("VI").unwrap().base_rho(), Some(C::new(0.0, -15.0)));
        let vi = get_case("VI").unwrap().surface().unwrap();
        assert!(vi.eval(&[C::new(3f64.sqrt(), 0.0), C::zero(), C::zero()]).unwrap().norm() < 1e-14);
    }

    #[test]
    fn specializations() {
        for case in &Catalog::builtin().cases {
            let chk = case.verify_specialization().unwrap();
            assert!(chk.as_expected(), "{}: {:?}", case.id, chk.diff);
        }
        let fnc = get_case("II(FN)").unwrap().verify_specialization().unwrap();
        assert!(!fnc.matches);
        assert_eq!(fnc.diff, vec!["z: 1 vs -1".to_string()]);
    }

    #[test]
    fn move_grammar() {
        assert_eq!(Move::parse("H4^-1").unwrap(), Move::Hurwitz(4, Direction::Inv));
        assert_eq!(Move::parse("H12").unwrap(), Move::Hurwitz(12, Direction::Fwd));
        assert_eq!(Move::parse("cyc").unwrap(), Move::Cyclic);
        assert!(Move::parse("X1").is_err());
    }

    #[test]
    fn tables_and_expected_k() {
        for case in &Catalog::builtin().cases {
            if let Some(f) = &case.factorization {
                for col in &f.columns {
                    assert_eq!(Some(col.len()), case.expected_k, "{}", case.id);
                    assert_eq!(col.len(), f.labels.len());
                }
                assert_eq!(f.hurwitz_script.len() + 1, f.columns.len());
            }
        }
    }
}
