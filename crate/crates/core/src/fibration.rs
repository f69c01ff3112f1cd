//! The bifibration `(π, ρ)` on an affine surface `{f = 0} ⊂ C³`:
//! critical values of `π`, the fibres `X_w = π⁻¹(w)` as plane curves,
//! the branch values of `ρ` on them, and fibre points of the cover.

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::{AffineExpr, PolyError};
use crate::roots::elim::{scaled_residual, ElimOptions};
use crate::roots::{self, RootError, RootSet};
use crate::{LinearForm, Poly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FibrationError {
    #[error("surface polynomial must be nonconstant in variables (x, y, z)")]
    BadSurface,
    #[error("pi and rho must be nonconstant and linearly independent")]
    DependentForms,
    #[error("critical locus of pi is not finite")]
    PositiveDimensional,
    #[error("rho is constant on the fibre")]
    ConstantRho,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Roots(#[from] RootError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bifibration {
    pub surface: Poly,
    pub pi: LinearForm,
    pub rho: LinearForm,
    pub base_pi: Complex64,
    pub base_rho: Complex64,
}

/// A fibre `X_w` written as a plane curve in the two surviving variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Fibre {
    pub w: Complex64,
    /// The variable solved for from `π = w`.
    pub eliminated: String,
    pub poly: Poly,
    /// `ρ` restricted to the fibre plane.
    pub rho: LinearForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FibrePoints {
    /// Coordinates in the fibre plane, sorted; the index is the sheet label.
    pub points: Vec<[Complex64; 2]>,
    pub sheet_labels: Vec<usize>,
    /// Cluster multiplicities of the underlying univariate solve.
    pub multiplicities: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Smoothness {
    Smooth,
    Singular { witness: [Complex64; 3] },
    Unknown { diagnostics: Vec<String> },
}

impl Bifibration {
    pub fn new(surface: Poly, pi: LinearForm, rho: LinearForm, base_pi: Complex64, base_rho: Complex64) -> Result<Self, FibrationError> {
        if surface.nvars() != 3 || surface.is_constant() {
            return Err(FibrationError::BadSurface);
        }
        let vars = surface.vars().to_vec();
        for form in [&pi, &rho] {
            if form.coeffs().keys().any(|v| !vars.contains(v)) {
                return Err(FibrationError::Poly(PolyError::UnknownVariable(form.coeffs().keys().find(|v| !vars.contains(v)).cloned().unwrap_or_default())));
            }
        }
        let a: Vec<Complex64> = vars.iter().map(|v| pi.coeff(v)).collect();
        let b: Vec<Complex64> = vars.iter().map(|v| rho.coeff(v)).collect();
        let scale = a.iter().chain(&b).map(|c| c.norm()).fold(0.0, f64::max);
        let minor = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).map(|(i, j)| (a[i] * b[j] - a[j] * b[i]).norm()).fold(0.0, f64::max);
        if minor <= 1e-12 * scale * scale {
            return Err(FibrationError::DependentForms);
        }
        Ok(Bifibration { surface, pi, rho, base_pi, base_rho })
    }

    pub fn vars(&self) -> &[String] {
        self.surface.vars()
    }

    /// Variable eliminated when restricting to a fibre of `π`.
    pub fn eliminated_variable(&self) -> String {
        self.pi.dominant_variable(self.vars()).expect("pi nonconstant")
    }

    fn fibre_substitution(&self, w: Complex64) -> (String, AffineExpr<Complex64>) {
        let k = self.eliminated_variable();
        let ak = self.pi.coeff(&k);
        let coeffs: Vec<(String, Complex64)> = self.pi.coeffs().iter().filter(|(v, _)| **v != k).map(|(v, c)| (v.clone(), -c / ak)).collect();
        (k, AffineExpr::new(coeffs, (w - self.pi.constant_term()) / ak))
    }

    pub fn fibre(&self, w: Complex64) -> Result<Fibre, FibrationError> {
        let (k, expr) = self.fibre_substitution(w);
        let poly = self.surface.substitute_linear(&k, &expr)?;
        let plane = poly.vars().to_vec();
        // rho with the eliminated variable replaced
        let rho_poly = self.rho.to_poly(self.vars())?.substitute_linear(&k, &expr)?;
        let rho = LinearForm::from_poly(&rho_poly).map_err(|_| FibrationError::ConstantRho)?;
        debug_assert_eq!(rho_poly.vars(), &plane[..]);
        Ok(Fibre { w, eliminated: k, poly, rho })
    }

    /// Lifts a fibre-plane point of `X_w` back to `C³`.
    pub fn lift(&self, w: Complex64, uv: [Complex64; 2]) -> [Complex64; 3] {
        let (k, expr) = self.fibre_substitution(w);
        let vars = self.vars();
        let plane: Vec<&String> = vars.iter().filter(|v| **v != k).collect();
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let mut val = expr.constant;
        for (name, c) in &expr.coeffs {
            let i = plane.iter().position(|p| *p == name).unwrap();
            val += c * uv[i];
        }
        let mut j = 0;
        for (i, v) in vars.iter().enumerate() {
            if *v == k {
                out[i] = val;
            } else {
                out[i] = uv[j];
                j += 1;
            }
        }
        out
    }
}

pub fn fibre_poly(b: &Bifibration, w: Complex64) -> Result<Poly, FibrationError> {
    Ok(b.fibre(w)?.poly)
}

/// Critical values of `π` on `{f = 0}` from `{f = 0, ∇f ∥ dπ}`.
pub fn critvals_pi(b: &Bifibration, opts: &ElimOptions) -> Result<RootSet, FibrationError> {
    let vars = b.vars().to_vec();
    let k = b.eliminated_variable();
    let kk = vars.iter().position(|v| *v == k).unwrap();
    let grad: Vec<Poly> = vars.iter().map(|v| b.surface.partial(v)).collect::<Result<_, _>>()?;
    let a: Vec<Complex64> = vars.iter().map(|v| b.pi.coeff(v)).collect();
    let mut eqs = vec![b.surface.clone()];
    for j in (0..3).filter(|&j| j != kk) {
        eqs.push(&grad[j].scale_by(&a[kk]) - &grad[kk].scale_by(&a[j]));
    }
    let sols = match roots::solve_system3(&eqs, opts) {
        Ok(s) => s,
        Err(RootError::Degenerate(_)) => return Err(FibrationError::PositiveDimensional),
        Err(e) => return Err(e.into()),
    };
    let values = sols.iter().map(|s| b.pi.eval_at(&vars, &s.point)).collect();
    let residuals = sols.iter().map(|s| s.residual).collect();
    Ok(RootSet::from_values(values, residuals, opts.roots.cluster))
}

/// Branch values of `ρ` on the fibre `X_w`.
pub fn critvals_rho(b: &Bifibration, w: Complex64, opts: &ElimOptions) -> Result<RootSet, FibrationError> {
    let fib = b.fibre(w)?;
    Ok(roots::plane_curve_critical_values(&fib.poly, &fib.rho, opts)?)
}

/// As [`critvals_rho`], flagging `w` within `1e-8` of a known `π`-critical value.
pub fn critvals_rho_checked(b: &Bifibration, w: Complex64, pi_crit: &[Complex64], opts: &ElimOptions) -> Result<RootSet, FibrationError> {
    let mut set = critvals_rho(b, w, opts)?;
    if pi_crit.iter().any(|c| (c - w).norm() < 1e-8) {
        set.warnings.push("singular fibre: w is a critical value of pi".into());
    }
    Ok(set)
}

/// Points of `X_w ∩ {ρ = s}`, i.e. the fibre of the cover `ρ_w` over `s`.
pub fn fibre_points(b: &Bifibration, w: Complex64, s: Complex64, opts: &ElimOptions) -> Result<FibrePoints, FibrationError> {
    fibre_points_on(&b.fibre(w)?, s, opts)
}

pub fn fibre_points_on(fib: &Fibre, s: Complex64, opts: &ElimOptions) -> Result<FibrePoints, FibrationError> {
    let (set, line) = cover_roots(fib, s, opts)?;
    let mut points: Vec<[Complex64; 2]> = Vec::with_capacity(set.len());
    let mut multiplicities = Vec::new();
    for cl in set.clusters() {
        points.push(line.point(cl.center));
        multiplicities.push(cl.multiplicity);
    }
    let sheet_labels = (0..points.len()).collect();
    Ok(FibrePoints { points, sheet_labels, multiplicities })
}

/// All points over `s` with multiplicity, unclustered, in root order.
pub fn fibre_points_raw(fib: &Fibre, s: Complex64, opts: &ElimOptions) -> Result<Vec<[Complex64; 2]>, FibrationError> {
    let (set, line) = cover_roots(fib, s, opts)?;
    Ok(set.roots.iter().map(|&t| line.point(t)).collect())
}

/// The level line `{ρ = s}` parametrized by the plane variable `keep`.
struct LevelLine {
    keep: usize,
    slope: Complex64,
    offset: Complex64,
}

impl LevelLine {
    fn point(&self, t: Complex64) -> [Complex64; 2] {
        let mut p = [Complex64::new(0.0, 0.0); 2];
        p[self.keep] = t;
        p[1 - self.keep] = self.offset + self.slope * t;
        p
    }
}

fn cover_roots(fib: &Fibre, s: Complex64, opts: &ElimOptions) -> Result<(RootSet, LevelLine), FibrationError> {
    let plane = fib.poly.vars().to_vec();
    let (ca, cb) = (fib.rho.coeff(&plane[0]), fib.rho.coeff(&plane[1]));
    if ca.norm() == 0.0 && cb.norm() == 0.0 {
        return Err(FibrationError::ConstantRho);
    }
    // solve rho = s for the dominant plane variable
    let (solve_idx, keep_idx) = if cb.norm() >= ca.norm() { (1, 0) } else { (0, 1) };
    let (cs, ck) = if solve_idx == 1 { (cb, ca) } else { (ca, cb) };
    let c = *fib.rho.constant_term();
    let expr = AffineExpr::new([(plane[keep_idx].clone(), -ck / cs)], (s - c) / cs);
    let uni = fib.poly.substitute_linear(&plane[solve_idx], &expr)?;
    let set = roots::univariate_roots_with(&uni, &opts.roots)?;
    Ok((set, LevelLine { keep: keep_idx, slope: -ck / cs, offset: (s - c) / cs }))
}

/// Decides whether `{f = 0}` is smooth: solves a zero-dimensional triple
/// from `{f, ∂x f, ∂y f, ∂z f}` and tests the remaining equation.
pub fn is_smooth(f: &Poly, opts: &ElimOptions) -> Smoothness {
    if f.nvars() != 3 || f.is_constant() {
        return Smoothness::Unknown { diagnostics: vec!["expected a nonconstant polynomial in 3 variables".into()] };
    }
    let vars = f.vars().to_vec();
    let mut all = vec![f.clone()];
    for v in &vars {
        match f.partial(v) {
            Ok(d) => all.push(d),
            Err(e) => return Smoothness::Unknown { diagnostics: vec![e.to_string()] },
        }
    }
    let mut diagnostics = Vec::new();
    for skip in [3usize, 2, 1, 0] {
        let triple: Vec<Poly> = (0..4).filter(|&i| i != skip).map(|i| all[i].clone()).collect();
        match roots::solve_system3(&triple, opts) {
            Ok(sols) => {
                for s in sols {
                    if scaled_residual(&all[skip], &s.point) < 1e-8 {
                        return Smoothness::Singular { witness: [s.point[0], s.point[1], s.point[2]] };
                    }
                }
                return Smoothness::Smooth;
            }
            Err(e) => diagnostics.push(format!("triple without equation {skip}: {e}")),
        }
    }
    Smoothness::Unknown { diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    const XYZ: [&str; 3] = ["x", "y", "z"];

    fn zero() -> C {
        C::new(0.0, 0.0)
    }

    fn sphere() -> Bifibration {
        Bifibration::new(Poly::parse("x^2 + y^2 + z^2 - 1", &XYZ).unwrap(), LinearForm::parse("z", &XYZ).unwrap(), LinearForm::parse("x", &XYZ).unwrap(), zero(), zero()).unwrap()
    }

    #[test]
    fn sphere_poles() {
        let s = critvals_pi(&sphere(), &ElimOptions::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.roots[0] + 1.0).norm() < 1e-10);
        assert!((s.roots[1] - 1.0).norm() < 1e-10);
    }

    #[test]
    fn sphere_fibre_and_cover() {
        let b = sphere();
        let f = b.fibre(zero()).unwrap();
        assert_eq!(f.poly, Poly::parse("x^2 + y^2 - 1", &["x", "y"]).unwrap());
        let r = critvals_rho(&b, zero(), &ElimOptions::default()).unwrap();
        assert_eq!(r.len(), 2);
        let pts = fibre_points(&b, zero(), zero(), &ElimOptions::default()).unwrap();
        assert_eq!(pts.points.len(), 2);
        for p in &pts.points {
            assert!(p[0].norm() < 1e-14);
            assert!((p[1].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn plane_fibre_is_a_line() {
        let b = Bifibration::new(Poly::parse("x + y + z", &XYZ).unwrap(), LinearForm::parse("z", &XYZ).unwrap(), LinearForm::parse("x", &XYZ).unwrap(), zero(), zero()).unwrap();
        assert_eq!(fibre_poly(&b, zero()).unwrap(), Poly::parse("x + y", &["x", "y"]).unwrap());
    }

    #[test]
    fn dependent_forms_rejected() {
        let r =
            Bifibration::new(Poly::parse("x*y*z + 1", &XYZ).unwrap(), LinearForm::parse("x + 2*y", &XYZ).unwrap(), LinearForm::parse("2*x + 4*y", &XYZ).unwrap(), zero(), zero());
        assert_eq!(r, Err(FibrationError::DependentForms));
    }

    #[test]
    fn lifted_points_lie_on_surface() {
        let b = sphere();
        let w = C::new(0.3, 0.1);
        let pts = fibre_points(&b, w, C::new(0.2, -0.4), &ElimOptions::default()).unwrap();
        for p in &pts.points {
            let q = b.lift(w, *p);
            assert!(b.surface.eval(&q).unwrap().norm() < 1e-12);
            assert!((q[2] - w).norm() < 1e-15);
        }
    }

    #[test]
    fn smoothness() {
        let o = ElimOptions::default();
        assert_eq!(is_smooth(&Poly::parse("x^2 + y^2 + z^2 - 1", &XYZ).unwrap(), &o), Smoothness::Smooth);
        match is_smooth(&Poly::parse("x^2 + y^2 + z^2", &XYZ).unwrap(), &o) {
            Smoothness::Singular { witness } => assert!(witness.iter().all(|c| c.norm() < 1e-6)),
            other => panic!("{other:?}"),
        }
    }
}
