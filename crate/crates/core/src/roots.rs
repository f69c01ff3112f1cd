//! Univariate complex root finding (Aberth–Ehrlich) and, in [`elim`],
//! resultant-based elimination for small polynomial systems.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_complex::{Complex, Complex64};
use num_traits::{Float, FloatConst};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::poly::MultiPoly;
use crate::scalar::Coeff;

pub mod elim;

pub use elim::{plane_curve_critical_values, resultant, solve_system2, solve_system3, ElimOptions, SystemSolution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("expected a univariate polynomial, got {0} variables")]
    NotUnivariate(usize),
    #[error("root finder did not converge (worst scaled residual {worst:e})")]
    NotConverged { worst: f64, best: Vec<Complex64> },
    #[error("variable `{0}` does not occur in both polynomials")]
    NotInvolved(String),
    #[error("degenerate elimination: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Poly(String),
}

impl From<crate::poly::PolyError> for RootError {
    fn from(e: crate::poly::PolyError) -> Self {
        RootError::Poly(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Residual tolerance, relative to `Σ|cᵢ|·max(1,|r|)^deg`.
    pub tol: f64,
    /// Cluster radius relative to `max(1, max |r|)`.
    pub cluster: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { tol: 1e-10, cluster: 1e-7, max_iter: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<F> {
    pub center: Complex<F>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet<F = f64> {
    /// With multiplicity, sorted by real then imaginary part.
    pub roots: Vec<Complex<F>>,
    /// Scaled residual of each root.
    pub residuals: Vec<F>,
    pub degree: usize,
    /// Leading coefficients below `1e-10 × max` were dropped.
    pub truncated: bool,
    pub warnings: Vec<String>,
    clusters: Vec<Cluster<F>>,
}

impl<F: Float> RootSet<F> {
    pub fn clusters(&self) -> &[Cluster<F>] {
        &self.clusters
    }

    /// Distinct roots (cluster centers).
    pub fn distinct(&self) -> Vec<Complex<F>> {
        self.clusters.iter().map(|c| c.center).collect()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Builds a set from already computed values (multiplicity one each).
    pub fn from_values(mut values: Vec<Complex<F>>, residuals: Vec<F>, cluster_rel: f64) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| cmp_complex(&values[a], &values[b]));
        let res: Vec<F> = idx.iter().map(|&i| residuals.get(i).copied().unwrap_or_else(F::zero)).collect();
        values = idx.iter().map(|&i| values[i]).collect();
        let clusters = cluster(&values, cluster_rel);
        RootSet { degree: values.len(), roots: values, residuals: res, truncated: false, warnings: Vec::new(), clusters }
    }
}

pub(crate) fn cmp_complex<F: Float>(a: &Complex<F>, b: &Complex<F>) -> Ordering {
    a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

fn cluster<F: Float>(roots: &[Complex<F>], rel: f64) -> Vec<Cluster<F>> {
    let n = roots.len();
    let scale = roots.iter().map(|r| r.norm()).fold(F::one(), F::max);
    let radius = F::from(rel).unwrap() * scale;
    // single linkage, union-find
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let mut out: Vec<Cluster<F>> = groups
        .into_iter()
        .map(|(_, g)| {
            let m = F::from(g.len()).unwrap();
            let sum = g.iter().fold(Complex::new(F::zero(), F::zero()), |acc, &i| acc + roots[i]);
            Cluster { center: sum / m, multiplicity: g.len() }
        })
        .collect();
    out.sort_by(|a, b| cmp_complex(&a.center, &b.center));
    out
}

/// Horner evaluation of `p` and `p'`, plus `Σ|cᵢ||z|^i` for the rounding bound.
fn horner<F: Float>(coeffs: &[Complex<F>], z: Complex<F>) -> (Complex<F>, Complex<F>, F) {
    let zero = Complex::new(F::zero(), F::zero());
    let mut p = zero;
    let mut dp = zero;
    let mut bound = F::zero();
    let az = z.norm();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        bound = bound * az + c.norm();
    }
    (p, dp, bound)
}

pub fn eval_univariate<F: Float>(coeffs: &[Complex<F>], z: Complex<F>) -> Complex<F> {
    horner(coeffs, z).0
}

/// Initial radii from the upper convex hull of `(i, log|cᵢ|)`.
fn newton_polygon_starts<F: Float + FloatConst>(coeffs: &[Complex<F>], rng: &mut ChaCha8Rng) -> Vec<Complex<F>> {
    let n = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs.iter().enumerate().filter(|(_, c)| c.norm() > F::zero()).map(|(i, c)| (i, c.norm().to_f64().unwrap().ln())).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cr = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cr >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let m = j - i;
        let r = ((li - lj) / m as f64).exp();
        for k in 0..m {
            let ang = std::f64::consts::TAU * (k as f64) / (m as f64) + std::f64::consts::TAU * (i as f64) / (n as f64) + sigma;
            out.push(Complex::new(F::from(r * ang.cos()).unwrap(), F::from(r * ang.sin()).unwrap()));
        }
    }
    out
}

/// All roots of `Σ coeffs[i] zᶦ` (lowest degree first), with multiplicity.
pub fn roots_of<F>(coeffs: &[Complex<F>], opts: &RootOptions) -> Result<RootSet<F>, RootError>
where
    F: Float + FloatConst + Debug,
{
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(RootError::NonFinite);
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(F::zero(), F::max);
    if scale == F::zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let lead_cut = F::from(1e-10).unwrap() * scale;
    let mut deg = coeffs.len() - 1;
    let mut truncated = false;
    while coeffs[deg].norm() < lead_cut {
        deg -= 1;
        truncated = true;
    }
    let mut warnings = Vec::new();
    if truncated {
        warnings.push(format!("leading coefficients truncated; degree {} -> {}", coeffs.len() - 1, deg));
    }
    let zeros = coeffs.iter().take_while(|c| c.norm() == F::zero()).count();
    let zero = Complex::new(F::zero(), F::zero());
    let mut roots: Vec<Complex<F>> = vec![zero; zeros];
    let work: Vec<Complex<F>> = coeffs[zeros..=deg].to_vec();
    let n = work.len() - 1;
    if n == 1 {
        roots.push(-work[0] / work[1]);
    } else if n > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut z = newton_polygon_starts(&work, &mut rng);
        let eps = F::epsilon();
        let mut done = vec![false; n];
        for _ in 0..opts.max_iter {
            if done.iter().all(|&d| d) {
                break;
            }
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let (p, dp, bound) = horner(&work, z[i]);
                if p.norm() <= eps * bound * F::from(4.0).unwrap() {
                    done[i] = true;
                    continue;
                }
                let ratio = p / dp;
                let mut s = zero;
                for j in 0..n {
                    if j != i {
                        let d = z[i] - z[j];
                        if d.norm() > F::zero() {
                            s = s + d.inv();
                        }
                    }
                }
                let denom = Complex::new(F::one(), F::zero()) - ratio * s;
                let w = if denom.norm() > F::zero() && denom.re.is_finite() { ratio / denom } else { ratio };
                if !w.re.is_finite() || !w.im.is_finite() {
                    // p'(z) = 0 at a start point; nudge
                    z[i] = z[i] + Complex::new(F::from(1e-3).unwrap(), F::from(1e-3).unwrap()) * (F::one() + z[i].norm());
                    continue;
                }
                z[i] = z[i] - w;
                if w.norm() <= eps * F::from(4.0).unwrap() * z[i].norm() {
                    done[i] = true;
                }
            }
        }
        // Newton polish, kept only when it helps.
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let (p, dp, _) = horner(&work, *zi);
                if dp.norm() == F::zero() {
                    break;
                }
                let cand = *zi - p / dp;
                if horner(&work, cand).0.norm() < p.norm() {
                    *zi = cand;
                } else {
                    break;
                }
            }
        }
        roots.extend(z);
    }
    let active = &coeffs[..=deg];
    let l1 = active.iter().fold(F::zero(), |a, c| a + c.norm());
    let tol = F::from(opts.tol).unwrap();
    let mut residuals = Vec::with_capacity(roots.len());
    let mut worst = F::zero();
    for r in &roots {
        let scaled = eval_univariate(active, *r).norm() / (l1 * r.norm().max(F::one()).powi(deg as i32));
        worst = worst.max(scaled);
        residuals.push(scaled);
    }
    if worst > tol || residuals.iter().any(|r| !r.is_finite()) {
        return Err(RootError::NotConverged {
            worst: worst.to_f64().unwrap_or(f64::INFINITY),
            best: roots.iter().map(|r| Complex64::new(r.re.to_f64().unwrap(), r.im.to_f64().unwrap())).collect(),
        });
    }
    let mut idx: Vec<usize> = (0..roots.len()).collect();
    idx.sort_by(|&a, &b| cmp_complex(&roots[a], &roots[b]));
    let roots: Vec<Complex<F>> = idx.iter().map(|&i| roots[i]).collect();
    let residuals: Vec<F> = idx.iter().map(|&i| residuals[i]).collect();
    let clusters = cluster(&roots, opts.cluster);
    Ok(RootSet { roots, residuals, degree: deg, truncated, warnings, clusters })
}

pub fn roots_of_coeffs(coeffs: &[Complex64], opts: &RootOptions) -> Result<RootSet, RootError> {
    roots_of(coeffs, opts)
}

/// Roots of a univariate [`MultiPoly`].
pub fn univariate_roots<T: Coeff>(p: &MultiPoly<T>, tol: f64) -> Result<RootSet, RootError> {
    univariate_roots_with(p, &RootOptions { tol, ..RootOptions::default() })
}

pub fn univariate_roots_with<T: Coeff>(p: &MultiPoly<T>, opts: &RootOptions) -> Result<RootSet, RootError> {
    if p.nvars() != 1 {
        return Err(RootError::NotUnivariate(p.nvars()));
    }
    let c: Vec<Complex64> = p.univariate_coeffs()?.iter().map(Coeff::to_complex64).collect();
    roots_of(&c, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn quadratic_and_triple_root() {
        let r = roots_of(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &RootOptions::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r.roots[0] + 1.0).norm() < 1e-14);
        assert!((r.roots[1] - 1.0).norm() < 1e-14);
        let t = roots_of(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &RootOptions::default()).unwrap();
        assert_eq!(t.clusters().len(), 1);
        assert_eq!(t.clusters()[0].multiplicity, 3);
    }

    #[test]
    fn perturbed_triple_root_clusters() {
        // (z-1)^3 expanded numerically, with the cluster visible at 1e-7 scale
        // only because coefficients are exact.
        let r = roots_of(&[c(-1.0, 0.0), c(3.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)], &RootOptions::default()).unwrap();
        assert_eq!(r.len(), 3);
        for x in &r.roots {
            assert!((x - 1.0).norm() < 1e-4);
        }
    }

    #[test]
    fn leading_truncation_flags() {
        let r = roots_of(&[c(-1.0, 0.0), c(1.0, 0.0), c(1e-14, 0.0)], &RootOptions::default()).unwrap();
        assert!(r.truncated);
        assert_eq!(r.degree, 1);
        assert!((r.roots[0] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(roots_of::<f64>(&[c(0.0, 0.0)], &RootOptions::default()), Err(RootError::ZeroPolynomial));
        assert_eq!(roots_of(&[c(f64::NAN, 0.0), c(1.0, 0.0)], &RootOptions::default()), Err(RootError::NonFinite));
    }

    #[test]
    fn single_precision() {
        let r = roots_of(&[Complex::new(2.0f32, 0.0), Complex::new(-3.0, 0.0), Complex::new(1.0, 0.0)], &RootOptions { tol: 1e-5, ..RootOptions::default() }).unwrap();
        assert!((r.roots[0].re - 1.0).abs() < 1e-5);
        assert!((r.roots[1].re - 2.0).abs() < 1e-5);
    }

    #[test]
    fn seeded_is_deterministic() {
        let p = [c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(2.0, 0.0), c(1.0, 0.0)];
        let a = roots_of(&p, &RootOptions { seed: 42, ..RootOptions::default() }).unwrap();
        let b = roots_of(&p, &RootOptions { seed: 42, ..RootOptions::default() }).unwrap();
        assert_eq!(a, b);
    }
}
