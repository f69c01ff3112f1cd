//! Sylvester resultants and small square polynomial systems.
//!
//! Systems are reduced to a univariate eliminant by iterated resultants
//! after a seeded random linear change of coordinates (so that no leading
//! coefficient vanishes identically); every root of the eliminant seeds a
//! back-substitution whose candidates are then Newton-polished on the
//! original system and kept only if they converge with small residual.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{roots_of_coeffs, RootError, RootOptions, RootSet};
use crate::poly::{AffineExpr, LinearForm, MultiPoly};
use crate::scalar::Coeff;

type Poly = MultiPoly<Complex64>;

/// Determinant by Berkowitz's division-free algorithm.
pub fn berkowitz_det<R>(a: &[Vec<R>], zero: &R, one: &R) -> R
where
    R: Clone,
    for<'x> &'x R: Add<&'x R, Output = R> + Sub<&'x R, Output = R> + Mul<&'x R, Output = R>,
{
    let n = a.len();
    if n == 0 {
        return one.clone();
    }
    let mut v: Vec<R> = vec![one.clone()];
    for r in 0..n {
        // t = [1, -a_rr, -R C, -R A_r C, ..., -R A_r^{r-1} C]
        let mut t: Vec<R> = Vec::with_capacity(r + 2);
        t.push(one.clone());
        t.push(zero - &a[r][r]);
        let mut w: Vec<R> = (0..r).map(|i| a[i][r].clone()).collect();
        for k in 0..r {
            let mut s = zero.clone();
            for j in 0..r {
                s = &s + &(&a[r][j] * &w[j]);
            }
            t.push(zero - &s);
            if k + 1 < r {
                let mut nw = Vec::with_capacity(r);
                for i in 0..r {
                    let mut acc = zero.clone();
                    for j in 0..r {
                        acc = &acc + &(&a[i][j] * &w[j]);
                    }
                    nw.push(acc);
                }
                w = nw;
            }
        }
        let mut nv = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut acc = zero.clone();
            for (j, vj) in v.iter().enumerate() {
                if j <= i {
                    acc = &acc + &(&t[i - j] * vj);
                }
            }
            nv.push(acc);
        }
        v = nv;
    }
    let d = v[n].clone();
    if n % 2 == 1 {
        zero - &d
    } else {
        d
    }
}

/// Sylvester matrix of `p` and `q` in variable `v`: `deg q` rows of `p`'s
/// coefficients followed by `deg p` rows of `q`'s, highest power first.
pub fn sylvester<T: Coeff>(p: &MultiPoly<T>, q: &MultiPoly<T>, v: &str) -> Result<Vec<Vec<MultiPoly<T>>>, RootError> {
    let idx = p.var_index(v)?;
    q.var_index(v)?;
    let (m, n) = match (p.degree_in(idx), q.degree_in(idx)) {
        (Some(m), Some(n)) if m > 0 && n > 0 => (m as usize, n as usize),
        _ => return Err(RootError::NotInvolved(v.to_string())),
    };
    let pc = p.coefficients_in(idx);
    let qc = q.coefficients_in(idx);
    let zero = MultiPoly::zero(pc[0].vars());
    let size = m + n;
    let mut s = vec![vec![zero; size]; size];
    for r in 0..n {
        for k in 0..=m {
            s[r][r + k] = pc[m - k].clone();
        }
    }
    for r in 0..m {
        for k in 0..=n {
            s[n + r][r + k] = qc[n - k].clone();
        }
    }
    Ok(s)
}

/// `Res_v(p, q)`, a polynomial in the remaining variables.
///
/// An identically vanishing resultant is reported as
/// [`RootError::Degenerate`]; for floating rings "identically" means below
/// `1e-10` of the Hadamard-type bound on the determinant.
pub fn resultant<T: Coeff>(p: &MultiPoly<T>, q: &MultiPoly<T>, v: &str) -> Result<MultiPoly<T>, RootError> {
    let s = sylvester(p, q, v)?;
    let rest = s[0][0].vars().to_vec();
    let zero = MultiPoly::zero(&rest);
    let one = MultiPoly::constant(&rest, T::one());
    let mut det = berkowitz_det(&s, &zero, &one);
    let degenerate = if T::EXACT {
        det.is_zero()
    } else {
        // Rounding scale of the expanded determinant: every coefficient is a
        // signed sum of products bounded by the product of row l1 norms.
        let bound: f64 = s.iter().map(|row| row.iter().map(MultiPoly::l1_norm).sum::<f64>()).product();
        let noise = 16.0 * s.len() as f64 * f64::EPSILON * bound;
        // deg Res ≤ deg p · deg q; anything above is cancellation residue
        let cap = p.total_degree().unwrap_or(0) * q.total_degree().unwrap_or(0);
        det = MultiPoly::from_terms(&rest, det.terms().iter().filter(|(m, c)| m.iter().sum::<u32>() <= cap && c.magnitude() > noise).map(|(m, c)| (m.clone(), c.clone())));
        det.l1_norm() <= 64.0 * noise
    };
    if degenerate {
        return Err(RootError::Degenerate(format!("resultant in `{v}` vanishes identically")));
    }
    Ok(det)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElimOptions {
    /// Maximum scaled residual of an accepted solution.
    pub accept: f64,
    /// Solutions beyond this norm are treated as lying at infinity.
    pub max_norm: f64,
    pub seed: u64,
    pub roots: RootOptions,
}

impl Default for ElimOptions {
    fn default() -> Self {
        ElimOptions { accept: 1e-6, max_norm: 1e8, seed: 0, roots: RootOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution {
    pub point: Vec<Complex64>,
    /// Largest scaled residual over the equations.
    pub residual: f64,
}

fn inf_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Componentwise backward error `|e(x)| / Σ|c_m·x^m|`.
pub fn scaled_residual(e: &Poly, x: &[Complex64]) -> f64 {
    let v = e.eval(x).map(|c| c.norm()).unwrap_or(f64::INFINITY);
    let mut mag = 0.0;
    for (m, c) in e.terms() {
        let mut t = c.norm();
        for (xi, &k) in x.iter().zip(m.iter()) {
            t *= xi.norm().powi(k as i32);
        }
        mag += t;
    }
    if v == 0.0 {
        0.0
    } else if mag == 0.0 {
        f64::INFINITY
    } else {
        v / mag
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub(crate) fn solve_linear(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let t = a[col][c];
                a[r][c] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    if x.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Square system with its Jacobian, for Newton refinement.
pub struct NewtonSystem {
    eqs: Vec<Poly>,
    jac: Vec<Vec<Poly>>,
}

impl NewtonSystem {
    pub fn new(eqs: &[Poly]) -> Result<Self, RootError> {
        let vars = eqs[0].vars().to_vec();
        let jac = eqs.iter().map(|e| vars.iter().map(|v| e.partial(v)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
        Ok(NewtonSystem { eqs: eqs.to_vec(), jac })
    }

    pub fn residual(&self, x: &[Complex64]) -> f64 {
        self.eqs.iter().map(|e| scaled_residual(e, x)).fold(0.0, f64::max)
    }

    /// Newton from `x0`; returns the limit if the iteration converges.
    pub fn polish(&self, x0: &[Complex64], max_iter: usize) -> Option<Vec<Complex64>> {
        let mut x = x0.to_vec();
        let mut last_step = f64::INFINITY;
        for _ in 0..max_iter {
            if self.residual(&x) <= 1e-15 {
                return Some(x);
            }
            let f: Vec<Complex64> = self.eqs.iter().map(|e| -e.eval(&x).unwrap()).collect();
            let j: Vec<Vec<Complex64>> = self.jac.iter().map(|row| row.iter().map(|d| d.eval(&x).unwrap()).collect()).collect();
            let Some(dx) = solve_linear(j, f) else {
                // exactly singular Jacobian: accept only if already on the solution set
                return (self.residual(&x) <= 1e-12).then_some(x);
            };
            let step = inf_norm(&dx);
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
            if inf_norm(&x) > 1e10 {
                return None;
            }
            if step <= 1e-14 * (1.0 + inf_norm(&x)) {
                return Some(x);
            }
            // stalled at rounding level (singular solutions converge slowly)
            if step >= last_step && step <= 1e-9 * (1.0 + inf_norm(&x)) {
                return Some(x);
            }
            last_step = step;
        }
        if last_step <= 1e-7 * (1.0 + inf_norm(&x)) {
            Some(x)
        } else {
            None
        }
    }
}

fn random_change(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    loop {
        let m: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = if i == j { 1.0 } else { 0.0 };
                        Complex64::new(d + 0.5 * rng.gen_range(-1.0..1.0), 0.5 * rng.gen_range(-1.0..1.0))
                    })
                    .collect()
            })
            .collect();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        if berkowitz_det(&m, &zero, &one).norm() > 0.2 {
            return m;
        }
    }
}

fn apply(m: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn change_coordinates(eqs: &[Poly], m: &[Vec<Complex64>]) -> Result<Vec<Poly>, RootError> {
    let vars = eqs[0].vars().to_vec();
    let exprs: Vec<AffineExpr<Complex64>> = m.iter().map(|row| AffineExpr::new(vars.iter().cloned().zip(row.iter().cloned()), Complex64::new(0.0, 0.0))).collect();
    eqs.iter().map(|e| e.compose_affine(&vars, &exprs).map_err(RootError::from)).collect()
}

/// Roots usable as Newton seeds; an unconverged root finder still yields
/// its best iterate.
fn seeds(p: &Poly, opts: &RootOptions) -> Vec<Complex64> {
    if p.is_constant() {
        return Vec::new();
    }
    let c = match p.univariate_coeffs() {
        Ok(c) => c,
        Err(_) => return Vec::new(),
    };
    match roots_of_coeffs(&c, opts) {
        Ok(r) => r.roots,
        Err(RootError::NotConverged { best, .. }) => best,
        Err(_) => Vec::new(),
    }
}

fn fix(p: &Poly, var: &str, value: Complex64) -> Result<Poly, RootError> {
    Ok(p.substitute_linear(var, &AffineExpr::constant(value))?)
}

enum Outcome {
    Empty,
    Candidates(Vec<Vec<Complex64>>),
}

fn nonzero_constant(p: &Poly) -> bool {
    p.is_constant() && !p.is_zero()
}

/// Candidate points of `{e0 = e1 = 0}` in two variables.
fn candidates2(e: &[Poly], opts: &RootOptions) -> Result<Outcome, RootError> {
    if e.iter().any(nonzero_constant) {
        return Ok(Outcome::Empty);
    }
    if e.iter().any(Poly::is_zero) {
        return Err(RootError::Degenerate("zero equation".into()));
    }
    let vars = e[0].vars().to_vec();
    let r = resultant(&e[0], &e[1], &vars[1])?;
    if r.is_constant() {
        return Ok(Outcome::Empty);
    }
    let mut out = Vec::new();
    for u in seeds(&r, opts) {
        for eq in e {
            let g = fix(eq, &vars[0], u)?;
            for v in seeds(&g, opts) {
                out.push(vec![u, v]);
            }
        }
    }
    Ok(Outcome::Candidates(out))
}

/// Candidate points of `{e0 = e1 = e2 = 0}` in three variables.
fn candidates3(e: &[Poly], opts: &RootOptions) -> Result<Outcome, RootError> {
    if e.iter().any(nonzero_constant) {
        return Ok(Outcome::Empty);
    }
    if e.iter().any(Poly::is_zero) {
        return Err(RootError::Degenerate("zero equation".into()));
    }
    let vars = e[0].vars().to_vec();
    let r1 = resultant(&e[0], &e[1], &vars[2])?;
    let r2 = resultant(&e[0], &e[2], &vars[2])?;
    if nonzero_constant(&r1) || nonzero_constant(&r2) {
        return Ok(Outcome::Empty);
    }
    let r = resultant(&r1, &r2, &vars[1])?;
    if r.is_constant() {
        return Ok(Outcome::Empty);
    }
    let mut out = Vec::new();
    for x in seeds(&r, opts) {
        let mut ys = Vec::new();
        for ri in [&r1, &r2] {
            ys.extend(seeds(&fix(ri, &vars[0], x)?, opts));
        }
        for y in ys {
            for eq in e {
                let g = fix(&fix(eq, &vars[0], x)?, &vars[1], y)?;
                for z in seeds(&g, opts) {
                    out.push(vec![x, y, z]);
                }
            }
        }
    }
    Ok(Outcome::Candidates(out))
}

fn finish(eqs: &[Poly], m: &[Vec<Complex64>], cands: Vec<Vec<Complex64>>, opts: &ElimOptions) -> Result<Vec<SystemSolution>, RootError> {
    let sys = NewtonSystem::new(eqs)?;
    let mut sols: Vec<SystemSolution> = Vec::new();
    for c in cands {
        let x0 = apply(m, &c);
        let Some(x) = sys.polish(&x0, 100) else { continue };
        let residual = sys.residual(&x);
        if residual >= opts.accept || inf_norm(&x) > opts.max_norm {
            continue;
        }
        let scale = inf_norm(&x).max(1.0);
        match sols.iter_mut().find(|s| s.point.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) <= 1e-7 * scale) {
            Some(s) => {
                if residual < s.residual {
                    s.point = x;
                    s.residual = residual;
                }
            }
            None => sols.push(SystemSolution { point: x, residual }),
        }
    }
    sols.sort_by(|a, b| {
        for (u, v) in a.point.iter().zip(&b.point) {
            let o = super::cmp_complex(u, v);
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(sols)
}

fn check_square(eqs: &[Poly], n: usize) -> Result<(), RootError> {
    if eqs.len() != n || eqs.iter().any(|e| e.nvars() != n || e.vars() != eqs[0].vars()) {
        return Err(RootError::Poly(format!("expected {n} equations in the same {n} variables")));
    }
    Ok(())
}

const ORDERS3: [[usize; 3]; 3] = [[0, 1, 2], [1, 0, 2], [2, 0, 1]];

/// Isolated solutions of three equations in three variables.
pub fn solve_system3(eqs: &[Poly], opts: &ElimOptions) -> Result<Vec<SystemSolution>, RootError> {
    check_square(eqs, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut last = RootError::Degenerate("no elimination order succeeded".into());
    for _attempt in 0..3 {
        let m = random_change(3, &mut rng);
        let t = change_coordinates(eqs, &m)?;
        for ord in ORDERS3 {
            let perm: Vec<Poly> = ord.iter().map(|&i| t[i].clone()).collect();
            match candidates3(&perm, &opts.roots) {
                Ok(Outcome::Empty) => return Ok(Vec::new()),
                Ok(Outcome::Candidates(c)) => return finish(eqs, &m, c, opts),
                Err(e @ RootError::Degenerate(_)) | Err(e @ RootError::NotInvolved(_)) => last = e,
                Err(e) => return Err(e),
            }
        }
    }
    Err(last)
}

/// Isolated solutions of two equations in two variables.
pub fn solve_system2(eqs: &[Poly], opts: &ElimOptions) -> Result<Vec<SystemSolution>, RootError> {
    check_square(eqs, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut last = RootError::Degenerate("no elimination order succeeded".into());
    for _attempt in 0..3 {
        let m = random_change(2, &mut rng);
        let t = change_coordinates(eqs, &m)?;
        match candidates2(&t, &opts.roots) {
            Ok(Outcome::Empty) => return Ok(Vec::new()),
            Ok(Outcome::Candidates(c)) => return finish(eqs, &m, c, opts),
            Err(e @ RootError::Degenerate(_)) | Err(e @ RootError::NotInvolved(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Critical values of `rho = a·u + b·v + c` on the plane curve `{g = 0}`:
/// `rho` at the solutions of `g = b·∂u g − a·∂v g = 0`.
pub fn plane_curve_critical_values(g: &Poly, rho: &LinearForm<Complex64>, opts: &ElimOptions) -> Result<RootSet, RootError> {
    if g.nvars() != 2 {
        return Err(RootError::Poly(format!("expected a curve in 2 variables, got {}", g.nvars())));
    }
    let vars = g.vars().to_vec();
    let (a, b) = (rho.coeff(&vars[0]), rho.coeff(&vars[1]));
    let h = &g.partial(&vars[0])?.scale_by(&b) - &g.partial(&vars[1])?.scale_by(&a);
    let mut warnings = Vec::new();
    // Level lines of rho all pass through [b : -a : 0]; if the curve does too,
    // part of the branching escapes to infinity.
    let top = g.top_form();
    let at_inf = top.eval(&[b, -a])?.norm() / (top.l1_norm() * a.norm().max(b.norm()).powi(top.total_degree().unwrap_or(0) as i32));
    if at_inf < 1e-9 {
        warnings.push("critical point at infinity: rho level lines are asymptotic to the curve".to_string());
    }
    let sols = solve_system2(&[g.clone(), h], opts)?;
    let mut values = Vec::with_capacity(sols.len());
    let mut residuals = Vec::with_capacity(sols.len());
    for s in &sols {
        values.push(rho.eval_at(&vars, &s.point));
        residuals.push(s.residual);
    }
    let mut set = RootSet::from_values(values, residuals, opts.roots.cluster);
    set.warnings = warnings;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn berkowitz_small_integer_matrices() {
        let z = BigInt::from(0);
        let o = BigInt::from(1);
        let m = |rows: Vec<Vec<i64>>| rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect::<Vec<Vec<_>>>();
        assert_eq!(berkowitz_det(&m(vec![vec![2, 1], vec![7, 4]]), &z, &o), BigInt::from(1));
        assert_eq!(berkowitz_det(&m(vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]), &z, &o), BigInt::from(1));
        assert_eq!(berkowitz_det(&m(vec![vec![0, 2], vec![3, 0]]), &z, &o), BigInt::from(-6));
        assert_eq!(berkowitz_det(&m(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), &z, &o), BigInt::from(-3));
    }

    #[test]
    fn linear_resultant_sign() {
        let p = Poly::parse("v - 2", &["v"]).unwrap();
        let q = Poly::parse("v - 3", &["v"]).unwrap();
        let r = resultant(&p, &q, "v").unwrap();
        assert_eq!(r.coefficient(&[]), c(-1.0));
    }

    #[test]
    fn resultant_is_evaluation() {
        let vars = ["x", "v"];
        let p = Poly::parse("v^2 - x", &vars).unwrap();
        let q = Poly::parse("v - 1", &vars).unwrap();
        let r = resultant(&p, &q, "v").unwrap();
        assert_eq!(r, Poly::parse("1 - x", &["x"]).unwrap());
        let pe = crate::ExactPoly::parse("v^2 - x", &vars).unwrap();
        let qe = crate::ExactPoly::parse("v - 1", &vars).unwrap();
        assert_eq!(resultant(&pe, &qe, "v").unwrap(), crate::ExactPoly::parse("1 - x", &["x"]).unwrap());
    }

    #[test]
    fn degenerate_resultant() {
        let vars = ["x", "v"];
        let p = Poly::parse("(v - x)*(v + 1)", &vars).unwrap();
        let q = Poly::parse("(v - x)*(v - 2)", &vars).unwrap();
        assert!(matches!(resultant(&p, &q, "v"), Err(RootError::Degenerate(_))));
        let pe = crate::ExactPoly::parse("(v - x)*(v + 1)", &vars).unwrap();
        let qe = crate::ExactPoly::parse("(v - x)*v", &vars).unwrap();
        assert!(matches!(resultant(&pe, &qe, "v"), Err(RootError::Degenerate(_))));
        let r = Poly::parse("x + 1", &vars).unwrap();
        assert!(matches!(resultant(&p, &r, "v"), Err(RootError::NotInvolved(_))));
    }

    #[test]
    fn exact_rational_resultant() {
        let vars = ["a", "v"];
        let p = MultiPoly::<BigRational>::parse("v^2 + a*v + 1/2", &vars).unwrap();
        let q = MultiPoly::<BigRational>::parse("2*v - a", &vars).unwrap();
        // Res = 4*p(a/2) = 4*(a^2/4 + a^2/2 + 1/2) = 3a^2 + 2
        let r = resultant(&p, &q, "v").unwrap();
        assert_eq!(r, MultiPoly::<BigRational>::parse("3*a^2 + 2", &["a"]).unwrap());
    }

    #[test]
    fn circle_and_line() {
        let vars = ["u", "v"];
        let eqs = [Poly::parse("u^2 + v^2 - 1", &vars).unwrap(), Poly::parse("u - v", &vars).unwrap()];
        let sols = solve_system2(&eqs, &ElimOptions::default()).unwrap();
        assert_eq!(sols.len(), 2);
        let h = 0.5f64.sqrt();
        assert!((sols[0].point[0] + h).norm() < 1e-12);
        assert!((sols[1].point[1] - h).norm() < 1e-12);
    }

    #[test]
    fn three_quadrics() {
        let vars = ["x", "y", "z"];
        let eqs = [Poly::parse("x^2 - 1", &vars).unwrap(), Poly::parse("y^2 - 4", &vars).unwrap(), Poly::parse("z^2 - x*y", &vars).unwrap()];
        let sols = solve_system3(&eqs, &ElimOptions::default()).unwrap();
        assert_eq!(sols.len(), 8);
        for s in &sols {
            assert!(s.residual < 1e-12);
        }
    }

    #[test]
    fn inconsistent_system_is_empty() {
        let vars = ["x", "y", "z"];
        let eqs = [Poly::parse("x + y + z", &vars).unwrap(), Poly::parse("x + y + z - 1", &vars).unwrap(), Poly::parse("x*y - z", &vars).unwrap()];
        assert!(solve_system3(&eqs, &ElimOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn circle_critical_values() {
        let g = Poly::parse("u^2 + v^2 - 1", &["u", "v"]).unwrap();
        let rho = LinearForm::parse("u", &["u", "v"]).unwrap();
        let s = plane_curve_critical_values(&g, &rho, &ElimOptions::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.roots[0] + 1.0).norm() < 1e-12);
        assert!((s.roots[1] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn parabola_has_branching_at_infinity() {
        let g = Poly::parse("v - u^2", &["u", "v"]).unwrap();
        let rho = LinearForm::parse("v", &["u", "v"]).unwrap();
        let s = plane_curve_critical_values(&g, &rho, &ElimOptions::default()).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.warnings.is_empty());
        let rho2 = LinearForm::parse("u", &["u", "v"]).unwrap();
        let s2 = plane_curve_critical_values(&g, &rho2, &ElimOptions::default()).unwrap();
        assert!(s2.is_empty());
        assert_eq!(s2.warnings.len(), 1);
    }
}
