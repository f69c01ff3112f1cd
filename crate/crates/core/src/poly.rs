//! Sparse multivariate polynomials, the expression grammar, and the
//! discrete geometry of Newton polygons.
//!
//! Variable order is fixed at construction and never inferred; exponent
//! vectors are indexed by that order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::roots;
use crate::scalar::Coeff;

pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { offset: usize, name: String },
    #[error("malformed numeric literal `{text}` at byte {offset}")]
    BadNumber { offset: usize, text: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("substitution for `{0}` mentions the substituted variable")]
    SelfReference(String),
    #[error("expected a polynomial in {expected} variables, got {got}")]
    VariableCount { expected: usize, got: usize },
    #[error("zero polynomial")]
    Zero,
    #[error("coefficient is not finite")]
    NonFinite,
    #[error("curve is singular at infinity (repeated direction in the top-degree form)")]
    SingularAtInfinity,
    #[error("root finding failed: {0}")]
    Roots(String),
}

/// Sparse polynomial with coefficients in `T` over an ordered list of
/// variable names.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<T> {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Coeff> MultiPoly<T> {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        MultiPoly { vars: vars.iter().map(|s| s.as_ref().to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: T) -> Self {
        let mut p = Self::zero(vars);
        let m = vec![0; p.vars.len()];
        p.terms.insert(m, c);
        p.normalize();
        p
    }

    pub fn variable<S: AsRef<str>>(vars: &[S], name: &str) -> Result<Self, PolyError> {
        let mut p = Self::zero(vars);
        let idx = p.var_index(name)?;
        let mut m = vec![0; p.vars.len()];
        m[idx] = 1;
        p.terms.insert(m, T::one());
        Ok(p)
    }

    /// Builds a polynomial from explicit terms; duplicate monomials are summed.
    pub fn from_terms<S: AsRef<str>>(vars: &[S], terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.len(), p.vars.len(), "exponent vector length");
            p.add_term(m, c);
        }
        p.normalize();
        p
    }

    fn add_term(&mut self, m: Monomial, c: T) {
        match self.terms.get_mut(&m) {
            Some(old) => {
                let sum = old.clone() + c;
                *old = sum;
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Drops terms whose coefficient is negligible relative to the largest one.
    fn normalize(&mut self) {
        let scale = self.terms.values().map(Coeff::magnitude).fold(0.0, f64::max);
        self.terms.retain(|_, c| !c.negligible(scale));
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, T> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn degree_in(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|m| m[idx]).max()
    }

    /// Largest coefficient modulus.
    pub fn scale(&self) -> f64 {
        self.terms.values().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(Coeff::magnitude).sum()
    }

    pub fn coefficient(&self, m: &[u32]) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "polynomials over different variable lists");
    }

    pub fn scale_by(&self, c: &T) -> Self {
        let mut p = Self::zero(&self.vars);
        for (m, v) in &self.terms {
            p.terms.insert(m.clone(), v.clone() * c.clone());
        }
        p.normalize();
        p
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(&self.vars, T::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Horner-style evaluation: per-variable powers, then a term sum.
    pub fn eval(&self, point: &[T]) -> Result<T, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::Dimension { expected: self.vars.len(), got: point.len() });
        }
        let mut powers: Vec<Vec<T>> = Vec::with_capacity(point.len());
        for (i, x) in point.iter().enumerate() {
            let d = self.degree_in(i).unwrap_or(0) as usize;
            let mut row = Vec::with_capacity(d + 1);
            row.push(T::one());
            for k in 0..d {
                let next = row[k].clone() * x.clone();
                row.push(next);
            }
            powers.push(row);
        }
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t * powers[i][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    pub fn partial(&self, var: &str) -> Result<Self, PolyError> {
        let idx = self.var_index(var)?;
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            if m[idx] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[idx] -= 1;
            p.add_term(m2, c.clone() * T::from_i64(m[idx] as i64));
        }
        p.normalize();
        Ok(p)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in variable
    /// `idx`; entry `k` is the coefficient of `v^k`, a polynomial in the
    /// remaining variables (variable `idx` removed).
    pub fn coefficients_in(&self, idx: usize) -> Vec<MultiPoly<T>> {
        let rest: Vec<String> = self.vars.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, v)| v.clone()).collect();
        let d = self.degree_in(idx).unwrap_or(0) as usize;
        let mut out = vec![MultiPoly::zero(&rest); d + 1];
        if self.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            let k = m[idx] as usize;
            let mut m2 = m.clone();
            m2.remove(idx);
            out[k].add_term(m2, c.clone());
        }
        for p in &mut out {
            p.normalize();
        }
        out
    }

    /// Re-expresses `self` over a different variable list that contains
    /// all variables actually used.
    pub fn reorder(&self, vars: &[String]) -> Result<Self, PolyError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v))
            .enumerate()
            .map(|(i, pos)| match pos {
                Some(p) => Ok(p),
                None if self.degree_in(i).unwrap_or(0) == 0 => Ok(usize::MAX),
                None => Err(PolyError::UnknownVariable(self.vars[i].clone())),
            })
            .collect::<Result<_, _>>()?;
        let mut p = Self::zero(vars);
        for (m, c) in &self.terms {
            let mut m2 = vec![0; vars.len()];
            for (i, &e) in m.iter().enumerate() {
                if map[i] != usize::MAX {
                    m2[map[i]] = e;
                }
            }
            p.add_term(m2, c.clone());
        }
        p.normalize();
        Ok(p)
    }

    /// Replaces `var` by an affine expression in the remaining variables,
    /// expands, and removes `var` from the variable list.
    pub fn substitute_linear(&self, var: &str, expr: &AffineExpr<T>) -> Result<Self, PolyError> {
        let idx = self.var_index(var)?;
        if expr.coeffs.contains_key(var) {
            return Err(PolyError::SelfReference(var.to_string()));
        }
        let rest: Vec<String> = self.vars.iter().filter(|v| *v != var).cloned().collect();
        for name in expr.coeffs.keys() {
            if !rest.contains(name) {
                return Err(PolyError::UnknownVariable(name.clone()));
            }
        }
        let replacement = expr.to_poly(&rest)?;
        let coeffs = self.coefficients_in(idx);
        // Horner in the replacement.
        let mut acc = MultiPoly::zero(&rest);
        for c in coeffs.iter().rev() {
            acc = &(&acc * &replacement) + c;
        }
        Ok(acc)
    }

    /// Simultaneous affine substitution of every variable; `exprs[i]`
    /// replaces variable `i` and is written over `new_vars`.
    pub fn compose_affine<S: AsRef<str>>(&self, new_vars: &[S], exprs: &[AffineExpr<T>]) -> Result<Self, PolyError> {
        if exprs.len() != self.vars.len() {
            return Err(PolyError::Dimension { expected: self.vars.len(), got: exprs.len() });
        }
        let new_vars: Vec<String> = new_vars.iter().map(|s| s.as_ref().to_string()).collect();
        let lin: Vec<MultiPoly<T>> = exprs.iter().map(|e| e.to_poly(&new_vars)).collect::<Result<_, _>>()?;
        let mut cache: Vec<Vec<MultiPoly<T>>> = lin.iter().map(|l| vec![MultiPoly::constant(&new_vars, T::one()), l.clone()]).collect();
        let mut acc = MultiPoly::zero(&new_vars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&new_vars, c.clone());
            for (i, &e) in m.iter().enumerate() {
                while cache[i].len() <= e as usize {
                    let next = &cache[i][cache[i].len() - 1] * &lin[i];
                    cache[i].push(next);
                }
                if e > 0 {
                    t = &t * &cache[i][e as usize];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Homogeneous component of top total degree.
    pub fn top_form(&self) -> Self {
        let d = self.total_degree().unwrap_or(0);
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.iter().sum::<u32>() == d {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    /// Adds a homogenizing variable `h` (appended last).
    pub fn homogenize(&self, h: &str) -> Self {
        let d = self.total_degree().unwrap_or(0);
        let mut vars = self.vars.clone();
        vars.push(h.to_string());
        let mut p = Self::zero(&vars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2.push(d - m.iter().sum::<u32>());
            p.terms.insert(m2, c.clone());
        }
        p
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> MultiPoly<U> {
        let mut p = MultiPoly::<U>::zero(&self.vars);
        for (m, c) in &self.terms {
            p.terms.insert(m.clone(), f(c));
        }
        p.normalize();
        p
    }

    pub fn to_complex64(&self) -> MultiPoly<Complex64> {
        self.map_coeffs(Coeff::to_complex64)
    }

    /// Univariate coefficient vector, lowest degree first.
    pub fn univariate_coeffs(&self) -> Result<Vec<T>, PolyError> {
        if self.vars.len() != 1 {
            return Err(PolyError::VariableCount { expected: 1, got: self.vars.len() });
        }
        let d = self.degree_in(0).unwrap_or(0) as usize;
        let mut out = vec![T::zero(); d + 1];
        for (m, c) in &self.terms {
            out[m[0] as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_univariate(var: &str, coeffs: &[T]) -> Self {
        Self::from_terms(&[var], coeffs.iter().enumerate().map(|(k, c)| (vec![k as u32], c.clone())))
    }

    /// Parses `text` with the declared variable order.
    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Self, PolyError> {
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        Parser::new(text, &vars).parse()
    }

    /// Newton polygon of a bivariate polynomial.
    pub fn newton_polygon(&self) -> Result<LatticePolygon, PolyError> {
        if self.vars.len() != 2 {
            return Err(PolyError::VariableCount { expected: 2, got: self.vars.len() });
        }
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        let pts: Vec<(i64, i64)> = self.terms.keys().map(|m| (m[0] as i64, m[1] as i64)).collect();
        Ok(LatticePolygon::hull(&pts))
    }

    /// Interior lattice points of the Newton polygon: the genus of a
    /// generic curve with this support.
    pub fn newton_genus(&self) -> Result<u64, PolyError> {
        Ok(self.newton_polygon()?.interior_points())
    }
}

impl MultiPoly<Complex64> {
    /// Number of distinct points of the projective closure on the line at
    /// infinity, i.e. the distinct roots of the top-degree binary form.
    pub fn punctures_at_infinity(&self) -> Result<usize, PolyError> {
        if self.vars.len() != 2 {
            return Err(PolyError::VariableCount { expected: 2, got: self.vars.len() });
        }
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        let top = self.top_form();
        let d = top.total_degree().unwrap_or(0) as usize;
        if d == 0 {
            return Ok(0);
        }
        // F(t, 1): coefficient of t^a is the coefficient of u^a v^(d-a).
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
        for (m, c) in top.terms() {
            coeffs[m[0] as usize] = *c;
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut finite_deg = d;
        while finite_deg > 0 && coeffs[finite_deg].norm() <= 1e-12 * scale {
            finite_deg -= 1;
        }
        let at_infinity = d - finite_deg;
        if at_infinity > 1 {
            return Err(PolyError::SingularAtInfinity);
        }
        let mut count = at_infinity;
        if finite_deg > 0 {
            let set = roots::roots_of_coeffs(&coeffs[..=finite_deg], &roots::RootOptions::default()).map_err(|e| PolyError::Roots(e.to_string()))?;
            if set.clusters().iter().any(|c| c.multiplicity > 1) {
                return Err(PolyError::SingularAtInfinity);
            }
            count += set.clusters().len();
        }
        Ok(count)
    }
}

impl<T: Coeff> fmt::Debug for MultiPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.vars.join(","), self)
    }
}

/// Prints in the input grammar; parsing the output reproduces the term map.
impl<T: Coeff> fmt::Display for MultiPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest total degree first reads more naturally.
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.iter().sum::<u32>().cmp(&a.iter().sum::<u32>()).then_with(|| b.cmp(a)));
        for (n, m) in keys.into_iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let c = &self.terms[m];
            let mut lit = String::new();
            c.write_literal(&mut lit)?;
            let mono: Vec<String> =
                m.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| if e == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], e) }).collect();
            if mono.is_empty() {
                f.write_str(&lit)?;
            } else if *c == T::one() {
                f.write_str(&mono.join("*"))?;
            } else {
                write!(f, "{}*{}", lit, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a, T: Coeff> Add<&'a MultiPoly<T>> for &'a MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn add(self, rhs: &MultiPoly<T>) -> MultiPoly<T> {
        self.check_vars(rhs);
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), c.clone());
        }
        p.normalize();
        p
    }
}

impl<'a, T: Coeff> Sub<&'a MultiPoly<T>> for &'a MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn sub(self, rhs: &MultiPoly<T>) -> MultiPoly<T> {
        self.check_vars(rhs);
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), -c.clone());
        }
        p.normalize();
        p
    }
}

impl<'a, T: Coeff> Mul<&'a MultiPoly<T>> for &'a MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn mul(self, rhs: &MultiPoly<T>) -> MultiPoly<T> {
        self.check_vars(rhs);
        let mut p = MultiPoly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                p.add_term(m, c1.clone() * c2.clone());
            }
        }
        p.normalize();
        p
    }
}

impl<T: Coeff> Neg for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn neg(self) -> MultiPoly<T> {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c = -c.clone();
        }
        p
    }
}

impl<T: Coeff> Add for MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<T: Coeff> Sub for MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<T: Coeff> Mul for MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

/// `Σ coeffs[v]·v + constant`, possibly constant.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineExpr<T> {
    pub coeffs: BTreeMap<String, T>,
    pub constant: T,
}

impl<T: Coeff> AffineExpr<T> {
    pub fn constant(c: T) -> Self {
        AffineExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn new(coeffs: impl IntoIterator<Item = (String, T)>, constant: T) -> Self {
        AffineExpr { coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(), constant }
    }

    pub fn to_poly(&self, vars: &[String]) -> Result<MultiPoly<T>, PolyError> {
        let mut p = MultiPoly::constant(vars, self.constant.clone());
        for (name, c) in &self.coeffs {
            let v = MultiPoly::variable(vars, name)?;
            p = &p + &v.scale_by(c);
        }
        Ok(p)
    }
}

/// Nonconstant affine function (`π`, `ρ`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm<T> {
    coeffs: BTreeMap<String, T>,
    constant: T,
}

impl<T: Coeff> LinearForm<T> {
    pub fn new(coeffs: impl IntoIterator<Item = (String, T)>, constant: T) -> Result<Self, PolyError> {
        let coeffs: BTreeMap<String, T> = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if coeffs.is_empty() {
            return Err(PolyError::Zero);
        }
        Ok(LinearForm { coeffs, constant })
    }

    /// Reads a degree-one polynomial.
    pub fn from_poly(p: &MultiPoly<T>) -> Result<Self, PolyError> {
        let mut coeffs = BTreeMap::new();
        let mut constant = T::zero();
        for (m, c) in p.terms() {
            let d: u32 = m.iter().sum();
            match d {
                0 => constant = c.clone(),
                1 => {
                    let i = m.iter().position(|&e| e == 1).expect("degree one");
                    coeffs.insert(p.vars()[i].clone(), c.clone());
                }
                _ => return Err(PolyError::Syntax { offset: 0, message: "linear form has a term of degree > 1".into() }),
            }
        }
        Self::new(coeffs, constant)
    }

    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Self, PolyError> {
        Self::from_poly(&MultiPoly::parse(text, vars)?)
    }

    pub fn coeff(&self, var: &str) -> T {
        self.coeffs.get(var).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<String, T> {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &T {
        &self.constant
    }

    pub fn with_constant(&self, c: T) -> Self {
        LinearForm { coeffs: self.coeffs.clone(), constant: c }
    }

    pub fn to_affine(&self) -> AffineExpr<T> {
        AffineExpr { coeffs: self.coeffs.clone(), constant: self.constant.clone() }
    }

    pub fn to_poly(&self, vars: &[String]) -> Result<MultiPoly<T>, PolyError> {
        self.to_affine().to_poly(vars)
    }

    /// The variable with the largest coefficient modulus (ties: first in `order`).
    pub fn dominant_variable(&self, order: &[String]) -> Option<String> {
        let mut best: Option<(&String, f64)> = None;
        for v in order {
            let m = self.coeff(v).magnitude();
            if m > 0.0 && best.is_none_or(|(_, b)| m > b) {
                best = Some((v, m));
            }
        }
        best.map(|(v, _)| v.clone())
    }
}

impl LinearForm<Complex64> {
    pub fn eval_at(&self, vars: &[String], point: &[Complex64]) -> Complex64 {
        let mut acc = self.constant;
        for (v, x) in vars.iter().zip(point) {
            acc += self.coeff(v) * x;
        }
        acc
    }
}

impl<T: Coeff> fmt::Display for LinearForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.coeffs.keys().cloned().collect();
        match self.to_poly(&vars) {
            Ok(p) => write!(f, "{p}"),
            Err(_) => f.write_str("?"),
        }
    }
}

/// Convex lattice polygon, vertices counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolygon {
    vertices: Vec<(i64, i64)>,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::Integer::gcd(&a, &b)
}

impl LatticePolygon {
    /// Convex hull (Andrew's monotone chain); collinear points are dropped.
    pub fn hull(points: &[(i64, i64)]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        if pts.len() <= 2 {
            return LatticePolygon { vertices: pts };
        }
        let mut lower: Vec<(i64, i64)> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<(i64, i64)> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        LatticePolygon { vertices: lower }
    }

    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    /// Twice the area.
    pub fn double_area(&self) -> i64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0;
        }
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.0 * b.1 - a.1 * b.0
            })
            .sum()
    }

    pub fn boundary_points(&self) -> u64 {
        let n = self.vertices.len();
        match n {
            0 => 0,
            1 => 1,
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                gcd((b.0 - a.0).abs(), (b.1 - a.1).abs()) as u64 + 1
            }
            _ => (0..n)
                .map(|i| {
                    let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                    gcd((b.0 - a.0).abs(), (b.1 - a.1).abs()) as u64
                })
                .sum(),
        }
    }

    /// Pick's theorem: `2A = 2I + B - 2`.
    pub fn interior_points(&self) -> u64 {
        if self.vertices.len() < 3 {
            return 0;
        }
        let two_a = self.double_area();
        let b = self.boundary_points() as i64;
        ((two_a - b + 2) / 2) as u64
    }
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ratio(String, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a [String],
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let num = &text[start..i];
                // lookahead for `int / int`
                let mut j = i;
                while j < bytes.len() && bytes[j] == b' ' {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'/' {
                    j += 1;
                    while j < bytes.len() && bytes[j] == b' ' {
                        j += 1;
                    }
                    let dstart = j;
                    while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                        j += 1;
                    }
                    let den = &text[dstart..j];
                    if den.is_empty() || num.contains('.') || den.contains('.') {
                        return Err(PolyError::BadNumber { offset: start, text: text[start..j].to_string() });
                    }
                    out.push((start, Tok::Ratio(num.to_string(), den.to_string())));
                    i = j;
                } else {
                    out.push((start, Tok::Num(num.to_string())));
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            b'/' => return Err(PolyError::Syntax { offset: i, message: "division is only allowed inside a numeric literal `p/q`".into() }),
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(PolyError::Syntax { offset: i, message: format!("unexpected character `{ch}`") });
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

impl<'a> Parser<'a> {
    fn new(text: &str, vars: &'a [String]) -> ParserInit<'a> {
        ParserInit { toks: lex(text), vars }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: &str) -> Result<T, PolyError> {
        Err(PolyError::Syntax { offset: self.offset(), message: message.to_string() })
    }

    fn expr<T: Coeff>(&mut self) -> Result<MultiPoly<T>, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<T: Coeff>(&mut self) -> Result<MultiPoly<T>, PolyError> {
        let negate = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(if negate { -&acc } else { acc })
    }

    fn factor<T: Coeff>(&mut self) -> Result<MultiPoly<T>, PolyError> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let off = self.offset();
            match self.bump() {
                Tok::Num(n) if !n.contains('.') => {
                    let e: u32 = n.parse().map_err(|_| PolyError::BadNumber { offset: off, text: n.clone() })?;
                    return Ok(base.pow(e));
                }
                _ => return Err(PolyError::Syntax { offset: off, message: "exponent must be an unsigned integer".into() }),
            }
        }
        Ok(base)
    }

    fn base<T: Coeff>(&mut self) -> Result<MultiPoly<T>, PolyError> {
        let off = self.offset();
        match self.bump() {
            Tok::Num(n) => {
                let v = T::from_decimal(&n).ok_or(PolyError::BadNumber { offset: off, text: n })?;
                Ok(MultiPoly::constant(self.vars, v))
            }
            Tok::Ratio(n, d) => {
                let v = T::from_ratio(&n, &d).ok_or_else(|| PolyError::BadNumber { offset: off, text: format!("{n}/{d}") })?;
                Ok(MultiPoly::constant(self.vars, v))
            }
            Tok::Ident(name) => {
                if self.vars.contains(&name) {
                    MultiPoly::variable(self.vars, &name)
                } else if name == "i" {
                    let unit = T::imaginary_unit().ok_or_else(|| PolyError::UnknownSymbol { offset: off, name: name.clone() })?;
                    Ok(MultiPoly::constant(self.vars, unit))
                } else {
                    Err(PolyError::UnknownSymbol { offset: off, name })
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(PolyError::Syntax { offset: off, message: "unexpected end of input".into() }),
            t => Err(PolyError::Syntax { offset: off, message: format!("unexpected token {t:?}") }),
        }
    }
}

struct ParserInit<'a> {
    toks: Result<Vec<(usize, Tok)>, PolyError>,
    vars: &'a [String],
}

impl<'a> ParserInit<'a> {
    fn parse<T: Coeff>(self) -> Result<MultiPoly<T>, PolyError> {
        let toks = self.toks?;
        let mut p = Parser { toks, pos: 0, vars: self.vars };
        let out: MultiPoly<T> = p.expr()?;
        if *p.peek() != Tok::End {
            return p.err("unexpected trailing input (implicit multiplication is not accepted)");
        }
        if !out.terms.values().all(Coeff::is_finite) {
            return Err(PolyError::NonFinite);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Poly;
    use num_complex::Complex64 as C;

    const XYZ: [&str; 3] = ["x", "y", "z"];

    #[test]
    fn parses_first_painleve_cubic() {
        let p = Poly::parse("x*y*z + x + y + 1", &XYZ).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.coefficient(&[1, 1, 1]), C::new(1.0, 0.0));
        assert_eq!(p.eval(&[C::new(0.0, 0.0); 3]).unwrap(), C::new(1.0, 0.0));
    }

    #[test]
    fn zero_and_fraction_literals() {
        let z = Poly::parse("0", &["x"]).unwrap();
        assert!(z.is_zero());
        let l = Poly::parse("3*x + 3/4*z", &XYZ).unwrap();
        assert_eq!(l.coefficient(&[1, 0, 0]), C::new(3.0, 0.0));
        assert_eq!(l.coefficient(&[0, 0, 1]), C::new(0.75, 0.0));
        assert_eq!(l.len(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Poly::parse("xy", &XYZ), Err(PolyError::UnknownSymbol { offset: 0, .. })));
        assert!(matches!(Poly::parse("2x", &XYZ), Err(PolyError::Syntax { offset: 1, .. })));
        assert!(matches!(Poly::parse("x + q", &XYZ), Err(PolyError::UnknownSymbol { offset: 4, .. })));
        assert!(matches!(Poly::parse("1.5/2", &XYZ), Err(PolyError::BadNumber { offset: 0, .. })));
        assert!(matches!(Poly::parse("1.2.3*x", &XYZ), Err(PolyError::BadNumber { .. })));
        assert!(matches!(Poly::parse("(x + y", &XYZ), Err(PolyError::Syntax { offset: 6, .. })));
        assert!(matches!(Poly::parse("x^y", &XYZ), Err(PolyError::Syntax { .. })));
        assert!(matches!(Poly::parse("x/2", &XYZ), Err(PolyError::Syntax { offset: 1, .. })));
    }

    #[test]
    fn imaginary_unit_and_unary_minus() {
        let p = Poly::parse("-0.7*x + 0.3*i*y + z", &XYZ).unwrap();
        assert_eq!(p.coefficient(&[1, 0, 0]), C::new(-0.7, 0.0));
        assert_eq!(p.coefficient(&[0, 1, 0]), C::new(0.0, 0.3));
        let q = Poly::parse("-x^2", &["x"]).unwrap();
        assert_eq!(q.coefficient(&[2]), C::new(-1.0, 0.0));
    }

    #[test]
    fn evaluation_examples() {
        let p = Poly::parse("x*y*z + x^2 + y^2 + z^2 - 3", &XYZ).unwrap();
        let s3 = 3f64.sqrt();
        let v = p.eval(&[C::new(s3, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]).unwrap();
        assert!(v.norm() < 1e-15);
        let q = Poly::parse("x^2 + y^2 + z^2 - 3", &XYZ).unwrap();
        assert_eq!(q.eval(&[C::new(1.0, 0.0); 3]).unwrap(), C::new(0.0, 0.0));
        assert!(matches!(q.eval(&[C::new(1.0, 0.0)]), Err(PolyError::Dimension { expected: 3, got: 1 })));
    }

    #[test]
    fn partial_derivatives() {
        let p = Poly::parse("x^2*y", &["x", "y"]).unwrap();
        assert_eq!(p.partial("x").unwrap(), Poly::parse("2*x*y", &["x", "y"]).unwrap());
        let f = Poly::parse("x*y*z + x + y + 1", &XYZ).unwrap();
        assert_eq!(f.partial("z").unwrap(), Poly::parse("x*y", &XYZ).unwrap());
        assert!(matches!(f.partial("w"), Err(PolyError::UnknownVariable(_))));
    }

    #[test]
    fn substitution_of_a_plane() {
        let p = Poly::parse("x + y + z", &XYZ).unwrap();
        let w = C::new(2.5, -1.0);
        let expr = AffineExpr::new([("x".to_string(), C::new(-1.0, 0.0)), ("y".to_string(), C::new(-1.0, 0.0))], w);
        let g = p.substitute_linear("z", &expr).unwrap();
        assert_eq!(g.vars(), &["x".to_string(), "y".to_string()]);
        assert_eq!(g, Poly::constant(&["x", "y"], w));
        let bad = AffineExpr::new([("z".to_string(), C::new(1.0, 0.0))], w);
        assert!(matches!(p.substitute_linear("z", &bad), Err(PolyError::SelfReference(_))));
        assert!(matches!(p.substitute_linear("t", &expr), Err(PolyError::UnknownVariable(_))));
    }

    #[test]
    fn newton_genus_examples() {
        let full = Poly::parse("x^3 + y^3 + x^2*y + x*y^2 + x^2 + y^2 + x*y + x + y + 1", &["x", "y"]).unwrap();
        assert_eq!(full.newton_genus().unwrap(), 1);
        let conic = Poly::parse("x^2 + 2*x*y + 3*y^2 + x - y + 5", &["x", "y"]).unwrap();
        assert_eq!(conic.newton_genus().unwrap(), 0);
        let line = Poly::parse("x + y", &["x", "y"]).unwrap();
        assert_eq!(line.newton_genus().unwrap(), 0);
        assert!(matches!(Poly::parse("x", &XYZ).unwrap().newton_genus(), Err(PolyError::VariableCount { .. })));
    }

    #[test]
    fn punctures_examples() {
        let circle = Poly::parse("u^2 + v^2 - 1", &["u", "v"]).unwrap();
        assert_eq!(circle.punctures_at_infinity().unwrap(), 2);
        let cubic = Poly::parse("u^3 + 2*v^3 - u*v + 1", &["u", "v"]).unwrap();
        assert_eq!(cubic.punctures_at_infinity().unwrap(), 3);
        // y*x^2 + x*y^2 = xy(x+y): roots 0, infinity and -1.
        let nodal_top = Poly::parse("x^2*y + x*y^2 + x + 1", &["x", "y"]).unwrap();
        assert_eq!(nodal_top.punctures_at_infinity().unwrap(), 3);
        let parabola = Poly::parse("v - u^2", &["u", "v"]).unwrap();
        assert!(matches!(parabola.punctures_at_infinity(), Err(PolyError::SingularAtInfinity)));
    }

    #[test]
    fn hull_is_counterclockwise() {
        let h = LatticePolygon::hull(&[(0, 0), (3, 0), (0, 3), (1, 1), (2, 1)]);
        assert_eq!(h.vertices(), &[(0, 0), (3, 0), (0, 3)]);
        assert!(h.double_area() > 0);
        assert_eq!(h.interior_points(), 1);
    }

    #[test]
    fn exact_coefficients() {
        let p = crate::ExactPoly::parse("3/4*x - 0.25*x + i", &["x"]).unwrap();
        let half = num_rational::BigRational::new(1.into(), 2.into());
        assert_eq!(p.coefficient(&[1]).re, half);
        assert_eq!(p.to_string(), "1/2*x + (0 + 1*i)");
    }
}
