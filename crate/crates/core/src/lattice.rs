//! Exact integer linear algebra: Smith normal form, cokernels, Gram
//! determinants and discriminant groups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("degenerate form (determinant 0)")]
    Degenerate,
    #[error("ragged or empty matrix")]
    Shape,
    #[error("index chain: {0}")]
    Chain(String),
}

/// Dense row-major matrix over an integer ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matrix<T> {
    rows: Vec<Vec<T>>,
}

pub type Ring = BigInt;

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, LatticeError> {
        if rows.is_empty() || rows[0].is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(LatticeError::Shape);
        }
        Ok(Matrix { rows })
    }

    pub fn zeros(r: usize, c: usize) -> Self {
        Matrix { rows: vec![vec![T::zero(); c]; r] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = T::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.nrows(), self.ncols());
        Matrix { rows: (0..c).map(|j| (0..r).map(|i| self.rows[i][j].clone()).collect()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols(), other.nrows(), "dimension mismatch");
        let mut out = Self::zeros(self.nrows(), other.ncols());
        for i in 0..self.nrows() {
            for k in 0..self.ncols() {
                for j in 0..other.ncols() {
                    let t = self.rows[i][k].clone() * other.rows[k][j].clone();
                    out.rows[i][j] = out.rows[i][j].clone() + t;
                }
            }
        }
        out
    }
}

impl Matrix<BigInt> {
    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }
}

pub type IntMatrix = Matrix<BigInt>;

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal, `dᵢ | dᵢ₊₁`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith<T> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: Integer + Signed + Clone> Smith<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.nrows().min(self.d.ncols())).map(|i| self.d.rows[i][i].clone()).collect()
    }
}

fn row_axpy<T: Integer + Clone>(m: &mut Matrix<T>, dst: usize, src: usize, q: &T) {
    for j in 0..m.ncols() {
        let t = m.rows[src][j].clone() * q.clone();
        m.rows[dst][j] = m.rows[dst][j].clone() - t;
    }
}

fn col_axpy<T: Integer + Clone>(m: &mut Matrix<T>, dst: usize, src: usize, q: &T) {
    for i in 0..m.nrows() {
        let t = m.rows[i][src].clone() * q.clone();
        m.rows[i][dst] = m.rows[i][dst].clone() - t;
    }
}

fn swap_cols<T>(m: &mut Matrix<T>, a: usize, b: usize) {
    for row in &mut m.rows {
        row.swap(a, b);
    }
}

/// Smith normal form. Pivot: smallest nonzero modulus in the remaining
/// block, ties broken in row-major order.
pub fn smith_normal_form<T: Integer + Signed + Clone>(m: &Matrix<T>) -> Smith<T> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut d = m.clone();
    let mut u = Matrix::identity(r);
    let mut v = Matrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let mut piv: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &d.rows[i][j];
                    if !x.is_zero() && piv.is_none_or(|(pi, pj)| x.abs() < d.rows[pi][pj].abs()) {
                        piv = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = piv else {
                return finish_signs(u, d, v);
            };
            d.rows.swap(t, pi);
            u.rows.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);
            let p = d.rows[t][t].clone();
            let mut clean = true;
            for i in t + 1..r {
                let q = d.rows[i][t].div_floor(&p);
                if !q.is_zero() {
                    row_axpy(&mut d, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                }
                clean &= d.rows[i][t].is_zero();
            }
            for j in t + 1..c {
                let q = d.rows[t][j].div_floor(&p);
                if !q.is_zero() {
                    col_axpy(&mut d, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                }
                clean &= d.rows[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d.rows[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let minus_one = T::zero() - T::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
    }
    finish_signs(u, d, v)
}

fn finish_signs<T: Integer + Signed + Clone>(mut u: Matrix<T>, mut d: Matrix<T>, v: Matrix<T>) -> Smith<T> {
    for t in 0..d.nrows().min(d.ncols()) {
        if d.rows[t][t].is_negative() {
            for x in &mut d.rows[t] {
                *x = -x.clone();
            }
            for x in &mut u.rows[t] {
                *x = -x.clone();
            }
        }
    }
    Smith { u, d, v }
}

/// Finitely generated abelian group `Z^r ⊕ Z/d₁ ⊕ … ⊕ Z/dₖ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinAbGroup {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Order, if finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().fold(BigInt::one(), |a, b| a * b))
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            n => parts.push(format!("Z^{n}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `Z^cols / (row span of M)`.
pub fn cokernel(m: &IntMatrix) -> FinAbGroup {
    let s = smith_normal_form(m);
    let diag = s.diagonal();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    FinAbGroup { free_rank: m.ncols() - rank, invariant_factors: diag.into_iter().filter(|x| !x.is_zero() && !x.is_one()).collect() }
}

/// Determinant by Bareiss fraction-free elimination.
pub fn gram_determinant(m: &IntMatrix) -> Result<BigInt, LatticeError> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(LatticeError::NotSquare { rows: n, cols: m.ncols() });
    }
    let mut a = m.rows.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

/// `L^∨ / L` for the Gram matrix `Q`.
pub fn discriminant_group(q: &IntMatrix) -> Result<FinAbGroup, LatticeError> {
    if q.nrows() != q.ncols() {
        return Err(LatticeError::NotSquare { rows: q.nrows(), cols: q.ncols() });
    }
    if *q != q.transpose() {
        return Err(LatticeError::NotSymmetric);
    }
    if gram_determinant(q)?.is_zero() {
        return Err(LatticeError::Degenerate);
    }
    Ok(cokernel(q))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexChain {
    /// `[Λ : L] = √(disc L / disc Λ)`.
    pub lattice_index: BigInt,
    /// `|A_L| = [L^∨ : j(L)] = disc L`.
    pub discriminant_order: BigInt,
    /// `[Φ(Λ) : j(L)] = [Λ : L]`.
    pub image_index: BigInt,
    /// `[A_L : H] = |A_L| / [Φ(Λ) : j(L)]`, the order of `coker Φ`.
    pub quotient_index: BigInt,
    pub consistent: bool,
}

/// The index chain `coker Φ ≅ A_L / H` for a sublattice `L` of `Λ`.
pub fn index_chain(disc_l: &BigInt, disc_lambda: &BigInt, coker_order: &BigInt) -> Result<IndexChain, LatticeError> {
    if !disc_l.is_positive() || !disc_lambda.is_positive() || !coker_order.is_positive() {
        return Err(LatticeError::Chain("inputs must be positive".into()));
    }
    if !disc_l.is_multiple_of(disc_lambda) {
        return Err(LatticeError::Chain(format!("disc Λ = {disc_lambda} does not divide disc L = {disc_l}")));
    }
    let ratio = disc_l / disc_lambda;
    let root = ratio.sqrt();
    if &root * &root != ratio {
        return Err(LatticeError::Chain(format!("disc L / disc Λ = {ratio} is not a perfect square")));
    }
    if !disc_l.is_multiple_of(&root) {
        return Err(LatticeError::Chain(format!("[Λ:L] = {root} does not divide |A_L| = {disc_l}")));
    }
    let quotient = disc_l / &root;
    let consistent = &quotient == coker_order;
    if !consistent {
        return Err(LatticeError::Chain(format!("chain gives |coker Φ| = {quotient}, expected {coker_order}")));
    }
    Ok(IndexChain { lattice_index: root.clone(), discriminant_order: disc_l.clone(), image_index: root, quotient_index: quotient, consistent })
}

/// Gram matrix of a plumbing of spheres: self-intersections on the
/// diagonal, one transverse intersection per listed edge.
pub fn plumbing_gram(self_intersections: &[i64], edges: &[(usize, usize)]) -> IntMatrix {
    let n = self_intersections.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, &e) in self_intersections.iter().enumerate() {
        m.rows[i][i] = BigInt::from(e);
    }
    for &(a, b) in edges {
        m.rows[a][b] += 1;
        m.rows[b][a] += 1;
    }
    m
}

/// Plumbing along a cycle `0 – 1 – … – (n−1) – 0`.
pub fn cycle_plumbing_gram(self_intersections: &[i64]) -> IntMatrix {
    let n = self_intersections.len();
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    plumbing_gram(self_intersections, &edges)
}

/// Gram matrix of the compactification divisor of the D8 surface:
/// a 7-cycle of rational curves, three consecutive of square −1.
pub fn d8_divisor_gram() -> IntMatrix {
    IntMatrix::from_i64(&[
        vec![-1, 1, 0, 0, 0, 0, 1],
        vec![1, -1, 1, 0, 0, 0, 0],
        vec![0, 1, -1, 1, 0, 0, 0],
        vec![0, 0, 1, -2, 1, 0, 0],
        vec![0, 0, 0, 1, -2, 1, 0],
        vec![0, 0, 0, 0, 1, -2, 1],
        vec![1, 0, 0, 0, 0, 1, -2],
    ])
    .expect("static matrix")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    fn check(mat: &IntMatrix) -> Smith<BigInt> {
        let s = smith_normal_form(mat);
        assert_eq!(s.u.mul(mat).mul(&s.v), s.d);
        assert!(gram_determinant(&s.u).unwrap().abs().is_one());
        assert!(gram_determinant(&s.v).unwrap().abs().is_one());
        s
    }

    #[test]
    fn identity_and_coprime_diagonal() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let s = check(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn rectangular() {
        let s = check(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16], vec![0, 0, 0]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn cokernels() {
        assert_eq!(cokernel(&m(&[vec![0]])), FinAbGroup { free_rank: 1, invariant_factors: vec![] });
        assert_eq!(cokernel(&m(&[vec![2]])).to_string(), "Z/2");
        assert!(cokernel(&IntMatrix::identity(4)).is_trivial());
    }

    #[test]
    fn determinants() {
        assert_eq!(gram_determinant(&m(&[vec![-1, 0], vec![0, -2]])).unwrap(), BigInt::from(2));
        assert_eq!(gram_determinant(&m(&[vec![0, 1], vec![1, 0]])).unwrap(), BigInt::from(-1));
        assert_eq!(gram_determinant(&m(&[vec![1, 2], vec![2, 4]])).unwrap(), BigInt::from(0));
        assert!(matches!(gram_determinant(&m(&[vec![1, 2]])), Err(LatticeError::NotSquare { .. })));
    }

    #[test]
    fn discriminant_groups() {
        assert_eq!(discriminant_group(&m(&[vec![4]])).unwrap().to_string(), "Z/4");
        assert!(discriminant_group(&m(&[vec![2, 1], vec![1, 1]])).unwrap().is_trivial());
        assert_eq!(discriminant_group(&m(&[vec![1, 2], vec![2, 4]])), Err(LatticeError::Degenerate));
        assert_eq!(discriminant_group(&m(&[vec![1, 2], vec![0, 4]])), Err(LatticeError::NotSymmetric));
    }

    #[test]
    fn d8_gram_is_the_cycle_plumbing() {
        assert_eq!(cycle_plumbing_gram(&[-1, -1, -1, -2, -2, -2, -2]), d8_divisor_gram());
    }

    #[test]
    fn chains() {
        let c = index_chain(&BigInt::from(4), &BigInt::from(1), &BigInt::from(2)).unwrap();
        assert_eq!((c.lattice_index, c.quotient_index), (BigInt::from(2), BigInt::from(2)));
        let c = index_chain(&BigInt::from(1), &BigInt::from(1), &BigInt::from(1)).unwrap();
        assert!(c.lattice_index.is_one() && c.quotient_index.is_one());
        let c = index_chain(&BigInt::from(9), &BigInt::from(1), &BigInt::from(3)).unwrap();
        assert_eq!((c.lattice_index, c.quotient_index), (BigInt::from(3), BigInt::from(3)));
        assert!(index_chain(&BigInt::from(8), &BigInt::from(1), &BigInt::from(2)).is_err());
        assert!(index_chain(&BigInt::from(4), &BigInt::from(1), &BigInt::from(4)).is_err());
    }

    #[test]
    fn machine_integers_work_too() {
        let a = Matrix::<i64>::from_rows(vec![vec![4, 6], vec![6, 4]]).unwrap();
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), vec![2, 10]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }
}
