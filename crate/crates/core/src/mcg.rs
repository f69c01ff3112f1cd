//! Vanishing-cycle tuples in `H₁` of a tree plumbing: Picard–Lefschetz
//! transvections, twist words, Hurwitz moves and the first homology of
//! the total space.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{cokernel, FinAbGroup, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McgError {
    #[error("unknown cycle label `{0}`")]
    UnknownLabel(String),
    #[error("Hurwitz index {index} out of range for a tuple of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("integer overflow in homology arithmetic")]
    Overflow,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("cannot parse twist word `{0}`")]
    Parse(String),
    #[error("empty tuple")]
    Empty,
}

/// Tree whose vertices are the basis cycles; an edge is a single
/// transverse intersection with the given sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlumbingTree {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize, i64)>,
}

impl PlumbingTree {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize, i64)>) -> Result<Self, McgError> {
        let n = vertices.len();
        if n == 0 {
            return Err(McgError::NotATree("no vertices".into()));
        }
        if edges.len() + 1 != n {
            return Err(McgError::NotATree(format!("{} vertices but {} edges", n, edges.len())));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for &(a, b, s) in &edges {
            if a >= n || b >= n || a == b {
                return Err(McgError::NotATree(format!("bad edge ({a}, {b})")));
            }
            if s != 1 && s != -1 {
                return Err(McgError::NotATree(format!("edge sign {s} is not ±1")));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(McgError::NotATree("cycle".into()));
            }
            parent[ra] = rb;
        }
        Ok(PlumbingTree { vertices, edges })
    }

    /// Star with `center` joined to every other vertex (sign +1).
    pub fn star(labels: &[&str], center: usize) -> Result<Self, McgError> {
        let edges = (0..labels.len()).filter(|&i| i != center).map(|i| (center, i, 1)).collect();
        Self::new(labels.iter().map(|s| s.to_string()).collect(), edges)
    }

    pub fn index_of(&self, label: &str) -> Result<usize, McgError> {
        self.vertices.iter().position(|v| v == label).ok_or_else(|| McgError::UnknownLabel(label.to_string()))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(a, b, _)| *a == v || *b == v).count()
    }

    pub fn form(&self) -> IntersectionForm {
        let n = self.vertices.len();
        let mut m = vec![vec![0i64; n]; n];
        for &(a, b, s) in &self.edges {
            m[a][b] = s;
            m[b][a] = -s;
        }
        IntersectionForm { matrix: m }
    }

    /// All `2^{|E|}` edge-sign assignments on the same tree.
    pub fn sign_patterns(&self) -> Vec<PlumbingTree> {
        let e = self.edges.len();
        (0..1u32 << e)
            .map(|mask| PlumbingTree {
                vertices: self.vertices.clone(),
                edges: self.edges.iter().enumerate().map(|(k, &(a, b, _))| (a, b, if mask >> k & 1 == 1 { -1 } else { 1 })).collect(),
            })
            .collect()
    }

    /// Reorients vertex `v`: flips the sign of each incident edge.
    pub fn flip_vertex(&self, v: usize) -> PlumbingTree {
        PlumbingTree { vertices: self.vertices.clone(), edges: self.edges.iter().map(|&(a, b, s)| if a == v || b == v { (a, b, -s) } else { (a, b, s) }).collect() }
    }
}

/// Antisymmetric intersection pairing on `H₁(F) ≅ Z^{|T|}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    pub matrix: Vec<Vec<i64>>,
}

impl IntersectionForm {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn pair(&self, a: &HomologyClass, b: &HomologyClass) -> Result<i64, McgError> {
        let n = self.dim();
        if a.coords.len() != n || b.coords.len() != n {
            return Err(McgError::Dimension(a.coords.len().max(b.coords.len()), n));
        }
        let mut acc: i64 = 0;
        for i in 0..n {
            if a.coords[i] == 0 {
                continue;
            }
            for j in 0..n {
                let q = self.matrix[i][j];
                if q == 0 || b.coords[j] == 0 {
                    continue;
                }
                let t = a.coords[i].checked_mul(q).and_then(|x| x.checked_mul(b.coords[j])).ok_or(McgError::Overflow)?;
                acc = acc.checked_add(t).ok_or(McgError::Overflow)?;
            }
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomologyClass {
    pub coords: Vec<i64>,
}

impl HomologyClass {
    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = vec![0; n];
        coords[i] = 1;
        HomologyClass { coords }
    }

    pub fn negated(&self) -> Result<Self, McgError> {
        Ok(HomologyClass { coords: self.coords.iter().map(|x| x.checked_neg().ok_or(McgError::Overflow)).collect::<Result<_, _>>()? })
    }

    /// Equality up to orientation.
    pub fn eq_up_to_sign(&self, other: &Self) -> bool {
        self == other || self.coords.iter().zip(&other.coords).all(|(a, b)| *a == -*b)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }

    /// Canonical representative of `±self` (first nonzero entry positive).
    pub fn unsigned(&self) -> Self {
        match self.coords.iter().find(|&&x| x != 0) {
            Some(&x) if x < 0 => HomologyClass { coords: self.coords.iter().map(|x| -x).collect() },
            _ => self.clone(),
        }
    }

    pub fn display_with(&self, labels: &[String]) -> String {
        let mut s = String::new();
        for (c, l) in self.coords.iter().zip(labels) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 {
                "-"
            } else if s.is_empty() {
                ""
            } else {
                "+"
            };
            let mag = c.unsigned_abs();
            if mag == 1 {
                s.push_str(&format!("{sign}{l}"));
            } else {
                s.push_str(&format!("{sign}{mag}{l}"));
            }
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }
}

/// `L + e·⟨L,S⟩·S`.
pub fn pl_twist(l: &HomologyClass, s: &HomologyClass, e: i64, q: &IntersectionForm) -> Result<HomologyClass, McgError> {
    let k = q.pair(l, s)?.checked_mul(e).ok_or(McgError::Overflow)?;
    let coords = l.coords.iter().zip(&s.coords).map(|(a, b)| b.checked_mul(k).and_then(|t| a.checked_add(t)).ok_or(McgError::Overflow)).collect::<Result<_, _>>()?;
    Ok(HomologyClass { coords })
}

/// `τ_{ν₁}^{e₁} ∘ ⋯ ∘ τ_{ν_l}^{e_l} (target)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistWord {
    pub letters: Vec<(String, i64)>,
    pub target: String,
}

impl TwistWord {
    pub fn basis(target: &str) -> Self {
        TwistWord { letters: Vec::new(), target: target.to_string() }
    }

    /// Parses `tau_gamma^-1 tau_beta alpha`.
    pub fn parse(text: &str) -> Result<Self, McgError> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let Some((target, letters)) = toks.split_last() else {
            return Err(McgError::Parse(text.to_string()));
        };
        if target.starts_with("tau_") || target.is_empty() {
            return Err(McgError::Parse(text.to_string()));
        }
        let mut out = Vec::new();
        for t in letters {
            let body = t.strip_prefix("tau_").ok_or_else(|| McgError::Parse(text.to_string()))?;
            let (label, e) = match body.split_once('^') {
                Some((l, e)) => (l, e.parse::<i64>().map_err(|_| McgError::Parse(text.to_string()))?),
                None => (body, 1),
            };
            if e == 0 || label.is_empty() {
                return Err(McgError::Parse(text.to_string()));
            }
            out.push((label.to_string(), e));
        }
        Ok(TwistWord { letters: out, target: target.to_string() })
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, e) in &self.letters {
            if *e == 1 {
                write!(f, "tau_{l} ")?;
            } else {
                write!(f, "tau_{l}^{e} ")?;
            }
        }
        f.write_str(&self.target)
    }
}

pub fn class_of_word(word: &TwistWord, tree: &PlumbingTree) -> Result<HomologyClass, McgError> {
    let q = tree.form();
    let n = tree.vertices.len();
    let mut c = HomologyClass::basis(n, tree.index_of(&word.target)?);
    for (label, e) in word.letters.iter().rev() {
        let s = HomologyClass::basis(n, tree.index_of(label)?);
        c = pl_twist(&c, &s, *e, &q)?;
    }
    Ok(c)
}

pub type CycleTuple = Vec<HomologyClass>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Fwd,
    Inv,
}

/// `ℋᵢ` on the pair at positions `(i−1, i)`, `1 ≤ i ≤ k−1` (positions
/// counted from 0, matching the labels `C₀ … C_{k−1}`).
pub fn hurwitz_move(t: &[HomologyClass], i: usize, dir: Direction, q: &IntersectionForm) -> Result<CycleTuple, McgError> {
    if i == 0 || i >= t.len() {
        return Err(McgError::IndexOutOfRange { index: i, len: t.len() });
    }
    let mut out = t.to_vec();
    let (a, b) = (&t[i - 1], &t[i]);
    match dir {
        Direction::Fwd => {
            out[i - 1] = b.clone();
            out[i] = pl_twist(a, b, 1, q)?;
        }
        Direction::Inv => {
            out[i - 1] = pl_twist(b, a, -1, q)?;
            out[i] = a.clone();
        }
    }
    Ok(out)
}

/// `(C₀, …, C_{k−1}) ↦ (C_{k−1}, C₀, …, C_{k−2})`.
pub fn cyclic_permute<T: Clone>(t: &[T]) -> Vec<T> {
    if t.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(t.len());
    out.push(t[t.len() - 1].clone());
    out.extend_from_slice(&t[..t.len() - 1]);
    out
}

/// Matrix of `v ↦ v + ⟨v,S⟩S` acting on column vectors.
pub fn transvection_matrix(s: &HomologyClass, q: &IntersectionForm) -> Result<Vec<Vec<i64>>, McgError> {
    let n = q.dim();
    let mut m = vec![vec![0i64; n]; n];
    for j in 0..n {
        let col = pl_twist(&HomologyClass::basis(n, j), s, 1, q)?;
        for i in 0..n {
            m[i][j] = col.coords[i];
        }
    }
    Ok(m)
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, McgError> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                let t = a[i][k].checked_mul(b[k][j]).ok_or(McgError::Overflow)?;
                out[i][j] = out[i][j].checked_add(t).ok_or(McgError::Overflow)?;
            }
        }
    }
    Ok(out)
}

/// Homological monodromy `T_{C_{k−1}} ⋯ T_{C₀}`: the cycle `C₀` acts first,
/// the order preserved by Hurwitz moves.
pub fn total_monodromy(t: &[HomologyClass], q: &IntersectionForm) -> Result<Vec<Vec<i64>>, McgError> {
    if t.is_empty() {
        return Err(McgError::Empty);
    }
    let n = q.dim();
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for c in t {
        m = mat_mul(&transvection_matrix(c, q)?, &m)?;
    }
    Ok(m)
}

/// `H₁(F) / ⟨[C_i]⟩`.
pub fn h1_total_space(t: &[HomologyClass]) -> Result<FinAbGroup, McgError> {
    if t.is_empty() {
        return Err(McgError::Empty);
    }
    let rows: Vec<Vec<BigInt>> = t.iter().map(|c| c.coords.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let m = IntMatrix::from_rows(rows).map_err(|_| McgError::Dimension(0, 0))?;
    Ok(cokernel(&m))
}

/// Shortest twist words (length ≤ `max_len`, exponents in `±1, ±2`) whose
/// class is `±target`. Breadth-first over classes, so the first word found
/// per class is shortest; other words of the same class are not listed.
pub fn search_words(target: &HomologyClass, tree: &PlumbingTree, max_len: usize) -> Result<Option<TwistWord>, McgError> {
    let q = tree.form();
    let n = tree.vertices.len();
    let goal = target.unsigned();
    let mut seen: HashMap<HomologyClass, TwistWord> = HashMap::new();
    let mut queue: VecDeque<(HomologyClass, TwistWord, usize)> = VecDeque::new();
    for (i, v) in tree.vertices.iter().enumerate() {
        let c = HomologyClass::basis(n, i);
        if c.unsigned() == goal {
            return Ok(Some(TwistWord::basis(v)));
        }
        seen.insert(c.unsigned(), TwistWord::basis(v));
        queue.push_back((c, TwistWord::basis(v), 0));
    }
    while let Some((c, w, len)) = queue.pop_front() {
        if len == max_len {
            continue;
        }
        for (g, label) in tree.vertices.iter().enumerate() {
            for e in [-2i64, -1, 1, 2] {
                let s = HomologyClass::basis(n, g);
                let next = pl_twist(&c, &s, e, &q)?;
                let key = next.unsigned();
                if seen.contains_key(&key) {
                    continue;
                }
                let mut word = w.clone();
                word.letters.insert(0, (label.clone(), e));
                if key == goal {
                    return Ok(Some(word));
                }
                seen.insert(key, word.clone());
                queue.push_back((next, word, len + 1));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4() -> PlumbingTree {
        PlumbingTree::star(&["alpha", "beta", "gamma", "delta"], 0).unwrap()
    }

    fn w(s: &str) -> TwistWord {
        TwistWord::parse(s).unwrap()
    }

    #[test]
    fn tree_validation() {
        let v = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        assert!(PlumbingTree::new(v(3), vec![(0, 1, 1), (1, 2, -1)]).is_ok());
        assert!(PlumbingTree::new(v(3), vec![(0, 1, 1), (1, 0, 1)]).is_err());
        assert!(PlumbingTree::new(v(3), vec![(0, 1, 2), (1, 2, 1)]).is_err());
        assert!(PlumbingTree::new(v(4), vec![(0, 1, 1), (1, 2, 1)]).is_err());
    }

    #[test]
    fn twist_basics() {
        let t = d4();
        let q = t.form();
        let a = HomologyClass::basis(4, 0);
        let b = HomologyClass::basis(4, 1);
        let g = HomologyClass::basis(4, 2);
        assert_eq!(pl_twist(&a, &a, 1, &q).unwrap(), a);
        assert_eq!(pl_twist(&b, &g, 1, &q).unwrap(), b);
        let once = pl_twist(&b, &a, 1, &q).unwrap();
        assert_eq!(pl_twist(&once, &a, -1, &q).unwrap(), b);
    }

    #[test]
    fn word_classes() {
        let t = d4();
        assert_eq!(class_of_word(&w("alpha"), &t).unwrap(), HomologyClass::basis(4, 0));
        // <alpha, beta> = 1: tau_beta alpha = alpha + beta
        assert_eq!(class_of_word(&w("tau_beta alpha"), &t).unwrap().coords, vec![1, 1, 0, 0]);
        let c0 = class_of_word(&w("tau_alpha^-1 tau_gamma^2 tau_delta^-1 alpha"), &t).unwrap();
        // tau_delta^-1 alpha = alpha - delta; tau_gamma^2: + 2 gamma; <., alpha> = -1 so tau_alpha^-1 adds alpha
        assert_eq!(c0.coords, vec![2, 0, 2, -1]);
        assert!(matches!(class_of_word(&w("tau_omega alpha"), &t), Err(McgError::UnknownLabel(_))));
    }

    #[test]
    fn word_round_trip() {
        for s in ["alpha", "tau_gamma^-1 tau_beta alpha", "tau_gamma^2 tau_delta^-1 alpha"] {
            assert_eq!(w(s).to_string(), s);
        }
        assert!(TwistWord::parse("tau_delta").is_err());
        assert!(TwistWord::parse("tau_delta^0 alpha").is_err());
        assert!(TwistWord::parse("").is_err());
    }

    #[test]
    fn hurwitz_and_inverse() {
        let t = d4();
        let q = t.form();
        let tuple: CycleTuple = ["alpha", "tau_beta alpha", "gamma", "tau_delta alpha"].iter().map(|s| class_of_word(&w(s), &t).unwrap()).collect();
        for i in 1..tuple.len() {
            let f = hurwitz_move(&tuple, i, Direction::Fwd, &q).unwrap();
            let back = hurwitz_move(&f, i, Direction::Inv, &q).unwrap();
            assert_eq!(back, tuple);
            assert_eq!(total_monodromy(&f, &q).unwrap(), total_monodromy(&tuple, &q).unwrap());
        }
        assert!(hurwitz_move(&tuple, 0, Direction::Fwd, &q).is_err());
        assert!(hurwitz_move(&tuple, 4, Direction::Fwd, &q).is_err());
    }

    #[test]
    fn cyclic() {
        let t = vec![1, 2, 3];
        assert_eq!(cyclic_permute(&t), vec![3, 1, 2]);
        assert_eq!(cyclic_permute(&cyclic_permute(&cyclic_permute(&t))), t);
        assert_eq!(cyclic_permute(&[7]), vec![7]);
    }

    #[test]
    fn homology_of_spanning_tuple() {
        let t: CycleTuple = (0..4).map(|i| HomologyClass::basis(4, i)).collect();
        assert!(h1_total_space(&t).unwrap().is_trivial());
        let half = vec![HomologyClass { coords: vec![2, 0] }, HomologyClass { coords: vec![0, 1] }];
        assert_eq!(h1_total_space(&half).unwrap().to_string(), "Z/2");
    }

    #[test]
    fn overflow_detected() {
        let t = d4();
        let q = t.form();
        let big = HomologyClass { coords: vec![i64::MAX, 1, 0, 0] };
        assert_eq!(pl_twist(&big, &HomologyClass::basis(4, 1), 1, &q), Err(McgError::Overflow));
    }

    #[test]
    fn word_search_finds_short_words() {
        let t = d4();
        let target = class_of_word(&w("tau_gamma^-1 tau_beta alpha"), &t).unwrap();
        let found = search_words(&target, &t, 3).unwrap().unwrap();
        assert!(class_of_word(&found, &t).unwrap().eq_up_to_sign(&target));
        assert!(found.letters.len() <= 2);
    }
}
