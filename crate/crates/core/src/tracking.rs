//! Path continuation for the bifibration: the isotopy of the branch values
//! of `ρ_w` as `w` runs along a vanishing path of `π`, the matching path it
//! induces, and sheet transport for the degree-`d` cover `ρ_w : X_w → C`
//! (vanishing 0-spheres, monodromy, matching-path tests, bases).

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fibration::{self, Bifibration, FibrationError, Fibre};
use crate::mcg::PlumbingTree;
use crate::roots::elim::{scaled_residual, solve_linear, solve_system2};
use crate::roots::{ElimOptions, RootError};
use crate::Poly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("not a vanishing path: {0}")]
    NotAVanishingPath(String),
    #[error("ill-conditioned path: step fell below {min_step:e} at parameter {at}")]
    IllConditioned { at: f64, min_step: f64 },
    #[error("non-simple critical value: more than one pair of branch values merges")]
    NonSimple,
    #[error("no sheet collision at the end of the path")]
    NoCollision,
    #[error("more than two sheets collide at the end of the path")]
    MultipleCollision,
    #[error("path interior passes within {distance:e} of a branch value")]
    Obstructed { distance: f64 },
    /// Two branch values collide well before the end of the path: the path
    /// runs through a fibre on which `ρ` is not Lefschetz.
    #[error("branch values collide at parameter {at} before the end of the path")]
    Degenerate { at: f64, point: C },
    #[error("invalid path: {0}")]
    BadPath(String),
    #[error("spheres are anchored at different points")]
    AnchorMismatch,
    #[error("backward transport forced through a branch value")]
    TransportBlocked,
    #[error("intersection pattern is not a tree: {0}")]
    NotATree(String),
    #[error("no endpoint within the snap radius of a branch value")]
    SnapFailed,
    #[error(transparent)]
    Fibration(#[from] FibrationError),
    #[error(transparent)]
    Roots(#[from] RootError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions {
    /// Merge declared below this fraction of the frame diameter.
    pub merge_tol: f64,
    /// Largest continuation step, as a fraction of the path parameter.
    pub max_step: f64,
    pub min_step: f64,
    /// Required clearance of a path interior from other critical values.
    pub interior_margin: f64,
    /// Straight default paths passing closer than this to another critical
    /// value get a detour.
    pub detour: f64,
    pub elim: ElimOptions,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { merge_tol: 1e-5, max_step: 0.02, min_step: 1e-9, interior_margin: 1e-4, detour: 1e-3, elim: ElimOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    VanishingPath,
    MatchingPath,
    Loop,
    Segment,
}

/// Polyline parametrized proportionally to arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarPath {
    pub waypoints: Vec<C>,
    pub kind: PathKind,
}

fn seg_dist(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / l2;
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

/// Proper crossing of segments `[a,b]` and `[c,d]`: parameters on each.
fn seg_cross(a: C, b: C, c: C, d: C) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let den = r.re * s.im - r.im * s.re;
    if den.abs() <= 1e-14 * r.norm() * s.norm() {
        return None;
    }
    let q = c - a;
    let t = (q.re * s.im - q.im * s.re) / den;
    let u = (q.re * r.im - q.im * r.re) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((t, u))
}

impl PlanarPath {
    pub fn new(waypoints: Vec<C>, kind: PathKind) -> Result<Self, TrackError> {
        if waypoints.len() < 2 {
            return Err(TrackError::BadPath("fewer than two waypoints".into()));
        }
        if waypoints.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(TrackError::BadPath("non-finite waypoint".into()));
        }
        Ok(PlanarPath { waypoints, kind })
    }

    pub fn segment(a: C, b: C, kind: PathKind) -> Self {
        PlanarPath { waypoints: vec![a, b], kind }
    }

    pub fn start(&self) -> C {
        self.waypoints[0]
    }

    pub fn end(&self) -> C {
        *self.waypoints.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Point at arclength fraction `t ∈ [0, 1]`.
    pub fn at(&self, t: f64) -> C {
        let total = self.length();
        if total == 0.0 {
            return self.start();
        }
        let mut left = t.clamp(0.0, 1.0) * total;
        for w in self.waypoints.windows(2) {
            let l = (w[1] - w[0]).norm();
            if left <= l {
                return if l == 0.0 { w[0] } else { w[0] + (w[1] - w[0]) * (left / l) };
            }
            left -= l;
        }
        self.end()
    }

    pub fn reversed(&self) -> Self {
        let mut w = self.waypoints.clone();
        w.reverse();
        PlanarPath { waypoints: w, kind: self.kind }
    }

    /// The two pieces at arclength fraction `t`.
    pub fn split(&self, t: f64) -> (PlanarPath, PlanarPath) {
        let total = self.length();
        let cut = t.clamp(0.0, 1.0) * total;
        let m = self.at(t);
        let mut head = vec![self.start()];
        let mut tail = vec![m];
        let mut acc = 0.0;
        for w in self.waypoints.windows(2) {
            let l = (w[1] - w[0]).norm();
            if acc + l < cut {
                head.push(w[1]);
            } else {
                tail.push(w[1]);
            }
            acc += l;
        }
        head.push(m);
        head.dedup();
        tail.dedup();
        if head.len() < 2 {
            head.push(m);
        }
        if tail.len() < 2 {
            tail.push(m);
        }
        (PlanarPath { waypoints: head, kind: PathKind::Segment }, PlanarPath { waypoints: tail, kind: self.kind })
    }

    pub fn distance_to(&self, p: C) -> f64 {
        self.waypoints.windows(2).map(|w| seg_dist(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance from the interior to the given points, ignoring
    /// points that coincide with an endpoint.
    pub fn interior_clearance(&self, points: &[C], snap: f64) -> f64 {
        points.iter().filter(|p| (**p - self.start()).norm() > snap && (**p - self.end()).norm() > snap).map(|p| self.distance_to(*p)).fold(f64::INFINITY, f64::min)
    }

    /// Arclength fractions on `self` and `other` of proper interior crossings.
    pub fn crossings(&self, other: &PlanarPath) -> Vec<(f64, f64)> {
        let la = self.length();
        let lb = other.length();
        let mut out = Vec::new();
        let mut acc_a = 0.0;
        for a in self.waypoints.windows(2) {
            let sa = (a[1] - a[0]).norm();
            let mut acc_b = 0.0;
            for b in other.waypoints.windows(2) {
                let sb = (b[1] - b[0]).norm();
                if let Some((t, u)) = seg_cross(a[0], a[1], b[0], b[1]) {
                    let fa = (acc_a + t * sa) / la;
                    let fb = (acc_b + u * sb) / lb;
                    let interior = |f: f64| f > 1e-9 && f < 1.0 - 1e-9;
                    if interior(fa) && interior(fb) && !out.iter().any(|&(x, y): &(f64, f64)| (x - fa).abs() < 1e-12 && (y - fb).abs() < 1e-12) {
                        out.push((fa, fb));
                    }
                }
                acc_b += sb;
            }
            acc_a += sa;
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }
}

fn min_gap(v: &[C]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            g = g.min((v[i] - v[j]).norm());
        }
    }
    g
}

fn diameter(v: &[C]) -> f64 {
    let mut g: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            g = g.max((v[i] - v[j]).norm());
        }
    }
    g
}

/// Straight segments from `base` to each critical value, counterclockwise
/// by initial direction starting from `arg = 0`. A segment passing within
/// `detour` of another critical value is bent around it; the returned flag
/// records that.
pub fn default_vanishing_paths(base: C, crit: &[C], detour: f64) -> Vec<(usize, PlanarPath, bool)> {
    let mut order: Vec<usize> = (0..crit.len()).collect();
    let angle = |c: C| {
        let a = (c - base).arg();
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    };
    order.sort_by(|&i, &j| angle(crit[i]).total_cmp(&angle(crit[j])).then((crit[i] - base).norm().total_cmp(&(crit[j] - base).norm())));
    let spacing = min_gap(crit).min(f64::INFINITY);
    order
        .into_iter()
        .map(|i| {
            let target = crit[i];
            let dir = (target - base) / (target - base).norm();
            let mut waypoints = vec![base];
            let mut bent = false;
            let mut blockers: Vec<(f64, C)> =
                crit.iter().enumerate().filter(|&(j, c)| j != i && seg_dist(*c, base, target) < detour).map(|(_, c)| (((c - base) * dir.conj()).re, *c)).collect();
            blockers.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (_, c) in blockers {
                let offset = ((c - base) * dir.conj()).im;
                let side = if offset > 0.0 { -1.0 } else { 1.0 };
                let r = (0.25 * spacing).max(4.0 * detour);
                let foot = base + dir * ((c - base) * dir.conj()).re;
                let n = dir * C::new(0.0, side);
                waypoints.push(foot - dir * r + n * r);
                waypoints.push(foot + n * r);
                waypoints.push(foot + dir * r + n * r);
                bent = true;
            }
            waypoints.push(target);
            (i, PlanarPath { waypoints, kind: PathKind::VanishingPath }, bent)
        })
        .collect()
}

/// `ρ`-critical points on `π`-fibres as solutions of the fixed system
/// `f = 0, π = w, det(∇f, dπ, dρ) = 0` in `C³`.
struct CritSystem {
    f: Poly,
    grad: [Poly; 3],
    det: Poly,
    det_grad: [Poly; 3],
    a: [C; 3],
    pi_const: C,
    r: [C; 3],
    rho_const: C,
}

impl CritSystem {
    fn new(b: &Bifibration) -> Result<Self, TrackError> {
        let vars = b.vars().to_vec();
        let grad: Vec<Poly> = vars.iter().map(|v| b.surface.partial(v)).collect::<Result<_, _>>().map_err(FibrationError::from)?;
        let a: Vec<C> = vars.iter().map(|v| b.pi.coeff(v)).collect();
        let r: Vec<C> = vars.iter().map(|v| b.rho.coeff(v)).collect();
        let m = |i: usize, j: usize| a[i] * r[j] - a[j] * r[i];
        let det = &(&grad[0].scale_by(&m(1, 2)) - &grad[1].scale_by(&m(0, 2))) + &grad[2].scale_by(&m(0, 1));
        let det_grad: Vec<Poly> = vars.iter().map(|v| det.partial(v)).collect::<Result<_, _>>().map_err(FibrationError::from)?;
        Ok(CritSystem {
            f: b.surface.clone(),
            grad: [grad[0].clone(), grad[1].clone(), grad[2].clone()],
            det,
            det_grad: [det_grad[0].clone(), det_grad[1].clone(), det_grad[2].clone()],
            a: [a[0], a[1], a[2]],
            pi_const: *b.pi.constant_term(),
            r: [r[0], r[1], r[2]],
            rho_const: *b.rho.constant_term(),
        })
    }

    fn rho(&self, p: &[C; 3]) -> C {
        self.rho_const + self.r[0] * p[0] + self.r[1] * p[1] + self.r[2] * p[2]
    }

    fn newton(&self, p0: [C; 3], w: C) -> Option<[C; 3]> {
        let mut p = p0;
        for _ in 0..30 {
            let pi = self.pi_const + self.a[0] * p[0] + self.a[1] * p[1] + self.a[2] * p[2];
            let f = vec![-self.f.eval(&p).ok()?, w - pi, -self.det.eval(&p).ok()?];
            let jac =
                vec![self.grad.iter().map(|g| g.eval(&p).unwrap()).collect::<Vec<_>>(), self.a.to_vec(), self.det_grad.iter().map(|g| g.eval(&p).unwrap()).collect::<Vec<_>>()];
            let dx = solve_linear(jac, f)?;
            let step = dx.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for k in 0..3 {
                p[k] += dx[k];
            }
            let size = 1.0 + p.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if !size.is_finite() {
                return None;
            }
            if step <= 1e-13 * size {
                return Some(p);
            }
        }
        let ok = scaled_residual(&self.f, &p) < 1e-10 && scaled_residual(&self.det, &p) < 1e-10;
        ok.then_some(p)
    }
}

/// Evolution of the branch values of `ρ_{γ(t)}` along a vanishing path `γ`
/// of `π`. Frames are index-aligned: `frames[k][i]` continues
/// `frames[k-1][i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritvalIsotopy {
    pub path: PlanarPath,
    /// Path parameter (arclength fraction) of each frame.
    pub times: Vec<f64>,
    pub frames: Vec<Vec<C>>,
    pub merge_pair: (usize, usize),
    pub merge_distance: f64,
    /// Smallest distance among all other pairs at the final frame.
    pub final_gap: f64,
    pub merge_tol: f64,
    /// Quadratic extrapolation of the merging pair to `t = 1`.
    pub collision: C,
    pub rejected_steps: usize,
}

impl CritvalIsotopy {
    pub fn steps(&self) -> usize {
        self.frames.len() - 1
    }

    /// Smallest pairwise gap over all frames, ignoring the merging pair.
    pub fn min_gap(&self) -> f64 {
        let (a, b) = self.merge_pair;
        let mut g = f64::INFINITY;
        for f in &self.frames {
            for i in 0..f.len() {
                for j in i + 1..f.len() {
                    if (i, j) != (a, b) {
                        g = g.min((f[i] - f[j]).norm());
                    }
                }
            }
        }
        g
    }
}

fn nearest_index(c: &[C], p: C) -> (usize, f64) {
    c.iter().enumerate().map(|(i, q)| (i, (q - p).norm())).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap_or((0, f64::INFINITY))
}

/// Tracks the branch values of `ρ` along `gamma`, which must end at one of
/// `pi_crit` and avoid the others.
pub fn track_critvals_with(b: &Bifibration, pi_crit: &[C], gamma: &PlanarPath, opts: &TrackOptions) -> Result<CritvalIsotopy, TrackError> {
    let (_, end_dist) = nearest_index(pi_crit, gamma.end());
    if end_dist > 1e-8 * (1.0 + gamma.end().norm()) {
        return Err(TrackError::NotAVanishingPath(format!("endpoint is {end_dist:e} from the nearest critical value")));
    }
    if gamma.length() == 0.0 {
        return Err(TrackError::NotAVanishingPath("constant path".into()));
    }
    let clearance = gamma.interior_clearance(pi_crit, 1e-8 * (1.0 + gamma.end().norm()));
    if clearance < opts.interior_margin {
        return Err(TrackError::Obstructed { distance: clearance });
    }
    let (start_crit, start_d) = nearest_index(pi_crit, gamma.start());
    let _ = start_crit;
    if start_d < opts.interior_margin {
        return Err(TrackError::NotAVanishingPath("starts at a critical value".into()));
    }
    let sys = CritSystem::new(b)?;
    // initial frame from the fibre
    let w0 = gamma.start();
    let fib = b.fibre(w0)?;
    let plane = fib.poly.vars().to_vec();
    let (ra, rb) = (fib.rho.coeff(&plane[0]), fib.rho.coeff(&plane[1]));
    let h = &fib.poly.partial(&plane[0]).map_err(FibrationError::from)?.scale_by(&rb) - &fib.poly.partial(&plane[1]).map_err(FibrationError::from)?.scale_by(&ra);
    let sols = solve_system2(&[fib.poly.clone(), h], &opts.elim)?;
    let mut pts: Vec<[C; 3]> = Vec::new();
    for s in &sols {
        let p = b.lift(w0, [s.point[0], s.point[1]]);
        pts.push(sys.newton(p, w0).unwrap_or(p));
    }
    if pts.len() < 2 {
        return Err(TrackError::NotAVanishingPath("fewer than two branch values".into()));
    }
    let n = pts.len();
    let mut values: Vec<C> = pts.iter().map(|p| sys.rho(p)).collect();
    let diam0 = diameter(&values).max(f64::MIN_POSITIVE);
    let tol = opts.merge_tol * diam0;

    // t = 1 - (1 - tau)^2: branch values approach each other linearly in tau
    let time = |tau: f64| 1.0 - (1.0 - tau) * (1.0 - tau);
    let mut taus = vec![0.0];
    let mut frames = vec![values.clone()];
    let mut times = vec![0.0];
    let mut prev_pts: Option<(Vec<[C; 3]>, f64)> = None;
    let mut tau = 0.0f64;
    let mut dtau = opts.max_step.min(0.01);
    let mut rejected = 0usize;
    loop {
        let g = min_gap(&values);
        if g < tol {
            // a nodal merge closes the gap only as t -> 1
            if 1.0 - time(tau) > 1e-4 {
                return Err(TrackError::Degenerate { at: time(tau), point: gamma.at(time(tau)) });
            }
            break;
        }
        if 1.0 - tau < 1e-10 {
            return Err(TrackError::NotAVanishingPath("no pair of branch values merges".into()));
        }
        dtau = dtau.min(0.5 * (1.0 - tau)).min(opts.max_step);
        if dtau < opts.min_step * (1.0 - tau).max(1e-300).min(1.0) && dtau < 1e-15 {
            return Err(TrackError::IllConditioned { at: time(tau), min_step: opts.min_step });
        }
        let next_tau = tau + dtau;
        let w = gamma.at(time(next_tau));
        let mut ok = true;
        let mut new_pts = Vec::with_capacity(n);
        for (i, p) in pts.iter().enumerate() {
            let pred = match &prev_pts {
                Some((pp, pd)) => {
                    let r = dtau / pd;
                    [p[0] + (p[0] - pp[i][0]) * r, p[1] + (p[1] - pp[i][1]) * r, p[2] + (p[2] - pp[i][2]) * r]
                }
                None => *p,
            };
            match sys.newton(pred, w) {
                Some(q) => new_pts.push(q),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let mut new_values = Vec::new();
        if ok {
            new_values = new_pts.iter().map(|p| sys.rho(p)).collect();
            let limit = 0.5 * g;
            ok = values.iter().zip(&new_values).all(|(a, b)| (a - b).norm() < limit) && min_gap(&new_values) > 0.0;
        }
        if !ok {
            rejected += 1;
            dtau *= 0.5;
            if dtau < opts.min_step * (1.0 - tau) {
                return Err(TrackError::IllConditioned { at: time(tau), min_step: opts.min_step });
            }
            continue;
        }
        prev_pts = Some((pts.clone(), dtau));
        pts = new_pts;
        values = new_values;
        tau = next_tau;
        taus.push(tau);
        times.push(time(tau));
        frames.push(values.clone());
        dtau *= 1.5;
    }
    // identify the merging pair at the last frame
    let mut best = (0, 1, f64::INFINITY);
    let mut others = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let d = (values[i] - values[j]).norm();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if (i, j) != (best.0, best.1) {
                others = others.min((values[i] - values[j]).norm());
            }
        }
    }
    if others <= 10.0 * tol {
        return Err(TrackError::NonSimple);
    }
    let collision = {
        let k = frames.len();
        let mid = |f: &Vec<C>| (f[best.0] + f[best.1]) * 0.5;
        if k >= 3 {
            let (t0, t1, t2) = (taus[k - 3], taus[k - 2], taus[k - 1]);
            let (y0, y1, y2) = (mid(&frames[k - 3]), mid(&frames[k - 2]), mid(&frames[k - 1]));
            let l0 = (1.0 - t1) * (1.0 - t2) / ((t0 - t1) * (t0 - t2));
            let l1 = (1.0 - t0) * (1.0 - t2) / ((t1 - t0) * (t1 - t2));
            let l2 = (1.0 - t0) * (1.0 - t1) / ((t2 - t0) * (t2 - t1));
            y0 * l0 + y1 * l1 + y2 * l2
        } else {
            mid(&frames[k - 1])
        }
    };
    Ok(CritvalIsotopy {
        path: gamma.clone(),
        times,
        frames,
        merge_pair: (best.0, best.1),
        merge_distance: best.2,
        final_gap: others,
        merge_tol: tol,
        collision,
        rejected_steps: rejected,
    })
}

/// Inserts a detour of radius `r` around `p`, which lies on `path`, on the
/// left of the direction of travel.
fn detour_around(path: &PlanarPath, p: C, r: f64) -> PlanarPath {
    let w = &path.waypoints;
    let k = (0..w.len() - 1).min_by(|&i, &j| seg_dist(p, w[i], w[i + 1]).total_cmp(&seg_dist(p, w[j], w[j + 1]))).unwrap_or(0);
    let d = (w[k + 1] - w[k]) / (w[k + 1] - w[k]).norm();
    let n = d * C::new(0.0, 1.0);
    let mut out = w[..=k].to_vec();
    out.extend([p - d * r + n * r, p + n * r, p + d * r + n * r]);
    out.extend_from_slice(&w[k + 1..]);
    PlanarPath { waypoints: out, kind: path.kind }
}

/// Tracks a vanishing path, bending it around points where `ρ` degenerates
/// (up to four times). Returns the path actually used and whether it was
/// changed.
pub fn track_default_path(b: &Bifibration, pi_crit: &[C], gamma: &PlanarPath, opts: &TrackOptions) -> Result<(PlanarPath, bool, CritvalIsotopy), TrackError> {
    let mut path = gamma.clone();
    let mut bent = false;
    for _ in 0..4 {
        match track_critvals_with(b, pi_crit, &path, opts) {
            Ok(iso) => return Ok((path, bent, iso)),
            Err(TrackError::Degenerate { point, .. }) => {
                let clear = pi_crit.iter().map(|c| (c - point).norm()).fold(f64::INFINITY, f64::min);
                let r = (0.05 * gamma.length()).min(0.3 * clear);
                path = detour_around(&path, point, r);
                bent = true;
            }
            Err(e) => return Err(e),
        }
    }
    track_critvals_with(b, pi_crit, &path, opts).map(|iso| (path, bent, iso))
}

pub fn track_critvals(b: &Bifibration, gamma: &PlanarPath, opts: &TrackOptions) -> Result<CritvalIsotopy, TrackError> {
    let crit = fibration::critvals_pi(b, &opts.elim)?;
    track_critvals_with(b, &crit.distinct(), gamma, opts)
}

/// One elementary push: each centre moves by its displacement; the disc of
/// radius `radius / 2` moves rigidly and the weight falls off linearly to
/// zero at `radius`. The plateau keeps points near a centre from drifting
/// off it over many pushes.
struct Push {
    centres: Vec<C>,
    shifts: Vec<C>,
    radius: f64,
}

impl Push {
    fn weight(&self, x: C, c: C) -> f64 {
        (2.0 - 2.0 * (x - c).norm() / self.radius).clamp(0.0, 1.0)
    }

    fn forward(&self, x: C) -> C {
        let mut y = x;
        for (c, d) in self.centres.iter().zip(&self.shifts) {
            y += d * self.weight(x, *c);
        }
        y
    }

    /// Inverse by fixed-point iteration: the weight is `2/radius`-Lipschitz
    /// and every shift is at most `radius / 4`, so the iteration contracts.
    fn inverse(&self, y: C) -> C {
        let mut x = y;
        for _ in 0..200 {
            let mut nx = y;
            for (c, d) in self.centres.iter().zip(&self.shifts) {
                nx -= d * self.weight(x, *c);
            }
            if (nx - x).norm() <= 1e-15 * (1.0 + y.norm()) {
                return nx;
            }
            x = nx;
        }
        x
    }
}

/// Elementary pushes realizing the motion between consecutive frames,
/// subdivided so that every shift is at most a quarter of the push radius.
fn pushes(frames: &[Vec<C>]) -> Vec<Vec<Push>> {
    frames
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let max_shift = a.iter().zip(b).map(|(p, q)| (q - p).norm()).fold(0.0, f64::max);
            let mut m = 1usize;
            loop {
                let ok = (0..m).all(|l| {
                    let lam = l as f64 / m as f64;
                    let cur: Vec<C> = a.iter().zip(b).map(|(p, q)| p + (q - p) * lam).collect();
                    max_shift / m as f64 <= 0.125 * min_gap(&cur)
                });
                if ok || m > 1 << 20 {
                    break;
                }
                m *= 2;
            }
            (0..m)
                .map(|l| {
                    let lam = l as f64 / m as f64;
                    let cur: Vec<C> = a.iter().zip(b).map(|(p, q)| p + (q - p) * lam).collect();
                    let shifts = a.iter().zip(b).map(|(p, q)| (q - p) / m as f64).collect();
                    Push { radius: 0.5 * min_gap(&cur), centres: cur, shifts }
                })
                .collect()
        })
        .collect()
}

/// Subdivides the segments meeting a push disc; the others map rigidly.
fn refine(poly: &[C], push: &Push) -> Vec<C> {
    let max_len = push.radius / 3.0;
    let mut out = vec![poly[0]];
    for w in poly.windows(2) {
        let l = (w[1] - w[0]).norm();
        let near = push.centres.iter().any(|c| seg_dist(*c, w[0], w[1]) < push.radius);
        let k = if near { (l / max_len).ceil().max(1.0) as usize } else { 1 };
        for j in 1..=k {
            out.push(w[0] + (w[1] - w[0]) * (j as f64 / k as f64));
        }
    }
    out
}

fn in_triangle(p: C, a: C, b: C, c: C) -> bool {
    let cross = |u: C, v: C| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, p - a);
    let d2 = cross(c - b, p - b);
    let d3 = cross(a - c, p - c);
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos)
}

/// Drops vertices whose removal sweeps no puncture (isotopy class rel
/// `punctures` is unchanged) and keeps clearance above `margin`.
fn simplify(poly: &[C], punctures: &[C], margin: f64) -> Vec<C> {
    let mut pts = poly.to_vec();
    let mut changed = true;
    while changed && pts.len() > 2 {
        changed = false;
        let mut i = 1;
        while i + 1 < pts.len() {
            let (a, v, c) = (pts[i - 1], pts[i], pts[i + 1]);
            let clear = punctures.iter().all(|p| {
                let endpoint = (*p - pts[0]).norm() < 1e-14 || (*p - *pts.last().unwrap()).norm() < 1e-14;
                if endpoint {
                    // an endpoint may not be swept over by an interior piece
                    !(in_triangle(*p, a, v, c) && (*p - a).norm() > 1e-14 && (*p - c).norm() > 1e-14)
                } else {
                    !in_triangle(*p, a, v, c) && seg_dist(*p, a, c) > margin
                }
            });
            if clear {
                pts.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
    }
    pts
}

fn transport(iso: &CritvalIsotopy, poly: Vec<C>, backward: bool) -> Result<Vec<C>, TrackError> {
    let steps = pushes(&iso.frames);
    let mut cur = poly;
    let order: Vec<usize> = if backward { (0..steps.len()).rev().collect() } else { (0..steps.len()).collect() };
    for k in order {
        let subs = &steps[k];
        let idx: Vec<usize> = if backward { (0..subs.len()).rev().collect() } else { (0..subs.len()).collect() };
        for l in idx {
            let p = &subs[l];
            cur = refine(&cur, p);
            cur = cur.into_iter().map(|x| if backward { p.inverse(x) } else { p.forward(x) }).collect();
        }
        if cur.len() > 4000 {
            let frame = if backward { &iso.frames[k] } else { &iso.frames[k + 1] };
            cur = simplify(&cur, frame, 0.05 * min_gap(frame));
        }
    }
    Ok(cur)
}

/// Pushes `poly` out of a disc around every puncture other than its
/// endpoints by the radial homeomorphism `r ↦ R/2 + r/2` on the disc of
/// radius `R` (a fifth of the distance to the nearest other puncture);
/// outside the discs nothing moves, so the isotopy class rel punctures is
/// unchanged.
fn inflate(poly: &[C], punctures: &[C]) -> Vec<C> {
    let (a, b) = (poly[0], *poly.last().unwrap());
    let mut cur = poly.to_vec();
    for (k, &c) in punctures.iter().enumerate() {
        if (c - a).norm() < 1e-12 * (1.0 + c.norm()) || (c - b).norm() < 1e-12 * (1.0 + c.norm()) {
            continue;
        }
        let near = punctures.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, q)| (q - c).norm()).fold(f64::INFINITY, f64::min);
        let r_out = 0.2 * near;
        if !cur.windows(2).any(|w| seg_dist(c, w[0], w[1]) < 0.5 * r_out) {
            continue;
        }
        let mut fine = vec![cur[0]];
        for w in cur.windows(2) {
            let k = if seg_dist(c, w[0], w[1]) < r_out { ((w[1] - w[0]).norm() / (0.05 * r_out)).ceil().max(1.0) as usize } else { 1 };
            for j in 1..=k {
                fine.push(w[0] + (w[1] - w[0]) * (j as f64 / k as f64));
            }
        }
        cur = fine
            .into_iter()
            .map(|x| {
                let d = x - c;
                let r = d.norm();
                if r >= r_out || r == 0.0 {
                    x
                } else {
                    c + d * ((0.5 * r_out + 0.5 * r) / r)
                }
            })
            .collect();
    }
    cur
}

/// The matching path in the `ρ`-plane over `γ(0)` induced by `iso`: the
/// segment joining the merging pair, transported back through the frames
/// by a plane isotopy that carries the branch values along.
pub fn extract_matching_path(iso: &CritvalIsotopy) -> Result<PlanarPath, TrackError> {
    let (i, j) = iso.merge_pair;
    let last = iso.frames.last().unwrap();
    let poly = transport(iso, vec![last[i], last[j]], true)?;
    let first = &iso.frames[0];
    let mut poly = simplify(&poly, first, 0.05 * min_gap(first));
    poly[0] = first[i];
    *poly.last_mut().unwrap() = first[j];
    let poly = inflate(&poly, first);
    let mut poly = simplify(&poly, first, 0.05 * min_gap(first));
    // endpoints are carried exactly up to the fixed-point tolerance
    poly[0] = first[i];
    *poly.last_mut().unwrap() = first[j];
    let path = PlanarPath { waypoints: poly, kind: PathKind::MatchingPath };
    let others: Vec<C> = first.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, c)| *c).collect();
    if path.interior_clearance(&others, 0.0) <= 1e-12 * diameter(first) {
        return Err(TrackError::TransportBlocked);
    }
    Ok(path)
}

/// Pushes a path in the base of `ρ_{γ(0)}` forward to the final frame.
pub fn transport_forward(iso: &CritvalIsotopy, path: &PlanarPath) -> Result<PlanarPath, TrackError> {
    let poly = transport(iso, path.waypoints.clone(), false)?;
    Ok(PlanarPath { waypoints: poly, kind: path.kind })
}

/// Bijection of sheet labels. `images[i]` is the label reached from `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    pub images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    /// First `self`, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&i| other.images[i]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    pub fn as_transposition(&self) -> Option<(usize, usize)> {
        let moved: Vec<usize> = (0..self.images.len()).filter(|&i| self.images[i] != i).collect();
        (moved.len() == 2 && self.images[moved[0]] == moved[1]).then(|| (moved[0], moved[1]))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetCorrespondence {
    pub start_points: Vec<[C; 2]>,
    pub end_points: Vec<[C; 2]>,
    pub map: Permutation,
}

/// Unordered pair of sheets colliding over a branch value, labelled by the
/// fibre over `anchor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanishingSphere {
    pub sheets: (usize, usize),
    pub anchor: C,
}

impl VanishingSphere {
    fn new(a: usize, b: usize, anchor: C) -> Self {
        VanishingSphere { sheets: (a.min(b), a.max(b)), anchor }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereRelation {
    Disjoint,
    ShareOne,
    Equal,
}

pub fn spheres_share_one_sheet(a: &VanishingSphere, b: &VanishingSphere) -> Result<SphereRelation, TrackError> {
    if (a.anchor - b.anchor).norm() > 1e-12 * (1.0 + a.anchor.norm()) {
        return Err(TrackError::AnchorMismatch);
    }
    let sa = [a.sheets.0, a.sheets.1];
    let common = [b.sheets.0, b.sheets.1].iter().filter(|x| sa.contains(x)).count();
    Ok(match common {
        0 => SphereRelation::Disjoint,
        1 => SphereRelation::ShareOne,
        _ => SphereRelation::Equal,
    })
}

fn pdist(a: &[C; 2], b: &[C; 2]) -> f64 {
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
}

fn min_point_gap(p: &[[C; 2]]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            g = g.min(pdist(&p[i], &p[j]));
        }
    }
    g
}

/// The degree-`d` cover `ρ_w : X_w → C` together with its branch values.
#[derive(Debug, Clone)]
pub struct Cover {
    pub fibre: Fibre,
    pub branch_values: Vec<C>,
    pub opts: TrackOptions,
}

struct SheetTrack {
    start: Vec<[C; 2]>,
    end: Vec<[C; 2]>,
    /// Final positions indexed by start label.
    carried: Vec<[C; 2]>,
}

impl Cover {
    pub fn new(b: &Bifibration, w: C, opts: &TrackOptions) -> Result<Self, TrackError> {
        let fibre = b.fibre(w)?;
        let set = crate::roots::plane_curve_critical_values(&fibre.poly, &fibre.rho, &opts.elim)?;
        Ok(Cover { fibre, branch_values: set.distinct(), opts: *opts })
    }

    /// Sorted fibre points over `s`, with multiplicity.
    pub fn points(&self, s: C) -> Result<Vec<[C; 2]>, TrackError> {
        Ok(fibration::fibre_points_raw(&self.fibre, s, &self.opts.elim)?)
    }

    pub fn degree(&self) -> Result<usize, TrackError> {
        let s = self.generic_point();
        Ok(self.points(s)?.len())
    }

    fn generic_point(&self) -> C {
        let c = self.branch_values.iter().fold(C::new(0.0, 0.0), |a, b| a + b) / (self.branch_values.len().max(1) as f64);
        c + C::new(0.1234567, 0.0765432) * (1.0 + self.scale())
    }

    /// Diameter of the branch set (at least 1).
    pub fn scale(&self) -> f64 {
        diameter(&self.branch_values).max(1.0)
    }

    fn snap_tol(&self) -> f64 {
        1e-7 * self.scale()
    }

    /// Continues the sheets along `path`; when `collide` is set the path
    /// may end at a branch value and the final parameter approaches it
    /// quadratically.
    fn carry(&self, path: &PlanarPath, collide: bool) -> Result<SheetTrack, TrackError> {
        let start = self.points(path.start())?;
        let n = start.len();
        let mut cur = start.clone();
        let mut prev: Option<(Vec<[C; 2]>, f64)> = None;
        let time = |tau: f64| if collide { 1.0 - (1.0 - tau) * (1.0 - tau) } else { tau };
        let mut tau = 0.0f64;
        let mut dtau = self.opts.max_step.min(0.01);
        let stop = if collide { 1.0 - 1e-6 } else { 1.0 };
        // a step may not sweep past a branch value: its arclength stays
        // below half the clearance, so no winding is skipped
        let others: Vec<C> = self.branch_values.iter().copied().filter(|b| !collide || (b - path.end()).norm() > self.snap_tol()).collect();
        let len = path.length().max(f64::MIN_POSITIVE);
        while tau < stop {
            let here = path.at(time(tau));
            let clear = others.iter().map(|b| (b - here).norm()).fold(f64::INFINITY, f64::min);
            let cap = 0.5 * clear / len / if collide { 2.0 } else { 1.0 };
            dtau = dtau.min(self.opts.max_step).min(cap).min(stop - tau);
            let next = if stop - tau - dtau < 1e-15 { stop } else { tau + dtau };
            let s = path.at(time(next));
            let new = self.points(s)?;
            let gap = min_point_gap(&cur);
            let mut ok = new.len() == n;
            let mut assigned = vec![[C::new(0.0, 0.0); 2]; n];
            if ok {
                let mut used = vec![false; n];
                for i in 0..n {
                    let pred = match &prev {
                        Some((pp, pd)) => {
                            let r = (next - tau) / pd;
                            [cur[i][0] + (cur[i][0] - pp[i][0]) * r, cur[i][1] + (cur[i][1] - pp[i][1]) * r]
                        }
                        None => cur[i],
                    };
                    let (k, _) = new.iter().enumerate().filter(|(k, _)| !used[*k]).map(|(k, q)| (k, pdist(q, &pred))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
                    used[k] = true;
                    assigned[i] = new[k];
                    if pdist(&new[k], &cur[i]) >= 0.5 * gap {
                        ok = false;
                    }
                }
                // assignment must be unambiguous: each point nearest to its own predecessor
                if ok {
                    for i in 0..n {
                        let (k, _) = nearest_point(&cur, &assigned[i]);
                        if k != i {
                            ok = false;
                        }
                    }
                }
            }
            if !ok {
                dtau *= 0.5;
                if dtau < self.opts.min_step {
                    // the colliding pair is already below root-finder resolution
                    if collide && time(tau) > 1.0 - 1e-8 {
                        break;
                    }
                    return Err(TrackError::IllConditioned { at: time(tau), min_step: self.opts.min_step });
                }
                continue;
            }
            prev = Some((cur.clone(), next - tau));
            cur = assigned;
            tau = next;
            dtau *= 1.5;
            if collide {
                let g = min_point_gap(&cur);
                if g < 1e-9 * (1.0 + cur.iter().map(|p| p[0].norm() + p[1].norm()).fold(0.0, f64::max)) {
                    break;
                }
            }
        }
        let end = self.points(path.end())?;
        Ok(SheetTrack { start, end, carried: cur })
    }

    pub fn track(&self, path: &PlanarPath) -> Result<SheetCorrespondence, TrackError> {
        let clearance = path.interior_clearance(&self.branch_values, self.snap_tol());
        if clearance < self.opts.interior_margin {
            return Err(TrackError::Obstructed { distance: clearance });
        }
        if self.branch_values.iter().any(|b| (b - path.end()).norm() <= self.snap_tol() || (b - path.start()).norm() <= self.snap_tol()) {
            return Err(TrackError::BadPath("sheet correspondence needs regular endpoints".into()));
        }
        let t = self.carry(path, false)?;
        let images = t.carried.iter().map(|p| nearest_point(&t.end, p).0).collect();
        let map = Permutation::new(images).ok_or(TrackError::IllConditioned { at: 1.0, min_step: self.opts.min_step })?;
        Ok(SheetCorrespondence { start_points: t.start, end_points: t.end, map })
    }

    /// Sheets that collide at the end of `vpath`, labelled at its start.
    pub fn vanishing_sphere(&self, vpath: &PlanarPath) -> Result<VanishingSphere, TrackError> {
        let clearance = vpath.interior_clearance(&self.branch_values, self.snap_tol());
        if clearance < self.opts.interior_margin {
            return Err(TrackError::Obstructed { distance: clearance });
        }
        let t = self.carry(vpath, true)?;
        let n = t.carried.len();
        let mut d: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                d.push((pdist(&t.carried[i], &t.carried[j]), i, j));
            }
        }
        d.sort_by(|a, b| a.0.total_cmp(&b.0));
        let start_gap = min_point_gap(&t.start);
        if d.is_empty() || d[0].0 > 1e-3 * start_gap {
            return Err(TrackError::NoCollision);
        }
        if d.len() > 1 && d[1].0 < 1e-2 * start_gap {
            return Err(TrackError::MultipleCollision);
        }
        Ok(VanishingSphere::new(d[0].1, d[0].2, vpath.start()))
    }

    /// Both halves of `path`, seen from its midpoint, vanish on the same
    /// pair of sheets.
    pub fn is_matching_path(&self, path: &PlanarPath) -> Result<bool, TrackError> {
        let (head, tail) = path.split(0.5);
        let a = self.vanishing_sphere(&head.reversed())?;
        let b = self.vanishing_sphere(&tail)?;
        Ok(spheres_share_one_sheet(&a, &b)? == SphereRelation::Equal)
    }

    /// Monodromy of a closed loop based at a regular point.
    pub fn monodromy(&self, path: &PlanarPath) -> Result<Permutation, TrackError> {
        if (path.start() - path.end()).norm() > 1e-12 * (1.0 + path.start().norm()) {
            return Err(TrackError::BadPath("loop is not closed".into()));
        }
        Ok(self.track(path)?.map)
    }

    /// Number of intersection points of the matching cycles over two
    /// matching paths: shared endpoints plus interior crossings, where the
    /// two spheres over the crossing share `1` or `2` sheets.
    pub fn intersection_count(&self, p: &PlanarPath, q: &PlanarPath) -> Result<usize, TrackError> {
        let tol = 1e-6 * self.scale();
        let mut count = 0;
        for a in [p.start(), p.end()] {
            for b in [q.start(), q.end()] {
                if (a - b).norm() <= tol {
                    count += 1;
                }
            }
        }
        for (fp, fq) in p.crossings(q) {
            let x = p.at(fp);
            let (_, ptail) = p.split(fp);
            let (_, mut qtail) = q.split(fq);
            // one anchor for both, so that sheet labels agree
            qtail.waypoints[0] = ptail.start();
            let mut sp = self.vanishing_sphere(&ptail)?;
            let mut sq = self.vanishing_sphere(&qtail)?;
            sp.anchor = x;
            sq.anchor = x;
            count += match spheres_share_one_sheet(&sp, &sq)? {
                SphereRelation::Disjoint => 0,
                SphereRelation::ShareOne => 1,
                SphereRelation::Equal => 2,
            };
        }
        Ok(count)
    }

    /// Snaps path endpoints to the nearest branch values within `radius`.
    pub fn snap(&self, path: &PlanarPath, radius: f64) -> Result<PlanarPath, TrackError> {
        let mut out = path.clone();
        for idx in [0, out.waypoints.len() - 1] {
            let (k, d) = nearest_index(&self.branch_values, out.waypoints[idx]);
            if d > radius {
                return Err(TrackError::SnapFailed);
            }
            out.waypoints[idx] = self.branch_values[k];
        }
        Ok(out)
    }
}

fn nearest_point(set: &[[C; 2]], p: &[C; 2]) -> (usize, f64) {
    set.iter().enumerate().map(|(i, q)| (i, pdist(q, p))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap_or((0, f64::INFINITY))
}

pub fn track_sheets(b: &Bifibration, w: C, path: &PlanarPath, opts: &TrackOptions) -> Result<SheetCorrespondence, TrackError> {
    Cover::new(b, w, opts)?.track(path)
}

pub fn vanishing_sphere(b: &Bifibration, w: C, vpath: &PlanarPath, opts: &TrackOptions) -> Result<VanishingSphere, TrackError> {
    Cover::new(b, w, opts)?.vanishing_sphere(vpath)
}

pub fn is_matching_path(b: &Bifibration, w: C, path: &PlanarPath, opts: &TrackOptions) -> Result<bool, TrackError> {
    Cover::new(b, w, opts)?.is_matching_path(path)
}

/// Loop based at `base`: out along the segment to `target`, once around it
/// counterclockwise at `radius`, and back.
pub fn lasso(base: C, target: C, radius: f64, samples: usize) -> PlanarPath {
    let dir = (base - target) / (base - target).norm();
    let touch = target + dir * radius;
    let mut w = vec![base, touch];
    for k in 1..samples {
        let ang = std::f64::consts::TAU * k as f64 / samples as f64;
        w.push(target + dir * C::from_polar(radius, ang));
    }
    w.push(touch);
    w.push(base);
    PlanarPath { waypoints: w, kind: PathKind::Loop }
}

/// Circle through `base`-free region: `centre + radius·e^{iθ}`,
/// counterclockwise, closed.
pub fn circle(centre: C, radius: f64, phase: f64, samples: usize) -> PlanarPath {
    let mut w: Vec<C> = (0..samples).map(|k| centre + C::from_polar(radius, phase + std::f64::consts::TAU * k as f64 / samples as f64)).collect();
    w.push(w[0]);
    PlanarPath { waypoints: w, kind: PathKind::Loop }
}

/// Row of the sphere table: a branch value, its default vanishing path and
/// the sphere at the base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereEntry {
    pub branch_value: C,
    pub path: PlanarPath,
    pub detoured: bool,
    pub sphere: VanishingSphere,
}

pub fn sphere_table(cover: &Cover, base: C) -> Result<Vec<SphereEntry>, TrackError> {
    default_vanishing_paths(base, &cover.branch_values, cover.opts.detour * cover.scale())
        .into_iter()
        .map(|(i, path, detoured)| {
            let sphere = cover.vanishing_sphere(&path)?;
            Ok(SphereEntry { branch_value: cover.branch_values[i], path, detoured, sphere })
        })
        .collect()
}

/// Sheets reachable from sheet 0 through the transpositions.
pub fn is_transitive(degree: usize, spheres: &[VanishingSphere]) -> bool {
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for s in spheres {
        let (a, b) = (find(&mut parent, s.sheets.0), find(&mut parent, s.sheets.1));
        parent[a] = b;
    }
    let r = find(&mut parent, 0);
    (0..degree).all(|i| find(&mut parent, i) == r)
}

/// Intersection counts between matching cycles over the given paths, and
/// the plumbing tree they form (edge signs `+1`: orientations are not
/// resolved at the level of 0-spheres).
pub fn intersection_tree(cover: &Cover, labels: &[String], paths: &[PlanarPath]) -> Result<(Vec<Vec<usize>>, PlumbingTree), TrackError> {
    let n = paths.len();
    let mut m = vec![vec![0usize; n]; n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = cover.intersection_count(&paths[i], &paths[j])?;
            m[i][j] = c;
            m[j][i] = c;
            match c {
                0 => {}
                1 => edges.push((i, j, 1)),
                _ => return Err(TrackError::NotATree(format!("{} and {} meet {c} times", labels[i], labels[j]))),
            }
        }
    }
    let tree = PlumbingTree::new(labels.to_vec(), edges).map_err(|e| TrackError::NotATree(e.to_string()))?;
    Ok((m, tree))
}

/// Four matching paths whose matching cycles meet in a `D₄` pattern: the
/// centre first, then the leaves counterclockwise around the centre's
/// midpoint. (A chain of four circles plumbs to a genus-2 surface, so
/// `D₄` is the only tree that fits in the genus-1, three-punctured fibre.)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingBasis {
    pub paths: Vec<PlanarPath>,
    pub counts: Vec<Vec<usize>>,
}

/// Straight segments between branch values with clear interiors that are
/// matching paths.
pub fn straight_matching_paths(cover: &Cover) -> Result<Vec<PlanarPath>, TrackError> {
    let bv = &cover.branch_values;
    let margin = 0.02 * min_gap(bv);
    let mut out = Vec::new();
    for i in 0..bv.len() {
        for j in i + 1..bv.len() {
            let p = PlanarPath::segment(bv[i], bv[j], PathKind::MatchingPath);
            if p.interior_clearance(bv, cover.snap_tol()) >= margin && cover.is_matching_path(&p)? {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Matching paths through a regular point `base`: for two radial
/// vanishing paths with the same sphere, out along one, around `base` on a
/// small arc (either way) and back along the other.
pub fn v_paths(cover: &Cover, base: C) -> Result<Vec<PlanarPath>, TrackError> {
    let bv = &cover.branch_values;
    let reach = bv.iter().map(|b| (b - base).norm()).fold(f64::INFINITY, f64::min);
    let margin = 0.02 * min_gap(bv);
    if reach < 5.0 * margin {
        return Ok(Vec::new());
    }
    let mut rays: Vec<(f64, usize)> = bv.iter().enumerate().map(|(i, b)| ((b - base).arg(), i)).collect();
    rays.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut spheres = Vec::new();
    for &(_, i) in &rays {
        let ray = PlanarPath::segment(base, bv[i], PathKind::VanishingPath);
        if ray.interior_clearance(bv, cover.snap_tol()) < margin {
            return Ok(Vec::new());
        }
        spheres.push(cover.vanishing_sphere(&ray)?.sheets);
    }
    let n = rays.len();
    let eps = 0.1 * reach;
    let tau = std::f64::consts::TAU;
    let mut out = Vec::new();
    for k in 0..n {
        for l in 0..n {
            if k == l || spheres[k] != spheres[l] {
                continue;
            }
            // counterclockwise from ray k to ray l
            let a1 = rays[k].0;
            let mut a2 = rays[l].0;
            while a2 <= a1 {
                a2 += tau;
            }
            let delta = 0.1 * (a2 - a1).min(0.3);
            let steps = (((a2 - a1) / 0.3).ceil() as usize).max(2);
            let mut w = vec![bv[rays[k].1]];
            for m in 0..=steps {
                let ang = a1 + delta + (a2 - a1 - 2.0 * delta) * m as f64 / steps as f64;
                w.push(base + C::from_polar(eps, ang));
            }
            w.push(bv[rays[l].1]);
            let p = PlanarPath { waypoints: w, kind: PathKind::MatchingPath };
            if p.interior_clearance(bv, cover.snap_tol()) >= margin {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Endpoints and the reduced sequence of crossings with the chords between
/// branch values; isotopic paths in general position agree.
fn chord_signature(cover: &Cover, p: &PlanarPath) -> (usize, usize, Vec<(usize, bool)>) {
    let bv = &cover.branch_values;
    let mut seq: Vec<(f64, usize, bool)> = Vec::new();
    let mut chord = 0;
    for i in 0..bv.len() {
        for j in i + 1..bv.len() {
            let c = PlanarPath::segment(bv[i], bv[j], PathKind::Segment);
            for (fp, fc) in p.crossings(&c) {
                let d = p.at((fp + 1e-9).min(1.0)) - p.at((fp - 1e-9).max(0.0));
                let side = (d * (bv[j] - bv[i]).conj()).im > 0.0;
                let _ = fc;
                seq.push((fp, chord, side));
            }
            chord += 1;
        }
    }
    seq.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut red: Vec<(usize, bool)> = Vec::new();
    for (_, c, s) in seq {
        if red.last() == Some(&(c, !s)) {
            red.pop();
        } else {
            red.push((c, s));
        }
    }
    let (a, _) = nearest_index(bv, p.start());
    let (b, _) = nearest_index(bv, p.end());
    if a <= b {
        (a, b, red)
    } else {
        let mut r: Vec<(usize, bool)> = red.into_iter().rev().map(|(c, s)| (c, !s)).collect();
        r.shrink_to_fit();
        (b, a, r)
    }
}

/// Deduplicated candidate matching paths: straight segments, V-paths
/// through a grid of base points around the branch set, and `extra`.
pub fn candidate_matching_paths(cover: &Cover, extra: &[PlanarPath], grid: usize) -> Result<Vec<PlanarPath>, TrackError> {
    let bv = &cover.branch_values;
    let (mut lo, mut hi) = (C::new(f64::INFINITY, f64::INFINITY), C::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for b in bv {
        lo = C::new(lo.re.min(b.re), lo.im.min(b.im));
        hi = C::new(hi.re.max(b.re), hi.im.max(b.im));
    }
    let pad = 0.25 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let mut all: Vec<PlanarPath> = Vec::new();
    for p in extra {
        if cover.is_matching_path(p).unwrap_or(false) {
            all.push(p.clone());
        }
    }
    all.extend(straight_matching_paths(cover)?);
    for a in 0..grid {
        for b in 0..grid {
            // irrational offsets keep grid points off symmetry lines
            let fx = (a as f64 + 0.5 + 0.0713 * b as f64) / grid as f64;
            let fy = (b as f64 + 0.5 + 0.0419 * a as f64) / grid as f64;
            let base = C::new(lo.re + fx * (hi.re - lo.re), lo.im + fy * (hi.im - lo.im));
            all.extend(v_paths(cover, base)?);
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for p in all {
        if seen.insert(chord_signature(cover, &p)) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Image of `path` under the half twist along the straight segment `mu`,
/// supported in an annulus around its midpoint that contains no other
/// puncture; `dir = ±1` is counterclockwise/clockwise. `None` when no
/// such disc exists.
pub fn half_twist(path: &PlanarPath, mu: &PlanarPath, dir: i32, punctures: &[C]) -> Option<PlanarPath> {
    let (a, b) = (mu.start(), mu.end());
    let m = (a + b) * 0.5;
    let h = 0.5 * (b - a).norm();
    let others = punctures.iter().filter(|p| (**p - a).norm() > 1e-9 * (1.0 + h) && (**p - b).norm() > 1e-9 * (1.0 + h));
    let r2 = 0.95 * others.map(|p| (p - m).norm()).fold(f64::INFINITY, f64::min);
    let r1 = 1.02 * h;
    if r2 < 1.2 * r1 {
        return None;
    }
    let twist = |z: C| {
        let r = (z - m).norm();
        let phi = ((r2 - r) / (r2 - r1)).clamp(0.0, 1.0);
        m + (z - m) * C::from_polar(1.0, std::f64::consts::PI * dir as f64 * phi)
    };
    let step = r2 / 40.0;
    let mut w = vec![path.start()];
    for seg in path.waypoints.windows(2) {
        let near = seg_dist(m, seg[0], seg[1]) < r2;
        let k = if near { ((seg[1] - seg[0]).norm() / step).ceil().max(1.0) as usize } else { 1 };
        for j in 1..=k {
            w.push(seg[0] + (seg[1] - seg[0]) * (j as f64 / k as f64));
        }
    }
    let mut w: Vec<C> = w.into_iter().map(twist).collect();
    // endpoints sit exactly on punctures
    for idx in [0, w.len() - 1] {
        let q = w[idx];
        if let Some(p) = punctures.iter().find(|p| (**p - q).norm() < 1e-9 * (1.0 + h)) {
            w[idx] = *p;
        }
    }
    let w = simplify(&w, punctures, 0.02 * min_gap(punctures));
    Some(PlanarPath { waypoints: w, kind: path.kind })
}

/// The pool together with its images under `±` half twists along each of
/// the `twisters`, deduplicated.
pub fn twisted_candidates(cover: &Cover, pool: &[PlanarPath], twisters: &[PlanarPath]) -> Vec<PlanarPath> {
    let bv = &cover.branch_values;
    let margin = 0.02 * min_gap(bv);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut push = |p: PlanarPath, out: &mut Vec<PlanarPath>| {
        if seen.insert(chord_signature(cover, &p)) {
            out.push(p);
        }
    };
    for p in pool {
        push(p.clone(), &mut out);
    }
    for mu in twisters {
        for p in pool {
            for dir in [1, -1] {
                if let Some(q) = half_twist(p, mu, dir, bv) {
                    if q.interior_clearance(bv, cover.snap_tol()) >= margin {
                        push(q, &mut out);
                    }
                }
            }
        }
    }
    out
}

fn is_simple(p: &PlanarPath) -> bool {
    let w = &p.waypoints;
    for i in 0..w.len().saturating_sub(1) {
        for j in i + 2..w.len() - 1 {
            if seg_cross(w[i], w[i + 1], w[j], w[j + 1]).is_some() {
                return false;
            }
        }
    }
    true
}

/// Random bent matching paths: polylines with one or two interior
/// waypoints in the padded bounding box of the branch set, kept when
/// simple, clear of other branch values, and matching.
pub fn random_matching_paths(cover: &Cover, tries: usize, seed: u64) -> Result<Vec<PlanarPath>, TrackError> {
    let bv = &cover.branch_values;
    let margin = 0.02 * min_gap(bv);
    let (mut lo, mut hi) = (C::new(f64::INFINITY, f64::INFINITY), C::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for b in bv {
        lo = C::new(lo.re.min(b.re), lo.im.min(b.im));
        hi = C::new(hi.re.max(b.re), hi.im.max(b.im));
    }
    let pad = 0.25 * (hi - lo) + C::new(0.1, 0.1) * cover.scale();
    let (lo, hi) = (lo - pad, hi + pad);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for _ in 0..tries {
        let i = rng.gen_range(0..bv.len());
        let mut j = rng.gen_range(0..bv.len() - 1);
        if j >= i {
            j += 1;
        }
        let k = rng.gen_range(1..=2);
        let mut w = vec![bv[i]];
        for _ in 0..k {
            w.push(C::new(rng.gen_range(lo.re..hi.re), rng.gen_range(lo.im..hi.im)));
        }
        w.push(bv[j]);
        let p = PlanarPath { waypoints: w, kind: PathKind::MatchingPath };
        if !is_simple(&p) || p.interior_clearance(bv, cover.snap_tol()) < margin {
            continue;
        }
        let sig = chord_signature(cover, &p);
        if seen.contains(&sig) {
            continue;
        }
        if cover.is_matching_path(&p)? {
            seen.insert(sig);
            out.push(p);
        }
    }
    Ok(out)
}

fn shared_endpoints(cover: &Cover, p: &PlanarPath, q: &PlanarPath) -> usize {
    let tol = 1e-6 * cover.scale();
    [p.start(), p.end()].iter().map(|a| [q.start(), q.end()].iter().filter(|b| (*a - **b).norm() <= tol).count()).sum()
}

/// Intersection count capped at 2; with three sheets any crossing counts
/// at least once, so only single-crossing pairs need sphere transport.
fn capped_count(cover: &Cover, p: &PlanarPath, q: &PlanarPath) -> Result<usize, TrackError> {
    let ends = shared_endpoints(cover, p, q);
    let cross = p.crossings(q).len();
    if ends + cross >= 2 {
        return Ok(2);
    }
    if cross == 0 {
        return Ok(ends);
    }
    Ok(cover.intersection_count(p, q)?.min(2))
}

/// Searches the candidate matching paths for a `D₄` configuration,
/// preferring the fewest waypoints, then the shortest total length.
pub fn search_basis(cover: &Cover, candidates: &[PlanarPath]) -> Result<Option<MatchingBasis>, TrackError> {
    let n = candidates.len();
    let mut counts = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = capped_count(cover, &candidates[i], &candidates[j])?;
            counts[i][j] = c;
            counts[j][i] = c;
        }
    }
    let cost = |k: usize| (candidates[k].waypoints.len(), candidates[k].length());
    let mut best: Option<((usize, f64), [usize; 4])> = None;
    for centre in 0..n {
        let leaves: Vec<usize> = (0..n).filter(|&k| k != centre && counts[centre][k] == 1).collect();
        for a in 0..leaves.len() {
            for b in a + 1..leaves.len() {
                if counts[leaves[a]][leaves[b]] != 0 {
                    continue;
                }
                for c in b + 1..leaves.len() {
                    let l = [leaves[a], leaves[b], leaves[c]];
                    if counts[l[0]][l[2]] != 0 || counts[l[1]][l[2]] != 0 {
                        continue;
                    }
                    let idx = [centre, l[0], l[1], l[2]];
                    let total = idx.iter().fold((0, 0.0), |acc, &k| (acc.0 + cost(k).0, acc.1 + cost(k).1));
                    let better = best.as_ref().is_none_or(|(bc, _)| total.0 < bc.0 || (total.0 == bc.0 && total.1 < bc.1 - 1e-12));
                    if better {
                        best = Some((total, idx));
                    }
                }
            }
        }
    }
    Ok(best.map(|(_, mut order)| {
        let mid = candidates[order[0]].at(0.5);
        order[1..].sort_by(|&p, &q| {
            let ang = |k: usize| (candidates[k].at(0.5) - mid).arg();
            ang(p).partial_cmp(&ang(q)).unwrap_or(Ordering::Equal)
        });
        let paths: Vec<PlanarPath> = order.iter().map(|&k| PlanarPath { kind: PathKind::MatchingPath, ..candidates[k].clone() }).collect();
        let counts = order.iter().map(|&i| order.iter().map(|&j| counts[i][j]).collect()).collect();
        MatchingBasis { paths, counts }
    }))
}
