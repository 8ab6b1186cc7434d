//! The projective reflection law and billiard maps.
//!
//! At a boundary point `p` with tangent hyperplane `H` and frame line `L`,
//! the reflection is the linear involution that fixes `H` pointwise and
//! reverses `L`. On directions it reads
//!
//! ```text
//! v' = v - 2 (n·v)/(n·ν) ν
//! ```
//!
//! where `n` is a covector of `H` and `ν` spans `L`. With `ν = n` this is the
//! Euclidean mirror; with `ν = J n` it is the mirror of a pseudo-Euclidean
//! metric `J`.
//!
//! ```
//! use nalgebra::DVector;
//! use projbill::reflect::FramedPoint;
//!
//! // Frame through (0, 1) at p = (1/2, 0) on the x-axis.
//! let fp = FramedPoint::new(
//!     DVector::from_vec(vec![0.5, 0.0]),
//!     DVector::from_vec(vec![0.0, 1.0]),
//!     DVector::from_vec(vec![-0.5, 1.0]),
//! ).unwrap();
//! let out = fp.reflect_direction(&DVector::from_vec(vec![0.5, -0.5])).unwrap();
//! assert!(out[0].abs() < 1e-15 && out[1] > 0.0); // the vertical line x = 1/2
//! ```

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::caustics::second_intersection;
use crate::error::{Error, Result};
use crate::linalg::{self, cross3, dot, orthonormal_basis, Scalar};
use crate::projective::{classify_line_isotropy, Line, Point, Quadric, GEOM_TOL};

/// Relative threshold below which a direction counts as tangent or light-like.
pub const TRANSVERSAL_TOL: f64 = 1e-10;

/// A boundary point with its tangent hyperplane and frame direction, in
/// affine coordinates of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedPoint {
    pub point: DVector<f64>,
    /// Covector of the tangent hyperplane (unit length).
    pub normal: DVector<f64>,
    /// Direction of the frame line (unit length).
    pub frame: DVector<f64>,
}

impl FramedPoint {
    pub fn new(point: DVector<f64>, normal: DVector<f64>, frame: DVector<f64>) -> Result<Self> {
        let d = point.len();
        if normal.len() != d || frame.len() != d {
            return Err(Error::InvalidInput("framed point dimensions disagree".into()));
        }
        let (nn, nf) = (normal.norm(), frame.norm());
        if nn == 0.0 || nf == 0.0 {
            return Err(Error::Degenerate("zero normal or frame".into()));
        }
        let normal = normal / nn;
        let frame = frame / nf;
        if normal.dot(&frame).abs() <= TRANSVERSAL_TOL {
            return Err(Error::Transversality("frame line lies in the tangent hyperplane".into()));
        }
        Ok(FramedPoint { point, normal, frame })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    /// Reflected direction; lines inside the tangent hyperplane are fixed.
    pub fn reflect_direction(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.dim() {
            return Err(Error::InvalidInput("direction dimension mismatch".into()));
        }
        let c = self.normal.dot(v) / self.normal.dot(&self.frame);
        Ok(v - &self.frame * (2.0 * c))
    }

    /// Whether `v` crosses the tangent hyperplane transversally.
    pub fn is_transversal(&self, v: &DVector<f64>) -> bool {
        self.normal.dot(v).abs() > TRANSVERSAL_TOL * v.norm()
    }

    /// Azimuth of direction `w` in the pencil chart spanned by the
    /// tangent-plane direction `t` and the frame: `w = α t + β ν`, value `β/α`.
    /// The tangent has azimuth 0 and the frame azimuth ∞; reflection maps
    /// `z` to `-z`.
    pub fn azimuth(&self, t: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let m = DMatrix::from_columns(&[t.clone(), self.frame.clone()]);
        let sol = m.clone().svd(true, true).solve(w, 1e-14).unwrap_or_else(|_| DVector::zeros(2));
        sol[1] / sol[0]
    }
}

/// Frame of a projective reflection in homogeneous coordinates: a point,
/// a hyperplane through it, and a line through it transverse to the
/// hyperplane. Works over `R` and `C`.
#[derive(Debug, Clone)]
pub struct ProjectiveFrame<S: Scalar> {
    point: Point<S>,
    tangent: DVector<S>,
    frame_point: Point<S>,
}

impl<S: Scalar> ProjectiveFrame<S> {
    pub fn new(point: Point<S>, tangent: DVector<S>, frame: &Line<S>) -> Result<Self> {
        let d = point.dim();
        if tangent.len() != d + 1 || frame.dim() != d {
            return Err(Error::InvalidInput("frame dimensions disagree".into()));
        }
        let tn = linalg::unit(&tangent);
        let inc = dot(&tn, &linalg::unit(point.coords())).modulus();
        if inc > GEOM_TOL {
            return Err(Error::NotIncident { what: "point off its tangent hyperplane", residual: inc });
        }
        if !frame.contains(&point, GEOM_TOL) {
            return Err(Error::NotIncident { what: "frame line misses the point", residual: frame.incidence_residual(&point) });
        }
        let (a, b) = frame.points();
        let frame_point = if a.minor_residual(&point) >= b.minor_residual(&point) { a.clone() } else { b.clone() };
        if dot(&tn, &linalg::unit(frame_point.coords())).modulus() <= TRANSVERSAL_TOL {
            return Err(Error::Transversality("frame line lies in the tangent hyperplane".into()));
        }
        Ok(ProjectiveFrame { point, tangent: tn, frame_point })
    }

    /// Image of a point under the involution `x ↦ x - 2 (h·x)/(h·F) F`.
    pub fn apply(&self, x: &DVector<S>) -> DVector<S> {
        let f = self.frame_point.coords();
        let k = dot(&self.tangent, x) / dot(&self.tangent, f);
        x - f.map(|v| v * k * S::from_real(2.0))
    }

    /// Reflect a line through the point.
    pub fn reflect(&self, line: &Line<S>) -> Result<Line<S>> {
        if !line.contains(&self.point, GEOM_TOL) {
            return Err(Error::NotIncident { what: "line misses the reflection point", residual: line.incidence_residual(&self.point) });
        }
        let (a, b) = line.points();
        let other = if a.minor_residual(&self.point) >= b.minor_residual(&self.point) { a } else { b };
        let image = Point::new(self.apply(other.coords()))?;
        Line::through(&self.point, &image)
    }
}

/// Signature `(k, l)` of the form `Σ_{j≤k} x_j y_j - Σ_{j>k} x_j y_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub k: usize,
    pub l: usize,
}

impl Signature {
    pub fn euclidean(d: usize) -> Self {
        Signature { k: d, l: 0 }
    }

    pub fn dim(&self) -> usize {
        self.k + self.l
    }

    /// The diagonal `J`.
    pub fn diag(&self) -> DVector<f64> {
        DVector::from_fn(self.dim(), |j, _| if j < self.k { 1.0 } else { -1.0 })
    }

    pub fn form(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.component_mul(&self.diag()).dot(y)
    }

    /// `|⟨v|v⟩| < 1e-10 |v|²`.
    pub fn is_light_like(&self, v: &DVector<f64>) -> bool {
        self.form(v, v).abs() < TRANSVERSAL_TOL * v.norm_squared()
    }
}

/// Metric frame: the line through `p` orthogonal to the tangent hyperplane
/// for the metric, spanned by `J n`. Errors when the tangent hyperplane is
/// light-like.
pub fn metric_frame(normal: &DVector<f64>, sig: Signature) -> Result<DVector<f64>> {
    if normal.len() != sig.dim() {
        return Err(Error::InvalidInput("signature dimension mismatch".into()));
    }
    let nu = normal.component_mul(&sig.diag());
    if sig.is_light_like(&nu) {
        return Err(Error::Transversality("light-like tangent hyperplane".into()));
    }
    Ok(nu)
}

/// Metric mirror computed by decomposition: `v = h + c m` with `h` in the
/// span of `tangent_basis` and `m` metric-orthogonal to it, mapped to
/// `h - c m`. Used as an independent check of [`FramedPoint::reflect_direction`].
pub fn metric_mirror(v: &DVector<f64>, tangent_basis: &[DVector<f64>], sig: Signature) -> Result<DVector<f64>> {
    let d = sig.dim();
    let jdiag = sig.diag();
    let rows: Vec<_> = tangent_basis.iter().map(|t| t.component_mul(&jdiag).transpose()).collect();
    let cons = DMatrix::from_rows(&rows);
    let (m, smin, _) = linalg::null_vector(&cons);
    if smin > 1e-8 {
        return Err(Error::Degenerate("tangent basis does not span a hyperplane".into()));
    }
    let mut cols = tangent_basis.to_vec();
    cols.push(m.clone());
    let basis = DMatrix::from_columns(&cols);
    let coef = basis
        .lu()
        .solve(v)
        .ok_or_else(|| Error::Transversality("metric normal lies in the tangent hyperplane".into()))?;
    let _ = d;
    let c = coef[coef.len() - 1];
    Ok(v - &m * (2.0 * c))
}

/// A boundary hypersurface piece with a chart `u ↦ γ(u)`.
pub trait Surface: Send + Sync + fmt::Debug {
    fn ambient_dim(&self) -> usize;

    fn param_dim(&self) -> usize {
        self.ambient_dim() - 1
    }

    fn point(&self, u: &[f64]) -> DVector<f64>;

    /// Partial derivatives `∂γ/∂u_k`.
    fn tangents(&self, u: &[f64]) -> Vec<DVector<f64>>;

    /// Parameter box used to seed intersection searches.
    fn domain(&self) -> Vec<(f64, f64)>;

    /// Unit covector of the tangent hyperplane.
    fn normal(&self, u: &[f64]) -> DVector<f64> {
        let ts = self.tangents(u);
        let n = match self.ambient_dim() {
            2 => DVector::from_vec(vec![-ts[0][1], ts[0][0]]),
            3 => cross3(&ts[0], &ts[1]),
            _ => {
                let rows: Vec<_> = ts.iter().map(|t| t.transpose()).collect();
                linalg::null_vector(&DMatrix::from_rows(&rows)).0
            }
        };
        let len = n.norm();
        n / len
    }

    /// Whether a parameter lies on the physical piece (segments are bounded).
    fn admits(&self, _u: &[f64]) -> bool {
        true
    }

    /// Distance in parameter space to the piece's corners, if any.
    fn corner_distance(&self, _u: &[f64]) -> f64 {
        f64::INFINITY
    }

    /// Intersections `(t, u)` of the line `p + t v` with the surface.
    fn intersect(&self, p: &DVector<f64>, v: &DVector<f64>) -> Result<Vec<(f64, Vec<f64>)>> {
        newton_intersections(self, p, v)
    }
}

/// Generic line/surface intersection: solve `w_i · (γ(u) - p) = 0` for an
/// orthonormal complement `w_i` of `v`, by Newton's method from a grid of
/// about 64 seeds; residual `1e-12`, at most 50 iterations.
pub fn newton_intersections<S: Surface + ?Sized>(
    s: &S,
    p: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let d = s.ambient_dim();
    let k = s.param_dim();
    let vn = v.norm();
    if vn == 0.0 {
        return Err(Error::Degenerate("zero direction".into()));
    }
    let mut cands: Vec<DVector<f64>> = vec![v / vn];
    for j in 0..d {
        let mut e = DVector::zeros(d);
        e[j] = 1.0;
        cands.push(e);
    }
    let ortho = orthonormal_basis(&cands, 1e-12);
    let ws: Vec<DVector<f64>> = ortho[1..].to_vec();
    let dom = s.domain();
    let per = (64f64.powf(1.0 / k as f64)).ceil() as usize;
    let mut seeds: Vec<Vec<f64>> = vec![vec![]];
    for (lo, hi) in &dom {
        let mut next = Vec::new();
        for sd in &seeds {
            for i in 0..per {
                let mut u = sd.clone();
                u.push(lo + (hi - lo) * (i as f64 + 0.5) / per as f64);
                next.push(u);
            }
        }
        seeds = next;
    }
    let scale = 1.0 + p.norm();
    let residual = |u: &[f64]| -> DVector<f64> {
        let g = s.point(u) - p;
        DVector::from_iterator(ws.len(), ws.iter().map(|w| w.dot(&g)))
    };
    let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
    for seed in seeds {
        let mut u = seed;
        let mut converged = false;
        for _ in 0..50 {
            let r = residual(&u);
            if r.norm() <= 1e-12 * scale {
                converged = true;
                break;
            }
            let ts = s.tangents(&u);
            let jac = DMatrix::from_fn(ws.len(), k, |i, j| ws[i].dot(&ts[j]));
            let step = match jac.lu().solve(&r) {
                Some(st) => st,
                None => break,
            };
            for (ui, si) in u.iter_mut().zip(step.iter()) {
                *ui -= si;
            }
        }
        if !converged && residual(&u).norm() > 1e-12 * scale {
            continue;
        }
        let x = s.point(&u);
        let t = (x - p).dot(v) / (vn * vn);
        if !found.iter().any(|(t0, _)| (t0 - t).abs() <= 1e-9 * (1.0 + t.abs())) {
            found.push((t, u));
        }
    }
    Ok(found)
}

/// Axis-aligned ellipsoid `Σ x_j² / a_j = 1` with `a_j > 0`, in dimension 2 or 3.
///
/// Charts: `(√a cos θ, √b sin θ)` in the plane and
/// `(√a sin φ cos θ, √b sin φ sin θ, √c cos φ)` in space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub axes: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(axes: &[f64]) -> Result<Self> {
        if !(2..=3).contains(&axes.len()) {
            return Err(Error::InvalidInput("ellipsoids are supported in dimension 2 and 3".into()));
        }
        if axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidInput("ellipsoid axes must be positive".into()));
        }
        Ok(Ellipsoid { axes: axes.to_vec() })
    }

    /// Chart parameter of a point on the ellipsoid.
    pub fn locate(&self, x: &DVector<f64>) -> Vec<f64> {
        let s: Vec<f64> = self.axes.iter().map(|a| a.sqrt()).collect();
        if self.axes.len() == 2 {
            vec![(x[1] / s[1]).atan2(x[0] / s[0])]
        } else {
            let phi = (x[2] / s[2]).clamp(-1.0, 1.0).acos();
            vec![(x[1] / s[1]).atan2(x[0] / s[0]), phi]
        }
    }

    /// Gradient of `Σ x_j²/a_j - 1`, the outward covector.
    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(x.len(), |j, _| 2.0 * x[j] / self.axes[j])
    }

    /// Level value `Σ x_j²/a_j - 1`.
    pub fn level(&self, x: &DVector<f64>) -> f64 {
        x.iter().zip(&self.axes).map(|(v, a)| v * v / a).sum::<f64>() - 1.0
    }

    /// The ellipsoid as a projective quadric.
    pub fn quadric(&self) -> Quadric<f64> {
        let mut diag: Vec<f64> = self.axes.iter().map(|a| 1.0 / a).collect();
        diag.push(-1.0);
        Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(diag))).expect("valid ellipsoid")
    }
}

impl Surface for Ellipsoid {
    fn ambient_dim(&self) -> usize {
        self.axes.len()
    }

    fn point(&self, u: &[f64]) -> DVector<f64> {
        let s: Vec<f64> = self.axes.iter().map(|a| a.sqrt()).collect();
        if self.axes.len() == 2 {
            DVector::from_vec(vec![s[0] * u[0].cos(), s[1] * u[0].sin()])
        } else {
            let (th, ph) = (u[0], u[1]);
            DVector::from_vec(vec![s[0] * ph.sin() * th.cos(), s[1] * ph.sin() * th.sin(), s[2] * ph.cos()])
        }
    }

    fn tangents(&self, u: &[f64]) -> Vec<DVector<f64>> {
        let s: Vec<f64> = self.axes.iter().map(|a| a.sqrt()).collect();
        if self.axes.len() == 2 {
            vec![DVector::from_vec(vec![-s[0] * u[0].sin(), s[1] * u[0].cos()])]
        } else {
            let (th, ph) = (u[0], u[1]);
            vec![
                DVector::from_vec(vec![-s[0] * ph.sin() * th.sin(), s[1] * ph.sin() * th.cos(), 0.0]),
                DVector::from_vec(vec![s[0] * ph.cos() * th.cos(), s[1] * ph.cos() * th.sin(), -s[2] * ph.sin()]),
            ]
        }
    }

    fn domain(&self) -> Vec<(f64, f64)> {
        if self.axes.len() == 2 {
            vec![(-PI, PI)]
        } else {
            vec![(-PI, PI), (0.0, PI)]
        }
    }

    /// Outward normal from the gradient (regular at the chart poles too).
    fn normal(&self, u: &[f64]) -> DVector<f64> {
        let g = self.gradient(&self.point(u));
        let n = g.norm();
        g / n
    }

    /// Exact intersections from the quadratic `Σ (p_j + t v_j)²/a_j = 1`.
    fn intersect(&self, p: &DVector<f64>, v: &DVector<f64>) -> Result<Vec<(f64, Vec<f64>)>> {
        let qa: f64 = v.iter().zip(&self.axes).map(|(x, a)| x * x / a).sum();
        let qb: f64 = 2.0 * p.iter().zip(v.iter()).zip(&self.axes).map(|((x, y), a)| x * y / a).sum::<f64>();
        let qc = self.level(p);
        if qa == 0.0 {
            return Err(Error::Degenerate("zero direction".into()));
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Ok(Vec::new());
        }
        let sq = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * sq);
        let mut ts = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / qa, qc / q] };
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(ts.into_iter().map(|t| (t, self.locate(&(p + v * t)))).collect())
    }
}

/// A straight edge from `from` to `to` in the plane, parameter `t` with
/// `γ(t) = from + t (to - from)`. Bounded edges only admit `t ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: DVector<f64>,
    pub to: DVector<f64>,
    pub bounded: bool,
}

impl Edge {
    pub fn new(from: DVector<f64>, to: DVector<f64>, bounded: bool) -> Result<Self> {
        if from.len() != 2 || to.len() != 2 {
            return Err(Error::InvalidInput("edges live in the plane".into()));
        }
        if (&to - &from).norm() == 0.0 {
            return Err(Error::Degenerate("edge endpoints coincide".into()));
        }
        Ok(Edge { from, to, bounded })
    }
}

impl Surface for Edge {
    fn ambient_dim(&self) -> usize {
        2
    }

    fn point(&self, u: &[f64]) -> DVector<f64> {
        &self.from + (&self.to - &self.from) * u[0]
    }

    fn tangents(&self, _u: &[f64]) -> Vec<DVector<f64>> {
        vec![&self.to - &self.from]
    }

    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0)]
    }

    fn admits(&self, u: &[f64]) -> bool {
        !self.bounded || (-1e-12..=1.0 + 1e-12).contains(&u[0])
    }

    fn corner_distance(&self, u: &[f64]) -> f64 {
        if self.bounded {
            u[0].abs().min((1.0 - u[0]).abs())
        } else {
            f64::INFINITY
        }
    }

    fn intersect(&self, p: &DVector<f64>, v: &DVector<f64>) -> Result<Vec<(f64, Vec<f64>)>> {
        let e = &self.to - &self.from;
        let det = v[0] * (-e[1]) - v[1] * (-e[0]);
        if det.abs() <= 1e-14 * v.norm() * e.norm() {
            return Ok(Vec::new());
        }
        let r = &self.from - p;
        // p + t v = from + s e  =>  t v - s e = from - p.
        let t = (r[0] * (-e[1]) - r[1] * (-e[0])) / det;
        let s = (v[0] * r[1] - v[1] * r[0]) / det;
        Ok(vec![(t, vec![s])])
    }
}

/// Closed planar curve given by closures, intersected by the generic
/// Newton search.
#[derive(Clone)]
pub struct ParametricCurve {
    pub gamma: Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>,
    pub dgamma: Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>,
    pub range: (f64, f64),
}

impl fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParametricCurve({:?})", self.range)
    }
}

impl Surface for ParametricCurve {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn point(&self, u: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(&(self.gamma)(u[0]))
    }
    fn tangents(&self, u: &[f64]) -> Vec<DVector<f64>> {
        vec![DVector::from_row_slice(&(self.dgamma)(u[0]))]
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![self.range]
    }
}

/// How the frame line is chosen at each boundary point.
#[derive(Clone)]
pub enum FrameRule {
    /// Euclidean normal line.
    Euclidean,
    /// Normal line of a pseudo-Euclidean metric.
    Pseudo(Signature),
    /// Line through a fixed point.
    Central(DVector<f64>),
    /// Line through the pole of the tangent hyperplane with respect to a quadric.
    Quadric(Quadric<f64>),
    /// Arbitrary direction field.
    Field(Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>),
}

impl fmt::Debug for FrameRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameRule::Euclidean => write!(f, "Euclidean"),
            FrameRule::Pseudo(s) => write!(f, "Pseudo({}, {})", s.k, s.l),
            FrameRule::Central(o) => write!(f, "Central({:?})", o.as_slice()),
            FrameRule::Quadric(q) => write!(f, "Quadric({:?})", q.matrix()),
            FrameRule::Field(_) => write!(f, "Field"),
        }
    }
}

impl FrameRule {
    /// Frame direction at `x` with unit tangent covector `n`.
    pub fn direction(&self, x: &DVector<f64>, n: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            FrameRule::Euclidean => Ok(n.clone()),
            FrameRule::Pseudo(sig) => metric_frame(n, *sig),
            FrameRule::Central(o) => {
                if o.len() != x.len() {
                    return Err(Error::InvalidInput("frame center dimension mismatch".into()));
                }
                let w = o - x;
                if w.norm() <= GEOM_TOL * (1.0 + x.norm()) {
                    return Err(Error::Degenerate("frame center lies on the boundary point".into()));
                }
                Ok(w)
            }
            FrameRule::Quadric(q2) => quadric_frame_direction(q2, x, n),
            FrameRule::Field(f) => Ok(f(x)),
        }
    }
}

/// Frame direction at `x` given by the pole of the tangent hyperplane
/// `{y : n·(y - x) = 0}` with respect to `q2`.
pub fn quadric_frame_direction(q2: &Quadric<f64>, x: &DVector<f64>, n: &DVector<f64>) -> Result<DVector<f64>> {
    let d = x.len();
    if q2.dim() != d {
        return Err(Error::InvalidInput("frame quadric dimension mismatch".into()));
    }
    let mut h = n.clone().insert_row(d, 0.0);
    h[d] = -n.dot(x);
    let u = q2.pole(&h)?;
    let uc = u.coords();
    let w = DVector::from_fn(d, |j, _| uc[j] - uc[d] * x[j]);
    if w.norm() <= GEOM_TOL * uc.norm() * (1.0 + x.norm()) {
        return Err(Error::Degenerate("pole lies at the boundary point: frame undefined".into()));
    }
    Ok(w)
}

/// A boundary piece together with its frame rule.
#[derive(Debug, Clone)]
pub struct FramedBoundary {
    pub surface: Arc<dyn Surface>,
    pub frame: FrameRule,
}

impl FramedBoundary {
    pub fn new(surface: Arc<dyn Surface>, frame: FrameRule) -> Self {
        FramedBoundary { surface, frame }
    }

    /// Framed point at chart parameter `u`.
    pub fn framed_point(&self, u: &[f64]) -> Result<FramedPoint> {
        let x = self.surface.point(u);
        let n = self.surface.normal(u);
        let nu = self.frame.direction(&x, &n)?;
        FramedPoint::new(x, n, nu)
    }
}

/// Ellipsoid with metric frame for signature `sig` (Euclidean when `l = 0`).
pub fn metric_boundary(axes: &[f64], sig: Signature) -> Result<FramedBoundary> {
    let e = Ellipsoid::new(axes)?;
    if sig.dim() != axes.len() {
        return Err(Error::InvalidInput("signature dimension mismatch".into()));
    }
    let rule = if sig.l == 0 { FrameRule::Euclidean } else { FrameRule::Pseudo(sig) };
    Ok(FramedBoundary::new(Arc::new(e), rule))
}

/// Boundary `Q1` (an axis-aligned ellipsoid) framed by polarity in `Q2`:
/// the frame at `p` joins `p` to the pole of `T_p Q1` with respect to `Q2`.
pub fn quadric_frame(q1_axes: &[f64], q2: Quadric<f64>) -> Result<FramedBoundary> {
    let e = Ellipsoid::new(q1_axes)?;
    if q2.dim() != q1_axes.len() {
        return Err(Error::InvalidInput("quadric dimensions disagree".into()));
    }
    if q2.is_degenerate() {
        return Err(Error::Singular("frame quadric is degenerate".into()));
    }
    Ok(FramedBoundary::new(Arc::new(e), FrameRule::Quadric(q2)))
}

/// Edges of the planar projection of a spherical triangle with right
/// angles, each framed by the line through the opposite vertex.
///
/// The projection is central from the sphere's center onto a plane; it
/// sends great circles to lines and the spherical normals of an edge to
/// the lines through the pole of that edge, which is the opposite vertex.
pub fn sphere_projection_frame(vertices: [[f64; 2]; 3]) -> Result<Vec<FramedBoundary>> {
    let p: Vec<DVector<f64>> = vertices.iter().map(|v| DVector::from_row_slice(v)).collect();
    let area = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
    if area.abs() <= GEOM_TOL {
        return Err(Error::Degenerate("triangle vertices are collinear".into()));
    }
    (0..3)
        .map(|j| {
            let edge = Edge::new(p[j].clone(), p[(j + 1) % 3].clone(), false)?;
            Ok(FramedBoundary::new(Arc::new(edge), FrameRule::Central(p[(j + 2) % 3].clone())))
        })
        .collect()
}

/// Normal line direction, at `q` on the plane `z = -1`, to the direction `e`
/// for the metric obtained by pushing the round sphere forward along central
/// projection (an independent check of [`sphere_projection_frame`]).
pub fn sphere_pushforward_normal(q: [f64; 2], e: [f64; 2]) -> DVector<f64> {
    // ψ(x, y) = (x, y, -1) / |(x, y, -1)| up to sign; metric g = dψᵀ dψ.
    let r = (q[0] * q[0] + q[1] * q[1] + 1.0).sqrt();
    let x = DVector::from_vec(vec![q[0], q[1], -1.0]);
    let dpsi = |w: [f64; 2]| {
        let dw = DVector::from_vec(vec![w[0], w[1], 0.0]);
        let radial = x.dot(&dw) / (r * r * r);
        &dw / r - &x * radial
    };
    let gx = dpsi([1.0, 0.0]);
    let gy = dpsi([0.0, 1.0]);
    let g = nalgebra::Matrix2::new(gx.dot(&gx), gx.dot(&gy), gy.dot(&gx), gy.dot(&gy));
    // m is g-orthogonal to e: (g e) · m = 0.
    let ge = g * nalgebra::Vector2::new(e[0], e[1]);
    DVector::from_vec(vec![-ge[1], ge[0]])
}

/// Order in which boundary pieces are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitOrder {
    /// Next transversal intersection along the oriented line, over all pieces.
    FirstHit,
    /// Piece `j + 1 (mod k)` after piece `j`, on its full chart.
    Cyclic,
}

/// A point on a specific boundary piece.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub boundary: usize,
    pub param: Vec<f64>,
    pub point: DVector<f64>,
}

/// A collection of framed boundary pieces.
#[derive(Debug, Clone)]
pub struct Billiard {
    pub boundaries: Vec<FramedBoundary>,
    pub order: HitOrder,
}

impl Billiard {
    pub fn new(boundaries: Vec<FramedBoundary>, order: HitOrder) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::InvalidInput("a billiard needs at least one boundary".into()));
        }
        let d = boundaries[0].surface.ambient_dim();
        if boundaries.iter().any(|b| b.surface.ambient_dim() != d) {
            return Err(Error::InvalidInput("boundary pieces differ in dimension".into()));
        }
        Ok(Billiard { boundaries, order })
    }

    pub fn single(boundary: FramedBoundary) -> Self {
        Billiard { boundaries: vec![boundary], order: HitOrder::FirstHit }
    }

    pub fn dim(&self) -> usize {
        self.boundaries[0].surface.ambient_dim()
    }

    pub fn point_at(&self, boundary: usize, param: &[f64]) -> Result<BoundaryPoint> {
        let b = self
            .boundaries
            .get(boundary)
            .ok_or_else(|| Error::InvalidInput(format!("no boundary {boundary}")))?;
        if param.len() != b.surface.param_dim() {
            return Err(Error::InvalidInput("parameter dimension mismatch".into()));
        }
        Ok(BoundaryPoint { boundary, param: param.to_vec(), point: b.surface.point(param) })
    }

    pub fn framed_point(&self, p: &BoundaryPoint) -> Result<FramedPoint> {
        self.boundaries[p.boundary].framed_point(&p.param)
    }

    /// Next intersection of the ray `from + t dir`, `t > 0`, following the
    /// hit order from the piece `current`.
    pub fn next_hit(&self, current: usize, from: &DVector<f64>, dir: &DVector<f64>, step: usize) -> Result<BoundaryPoint> {
        let eps = 1e-9 * (1.0 + from.norm()) / dir.norm();
        let candidates: Vec<usize> = match self.order {
            HitOrder::FirstHit => (0..self.boundaries.len()).collect(),
            HitOrder::Cyclic => vec![(current + 1) % self.boundaries.len()],
        };
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for j in candidates {
            let s = &self.boundaries[j].surface;
            for (t, u) in s.intersect(from, dir)? {
                let forward = match self.order {
                    HitOrder::FirstHit => t > eps,
                    HitOrder::Cyclic => t.abs() > eps || j != current,
                };
                if !forward || !s.admits(&u) {
                    continue;
                }
                let better = match (&best, self.order) {
                    (None, _) => true,
                    (Some((tb, _, _)), HitOrder::FirstHit) => t < *tb,
                    (Some((tb, _, _)), HitOrder::Cyclic) => t.abs() < tb.abs(),
                };
                if better {
                    best = Some((t, j, u));
                }
            }
        }
        let (_, j, u) = best.ok_or_else(|| Error::NoIntersection(format!("ray leaves the table at step {step}")))?;
        if self.boundaries[j].surface.corner_distance(&u) <= 1e-9 {
            return Err(Error::Corner { step });
        }
        let point = self.boundaries[j].surface.point(&u);
        Ok(BoundaryPoint { boundary: j, param: u, point })
    }

    /// Billiard map `(p1, p2) ↦ (p2, p3)`: reflect the line `p1 p2` at `p2`
    /// and follow it to the next boundary point `p3`.
    pub fn billiard_map(&self, p1: &BoundaryPoint, p2: &BoundaryPoint) -> Result<BoundaryPoint> {
        self.step(p1, p2, 0)
    }

    fn step(&self, p1: &BoundaryPoint, p2: &BoundaryPoint, step: usize) -> Result<BoundaryPoint> {
        let v = &p2.point - &p1.point;
        if v.norm() <= GEOM_TOL * (1.0 + p2.point.norm()) {
            return Err(Error::Degenerate(format!("consecutive points coincide at step {step}")));
        }
        let fp = self.framed_point(p2)?;
        if !fp.is_transversal(&v) {
            return Err(Error::Transversality(format!("incoming line tangent at step {step}")));
        }
        let w = fp.reflect_direction(&v)?;
        self.next_hit(p2.boundary, &p2.point, &w, step)
    }

    /// Iterate the billiard map `steps` times from `(p1, p2)`.
    ///
    /// The orbit is flagged periodic with the least `k` for which the phase
    /// point `(p_{k+1}, p_{k+2})` returns to `(p_1, p_2)` within `tol`.
    pub fn iterate_orbit(&self, p1: BoundaryPoint, p2: BoundaryPoint, steps: usize, tol: f64) -> Result<Orbit> {
        let mut pts = vec![p1, p2];
        let mut period = None;
        let mut closure_residual = f64::INFINITY;
        for k in 0..steps {
            let n = pts.len();
            let next = self.step(&pts[n - 2], &pts[n - 1], k + 1)?;
            pts.push(next);
            let n = pts.len();
            if period.is_none() {
                let r = (&pts[n - 2].point - &pts[0].point).norm().max((&pts[n - 1].point - &pts[1].point).norm());
                let same_piece = pts[n - 2].boundary == pts[0].boundary && pts[n - 1].boundary == pts[1].boundary;
                if same_piece && r <= tol * (1.0 + pts[0].point.norm()) {
                    period = Some(n - 2);
                    closure_residual = r;
                }
            }
        }
        if period.is_none() && pts.len() >= 4 {
            let n = pts.len();
            closure_residual = (&pts[n - 2].point - &pts[0].point).norm().max((&pts[n - 1].point - &pts[1].point).norm());
        }
        Ok(Orbit { points: pts, period, closure_residual })
    }

    /// Iterate until the orbit closes, erroring after `max_steps`.
    pub fn find_period(&self, p1: BoundaryPoint, p2: BoundaryPoint, max_steps: usize, tol: f64) -> Result<Orbit> {
        let orbit = self.iterate_orbit(p1, p2, max_steps, tol)?;
        if orbit.period.is_none() {
            return Err(Error::StepBudget(max_steps));
        }
        Ok(orbit)
    }

    /// Jacobian of the map on chart parameters
    /// `(u(p1), u(p2)) ↦ (u(p2), u(p3))` by central differences.
    pub fn jacobian(&self, p1: &BoundaryPoint, p2: &BoundaryPoint, h: f64) -> Result<DMatrix<f64>> {
        let k1 = p1.param.len();
        let k2 = p2.param.len();
        let eval = |u1: &[f64], u2: &[f64]| -> Result<DVector<f64>> {
            let a = self.point_at(p1.boundary, u1)?;
            let b = self.point_at(p2.boundary, u2)?;
            let c = self.billiard_map(&a, &b)?;
            let mut out = u2.to_vec();
            out.extend_from_slice(&c.param);
            Ok(DVector::from_vec(out))
        };
        let base = eval(&p1.param, &p2.param)?;
        let mut jac = DMatrix::zeros(base.len(), k1 + k2);
        for col in 0..(k1 + k2) {
            let mut plus = (p1.param.clone(), p2.param.clone());
            let mut minus = plus.clone();
            if col < k1 {
                plus.0[col] += h;
                minus.0[col] -= h;
            } else {
                plus.1[col - k1] += h;
                minus.1[col - k1] -= h;
            }
            let fp = eval(&plus.0, &plus.1)?;
            let fm = eval(&minus.0, &minus.1)?;
            let mut diff = fp - fm;
            // Angular charts wrap around at ±π.
            for v in diff.iter_mut() {
                if v.abs() > PI {
                    *v -= (*v / TAU).round() * TAU;
                }
            }
            jac.set_column(col, &(diff / (2.0 * h)));
        }
        Ok(jac)
    }
}

/// A billiard trajectory.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// `p_1, p_2, ..., p_{steps+2}`.
    pub points: Vec<BoundaryPoint>,
    /// Least period, if the phase point returned.
    pub period: Option<usize>,
    /// Phase-space distance at the detected period, or after the last step.
    pub closure_residual: f64,
}

impl Orbit {
    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    /// Per-vertex azimuths of the incoming and outgoing lines and the
    /// harmonicity residual `|z_in + z_out|`, for interior vertices.
    pub fn vertex_records(&self, billiard: &Billiard) -> Result<Vec<VertexRecord>> {
        let mut out = Vec::new();
        for j in 1..self.points.len().saturating_sub(1) {
            let fp = billiard.framed_point(&self.points[j])?;
            let vin = &self.points[j].point - &self.points[j - 1].point;
            let vout = &self.points[j + 1].point - &self.points[j].point;
            // Tangent-plane component of the incoming direction within the
            // plane of the frame and the line.
            let c = fp.normal.dot(&vin) / fp.normal.dot(&fp.frame);
            let t = &vin - &fp.frame * c;
            let (zi, zo) = if t.norm() <= TRANSVERSAL_TOL * vin.norm() {
                (f64::INFINITY, f64::INFINITY)
            } else {
                let tu = t.normalize();
                (fp.azimuth(&tu, &vin), fp.azimuth(&tu, &vout))
            };
            let residual = if zi.is_finite() { (zi + zo).abs() / (1.0 + zi.abs()) } else { 0.0 };
            out.push(VertexRecord { step: j, point: self.points[j].point.clone(), azimuth_in: zi, azimuth_out: zo, residual });
        }
        Ok(out)
    }
}

/// Per-vertex trace of an orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexRecord {
    pub step: usize,
    pub point: DVector<f64>,
    pub azimuth_in: f64,
    pub azimuth_out: f64,
    pub residual: f64,
}

/// Outcome of reflecting a complex line.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexReflection {
    Line(DVector<Complex64>),
    /// Reflection about an isotropic tangent of the tangent itself: every
    /// line through the point qualifies.
    Pencil,
}

/// Reflection of the complex line `l` through `p` about the tangent line `t`
/// for the form `q = dx² + dy²`: `v ↦ 2 q(v, τ)/q(τ) τ - v` for a
/// non-isotropic tangent direction `τ`. For an isotropic tangent the result
/// is the tangent itself (or the whole pencil when `l = t`).
pub fn complex_reflect(t: &DVector<Complex64>, p: &DVector<Complex64>, l: &DVector<Complex64>) -> Result<ComplexReflection> {
    if t.len() != 3 || p.len() != 3 || l.len() != 3 {
        return Err(Error::InvalidInput("complex reflection works in the plane".into()));
    }
    let (tn, pn, ln) = (linalg::unit(t), linalg::unit(p), linalg::unit(l));
    if tn[0].norm() + tn[1].norm() <= GEOM_TOL {
        return Err(Error::InvalidInput("reflection about the line at infinity is undefined".into()));
    }
    if dot(&tn, &pn).norm() > GEOM_TOL {
        return Err(Error::NotIncident { what: "point off the tangent line", residual: dot(&tn, &pn).norm() });
    }
    if dot(&ln, &pn).norm() > GEOM_TOL {
        return Err(Error::NotIncident { what: "line misses the point", residual: dot(&ln, &pn).norm() });
    }
    let same = linalg::proj_distance(&tn, &ln) <= GEOM_TOL;
    if classify_line_isotropy(&tn, 1e-12)?.is_isotropic() {
        return Ok(if same { ComplexReflection::Pencil } else { ComplexReflection::Line(linalg::normalize_max(&tn).unwrap()) });
    }
    let tau = [tn[1], -tn[0]];
    let v = [ln[1], -ln[0]];
    let qt = tau[0] * tau[0] + tau[1] * tau[1];
    let k = (v[0] * tau[0] + v[1] * tau[1]) * 2.0 / qt;
    let w = DVector::from_vec(vec![tau[0] * k - v[0], tau[1] * k - v[1], Complex64::new(0.0, 0.0)]);
    let out = cross3(&pn, &w);
    if out.norm() <= GEOM_TOL {
        return Err(Error::Degenerate("reflected direction points at p".into()));
    }
    Ok(ComplexReflection::Line(linalg::normalize_max(&out).unwrap()))
}

/// One step of the complex billiard in the conic `x²/a + y²/b = 1`:
/// reflect the line `p1 p2` about the tangent at `p2` and return the second
/// intersection with the conic. Points are homogeneous complex 3-vectors.
pub fn complex_conic_step(a: f64, b: f64, p1: &DVector<Complex64>, p2: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let c = Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / a, 1.0 / b, -1.0])))?.complexify();
    let tangent = c.matrix() * p2;
    let line = cross3(p1, p2);
    match complex_reflect(&tangent, p2, &line)? {
        ComplexReflection::Line(l) => second_intersection(&c, &l, &linalg::unit(p2)),
        ComplexReflection::Pencil => Err(Error::Isotropic("orbit runs along an isotropic tangent".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn minkowski_mirror_example() {
        let sig = Signature { k: 1, l: 1 };
        let n = v(&[0.0, 1.0]);
        let nu = metric_frame(&n, sig).unwrap();
        let fp = FramedPoint::new(v(&[0.0, 0.0]), n, nu).unwrap();
        let out = fp.reflect_direction(&v(&[2.0, 1.0])).unwrap();
        assert!((out - v(&[2.0, -1.0])).norm() < 1e-15);
    }

    #[test]
    fn light_like_tangent_rejected() {
        let sig = Signature { k: 1, l: 1 };
        assert!(matches!(metric_frame(&v(&[1.0, -1.0]), sig), Err(Error::Transversality(_))));
    }

    #[test]
    fn tangent_lines_are_fixed() {
        let fp = FramedPoint::new(v(&[0.0, 0.0]), v(&[0.0, 1.0]), v(&[0.3, 1.0])).unwrap();
        let t = v(&[1.0, 0.0]);
        assert_eq!(fp.reflect_direction(&t).unwrap(), t);
    }

    #[test]
    fn frame_in_tangent_rejected() {
        assert!(matches!(FramedPoint::new(v(&[0.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 0.0])), Err(Error::Transversality(_))));
    }

    #[test]
    fn quadric_frame_of_concentric_circles() {
        let q2 = Quadric::new(DMatrix::from_diagonal(&v(&[1.0, 1.0, -4.0]))).unwrap();
        let w = quadric_frame_direction(&q2, &v(&[1.0, 0.0]), &v(&[1.0, 0.0])).unwrap();
        // The pole of x = 1 is (4, 0): the frame is the x-axis.
        assert!(w[1].abs() < 1e-14 && w[0] > 0.0);
    }

    #[test]
    fn right_spherical_fixture() {
        let edges = sphere_projection_frame([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let bil = Billiard::new(edges, HitOrder::Cyclic).unwrap();
        // p1 = (0, 1/2) on edge P3P1 (index 2), p2 = (1/2, 0) on edge P1P2 (index 0).
        let p1 = bil.point_at(2, &[0.5]).unwrap();
        let p2 = bil.point_at(0, &[0.5]).unwrap();
        let p3 = bil.billiard_map(&p1, &p2).unwrap();
        assert!((p3.point.clone() - v(&[0.5, 0.5])).norm() < 1e-14);
        let orbit = bil.iterate_orbit(p1, p2, 6, 1e-9).unwrap();
        assert_eq!(orbit.period, Some(3));
    }

    #[test]
    fn ellipse_reflection_is_euclidean_mirror() {
        let b = metric_boundary(&[2.0, 1.0], Signature::euclidean(2)).unwrap();
        let fp = b.framed_point(&[0.7]).unwrap();
        let vin = v(&[0.3, -1.0]);
        let out = fp.reflect_direction(&vin).unwrap();
        assert!((out.norm() - vin.norm()).abs() < 1e-14);
        assert!((out.dot(&fp.normal) + vin.dot(&fp.normal)).abs() < 1e-14);
    }

    #[test]
    fn complex_reflection_rejects_line_at_infinity() {
        let c = |x: f64, y: f64, z: f64| DVector::from_vec(vec![Complex64::new(x, 0.0), Complex64::new(y, 0.0), Complex64::new(z, 0.0)]);
        let r = complex_reflect(&c(0.0, 0.0, 1.0), &c(1.0, 0.0, 0.0), &c(0.0, 1.0, 0.0));
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn isotropic_tangent_behaviour() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        // T: i x - y = 0 through the origin, isotropic (contains I).
        let t = DVector::from_vec(vec![i, -one, zero]);
        let p = DVector::from_vec(vec![zero, zero, one]);
        let l = DVector::from_vec(vec![one, zero, zero]);
        match complex_reflect(&t, &p, &l).unwrap() {
            ComplexReflection::Line(out) => assert!(linalg::proj_distance(&out, &t) < 1e-14),
            ComplexReflection::Pencil => panic!("expected the tangent"),
        }
        assert_eq!(complex_reflect(&t, &p, &t).unwrap(), ComplexReflection::Pencil);
    }
}
