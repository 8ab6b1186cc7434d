//! Homogeneous points and lines, cross-ratios, harmonic quadruples,
//! quadrics with their polarity, pencils, and isotropy tests.
//!
//! Points of `P^d` are stored as `d + 1` homogeneous coordinates scaled so
//! that the largest-modulus coordinate equals one. Two points are equal when
//! every 2x2 minor of the pair vanishes to the geometric tolerance.
//!
//! ```
//! use projbill::projective::{cross_ratio, CrossRatio, Point};
//!
//! let p = |x: f64| Point::from_affine(&[x, 0.0]);
//! let cr = cross_ratio(&p(0.0), &p(2.0), &p(1.0), &p(4.0), 1e-10).unwrap();
//! assert!(matches!(cr, CrossRatio::Finite(v) if (v + 0.5).abs() < 1e-14));
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, cross3, dot, homogeneous_quadratic_roots, kernel_pair3, normalize_max,
    orthonormal_basis, span_residual, Scalar,
};

/// Default tolerance for projective equality and incidence.
pub const GEOM_TOL: f64 = 1e-10;

/// A point of projective space, `d + 1` homogeneous coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S: Scalar> {
    coords: DVector<S>,
}

impl<S: Scalar> Point<S> {
    /// Build from homogeneous coordinates; the zero vector is rejected.
    pub fn new(coords: DVector<S>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidInput("a projective point needs at least 2 coordinates".into()));
        }
        let coords = normalize_max(&coords)
            .ok_or_else(|| Error::Degenerate("zero vector is not a projective point".into()))?;
        Ok(Point { coords })
    }

    pub fn from_slice(coords: &[S]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Affine point `(x_1, ..., x_d)` as `(x_1 : ... : x_d : 1)`.
    pub fn from_affine(x: &[S]) -> Self {
        let mut v = x.to_vec();
        v.push(S::one());
        Self::new(DVector::from_vec(v)).expect("affine points are never zero")
    }

    pub fn coords(&self) -> &DVector<S> {
        &self.coords
    }

    /// Dimension `d` of the ambient projective space.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Affine coordinates, or `None` for a point at infinity.
    pub fn affine(&self) -> Option<DVector<S>> {
        let d = self.dim();
        let w = self.coords[d];
        if w.modulus() < GEOM_TOL {
            return None;
        }
        Some(self.coords.rows(0, d).map(|x| x / w))
    }

    /// Largest 2x2 minor of the pair; zero iff the points coincide.
    pub fn minor_residual(&self, other: &Self) -> f64 {
        let (a, b) = (&self.coords, &other.coords);
        let mut worst: f64 = 0.0;
        for i in 0..a.len() {
            for j in (i + 1)..a.len() {
                worst = worst.max((a[i] * b[j] - a[j] * b[i]).modulus());
            }
        }
        worst
    }

    pub fn proj_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.minor_residual(other) <= tol
    }
}

/// A line of `P^d`, stored as the span of two distinct points.
#[derive(Debug, Clone)]
pub struct Line<S: Scalar> {
    a: Point<S>,
    b: Point<S>,
}

impl<S: Scalar> Line<S> {
    pub fn through(a: &Point<S>, b: &Point<S>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::InvalidInput("points live in different dimensions".into()));
        }
        if a.proj_eq(b, GEOM_TOL) {
            return Err(Error::Degenerate("a line needs two distinct points".into()));
        }
        Ok(Line { a: a.clone(), b: b.clone() })
    }

    /// Planar line from its covector `(α, β, γ)`: the set `αx + βy + γz = 0`.
    pub fn from_covector(c: &DVector<S>) -> Result<Self> {
        if c.len() != 3 {
            return Err(Error::InvalidInput("covectors describe lines only in the plane".into()));
        }
        if linalg::max_modulus(c) == 0.0 {
            return Err(Error::Degenerate("zero covector".into()));
        }
        let (p, q) = kernel_pair3(c);
        Line::through(&Point::new(p)?, &Point::new(q)?)
    }

    pub fn points(&self) -> (&Point<S>, &Point<S>) {
        (&self.a, &self.b)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Covector of a planar line, normalized by its largest coordinate.
    pub fn covector(&self) -> Result<DVector<S>> {
        if self.dim() != 2 {
            return Err(Error::InvalidInput("covector requested for a non-planar line".into()));
        }
        let c = cross3(self.a.coords(), self.b.coords());
        normalize_max(&c).ok_or_else(|| Error::Degenerate("line points coincide".into()))
    }

    /// Relative distance of `p` from the line (0 iff incident).
    pub fn incidence_residual(&self, p: &Point<S>) -> f64 {
        let basis = orthonormal_basis(&[self.a.coords.clone(), self.b.coords.clone()], 1e-14);
        span_residual(&basis, p.coords())
    }

    pub fn contains(&self, p: &Point<S>, tol: f64) -> bool {
        self.incidence_residual(p) <= tol
    }

    pub fn proj_eq(&self, other: &Self, tol: f64) -> bool {
        self.contains(&other.a, tol) && self.contains(&other.b, tol)
    }

    /// Homogeneous pair `(s : t)` of `p` in the basis of this line.
    fn line_coords(&self, p: &Point<S>) -> (S, S) {
        let basis = orthonormal_basis(&[self.a.coords.clone(), self.b.coords.clone()], 1e-14);
        let s = linalg::hdot(&basis[0], p.coords());
        let t = linalg::hdot(&basis[1], p.coords());
        (s, t)
    }
}

/// Intersection of two planar lines given by covectors.
pub fn meet<S: Scalar>(l1: &DVector<S>, l2: &DVector<S>) -> Result<Point<S>> {
    Point::new(cross3(l1, l2)).map_err(|_| Error::Degenerate("lines coincide".into()))
}

/// Value of a cross-ratio; `Infinite` when the defining Möbius map sends
/// the fourth point to infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossRatio<S: Scalar> {
    Finite(S),
    Infinite,
}

/// Cross-ratio `h(p4)` of four collinear points, where `h` is the Möbius map
/// with `h(p1) = ∞`, `h(p2) = 0`, `h(p3) = 1`.
///
/// Errors when the points are not collinear or `p1`, `p2`, `p3` are not
/// pairwise distinct.
pub fn cross_ratio<S: Scalar>(
    p1: &Point<S>,
    p2: &Point<S>,
    p3: &Point<S>,
    p4: &Point<S>,
    tol: f64,
) -> Result<CrossRatio<S>> {
    let pts = [p1, p2, p3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if pts[i].proj_eq(pts[j], tol) {
                return Err(Error::Degenerate(format!("points {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    let line = Line::through(p1, p2)?;
    let residual = line.incidence_residual(p3).max(line.incidence_residual(p4));
    if residual > tol {
        return Err(Error::NotCollinear { residual });
    }
    let z: Vec<Azimuth<S>> = [p1, p2, p3, p4]
        .iter()
        .map(|p| {
            let (s, t) = line.line_coords(p);
            Azimuth::new(s, t)
        })
        .collect::<Result<_>>()?;
    Ok(azimuth_cross_ratio(&z[0], &z[1], &z[2], &z[3]))
}

/// Cross-ratio of four azimuths with the same convention as [`cross_ratio`].
pub fn azimuth_cross_ratio<S: Scalar>(
    z1: &Azimuth<S>,
    z2: &Azimuth<S>,
    z3: &Azimuth<S>,
    z4: &Azimuth<S>,
) -> CrossRatio<S> {
    let br = |p: &Azimuth<S>, q: &Azimuth<S>| p.u * q.v - q.u * p.v;
    let num = br(z4, z2) * br(z3, z1);
    let den = br(z4, z1) * br(z3, z2);
    if den.modulus() <= 1e-300 || den.modulus() < 1e-15 * num.modulus() {
        CrossRatio::Infinite
    } else {
        CrossRatio::Finite(num / den)
    }
}

/// A point of the projective line, stored as a homogeneous pair `(u : v)`;
/// the finite value is `u / v` and `(1 : 0)` is infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Azimuth<S: Scalar> {
    u: S,
    v: S,
}

impl<S: Scalar> Azimuth<S> {
    pub fn new(u: S, v: S) -> Result<Self> {
        let m = u.modulus().max(v.modulus());
        if m == 0.0 || !m.is_finite() {
            return Err(Error::Degenerate("zero homogeneous pair".into()));
        }
        let pivot = if u.modulus() >= v.modulus() { u } else { v };
        Ok(Azimuth { u: u / pivot, v: v / pivot })
    }

    pub fn finite(z: S) -> Self {
        Self::new(z, S::one()).expect("finite azimuth")
    }

    pub fn infinity() -> Self {
        Azimuth { u: S::one(), v: S::zero() }
    }

    pub fn pair(&self) -> (S, S) {
        (self.u, self.v)
    }

    /// Finite value, or `None` at infinity.
    pub fn value(&self) -> Option<S> {
        if self.v.modulus() < 1e-15 * self.u.modulus() {
            None
        } else {
            Some(self.u / self.v)
        }
    }

    pub fn residual(&self, other: &Self) -> f64 {
        (self.u * other.v - other.u * self.v).modulus()
    }

    pub fn proj_eq(&self, other: &Self, tol: f64) -> bool {
        self.residual(other) <= tol
    }

    /// Image under the Möbius map with matrix `[[m00, m01], [m10, m11]]`.
    pub fn mobius(&self, m: [[S; 2]; 2]) -> Result<Self> {
        Self::new(m[0][0] * self.u + m[0][1] * self.v, m[1][0] * self.u + m[1][1] * self.v)
    }
}

/// Matrix of the projective involution fixing `z3` and `z4`.
///
/// In an affine chart this is `h(z) = ((z3+z4) z - 2 z3 z4) / (2z - (z3+z4))`;
/// the homogeneous form stays valid when either fixed point is at infinity.
pub fn involution_matrix<S: Scalar>(z3: &Azimuth<S>, z4: &Azimuth<S>) -> Result<[[S; 2]; 2]> {
    if z3.proj_eq(z4, GEOM_TOL) {
        return Err(Error::Degenerate("fixed points of the involution coincide".into()));
    }
    let (u3, v3) = z3.pair();
    let (u4, v4) = z4.pair();
    let two = S::from_real(2.0);
    let s = u3 * v4 + u4 * v3;
    Ok([[s, -(two * u3 * u4)], [two * v3 * v4, -s]])
}

/// Harmonic conjugate of `z` with respect to `z3, z4`.
///
/// ```
/// use projbill::projective::{harmonic_conjugate_azimuth, Azimuth};
/// let h = harmonic_conjugate_azimuth(&Azimuth::finite(2.0), &Azimuth::finite(0.0),
///                                    &Azimuth::infinity()).unwrap();
/// assert_eq!(h.value(), Some(-2.0));
/// ```
pub fn harmonic_conjugate_azimuth<S: Scalar>(
    z: &Azimuth<S>,
    z3: &Azimuth<S>,
    z4: &Azimuth<S>,
) -> Result<Azimuth<S>> {
    z.mobius(involution_matrix(z3, z4)?)
}

/// Whether four concurrent planar lines (covectors) form a harmonic quadruple.
///
/// The test is `h(z1) = z2` for the involution `h` fixing `z3` and `z4`, which
/// is equivalent to cross-ratio `-1` and is invariant under the swaps
/// `1 <-> 2`, `3 <-> 4` and `(1,2) <-> (3,4)`. When `ℓ1 = ℓ2` the quadruple is
/// harmonic iff that line equals `ℓ3` or `ℓ4`.
pub fn is_harmonic<S: Scalar>(lines: [&DVector<S>; 4], tol: f64) -> Result<bool> {
    let az = pencil_azimuths(lines, tol)?;
    if az[2].proj_eq(&az[3], tol) {
        return Err(Error::Degenerate("lines 3 and 4 coincide".into()));
    }
    if az[0].proj_eq(&az[1], tol) {
        return Ok(az[0].proj_eq(&az[2], tol) || az[0].proj_eq(&az[3], tol));
    }
    let image = harmonic_conjugate_azimuth(&az[0], &az[2], &az[3])?;
    Ok(image.proj_eq(&az[1], tol))
}

/// Azimuths of four concurrent planar lines in a common chart of their pencil.
pub fn pencil_azimuths<S: Scalar>(lines: [&DVector<S>; 4], tol: f64) -> Result<[Azimuth<S>; 4]> {
    for l in lines {
        if l.len() != 3 {
            return Err(Error::InvalidInput("expected planar covectors".into()));
        }
    }
    let normed: Vec<DVector<S>> = lines
        .iter()
        .map(|l| linalg::unit(l))
        .collect();
    // Common point: any two distinct lines meet there.
    let mut center = None;
    'outer: for i in 0..4 {
        for j in (i + 1)..4 {
            let c = cross3(&normed[i], &normed[j]);
            if c.norm() > tol {
                center = Some(linalg::unit(&c));
                break 'outer;
            }
        }
    }
    let center = center.ok_or_else(|| Error::Degenerate("all four lines coincide".into()))?;
    let residual = normed.iter().map(|l| dot(l, &center).modulus()).fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::NotConcurrent { residual });
    }
    // A reference line missing the center: its covector is conj(center).
    let reference = center.map(|x| x.conjugate());
    let (e1, e2) = {
        let (a, b) = kernel_pair3(&reference);
        let basis = orthonormal_basis(&[a, b], 1e-14);
        (basis[0].clone(), basis[1].clone())
    };
    let mut out = Vec::with_capacity(4);
    for l in &normed {
        let q = cross3(l, &reference);
        out.push(Azimuth::new(linalg::hdot(&e1, &q), linalg::hdot(&e2, &q))?);
    }
    Ok([out[0], out[1], out[2], out[3]])
}

/// Quadric hypersurface `x^T Q x = 0`, with `Q` symmetric (not Hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct Quadric<S: Scalar> {
    m: DMatrix<S>,
}

impl<S: Scalar> Quadric<S> {
    pub fn new(m: DMatrix<S>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(Error::InvalidInput("quadric matrix must be square".into()));
        }
        let scale = m.iter().map(|x| x.modulus()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::Degenerate("zero quadric".into()));
        }
        let asym = (&m - m.transpose()).iter().map(|x| x.modulus()).fold(0.0, f64::max);
        if asym > 1e-12 * scale {
            return Err(Error::InvalidInput("quadric matrix must be symmetric".into()));
        }
        let sym = (&m + m.transpose()).map(|x| x.unscale(2.0 * scale));
        Ok(Quadric { m: sym })
    }

    pub fn matrix(&self) -> &DMatrix<S> {
        &self.m
    }

    /// Dimension `d` of the ambient projective space.
    pub fn dim(&self) -> usize {
        self.m.nrows() - 1
    }

    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&self.m, 1e-12)
    }

    pub fn is_degenerate(&self) -> bool {
        self.rank() < self.m.nrows()
    }

    /// `p^T Q p` for unit-normalized `p`.
    pub fn eval(&self, p: &Point<S>) -> S {
        let u = linalg::unit(p.coords());
        dot(&u, &(&self.m * &u))
    }

    pub fn contains(&self, p: &Point<S>, tol: f64) -> bool {
        self.eval(p).modulus() <= tol
    }

    /// Polar hyperplane of `p` as a covector `Q p`.
    pub fn polar(&self, p: &Point<S>) -> Result<DVector<S>> {
        if p.dim() != self.dim() {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let h = &self.m * p.coords();
        normalize_max(&h).ok_or_else(|| {
            Error::Degenerate("point lies in the kernel of a degenerate quadric".into())
        })
    }

    /// Pole of the hyperplane with covector `h`: the point `Q^{-1} h`.
    pub fn pole(&self, h: &DVector<S>) -> Result<Point<S>> {
        if h.len() != self.m.nrows() {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let inv = self.inverse()?;
        Point::new(inv * h)
    }

    fn inverse(&self) -> Result<DMatrix<S>> {
        if self.is_degenerate() {
            return Err(Error::Singular("polarity of a degenerate quadric".into()));
        }
        self.m.clone().try_inverse().ok_or_else(|| Error::Singular("quadric matrix".into()))
    }

    /// Dual quadric, represented by `Q^{-1}` up to scale.
    pub fn dual(&self) -> Result<Quadric<S>> {
        Quadric::new(self.inverse()?)
    }

    /// Lift to complex coordinates.
    pub fn complexify(&self) -> Quadric<Complex64> {
        Quadric {
            m: DMatrix::from_iterator(
                self.m.nrows(),
                self.m.ncols(),
                self.m.iter().map(|x| Complex64::new(x.real(), x.imaginary())),
            ),
        }
    }
}

/// Which combination a pencil takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilMode {
    /// `λ Q1 + μ Q2`.
    Direct,
    /// Dual pencil `(λ Q1* + μ Q2*)*`; confocal families are of this kind.
    Dual,
}

/// Member `(λ, μ)` of the pencil spanned by two quadrics.
pub fn pencil_member<S: Scalar>(
    q1: &Quadric<S>,
    q2: &Quadric<S>,
    lambda: S,
    mu: S,
    mode: PencilMode,
) -> Result<Quadric<S>> {
    if q1.dim() != q2.dim() {
        return Err(Error::InvalidInput("pencil members differ in dimension".into()));
    }
    if lambda.modulus() == 0.0 && mu.modulus() == 0.0 {
        return Err(Error::Degenerate("(λ, μ) = (0, 0)".into()));
    }
    match mode {
        PencilMode::Direct => Quadric::new(q1.m.map(|x| x * lambda) + q2.m.map(|x| x * mu)),
        PencilMode::Dual => {
            let d1 = q1.dual()?;
            let d2 = q2.dual()?;
            let combo = Quadric::new(d1.m.map(|x| x * lambda) + d2.m.map(|x| x * mu))?;
            combo.dual()
        }
    }
}

/// Conic `x²/(a-λ) + y²/(b-λ) = 1` of the confocal family of `x²/a + y²/b = 1`.
pub fn confocal_conic(a: f64, b: f64, lambda: f64) -> Result<Quadric<f64>> {
    let (p, q) = (a - lambda, b - lambda);
    if p == 0.0 || q == 0.0 {
        return Err(Error::Degenerate("λ equals a or b: the member degenerates".into()));
    }
    Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / p, 1.0 / q, -1.0])))
}

/// Circular points `I = (1 : i : 0)` and `J = (1 : -i : 0)`.
pub fn circular_points() -> (DVector<Complex64>, DVector<Complex64>) {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    (
        DVector::from_vec(vec![one, i, zero]),
        DVector::from_vec(vec![one, -i, zero]),
    )
}

/// Which circular points a line passes through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineIsotropy {
    pub through_i: bool,
    pub through_j: bool,
}

impl LineIsotropy {
    pub fn is_isotropic(&self) -> bool {
        self.through_i || self.through_j
    }
}

/// Classify a planar complex line (covector) by incidence with `I` and `J`.
/// The line at infinity contains both.
pub fn classify_line_isotropy(l: &DVector<Complex64>, tol: f64) -> Result<LineIsotropy> {
    if l.len() != 3 {
        return Err(Error::InvalidInput("expected a planar covector".into()));
    }
    let u = normalize_max(l).ok_or_else(|| Error::Degenerate("zero covector".into()))?;
    let (i, j) = circular_points();
    Ok(LineIsotropy {
        through_i: dot(&u, &i).norm() <= tol,
        through_j: dot(&u, &j).norm() <= tol,
    })
}

/// Metric predicates of a planar conic.
#[derive(Debug, Clone)]
pub struct ConicPredicates {
    /// The conic passes through both circular points.
    pub is_circle: bool,
    /// Pairwise intersections of the isotropic tangents through `I` with
    /// those through `J` (up to four points, complex in general).
    pub foci: Vec<Point<Complex64>>,
    /// The affine real points among `foci`, sorted lexicographically.
    pub real_foci: Vec<[f64; 2]>,
}

/// Circle test and complex foci of a non-degenerate conic.
///
/// ```
/// use nalgebra::{DMatrix, DVector};
/// use projbill::projective::{conic_predicates, Quadric};
/// let diag = DVector::from_vec(vec![0.5, 1.0, -1.0]);
/// let ellipse = Quadric::new(DMatrix::from_diagonal(&diag)).unwrap();
/// let p = conic_predicates(&ellipse.complexify(), 1e-10).unwrap();
/// assert!(!p.is_circle);
/// assert_eq!(p.real_foci.len(), 2);
/// assert!((p.real_foci[1][0] - 1.0).abs() < 1e-12);
/// ```
pub fn conic_predicates(c: &Quadric<Complex64>, tol: f64) -> Result<ConicPredicates> {
    if c.dim() != 2 {
        return Err(Error::InvalidInput("conic predicates need a planar conic".into()));
    }
    let dual = c.dual()?;
    let (i, j) = circular_points();
    let on_i = dot(&i, &(c.matrix() * &i)).norm() <= tol;
    let on_j = dot(&j, &(c.matrix() * &j)).norm() <= tol;

    let tangents_through = |pt: &DVector<Complex64>| -> Result<Vec<DVector<Complex64>>> {
        let (la, lb) = kernel_pair3(pt);
        let qd = dual.matrix();
        let aa = dot(&la, &(qd * &la));
        let ab = dot(&la, &(qd * &lb)) * 2.0;
        let bb = dot(&lb, &(qd * &lb));
        let roots = homogeneous_quadratic_roots(aa, ab, bb)
            .ok_or_else(|| Error::Degenerate("every line through the point is tangent".into()))?;
        Ok(roots.iter().map(|(s, t)| la.map(|x| x * *s) + lb.map(|x| x * *t)).collect())
    };
    let ti = tangents_through(&i)?;
    let tj = tangents_through(&j)?;
    let mut foci = Vec::new();
    for a in &ti {
        for b in &tj {
            if let Ok(p) = Point::new(cross3(a, b)) {
                foci.push(p);
            }
        }
    }
    let mut real_foci: Vec<[f64; 2]> = Vec::new();
    for f in &foci {
        if let Some(x) = f.affine() {
            if x.iter().all(|z| z.im.abs() <= 1e-9 * (1.0 + z.re.abs())) {
                let cand = [x[0].re, x[1].re];
                if !real_foci
                    .iter()
                    .any(|r| (r[0] - cand[0]).abs() + (r[1] - cand[1]).abs() <= 1e-9)
                {
                    real_foci.push(cand);
                }
            }
        }
    }
    real_foci.sort_by(|p, q| p.partial_cmp(q).unwrap());
    Ok(ConicPredicates { is_circle: on_i && on_j, foci, real_foci })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_ratio_example() {
        let p = |x: f64| Point::from_affine(&[x]);
        let cr = cross_ratio(&p(0.0), &p(2.0), &p(1.0), &p(4.0), 1e-10).unwrap();
        match cr {
            CrossRatio::Finite(v) => assert!((v + 0.5).abs() < 1e-14),
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn cross_ratio_rejects_non_collinear() {
        let p = Point::from_affine(&[0.0, 0.0]);
        let q = Point::from_affine(&[1.0, 0.0]);
        let r = Point::from_affine(&[2.0, 0.0]);
        let s = Point::from_affine(&[0.0, 1.0]);
        assert!(matches!(cross_ratio(&p, &q, &r, &s, 1e-10), Err(Error::NotCollinear { .. })));
    }

    #[test]
    fn cross_ratio_rejects_coincident() {
        let p = Point::from_affine(&[0.0, 0.0]);
        let q = Point::from_affine(&[1.0, 0.0]);
        assert!(matches!(cross_ratio(&p, &q, &p, &q, 1e-10), Err(Error::Degenerate(_))));
    }

    #[test]
    fn azimuth_reflection_example() {
        let h = harmonic_conjugate_azimuth(&Azimuth::finite(2.0), &Azimuth::finite(0.0), &Azimuth::infinity())
            .unwrap();
        assert_eq!(h.value(), Some(-2.0));
    }

    #[test]
    fn involution_rejects_equal_fixed_points() {
        let z = Azimuth::finite(1.0);
        assert!(harmonic_conjugate_azimuth(&Azimuth::finite(0.0), &z, &z).is_err());
    }

    #[test]
    fn harmonic_degenerate_pair() {
        // ℓ1 = ℓ2 = ℓ3 is harmonic; ℓ1 = ℓ2 distinct from both ℓ3, ℓ4 is not.
        let l = |a: f64, b: f64| DVector::from_vec(vec![a, b, 0.0]);
        assert!(is_harmonic([&l(1.0, 0.0), &l(1.0, 0.0), &l(1.0, 0.0), &l(0.0, 1.0)], 1e-10).unwrap());
        assert!(!is_harmonic([&l(1.0, 1.0), &l(1.0, 1.0), &l(1.0, 0.0), &l(0.0, 1.0)], 1e-10).unwrap());
    }

    #[test]
    fn harmonic_requires_concurrency() {
        let l1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let l2 = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let l3 = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let l4 = DVector::from_vec(vec![1.0, -1.0, 1.0]);
        assert!(matches!(is_harmonic([&l1, &l2, &l3, &l4], 1e-10), Err(Error::NotConcurrent { .. })));
    }

    #[test]
    fn polarity_of_unit_circle() {
        let c = Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0]))).unwrap();
        let p = Point::from_affine(&[2.0, 0.0]);
        let h = c.polar(&p).unwrap();
        // Polar of (2, 0) is x = 1/2.
        let expected = Point::from_slice(&[2.0, 0.0, -1.0]).unwrap();
        assert!(Point::new(h.clone()).unwrap().proj_eq(&expected, 1e-12));
        assert!(c.pole(&h).unwrap().proj_eq(&p, 1e-12));
    }

    #[test]
    fn dual_of_hyperbola_form() {
        let (a, b) = (2.0, -3.0);
        let q = Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / a, 1.0 / b, -1.0]))).unwrap();
        let d = q.dual().unwrap();
        let expected = Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![a, b, -1.0]))).unwrap();
        assert!((d.matrix() - expected.matrix()).norm() < 1e-14 || (d.matrix() + expected.matrix()).norm() < 1e-14);
    }

    #[test]
    fn degenerate_quadric_has_no_dual() {
        let q = Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]))).unwrap();
        assert!(q.is_degenerate());
        assert!(matches!(q.dual(), Err(Error::Singular(_))));
    }

    #[test]
    fn isotropy_classification() {
        let c = |a: Complex64, b: Complex64, g: Complex64| DVector::from_vec(vec![a, b, g]);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let at_inf = classify_line_isotropy(&c(zero, zero, one), 1e-12).unwrap();
        assert!(at_inf.through_i && at_inf.through_j);
        // α + iβ = 0: the line y = i x passes through I... check (i, -1, 0)·(1, i, 0) = 0.
        let li = classify_line_isotropy(&c(i, -one, one), 1e-12).unwrap();
        assert!(li.through_i && !li.through_j);
        let real = classify_line_isotropy(&c(one, one, one), 1e-12).unwrap();
        assert!(!real.is_isotropic());
    }

    #[test]
    fn circle_foci_collapse_to_center() {
        let c = Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0]))).unwrap();
        let p = conic_predicates(&c.complexify(), 1e-10).unwrap();
        assert!(p.is_circle);
        assert_eq!(p.real_foci.len(), 1);
        assert!(p.real_foci[0][0].abs() < 1e-9 && p.real_foci[0][1].abs() < 1e-9);
    }

    #[test]
    fn line_from_covector_roundtrip() {
        let c = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let l = Line::from_covector(&c).unwrap();
        let back = l.covector().unwrap();
        assert!(Point::new(back).unwrap().proj_eq(&Point::new(c).unwrap(), 1e-14));
    }
}
