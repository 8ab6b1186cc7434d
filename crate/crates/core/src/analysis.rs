//! Numerical verifiers for properties of billiard orbits: the locus of
//! circumcenters of 3-periodic orbits, Birkhoff's distributions (classical
//! and projective), hyperplanes permitted by a direction at a boundary point,
//! and the Jacobi–Chasles tangency invariants.

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::caustics::{poncelet_steps, three_caustics_closed_form, ConfocalFamily};
use crate::error::{Error, Result};
use crate::linalg::{self, proj_distance};
use crate::polyref::{PolygonBilliard, VirtualOrbit};
use crate::projective::Quadric;
use crate::reflect::{metric_boundary, Billiard, BoundaryPoint, Ellipsoid, Signature, Surface};

/// A 3-periodic orbit of the billiard in `x²/a + y²/b = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct TriangularOrbit {
    pub vertices: [[f64; 2]; 3],
    /// Distance between the start and the fourth Poncelet point.
    pub closure: f64,
}

/// Caustic parameter of the 3-periodic orbits: the root of the closed form
/// in `(0, min(a, b))`, or `3a/4` for a circle.
pub fn triangular_caustic(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidInput("ellipse axes must be positive".into()));
    }
    if a == b {
        return Ok(0.75 * a);
    }
    let [lp, lm] = three_caustics_closed_form(a, b)?;
    let m = a.min(b);
    [lm, lp]
        .into_iter()
        .find(|l| *l > 0.0 && *l < m)
        .ok_or_else(|| Error::Convergence("no caustic parameter inside the ellipse".into()))
}

/// `count` triangular orbits started at equispaced eccentric angles `2πi/count`.
pub fn triangular_orbit_family(a: f64, b: f64, count: usize) -> Result<Vec<TriangularOrbit>> {
    let lambda = triangular_caustic(a, b)?;
    let c = Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / a, 1.0 / b, -1.0])))?.complexify();
    let d_dual =
        Quadric::new(DMatrix::from_diagonal(&DVector::from_vec(vec![a - lambda, b - lambda, -1.0])))?.complexify();
    (0..count)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / count as f64;
            let x0 = DVector::from_vec(vec![a.sqrt() * t.cos(), b.sqrt() * t.sin(), 1.0]);
            let pts = poncelet_steps(&c, &d_dual, &linalg::complexify(&x0), 3)?;
            let closure = proj_distance(&pts[3], &pts[0]);
            if closure >= 1e-9 {
                return Err(Error::Convergence(format!("triangular orbit {i} fails to close (gap {closure:.3e})")));
            }
            let mut vertices = [[0.0; 2]; 3];
            for (v, p) in vertices.iter_mut().zip(&pts) {
                *v = real_affine(p)?;
            }
            Ok(TriangularOrbit { vertices, closure })
        })
        .collect()
}

fn real_affine(p: &DVector<Complex64>) -> Result<[f64; 2]> {
    let w = p[2];
    if w.norm() <= 1e-14 * p.norm() {
        return Err(Error::Degenerate("orbit vertex at infinity".into()));
    }
    let x = p[0] / w;
    let y = p[1] / w;
    if x.im.abs().max(y.im.abs()) > 1e-9 * (1.0 + x.norm() + y.norm()) {
        return Err(Error::Invariant("real orbit left the real plane".into()));
    }
    Ok([x.re, y.re])
}

/// Center of the circle through three non-collinear points.
pub fn circumcenter(p1: [f64; 2], p2: [f64; 2], p3: [f64; 2]) -> Result<[f64; 2]> {
    let (bx, by) = (p2[0] - p1[0], p2[1] - p1[1]);
    let (cx, cy) = (p3[0] - p1[0], p3[1] - p1[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
    if d.abs() <= 1e-12 * scale || scale == 0.0 {
        return Err(Error::Degenerate("collinear points have no circumcenter".into()));
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Ok([p1[0] + ux, p1[1] + uy])
}

/// Type of a fitted conic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConicClass {
    Ellipse,
    Hyperbola,
    Parabola,
    Degenerate,
}

/// Least-squares conic `A x² + B xy + C y² + D x + E y + F = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ConicFit {
    /// `[A, B, C, D, E, F]`, unit norm, in the original coordinates.
    pub coefficients: [f64; 6],
    /// Root-mean-square algebraic residual in normalized coordinates.
    pub residual: f64,
    pub class: ConicClass,
    /// `|B|` relative to the quadratic part.
    pub cross_term: f64,
}

/// Fit a conic through `points`.
///
/// Points are centered and scaled to unit RMS radius, then the unit
/// coefficient vector minimizing the algebraic residual is the smallest
/// right singular vector of the design matrix. Fails when the points do
/// not determine a unique conic.
pub fn fit_conic(points: &[[f64; 2]]) -> Result<ConicFit> {
    if points.len() < 5 {
        return Err(Error::InvalidInput("a conic fit needs at least 5 points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let rms = (points.iter().map(|p| (p[0] - mx).powi(2) + (p[1] - my).powi(2)).sum::<f64>() / n).sqrt();
    if rms <= 1e-12 * (1.0 + mx.abs() + my.abs()) {
        return Err(Error::Degenerate("points reduce to a single location".into()));
    }
    let rows: Vec<[f64; 6]> = points
        .iter()
        .map(|p| {
            let (x, y) = ((p[0] - mx) / rms, (p[1] - my) / rms);
            [x * x, x * y, y * y, x, y, 1.0]
        })
        .collect();
    let design = DMatrix::from_fn(rows.len(), 6, |i, j| rows[i][j]);
    let (v, s_min, s_next) = linalg::null_vector(&design);
    let sv = linalg::singular_values(&design);
    let top = sv[0];
    if s_next <= 1e-6 * top {
        return Err(Error::Degenerate("conic fit is rank deficient: the points lie on several conics".into()));
    }
    let residual = s_min / n.sqrt();
    // Back to original coordinates: substitute x = (X - mx)/s, y = (Y - my)/s.
    let (a, b, c, d, e, f) = (v[0], v[1], v[2], v[3], v[4], v[5]);
    let s = rms;
    let (a2, b2, c2) = (a / (s * s), b / (s * s), c / (s * s));
    let (d2, e2) = (d / s, e / s);
    let coef = [
        a2,
        b2,
        c2,
        -2.0 * a2 * mx - b2 * my + d2,
        -2.0 * c2 * my - b2 * mx + e2,
        a2 * mx * mx + b2 * mx * my + c2 * my * my - d2 * mx - e2 * my + f,
    ];
    let norm = coef.iter().map(|x| x * x).sum::<f64>().sqrt();
    let coefficients = coef.map(|x| x / norm);
    let class = classify_conic(&[a, b, c, d, e, f]);
    let cross_term = b.abs() / (a * a + c * c).sqrt().max(f64::MIN_POSITIVE);
    Ok(ConicFit { coefficients, residual, class, cross_term })
}

fn classify_conic(k: &[f64; 6]) -> ConicClass {
    let [a, b, c, d, e, f] = *k;
    let m = DMatrix::from_row_slice(3, 3, &[a, b / 2.0, d / 2.0, b / 2.0, c, e / 2.0, d / 2.0, e / 2.0, f]);
    if linalg::numerical_rank(&m, 1e-9) < 3 {
        return ConicClass::Degenerate;
    }
    let disc = b * b - 4.0 * a * c;
    let scale = a * a + b * b + c * c;
    if disc.abs() <= 1e-12 * scale {
        ConicClass::Parabola
    } else if disc < 0.0 {
        // An ellipse needs real points: F' = f - center terms must have the opposite sign of a.
        let det3 = m.determinant();
        if det3 * (a + c) < 0.0 {
            ConicClass::Ellipse
        } else {
            ConicClass::Degenerate
        }
    } else {
        ConicClass::Hyperbola
    }
}

/// Circumcenters of a family of triangular orbits and their conic fit.
#[derive(Debug, Clone, Serialize)]
pub struct LocusReport {
    pub a: f64,
    pub b: f64,
    pub caustic: f64,
    pub points: Vec<[f64; 2]>,
    pub fit: ConicFit,
    /// Hausdorff distance between the points and their mirror in the x-axis.
    pub mirror_distance: f64,
    pub max_closure: f64,
}

/// Fit the circumcenter locus of `count` triangular orbits.
///
/// For a circle every circumcenter is the center, so the fit fails with
/// [`Error::Degenerate`].
pub fn circumcenter_locus(a: f64, b: f64, count: usize) -> Result<LocusReport> {
    let orbits = triangular_orbit_family(a, b, count)?;
    let points = orbits
        .iter()
        .map(|o| circumcenter(o.vertices[0], o.vertices[1], o.vertices[2]))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_conic(&points)?;
    let mirrored: Vec<[f64; 2]> = points.iter().map(|p| [p[0], -p[1]]).collect();
    Ok(LocusReport {
        a,
        b,
        caustic: triangular_caustic(a, b)?,
        mirror_distance: hausdorff(&points, &mirrored),
        max_closure: orbits.iter().map(|o| o.closure).fold(0.0, f64::max),
        points,
        fit,
    })
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(p: &[[f64; 2]], q: &[[f64; 2]]) -> f64 {
    let one_way = |x: &[[f64; 2]], y: &[[f64; 2]]| {
        x.iter()
            .map(|a| y.iter().map(|b| (a[0] - b[0]).hypot(a[1] - b[1])).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(p, q).max(one_way(q, p))
}

/// Which Birkhoff distribution a [`BisectorData`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BirkhoffKind {
    /// Hyperplanes orthogonal to the interior angle bisectors.
    Classical,
    /// Lines harmonic to the frame lines with respect to the two sides.
    Projective,
}

/// Birkhoff's candidate tangent hyperplanes at the vertices of a polygon.
///
/// Every hyperplane is stored as a unit homogeneous covector `(h, h₀)` of
/// `{x : h·x + h₀ = 0}` (classical) or `{x : h·x = 0}` in the projective plane.
#[derive(Debug, Clone, Serialize)]
pub struct BisectorData {
    pub kind: BirkhoffKind,
    pub vertices: Vec<DVector<f64>>,
    /// Bisector directions (classical) or frame line covectors (projective).
    pub lines: Vec<DVector<f64>>,
    pub hyperplanes: Vec<DVector<f64>>,
}

impl BisectorData {
    /// Distance between hyperplane `j` and a given covector (0 iff equal).
    pub fn defect(&self, j: usize, covector: &DVector<f64>) -> f64 {
        proj_distance(&self.hyperplanes[j], covector)
    }
}

/// Hyperplanes `H_j` through `p_j` orthogonal to the interior bisector of
/// the angle `p_{j-1} p_j p_{j+1}` (indices cyclic).
pub fn classical_bisector_hyperplanes(points: &[DVector<f64>]) -> Result<BisectorData> {
    let k = points.len();
    if k < 2 {
        return Err(Error::InvalidInput("a polygon needs at least two vertices".into()));
    }
    let mut lines = Vec::with_capacity(k);
    let mut hyperplanes = Vec::with_capacity(k);
    for j in 0..k {
        let p = &points[j];
        let u = &points[(j + k - 1) % k] - p;
        let w = &points[(j + 1) % k] - p;
        if u.norm() == 0.0 || w.norm() == 0.0 {
            return Err(Error::Degenerate(format!("repeated vertex at {j}")));
        }
        let (u, w) = (u.normalize(), w.normalize());
        if proj_distance(&u, &w) <= 1e-10 {
            return Err(Error::Degenerate(format!("collinear triple at vertex {j}")));
        }
        let l = (u + w).normalize();
        let mut h = l.clone().insert_row(l.len(), 0.0);
        h[l.len()] = -l.dot(p);
        hyperplanes.push(h.normalize());
        lines.push(l);
    }
    Ok(BisectorData { kind: BirkhoffKind::Classical, vertices: points.to_vec(), lines, hyperplanes })
}

/// Lines `T_j` through `p_j` such that the sides `p_{j-1}p_j`, `p_jp_{j+1}`
/// separate the frame line `p_j f_j` and `T_j` harmonically. Points are
/// homogeneous 3-vectors of the projective plane.
pub fn projective_birkhoff_lines(points: &[DVector<f64>], frame_points: &[DVector<f64>]) -> Result<BisectorData> {
    let k = points.len();
    if k < 3 || frame_points.len() != k {
        return Err(Error::InvalidInput("need k ≥ 3 vertices and one frame point each".into()));
    }
    if points.iter().chain(frame_points).any(|p| p.len() != 3) {
        return Err(Error::InvalidInput("points must be homogeneous 3-vectors".into()));
    }
    let mut lines = Vec::with_capacity(k);
    let mut hyperplanes = Vec::with_capacity(k);
    for j in 0..k {
        let p = &points[j];
        let s1 = linalg::cross3(&points[(j + k - 1) % k], p);
        let s2 = linalg::cross3(p, &points[(j + 1) % k]);
        let l = linalg::cross3(p, &frame_points[j]);
        for (name, v) in [("side", &s1), ("side", &s2), ("frame line", &l)] {
            if v.norm() <= 1e-12 * p.norm() {
                return Err(Error::Degenerate(format!("{name} undefined at vertex {j}")));
            }
        }
        let (s1, s2, l) = (s1.normalize(), s2.normalize(), l.normalize());
        if proj_distance(&s1, &s2) <= 1e-10 {
            return Err(Error::Degenerate(format!("collinear triple at vertex {j}")));
        }
        // l = α s1 + β s2 within the pencil through p.
        let m = DMatrix::from_columns(&[s1.clone(), s2.clone()]);
        let coef = m.clone().svd(true, true).solve(&l, 1e-14).map_err(|e| Error::Singular(e.into()))?;
        let fit = (&m * &coef - &l).norm();
        if fit > 1e-8 {
            return Err(Error::NotIncident { what: "frame line misses its vertex", residual: fit });
        }
        let (alpha, beta) = (coef[0], coef[1]);
        if alpha.abs().min(beta.abs()) <= 1e-10 * alpha.abs().max(beta.abs()) {
            return Err(Error::Degenerate(format!("frame line coincides with a side at vertex {j}")));
        }
        hyperplanes.push((&s1 * alpha - &s2 * beta).normalize());
        lines.push(l);
    }
    Ok(BisectorData { kind: BirkhoffKind::Projective, vertices: points.to_vec(), lines, hyperplanes })
}

/// Containment defects `T_j ⊂ edge line` for the first `period` points of
/// a closed polygon-billiard orbit.
pub fn polygon_orbit_defects(b: &PolygonBilliard, orbit: &VirtualOrbit) -> Result<Vec<f64>> {
    let k = orbit.period.ok_or_else(|| Error::InvalidInput("the orbit is not closed".into()))?;
    let to_d = |v: &Vector3<f64>| DVector::from_column_slice(v.as_slice());
    let pts: Vec<_> = orbit.points[..k].iter().map(to_d).collect();
    let frames: Vec<_> = (0..k).map(|j| to_d(&b.frame_point(j))).collect();
    let data = projective_birkhoff_lines(&pts, &frames)?;
    Ok((0..k).map(|j| data.defect(j, &to_d(&b.edge_line(j)))).collect())
}

/// Homogeneous covector of the tangent hyperplane of `Σ x_j²/a_j = 1` at `x`.
pub fn ellipsoid_tangent_covector(axes: &[f64], x: &DVector<f64>) -> DVector<f64> {
    let g = DVector::from_fn(x.len(), |j, _| x[j] / axes[j]);
    let mut h = g.clone().insert_row(x.len(), 0.0);
    h[x.len()] = -g.dot(x);
    h.normalize()
}

/// Second-order data of a framed hypersurface at a point `B`: an orthonormal
/// eigenbasis `u_i` of the shape operator with curvatures `k_i`, the unit
/// normal `n`, a frame vector `ν` with `n·ν = 1`, and its derivatives `dν·u_i`.
#[derive(Debug, Clone, Serialize)]
pub struct SecondOrderData {
    pub base: DVector<f64>,
    pub normal: DVector<f64>,
    pub basis: Vec<DVector<f64>>,
    pub curvatures: Vec<f64>,
    pub frame: DVector<f64>,
    pub frame_derivatives: Vec<DVector<f64>>,
}

impl SecondOrderData {
    /// Data at `x` on the ellipsoid `Σ x_j²/a_j = 1` (outward normal) framed
    /// by the normal lines of the metric of signature `sig`.
    pub fn ellipsoid(axes: &[f64], x: &DVector<f64>, sig: Signature) -> Result<Self> {
        let d = axes.len();
        if x.len() != d || sig.dim() != d {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let level = x.iter().zip(axes).map(|(v, a)| v * v / a).sum::<f64>() - 1.0;
        if level.abs() > 1e-9 {
            return Err(Error::NotIncident { what: "base point off the ellipsoid", residual: level.abs() });
        }
        let g = DVector::from_fn(d, |j, _| 2.0 * x[j] / axes[j]);
        let gn = g.norm();
        let n = &g / gn;
        let hess = DMatrix::from_diagonal(&DVector::from_fn(d, |j, _| 2.0 / axes[j]));
        // Tangent basis: orthonormal complement of n.
        let mut cands = vec![n.clone()];
        cands.extend((0..d).map(|j| DVector::from_fn(d, |i, _| if i == j { 1.0 } else { 0.0 })));
        let ortho = linalg::orthonormal_basis(&cands, 1e-8);
        let t: Vec<DVector<f64>> = ortho[1..d].to_vec();
        let shape = DMatrix::from_fn(d - 1, d - 1, |i, j| t[i].dot(&(&hess * &t[j])) / gn);
        let eig = shape.symmetric_eigen();
        let mut order: Vec<usize> = (0..d - 1).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
        let mut basis = Vec::with_capacity(d - 1);
        let mut curvatures = Vec::with_capacity(d - 1);
        for &i in &order {
            let c = eig.eigenvectors.column(i);
            let u = t.iter().enumerate().fold(DVector::zeros(d), |acc, (m, tm)| acc + tm * c[m]);
            basis.push(u.normalize());
            curvatures.push(eig.eigenvalues[i]);
        }
        let jd = sig.diag();
        let jn = n.component_mul(&jd);
        let s = n.dot(&jn);
        if s.abs() <= 1e-10 {
            return Err(Error::LightLike { step: 0 });
        }
        let frame = &jn / s;
        let frame_derivatives = basis
            .iter()
            .zip(&curvatures)
            .map(|(u, k)| {
                let dn = u * *k;
                let jdn = dn.component_mul(&jd);
                &jdn / s - &jn * (2.0 * n.dot(&jdn) / (s * s))
            })
            .collect();
        Ok(SecondOrderData { base: x.clone(), normal: n, basis, curvatures, frame, frame_derivatives })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// The same data with the opposite orientation of the normal.
    pub fn flipped(&self) -> Self {
        SecondOrderData {
            base: self.base.clone(),
            normal: -&self.normal,
            basis: self.basis.clone(),
            curvatures: self.curvatures.iter().map(|k| -k).collect(),
            frame: -&self.frame,
            frame_derivatives: self.frame_derivatives.iter().map(|v| -v).collect(),
        }
    }

    /// Ambient vector with coordinates `c` in the basis `u_i`.
    pub fn ambient(&self, c: &DVector<f64>) -> DVector<f64> {
        self.basis.iter().enumerate().fold(DVector::zeros(self.dim()), |acc, (i, u)| acc + u * c[i])
    }

    /// Coordinates of a tangent vector in the basis `u_i`.
    pub fn coords(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.basis.len(), |i, _| self.basis[i].dot(v))
    }

    /// Matrix with rows `N_i = dν·u_i + k_i (u_i·ν) ν` in the basis `u_j`.
    pub fn m_matrix(&self) -> DMatrix<f64> {
        let m = self.basis.len();
        let rows: Vec<DVector<f64>> = (0..m)
            .map(|i| &self.frame_derivatives[i] + &self.frame * (self.curvatures[i] * self.basis[i].dot(&self.frame)))
            .collect();
        DMatrix::from_fn(m, m, |i, j| rows[i].dot(&self.basis[j]))
    }
}

/// Solutions of `Mη + (ξ·η) V_ξ = αη` with `ξ·η ≠ 0`.
#[derive(Debug, Clone, Serialize)]
pub struct PermittedReport {
    pub base: DVector<f64>,
    /// `ξ` in the basis `u_i` (unit), after any perturbation.
    pub xi: DVector<f64>,
    pub ratio: f64,
    pub m: DMatrix<f64>,
    pub v: DVector<f64>,
    /// Admitted `(α, η)`, `η` unit in the basis `u_i`.
    pub solutions: Vec<(f64, DVector<f64>)>,
    /// `ξ` fell in the exceptional set and was perturbed.
    pub perturbed: bool,
    /// Largest `|Mη + (ξ·η)V - αη|` over admitted solutions.
    pub max_residual: f64,
}

impl PermittedReport {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }
}

const PERMITTED_TOL: f64 = 1e-8;

/// `ξ` lies in the exceptional set when `V_ξ ∈ Im(M - βI)` for a real eigenvalue `β` of `M`.
pub fn is_exceptional(m: &DMatrix<f64>, v: &DVector<f64>) -> bool {
    let n = m.nrows();
    let scale = m.norm().max(v.norm()).max(f64::MIN_POSITIVE);
    real_eigenvalues(m).into_iter().any(|beta| {
        let a = m - DMatrix::identity(n, n) * beta;
        let mut aug = DMatrix::zeros(n, n + 1);
        aug.view_mut((0, 0), (n, n)).copy_from(&a);
        aug.set_column(n, v);
        let ra = rank_abs(&a, PERMITTED_TOL * scale);
        let rb = rank_abs(&aug, PERMITTED_TOL * scale);
        ra == rb
    })
}

fn rank_abs(m: &DMatrix<f64>, tol: f64) -> usize {
    linalg::singular_values(m).into_iter().filter(|s| *s > tol).count()
}

fn real_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let scale = m.norm().max(1.0);
    let mut out: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-9 * scale)
        .map(|z| z.re)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
    out
}

/// Hyperplanes of `T_BS` permitted by the tangent direction `xi` (basis
/// coordinates) when the incident line has direction `E1 ν + E2 ξ` with
/// `ratio = E2/E1`.
///
/// A `ξ` in the exceptional set is nudged by `1e-4` (a few times at most).
pub fn permitted_hyperplanes(data: &SecondOrderData, xi: &DVector<f64>, ratio: f64) -> Result<PermittedReport> {
    let m_dim = data.basis.len();
    if xi.len() != m_dim {
        return Err(Error::InvalidInput("ξ must be given in the tangent basis".into()));
    }
    if data.curvatures.iter().any(|k| k.abs() <= 1e-12) {
        return Err(Error::Degenerate("second fundamental form is degenerate".into()));
    }
    if xi.norm() == 0.0 {
        return Err(Error::InvalidInput("ξ must be non-zero".into()));
    }
    let m = data.m_matrix();
    let mut xi = xi.normalize();
    let mut perturbed = false;
    let v_of = |xi: &DVector<f64>| DVector::from_fn(m_dim, |i, _| ratio * ratio * data.curvatures[i] * xi[i]);
    let mut v = v_of(&xi);
    let mut nudge = 0;
    while is_exceptional(&m, &v) {
        if nudge == 8 {
            return Err(Error::Degenerate("ξ stays in the exceptional set after perturbation".into()));
        }
        nudge += 1;
        perturbed = true;
        // Deterministic nudge along a direction that is never a coordinate axis.
        let dir = DVector::from_fn(m_dim, |i, _| ((i + nudge) as f64 * 0.754877666).sin() + 0.5);
        xi = (&xi + dir.normalize() * 1e-4).normalize();
        v = v_of(&xi);
    }
    let f = &m + &v * xi.transpose();
    let scale = f.norm().max(1.0);
    let mut solutions = Vec::new();
    let mut max_residual: f64 = 0.0;
    for alpha in real_eigenvalues(&f) {
        let a = &f - DMatrix::identity(m_dim, m_dim) * alpha;
        let (eta, s_min, _) = linalg::null_vector(&a);
        if s_min > 1e-7 * scale {
            continue;
        }
        let eta = eta.normalize();
        if xi.dot(&eta).abs() <= PERMITTED_TOL {
            continue;
        }
        let res = (&m * &eta + &v * xi.dot(&eta) - &eta * alpha).norm();
        max_residual = max_residual.max(res);
        solutions.push((alpha, eta));
    }
    if solutions.len() > m_dim {
        return Err(Error::Invariant(format!("{} permitted hyperplanes exceed the bound {m_dim}", solutions.len())));
    }
    Ok(PermittedReport { base: data.base.clone(), xi, ratio, m, v, solutions, perturbed, max_residual })
}

/// Comparison of the admitted hyperplanes with the tangent hyperplanes of
/// the confocal quadrics touching the incident line.
#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub lambdas: Vec<f64>,
    /// `η_j`: normals within `T_BS` of `T_{A_j}U_j ∩ T_BS`, basis coordinates.
    pub confocal_normals: Vec<DVector<f64>>,
    /// Worst distance from a confocal normal to the nearest admitted `η`.
    pub max_mismatch: f64,
    /// Worst `|m_iᵀ J m_j|` between tangent hyperplanes of distinct members (normalized).
    pub max_orthogonality: f64,
}

/// Cross-validate a [`PermittedReport`] on the ellipsoid with axes `axes`.
pub fn cross_validate(
    axes: &[f64],
    sig: Signature,
    data: &SecondOrderData,
    report: &PermittedReport,
) -> Result<CrossValidation> {
    let family = ConfocalFamily::pseudo(axes, sig.k);
    let xi_amb = data.ambient(&report.xi);
    let e = &data.frame + &xi_amb * report.ratio;
    let lambdas = family.tangency_parameters(&data.base, &e)?;
    let mut confocal_normals = Vec::with_capacity(lambdas.len());
    let mut covectors = Vec::with_capacity(lambdas.len());
    for &l in &lambdas {
        let (_, m) = family.tangency_point(l, &data.base, &e)?;
        let eta = data.coords(&m);
        if eta.norm() <= 1e-12 * m.norm() {
            return Err(Error::Degenerate("tangent hyperplane contains T_BS".into()));
        }
        confocal_normals.push(eta.normalize());
        covectors.push(m);
    }
    let max_mismatch = confocal_normals
        .iter()
        .map(|eta| {
            report
                .solutions
                .iter()
                .map(|(_, s)| proj_distance(eta, s))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(CrossValidation { lambdas, confocal_normals, max_mismatch, max_orthogonality: pairwise_orthogonality(&covectors, sig) })
}

fn pairwise_orthogonality(ms: &[DVector<f64>], sig: Signature) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..ms.len() {
        for j in (i + 1)..ms.len() {
            worst = worst.max(sig.form(&ms[i], &ms[j]).abs() / (ms[i].norm() * ms[j].norm()));
        }
    }
    worst
}

/// One random sample of [`permitted_sweep`].
#[derive(Debug, Clone, Serialize)]
pub struct PermittedSample {
    pub index: usize,
    pub base: Vec<f64>,
    /// `ξ` as an ambient tangent vector.
    pub xi: Vec<f64>,
    pub ratio: f64,
    pub count: usize,
    pub perturbed: bool,
    /// Admitted normals `η` as ambient tangent vectors.
    pub normals: Vec<Vec<f64>>,
    pub residual: f64,
    pub mismatch: f64,
    pub orthogonality: f64,
}

/// Permitted hyperplanes at random `(B, ξ, E2/E1)` on one ellipsoid.
#[derive(Debug, Clone, Serialize)]
pub struct PermittedSweep {
    pub axes: Vec<f64>,
    pub samples: Vec<PermittedSample>,
    pub max_count: usize,
    /// Samples whose count is below `d - 1`.
    pub deficient: usize,
    pub max_mismatch: f64,
    pub max_orthogonality: f64,
    pub max_residual: f64,
}

/// Draw `samples` random base points, directions and ratios (each sample
/// from its own stream seeded by `seed + index`) and cross-validate every
/// solution against the confocal family.
pub fn permitted_sweep(axes: &[f64], sig: Signature, samples: usize, seed: u64) -> Result<PermittedSweep> {
    use rand::{Rng, SeedableRng};
    use rayon::prelude::*;
    let d = axes.len();
    let results: Vec<Result<PermittedSample>> = (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
            let mut attempts = 0;
            loop {
                attempts += 1;
                let dir = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
                let xi = DVector::from_fn(d - 1, |_, _| rng.random_range(-1.0..1.0));
                let ratio = rng.random_range(0.2..2.0);
                if dir.norm() < 1e-3 || xi.norm() < 1e-3 {
                    continue;
                }
                let u = dir.normalize();
                let x = DVector::from_fn(d, |j, _| u[j] * axes[j].sqrt());
                let outcome = SecondOrderData::ellipsoid(axes, &x, sig).and_then(|data| {
                    let report = permitted_hyperplanes(&data, &xi, ratio)?;
                    let cv = cross_validate(axes, sig, &data, &report)?;
                    Ok((data, report, cv))
                });
                match outcome {
                    Ok((data, report, cv)) => {
                        return Ok(PermittedSample {
                            index,
                            base: x.iter().copied().collect(),
                            xi: data.ambient(&report.xi).iter().copied().collect(),
                            ratio,
                            count: report.count(),
                            perturbed: report.perturbed,
                            normals: report.solutions.iter().map(|(_, e)| data.ambient(e).iter().copied().collect()).collect(),
                            residual: report.max_residual,
                            mismatch: cv.max_mismatch,
                            orthogonality: cv.max_orthogonality,
                        })
                    }
                    Err(Error::LightLike { .. }) | Err(Error::Degenerate(_)) if attempts < 100 => continue,
                    Err(e) => return Err(e),
                }
            }
        })
        .collect();
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&PermittedSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    Ok(PermittedSweep {
        axes: axes.to_vec(),
        max_count: samples.iter().map(|s| s.count).max().unwrap_or(0),
        deficient: samples.iter().filter(|s| s.count < d - 1).count(),
        max_mismatch: fold(|s| s.mismatch),
        max_orthogonality: fold(|s| s.orthogonality),
        max_residual: fold(|s| s.residual),
        samples,
    })
}

/// Tangency parameters along a billiard orbit in an ellipsoid.
#[derive(Debug, Clone, Serialize)]
pub struct ChaslesReport {
    /// Orbit points `p_0, …, p_bounces`.
    pub points: Vec<DVector<f64>>,
    /// Sorted tangency parameters per chord `p_i p_{i+1}`.
    pub lambdas: Vec<Vec<f64>>,
    /// Largest change of a parameter from its value on the first chord.
    pub max_drift: f64,
    /// Worst metric orthogonality defect of the tangent hyperplanes at the tangency points.
    pub max_orthogonality: f64,
}

/// Follow `bounces` chords of the metric billiard in `Σ x_j²/a_j = 1` from
/// the chart point `start` in direction `direction`, recording the
/// parameters of the pseudo-confocal quadrics tangent to each chord.
pub fn chasles_invariance(
    axes: &[f64],
    sig: Signature,
    start: &[f64],
    direction: &DVector<f64>,
    bounces: usize,
) -> Result<ChaslesReport> {
    let boundary = metric_boundary(axes, sig)?;
    let billiard = Billiard::single(boundary);
    let ellipsoid = Ellipsoid::new(axes)?;
    let family = ConfocalFamily::pseudo(axes, sig.k);
    let p0 = billiard.point_at(0, start)?;
    let inward = -ellipsoid.gradient(&p0.point);
    if direction.len() != axes.len() || direction.dot(&inward) <= 0.0 {
        return Err(Error::InvalidInput("the start direction must point into the ellipsoid".into()));
    }
    let p1 = billiard.next_hit(0, &p0.point, direction, 0)?;
    let mut pts: Vec<BoundaryPoint> = vec![p0, p1];
    let mut lambdas: Vec<Vec<f64>> = Vec::with_capacity(bounces);
    let mut max_orthogonality: f64 = 0.0;
    for step in 0..bounces {
        let n = pts.len();
        let (a, b) = (&pts[n - 2].point, &pts[n - 1].point);
        let v = b - a;
        if sig.is_light_like(&v) {
            return Err(Error::LightLike { step });
        }
        let ls = family.tangency_parameters(a, &v)?;
        let mut covectors = Vec::with_capacity(ls.len());
        for &l in &ls {
            covectors.push(family.tangency_point(l, a, &v)?.1);
        }
        max_orthogonality = max_orthogonality.max(pairwise_orthogonality(&covectors, sig));
        lambdas.push(ls);
        if step + 1 < bounces {
            let next = billiard.billiard_map(&pts[n - 2], &pts[n - 1]).map_err(|e| match e {
                Error::Transversality(_) => Error::LightLike { step },
                other => other,
            })?;
            pts.push(next);
        }
    }
    let first = lambdas.first().cloned().unwrap_or_default();
    let mut max_drift: f64 = 0.0;
    for (i, ls) in lambdas.iter().enumerate() {
        if ls.len() != first.len() {
            return Err(Error::Invariant(format!(
                "chord {i} touches {} family members instead of {}",
                ls.len(),
                first.len()
            )));
        }
        for (x, y) in ls.iter().zip(&first) {
            max_drift = max_drift.max((x - y).abs() / (1.0 + y.abs()));
        }
    }
    Ok(ChaslesReport { points: pts.into_iter().map(|p| p.point).collect(), lambdas, max_drift, max_orthogonality })
}

/// Start data for [`chasles_invariance`]: the chart point at `phase` and a
/// chord toward the antipodal chart point rotated by `tilt`.
pub fn chasles_start(axes: &[f64], phase: f64, tilt: f64) -> Result<(Vec<f64>, DVector<f64>)> {
    let e = Ellipsoid::new(axes)?;
    let start = if axes.len() == 2 { vec![phase] } else { vec![phase, 1.1] };
    let target = if axes.len() == 2 { vec![phase + std::f64::consts::PI + tilt] } else { vec![phase + 2.5 + tilt, 2.0] };
    let dir = e.point(&target) - e.point(&start);
    Ok((start, dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circumcenter_of_right_triangle() {
        let c = circumcenter([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn circumcenter_rejects_collinear() {
        assert!(circumcenter([0.0, 0.0], [1.0, 1.0], [2.0, 2.0]).is_err());
    }

    #[test]
    fn fit_recovers_axis_ellipse() {
        let pts: Vec<[f64; 2]> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.157;
                [1.0 + 2.0 * t.cos(), -0.5 + t.sin()]
            })
            .collect();
        let fit = fit_conic(&pts).unwrap();
        assert_eq!(fit.class, ConicClass::Ellipse);
        assert!(fit.residual < 1e-12 && fit.cross_term < 1e-10);
        // (x-1)²/4 + (y+.5)² - 1 ∝ coefficients
        let k = fit.coefficients;
        assert!((k[2] / k[0] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn fit_classifies_hyperbola() {
        let pts: Vec<[f64; 2]> = (1..30).map(|i| {
            let t = -1.5 + i as f64 * 0.1;
            [t.cosh(), t.sinh()]
        }).collect();
        assert_eq!(fit_conic(&pts).unwrap().class, ConicClass::Hyperbola);
    }

    #[test]
    fn sphere_admits_one_hyperplane() {
        let data = SecondOrderData::ellipsoid(&[1.0, 1.0, 1.0], &DVector::from_vec(vec![0.0, 0.6, 0.8]), Signature::euclidean(3)).unwrap();
        let r = permitted_hyperplanes(&data, &DVector::from_vec(vec![0.3, -0.7]), 0.8).unwrap();
        assert_eq!(r.count(), 1);
        assert!(proj_distance(&r.solutions[0].1, &r.xi) < 1e-12);
    }
}
