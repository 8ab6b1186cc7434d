//! Projective billiards inside polygons whose orbits are all periodic.
//!
//! Edge `j` is the full line `P_j P_{j+1}` (indices mod `n`). Two frame
//! rules are supported:
//!
//! * *right-spherical* triangles: the frame at a point of `P_j P_{j+1}` is
//!   the line through the opposite vertex `P_{j+2}`; every orbit has period 3;
//! * *centrally-projective* polygons: the frame is the line through a fixed
//!   center `O`. Orbits close after `2n` bounces for any polygon and center,
//!   after 4 for a quadrilateral whose center is the meet of its diagonals,
//!   and after `n` for a regular `n`-gon (`n` even) with its own center.
//!
//! Orbits are *virtual*: vertex `p_j` lies on the line of edge `j mod n`,
//! not necessarily on the segment.
//!
//! ```
//! use projbill::polyref::PolygonBilliard;
//! let square = PolygonBilliard::regular(4).unwrap();
//! let (p0, p1) = square.start_from_params(0.3, 0.6);
//! let orbit = square.virtual_orbit(p0, p1, 8, 1e-9).unwrap();
//! assert_eq!(orbit.period, Some(4));
//! ```

use nalgebra::{Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex proximity below which an orbit is declared to hit a corner.
pub const CORNER_TOL: f64 = 1e-9;

/// Frame rule of a polygon billiard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolygonKind {
    RightSpherical,
    CentrallyProjective,
}

/// A projective billiard on the edge lines of a polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonBilliard {
    kind: PolygonKind,
    vertices: Vec<Vector3<f64>>,
    center: Option<Vector3<f64>>,
}

fn hom(p: [f64; 2]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], 1.0)
}

fn unit(v: Vector3<f64>) -> Vector3<f64> {
    let u = v.normalize();
    // Fix the sign by the largest coordinate so equal points compare equal.
    let i = u.iamax();
    if u[i] < 0.0 {
        -u
    } else {
        u
    }
}

/// Sine of the angle between two homogeneous points.
pub fn proj_dist(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm() / (a.norm() * b.norm())
}

fn affine(v: &Vector3<f64>) -> Option<Vector2<f64>> {
    if v[2].abs() <= 1e-14 * v.norm() {
        None
    } else {
        Some(Vector2::new(v[0] / v[2], v[1] / v[2]))
    }
}

impl PolygonBilliard {
    /// Right-spherical billiard on the triangle `P1 P2 P3`.
    pub fn right_spherical(p: [[f64; 2]; 3]) -> Result<Self> {
        let vertices: Vec<_> = p.iter().map(|v| unit(hom(*v))).collect();
        if vertices[0].cross(&vertices[1]).dot(&vertices[2]).abs() <= 1e-12 {
            return Err(Error::Degenerate("triangle vertices are collinear".into()));
        }
        Ok(PolygonBilliard { kind: PolygonKind::RightSpherical, vertices, center: None })
    }

    /// Centrally-projective polygon with center `o`; `o` must avoid every edge line.
    pub fn centrally_projective(o: [f64; 2], p: &[[f64; 2]]) -> Result<Self> {
        if p.len() < 3 {
            return Err(Error::InvalidInput("a polygon needs at least 3 vertices".into()));
        }
        let vertices: Vec<_> = p.iter().map(|v| unit(hom(*v))).collect();
        let o = unit(hom(o));
        let n = vertices.len();
        for j in 0..n {
            let e = vertices[j].cross(&vertices[(j + 1) % n]);
            if e.norm() <= 1e-12 {
                return Err(Error::Degenerate(format!("vertices {j} and {} coincide", (j + 1) % n)));
            }
            if e.normalize().dot(&o).abs() <= 1e-10 {
                return Err(Error::Degenerate(format!("center lies on edge line {j}")));
            }
        }
        Ok(PolygonBilliard { kind: PolygonKind::CentrallyProjective, vertices, center: Some(o) })
    }

    /// Quadrilateral framed by the meet of its diagonals `P1 P3 ∩ P2 P4`.
    pub fn diagonal_quadrilateral(p: [[f64; 2]; 4]) -> Result<Self> {
        let v: Vec<_> = p.iter().map(|x| hom(*x)).collect();
        let o = v[0].cross(&v[2]).cross(&v[1].cross(&v[3]));
        let oa = affine(&o).ok_or_else(|| Error::Degenerate("diagonals are parallel".into()))?;
        Self::centrally_projective([oa[0], oa[1]], &p)
    }

    /// Regular `n`-gon inscribed in the unit circle, framed by its center.
    pub fn regular(n: usize) -> Result<Self> {
        Self::centrally_projective([0.0, 0.0], &regular_vertices(n, 1.0, 0.0))
    }

    pub fn kind(&self) -> PolygonKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn affine_vertices(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(|v| affine(v).map(|a| [a[0], a[1]]).unwrap_or([f64::NAN; 2])).collect()
    }

    pub fn center(&self) -> Option<Vector3<f64>> {
        self.center
    }

    /// Covector of edge line `j` (mod n).
    pub fn edge_line(&self, j: usize) -> Vector3<f64> {
        let n = self.n();
        self.vertices[j % n].cross(&self.vertices[(j + 1) % n]).normalize()
    }

    /// Point through which the frame lines of edge `j` pass.
    pub fn frame_point(&self, j: usize) -> Vector3<f64> {
        match self.kind {
            PolygonKind::RightSpherical => self.vertices[(j + 2) % self.n()],
            PolygonKind::CentrallyProjective => self.center.expect("centrally-projective polygons have a center"),
        }
    }

    /// Reflect the line `p_prev p` at `p` on edge `j`, returning the point of
    /// the reflected line on edge `j + 1`.
    pub fn reflect_step(&self, p_prev: &Vector3<f64>, p: &Vector3<f64>, j: usize, step: usize) -> Result<Vector3<f64>> {
        if proj_dist(p_prev, p) <= CORNER_TOL {
            return Err(Error::Degenerate(format!("consecutive orbit points coincide at step {step}")));
        }
        let h = self.edge_line(j);
        let f = self.frame_point(j);
        // Involution fixing the edge line pointwise and the frame point.
        let image = p_prev - f * (2.0 * h.dot(p_prev) / h.dot(&f));
        let line = p.cross(&image);
        if line.norm() <= 1e-14 * p.norm() * image.norm() {
            return Err(Error::Degenerate(format!("reflected line undefined at step {step}")));
        }
        let next_edge = self.edge_line(j + 1);
        let q = line.cross(&next_edge);
        if q.norm() <= 1e-12 * line.norm() {
            return Err(Error::Degenerate(format!("reflected line coincides with the next edge at step {step}")));
        }
        let q = unit(q);
        let n = self.n();
        for v in [&self.vertices[(j + 1) % n], &self.vertices[(j + 2) % n]] {
            if proj_dist(&q, v) <= CORNER_TOL {
                return Err(Error::Corner { step });
            }
        }
        Ok(q)
    }

    /// Iterate from `p0` on edge 0 and `p1` on edge 1 for `steps` bounces.
    ///
    /// The least period is searched among multiples of `n` (the orbit must
    /// return to the same edges).
    pub fn virtual_orbit(&self, p0: Vector3<f64>, p1: Vector3<f64>, steps: usize, tol: f64) -> Result<VirtualOrbit> {
        for (p, j) in [(&p0, 0usize), (&p1, 1usize)] {
            let r = self.edge_line(j).dot(&p.normalize()).abs();
            if r > 1e-9 {
                return Err(Error::NotIncident { what: "start point off its edge line", residual: r });
            }
        }
        let n = self.n();
        let mut pts = vec![unit(p0), unit(p1)];
        let mut period = None;
        let mut closure_residual = f64::INFINITY;
        for k in 0..steps {
            let m = pts.len();
            let q = self.reflect_step(&pts[m - 2], &pts[m - 1], m - 1, k + 1)?;
            pts.push(q);
            let m = pts.len();
            let idx = m - 2;
            if idx % n == 0 {
                let r = proj_dist(&pts[idx], &pts[0]).max(proj_dist(&pts[idx + 1], &pts[1]));
                if period.is_none() && r <= tol {
                    period = Some(idx);
                    closure_residual = r;
                }
                if period.is_none() {
                    closure_residual = r;
                }
            }
        }
        Ok(VirtualOrbit { points: pts, period, closure_residual })
    }

    /// Start points at affine parameters `s` on edge 0 and `t` on edge 1.
    pub fn start_from_params(&self, s: f64, t: f64) -> (Vector3<f64>, Vector3<f64>) {
        let n = self.n();
        let av: Vec<Vector2<f64>> = self.vertices.iter().map(|v| affine(v).expect("finite vertices")).collect();
        let on = |j: usize, u: f64| {
            let a = av[j % n] + (av[(j + 1) % n] - av[j % n]) * u;
            Vector3::new(a[0], a[1], 1.0)
        };
        (on(0, s), on(1, t))
    }

    /// Closure of `samples` random orbits after `k` bounces.
    ///
    /// Starts are drawn uniformly from the middle 80% of edges 0 and 1;
    /// starts whose orbit hits a corner or degenerates are redrawn.
    pub fn reflectivity_sweep(&self, k: usize, samples: usize, seed: u64, tol: f64) -> Result<SweepReport> {
        let results: Vec<Result<(f64, usize)>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                let mut redraws = 0;
                loop {
                    let (s, t) = (rng.random_range(0.1..0.9), rng.random_range(0.1..0.9));
                    let (p0, p1) = self.start_from_params(s, t);
                    match self.virtual_orbit(p0, p1, k, f64::INFINITY) {
                        Ok(o) => {
                            let m = o.points.len();
                            let r = proj_dist(&o.points[m - 2], &o.points[0]).max(proj_dist(&o.points[m - 1], &o.points[1]));
                            return Ok((r, redraws));
                        }
                        Err(Error::Corner { .. }) | Err(Error::Degenerate(_)) if redraws < 100 => redraws += 1,
                        Err(e) => return Err(e),
                    }
                }
            })
            .collect();
        let mut residuals = Vec::with_capacity(samples);
        let mut redraws = 0;
        for r in results {
            let (res, rd) = r?;
            residuals.push(res);
            redraws += rd;
        }
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        let closed = residuals.iter().filter(|r| **r < tol).count();
        Ok(SweepReport { k, samples, closed, max_residual, min_residual: residuals.iter().copied().fold(f64::INFINITY, f64::min), redraws, residuals })
    }
}

/// Vertices `(r cos θ_j, r sin θ_j)` with `θ_j = phase + 2πj/n`.
pub fn regular_vertices(n: usize, r: f64, phase: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|j| {
            let t = phase + std::f64::consts::TAU * j as f64 / n as f64;
            [r * t.cos(), r * t.sin()]
        })
        .collect()
}

/// Result of [`PolygonBilliard::reflectivity_sweep`].
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub k: usize,
    pub samples: usize,
    /// Orbits that closed within the tolerance after `k` bounces.
    pub closed: usize,
    pub max_residual: f64,
    pub min_residual: f64,
    pub redraws: usize,
    /// Closure residual per sample, in sample order.
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl SweepReport {
    pub fn all_closed(&self) -> bool {
        self.closed == self.samples
    }
}

/// A virtual orbit: `points[j]` lies on edge line `j mod n`.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualOrbit {
    pub points: Vec<Vector3<f64>>,
    pub period: Option<usize>,
    pub closure_residual: f64,
}

impl VirtualOrbit {
    pub fn affine_points(&self) -> Vec<Option<[f64; 2]>> {
        self.points.iter().map(|p| affine(p).map(|a| [a[0], a[1]])).collect()
    }

    /// Index of the first vertex outside its closed edge segment (physical
    /// billiards would stop there).
    pub fn first_segment_exit(&self, b: &PolygonBilliard) -> Option<usize> {
        let n = b.n();
        let av: Vec<Option<Vector2<f64>>> = b.vertices.iter().map(affine).collect();
        self.points.iter().enumerate().find_map(|(j, p)| {
            let (a, c) = (av[j % n]?, av[(j + 1) % n]?);
            let x = match affine(p) {
                Some(x) => x,
                None => return Some(j),
            };
            let e = c - a;
            let t = (x - a).dot(&e) / e.norm_squared();
            if !(-1e-12..=1.0 + 1e-12).contains(&t) {
                Some(j)
            } else {
                None
            }
        })
    }

    /// Orbit point with an arbitrary (possibly negative) index, using the
    /// period when the index falls outside the stored range.
    pub fn point(&self, j: i64) -> Result<Vector3<f64>> {
        let len = self.points.len() as i64;
        if (0..len).contains(&j) {
            return Ok(self.points[j as usize]);
        }
        match self.period {
            Some(p) => Ok(self.points[j.rem_euclid(p as i64) as usize]),
            None => Err(Error::InvalidInput(format!("orbit index {j} outside 0..{len}"))),
        }
    }
}

/// For a regular `2m`-gon framed by its center, the lines
/// `p_{ℓ-r-2} p_{ℓ-r-1}` and `p_{ℓ+r} p_{ℓ+r+1}` meet the great diagonal
/// `P_ℓ P_{ℓ+m}` at the same point. Returns the distance between the two
/// intersection points.
pub fn great_diagonal_check(b: &PolygonBilliard, orbit: &VirtualOrbit, l: i64, r: i64) -> Result<f64> {
    let n = b.n();
    if n % 2 != 0 || b.kind != PolygonKind::CentrallyProjective {
        return Err(Error::InvalidInput("the great-diagonal property concerns centrally-projective 2m-gons".into()));
    }
    let m = (n / 2) as i64;
    let v = |j: i64| b.vertices[j.rem_euclid(n as i64) as usize];
    let diag = v(l).cross(&v(l + m));
    let line = |i: i64| -> Result<Vector3<f64>> { Ok(orbit.point(i)?.cross(&orbit.point(i + 1)?)) };
    let x1 = line(l - r - 2)?.cross(&diag);
    let x2 = line(l + r)?.cross(&diag);
    if x1.norm() <= 1e-14 || x2.norm() <= 1e-14 {
        return Err(Error::Degenerate("orbit side coincides with the diagonal".into()));
    }
    Ok(proj_dist(&x1, &x2))
}

/// Outer billiard orbit conjugate to a centrally-projective orbit by the
/// polarity of the unit circle centered at `O`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualOuterOrbit {
    /// Poles `q_j` of the orbit sides `p_j p_{j+1}`.
    pub q: Vec<Vector2<f64>>,
    /// Poles `Q_j` of the edge lines `P_j P_{j+1}`.
    pub big_q: Vec<Vector2<f64>>,
}

impl DualOuterOrbit {
    /// Largest `|q_{j-1} + q_j - 2 Q_j|`: each `Q_j` is the midpoint of `q_{j-1} q_j`.
    pub fn midpoint_residual(&self) -> f64 {
        let n = self.big_q.len();
        (1..self.q.len())
            .map(|j| (self.q[j - 1] + self.q[j] - self.big_q[j % n] * 2.0).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|q_{j+1} - q_{j-1} - 2 (Q_{j+1} - Q_j)|`.
    pub fn difference_residual(&self) -> f64 {
        let n = self.big_q.len();
        (1..self.q.len().saturating_sub(1))
            .map(|j| (self.q[j + 1] - self.q[j - 1] - (self.big_q[(j + 1) % n] - self.big_q[j % n]) * 2.0).norm())
            .fold(0.0, f64::max)
    }
}

/// Pole of a line (covector in translated coordinates) for `x² + y² - z²`.
fn circle_pole(l: &Vector3<f64>, index: usize) -> Result<Vector2<f64>> {
    let p = Vector3::new(l[0], l[1], -l[2]);
    affine(&p).ok_or_else(|| {
        Error::Degenerate(format!("line {index} passes through the center: its pole is at infinity"))
    })
}

/// Conjugate a centrally-projective orbit to an outer billiard orbit.
///
/// After translating `O` to the origin, the polarity of the unit circle
/// maps the side lines to points `q_j` and the edges to `Q_j`, with `Q_j`
/// the midpoint of `q_{j-1} q_j`.
pub fn dual_conjugate(b: &PolygonBilliard, orbit: &VirtualOrbit) -> Result<DualOuterOrbit> {
    let o = b.center.ok_or_else(|| Error::InvalidInput("dual conjugation needs a centrally-projective polygon".into()))?;
    let oa = affine(&o).ok_or_else(|| Error::Degenerate("center at infinity".into()))?;
    let shift = |v: &Vector3<f64>| -> Vector3<f64> {
        // (x, y, w) ↦ (x - w ox, y - w oy, w)
        Vector3::new(v[0] - v[2] * oa[0], v[1] - v[2] * oa[1], v[2])
    };
    let pts: Vec<Vector3<f64>> = orbit.points.iter().map(shift).collect();
    let verts: Vec<Vector3<f64>> = b.vertices.iter().map(shift).collect();
    let n = verts.len();
    let big_q = (0..n)
        .map(|j| circle_pole(&verts[j].cross(&verts[(j + 1) % n]), j))
        .collect::<Result<Vec<_>>>()?;
    let q = (0..pts.len() - 1)
        .map(|j| circle_pole(&pts[j].cross(&pts[j + 1]), j))
        .collect::<Result<Vec<_>>>()?;
    Ok(DualOuterOrbit { q, big_q })
}

/// Outer billiard iteration `q_j = 2 Q_j - q_{j-1}` (central symmetry of
/// `q_{j-1}` about `Q_j`), with `Q_j = centers[(j - 1) mod n]`.
///
/// ```
/// use nalgebra::Vector2;
/// use projbill::polyref::outer_orbit;
/// let q = outer_orbit(&[Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0)], Vector2::new(-1.0, -1.0), 2);
/// assert_eq!(q[1], Vector2::new(1.0, 1.0));
/// assert_eq!(q[2], Vector2::new(1.0, -1.0));
/// ```
pub fn outer_orbit(centers: &[Vector2<f64>], q0: Vector2<f64>, steps: usize) -> Vec<Vector2<f64>> {
    let mut out = vec![q0];
    for j in 1..=steps {
        let prev = out[j - 1];
        out.push(centers[(j - 1) % centers.len()] * 2.0 - prev);
    }
    out
}

/// Serializable description of a polygon billiard fixture.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PolygonFixture {
    pub kind: PolygonKind,
    pub vertices: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
}

impl PolygonFixture {
    pub fn build(&self) -> Result<PolygonBilliard> {
        match self.kind {
            PolygonKind::RightSpherical => {
                if self.vertices.len() != 3 {
                    return Err(Error::InvalidInput("right-spherical billiards are triangles".into()));
                }
                PolygonBilliard::right_spherical([self.vertices[0], self.vertices[1], self.vertices[2]])
            }
            PolygonKind::CentrallyProjective => {
                let c = self.center.ok_or_else(|| Error::InvalidInput("missing center".into()))?;
                PolygonBilliard::centrally_projective(c, &self.vertices)
            }
        }
    }
}

/// Random convex `n`-gon: sorted random angles on a jittered circle.
pub fn random_convex_polygon(n: usize, rng: &mut impl Rng) -> Vec<[f64; 2]> {
    let mut angles: Vec<f64> = (0..n)
        .map(|j| (j as f64 + rng.random_range(0.2..0.8)) * std::f64::consts::TAU / n as f64)
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r = rng.random_range(0.8..1.2);
    angles.iter().map(|t| [r * t.cos(), r * t.sin()]).collect()
}
