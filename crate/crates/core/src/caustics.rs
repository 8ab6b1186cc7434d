//! Caustics of conic billiards.
//!
//! The base conic is `x²/a + y²/b = 1` (an ellipse for `a, b > 0`, a
//! hyperbola when exactly one is negative) and its confocal family is
//! `C_λ : x²/(a-λ) + y²/(b-λ) = 1`. A member `C_λ` is an `n`-caustic when
//! billiard orbits tangent to it close after `n` bounces; Cayley's
//! determinant condition turns this into a polynomial in `λ` with rational
//! coefficients, computed here exactly.
//!
//! ```
//! use projbill::caustics::normalized_caustic_polynomial;
//! use num_rational::BigRational;
//!
//! let (a, b) = (BigRational::from_integer(2.into()), BigRational::from_integer(1.into()));
//! let p = normalized_caustic_polynomial(3, &a, &b).unwrap();
//! // (a-b)² X² + 2ab(a+b) X - 3a²b² = X² + 12 X - 12
//! let c: Vec<i64> = p.coeffs().iter().map(|q| q.to_integer().try_into().unwrap()).collect();
//! assert_eq!(c, vec![-12, 12, 1]);
//! ```

use nalgebra::DVector;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, cross3, dot, homogeneous_quadratic_roots, kernel_pair3, Scalar};
use crate::poly::{self, bareiss_det, rational_to_f64, RatPoly};
use crate::projective::{Point, Quadric};

/// Coefficient `c_k` of `√(1 + t) = Σ c_k t^k`:
/// `c_k = (-1)^{k+1} / (4^k (2k - 1)) · binom(2k, k)`.
pub fn sqrt_series_coeff(k: u32) -> BigRational {
    let mut binom = BigInt::one();
    for i in 0..k {
        binom = binom * BigInt::from(2 * k - i) / BigInt::from(i + 1);
    }
    let den = BigInt::from(4).pow(k) * BigInt::from(2 * k as i64 - 1);
    let sign = if k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
    BigRational::new(sign * binom, den)
}

fn validate_ab(a: &BigRational, b: &BigRational) -> Result<()> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidInput("a and b must be nonzero".into()));
    }
    if a == b {
        // Allowed: the circle. Only a = b = 0 is invalid, caught above.
    }
    if a.is_negative() && b.is_negative() {
        return Err(Error::InvalidInput("a and b both negative: the base conic has no real points".into()));
    }
    Ok(())
}

/// Coefficient `B_k(λ)` as a polynomial in `λ`:
/// `Σ_{u+v+w=k} c_u c_v c_w (a-λ)^u (b-λ)^v / (a^u b^v)`.
///
/// These are the Taylor coefficients in `t` of
/// `√((1 + (a-λ)t/a)(1 + (b-λ)t/b)(1 + t))`.
pub fn cayley_b_coeff(k: u32, a: &BigRational, b: &BigRational) -> Result<RatPoly> {
    validate_ab(a, b)?;
    let c: Vec<BigRational> = (0..=k).map(sqrt_series_coeff).collect();
    let lam = RatPoly::x();
    let alpha = (&RatPoly::constant(a.clone()) - &lam).scale(&a.recip());
    let beta = (&RatPoly::constant(b.clone()) - &lam).scale(&b.recip());
    let alpha_pows: Vec<RatPoly> = (0..=k).map(|u| alpha.pow(u)).collect();
    let beta_pows: Vec<RatPoly> = (0..=k).map(|v| beta.pow(v)).collect();
    let mut out = RatPoly::zero();
    for u in 0..=k {
        for v in 0..=(k - u) {
            let w = k - u - v;
            let coef = &c[u as usize] * &c[v as usize] * &c[w as usize];
            let term = (&alpha_pows[u as usize] * &beta_pows[v as usize]).scale(&coef);
            out = &out + &term;
        }
    }
    Ok(out)
}

/// Cayley polynomial `B^n(λ)`: for `n = 2m+1` the determinant of
/// `(B_{i+j})_{1 ≤ i,j ≤ m}`, for `n = 2m` that of `(B_{i+j+1})_{1 ≤ i,j ≤ m-1}`.
pub fn caustic_polynomial(n: u32, a: &BigRational, b: &BigRational) -> Result<RatPoly> {
    if n < 3 {
        return Err(Error::InvalidInput("caustic polynomials are defined for n ≥ 3".into()));
    }
    validate_ab(a, b)?;
    let (size, shift) = if n % 2 == 1 { ((n - 1) / 2, 0) } else { (n / 2 - 1, 1) };
    let max_k = 2 * size + shift;
    let bk: Vec<RatPoly> = (0..=max_k).map(|k| cayley_b_coeff(k, a, b)).collect::<Result<_>>()?;
    let m: Vec<Vec<RatPoly>> = (1..=size)
        .map(|i| (1..=size).map(|j| bk[(i + j + shift) as usize].clone()).collect())
        .collect();
    bareiss_det(&m)
}

/// Normalizing factor `μ_n` making `μ_n B^n` a polynomial with integer
/// coefficients in `a`, `b`.
pub fn normalizing_factor(n: u32, a: &BigRational, b: &BigRational) -> Result<BigRational> {
    if n < 3 {
        return Err(Error::InvalidInput("n ≥ 3 required".into()));
    }
    let ab = a * b;
    let two = BigRational::from_integer(2.into());
    let pow = |x: &BigRational, e: u32| -> BigRational {
        let mut r = BigRational::one();
        for _ in 0..e {
            r = &r * x;
        }
        r
    };
    if n % 2 == 1 {
        let m = (n - 1) / 2;
        let sign = if m % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        Ok(sign * pow(&two, m * (2 * m + 1)) * pow(&ab, m * (m + 1)))
    } else {
        let m = n / 2;
        let sign = if (m + 1) % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        let inv_m = BigRational::new(1.into(), BigInt::from(m));
        Ok(inv_m * sign * pow(&two, (m - 1) * (2 * m + 1)) * pow(&ab, (m - 1) * (m + 1)))
    }
}

/// `μ_n · B^n`.
pub fn normalized_caustic_polynomial(n: u32, a: &BigRational, b: &BigRational) -> Result<RatPoly> {
    Ok(caustic_polynomial(n, a, b)?.scale(&normalizing_factor(n, a, b)?))
}

/// Generic degree of the caustic polynomial (`a ≠ b`).
pub fn generic_degree(n: u32) -> u32 {
    if n % 2 == 1 {
        (n * n - 1) / 4
    } else {
        n * n / 4 - 1
    }
}

/// Degree of the caustic polynomial for the circle `a = b`.
pub fn circle_degree(n: u32) -> u32 {
    if n % 2 == 1 {
        (n - 1) / 2
    } else {
        n / 2 - 1
    }
}

/// Geometric type of a confocal member `C_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausticClass {
    /// `a - λ > 0` and `b - λ > 0`.
    Ellipse,
    /// `(a - λ)(b - λ) < 0`.
    Hyperbola,
    /// No real points: `λ` is not real, or both denominators are negative.
    StrictlyComplex,
    /// `λ ∈ {0, a, b}`: the base conic itself or a degenerate member.
    Excluded,
}

impl CausticClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CausticClass::Ellipse => "ellipse",
            CausticClass::Hyperbola => "hyperbola",
            CausticClass::StrictlyComplex => "strictly-complex",
            CausticClass::Excluded => "excluded",
        }
    }
}

/// Classify the confocal member with parameter `λ`.
pub fn classify_caustic(lambda: Complex64, a: f64, b: f64) -> CausticClass {
    let scale = lambda.norm().max(a.abs()).max(b.abs()).max(1.0);
    if lambda.im.abs() > 1e-9 * scale {
        return CausticClass::StrictlyComplex;
    }
    let l = lambda.re;
    let near = |x: f64| (l - x).abs() <= 1e-9 * scale;
    if near(0.0) || near(a) || near(b) {
        return CausticClass::Excluded;
    }
    let (p, q) = (a - l, b - l);
    if p > 0.0 && q > 0.0 {
        CausticClass::Ellipse
    } else if p * q < 0.0 {
        CausticClass::Hyperbola
    } else {
        CausticClass::StrictlyComplex
    }
}

/// One root of the caustic polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausticRoot {
    pub lambda: Complex64,
    pub multiplicity: usize,
    pub class: CausticClass,
}

/// Result of [`n_caustics`].
#[derive(Debug, Clone)]
pub struct CausticReport {
    pub n: u32,
    pub a: BigRational,
    pub b: BigRational,
    /// Exact normalized polynomial `μ_n B^n`.
    pub polynomial: RatPoly,
    pub degree: usize,
    pub roots: Vec<CausticRoot>,
}

impl CausticReport {
    /// Sum of multiplicities; equals the degree.
    pub fn root_count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

/// Exact caustic polynomial and its classified roots.
pub fn n_caustics(n: u32, a: &BigRational, b: &BigRational, dedup_tol: f64) -> Result<CausticReport> {
    let polynomial = normalized_caustic_polynomial(n, a, b)?;
    let degree = polynomial
        .degree()
        .ok_or_else(|| Error::Degenerate("caustic polynomial vanishes identically".into()))?;
    let (af, bf) = (rational_to_f64(a), rational_to_f64(b));
    let roots = poly::roots(&polynomial, dedup_tol)?
        .into_iter()
        .map(|r| CausticRoot {
            lambda: r.value,
            multiplicity: r.multiplicity,
            class: classify_caustic(r.value, af, bf),
        })
        .collect();
    Ok(CausticReport { n, a: a.clone(), b: b.clone(), polynomial, degree, roots })
}

/// Closed-form parameters of the two 3-caustics,
/// `λ± = -ab/(a-b)² · (a + b ± 2√(a² - ab + b²))`; requires `a ≠ b`.
pub fn three_caustics_closed_form(a: f64, b: f64) -> Result<[f64; 2]> {
    if a == b {
        return Err(Error::Degenerate("a = b: the closed form has a pole".into()));
    }
    let s = (a * a - a * b + b * b).sqrt();
    let k = -a * b / ((a - b) * (a - b));
    Ok([k * (a + b + 2.0 * s), k * (a + b - 2.0 * s)])
}

/// Closed-form parameters of the three 4-caustics
/// `(ab/(b-a), ab/(a+b), ab/(a-b))`; requires `a ≠ ±b`.
pub fn four_caustics_closed_form(a: f64, b: f64) -> Result<[f64; 3]> {
    if a == b || a == -b {
        return Err(Error::Degenerate("a = ±b: the closed form has a pole".into()));
    }
    let ab = a * b;
    Ok([ab / (b - a), ab / (a + b), ab / (a - b)])
}

/// Exact 4-caustic parameters.
pub fn four_caustics_exact(a: &BigRational, b: &BigRational) -> Result<[BigRational; 3]> {
    if a == b || *a == -b.clone() {
        return Err(Error::Degenerate("a = ±b".into()));
    }
    let ab = a * b;
    Ok([&ab / (b - a), &ab / (a + b), &ab / (a - b)])
}

/// Exact 3-caustic parameters when `a² - ab + b²` is a rational square.
pub fn three_caustics_exact(a: &BigRational, b: &BigRational) -> Option<[BigRational; 2]> {
    if a == b {
        return None;
    }
    let s = poly::rational_sqrt(&(a * a - a * b + b * b))?;
    let d = a - b;
    let k = -(a * b) / (&d * &d);
    let two = BigRational::from_integer(2.into());
    Some([&k * (a + b + &two * &s), &k * (a + b - &two * &s)])
}

/// Joachimsthal quantity `P = (x v_x / a + y v_y / b)² / q(v)` with
/// `q(v) = v_x² + v_y²` (bilinear, so complex inputs are allowed).
///
/// Along a billiard orbit in the conic `P` is constant and `λ = ab·P` is
/// the parameter of the confocal caustic.
pub fn joachimsthal<S: Scalar>(p: [S; 2], v: [S; 2], a: f64, b: f64, tol: f64) -> Result<S> {
    let (x, y) = (p[0], p[1]);
    let on = x * x.unscale(a) + y * y.unscale(b) - S::one();
    if on.modulus() > tol.max(1e-9) * (1.0 + x.modulus().powi(2) + y.modulus().powi(2)) {
        return Err(Error::NotIncident { what: "point off the conic", residual: on.modulus() });
    }
    let q = v[0] * v[0] + v[1] * v[1];
    if q.modulus() <= 1e-12 * (v[0].modulus().powi(2) + v[1].modulus().powi(2)) {
        return Err(Error::Isotropic("direction with q(v) = 0".into()));
    }
    let s = x * v[0].unscale(a) + y * v[1].unscale(b);
    Ok(s * s / q)
}

/// Parameter `λ` of the confocal member tangent to the planar line with
/// covector `(α, β, γ)`: `λ = (aα² + bβ² - γ²) / (α² + β²)`.
pub fn tangency_parameter_planar<S: Scalar>(l: [S; 3], a: f64, b: f64) -> Result<S> {
    let den = l[0] * l[0] + l[1] * l[1];
    let scale = l.iter().map(|x| x.modulus()).fold(0.0, f64::max);
    if den.modulus() <= 1e-12 * scale * scale {
        return Err(Error::Isotropic("isotropic line: no tangent confocal member".into()));
    }
    Ok((l[0] * l[0].scale(a) + l[1] * l[1].scale(b) - l[2] * l[2]) / den)
}

/// Confocal (or pseudo-confocal) family `Σ_j x_j² / (a_j - s_j λ) = 1`
/// where `s_j = +1` for the first `k` coordinates and `-1` for the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfocalFamily {
    pub axes: Vec<f64>,
    pub signs: Vec<f64>,
}

impl ConfocalFamily {
    /// Euclidean confocal family of `Σ x_j² / a_j = 1`.
    pub fn euclidean(axes: &[f64]) -> Self {
        ConfocalFamily { axes: axes.to_vec(), signs: vec![1.0; axes.len()] }
    }

    /// Pseudo-confocal family for signature `(k, d - k)`.
    pub fn pseudo(axes: &[f64], k: usize) -> Self {
        let signs = (0..axes.len()).map(|j| if j < k { 1.0 } else { -1.0 }).collect();
        ConfocalFamily { axes: axes.to_vec(), signs }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Denominators `a_j - s_j λ`.
    pub fn denominators(&self, lambda: f64) -> Vec<f64> {
        self.axes.iter().zip(&self.signs).map(|(a, s)| a - s * lambda).collect()
    }

    /// Diagonal of the quadratic form of `Q_λ`, i.e. `1 / (a_j - s_j λ)`.
    pub fn member_diag(&self, lambda: f64) -> Result<Vec<f64>> {
        self.denominators(lambda)
            .into_iter()
            .map(|p| {
                if p.abs() < 1e-300 {
                    Err(Error::Degenerate("degenerate family member".into()))
                } else {
                    Ok(1.0 / p)
                }
            })
            .collect()
    }

    /// Tangency polynomial in `λ` (real coefficients, ascending) of the line
    /// `p + t v`: `Σ_{i<j} (v_i p_j - v_j p_i)² Π_{k≠i,j} P_k - Σ_i v_i² Π_{k≠i} P_k`
    /// with `P_k = a_k - s_k λ`.
    pub fn tangency_polynomial(&self, p: &DVector<f64>, v: &DVector<f64>) -> Vec<f64> {
        let d = self.dim();
        let lin = |k: usize| vec![self.axes[k], -self.signs[k]];
        let prod_except = |skip: &[usize]| -> Vec<f64> {
            let mut acc = vec![1.0];
            for k in 0..d {
                if !skip.contains(&k) {
                    acc = poly_mul(&acc, &lin(k));
                }
            }
            acc
        };
        let mut out = vec![0.0; d];
        for i in 0..d {
            for j in (i + 1)..d {
                let w = v[i] * p[j] - v[j] * p[i];
                let term = prod_except(&[i, j]);
                for (k, c) in term.iter().enumerate() {
                    out[k] += w * w * c;
                }
            }
        }
        for i in 0..d {
            let term = prod_except(&[i]);
            for (k, c) in term.iter().enumerate() {
                out[k] -= v[i] * v[i] * c;
            }
        }
        out
    }

    /// Real parameters of the family members tangent to the line `p + t v`.
    pub fn tangency_parameters(&self, p: &DVector<f64>, v: &DVector<f64>) -> Result<Vec<f64>> {
        if p.len() != self.dim() || v.len() != self.dim() {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let c = self.tangency_polynomial(p, v);
        let scale = c.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::Degenerate("tangency polynomial vanishes identically".into()));
        }
        let mut c = c;
        while c.last().is_some_and(|x| x.abs() <= 1e-14 * scale) {
            c.pop();
        }
        let roots = poly::simple_roots(&c)?;
        let mut real: Vec<f64> = roots
            .iter()
            .filter(|z| z.im.abs() <= 1e-8 * z.norm().max(1.0))
            .map(|z| z.re)
            .collect();
        real.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(real)
    }

    /// Tangency point on `Q_λ` of the line `p + t v` and the covector normal
    /// `D_λ A` of `Q_λ` there.
    pub fn tangency_point(&self, lambda: f64, p: &DVector<f64>, v: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let dg = DVector::from_vec(self.member_diag(lambda)?);
        let pdv: f64 = (0..self.dim()).map(|j| p[j] * dg[j] * v[j]).sum();
        let vdv: f64 = (0..self.dim()).map(|j| v[j] * dg[j] * v[j]).sum();
        if vdv.abs() < 1e-300 {
            return Err(Error::Degenerate("line direction is asymptotic to the member".into()));
        }
        let t = -pdv / vdv;
        let point = p + v * t;
        let normal = point.component_mul(&dg);
        Ok((point, normal))
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Outcome of a Poncelet closure experiment.
#[derive(Debug, Clone, Serialize)]
pub struct PonceletReport {
    /// Closure residual per starting point (projective distance).
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Every start closed within the tolerance.
    pub closes: bool,
    /// Either all starts closed or none did.
    pub porism_holds: bool,
    /// Some tangent construction required complex arithmetic.
    pub complex_path: bool,
    /// Mean rotation number over the starts (ellipse `C`, real path only).
    pub rotation_number: Option<f64>,
}

/// Run Poncelet's construction for `n` steps between conics `c` (outer) and
/// `d` (inner) from each start point on `c` and measure the gap.
pub fn poncelet_closure(
    c: &Quadric<f64>,
    d: &Quadric<f64>,
    n: usize,
    starts: &[Point<f64>],
    tol: f64,
) -> Result<PonceletReport> {
    if c.dim() != 2 || d.dim() != 2 {
        return Err(Error::InvalidInput("Poncelet closure needs planar conics".into()));
    }
    if c.is_degenerate() || d.is_degenerate() {
        return Err(Error::Degenerate("degenerate conic".into()));
    }
    let cc = c.complexify();
    let dd = d.dual()?.complexify();
    let mut residuals = Vec::with_capacity(starts.len());
    let mut complex_path = false;
    let mut rotation_sum = 0.0;
    let mut rotation_ok = is_ellipse(c);
    for s in starts {
        if !c.contains(s, 1e-9) {
            return Err(Error::NotIncident { what: "start point off the outer conic", residual: c.eval(s).abs() });
        }
        let x0 = linalg::complexify(s.coords());
        let steps = poncelet_steps(&cc, &dd, &x0, n)?;
        let mut rot = 0.0;
        for w in steps.windows(2) {
            if w[1].iter().chain(w[0].iter()).any(|z| z.im.abs() > 1e-9 * w[1].norm()) {
                complex_path = true;
                rotation_ok = false;
            }
            if rotation_ok {
                rot += angle_gap(c, &w[0], &w[1]);
            }
        }
        rotation_sum += rot;
        let last = steps.last().expect("n ≥ 1 steps");
        residuals.push(linalg::proj_distance(last, &x0));
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let closed: Vec<bool> = residuals.iter().map(|r| *r < tol).collect();
    let closes = closed.iter().all(|c| *c);
    let porism_holds = closes || closed.iter().all(|c| !c);
    let rotation_number = if rotation_ok && !starts.is_empty() {
        Some(rotation_sum / starts.len() as f64 / n as f64)
    } else {
        None
    };
    Ok(PonceletReport { residuals, max_residual, closes, porism_holds, complex_path, rotation_number })
}

fn is_ellipse(c: &Quadric<f64>) -> bool {
    let m = c.matrix();
    let det2 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(0, 1)];
    det2 > 0.0
}

/// Normalized counter-clockwise angular gap about the conic's center.
fn angle_gap(c: &Quadric<f64>, p: &DVector<Complex64>, q: &DVector<Complex64>) -> f64 {
    let m = c.matrix();
    let a2 = nalgebra::Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let rhs = nalgebra::Vector2::new(-m[(0, 2)], -m[(1, 2)]);
    let center = a2.lu().solve(&rhs).unwrap_or(nalgebra::Vector2::zeros());
    let ang = |v: &DVector<Complex64>| {
        let w = v[2].re;
        (v[1].re / w - center[1]).atan2(v[0].re / w - center[0])
    };
    let gap = (ang(q) - ang(p)) / std::f64::consts::TAU;
    gap.rem_euclid(1.0)
}

/// Poncelet iteration: from `x0` on `c`, follow a tangent to the conic
/// whose dual matrix is `d_dual`, take the second intersection with `c`,
/// switch to the other tangent there, and so on. Returns `n + 1` points.
pub fn poncelet_steps(
    c: &Quadric<Complex64>,
    d_dual: &Quadric<Complex64>,
    x0: &DVector<Complex64>,
    n: usize,
) -> Result<Vec<DVector<Complex64>>> {
    let mut pts = vec![linalg::unit(x0)];
    let mut incoming: Option<DVector<Complex64>> = None;
    for _ in 0..n {
        let x = pts.last().unwrap().clone();
        let tangents = tangent_lines_through(d_dual, &x)?;
        let line = match &incoming {
            None => tangents[0].clone(),
            Some(l) => {
                // The other tangent: the one farther from the incoming line.
                let d0 = linalg::proj_distance(&tangents[0], l);
                let d1 = linalg::proj_distance(&tangents[1], l);
                if d0 >= d1 { tangents[0].clone() } else { tangents[1].clone() }
            }
        };
        let y = second_intersection(c, &line, &x)?;
        incoming = Some(line);
        pts.push(y);
    }
    Ok(pts)
}

/// The two tangent lines (covectors) through `x` to the conic with dual `d_dual`.
pub fn tangent_lines_through(d_dual: &Quadric<Complex64>, x: &DVector<Complex64>) -> Result<[DVector<Complex64>; 2]> {
    let (la, lb) = kernel_pair3(x);
    let q = d_dual.matrix();
    let aa = dot(&la, &(q * &la));
    let ab = dot(&la, &(q * &lb)) * 2.0;
    let bb = dot(&lb, &(q * &lb));
    let roots = homogeneous_quadratic_roots(aa, ab, bb)
        .ok_or_else(|| Error::Degenerate("every line through the point is tangent".into()))?;
    let mk = |(s, t): (Complex64, Complex64)| linalg::unit(&(la.map(|v| v * s) + lb.map(|v| v * t)));
    Ok([mk(roots[0]), mk(roots[1])])
}

/// Second intersection with the conic `c` of a line through `x ∈ c`.
pub fn second_intersection(
    c: &Quadric<Complex64>,
    line: &DVector<Complex64>,
    x: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    // A second point on the line, chosen far from x.
    let (p, q) = kernel_pair3(line);
    let y = if linalg::proj_distance(&p, x) >= linalg::proj_distance(&q, x) { p } else { q };
    let m = c.matrix();
    let xcy = dot(x, &(m * &y));
    let ycy = dot(&y, &(m * &y));
    let xcx = dot(x, &(m * x));
    // (x + μ y)^T C (x + μ y) = xcx + 2μ xcy + μ² ycy with xcx ≈ 0.
    let out = if ycy.norm() <= 1e-14 * (xcy.norm() + 1e-300) {
        // Second intersection at y's direction infinity limit: y itself is on c.
        y
    } else {
        let mu = -(xcy * 2.0) / ycy;
        let _ = xcx;
        x + y.map(|v| v * mu)
    };
    let n = out.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::NoIntersection("tangent line meets the conic only at the start".into()));
    }
    Ok(out.unscale(n))
}

/// Start points `(√a cos θ, √b sin θ)` on an ellipse at equispaced angles
/// offset by `phase`.
pub fn ellipse_starts(a: f64, b: f64, count: usize, phase: f64) -> Vec<Point<f64>> {
    (0..count)
        .map(|i| {
            let t = phase + std::f64::consts::TAU * i as f64 / count as f64;
            Point::from_affine(&[a.sqrt() * t.cos(), b.sqrt() * t.sin()])
        })
        .collect()
}

/// Verdict of [`converse_joachimsthal_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JoachimsthalVerdict {
    SameLine,
    MirrorPair,
    Neither,
}

/// Given two directions at `p` on the conic with equal Joachimsthal values,
/// decide whether they span the same line or are mirror images under the
/// complex reflection about the tangent.
pub fn converse_joachimsthal_check(
    p: [Complex64; 2],
    v1: [Complex64; 2],
    v2: [Complex64; 2],
    a: f64,
    b: f64,
    tol: f64,
) -> Result<JoachimsthalVerdict> {
    let j1 = joachimsthal(p, v1, a, b, tol)?;
    let j2 = joachimsthal(p, v2, a, b, tol)?;
    if (j1 - j2).norm() > 1e-8 * j1.norm().max(1.0) {
        return Err(Error::InvalidInput("the Joachimsthal values differ".into()));
    }
    // Tangent direction at p: orthogonal (bilinearly) to (x/a, y/b).
    let t = [-p[1] / b, p[0] / a];
    let qt = t[0] * t[0] + t[1] * t[1];
    if qt.norm() <= 1e-12 * (t[0].norm().powi(2) + t[1].norm().powi(2)) {
        return Err(Error::Isotropic("tangent at p is isotropic".into()));
    }
    let parallel = |u: [Complex64; 2], w: [Complex64; 2]| {
        let cr = u[0] * w[1] - u[1] * w[0];
        cr.norm() <= 1e-8 * (u[0].norm() + u[1].norm()) * (w[0].norm() + w[1].norm())
    };
    if parallel(v1, v2) {
        return Ok(JoachimsthalVerdict::SameLine);
    }
    let qvt = v1[0] * t[0] + v1[1] * t[1];
    let k = qvt * 2.0 / qt;
    let mirrored = [t[0] * k - v1[0], t[1] * k - v1[1]];
    if parallel(mirrored, v2) {
        Ok(JoachimsthalVerdict::MirrorPair)
    } else {
        Ok(JoachimsthalVerdict::Neither)
    }
}

/// Parse-free helper: `a/b` as an exact rational from integers.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn exact_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("{x} is not finite")))
}

/// Helper for tests and reports: `λ` as `f64` when real.
pub fn real_part_if_real(z: Complex64) -> Option<f64> {
    if z.im.abs() <= 1e-9 * z.norm().max(1.0) {
        Some(z.re)
    } else {
        None
    }
}

/// Roots of `μ_n B^n` of a given class, as reals, ascending.
pub fn real_roots_of_class(report: &CausticReport, class: CausticClass) -> Vec<f64> {
    let mut v: Vec<f64> = report
        .roots
        .iter()
        .filter(|r| r.class == class)
        .filter_map(|r| real_part_if_real(r.lambda))
        .collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

/// Covector of the line through two affine points of the plane.
pub fn line_through_affine(p: [f64; 2], q: [f64; 2]) -> [f64; 3] {
    let c = cross3(&DVector::from_vec(vec![p[0], p[1], 1.0]), &DVector::from_vec(vec![q[0], q[1], 1.0]));
    [c[0], c[1], c[2]]
}

/// `f64` value of an exact rational root list, for comparisons.
pub fn to_f64_vec(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_coefficients() {
        assert_eq!(sqrt_series_coeff(0), ratio(1, 1));
        assert_eq!(sqrt_series_coeff(1), ratio(1, 2));
        assert_eq!(sqrt_series_coeff(2), ratio(-1, 8));
        assert_eq!(sqrt_series_coeff(3), ratio(1, 16));
    }

    #[test]
    fn four_caustics_example() {
        let r = four_caustics_closed_form(2.0, 1.0).unwrap();
        assert_eq!(r, [-2.0, 2.0 / 3.0, 2.0]);
    }

    #[test]
    fn three_caustics_example() {
        let r = three_caustics_closed_form(2.0, 1.0).unwrap();
        let s3 = 3f64.sqrt();
        assert!((r[0] - (-2.0 * (3.0 + 2.0 * s3))).abs() < 1e-12);
        assert!((r[1] - (-2.0 * (3.0 - 2.0 * s3))).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_reject_poles() {
        assert!(three_caustics_closed_form(1.0, 1.0).is_err());
        assert!(four_caustics_closed_form(1.0, -1.0).is_err());
    }

    #[test]
    fn joachimsthal_unit_circle() {
        let s = 3f64.sqrt();
        let p = joachimsthal([1.0, 0.0], [-1.5, s / 2.0], 1.0, 1.0, 1e-10).unwrap();
        assert!((p - 0.75).abs() < 1e-14);
    }

    #[test]
    fn joachimsthal_rejects_isotropic_direction() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let r = joachimsthal([one, zero], [one, i], 1.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::Isotropic(_))));
    }

    #[test]
    fn tangency_of_horizontal_line() {
        // y = 1/2 is tangent to the circle of radius 1/2 in the unit-circle family.
        let lam = tangency_parameter_planar([0.0, 1.0, -0.5], 1.0, 1.0).unwrap();
        assert!((lam - 0.75).abs() < 1e-14);
    }

    #[test]
    fn general_tangency_matches_planar_formula() {
        let fam = ConfocalFamily::euclidean(&[3.0, 1.5]);
        let p = DVector::from_vec(vec![0.3, -0.2]);
        let v = DVector::from_vec(vec![1.0, 0.7]);
        let lams = fam.tangency_parameters(&p, &v).unwrap();
        let l = line_through_affine([0.3, -0.2], [1.3, 0.5]);
        let expected = tangency_parameter_planar(l, 3.0, 1.5).unwrap();
        assert_eq!(lams.len(), 1);
        assert!((lams[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn n2_rejected() {
        assert!(caustic_polynomial(2, &ratio(2, 1), &ratio(1, 1)).is_err());
    }
}
