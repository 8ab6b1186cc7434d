//! Small dense linear-algebra helpers shared by the geometric modules.
//!
//! Everything is generic over [`Scalar`], which covers `f64` and
//! `Complex<f64>`. Incidence (`covector · point`) is bilinear; lengths and
//! projections use the Hermitian inner product.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

/// Real or complex floating scalar.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Lift a real vector into complex coordinates.
pub fn complexify(v: &DVector<f64>) -> DVector<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Bilinear pairing `a · b` without conjugation.
pub fn dot<S: Scalar>(a: &DVector<S>, b: &DVector<S>) -> S {
    a.iter().zip(b.iter()).fold(S::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Hermitian inner product `conj(a) · b`.
pub fn hdot<S: Scalar>(a: &DVector<S>, b: &DVector<S>) -> S {
    a.iter()
        .zip(b.iter())
        .fold(S::zero(), |acc, (x, y)| acc + x.conjugate() * *y)
}

pub fn max_modulus<S: Scalar>(v: &DVector<S>) -> f64 {
    v.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}

/// Cross product of two 3-vectors (bilinear, valid over C).
pub fn cross3<S: Scalar>(a: &DVector<S>, b: &DVector<S>) -> DVector<S> {
    assert!(a.len() == 3 && b.len() == 3, "cross3 needs 3-vectors");
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Scale so that the largest-modulus coordinate becomes exactly one.
///
/// Returns `None` for the zero vector.
pub fn normalize_max<S: Scalar>(v: &DVector<S>) -> Option<DVector<S>> {
    let (idx, m) = v
        .iter()
        .enumerate()
        .map(|(i, x)| (i, x.modulus()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if m == 0.0 || !m.is_finite() {
        return None;
    }
    let pivot = v[idx];
    Some(v.map(|x| x / pivot))
}

/// Unit vector in the Hermitian norm.
pub fn unit<S: Scalar>(v: &DVector<S>) -> DVector<S> {
    let n = v.norm();
    v.map(|x| x.unscale(n))
}

/// Sine of the angle between two projective points (0 iff equal).
pub fn proj_distance<S: Scalar>(a: &DVector<S>, b: &DVector<S>) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    // |a ∧ b| / (|a| |b|), accurate near zero unlike 1 - cos².
    let mut acc = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            acc += (a[i] * b[j] - a[j] * b[i]).modulus_squared();
        }
    }
    (acc.sqrt() / (na * nb)).min(1.0)
}

/// Singular values of `m`, descending; wide matrices are padded with zero rows.
pub fn singular_values<S: Scalar>(m: &DMatrix<S>) -> Vec<f64> {
    let sq = pad_rows(m);
    let svd = sq.svd(false, false);
    svd.singular_values.iter().take(m.nrows().min(m.ncols())).copied().collect()
}

fn pad_rows<S: Scalar>(m: &DMatrix<S>) -> DMatrix<S> {
    if m.nrows() >= m.ncols() {
        m.clone()
    } else {
        let mut out = DMatrix::zeros(m.ncols(), m.ncols());
        out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
        out
    }
}

/// Right singular vector for the smallest singular value, together with
/// the two smallest singular values (smallest first).
pub fn null_vector<S: Scalar>(m: &DMatrix<S>) -> (DVector<S>, f64, f64) {
    let sq = pad_rows(m);
    let n = sq.ncols();
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let k = n - 1;
    let row = vt.row(k).transpose();
    // v_t rows are conjugated right singular vectors.
    let v = row.map(|x| x.conjugate());
    let s_min = sv[k];
    let s_next = if n >= 2 { sv[k - 1] } else { f64::INFINITY };
    (v, s_min, s_next)
}

/// Numerical rank with a tolerance relative to the largest singular value.
pub fn numerical_rank<S: Scalar>(m: &DMatrix<S>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * top).count()
}

/// Orthonormal basis (Hermitian) of the span of `vs`, dropping dependent vectors.
pub fn orthonormal_basis<S: Scalar>(vs: &[DVector<S>], rel_tol: f64) -> Vec<DVector<S>> {
    let mut basis: Vec<DVector<S>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = hdot(b, &w);
                w -= b.map(|x| x * c);
            }
        }
        let n = w.norm();
        if n > rel_tol * v.norm().max(f64::MIN_POSITIVE) {
            basis.push(w.map(|x| x.unscale(n)));
        }
    }
    basis
}

/// Relative distance of `v` from the span of an orthonormal `basis`.
pub fn span_residual<S: Scalar>(basis: &[DVector<S>], v: &DVector<S>) -> f64 {
    let nv = v.norm();
    if nv == 0.0 {
        return 0.0;
    }
    let mut w = v.clone();
    for b in basis {
        let c = hdot(b, &w);
        w -= b.map(|x| x * c);
    }
    w.norm() / nv
}

/// The two smallest-magnitude entries of a 3-covector pick a well-conditioned
/// pair of points spanning its kernel.
pub fn kernel_pair3<S: Scalar>(c: &DVector<S>) -> (DVector<S>, DVector<S>) {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| c[i].modulus().partial_cmp(&c[j].modulus()).unwrap());
    let e = |k: usize| {
        let mut v = DVector::zeros(3);
        v[k] = S::one();
        v
    };
    (cross3(c, &e(idx[0])), cross3(c, &e(idx[1])))
}

/// Roots `(s : t)` of the homogeneous quadratic `A s² + B s t + C t² = 0`.
///
/// Returns `None` when all three coefficients vanish.
pub fn homogeneous_quadratic_roots(
    a: Complex64,
    b: Complex64,
    c: Complex64,
) -> Option<[(Complex64, Complex64); 2]> {
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale == 0.0 {
        return None;
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    let disc = (b * b - 4.0 * a * c).sqrt();
    // Stable form: q = -(b + sign·disc)/2 with the sign avoiding cancellation.
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) / 2.0
    } else {
        -(b - disc) / 2.0
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if a.norm() < 1e-300 && q.norm() < 1e-300 {
        // b = 0 and a = 0: only c t² = 0, double root (1 : 0).
        return Some([(one, zero), (one, zero)]);
    }
    // Roots of a r² + b r + c with r = s/t: r1 = q/a, r2 = c/q.
    let r1 = if a.norm() >= 1e-300 { (q, a) } else { (one, zero) };
    let r2 = if q.norm() >= 1e-300 { (c, q) } else { (one, zero) };
    let norm = |(s, t): (Complex64, Complex64)| {
        let m = s.norm().max(t.norm());
        (s / m, t / m)
    };
    Some([norm(r1), norm(r2)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_orthogonal() {
        let a = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let b = DVector::from_vec(vec![-1.0, 0.5, 2.0]);
        let c = cross3(&a, &b);
        assert!(dot(&a, &c).abs() < 1e-14 && dot(&b, &c).abs() < 1e-14);
    }

    #[test]
    fn quadratic_roots_satisfy_equation() {
        let (a, b, c) = (
            Complex64::new(2.0, 1.0),
            Complex64::new(-3.0, 0.5),
            Complex64::new(1.0, -2.0),
        );
        for (s, t) in homogeneous_quadratic_roots(a, b, c).unwrap() {
            assert!((a * s * s + b * s * t + c * t * t).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_roots_at_infinity() {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        // s t = 0 has roots (1:0) and (0:1).
        let r = homogeneous_quadratic_roots(z, one, z).unwrap();
        let zeros: Vec<_> = r.iter().map(|(s, t)| (s * t).norm()).collect();
        assert!(zeros.iter().all(|v| *v < 1e-14));
        assert!((r[0].0 - r[1].0).norm() > 0.5 || (r[0].1 - r[1].1).norm() > 0.5);
    }

    #[test]
    fn null_vector_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let (v, s, _) = null_vector(&m);
        assert!(s < 1e-14);
        assert!((v[0] + v[1]).abs() < 1e-14);
    }
}
