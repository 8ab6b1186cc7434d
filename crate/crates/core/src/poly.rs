//! Exact univariate polynomials over the rationals, fraction-free
//! determinants of polynomial matrices, and numerical root isolation.
//!
//! Coefficients are stored in ascending order of powers.
//!
//! ```
//! use projbill::poly::RatPoly;
//! let x = RatPoly::x();
//! let p = &(&x * &x) - &RatPoly::from_i64(4); // x² - 4
//! let (q, r) = p.div_rem(&(&x - &RatPoly::from_i64(2))).unwrap();
//! assert!(r.is_zero());
//! assert_eq!(q, &x + &RatPoly::from_i64(2));
//! ```

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Polynomial with `BigRational` coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq)]
pub struct RatPoly {
    c: Vec<BigRational>,
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(|q| q.to_string()).collect();
        write!(f, "RatPoly[{}]", parts.join(", "))
    }
}

/// Descending form such as `X^2 + 12X - 12`; non-integer coefficients are parenthesized.
impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, q) in self.c.iter().enumerate().rev() {
            if q.is_zero() {
                continue;
            }
            let neg = q.is_negative();
            let mag = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && k > 0;
            if !unit {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else if k > 0 {
                    write!(f, "({mag})")?;
                } else {
                    write!(f, "{mag}")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "X")?,
                _ => write!(f, "X^{k}")?,
            }
        }
        Ok(())
    }
}

impl RatPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RatPoly { c }
    }

    pub fn zero() -> Self {
        RatPoly { c: Vec::new() }
    }

    pub fn constant(q: BigRational) -> Self {
        Self::new(vec![q])
    }

    pub fn from_i64(v: i64) -> Self {
        Self::constant(BigRational::from_integer(v.into()))
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_i64_coeffs(c: &[i64]) -> Self {
        Self::new(c.iter().map(|v| BigRational::from_integer((*v).into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.c.last()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = RatPoly::from_i64(1);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, x)| x * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.to_f64().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.c.iter().map(rational_to_f64).collect()
    }

    /// Euclidean division; errors on division by zero.
    pub fn div_rem(&self, d: &RatPoly) -> Result<(RatPoly, RatPoly)> {
        let dd = d.degree().ok_or_else(|| Error::InvalidInput("division by the zero polynomial".into()))?;
        let lead = d.c[dd].clone();
        let mut r = self.c.clone();
        let n = self.c.len();
        if n < dd + 1 {
            return Ok((RatPoly::zero(), self.clone()));
        }
        let mut q = vec![BigRational::zero(); n - dd];
        for k in (0..(n - dd)).rev() {
            let coef = &r[k + dd] / &lead;
            if !coef.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] = &r[k + j] - &coef * dj;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        Ok((RatPoly::new(q), RatPoly::new(r)))
    }

    /// Exact quotient; errors when the division leaves a remainder.
    pub fn exact_div(&self, d: &RatPoly) -> Result<RatPoly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::Invariant("non-exact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> RatPoly {
        match self.leading() {
            None => RatPoly::zero(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Primitive integer coefficients (ascending), positive leading coefficient.
    pub fn integer_normalized(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self
            .c
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = self.c.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.iter().map(|v| v / &g * &sign).collect()
    }

    /// Square-free decomposition `p = c · Π f_k^k`; returns `(f_k, k)` pairs
    /// with non-constant monic `f_k`.
    pub fn square_free_factors(&self) -> Vec<(RatPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        // Yun's algorithm.
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.exact_div(&a0).expect("gcd divides");
        let mut c = fp.exact_div(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut k = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.exact_div(&a).expect("gcd divides");
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.exact_div(&a).expect("gcd divides");
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, o: &RatPoly) -> RatPoly {
        let n = self.c.len().max(o.c.len());
        let z = BigRational::zero();
        RatPoly::new(
            (0..n)
                .map(|k| self.c.get(k).unwrap_or(&z) + o.c.get(k).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, o: &RatPoly) -> RatPoly {
        self + &(-o)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.c.iter().map(|x| -x).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to scaling for very large numerators/denominators.
    let n = q.numer().bits() as i64;
    let d = q.denom().bits() as i64;
    let shift = n - d;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::one() << (shift as usize))
    } else {
        q * BigRational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Determinant of a square matrix of polynomials by Bareiss fraction-free
/// elimination; every intermediate division is exact.
pub fn bareiss_det(m: &[Vec<RatPoly>]) -> Result<RatPoly> {
    let n = m.len();
    if n == 0 {
        return Ok(RatPoly::from_i64(1));
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
    }
    let mut a: Vec<Vec<RatPoly>> = m.to_vec();
    let mut prev = RatPoly::from_i64(1);
    let mut sign = false;
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(RatPoly::zero()),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign { -&det } else { det })
}

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// All complex roots of an exact polynomial with multiplicities.
///
/// Multiplicities come from an exact square-free decomposition; each
/// square-free factor is solved through the eigenvalues of its scaled
/// companion matrix and polished by Newton's method. Roots closer than
/// `dedup_tol` (relative) are merged.
pub fn roots(p: &RatPoly, dedup_tol: f64) -> Result<Vec<Root>> {
    if p.is_zero() {
        return Err(Error::Degenerate("roots of the zero polynomial".into()));
    }
    let mut out: Vec<Root> = Vec::new();
    for (factor, mult) in p.square_free_factors() {
        for z in simple_roots(&factor.to_f64())? {
            match out.iter_mut().find(|r| (r.value - z).norm() <= dedup_tol * z.norm().max(1.0)) {
                Some(r) => r.multiplicity += mult,
                None => out.push(Root { value: z, multiplicity: mult }),
            }
        }
    }
    out.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Roots of a polynomial (ascending `f64` coefficients) assumed to have
/// simple roots.
pub fn simple_roots(c: &[f64]) -> Result<Vec<Complex64>> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|x| *x == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    // Scale x = s·y so that the root bound of the y-polynomial is O(1).
    let s = (0..n)
        .filter(|&k| monic[k] != 0.0)
        .map(|k| monic[k].abs().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max);
    let s = if s > 0.0 { s } else { 1.0 };
    let scaled: Vec<f64> = (0..=n).map(|k| monic[k] * s.powi(k as i32 - n as i32)).collect();
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -scaled[i];
    }
    let eig = comp.complex_eigenvalues();
    let horner = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in scaled.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let mut roots = Vec::with_capacity(n);
    for z0 in eig.iter() {
        let mut z = *z0;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Convergence("companion eigenvalues are not finite".into()));
        }
        for _ in 0..60 {
            let (p, dp) = horner(z);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            let zn = z - step;
            if horner(zn).0.norm() > p.norm() && step.norm() > 1e-15 * z.norm().max(1.0) {
                break;
            }
            z = zn;
            if step.norm() <= 1e-16 * z.norm().max(1e-300) {
                break;
            }
        }
        // Snap nearly real roots onto the real axis when a real Newton
        // iteration confirms them.
        if z.im.abs() <= 1e-7 * z.norm().max(1.0) {
            let mut x = z.re;
            let mut ok = false;
            for _ in 0..60 {
                let (p, dp) = horner(Complex64::new(x, 0.0));
                if dp.re == 0.0 {
                    break;
                }
                let step = p.re / dp.re;
                x -= step;
                if step.abs() <= 1e-15 * x.abs().max(1e-300) {
                    ok = true;
                    break;
                }
            }
            if ok && (x - z.re).abs() <= 1e-6 * z.norm().max(1.0) {
                z = Complex64::new(x, 0.0);
            }
        }
        roots.push(z * s);
    }
    // Two approximations collapsing onto one real value means the snap was
    // wrong: keep the raw eigenvalues in that case.
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if (roots[i] - roots[j]).norm() <= 1e-12 * roots[i].norm().max(1.0) {
                let raw: Vec<Complex64> = eig.iter().map(|z| z * s).collect();
                return Ok(raw);
            }
        }
    }
    Ok(roots)
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn display_descending() {
        let p = RatPoly::from_i64_coeffs(&[-12, 12, 1]);
        assert_eq!(p.to_string(), "X^2 + 12X - 12");
        let q = RatPoly::new(vec![BigRational::new(1.into(), 2.into()), BigRational::from_integer((-1).into())]);
        assert_eq!(q.to_string(), "-X + 1/2");
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let x = RatPoly::x();
        let one = RatPoly::from_i64(1);
        let two = RatPoly::from_i64(2);
        let m = vec![
            vec![x.clone(), one.clone(), two.clone()],
            vec![one.clone(), &x * &x, x.clone()],
            vec![two.clone(), x.clone(), one.clone()],
        ];
        // Cofactor expansion along the first row.
        let minor = |a: &RatPoly, b: &RatPoly, c: &RatPoly, d: &RatPoly| &(a * d) - &(b * c);
        let expected = &(&(&x * &minor(&m[1][1], &m[1][2], &m[2][1], &m[2][2]))
            - &(&one * &minor(&m[1][0], &m[1][2], &m[2][0], &m[2][2])))
            + &(&two * &minor(&m[1][0], &m[1][1], &m[2][0], &m[2][1]));
        assert_eq!(bareiss_det(&m).unwrap(), expected);
    }

    #[test]
    fn bareiss_handles_zero_pivot() {
        let z = RatPoly::zero();
        let one = RatPoly::from_i64(1);
        let m = vec![vec![z.clone(), one.clone()], vec![one.clone(), z.clone()]];
        assert_eq!(bareiss_det(&m).unwrap(), RatPoly::from_i64(-1));
    }

    #[test]
    fn square_free_detects_multiplicity() {
        // (x - 1)^3 (x + 2)
        let x = RatPoly::x();
        let a = &x - &RatPoly::from_i64(1);
        let b = &x + &RatPoly::from_i64(2);
        let p = &a.pow(3) * &b;
        let rs = roots(&p, 1e-8).unwrap();
        assert_eq!(rs.len(), 2);
        let one = rs.iter().find(|r| (r.value.re - 1.0).abs() < 1e-12).unwrap();
        assert_eq!(one.multiplicity, 3);
    }

    #[test]
    fn integer_normalization() {
        let p = RatPoly::new(vec![q(-1, 2), q(0, 1), q(-3, 4)]);
        let ints: Vec<i64> = p.integer_normalized().iter().map(|v| v.to_i64().unwrap()).collect();
        assert_eq!(ints, vec![2, 0, 3]);
    }

    #[test]
    fn roots_with_wide_magnitudes() {
        // (x - 1e-3)(x - 1e3)(x^2 + 1)
        let c = [1.0, -1000.001, 1.0, -1000.001, 1.0];
        let p = RatPoly::new(c.iter().map(|v| BigRational::from_float(*v).unwrap()).collect());
        let rs = roots(&p, 1e-8).unwrap();
        assert_eq!(rs.len(), 4);
        for r in rs {
            let v = p.eval_c64(r.value).norm();
            assert!(v < 1e-6 * (1.0 + r.value.norm().powi(4)), "residual {v}");
        }
    }

    #[test]
    fn perfect_square_detection() {
        assert_eq!(rational_sqrt(&q(49, 4)), Some(q(7, 2)));
        assert_eq!(rational_sqrt(&q(2, 1)), None);
    }
}
