//! Independent reference formulas shared by the integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use projbill::poly::RatPoly;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn c(v: BigRational) -> RatPoly {
    RatPoly::constant(v)
}

/// `Σ c_k X^k` from integer-coefficient closures, built independently.
pub fn expected_b3(a: &BigRational, b: &BigRational) -> RatPoly {
    let x = RatPoly::x();
    let ab = a * b;
    let d = a - b;
    let two = q(2, 1);
    let three = q(3, 1);
    &(&(&x * &x).scale(&(&d * &d)) + &x.scale(&(&two * &ab * (a + b)))) - &c(&three * &ab * &ab)
}

pub fn expected_b4(a: &BigRational, b: &BigRational) -> RatPoly {
    let x = RatPoly::x();
    let ab = a * b;
    let d2 = (a - b) * (a - b);
    let s = a + b;
    let x2 = &x * &x;
    let x3 = &x2 * &x;
    let t3 = x3.scale(&(&s * &d2));
    let t2 = x2.scale(&(&ab * &d2));
    let t1 = x.scale(&(&ab * &ab * &s));
    let t0 = c(&ab * &ab * &ab);
    &(&(&t3 - &t2) - &t1) + &t0
}

pub fn expected_b5(a: &BigRational, b: &BigRational) -> RatPoly {
    let x = RatPoly::x();
    let ab = a * b;
    let d2 = (a - b) * (a - b);
    let s = a + b;
    let pw = |v: &BigRational, e: u32| (0..e).fold(q(1, 1), |acc, _| acc * v);
    let xp = |e: u32| x.pow(e);
    let i = |v: i64| q(v, 1);
    let k6 = pw(&d2, 3);
    let k5 = i(2) * &ab * (i(3) * a + b) * (a + i(3) * b) * &s * &d2;
    let k4 = -(pw(&ab, 2) * (i(29) * a * a + i(54) * a * b + i(29) * b * b) * &d2);
    let k3 = i(36) * pw(&ab, 3) * &s * &d2;
    let k2 = -(pw(&ab, 4) * (i(9) * a * a - i(34) * a * b + i(9) * b * b));
    let k1 = -(i(10) * pw(&ab, 5) * &s);
    let k0 = i(5) * pw(&ab, 6);
    [k0, k1, k2, k3, k4, k5, k6]
        .into_iter()
        .enumerate()
        .fold(RatPoly::zero(), |acc, (e, k)| &acc + &xp(e as u32).scale(&k))
}

