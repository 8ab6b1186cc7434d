//! Exact identities for the normalized caustic polynomials.

use num_rational::BigRational;
use projbill::caustics::{
    cayley_b_coeff, circle_degree, four_caustics_exact, generic_degree, normalized_caustic_polynomial,
    sqrt_series_coeff, three_caustics_exact,
};
mod common;

use common::{expected_b3, expected_b4, expected_b5, q};

fn samples() -> Vec<(BigRational, BigRational)> {
    vec![
        (q(2, 1), q(1, 1)),
        (q(3, 1), q(8, 1)),
        (q(5, 3), q(-7, 2)),
        (q(1, 7), q(11, 5)),
    ]
}

#[test]
fn normalized_polynomials_match_closed_forms() {
    for (a, b) in samples() {
        assert_eq!(normalized_caustic_polynomial(3, &a, &b).unwrap(), expected_b3(&a, &b));
        assert_eq!(normalized_caustic_polynomial(4, &a, &b).unwrap(), expected_b4(&a, &b));
        assert_eq!(normalized_caustic_polynomial(5, &a, &b).unwrap(), expected_b5(&a, &b));
    }
}

#[test]
fn degrees() {
    for n in 3..=8u32 {
        let p = normalized_caustic_polynomial(n, &q(7, 3), &q(2, 5)).unwrap();
        assert_eq!(p.degree().unwrap() as u32, generic_degree(n), "n = {n}");
        let p = normalized_caustic_polynomial(n, &q(7, 3), &q(7, 3)).unwrap();
        assert_eq!(p.degree().unwrap() as u32, circle_degree(n), "circle n = {n}");
    }
}

#[test]
fn exact_closed_form_roots() {
    let (a, b) = (q(3, 1), q(8, 1));
    for r in three_caustics_exact(&a, &b).unwrap() {
        assert!(normalized_caustic_polynomial(3, &a, &b).unwrap().eval(&r) == q(0, 1));
    }
    for r in four_caustics_exact(&a, &b).unwrap() {
        assert!(normalized_caustic_polynomial(4, &a, &b).unwrap().eval(&r) == q(0, 1));
    }
    let _ = (cayley_b_coeff(2, &a, &b), sqrt_series_coeff(2));
}
