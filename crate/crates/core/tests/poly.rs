use g2ambient_core::poly::{parse_jet, parse_polynomial};
use g2ambient_core::{q, Error, Jet, JetSpace, Scalar, Q};
use proptest::prelude::*;

const NAMES: [&str; 5] = ["x", "y", "z", "p", "q"];

#[test]
fn rational_coefficients_are_exact() {
    let sp = JetSpace::get(5, 6);
    let j = parse_polynomial("3/7*x*q^5 - 2*y + 1/2", &NAMES, &sp).unwrap();
    assert_eq!(j.coeff(&[1, 0, 0, 0, 5]), q(3, 7));
    assert_eq!(j.coeff(&[0, 1, 0, 0, 0]), q(-2, 1));
    assert_eq!(j.constant_term(), q(1, 2));
    assert!(j.is_exact());
}

#[test]
fn both_power_operators_and_parentheses() {
    let sp = JetSpace::get(5, 6);
    let a = parse_polynomial("(x + q)**3", &NAMES, &sp).unwrap();
    let b = parse_polynomial("x^3 + 3*x^2*q + 3*x*q^2 + q^3", &NAMES, &sp).unwrap();
    assert_eq!(a, b);
}

#[test]
fn decimal_literals_are_rational() {
    let sp = JetSpace::get(5, 2);
    let j = parse_polynomial("0.25*p - -1.5", &NAMES, &sp).unwrap();
    assert_eq!(j.coeff(&[0, 0, 0, 1, 0]), q(1, 4));
    assert_eq!(j.constant_term(), q(3, 2));
}

#[test]
fn division_by_series_gives_inverse() {
    let sp = JetSpace::get(2, 6);
    let j = parse_jet("1/(1 - a)", &["a", "b"], &sp).unwrap();
    for k in 0..=6u8 {
        assert_eq!(j.coeff(&[k, 0]), Q::one());
    }
    assert!(!j.is_exact());
    assert!(parse_polynomial("1/(1 - a)", &["a", "b"], &sp).is_err());
}

#[test]
fn over_order_polynomial_is_rejected_by_strict_parse() {
    let sp = JetSpace::get(5, 3);
    assert!(parse_polynomial("q^4", &NAMES, &sp).is_err());
    assert!(parse_jet("q^4", &NAMES, &sp).is_ok());
}

#[test]
fn malformed_inputs_are_invalid() {
    let sp = JetSpace::get(5, 4);
    for bad in ["", "x +", "(x", "x)", "w", "x^-1", "x^y", "3 $ x", "1/0", "1/x", "1..2"] {
        match parse_jet(bad, &NAMES, &sp) {
            Err(Error::InvalidInput(_)) => {}
            other => panic!("{bad:?} gave {other:?}"),
        }
    }
}

#[test]
fn name_count_must_match_space() {
    let sp = JetSpace::get(3, 2);
    assert!(matches!(parse_jet("x", &NAMES, &sp), Err(Error::Dimension(_))));
}

proptest! {
    #[test]
    fn canonical_text_round_trips(coefs in prop::collection::vec(-20i64..20, 10), den in 1i64..9) {
        let sp = JetSpace::get(2, 3);
        let mut terms = Vec::new();
        let mut text = String::from("0");
        let mut k = 0;
        for a in 0..=3u8 {
            for b in 0..=(3 - a) {
                let c = q(coefs[k], den);
                k += 1;
                terms.push((vec![a, b], c.clone()));
                text.push_str(&format!(" + ({c})*u^{a}*v^{b}"));
            }
        }
        let expected = Jet::from_terms(&sp, &terms);
        let parsed = parse_polynomial(&text, &["u", "v"], &sp).unwrap();
        prop_assert_eq!(&parsed, &expected);
        let shown = parsed.display_with(&["u", "v"]);
        let again = parse_polynomial(&shown, &["u", "v"], &sp).unwrap();
        prop_assert_eq!(again, expected);
    }
}

#[test]
fn bound_names_expand_about_a_point() {
    use g2ambient_core::poly::parse_jet_bound;
    let sp = JetSpace::get(1, 4);
    let shifted = Jet::var(&sp, 0).add_scalar(&Q::one());
    let j = parse_jet_bound("t^3", &[("t", shifted)], &sp).unwrap();
    for (k, c) in [1, 3, 3, 1].into_iter().enumerate() {
        assert_eq!(j.coeff(&[k as u8]), q(c, 1));
    }
    let other = JetSpace::get(2, 4);
    assert!(parse_jet_bound("t", &[("t", Jet::var(&other, 0))], &sp).is_err());
}
