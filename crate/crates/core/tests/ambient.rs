mod common;

use common::*;
use g2ambient_core::ambient::*;
use g2ambient_core::geometries::{constant_curvature_chart, einstein_ambient};
use g2ambient_core::linalg::JetMatrix;
use g2ambient_core::tensors::*;
use g2ambient_core::{q, Error, Jet, Scalar, Q};
use proptest::prelude::*;

fn scaled(m: &JetMatrix<Q>, c: &Q) -> JetMatrix<Q> {
    m.iter().map(|r| r.iter().map(|j| j.scale(c)).collect()).collect()
}

#[test]
fn flat_metric_has_constant_ambient_family() {
    for (n, nn) in [(3usize, 2u32), (4, 1), (5, 2)] {
        let g = flat(n, 2 * nn + 1);
        let a = fg_expand(&g, nn).unwrap();
        let series = a.rho_series();
        assert_eq!(series.len(), nn as usize + 1);
        assert!(matrices_agree(&series[0], &g.matrix()));
        for gm in &series[1..] {
            assert!(gm.iter().flatten().all(|j| j.is_zero()));
        }
    }
}

#[test]
fn einstein_seeds_reproduce_squared_linear_family() {
    for (n, nn, k) in [(5usize, 3u32, 6u32), (4, 1, 5), (3, 2, 5)] {
        let lambda = q(1, 3);
        let g = constant_curvature_chart(n, &lambda, k).unwrap();
        let a = fg_expand(&g, nn).unwrap();
        let series = a.rho_series();
        let gm = g.matrix();
        let expected = [Q::one(), lambda.mul(&q(2, 1)), lambda.mul(&lambda)];
        for (m, c) in series.iter().enumerate() {
            let want = if m < 3 { scaled(&gm, &expected[m]) } else { scaled(&gm, &Q::zero()) };
            assert!(matrices_agree(c, &want), "n={n} coefficient {m}");
            assert!(c[0][0].reliable() >= 0, "coefficient {m} carries information");
        }
    }
}

#[test]
fn initial_coefficient_is_twice_schouten_on_random_metrics() {
    for (n, seed) in [(4usize, 11u64), (5, 12)] {
        let g = random_metric(n, 4, 3, seed);
        let a = fg_expand(&g, 1).unwrap();
        let p = schouten(&g).unwrap();
        let g1 = &a.rho_series()[1];
        for i in 0..n {
            for j in 0..n {
                assert!((&g1[i][j] - &p.get(&[i, j]).scale_i(2)).is_zero());
            }
        }
    }
}

#[test]
fn ambient_christoffels_match_generic_formula() {
    let g = random_metric(3, 4, 2, 5);
    let a = fg_expand(&g, 1).unwrap();
    let gam = ambient_christoffel(&a).unwrap();
    let generic = christoffel(&a.metric().unwrap());
    for (x, y) in gam.comps().iter().zip(generic.comps()) {
        assert!((x - y).is_zero());
    }
    // Γ̃^A_∞∞ = 0
    let inf = a.n + 1;
    for c in 0..a.n + 2 {
        assert!(gam.get(&[c, inf, inf]).is_exact_zero() || gam.get(&[c, inf, inf]).is_zero());
    }
}

#[test]
fn flat_ambient_christoffels_at_base_point() {
    let n = 3;
    let a = fg_expand(&flat(n, 3), 1).unwrap();
    let gam = ambient_christoffel(&a).unwrap();
    let inf = n + 1;
    for idx in gam.indices() {
        let v = gam.get(&idx).constant_term();
        let (c, i, j) = (idx[0], idx[1], idx[2]);
        let expected = if (1..=n).contains(&c) && ((i == 0 && j == c) || (j == 0 && i == c)) {
            Q::one()
        } else if c == inf && ((i == 0 && j == inf) || (i == inf && j == 0)) {
            Q::one()
        } else if c == inf && (1..=n).contains(&i) && i == j {
            q(-1, 1)
        } else {
            Q::zero()
        };
        assert_eq!(v, expected, "Gamma{idx:?}");
    }
}

#[test]
fn einstein_ambient_christoffel_zero_component() {
    let lambda = q(-1, 2);
    let g = constant_curvature_chart(4, &lambda, 4).unwrap();
    let (a, _) = einstein_ambient(&g, 2).unwrap();
    let gam = ambient_christoffel(&a).unwrap();
    for i in 1..=4 {
        for j in 1..=4 {
            let want = g.gij(i - 1, j - 1).constant_term().mul(&lambda).neg();
            assert_eq!(gam.get(&[0, i, j]).constant_term(), want);
        }
    }
}

#[test]
fn ricci_order_of_closed_form_and_of_corrupted_family() {
    let g = constant_curvature_chart(5, &q(1, 2), 6).unwrap();
    let (a, _) = einstein_ambient(&g, 2).unwrap();
    let rep = check_ricci_order(&a).unwrap();
    assert_eq!(rep.order, rep.truncation_limit);
    assert!(rep.truncation_limit >= 2);

    let fg = fg_expand(&g, 2).unwrap();
    let rep = check_ricci_order(&fg).unwrap();
    assert!(rep.order >= 2);

    let mut series = fg.rho_series();
    series[2][0][0] = series[2][0][0].add_scalar(&q(1, 1));
    let bad = AmbientMetric::from_series(g.clone(), &series).unwrap();
    assert_eq!(check_ricci_order(&bad).unwrap().order, 1);
}

#[test]
fn solver_output_reaches_requested_ricci_order() {
    let g = random_metric(5, 6, 2, 21);
    let a = fg_expand(&g, 2).unwrap();
    let rep = check_ricci_order(&a).unwrap();
    assert!(rep.order >= 2, "{rep:?}");
}

#[test]
fn even_dimension_refuses_undetermined_orders() {
    let g = flat(4, 6);
    assert!(matches!(fg_expand(&g, 2), Err(Error::AmbiguityNotDetermined(_))));
    assert!(matches!(fg_expand(&flat(2, 4), 1), Err(Error::Dimension(_))));
    assert!(matches!(fg_expand(&flat(5, 2), 2), Err(Error::InsufficientOrder(_))));
}

#[test]
fn odd_dimension_solution_is_independent_of_probe_order() {
    let g = random_metric(3, 5, 2, 3);
    let a = fg_expand(&g, 2).unwrap();
    let b = fg_expand_with_probe_order(&g, 2, &[5, 3, 1, 0, 4, 2]).unwrap();
    for (x, y) in a.g_rho.iter().flatten().zip(b.g_rho.iter().flatten()) {
        assert_eq!(x, y);
    }
}

#[test]
fn ambiguity_is_injected_at_critical_order() {
    let g = random_metric(4, 5, 2, 8);
    let a = fg_expand(&g, 1).unwrap();
    let sp = g.space().clone();
    let mut raw = vec![vec![Jet::zero(&sp); 4]; 4];
    raw[0][1] = Jet::var(&sp, 2);
    raw[1][0] = Jet::var(&sp, 2);
    raw[2][2] = Jet::one(&sp);
    let tf = trace_free(&g, &sym2_from_matrix(Frame::Coord { dim: 4 }, &raw));
    let kappa: JetMatrix<Q> = (0..4).map(|i| (0..4).map(|j| tf.get(&[i, j]).clone()).collect()).collect();
    let with = a.clone().with_ambiguity(kappa.clone()).unwrap();
    assert!(with.kappa.is_some());
    assert!(matrices_agree(&with.rho_series()[2], &kappa));
    // trace part rejected
    let mut bad = kappa.clone();
    bad[0][0] = Jet::one(&sp);
    assert!(a.clone().with_ambiguity(bad).is_err());
    // odd dimension rejected
    let a5 = fg_expand(&flat(5, 3), 1).unwrap();
    assert!(a5.with_ambiguity(vec![vec![Jet::zero(&flat(5, 3).space().clone()); 5]; 5]).is_err());
}

#[test]
fn tangential_ambient_curvature_is_weyl_in_dimension_five() {
    let g = random_metric(5, 6, 2, 9);
    let a = fg_expand(&g, 2).unwrap();
    let rt = &ambient_curvature(&a, 0).unwrap()[0];
    let w = weyl(&g).unwrap();
    let rho = a.rho_var();
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                for l in 0..5 {
                    let amb = rt.get(&[i + 1, j + 1, k + 1, l + 1]).restrict_zero(rho);
                    let d = &amb - &lift_x(w.get(&[i, j, k, l]), a.space()).restrict_zero(rho);
                    assert!(d.is_zero(), "R_{i}{j}{k}{l}");
                }
            }
        }
    }
}

#[test]
fn flat_ambient_curvature_vanishes() {
    let a = fg_expand(&flat(3, 7), 3).unwrap();
    for t in ambient_curvature(&a, 1).unwrap() {
        assert!(t.is_zero());
    }
}

#[test]
fn curvature_identities_hold_on_einstein_and_random_ambients() {
    let g = constant_curvature_chart(5, &q(1, 3), 5).unwrap();
    let a = fg_expand(&g, 2).unwrap();
    let rep = verify_curvature_identities(&a, 2, 2).unwrap();
    assert!(rep.all_zero(), "{}", rep.summary());

    let g = random_metric(4, 4, 2, 13);
    let a = fg_expand(&g, 1).unwrap();
    let rep = verify_curvature_identities(&a, 1, 1).unwrap();
    assert!(rep.all_zero(), "{}", rep.summary());
}

#[test]
fn homogeneity_exponents_follow_zero_index_count() {
    let f = Frame::Ambient { n: 3 };
    let slots = vec![Slot::Lower; 3];
    assert_eq!(f.t_exponent(2, &slots, &[1, 2, 3]), 2);
    assert_eq!(f.t_exponent(2, &slots, &[0, 2, 3]), 1);
    assert_eq!(f.t_exponent(2, &slots, &[0, 0, 4]), 0);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]
    #[test]
    fn initial_term_property(seed in 0u64..10_000, n in 3usize..=4) {
        let g = random_metric(n, 3, 2, seed);
        let a = fg_expand(&g, 1).unwrap();
        let p = schouten(&g).unwrap();
        let g1 = &a.rho_series()[1];
        for i in 0..n {
            for j in 0..n {
                prop_assert!((&g1[i][j] - &p.get(&[i, j]).scale_i(2)).is_zero());
                prop_assert_eq!(&g1[i][j], &g1[j][i]);
            }
        }
    }
}
