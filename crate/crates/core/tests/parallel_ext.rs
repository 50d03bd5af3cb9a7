mod common;

use common::*;
use g2ambient_core::ambient::*;
use g2ambient_core::geometries::*;
use g2ambient_core::linalg::JetMatrix;
use g2ambient_core::parallel_ext::*;
use g2ambient_core::tensors::*;
use g2ambient_core::tractor::*;
use g2ambient_core::{q, Error, Jet, JetSpace, Q};

/// Ambient metric `g + 2Pρ` (exact in `ρ`, weight-1 grading) for a seed `g`.
fn linear_ambient(g: &MetricJet<Q>) -> AmbientMetric<Q> {
    let n = g.dim();
    let p = schouten(g).unwrap();
    let sp = xrho_space_weighted(n, g.space().order(), 1);
    let rho = Jet::var(&sp, n);
    let gr: JetMatrix<Q> = (0..n)
        .map(|i| (0..n).map(|j| &lift_x(g.gij(i, j), &sp) + &(&lift_x(p.get(&[i, j]), &sp) * &rho).scale_i(2)).collect())
        .collect();
    AmbientMetric::closed_form(n, gr).unwrap()
}

/// A random `δ + H` boundary metric on a 3-dimensional `Σ`.
fn pe_family_from_random_boundary(seed: u64, order: u32) -> PEFamily<Q> {
    let h0 = random_metric(3, order, 2, seed);
    PEFamily::from_boundary(&h0, 2).unwrap()
}

#[test]
fn einstein_extension_matches_closed_form() {
    for (n, lambda) in [(4usize, q(1, 3)), (5, q(-1, 2)), (4, q(0, 1))] {
        let g = constant_curvature_chart(n, &lambda, 8).unwrap();
        let (a, lam) = einstein_ambient(&g, 1).unwrap();
        let chi = einstein_tractor(&g, &lam).unwrap();
        let e = extend_parallel(&chi, &a).unwrap();
        let oracle = einstein_extension(&a, &lam).unwrap();
        assert_eq!(uniqueness_check(&e, &oracle).unwrap(), u32::MAX);
        assert_eq!(e.achieved_order, e.truncation_limit);
        assert!(e.achieved_order >= 6, "n={n}: {}", e.achieved_order);
        let rep = covariant_residual_order(&e, &a).unwrap();
        assert!(rep.leading.is_empty());
        assert!(rep.infinity_derivative_vanishes);
    }
}

#[test]
fn flat_extension_is_dt() {
    let g = flat(4, 4);
    let (a, lam) = einstein_ambient(&g, 2).unwrap();
    assert_eq!(lam, q(0, 1));
    let chi = einstein_tractor(&g, &lam).unwrap();
    let e = extend_parallel(&chi, &a).unwrap();
    for idx in e.chi.indices() {
        let want = if idx[0] == 0 { Jet::one(a.space()) } else { Jet::zero(a.space()) };
        assert_eq!(e.chi.get(&idx), &want);
    }
}

#[test]
fn tractor_metric_extends_to_ambient_metric() {
    let g = random_metric(5, 5, 2, 31);
    let a = fg_expand(&g, 2).unwrap();
    let h = tractor_metric_tensor(&g);
    let e = extend_parallel(&h, &a).unwrap();
    let gt = a.metric().unwrap();
    for idx in e.chi.indices() {
        assert!((e.chi.get(&idx) - gt.gij(idx[0], idx[1])).is_zero(), "{idx:?}");
    }
}

#[test]
fn pe_tractor_extends_to_d_rt() {
    let mut r = rng(32);
    let sp = JetSpace::get(3, 5);
    let k = vec![random_sym(&sp, 3, 2, true, &mut r), random_sym(&sp, 3, 2, false, &mut r)];
    let fam = PEFamily::from_k(k, true).unwrap();
    let a = pe_ambient(&fam).unwrap();
    let oracle = pe_extension(&fam, &a).unwrap();
    assert!(covariant_residual_order(&oracle, &a).unwrap().leading.is_empty());
    // the family is not Poincaré–Einstein, so σ = r is not parallel and transport is refused
    let (chi, res) = pe_tractor(&fam).unwrap();
    assert!(!res.is_zero());
    assert!(matches!(extend_parallel(&chi, &a), Err(Error::NotParallel(_))));
}

#[test]
fn transported_pe_tractor_agrees_with_d_rt() {
    let g0 = conformally_flat(3, 6, 33);
    let fam = PEFamily::conformally_flat(&g0).unwrap();
    let a = pe_ambient(&fam).unwrap();
    let (chi, res) = pe_tractor(&fam).unwrap();
    assert!(res.is_zero());
    assert!(chi.get(&[5]).is_zero());
    let e = extend_parallel(&chi, &a).unwrap();
    let oracle = pe_extension(&fam, &a).unwrap();
    assert!(uniqueness_check(&e, &oracle).unwrap() >= e.truncation_limit);
    assert_eq!(e.achieved_order, e.truncation_limit);
}

#[test]
fn rejects_invalid_inputs() {
    let g = flat(3, 3);
    let a = fg_expand(&g, 1).unwrap();
    let sp = g.space().clone();
    let (bad, _) = parallel_1form_from_sigma(&(&Jet::var(&sp, 0) * &Jet::var(&sp, 1)), &g).unwrap();
    assert!(matches!(extend_parallel(&bad, &a), Err(Error::NotParallel(_))));
    let other = sphere(3, 3);
    let chi = parallel_1form_from_sigma(&Jet::one(&sp), &other).unwrap().0;
    assert!(matches!(extend_parallel(&chi, &a), Err(Error::ScaleMismatch(_))));
    let u = TractorField::vector(&g, Jet::one(&sp), vec![Jet::zero(&sp); 3], Jet::zero(&sp)).unwrap();
    assert!(matches!(extend_parallel(&u, &a), Err(Error::InvalidInput(_))));
}

#[test]
fn infinity_derivatives_of_extension_vanish() {
    let g = constant_curvature_chart(5, &q(1, 4), 6).unwrap();
    let (a, lam) = einstein_ambient(&g, 1).unwrap();
    let e = extend_parallel(&einstein_tractor(&g, &lam).unwrap(), &a).unwrap();
    let gam = ambient_christoffel(&a).unwrap();
    let d1 = covariant_derivative(&e.chi, &gam, None);
    let d2 = covariant_derivative(&d1, &gam, None);
    let inf = 6;
    for i in 0..7 {
        assert!(d1.get(&[i, inf]).is_zero());
        assert!(d2.get(&[i, inf, inf]).is_zero());
    }
}

#[test]
fn odd_dimension_conformally_einstein_seed_reaches_truncation() {
    let lambda = q(1, 2);
    let base = constant_curvature_chart(5, &lambda, 5).unwrap();
    let mut r = rng(34);
    let ups = random_poly(base.space(), 2, 3, &mut r);
    let chi = conformal_change(&einstein_tractor(&base, &lambda).unwrap(), &ups).unwrap();
    assert!(tractor_derivative(&chi).unwrap().t.is_zero());
    let a = fg_expand(&chi.scale, 2).unwrap();
    let e = extend_parallel(&chi, &a).unwrap();
    assert!(e.truncation_limit >= 2);
    assert_eq!(e.achieved_order, e.truncation_limit);
}

#[test]
fn even_dimension_generic_seed_stops_at_critical_order() {
    let fam = pe_family_from_random_boundary(35, 5);
    let g = fam.seed_metric().unwrap();
    let (chi, res) = pe_tractor(&fam).unwrap();
    assert!(res.is_zero());
    assert!(einstein_constant(&g).is_err());
    let a = linear_ambient(&g);
    let e = extend_parallel(&chi, &a).unwrap();
    assert_eq!(e.achieved_order, 1);
    assert!(e.truncation_limit > 1);
    let rep = covariant_residual_order(&e, &a).unwrap();
    assert!(rep.leading.iter().all(|(_, m, _)| *m >= 1));
    assert!(rep.to_json().contains("\"achieved_order\":1"));
}

#[test]
fn even_dimension_closed_forms_beyond_critical_order_reach_truncation() {
    let g = constant_curvature_chart(4, &q(2, 3), 6).unwrap();
    let (a, lam) = einstein_ambient(&g, 1).unwrap();
    let e = extend_parallel(&einstein_tractor(&g, &lam).unwrap(), &a).unwrap();
    assert!(e.achieved_order >= 2);
    assert_eq!(e.achieved_order, e.truncation_limit);

    let fam = PEFamily::conformally_flat(&conformally_flat(3, 6, 36)).unwrap();
    let a = pe_ambient(&fam).unwrap();
    let (chi, _) = pe_tractor(&fam).unwrap();
    let e = extend_parallel(&chi, &a).unwrap();
    assert!(e.achieved_order >= 2);
    assert_eq!(e.achieved_order, e.truncation_limit);
}

#[test]
fn perturbation_at_critical_order_limits_agreement() {
    let g = constant_curvature_chart(4, &q(1, 3), 6).unwrap();
    let (a, lam) = einstein_ambient(&g, 1).unwrap();
    let e = extend_parallel(&einstein_tractor(&g, &lam).unwrap(), &a).unwrap();
    let mut f = e.clone();
    let rho = a.rho_var();
    let bump = Jet::var(a.space(), rho).powi(2);
    f.chi.set(&[1], f.chi.get(&[1]) + &bump);
    assert_eq!(uniqueness_check(&e, &f).unwrap(), 2);
    assert_eq!(uniqueness_check(&e, &e).unwrap(), u32::MAX);
    let other = extend_parallel(&tractor_metric_tensor(&g), &a).unwrap();
    assert!(uniqueness_check(&e, &other).is_err());
}

#[test]
fn integrability_conditions_hold() {
    let g = constant_curvature_chart(5, &q(1, 3), 6).unwrap();
    let lam = q(1, 3);
    let (a, _) = einstein_ambient(&g, 1).unwrap();
    for chk in integrability_residual(&einstein_tractor(&g, &lam).unwrap(), &a, 2).unwrap() {
        assert!(chk.passed(), "{chk:?}");
    }
    let gf = flat(4, 4);
    let (af, _) = einstein_ambient(&gf, 1).unwrap();
    let sp = gf.space().clone();
    let chi = parallel_1form_from_sigma(&Jet::var(&sp, 2), &gf).unwrap().0;
    for chk in integrability_residual(&chi, &af, 1).unwrap() {
        assert!(chk.failures.is_empty(), "{chk:?}");
    }
    // conformally Einstein, random conformal factor: the tractor curvature annihilates χ
    let base = constant_curvature_chart(5, &q(-1, 1), 5).unwrap();
    let mut r = rng(37);
    let ups = random_poly(base.space(), 2, 3, &mut r);
    let chi = conformal_change(&einstein_tractor(&base, &q(-1, 1)).unwrap(), &ups).unwrap();
    let a = fg_expand(&chi.scale, 2).unwrap();
    let checks = integrability_residual(&chi, &a, 0).unwrap();
    assert!(checks[0].passed(), "{:?}", checks[0]);
}
