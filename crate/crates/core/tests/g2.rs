mod common;

use common::*;
use g2ambient_core::g2::*;
use g2ambient_core::linalg::jet_matrix_value;
use g2ambient_core::tensors::*;
use g2ambient_core::{q, Error, Jet, JetSpace, QSqrt3, Scalar, Q};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn poly(terms: &[([u8; 5], i64, i64)], order: u32) -> Jet<Q> {
    let sp = JetSpace::get(5, order);
    Jet::from_terms(&sp, &terms.iter().map(|(e, n, d)| (e.to_vec(), q(*n, *d))).collect::<Vec<_>>())
}

fn q2(order: u32) -> Jet<Q> {
    poly(&[([0, 0, 0, 0, 2], 1, 1)], order)
}

/// `q² + f` with `f` a random homogeneous sextic in `(x, y, z, p, q)`.
fn random_sextic(seed: u64) -> Jet<Q> {
    let sp = JetSpace::get(5, 6);
    let mut r = rng(seed);
    let mut f = Jet::zero(&sp);
    for i in 0..sp.len() {
        if sp.degree(i) == 6 && r.gen_bool(0.3) {
            f = &f + &Jet::monomial(&sp, sp.exps(i), q(r.gen_range(-4..=4), r.gen_range(1..=3)));
        }
    }
    f
}

/// A random rational 7-jet of `F` at the origin with `F_qq(0) ≠ 0`.
fn random_seven_jet(r: &mut ChaCha8Rng) -> Jet<Q> {
    let sp = JetSpace::get(5, 7);
    loop {
        let f = &random_poly(&sp, 7, r.gen_range(1..=4), r) + &Jet::constant(&sp, q(r.gen_range(-3..=3), 1));
        if !f.diff(VAR_Q).diff(VAR_Q).constant_term().is_zero() {
            return base_jet(&f, 7);
        }
    }
}

/// `F = q² + a₀ + a₁p + … + a₆p⁶ + bz`.
fn ln_family(a: [i64; 7], b: i64) -> Jet<Q> {
    let mut terms = vec![([0, 0, 0, 0, 2], 1, 1), ([0, 0, 1, 0, 0], b, 1)];
    for (k, &ak) in a.iter().enumerate() {
        terms.push(([0, 0, 0, k as u8, 0], ak, 1));
    }
    poly(&terms, 7)
}

fn quartic_of(f: &Jet<Q>) -> CartanQuartic<Q> {
    let g = nurowski_metric(f).unwrap();
    cartan_quartic(&g, &TwoPlaneField::from_f(f).unwrap()).unwrap()
}

// ---------------------------------------------------------------- the 3-form

/// `(a∧b∧c)(e₀,…,e₆)` summed over all 5040 permutations.
fn wedge_by_permutations(a: &[QSqrt3], b: &[QSqrt3], c: &[QSqrt3]) -> QSqrt3 {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut v = p.clone();
                v.insert(pos, n - 1);
                out.push(v);
            }
        }
        out
    }
    let mut acc = QSqrt3::zero();
    for p in permutations(7) {
        let mut sign = 1;
        for i in 0..7 {
            for j in i + 1..7 {
                if p[i] > p[j] {
                    sign = -sign;
                }
            }
        }
        let t = a[p[0] * 7 + p[1]].mul(&b[p[2] * 7 + p[3]]).mul(&c[(p[4] * 7 + p[5]) * 7 + p[6]]);
        acc = if sign > 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    // 2!·2!·3! orderings of each shuffle.
    acc.mul(&QSqrt3::rational(q(1, 24)))
}

#[test]
fn phi_components_match_definition() {
    let g = G2Form::standard();
    let s3 = QSqrt3::sqrt3();
    assert_eq!(*g.component(0, 1, 2), QSqrt3::from_i64(6));
    assert_eq!(*g.component(2, 1, 0), QSqrt3::from_i64(-6));
    assert_eq!(*g.component(2, 3, 4), s3);
    assert_eq!(*g.component(1, 3, 5), s3.neg());
    assert_eq!(*g.component(5, 3, 1), s3);
    assert_eq!(*g.component(0, 3, 6), s3);
    assert_eq!(*g.component(6, 4, 5), QSqrt3::one());
    assert_eq!(g.phi.iter().filter(|v| !v.is_zero()).count(), 30);
    assert_eq!(*g.component(0, 0, 1), QSqrt3::zero());
}

#[test]
fn h_tilde_is_bordered() {
    let g = G2Form::standard();
    for i in 0..7 {
        for j in 0..7 {
            let expected = if (i, j) == (0, 6) || (i, j) == (6, 0) {
                Q::from(1)
            } else if (1..6).contains(&i) && (1..6).contains(&j) {
                g.h[(i - 1, j - 1)].clone()
            } else {
                Q::from(0)
            };
            assert_eq!(g.h_tilde[(i, j)], expected);
        }
    }
    assert_eq!(g.h.inertia(), (2, 3, 0));
    assert_eq!(g.h_tilde.inertia(), (3, 4, 0));
}

#[test]
fn phi_is_compatible_with_h_tilde() {
    let g = G2Form::standard();
    let out = phi_compatibility(&g.phi, &g.h_tilde_sqrt3()).unwrap();
    let Compatibility::Compatible { lambda } = out else { panic!("{out:?}") };
    assert!(lambda.signum() > 0);
    // Independent evaluation of the 7-form over all permutations.
    let contract = |u: usize| -> Vec<QSqrt3> {
        (0..49).map(|k| g.phi[(u * 7 + k / 7) * 7 + k % 7].clone()).collect()
    };
    for (u, v) in [(0, 6), (6, 0), (1, 5), (2, 4), (3, 3), (0, 0), (1, 2)] {
        let lhs = wedge_by_permutations(&contract(u), &contract(v), &g.phi);
        let rhs = lambda.mul(&QSqrt3::rational(g.h_tilde[(u, v)].clone()));
        assert_eq!(lhs, rhs, "pair ({u},{v})");
    }
}

#[test]
fn zero_form_is_incompatible() {
    let g = G2Form::standard();
    let zero = vec![QSqrt3::zero(); 343];
    assert_eq!(
        phi_compatibility(&zero, &g.h_tilde_sqrt3()).unwrap(),
        Compatibility::NonPositive { lambda: QSqrt3::zero() }
    );
}

#[test]
fn any_single_component_perturbation_breaks_compatibility() {
    let g = G2Form::standard();
    let metric = g.h_tilde_sqrt3();
    let mut triples = Vec::new();
    for i in 0..7 {
        for j in i + 1..7 {
            for k in j + 1..7 {
                triples.push([i, j, k]);
            }
        }
    }
    for t in triples {
        let old = g.component(t[0], t[1], t[2]).clone();
        let changes = if old.is_zero() { vec![QSqrt3::one()] } else { vec![old.neg(), old.add(&QSqrt3::one())] };
        for new in changes {
            let mut terms: Vec<([usize; 3], QSqrt3)> = Vec::new();
            for a in 0..7 {
                for b in a + 1..7 {
                    for c in b + 1..7 {
                        let v = if [a, b, c] == t { new.clone() } else { g.component(a, b, c).clone() };
                        if !v.is_zero() {
                            terms.push(([a, b, c], v));
                        }
                    }
                }
            }
            let chi = antisymmetric_3form(7, &terms);
            let out = phi_compatibility(&chi, &metric).unwrap();
            assert!(!out.is_compatible(), "perturbing {t:?} to {new} kept compatibility: {out:?}");
        }
    }
}

#[test]
fn compatibility_rejects_non_antisymmetric_input() {
    let g = G2Form::standard();
    let mut chi = g.phi.clone();
    chi[(0 * 7 + 1) * 7 + 2] = QSqrt3::from_i64(5);
    assert!(matches!(phi_compatibility(&chi, &g.h_tilde_sqrt3()), Err(Error::InvalidInput(_))));
}

// ---------------------------------------------------------------- distributions

#[test]
fn flat_model_bracket_and_genericity() {
    let f = q2(4);
    let d = TwoPlaneField::from_f(&f).unwrap();
    let dd = derived_distribution(&d).unwrap();
    let sp = f.space().clone();
    let mut expected = vec![Jet::zero(&sp); 5];
    expected[VAR_P] = Jet::one(&sp);
    expected[VAR_Z] = Jet::var(&sp, VAR_Q).scale_i(2);
    assert_eq!(dd.d1[2], expected);
    assert!(dd.generic);
}

#[test]
fn zero_f_is_not_generic() {
    let d = TwoPlaneField::from_f(&Jet::<Q>::zero(&JetSpace::get(5, 4))).unwrap();
    assert!(!derived_distribution(&d).unwrap().generic);
}

#[test]
fn q2_plus_p3_is_generic() {
    let f = poly(&[([0, 0, 0, 0, 2], 1, 1), ([0, 0, 0, 3, 0], 1, 1)], 4);
    assert!(derived_distribution(&TwoPlaneField::from_f(&f).unwrap()).unwrap().generic);
}

#[test]
fn dependent_fields_are_rejected() {
    let sp = JetSpace::get(5, 3);
    let mut x = vec![Jet::zero(&sp); 5];
    x[0] = Jet::one(&sp);
    let y: Vec<Jet<Q>> = x.iter().map(|c| c.scale_i(2)).collect();
    assert!(matches!(TwoPlaneField::new(x, y), Err(Error::InvalidInput(_))));
}

#[test]
fn brackets_need_second_order_jets() {
    let d = TwoPlaneField::from_f(&q2(1)).unwrap();
    assert!(matches!(derived_distribution(&d), Err(Error::InsufficientOrder(_))));
}

// ---------------------------------------------------------------- the conformal metric

#[test]
fn flat_model_metric_is_flat_with_quoted_origin_value() {
    let g = nurowski_metric(&q2(6)).unwrap();
    assert!(riemann(&g).unwrap().is_zero());
    let origin = fhol_origin(&Jet::<Q>::zero(&JetSpace::get(5, 6))).unwrap();
    assert_eq!(jet_matrix_value(&g.matrix()), origin.flat_origin);
    assert_eq!(g.signature, (2, 3));
}

#[test]
fn metric_requires_nonvanishing_fqq() {
    let f = poly(&[([0, 0, 0, 0, 3], 1, 1), ([0, 0, 0, 1, 0], 1, 1)], 6);
    assert!(matches!(nurowski_metric(&f), Err(Error::InvalidInput(_))));
}

#[test]
fn derived_distribution_is_orthogonal_complement() {
    let mut r = rng(11);
    for _ in 0..4 {
        let f = random_seven_jet(&mut r);
        let g = nurowski_metric(&f).unwrap();
        let dd = derived_distribution(&TwoPlaneField::from_f(&f).unwrap()).unwrap();
        assert!(is_adapted(&g, &dd));
    }
}

#[test]
fn coframe_annihilates_the_distribution() {
    let f = random_sextic(3);
    let f = &f + &q2(6);
    let th = adapted_coframe(&f).unwrap();
    let dd = derived_distribution(&TwoPlaneField::from_f(&f).unwrap()).unwrap();
    let apply = |row: &[Jet<Q>], v: &[Jet<Q>]| -> Jet<Q> {
        (0..5).fold(Jet::zero(f.space()), |acc, i| &acc + &(&row[i] * &v[i]))
    };
    for v in &dd.d1[..2] {
        for row in &th[..3] {
            assert!(apply(row, v).is_zero());
        }
    }
    for row in &th[..2] {
        assert!(apply(row, &dd.d1[2]).is_zero());
    }
    assert!(!apply(&th[2], &dd.d1[2]).constant_term().is_zero());
}

#[test]
fn unadapted_metric_is_rejected() {
    let f = q2(6);
    let d = TwoPlaneField::from_f(&f).unwrap();
    assert!(matches!(cartan_quartic(&flat_signature(2, 5, 6), &d), Err(Error::NotAdapted(_))));
}

// ---------------------------------------------------------------- Cartan's quartic

#[test]
fn flat_model_has_zero_quartic_and_l_rank() {
    let rep = check_two_plane(&q2(7), 0.0).unwrap();
    assert!(rep.generic && rep.adapted && rep.symmetric && rep.weyl_vanishes_on_d1);
    assert!(rep.quartic.is_zero());
    assert_eq!(rep.l_rank, 0);
}

#[test]
fn q6_perturbation_gives_pure_u4_quartic() {
    let f = poly(&[([0, 0, 0, 0, 2], 1, 1), ([0, 0, 0, 0, 6], 1, 1)], 7);
    let cq = quartic_of(&f);
    let fo = fhol_origin(&poly(&[([0, 0, 0, 0, 6], 1, 1)], 7)).unwrap();
    assert_eq!(fo.partials, [Q::from(720), Q::from(0), Q::from(0), Q::from(0), Q::from(0)]);
    assert_eq!(cq.quartic, fo.quartic);
    assert_eq!(cq.quartic.a[0], Q::from(720).mul(&fhol_constant()));
}

#[test]
fn x_q5_perturbation_gives_only_a1() {
    let fo = fhol_origin(&poly(&[([1, 0, 0, 0, 5], 1, 1)], 7)).unwrap();
    let nonzero: Vec<usize> = (0..5).filter(|&k| !fo.quartic.a[k].is_zero()).collect();
    assert_eq!(nonzero, vec![1]);
    let f = poly(&[([0, 0, 0, 0, 2], 1, 1), ([1, 0, 0, 0, 5], 1, 1)], 7);
    assert_eq!(quartic_of(&f).quartic, fo.quartic);
}

#[test]
fn zero_perturbation_has_zero_curvature() {
    let fo = fhol_origin(&Jet::<Q>::zero(&JetSpace::get(5, 7))).unwrap();
    assert!(fo.curvature.iter().all(|v| v.is_zero()));
    assert!(fo.quartic.is_zero());
}

#[test]
fn fhol_rejects_low_order_perturbations() {
    let f = poly(&[([0, 0, 0, 2, 3], 1, 1)], 7);
    assert!(matches!(fhol_origin(&f), Err(Error::InvalidInput(_))));
    assert!(matches!(fhol_origin(&Jet::<Q>::zero(&JetSpace::get(5, 5))), Err(Error::InsufficientOrder(_))));
}

#[test]
fn origin_curvature_matches_linearised_perturbation() {
    for seed in 0..4 {
        let f = random_sextic(100 + seed);
        let g = nurowski_metric(&(&f + &q2(6))).unwrap();
        let r = riemann(&g).unwrap();
        let fo = fhol_origin(&f).unwrap();
        for idx in r.indices() {
            assert_eq!(
                &r.get(&idx).constant_term(),
                fo.curvature_at(idx[0], idx[1], idx[2], idx[3]),
                "seed {seed}, R{idx:?}"
            );
        }
    }
}

#[test]
fn origin_quartic_matches_cartan_quartic() {
    for seed in 0..4 {
        let f = random_sextic(200 + seed);
        let cq = quartic_of(&(&f + &q2(6)));
        assert_eq!(cq.quartic, fhol_origin(&f).unwrap().quartic, "seed {seed}");
    }
}

#[test]
fn quartic_is_symmetric_and_weyl_vanishes_on_d1() {
    let mut r = rng(21);
    for _ in 0..5 {
        let f = random_seven_jet(&mut r);
        let cq = quartic_of(&f);
        assert!(cq.symmetric);
        assert!(cq.weyl_vanishes_on_d1);
    }
}

#[test]
fn quartic_is_conformally_invariant() {
    let mut r = rng(31);
    for _ in 0..5 {
        let f = random_seven_jet(&mut r);
        let g = nurowski_metric(&f).unwrap();
        let d = TwoPlaneField::from_f(&f).unwrap();
        let omega2 = &random_poly(g.space(), 3, 2, &mut r) + &Jet::constant(g.space(), q(r.gen_range(1..=5), 2));
        let gh = conformal_rescale_by(&g, &omega2).unwrap();
        assert_eq!(cartan_quartic(&g, &d).unwrap().quartic, cartan_quartic(&gh, &d).unwrap().quartic);
    }
}

#[test]
fn quartic_is_invariant_under_alpha_sign() {
    let mut r = rng(41);
    let f = random_seven_jet(&mut r);
    let g = nurowski_metric(&f).unwrap();
    let d = TwoPlaneField::from_f(&f).unwrap();
    let plus = cartan_quartic_signed(&g, &d, 1).unwrap();
    let minus = cartan_quartic_signed(&g, &d, -1).unwrap();
    assert_eq!(plus.tensor, minus.tensor);
    assert!(!plus.quartic.is_zero());
}

// ---------------------------------------------------------------- 3-degeneracy

fn from_binary(c: [Q; 5]) -> Quartic<Q> {
    let b = [1, 4, 6, 4, 1];
    Quartic::new(std::array::from_fn(|k| c[k].mul(&q(1, b[k]))))
}

/// Coefficients of `u⁴, u³v, …, v⁴` of a product of binary forms.
fn binary_product(factors: &[Vec<Q>]) -> [Q; 5] {
    let mut acc = vec![Q::from(1)];
    for f in factors {
        let mut out = vec![Q::from(0); acc.len() + f.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        acc = out;
    }
    std::array::from_fn(|k| acc[k].clone())
}

#[test]
fn u4_is_three_degenerate() {
    let (deg, _) = three_degenerate(&Quartic::new([Q::from(1), Q::from(0), Q::from(0), Q::from(0), Q::from(0)]));
    assert!(deg);
}

#[test]
fn u4_plus_v4_is_nondegenerate() {
    let qd = Quartic::new([Q::from(1), Q::from(0), Q::from(0), Q::from(0), Q::from(1)]);
    let (deg, res) = three_degenerate(&qd);
    assert!(!deg);
    assert_eq!(res, Q::from(1));
}

#[test]
fn fourth_power_of_linear_form_is_degenerate() {
    for (a, b) in [(2, 3), (-1, 5), (0, 1), (7, -2)] {
        let qd = Quartic::new(std::array::from_fn(|k| Q::from(a).pow(4 - k as u32).mul(&Q::from(b).pow(k as u32))));
        let (deg, res) = three_degenerate(&qd);
        assert!(deg, "({a}u + {b}v)^4");
        assert!(res.is_zero());
    }
}

#[test]
fn complex_double_roots_have_zero_resultant_but_are_not_degenerate() {
    let c = binary_product(&[vec![Q::from(1), Q::from(0), Q::from(1)], vec![Q::from(1), Q::from(0), Q::from(1)]]);
    let (deg, res) = three_degenerate(&from_binary(c));
    assert!(!deg);
    assert!(res.is_zero());
}

#[test]
fn zero_quartic_is_degenerate() {
    assert!(three_degenerate(&Quartic::<Q>::zero()).0);
}

fn small() -> impl Strategy<Value = i64> {
    -4i64..=4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn real_double_root_is_degenerate(a in small(), b in small(), c in small(), d in small(), e in small()) {
        prop_assume!(a != 0 || b != 0);
        prop_assume!(c != 0 || d != 0 || e != 0);
        let l = vec![Q::from(a), Q::from(b)];
        let coeffs = binary_product(&[l.clone(), l, vec![Q::from(c), Q::from(d), Q::from(e)]]);
        let (deg, res) = three_degenerate(&from_binary(coeffs));
        prop_assert!(deg);
        prop_assert!(res.is_zero());
    }

    #[test]
    fn distinct_real_roots_are_nondegenerate(r in proptest::collection::btree_set(-6i64..=6, 4)) {
        let factors: Vec<Vec<Q>> = r.iter().map(|&t| vec![Q::from(1), Q::from(-t)]).collect();
        let (deg, res) = three_degenerate(&from_binary(binary_product(&factors)));
        prop_assert!(!deg);
        prop_assert!(!res.is_zero());
    }

    #[test]
    fn degeneracy_is_basis_independent(a in proptest::array::uniform5(small()), m in proptest::array::uniform3(small())) {
        // Unimodular change of basis [[1, m0], [0, 1]] · [[1, 0], [m1, 1]].
        let (s, t) = (Q::from(m[0]), Q::from(m[1]));
        let one = Q::from(1);
        let mat = [[&one + &(&s * &t), s.clone()], [t.clone(), one.clone()]];
        let qd = Quartic::new(a.map(Q::from));
        let moved = qd.change_basis(mat.clone());
        let (d0, r0) = three_degenerate(&qd);
        let (d1, r1) = three_degenerate(&moved);
        prop_assert_eq!(d0, d1);
        prop_assert_eq!(r0.is_zero(), r1.is_zero());
        if d0 {
            prop_assert!(r0.is_zero());
        }
        // Evaluation is compatible with the change of basis.
        let (u, v) = (Q::from(m[2]), Q::from(1));
        let uv = (&(&mat[0][0] * &u) + &(&mat[0][1] * &v), &(&mat[1][0] * &u) + &(&mat[1][1] * &v));
        prop_assert_eq!(moved.eval(&u, &v), qd.eval(&uv.0, &uv.1));
    }
}

// ---------------------------------------------------------------- the L-map

#[test]
fn zero_curvature_has_l_rank_zero() {
    let g = flat_signature(2, 5, 4);
    let w = weyl(&g).unwrap();
    let c = cotton(&g).unwrap();
    assert_eq!(l_map_rank(&w, &c, 0.0).unwrap(), 0);
    let l = LMap::new(&w, &c).unwrap();
    assert_eq!((l.matrix.rows, l.matrix.cols), (125, 6));
}

#[test]
fn ln_family_with_cubic_and_quartic_terms_is_injective() {
    for (a, b) in [([0, 0, 0, 1, 1, 0, 0], 0), ([1, -2, 3, 2, -1, 1, 5], 3), ([0, 0, 1, -3, 2, 0, -1], -1)] {
        let rep = check_two_plane(&ln_family(a, b), 0.0).unwrap();
        assert!(rep.generic);
        assert_eq!(rep.l_rank, 6, "a = {a:?}, b = {b}");
    }
}

#[test]
fn l_rank_is_conformally_invariant() {
    let mut r = rng(51);
    let f = random_seven_jet(&mut r);
    let g = nurowski_metric(&f).unwrap();
    let omega2 = &random_poly(g.space(), 3, 3, &mut r) + &Jet::constant(g.space(), q(2, 1));
    let gh = conformal_rescale_by(&g, &omega2).unwrap();
    let rank = |m: &MetricJet<Q>| l_map_rank(&weyl(m).unwrap(), &cotton(m).unwrap(), 0.0).unwrap();
    assert_eq!(rank(&g), rank(&gh));
}

#[test]
fn random_seven_jets_are_generically_nondegenerate() {
    let mut r = rng(61);
    let mut good = 0;
    for _ in 0..50 {
        let rep = check_two_plane(&random_seven_jet(&mut r), 0.0).unwrap();
        if rep.generic && rep.l_rank == 6 && !rep.three_degenerate {
            good += 1;
        }
    }
    assert!(good * 10 >= 50 * 9, "{good}/50");
}

#[test]
fn float_mode_agrees_with_exact_quartic() {
    let f = &random_sextic(7) + &q2(6);
    let exact = quartic_of(&f).quartic;
    let ff = f.map_scalar(|c| c.to_f64());
    let g = nurowski_metric(&ff).unwrap();
    let fq = cartan_quartic(&g, &TwoPlaneField::from_f(&ff).unwrap()).unwrap().quartic;
    for k in 0..5 {
        assert!((fq.a[k] - exact.a[k].to_f64()).abs() < 1e-8 * (1.0 + exact.a[k].to_f64().abs()));
    }
}
