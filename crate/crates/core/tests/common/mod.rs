//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use g2ambient_core::linalg::JetMatrix;
use g2ambient_core::tensors::MetricJet;
use g2ambient_core::{q, Jet, JetSpace, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn diag_metric(sp: &Arc<JetSpace>, n: usize, f: &Jet<Q>) -> JetMatrix<Q> {
    (0..n).map(|i| (0..n).map(|j| if i == j { f.clone() } else { Jet::zero(sp) }).collect()).collect()
}

pub fn flat(n: usize, order: u32) -> MetricJet<Q> {
    let sp = JetSpace::get(n, order);
    MetricJet::new(diag_metric(&sp, n, &Jet::one(&sp))).unwrap()
}

/// Flat metric of signature `(p, n − p)` with `−1` on the last `n − p` axes.
pub fn flat_signature(p: usize, n: usize, order: u32) -> MetricJet<Q> {
    let sp = JetSpace::get(n, order);
    let m = (0..n)
        .map(|i| (0..n).map(|j| if i != j { Jet::zero(&sp) } else if i < p { Jet::one(&sp) } else { Jet::constant(&sp, q(-1, 1)) }).collect())
        .collect();
    MetricJet::new(m).unwrap()
}

/// `4/(1+|x|²)² δ`: the unit round sphere in stereographic coordinates.
pub fn sphere(n: usize, order: u32) -> MetricJet<Q> {
    let sp = JetSpace::get(n, order);
    let mut r2 = Jet::<Q>::one(&sp);
    for i in 0..n {
        let x = Jet::var(&sp, i);
        r2 = &r2 + &(&x * &x);
    }
    let f = (&r2 * &r2).invert().unwrap().scale_i(4);
    MetricJet::new(diag_metric(&sp, n, &f)).unwrap()
}

/// A random polynomial of the given degree without constant term, coefficients in `{−3..3}/den`.
pub fn random_poly(sp: &Arc<JetSpace>, degree: u32, den: i64, r: &mut ChaCha8Rng) -> Jet<Q> {
    let n = sp.nvars();
    let mut out = Jet::zero(sp);
    let mut stack: Vec<Vec<u8>> = vec![vec![0; n]];
    let mut seen = std::collections::BTreeSet::new();
    while let Some(e) = stack.pop() {
        let d: u32 = e.iter().map(|&x| x as u32).sum();
        if d > 0 && seen.insert(e.clone()) {
            out = &out + &Jet::monomial(sp, &e, q(r.gen_range(-3..=3), den));
        }
        if d < degree {
            for i in 0..n {
                let mut f = e.clone();
                f[i] += 1;
                stack.push(f);
            }
        }
    }
    out
}

/// `δ + H` with `H` a random symmetric polynomial matrix of degree ≤ `degree` vanishing at 0.
pub fn random_metric(n: usize, order: u32, degree: u32, seed: u64) -> MetricJet<Q> {
    let sp = JetSpace::get(n, order);
    let mut r = rng(seed);
    let mut m = diag_metric(&sp, n, &Jet::one(&sp));
    for i in 0..n {
        for j in i..n {
            let h = random_poly(&sp, degree, 1 + r.gen_range(0..3), &mut r);
            m[i][j] = &m[i][j] + &h;
            m[j][i] = m[i][j].clone();
        }
    }
    MetricJet::new(m).unwrap()
}

/// `e^{2f} δ` with `f` a random quadratic.
pub fn conformally_flat(n: usize, order: u32, seed: u64) -> MetricJet<Q> {
    let sp = JetSpace::get(n, order);
    let mut r = rng(seed);
    let f = random_poly(&sp, 2, 3, &mut r);
    let e2f = f.scale_i(2).exp().unwrap();
    MetricJet::new(diag_metric(&sp, n, &e2f)).unwrap()
}

/// A random symmetric matrix of polynomials, with `δ` added when `unit` is set.
pub fn random_sym(sp: &Arc<JetSpace>, d: usize, degree: u32, unit: bool, r: &mut ChaCha8Rng) -> JetMatrix<Q> {
    let mut m = diag_metric(sp, d, &if unit { Jet::one(sp) } else { Jet::zero(sp) });
    for i in 0..d {
        for j in i..d {
            let mut h = random_poly(sp, degree, 1 + r.gen_range(0..3), r);
            if !unit {
                h = h.add_scalar(&q(r.gen_range(-2..=2), 1));
            }
            m[i][j] = &m[i][j] + &h;
            m[j][i] = m[i][j].clone();
        }
    }
    m
}

pub fn matrices_agree(a: &JetMatrix<Q>, b: &JetMatrix<Q>) -> bool {
    a.iter().zip(b).all(|(x, y)| x.iter().zip(y).all(|(p, q)| (p - q).is_zero()))
}
