//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use g2ambient_core::geometries::constant_curvature_chart;
use g2ambient_core::poly::parse_jet;
use g2ambient_core::tensors::MetricJet;
use g2ambient_core::{q, Jet, JetSpace, Q};

/// Dense jet with small deterministic rational coefficients.
pub fn dense_jet(space: &Arc<JetSpace>, salt: i64) -> Jet<Q> {
    let terms: Vec<(Vec<u8>, Q)> = (0..space.len())
        .map(|i| {
            let k = i as i64 + salt;
            (space.exps(i).to_vec(), q((k * 7919) % 23 - 11, 1 + (k * 104729) % 5))
        })
        .collect();
    Jet::from_terms(space, &terms)
}

/// Constant-curvature chart with Schouten tensor `λ g`, `λ = 1/2`.
pub fn einstein_seed(n: usize, order: u32) -> MetricJet<Q> {
    constant_curvature_chart(n, &q(1, 2), order).expect("chart")
}

/// A fixed generic 7-jet of `F(x, y, z, p, q)`.
pub fn two_plane_function() -> Jet<Q> {
    let sp = JetSpace::get(5, 7);
    let text = "q^2 + 1/3*q^6 + 2/5*x*q^5 - 1/7*y*q^4 + 3/11*p^2*q^3 + 1/2*x^2*z*q^4 + 5/13*x^3*q^4";
    parse_jet(text, &["x", "y", "z", "p", "q"], &sp).expect("fixture parses")
}
