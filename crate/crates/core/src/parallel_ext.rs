//! Ambient extension of parallel cotractors by transport along the `ρ`-lines.
//!
//! A covariant `r`-tractor `χ` in the splitting of `g` is lifted to an ambient
//! tensor `χ̃` of homogeneity weight `r` on the slice `t = 1` by solving
//! `∂_ρ χ̃_{I₁…I_r} = Σ_s Γ̃ᴶ_{I_s∞} χ̃_{…J…}` with `χ̃|_{ρ=0} = χ`, i.e.
//! `∇̃_∞ χ̃ = 0`. The solution is found by Picard iteration, which gains one
//! power of `ρ` per step.

use std::fmt::Write as _;

use crate::ambient::{ambient_christoffel, ambient_curvature, lift_x, rho_order_of, AmbientMetric, IdentityCheck};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::Scalar;
use crate::tensors::{covariant_derivative, Frame, Slot, TensorJet};
use crate::tractor::{tractor_derivative, TractorField};

/// A transported ambient extension and its measured parallelism.
#[derive(Clone, Debug)]
pub struct AmbientExtension<S: Scalar> {
    pub base: TractorField<S>,
    /// `χ̃` on `t = 1` as jets in `(x, ρ)`.
    pub chi: TensorJet<S>,
    /// Verified `k` with `∇̃χ̃ = O(ρᵏ)`.
    pub achieved_order: u32,
    /// Largest order the truncation can certify.
    pub truncation_limit: u32,
}

/// Outcome of [`covariant_residual_order`].
#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// Verified order (capped by the truncation limit).
    pub order: u32,
    pub truncation_limit: u32,
    /// Components of `∇̃χ̃` with a nonzero coefficient inside the truncation:
    /// `(index label, ρ-power, leading ρ-coefficient at x = 0)`.
    pub leading: Vec<(String, u32, String)>,
    /// Whether `∇̃_∞χ̃` vanishes within the truncation.
    pub infinity_derivative_vanishes: bool,
}

impl ResidualReport {
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{{\"achieved_order\":{},\"truncation_limit\":{},\"infinity_derivative_vanishes\":{},\"leading\":[",
            self.order, self.truncation_limit, self.infinity_derivative_vanishes
        );
        for (k, (lab, m, c)) in self.leading.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            let _ = write!(s, "{{\"component\":\"{lab}\",\"rho_power\":{m},\"coefficient\":\"{c}\"}}");
        }
        s.push_str("]}");
        s
    }
}

fn check_parallel<S: Scalar>(chi: &TractorField<S>, tol: f64) -> Result<()> {
    let d = tractor_derivative(chi)?;
    if !d.t.is_negligible(tol) {
        let mut bad = Vec::new();
        for idx in d.t.indices() {
            if !d.get(&idx).is_negligible(tol) {
                let lab: Vec<String> = idx.iter().map(|&i| d.t.frame.label(i)).collect();
                bad.push(format!("({})", lab.join(",")));
                if bad.len() >= 4 {
                    break;
                }
            }
        }
        return Err(Error::NotParallel(format!("nonzero tractor derivative components {}", bad.join(" "))));
    }
    Ok(())
}

/// Transports a parallel cotractor along the `ρ`-lines of `A`.
pub fn extend_parallel<S: Scalar>(chi: &TractorField<S>, a: &AmbientMetric<S>) -> Result<AmbientExtension<S>> {
    extend_parallel_tol(chi, a, 0.0)
}

pub fn extend_parallel_tol<S: Scalar>(chi: &TractorField<S>, a: &AmbientMetric<S>, tol: f64) -> Result<AmbientExtension<S>> {
    if chi.t.slots.iter().any(|s| *s != Slot::Lower) {
        return Err(Error::InvalidInput("only covariant tractors are transported".into()));
    }
    if chi.n() != a.n || !same_scale(&chi.scale, &a.base) {
        return Err(Error::ScaleMismatch("the tractor's scale differs from the ambient metric's base metric".into()));
    }
    check_parallel(chi, tol)?;
    let gam = ambient_christoffel(a)?;
    let chit = transport(chi, a, &gam);
    let rep = residual_with(&chit, a, &gam, tol);
    Ok(AmbientExtension { base: chi.clone(), chi: chit, achieved_order: rep.order, truncation_limit: rep.truncation_limit })
}

/// Equality of two metrics within their common truncation.
fn same_scale<S: Scalar>(g: &crate::tensors::MetricJet<S>, h: &crate::tensors::MetricJet<S>) -> bool {
    g.dim() == h.dim() && g.g.comps().iter().zip(h.g.comps()).all(|(x, y)| (x - y).is_zero())
}

fn transport<S: Scalar>(chi: &TractorField<S>, a: &AmbientMetric<S>, gam: &TensorJet<S>) -> TensorJet<S> {
    let n = a.n;
    let d = n + 2;
    let inf = n + 1;
    let r = chi.rank();
    let sp = a.space().clone();
    let rho = a.rho_var();
    let mut start = TensorJet::lower(Frame::Ambient { n }, r, r as i64, &sp);
    start.antisym = chi.t.antisym.clone();
    start.sym = chi.t.sym.clone();
    for idx in chi.t.indices() {
        start.set(&idx, lift_x(chi.get(&idx), &sp));
    }
    let steps = a.order() / a.rho_weight() + 2;
    let mut cur = start.clone();
    for _ in 0..steps {
        let mut next = start.clone();
        for idx in cur.indices() {
            let mut rhs = Jet::zero(&sp);
            for s in 0..r {
                let mut j = idx.clone();
                for p in 0..d {
                    let g = gam.get(&[p, idx[s], inf]);
                    if g.is_exact_zero() {
                        continue;
                    }
                    j[s] = p;
                    let c = cur.get(&j);
                    if !c.is_exact_zero() {
                        rhs = &rhs + &(g * c);
                    }
                }
            }
            if !rhs.is_exact_zero() {
                next.set(&idx, start.get(&idx) + &rhs.integrate(rho));
            }
        }
        let done = next.comps() == cur.comps();
        cur = next;
        if done {
            break;
        }
    }
    cur
}

/// Order of vanishing in `ρ` of `∇̃χ̃` (all components, the `0` direction via homogeneity).
pub fn covariant_residual_order<S: Scalar>(e: &AmbientExtension<S>, a: &AmbientMetric<S>) -> Result<ResidualReport> {
    covariant_residual_order_tol(e, a, 0.0)
}

pub fn covariant_residual_order_tol<S: Scalar>(e: &AmbientExtension<S>, a: &AmbientMetric<S>, tol: f64) -> Result<ResidualReport> {
    let gam = ambient_christoffel(a)?;
    Ok(residual_with(&e.chi, a, &gam, tol))
}

/// `∇̃χ̃` for an ambient covariant tensor on `t = 1`.
pub fn ambient_covariant_derivative<S: Scalar>(chi: &TensorJet<S>, a: &AmbientMetric<S>) -> Result<TensorJet<S>> {
    let gam = ambient_christoffel(a)?;
    Ok(covariant_derivative(chi, &gam, None))
}

fn residual_with<S: Scalar>(chi: &TensorJet<S>, a: &AmbientMetric<S>, gam: &TensorJet<S>, tol: f64) -> ResidualReport {
    let n = a.n;
    let inf = n + 1;
    let rho = a.rho_var();
    let dchi = covariant_derivative(chi, gam, None);
    let (mut order, mut limit) = (u32::MAX, u32::MAX);
    let mut found = Vec::new();
    let mut inf_ok = true;
    let xsp = a.x_space().clone();
    for idx in dchi.indices() {
        let c = dchi.get(&idx);
        let (v, lim) = rho_order_of(c, rho, tol);
        order = order.min(v);
        limit = limit.min(lim);
        if v < lim {
            if *idx.last().unwrap() == inf {
                inf_ok = false;
            }
            let lab: Vec<String> = idx.iter().map(|&i| dchi.frame.label(i)).collect();
            let lead = crate::ambient::rho_coefficient_x(c, v, &xsp).constant_term();
            found.push((format!("({})", lab.join(",")), v, format!("{lead}")));
        }
    }
    ResidualReport { order: order.min(limit), truncation_limit: limit, leading: found, infinity_derivative_vanishes: inf_ok }
}

/// Through which `ρ`-order two extensions of the same tractor agree.
pub fn uniqueness_check<S: Scalar>(e1: &AmbientExtension<S>, e2: &AmbientExtension<S>) -> Result<u32> {
    if !same_scale(&e1.base.scale, &e2.base.scale) || e1.base.t.comps().iter().zip(e2.base.t.comps()).any(|(x, y)| !(x - y).is_zero()) {
        return Err(Error::InvalidInput("extensions of different base tractors".into()));
    }
    let rho = e1.chi.frame.nvars() - 1;
    let mut best = u32::MAX;
    for (x, y) in e1.chi.comps().iter().zip(e2.chi.comps()) {
        let diff = x - y;
        let (v, lim) = rho_order_of(&diff, rho, 0.0);
        best = best.min(v.min(lim));
    }
    Ok(best)
}

/// Action of `∇̃ˢR̃` (`s = 0..=k`), restricted to `ρ = 0` and to tangential
/// directions `{0, 1..n}` in the curvature 2-form slots and derivative slots,
/// on `χ` through the endomorphism slot: `Σ_s −R̃ᴶ_{I_s a b, M} χ_{…J…}`.
pub fn integrability_residual<S: Scalar>(chi: &TractorField<S>, a: &AmbientMetric<S>, k: usize) -> Result<Vec<IdentityCheck>> {
    if chi.t.slots.iter().any(|s| *s != Slot::Lower) {
        return Err(Error::InvalidInput("only covariant tractors are supported".into()));
    }
    check_parallel(chi, 0.0)?;
    let n = a.n;
    let d = n + 2;
    let r = chi.rank();
    let sp = a.space().clone();
    let rho = a.rho_var();
    let tower = ambient_curvature(a, k)?;
    let mj = a.metric()?;
    let chil: Vec<Jet<S>> = chi.t.comps().iter().map(|c| lift_x(c, &sp)).collect();
    let chi_at = |idx: &[usize]| -> &Jet<S> { &chil[chi.t.flat(idx)] };
    let mut out = Vec::new();
    for (s, rt) in tower.iter().enumerate() {
        let mut chk = IdentityCheck { name: "integrability (nabla^s R).chi".into(), order: s, ..Default::default() };
        let tang: Vec<usize> = (0..=n).collect();
        let mut tails: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..(2 + s) {
            tails = tails.iter().flat_map(|t| tang.iter().map(move |&x| [t.clone(), vec![x]].concat())).collect();
        }
        for cidx in chi.t.indices() {
            for tail in &tails {
                if tail[0] >= tail[1] {
                    continue;
                }
                let mut res = Jet::zero(&sp);
                for slot in 0..r {
                    for jj in 0..d {
                        let mut cj = cidx.clone();
                        cj[slot] = jj;
                        let cv = chi_at(&cj);
                        if cv.is_exact_zero() {
                            continue;
                        }
                        // R̃ᴶ_{I a b M} = g̃^{JL} R̃_{L I a b M}
                        let mut up = Jet::zero(&sp);
                        for l in 0..d {
                            let gi = mj.ginv(jj, l);
                            if gi.is_exact_zero() {
                                continue;
                            }
                            let mut ridx = vec![l, cidx[slot]];
                            ridx.extend_from_slice(tail);
                            let rv = rt.get(&ridx);
                            if !rv.is_exact_zero() {
                                up = &up + &(gi * rv);
                            }
                        }
                        res = &res - &(&up * cv);
                    }
                }
                let res = res.restrict_zero(rho);
                if res.reliable() < 0 && !res.is_exact() {
                    chk.beyond_truncation += 1;
                } else if res.is_zero() {
                    chk.checked += 1;
                } else {
                    let lab: Vec<String> =
                        cidx.iter().chain(tail.iter()).map(|&i| Frame::Ambient { n }.label(i)).collect();
                    chk.failures.push(format!("({})", lab.join(",")));
                }
            }
        }
        out.push(chk);
    }
    Ok(out)
}
