//! Normal-form ambient metrics `g̃ = 2ρ dt² + 2t dt dρ + t² g_ρ` on the slice `t = 1`.
//!
//! Ambient jets live in the variables `(x¹..xⁿ, ρ)` with `ρ` of weight 2, so
//! that every coefficient `g⁽ᵐ⁾ρᵐ` of an expansion whose coefficients are known
//! to x-degree `K − 2m` is reliable to weighted degree `K`. Index alphabet:
//! `0`, `1..n`, `∞ = n+1`.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::linalg::{jet_inverse, jet_solve, JetMatrix, Matrix};
use crate::scalar::Scalar;
use crate::tensors::{covariant_derivative, CurvatureCache, Frame, MetricJet, Slot, TensorJet};

/// Jet space in `(x, ρ)` with `ρ` of weight 2.
pub fn xrho_space(n: usize, order: u32) -> Arc<JetSpace> {
    xrho_space_weighted(n, order, 2)
}

/// Jet space in `(x, ρ)` with `ρ` of weight `w_rho` (1 or 2).
///
/// Weight 1 trades x-degree for ρ-depth and suits closed forms that are
/// polynomial in `ρ`.
pub fn xrho_space_weighted(n: usize, order: u32, w_rho: u8) -> Arc<JetSpace> {
    let mut w = vec![1u8; n];
    w.push(w_rho);
    JetSpace::weighted(&w, order)
}

/// Lifts a jet in `x` to the `(x, ρ)` space.
pub fn lift_x<S: Scalar>(j: &Jet<S>, sp: &Arc<JetSpace>) -> Jet<S> {
    let n = j.nvars();
    j.embed(sp, &(0..n).collect::<Vec<_>>())
}

/// Coefficient of `ρᵐ` of an `(x, ρ)` jet, as a jet in `x`.
pub fn rho_coefficient_x<S: Scalar>(j: &Jet<S>, m: u32, xsp: &Arc<JetSpace>) -> Jet<S> {
    let n = xsp.nvars();
    let c = j.coeff_in_var(n, m);
    let terms: Vec<(Vec<u8>, S)> = c.terms().map(|(e, v)| (e[..n].to_vec(), v.clone())).collect();
    let out = Jet::from_terms(xsp, &terms);
    if c.is_exact() {
        out
    } else {
        out.truncated(c.reliable())
    }
}

/// Even or odd base dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// A normal-form ambient metric given by its base metric and `g_ρ`.
#[derive(Clone, Debug)]
pub struct AmbientMetric<S: Scalar> {
    pub n: usize,
    /// Base metric `g = g⁽⁰⁾` as jets in `x`.
    pub base: MetricJet<S>,
    /// `g_ρ` as jets in `(x, ρ)`.
    pub g_rho: JetMatrix<S>,
    /// Highest ρ-power determined by the solver; `None` for closed forms.
    pub rho_order: Option<u32>,
    /// Ambiguity injected at order `n/2` (even `n` only).
    pub kappa: Option<JetMatrix<S>>,
}

impl<S: Scalar> AmbientMetric<S> {
    /// Ambient metric from a closed-form `g_ρ` in `(x, ρ)` jets.
    pub fn closed_form(n: usize, g_rho: JetMatrix<S>) -> Result<Self> {
        if g_rho.len() != n || g_rho.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("g_rho must be {n}×{n}")));
        }
        let sp = g_rho[0][0].space().clone();
        if sp.nvars() != n + 1 || !(1..=2).contains(&sp.weight(n)) || (0..n).any(|i| sp.weight(i) != 1) {
            return Err(Error::Dimension("g_rho must live in an (x, rho) jet space with rho of weight 1 or 2".into()));
        }
        let xsp = JetSpace::get(n, sp.order());
        let g0: JetMatrix<S> = g_rho.iter().map(|r| r.iter().map(|j| rho_coefficient_x(j, 0, &xsp)).collect()).collect();
        let base = MetricJet::new(g0)?;
        Ok(AmbientMetric { n, base, g_rho, rho_order: None, kappa: None })
    }

    /// Ambient metric from the coefficients `g⁽⁰⁾, …, g⁽ᴺ⁾` (jets in `x`).
    pub fn from_series(base: MetricJet<S>, series: &[JetMatrix<S>]) -> Result<Self> {
        let n = base.dim();
        let k = base.space().order();
        let sp = xrho_space(n, k);
        let nn = series.len().saturating_sub(1) as u32;
        let mut g_rho: JetMatrix<S> = vec![vec![Jet::zero(&sp); n]; n];
        let rho = Jet::var(&sp, n);
        let mut rp = Jet::one(&sp);
        for gm in series {
            for i in 0..n {
                for j in 0..n {
                    g_rho[i][j] = &g_rho[i][j] + &(&lift_x(&gm[i][j], &sp) * &rp);
                }
            }
            rp = &rp * &rho;
        }
        let rel = (2 * (nn as i64 + 1) - 1).min(k as i64);
        for row in g_rho.iter_mut() {
            for e in row.iter_mut() {
                *e = e.truncated(rel);
            }
        }
        Ok(AmbientMetric { n, base, g_rho, rho_order: Some(nn), kappa: None })
    }

    pub fn parity(&self) -> Parity {
        if self.n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
    /// Jet order `K` (weighted degree in `(x, ρ)`).
    pub fn order(&self) -> u32 {
        self.space().order()
    }
    pub fn space(&self) -> &Arc<JetSpace> {
        self.g_rho[0][0].space()
    }
    pub fn x_space(&self) -> &Arc<JetSpace> {
        self.base.space()
    }
    /// The jet variable carrying `ρ`.
    pub fn rho_var(&self) -> usize {
        self.n
    }
    /// `g⁽ᵐ⁾` as jets in `x`.
    pub fn rho_coefficient(&self, m: u32) -> JetMatrix<S> {
        let xsp = self.x_space().clone();
        self.g_rho.iter().map(|r| r.iter().map(|j| rho_coefficient_x(j, m, &xsp)).collect()).collect()
    }
    /// Weight of `ρ` in the jet grading.
    pub fn rho_weight(&self) -> u32 {
        self.space().weight(self.n)
    }
    /// `g⁽⁰⁾, …, g⁽ᴺ⁾` (up to `K / w_ρ` for closed forms).
    pub fn rho_series(&self) -> Vec<JetMatrix<S>> {
        let top = self.rho_order.unwrap_or(self.order() / self.rho_weight());
        (0..=top).map(|m| self.rho_coefficient(m)).collect()
    }
    /// `g′ = ∂_ρ g_ρ`.
    pub fn g_rho_prime(&self) -> JetMatrix<S> {
        self.g_rho.iter().map(|r| r.iter().map(|j| j.diff(self.n)).collect()).collect()
    }

    /// Injects the ambiguity `κ` (trace-free, symmetric) as the order-`n/2` coefficient.
    pub fn with_ambiguity(self, kappa: JetMatrix<S>) -> Result<Self> {
        let n = self.n;
        if n % 2 == 1 {
            return Err(Error::InvalidInput("ambiguity only exists in even dimension".into()));
        }
        if self.rho_order != Some(n as u32 / 2 - 1) {
            return Err(Error::InvalidInput(format!("ambiguity is injected on top of an order-{} expansion", n / 2 - 1)));
        }
        let mut tr = Jet::zero(self.x_space());
        for i in 0..n {
            for j in 0..n {
                if kappa[i][j] != kappa[j][i] {
                    return Err(Error::InvalidInput("ambiguity must be symmetric".into()));
                }
                tr = &tr + &(self.base.ginv(i, j) * &kappa[i][j]);
            }
        }
        if !tr.is_zero() {
            return Err(Error::InvalidInput("ambiguity must be trace-free".into()));
        }
        let mut series = self.rho_series();
        series.push(kappa.clone());
        let mut out = AmbientMetric::from_series(self.base.clone(), &series)?;
        out.kappa = Some(kappa);
        Ok(out)
    }

    /// The ambient metric `g̃` on the slice `t = 1` with its block inverse.
    pub fn metric(&self) -> Result<MetricJet<S>> {
        ambient_metric_from(self.n, &self.g_rho, self.base.signature)
    }

    /// Text listing: metadata followed by the coefficients `g⁽ᵐ⁾`.
    pub fn listing(&self) -> String {
        let mut s = String::new();
        let names: Vec<String> = (1..=self.n).map(|i| format!("x{i}")).collect();
        let nm: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let _ = writeln!(s, "ambient n={} order={} parity={:?}", self.n, self.order(), self.parity());
        match self.rho_order {
            Some(k) => {
                let _ = writeln!(s, "rho_order={k}");
            }
            None => {
                let _ = writeln!(s, "rho_order=closed");
            }
        }
        let _ = writeln!(s, "kappa={}", if self.kappa.is_some() { "present" } else { "absent" });
        for (m, gm) in self.rho_series().iter().enumerate() {
            let _ = writeln!(s, "[g{m}]");
            for i in 0..self.n {
                for j in i..self.n {
                    let c = &gm[i][j];
                    if !c.is_zero() {
                        let _ = writeln!(s, "({},{}) {}", i + 1, j + 1, c.display_with(&nm));
                    }
                }
            }
        }
        s
    }
}

/// `g̃` on `t = 1` from `g_ρ`: `g̃_00 = 2ρ`, `g̃_0∞ = 1`, `g̃_ij = g_ρ`, with inverse
/// `g̃^{0∞} = 1`, `g̃^{∞∞} = −2ρ`, `g̃^{ij} = g_ρ^{-1}`.
pub fn ambient_metric_from<S: Scalar>(n: usize, g_rho: &JetMatrix<S>, base_sig: (usize, usize)) -> Result<MetricJet<S>> {
    let sp = g_rho[0][0].space().clone();
    let inv = jet_inverse(g_rho).map_err(|e| Error::DegenerateMetric(e.to_string()))?;
    let frame = Frame::Ambient { n };
    let inf = n + 1;
    let rho2 = Jet::var(&sp, n).scale_i(2);
    let mut g = TensorJet::lower(frame, 2, 2, &sp);
    let mut gi = TensorJet::zeros(frame, vec![Slot::Upper, Slot::Upper], -2, &sp);
    g.sym.push((0, 1));
    gi.sym.push((0, 1));
    g.set(&[0, 0], rho2.clone());
    g.set(&[0, inf], Jet::one(&sp));
    g.set(&[inf, 0], Jet::one(&sp));
    gi.set(&[0, inf], Jet::one(&sp));
    gi.set(&[inf, 0], Jet::one(&sp));
    gi.set(&[inf, inf], -rho2);
    for i in 0..n {
        for j in 0..n {
            g.set(&[i + 1, j + 1], g_rho[i][j].clone());
            let v = if i <= j { inv[i][j].clone() } else { inv[j][i].clone() };
            gi.set(&[i + 1, j + 1], v);
        }
    }
    Ok(MetricJet::with_inverse(frame, g, gi, (base_sig.0 + 1, base_sig.1 + 1)))
}

fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

/// `ρ^{m−1}` coefficients of `Ric(g̃)_ij`, `i ≤ j`, followed (for `m ≥ 2`) by
/// the `ρ^{m−2}` coefficient of `Ric(g̃)_∞∞`, for the given `g_ρ`.
fn fg_residual<S: Scalar>(n: usize, g_rho: &JetMatrix<S>, m: u32) -> Result<Vec<Jet<S>>> {
    let mj = ambient_metric_from(n, g_rho, (0, 0))?;
    let mut cache = CurvatureCache::new(&mj);
    let mut out: Vec<Jet<S>> =
        sym_pairs(n).into_iter().map(|(i, j)| cache.ricci(i + 1, j + 1).coeff_in_var(n, m - 1)).collect();
    if m >= 2 {
        out.push(cache.ricci(n + 1, n + 1).coeff_in_var(n, m - 2));
    }
    Ok(out)
}

/// Greedy choice of equations whose values at the base point are linearly
/// independent; the `ij` equations come first, so the `∞∞` equation is only
/// used where the `ij` block loses rank (`m = n`, trace direction).
fn independent_rows<S: Scalar>(a: &JetMatrix<S>) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<S>> = Vec::new();
    for (e, row) in a.iter().enumerate() {
        rows.push(row.iter().map(|j| j.constant_term()).collect());
        if Matrix::from_rows(rows.clone()).rank(0.0) > chosen.len() {
            chosen.push(e);
        } else {
            rows.pop();
        }
    }
    chosen
}

/// Fefferman–Graham expansion to ρ-order `N` by probing.
pub fn fg_expand<S: Scalar>(g: &MetricJet<S>, order: u32) -> Result<AmbientMetric<S>> {
    let n = g.dim();
    let perm: Vec<usize> = (0..n * (n + 1) / 2).collect();
    fg_expand_with_probe_order(g, order, &perm)
}

/// As [`fg_expand`], with the unit symmetric probes applied in the order `perm`.
pub fn fg_expand_with_probe_order<S: Scalar>(g: &MetricJet<S>, order: u32, perm: &[usize]) -> Result<AmbientMetric<S>> {
    let n = g.dim();
    if !matches!(g.frame, Frame::Coord { .. }) {
        return Err(Error::InvalidInput("fg_expand expects a base metric in plain coordinates".into()));
    }
    if n < 3 {
        return Err(Error::Dimension("ambient metrics need n ≥ 3".into()));
    }
    if n % 2 == 0 && order + 1 > (n / 2) as u32 {
        return Err(Error::AmbiguityNotDetermined(format!(
            "n = {n} is even: coefficients of order ≥ {} are not determined by the expansion (requested {order})",
            n / 2
        )));
    }
    let k = g.space().order();
    if (k as i64) < 2 * order as i64 {
        return Err(Error::InsufficientOrder(format!(
            "jet order {k} cannot carry g^({order}) (needs order ≥ {})",
            2 * order
        )));
    }
    let pairs = sym_pairs(n);
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..pairs.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidInput("probe order must be a permutation of the symmetric basis".into()));
    }
    let sp = xrho_space(n, k);
    let rho = Jet::var(&sp, n);
    let mut known: JetMatrix<S> =
        (0..n).map(|i| (0..n).map(|j| lift_x(g.gij(i, j), &sp)).collect()).collect();
    for m in 1..=order {
        let rm = rho.powi(m);
        let r0 = fg_residual(n, &known, m)?;
        let np = pairs.len();
        let ne = r0.len();
        // a[eq][unknown]
        let mut a: JetMatrix<S> = vec![vec![Jet::zero(&sp); np]; ne];
        for (col, &u) in perm.iter().enumerate() {
            let (p, q) = pairs[u];
            let mut trial = known.clone();
            trial[p][q] = &trial[p][q] + &rm;
            if p != q {
                trial[q][p] = &trial[q][p] + &rm;
            }
            let ru = fg_residual(n, &trial, m)?;
            for e in 0..ne {
                a[e][col] = &ru[e] - &r0[e];
            }
        }
        let rows = independent_rows(&a);
        let a: JetMatrix<S> = rows.iter().map(|&e| a[e].clone()).collect();
        let b: JetMatrix<S> = rows.iter().map(|&e| vec![-&r0[e]]).collect();
        let x = jet_solve(&a, &b).map_err(|e| Error::SingularSystem { order: m as usize, msg: e.to_string() })?;
        for (col, &u) in perm.iter().enumerate() {
            let (p, q) = pairs[u];
            let add = &x[col][0] * &rm;
            known[p][q] = &known[p][q] + &add;
            if p != q {
                known[q][p] = &known[q][p] + &add;
            }
        }
    }
    let rel = (2 * order as i64 + 1).min(k as i64);
    for row in known.iter_mut() {
        for e in row.iter_mut() {
            *e = e.truncated(rel);
        }
    }
    Ok(AmbientMetric { n, base: g.clone(), g_rho: known, rho_order: Some(order), kappa: None })
}

/// Ambient Christoffel symbols `Γ̃^K_IJ` on `t = 1` from the block formulas.
pub fn ambient_christoffel<S: Scalar>(a: &AmbientMetric<S>) -> Result<TensorJet<S>> {
    let n = a.n;
    let inf = n + 1;
    let sp = a.space().clone();
    let g = &a.g_rho;
    let gp = a.g_rho_prime();
    let gi = jet_inverse(g).map_err(|e| Error::DegenerateMetric(e.to_string()))?;
    let rho = Jet::var(&sp, n);
    let half = S::from_ratio(1, 2);
    let mut out = TensorJet::zeros(Frame::Ambient { n }, vec![Slot::Upper, Slot::Lower, Slot::Lower], 0, &sp);
    out.sym.push((1, 2));
    let one = Jet::one(&sp);
    let mut set = |k: usize, i: usize, j: usize, v: Jet<S>| {
        out.set(&[k, i, j], v.clone());
        out.set(&[k, j, i], v);
    };
    // x-derivatives of g_ρ
    let dg: Vec<Vec<Vec<Jet<S>>>> =
        (0..n).map(|l| (0..n).map(|i| (0..n).map(|j| g[i][j].diff(l)).collect()).collect()).collect();
    for i in 0..n {
        for j in i..n {
            set(0, i + 1, j + 1, -gp[i][j].scale(&half));
            set(inf, i + 1, j + 1, &-&g[i][j] + &(&rho * &gp[i][j]));
            for k in 0..n {
                let mut acc = Jet::zero(&sp);
                for l in 0..n {
                    if gi[k][l].is_exact_zero() {
                        continue;
                    }
                    let f = &(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j];
                    acc = &acc + &(&gi[k][l] * &f);
                }
                set(k + 1, i + 1, j + 1, acc.scale(&half));
            }
        }
        set(i + 1, 0, i + 1, one.clone());
        for k in 0..n {
            let mut acc = Jet::zero(&sp);
            for l in 0..n {
                acc = &acc + &(&gi[k][l] * &gp[i][l]);
            }
            set(k + 1, i + 1, inf, acc.scale(&half));
        }
    }
    set(inf, 0, inf, one);
    Ok(out)
}

/// `[R̃, ∇̃R̃, …, ∇̃ᵏR̃]` as covariant tensors on `t = 1` (derivative indices appended).
///
/// Fails if some component of the last tensor has no reliable terms left.
pub fn ambient_curvature<S: Scalar>(a: &AmbientMetric<S>, derivs: usize) -> Result<Vec<TensorJet<S>>> {
    let out = curvature_tower(a, derivs, None)?;
    let last = out.last().unwrap();
    for idx in last.indices() {
        let c = last.get(&idx);
        if c.reliable() < 0 {
            let lab: Vec<String> = idx.iter().map(|&i| last.frame.label(i)).collect();
            return Err(Error::InsufficientOrder(format!(
                "derivative order {derivs} exhausts the jet order {} at component ({})",
                a.order(),
                lab.join(",")
            )));
        }
    }
    Ok(out)
}

type IndexFilter<'f> = &'f dyn Fn(&[usize]) -> bool;

fn curvature_tower<S: Scalar>(a: &AmbientMetric<S>, derivs: usize, top_filter: Option<IndexFilter>) -> Result<Vec<TensorJet<S>>> {
    let mj = a.metric()?;
    let cache = CurvatureCache::new(&mj);
    let gam = cache.gamma.clone();
    let r = crate::tensors::riemann_from(&mj, &cache.first, &gam);
    let mut out = vec![r];
    for k in 1..=derivs {
        let f = if k == derivs { top_filter } else { None };
        let next = covariant_derivative(out.last().unwrap(), &gam, f);
        out.push(next);
    }
    Ok(out)
}

/// Result of the Ricci-order check.
#[derive(Clone, Debug)]
pub struct RicciOrderReport {
    /// Verified order `m` with `Ric(g̃) = O(ρᵐ)` (the `∞∞` block counted one order higher).
    pub order: u32,
    /// Plain componentwise minimum over all blocks.
    pub componentwise: u32,
    /// Largest order certifiable from the jet truncation.
    pub truncation_limit: u32,
    /// Orders per block: `ij`, `i∞`, `0*`, `∞∞`.
    pub blocks: Vec<(String, u32)>,
    /// Trace and trace-free part of the leading nonzero `ij` coefficient, if any.
    pub leading: Option<LeadingCoefficient>,
}

/// Trace / trace-free breakdown of the leading nonzero `ρ`-coefficient of `Ric_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeadingCoefficient {
    pub rho_power: u32,
    pub trace_is_zero: bool,
    pub trace_free_is_zero: bool,
}

/// `(ρ-valuation, truncation limit)` of an `(x, ρ)` jet at the base point.
pub fn rho_order_of<S: Scalar>(j: &Jet<S>, rho: usize, tol: f64) -> (u32, u32) {
    let w = j.space().weight(rho) as i64;
    let lim = if j.is_exact() {
        u32::MAX
    } else if j.reliable() < 0 {
        0
    } else {
        (j.reliable() / w + 1) as u32
    };
    match j.var_valuation(rho, tol) {
        Ok(m) => (m.min(lim), lim),
        Err(l) => (l, l),
    }
}

/// Largest verified `m` with `Ric(g̃) = O(ρᵐ)` within the truncation.
pub fn check_ricci_order<S: Scalar>(a: &AmbientMetric<S>) -> Result<RicciOrderReport> {
    check_ricci_order_tol(a, 0.0)
}

pub fn check_ricci_order_tol<S: Scalar>(a: &AmbientMetric<S>, tol: f64) -> Result<RicciOrderReport> {
    let n = a.n;
    let inf = n + 1;
    let mj = a.metric()?;
    let mut cache = CurvatureCache::new(&mj);
    let (mut ij, mut iinf, mut zero, mut infinf) = (u32::MAX, u32::MAX, u32::MAX, u32::MAX);
    let (mut lim_ij, mut lim_iinf, mut lim_zero, mut lim_infinf) = (u32::MAX, u32::MAX, u32::MAX, u32::MAX);
    let mut ric_ij = vec![vec![Jet::zero(a.space()); n]; n];
    for b in 0..n + 2 {
        for d in b..n + 2 {
            let c = cache.ricci(b, d);
            let (v, lim) = rho_order_of(&c, n, tol);
            let (slot, lslot) = if b == 0 || d == 0 {
                (&mut zero, &mut lim_zero)
            } else if b == inf && d == inf {
                (&mut infinf, &mut lim_infinf)
            } else if b == inf || d == inf {
                (&mut iinf, &mut lim_iinf)
            } else {
                ric_ij[b - 1][d - 1] = c.clone();
                ric_ij[d - 1][b - 1] = c;
                (&mut ij, &mut lim_ij)
            };
            *slot = (*slot).min(v);
            *lslot = (*lslot).min(lim);
        }
    }
    let componentwise = ij.min(iinf).min(zero).min(infinf);
    let conv = ij.min(iinf).min(zero).min(infinf.saturating_add(1));
    let truncation_limit = lim_ij.min(lim_iinf).min(lim_zero).min(lim_infinf.saturating_add(1));
    let order = conv.min(truncation_limit);
    let leading = if ij < lim_ij {
        let xsp = a.x_space().clone();
        let s: JetMatrix<S> =
            ric_ij.iter().map(|r| r.iter().map(|c| rho_coefficient_x(c, ij, &xsp)).collect()).collect();
        let mut tr = Jet::zero(&xsp);
        for i in 0..n {
            for j in 0..n {
                tr = &tr + &(a.base.ginv(i, j) * &s[i][j]);
            }
        }
        let trn = tr.scale(&S::from_ratio(1, n as i64));
        let mut tf_zero = true;
        for i in 0..n {
            for j in 0..n {
                let tf = &s[i][j] - &(a.base.gij(i, j) * &trn);
                if !tf.is_negligible(tol) {
                    tf_zero = false;
                }
            }
        }
        Some(LeadingCoefficient {
            rho_power: ij,
            trace_is_zero: tr.is_negligible(tol),
            trace_free_is_zero: tf_zero,
        })
    } else {
        None
    };
    Ok(RicciOrderReport {
        order,
        componentwise,
        truncation_limit,
        blocks: vec![("ij".into(), ij), ("i-inf".into(), iinf), ("0*".into(), zero), ("inf-inf".into(), infinf)],
        leading,
    })
}

/// Outcome of one family of identity checks.
#[derive(Clone, Debug, Default)]
pub struct IdentityCheck {
    pub name: String,
    /// Number of derivative indices (`r`) or divergence order (`k`).
    pub order: usize,
    /// Components whose residual is certified zero.
    pub checked: usize,
    /// Components whose residual has no reliable terms within the truncation.
    pub beyond_truncation: usize,
    /// Components with a nonzero residual (index labels).
    pub failures: Vec<String>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Residual report for the curvature identities.
#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_zero(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} order={} checked={} beyond_truncation={} failures={}",
                c.name,
                c.order,
                c.checked,
                c.beyond_truncation,
                c.failures.len()
            );
        }
        s
    }
}

fn record<S: Scalar>(chk: &mut IdentityCheck, res: &Jet<S>, tol: f64, label: impl FnOnce() -> String) {
    if res.reliable() < 0 && !res.is_exact() {
        chk.beyond_truncation += 1;
    } else if res.is_negligible(tol) {
        chk.checked += 1;
    } else {
        chk.failures.push(label());
    }
}

fn all_indices(dim: usize, len: usize) -> Vec<Vec<usize>> {
    let total = dim.pow(len as u32);
    (0..total)
        .map(|mut k| {
            let mut v = vec![0; len];
            for s in (0..len).rev() {
                v[s] = k % dim;
                k /= dim;
            }
            v
        })
        .collect()
}

/// Strength of an index: `‖0‖ = 0`, `‖i‖ = 1`, `‖∞‖ = 2`.
pub fn index_strength(n: usize, i: usize) -> usize {
    if i == 0 {
        0
    } else if i == n + 1 {
        2
    } else {
        1
    }
}

/// Residuals of the homogeneity/straightness identities for `R̃` and its derivatives
/// (up to `r` derivative indices) and of the divergence identity at `ρ = 0` for
/// `k = 1..=kmax`. In even dimension only index triples with
/// `‖IJA‖ + 2k ≤ n + 1` are tested.
pub fn verify_curvature_identities<S: Scalar>(a: &AmbientMetric<S>, r: usize, kmax: usize) -> Result<IdentityReport> {
    verify_curvature_identities_tol(a, r, kmax, 0.0)
}

pub fn verify_curvature_identities_tol<S: Scalar>(
    a: &AmbientMetric<S>,
    r: usize,
    kmax: usize,
    tol: f64,
) -> Result<IdentityReport> {
    let n = a.n;
    let dim = n + 2;
    let inf = n + 1;
    let top = r.max(kmax);
    let filter = move |idx: &[usize]| -> bool {
        idx[3] == 0 || (idx.len() > 4 && idx[4] == 0) || idx[5.min(idx.len())..].iter().all(|&x| x == inf)
    };
    let tower = curvature_tower(a, top, Some(&filter))?;
    let lab = |idx: &[usize]| -> String {
        let v: Vec<String> = idx.iter().map(|&i| Frame::Ambient { n }.label(i)).collect();
        format!("({})", v.join(","))
    };
    let mut report = IdentityReport::default();
    // T^L R_{IJKL,M1..Ms} + Σ_t R_{IJK M_t, M1..M̂_t..Ms} = 0
    for s in 0..=r {
        let mut chk = IdentityCheck { name: "straightness T^L R_IJKL,M".into(), order: s, ..Default::default() };
        for ijk in all_indices(dim, 3) {
            if ijk[0] >= ijk[1] {
                continue;
            }
            for ms in all_indices(dim, s) {
                let mut idx = ijk.clone();
                idx.push(0);
                idx.extend_from_slice(&ms);
                let mut res = tower[s].get(&idx).clone();
                for t in 0..s {
                    let mut j = ijk.clone();
                    j.push(ms[t]);
                    j.extend(ms.iter().enumerate().filter(|(u, _)| *u != t).map(|(_, &x)| x));
                    res = &res + tower[s - 1].get(&j);
                }
                record(&mut chk, &res, tol, || lab(&idx));
            }
        }
        report.checks.push(chk);
    }
    // T^P R_{IJKL,P M1..M_{s-1}} + 2 R_{IJKL,M..} + Σ_t R_{IJKL,M_t, M̂..} = 0
    for s in 1..=r {
        let mut chk = IdentityCheck { name: "homogeneity T^P R_IJKL,P".into(), order: s, ..Default::default() };
        for ijkl in all_indices(dim, 4) {
            if ijkl[0] >= ijkl[1] || ijkl[2] >= ijkl[3] {
                continue;
            }
            for ms in all_indices(dim, s - 1) {
                let mut idx = ijkl.clone();
                idx.push(0);
                idx.extend_from_slice(&ms);
                let mut base = ijkl.clone();
                base.extend_from_slice(&ms);
                let mut res = tower[s].get(&idx) + &tower[s - 1].get(&base).scale_i(2);
                for t in 0..ms.len() {
                    let mut j = ijkl.clone();
                    j.push(ms[t]);
                    j.extend(ms.iter().enumerate().filter(|(u, _)| *u != t).map(|(_, &x)| x));
                    res = &res + tower[s - 1].get(&j);
                }
                record(&mut chk, &res, tol, || lab(&idx));
            }
        }
        report.checks.push(chk);
    }
    // (2k+1) R_{IJA∞,∞^{k−1}} = g^{pq} R_{IJAq,p∞^{k−1}} at ρ = 0
    let rv = a.rho_var();
    for k in 1..=kmax {
        let mut chk = IdentityCheck { name: "divergence at rho=0".into(), order: k, ..Default::default() };
        for ija in all_indices(dim, 3) {
            if ija[0] >= ija[1] {
                continue;
            }
            if n % 2 == 0 {
                let strength: usize = ija.iter().map(|&i| index_strength(n, i)).sum();
                if strength + 2 * k > n + 1 {
                    continue;
                }
            }
            let mut lidx = ija.clone();
            lidx.push(inf);
            lidx.extend(std::iter::repeat(inf).take(k - 1));
            let lhs = tower[k - 1].get(&lidx).scale_i(2 * k as i64 + 1);
            let mut rhs = Jet::zero(a.space());
            for p in 1..=n {
                for q in 1..=n {
                    let gpq = lift_x(a.base.ginv(p - 1, q - 1), a.space());
                    if gpq.is_exact_zero() {
                        continue;
                    }
                    let mut ridx = ija.clone();
                    ridx.push(q);
                    ridx.push(p);
                    ridx.extend(std::iter::repeat(inf).take(k - 1));
                    rhs = &rhs + &(&gpq * tower[k].get(&ridx));
                }
            }
            let res = (&lhs - &rhs).restrict_zero(rv);
            record(&mut chk, &res, tol, || lab(&lidx));
        }
        report.checks.push(chk);
    }
    Ok(report)
}
