//! Pointwise tensor calculus over jets.
//!
//! Curvature convention: `R^a_bcd = ∂_c Γ^a_bd − ∂_d Γ^a_bc + Γ^a_ce Γ^e_bd − Γ^a_de Γ^e_bc`,
//! `R_abcd = g_ae R^e_bcd`, `Ric_bd = g^ac R_abcd`. The round sphere has
//! `R_abcd = g_ac g_bd − g_ad g_bc`. Covariant derivative indices are appended
//! on the right (`T_{A,M}` means `∇_M T_A`).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::linalg::{jet_inverse, jet_matrix_value, JetMatrix};
use crate::scalar::Scalar;

/// Variance of a tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Lower,
    Upper,
}

/// How coordinate directions act on component jets.
///
/// `Coord`: index `i` is jet variable `i`.
/// `Ambient`: the normal-form slice `t = 1` with index alphabet
/// `0, 1..n, ∞ = n+1`; index `i ∈ 1..n` is jet variable `i-1`, `∞` is the
/// `ρ` variable (jet variable `n`), and `∂_0` acts through homogeneity: a
/// component with t-exponent `e` is differentiated to `e ·` component.
/// `Tractor`: the same index alphabet over jets in `x` alone; only the
/// directions `1..n` can differentiate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Coord { dim: usize },
    Ambient { n: usize },
    Tractor { n: usize },
}

impl Frame {
    pub fn dim(&self) -> usize {
        match *self {
            Frame::Coord { dim } => dim,
            Frame::Ambient { n } | Frame::Tractor { n } => n + 2,
        }
    }
    pub fn nvars(&self) -> usize {
        match *self {
            Frame::Coord { dim } => dim,
            Frame::Ambient { n } => n + 1,
            Frame::Tractor { n } => n,
        }
    }
    /// `∂_dir` of a component with t-exponent `e`; returns the new exponent too.
    pub fn partial<S: Scalar>(&self, f: &Jet<S>, e: i64, dir: usize) -> (Jet<S>, i64) {
        match *self {
            Frame::Coord { .. } => (f.diff(dir), e),
            Frame::Ambient { n } => {
                if dir == 0 {
                    (f.scale_i(e), e - 1)
                } else if dir <= n {
                    (f.diff(dir - 1), e)
                } else {
                    (f.diff(n), e)
                }
            }
            Frame::Tractor { n } => {
                assert!((1..=n).contains(&dir), "tractor fields only differentiate along 1..n");
                (f.diff(dir - 1), e)
            }
        }
    }
    /// t-exponent of a component of a weight-`w` object with the given slots.
    pub fn t_exponent(&self, w: i64, slots: &[Slot], idx: &[usize]) -> i64 {
        match self {
            Frame::Coord { .. } | Frame::Tractor { .. } => 0,
            Frame::Ambient { .. } => {
                let mut e = w;
                for (s, &i) in slots.iter().zip(idx) {
                    if i == 0 {
                        match s {
                            Slot::Lower => e -= 1,
                            Slot::Upper => e += 1,
                        }
                    }
                }
                e
            }
        }
    }
    /// Human-readable index label.
    pub fn label(&self, i: usize) -> String {
        match *self {
            Frame::Coord { .. } => format!("{}", i + 1),
            Frame::Ambient { n } | Frame::Tractor { n } => {
                if i == 0 {
                    "0".into()
                } else if i == n + 1 {
                    "inf".into()
                } else {
                    format!("{i}")
                }
            }
        }
    }
}

/// Dense tensor with jet components.
#[derive(Clone, Debug)]
pub struct TensorJet<S: Scalar> {
    pub frame: Frame,
    pub slots: Vec<Slot>,
    /// Homogeneity weight (only meaningful in the ambient frame).
    pub weight: i64,
    /// Slot pairs declared antisymmetric.
    pub antisym: Vec<(usize, usize)>,
    /// Slot pairs declared symmetric.
    pub sym: Vec<(usize, usize)>,
    comps: Vec<Jet<S>>,
}

impl<S: Scalar> TensorJet<S> {
    pub fn zeros(frame: Frame, slots: Vec<Slot>, weight: i64, space: &Arc<JetSpace>) -> Self {
        let dim = frame.dim();
        let n = dim.pow(slots.len() as u32);
        TensorJet { frame, slots, weight, antisym: vec![], sym: vec![], comps: vec![Jet::zero(space); n] }
    }
    pub fn lower(frame: Frame, rank: usize, weight: i64, space: &Arc<JetSpace>) -> Self {
        Self::zeros(frame, vec![Slot::Lower; rank], weight, space)
    }
    pub fn dim(&self) -> usize {
        self.frame.dim()
    }
    pub fn rank(&self) -> usize {
        self.slots.len()
    }
    pub fn space(&self) -> &Arc<JetSpace> {
        self.comps[0].space()
    }
    pub fn flat(&self, idx: &[usize]) -> usize {
        let d = self.dim();
        idx.iter().fold(0, |acc, &i| acc * d + i)
    }
    pub fn unflat(&self, mut k: usize) -> Vec<usize> {
        let d = self.dim();
        let mut idx = vec![0; self.rank()];
        for s in (0..self.rank()).rev() {
            idx[s] = k % d;
            k /= d;
        }
        idx
    }
    pub fn get(&self, idx: &[usize]) -> &Jet<S> {
        &self.comps[self.flat(idx)]
    }
    pub fn set(&mut self, idx: &[usize], v: Jet<S>) {
        let k = self.flat(idx);
        self.comps[k] = v;
    }
    pub fn comps(&self) -> &[Jet<S>] {
        &self.comps
    }
    pub fn comps_mut(&mut self) -> &mut [Jet<S>] {
        &mut self.comps
    }
    pub fn len(&self) -> usize {
        self.comps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.comps.len()).map(|k| self.unflat(k))
    }
    pub fn t_exponent(&self, idx: &[usize]) -> i64 {
        self.frame.t_exponent(self.weight, &self.slots, idx)
    }
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.comps.iter().all(|c| c.is_negligible(tol))
    }
    /// Minimum reliable degree over all components.
    pub fn reliable(&self) -> i64 {
        self.comps.iter().map(|c| c.reliable()).min().unwrap_or(-1)
    }
    pub fn map(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Self {
        TensorJet { comps: self.comps.iter().map(f).collect(), ..self.clone_meta() }
    }
    fn clone_meta(&self) -> TensorJet<S> {
        TensorJet {
            frame: self.frame,
            slots: self.slots.clone(),
            weight: self.weight,
            antisym: self.antisym.clone(),
            sym: self.sym.clone(),
            comps: vec![],
        }
    }
    pub fn zip_with(&self, o: &Self, f: impl Fn(&Jet<S>, &Jet<S>) -> Jet<S>) -> Self {
        assert_eq!(self.comps.len(), o.comps.len(), "tensor shape mismatch");
        TensorJet { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| f(a, b)).collect(), ..self.clone_meta() }
    }
    pub fn add(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a + b)
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a - b)
    }
    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.scale(s))
    }
    pub fn scale_jet(&self, j: &Jet<S>) -> Self {
        self.map(|a| a * j)
    }
    pub fn truncated(&self, d: i64) -> Self {
        self.map(|a| a.truncated(d))
    }
    pub fn restrict_zero(&self, var: usize) -> Self {
        self.map(|a| a.restrict_zero(var))
    }
    /// Values of all components at the base point.
    pub fn values(&self) -> Vec<S> {
        self.comps.iter().map(|c| c.constant_term()).collect()
    }

    /// Canonical representative of an index tuple under the declared
    /// (anti)symmetries: returns `(canonical index, sign)` with sign 0 for
    /// forced zeros.
    pub fn canonical(&self, idx: &[usize]) -> (Vec<usize>, i32) {
        let mut c = idx.to_vec();
        let mut sign = 1;
        for &(a, b) in &self.antisym {
            if c[a] == c[b] {
                return (c, 0);
            }
            if c[a] > c[b] {
                c.swap(a, b);
                sign = -sign;
            }
        }
        for &(a, b) in &self.sym {
            if c[a] > c[b] {
                c.swap(a, b);
            }
        }
        (c, sign)
    }

    /// Fills non-canonical components from canonical ones.
    pub fn fill_symmetries(&mut self) {
        if self.antisym.is_empty() && self.sym.is_empty() {
            return;
        }
        let sp = self.space().clone();
        for k in 0..self.comps.len() {
            let idx = self.unflat(k);
            let (c, sign) = self.canonical(&idx);
            if sign == 0 {
                self.comps[k] = Jet::zero(&sp);
            } else if c != idx {
                let v = self.comps[self.flat(&c)].clone();
                self.comps[k] = if sign < 0 { -v } else { v };
            }
        }
    }

    /// Checks the declared symmetries exactly.
    pub fn symmetries_hold(&self) -> bool {
        for idx in self.indices() {
            for &(a, b) in &self.antisym {
                let mut j = idx.clone();
                j.swap(a, b);
                if *self.get(&idx) != -self.get(&j) {
                    return false;
                }
            }
            for &(a, b) in &self.sym {
                let mut j = idx.clone();
                j.swap(a, b);
                if self.get(&idx) != self.get(&j) {
                    return false;
                }
            }
        }
        true
    }

    /// Listing `(i,j,..) -> jet` in lexicographic order, skipping zeros.
    pub fn listing(&self, names: &[&str]) -> String {
        let mut s = String::new();
        for idx in self.indices() {
            let c = self.get(&idx);
            if c.is_zero() {
                continue;
            }
            let lab: Vec<String> = idx.iter().map(|&i| self.frame.label(i)).collect();
            s.push_str(&format!("({}) {}\n", lab.join(","), c.display_with(names)));
        }
        s
    }
}

/// A metric with cached inverse.
#[derive(Clone, Debug)]
pub struct MetricJet<S: Scalar> {
    pub frame: Frame,
    pub g: TensorJet<S>,
    pub g_inv: TensorJet<S>,
    /// Signature `(p, q)` at the base point.
    pub signature: (usize, usize),
}

impl<S: Scalar> MetricJet<S> {
    /// Metric in plain coordinates from a symmetric matrix of jets (`nvars = dim`).
    pub fn new(m: JetMatrix<S>) -> Result<Self> {
        let dim = m.len();
        Self::with_frame(Frame::Coord { dim }, m, 0)
    }

    /// Metric in an arbitrary frame with homogeneity weight `w` (2 for ambient metrics).
    pub fn with_frame(frame: Frame, m: JetMatrix<S>, w: i64) -> Result<Self> {
        let dim = frame.dim();
        if m.len() != dim || m.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension(format!("metric matrix must be {dim}×{dim}")));
        }
        let sp = m[0][0].space().clone();
        if sp.nvars() != frame.nvars() {
            return Err(Error::Dimension(format!(
                "metric jets have {} variables, frame needs {}",
                sp.nvars(),
                frame.nvars()
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(Error::InvalidInput(format!("metric not symmetric at ({i},{j})")));
                }
            }
        }
        let val = jet_matrix_value(&m);
        let (p, q, z) = val.inertia();
        if z > 0 {
            return Err(Error::DegenerateMetric(format!("metric degenerate at the base point (nullity {z})")));
        }
        let inv = jet_inverse(&m).map_err(|e| Error::DegenerateMetric(e.to_string()))?;
        let mut g = TensorJet::lower(frame, 2, w, &sp);
        let mut gi = TensorJet::zeros(frame, vec![Slot::Upper, Slot::Upper], -w, &sp);
        g.sym.push((0, 1));
        gi.sym.push((0, 1));
        for i in 0..dim {
            for j in 0..dim {
                g.set(&[i, j], m[i][j].clone());
                gi.set(&[i, j], inv[i][j].clone());
            }
        }
        // symmetrise the inverse exactly (elimination may break symmetry of unreliable tails)
        for i in 0..dim {
            for j in 0..i {
                let v = gi.get(&[j, i]).clone();
                gi.set(&[i, j], v);
            }
        }
        Ok(MetricJet { frame, g, g_inv: gi, signature: (p, q) })
    }

    /// Metric with an explicitly supplied inverse (used for block-structured ambient metrics).
    pub fn with_inverse(frame: Frame, g: TensorJet<S>, g_inv: TensorJet<S>, signature: (usize, usize)) -> Self {
        MetricJet { frame, g, g_inv, signature }
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }
    pub fn space(&self) -> &Arc<JetSpace> {
        self.g.space()
    }
    pub fn matrix(&self) -> JetMatrix<S> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.g.get(&[i, j]).clone()).collect()).collect()
    }
    pub fn gij(&self, i: usize, j: usize) -> &Jet<S> {
        self.g.get(&[i, j])
    }
    pub fn ginv(&self, i: usize, j: usize) -> &Jet<S> {
        self.g_inv.get(&[i, j])
    }
    pub fn reliable(&self) -> i64 {
        self.g.reliable()
    }
}

/// Christoffel symbols of the first kind `Γ_{l,ij}` (slots l, i, j).
pub fn christoffel_first<S: Scalar>(m: &MetricJet<S>) -> TensorJet<S> {
    let d = m.dim();
    let f = m.frame;
    let sp = m.space().clone();
    // dg[k][i][j] = ∂_k g_ij
    let mut dg = vec![vec![vec![Jet::zero(&sp); d]; d]; d];
    for k in 0..d {
        for i in 0..d {
            for j in i..d {
                let e = m.g.t_exponent(&[i, j]);
                let v = f.partial(m.gij(i, j), e, k).0;
                dg[k][i][j] = v.clone();
                dg[k][j][i] = v;
            }
        }
    }
    let mut out = TensorJet::lower(f, 3, m.g.weight, &sp);
    out.sym.push((1, 2));
    let half = S::from_ratio(1, 2);
    for l in 0..d {
        for i in 0..d {
            for j in i..d {
                let v = (&(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j]).scale(&half);
                out.set(&[l, i, j], v.clone());
                out.set(&[l, j, i], v);
            }
        }
    }
    out
}

/// Christoffel symbols `Γ^k_ij` (slots k up, i, j down); symmetric in i, j.
pub fn christoffel<S: Scalar>(m: &MetricJet<S>) -> TensorJet<S> {
    let first = christoffel_first(m);
    raise_christoffel(m, &first)
}

fn raise_christoffel<S: Scalar>(m: &MetricJet<S>, first: &TensorJet<S>) -> TensorJet<S> {
    let d = m.dim();
    let sp = m.space().clone();
    let mut out = TensorJet::zeros(m.frame, vec![Slot::Upper, Slot::Lower, Slot::Lower], 0, &sp);
    out.sym.push((1, 2));
    for k in 0..d {
        for i in 0..d {
            for j in i..d {
                let mut acc = Jet::zero(&sp);
                for l in 0..d {
                    let gi = m.ginv(k, l);
                    if gi.is_exact_zero() {
                        continue;
                    }
                    let c = first.get(&[l, i, j]);
                    if c.is_exact_zero() {
                        continue;
                    }
                    acc = &acc + &(gi * c);
                }
                out.set(&[k, i, j], acc.clone());
                out.set(&[k, j, i], acc);
            }
        }
    }
    out
}

/// Fully covariant Riemann tensor `R_abcd`.
pub fn riemann<S: Scalar>(m: &MetricJet<S>) -> Result<TensorJet<S>> {
    if m.reliable() < 2 && !m.g.comps().iter().all(|c| c.is_exact()) {
        return Err(Error::InsufficientOrder("Riemann tensor needs metric jets reliable to order ≥ 2".into()));
    }
    let first = christoffel_first(m);
    let gam = raise_christoffel(m, &first);
    Ok(riemann_from(m, &first, &gam))
}

/// One component `R_abcd` from Christoffel symbols of both kinds.
pub fn riemann_entry<S: Scalar>(
    m: &MetricJet<S>,
    first: &TensorJet<S>,
    gam: &TensorJet<S>,
    a: usize,
    b: usize,
    c: usize,
    dd: usize,
) -> Jet<S> {
    let d = m.dim();
    let f = m.frame;
    // second derivatives ∂_y ∂_z g_uv with t-exponent bookkeeping
    let d2 = |u: usize, v: usize, y: usize, z: usize| -> Jet<S> {
        let e0 = m.g.t_exponent(&[u, v]);
        let (j1, e1) = f.partial(m.gij(u, v), e0, z);
        f.partial(&j1, e1, y).0
    };
    let lin = &(&(&d2(a, dd, b, c) + &d2(b, c, a, dd)) - &d2(a, c, b, dd)) - &d2(b, dd, a, c);
    let mut v = lin.scale(&S::from_ratio(1, 2));
    for e in 0..d {
        let t1 = first.get(&[e, a, dd]);
        let g1 = gam.get(&[e, b, c]);
        if !t1.is_exact_zero() && !g1.is_exact_zero() {
            v = &v + &(t1 * g1);
        }
        let t2 = first.get(&[e, a, c]);
        let g2 = gam.get(&[e, b, dd]);
        if !t2.is_exact_zero() && !g2.is_exact_zero() {
            v = &v - &(t2 * g2);
        }
    }
    v
}

/// Riemann tensor from precomputed Christoffel symbols of both kinds.
pub fn riemann_from<S: Scalar>(m: &MetricJet<S>, first: &TensorJet<S>, gam: &TensorJet<S>) -> TensorJet<S> {
    let d = m.dim();
    let sp = m.space().clone();
    let mut out = TensorJet::lower(m.frame, 4, m.g.weight, &sp);
    out.antisym = vec![(0, 1), (2, 3)];
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
    for (pi, &(a, b)) in pairs.iter().enumerate() {
        for &(c, dd) in &pairs[pi..] {
            let v = riemann_entry(m, first, gam, a, b, c, dd);
            out.set(&[a, b, c, dd], v.clone());
            out.set(&[c, dd, a, b], v);
        }
    }
    out.fill_symmetries();
    out
}

/// Lazily evaluated curvature of a metric: Riemann components are computed on
/// demand and cached by their canonical representative.
pub struct CurvatureCache<'a, S: Scalar> {
    m: &'a MetricJet<S>,
    pub first: TensorJet<S>,
    pub gamma: TensorJet<S>,
    memo: std::collections::HashMap<[usize; 4], Jet<S>>,
}

impl<'a, S: Scalar> CurvatureCache<'a, S> {
    pub fn new(m: &'a MetricJet<S>) -> Self {
        let first = christoffel_first(m);
        let gamma = raise_christoffel(m, &first);
        CurvatureCache { m, first, gamma, memo: Default::default() }
    }
    pub fn riemann(&mut self, a: usize, b: usize, c: usize, d: usize) -> Jet<S> {
        if a == b || c == d {
            return Jet::zero(self.m.space());
        }
        let mut neg = false;
        let (mut p, mut q) = ((a, b), (c, d));
        if p.0 > p.1 {
            p = (p.1, p.0);
            neg = !neg;
        }
        if q.0 > q.1 {
            q = (q.1, q.0);
            neg = !neg;
        }
        if p > q {
            std::mem::swap(&mut p, &mut q);
        }
        let key = [p.0, p.1, q.0, q.1];
        if !self.memo.contains_key(&key) {
            let v = riemann_entry(self.m, &self.first, &self.gamma, p.0, p.1, q.0, q.1);
            self.memo.insert(key, v);
        }
        let v = &self.memo[&key];
        if neg {
            -v
        } else {
            v.clone()
        }
    }
    /// `Ric_bd = g^{ac} R_abcd`.
    pub fn ricci(&mut self, b: usize, d: usize) -> Jet<S> {
        let dim = self.m.dim();
        let mut acc = Jet::zero(self.m.space());
        for a in 0..dim {
            for c in 0..dim {
                let gi = self.m.ginv(a, c).clone();
                if gi.is_exact_zero() {
                    continue;
                }
                let r = self.riemann(a, b, c, d);
                if !r.is_exact_zero() {
                    acc = &acc + &(&gi * &r);
                }
            }
        }
        acc
    }
}

/// `Ric_bd = g^{ac} R_abcd`.
pub fn ricci_from<S: Scalar>(m: &MetricJet<S>, r: &TensorJet<S>) -> TensorJet<S> {
    let d = m.dim();
    let sp = m.space().clone();
    let mut out = TensorJet::lower(m.frame, 2, m.g.weight - 2 + 2, &sp);
    out.weight = 0;
    out.sym.push((0, 1));
    let support: Vec<(usize, usize)> =
        (0..d).flat_map(|a| (0..d).map(move |c| (a, c))).filter(|&(a, c)| !m.ginv(a, c).is_exact_zero()).collect();
    for b in 0..d {
        for dd in b..d {
            let mut acc = Jet::zero(&sp);
            for &(a, c) in &support {
                let rr = r.get(&[a, b, c, dd]);
                if !rr.is_exact_zero() {
                    acc = &acc + &(m.ginv(a, c) * rr);
                }
            }
            out.set(&[b, dd], acc.clone());
            out.set(&[dd, b], acc);
        }
    }
    out
}

pub fn ricci<S: Scalar>(m: &MetricJet<S>) -> Result<TensorJet<S>> {
    Ok(ricci_from(m, &riemann(m)?))
}

/// Full trace `g^{ij} T_ij`.
pub fn trace<S: Scalar>(m: &MetricJet<S>, t: &TensorJet<S>) -> Jet<S> {
    let d = m.dim();
    let mut acc = Jet::zero(m.space());
    for i in 0..d {
        for j in 0..d {
            let gi = m.ginv(i, j);
            if !gi.is_exact_zero() {
                acc = &acc + &(gi * t.get(&[i, j]));
            }
        }
    }
    acc
}

pub fn scalar_curvature<S: Scalar>(m: &MetricJet<S>) -> Result<Jet<S>> {
    Ok(trace(m, &ricci(m)?))
}

/// Schouten tensor from a precomputed Ricci tensor: `(n−2)P = Ric − R/(2(n−1)) g`.
pub fn schouten_from<S: Scalar>(m: &MetricJet<S>, ric: &TensorJet<S>) -> Result<TensorJet<S>> {
    let n = m.dim() as i64;
    if n < 3 {
        return Err(Error::Dimension("Schouten tensor needs n ≥ 3".into()));
    }
    let r = trace(m, ric);
    let c = S::from_ratio(1, 2 * (n - 1));
    let rg = m.g.scale_jet(&r.scale(&c));
    Ok(ric.sub(&rg).scale(&S::from_ratio(1, n - 2)))
}

pub fn schouten<S: Scalar>(m: &MetricJet<S>) -> Result<TensorJet<S>> {
    schouten_from(m, &ricci(m)?)
}

/// `J = g^{ij} P_ij`.
pub fn schouten_trace<S: Scalar>(m: &MetricJet<S>) -> Result<Jet<S>> {
    Ok(trace(m, &schouten(m)?))
}

/// Kulkarni–Nomizu product `(P ⊘ g)_abcd = P_ac g_bd − P_ad g_bc + P_bd g_ac − P_bc g_ad`.
pub fn kulkarni_nomizu<S: Scalar>(p: &TensorJet<S>, g: &TensorJet<S>) -> TensorJet<S> {
    let d = p.dim();
    let sp = p.space().clone();
    let mut out = TensorJet::lower(p.frame, 4, 0, &sp);
    out.antisym = vec![(0, 1), (2, 3)];
    for a in 0..d {
        for b in a + 1..d {
            for c in 0..d {
                for dd in c + 1..d {
                    let v = &(&(&(p.get(&[a, c]) * g.get(&[b, dd])) - &(p.get(&[a, dd]) * g.get(&[b, c])))
                        + &(p.get(&[b, dd]) * g.get(&[a, c])))
                        - &(p.get(&[b, c]) * g.get(&[a, dd]));
                    out.set(&[a, b, c, dd], v);
                }
            }
        }
    }
    out.fill_symmetries();
    out
}

/// Weyl tensor `W = R − P ⊘ g` (zero for n = 3 by convention).
pub fn weyl<S: Scalar>(m: &MetricJet<S>) -> Result<TensorJet<S>> {
    let r = riemann(m)?;
    weyl_from(m, &r)
}

pub fn weyl_from<S: Scalar>(m: &MetricJet<S>, r: &TensorJet<S>) -> Result<TensorJet<S>> {
    if m.dim() <= 3 {
        let mut z = TensorJet::lower(m.frame, 4, 0, m.space());
        z.antisym = vec![(0, 1), (2, 3)];
        return Ok(z);
    }
    let ric = ricci_from(m, r);
    let p = schouten_from(m, &ric)?;
    let mut w = r.sub(&kulkarni_nomizu(&p, &m.g));
    w.antisym = vec![(0, 1), (2, 3)];
    Ok(w)
}

/// Covariant derivative of an all-lower tensor; the new index is appended last.
///
/// `filter`, if given, restricts which output components are computed (others
/// are left zero). Declared antisymmetric pairs are inherited and exploited.
pub fn covariant_derivative<S: Scalar>(
    t: &TensorJet<S>,
    gam: &TensorJet<S>,
    filter: Option<&dyn Fn(&[usize]) -> bool>,
) -> TensorJet<S> {
    assert!(t.slots.iter().all(|s| *s == Slot::Lower), "covariant derivative implemented for covariant tensors");
    let d = t.dim();
    let r = t.rank();
    let f = t.frame;
    let sp = t.space().clone();
    let mut out = TensorJet::lower(f, r + 1, t.weight, &sp);
    out.antisym = t.antisym.clone();
    out.sym = t.sym.clone();
    let total = d.pow((r + 1) as u32);
    let mut idx = vec![0usize; r + 1];
    for k in 0..total {
        let mut kk = k;
        for s in (0..=r).rev() {
            idx[s] = kk % d;
            kk /= d;
        }
        let (c, sign) = out.canonical(&idx);
        if sign != 1 || c != idx {
            continue;
        }
        if let Some(flt) = filter {
            if !orbit(&idx, &out.antisym, &out.sym).iter().any(|v| flt(v)) {
                continue;
            }
        }
        let a = &idx[..r];
        let mdir = idx[r];
        let e = t.t_exponent(a);
        let mut v = f.partial(t.get(a), e, mdir).0;
        let mut b = a.to_vec();
        for s in 0..r {
            let orig = b[s];
            for p in 0..d {
                let g = gam.get(&[p, mdir, orig]);
                if g.is_exact_zero() {
                    continue;
                }
                b[s] = p;
                let tv = t.get(&b);
                if !tv.is_exact_zero() {
                    v = &v - &(g * tv);
                }
            }
            b[s] = orig;
        }
        out.comps[k] = v;
    }
    if filter.is_none() {
        out.fill_symmetries();
    } else {
        // fill only where the canonical partner was computed
        let sp = sp.clone();
        for k in 0..total {
            let ix = out.unflat(k);
            let (c, sign) = out.canonical(&ix);
            if sign == 0 {
                out.comps[k] = Jet::zero(&sp);
            } else if c != ix {
                let v = out.comps[out.flat(&c)].clone();
                out.comps[k] = if sign < 0 { -v } else { v };
            }
        }
    }
    out
}

/// All index tuples obtained from `idx` by the declared slot transpositions.
fn orbit(idx: &[usize], antisym: &[(usize, usize)], sym: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = vec![idx.to_vec()];
    for &(a, b) in antisym.iter().chain(sym) {
        let k = out.len();
        for i in 0..k {
            let mut v = out[i].clone();
            v.swap(a, b);
            out.push(v);
        }
    }
    out
}

/// Cotton tensor `C_jkl = P_jk,l − P_jl,k`.
pub fn cotton<S: Scalar>(m: &MetricJet<S>) -> Result<TensorJet<S>> {
    if m.reliable() < 3 && !m.g.comps().iter().all(|c| c.is_exact()) {
        return Err(Error::InsufficientOrder("Cotton tensor needs metric jets reliable to order ≥ 3".into()));
    }
    let p = schouten(m)?;
    let gam = christoffel(m);
    Ok(cotton_from(&p, &gam))
}

pub fn cotton_from<S: Scalar>(p: &TensorJet<S>, gam: &TensorJet<S>) -> TensorJet<S> {
    let mut p = p.clone();
    p.sym.clear();
    let dp = covariant_derivative(&p, gam, None);
    let d = p.dim();
    let sp = p.space().clone();
    let mut c = TensorJet::lower(p.frame, 3, 0, &sp);
    c.antisym = vec![(1, 2)];
    for j in 0..d {
        for k in 0..d {
            for l in 0..d {
                c.set(&[j, k, l], dp.get(&[j, k, l]) - dp.get(&[j, l, k]));
            }
        }
    }
    c
}

/// `ĝ = Ω² g` for a positive jet `Ω²`.
pub fn conformal_rescale_by<S: Scalar>(m: &MetricJet<S>, omega2: &Jet<S>) -> Result<MetricJet<S>> {
    let d = m.dim();
    let mat: JetMatrix<S> = (0..d).map(|i| (0..d).map(|j| m.gij(i, j) * omega2).collect()).collect();
    MetricJet::with_frame(m.frame, mat, m.g.weight)
}

/// `ĝ = e^{2Υ} g`. In exact mode `Υ` must vanish at the base point.
pub fn conformal_rescale<S: Scalar>(m: &MetricJet<S>, upsilon: &Jet<S>) -> Result<MetricJet<S>> {
    let e2 = upsilon.scale_i(2).exp()?;
    conformal_rescale_by(m, &e2)
}

/// Trace-free part of a symmetric 2-tensor: `T − (tr T / n) g`.
pub fn trace_free<S: Scalar>(m: &MetricJet<S>, t: &TensorJet<S>) -> TensorJet<S> {
    let n = m.dim() as i64;
    let tr = trace(m, t).scale(&S::from_ratio(1, n));
    t.sub(&m.g.scale_jet(&tr))
}

/// Symmetric 2-tensor from a jet matrix.
pub fn sym2_from_matrix<S: Scalar>(frame: Frame, m: &JetMatrix<S>) -> TensorJet<S> {
    let sp = m[0][0].space().clone();
    let mut t = TensorJet::lower(frame, 2, 0, &sp);
    t.sym.push((0, 1));
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t.set(&[i, j], v.clone());
        }
    }
    t
}
