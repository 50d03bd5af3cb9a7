//! Tractor calculus in the splitting determined by a representative metric.
//!
//! Tractor indices run over `0, 1..n, ∞ = n+1` ([`Frame::Tractor`]); component
//! jets are functions of `x` only. The tractor metric is
//! `h(U, V) = U⁰V^∞ + U^∞V⁰ + g_ij UⁱVʲ`, and the connection is
//! `∇_i Uᴷ = ∂_i Uᴷ + Γ̃ᴷ_{iJ} Uᴶ` with
//! `Γ̃⁰_{iJ} = (0, −P_ij, 0)`, `Γ̃ᵏ_{iJ} = (δ_iᵏ, Γᵏ_ij, P_iᵏ)`, `Γ̃^∞_{iJ} = (0, −g_ij, 0)`.
//! Lower slots transform contragrediently. Derivative indices are appended on
//! the right and only take values in `1..n`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::tensors::{christoffel, conformal_rescale, covariant_derivative, schouten, Frame, MetricJet, Slot, TensorJet};

/// A tractor tensor in the splitting of a chosen scale.
#[derive(Clone, Debug)]
pub struct TractorField<S: Scalar> {
    pub t: TensorJet<S>,
    /// The representative metric defining the splitting.
    pub scale: MetricJet<S>,
}

impl<S: Scalar> TractorField<S> {
    /// All-zero tractor with the given slot variances.
    pub fn zeros(scale: &MetricJet<S>, slots: Vec<Slot>) -> Self {
        let n = scale.dim();
        TractorField { t: TensorJet::zeros(Frame::Tractor { n }, slots, 0, scale.space()), scale: scale.clone() }
    }
    /// Tractor 1-form `(χ_0, χ_i, χ_∞)`.
    pub fn one_form(scale: &MetricJet<S>, chi0: Jet<S>, chi: Vec<Jet<S>>, chi_inf: Jet<S>) -> Result<Self> {
        Self::rank_one(scale, Slot::Lower, chi0, chi, chi_inf)
    }
    /// Tractor vector `(U⁰, Uⁱ, U^∞)`.
    pub fn vector(scale: &MetricJet<S>, u0: Jet<S>, u: Vec<Jet<S>>, u_inf: Jet<S>) -> Result<Self> {
        Self::rank_one(scale, Slot::Upper, u0, u, u_inf)
    }
    fn rank_one(scale: &MetricJet<S>, slot: Slot, a: Jet<S>, mid: Vec<Jet<S>>, b: Jet<S>) -> Result<Self> {
        let n = scale.dim();
        if mid.len() != n {
            return Err(Error::Dimension(format!("middle slot needs {n} components, got {}", mid.len())));
        }
        let mut out = Self::zeros(scale, vec![slot]);
        out.t.set(&[0], a);
        for (i, c) in mid.into_iter().enumerate() {
            out.t.set(&[i + 1], c);
        }
        out.t.set(&[n + 1], b);
        Ok(out)
    }
    pub fn n(&self) -> usize {
        self.scale.dim()
    }
    pub fn rank(&self) -> usize {
        self.t.rank()
    }
    pub fn get(&self, idx: &[usize]) -> &Jet<S> {
        self.t.get(idx)
    }
    pub fn is_zero(&self) -> bool {
        self.t.is_zero()
    }
    fn same_scale(&self, o: &Self) -> Result<()> {
        if self.scale.matrix() != o.scale.matrix() {
            return Err(Error::ScaleMismatch("tractors are expressed in different scales".into()));
        }
        Ok(())
    }
    /// Component listing with the scale's metric fingerprint.
    pub fn listing(&self) -> String {
        let n = self.n();
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let nm: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut s = String::new();
        let _ = writeln!(s, "tractor n={n} rank={} scale={}", self.rank(), metric_fingerprint(&self.scale));
        s.push_str(&self.t.listing(&nm));
        s
    }
}

/// Short stable fingerprint of a metric's components.
pub fn metric_fingerprint<S: Scalar>(g: &MetricJet<S>) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for row in g.matrix() {
        for c in row {
            for b in c.to_canonical_text().bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
    }
    format!("{h:016x}")
}

/// `h(U, V)` for tractor vectors, or `h⁻¹(χ, ψ)` for tractor 1-forms.
pub fn tractor_metric<S: Scalar>(u: &TractorField<S>, v: &TractorField<S>) -> Result<Jet<S>> {
    u.same_scale(v)?;
    if u.rank() != 1 || v.rank() != 1 || u.t.slots != v.t.slots {
        return Err(Error::InvalidInput("tractor_metric pairs two tractors of the same variance".into()));
    }
    let n = u.n();
    let inf = n + 1;
    let g = &u.scale;
    let mut acc = &(u.get(&[0]) * v.get(&[inf])) + &(u.get(&[inf]) * v.get(&[0]));
    for i in 0..n {
        for j in 0..n {
            let gij = if u.t.slots[0] == Slot::Upper { g.gij(i, j) } else { g.ginv(i, j) };
            if gij.is_exact_zero() {
                continue;
            }
            acc = &acc + &(gij * &(u.get(&[i + 1]) * v.get(&[j + 1])));
        }
    }
    Ok(acc)
}

/// The tractor metric as a covariant 2-tractor `h_IJ`.
pub fn tractor_metric_tensor<S: Scalar>(g: &MetricJet<S>) -> TractorField<S> {
    let n = g.dim();
    let mut h = TractorField::zeros(g, vec![Slot::Lower, Slot::Lower]);
    h.t.sym.push((0, 1));
    let one = Jet::one(g.space());
    h.t.set(&[0, n + 1], one.clone());
    h.t.set(&[n + 1, 0], one);
    for i in 0..n {
        for j in 0..n {
            h.t.set(&[i + 1, j + 1], g.gij(i, j).clone());
        }
    }
    h
}

/// Tractor Christoffel symbols `Γ̃ᴷ_{iJ}` stored as `[K, i, J]` (entries with `i ∈ {0, ∞}` vanish).
pub fn tractor_christoffel<S: Scalar>(g: &MetricJet<S>) -> Result<TensorJet<S>> {
    let n = g.dim();
    let inf = n + 1;
    let gam = christoffel(g);
    let p = schouten(g)?;
    let sp = g.space().clone();
    let mut out = TensorJet::zeros(Frame::Tractor { n }, vec![Slot::Upper, Slot::Lower, Slot::Lower], 0, &sp);
    for i in 0..n {
        for j in 0..n {
            out.set(&[0, i + 1, j + 1], -p.get(&[i, j]));
            out.set(&[inf, i + 1, j + 1], -g.gij(i, j));
            for k in 0..n {
                out.set(&[k + 1, i + 1, j + 1], gam.get(&[k, i, j]).clone());
            }
        }
        out.set(&[i + 1, i + 1, 0], Jet::one(&sp));
        for k in 0..n {
            let mut acc = Jet::zero(&sp);
            for l in 0..n {
                if g.ginv(k, l).is_exact_zero() {
                    continue;
                }
                acc = &acc + &(g.ginv(k, l) * p.get(&[i, l]));
            }
            out.set(&[k + 1, i + 1, inf], acc);
        }
    }
    Ok(out)
}

/// `∇χ` with the derivative index appended; its `0` and `∞` values are zero.
pub fn tractor_derivative<S: Scalar>(chi: &TractorField<S>) -> Result<TractorField<S>> {
    let gam = tractor_christoffel(&chi.scale)?;
    Ok(tractor_derivative_with(chi, &gam))
}

fn tractor_derivative_with<S: Scalar>(chi: &TractorField<S>, gam: &TensorJet<S>) -> TractorField<S> {
    let n = chi.n();
    let d = n + 2;
    let r = chi.rank();
    let mut slots = chi.t.slots.clone();
    slots.push(Slot::Lower);
    let mut out = TractorField::zeros(&chi.scale, slots);
    for idx in chi.t.indices() {
        for i in 1..=n {
            let mut acc = chi.get(&idx).diff(i - 1);
            for s in 0..r {
                let mut j = idx.clone();
                for a in 0..d {
                    j[s] = a;
                    let c = chi.get(&j);
                    if c.is_exact_zero() {
                        continue;
                    }
                    match chi.t.slots[s] {
                        Slot::Upper => {
                            let gk = gam.get(&[idx[s], i, a]);
                            if !gk.is_exact_zero() {
                                acc = &acc + &(gk * c);
                            }
                        }
                        Slot::Lower => {
                            let gk = gam.get(&[a, i, idx[s]]);
                            if !gk.is_exact_zero() {
                                acc = &acc - &(gk * c);
                            }
                        }
                    }
                }
            }
            let mut o = idx.clone();
            o.push(i);
            out.t.set(&o, acc);
        }
    }
    out
}

/// Re-expresses a tractor in the splitting of `ĝ = e^{2Υ} g`.
pub fn conformal_change<S: Scalar>(chi: &TractorField<S>, upsilon: &Jet<S>) -> Result<TractorField<S>> {
    let g = &chi.scale;
    let n = g.dim();
    let d = n + 2;
    let inf = n + 1;
    let sp = g.space().clone();
    let ep = upsilon.exp()?;
    let em = upsilon.neg().exp()?;
    let ups: Vec<Jet<S>> = (0..n).map(|i| upsilon.diff(i)).collect();
    let ups_up: Vec<Jet<S>> = (0..n)
        .map(|i| {
            let mut a = Jet::zero(&sp);
            for j in 0..n {
                a = &a + &(g.ginv(i, j) * &ups[j]);
            }
            a
        })
        .collect();
    let mut norm = Jet::zero(&sp);
    for i in 0..n {
        norm = &norm + &(&ups[i] * &ups_up[i]);
    }
    // Vector rule Û = D·L·U and its contragredient L⁻¹D⁻¹ acting on rows.
    let mut fwd = vec![vec![Jet::zero(&sp); d]; d];
    fwd[0][0] = em.clone();
    for j in 0..n {
        fwd[0][j + 1] = -(&em * &ups[j]);
        fwd[j + 1][j + 1] = em.clone();
        fwd[j + 1][inf] = &em * &ups_up[j];
    }
    fwd[0][inf] = -(&em * &norm.scale(&S::from_ratio(1, 2)));
    fwd[inf][inf] = ep.clone();
    // Inverse: L⁻¹ = [[1, Υ_j, −½|Υ|²], [0, δ, −Υⁱ], [0, 0, 1]], D⁻¹ = diag(e^Υ, e^Υ, e^{−Υ}).
    let mut inv = vec![vec![Jet::zero(&sp); d]; d];
    inv[0][0] = ep.clone();
    for j in 0..n {
        inv[0][j + 1] = &ep * &ups[j];
        inv[j + 1][j + 1] = ep.clone();
        inv[j + 1][inf] = -(&em * &ups_up[j]);
    }
    inv[0][inf] = -(&em * &norm.scale(&S::from_ratio(1, 2)));
    inv[inf][inf] = em.clone();
    let ghat = conformal_rescale(g, upsilon)?;
    let mut cur = chi.t.clone();
    for s in 0..chi.rank() {
        let mut next = cur.clone();
        for idx in cur.indices() {
            let mut acc = Jet::zero(&sp);
            let mut j = idx.clone();
            for a in 0..d {
                j[s] = a;
                let c = cur.get(&j);
                if c.is_exact_zero() {
                    continue;
                }
                let m = match chi.t.slots[s] {
                    Slot::Upper => &fwd[idx[s]][a],
                    Slot::Lower => &inv[a][idx[s]],
                };
                if m.is_exact_zero() {
                    continue;
                }
                acc = &acc + &(m * c);
            }
            next.set(&idx, acc);
        }
        cur = next;
    }
    Ok(TractorField { t: cur, scale: ghat })
}

/// `Δσ` and `∇²σ` for a scalar.
fn hessian<S: Scalar>(sigma: &Jet<S>, g: &MetricJet<S>, gam: &TensorJet<S>) -> (TensorJet<S>, Jet<S>) {
    let n = g.dim();
    let mut t = TensorJet::lower(Frame::Coord { dim: n }, 1, 0, g.space());
    for i in 0..n {
        t.set(&[i], sigma.diff(i));
    }
    let h = covariant_derivative(&t, gam, None);
    let mut lap = Jet::zero(g.space());
    for i in 0..n {
        for j in 0..n {
            if g.ginv(i, j).is_exact_zero() {
                continue;
            }
            lap = &lap + &(g.ginv(i, j) * h.get(&[i, j]));
        }
    }
    (h, lap)
}

/// `χ = (σ, σ_i, −(Δσ + Jσ)/n)` and the residual `tf((∇² + P)σ)`; `χ` is parallel iff the residual vanishes.
pub fn parallel_1form_from_sigma<S: Scalar>(sigma: &Jet<S>, g: &MetricJet<S>) -> Result<(TractorField<S>, TensorJet<S>)> {
    let n = g.dim();
    let gam = christoffel(g);
    let p = schouten(g)?;
    let (h, lap) = hessian(sigma, g, &gam);
    let mut jj = Jet::zero(g.space());
    for i in 0..n {
        for j in 0..n {
            jj = &jj + &(g.ginv(i, j) * p.get(&[i, j]));
        }
    }
    let inf = -(&lap + &(&jj * sigma)).scale(&S::from_ratio(1, n as i64));
    let chi = TractorField::one_form(g, sigma.clone(), (0..n).map(|i| sigma.diff(i)).collect(), inf)?;
    let mut e = h.clone();
    for i in 0..n {
        for j in 0..n {
            e.set(&[i, j], h.get(&[i, j]) + &(p.get(&[i, j]) * sigma));
        }
    }
    let res = crate::tensors::trace_free(g, &e);
    Ok((chi, res))
}

/// The tractor 2-form with projecting part `α` and the conformal Killing defect
/// `α_(i,j) − (1/n) α_k,ᵏ g_ij`.
pub fn parallel_2form_from_alpha<S: Scalar>(alpha: &[Jet<S>], g: &MetricJet<S>) -> Result<(TractorField<S>, TensorJet<S>)> {
    let n = g.dim();
    if alpha.len() != n {
        return Err(Error::Dimension(format!("alpha needs {n} components")));
    }
    let inf = n + 1;
    let sp = g.space().clone();
    let gam = christoffel(g);
    let p = schouten(g)?;
    let mut a = TensorJet::lower(Frame::Coord { dim: n }, 1, 0, &sp);
    for (i, c) in alpha.iter().enumerate() {
        a.set(&[i], c.clone());
    }
    let da = covariant_derivative(&a, &gam, None);
    let mut div = Jet::zero(&sp);
    for i in 0..n {
        for j in 0..n {
            if g.ginv(i, j).is_exact_zero() {
                continue;
            }
            div = &div + &(g.ginv(i, j) * da.get(&[i, j]));
        }
    }
    let div_n = div.scale(&S::from_ratio(1, n as i64));
    let half = S::from_ratio(1, 2);
    let mut chi = TractorField::zeros(g, vec![Slot::Lower, Slot::Lower]);
    chi.t.antisym.push((0, 1));
    let mut put = |i: usize, j: usize, v: Jet<S>| {
        chi.t.set(&[j, i], -&v);
        chi.t.set(&[i, j], v);
    };
    for j in 0..n {
        put(0, j + 1, -&alpha[j]);
        for i in 0..n {
            if i < j {
                put(i + 1, j + 1, (da.get(&[i, j]) - da.get(&[j, i])).scale(&half));
            }
        }
        let mut pa = div_n.diff(j);
        for k in 0..n {
            for l in 0..n {
                if g.ginv(k, l).is_exact_zero() {
                    continue;
                }
                pa = &pa + &(&(g.ginv(k, l) * p.get(&[j, l])) * &alpha[k]);
            }
        }
        put(j + 1, inf, pa);
    }
    put(0, inf, div_n.clone());
    let mut res = TensorJet::lower(Frame::Coord { dim: n }, 2, 0, &sp);
    for i in 0..n {
        for j in 0..n {
            let sym = (da.get(&[i, j]) + da.get(&[j, i])).scale(&half);
            res.set(&[i, j], &sym - &(g.gij(i, j) * &div_n));
        }
    }
    Ok((chi, res))
}

/// The adjoint tractor `I(η)`: `I(η)⁰_i = η_i`, `I(η)ʲ_∞ = −ηʲ`, stored as `[J, I]`.
pub fn insertion<S: Scalar>(eta: &[Jet<S>], g: &MetricJet<S>) -> Result<TensorJet<S>> {
    let n = g.dim();
    if eta.len() != n {
        return Err(Error::Dimension(format!("eta needs {n} components")));
    }
    let sp = g.space().clone();
    let mut out = TensorJet::zeros(Frame::Tractor { n }, vec![Slot::Upper, Slot::Lower], 0, &sp);
    for i in 0..n {
        out.set(&[0, i + 1], eta[i].clone());
        let mut up = Jet::zero(&sp);
        for j in 0..n {
            up = &up + &(g.ginv(i, j) * &eta[j]);
        }
        out.set(&[i + 1, n + 1], -up);
    }
    Ok(out)
}

/// Action of an endomorphism `Kᴶ_I` on a tractor (lower slots: `−Kᴶ_I χ_J`; upper: `Kᴵ_J Uᴶ`).
pub fn endomorphism_action<S: Scalar>(k: &TensorJet<S>, chi: &TractorField<S>) -> TractorField<S> {
    let d = chi.n() + 2;
    let mut out = TractorField::zeros(&chi.scale, chi.t.slots.clone());
    for idx in chi.t.indices() {
        let mut acc = Jet::zero(chi.scale.space());
        for s in 0..chi.rank() {
            let mut j = idx.clone();
            for a in 0..d {
                j[s] = a;
                let c = chi.get(&j);
                if c.is_exact_zero() {
                    continue;
                }
                match chi.t.slots[s] {
                    Slot::Lower => {
                        let m = k.get(&[a, idx[s]]);
                        if !m.is_exact_zero() {
                            acc = &acc - &(m * c);
                        }
                    }
                    Slot::Upper => {
                        let m = k.get(&[idx[s], a]);
                        if !m.is_exact_zero() {
                            acc = &acc + &(m * c);
                        }
                    }
                }
            }
        }
        out.t.set(&idx, acc);
    }
    out
}

/// `F_χ(η) = I(η).χ`.
pub fn determining_map<S: Scalar>(chi: &TractorField<S>, eta: &[Jet<S>]) -> Result<TractorField<S>> {
    let i = insertion(eta, &chi.scale)?;
    Ok(endomorphism_action(&i, chi))
}

/// Pivot tolerance used in float mode.
pub const RANK_TOL: f64 = 1e-9;

/// Rank at the base point of the linear map `η ↦ F_χ(η)`.
pub fn determining_rank<S: Scalar>(chi: &TractorField<S>) -> Result<usize> {
    let n = chi.n();
    let sp = chi.scale.space().clone();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let eta: Vec<Jet<S>> = (0..n).map(|i| if i == k { Jet::one(&sp) } else { Jet::zero(&sp) }).collect();
        cols.push(determining_map(chi, &eta)?.t.values());
    }
    let rows = cols[0].len();
    let m = Matrix::from_rows((0..rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect());
    Ok(m.rank(RANK_TOL))
}
