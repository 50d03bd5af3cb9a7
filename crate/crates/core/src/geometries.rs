//! Closed-form ambient and Poincaré constructions used as exact oracles:
//! Einstein metrics, even Poincaré–Einstein families and Fefferman's CR ambient metric.

use std::sync::Arc;

use crate::ambient::{lift_x, xrho_space_weighted, AmbientMetric};
use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::linalg::{jet_det, jet_matrix_value, JetMatrix, Matrix};
use crate::parallel_ext::{covariant_residual_order, AmbientExtension};
use crate::scalar::Scalar;
use crate::tensors::{
    christoffel, cotton, covariant_derivative, ricci, schouten, weyl, Frame, MetricJet, TensorJet,
};
use crate::tractor::{parallel_1form_from_sigma, TractorField};

fn identity_matrix<S: Scalar>(sp: &Arc<JetSpace>, n: usize, f: &Jet<S>) -> JetMatrix<S> {
    (0..n).map(|i| (0..n).map(|j| if i == j { f.clone() } else { Jet::zero(sp) }).collect()).collect()
}

// ---------------------------------------------------------------- Einstein

/// `δ / (1 + λ|x|²/2)²`: constant sectional curvature `2λ`, Schouten tensor `λ g`.
pub fn constant_curvature_chart<S: Scalar>(n: usize, lambda: &S, order: u32) -> Result<MetricJet<S>> {
    let sp = JetSpace::get(n, order);
    let mut r2 = Jet::zero(&sp);
    for i in 0..n {
        let x = Jet::var(&sp, i);
        r2 = &r2 + &(&x * &x);
    }
    let f = r2.scale(&lambda.mul(&S::from_ratio(1, 2))).add_scalar(&S::one());
    let conf = (&f * &f).invert()?;
    MetricJet::new(identity_matrix(&sp, n, &conf))
}

/// The constant `λ` with `P = λ g`, or [`Error::NotEinstein`].
pub fn einstein_constant<S: Scalar>(g: &MetricJet<S>) -> Result<S> {
    let n = g.dim();
    let p = schouten(g)?;
    let mut jj = Jet::zero(g.space());
    for i in 0..n {
        for j in 0..n {
            jj = &jj + &(g.ginv(i, j) * p.get(&[i, j]));
        }
    }
    let lambda = jj.constant_term().mul(&S::from_ratio(1, n as i64));
    for i in 0..n {
        for j in 0..n {
            let d = p.get(&[i, j]) - &g.gij(i, j).scale(&lambda);
            if !d.is_zero() {
                return Err(Error::NotEinstein(format!("P - lambda g has a nonzero ({},{}) component", i + 1, j + 1)));
            }
        }
    }
    Ok(lambda)
}

/// `g_ρ = (1 + λρ)² g` with `ρ` of the given weight; returns the ambient metric and `λ`.
pub fn einstein_ambient<S: Scalar>(g: &MetricJet<S>, rho_weight: u8) -> Result<(AmbientMetric<S>, S)> {
    let lambda = einstein_constant(g)?;
    let n = g.dim();
    let sp = xrho_space_weighted(n, g.space().order(), rho_weight);
    let f = Jet::var(&sp, n).scale(&lambda).add_scalar(&S::one());
    let f2 = &f * &f;
    let g_rho: JetMatrix<S> = (0..n).map(|i| (0..n).map(|j| &f2 * &lift_x(g.gij(i, j), &sp)).collect()).collect();
    Ok((AmbientMetric::closed_form(n, g_rho)?, lambda))
}

/// The parallel tractor `(1, 0, −λ)` of an Einstein scale.
pub fn einstein_tractor<S: Scalar>(g: &MetricJet<S>, lambda: &S) -> Result<TractorField<S>> {
    let sp = g.space().clone();
    TractorField::one_form(g, Jet::one(&sp), vec![Jet::zero(&sp); g.dim()], Jet::constant(&sp, lambda.neg()))
}

/// `χ̃ = d[t(1 − λρ)] = (1 − λρ)dt − tλ dρ` with its measured parallelism.
pub fn einstein_extension<S: Scalar>(a: &AmbientMetric<S>, lambda: &S) -> Result<AmbientExtension<S>> {
    let n = a.n;
    let sp = a.space().clone();
    let mut chi = TensorJet::lower(Frame::Ambient { n }, 1, 1, &sp);
    chi.set(&[0], Jet::var(&sp, n).scale(&lambda.neg()).add_scalar(&S::one()));
    chi.set(&[n + 1], Jet::constant(&sp, lambda.neg()));
    finish_extension(einstein_tractor(&a.base, lambda)?, chi, a)
}

fn finish_extension<S: Scalar>(base: TractorField<S>, chi: TensorJet<S>, a: &AmbientMetric<S>) -> Result<AmbientExtension<S>> {
    let mut e = AmbientExtension { base, chi, achieved_order: 0, truncation_limit: 0 };
    let rep = covariant_residual_order(&e, a)?;
    e.achieved_order = rep.order;
    e.truncation_limit = rep.truncation_limit;
    Ok(e)
}

// ---------------------------------------------------------------- Poincaré–Einstein families

/// A one-parameter family of metrics `h_r` on `Σ` (dimension `d`), stored by
/// its Taylor coefficients in `r`; for even families `k_u = h_{√u}`.
///
/// Coordinates on `M = ℝ × Σ` are `(r, y¹..y^d)`.
#[derive(Clone, Debug)]
pub struct PEFamily<S: Scalar> {
    pub d: usize,
    /// Coefficient of `rᵐ` in `h_r`, as jets in `y`.
    pub h: Vec<JetMatrix<S>>,
    /// True when `h_r` is exactly the polynomial `Σ h[m] rᵐ`; otherwise it is
    /// known only through `r`-degree `h.len() − 1` (or one more for even families).
    pub polynomial: bool,
}

impl<S: Scalar> PEFamily<S> {
    pub fn new(h: Vec<JetMatrix<S>>, polynomial: bool) -> Result<Self> {
        let d = h.first().map(|m| m.len()).ok_or_else(|| Error::InvalidInput("empty family".into()))?;
        for m in &h {
            if m.len() != d || m.iter().any(|r| r.len() != d) {
                return Err(Error::Dimension(format!("family coefficients must be {d}×{d}")));
            }
            for i in 0..d {
                for j in 0..d {
                    if m[i][j] != m[j][i] {
                        return Err(Error::InvalidInput("family coefficients must be symmetric".into()));
                    }
                }
            }
        }
        if jet_matrix_value(&h[0]).det().is_zero() {
            return Err(Error::DegenerateMetric("h_0 is not invertible at the base point".into()));
        }
        Ok(PEFamily { d, h, polynomial })
    }

    /// Even family from `k_u = Σ k[m] uᵐ`.
    pub fn from_k(k: Vec<JetMatrix<S>>, polynomial: bool) -> Result<Self> {
        let d = k.first().map(|m| m.len()).unwrap_or(0);
        let sp = k.first().map(|m| m[0][0].space().clone()).ok_or_else(|| Error::InvalidInput("empty family".into()))?;
        let zero = vec![vec![Jet::zero(&sp); d]; d];
        let mut h = Vec::new();
        for (m, km) in k.into_iter().enumerate() {
            if m > 0 {
                h.push(zero.clone());
            }
            h.push(km);
        }
        Self::new(h, polynomial)
    }

    /// Even family of the Poincaré–Einstein metric with conformal infinity
    /// `h0`, from its ambient metric via `s² = −2ρ`: `h_{2m} = (−½)ᵐ g⁽ᵐ⁾`.
    pub fn from_boundary(h0: &MetricJet<S>, order: u32) -> Result<Self> {
        let a = crate::ambient::fg_expand(h0, order)?;
        let mut k = Vec::new();
        let mut c = S::one();
        for gm in a.rho_series() {
            k.push(gm.iter().map(|r| r.iter().map(|j| j.scale(&c)).collect()).collect());
            c = c.mul(&S::from_ratio(-1, 2));
        }
        Self::from_k(k, false)
    }

    /// `h_r = h − r²P + (r⁴/4) P h⁻¹ P` for a conformally flat `h`.
    pub fn conformally_flat(h0: &MetricJet<S>) -> Result<Self> {
        let d = h0.dim();
        let flat = if d == 3 { cotton(h0)?.is_zero() } else { weyl(h0)?.is_zero() };
        if !flat {
            return Err(Error::InvalidInput("boundary metric is not conformally flat".into()));
        }
        let p = schouten(h0)?;
        let pm: JetMatrix<S> = (0..d).map(|i| (0..d).map(|j| p.get(&[i, j]).clone()).collect()).collect();
        let mut quartic = vec![vec![Jet::zero(h0.space()); d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = Jet::zero(h0.space());
                for k in 0..d {
                    for l in 0..d {
                        acc = &acc + &(&(&pm[i][k] * h0.ginv(k, l)) * &pm[l][j]);
                    }
                }
                quartic[i][j] = acc.scale(&S::from_ratio(1, 4));
            }
        }
        let minus_p: JetMatrix<S> = pm.iter().map(|r| r.iter().map(|j| -j).collect()).collect();
        Self::from_k(vec![h0.matrix(), minus_p, quartic], true)
    }

    pub fn y_space(&self) -> &Arc<JetSpace> {
        self.h[0][0][0].space()
    }
    /// Whether every odd coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.h.iter().enumerate().all(|(m, c)| m % 2 == 0 || c.iter().all(|r| r.iter().all(|j| j.is_zero())))
    }
    /// `k[m]`, the coefficients of `uᵐ` in `k_u`.
    pub fn k_coeffs(&self) -> Result<Vec<JetMatrix<S>>> {
        if !self.is_even() {
            return Err(Error::InvalidInput("family is not even in r".into()));
        }
        Ok(self.h.iter().step_by(2).cloned().collect())
    }
    /// `r`-degree through which `h_r` is known.
    pub fn known_through(&self) -> Option<u32> {
        if self.polynomial {
            None
        } else if self.is_even() {
            Some(self.h.len() as u32)
        } else {
            Some(self.h.len() as u32 - 1)
        }
    }
    fn embed_y(&self, j: &Jet<S>, sp: &Arc<JetSpace>, offset: usize) -> Jet<S> {
        j.embed(sp, &(0..self.d).map(|i| i + offset).collect::<Vec<_>>())
    }
    fn cap(&self, j: Jet<S>, r_weight: i64) -> Jet<S> {
        match self.known_through() {
            Some(m) if !j.is_exact() || j.reliable() > (m as i64 + 1) * r_weight - 1 => j.truncated(((m as i64 + 1) * r_weight - 1).min(j.reliable())),
            _ => j,
        }
    }

    /// `g = dr² + h_r` on `(r, y)`.
    pub fn seed_metric(&self) -> Result<MetricJet<S>> {
        let n = self.d + 1;
        let sp = JetSpace::get(n, self.y_space().order());
        let r = Jet::var(&sp, 0);
        let mut m = vec![vec![Jet::zero(&sp); n]; n];
        m[0][0] = Jet::one(&sp);
        for i in 0..self.d {
            for j in 0..self.d {
                let mut acc = Jet::zero(&sp);
                let mut rp = Jet::one(&sp);
                for c in &self.h {
                    acc = &acc + &(&self.embed_y(&c[i][j], &sp, 1) * &rp);
                    rp = &rp * &r;
                }
                m[i + 1][j + 1] = self.cap(acc, 1);
            }
        }
        MetricJet::new(m)
    }

    /// `k_U = Σ k[m] Uᵐ` for a jet `U` in a space whose variables `offset..offset+d` are `y`.
    fn k_at(&self, u: &Jet<S>, offset: usize) -> Result<JetMatrix<S>> {
        let k = self.k_coeffs()?;
        if !self.polynomial && !u.constant_term().is_zero() {
            return Err(Error::InvalidInput("a truncated family can only be evaluated near u = 0".into()));
        }
        let sp = u.space().clone();
        let d = self.d;
        let mut out = vec![vec![Jet::zero(&sp); d]; d];
        let mut up = Jet::one(&sp);
        for km in &k {
            for i in 0..d {
                for j in 0..d {
                    out[i][j] = &out[i][j] + &(&self.embed_y(&km[i][j], &sp, offset) * &up);
                }
            }
            up = &up * u;
        }
        Ok(out)
    }
}

/// The ambient metric `g_ρ = dr² + k_{r²−2ρ}` (ρ of weight 2) for an even family.
pub fn pe_ambient<S: Scalar>(fam: &PEFamily<S>) -> Result<AmbientMetric<S>> {
    pe_ambient_weighted(fam, 2)
}

/// As [`pe_ambient`] with `ρ` of weight 1 or 2 in the jet grading.
pub fn pe_ambient_weighted<S: Scalar>(fam: &PEFamily<S>, rho_weight: u8) -> Result<AmbientMetric<S>> {
    let n = fam.d + 1;
    let sp = xrho_space_weighted(n, fam.y_space().order(), rho_weight);
    let r = Jet::var(&sp, 0);
    let u = &(&r * &r) - &Jet::var(&sp, n).scale_i(2);
    let k = fam.k_at(&u, 1)?;
    let mut g = vec![vec![Jet::zero(&sp); n]; n];
    g[0][0] = Jet::one(&sp);
    for i in 0..fam.d {
        for j in 0..fam.d {
            g[i + 1][j + 1] = fam.cap(k[i][j].clone(), 1);
        }
    }
    AmbientMetric::closed_form(n, g)
}

/// The tractor 1-form of `σ = r` on the seed metric, with its parallelism residual.
pub fn pe_tractor<S: Scalar>(fam: &PEFamily<S>) -> Result<(TractorField<S>, TensorJet<S>)> {
    let g = fam.seed_metric()?;
    let r = Jet::var(g.space(), 0);
    parallel_1form_from_sigma(&r, &g)
}

/// `χ̃ = r dt + t dr = d(rt)` over `A` (whose first base coordinate is `r`).
pub fn pe_extension<S: Scalar>(fam: &PEFamily<S>, a: &AmbientMetric<S>) -> Result<AmbientExtension<S>> {
    let n = a.n;
    let sp = a.space().clone();
    let mut chi = TensorJet::lower(Frame::Ambient { n }, 1, 1, &sp);
    chi.set(&[0], Jet::var(&sp, 0));
    chi.set(&[1], Jet::one(&sp));
    let (base, _) = pe_tractor(fam)?;
    let base = TractorField { t: base.t, scale: a.base.clone() };
    finish_extension(base, chi, a)
}

/// Result of the Poincaré–Einstein check on the doubled metric.
#[derive(Clone, Debug)]
pub struct JuhlReport<S: Scalar> {
    /// `g₊₊` in coordinates `(s − s₀, r, y)`.
    pub metric: MetricJet<S>,
    /// `Ric(g₊₊) + n g₊₊`.
    pub residual: TensorJet<S>,
}

impl<S: Scalar> JuhlReport<S> {
    pub fn is_einstein(&self) -> bool {
        self.residual.is_zero()
    }
}

/// `g₊₊ = s⁻²(ds² + dr² + k_{r²+s²})` re-centred at `(s, r, y) = (s₀, 0, 0)` and its Einstein residual.
pub fn pe_juhl_poincare<S: Scalar>(fam: &PEFamily<S>, s0: &S, order: u32) -> Result<JuhlReport<S>> {
    if !fam.is_even() {
        return Err(Error::InvalidInput("the doubled metric needs an even family".into()));
    }
    if !fam.polynomial {
        return Err(Error::InvalidInput("the doubled metric is evaluated away from u = 0 and needs a polynomial family".into()));
    }
    if s0.is_zero() {
        return Err(Error::InvalidRecentering("s0 must be nonzero".into()));
    }
    let d = fam.d;
    let dim = d + 2;
    let n = d + 1;
    let sp = JetSpace::get(dim, order.min(fam.y_space().order()));
    let s = Jet::var(&sp, 0).add_scalar(s0);
    let r = Jet::var(&sp, 1);
    let u = &(&r * &r) + &(&s * &s);
    let k = fam.k_at(&u, 2)?;
    let sinv2 = (&s * &s).invert()?;
    let mut m = vec![vec![Jet::zero(&sp); dim]; dim];
    m[0][0] = sinv2.clone();
    m[1][1] = sinv2.clone();
    for i in 0..d {
        for j in 0..d {
            m[i + 2][j + 2] = &sinv2 * &k[i][j];
        }
    }
    let g = MetricJet::new(m)?;
    let ric = ricci(&g)?;
    let residual = ric.zip_with(&g.g, |a, b| a + &b.scale_i(n as i64));
    Ok(JuhlReport { metric: g, residual })
}

/// Substitutes `ρ = −s²/2` into `g_ρ` of [`pe_ambient`] and compares it with
/// `s² g₊₊` from [`pe_juhl_poincare`] on the `(r, y)` block, in jets about
/// `(s, r, y) = (s₀, 0, 0)`. Returns whether all components agree.
pub fn ambient_poincare_correspondence<S: Scalar>(fam: &PEFamily<S>, s0: &S, order: u32) -> Result<bool> {
    let a = pe_ambient_weighted(fam, 1)?;
    let j = pe_juhl_poincare(fam, s0, order)?;
    let sp = j.metric.space().clone();
    let n = a.n;
    let s = Jet::var(&sp, 0).add_scalar(s0);
    let s2 = &s * &s;
    let rho = s2.scale(&S::from_ratio(-1, 2));
    // g_ρ is a polynomial in ρ of degree deg k; substitute coefficientwise.
    let degree = fam.k_coeffs()?.len() as u32 - 1;
    if degree > a.order() {
        return Err(Error::InsufficientOrder("jet order is below the family's degree in u".into()));
    }
    let map: Vec<usize> = (1..=n).collect();
    let coeffs: Vec<JetMatrix<S>> = (0..=degree).map(|m| a.rho_coefficient(m)).collect();
    for i in 0..n {
        for k in 0..n {
            let mut lhs = Jet::zero(&sp);
            let mut rp = Jet::one(&sp);
            for c in &coeffs {
                lhs = &lhs + &(&c[i][k].embed(&sp, &map) * &rp);
                rp = &rp * &rho;
            }
            let rhs = &s2 * j.metric.gij(i + 1, k + 1);
            if !(&lhs - &rhs).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Both sides of the coordinate change taking `s⁻²[ds² + (1 + s²/4)² g₊]`,
/// `g₊ = r⁻²(dr² + k_{r²})`, to `s'⁻²(ds'² + dr'² + k_{r'²+s'²})`, as metrics
/// in `(r' − r'₀, s' − s'₀, y)`. Returns `(pulled back, target)`.
pub fn juhl_coordinate_change<S: Scalar>(fam: &PEFamily<S>, r0: &S, s0: &S, order: u32) -> Result<(JetMatrix<S>, JetMatrix<S>)> {
    if !fam.polynomial || !fam.is_even() {
        return Err(Error::InvalidInput("the coordinate change check needs an even polynomial family".into()));
    }
    let d = fam.d;
    let dim = d + 2;
    let sp = JetSpace::get(dim, order.min(fam.y_space().order()));
    let rp = Jet::var(&sp, 0).add_scalar(r0);
    let sp_ = Jet::var(&sp, 1).add_scalar(s0);
    let u = &(&rp * &rp) + &(&sp_ * &sp_);
    let r = u.sqrt()?;
    let s = (&(&r - &rp) * &sp_.invert()?).scale_i(2);
    let k = fam.k_at(&u, 2)?;
    // pulled-back metric
    let sinv2 = (&s * &s).invert()?;
    let q = (&s * &s).scale(&S::from_ratio(1, 4)).add_scalar(&S::one());
    let conf = &(&sinv2 * &(&q * &q)) * &(&r * &r).invert()?;
    let jac = |f: &Jet<S>| -> [Jet<S>; 2] { [f.diff(0), f.diff(1)] };
    let (dr, ds) = (jac(&r), jac(&s));
    let mut lhs = vec![vec![Jet::zero(&sp); dim]; dim];
    for a in 0..2 {
        for b in 0..2 {
            lhs[a][b] = &(&sinv2 * &(&ds[a] * &ds[b])) + &(&conf * &(&dr[a] * &dr[b]));
        }
    }
    let sinv2p = (&sp_ * &sp_).invert()?;
    let mut rhs = vec![vec![Jet::zero(&sp); dim]; dim];
    rhs[0][0] = sinv2p.clone();
    rhs[1][1] = sinv2p.clone();
    for i in 0..d {
        for j in 0..d {
            lhs[i + 2][j + 2] = &conf * &k[i][j];
            rhs[i + 2][j + 2] = &sinv2p * &k[i][j];
        }
    }
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------- Fefferman

/// A real hypersurface defining function `u(z, z̄)` in `ℂⁿ`, with `z` and `z̄`
/// as independent formal variables: jet variables `0..n` are `z`, `n..2n` are `z̄`.
#[derive(Clone, Debug)]
pub struct CRDefiningFunction<S: Scalar> {
    pub n: usize,
    pub u: Jet<S>,
    /// Signature `(r, s)` of the Levi form `−u_{ij̄}` on `T^{1,0}`.
    pub levi_signature: (usize, usize),
    /// Whether the Levi form is nondegenerate at the base point.
    pub levi_nondegenerate: bool,
}

impl<S: Scalar> CRDefiningFunction<S> {
    /// Validates reality and `du ≠ 0`, and computes the Levi signature at the base point.
    pub fn new(n: usize, u: Jet<S>) -> Result<Self> {
        if u.nvars() != 2 * n {
            return Err(Error::Dimension(format!("u must be a jet in {} variables (z, z-bar)", 2 * n)));
        }
        for (e, v) in u.terms() {
            let mut c = e.to_vec();
            let (a, b) = c.split_at_mut(n);
            a.swap_with_slice(b);
            if u.coeff(&c) != *v {
                return Err(Error::InvalidInput("u is not real: coefficients are not conjugation-symmetric".into()));
            }
        }
        if !u.constant_term().is_zero() {
            return Err(Error::InvalidInput("the base point must lie on the hypersurface (u = 0)".into()));
        }
        let grad: Vec<S> = (0..n).map(|i| u.diff(i).constant_term()).collect();
        if grad.iter().all(|g| g.is_zero()) {
            return Err(Error::InvalidInput("du vanishes at the base point".into()));
        }
        // Kernel of ∂u at the point, then inertia of −u_{ij̄} on it.
        let row = Matrix::from_rows(vec![grad]);
        let ker = row.nullspace(0.0);
        let levi: Vec<Vec<S>> =
            (0..n).map(|i| (0..n).map(|j| u.diff(i).diff(n + j).constant_term().neg()).collect()).collect();
        let k = ker.len();
        let mut form = vec![vec![S::zero(); k]; k];
        for a in 0..k {
            for b in 0..k {
                let mut acc = S::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc = acc.add(&ker[a][i].mul(&levi[i][j]).mul(&ker[b][j]));
                    }
                }
                form[a][b] = acc;
            }
        }
        let (p, q, z) = if k == 0 { (0, 0, 0) } else { Matrix::from_rows(form).inertia() };
        Ok(CRDefiningFunction { n, u, levi_signature: (p, q), levi_nondegenerate: z == 0 })
    }
}

/// `J(u) = (−1)^{r+1} det [[u, u_j̄], [u_i, u_ij̄]]`.
pub fn levi_determinant<S: Scalar>(cr: &CRDefiningFunction<S>) -> Result<Jet<S>> {
    let n = cr.n;
    let u = &cr.u;
    let mut m = vec![vec![Jet::zero(u.space()); n + 1]; n + 1];
    m[0][0] = u.clone();
    for j in 0..n {
        m[0][j + 1] = u.diff(n + j);
        m[j + 1][0] = u.diff(j);
        for i in 0..n {
            m[i + 1][j + 1] = u.diff(i).diff(n + j);
        }
    }
    let det = jet_det(&m)?;
    Ok(if cr.levi_signature.0 % 2 == 0 { -det } else { det })
}

/// Fefferman's ambient Kähler metric in the formal coordinates `(w, w̄)` about
/// `z⁰ = 1` and the base point of `u`.
#[derive(Clone, Debug)]
pub struct FeffermanAmbient<S: Scalar> {
    /// Complex Hessian `G_{αβ̄} = ∂_α∂_β̄(−z⁰z̄⁰u)`, `α, β = 0..n`.
    pub hessian: JetMatrix<S>,
    /// `g̃ = [[0, G], [Gᵀ, 0]]` in the basis `(∂_{z^α}, ∂_{z̄^β})`.
    pub metric: MetricJet<S>,
    /// `J(u)` lifted to the ambient variables.
    pub j_u: Jet<S>,
}

pub fn fefferman_ambient<S: Scalar>(cr: &CRDefiningFunction<S>, order: u32) -> Result<FeffermanAmbient<S>> {
    if !cr.levi_nondegenerate {
        return Err(Error::DegenerateMetric("Levi form is degenerate at the base point".into()));
    }
    let n = cr.n;
    let nn = n + 1;
    let sp = JetSpace::get(2 * nn, order);
    // variable layout: z⁰ − 1, z¹..zⁿ, z̄⁰ − 1, z̄¹..z̄ⁿ
    let mut map = Vec::with_capacity(2 * n);
    map.extend(1..=n);
    map.extend(nn + 1..nn + 1 + n);
    let u = cr.u.embed(&sp, &map);
    let z0 = Jet::var(&sp, 0).add_scalar(&S::one());
    let zb0 = Jet::var(&sp, nn).add_scalar(&S::one());
    let phi = -(&(&z0 * &zb0) * &u);
    let g: JetMatrix<S> = (0..nn).map(|a| (0..nn).map(|b| phi.diff(a).diff(nn + b)).collect()).collect();
    let mut m = vec![vec![Jet::zero(&sp); 2 * nn]; 2 * nn];
    for a in 0..nn {
        for b in 0..nn {
            m[a][nn + b] = g[a][b].clone();
            m[nn + b][a] = g[a][b].clone();
        }
    }
    let metric = MetricJet::new(m)?;
    let j = levi_determinant(cr)?.embed(&sp, &map);
    Ok(FeffermanAmbient { hessian: g, metric, j_u: j })
}

impl<S: Scalar> FeffermanAmbient<S> {
    pub fn ricci(&self) -> Result<TensorJet<S>> {
        ricci(&self.metric)
    }
    /// `g̃_{IK} K^K_J` with `K = diag(1, −1)` on `(∂_z, ∂_z̄)`: the Kähler form divided by `i`.
    pub fn kahler_form(&self) -> TensorJet<S> {
        let d = self.metric.dim();
        let half = d / 2;
        let sp = self.metric.space().clone();
        let mut t = TensorJet::lower(Frame::Coord { dim: d }, 2, 0, &sp);
        t.antisym.push((0, 1));
        for i in 0..d {
            for j in 0..d {
                let v = self.metric.gij(i, j);
                t.set(&[i, j], if j < half { v.clone() } else { -v });
            }
        }
        t
    }
    /// Lowest total degree of a nonzero Ricci coefficient (`u32::MAX` when
    /// Ricci vanishes within the truncation), and the truncation's reliable degree.
    pub fn ricci_valuation(&self) -> Result<(u32, i64)> {
        let ric = self.ricci()?;
        let mut best = u32::MAX;
        for c in ric.comps() {
            if let Some(v) = c.terms().map(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>()).min() {
                best = best.min(v);
            }
        }
        Ok((best, ric.reliable()))
    }
    /// `∇̃` of the Kähler form.
    pub fn kahler_form_derivative(&self) -> TensorJet<S> {
        let gam = christoffel(&self.metric);
        covariant_derivative(&self.kahler_form(), &gam, None)
    }
    /// `det G / (z⁰z̄⁰)^{n}`, a jet that equals `±J(u)`.
    pub fn normalized_hessian_determinant(&self) -> Result<Jet<S>> {
        let nn = self.hessian.len();
        let sp = self.metric.space().clone();
        let z0 = Jet::var(&sp, 0).add_scalar(&S::one());
        let zb0 = Jet::var(&sp, nn).add_scalar(&S::one());
        let w = (&z0 * &zb0).powi((nn - 1) as u32).invert()?;
        Ok(&jet_det(&self.hessian)? * &w)
    }
}
