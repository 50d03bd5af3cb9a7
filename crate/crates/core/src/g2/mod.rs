//! G₂ geometry of generic 2-plane fields on 5-manifolds: the split 3-form and its
//! compatibility identity, generic distributions, the conformal metric of a
//! distribution `D = span{∂_q, ∂_x + p∂_y + q∂_p + F∂_z}`, Cartan's quartic and
//! its degeneracy tests, and the origin-jet computations for `F = q² + f`.
//!
//! Coordinates on the 5-manifold are ordered `(x, y, z, p, q)`.

mod frame_table;

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::linalg::{JetMatrix, Matrix};
use crate::scalar::{QSqrt3, Scalar, Q};
use crate::tensors::{cotton, weyl, MetricJet, TensorJet};

use frame_table::Coefficient;

/// Coordinate names in storage order.
pub const COORDINATES: [&str; 5] = ["x", "y", "z", "p", "q"];
pub const VAR_X: usize = 0;
pub const VAR_Y: usize = 1;
pub const VAR_Z: usize = 2;
pub const VAR_P: usize = 3;
pub const VAR_Q: usize = 4;

/// Overall scale of [`nurowski_metric`], chosen so that the flat model takes the
/// value `480 dy dq + 240 dz dx − 320 dp²` at the origin.
pub const METRIC_SCALE: i64 = 240;

// ---------------------------------------------------------------- the 3-form

/// The split G₂ 3-form on ℝ⁷ and the quadratic forms it determines.
#[derive(Clone, Debug, PartialEq)]
pub struct G2Form {
    /// Totally antisymmetric 7×7×7 array, index `(i*7 + j)*7 + k`.
    pub phi: Vec<QSqrt3>,
    /// The 5×5 form `−2b¹b⁵ + 2b²b⁴ − (b³)²`.
    pub h: Matrix<Q>,
    /// The 7×7 bordered form with `h` in the middle block.
    pub h_tilde: Matrix<Q>,
}

impl G2Form {
    /// `6dx^{012} + √3(dx^{234} − dx^{135} + dx^{036}) + dx^{456}`.
    pub fn standard() -> Self {
        let s3 = QSqrt3::sqrt3();
        let terms = [
            ([0, 1, 2], QSqrt3::from_i64(6)),
            ([2, 3, 4], s3.clone()),
            ([1, 3, 5], s3.neg()),
            ([0, 3, 6], s3),
            ([4, 5, 6], QSqrt3::one()),
        ];
        let phi = antisymmetric_3form(7, &terms);
        let mut h = Matrix::zeros(5, 5);
        h[(0, 4)] = Q::from(-1);
        h[(4, 0)] = Q::from(-1);
        h[(1, 3)] = Q::from(1);
        h[(3, 1)] = Q::from(1);
        h[(2, 2)] = Q::from(-1);
        let mut h_tilde = Matrix::zeros(7, 7);
        h_tilde[(0, 6)] = Q::from(1);
        h_tilde[(6, 0)] = Q::from(1);
        for i in 0..5 {
            for j in 0..5 {
                h_tilde[(i + 1, j + 1)] = h[(i, j)].clone();
            }
        }
        G2Form { phi, h, h_tilde }
    }

    pub fn component(&self, i: usize, j: usize, k: usize) -> &QSqrt3 {
        &self.phi[(i * 7 + j) * 7 + k]
    }

    /// `h̃` with entries in ℚ(√3).
    pub fn h_tilde_sqrt3(&self) -> Matrix<QSqrt3> {
        Matrix::from_rows(
            (0..7).map(|i| (0..7).map(|j| QSqrt3::rational(self.h_tilde[(i, j)].clone())).collect()).collect(),
        )
    }
}

/// Sign of the permutation `p` of `0..p.len()`.
fn permutation_sign(p: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Fills a totally antisymmetric `dim³` array from its values on increasing triples.
pub fn antisymmetric_3form<S: Scalar>(dim: usize, terms: &[([usize; 3], S)]) -> Vec<S> {
    let mut a = vec![S::zero(); dim * dim * dim];
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]];
    for (idx, v) in terms {
        for p in PERMS {
            let (i, j, k) = (idx[p[0]], idx[p[1]], idx[p[2]]);
            let val = if permutation_sign(&p) > 0 { v.clone() } else { v.neg() };
            a[(i * dim + j) * dim + k] = val;
        }
    }
    a
}

/// Outcome of the compatibility identity `(U⌟χ)∧(V⌟χ)∧χ = λ h(U,V) dv`.
#[derive(Clone, Debug, PartialEq)]
pub enum Compatibility<S: Scalar> {
    /// Proportional on every basis pair with a positive constant.
    Compatible { lambda: S },
    /// Proportional, but with `λ ≤ 0`.
    NonPositive { lambda: S },
    /// The pair `(u, v)` violates proportionality with the constant fixed by earlier pairs.
    NotProportional { u: usize, v: usize, form_value: S, metric_value: S, lambda: S },
}

impl<S: Scalar> Compatibility<S> {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible { .. })
    }
}

/// The `(0..7)` component of `a ∧ b ∧ c` for 2-forms `a`, `b` and a 3-form `c`.
fn wedge_223<S: Scalar>(a: &[S], b: &[S], c: &[S]) -> S {
    let n = 7;
    let mut acc = S::zero();
    for i0 in 0..n {
        for i1 in i0 + 1..n {
            let ab = &a[i0 * n + i1];
            if ab.is_zero() {
                continue;
            }
            for j0 in 0..n {
                if j0 == i0 || j0 == i1 {
                    continue;
                }
                for j1 in j0 + 1..n {
                    if j1 == i0 || j1 == i1 {
                        continue;
                    }
                    let bb = &b[j0 * n + j1];
                    if bb.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = (0..n).filter(|k| ![i0, i1, j0, j1].contains(k)).collect();
                    let cc = &c[(rest[0] * n + rest[1]) * n + rest[2]];
                    if cc.is_zero() {
                        continue;
                    }
                    let perm = [i0, i1, j0, j1, rest[0], rest[1], rest[2]];
                    let t = ab.mul(bb).mul(cc);
                    if permutation_sign(&perm) > 0 {
                        acc.add_assign(&t);
                    } else {
                        acc = acc.sub(&t);
                    }
                }
            }
        }
    }
    acc
}

/// Evaluates the compatibility identity of a 3-form `chi` on ℝ⁷ against `metric`
/// on all 49 basis pairs. The volume form is `√|det metric| dx⁰∧…∧dx⁶`.
pub fn phi_compatibility<S: Scalar>(chi: &[S], metric: &Matrix<S>) -> Result<Compatibility<S>> {
    let n = 7;
    if chi.len() != n * n * n || metric.rows != n || metric.cols != n {
        return Err(Error::ShapeMismatch("compatibility needs a 7-dimensional 3-form and metric".into()));
    }
    let tol = 1e-10;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = &chi[(i * n + j) * n + k];
                let swaps = [(j, i, k), (i, k, j), (k, j, i)];
                if swaps.iter().any(|&(a, b, c)| !v.add(&chi[(a * n + b) * n + c]).is_negligible(tol)) {
                    return Err(Error::InvalidInput("3-form is not totally antisymmetric".into()));
                }
            }
        }
    }
    let det = metric.det();
    let vol = (if det.signum() < 0 { det.neg() } else { det })
        .sqrt()
        .ok_or_else(|| Error::Inexact("volume form needs √|det h|".into()))?;
    if vol.is_zero() {
        return Err(Error::DegenerateMetric("compatibility metric is degenerate".into()));
    }
    let contract = |u: usize| -> Vec<S> {
        let mut a = vec![S::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = chi[(u * n + i) * n + j].clone();
            }
        }
        a
    };
    let forms: Vec<Vec<S>> = (0..n).map(contract).collect();
    let mut values = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            values.push((u, v, wedge_223(&forms[u], &forms[v], chi), metric[(u, v)].mul(&vol)));
        }
    }
    let lambda = values
        .iter()
        .find(|(_, _, _, m)| !m.is_zero())
        .and_then(|(_, _, f, m)| f.div(m))
        .ok_or_else(|| Error::DegenerateMetric("metric has no nonzero entry".into()))?;
    for (u, v, f, m) in values {
        if !f.sub(&lambda.mul(&m)).is_negligible(tol) {
            return Ok(Compatibility::NotProportional {
                u,
                v,
                form_value: f,
                metric_value: metric[(u, v)].clone(),
                lambda,
            });
        }
    }
    if lambda.signum() > 0 {
        Ok(Compatibility::Compatible { lambda })
    } else {
        Ok(Compatibility::NonPositive { lambda })
    }
}

// ---------------------------------------------------------------- 2-plane fields

/// A rank-2 distribution on a 5-dimensional chart spanned by two vector fields.
#[derive(Clone, Debug)]
pub struct TwoPlaneField<S: Scalar> {
    pub x: Vec<Jet<S>>,
    pub y: Vec<Jet<S>>,
    /// The function `F` when the field is in the normal form `{∂_q, ∂_x + p∂_y + q∂_p + F∂_z}`.
    pub f: Option<Jet<S>>,
}

fn vector_value<S: Scalar>(v: &[Jet<S>]) -> Vec<S> {
    v.iter().map(|c| c.constant_term()).collect()
}

impl<S: Scalar> TwoPlaneField<S> {
    pub fn new(x: Vec<Jet<S>>, y: Vec<Jet<S>>) -> Result<Self> {
        let n = x.len();
        if n != 5 || y.len() != 5 {
            return Err(Error::Dimension("2-plane fields live on a 5-dimensional chart".into()));
        }
        if x.iter().chain(y.iter()).any(|c| c.nvars() != 5) {
            return Err(Error::Dimension("vector field components must be jets in 5 variables".into()));
        }
        let m = Matrix::from_rows(vec![vector_value(&x), vector_value(&y)]);
        if m.rank(1e-12) < 2 {
            return Err(Error::InvalidInput("X and Y are dependent at the base point".into()));
        }
        Ok(TwoPlaneField { x, y, f: None })
    }

    /// `D = span{∂_q, ∂_x + p∂_y + q∂_p + F∂_z}`.
    pub fn from_f(f: &Jet<S>) -> Result<Self> {
        if f.nvars() != 5 {
            return Err(Error::Dimension("F must be a jet in (x, y, z, p, q)".into()));
        }
        let sp = f.space().clone();
        let zero = Jet::zero(&sp);
        let mut x = vec![zero.clone(); 5];
        x[VAR_Q] = Jet::one(&sp);
        let mut y = vec![zero; 5];
        y[VAR_X] = Jet::one(&sp);
        y[VAR_Y] = Jet::var(&sp, VAR_P);
        y[VAR_Z] = f.clone();
        y[VAR_P] = Jet::var(&sp, VAR_Q);
        let mut d = Self::new(x, y)?;
        d.f = Some(f.clone());
        Ok(d)
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        self.x[0].space()
    }
}

/// Lie bracket `[U, V]^i = U^j ∂_j V^i − V^j ∂_j U^i` in coordinates.
pub fn bracket<S: Scalar>(u: &[Jet<S>], v: &[Jet<S>]) -> Vec<Jet<S>> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let mut acc = Jet::zero(u[0].space());
            for j in 0..n {
                acc = &acc + &(&u[j] * &v[i].diff(j));
                acc = &acc - &(&v[j] * &u[i].diff(j));
            }
            acc
        })
        .collect()
}

/// `D¹ = span{X, Y, [X,Y]}` together with the full bracket frame.
#[derive(Clone, Debug)]
pub struct DerivedDistribution<S: Scalar> {
    /// `X, Y, [X,Y]`.
    pub d1: Vec<Vec<Jet<S>>>,
    /// `X, Y, [X,Y], [X,[X,Y]], [Y,[X,Y]]`.
    pub frame: Vec<Vec<Jet<S>>>,
    /// Linear independence of `frame` at the base point.
    pub generic: bool,
}

pub fn derived_distribution<S: Scalar>(d: &TwoPlaneField<S>) -> Result<DerivedDistribution<S>> {
    let rel = d.x.iter().chain(d.y.iter()).map(|c| c.reliable()).min().unwrap_or(0);
    if rel < 2 {
        return Err(Error::InsufficientOrder(format!(
            "second brackets need vector fields reliable to order 2, have {rel}"
        )));
    }
    let xy = bracket(&d.x, &d.y);
    let xxy = bracket(&d.x, &xy);
    let yxy = bracket(&d.y, &xy);
    let frame = vec![d.x.clone(), d.y.clone(), xy.clone(), xxy, yxy];
    let m = Matrix::from_rows(frame.iter().map(|v| vector_value(v)).collect());
    let generic = m.rank(1e-10) == 5;
    Ok(DerivedDistribution { d1: vec![d.x.clone(), d.y.clone(), xy], frame, generic })
}

// ---------------------------------------------------------------- the conformal metric

/// Memoised partial derivatives of `F`.
struct Derivatives<S: Scalar> {
    cache: HashMap<[u8; 5], Jet<S>>,
}

impl<S: Scalar> Derivatives<S> {
    fn new(f: &Jet<S>) -> Self {
        let mut cache = HashMap::new();
        cache.insert([0; 5], f.clone());
        Derivatives { cache }
    }

    fn get(&mut self, a: [u8; 5]) -> Jet<S> {
        if let Some(j) = self.cache.get(&a) {
            return j.clone();
        }
        let k = a.iter().position(|&e| e > 0).expect("zero multi-index is cached");
        let mut b = a;
        b[k] -= 1;
        let j = self.get(b).diff(k);
        self.cache.insert(a, j.clone());
        j
    }

    fn eval(&mut self, c: &Coefficient, inv_fqq: &Jet<S>) -> Jet<S> {
        let sp = self.cache[&[0; 5]].space().clone();
        let mut acc = Jet::zero(&sp);
        for (coef, e, ds) in c.terms {
            let mut t = Jet::constant(&sp, S::from_i64(*coef));
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &Jet::var(&sp, v).powi(k as u32);
                }
            }
            for d in ds.iter() {
                t = &t * &self.get(*d);
            }
            acc = &acc + &t;
        }
        (&acc * &inv_fqq.powi(c.fqq_power)).scale(&S::from_ratio(1, c.denom))
    }
}

fn row_combination<S: Scalar>(terms: &[(&Jet<S>, &[Jet<S>])]) -> Vec<Jet<S>> {
    (0..5)
        .map(|i| {
            let mut acc = Jet::zero(terms[0].0.space());
            for (c, row) in terms {
                acc = &acc + &(*c * &row[i]);
            }
            acc
        })
        .collect()
}

/// Normalised adapted coframe `θ⁰..θ⁴` of the distribution defined by `F`, as rows of
/// coefficients against `(dx, dy, dz, dp, dq)`. `D = ker{θ⁰, θ¹, θ²}` and
/// `D¹ = ker{θ⁰, θ¹}`.
pub fn adapted_coframe<S: Scalar>(f: &Jet<S>) -> Result<Vec<Vec<Jet<S>>>> {
    if f.nvars() != 5 {
        return Err(Error::Dimension("F must be a jet in (x, y, z, p, q)".into()));
    }
    let sp = f.space().clone();
    let mut d = Derivatives::new(f);
    let fq = d.get([0, 0, 0, 0, 1]);
    let fqq = d.get([0, 0, 0, 0, 2]);
    if fqq.constant_term().is_negligible(1e-12) {
        return Err(Error::InvalidInput("F_qq vanishes at the base point".into()));
    }
    let inv_fqq = fqq.invert()?;
    let (p, q) = (Jet::var(&sp, VAR_P), Jet::var(&sp, VAR_Q));
    let one = Jet::one(&sp);
    let zero = Jet::zero(&sp);
    let total = |g: &Jet<S>| -> Jet<S> {
        &(&(&g.diff(VAR_X) + &(&p * &g.diff(VAR_Y))) + &(&q * &g.diff(VAR_P))) + &(f * &g.diff(VAR_Z))
    };
    let k = &(&total(&fq) - &d.get([0, 0, 0, 1, 0])) - &(&fq * &d.get([0, 0, 1, 0, 0]));
    let eta1 = vec![-&p, one.clone(), zero.clone(), zero.clone(), zero.clone()];
    let eta2 = vec![&(&fq * &q) - f, zero.clone(), one.clone(), -&fq, zero.clone()];
    let eta3 = vec![-&q, zero.clone(), zero.clone(), one.clone(), zero.clone()];
    let eta4 = vec![zero.clone(), zero.clone(), zero.clone(), zero.clone(), one.clone()];
    let eta5 = vec![one.clone(), zero.clone(), zero.clone(), zero.clone(), zero.clone()];
    let v1 = d.eval(&frame_table::V1, &inv_fqq);
    let v2 = d.eval(&frame_table::V2, &inv_fqq);
    let w2 = d.eval(&frame_table::W2, &inv_fqq);
    let w3 = d.eval(&frame_table::W3, &inv_fqq);
    let w4 = d.eval(&frame_table::W4, &inv_fqq);
    let neg_k = -&(&k * &inv_fqq);
    let neg_inv = -&inv_fqq;
    let th0 = row_combination(&[(&neg_k, &eta1), (&neg_inv, &eta2)]);
    let th1 = eta1;
    let th2: Vec<Jet<S>> = eta3.iter().map(|c| -c).collect();
    let th3 = row_combination(&[(&one, &eta4), (&v1, &th2), (&w2, &th1)]);
    let th4 = row_combination(&[(&one, &eta5), (&v2, &th2), (&w3, &th0), (&w4, &th1)]);
    Ok(vec![th0, th1, th2, th3, th4])
}

/// Representative metric of the conformal structure of `D = span{∂_q, ∂_x + p∂_y + q∂_p + F∂_z}`:
/// `240(−2θ⁰θ⁴ + 2θ¹θ³ − (4/3)(θ²)²)` in the normalised adapted coframe.
pub fn nurowski_metric<S: Scalar>(f: &Jet<S>) -> Result<MetricJet<S>> {
    let th = adapted_coframe(f)?;
    let s = S::from_i64(METRIC_SCALE);
    let c_pp = S::from_ratio(-4 * METRIC_SCALE, 3);
    let m: JetMatrix<S> = (0..5)
        .map(|i| {
            (0..5)
                .map(|j| {
                    let cross = &(&(&th[1][i] * &th[3][j]) + &(&th[1][j] * &th[3][i]))
                        - &(&(&th[0][i] * &th[4][j]) + &(&th[0][j] * &th[4][i]));
                    &cross.scale(&s) + &(&th[2][i] * &th[2][j]).scale(&c_pp)
                })
                .collect()
        })
        .collect();
    MetricJet::new(m)
}

fn pairing<S: Scalar>(g: &MetricJet<S>, u: &[Jet<S>], v: &[Jet<S>]) -> Jet<S> {
    let mut acc = Jet::zero(g.space());
    for i in 0..5 {
        for j in 0..5 {
            acc = &acc + &(&(g.gij(i, j) * &u[i]) * &v[j]);
        }
    }
    acc
}

fn pairing_value<S: Scalar>(g: &Matrix<S>, u: &[S], v: &[S]) -> S {
    let mut acc = S::zero();
    for i in 0..u.len() {
        for j in 0..v.len() {
            acc.add_assign(&g[(i, j)].mul(&u[i]).mul(&v[j]));
        }
    }
    acc
}

// ---------------------------------------------------------------- Cartan's quartic

/// Binary quartic `A₀u⁴ + 4A₁u³v + 6A₂u²v² + 4A₃uv³ + A₄v⁴`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quartic<S: Scalar> {
    pub a: [S; 5],
}

const BINOM4: [i64; 5] = [1, 4, 6, 4, 1];

fn poly_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut r = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j].add_mul_assign(x, y);
        }
    }
    r
}

impl<S: Scalar> Quartic<S> {
    pub fn new(a: [S; 5]) -> Self {
        Quartic { a }
    }

    pub fn zero() -> Self {
        Quartic { a: std::array::from_fn(|_| S::zero()) }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    /// `A(X,X,X,X)` for `X = u e₁ + v e₂`.
    pub fn eval(&self, u: &S, v: &S) -> S {
        let mut acc = S::zero();
        for k in 0..5 {
            let t = u.pow(4 - k as u32).mul(&v.pow(k as u32)).mul(&S::from_i64(BINOM4[k]));
            acc.add_mul_assign(&self.a[k], &t);
        }
        acc
    }

    /// The two cubics `A(e₁,X,X,X)` and `A(e₂,X,X,X)` as coefficients of
    /// `u³, u²v, uv², v³`.
    pub fn cubics(&self) -> ([S; 4], [S; 4]) {
        let a = &self.a;
        let three = S::from_i64(3);
        (
            [a[0].clone(), three.mul(&a[1]), three.mul(&a[2]), a[3].clone()],
            [a[1].clone(), three.mul(&a[2]), three.mul(&a[3]), a[4].clone()],
        )
    }

    /// The 6×6 Sylvester determinant of the two cubics.
    pub fn resultant(&self) -> S {
        let (c1, c2) = self.cubics();
        let mut m = Matrix::zeros(6, 6);
        for r in 0..3 {
            for k in 0..4 {
                m[(r, r + k)] = c1[k].clone();
                m[(r + 3, r + k)] = c2[k].clone();
            }
        }
        m.det()
    }

    /// The quartic in the basis `e'_j = Σ_i m[i][j] e_i`, i.e. `(u, v) = m (u', v')`.
    pub fn change_basis(&self, m: [[S; 2]; 2]) -> Self {
        let u = [m[0][0].clone(), m[0][1].clone()];
        let v = [m[1][0].clone(), m[1][1].clone()];
        // Linear forms as coefficient vectors in (u'^{1-j} v'^j).
        let mut total = vec![S::zero(); 5];
        for k in 0..5 {
            let mut p = vec![S::one()];
            for _ in 0..4 - k {
                p = poly_mul(&p, &u);
            }
            for _ in 0..k {
                p = poly_mul(&p, &v);
            }
            let c = self.a[k].mul(&S::from_i64(BINOM4[k]));
            for (t, x) in total.iter_mut().zip(p.iter()) {
                t.add_mul_assign(&c, x);
            }
        }
        Quartic { a: std::array::from_fn(|k| total[k].div(&S::from_i64(BINOM4[k])).expect("nonzero binomial")) }
    }

    /// Real 3-degeneracy together with the resultant.
    pub fn three_degenerate(&self) -> (bool, S) {
        three_degenerate(self)
    }
}

/// Univariate polynomial helpers; coefficient vectors are stored low degree first.
mod upoly {
    use crate::scalar::Scalar;

    const TOL: f64 = 1e-9;

    pub fn trim<S: Scalar>(mut p: Vec<S>) -> Vec<S> {
        while p.last().is_some_and(|c| c.is_negligible(TOL)) {
            p.pop();
        }
        p
    }

    pub fn rem<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
        let mut r = trim(a.to_vec());
        let lead = b.last().expect("nonzero divisor").recip().expect("trimmed divisor");
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().unwrap().mul(&lead);
            for (i, bi) in b.iter().enumerate() {
                r[shift + i] = r[shift + i].sub(&c.mul(bi));
            }
            r.pop();
            r = trim(r);
        }
        r
    }

    pub fn gcd<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b);
            a = b;
            b = r;
        }
        a
    }

    pub fn derivative<S: Scalar>(p: &[S]) -> Vec<S> {
        p.iter().enumerate().skip(1).map(|(i, c)| c.mul(&S::from_i64(i as i64))).collect()
    }

    /// Number of sign changes of the Sturm chain at `±∞`.
    fn changes_at_infinity<S: Scalar>(chain: &[Vec<S>], positive: bool) -> usize {
        let signs: Vec<i32> = chain
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| {
                let s = p.last().unwrap().signum();
                if !positive && (p.len() - 1) % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots by Sturm's theorem.
    pub fn real_root_count<S: Scalar>(p: &[S]) -> usize {
        let p = trim(p.to_vec());
        if p.len() <= 1 {
            return 0;
        }
        let mut chain = vec![p.clone(), trim(derivative(&p))];
        while chain.last().is_some_and(|q| q.len() > 1) {
            let n = chain.len();
            let r: Vec<S> = rem(&chain[n - 2], &chain[n - 1]).iter().map(|c| c.neg()).collect();
            let r = trim(r);
            if r.is_empty() {
                break;
            }
            chain.push(r);
        }
        changes_at_infinity(&chain, false).saturating_sub(changes_at_infinity(&chain, true))
    }
}

/// Decides whether the two cubics of `q` share a real projective root, and reports the
/// resultant (which vanishes whenever they share a complex root).
pub fn three_degenerate<S: Scalar>(q: &Quartic<S>) -> (bool, S) {
    let res = q.resultant();
    let (c1, c2) = q.cubics();
    // Root at v = 0.
    if c1[0].is_negligible(1e-9) && c2[0].is_negligible(1e-9) {
        return (true, res);
    }
    let p1: Vec<S> = c1.iter().rev().cloned().collect();
    let p2: Vec<S> = c2.iter().rev().cloned().collect();
    let (t1, t2) = (upoly::trim(p1.clone()), upoly::trim(p2.clone()));
    if t1.is_empty() || t2.is_empty() {
        // One cubic vanishes identically; a nonzero real binary cubic always has a real root.
        return (true, res);
    }
    let g = upoly::gcd(&t1, &t2);
    (upoly::real_root_count(&g) > 0, res)
}

/// Cartan's quartic with the diagnostics verified along the way.
#[derive(Clone, Debug)]
pub struct CartanQuartic<S: Scalar> {
    pub quartic: Quartic<S>,
    /// `A(e_a, e_b, e_c, e_d)` for the basis `(X, Y)` of `D`, index `((a*2+b)*2+c)*2+d`.
    pub tensor: Vec<S>,
    pub symmetric: bool,
    /// `W(·,·,U,V) = 0` for `U, V ∈ D¹` within the jet truncation.
    pub weyl_vanishes_on_d1: bool,
}

/// Checks `D⊥ = D¹` for `g`: `D¹` is orthogonal to `D` within the truncation and the
/// induced form on `D¹/D` is nondegenerate.
pub fn is_adapted<S: Scalar>(g: &MetricJet<S>, dd: &DerivedDistribution<S>) -> bool {
    for a in 0..2 {
        for b in 0..3 {
            if !pairing(g, &dd.d1[a], &dd.d1[b]).is_negligible(1e-8) {
                return false;
            }
        }
    }
    let z = &dd.d1[2];
    !pairing(g, z, z).constant_term().is_negligible(1e-12)
}

/// Cartan's quartic `A(X₁,X₂,X₃,X₄) = W(τX₁, X₂, τX₃, X₄)` at the base point, in the
/// basis `(X, Y)` of `D`.
pub fn cartan_quartic<S: Scalar>(g: &MetricJet<S>, d: &TwoPlaneField<S>) -> Result<CartanQuartic<S>> {
    cartan_quartic_signed(g, d, 1)
}

/// As [`cartan_quartic`], with the normalising form `α` on `D¹/D` taken with sign `sign`.
pub fn cartan_quartic_signed<S: Scalar>(g: &MetricJet<S>, d: &TwoPlaneField<S>, sign: i32) -> Result<CartanQuartic<S>> {
    if g.dim() != 5 || g.space().nvars() != 5 {
        return Err(Error::Dimension("Cartan's quartic needs a metric on a 5-dimensional chart".into()));
    }
    let dd = derived_distribution(d)?;
    if !dd.generic {
        return Err(Error::InvalidInput("distribution is not generic at the base point".into()));
    }
    if !is_adapted(g, &dd) {
        return Err(Error::NotAdapted("D⊥ ≠ D¹".into()));
    }
    let w = weyl(g)?;
    let g0 = Matrix::from_rows((0..5).map(|i| (0..5).map(|j| g.gij(i, j).constant_term()).collect()).collect());
    let xs: Vec<Vec<S>> = dd.d1.iter().map(|v| vector_value(v)).collect();
    let c = pairing_value(&g0, &xs[2], &xs[2]);
    // α(Z) = ±1 for Z = [X,Y]; the true α has α(Z)² = −3c/4 and A is quadratic in α.
    let alpha_sq = c.mul(&S::from_ratio(-3, 4));
    let a = S::from_i64(sign.signum() as i64);
    if a.is_zero() {
        return Err(Error::InvalidInput("sign of α must be ±1".into()));
    }
    // Complement of D¹ from coordinate directions.
    let mut basis = xs.clone();
    let mut comp = Vec::new();
    for k in 0..5 {
        let mut e = vec![S::zero(); 5];
        e[k] = S::one();
        let mut trial = basis.clone();
        trial.push(e.clone());
        if Matrix::from_rows(trial.clone()).rank(1e-12) == trial.len() {
            basis = trial;
            comp.push(e);
        }
        if comp.len() == 2 {
            break;
        }
    }
    // ψ(U) = g(U, ·)|_D on the complement.
    let psi = Matrix::from_rows(
        (0..2).map(|r| (0..2).map(|s| pairing_value(&g0, &comp[s], &xs[r])).collect()).collect(),
    );
    // μ(X)(Y) = α([X,Y]).
    let mu = [[S::zero(), a.clone()], [a.neg(), S::zero()]];
    let mut tau = Vec::new();
    for row in &mu {
        let coeffs = psi
            .solve(row, 1e-12)
            .ok_or_else(|| Error::NotAdapted("g(·, D) is degenerate on TM/D¹".into()))?;
        tau.push((0..5).map(|i| coeffs[0].mul(&comp[0][i]).add(&coeffs[1].mul(&comp[1][i]))).collect::<Vec<S>>());
    }
    let wv = |u: &[S], v: &[S], s: &[S], t: &[S]| -> S {
        let mut acc = S::zero();
        for i in 0..5 {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..5 {
                if v[j].is_zero() {
                    continue;
                }
                for k in 0..5 {
                    if s[k].is_zero() {
                        continue;
                    }
                    for l in 0..5 {
                        if t[l].is_zero() {
                            continue;
                        }
                        let c = w.get(&[i, j, k, l]).constant_term();
                        acc.add_assign(&c.mul(&u[i]).mul(&v[j]).mul(&s[k]).mul(&t[l]));
                    }
                }
            }
        }
        acc
    };
    let mut tensor = Vec::with_capacity(16);
    for i in 0..16 {
        let (p, q, r, s) = ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1);
        tensor.push(wv(&tau[p], &xs[q], &tau[r], &xs[s]).mul(&alpha_sq));
    }
    let symmetric = (0..16).all(|i| {
        let ones = (i as u32).count_ones() as usize;
        let canonical = (1usize << ones) - 1;
        tensor[i].sub(&tensor[canonical]).is_negligible(1e-9)
    });
    let quartic = Quartic { a: std::array::from_fn(|k| tensor[(1usize << k) - 1].clone()) };
    let mut vanish = true;
    'outer: for u in &dd.d1 {
        for v in &dd.d1 {
            for i in 0..5 {
                for j in 0..5 {
                    let mut acc = Jet::zero(g.space());
                    for k in 0..5 {
                        for l in 0..5 {
                            acc = &acc + &(&(w.get(&[i, j, k, l]) * &u[k]) * &v[l]);
                        }
                    }
                    if !acc.is_negligible(1e-9) {
                        vanish = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(CartanQuartic { quartic, tensor, symmetric, weyl_vanishes_on_d1: vanish })
}

// ---------------------------------------------------------------- the L-map

/// `L(v, λ) = W_{ijkl} vⁱ + C_{jkl} λ` at the base point as an `n³ × (n+1)` matrix.
#[derive(Clone, Debug)]
pub struct LMap<S: Scalar> {
    pub n: usize,
    pub matrix: Matrix<S>,
}

impl<S: Scalar> LMap<S> {
    pub fn new(w: &TensorJet<S>, c: &TensorJet<S>) -> Result<Self> {
        let n = w.dim();
        if w.rank() != 4 || c.rank() != 3 || c.dim() != n {
            return Err(Error::ShapeMismatch("L-map needs a 4-tensor W and a 3-tensor C of equal dimension".into()));
        }
        let mut m = Matrix::zeros(n * n * n, n + 1);
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let r = (j * n + k) * n + l;
                    for i in 0..n {
                        m[(r, i)] = w.get(&[i, j, k, l]).constant_term();
                    }
                    m[(r, n)] = c.get(&[j, k, l]).constant_term();
                }
            }
        }
        Ok(LMap { n, matrix: m })
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.matrix.rank(tol)
    }

    pub fn injective(&self, tol: f64) -> bool {
        self.rank(tol) == self.n + 1
    }
}

/// Rank of the L-map built from `W` and `C` (exact in rational mode).
pub fn l_map_rank<S: Scalar>(w: &TensorJet<S>, c: &TensorJet<S>, tol: f64) -> Result<usize> {
    Ok(LMap::new(w, c)?.rank(tol))
}

// ---------------------------------------------------------------- origin jets of F = q² + f

/// Ratio between Cartan's quartic of `q² + f` and the partial derivatives
/// `(∂_q⁶f, ∂_q⁵∂_xf, ∂_q⁴∂_x²f, ∂_q³∂_x³f, ∂_q²∂_x⁴f)(0)`, fixed by
/// comparison with [`cartan_quartic`] on `f = q⁶`.
pub fn fhol_constant<S: Scalar>() -> S {
    S::from_ratio(FHOL_NUM, FHOL_DEN)
}

const FHOL_NUM: i64 = 1;
const FHOL_DEN: i64 = 20;

/// Origin data of `F = q² + f` with `f = O(|·|⁶)`.
#[derive(Clone, Debug)]
pub struct FholOrigin<S: Scalar> {
    /// `(∂_q⁶f, ∂_q⁵∂_xf, ∂_q⁴∂_x²f, ∂_q³∂_x³f, ∂_q²∂_x⁴f)(0)`.
    pub partials: [S; 5],
    /// The partials scaled by [`fhol_constant`].
    pub quartic: Quartic<S>,
    /// The perturbation `h = −24∂_x²∂_q²f dy² + 24∂_x∂_q³f dydz − 6∂_q⁴f dz²`.
    pub h: JetMatrix<S>,
    /// `R_{ijkl}(0)` of `g_{q²} + h` from the linearised formula, index `((i*5+j)*5+k)*5+l`.
    pub curvature: Vec<S>,
    /// `g_{q²}(0) = 480 dy dq + 240 dz dx − 320 dp²`.
    pub flat_origin: Matrix<S>,
}

impl<S: Scalar> FholOrigin<S> {
    pub fn curvature_at(&self, i: usize, j: usize, k: usize, l: usize) -> &S {
        &self.curvature[((i * 5 + j) * 5 + k) * 5 + l]
    }
}

fn nth_diff<S: Scalar>(f: &Jet<S>, a: [u8; 5]) -> Jet<S> {
    let mut j = f.clone();
    for (v, &k) in a.iter().enumerate() {
        for _ in 0..k {
            j = j.diff(v);
        }
    }
    j
}

/// Origin-jet computation for `F = q² + f`.
pub fn fhol_origin<S: Scalar>(f: &Jet<S>) -> Result<FholOrigin<S>> {
    if f.nvars() != 5 {
        return Err(Error::Dimension("f must be a jet in (x, y, z, p, q)".into()));
    }
    if f.order() < 6 || f.reliable() < 6 {
        return Err(Error::InsufficientOrder("origin data need the 6-jet of f".into()));
    }
    if f.min_degree().is_some_and(|d| d < 6) {
        return Err(Error::InvalidInput("f must vanish to order 6 at the origin".into()));
    }
    let partials: [S; 5] = std::array::from_fn(|k| nth_diff(f, [k as u8, 0, 0, 0, 6 - k as u8]).constant_term());
    let c = fhol_constant::<S>();
    let quartic = Quartic { a: std::array::from_fn(|k| partials[k].mul(&c)) };
    let sp = f.space().clone();
    let zero = Jet::zero(&sp);
    let mut h: JetMatrix<S> = vec![vec![zero; 5]; 5];
    h[VAR_Y][VAR_Y] = nth_diff(f, [2, 0, 0, 0, 2]).scale_i(-24);
    let yz = nth_diff(f, [1, 0, 0, 0, 3]).scale_i(12);
    h[VAR_Y][VAR_Z] = yz.clone();
    h[VAR_Z][VAR_Y] = yz;
    h[VAR_Z][VAR_Z] = nth_diff(f, [0, 0, 0, 0, 4]).scale_i(-6);
    let mut second = HashMap::new();
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                for l in 0..5 {
                    second.insert((i, j, k, l), h[i][j].diff(k).diff(l).constant_term());
                }
            }
        }
    }
    let hd = |a: usize, b: usize, c: usize, d: usize| second[&(a, b, c, d)].clone();
    let mut curvature = Vec::with_capacity(625);
    let half = S::from_ratio(1, 2);
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                for l in 0..5 {
                    let v = hd(i, l, j, k).sub(&hd(j, l, i, k)).sub(&hd(i, k, j, l)).add(&hd(j, k, i, l));
                    curvature.push(v.mul(&half));
                }
            }
        }
    }
    let mut flat_origin = Matrix::zeros(5, 5);
    flat_origin[(VAR_Y, VAR_Q)] = S::from_i64(240);
    flat_origin[(VAR_Q, VAR_Y)] = S::from_i64(240);
    flat_origin[(VAR_Z, VAR_X)] = S::from_i64(120);
    flat_origin[(VAR_X, VAR_Z)] = S::from_i64(120);
    flat_origin[(VAR_P, VAR_P)] = S::from_i64(-320);
    Ok(FholOrigin { partials, quartic, h, curvature, flat_origin })
}

// ---------------------------------------------------------------- full pipeline

/// Everything the 2-plane check reports for a normal-form function `F`.
#[derive(Clone, Debug)]
pub struct TwoPlaneReport<S: Scalar> {
    pub generic: bool,
    pub adapted: bool,
    pub quartic: Quartic<S>,
    pub symmetric: bool,
    pub weyl_vanishes_on_d1: bool,
    pub three_degenerate: bool,
    pub resultant: S,
    pub l_rank: usize,
    /// Jet order of the metric (`order(F) − 4` for polynomial input).
    pub metric_reliable: i64,
}

/// `F` as a jet known through order `k` only, so that products are truncated there.
pub fn base_jet<S: Scalar>(f: &Jet<S>, k: u32) -> Jet<S> {
    let rel = f.reliable().min(k as i64).min(f.order() as i64);
    Jet::from_dense(f.space(), f.truncated(rel).dense().to_vec(), rel, false)
}

/// Builds the conformal metric of `F` and evaluates genericity, Cartan's quartic, its
/// 3-degeneracy and the L-map rank at the base point. Only the 7-jet of `F` enters
/// (four derivatives for the metric, three more for the Cotton tensor).
pub fn check_two_plane<S: Scalar>(f: &Jet<S>, tol: f64) -> Result<TwoPlaneReport<S>> {
    if f.reliable() < 7 {
        return Err(Error::InsufficientOrder("the 2-plane check needs the 7-jet of F".into()));
    }
    let f = &base_jet(f, 7);
    let d = TwoPlaneField::from_f(f)?;
    let dd = derived_distribution(&d)?;
    if !dd.generic {
        return Ok(TwoPlaneReport {
            generic: false,
            adapted: false,
            quartic: Quartic::zero(),
            symmetric: true,
            weyl_vanishes_on_d1: true,
            three_degenerate: true,
            resultant: S::zero(),
            l_rank: 0,
            metric_reliable: 0,
        });
    }
    let g = nurowski_metric(f)?;
    let adapted = is_adapted(&g, &dd);
    let cq = cartan_quartic(&g, &d)?;
    let w = weyl(&g)?;
    let c = cotton(&g)?;
    let l_rank = l_map_rank(&w, &c, tol)?;
    let (three, resultant) = three_degenerate(&cq.quartic);
    Ok(TwoPlaneReport {
        generic: true,
        adapted,
        quartic: cq.quartic,
        symmetric: cq.symmetric,
        weyl_vanishes_on_d1: cq.weyl_vanishes_on_d1,
        three_degenerate: three,
        resultant,
        l_rank,
        metric_reliable: g.reliable(),
    })
}
