//! Truncated multivariate Taylor series ("jets") at a base point.
//!
//! A [`JetSpace`] fixes the number of variables, a positive integer weight per
//! variable (1 unless stated otherwise) and the storage order `N`; the degree of
//! a monomial is its weighted degree `Σ wᵢeᵢ`. Monomials are stored densely in
//! graded order (all degree-0 terms, then degree 1, ...). Each [`Jet`] additionally records the degree up to which
//! its coefficients are trustworthy (`reliable`) and whether it is an exact
//! polynomial. Coefficients above the reliable degree are never stored.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_VARS: usize = 16;
const INF: i64 = i64::MAX / 4;

/// Monomial table and cached operation tables for a fixed `(nvars, order)`.
pub struct JetSpace {
    nvars: usize,
    order: u32,
    weights: Vec<u8>,
    exps: Vec<u8>,
    degs: Vec<u32>,
    deg_start: Vec<usize>,
    lookup: HashMap<u128, u32>,
    mul: OnceLock<MulTable>,
    diff: OnceLock<Vec<Vec<(u32, u32)>>>,
    integ: OnceLock<Vec<Vec<(u32, u32)>>>,
}

struct MulTable {
    offsets: Vec<usize>,
    idx: Vec<u32>,
}

fn key_of(e: &[u8]) -> u128 {
    let mut k = 0u128;
    for (i, &x) in e.iter().enumerate() {
        k |= (x as u128) << (8 * i);
    }
    k
}

impl JetSpace {
    /// Interned space for `nvars` variables truncated at total degree `order`.
    pub fn get(nvars: usize, order: u32) -> Arc<JetSpace> {
        JetSpace::weighted(&vec![1; nvars], order)
    }

    /// Interned space with per-variable weights, truncated at weighted degree `order`.
    pub fn weighted(weights: &[u8], order: u32) -> Arc<JetSpace> {
        type Registry = Mutex<HashMap<(Vec<u8>, u32), Arc<JetSpace>>>;
        static SPACES: OnceLock<Registry> = OnceLock::new();
        assert!(weights.len() <= MAX_VARS, "at most {MAX_VARS} jet variables");
        assert!(weights.iter().all(|&w| w >= 1), "jet variable weights must be positive");
        assert!(order < 255, "jet order too large");
        let m = SPACES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = m.lock().unwrap();
        guard
            .entry((weights.to_vec(), order))
            .or_insert_with(|| Arc::new(JetSpace::build(weights, order)))
            .clone()
    }

    fn build(weights: &[u8], order: u32) -> JetSpace {
        let nvars = weights.len();
        let mut exps = Vec::new();
        let mut degs = Vec::new();
        let mut deg_start = Vec::new();
        let mut cur = vec![0u8; nvars];
        for d in 0..=order {
            deg_start.push(degs.len());
            gen_degree(weights, d, d, 0, &mut cur, &mut exps, &mut degs);
        }
        deg_start.push(degs.len());
        let mut lookup = HashMap::with_capacity(degs.len());
        for i in 0..degs.len() {
            lookup.insert(key_of(&exps[i * nvars..(i + 1) * nvars]), i as u32);
        }
        JetSpace {
            nvars,
            order,
            weights: weights.to_vec(),
            exps,
            degs,
            deg_start,
            lookup,
            mul: OnceLock::new(),
            diff: OnceLock::new(),
            integ: OnceLock::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn order(&self) -> u32 {
        self.order
    }
    pub fn weights(&self) -> &[u8] {
        &self.weights
    }
    pub fn weight(&self, var: usize) -> u32 {
        self.weights[var] as u32
    }
    /// True when every variable has weight 1.
    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }
    /// Weighted degree of an exponent vector.
    pub fn degree_of(&self, e: &[u8]) -> u32 {
        e.iter().zip(&self.weights).map(|(&x, &w)| x as u32 * w as u32).sum()
    }
    /// Number of monomials of degree ≤ order.
    pub fn len(&self) -> usize {
        self.degs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.degs.is_empty()
    }
    pub fn exps(&self, i: usize) -> &[u8] {
        &self.exps[i * self.nvars..(i + 1) * self.nvars]
    }
    pub fn degree(&self, i: usize) -> u32 {
        self.degs[i]
    }
    /// Number of monomials with total degree ≤ d (d clamped to the order).
    pub fn count_upto(&self, d: i64) -> usize {
        if d < 0 {
            0
        } else {
            self.deg_start[(d.min(self.order as i64) + 1) as usize]
        }
    }
    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        if e.len() != self.nvars {
            return None;
        }
        self.lookup.get(&key_of(e)).map(|&i| i as usize)
    }

    fn mul_table(&self) -> &MulTable {
        self.mul.get_or_init(|| {
            let n = self.len();
            let mut offsets = Vec::with_capacity(n + 1);
            let mut idx = Vec::new();
            let mut tmp = vec![0u8; self.nvars];
            for i in 0..n {
                offsets.push(idx.len());
                let jmax = self.count_upto(self.order as i64 - self.degs[i] as i64);
                let ei = self.exps(i).to_vec();
                for j in 0..jmax {
                    let ej = self.exps(j);
                    for v in 0..self.nvars {
                        tmp[v] = ei[v] + ej[v];
                    }
                    idx.push(self.lookup[&key_of(&tmp)]);
                }
            }
            offsets.push(idx.len());
            MulTable { offsets, idx }
        })
    }

    fn diff_tables(&self) -> &Vec<Vec<(u32, u32)>> {
        self.diff.get_or_init(|| {
            (0..self.nvars)
                .map(|v| {
                    (0..self.len())
                        .map(|i| {
                            let e = self.exps(i);
                            if e[v] == 0 {
                                (u32::MAX, 0)
                            } else {
                                let mut f = e.to_vec();
                                f[v] -= 1;
                                (self.lookup[&key_of(&f)], e[v] as u32)
                            }
                        })
                        .collect()
                })
                .collect()
        })
    }

    fn integ_tables(&self) -> &Vec<Vec<(u32, u32)>> {
        self.integ.get_or_init(|| {
            (0..self.nvars)
                .map(|v| {
                    (0..self.len())
                        .map(|i| {
                            if self.degs[i] + self.weights[v] as u32 > self.order {
                                (u32::MAX, 0)
                            } else {
                                let e = self.exps(i);
                                let mut f = e.to_vec();
                                f[v] += 1;
                                (self.lookup[&key_of(&f)], e[v] as u32 + 1)
                            }
                        })
                        .collect()
                })
                .collect()
        })
    }
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unweighted() {
            write!(f, "JetSpace(nvars={}, order={})", self.nvars, self.order)
        } else {
            write!(f, "JetSpace(weights={:?}, order={})", self.weights, self.order)
        }
    }
}

/// Appends all exponent vectors of weighted degree `total` in lex-descending order;
/// `d` is the degree still to distribute over positions `pos..`.
fn gen_degree(w: &[u8], total: u32, d: u32, pos: usize, cur: &mut Vec<u8>, exps: &mut Vec<u8>, degs: &mut Vec<u32>) {
    let nvars = w.len();
    if nvars == 0 {
        if d == 0 {
            degs.push(0);
        }
        return;
    }
    let wp = w[pos] as u32;
    if pos == nvars - 1 {
        if d % wp == 0 {
            cur[pos] = (d / wp) as u8;
            exps.extend_from_slice(cur);
            degs.push(total);
            cur[pos] = 0;
        }
        return;
    }
    for k in (0..=d / wp).rev() {
        cur[pos] = k as u8;
        gen_degree(w, total, d - k * wp, pos + 1, cur, exps, degs);
    }
    cur[pos] = 0;
}

/// A truncated Taylor series with reliability bookkeeping.
#[derive(Clone)]
pub struct Jet<S: Scalar> {
    space: Arc<JetSpace>,
    c: Vec<S>,
    rel: i32,
    exact: bool,
}

impl<S: Scalar> Jet<S> {
    fn finish(space: Arc<JetSpace>, mut c: Vec<S>, rel: i64, exact: bool) -> Jet<S> {
        let order = space.order as i64;
        let (rel, exact) = if exact { (order, true) } else { (rel.clamp(-1, order), false) };
        let cap = space.count_upto(rel);
        c.truncate(cap);
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Jet { space, c, rel: rel as i32, exact }
    }

    pub fn zero(space: &Arc<JetSpace>) -> Jet<S> {
        Jet { space: space.clone(), c: Vec::new(), rel: space.order as i32, exact: true }
    }
    pub fn one(space: &Arc<JetSpace>) -> Jet<S> {
        Jet::constant(space, S::one())
    }
    pub fn constant(space: &Arc<JetSpace>, v: S) -> Jet<S> {
        Jet::finish(space.clone(), vec![v], 0, true)
    }
    /// The coordinate function `x_i`.
    pub fn var(space: &Arc<JetSpace>, i: usize) -> Jet<S> {
        assert!(i < space.nvars, "variable index out of range");
        let mut e = vec![0u8; space.nvars];
        e[i] = 1;
        Jet::monomial(space, &e, S::one())
    }
    /// `coef · x^e` (truncated to zero when the degree exceeds the order).
    pub fn monomial(space: &Arc<JetSpace>, e: &[u8], coef: S) -> Jet<S> {
        Jet::from_terms(space, &[(e.to_vec(), coef)])
    }
    /// Exact polynomial from `(exponent, coefficient)` terms.
    ///
    /// Terms above the storage order are dropped and the result is then
    /// marked reliable only up to the order.
    pub fn from_terms(space: &Arc<JetSpace>, terms: &[(Vec<u8>, S)]) -> Jet<S> {
        let mut c = vec![S::zero(); space.len()];
        let mut exact = true;
        for (e, v) in terms {
            assert_eq!(e.len(), space.nvars, "exponent length mismatch");
            let d = space.degree_of(e);
            if d > space.order {
                if !v.is_zero() {
                    exact = false;
                }
                continue;
            }
            let i = space.index_of(e).expect("monomial lookup");
            c[i].add_assign(v);
        }
        Jet::finish(space.clone(), c, space.order as i64, exact)
    }
    /// Builds a jet from dense graded coefficients with an explicit reliable degree.
    pub fn from_dense(space: &Arc<JetSpace>, c: Vec<S>, reliable: i64, exact: bool) -> Jet<S> {
        Jet::finish(space.clone(), c, reliable, exact)
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }
    pub fn nvars(&self) -> usize {
        self.space.nvars
    }
    pub fn order(&self) -> u32 {
        self.space.order
    }
    /// Reliable degree (`order` for exact jets, `-1` if nothing is known).
    pub fn reliable(&self) -> i64 {
        self.rel as i64
    }
    pub fn is_exact(&self) -> bool {
        self.exact
    }
    fn eff_rel(&self) -> i64 {
        if self.exact {
            INF
        } else {
            self.rel as i64
        }
    }
    /// Stored dense coefficients (graded order; implicit zeros after the end).
    pub fn dense(&self) -> &[S] {
        &self.c
    }
    /// True if every stored coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    /// True for a zero polynomial known to all orders (safe to skip in sums of products).
    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.c.is_empty()
    }
    /// Zero test honouring the float tolerance in float mode.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.c.iter().all(|x| x.is_negligible(tol))
    }
    pub fn coeff(&self, e: &[u8]) -> S {
        match self.space.index_of(e) {
            Some(i) if i < self.c.len() => self.c[i].clone(),
            _ => S::zero(),
        }
    }
    pub fn constant_term(&self) -> S {
        self.c.first().cloned().unwrap_or_else(S::zero)
    }
    /// Lowest degree with a nonzero stored coefficient.
    pub fn min_degree(&self) -> Option<u32> {
        self.c.iter().position(|x| !x.is_zero()).map(|i| self.space.degs[i])
    }
    /// Highest degree with a nonzero stored coefficient.
    pub fn max_degree(&self) -> Option<u32> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.space.degs[self.c.len() - 1])
        }
    }
    /// Valuation used by the reliability rules (unknown terms count from `rel+1`).
    fn val_eff(&self) -> i64 {
        let known = self.min_degree().map(|d| d as i64).unwrap_or(INF);
        known.min(self.eff_rel().saturating_add(1))
    }
    /// Iterator over nonzero `(exponents, coefficient)` pairs in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &S)> {
        self.c.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(i, v)| (self.space.exps(i), v))
    }

    fn check_same(&self, o: &Jet<S>) -> Result<()> {
        if Arc::ptr_eq(&self.space, &o.space) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "jets over {:?} and {:?}",
                self.space, o.space
            )))
        }
    }

    /// Same jet with reliability lowered to `d` (coefficients above `d` discarded).
    pub fn truncated(&self, d: i64) -> Jet<S> {
        if d >= self.eff_rel() {
            return self.clone();
        }
        Jet::finish(self.space.clone(), self.c.clone(), d, false)
    }

    /// Drops all terms of degree > `d` but keeps the jet flagged exact if it was
    /// (used when building exact polynomials from truncated data).
    pub fn with_reliable(&self, d: i64) -> Jet<S> {
        self.truncated(d)
    }

    pub fn checked_add(&self, o: &Jet<S>) -> Result<Jet<S>> {
        self.check_same(o)?;
        Ok(self.lin_comb(o, false))
    }
    pub fn checked_sub(&self, o: &Jet<S>) -> Result<Jet<S>> {
        self.check_same(o)?;
        Ok(self.lin_comb(o, true))
    }
    fn lin_comb(&self, o: &Jet<S>, negate: bool) -> Jet<S> {
        let exact = self.exact && o.exact;
        let rel = self.eff_rel().min(o.eff_rel());
        let cap = if exact { self.space.len() } else { self.space.count_upto(rel) };
        let n = self.c.len().max(o.c.len()).min(cap);
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i);
            let b = o.c.get(i);
            let v = match (a, b) {
                (Some(a), Some(b)) => {
                    if negate {
                        a.sub(b)
                    } else {
                        a.add(b)
                    }
                }
                (Some(a), None) => a.clone(),
                (None, Some(b)) => {
                    if negate {
                        b.neg()
                    } else {
                        b.clone()
                    }
                }
                (None, None) => S::zero(),
            };
            c.push(v);
        }
        Jet::finish(self.space.clone(), c, rel.min(self.space.order as i64), exact)
    }

    pub fn checked_mul(&self, o: &Jet<S>) -> Result<Jet<S>> {
        self.check_same(o)?;
        Ok(self.mul_impl(o))
    }

    fn mul_impl(&self, o: &Jet<S>) -> Jet<S> {
        let sp = &self.space;
        let order = sp.order as i64;
        if (self.exact && self.c.is_empty()) || (o.exact && o.c.is_empty()) {
            return Jet::zero(sp);
        }
        let both_exact = self.exact && o.exact;
        let limit = if both_exact {
            order
        } else {
            order.min(self.eff_rel().saturating_add(o.val_eff())).min(o.eff_rel().saturating_add(self.val_eff()))
        };
        let exact = both_exact
            && (self.max_degree().unwrap_or(0) as i64 + o.max_degree().unwrap_or(0) as i64) <= order;
        if limit < 0 {
            return Jet::finish(sp.clone(), Vec::new(), -1, false);
        }
        let n_out = sp.count_upto(limit);
        let mut out = vec![S::zero(); n_out];
        let mt = sp.mul_table();
        for (i, ai) in self.c.iter().enumerate() {
            let di = sp.degs[i] as i64;
            if di > limit {
                break;
            }
            if ai.is_zero() {
                continue;
            }
            let jmax = o.c.len().min(sp.count_upto(limit - di));
            let row = &mt.idx[mt.offsets[i]..];
            for j in 0..jmax {
                let bj = &o.c[j];
                if bj.is_zero() {
                    continue;
                }
                out[row[j] as usize].add_mul_assign(ai, bj);
            }
        }
        Jet::finish(sp.clone(), out, limit, exact)
    }

    pub fn scale(&self, s: &S) -> Jet<S> {
        if s.is_zero() {
            return Jet::zero(&self.space);
        }
        let c = self.c.iter().map(|x| x.mul(s)).collect();
        Jet::finish(self.space.clone(), c, self.rel as i64, self.exact)
    }

    pub fn scale_i(&self, k: i64) -> Jet<S> {
        self.scale(&S::from_i64(k))
    }

    pub fn add_scalar(&self, s: &S) -> Jet<S> {
        let mut c = self.c.clone();
        if self.eff_rel() < 0 {
            return self.clone();
        }
        if c.is_empty() {
            c.push(s.clone());
        } else {
            c[0] = c[0].add(s);
        }
        Jet::finish(self.space.clone(), c, self.rel as i64, self.exact)
    }

    pub fn neg(&self) -> Jet<S> {
        let c = self.c.iter().map(|x| x.neg()).collect();
        Jet { space: self.space.clone(), c, rel: self.rel, exact: self.exact }
    }

    pub fn powi(&self, k: u32) -> Jet<S> {
        let mut acc = Jet::one(&self.space);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse modulo degree N+1.
    pub fn invert(&self) -> Result<Jet<S>> {
        let c0 = self.constant_term();
        if self.eff_rel() < 0 || c0.is_zero() {
            return Err(Error::NotInvertible("jet has zero constant term".into()));
        }
        let inv0 = c0.recip().ok_or_else(|| Error::NotInvertible("constant term".into()))?;
        if self.exact && self.c.len() <= 1 {
            return Ok(Jet::constant(&self.space, inv0));
        }
        let target = self.eff_rel().min(self.space.order as i64);
        let mut y = Jet::finish(self.space.clone(), vec![inv0], 0, false);
        let two = S::from_i64(2);
        let mut prec: i64 = 0;
        while prec < target {
            prec = (2 * prec + 1).min(target);
            let at = self.truncated(prec);
            let yt = Jet { rel: prec as i32, ..y.clone() };
            let e = at.mul_impl(&yt).neg().add_scalar(&two);
            let ny = yt.mul_impl(&e);
            y = Jet::finish(self.space.clone(), ny.c, prec, false);
        }
        Ok(y)
    }

    /// Formal partial derivative; reliability drops by the variable's weight.
    pub fn diff(&self, var: usize) -> Jet<S> {
        assert!(var < self.space.nvars, "variable index out of range");
        let tab = &self.space.diff_tables()[var];
        let rel = self.rel as i64 - self.space.weights[var] as i64;
        let cap = if self.exact { self.space.len() } else { self.space.count_upto(rel) };
        let mut out = vec![S::zero(); cap.min(self.c.len())];
        for (i, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let (t, f) = tab[i];
            if f == 0 {
                continue;
            }
            let t = t as usize;
            if t < out.len() {
                let m = v.mul(&S::from_i64(f as i64));
                out[t].add_assign(&m);
            }
        }
        Jet::finish(self.space.clone(), out, rel, self.exact)
    }

    /// Antiderivative vanishing on `x_var = 0`; reliability rises by the variable's weight.
    pub fn integrate(&self, var: usize) -> Jet<S> {
        assert!(var < self.space.nvars, "variable index out of range");
        let tab = &self.space.integ_tables()[var];
        let order = self.space.order as i64;
        let w = self.space.weights[var] as i64;
        let overflow = self.max_degree().is_some_and(|d| d as i64 + w > order);
        let exact = self.exact && !overflow;
        let rel = if self.exact { order } else { (self.rel as i64 + w).min(order) };
        let mut out = vec![S::zero(); self.space.count_upto(rel)];
        for (i, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let (t, f) = tab[i];
            if f == 0 {
                continue;
            }
            let t = t as usize;
            if t < out.len() {
                let m = v.mul(&S::from_ratio(1, f as i64));
                out[t].add_assign(&m);
            }
        }
        Jet::finish(self.space.clone(), out, rel, exact)
    }

    /// Restriction to the hyperplane `x_var = 0` (same space).
    pub fn restrict_zero(&self, var: usize) -> Jet<S> {
        let mut c = self.c.clone();
        for (i, v) in c.iter_mut().enumerate() {
            if self.space.exps(i)[var] > 0 {
                *v = S::zero();
            }
        }
        Jet::finish(self.space.clone(), c, self.rel as i64, self.exact)
    }

    /// Coefficient of `x_var^m`, as a jet in the remaining variables (same space).
    /// Its reliable degree is `reliable - m·weight(var)`.
    pub fn coeff_in_var(&self, var: usize, m: u32) -> Jet<S> {
        let sp = &self.space;
        let rel = if self.exact { sp.order as i64 } else { self.rel as i64 - (m * sp.weight(var)) as i64 };
        let mut out = vec![S::zero(); sp.count_upto(rel)];
        let mut e = vec![0u8; sp.nvars];
        for (i, v) in self.c.iter().enumerate() {
            let ei = sp.exps(i);
            if ei[var] as u32 != m || v.is_zero() {
                continue;
            }
            e.copy_from_slice(ei);
            e[var] = 0;
            let t = sp.index_of(&e).unwrap();
            if t < out.len() {
                out[t] = v.clone();
            }
        }
        Jet::finish(sp.clone(), out, rel, self.exact)
    }

    /// Order of vanishing in `x_var`: the first power `m` whose coefficient is
    /// nonzero among reliable terms. `Err(limit)` if no such power is visible,
    /// where `limit = ⌊reliable / weight⌋ + 1` is the largest certifiable order.
    pub fn var_valuation(&self, var: usize, tol: f64) -> std::result::Result<u32, u32> {
        let w = self.space.weights[var] as i32;
        let limit = if self.exact {
            u32::MAX
        } else if self.rel < 0 {
            0
        } else {
            (self.rel / w + 1) as u32
        };
        let mut best: Option<u32> = None;
        for (i, v) in self.c.iter().enumerate() {
            if v.is_negligible(tol) {
                continue;
            }
            let m = self.space.exps(i)[var] as u32;
            best = Some(best.map_or(m, |b| b.min(m)));
        }
        match best {
            Some(m) => Ok(m),
            None => Err(limit),
        }
    }

    /// Re-expresses the jet in a space with more (or renamed) variables:
    /// old variable `i` becomes new variable `map[i]`.
    pub fn embed(&self, target: &Arc<JetSpace>, map: &[usize]) -> Jet<S> {
        assert_eq!(map.len(), self.space.nvars, "variable map length");
        let mut out = vec![S::zero(); target.len()];
        let mut e = vec![0u8; target.nvars];
        let mut overflow = false;
        for (i, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            e.iter_mut().for_each(|x| *x = 0);
            for (k, &x) in self.space.exps(i).iter().enumerate() {
                e[map[k]] += x;
            }
            if target.degree_of(&e) > target.order {
                overflow = true;
                continue;
            }
            out[target.index_of(&e).unwrap()] = v.clone();
        }
        // unknown source terms have degree > rel; their target degree is at least
        // (rel+1)·min(target weight / source weight)
        let (mut a, mut b) = (u32::MAX, 1u32);
        for (k, &t) in map.iter().enumerate() {
            let (wt, ws) = (target.weight(t), self.space.weight(k));
            if (wt as u64) * (b as u64) < (a as u64) * (ws as u64) {
                a = wt;
                b = ws;
            }
        }
        let rel = if self.exact {
            target.order as i64
        } else if a == u32::MAX || a == b {
            (self.rel as i64).min(target.order as i64)
        } else {
            let r1 = self.rel as i64 + 1;
            ((r1 * a as i64 + b as i64 - 1) / b as i64 - 1).min(target.order as i64)
        };
        Jet::finish(target.clone(), out, rel, self.exact && !overflow)
    }

    /// Substitution `x_i ← subs[i]`.
    ///
    /// Exact polynomials may be evaluated at substitutions with arbitrary
    /// constant terms; truncated series require substitutions vanishing at
    /// the base point (otherwise re-centering is impossible).
    pub fn compose(&self, subs: &[Jet<S>]) -> Result<Jet<S>> {
        if subs.len() != self.space.nvars {
            return Err(Error::ShapeMismatch(format!(
                "compose: {} substitutions for {} variables",
                subs.len(),
                self.space.nvars
            )));
        }
        let tsp = match subs.first() {
            Some(s) => s.space.clone(),
            None => return Err(Error::ShapeMismatch("compose: no substitutions".into())),
        };
        for s in subs {
            if !Arc::ptr_eq(&s.space, &tsp) {
                return Err(Error::ShapeMismatch("compose: substitutions live in different spaces".into()));
            }
        }
        if !self.exact && subs.iter().any(|s| !s.constant_term().is_zero()) {
            return Err(Error::InvalidRecentering(
                "truncated series can only be composed with substitutions vanishing at the base point".into(),
            ));
        }
        let mut maxe = vec![0usize; subs.len()];
        for (e, _) in self.terms() {
            for (k, &x) in e.iter().enumerate() {
                maxe[k] = maxe[k].max(x as usize);
            }
        }
        let mut pows: Vec<Vec<Jet<S>>> = Vec::with_capacity(subs.len());
        for (s, &m) in subs.iter().zip(&maxe) {
            let mut p = vec![Jet::one(&tsp)];
            for k in 1..=m {
                let next = p[k - 1].mul_impl(s);
                p.push(next);
            }
            pows.push(p);
        }
        let mut acc = Jet::zero(&tsp);
        for (e, v) in self.terms() {
            let mut t = Jet::constant(&tsp, v.clone());
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    t = t.mul_impl(&pows[k][x as usize]);
                }
            }
            acc = acc.lin_comb(&t, false);
        }
        if !self.exact {
            // unknown terms of degree > rel contribute at degree ≥ (rel+1)·min(val/weight)
            let (mut a, mut b) = (INF, 1i64);
            for (k, s) in subs.iter().enumerate() {
                let v = s.val_eff().max(1);
                let w = self.space.weight(k) as i64;
                if v.saturating_mul(b) < a.saturating_mul(w) {
                    a = v;
                    b = w;
                }
            }
            let r1 = self.rel as i64 + 1;
            let bound = if a >= INF { INF } else { (r1 * a + b - 1) / b - 1 };
            acc = acc.truncated(bound);
        }
        Ok(acc)
    }

    /// Univariate power series `Σ coef[k] x^k` applied to a jet vanishing at the base point.
    pub fn power_series(x: &Jet<S>, coef: &[S]) -> Result<Jet<S>> {
        if !x.constant_term().is_zero() {
            return Err(Error::InvalidRecentering("power series argument must vanish at the base point".into()));
        }
        let sp = &x.space;
        let n = coef.len();
        let mut acc = Jet::zero(sp);
        for k in (0..n).rev() {
            acc = acc.mul_impl(x).add_scalar(&coef[k]);
        }
        // terms beyond the supplied coefficients enter at degree ≥ n·val(x)
        let bound = (n as i64).saturating_mul(x.val_eff().max(1)) - 1;
        Ok(acc.truncated(bound))
    }

    /// Square root with positive constant term. In exact mode the constant
    /// term must be a rational square.
    pub fn sqrt(&self) -> Result<Jet<S>> {
        let c0 = self.constant_term();
        let s0 = c0
            .sqrt()
            .filter(|s| !s.is_zero())
            .ok_or_else(|| Error::Inexact(format!("square root of constant term {c0}")))?;
        let x = self.scale(&c0.recip().unwrap()).add_scalar(&S::one().neg());
        let n = self.space.order as usize + 1;
        // binomial series for (1+x)^{1/2}
        let mut coef = Vec::with_capacity(n);
        let mut b = S::one();
        for k in 0..n {
            coef.push(b.clone());
            // b_{k+1} = b_k (1/2 - k) / (k+1)
            b = b.mul(&S::from_ratio(1 - 2 * k as i64, 2 * (k as i64 + 1)));
        }
        Ok(Jet::power_series(&x, &coef)?.scale(&s0))
    }

    /// Exponential; exact mode requires zero constant term.
    pub fn exp(&self) -> Result<Jet<S>> {
        let c0 = self.constant_term();
        let scale = if c0.is_zero() {
            S::one()
        } else if S::exact() {
            return Err(Error::Inexact("exp of a jet with nonzero constant term".into()));
        } else {
            S::from_f64_approx(c0.to_f64().exp())
        };
        let x = self.add_scalar(&c0.neg());
        let n = self.space.order as usize + 1;
        let mut coef = Vec::with_capacity(n);
        let mut f = S::one();
        for k in 0..n {
            coef.push(f.clone());
            f = f.mul(&S::from_ratio(1, k as i64 + 1));
        }
        Ok(Jet::power_series(&x, &coef)?.scale(&scale))
    }

    /// Natural logarithm; exact mode requires constant term 1.
    pub fn ln(&self) -> Result<Jet<S>> {
        let c0 = self.constant_term();
        if c0.signum() <= 0 {
            return Err(Error::InvalidInput("log of a jet with non-positive constant term".into()));
        }
        let shift = if c0 == S::one() {
            S::zero()
        } else if S::exact() {
            return Err(Error::Inexact("log of a jet with constant term different from 1".into()));
        } else {
            S::from_f64_approx(c0.to_f64().ln())
        };
        let x = self.scale(&c0.recip().unwrap()).add_scalar(&S::one().neg());
        let n = self.space.order as usize + 1;
        let mut coef = vec![S::zero()];
        for k in 1..n {
            let s = if k % 2 == 1 { 1 } else { -1 };
            coef.push(S::from_ratio(s, k as i64));
        }
        Ok(Jet::power_series(&x, &coef)?.add_scalar(&shift))
    }

    /// Value at the base point shifted by `p` for exact polynomials (re-centering).
    pub fn recenter(&self, p: &[S]) -> Result<Jet<S>> {
        if !self.exact {
            return Err(Error::InvalidRecentering("only exact polynomials can be re-centred".into()));
        }
        let subs: Vec<Jet<S>> = (0..self.space.nvars)
            .map(|i| Jet::var(&self.space, i).add_scalar(&p[i]))
            .collect();
        self.compose(&subs)
    }

    /// Converts coefficients to another scalar type.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        Jet::finish(self.space.clone(), self.c.iter().map(f).collect(), self.rel as i64, self.exact)
    }

    /// Highest degree `d` such that `self` and `o` agree on all terms of degree ≤ d
    /// that are reliable in both; `None` if they agree on everything reliable.
    pub fn disagreement_degree(&self, o: &Jet<S>) -> Option<u32> {
        let cap = self.space.count_upto(self.eff_rel().min(o.eff_rel()));
        let n = cap.min(self.c.len().max(o.c.len()));
        let z = S::zero();
        (0..n)
            .find(|&i| self.c.get(i).unwrap_or(&z) != o.c.get(i).unwrap_or(&z))
            .map(|i| self.space.degs[i])
    }

    /// Canonical text form: `(e1,..,en) n/d` per line, lexicographic multi-index order.
    pub fn to_canonical_text(&self) -> String {
        let mut rows: Vec<(Vec<u8>, String)> =
            self.terms().map(|(e, v)| (e.to_vec(), v.to_string())).collect();
        rows.sort();
        let mut s = format!("jet nvars={} order={} reliable={} exact={}", self.space.nvars, self.space.order, self.rel, self.exact);
        if !self.space.is_unweighted() {
            let w: Vec<String> = self.space.weights.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!(" weights={}", w.join(",")));
        }
        s.push('\n');
        for (e, v) in rows {
            let idx: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("({}) {}\n", idx.join(","), v));
        }
        s
    }

    /// Pretty polynomial string using the given variable names.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.c.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, v) in self.terms() {
            let mut mono = Vec::new();
            for (k, &x) in e.iter().enumerate() {
                let nm = names.get(k).map(|s| s.to_string()).unwrap_or(format!("x{k}"));
                match x {
                    0 => {}
                    1 => mono.push(nm),
                    _ => mono.push(format!("{nm}^{x}")),
                }
            }
            if mono.is_empty() {
                parts.push(format!("{v}"));
            } else if *v == S::one() {
                parts.push(mono.join("*"));
            } else {
                parts.push(format!("{v}*{}", mono.join("*")));
            }
        }
        parts.join(" + ")
    }
}

impl<S: Scalar> Jet<S> {
    /// Parses the canonical text form produced by [`Jet::to_canonical_text`].
    pub fn from_canonical_text(text: &str, parse: impl Fn(&str) -> Option<S>) -> Result<Jet<S>> {
        let mut lines = text.lines();
        let head = lines.next().ok_or_else(|| Error::InvalidInput("empty jet text".into()))?;
        let mut nvars = None;
        let mut order = None;
        let mut rel = None;
        let mut exact = None;
        let mut weights: Option<Vec<u8>> = None;
        for tok in head.split_whitespace().skip(1) {
            let (k, v) = tok.split_once('=').ok_or_else(|| Error::InvalidInput(tok.into()))?;
            match k {
                "nvars" => nvars = v.parse::<usize>().ok(),
                "order" => order = v.parse::<u32>().ok(),
                "reliable" => rel = v.parse::<i64>().ok(),
                "exact" => exact = v.parse::<bool>().ok(),
                "weights" => weights = v.split(',').map(|x| x.parse::<u8>().ok()).collect(),
                _ => {}
            }
        }
        let (nvars, order, rel, exact) = match (nvars, order, rel, exact) {
            (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
            _ => return Err(Error::InvalidInput("malformed jet header".into())),
        };
        let weights = weights.unwrap_or_else(|| vec![1; nvars]);
        if weights.len() != nvars || weights.contains(&0) {
            return Err(Error::InvalidInput("malformed jet weights".into()));
        }
        let sp = JetSpace::weighted(&weights, order);
        let mut c = vec![S::zero(); sp.len()];
        for l in lines {
            let l = l.trim();
            if l.is_empty() {
                continue;
            }
            let (idx, val) = l.split_once(')').ok_or_else(|| Error::InvalidInput(l.into()))?;
            let e: Vec<u8> = idx
                .trim_start_matches('(')
                .split(',')
                .map(|x| x.trim().parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidInput(l.into()))?;
            let i = sp.index_of(&e).ok_or_else(|| Error::InvalidInput(l.into()))?;
            c[i] = parse(val.trim()).ok_or_else(|| Error::InvalidInput(l.into()))?;
        }
        Ok(Jet::finish(sp, c, rel, exact))
    }
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, o: &Jet<S>) -> bool {
        Arc::ptr_eq(&self.space, &o.space) && self.c == o.c
    }
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[rel={}{}]({})", self.rel, if self.exact { ",exact" } else { "" }, self.display_with(&[]))
    }
}
impl<S: Scalar> fmt::Display for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

macro_rules! jet_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl<'a, S: Scalar> std::ops::$tr<&'a Jet<S>> for &'a Jet<S> {
            type Output = Jet<S>;
            fn $m(self, o: &Jet<S>) -> Jet<S> {
                self.$imp(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<S: Scalar> std::ops::$tr<Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, o: Jet<S>) -> Jet<S> {
                (&self).$imp(&o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<'a, S: Scalar> std::ops::$tr<&'a Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, o: &Jet<S>) -> Jet<S> {
                (&self).$imp(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}
jet_binop!(Add, add, checked_add);
jet_binop!(Sub, sub, checked_sub);
jet_binop!(Mul, mul, checked_mul);

impl<S: Scalar> std::ops::Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet::neg(self)
    }
}
impl<S: Scalar> std::ops::Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet::neg(&self)
    }
}
