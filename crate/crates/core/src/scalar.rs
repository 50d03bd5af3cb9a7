//! Scalar coefficient types: exact rationals (`Q`) and `f64`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Coefficient field used by jets, tensors and linear algebra.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `n / d`; panics if `d == 0`.
    fn from_ratio(n: i64, d: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn recip(&self) -> Option<Self>;
    /// Exact square root when one exists in the field.
    fn sqrt(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// Sign (-1, 0, 1); for floats this is the exact IEEE sign.
    fn signum(&self) -> i32;
    /// True when the type performs exact arithmetic.
    fn exact() -> bool;
    /// Nearest representable value to a float (exact for dyadic inputs).
    fn from_f64_approx(v: f64) -> Self;
    /// Zero test with a tolerance (ignored in exact mode).
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::exact() {
            self.is_zero()
        } else {
            self.to_f64().abs() <= tol
        }
    }
    fn add_assign(&mut self, o: &Self) {
        *self = Scalar::add(self, o);
    }
    /// `self += a * b`.
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        let p = Scalar::mul(a, b);
        Scalar::add_assign(self, &p);
    }
    fn div(&self, o: &Self) -> Option<Self> {
        o.recip().map(|r| Scalar::mul(self, &r))
    }
    fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = Scalar::mul(&acc, self);
        }
        acc
    }
}

/// Exact rational number with a machine-word fast path.
///
/// Canonical form: `Small(n, d)` with `d > 0` and `gcd(n, d) = 1` whenever the
/// reduced value fits in `i64`; otherwise `Big`. Equality is structural.
#[derive(Clone)]
pub enum Q {
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl Q {
    pub fn new(n: i64, d: i64) -> Q {
        assert!(d != 0, "zero denominator");
        Q::from_i128(n as i128, d as i128)
    }

    pub fn from_big(r: BigRational) -> Q {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Q::Small(n, d);
        }
        Q::Big(Box::new(r))
    }

    fn from_i128(n: i128, d: i128) -> Q {
        let (mut n, mut d) = (n, d);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Q::Small(a, b),
            _ => Q::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Q::Small(n, _) => BigInt::from(*n),
            Q::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Q::Small(_, d) => BigInt::from(*d),
            Q::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(_, d) => *d == 1,
            Q::Big(b) => b.is_integer(),
        }
    }

    /// Parses `a`, `-a`, `a/b`.
    pub fn parse(s: &str) -> Option<Q> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::from_big(BigRational::new(n, d)))
    }

    pub fn abs(&self) -> Q {
        if self.signum() < 0 {
            Scalar::neg(self)
        } else {
            self.clone()
        }
    }
}

fn isqrt_big(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

impl PartialEq for Q {
    fn eq(&self, o: &Q) -> bool {
        match (self, o) {
            (Q::Small(a, b), Q::Small(c, d)) => a == c && b == d,
            (Q::Big(x), Q::Big(y)) => x == y,
            _ => false,
        }
    }
}
impl Eq for Q {}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        match (self, o) {
            (Q::Small(a, b), Q::Small(c, d)) => ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128))),
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(n, 1) => write!(f, "{n}"),
            Q::Small(n, d) => write!(f, "{n}/{d}"),
            Q::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}
impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::hash::Hash for Q {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.to_string().hash(h)
    }
}

impl Scalar for Q {
    #[inline]
    fn zero() -> Q {
        Q::Small(0, 1)
    }
    #[inline]
    fn one() -> Q {
        Q::Small(1, 1)
    }
    fn from_i64(v: i64) -> Q {
        Q::Small(v, 1)
    }
    fn from_ratio(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }
    #[inline]
    fn is_zero(&self) -> bool {
        matches!(self, Q::Small(0, _))
    }
    #[inline]
    fn add(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(a, 1), Q::Small(c, 1)) => match a.checked_add(*c) {
                Some(s) => Q::Small(s, 1),
                None => Q::from_i128(*a as i128 + *c as i128, 1),
            },
            (Q::Small(a, b), Q::Small(c, d)) => {
                if b == d {
                    Q::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    Q::from_i128(
                        (*a as i128) * (*d as i128) + (*c as i128) * (*b as i128),
                        (*b as i128) * (*d as i128),
                    )
                }
            }
            _ => Q::from_big(self.to_big() + o.to_big()),
        }
    }
    fn sub(&self, o: &Q) -> Q {
        Scalar::add(self, &Scalar::neg(o))
    }
    #[inline]
    fn mul(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(0, _), _) | (_, Q::Small(0, _)) => Q::zero(),
            (Q::Small(a, 1), Q::Small(c, 1)) => match a.checked_mul(*c) {
                Some(p) => Q::Small(p, 1),
                None => Q::from_i128(*a as i128 * *c as i128, 1),
            },
            (Q::Small(a, b), Q::Small(c, d)) => {
                let g1 = a.gcd(d);
                let g2 = c.gcd(b);
                let n = (*a / g1) as i128 * (*c / g2) as i128;
                let m = (*b / g2) as i128 * (*d / g1) as i128;
                match (i64::try_from(n), i64::try_from(m)) {
                    (Ok(x), Ok(y)) => Q::Small(x, y),
                    _ => Q::from_i128(n, m),
                }
            }
            _ => Q::from_big(self.to_big() * o.to_big()),
        }
    }
    fn neg(&self) -> Q {
        match self {
            Q::Small(n, d) => match n.checked_neg() {
                Some(m) => Q::Small(m, *d),
                None => Q::from_i128(-(*n as i128), *d as i128),
            },
            Q::Big(b) => Q::from_big(-(**b).clone()),
        }
    }
    fn recip(&self) -> Option<Q> {
        match self {
            Q::Small(0, _) => None,
            Q::Small(n, d) => Some(Q::from_i128(*d as i128, *n as i128)),
            Q::Big(b) => Some(Q::from_big(b.recip())),
        }
    }
    fn sqrt(&self) -> Option<Q> {
        if self.signum() < 0 {
            return None;
        }
        let n = isqrt_big(&self.numer())?;
        let d = isqrt_big(&self.denom())?;
        Some(Q::from_big(BigRational::new(n, d)))
    }
    fn to_f64(&self) -> f64 {
        match self {
            Q::Small(n, d) => *n as f64 / *d as f64,
            Q::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }
    fn signum(&self) -> i32 {
        match self {
            Q::Small(n, _) => n.signum() as i32,
            Q::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }
    fn exact() -> bool {
        true
    }
    fn from_f64_approx(v: f64) -> Q {
        BigRational::from_float(v).map(Q::from_big).unwrap_or_else(Q::zero)
    }
    #[inline]
    fn add_assign(&mut self, o: &Q) {
        if let (Q::Small(a, 1), Q::Small(c, 1)) = (&*self, o) {
            if let Some(s) = a.checked_add(*c) {
                *self = Q::Small(s, 1);
                return;
            }
        }
        *self = Scalar::add(self, o);
    }
    #[inline]
    fn add_mul_assign(&mut self, a: &Q, b: &Q) {
        if let (Q::Small(x, 1), Q::Small(y, 1), Q::Small(z, 1)) = (&*self, a, b) {
            if let Some(p) = y.checked_mul(*z) {
                if let Some(s) = x.checked_add(p) {
                    *self = Q::Small(s, 1);
                    return;
                }
            }
        }
        let p = Scalar::mul(a, b);
        Scalar::add_assign(self, &p);
    }
}

macro_rules! q_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr for Q {
            type Output = Q;
            fn $m(self, o: Q) -> Q {
                <Q as Scalar>::$f(&self, &o)
            }
        }
        impl<'a> std::ops::$tr<&'a Q> for &'a Q {
            type Output = Q;
            fn $m(self, o: &Q) -> Q {
                <Q as Scalar>::$f(self, o)
            }
        }
    };
}
q_binop!(Add, add, add);
q_binop!(Sub, sub, sub);
q_binop!(Mul, mul, mul);

impl std::ops::Div for Q {
    type Output = Q;
    fn div(self, o: Q) -> Q {
        Scalar::div(&self, &o).expect("division by zero")
    }
}
impl std::ops::Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Scalar::neg(&self)
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Q {
        Q::Small(v, 1)
    }
}

/// Shorthand constructor `q(n, d)`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

impl Scalar for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    fn from_i64(v: i64) -> f64 {
        v as f64
    }
    fn from_ratio(n: i64, d: i64) -> f64 {
        assert!(d != 0, "zero denominator");
        n as f64 / d as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn recip(&self) -> Option<f64> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn sqrt(&self) -> Option<f64> {
        if *self < 0.0 {
            None
        } else {
            Some(f64::sqrt(*self))
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn signum(&self) -> i32 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn exact() -> bool {
        false
    }
    fn from_f64_approx(v: f64) -> f64 {
        v
    }
}

/// Elements `a + b√3` of the quadratic field ℚ(√3).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QSqrt3 {
    pub a: Q,
    pub b: Q,
}

impl QSqrt3 {
    pub fn new(a: Q, b: Q) -> Self {
        QSqrt3 { a, b }
    }
    pub fn sqrt3() -> Self {
        QSqrt3 { a: Q::zero(), b: Q::one() }
    }
    pub fn rational(a: Q) -> Self {
        QSqrt3 { a, b: Q::zero() }
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt3", self.a, self.b)
        }
    }
}

impl Scalar for QSqrt3 {
    fn zero() -> Self {
        QSqrt3::rational(Q::zero())
    }
    fn one() -> Self {
        QSqrt3::rational(Q::one())
    }
    fn from_i64(v: i64) -> Self {
        QSqrt3::rational(Q::from(v))
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        QSqrt3::rational(q(n, d))
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        QSqrt3::new(&self.a + &o.a, &self.b + &o.b)
    }
    fn sub(&self, o: &Self) -> Self {
        QSqrt3::new(&self.a - &o.a, &self.b - &o.b)
    }
    fn mul(&self, o: &Self) -> Self {
        let three = Q::from(3);
        QSqrt3::new(
            &(&self.a * &o.a) + &(&three * &(&self.b * &o.b)),
            &(&self.a * &o.b) + &(&self.b * &o.a),
        )
    }
    fn neg(&self) -> Self {
        QSqrt3::new(-self.a.clone(), -self.b.clone())
    }
    fn recip(&self) -> Option<Self> {
        let norm = &(&self.a * &self.a) - &(&Q::from(3) * &(&self.b * &self.b));
        let inv = Scalar::recip(&norm)?;
        Some(QSqrt3::new(&self.a * &inv, -(&self.b * &inv)))
    }
    fn sqrt(&self) -> Option<Self> {
        if self.b.is_zero() {
            Scalar::sqrt(&self.a).map(QSqrt3::rational)
        } else {
            None
        }
    }
    fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * 3f64.sqrt()
    }
    fn signum(&self) -> i32 {
        // sign of a + b√3 decided exactly by comparing a² with 3b²
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2 = &Q::from(3) * &(&self.b * &self.b);
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }
    fn exact() -> bool {
        true
    }
    fn from_f64_approx(v: f64) -> Self {
        QSqrt3::rational(Q::from_f64_approx(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_and_big_paths_agree() {
        let a = Q::new(i64::MAX, 3);
        let b = Q::new(7, 5);
        let big = a.to_big() * b.to_big() + a.to_big();
        let r = Scalar::add(&Scalar::mul(&a, &b), &a);
        assert_eq!(r.to_big(), big);
        let back = Scalar::sub(&r, &a);
        assert_eq!(back, Scalar::mul(&a, &b));
        let s = Scalar::sub(&Scalar::add(&r, &Q::one()), &r);
        assert_eq!(s, Q::one());
        assert!(matches!(s, Q::Small(1, 1)));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(Q::parse("6/4").unwrap(), q(3, 2));
        assert_eq!(Q::parse("-3").unwrap().to_string(), "-3");
        assert_eq!(q(-3, 6).to_string(), "-1/2");
        assert!(Q::parse("1/0").is_none());
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(Scalar::sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(Scalar::sqrt(&q(2, 1)), None);
    }

    #[test]
    fn sqrt3_field() {
        let s = QSqrt3::sqrt3();
        assert_eq!(Scalar::mul(&s, &s), QSqrt3::from_i64(3));
        let x = QSqrt3::new(q(1, 1), q(1, 1));
        let y = x.recip().unwrap();
        assert_eq!(Scalar::mul(&x, &y), QSqrt3::one());
        assert_eq!(QSqrt3::new(q(-2, 1), q(1, 1)).signum(), -1);
        assert_eq!(QSqrt3::new(q(-1, 1), q(1, 1)).signum(), 1);
    }
}
