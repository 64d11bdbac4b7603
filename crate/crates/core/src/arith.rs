//! Exact arithmetic in ℚ(ω) for a real quadratic irrational rotation number ω.
//!
//! Values are stored as `(a + b·ω)/d`. The value type carries no reference to
//! ω; anything that needs the real value (ordering, floor, products) goes
//! through a [`Rotation`], which is `Copy` and cheap to pass around.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ω = (p + q·√D)/r, normalized so that 0 < ω < 1/2 and r > 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RotationSpec", into = "RotationSpec")]
pub struct Rotation {
    d: i128,
    p: i128,
    q: i128,
    r: i128,
}

/// Wire form of a rotation number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSpec {
    #[serde(rename = "D")]
    pub d: i64,
    pub p: i64,
    pub q: i64,
    pub r: i64,
}

impl TryFrom<RotationSpec> for Rotation {
    type Error = Error;
    fn try_from(s: RotationSpec) -> Result<Self> {
        Rotation::new(s.d, s.p, s.q, s.r)
    }
}

impl From<Rotation> for RotationSpec {
    fn from(w: Rotation) -> Self {
        RotationSpec {
            d: w.d as i64,
            p: w.p as i64,
            q: w.q as i64,
            r: w.r as i64,
        }
    }
}

fn isqrt_i128(n: i128) -> i128 {
    if n < 2 {
        return n.max(0);
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn is_square_free(n: i128) -> bool {
    let mut k = 2i128;
    while k * k <= n {
        if n % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Sign of x + y·√D, exact.
fn sign_quad(x: i128, y: i128, d: i128) -> Ordering {
    let sx = x.cmp(&0);
    let sy = y.cmp(&0);
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    // opposite signs: compare x² with y²·D
    let lhs = x.checked_mul(x);
    let rhs = y.checked_mul(y).and_then(|v| v.checked_mul(d));
    let c = match (lhs, rhs) {
        (Some(l), Some(r)) => l.cmp(&r),
        _ => {
            let (bx, by) = (BigInt::from(x), BigInt::from(y));
            (&bx * &bx).cmp(&(&by * &by * BigInt::from(d)))
        }
    };
    if sx == Ordering::Greater {
        c
    } else {
        c.reverse()
    }
}

fn sign_quad_big(x: &BigInt, y: &BigInt, d: i128) -> Ordering {
    let sx = x.sign();
    let sy = y.sign();
    use num_bigint::Sign::*;
    let to_ord = |s| match s {
        Minus => Ordering::Less,
        NoSign => Ordering::Equal,
        Plus => Ordering::Greater,
    };
    if sy == NoSign {
        return to_ord(sx);
    }
    if sx == NoSign || sx == sy {
        return to_ord(sy);
    }
    let c = (x * x).cmp(&(y * y * BigInt::from(d)));
    if sx == Plus {
        c
    } else {
        c.reverse()
    }
}

impl Rotation {
    /// Builds ω = (p + q√D)/r, reduced mod 1 and reflected into (0, 1/2).
    pub fn new(d: i64, p: i64, q: i64, r: i64) -> Result<Self> {
        if r == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (d, mut p, mut q, mut r) = (d as i128, p as i128, q as i128, r as i128);
        if d < 0 {
            return Err(Error::Precondition(format!("D = {d} must be positive")));
        }
        let s = isqrt_i128(d);
        if q == 0 || s * s == d {
            return Err(Error::RationalRotation);
        }
        if !is_square_free(d) {
            return Err(Error::Precondition(format!("D = {d} is not square-free")));
        }
        if r < 0 {
            p = -p;
            q = -q;
            r = -r;
        }
        let mut w = Rotation { d, p, q, r };
        let f = w.floor_raw(p, q, r);
        p -= f * r;
        w.p = p;
        // reflect if ω > 1/2
        if sign_quad(2 * p - r, 2 * q, d) == Ordering::Greater {
            p = r - p;
            q = -q;
        }
        let g = p.gcd(&q).gcd(&r);
        w.p = p / g;
        w.q = q / g;
        w.r = r / g;
        Ok(w)
    }

    /// ω = √2 − 1, the running example.
    pub fn silver() -> Self {
        Rotation::new(2, -1, 1, 1).expect("valid rotation")
    }

    pub fn spec(&self) -> RotationSpec {
        (*self).into()
    }

    pub fn d(&self) -> i128 {
        self.d
    }

    // floor((x + y√D)/r) for r > 0
    fn floor_raw(&self, x: i128, y: i128, r: i128) -> i128 {
        let est = (x as f64 + y as f64 * (self.d as f64).sqrt()) / r as f64;
        let mut k = est.floor() as i128;
        while sign_quad(x - k * r, y, self.d) == Ordering::Less {
            k -= 1;
        }
        while sign_quad(x - (k + 1) * r, y, self.d) != Ordering::Less {
            k += 1;
        }
        k
    }

    pub fn omega_f64(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.d as f64).sqrt()) / self.r as f64
    }

    /// ω as an element of the ring (trivially (0,1)).
    pub fn omega(&self) -> OrbitNumber {
        OrbitNumber::new(0, 1)
    }

    /// √D expressed in the basis {1, ω}.
    pub fn sqrt_d(&self) -> OrbitNumber {
        // √D = (rω − p)/q
        OrbitNumber::ratio(-self.p, self.r, self.q)
    }

    /// Sign of a value.
    pub fn sign(&self, x: &OrbitNumber) -> Ordering {
        // value·r·d = (a·r + b·p) + b·q·√D
        let xa = x.a.checked_mul(self.r);
        let xb = x.b.checked_mul(self.p);
        let y = x.b.checked_mul(self.q);
        if let (Some(xa), Some(xb), Some(y)) = (xa, xb, y) {
            if let Some(xx) = xa.checked_add(xb) {
                return sign_quad(xx, y, self.d);
            }
        }
        let xx = BigInt::from(x.a) * self.r + BigInt::from(x.b) * self.p;
        let y = BigInt::from(x.b) * self.q;
        sign_quad_big(&xx, &y, self.d)
    }

    pub fn cmp(&self, x: &OrbitNumber, y: &OrbitNumber) -> Ordering {
        if x == y {
            return Ordering::Equal;
        }
        self.sign(&(*x - *y))
    }

    pub fn lt(&self, x: &OrbitNumber, y: &OrbitNumber) -> bool {
        self.cmp(x, y) == Ordering::Less
    }

    pub fn le(&self, x: &OrbitNumber, y: &OrbitNumber) -> bool {
        self.cmp(x, y) != Ordering::Greater
    }

    pub fn min(&self, x: OrbitNumber, y: OrbitNumber) -> OrbitNumber {
        if self.le(&x, &y) {
            x
        } else {
            y
        }
    }

    pub fn max(&self, x: OrbitNumber, y: OrbitNumber) -> OrbitNumber {
        if self.le(&x, &y) {
            y
        } else {
            x
        }
    }

    pub fn abs(&self, x: OrbitNumber) -> OrbitNumber {
        if self.sign(&x) == Ordering::Less {
            -x
        } else {
            x
        }
    }

    /// Real value; cancellation-free when the two quadratic parts nearly cancel.
    pub fn to_f64(&self, x: &OrbitNumber) -> f64 {
        let xx = BigInt::from(x.a) * self.r + BigInt::from(x.b) * self.p;
        let y = BigInt::from(x.b) * self.q;
        let den = (self.r as f64) * (x.d as f64);
        let sd = (self.d as f64).sqrt();
        let fx = xx.to_f64().unwrap_or(f64::NAN);
        let fy = y.to_f64().unwrap_or(f64::NAN);
        if xx.is_zero() || y.is_zero() || xx.sign() == y.sign() {
            return (fx + fy * sd) / den;
        }
        let num = &xx * &xx - &y * &y * BigInt::from(self.d);
        num.to_f64().unwrap_or(f64::NAN) / (fx - fy * sd) / den
    }

    /// ⌊x⌋, exact.
    pub fn floor(&self, x: &OrbitNumber) -> i128 {
        let est = self.to_f64(x);
        let mut k = if est.is_finite() { est.floor() as i128 } else { 0 };
        while self.sign(&(*x - OrbitNumber::int(k))) == Ordering::Less {
            k -= 1;
        }
        while self.sign(&(*x - OrbitNumber::int(k + 1))) != Ordering::Less {
            k += 1;
        }
        k
    }

    /// Representative in [0, 1).
    pub fn frac(&self, x: &OrbitNumber) -> OrbitNumber {
        *x - OrbitNumber::int(self.floor(x))
    }

    /// {kω} = (−⌊kω⌋, k).
    pub fn orbit_point(&self, k: i128) -> OrbitNumber {
        let x = OrbitNumber::new(0, k);
        self.frac(&x)
    }

    /// Distance to the nearest integer, ‖x‖.
    pub fn norm(&self, x: &OrbitNumber) -> OrbitNumber {
        let f = self.frac(x);
        let g = OrbitNumber::int(1) - f;
        self.min(f, g)
    }

    pub fn mul(&self, x: &OrbitNumber, y: &OrbitNumber) -> OrbitNumber {
        // ω² = (2p/r)·ω − (p² − q²D)/r²
        let big = |v: i128| BigInt::from(v);
        let (p, q, r, d) = (big(self.p), big(self.q), big(self.r), big(self.d));
        let c0 = &p * &p - &q * &q * &d;
        let aa = big(x.a) * big(y.a);
        let bb = big(x.a) * big(y.b) + big(y.a) * big(x.b);
        let cc = big(x.b) * big(y.b);
        let r2 = &r * &r;
        let na = &aa * &r2 - &cc * &c0;
        let nb = &bb * &r2 + &cc * 2 * &p * &r;
        let nd = big(x.d) * big(y.d) * &r2;
        OrbitNumber::from_big(na, nb, nd)
    }

    pub fn div(&self, x: &OrbitNumber, y: &OrbitNumber) -> OrbitNumber {
        assert!(!y.is_zero(), "division by zero in ℚ(ω)");
        let big = |v: i128| BigInt::from(v);
        let (p, q, r, d) = (big(self.p), big(self.q), big(self.r), big(self.d));
        let (c, e) = (big(y.a), big(y.b));
        // conjugate of c + eω is ((c·r + 2e·p) − e·r·ω)/r
        let conj = OrbitNumber::from_big(&c * &r + &e * &p * 2, -(&e * &r), r.clone());
        let norm_num = &c * &c * &r * &r + &c * &e * &p * &r * 2 + &e * &e * (&p * &p - &q * &q * &d);
        let z = self.mul(x, &conj);
        // x/y = z · y.d · r² / norm_num
        let scale_num = big(y.d) * &r * &r;
        OrbitNumber::from_big(
            big(z.a) * &scale_num,
            big(z.b) * &scale_num,
            big(z.d) * norm_num,
        )
    }
}

/// Exact element (a + b·ω)/d of ℚ(ω); d > 0 and gcd(a, b, d) = 1.
///
/// Construction endpoints all have d = 1, i.e. live in ℤ + ℤω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OrbitRepr", into = "OrbitRepr")]
pub struct OrbitNumber {
    a: i128,
    b: i128,
    d: i128,
}

#[derive(Serialize, Deserialize)]
struct OrbitRepr {
    a: i128,
    b: i128,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    d: i128,
}

fn one() -> i128 {
    1
}

fn is_one(d: &i128) -> bool {
    *d == 1
}

impl TryFrom<OrbitRepr> for OrbitNumber {
    type Error = Error;
    fn try_from(r: OrbitRepr) -> Result<Self> {
        if r.d == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(OrbitNumber::ratio(r.a, r.b, r.d))
    }
}

impl From<OrbitNumber> for OrbitRepr {
    fn from(x: OrbitNumber) -> Self {
        OrbitRepr { a: x.a, b: x.b, d: x.d }
    }
}

impl OrbitNumber {
    pub const ZERO: OrbitNumber = OrbitNumber { a: 0, b: 0, d: 1 };
    pub const ONE: OrbitNumber = OrbitNumber { a: 1, b: 0, d: 1 };

    pub const fn new(a: i128, b: i128) -> Self {
        OrbitNumber { a, b, d: 1 }
    }

    pub const fn int(a: i128) -> Self {
        OrbitNumber { a, b: 0, d: 1 }
    }

    /// (a + bω)/d, reduced.
    pub fn ratio(a: i128, b: i128, d: i128) -> Self {
        assert!(d != 0, "zero denominator");
        let (mut a, mut b, mut d) = (a, b, d);
        if d < 0 {
            a = -a;
            b = -b;
            d = -d;
        }
        let g = a.gcd(&b).gcd(&d);
        OrbitNumber {
            a: a / g,
            b: b / g,
            d: d / g,
        }
    }

    /// Rational n/m.
    pub fn rational(n: i128, m: i128) -> Self {
        OrbitNumber::ratio(n, 0, m)
    }

    fn from_big(a: BigInt, b: BigInt, d: BigInt) -> Self {
        let (mut a, mut b, mut d) = (a, b, d);
        if d.is_negative() {
            a = -a;
            b = -b;
            d = -d;
        }
        let g = a.gcd(&b).gcd(&d);
        let fit = |v: BigInt| v.to_i128().expect("ℚ(ω) coefficient overflow");
        OrbitNumber {
            a: fit(a / &g),
            b: fit(b / &g),
            d: fit(d / &g),
        }
    }

    pub fn a(&self) -> i128 {
        self.a
    }

    pub fn b(&self) -> i128 {
        self.b
    }

    pub fn den(&self) -> i128 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// True for elements of ℤ + ℤω (orbit points of 0 and their integer lifts).
    pub fn is_integral(&self) -> bool {
        self.d == 1
    }

    /// Multiply by the rational n/m.
    pub fn scale(&self, n: i128, m: i128) -> Self {
        assert!(m != 0, "zero denominator");
        let g1 = n.gcd(&self.d).max(1);
        let (n1, d1) = (n / g1, self.d / g1);
        let a = self.a.checked_mul(n1).expect("ℚ(ω) coefficient overflow");
        let b = self.b.checked_mul(n1).expect("ℚ(ω) coefficient overflow");
        let d = d1.checked_mul(m).expect("ℚ(ω) coefficient overflow");
        OrbitNumber::ratio(a, b, d)
    }

    pub fn half(&self) -> Self {
        self.scale(1, 2)
    }
}

impl Default for OrbitNumber {
    fn default() -> Self {
        OrbitNumber::ZERO
    }
}

impl Add for OrbitNumber {
    type Output = OrbitNumber;
    fn add(self, o: OrbitNumber) -> OrbitNumber {
        if self.d == 1 && o.d == 1 {
            return OrbitNumber {
                a: self.a.checked_add(o.a).expect("ℚ(ω) coefficient overflow"),
                b: self.b.checked_add(o.b).expect("ℚ(ω) coefficient overflow"),
                d: 1,
            };
        }
        let l = self.d.lcm(&o.d);
        let (m1, m2) = (l / self.d, l / o.d);
        let c = |x: i128, m: i128| x.checked_mul(m).expect("ℚ(ω) coefficient overflow");
        OrbitNumber::ratio(
            c(self.a, m1).checked_add(c(o.a, m2)).expect("ℚ(ω) coefficient overflow"),
            c(self.b, m1).checked_add(c(o.b, m2)).expect("ℚ(ω) coefficient overflow"),
            l,
        )
    }
}

impl Neg for OrbitNumber {
    type Output = OrbitNumber;
    fn neg(self) -> OrbitNumber {
        OrbitNumber {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Sub for OrbitNumber {
    type Output = OrbitNumber;
    fn sub(self, o: OrbitNumber) -> OrbitNumber {
        self + (-o)
    }
}

impl fmt::Display for OrbitNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 1 {
            write!(f, "{}{:+}ω", self.a, self.b)
        } else {
            write!(f, "({}{:+}ω)/{}", self.a, self.b, self.d)
        }
    }
}

/// Parses "n" or "n/m" into a rational OrbitNumber.
pub fn parse_rational(s: &str) -> Result<OrbitNumber> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, m) = match s.split_once('/') {
        Some((n, m)) => (n.trim().parse::<i128>().map_err(|_| bad())?, m.trim().parse::<i128>().map_err(|_| bad())?),
        None => (s.trim().parse::<i128>().map_err(|_| bad())?, 1),
    };
    if m == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(OrbitNumber::rational(n, m))
}
