//! Exact arithmetic in the ring Z[1/√2, i].
//!
//! Every element is stored as `(a + bω + cω² + dω³) / √2^k` with
//! `ω = e^{iπ/4}`. The only reduction rule on the numerator is `ω⁴ = −1`,
//! and the denominator exponent `k` is kept minimal, so equal values have
//! equal representations. All coefficient arithmetic is overflow-checked;
//! overflow panics with a diagnostic instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[inline]
fn ck_add(x: i64, y: i64) -> i64 {
    x.checked_add(y)
        .unwrap_or_else(|| overflow("addition", x, y))
}

#[inline]
fn ck_sub(x: i64, y: i64) -> i64 {
    x.checked_sub(y)
        .unwrap_or_else(|| overflow("subtraction", x, y))
}

#[inline]
fn ck_mul(x: i64, y: i64) -> i64 {
    x.checked_mul(y)
        .unwrap_or_else(|| overflow("multiplication", x, y))
}

#[cold]
#[inline(never)]
fn overflow(op: &str, x: i64, y: i64) -> ! {
    panic!("ring coefficient overflow in {op} of {x} and {y}")
}

/// An element of Z[ω]: `a + bω + cω² + dω³`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaInt {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl OmegaInt {
    pub const ZERO: Self = Self::new(0, 0, 0, 0);
    pub const ONE: Self = Self::new(1, 0, 0, 0);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0 && self.d == 0
    }

    /// Multiplies by `ω^k`; a cyclic shift with a sign flip per wrap.
    #[inline]
    pub fn mul_omega(self, k: u8) -> Self {
        let Self { a, b, c, d } = self;
        match k & 7 {
            0 => self,
            1 => Self::new(ck_neg(d), a, b, c),
            2 => Self::new(ck_neg(c), ck_neg(d), a, b),
            3 => Self::new(ck_neg(b), ck_neg(c), ck_neg(d), a),
            4 => Self::new(ck_neg(a), ck_neg(b), ck_neg(c), ck_neg(d)),
            5 => Self::new(d, ck_neg(a), ck_neg(b), ck_neg(c)),
            6 => Self::new(c, d, ck_neg(a), ck_neg(b)),
            _ => Self::new(b, c, d, ck_neg(a)),
        }
    }

    /// Complex conjugate: ω ↦ ω⁷ = −ω³.
    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.a, ck_neg(self.d), ck_neg(self.c), ck_neg(self.b))
    }

    /// Multiplies by √2 = ω − ω³.
    #[inline]
    pub fn mul_sqrt2(self) -> Self {
        let Self { a, b, c, d } = self;
        Self::new(ck_sub(b, d), ck_add(a, c), ck_add(b, d), ck_sub(c, a))
    }

    #[inline]
    pub fn is_sqrt2_divisible(&self) -> bool {
        (self.a ^ self.c) & 1 == 0 && (self.b ^ self.d) & 1 == 0
    }

    /// Exact division by √2; the caller must have checked divisibility.
    #[inline]
    fn div_sqrt2_exact(self) -> Self {
        let Self { a, b, c, d } = self;
        Self::new(
            ck_sub(b, d) / 2,
            ck_add(a, c) / 2,
            ck_add(b, d) / 2,
            ck_sub(c, a) / 2,
        )
    }

    #[inline]
    fn scale(self, k: i64) -> Self {
        Self::new(
            ck_mul(self.a, k),
            ck_mul(self.b, k),
            ck_mul(self.c, k),
            ck_mul(self.d, k),
        )
    }

    /// Multiplies by `√2^e`.
    fn mul_sqrt2_pow(self, e: u32) -> Self {
        let mut x = if e % 2 == 1 { self.mul_sqrt2() } else { self };
        let half = e / 2;
        if half > 0 {
            if half >= 62 {
                overflow("scaling", x.a, 1 << 62);
            }
            x = x.scale(1i64 << half);
        }
        x
    }

    fn checked_mul(self, o: Self) -> Option<Self> {
        let (x0, x1, x2, x3) = (self.a, self.b, self.c, self.d);
        let (y0, y1, y2, y3) = (o.a, o.b, o.c, o.d);
        let m = |p: i64, q: i64| p.checked_mul(q);
        let s = |terms: [Option<i64>; 4], signs: [bool; 4]| -> Option<i64> {
            let mut acc = 0i64;
            for (t, neg) in terms.into_iter().zip(signs) {
                let t = t?;
                acc = if neg { acc.checked_sub(t)? } else { acc.checked_add(t)? };
            }
            Some(acc)
        };
        let a = s(
            [m(x0, y0), m(x1, y3), m(x2, y2), m(x3, y1)],
            [false, true, true, true],
        )?;
        let b = s(
            [m(x0, y1), m(x1, y0), m(x2, y3), m(x3, y2)],
            [false, false, true, true],
        )?;
        let c = s(
            [m(x0, y2), m(x1, y1), m(x2, y0), m(x3, y3)],
            [false, false, false, true],
        )?;
        let d = s(
            [m(x0, y3), m(x1, y2), m(x2, y1), m(x3, y0)],
            [false, false, false, false],
        )?;
        Some(Self::new(a, b, c, d))
    }
}

#[inline]
fn ck_neg(x: i64) -> i64 {
    x.checked_neg()
        .unwrap_or_else(|| overflow("negation", x, 0))
}

impl Add for OmegaInt {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(
            ck_add(self.a, o.a),
            ck_add(self.b, o.b),
            ck_add(self.c, o.c),
            ck_add(self.d, o.d),
        )
    }
}

impl Sub for OmegaInt {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(
            ck_sub(self.a, o.a),
            ck_sub(self.b, o.b),
            ck_sub(self.c, o.c),
            ck_sub(self.d, o.d),
        )
    }
}

impl Neg for OmegaInt {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.mul_omega(4)
    }
}

impl Mul for OmegaInt {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        self.checked_mul(o)
            .unwrap_or_else(|| overflow("multiplication", self.a, o.a))
    }
}

/// An element of Z[1/√2, i], `num / √2^sde`, always normalized.
///
/// Field order matters: the derived `Ord` is the total order on
/// `(sde, a, b, c, d)` used for lexicographic matrix comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingScalar {
    sde: u32,
    num: OmegaInt,
}

impl RingScalar {
    pub const ZERO: Self = Self { sde: 0, num: OmegaInt::ZERO };
    pub const ONE: Self = Self { sde: 0, num: OmegaInt::ONE };
    /// 1/√2
    pub const INV_SQRT2: Self = Self { sde: 1, num: OmegaInt::ONE };

    /// Builds `num / √2^sde` and normalizes it.
    pub fn new(num: OmegaInt, sde: u32) -> Self {
        Self { sde, num }.normalized()
    }

    pub fn from_parts(a: i64, b: i64, c: i64, d: i64, sde: u32) -> Self {
        Self::new(OmegaInt::new(a, b, c, d), sde)
    }

    pub fn from_int(a: i64) -> Self {
        Self::new(OmegaInt::new(a, 0, 0, 0), 0)
    }

    /// `ω^k`
    pub fn omega_pow(k: u8) -> Self {
        Self { sde: 0, num: OmegaInt::ONE.mul_omega(k) }
    }

    #[inline]
    pub fn num(&self) -> OmegaInt {
        self.num
    }

    #[inline]
    pub fn sde(&self) -> u32 {
        self.sde
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Strips factors of √2 from the numerator while the denominator allows.
    #[inline]
    pub fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            return Self::ZERO;
        }
        while self.sde > 0 && self.num.is_sqrt2_divisible() {
            self.num = self.num.div_sqrt2_exact();
            self.sde -= 1;
        }
        self
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self { sde: self.sde, num: self.num.conj() }
    }

    #[inline]
    pub fn mul_omega(self, k: u8) -> Self {
        Self { sde: self.sde, num: self.num.mul_omega(k) }
    }

    /// `(self + other) / √2`, the Hadamard butterfly.
    #[inline]
    pub fn add_div_sqrt2(self, other: Self) -> Self {
        let mut s = self + other;
        if !s.is_zero() {
            s.sde += 1;
            s = s.normalized();
        }
        s
    }

    /// `(self - other) / √2`
    #[inline]
    pub fn sub_div_sqrt2(self, other: Self) -> Self {
        let mut s = self - other;
        if !s.is_zero() {
            s.sde += 1;
            s = s.normalized();
        }
        s
    }

    pub fn checked_mul(self, o: Self) -> Option<Self> {
        let num = self.num.checked_mul(o.num)?;
        let sde = self.sde.checked_add(o.sde)?;
        Some(Self { sde, num }.normalized())
    }

    /// Numeric image as `(re, im)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let OmegaInt { a, b, c, d } = self.num;
        let re = a as f64 + (b - d) as f64 * h;
        let im = c as f64 + (b + d) as f64 * h;
        let s = 2f64.powf(-(self.sde as f64) / 2.0);
        (re * s, im * s)
    }

    /// If `self == ω^k · other` for some `k`, returns that `k`.
    pub fn phase_relative_to(&self, other: &Self) -> Option<u8> {
        (0..8).find(|&k| other.mul_omega(k) == *self)
    }

    /// JSON text form `[a, b, c, d, k]`.
    pub fn to_array(&self) -> [i64; 5] {
        let OmegaInt { a, b, c, d } = self.num;
        [a, b, c, d, self.sde as i64]
    }

    pub fn from_array(v: [i64; 5]) -> Option<Self> {
        let sde = u32::try_from(v[4]).ok()?;
        Some(Self::from_parts(v[0], v[1], v[2], v[3], sde))
    }
}

impl Add for RingScalar {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        if o.is_zero() {
            return self;
        }
        if self.is_zero() {
            return o;
        }
        let (num, sde) = match self.sde.cmp(&o.sde) {
            Ordering::Equal => (self.num + o.num, self.sde),
            Ordering::Less => (self.num.mul_sqrt2_pow(o.sde - self.sde) + o.num, o.sde),
            Ordering::Greater => (self.num + o.num.mul_sqrt2_pow(self.sde - o.sde), self.sde),
        };
        Self { sde, num }.normalized()
    }
}

impl Sub for RingScalar {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for RingScalar {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { sde: self.sde, num: -self.num }
    }
}

impl Mul for RingScalar {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::ZERO;
        }
        Self { sde: self.sde + o.sde, num: self.num * o.num }.normalized()
    }
}

impl fmt::Display for RingScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let OmegaInt { a, b, c, d } = self.num;
        write!(f, "({a},{b},{c},{d})/√2^{}", self.sde)
    }
}

impl Serialize for RingScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <[i64; 5]>::deserialize(d)?;
        Self::from_array(v).ok_or_else(|| serde::de::Error::custom("negative denominator exponent"))
    }
}
