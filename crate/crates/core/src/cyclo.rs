//! Exact arithmetic in the cyclotomic field Q(ζ₂₄).
//!
//! Elements are stored over the power basis 1, ζ, …, ζ⁷ of Q[x]/(x⁸ − x⁴ + 1)
//! with a single positive common denominator. Small values live in machine
//! integers; anything that would overflow is promoted to `BigInt`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Degree of the field over Q.
pub const DEG: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("ζ ↦ ζ^{0} is not an automorphism (exponent must be a unit mod 24)")]
    InvalidAutomorphism(i64),
    #[error("cannot parse cyclotomic number from {0:?}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: [i64; DEG], den: i64 },
    Big { num: Box<[BigInt; DEG]>, den: BigInt },
}

/// An element of Q(ζ₂₄). Canonical: equal values have equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum(Repr);

/// ζ^k for k in 0..24 as integer vectors over the power basis.
fn zeta_pow_table() -> &'static [[i64; DEG]; 24] {
    static TABLE: std::sync::OnceLock<[[i64; DEG]; 24]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0i64; DEG]; 24];
        let mut cur = [0i64; DEG];
        cur[0] = 1;
        for row in t.iter_mut() {
            *row = cur;
            // multiply by x and reduce x^8 = x^4 - 1
            let top = cur[DEG - 1];
            let mut next = [0i64; DEG];
            next[1..DEG].copy_from_slice(&cur[..(DEG - 1)]);
            next[4] += top;
            next[0] -= top;
            cur = next;
        }
        t
    })
}

fn normalize_i128(num: [i128; DEG], den: i128) -> CycNum {
    debug_assert!(den != 0);
    let mut g = den.abs();
    for n in &num {
        if g == 1 {
            break;
        }
        g = g.gcd(n);
    }
    if den < 0 {
        g = -g;
    }
    let mut out = [0i64; DEG];
    let mut fits = true;
    for (o, n) in out.iter_mut().zip(num.iter()) {
        match i64::try_from(n / g) {
            Ok(v) => *o = v,
            Err(_) => fits = false,
        }
    }
    let d = den / g;
    if fits {
        if let Ok(d) = i64::try_from(d) {
            if num.iter().all(|n| *n == 0) {
                return CycNum::zero();
            }
            return CycNum(Repr::Small { num: out, den: d });
        }
    }
    let bn: [BigInt; DEG] = std::array::from_fn(|k| BigInt::from(num[k] / g));
    CycNum(Repr::Big { num: Box::new(bn), den: BigInt::from(d) })
}

fn normalize_big(num: [BigInt; DEG], den: BigInt) -> CycNum {
    debug_assert!(!den.is_zero());
    if num.iter().all(|n| n.is_zero()) {
        return CycNum::zero();
    }
    let mut g = den.abs();
    for n in &num {
        if g.is_one() {
            break;
        }
        g = g.gcd(n);
    }
    if den.is_negative() {
        g = -g;
    }
    let num: [BigInt; DEG] = std::array::from_fn(|k| &num[k] / &g);
    let den = den / &g;
    if let Some(d) = den.to_i64() {
        let mut small = [0i64; DEG];
        if num.iter().zip(small.iter_mut()).all(|(n, s)| match n.to_i64() {
            Some(v) => {
                *s = v;
                true
            }
            None => false,
        }) {
            return CycNum(Repr::Small { num: small, den: d });
        }
    }
    CycNum(Repr::Big { num: Box::new(num), den })
}

/// Reduce a length-15 product polynomial modulo x⁸ − x⁴ + 1.
fn reduce_i128(mut c: [i128; 2 * DEG - 1]) -> Option<[i128; DEG]> {
    for k in (DEG..2 * DEG - 1).rev() {
        let top = c[k];
        if top != 0 {
            c[k - 4] = c[k - 4].checked_add(top)?;
            c[k - 8] = c[k - 8].checked_sub(top)?;
        }
    }
    Some(std::array::from_fn(|k| c[k]))
}

fn reduce_big(mut c: Vec<BigInt>) -> [BigInt; DEG] {
    for k in (DEG..c.len()).rev() {
        let top = std::mem::take(&mut c[k]);
        if !top.is_zero() {
            c[k - 4] += &top;
            c[k - 8] -= &top;
        }
    }
    std::array::from_fn(|k| std::mem::take(&mut c[k]))
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum(Repr::Small { num: [0; DEG], den: 1 })
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        let mut num = [0; DEG];
        num[0] = n;
        CycNum(Repr::Small { num, den: 1 })
    }

    /// The rational p/q.
    pub fn frac(p: i64, q: i64) -> Self {
        let mut num = [0i128; DEG];
        num[0] = p as i128;
        assert!(q != 0, "zero denominator");
        normalize_i128(num, q as i128)
    }

    /// Build from eight rational coordinates given as (numerator, denominator).
    pub fn make(coeffs: [(i64, i64); DEG]) -> Self {
        coeffs
            .iter()
            .enumerate()
            .fold(CycNum::zero(), |acc, (k, &(p, q))| acc + CycNum::frac(p, q) * CycNum::zeta_pow(k as i64))
    }

    /// Build from eight arbitrary-precision rational coordinates.
    pub fn from_big_rationals(coeffs: &[(BigInt, BigInt); DEG]) -> Result<Self, CycError> {
        let mut den = BigInt::one();
        for (_, q) in coeffs.iter() {
            if q.is_zero() {
                return Err(CycError::DivisionByZero);
            }
            den = den.lcm(q);
        }
        let num: [BigInt; DEG] = std::array::from_fn(|k| &coeffs[k].0 * (&den / &coeffs[k].1));
        Ok(normalize_big(num, den))
    }

    /// ζ^k, any integer k.
    pub fn zeta_pow(k: i64) -> Self {
        let v = zeta_pow_table()[k.rem_euclid(24) as usize];
        CycNum(Repr::Small { num: v, den: 1 })
    }

    /// i = ζ⁶.
    pub fn i() -> Self {
        Self::zeta_pow(6)
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => num.iter().all(|n| *n == 0),
            Repr::Big { .. } => false,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == CycNum::one()
    }

    /// True when the value is a rational number.
    pub fn is_rational(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => num[1..].iter().all(|n| *n == 0),
            Repr::Big { num, .. } => num[1..].iter().all(|n| n.is_zero()),
        }
    }

    fn big_parts(&self) -> ([BigInt; DEG], BigInt) {
        match &self.0 {
            Repr::Small { num, den } => (std::array::from_fn(|k| BigInt::from(num[k])), BigInt::from(*den)),
            Repr::Big { num, den } => ((**num).clone(), den.clone()),
        }
    }

    /// Coordinates as (numerator, denominator) pairs in lowest terms.
    pub fn rational_coeffs(&self) -> [(BigInt, BigInt); DEG] {
        let (num, den) = self.big_parts();
        std::array::from_fn(|k| {
            let g = num[k].gcd(&den);
            if num[k].is_zero() {
                (BigInt::zero(), BigInt::one())
            } else {
                (&num[k] / &g, &den / &g)
            }
        })
    }

    pub fn inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        // product of the seven non-trivial conjugates divided by the norm
        let mut others = CycNum::one();
        for k in [5i64, 7, 11, 13, 17, 19, 23] {
            others = &others * &self.conj_gal(k).expect("unit");
        }
        let norm = self * &others;
        debug_assert!(norm.is_rational());
        let (n, d) = norm.big_parts();
        // norm = n[0]/d, inverse multiplies by d/n[0]
        let (on, od) = others.big_parts();
        let num: [BigInt; DEG] = std::array::from_fn(|k| &on[k] * &d);
        Ok(normalize_big(num, od * &n[0]))
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycError> {
        Ok(self * &other.inv()?)
    }

    /// The Galois substitution ζ ↦ ζᵏ.
    pub fn conj_gal(&self, k: i64) -> Result<Self, CycError> {
        if k.gcd(&24) != 1 {
            return Err(CycError::InvalidAutomorphism(k));
        }
        let table = zeta_pow_table();
        match &self.0 {
            Repr::Small { num, den } => {
                let mut acc = [0i128; DEG];
                for (j, &c) in num.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let row = &table[((j as i64) * k).rem_euclid(24) as usize];
                    for (a, r) in acc.iter_mut().zip(row.iter()) {
                        *a += (c as i128) * (*r as i128);
                    }
                }
                Ok(normalize_i128(acc, *den as i128))
            }
            Repr::Big { num, den } => {
                let mut acc: [BigInt; DEG] = Default::default();
                for (j, c) in num.iter().enumerate() {
                    let row = &table[((j as i64) * k).rem_euclid(24) as usize];
                    for (a, r) in acc.iter_mut().zip(row.iter()) {
                        *a += c * BigInt::from(*r);
                    }
                }
                Ok(normalize_big(acc, den.clone()))
            }
        }
    }

    /// Complex conjugation, ζ ↦ ζ⁻¹.
    pub fn conj(&self) -> Self {
        self.conj_gal(23).expect("23 is a unit")
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = CycNum::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power, negative exponents through the inverse.
    pub fn powi(&self, e: i64) -> Result<Self, CycError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow((-e) as u32))
        }
    }

    /// Floating-point approximation (re, im), for human-readable reports only.
    pub fn to_complex(&self) -> (f64, f64) {
        let (num, den) = self.big_parts();
        let d = den.to_f64().unwrap_or(f64::NAN);
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, n) in num.iter().enumerate() {
            let a = std::f64::consts::PI * (k as f64) / 12.0;
            let c = n.to_f64().unwrap_or(f64::NAN) / d;
            re += c * a.cos();
            im += c * a.sin();
        }
        (re, im)
    }

    fn add_impl(a: &CycNum, b: &CycNum) -> CycNum {
        if let (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) = (&a.0, &b.0) {
            if ad == bd {
                let num: [i128; DEG] = std::array::from_fn(|k| an[k] as i128 + bn[k] as i128);
                return normalize_i128(num, *ad as i128);
            }
            let (ad, bd) = (*ad as i128, *bd as i128);
            let num: [i128; DEG] = std::array::from_fn(|k| an[k] as i128 * bd + bn[k] as i128 * ad);
            return normalize_i128(num, ad * bd);
        }
        let (an, ad) = a.big_parts();
        let (bn, bd) = b.big_parts();
        let num: [BigInt; DEG] = std::array::from_fn(|k| &an[k] * &bd + &bn[k] * &ad);
        normalize_big(num, ad * bd)
    }

    fn mul_impl(a: &CycNum, b: &CycNum) -> CycNum {
        if a.is_zero() || b.is_zero() {
            return CycNum::zero();
        }
        if let (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) = (&a.0, &b.0) {
            if let Some(r) = Self::mul_small(an, bn) {
                if let Some(d) = (*ad as i128).checked_mul(*bd as i128) {
                    return normalize_i128(r, d);
                }
            }
        }
        let (an, ad) = a.big_parts();
        let (bn, bd) = b.big_parts();
        let mut c: Vec<BigInt> = vec![BigInt::zero(); 2 * DEG - 1];
        for (i, x) in an.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in bn.iter().enumerate() {
                if !y.is_zero() {
                    c[i + j] += x * y;
                }
            }
        }
        normalize_big(reduce_big(c), ad * bd)
    }

    fn mul_small(an: &[i64; DEG], bn: &[i64; DEG]) -> Option<[i128; DEG]> {
        let mut c = [0i128; 2 * DEG - 1];
        for (i, &x) in an.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in bn.iter().enumerate() {
                if y != 0 {
                    c[i + j] = c[i + j].checked_add((x as i128).checked_mul(y as i128)?)?;
                }
            }
        }
        reduce_i128(c)
    }
}

impl Default for CycNum {
    fn default() -> Self {
        CycNum::zero()
    }
}

impl From<i64> for CycNum {
    fn from(n: i64) -> Self {
        CycNum::from_int(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:expr) => {
        impl $tr<&CycNum> for &CycNum {
            type Output = CycNum;
            fn $m(self, rhs: &CycNum) -> CycNum {
                $f(self, rhs)
            }
        }
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                $f(&self, &rhs)
            }
        }
        impl $tr<&CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: &CycNum) -> CycNum {
                $f(&self, rhs)
            }
        }
        impl $tr<CycNum> for &CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, CycNum::add_impl);
binop!(Mul, mul, CycNum::mul_impl);
binop!(Sub, sub, |a: &CycNum, b: &CycNum| CycNum::add_impl(a, &-b));

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        match &self.0 {
            Repr::Small { num, den } => {
                // i64::MIN cannot be negated in place
                if num.contains(&i64::MIN) {
                    let n: [i128; DEG] = std::array::from_fn(|k| -(num[k] as i128));
                    return normalize_i128(n, *den as i128);
                }
                CycNum(Repr::Small { num: std::array::from_fn(|k| -num[k]), den: *den })
            }
            Repr::Big { num, den } => {
                CycNum(Repr::Big { num: Box::new(std::array::from_fn(|k| -&num[k])), den: den.clone() })
            }
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        *self = CycNum::add_impl(self, rhs);
    }
}

impl SubAssign<&CycNum> for CycNum {
    fn sub_assign(&mut self, rhs: &CycNum) {
        *self = CycNum::add_impl(self, &-rhs);
    }
}

impl MulAssign<&CycNum> for CycNum {
    fn mul_assign(&mut self, rhs: &CycNum) {
        *self = CycNum::mul_impl(self, rhs);
    }
}

impl std::iter::Sum for CycNum {
    fn sum<I: Iterator<Item = CycNum>>(iter: I) -> Self {
        iter.fold(CycNum::zero(), |a, b| a + b)
    }
}

impl fmt::Display for CycNum {
    /// Polynomial in z with rational coefficients, lowest power first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, (p, q)) in self.rational_coeffs().iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let neg = p.is_negative();
            let mag = p.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && q.is_one();
            if k == 0 || !unit {
                write!(f, "{}", mag)?;
                if !q.is_one() {
                    write!(f, "/{}", q)?;
                }
            }
            if k > 0 {
                if !unit {
                    write!(f, "*")?;
                }
                write!(f, "z")?;
                if k > 1 {
                    write!(f, "^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum({})", self)
    }
}

fn parse_rational(s: &str) -> Option<CycNum> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().ok()?;
    let q: BigInt = q.parse().ok()?;
    if q.is_zero() {
        return None;
    }
    let mut coeffs: [(BigInt, BigInt); DEG] = std::array::from_fn(|_| (BigInt::zero(), BigInt::one()));
    coeffs[0] = (p, q);
    CycNum::from_big_rationals(&coeffs).ok()
}

/// Parse a power of the generator: `z`, `z^k`, `zeta`, `zeta^k`, or `i`.
fn parse_atom(s: &str) -> Option<CycNum> {
    let s = s.trim();
    if s == "i" {
        return Some(CycNum::i());
    }
    let rest = s.strip_prefix("zeta").or_else(|| s.strip_prefix('z'))?;
    let rest = rest.trim();
    if rest.is_empty() {
        return Some(CycNum::zeta_pow(1));
    }
    let e: i64 = rest.strip_prefix('^')?.trim().parse().ok()?;
    Some(CycNum::zeta_pow(e))
}

fn parse_term(s: &str) -> Option<CycNum> {
    let mut acc = CycNum::one();
    for factor in s.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return None;
        }
        let v = if factor.starts_with(|c: char| c.is_ascii_digit()) {
            parse_rational(factor)?
        } else {
            parse_atom(factor)?
        };
        acc = acc * v;
    }
    Some(acc)
}

impl FromStr for CycNum {
    type Err = CycError;

    /// Accepts sums of terms `c`, `c*z^k`, `z^k`, with `+`/`-` separators.
    /// Parenthesised groups are allowed one level deep, e.g. `(1 + z^6)*z^3`.
    fn from_str(s: &str) -> Result<Self, CycError> {
        let err = || CycError::Parse(s.to_string());
        let src = s.trim();
        if src.is_empty() {
            return Err(err());
        }
        let mut total = CycNum::zero();
        let mut sign = 1i64;
        let mut cur = String::new();
        let mut depth = 0usize;
        let mut pending = false;
        let flush = |cur: &mut String, sign: i64, total: &mut CycNum| -> Result<(), CycError> {
            let t = cur.trim();
            if t.is_empty() {
                return Err(err());
            }
            let v = parse_product(t).ok_or_else(err)?;
            *total = &*total + &(v * CycNum::from_int(sign));
            cur.clear();
            Ok(())
        };
        for ch in src.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                    pending = true;
                }
                ')' => {
                    depth = depth.checked_sub(1).ok_or_else(err)?;
                    cur.push(ch);
                }
                '+' | '-' if depth == 0 => {
                    if pending && !cur.trim().is_empty() && !cur.trim_end().ends_with('^') {
                        flush(&mut cur, sign, &mut total)?;
                        sign = if ch == '-' { -1 } else { 1 };
                    } else if cur.trim().is_empty() {
                        if ch == '-' {
                            sign = -sign;
                        }
                    } else {
                        // exponent sign such as z^-1
                        cur.push(ch);
                    }
                }
                _ => {
                    if !ch.is_whitespace() {
                        pending = true;
                    }
                    cur.push(ch);
                }
            }
        }
        if depth != 0 {
            return Err(err());
        }
        flush(&mut cur, sign, &mut total)?;
        Ok(total)
    }
}

/// A product of factors where a factor is an atom, a rational, or a parenthesised sum.
fn parse_product(s: &str) -> Option<CycNum> {
    if !s.contains('(') {
        return parse_term(s);
    }
    let mut acc = CycNum::one();
    let mut rest = s.trim();
    while !rest.is_empty() {
        if let Some(inner) = rest.strip_prefix('(') {
            let mut depth = 1usize;
            let mut end = None;
            for (k, c) in inner.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            end = Some(k);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let end = end?;
            acc = acc * inner[..end].parse::<CycNum>().ok()?;
            rest = inner[end + 1..].trim_start();
        } else {
            let cut = rest.find('*').unwrap_or(rest.len());
            let head = &rest[..cut];
            acc = acc * parse_term(head)?;
            rest = &rest[cut..];
        }
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix('*') {
            rest = r.trim_start();
            if rest.is_empty() {
                return None;
            }
        } else if !rest.is_empty() {
            return None;
        }
    }
    Some(acc)
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a β choice: one of the four roots ζ³, ζ⁹, ζ¹⁵, ζ²¹ with β⁴ = −1.
pub fn parse_beta(s: &str) -> Result<CycNum, CycError> {
    let b: CycNum = s.parse()?;
    if b.pow(4) != -CycNum::one() {
        return Err(CycError::Parse(format!("{s} does not satisfy β⁴ = −1")));
    }
    Ok(b)
}

/// The four admissible β values, ζ³, ζ⁹, ζ¹⁵, ζ²¹.
pub fn all_betas() -> [CycNum; 4] {
    [3, 9, 15, 21].map(CycNum::zeta_pow)
}

/// Exponent k with β = ζᵏ, if β is one of the four admissible roots.
pub fn beta_exponent(beta: &CycNum) -> Option<i64> {
    [3i64, 9, 15, 21].into_iter().find(|k| CycNum::zeta_pow(*k) == *beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(k: i64) -> CycNum {
        CycNum::zeta_pow(k)
    }

    /// Independent power oracle: long division of x^k by x^8 - x^4 + 1.
    fn reduce_monomial(k: usize) -> [i64; DEG] {
        let mut c = vec![0i64; k.max(DEG) + 1];
        c[k] = 1;
        for d in (DEG..=k).rev() {
            let t = c[d];
            if t != 0 {
                c[d] = 0;
                c[d - 4] += t;
                c[d - 8] -= t;
            }
        }
        std::array::from_fn(|j| c[j])
    }

    #[test]
    fn units_and_basic_identities() {
        assert_eq!(CycNum::make(std::array::from_fn(|k| (if k == 0 { 1 } else { 0 }, 1))), CycNum::one());
        let i = CycNum::i();
        assert_eq!(&i * &i, -CycNum::one());
        assert_eq!(z(3).pow(4), -CycNum::one());
        let one = CycNum::one();
        assert_eq!((&one + &i) * (&one - &i), CycNum::from_int(2));
        assert_eq!((&one + &i).inv().unwrap(), (&one - &i) * CycNum::frac(1, 2));
        assert_eq!(z(4) * z(4), z(4) - one);
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert_eq!(CycNum::zero().inv(), Err(CycError::DivisionByZero));
    }

    #[test]
    fn galois_substitution() {
        assert_eq!(z(3).conj_gal(7).unwrap(), z(21));
        // i ↦ ζ^30 through the long-division oracle
        let oracle = reduce_monomial(30);
        assert_eq!(CycNum::i().conj_gal(5).unwrap(), CycNum(Repr::Small { num: oracle, den: 1 }));
        assert_eq!(CycNum::i().conj_gal(5).unwrap(), CycNum::i());
        for k in [1, 5, 7, 11, 13, 17, 19, 23] {
            assert_eq!(CycNum::frac(3, 7).conj_gal(k).unwrap(), CycNum::frac(3, 7));
        }
        assert_eq!(CycNum::one().conj_gal(2), Err(CycError::InvalidAutomorphism(2)));
        assert!(CycNum::one().conj_gal(9).is_err());
    }

    #[test]
    fn powers_agree_with_monomial_reduction() {
        let mut acc = CycNum::one();
        for k in 0..96 {
            assert_eq!(acc, CycNum(Repr::Small { num: reduce_monomial(k), den: 1 }), "k = {k}");
            acc = &acc * &z(1);
        }
    }

    #[test]
    fn beta_candidates() {
        for b in all_betas() {
            assert_eq!(b.pow(4), -CycNum::one());
            assert_eq!(b.pow(8), CycNum::one());
            assert_ne!(b.pow(4), CycNum::one());
        }
        assert_eq!(parse_beta("zeta^21").unwrap(), z(21));
        assert!(parse_beta("z^6").is_err());
    }

    #[test]
    fn text_form_round_trip() {
        let x: CycNum = "1/2 + 3*z^6".parse().unwrap();
        assert_eq!(x.to_string(), "1/2 + 3*z^6");
        assert_eq!("-z - z^7".parse::<CycNum>().unwrap().to_string(), "-z - z^7");
        assert_eq!("z^8".parse::<CycNum>().unwrap(), z(4) - CycNum::one());
        assert_eq!("(1 + z^6)*z^3".parse::<CycNum>().unwrap(), z(3) + z(9));
        assert_eq!("i".parse::<CycNum>().unwrap(), CycNum::i());
        assert_eq!("0".parse::<CycNum>().unwrap(), CycNum::zero());
        assert_eq!("-3/4*z^2".parse::<CycNum>().unwrap().to_string(), "-3/4*z^2");
        assert!("1 +".parse::<CycNum>().is_err());
        assert!("q".parse::<CycNum>().is_err());
        assert!("1/0".parse::<CycNum>().is_err());
    }

    #[test]
    fn big_promotion_and_demotion() {
        let big = CycNum::from_int(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq.0, Repr::Big { .. }));
        let back = sq.div(&big).unwrap();
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small { .. }));
        assert_eq!(sq.to_string().parse::<CycNum>().unwrap(), sq);
    }

    #[test]
    fn complex_approximation() {
        let (re, im) = z(21).to_complex();
        assert!((re - 0.5f64.sqrt()).abs() < 1e-12 && (im + 0.5f64.sqrt()).abs() < 1e-12);
    }

    fn arb_cyc() -> impl Strategy<Value = CycNum> {
        (proptest::array::uniform8(-20i64..20), 1i64..12).prop_map(|(n, d)| {
            normalize_i128(std::array::from_fn(|k| n[k] as i128), d as i128)
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_cyc(), b in arb_cyc(), c in arb_cyc()) {
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), CycNum::one());
            }
        }

        #[test]
        fn galois_is_multiplicative(a in arb_cyc(), b in arb_cyc(), k in prop::sample::select(vec![1i64, 5, 7, 11, 13, 17, 19, 23])) {
            prop_assert_eq!((&a * &b).conj_gal(k).unwrap(), a.conj_gal(k).unwrap() * b.conj_gal(k).unwrap());
            prop_assert_eq!((&a + &b).conj_gal(k).unwrap(), a.conj_gal(k).unwrap() + b.conj_gal(k).unwrap());
        }

        #[test]
        fn display_parse_round_trip(a in arb_cyc()) {
            prop_assert_eq!(a.to_string().parse::<CycNum>().unwrap(), a);
        }
    }
}
