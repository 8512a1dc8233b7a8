//! Exact rational arithmetic for boundary-sensitive parameter values.
//!
//! The fold-Hopf locus of the builtin model changes structure at γ = 300/91
//! and γ = 400/81. Classifying a γ given as a ratio `a/b` must not depend on
//! floating-point rounding, so the locus works with [`Rat`] where the input
//! admits it and falls back to a 1e-12 interval test otherwise.

use crate::{Error, Result};

/// Signed rational with i64 parts, normalized (gcd 1, positive denominator).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rat {
    num: i64,
    den: i64,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

fn norm(num: i128, den: i128) -> Result<Rat> {
    if den == 0 {
        return Err(Error::BadParameter("rational with zero denominator"));
    }
    let s = if den < 0 { -1 } else { 1 };
    let g = gcd(num, den);
    let (n, d) = (s * num / g, s * den / g);
    if n > i64::MAX as i128 || n < i64::MIN as i128 || d > i64::MAX as i128 {
        return Err(Error::BadParameter("rational overflow"));
    }
    Ok(Rat { num: n as i64, den: d as i64 })
}

impl Rat {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        norm(num as i128, den as i128)
    }

    pub const fn int(n: i64) -> Self {
        Rat { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn add(&self, o: &Rat) -> Result<Rat> {
        norm(
            self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128,
            self.den as i128 * o.den as i128,
        )
    }

    pub fn sub(&self, o: &Rat) -> Result<Rat> {
        norm(
            self.num as i128 * o.den as i128 - o.num as i128 * self.den as i128,
            self.den as i128 * o.den as i128,
        )
    }

    pub fn mul(&self, o: &Rat) -> Result<Rat> {
        norm(self.num as i128 * o.num as i128, self.den as i128 * o.den as i128)
    }

    pub fn div(&self, o: &Rat) -> Result<Rat> {
        if o.num == 0 {
            return Err(Error::BadParameter("rational division by zero"));
        }
        norm(self.num as i128 * o.den as i128, self.den as i128 * o.num as i128)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn signum(&self) -> i32 {
        self.num.signum() as i32
    }

    /// Three-way comparison against another rational, exactly.
    pub fn cmp_rat(&self, o: &Rat) -> core::cmp::Ordering {
        let l = self.num as i128 * o.den as i128;
        let r = o.num as i128 * self.den as i128;
        l.cmp(&r)
    }

    /// Exact square root when numerator and denominator are both perfect squares.
    pub fn sqrt_exact(&self) -> Option<Rat> {
        if self.num < 0 {
            return None;
        }
        let sn = isqrt(self.num as u64)?;
        let sd = isqrt(self.den as u64)?;
        Some(Rat { num: sn as i64, den: sd as i64 })
    }

    /// Parse `a/b`, `a`, or a plain decimal like `3.5` exactly.
    pub fn parse(s: &str) -> Result<Rat> {
        let s = s.trim();
        let bad = Error::BadParameter("unparsable rational");
        if let Some((a, b)) = s.split_once('/') {
            let n: i64 = a.trim().parse().map_err(|_| bad.clone())?;
            let d: i64 = b.trim().parse().map_err(|_| bad)?;
            return Rat::new(n, d);
        }
        if let Some((w, fr)) = s.split_once('.') {
            let neg = w.starts_with('-');
            let wv: i64 = if w.is_empty() || w == "-" { 0 } else { w.parse().map_err(|_| bad.clone())? };
            if fr.len() > 15 || fr.chars().any(|c| !c.is_ascii_digit()) {
                return Err(bad);
            }
            let fv: i64 = if fr.is_empty() { 0 } else { fr.parse().map_err(|_| bad)? };
            let den = 10i64.pow(fr.len() as u32);
            let num = wv.abs() as i128 * den as i128 + fv as i128;
            let num = if neg { -num } else { num };
            return norm(num, den as i128);
        }
        let n: i64 = s.parse().map_err(|_| bad)?;
        Ok(Rat::int(n))
    }
}

fn isqrt(n: u64) -> Option<u64> {
    let r = num_traits::Float::sqrt(n as f64) as u64;
    for c in r.saturating_sub(2)..=r + 2 {
        if c.checked_mul(c) == Some(n) {
            return Some(c);
        }
    }
    None
}

/// A γ-like parameter that is either exactly rational or a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exactness {
    Rational(Rat),
    Float(f64),
}

impl Exactness {
    pub fn to_f64(&self) -> f64 {
        match self {
            Exactness::Rational(r) => r.to_f64(),
            Exactness::Float(x) => *x,
        }
    }

    /// Compare against an exact rational threshold; float inputs use the
    /// interval |x - t| <= 1e-12 to decide equality.
    pub fn cmp_threshold(&self, t: &Rat) -> core::cmp::Ordering {
        match self {
            Exactness::Rational(r) => r.cmp_rat(t),
            Exactness::Float(x) => {
                let tv = t.to_f64();
                if num_traits::Float::abs(x - tv) <= 1e-12 {
                    core::cmp::Ordering::Equal
                } else if *x < tv {
                    core::cmp::Ordering::Less
                } else {
                    core::cmp::Ordering::Greater
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_arithmetic() {
        let g = Rat::parse("300/91").unwrap();
        assert_eq!((g.num(), g.den()), (300, 91));
        let h = Rat::parse("3.5").unwrap();
        assert_eq!((h.num(), h.den()), (7, 2));
        assert_eq!(Rat::parse("-0.25").unwrap(), Rat::new(-1, 4).unwrap());
        let s = g.mul(&Rat::int(91)).unwrap();
        assert_eq!(s, Rat::int(300));
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(Rat::new(121, 100).unwrap().sqrt_exact(), Some(Rat::new(11, 10).unwrap()));
        assert_eq!(Rat::new(2, 1).unwrap().sqrt_exact(), None);
    }

    #[test]
    fn threshold_comparison() {
        let t = Rat::new(300, 91).unwrap();
        assert_eq!(Exactness::Rational(t).cmp_threshold(&t), core::cmp::Ordering::Equal);
        let near = Exactness::Float(300.0 / 91.0 + 1e-13);
        assert_eq!(near.cmp_threshold(&t), core::cmp::Ordering::Equal);
        let off = Exactness::Float(300.0 / 91.0 + 1e-9);
        assert_eq!(off.cmp_threshold(&t), core::cmp::Ordering::Greater);
    }
}
