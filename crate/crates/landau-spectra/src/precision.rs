//! Scalar abstraction used by the quadrature and expansion code.
//!
//! Everything numerical in this crate is written against the [`Real`] trait so
//! the same routines run in hardware `f64` and in arbitrary-precision
//! arithmetic ([`Mpf`], backed by `astro-float`). Extended precision is not
//! optional here: the Toeplitz eigenvalues decay super-exponentially and the
//! near-diagonal expansion checks need absolute errors far below 1e-16.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

/// Euler-Mascheroni constant to 110 decimal digits.
const EULER_GAMMA_STR: &str = "5.7721566490153286060651209008240243104215933593992359880576723488486772677766467093694706329174674951463144725e-1";

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Minimal scalar interface: field ops via `std::ops`, a handful of
/// elementary functions, and the ability to mint new values at the same
/// working precision as `self` (`lift`).
pub trait Real:
    Clone
    + PartialOrd
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn lift(&self, x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    /// Integer power, exact exponent handling for negative `n`.
    fn powi(&self, n: i64) -> Self;
    /// Euler-Mascheroni constant at the working precision of `self`.
    fn euler_gamma(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Working precision in bits (53 for `f64`).
    fn precision_bits(&self) -> usize;
}

impl Real for f64 {
    fn lift(&self, x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powi(&self, n: i64) -> Self {
        f64::powi(*self, n as i32)
    }
    fn euler_gamma(&self) -> Self {
        0.577_215_664_901_532_9_f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn precision_bits(&self) -> usize {
        53
    }
}

/// Arbitrary-precision real number. The precision travels with the value;
/// binary operations work at the larger of the two operand precisions.
#[derive(Clone, Debug)]
pub struct Mpf {
    v: BigFloat,
    prec: usize,
}

impl Mpf {
    pub fn with_precision(x: f64, prec_bits: usize) -> Self {
        Mpf {
            v: BigFloat::from_f64(x, prec_bits),
            prec: prec_bits,
        }
    }

    pub fn from_decimal(s: &str, prec_bits: usize) -> Self {
        let v = CONSTS.with(|cc| BigFloat::parse(s, Radix::Dec, prec_bits, RM, &mut cc.borrow_mut()));
        Mpf { v, prec: prec_bits }
    }

    /// Full-precision decimal string (round-trips through `from_decimal`).
    pub fn to_decimal_string(&self) -> String {
        CONSTS.with(|cc| {
            self.v
                .format(Radix::Dec, RM, &mut cc.borrow_mut())
                .unwrap_or_else(|_| "nan".to_string())
        })
    }

    pub fn raw(&self) -> &BigFloat {
        &self.v
    }

    fn wrap(&self, v: BigFloat) -> Mpf {
        Mpf { v, prec: self.prec }
    }

    fn join(&self, o: &Mpf) -> usize {
        self.prec.max(o.prec)
    }
}

fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _p, s, e, _inexact) = match x.as_raw_parts() {
        Some(parts) => parts,
        None => return 0.0,
    };
    // Mantissa words are little-endian; the value is frac * 2^e with
    // frac in [1/2, 1).
    let n = words.len();
    let mut frac = 0.0_f64;
    const W: f64 = 18_446_744_073_709_551_616.0; // 2^64
    if n >= 1 {
        frac += words[n - 1] as f64 / W;
    }
    if n >= 2 {
        frac += words[n - 2] as f64 / W / W;
    }
    let v = frac * 2.0_f64.powi(e);
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

impl Real for Mpf {
    fn lift(&self, x: f64) -> Self {
        Mpf::with_precision(x, self.prec)
    }
    fn to_f64(&self) -> f64 {
        bigfloat_to_f64(&self.v)
    }
    fn exp(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.exp(self.prec, RM, &mut cc.borrow_mut()));
        self.wrap(v)
    }
    fn ln(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.ln(self.prec, RM, &mut cc.borrow_mut()));
        self.wrap(v)
    }
    fn sqrt(&self) -> Self {
        self.wrap(self.v.sqrt(self.prec, RM))
    }
    fn abs(&self) -> Self {
        self.wrap(self.v.abs())
    }
    fn powi(&self, n: i64) -> Self {
        if n < 0 {
            let p = self.powi(-n);
            p.lift(1.0) / p
        } else {
            let v = self.v.powi(n as usize, self.prec, RM);
            self.wrap(v)
        }
    }
    fn euler_gamma(&self) -> Self {
        Mpf::from_decimal(EULER_GAMMA_STR, self.prec)
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    fn precision_bits(&self) -> usize {
        self.prec
    }
}

impl Add for Mpf {
    type Output = Mpf;
    fn add(self, o: Mpf) -> Mpf {
        let p = self.join(&o);
        Mpf {
            v: self.v.add(&o.v, p, RM),
            prec: p,
        }
    }
}

impl Sub for Mpf {
    type Output = Mpf;
    fn sub(self, o: Mpf) -> Mpf {
        let p = self.join(&o);
        Mpf {
            v: self.v.sub(&o.v, p, RM),
            prec: p,
        }
    }
}

impl Mul for Mpf {
    type Output = Mpf;
    fn mul(self, o: Mpf) -> Mpf {
        let p = self.join(&o);
        Mpf {
            v: self.v.mul(&o.v, p, RM),
            prec: p,
        }
    }
}

impl Div for Mpf {
    type Output = Mpf;
    fn div(self, o: Mpf) -> Mpf {
        let p = self.join(&o);
        Mpf {
            v: self.v.div(&o.v, p, RM),
            prec: p,
        }
    }
}

impl Neg for Mpf {
    type Output = Mpf;
    fn neg(self) -> Mpf {
        let v = self.v.neg();
        Mpf {
            v,
            prec: self.prec,
        }
    }
}

impl PartialEq for Mpf {
    fn eq(&self, o: &Mpf) -> bool {
        matches!(self.v.cmp(&o.v), Some(0))
    }
}

impl PartialOrd for Mpf {
    fn partial_cmp(&self, o: &Mpf) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

/// n! as a `Real` at the precision of `proto` (exact for moderate n).
pub fn factorial<T: Real>(proto: &T, n: u64) -> T {
    let mut acc = proto.lift(1.0);
    for k in 2..=n {
        acc = acc * proto.lift(k as f64);
    }
    acc
}

/// ln(n!) accumulated at working precision.
pub fn ln_factorial<T: Real>(proto: &T, n: u64) -> T {
    let mut acc = proto.lift(0.0);
    for k in 2..=n {
        acc = acc + proto.lift(k as f64).ln();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mpf_roundtrip_and_ops() {
        let x = Mpf::with_precision(0.3, 256);
        let y = x.clone() * x.clone() + x.lift(1.0);
        assert!((y.to_f64() - 1.09).abs() < 1e-15);
        let e = x.lift(1.0).exp();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!((x.lift(4.0).sqrt().to_f64() - 2.0).abs() < 1e-16);
        assert!((x.lift(2.0).powi(-3).to_f64() - 0.125).abs() < 1e-16);
    }

    #[test]
    fn euler_gamma_digits() {
        let g = Mpf::with_precision(0.0, 320).euler_gamma();
        assert!((g.to_f64() - 0.5772156649015329).abs() < 1e-16);
        // high-order digits survive a round trip at 320 bits
        let s = g.to_decimal_string();
        assert!(s.starts_with("5.7721566490153286060651209008240243104215933593992"));
    }

    #[test]
    fn decimal_string_roundtrip() {
        let x = Mpf::with_precision(1.0, 256) / Mpf::with_precision(3.0, 256);
        let s = x.to_decimal_string();
        let y = Mpf::from_decimal(&s, 256);
        let diff = (x - y).abs();
        assert!(diff < diff.lift(1e-70));
    }

    #[test]
    fn factorial_exact() {
        assert_eq!(factorial(&1.0_f64, 10), 3_628_800.0);
        let f = factorial(&Mpf::with_precision(0.0, 256), 30);
        assert!((f.to_f64() / 2.652_528_598_121_91e32 - 1.0).abs() < 1e-12);
    }
}
