//! Certified elementary functions: pi, exp, sin/cos.
//!
//! Everything here returns balls whose radius accounts for truncated Taylor
//! tails and all intermediate rounding, so downstream series evaluation can
//! trust the radii unconditionally.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use super::float::Float;
use super::mag::Mag;
use super::real::Real;
use crate::error::Result;

static PI_CACHE: Lazy<Mutex<HashMap<u32, Real>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Machin's formula with fixed-point integer arithmetic:
/// pi = 16 atan(1/5) - 4 atan(1/239).
fn compute_pi(prec: u32) -> Real {
    let w = prec as i64 + 64;
    let one = BigUint::one() << w as u64;

    // atan(1/x) * 2^w with truncated integer divisions; each of the <= 2n+2
    // divisions drops less than one unit, and the alternating tail is below
    // the first omitted term.
    let atan_scaled = |x: u64| -> (BigInt, u64) {
        let xsq = BigUint::from(x * x);
        let mut acc = &one / BigUint::from(x);
        let mut sum = BigInt::from(acc.clone());
        let mut k = 1u64;
        let mut sign = -1i64;
        loop {
            acc /= &xsq;
            if acc.is_zero() {
                break;
            }
            let term = &acc / BigUint::from(2 * k + 1);
            if sign > 0 {
                sum += BigInt::from(term);
            } else {
                sum -= BigInt::from(term);
            }
            sign = -sign;
            k += 1;
        }
        (sum, 2 * k + 2)
    };

    let (a, na) = atan_scaled(5);
    let (b, nb) = atan_scaled(239);
    let v = a * 16 - b * 4;
    let err_units = 16 * (na + 1) + 4 * (nb + 1);
    let mid = Float::from_bigint(&v).mul_2exp(-w);
    let rad = Mag::from_u64(err_units).mul_2exp(-w);
    Real { mid, rad }
}

/// pi as a ball at (at least) the requested precision. Cached per precision.
pub fn pi(prec: u32) -> Real {
    let mut cache = PI_CACHE.lock().unwrap();
    cache
        .entry(prec)
        .or_insert_with(|| compute_pi(prec))
        .clone()
}

/// exp of an exact float with |x| arbitrary, as a certified ball.
fn exp_float(x: &Float, prec: u32) -> Real {
    if x.is_zero() {
        return Real::from_i64(1);
    }
    // Halve until |t| <= 1/4, Taylor, then square back.
    let k = (x.top_exp() + 2).max(0) as u32;
    let wp = prec + k + 32;
    let t = Real::exact(x.mul_2exp(-(k as i64)));

    let mut sum = Real::from_i64(1);
    let mut term = Real::from_i64(1);
    let mut n: i64 = 1;
    loop {
        term = term.mul(&t, wp);
        term = term
            .div(&Real::from_i64(n), wp)
            .expect("division by n cannot fail");
        sum = sum.add(&term, wp);
        let tb = term.abs_upper();
        if tb.is_zero() || Mag::two_pow(-(wp as i64) - 8).ge(&tb) {
            // |t| <= 1/4: geometric tail below 2 * |term|
            sum.rad = sum.rad.add(&tb.mul_2exp(1));
            break;
        }
        n += 1;
    }
    let mut y = sum;
    for _ in 0..k {
        y = y.mul(&y, wp);
    }
    let (mid, err) = y.mid.round_to(prec);
    Real {
        mid,
        rad: y.rad.add(&err),
    }
}

/// exp of a real ball.
pub fn exp(x: &Real, prec: u32) -> Real {
    let mut y = exp_float(&x.mid, prec);
    if !x.rad.is_zero() {
        // |exp(m +/- r) - exp(m)| <= exp(m)(e^r - 1) <= 2 exp(m) r for r <= 1
        assert!(
            Mag::two_pow(0).ge(&x.rad),
            "exp: input radius too large to bound"
        );
        y.rad = y.rad.add(&y.abs_upper().mul(&x.rad).mul_2exp(1));
    }
    y
}

/// Simultaneous (sin, cos) of an exact float via Taylor plus double-angle.
fn sin_cos_float(x: &Float, prec: u32) -> (Real, Real) {
    if x.is_zero() {
        return (Real::zero(), Real::from_i64(1));
    }
    let k = (x.top_exp() + 2).max(0) as u32;
    let wp = prec + 2 * k + 32;
    let t = Real::exact(x.mul_2exp(-(k as i64)));
    let tsq = t.mul(&t, wp);

    // sin t = sum (-1)^j t^(2j+1)/(2j+1)!, cos t = sum (-1)^j t^(2j)/(2j)!
    let mut sin = t.clone();
    let mut cos = Real::from_i64(1);
    let mut term_s = t.clone();
    let mut term_c = Real::from_i64(1);
    let mut j: i64 = 1;
    loop {
        term_c = term_c
            .mul(&tsq, wp)
            .div(&Real::from_i64((2 * j - 1) * (2 * j)), wp)
            .unwrap()
            .neg();
        term_s = term_s
            .mul(&tsq, wp)
            .div(&Real::from_i64((2 * j) * (2 * j + 1)), wp)
            .unwrap()
            .neg();
        cos = cos.add(&term_c, wp);
        sin = sin.add(&term_s, wp);
        let tb = term_c.abs_upper().max(&term_s.abs_upper());
        if tb.is_zero() || Mag::two_pow(-(wp as i64) - 8).ge(&tb) {
            cos.rad = cos.rad.add(&tb.mul_2exp(1));
            sin.rad = sin.rad.add(&tb.mul_2exp(1));
            break;
        }
        j += 1;
    }
    // Double-angle k times: sin 2t = 2 sin cos, cos 2t = 1 - 2 sin^2.
    for _ in 0..k {
        let s2 = sin.mul(&cos, wp).mul_2exp(1);
        let c2 = Real::from_i64(1).sub(&sin.mul(&sin, wp).mul_2exp(1), wp);
        sin = s2;
        cos = c2;
    }
    let (sm, se) = sin.mid.round_to(prec);
    let (cm, ce) = cos.mid.round_to(prec);
    (
        Real {
            mid: sm,
            rad: sin.rad.add(&se),
        },
        Real {
            mid: cm,
            rad: cos.rad.add(&ce),
        },
    )
}

/// (sin, cos) of a real ball; both derivative bounds are 1, so the input
/// radius transfers directly.
pub fn sin_cos(x: &Real, prec: u32) -> (Real, Real) {
    let (mut s, mut c) = sin_cos_float(&x.mid, prec);
    if !x.rad.is_zero() {
        s.rad = s.rad.add(&x.rad);
        c.rad = c.rad.add(&x.rad);
    }
    (s, c)
}

/// Integer square root of n as a certified real ball.
pub fn sqrt_u64(n: u64, prec: u32) -> Result<Real> {
    Real::from_i64(n as i64).sqrt(prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_matches_f64() {
        let p = pi(128);
        assert!((p.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(p.rad.to_f64() < 1e-35);
    }

    #[test]
    fn pi_high_precision_digits() {
        // 100 decimal digits of pi, cross-checked against a published value.
        let p = pi(400);
        let s = p.mid.to_decimal(50);
        assert!(s.starts_with("3.141592653589793238462643383279502884197169399375"));
    }

    #[test]
    fn exp_one() {
        let e = exp(&Real::from_i64(1), 128);
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn exp_negative_large() {
        let e = exp(&Real::from_i64(-30), 128);
        assert!((e.to_f64() - (-30.0f64).exp()).abs() < 1e-25);
    }

    #[test]
    fn sin_cos_pythagorean() {
        let x = Real::from_rational(
            &num_rational::BigRational::new(BigInt::from(7), BigInt::from(5)),
            192,
        );
        let (s, c) = sin_cos(&x, 192);
        let one = s.mul(&s, 192).add(&c.mul(&c, 192), 192);
        assert!(one.contains_bigint(&BigInt::from(1)));
        assert!((s.to_f64() - 1.4f64.sin()).abs() < 1e-12);
        assert!((c.to_f64() - 1.4f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn doubling_precision_shrinks_radius() {
        let x = Real::from_rational(
            &num_rational::BigRational::new(BigInt::from(355), BigInt::from(452)),
            128,
        );
        let (s1, _) = sin_cos(&x, 128);
        let x2 = Real::from_rational(
            &num_rational::BigRational::new(BigInt::from(355), BigInt::from(452)),
            256,
        );
        let (s2, _) = sin_cos(&x2, 256);
        assert!(s1.rad.ge(&s2.rad));
        assert!(!s2.rad.ge(&s1.rad) || s1.rad == s2.rad);
    }
}
