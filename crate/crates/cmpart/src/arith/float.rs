//! Sign-magnitude arbitrary-precision binary floats.
//!
//! `Float` is an exact value `sign * mant * 2^exp`. Addition and
//! multiplication are exact; `round_to` truncates to a working precision and
//! returns a certified bound on the discarded part, which the ball layer in
//! [`super::real`] folds into its radius.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::mag::Mag;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Float {
    /// -1, 0, or 1; zero iff `mant` is zero.
    sign: i8,
    mant: BigUint,
    exp: i64,
}

impl Float {
    pub fn zero() -> Self {
        Float {
            sign: 0,
            mant: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Float::from_i64(1)
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    fn normalized(sign: i8, mant: BigUint, exp: i64) -> Self {
        if mant.is_zero() {
            return Float::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Float {
                sign,
                mant: &mant >> tz,
                exp: exp + tz as i64,
            }
        } else {
            Float { sign, mant, exp }
        }
    }

    pub fn from_i64(v: i64) -> Self {
        if v == 0 {
            return Float::zero();
        }
        Float::normalized(
            if v > 0 { 1 } else { -1 },
            BigUint::from(v.unsigned_abs()),
            0,
        )
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        match v.sign() {
            Sign::NoSign => Float::zero(),
            Sign::Plus => Float::normalized(1, v.magnitude().clone(), 0),
            Sign::Minus => Float::normalized(-1, v.magnitude().clone(), 0),
        }
    }

    pub fn from_biguint_exp(mant: BigUint, exp: i64) -> Self {
        Float::normalized(1, mant, exp)
    }

    /// Position of the leading bit: `2^(top-1) <= |x| < 2^top`. Zero input
    /// has no top; callers must check.
    pub fn top_exp(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.exp + self.mant.bits() as i64
    }

    pub fn neg(&self) -> Self {
        Float {
            sign: -self.sign,
            mant: self.mant.clone(),
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Float {
            sign: self.sign.abs(),
            mant: self.mant.clone(),
            exp: self.exp,
        }
    }

    pub fn mul_2exp(&self, e: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Float {
            sign: self.sign,
            mant: self.mant.clone(),
            exp: self.exp + e,
        }
    }

    /// Exact sum.
    pub fn add(&self, other: &Float) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b) = (self, other);
        let exp = a.exp.min(b.exp);
        let ma = &a.mant << (a.exp - exp) as u64;
        let mb = &b.mant << (b.exp - exp) as u64;
        if a.sign == b.sign {
            Float::normalized(a.sign, ma + mb, exp)
        } else {
            match ma.cmp(&mb) {
                std::cmp::Ordering::Equal => Float::zero(),
                std::cmp::Ordering::Greater => Float::normalized(a.sign, ma - mb, exp),
                std::cmp::Ordering::Less => Float::normalized(b.sign, mb - ma, exp),
            }
        }
    }

    pub fn sub(&self, other: &Float) -> Self {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &Float) -> Self {
        if self.is_zero() || other.is_zero() {
            return Float::zero();
        }
        Float::normalized(
            self.sign * other.sign,
            &self.mant * &other.mant,
            self.exp + other.exp,
        )
    }

    pub fn mul_i64(&self, v: i64) -> Self {
        self.mul(&Float::from_i64(v))
    }

    /// Truncate to `prec` mantissa bits (toward zero). Returns the rounded
    /// value and a certified bound on the rounding error.
    pub fn round_to(&self, prec: u32) -> (Float, Mag) {
        if self.is_zero() {
            return (self.clone(), Mag::zero());
        }
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return (self.clone(), Mag::zero());
        }
        let drop = bits - prec as u64;
        let mant = &self.mant >> drop;
        let exp = self.exp + drop as i64;
        (
            Float::normalized(self.sign, mant, exp),
            Mag::two_pow(exp),
        )
    }

    /// Quotient to roughly `prec` significant bits; error below one ulp of
    /// the result, returned as a certified bound.
    pub fn div(&self, other: &Float, prec: u32) -> (Float, Mag) {
        assert!(!other.is_zero(), "Float::div by zero");
        if self.is_zero() {
            return (Float::zero(), Mag::zero());
        }
        let extra = prec as i64 + 2 + other.mant.bits() as i64 - self.mant.bits() as i64;
        let shift = extra.max(0) as u64;
        let (q, r) = (&self.mant << shift).div_rem(&other.mant);
        let exp = self.exp - other.exp - shift as i64;
        let err = if r.is_zero() {
            Mag::zero()
        } else {
            Mag::two_pow(exp)
        };
        (Float::normalized(self.sign * other.sign, q, exp), err)
    }

    /// Square root of a nonnegative float to `prec` bits, with error bound
    /// below one ulp.
    pub fn sqrt(&self, prec: u32) -> (Float, Mag) {
        assert!(self.sign >= 0, "Float::sqrt of negative value");
        if self.is_zero() {
            return (Float::zero(), Mag::zero());
        }
        let bits = self.mant.bits() as i64;
        let mut shift = (2 * prec as i64 + 2 - bits).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as u64;
        let r = m.sqrt();
        let exp = (self.exp - shift) / 2;
        (Float::normalized(1, r, exp), Mag::two_pow(exp))
    }

    /// Certified upper bound on the absolute value.
    pub fn upper_mag(&self) -> Mag {
        if self.is_zero() {
            return Mag::zero();
        }
        let bits = self.mant.bits();
        let (man, shift) = if bits <= 63 {
            let digs = self.mant.to_u64_digits();
            (digs[0], 0)
        } else {
            let shift = bits - 63;
            let v = (&self.mant >> shift).to_u64_digits()[0] + 1;
            (v, shift)
        };
        Mag::from_u64(man).mul_2exp(self.exp + shift as i64)
    }

    /// Certified lower bound on the absolute value (zero for zero).
    pub fn lower_mag(&self) -> Mag {
        if self.is_zero() {
            return Mag::zero();
        }
        let bits = self.mant.bits();
        if bits <= 63 {
            let digs = self.mant.to_u64_digits();
            return Mag::from_u64(digs[0]).mul_2exp(self.exp);
        }
        // 2^(top-1) <= |x|
        Mag::two_pow(self.top_exp() - 1)
    }

    pub fn cmp_abs(&self, other: &Float) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        if self.is_zero() {
            return if other.is_zero() {
                Ordering::Equal
            } else {
                Ordering::Less
            };
        }
        if other.is_zero() {
            return Ordering::Greater;
        }
        let ta = self.top_exp();
        let tb = other.top_exp();
        if ta != tb {
            return ta.cmp(&tb);
        }
        let exp = self.exp.min(other.exp);
        let ma = &self.mant << (self.exp - exp) as u64;
        let mb = &other.mant << (other.exp - exp) as u64;
        ma.cmp(&mb)
    }

    /// Nearest integer (ties toward zero are fine for our use: callers check
    /// the residual against the ball radius separately).
    pub fn round_to_bigint(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        let v = if self.exp >= 0 {
            BigInt::from_biguint(Sign::Plus, &self.mant << self.exp as u64)
        } else {
            let shift = (-self.exp) as u64;
            let floor = &self.mant >> shift;
            let rem_top = if shift == 0 {
                false
            } else {
                // round half away from zero on the top dropped bit
                (&self.mant >> (shift - 1)).is_odd()
            };
            let mut v = floor;
            if rem_top {
                v += BigUint::one();
            }
            BigInt::from_biguint(Sign::Plus, v)
        };
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    /// |self - n| as an exact float.
    pub fn abs_diff_bigint(&self, n: &BigInt) -> Float {
        self.sub(&Float::from_bigint(n)).abs()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 53 {
            let shift = bits - 53;
            ((&self.mant >> shift).to_u64_digits()[0], self.exp + shift as i64)
        } else {
            (self.mant.to_u64_digits()[0], self.exp)
        };
        self.sign as f64 * m as f64 * (e as f64).exp2()
    }

    /// Decimal rendering with `digits` significant places, for reports.
    pub fn to_decimal(&self, digits: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // value = mant * 2^exp; estimate d = floor(log10 |x|) and correct
        // afterwards from the digit count.
        let log10 = (self.top_exp() as f64) * std::f64::consts::LN_2 / std::f64::consts::LN_10;
        let mut dec_exp = log10.floor() as i64;
        let render = |dec_exp: i64| -> BigUint {
            // scaled = |x| * 10^(digits - 1 - dec_exp), rounded to integer
            let k = digits as i64 - 1 - dec_exp;
            let ten = BigUint::from(10u32);
            let mut num = self.mant.clone();
            let mut den = BigUint::one();
            if k >= 0 {
                num *= ten.pow(k as u32);
            } else {
                den *= ten.pow((-k) as u32);
            }
            if self.exp >= 0 {
                num <<= self.exp as u64;
            } else {
                den <<= (-self.exp) as u64;
            }
            (&num + (&den >> 1)) / &den
        };
        let mut q = render(dec_exp);
        while q.to_string().len() < digits as usize {
            dec_exp -= 1;
            q = render(dec_exp);
        }
        let mut s = q.to_string();
        let mut e = dec_exp;
        // Rounding or the estimate may give extra digits (e.g. 999.9 -> 1000).
        while s.len() as u32 > digits {
            s.truncate(s.len() - 1);
            e += 1;
        }
        let sign = if self.sign < 0 { "-" } else { "" };
        if e >= 0 && (e as usize) < s.len() {
            let (int, frac) = s.split_at(e as usize + 1);
            if frac.is_empty() {
                format!("{sign}{int}")
            } else {
                format!("{sign}{int}.{frac}")
            }
        } else if e < 0 && e >= -6 {
            let zeros = "0".repeat((-e - 1) as usize);
            format!("{sign}0.{zeros}{s}")
        } else {
            let (first, rest) = s.split_at(1);
            if rest.is_empty() {
                format!("{sign}{first}e{e}")
            } else {
                format!("{sign}{first}.{rest}e{e}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_exact() {
        let a = Float::from_i64(3).mul_2exp(-1); // 1.5
        let b = Float::from_i64(1).mul_2exp(-2); // 0.25
        assert_eq!(a.add(&b).to_f64(), 1.75);
        assert_eq!(a.sub(&b).to_f64(), 1.25);
    }

    #[test]
    fn div_close() {
        let a = Float::from_i64(1);
        let b = Float::from_i64(3);
        let (q, err) = a.div(&b, 64);
        assert!((q.to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert!(err.to_f64() < 1e-18);
    }

    #[test]
    fn sqrt_two() {
        let (s, err) = Float::from_i64(2).sqrt(80);
        assert!((s.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(err.to_f64() < 1e-20);
    }

    #[test]
    fn round_reports_error() {
        let v = Float::from_i64((1 << 20) + 1);
        let (r, err) = v.round_to(8);
        assert!(!err.is_zero());
        assert!((r.to_f64() - v.to_f64()).abs() <= err.to_f64());
    }

    #[test]
    fn decimal_rendering() {
        let v = Float::from_i64(1).mul_2exp(-1);
        assert_eq!(v.to_decimal(3), "0.500");
        assert_eq!(Float::from_i64(-419).to_decimal(3), "-419");
    }
}
