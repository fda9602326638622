//! Real balls: certified midpoint-radius arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::float::Float;
use super::mag::Mag;
use crate::error::{Error, Result};

/// A real number known to lie in `[mid - rad, mid + rad]`.
#[derive(Debug, Clone)]
pub struct Real {
    pub mid: Float,
    pub rad: Mag,
}

impl Real {
    pub fn zero() -> Self {
        Real {
            mid: Float::zero(),
            rad: Mag::zero(),
        }
    }

    pub fn exact(mid: Float) -> Self {
        Real {
            mid,
            rad: Mag::zero(),
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Real::exact(Float::from_i64(v))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Real::exact(Float::from_bigint(v))
    }

    pub fn from_rational(v: &BigRational, prec: u32) -> Self {
        let num = Float::from_bigint(v.numer());
        let den = Float::from_bigint(v.denom());
        let (mid, err) = num.div(&den, prec);
        Real { mid, rad: err }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Upper bound on |value|.
    pub fn abs_upper(&self) -> Mag {
        self.mid.upper_mag().add(&self.rad)
    }

    /// Lower bound on |value| (zero if the ball may straddle zero).
    pub fn abs_lower(&self) -> Mag {
        let lm = self.mid.lower_mag();
        if self.rad.is_zero() {
            return lm;
        }
        if lm.is_zero() {
            return Mag::zero();
        }
        // Largest k with lm * 2^-k + rad < lm; then lm * 2^-k <= |mid| - rad.
        let mut shift = 1;
        loop {
            let cand = lm.mul_2exp(-shift);
            if cand.add(&self.rad).ge(&lm) {
                shift += 1;
                if shift > 62 {
                    return Mag::zero();
                }
            } else {
                return cand;
            }
        }
    }

    pub fn contains_zero(&self) -> bool {
        if self.mid.is_zero() {
            return true;
        }
        // contains zero iff |mid| <= rad; compare exactly
        self.mid.cmp_abs(&self.rad.to_float()) != std::cmp::Ordering::Greater
    }

    pub fn neg(&self) -> Self {
        Real {
            mid: self.mid.neg(),
            rad: self.rad,
        }
    }

    pub fn add(&self, other: &Real, prec: u32) -> Self {
        let sum = self.mid.add(&other.mid);
        let (mid, err) = sum.round_to(prec);
        Real {
            mid,
            rad: self.rad.add(&other.rad).add(&err),
        }
    }

    pub fn sub(&self, other: &Real, prec: u32) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Real, prec: u32) -> Self {
        let prod = self.mid.mul(&other.mid);
        let (mid, err) = prod.round_to(prec);
        let rad = self
            .mid
            .upper_mag()
            .mul(&other.rad)
            .add(&other.mid.upper_mag().mul(&self.rad))
            .add(&self.rad.mul(&other.rad))
            .add(&err);
        Real { mid, rad }
    }

    pub fn mul_i64(&self, v: i64, prec: u32) -> Self {
        self.mul(&Real::from_i64(v), prec)
    }

    pub fn mul_2exp(&self, e: i64) -> Self {
        Real {
            mid: self.mid.mul_2exp(e),
            rad: self.rad.mul_2exp(e),
        }
    }

    /// Certified division; errors if the divisor ball contains zero.
    pub fn div(&self, other: &Real, prec: u32) -> Result<Self> {
        let den_lower = other.separated_lower()?;
        let (q, qerr) = self.mid.div(&other.mid, prec);
        // |x/y - x̂/ŷ| <= (rx + |x̂/ŷ| ry) / (|y| lower)
        let rad = self
            .rad
            .add(&q.upper_mag().mul(&other.rad))
            .div_lower(&den_lower)
            .add(&qerr);
        Ok(Real { mid: q, rad })
    }

    /// Lower bound on |value| for a ball separated from zero.
    fn separated_lower(&self) -> Result<Mag> {
        if self.mid.is_zero() {
            return Err(Error::PrecisionFailure(
                "division by ball containing zero".into(),
            ));
        }
        let lower = self.abs_lower();
        if lower.is_zero() {
            return Err(Error::PrecisionFailure(
                "division by ball containing zero".into(),
            ));
        }
        Ok(lower)
    }

    pub fn recip(&self, prec: u32) -> Result<Self> {
        Real::from_i64(1).div(self, prec)
    }

    /// Square root of a ball that is certainly nonnegative at its lower end;
    /// errors when the ball straddles zero badly.
    pub fn sqrt(&self, prec: u32) -> Result<Self> {
        if self.mid.sign() < 0 {
            return Err(Error::PrecisionFailure("sqrt of negative ball".into()));
        }
        let (s, serr) = self.mid.sqrt(prec);
        if self.rad.is_zero() {
            return Ok(Real { mid: s, rad: serr });
        }
        let lower = self.abs_lower();
        if lower.is_zero() {
            // Fall back to |sqrt(mid±rad)-sqrt(mid)| <= sqrt(rad)
            return Ok(Real {
                mid: s,
                rad: serr.add(&self.rad.sqrt_upper()),
            });
        }
        // d/dx sqrt = 1/(2 sqrt x): rad' = rad / (2 sqrt(lower))
        let rad = self
            .rad
            .div_lower(&lower.sqrt_upper())
            .mul_2exp(-1)
            .mul(&Mag::from_u64(3)) // slack: sqrt_upper overestimates the lower root
            .add(&serr);
        Ok(Real { mid: s, rad })
    }

    /// Does the ball contain the given integer? Exact dyadic comparison.
    pub fn contains_bigint(&self, n: &BigInt) -> bool {
        let diff = self.mid.abs_diff_bigint(n);
        diff.cmp_abs(&self.rad.to_float()) != std::cmp::Ordering::Greater
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        // q = a/b with b > 0: check |mid*b - a| <= rad*b exactly
        let a = Float::from_bigint(q.numer());
        let b = Float::from_bigint(q.denom());
        let lhs = self.mid.mul(&b).sub(&a);
        let rhs = self.rad.to_float().mul(&b);
        lhs.cmp_abs(&rhs) != std::cmp::Ordering::Greater
    }

    /// True when the whole ball is below `2^e` in absolute value.
    pub fn abs_below_2pow(&self, e: i64) -> bool {
        Mag::two_pow(e).ge(&self.abs_upper())
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Midpoint and radius, rendered for reports.
    pub fn to_decimal(&self, digits: u32) -> String {
        if self.rad.is_zero() {
            self.mid.to_decimal(digits)
        } else {
            format!(
                "{} ± 2^{}",
                self.mid.to_decimal(digits),
                self.rad.bound_exp()
            )
        }
    }
}

/// Nearest-integer recognition: the ball must isolate a unique integer.
pub fn recognize_integer(ball: &Real) -> Result<BigInt> {
    let cand = ball.mid.round_to_bigint();
    let resid = ball.mid.abs_diff_bigint(&cand);
    let total = resid.upper_mag().add(&ball.rad);
    if Mag::two_pow(-1).ge(&total) && total != Mag::two_pow(-1) {
        Ok(cand)
    } else {
        Err(Error::RecognitionFailure(format!(
            "ball {} does not isolate an integer (|resid|+rad ~ 2^{})",
            ball.to_decimal(8),
            total.bound_exp()
        )))
    }
}
