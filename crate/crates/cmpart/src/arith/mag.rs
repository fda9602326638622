//! Upper-bound magnitudes for rigorous error tracking.
//!
//! A [`Mag`] is a nonnegative bound `man * 2^exp` with a 32-bit mantissa.
//! Every operation rounds up, so a `Mag` computed from certified inputs is
//! itself a certified bound. This is the error-radius companion to the
//! arbitrary-precision midpoints in [`super::float`].

/// Nonnegative upper bound, `man * 2^exp` with `man != 0` normalized into
/// `[2^31, 2^32)`. `man == 0` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mag {
    pub(crate) man: u64,
    pub(crate) exp: i64,
}

const MAN_BITS: u32 = 32;

impl Mag {
    pub const fn zero() -> Self {
        Mag { man: 0, exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    /// Bound `2^e`.
    pub fn two_pow(e: i64) -> Self {
        Mag {
            man: 1 << (MAN_BITS - 1),
            exp: e - (MAN_BITS as i64 - 1),
        }
    }

    fn normalize(man: u64, exp: i64) -> Self {
        if man == 0 {
            return Mag::zero();
        }
        let bits = 64 - man.leading_zeros();
        if bits > MAN_BITS {
            let shift = bits - MAN_BITS;
            // Round up on any dropped bit.
            let mut m = man >> shift;
            if man & ((1u64 << shift) - 1) != 0 {
                m += 1;
            }
            Self::normalize(m, exp + shift as i64)
        } else if bits < MAN_BITS {
            let shift = MAN_BITS - bits;
            Mag {
                man: man << shift,
                exp: exp - shift as i64,
            }
        } else {
            Mag { man, exp }
        }
    }

    pub fn from_u64(v: u64) -> Self {
        Self::normalize(v, 0)
    }

    /// Exponent `e` with `self <= 2^e` (top-bit position).
    pub fn bound_exp(&self) -> i64 {
        debug_assert!(self.man != 0);
        self.exp + MAN_BITS as i64
    }

    /// f64 upper bound on log2(self); meaningful only for nonzero bounds.
    pub fn log2_upper(&self) -> f64 {
        debug_assert!(self.man != 0);
        (self.man as f64).log2() * (1.0 + 1e-12) + self.exp as f64 + 1e-9
    }

    pub fn add(&self, other: &Mag) -> Mag {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = hi.exp - lo.exp;
        let lo_shifted = if shift >= 64 {
            1 // anything nonzero rounds up by one ulp of hi
        } else {
            let s = shift as u32;
            let mut v = lo.man >> s;
            if s > 0 && lo.man & ((1u64 << s) - 1) != 0 {
                v += 1;
            }
            v.max(1)
        };
        Mag::normalize(hi.man + lo_shifted, hi.exp)
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::zero();
        }
        let prod = (self.man as u128) * (other.man as u128);
        // Split back into a u64 mantissa, rounding up.
        let bits = 128 - prod.leading_zeros();
        if bits <= 64 {
            Mag::normalize(prod as u64, self.exp + other.exp)
        } else {
            let shift = bits - 64;
            let mut m = (prod >> shift) as u64;
            if prod & ((1u128 << shift) - 1) != 0 {
                m = m.saturating_add(1);
            }
            Mag::normalize(m, self.exp + other.exp + shift as i64)
        }
    }

    /// Upper bound on `self / lower`, where `lower` is a *lower* bound of the
    /// true divisor (see [`Mag::lower_div`] callers).
    pub fn div_lower(&self, lower: &Mag) -> Mag {
        assert!(!lower.is_zero(), "division by zero lower bound");
        if self.is_zero() {
            return Mag::zero();
        }
        let num = (self.man as u128) << 32;
        let q = num / (lower.man as u128) + 1;
        Mag::normalize(q as u64, self.exp - lower.exp - 32)
    }

    pub fn mul_2exp(&self, e: i64) -> Mag {
        if self.is_zero() {
            return *self;
        }
        Mag {
            man: self.man,
            exp: self.exp + e,
        }
    }

    pub fn max(&self, other: &Mag) -> Mag {
        if self.ge(other) {
            *self
        } else {
            *other
        }
    }

    pub fn ge(&self, other: &Mag) -> bool {
        if other.is_zero() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        if self.exp != other.exp {
            return self.exp > other.exp;
        }
        self.man >= other.man
    }

    /// Upper bound on the square root.
    pub fn sqrt_upper(&self) -> Mag {
        if self.is_zero() {
            return *self;
        }
        let (man, exp) = if self.exp % 2 == 0 {
            (self.man, self.exp)
        } else {
            (self.man.saturating_mul(2), self.exp - 1)
        };
        let wide = (man as u128) << 64;
        let r = wide.isqrt() as u64 + 1;
        Mag::normalize(r, exp / 2 - 32)
    }

    /// Upper bound on `self^k`.
    pub fn pow(&self, k: u32) -> Mag {
        let mut acc = Mag::two_pow(0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.man as f64 * (self.exp as f64).exp2()
    }

    /// Exact dyadic value of the bound, as a float.
    pub fn to_float(&self) -> super::float::Float {
        if self.is_zero() {
            return super::float::Float::zero();
        }
        super::float::Float::from_biguint_exp(num_bigint::BigUint::from(self.man), self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_rounds_up() {
        let a = Mag::two_pow(0);
        let b = Mag::two_pow(-100);
        let s = a.add(&b);
        assert!(s.ge(&a));
        assert!(s.to_f64() >= 1.0);
    }

    #[test]
    fn mul_is_upper_bound() {
        let a = Mag::from_u64(3);
        let b = Mag::from_u64(5);
        assert!(a.mul(&b).to_f64() >= 15.0);
        assert!(a.mul(&b).to_f64() < 15.0 * 1.0001);
    }

    #[test]
    fn sqrt_upper_bound() {
        let a = Mag::from_u64(2);
        let s = a.sqrt_upper();
        assert!(s.to_f64() >= std::f64::consts::SQRT_2);
        assert!(s.to_f64() < std::f64::consts::SQRT_2 * 1.0001);
    }
}
