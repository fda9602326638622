//! Complex balls with a disc radius: midpoint (re, im) and a single bound
//! on |z - mid|. Disc radii contract by the true complex modulus under
//! multiplication, which keeps long Horner evaluations at |q| < 1 stable
//! (coordinate-wise radii would only contract by |Re| + |Im|).

use num_bigint::BigInt;
use num_rational::BigRational;

use super::float::Float;
use super::mag::Mag;
use super::real::Real;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Complex {
    pub re_mid: Float,
    pub im_mid: Float,
    pub rad: Mag,
}

impl Complex {
    pub fn zero() -> Self {
        Complex {
            re_mid: Float::zero(),
            im_mid: Float::zero(),
            rad: Mag::zero(),
        }
    }

    pub fn one() -> Self {
        Complex {
            re_mid: Float::one(),
            im_mid: Float::zero(),
            rad: Mag::zero(),
        }
    }

    pub fn from_real(re: Real) -> Self {
        Complex {
            re_mid: re.mid,
            im_mid: Float::zero(),
            rad: re.rad,
        }
    }

    pub fn from_parts(re: Real, im: Real) -> Self {
        Complex {
            re_mid: re.mid,
            im_mid: im.mid,
            rad: re.rad.add(&im.rad),
        }
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Complex::from_real(Real::from_bigint(v))
    }

    pub fn from_rational(v: &BigRational, prec: u32) -> Self {
        Complex::from_real(Real::from_rational(v, prec))
    }

    /// Real part as a ball (the disc radius bounds each coordinate).
    pub fn re_ball(&self) -> Real {
        Real {
            mid: self.re_mid.clone(),
            rad: self.rad,
        }
    }

    pub fn im_ball(&self) -> Real {
        Real {
            mid: self.im_mid.clone(),
            rad: self.rad,
        }
    }

    pub fn neg(&self) -> Self {
        Complex {
            re_mid: self.re_mid.neg(),
            im_mid: self.im_mid.neg(),
            rad: self.rad,
        }
    }

    pub fn conj(&self) -> Self {
        Complex {
            re_mid: self.re_mid.clone(),
            im_mid: self.im_mid.neg(),
            rad: self.rad,
        }
    }

    pub fn add(&self, other: &Complex, prec: u32) -> Self {
        let (re, er) = self.re_mid.add(&other.re_mid).round_to(prec);
        let (im, ei) = self.im_mid.add(&other.im_mid).round_to(prec);
        Complex {
            re_mid: re,
            im_mid: im,
            rad: self.rad.add(&other.rad).add(&er.add(&ei)),
        }
    }

    pub fn sub(&self, other: &Complex, prec: u32) -> Self {
        self.add(&other.neg(), prec)
    }

    /// Upper bound on the midpoint modulus.
    fn mid_upper(&self) -> Mag {
        let rr = self.re_mid.upper_mag();
        let ii = self.im_mid.upper_mag();
        rr.mul(&rr).add(&ii.mul(&ii)).sqrt_upper()
    }

    pub fn mul(&self, other: &Complex, prec: u32) -> Self {
        let ac = self.re_mid.mul(&other.re_mid);
        let bd = self.im_mid.mul(&other.im_mid);
        let ad = self.re_mid.mul(&other.im_mid);
        let bc = self.im_mid.mul(&other.re_mid);
        let (re, er) = ac.sub(&bd).round_to(prec);
        let (im, ei) = ad.add(&bc).round_to(prec);
        // |z w - ẑ ŵ| <= |ẑ| r_w + |ŵ| r_z + r_z r_w, in true moduli
        let rad = self
            .mid_upper()
            .mul(&other.rad)
            .add(&other.mid_upper().mul(&self.rad))
            .add(&self.rad.mul(&other.rad))
            .add(&er.add(&ei));
        Complex {
            re_mid: re,
            im_mid: im,
            rad,
        }
    }

    pub fn mul_real(&self, r: &Real, prec: u32) -> Self {
        let other = Complex::from_real(r.clone());
        self.mul(&other, prec)
    }

    pub fn mul_i64(&self, v: i64, prec: u32) -> Self {
        let (re, er) = self.re_mid.mul_i64(v).round_to(prec);
        let (im, ei) = self.im_mid.mul_i64(v).round_to(prec);
        Complex {
            re_mid: re,
            im_mid: im,
            rad: self
                .rad
                .mul(&Mag::from_u64(v.unsigned_abs()))
                .add(&er.add(&ei)),
        }
    }

    pub fn mul_2exp(&self, e: i64) -> Self {
        Complex {
            re_mid: self.re_mid.mul_2exp(e),
            im_mid: self.im_mid.mul_2exp(e),
            rad: self.rad.mul_2exp(e),
        }
    }

    /// |z|^2 as a real ball.
    pub fn norm_sq(&self, prec: u32) -> Real {
        let re = self.re_ball();
        let im = self.im_ball();
        re.mul(&re, prec).add(&im.mul(&im, prec), prec)
    }

    /// Lower bound on |mid| - rad; zero if the disc may contain 0.
    fn abs_lower(&self) -> Mag {
        let rr = self.re_mid.lower_mag();
        let ii = self.im_mid.lower_mag();
        // |mid| >= max(|re|, |im|) componentwise lower bound
        let lower_mid = rr.max(&ii);
        if lower_mid.is_zero() {
            return Mag::zero();
        }
        let mut shift = 1;
        loop {
            let cand = lower_mid.mul_2exp(-shift);
            if cand.add(&self.rad).ge(&lower_mid) {
                shift += 1;
                if shift > 62 {
                    return Mag::zero();
                }
            } else {
                return cand;
            }
        }
    }

    pub fn recip(&self, prec: u32) -> Result<Self> {
        let lower = self.abs_lower();
        if lower.is_zero() {
            return Err(Error::PrecisionFailure(
                "complex reciprocal of a disc containing zero".into(),
            ));
        }
        // 1/z = conj(mid)/|mid|^2 with exact mid arithmetic, then rounding
        let n = self
            .re_mid
            .mul(&self.re_mid)
            .add(&self.im_mid.mul(&self.im_mid));
        let (re, er) = self.re_mid.div(&n, prec + 8);
        let (im_neg, ei) = self.im_mid.div(&n, prec + 8);
        // |1/z - 1/ẑ| = |z - ẑ| / (|z||ẑ|) <= rad / (lower * |ẑ|)
        let mid_lower = lower.add(&self.rad); // lower bound on |ẑ| is lower+... use lower as well
        let _ = mid_lower;
        let denom = lower.mul(&lower); // |z| >= lower and |ẑ| >= lower
        let rad = self.rad.div_lower(&denom).add(&er.add(&ei));
        Ok(Complex {
            re_mid: re,
            im_mid: im_neg.neg(),
            rad,
        })
    }

    pub fn div(&self, other: &Complex, prec: u32) -> Result<Self> {
        Ok(self.mul(&other.recip(prec)?, prec))
    }

    /// Upper bound on |z|.
    pub fn abs_upper(&self) -> Mag {
        self.mid_upper().add(&self.rad)
    }

    pub fn pow_u32(&self, mut k: u32, prec: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Complex::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, prec);
            }
        }
        acc
    }

    /// Inflate the disc radius by `m`.
    pub fn inflate(&self, m: &Mag) -> Self {
        let mut z = self.clone();
        z.rad = z.rad.add(m);
        z
    }

    /// True when the whole disc lies below `2^e` in absolute value.
    pub fn abs_below_2pow(&self, e: i64) -> bool {
        Mag::two_pow(e).ge(&self.abs_upper())
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        let rad = if self.rad.is_zero() {
            "exact".to_string()
        } else {
            format!("2^{}", self.rad.bound_exp())
        };
        format!(
            "{} + {}i (± {rad})",
            self.re_mid.to_decimal(digits),
            self.im_mid.to_decimal(digits),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_mul_div_roundtrip() {
        let z = Complex::from_parts(Real::from_i64(3), Real::from_i64(4));
        let w = Complex::from_parts(Real::from_i64(1), Real::from_i64(-2));
        let p = z.mul(&w, 128);
        let q = p.div(&w, 128).unwrap();
        assert!(q.re_ball().contains_bigint(&BigInt::from(3)));
        assert!(q.im_ball().contains_bigint(&BigInt::from(4)));
    }

    #[test]
    fn pow_small() {
        let z = Complex::from_parts(Real::from_i64(0), Real::from_i64(1));
        let p = z.pow_u32(4, 64);
        assert!(p.re_ball().contains_bigint(&BigInt::from(1)));
        assert!(p.im_ball().contains_bigint(&BigInt::from(0)));
    }

    #[test]
    fn disc_radius_contracts_by_modulus() {
        // |q| = 5/8 with argument ~112 degrees: after many multiplications a
        // seeded radius must contract like |q|^k, not like (|re|+|im|)^k.
        let q = Complex::from_parts(
            Real::from_rational(&BigRational::new((-15).into(), 64.into()), 96),
            Real::from_rational(&BigRational::new(38.into(), 64.into()), 96),
        );
        let mut z = Complex::one().inflate(&Mag::two_pow(0));
        for _ in 0..200 {
            z = z.mul(&q, 96);
        }
        // |q| <= 0.64; 0.64^200 ~ 2^-128
        assert!(Mag::two_pow(-100).ge(&z.rad));
    }
}
