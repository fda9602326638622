//! Truncated q-expansions with exact rational coefficients.
//!
//! Exponents live in (1/24)Z: a series stores its leading exponent as an
//! integer multiple of 1/24 (`lead24`) and coefficients at exponent steps of
//! one full power of q. `trunc24` is the first unknown exponent (again in
//! 1/24 units): terms with exponent >= trunc24/24 have been dropped, and
//! every operation propagates this honestly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    lead24: i64,
    coeffs: Vec<BigRational>,
    trunc24: i64,
}

impl QSeries {
    /// Build from a leading exponent (in 1/24 units), coefficients in steps
    /// of 1, and a truncation exponent (1/24 units).
    pub fn new(lead24: i64, coeffs: Vec<BigRational>, trunc24: i64) -> Self {
        let mut s = QSeries {
            lead24,
            coeffs,
            trunc24,
        };
        s.normalize();
        s
    }

    /// Truncation sentinel for exactly-known polynomials. Large enough to
    /// dominate every real truncation, small enough that the additive
    /// truncation bookkeeping cannot overflow.
    pub const EXACT: i64 = i64::MAX / 4;

    pub fn zero(trunc24: i64) -> Self {
        QSeries {
            lead24: 0,
            coeffs: Vec::new(),
            trunc24,
        }
    }

    /// A polynomial known exactly (no dropped terms).
    pub fn exact_polynomial(lead24: i64, coeffs: Vec<BigRational>) -> Self {
        QSeries::new(lead24, coeffs, Self::EXACT)
    }

    pub fn is_exact(&self) -> bool {
        self.trunc24 >= Self::EXACT
    }

    pub fn one(trunc24: i64) -> Self {
        QSeries::new(0, vec![BigRational::one()], trunc24)
    }

    /// The constant c as a series.
    pub fn constant(c: BigRational, trunc24: i64) -> Self {
        QSeries::new(0, vec![c], trunc24)
    }

    fn normalize(&mut self) {
        // drop stored terms at or beyond the truncation
        while !self.coeffs.is_empty() {
            let last_exp = self.lead24 + 24 * (self.coeffs.len() as i64 - 1);
            if last_exp >= self.trunc24 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        // advance past leading zeros
        let mut skip = 0;
        for c in &self.coeffs {
            if c.is_zero() {
                skip += 1;
            } else {
                break;
            }
        }
        if skip > 0 {
            self.coeffs.drain(0..skip);
            self.lead24 += 24 * skip as i64;
        }
        // trailing zeros carry no information (coeff_at is zero below the
        // truncation anyway); strip them so equality is structural
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.lead24 = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading exponent in 1/24 units (0 for the zero series).
    pub fn lead24(&self) -> i64 {
        self.lead24
    }

    /// Truncation exponent in 1/24 units.
    pub fn trunc24(&self) -> i64 {
        self.trunc24
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.first()
    }

    /// Coefficient at exponent `e24`/24 (zero when below truncation and not
    /// stored; None at or beyond the truncation).
    pub fn coeff_at(&self, e24: i64) -> Option<BigRational> {
        if e24 >= self.trunc24 {
            return None;
        }
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        let rel = e24 - self.lead24;
        if rel < 0 || rel % 24 != 0 {
            return Some(BigRational::zero());
        }
        let idx = (rel / 24) as usize;
        Some(
            self.coeffs
                .get(idx)
                .cloned()
                .unwrap_or_else(BigRational::zero),
        )
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    pub fn neg(&self) -> Self {
        QSeries {
            lead24: self.lead24,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            trunc24: self.trunc24,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return QSeries::zero(self.trunc24);
        }
        QSeries {
            lead24: self.lead24,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            trunc24: self.trunc24,
        }
    }

    pub fn add(&self, other: &QSeries) -> Self {
        let trunc24 = self.trunc24.min(other.trunc24);
        if self.is_zero() {
            let mut r = other.clone();
            r.trunc24 = trunc24;
            r.normalize();
            return r;
        }
        if other.is_zero() {
            let mut r = self.clone();
            r.trunc24 = trunc24;
            r.normalize();
            return r;
        }
        assert!(
            (self.lead24 - other.lead24) % 24 == 0,
            "QSeries::add: incompatible fractional exponents"
        );
        let lead24 = self.lead24.min(other.lead24);
        let len = ((self.last_exp().max(other.last_exp()) - lead24) / 24 + 1) as usize;
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = ((self.lead24 - lead24) / 24) as usize + i;
            coeffs[idx] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            let idx = ((other.lead24 - lead24) / 24) as usize + i;
            coeffs[idx] += c;
        }
        QSeries::new(lead24, coeffs, trunc24)
    }

    pub fn sub(&self, other: &QSeries) -> Self {
        self.add(&other.neg())
    }

    fn last_exp(&self) -> i64 {
        self.lead24 + 24 * (self.coeffs.len() as i64 - 1)
    }

    pub fn mul(&self, other: &QSeries) -> Self {
        if self.is_zero() || other.is_zero() {
            // a zero factor still truncates: 0 * q^L(... + O(q^T))
            let trunc24 = (self.trunc24 + other.lead24).min(other.trunc24 + self.lead24);
            return QSeries::zero(trunc24);
        }
        let lead24 = self.lead24 + other.lead24;
        let trunc24 = (self.trunc24 + other.lead24).min(other.trunc24 + self.lead24);
        let out_len = ((trunc24 - lead24) / 24).max(0) as usize;
        if out_len == 0 {
            return QSeries::zero(trunc24);
        }
        // integer fast path
        if self.is_integral() && other.is_integral() {
            let a: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
            let b: Vec<BigInt> = other.coeffs.iter().map(|c| c.numer().clone()).collect();
            let mut out = vec![BigInt::zero(); out_len];
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() || i >= out_len {
                    continue;
                }
                let jmax = (out_len - i).min(b.len());
                for (j, bj) in b.iter().enumerate().take(jmax) {
                    if !bj.is_zero() {
                        out[i + j] += ai * bj;
                    }
                }
            }
            let coeffs = out
                .into_iter()
                .map(BigRational::from_integer)
                .collect();
            return QSeries::new(lead24, coeffs, trunc24);
        }
        let mut out = vec![BigRational::zero(); out_len];
        for (i, ai) in self.coeffs.iter().enumerate() {
            if ai.is_zero() || i >= out_len {
                continue;
            }
            let jmax = (out_len - i).min(other.coeffs.len());
            for (j, bj) in other.coeffs.iter().enumerate().take(jmax) {
                if !bj.is_zero() {
                    out[i + j] += ai * bj;
                }
            }
        }
        QSeries::new(lead24, out, trunc24)
    }

    /// Multiplicative inverse; requires a nonzero leading coefficient.
    pub fn invert(&self) -> Result<Self> {
        let a0 = self
            .leading_coeff()
            .ok_or_else(|| Error::InvalidInput("QSeries::invert of zero series".into()))?
            .clone();
        let rel_order = ((self.trunc24 - self.lead24) / 24) as usize;
        let lead24 = -self.lead24;
        let trunc24 = self.trunc24 - 2 * self.lead24;

        // integer fast path for unit leading coefficient (eta quotients)
        if self.is_integral() && (a0 == BigRational::one() || a0 == -BigRational::one()) {
            let sign0 = if a0 == BigRational::one() { 1 } else { -1 };
            let a: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
            let mut out: Vec<BigInt> = Vec::with_capacity(rel_order);
            out.push(BigInt::from(sign0));
            for n in 1..rel_order {
                let mut acc = BigInt::zero();
                for k in 1..=n.min(a.len() - 1) {
                    if !a[k].is_zero() && !out[n - k].is_zero() {
                        acc += &a[k] * &out[n - k];
                    }
                }
                out.push(-acc * sign0);
            }
            return Ok(QSeries::new(
                lead24,
                out.into_iter().map(BigRational::from_integer).collect(),
                trunc24,
            ));
        }

        let inv0 = a0.recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(rel_order);
        out.push(inv0.clone());
        for n in 1..rel_order {
            let mut acc = BigRational::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                let a = &self.coeffs[k];
                if !a.is_zero() && !out[n - k].is_zero() {
                    acc += a * &out[n - k];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(QSeries::new(lead24, out, trunc24))
    }

    /// Integer power, negative allowed via inversion.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(QSeries::one(self.trunc24 - self.lead24));
        }
        let (mut base, mut k) = if e < 0 {
            (self.invert()?, (-e) as u64)
        } else {
            (self.clone(), e as u64)
        };
        let mut acc: Option<QSeries> = None;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc.unwrap())
    }

    /// The operator q d/dq: multiplies the coefficient at exponent e by e.
    pub fn q_derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e24 = self.lead24 + 24 * i as i64;
                c * BigRational::new(BigInt::from(e24), BigInt::from(24))
            })
            .collect();
        QSeries::new(self.lead24, coeffs, self.trunc24)
    }

    /// Substitute q -> q^d (i.e. pass from g(τ) to g(dτ)).
    pub fn substitute_power(&self, d: u32) -> Self {
        assert!(d >= 1);
        if d == 1 {
            return self.clone();
        }
        let d = d as i64;
        if self.is_zero() {
            return QSeries::zero(self.trunc24 * d);
        }
        let lead24 = self.lead24 * d;
        let trunc24 = self.trunc24 * d;
        let len = ((trunc24 - lead24) / 24) as usize;
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = i * d as usize;
            if idx < len {
                coeffs[idx] = c.clone();
            }
        }
        QSeries::new(lead24, coeffs, trunc24)
    }

    /// U_l: keep exponents divisible by l and divide them by l. Requires
    /// integer exponents.
    pub fn u_operator(&self, ell: u32) -> Result<Self> {
        if self.lead24 % 24 != 0 || self.trunc24 % 24 != 0 {
            return Err(Error::InvalidInput(
                "u_operator needs integer exponents".into(),
            ));
        }
        let ell = ell as i64;
        let lead = self.lead24 / 24;
        let trunc = self.trunc24 / 24;
        // output exponents m with l*m ranging over stored exponents
        let out_lead = lead.div_euclid(ell) + if lead.rem_euclid(ell) != 0 { 1 } else { 0 };
        let out_trunc = trunc.div_euclid(ell) + if trunc.rem_euclid(ell) != 0 { 1 } else { 0 };
        let len = (out_trunc - out_lead).max(0) as usize;
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = lead + i as i64;
            if e.rem_euclid(ell) == 0 {
                let m = e / ell;
                if m >= out_lead && m < out_trunc {
                    coeffs[(m - out_lead) as usize] = c.clone();
                }
            }
        }
        Ok(QSeries::new(24 * out_lead, coeffs, 24 * out_trunc))
    }

    /// Truncate harder (never extends knowledge).
    pub fn truncate24(&self, trunc24: i64) -> Self {
        let mut s = self.clone();
        s.trunc24 = s.trunc24.min(trunc24);
        s.normalize();
        s
    }

    /// Do the stored coefficients agree up to the common truncation?
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        let t = self.trunc24.min(other.trunc24);
        self.truncate24(t) == other.truncate24(t)
    }

    /// Largest exponent e (1/24 units) with a *verified zero* difference:
    /// the series vanishes identically iff lead advances to the truncation.
    pub fn vanishes_to_truncation(&self) -> bool {
        self.is_zero()
    }

    /// Text dump: one line per term, `e/24 <tab> coefficient`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e24 = self.lead24 + 24 * i as i64;
            out.push_str(&format!("{}/24\t{}\n", e24, c));
        }
        out
    }
}

/// Convenience: integer coefficients at integer exponents starting at `lead`.
pub fn from_integers(lead: i64, coeffs: &[i64], trunc: i64) -> QSeries {
    QSeries::new(
        24 * lead,
        coeffs
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect(),
        24 * trunc,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(trunc: i64) -> QSeries {
        // 1/(1-q) = 1 + q + q^2 + ...
        from_integers(0, &vec![1; trunc as usize], trunc)
    }

    #[test]
    fn mul_truncation_tracking() {
        let a = from_integers(-1, &[1, 2, 3], 2); // q^-1 + 2 + 3q + O(q^2)
        let b = from_integers(0, &[1, 1], 2); // 1 + q + O(q^2)
        let p = a.mul(&b);
        assert_eq!(p.lead24(), -24);
        // trunc = min(2 + 0, 2 + (-1)) = 1
        assert_eq!(p.trunc24(), 24);
        assert_eq!(p.coeff_at(-24).unwrap(), BigRational::from_integer(1.into()));
        assert_eq!(p.coeff_at(0).unwrap(), BigRational::from_integer(3.into()));
        assert!(p.coeff_at(24).is_none());
    }

    #[test]
    fn invert_roundtrip() {
        let a = from_integers(0, &[1, -1], 50); // 1 - q
        let inv = a.invert().unwrap();
        assert!(inv.agrees_with(&geom(50)));
        let prod = a.mul(&inv);
        assert!(prod.agrees_with(&QSeries::one(24 * 50)));
    }

    #[test]
    fn invert_with_pole() {
        let a = from_integers(-1, &[1, -10, 3], 10); // q^-1 - 10 + 3q + ...
        let inv = a.invert().unwrap();
        assert_eq!(inv.lead24(), 24);
        let prod = a.mul(&inv);
        assert!(prod
            .sub(&QSeries::one(prod.trunc24()))
            .is_zero());
    }

    #[test]
    fn associativity_on_truncations() {
        let a = from_integers(0, &[1, 2, 0, -1], 8);
        let b = from_integers(-1, &[3, 0, 1], 8);
        let c = from_integers(1, &[-2, 5], 8);
        let left = a.mul(&b).mul(&c);
        let right = a.mul(&b.mul(&c));
        assert!(left.agrees_with(&right));
        assert_eq!(left.trunc24(), right.trunc24());
    }

    #[test]
    fn q_derivative_fractional() {
        // q^(1/24): derivative multiplies by 1/24
        let s = QSeries::new(1, vec![BigRational::one()], 49);
        let d = s.q_derivative();
        assert_eq!(
            d.coeff_at(1).unwrap(),
            BigRational::new(1.into(), 24.into())
        );
    }

    #[test]
    fn u_operator_examples() {
        // U_5(q^-1 + 3q^5 + q^7) = 3q
        let mut s = QSeries::zero(24 * 10);
        s = s.add(&from_integers(-1, &[1], 10));
        s = s.add(&from_integers(5, &[3], 10));
        s = s.add(&from_integers(7, &[1], 10));
        let u = s.u_operator(5).unwrap();
        assert_eq!(u.coeff_at(24).unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(u.coeff_at(0).unwrap(), BigRational::zero());

        // U_5 U_5 = U_25
        let t = geom(60);
        let u55 = t.u_operator(5).unwrap().u_operator(5).unwrap();
        let u25 = t.u_operator(25).unwrap();
        assert!(u55.agrees_with(&u25));

        // fractional exponents rejected
        let frac = QSeries::new(1, vec![BigRational::one()], 49);
        assert!(frac.u_operator(5).is_err());
    }
}
