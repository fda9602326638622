//! The standard series: eta(d tau), E2, E4, E6, Delta, j, and the weight -2
//! form F = (E2 - 2E2(2t) - 3E2(3t) + 6E2(6t)) / (2 (eta1 eta2 eta3 eta6)^2)
//! = q^-1 - 10 - 29q - 104q^2 - ...
//!
//! Base series are memoized process-wide, keyed by (kind, d, order).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use once_cell::sync::Lazy;

use super::series::QSeries;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Eta,
    E2,
    E4,
    E6,
    Delta,
    J,
    F,
    FDeriv,
}

static CACHE: Lazy<Mutex<HashMap<(Kind, u32, i64), Arc<QSeries>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Round truncation orders up into exponential buckets so nearby requests
/// share one cached expansion (extra terms only tighten the certified tail).
fn bucket(n: i64) -> i64 {
    let mut b = 64i64;
    while b < n {
        b *= 2;
    }
    b
}

fn cached<F>(kind: Kind, d: u32, order: i64, build: F) -> Arc<QSeries>
where
    F: FnOnce() -> QSeries,
{
    {
        let cache = CACHE.lock().unwrap();
        if let Some(hit) = cache.get(&(kind, d, order)) {
            return hit.clone();
        }
        // a longer expansion of the same series serves every shorter request
        if let Some((_, longer)) = cache
            .iter()
            .filter(|((k, dd, o), _)| *k == kind && *dd == d && *o > order)
            .min_by_key(|((_, _, o), _)| *o)
        {
            let cut = Arc::new(longer.truncate24(24 * order));
            drop(longer);
            let mut cache = cache;
            cache.insert((kind, d, order), cut.clone());
            return cut;
        }
    }
    let value = Arc::new(build());
    CACHE
        .lock()
        .unwrap()
        .entry((kind, d, order))
        .or_insert(value)
        .clone()
}

/// eta(d tau) to q-order `n` (truncation at exponent n).
pub fn eta_series(d: u32, n: i64) -> Arc<QSeries> {
    let n = bucket(n);
    cached(Kind::Eta, d, n, || {
        let trunc24 = 24 * n;
        let lead24 = d as i64;
        let len = ((trunc24 - lead24) as f64 / 24.0).ceil().max(0.0) as usize;
        let mut coeffs = vec![BigRational::zero(); len];
        // eta = sum_{k in Z} (-1)^k q^(d (6k+1)^2 / 24); the exponent above
        // the lead is d * k(3k+1)/2 (a generalized pentagonal number).
        let mut k: i64 = 0;
        loop {
            let idx_pos = d as i64 * (k * (3 * k + 1) / 2);
            let idx_neg = d as i64 * (k * (3 * k - 1) / 2); // index for -k
            if k > 0 && idx_pos as usize >= len && idx_neg as usize >= len {
                break;
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            if (idx_pos as usize) < len {
                coeffs[idx_pos as usize] = BigRational::from_integer(BigInt::from(sign));
            }
            if k > 0 && (idx_neg as usize) < len {
                coeffs[idx_neg as usize] = BigRational::from_integer(BigInt::from(sign));
            }
            k += 1;
        }
        QSeries::new(lead24, coeffs, trunc24)
    })
}

fn sigma_series(power: u32, scale: i64, n: i64) -> QSeries {
    // 1 + scale * sum_{m>=1} sigma_power(m) q^m
    let len = n.max(0) as usize;
    let mut sig = vec![BigInt::zero(); len];
    for d in 1..len as u64 {
        let dp = BigInt::from(d).pow(power);
        let mut m = d as usize;
        while m < len {
            sig[m] += &dp;
            m += d as usize;
        }
    }
    let mut coeffs: Vec<BigRational> = sig
        .into_iter()
        .map(|s| BigRational::from_integer(s * scale))
        .collect();
    if !coeffs.is_empty() {
        coeffs[0] = BigRational::from_integer(BigInt::from(1));
    }
    QSeries::new(0, coeffs, 24 * n)
}

/// E2(d tau) to q-order n.
pub fn e2_scaled(d: u32, n: i64) -> Arc<QSeries> {
    let n = bucket(n);
    cached(Kind::E2, d, n, || {
        let needed = (n + d as i64 - 1) / d as i64;
        sigma_series(1, -24, needed).substitute_power(d).truncate24(24 * n)
    })
}

pub fn e2_series(n: i64) -> Arc<QSeries> {
    e2_scaled(1, n)
}

pub fn e4_series(n: i64) -> Arc<QSeries> {
    let n = bucket(n);
    cached(Kind::E4, 1, n, || sigma_series(3, 240, n))
}

pub fn e6_series(n: i64) -> Arc<QSeries> {
    let n = bucket(n);
    cached(Kind::E6, 1, n, || sigma_series(5, -504, n))
}

/// Delta = eta(tau)^24.
pub fn delta_series(n: i64) -> Arc<QSeries> {
    let n = bucket(n);
    cached(Kind::Delta, 1, n, || {
        eta_series(1, n + 1).pow(24).expect("eta is invertible").truncate24(24 * n)
    })
}

/// j = E4^3 / Delta = q^-1 + 744 + 196884 q + ...
pub fn j_series(n: i64) -> Arc<QSeries> {
    let n = bucket(n);
    cached(Kind::J, 1, n, || {
        let e4 = e4_series(n + 2);
        let delta = delta_series(n + 2);
        let num = e4.pow(3).unwrap();
        num.mul(&delta.invert().expect("Delta has unit lead"))
            .truncate24(24 * n)
    })
}

/// F = q^-1 - 10 - 29q - 104q^2 - ... (weight -2 on Gamma_0(6)).
pub fn f_series(n: i64) -> Arc<QSeries> {
    let n = bucket(n);
    cached(Kind::F, 1, n, || {
        let order = n + 3;
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let numerator = e2_scaled(1, order)
            .add(&e2_scaled(2, order).scale(&BigRational::from_integer((-2).into())))
            .add(&e2_scaled(3, order).scale(&BigRational::from_integer((-3).into())))
            .add(&e2_scaled(6, order).scale(&BigRational::from_integer(6.into())))
            .scale(&half);
        let eta_prod = eta_series(1, order)
            .mul(&eta_series(2, order))
            .mul(&eta_series(3, order))
            .mul(&eta_series(6, order));
        let denom = eta_prod.mul(&eta_prod);
        numerator
            .mul(&denom.invert().expect("eta product has unit lead"))
            .truncate24(24 * n)
    })
}

/// q dF/dq, memoized alongside F.
pub fn f_derivative_series(n: i64) -> Arc<QSeries> {
    let n = bucket(n);
    cached(Kind::FDeriv, 1, n, || f_series(n).q_derivative())
}

/// Verify routine used by tests: E4^3 - E6^2 = 1728 Delta.
pub fn eisenstein_delta_identity(order: i64) -> Result<bool> {
    let e4 = e4_series(order);
    let e6 = e6_series(order);
    let lhs = e4.pow(3)?.sub(&e6.pow(2)?);
    let rhs = delta_series(order).scale(&BigRational::from_integer(1728.into()));
    Ok(lhs.agrees_with(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn eta_pentagonal() {
        let eta = eta_series(1, 10);
        // q^(1/24) (1 - q - q^2 + q^5 + q^7 - ...)
        assert_eq!(eta.lead24(), 1);
        assert_eq!(eta.coeff_at(1).unwrap(), int(1));
        assert_eq!(eta.coeff_at(25).unwrap(), int(-1));
        assert_eq!(eta.coeff_at(49).unwrap(), int(-1));
        assert_eq!(eta.coeff_at(73).unwrap(), int(0));
        assert_eq!(eta.coeff_at(121).unwrap(), int(1));
        assert_eq!(eta.coeff_at(169).unwrap(), int(1));
    }

    #[test]
    fn eta_scaled_lead() {
        let eta6 = eta_series(6, 20);
        assert_eq!(eta6.lead24(), 6);
        assert_eq!(eta6.coeff_at(6).unwrap(), int(1));
        assert_eq!(eta6.coeff_at(6 + 144).unwrap(), int(-1)); // q^6 factor of (1 - q^6)
        // (eta1 eta2 eta3 eta6)^2 has leading exponent 1
        let p = eta_series(1, 8)
            .mul(&eta_series(2, 8))
            .mul(&eta_series(3, 8))
            .mul(&eta_series(6, 8));
        let sq = p.mul(&p);
        assert_eq!(sq.lead24(), 24);
        assert_eq!(sq.leading_coeff().unwrap(), &BigRational::one());
    }

    #[test]
    fn e2_coefficients() {
        let e2 = e2_series(8);
        assert_eq!(e2.coeff_at(0).unwrap(), int(1));
        assert_eq!(e2.coeff_at(24).unwrap(), int(-24));
        assert_eq!(e2.coeff_at(48).unwrap(), int(-72));
        assert_eq!(e2.coeff_at(72).unwrap(), int(-96));
        // sigma_1(6) = 12 -> -288
        assert_eq!(e2.coeff_at(144).unwrap(), int(-288));
        let e2_2 = e2_scaled(2, 8);
        assert_eq!(e2_2.coeff_at(0).unwrap(), int(1));
        assert_eq!(e2_2.coeff_at(24).unwrap(), int(0));
        assert_eq!(e2_2.coeff_at(48).unwrap(), int(-24));
        assert_eq!(e2_2.coeff_at(96).unwrap(), int(-72));
    }

    #[test]
    fn f_display_coefficients() {
        let f = f_series(6);
        assert_eq!(f.lead24(), -24);
        assert_eq!(f.coeff_at(-24).unwrap(), int(1));
        assert_eq!(f.coeff_at(0).unwrap(), int(-10));
        assert_eq!(f.coeff_at(24).unwrap(), int(-29));
        assert_eq!(f.coeff_at(48).unwrap(), int(-104));
        assert!(f.is_integral());
    }

    #[test]
    fn j_first_terms() {
        let j = j_series(4);
        assert_eq!(j.coeff_at(-24).unwrap(), int(1));
        assert_eq!(j.coeff_at(0).unwrap(), int(744));
        assert_eq!(j.coeff_at(24).unwrap(), int(196884));
        assert_eq!(j.coeff_at(48).unwrap(), int(21493760));
    }

    #[test]
    fn delta_identity_to_200() {
        assert!(eisenstein_delta_identity(200).unwrap());
    }
}
