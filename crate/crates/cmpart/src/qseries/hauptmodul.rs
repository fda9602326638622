//! The level-6 Hauptmodul: catalog of eta-quotient candidates, a Ligozat
//! valence check certifying a single simple pole, and the degree-12 rational
//! map expressing j in terms of the selected Hauptmodul.
//!
//! The selection is self-certifying: a candidate (eta exponents r_d for
//! d | 6) is accepted only if it is a weight-0 function on Gamma_0(6) with
//! cusp orders (-1, >=0, >=0, >=0), i.e. exactly one simple pole, at the
//! infinite cusp.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use super::series::QSeries;
use super::standard::{eta_series, j_series};
use crate::error::{Error, Result};

const DIVISORS: [u32; 4] = [1, 2, 3, 6];

/// Candidate eta-quotient exponents (r_1, r_2, r_3, r_6), tried in order.
/// The first two are quotients discussed in print for this curve; both fail
/// the valence check (degree 4 and 2). The third has divisor
/// (-1)[inf] + (+1)[0] and is the Hauptmodul used everywhere below.
const CATALOG: [[i64; 4]; 4] = [
    [12, -12, 12, -12],
    [-12, 12, 12, -12],
    [5, -1, 1, -5],
    [-5, 1, -1, 5],
];

/// Orders of an eta quotient at the four cusps of X_0(6), indexed by the
/// cusp denominator c in {1, 2, 3, 6} (c = 6 is the infinite cusp). Ligozat:
/// ord_c = N / (24 gcd(c^2, N)) * sum_d r_d gcd(c, d)^2 / d.
pub fn eta_quotient_cusp_orders(r: &[i64; 4]) -> Result<[(u32, BigRational); 4]> {
    let n = 6i64;
    let mut out = Vec::new();
    for c in [1u32, 2, 3, 6] {
        let mut acc = BigRational::zero();
        for (i, d) in DIVISORS.iter().enumerate() {
            let g = (c as i64).gcd(&(*d as i64));
            acc += BigRational::new(BigInt::from(r[i] * g * g), BigInt::from(*d as i64));
        }
        let pref = BigRational::new(
            BigInt::from(n),
            BigInt::from(24 * (c as i64 * c as i64).gcd(&n)),
        );
        out.push((c, pref * acc));
    }
    Ok(out.try_into().unwrap())
}

/// Admissibility of an eta quotient as a weight-0 function on Gamma_0(6)
/// with trivial character.
fn is_weight0_function(r: &[i64; 4]) -> bool {
    let weight: i64 = r.iter().sum();
    if weight != 0 {
        return false;
    }
    let s1: i64 = DIVISORS.iter().zip(r).map(|(d, ri)| *d as i64 * ri).sum();
    let s2: i64 = DIVISORS
        .iter()
        .zip(r)
        .map(|(d, ri)| (6 / *d as i64) * ri)
        .sum();
    if s1 % 24 != 0 || s2 % 24 != 0 {
        return false;
    }
    // prod d^(r_d) must be a rational square
    let mut sq = BigRational::one();
    for (d, ri) in DIVISORS.iter().zip(r) {
        let base = BigRational::from_integer(BigInt::from(*d as i64));
        if *ri >= 0 {
            sq *= num_traits::pow::pow(base, *ri as usize);
        } else {
            sq /= num_traits::pow::pow(base, (-*ri) as usize);
        }
    }
    is_rational_square(&sq)
}

fn is_rational_square(q: &BigRational) -> bool {
    if q.is_negative() {
        return false;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    &(&n * &n) == q.numer() && &(&d * &d) == q.denom()
}

/// The selected Hauptmodul exponents, after the valence check.
pub fn select_hauptmodul() -> Result<[i64; 4]> {
    for cand in CATALOG {
        if !is_weight0_function(&cand) {
            continue;
        }
        let orders = eta_quotient_cusp_orders(&cand)?;
        let minus_one = BigRational::from_integer(BigInt::from(-1));
        let inf_ok = orders
            .iter()
            .find(|(c, _)| *c == 6)
            .map(|(_, o)| *o == minus_one)
            .unwrap_or(false);
        let others_ok = orders
            .iter()
            .filter(|(c, _)| *c != 6)
            .all(|(_, o)| !o.is_negative());
        if inf_ok && others_ok {
            return Ok(cand);
        }
    }
    Err(Error::Configuration(
        "no eta quotient in the catalog passes the degree-1 valence check".into(),
    ))
}

static T6_CACHE: Lazy<Mutex<HashMap<i64, Arc<QSeries>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// The Hauptmodul t6 as a q-series, t6 = q^-1 + ... with integer
/// coefficients, certified degree 1 by the cusp-order check.
pub fn t6_series(n: i64) -> Result<Arc<QSeries>> {
    let n = if n <= 64 { 64 } else { ((n + 511) / 512) * 512 };
    if let Some(hit) = T6_CACHE.lock().unwrap().get(&n) {
        return Ok(hit.clone());
    }
    let r = select_hauptmodul()?;
    let order = n + 3;
    let mut acc = QSeries::one(24 * order);
    for (d, ri) in DIVISORS.iter().zip(&r) {
        let eta = eta_series(*d, order);
        acc = acc.mul(&eta.pow(*ri)?);
    }
    let acc = acc.truncate24(24 * n);
    debug_assert_eq!(acc.lead24(), -24);
    debug_assert!(acc.leading_coeff().unwrap().is_one());
    let arc = Arc::new(acc);
    T6_CACHE.lock().unwrap().insert(n, arc.clone());
    Ok(arc)
}

/// j expressed through the Hauptmodul: integer polynomials (num, den) with
/// j = num(t6)/den(t6), certified by series identity to the working order.
/// The covering X_0(6) -> X(1) has degree 12 = deg num.
pub struct JRelation {
    pub num: Vec<BigInt>,
    pub den: Vec<BigInt>,
}

static JREL_CACHE: Lazy<Mutex<Option<Arc<JRelation>>>> = Lazy::new(|| Mutex::new(None));

pub fn j_in_t6() -> Result<Arc<JRelation>> {
    if let Some(hit) = JREL_CACHE.lock().unwrap().as_ref() {
        return Ok(hit.clone());
    }
    let deg = 12usize;
    let order = 28i64;
    let t = t6_series(order)?;
    let j = j_series(order);

    // Unknowns: num coefficients n_0..n_12, den coefficients d_0..d_12.
    // Equations: coefficient of q^e in sum n_i t^i - j * sum d_i t^i = 0.
    let mut t_pows: Vec<QSeries> = Vec::with_capacity(deg + 1);
    t_pows.push(QSeries::one(24 * order));
    for i in 1..=deg {
        t_pows.push(t_pows[i - 1].mul(&t));
    }
    let jt_pows: Vec<QSeries> = t_pows.iter().map(|p| p.mul(&j)).collect();

    let e_min = -(deg as i64) - 1;
    let e_max = 13i64;
    let rows = (e_min..=e_max).count();
    let cols = 2 * (deg + 1);
    let mut m = vec![vec![BigRational::zero(); cols]; rows];
    for (ri, e) in (e_min..=e_max).enumerate() {
        for i in 0..=deg {
            m[ri][i] = t_pows[i].coeff_at(24 * e).unwrap_or_else(BigRational::zero);
            m[ri][deg + 1 + i] = -jt_pows[i].coeff_at(24 * e).unwrap_or_else(BigRational::zero);
        }
    }
    let null = nullspace_vector(m).ok_or_else(|| {
        Error::ConsistencyFailure("no rational relation j*den(t) = num(t) found".into())
    })?;

    // Clear denominators and split.
    let mut lcm = BigInt::one();
    for v in &null {
        lcm = lcm.lcm(v.denom());
    }
    let ints: Vec<BigInt> = null.iter().map(|v| (v * &lcm).to_integer()).collect();
    let mut num: Vec<BigInt> = ints[..=deg].to_vec();
    let mut den: Vec<BigInt> = ints[deg + 1..].to_vec();
    // Normalize sign so num is monic of degree 12.
    while num.last().map(|c| c.is_zero()).unwrap_or(false) {
        num.pop();
    }
    while den.last().map(|c| c.is_zero()).unwrap_or(false) {
        den.pop();
    }
    if num.last().map(|c| c.is_negative()).unwrap_or(false) {
        for c in num.iter_mut() {
            *c = -c.clone();
        }
        for c in den.iter_mut() {
            *c = -c.clone();
        }
    }

    // Certify: j * den(t) - num(t) vanishes to the full computed order.
    let den_series = poly_at_series(&den, &t_pows);
    let num_series = poly_at_series(&num, &t_pows);
    let resid = j.mul(&den_series).sub(&num_series);
    if !resid.is_zero() {
        return Err(Error::ConsistencyFailure(
            "j relation residual is nonzero".into(),
        ));
    }
    let rel = Arc::new(JRelation { num, den });
    *JREL_CACHE.lock().unwrap() = Some(rel.clone());
    Ok(rel)
}

fn poly_at_series(coeffs: &[BigInt], t_pows: &[QSeries]) -> QSeries {
    let mut acc = QSeries::zero(t_pows.last().unwrap().trunc24());
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&t_pows[i].scale(&BigRational::from_integer(c.clone())));
        }
    }
    acc
}

/// One-dimensional nullspace of a rational matrix (rows x cols), or None if
/// the nullspace is trivial. Returns a single spanning vector.
fn nullspace_vector(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let rows = m.len();
    let cols = m[0].len();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        // find pivot
        let mut sel = None;
        for i in r..rows {
            if !m[i][c].is_zero() {
                sel = Some(i);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        m.swap(r, sel);
        let inv = m[r][c].clone().recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for cc in 0..cols {
                    let t = &m[r][cc] * &f;
                    m[i][cc] -= t;
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // free column = first non-pivot column
    let pivots: std::collections::HashSet<usize> = pivot_col_of_row.iter().cloned().collect();
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![BigRational::zero(); cols];
    v[free] = BigRational::one();
    for (row, &pc) in pivot_col_of_row.iter().enumerate() {
        v[pc] = -m[row][free].clone();
    }
    Some(v)
}
