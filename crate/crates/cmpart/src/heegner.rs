//! Heegner data on X0(6): discriminants D_n = 1 - 24n, the form classes
//! Q_D with a == 0 (mod 6), b == 1 (mod 12), class numbers, and CM points
//! alpha_Q = (-b + sqrt(D))/(2a).
//!
//! Enumeration scans a = 6k and b in [0, 2a) with b == 1 (mod 12) and
//! b^2 == D (mod 4a), deduplicating by SL2 reduction (the class sets biject
//! with SL2 classes under the Heegner hypothesis, which holds here since
//! D == 1 (mod 24) makes 2 and 3 split).

use num_integer::Integer;
use num_rational::BigRational;
use num_bigint::BigInt;

use crate::arith::{Complex, Real};
use crate::error::{Error, Result};

/// The discriminant D_n = 1 - 24n with its fundamental/conductor split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discriminant {
    pub n: u64,
    pub delta: i64,
    pub fundamental_part: i64,
    pub conductor: u64,
    /// Prime factorization of |delta|.
    pub factorization: Vec<(u64, u32)>,
}

/// Primitive positive definite form a x^2 + b xy + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// Membership in the Heegner family: positive definite, primitive,
    /// a == 0 (mod 6), b == 1 (mod 12).
    pub fn is_heegner(&self) -> bool {
        self.a > 0
            && self.discriminant() < 0
            && self.is_primitive()
            && self.a % 6 == 0
            && self.b.rem_euclid(12) == 1
    }
}

/// A CM point alpha_Q in the upper half-plane, with a certified rational
/// lower bound on its imaginary part.
#[derive(Debug, Clone)]
pub struct CMPoint {
    pub form: QuadForm,
    pub value: Complex,
    pub imag_lower_bound: BigRational,
}

pub fn discriminant_for(n: u64) -> Result<Discriminant> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "discriminant_for: n must be positive".into(),
        ));
    }
    let delta = 1i64 - 24 * n as i64;
    let factorization = factor_u64(delta.unsigned_abs());
    // |delta| is odd here, so the fundamental part is the squarefree-adjusted
    // odd discriminant: strip even prime powers into the conductor.
    let mut f: u64 = 1;
    let mut core = delta;
    for &(p, e) in &factorization {
        let half = e / 2;
        if half > 0 {
            let pk = (p as i64).pow(half);
            f *= p.pow(half);
            core /= pk * pk;
        }
    }
    // core is squarefree now; a squarefree negative integer == 1 (mod 4) is
    // fundamental, otherwise 4*core is and the conductor loses a factor 2.
    let (fundamental_part, conductor) = if core.rem_euclid(4) == 1 {
        (core, f)
    } else {
        debug_assert!(f % 2 == 0, "conductor parity for non-1 mod 4 core");
        (4 * core, f / 2)
    };
    Ok(Discriminant {
        n,
        delta,
        fundamental_part,
        conductor,
        factorization,
    })
}

fn factor_u64(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Gauss reduction with the realizing unimodular transform.
///
/// Returns the reduced form (|b| <= a <= c, with b >= 0 when |b| = a or
/// a = c) and M in SL2(Z) such that `q` composed with M equals the result.
pub fn sl2_reduce(q: &QuadForm) -> (QuadForm, [[i64; 2]; 2]) {
    assert!(q.a > 0 && q.discriminant() < 0, "needs positive definite");
    let mut f = *q;
    let mut m = [[1i64, 0], [0, 1]];

    // right-multiply m by t = (1 k; 0 1) or s = (0 -1; 1 0)
    let apply_t = |m: &mut [[i64; 2]; 2], k: i64| {
        let c0 = [m[0][0], m[1][0]];
        m[0][1] += c0[0] * k;
        m[1][1] += c0[1] * k;
    };
    let apply_s = |m: &mut [[i64; 2]; 2]| {
        let (a, b) = (m[0][0], m[0][1]);
        m[0][0] = b;
        m[0][1] = -a;
        let (c, d) = (m[1][0], m[1][1]);
        m[1][0] = d;
        m[1][1] = -c;
    };

    loop {
        // translate b into (-a, a]
        if f.b <= -f.a || f.b > f.a {
            let k = (-(f.b - f.a)).div_euclid(2 * f.a);
            let nb = f.b + 2 * f.a * k;
            let nc = (nb * nb - f.discriminant()) / (4 * f.a);
            apply_t(&mut m, k);
            f = QuadForm::new(f.a, nb, nc);
        }
        if f.a > f.c {
            apply_s(&mut m);
            f = QuadForm::new(f.c, -f.b, f.a);
            continue;
        }
        break;
    }
    if f.a == f.c && f.b < 0 {
        apply_s(&mut m);
        f = QuadForm::new(f.c, -f.b, f.a);
    }
    (f, m)
}

/// Apply a unimodular substitution (x, y) -> (m00 x + m01 y, m10 x + m11 y).
pub fn transform_form(q: &QuadForm, m: &[[i64; 2]; 2]) -> QuadForm {
    let (a, b, c) = (q.a, q.b, q.c);
    let (p, r) = (m[0][0], m[1][0]);
    let (s, t) = (m[0][1], m[1][1]);
    QuadForm::new(
        a * p * p + b * p * r + c * r * r,
        2 * a * p * s + b * (p * t + s * r) + 2 * c * r * t,
        a * s * s + b * s * t + c * t * t,
    )
}

/// Class number by independent brute force: count SL2-reduced primitive
/// forms of discriminant `delta` over |b| <= a <= sqrt(|delta|/3).
pub fn class_number_brute(delta: i64) -> u64 {
    assert!(delta < 0 && (delta.rem_euclid(4) == 0 || delta.rem_euclid(4) == 1));
    let mut count = 0u64;
    let bound = ((delta.unsigned_abs() as f64 / 3.0).sqrt() as i64) + 1;
    for a in 1..=bound {
        for b in (-a + 1)..=a {
            let num = b * b - delta;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if a == c && b < 0 {
                continue;
            }
            if QuadForm::new(a, b, c).is_primitive() {
                count += 1;
            }
        }
    }
    count
}

pub fn class_number(d: &Discriminant) -> u64 {
    class_number_brute(d.delta)
}

/// One representative per Gamma_0(6)-class of primitive forms with
/// b == r (mod 12), sorted by (a, b); the representative minimizes a, then
/// b in [0, 2a). Each residue family is a torsor for the same class group,
/// so the count is the class number for every r in {1, 5, 7, 11}.
pub fn enumerate_classes_r(delta: i64, r: i64) -> Result<Vec<QuadForm>> {
    if delta >= 0 || delta.rem_euclid(24) != 1 {
        return Err(Error::InvalidInput(format!(
            "enumerate_classes_r: delta must be negative and 1 mod 24, got {delta}"
        )));
    }
    let h = class_number_brute(delta) as usize;
    let mut reps: Vec<QuadForm> = Vec::with_capacity(h);
    let mut seen: Vec<QuadForm> = Vec::with_capacity(h);
    let mut k = 1i64;
    let k_bound = delta.unsigned_abs() as i64;
    while reps.len() < h {
        if k > k_bound {
            return Err(Error::ConsistencyFailure(format!(
                "class enumeration for delta={delta} exhausted a <= {} with {}/{h} classes",
                6 * k_bound,
                reps.len()
            )));
        }
        let a = 6 * k;
        let mut b = r;
        while b < 2 * a {
            let num = b * b - delta;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let q = QuadForm::new(a, b, c);
                if q.is_primitive() {
                    let (red, _) = sl2_reduce(&q);
                    if !seen.contains(&red) {
                        seen.push(red);
                        reps.push(q);
                    }
                }
            }
            b += 12;
        }
        k += 1;
    }
    reps.sort_by_key(|q| (q.a, q.b));
    Ok(reps)
}

/// One representative per Gamma_0(6)-class in the Heegner normalization
/// b == 1 (mod 12).
pub fn enumerate_classes(d: &Discriminant) -> Result<Vec<QuadForm>> {
    enumerate_classes_r(d.delta, 1)
}

/// One orbit of the full Heegner system for D_n: the forms g*Q' of
/// discriminant D_n with b == 1 (mod 12) correspond to primitive forms Q'
/// of discriminant D_n / g^2 in the family b' == g^(-1) (mod 12).
#[derive(Debug, Clone)]
pub struct HeegnerOrbit {
    /// content g of the (possibly imprimitive) forms in this orbit
    pub scale: u64,
    /// discriminant D_n / g^2 of the primitive system
    pub disc: i64,
    /// residue family r = g^(-1) mod 12 of the primitive forms
    pub family: i64,
    pub forms: Vec<QuadForm>,
}

/// All Gamma_0(6)-classes of integral forms of discriminant D_n with
/// a == 0 (mod 6), b == 1 (mod 12), including imprimitive ones (content
/// g > 1 occurs exactly when g divides the conductor). The CM points of an
/// orbit with scale g are those of its primitive discriminant-D_n/g^2
/// forms, so traces over the full system are assembled orbit by orbit.
pub fn heegner_system(d: &Discriminant) -> Result<Vec<HeegnerOrbit>> {
    let mut orbits = Vec::new();
    let mut divisors = vec![1u64];
    for &(p, e) in &d.factorization {
        let mut next = Vec::new();
        for g in &divisors {
            let mut pk = 1u64;
            for _ in 0..=(e / 2) {
                next.push(g * pk);
                pk *= p;
            }
        }
        divisors = next;
    }
    divisors.sort();
    divisors.dedup();
    for g in divisors {
        let g2 = (g * g) as i64;
        if d.delta % g2 != 0 {
            continue;
        }
        let disc = d.delta / g2;
        if disc.rem_euclid(24) != 1 {
            continue;
        }
        // r = g^{-1} mod 12 (g is coprime to 12 since delta is 1 mod 24)
        let r = (1..12)
            .find(|r| (g as i64 * r) % 12 == 1)
            .expect("g coprime to 12");
        orbits.push(HeegnerOrbit {
            scale: g,
            disc,
            family: r,
            forms: enumerate_classes_r(disc, r)?,
        });
    }
    Ok(orbits)
}

/// The CM point (-b + sqrt(delta))/(2a) as a certified complex ball.
pub fn cm_point(q: &QuadForm, bits: u32) -> Result<CMPoint> {
    let delta = q.discriminant();
    if delta >= 0 || q.a <= 0 {
        return Err(Error::InvalidInput(
            "cm_point: form must be positive definite".into(),
        ));
    }
    let two_a = BigInt::from(2 * q.a);
    let re = Real::from_rational(
        &BigRational::new(BigInt::from(-q.b), two_a.clone()),
        bits,
    );
    let root = Real::from_i64(delta.unsigned_abs() as i64).sqrt(bits)?;
    let im = root.div(&Real::from_bigint(&two_a), bits)?;

    // Exact rational lower bound on Im: floor(sqrt(|D| 4^k)) / (2^k 2a).
    let k = 32u32;
    let scaled = num_bigint::BigUint::from(delta.unsigned_abs()) << (2 * k);
    let isqrt = scaled.sqrt();
    let imag_lower_bound = BigRational::new(
        BigInt::from(isqrt),
        (BigInt::from(1) << k) * two_a,
    );

    Ok(CMPoint {
        form: *q,
        value: Complex::from_parts(re, im),
        imag_lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn discriminants_for_small_n() {
        let d1 = discriminant_for(1).unwrap();
        assert_eq!((d1.delta, d1.fundamental_part, d1.conductor), (-23, -23, 1));
        let d2 = discriminant_for(2).unwrap();
        assert_eq!((d2.delta, d2.fundamental_part, d2.conductor), (-47, -47, 1));
        let d4 = discriminant_for(4).unwrap();
        assert_eq!(d4.delta, -95);
        assert_eq!(d4.factorization, vec![(5, 1), (19, 1)]);
        assert!(discriminant_for(0).is_err());
    }

    #[test]
    fn conductor_split_nonfundamental() {
        // n = 24: D = -575 = -23 * 25
        let d = discriminant_for(24).unwrap();
        assert_eq!(d.delta, -575);
        assert_eq!(d.fundamental_part, -23);
        assert_eq!(d.conductor, 5);
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number_brute(-23), 3);
        assert_eq!(class_number_brute(-47), 5);
        assert_eq!(class_number_brute(-71), 7);
        assert_eq!(class_number_brute(-95), 8);
    }

    #[test]
    fn classes_minus_23() {
        let d = discriminant_for(1).unwrap();
        let forms = enumerate_classes(&d).unwrap();
        assert_eq!(
            forms,
            vec![
                QuadForm::new(6, 1, 1),
                QuadForm::new(12, 13, 4),
                QuadForm::new(18, 25, 9)
            ]
        );
    }

    #[test]
    fn classes_minus_47_count_and_invariants() {
        // The five classes; representatives are normalized to b == 1 (mod 12),
        // so they differ from ad-hoc published lists while covering the same
        // classes.
        let d = discriminant_for(2).unwrap();
        let forms = enumerate_classes(&d).unwrap();
        assert_eq!(forms.len(), 5);
        assert_eq!(forms[0], QuadForm::new(6, 1, 2));
        assert_eq!(forms[1], QuadForm::new(12, 1, 1));
        for f in &forms {
            assert!(f.is_heegner());
            assert_eq!(f.discriminant(), -47);
        }
    }

    #[test]
    fn invariants_up_to_50() {
        for n in 1..=50u64 {
            let d = discriminant_for(n).unwrap();
            let forms = enumerate_classes(&d).unwrap();
            assert_eq!(forms.len() as u64, class_number(&d), "n={n}");
            let mut reduced: Vec<QuadForm> = Vec::new();
            for f in &forms {
                assert!(f.is_heegner(), "n={n} form {f:?}");
                let (r, m) = sl2_reduce(f);
                // the transform really carries f to r
                assert_eq!(transform_form(f, &m), r, "n={n}");
                assert_eq!(r.discriminant(), d.delta);
                assert!(!reduced.contains(&r), "duplicate class n={n}");
                reduced.push(r);
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let (r, _) = sl2_reduce(&QuadForm::new(6, 1, 1));
        assert_eq!(r, QuadForm::new(1, 1, 6));
        let (r, _) = sl2_reduce(&QuadForm::new(12, 13, 4));
        assert_eq!(r.discriminant(), -23);
        assert!(r.b.abs() <= r.a && r.a <= r.c);
        let already = QuadForm::new(1, 1, 6);
        let (r, m) = sl2_reduce(&already);
        assert_eq!(r, already);
        assert_eq!(m, [[1, 0], [0, 1]]);
    }

    #[test]
    fn cm_point_examples() {
        // [6,1,1] -> (-1 + i sqrt(23))/12
        let p = cm_point(&QuadForm::new(6, 1, 1), 128).unwrap();
        assert!((p.value.re_ball().to_f64() + 1.0 / 12.0).abs() < 1e-15);
        assert!((p.value.im_ball().to_f64() - 23f64.sqrt() / 12.0).abs() < 1e-15);
        // certified lower bound is a true lower bound, and tight
        let lb = p.imag_lower_bound.to_f64().unwrap();
        assert!(lb <= 23f64.sqrt() / 12.0);
        assert!(lb > 23f64.sqrt() / 12.0 - 1e-8);

        // [36,23,4] for D=-47 -> (-23 + i sqrt(47))/72
        let p = cm_point(&QuadForm::new(36, 23, 4), 128).unwrap();
        assert!((p.value.re_ball().to_f64() + 23.0 / 72.0).abs() < 1e-15);
        assert!((p.value.im_ball().to_f64() - 47f64.sqrt() / 72.0).abs() < 1e-15);

        // alpha satisfies a alpha^2 + b alpha + c = 0 within 2^-100
        let q = QuadForm::new(12, 13, 4);
        let p = cm_point(&q, 192).unwrap();
        let alpha = &p.value;
        let val = alpha
            .mul(alpha, 192)
            .mul_i64(q.a, 192)
            .add(&alpha.mul_i64(q.b, 192), 192)
            .add(&Complex::from_bigint(&BigInt::from(q.c)), 192);
        assert!(val.abs_below_2pow(-100));
    }
}
