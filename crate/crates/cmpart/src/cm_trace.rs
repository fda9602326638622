//! Traces of the Maass singular moduli P(alpha_Q), exact recognition of
//! -D_n p(n), and reconstruction of the class polynomials
//! H_n(x) = prod (x - P(alpha_Q)) together with the integer-scaled
//! Hn^(x) = prod (x - D_n P(alpha_Q)) in Z[x].
//!
//! Recognition is trace-first: the trace is the smallest-height target, and
//! its success calibrates the precision plan before the full symmetric
//! functions are attempted. Failures are structural errors, never silent
//! rounding; the ladder doubles bits and terms and retries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{recognize_integer, Complex, Float, Real};
use crate::error::{Error, Result};
use crate::heegner::{cm_point, discriminant_for, heegner_system, CMPoint, Discriminant, QuadForm};
use crate::parallel::{par_map, ExecMode};
use crate::qseries::{eval_p, EvalContext};

/// The recognized trace and partition number for one n.
#[derive(Debug, Clone)]
pub struct TraceResult {
    pub n: u64,
    pub delta: i64,
    pub class_count: u64,
    pub numeric_trace: Real,
    /// T = sum_Q P(alpha_Q) = (24n - 1) p(n), exactly.
    pub exact_trace: BigInt,
    pub p_of_n: BigInt,
    pub bits_used: u32,
    pub terms_used: i64,
}

/// H_n and its integer-scaled companion.
#[derive(Debug, Clone)]
pub struct ClassPolynomial {
    pub n: u64,
    pub delta: i64,
    /// H_n(x) coefficients, constant term first, degree h; monic.
    pub rational_coeffs: Vec<BigRational>,
    /// Hn^(x) = prod (x - D_n P(alpha_Q)) in Z[x], constant term first.
    pub scaled_coeffs: Vec<BigInt>,
    pub bits_used: u32,
    pub terms_used: i64,
}

const MAX_REFINEMENTS: u32 = 6;

/// Every form of the full Heegner system (imprimitive classes appear for
/// non-fundamental D_n through their primitive companions), in a stable
/// order: orbits by ascending content, then forms by (a, b).
pub fn system_forms(d: &Discriminant) -> Result<Vec<QuadForm>> {
    let mut out = Vec::new();
    for orbit in heegner_system(d)? {
        out.extend(orbit.forms);
    }
    Ok(out)
}

fn base_context(d: &Discriminant, forms_len: usize, points: &[CMPoint]) -> EvalContext {
    let min_im = points
        .iter()
        .map(|p| p.imag_lower_bound.to_f64().unwrap_or(f64::MAX))
        .fold(f64::INFINITY, f64::min);
    EvalContext::plan(forms_len as u64, d.delta.unsigned_abs(), min_im)
}

/// Evaluate P at every CM point of the discriminant-D_n Heegner system
/// (parallel across points), following the `system_forms` order.
pub fn singular_moduli(n: u64, ctx: &EvalContext) -> Result<Vec<Complex>> {
    singular_moduli_mode(n, ctx, ExecMode::Parallel)
}

pub fn singular_moduli_mode(n: u64, ctx: &EvalContext, mode: ExecMode) -> Result<Vec<Complex>> {
    let d = discriminant_for(n)?;
    let forms = system_forms(&d)?;
    let ctx = *ctx;
    let values: Vec<Result<Complex>> = par_map(forms, mode, move |f| {
        let pt = cm_point(&f, ctx.bits)?;
        eval_p(&pt.value, &ctx)
    });
    values.into_iter().collect()
}

fn contexts_for(n: u64) -> Result<(Discriminant, EvalContext)> {
    let d = discriminant_for(n)?;
    let forms = system_forms(&d)?;
    let points: Vec<CMPoint> = forms
        .iter()
        .map(|f| cm_point(f, 64))
        .collect::<Result<_>>()?;
    let ctx = base_context(&d, forms.len(), &points);
    Ok((d, ctx))
}

/// The CM trace of P: recognizes T = sum P(alpha_Q) as an exact integer and
/// p(n) = T / (24n - 1). The trace is a small-height target, so the plan
/// drops the class-count factor from the working precision.
pub fn trace(n: u64) -> Result<TraceResult> {
    let d = discriminant_for(n)?;
    let forms = system_forms(&d)?;
    let min_im = forms
        .iter()
        .map(|f| {
            cm_point(f, 64)
                .map(|p| p.imag_lower_bound.to_f64().unwrap_or(f64::MAX))
                .unwrap_or(f64::MAX)
        })
        .fold(f64::INFINITY, f64::min);
    let ctx0 = EvalContext::plan_single(d.delta.unsigned_abs(), min_im);
    trace_with(n, &d, ctx0)
}

fn trace_with(n: u64, d: &Discriminant, ctx0: EvalContext) -> Result<TraceResult> {
    let mut ctx = ctx0;
    let mut last_err: Option<Error> = None;
    for _ in 0..=MAX_REFINEMENTS {
        match try_trace(n, d, &ctx) {
            Ok(r) => return Ok(r),
            Err(e @ (Error::PrecisionFailure(_) | Error::RecognitionFailure(_))) => {
                last_err = Some(e);
                ctx = ctx.doubled();
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::PrecisionFailure("trace: refinement budget exhausted".into())
    }))
}

fn try_trace(n: u64, d: &Discriminant, ctx: &EvalContext) -> Result<TraceResult> {
    let values = singular_moduli(n, ctx)?;
    let prec = ctx.bits;
    let mut acc = Complex::zero();
    for v in &values {
        acc = acc.add(v, prec);
    }
    // the trace is real: its imaginary ball must contain 0
    if !acc.im_ball().contains_zero() {
        return Err(Error::ConsistencyFailure(format!(
            "trace(n={n}): imaginary part does not vanish: {}",
            acc.im_ball().to_decimal(10)
        )));
    }
    let t = recognize_integer(&acc.re_ball())
        .map_err(|e| Error::RecognitionFailure(format!("trace(n={n}): {e}")))?;
    let m = BigInt::from(24 * n as i64 - 1);
    if (&t % &m) != BigInt::zero() {
        return Err(Error::ConsistencyFailure(format!(
            "trace(n={n}) = {t} is not divisible by 24n-1 = {m}"
        )));
    }
    let p = &t / &m;
    if p.is_negative() {
        return Err(Error::ConsistencyFailure(format!(
            "trace(n={n}) yields negative p(n) = {p}"
        )));
    }
    Ok(TraceResult {
        n,
        delta: d.delta,
        class_count: values.len() as u64,
        numeric_trace: acc.re_ball(),
        exact_trace: t,
        p_of_n: p,
        bits_used: ctx.bits,
        terms_used: ctx.n_terms,
    })
}

/// Multiply the monic ball polynomial `poly` (constant first) by (x - root).
fn poly_mul_linear(poly: Vec<Complex>, root: &Complex, prec: u32) -> Vec<Complex> {
    let mut out = vec![Complex::zero(); poly.len() + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i + 1] = out[i + 1].add(c, prec);
        out[i] = out[i].sub(&c.mul(root, prec), prec);
    }
    out
}

/// Class polynomial via the scaled roots D_n P(alpha_Q); integrality of the
/// scaled coefficients is the recognition target, and H_n is recovered
/// exactly from Hn^ by x -> D_n x.
pub fn class_polynomial(n: u64) -> Result<ClassPolynomial> {
    let (d, mut ctx) = contexts_for(n)?;
    let mut last_err: Option<Error> = None;
    for _ in 0..=MAX_REFINEMENTS {
        match try_class_polynomial(n, &d, &ctx) {
            Ok(r) => return Ok(r),
            Err(e @ (Error::PrecisionFailure(_) | Error::RecognitionFailure(_))) => {
                last_err = Some(e);
                ctx = ctx.doubled();
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

fn try_class_polynomial(n: u64, d: &Discriminant, ctx: &EvalContext) -> Result<ClassPolynomial> {
    let values = singular_moduli(n, ctx)?;
    let prec = ctx.bits;
    let delta = Complex::from_bigint(&BigInt::from(d.delta));
    let h = values.len();

    // scaled roots D_n P(alpha_Q)
    let mut poly = vec![Complex::one()];
    for v in &values {
        let root = v.mul(&delta, prec);
        poly = poly_mul_linear(poly, &root, prec);
    }
    debug_assert_eq!(poly.len(), h + 1);

    let mut scaled: Vec<BigInt> = Vec::with_capacity(h + 1);
    for (idx, c) in poly.iter().enumerate() {
        if !c.im_ball().contains_zero() {
            return Err(Error::ConsistencyFailure(format!(
                "scaled class polynomial coefficient {idx} has nonreal ball"
            )));
        }
        let v = recognize_integer(&c.re_ball()).map_err(|e| {
            Error::RecognitionFailure(format!(
                "class_polynomial(n={n}): coefficient x^{idx}: {e}"
            ))
        })?;
        scaled.push(v);
    }

    // H_n(x) = Hn^(D_n x) / D_n^h: coefficient j of H_n is scaled_j / D^(h-j)
    let big_delta = BigInt::from(d.delta);
    let mut rational: Vec<BigRational> = Vec::with_capacity(h + 1);
    for (j, c) in scaled.iter().enumerate() {
        let mut den = BigInt::from(1);
        for _ in 0..(h - j) {
            den *= &big_delta;
        }
        rational.push(BigRational::new(c.clone(), den));
    }

    Ok(ClassPolynomial {
        n,
        delta: d.delta,
        rational_coeffs: rational,
        scaled_coeffs: scaled,
        bits_used: ctx.bits,
        terms_used: ctx.n_terms,
    })
}

/// Continued-fraction rational recognition inside a ball: unique p/q with
/// q <= denom_bound, certified by the 1/(2 q B) separation criterion.
pub fn recognize_rational(ball: &Real, denom_bound: &BigInt) -> Result<BigRational> {
    if denom_bound.is_negative() || denom_bound.is_zero() {
        return Err(Error::InvalidInput("denom_bound must be positive".into()));
    }
    // mid as an exact rational
    let mid = float_to_rational(&ball.mid);
    let mut p_prev = BigInt::from(1);
    let mut q_prev = BigInt::from(0);
    let mut p_cur: BigInt;
    let mut q_cur: BigInt;
    let mut x = mid.clone();
    // first convergent a0
    let a0 = x.floor().to_integer();
    p_cur = a0.clone();
    q_cur = BigInt::from(1);
    x -= BigRational::from_integer(a0);

    for _ in 0..10_000 {
        let cand = BigRational::new(p_cur.clone(), q_cur.clone());
        if accept_rational(ball, &mid, &cand, denom_bound) {
            return Ok(cand);
        }
        if x.is_zero() {
            break;
        }
        x = x.recip();
        let a = x.floor().to_integer();
        x -= BigRational::from_integer(a.clone());
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        if &q_cur > denom_bound {
            break;
        }
    }
    Err(Error::RecognitionFailure(format!(
        "no rational with denominator <= {denom_bound} isolated by ball {}",
        ball.to_decimal(12)
    )))
}

fn accept_rational(ball: &Real, mid: &BigRational, cand: &BigRational, bound: &BigInt) -> bool {
    // |mid - cand| + rad < 1 / (2 q B)
    let diff = (mid - cand).abs();
    let rad = float_to_rational(&ball.rad.to_float());
    let sep = BigRational::new(BigInt::from(1), 2 * cand.denom() * bound);
    diff + rad < sep
}

fn float_to_rational(f: &Float) -> BigRational {
    let i = f.mul_2exp(0);
    // decompose: Float = sign mant 2^exp
    // route through round_to with giant precision is lossless; simpler:
    // use the decimal-free exact path below.
    let _ = i;
    let (num, den_exp) = float_parts(f);
    if den_exp >= 0 {
        BigRational::from_integer(num << den_exp as u64)
    } else {
        BigRational::new(num, BigInt::from(1) << (-den_exp) as u64)
    }
}

fn float_parts(f: &Float) -> (BigInt, i64) {
    // round_to_bigint of f * 2^k for suitable k is exact when k covers exp
    if f.is_zero() {
        return (BigInt::zero(), 0);
    }
    // exact: shift so the exponent is zero
    let bits = 0.max(-(f.top_exp() - 1)) as i64;
    let scaled = f.mul_2exp(bits + 64);
    let n = scaled.round_to_bigint();
    (n, -(bits + 64))
}

/// JSON payload for one computed n. All integers are decimal strings.
#[derive(Debug, Serialize)]
pub struct TraceJson {
    pub n: u64,
    pub delta: String,
    pub h: u64,
    pub trace: String,
    pub p: String,
    pub h_coeffs: Vec<[String; 2]>,
    pub h_scaled: Vec<String>,
    pub bits_used: u32,
    pub terms_used: i64,
}

pub fn trace_json(t: &TraceResult, poly: &ClassPolynomial) -> TraceJson {
    TraceJson {
        n: t.n,
        delta: t.delta.to_string(),
        h: t.class_count,
        trace: t.exact_trace.to_string(),
        p: t.p_of_n.to_string(),
        h_coeffs: poly
            .rational_coeffs
            .iter()
            .map(|c| [c.numer().to_string(), c.denom().to_string()])
            .collect(),
        h_scaled: poly.scaled_coeffs.iter().map(|c| c.to_string()).collect(),
        bits_used: poly.bits_used,
        terms_used: poly.terms_used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::euler_p;
    use num_bigint::BigUint;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn trace_small_n() {
        let t1 = trace(1).unwrap();
        assert_eq!(t1.exact_trace, BigInt::from(23));
        assert_eq!(t1.p_of_n, BigInt::from(1));
        let t2 = trace(2).unwrap();
        assert_eq!(t2.exact_trace, BigInt::from(94));
        assert_eq!(t2.p_of_n, BigInt::from(2));
        let t3 = trace(3).unwrap();
        assert_eq!(t3.exact_trace, BigInt::from(213));
        assert_eq!(t3.p_of_n, BigInt::from(3));
    }

    #[test]
    fn h1_coefficients_match_display() {
        // H_1 = x^3 - 23x^2 + (3592/23)x - 419
        let c = class_polynomial(1).unwrap();
        assert_eq!(c.rational_coeffs.len(), 4);
        assert_eq!(c.rational_coeffs[3], rat(1, 1));
        assert_eq!(c.rational_coeffs[2], rat(-23, 1));
        assert_eq!(c.rational_coeffs[1], rat(3592, 23));
        assert_eq!(c.rational_coeffs[0], rat(-419, 1));
        // scaled: x^3 - 529 x^2 + 82616 x - 5097973 (exact transform of the
        // displayed coefficients: 23^2, 23*3592, 23^3*419)
        let want: Vec<BigInt> = vec![
            BigInt::from(-5_097_973),
            BigInt::from(82_616),
            BigInt::from(-529),
            BigInt::from(1),
        ];
        assert_eq!(c.scaled_coeffs, want);
    }

    #[test]
    fn h2_coefficients_match_display() {
        // H_2 = x^5 - 94x^4 + (169659/47)x^3 - 65838x^2
        //       + (1092873176/2209)x + 1454023/47
        let c = class_polynomial(2).unwrap();
        assert_eq!(c.rational_coeffs[5], rat(1, 1));
        assert_eq!(c.rational_coeffs[4], rat(-94, 1));
        assert_eq!(c.rational_coeffs[3], rat(169_659, 47));
        assert_eq!(c.rational_coeffs[2], rat(-65_838, 1));
        assert_eq!(c.rational_coeffs[1], rat(1_092_873_176, 2209));
        assert_eq!(c.rational_coeffs[0], rat(1_454_023, 47));
    }

    #[test]
    fn traces_match_euler_oracle_to_12() {
        for n in 1..=12u64 {
            let t = trace(n).unwrap();
            let want = euler_p(n as usize);
            assert_eq!(
                t.p_of_n.to_biguint().unwrap(),
                want,
                "n={n}: trace route disagrees with the Euler oracle"
            );
        }
    }

    #[test]
    fn scaled_polynomial_is_integral_and_consistent() {
        for n in [1u64, 2, 4] {
            let c = class_polynomial(n).unwrap();
            let h = c.rational_coeffs.len() - 1;
            // relation: scaled_j = rational_j * delta^(h-j)
            let delta = BigInt::from(c.delta);
            for (j, r) in c.rational_coeffs.iter().enumerate() {
                let mut d = BigInt::from(1);
                for _ in 0..(h - j) {
                    d *= &delta;
                }
                assert_eq!(r * BigRational::from_integer(d), BigRational::from_integer(c.scaled_coeffs[j].clone()));
            }
            // x^(h-1) coefficient of H_n is -(24n-1) p(n)
            let t = trace(n).unwrap();
            assert_eq!(
                c.rational_coeffs[h - 1],
                BigRational::from_integer(-t.exact_trace.clone())
            );
        }
    }

    #[test]
    fn galois_stability_roots_match_moduli() {
        // evaluate H_n at each numeric root: the ball must contain 0
        let n = 2u64;
        let c = class_polynomial(n).unwrap();
        let ctx = EvalContext::new(c.bits_used, c.terms_used);
        let values = singular_moduli(n, &ctx).unwrap();
        for v in &values {
            let mut acc = Complex::zero();
            for coeff in c.rational_coeffs.iter().rev() {
                acc = acc.mul(v, ctx.bits);
                acc = acc.add(&Complex::from_rational(coeff, ctx.bits), ctx.bits);
            }
            assert!(
                acc.re_ball().contains_zero() && acc.im_ball().contains_zero(),
                "H_n does not vanish at a computed modulus"
            );
        }
        // conjugate symmetry: exactly one real value for odd h
        let t1 = trace(1).unwrap();
        assert_eq!(t1.class_count % 2, 1);
        let v1 = singular_moduli(1, &EvalContext::new(t1.bits_used, t1.terms_used)).unwrap();
        let real_count = v1.iter().filter(|v| v.im_ball().contains_zero()).count();
        assert_eq!(real_count, 1);
    }

    #[test]
    fn determinism_across_starting_precision() {
        let c1 = {
            let (d, ctx) = contexts_for(1).unwrap();
            try_class_polynomial(1, &d, &ctx).unwrap()
        };
        let c2 = {
            let (d, ctx) = contexts_for(1).unwrap();
            try_class_polynomial(1, &d, &ctx.doubled()).unwrap()
        };
        assert_eq!(c1.scaled_coeffs, c2.scaled_coeffs);
        assert_eq!(c1.rational_coeffs, c2.rational_coeffs);
    }

    #[test]
    fn recognize_rational_examples() {
        // ball(3592/23 +- 1e-8, bound 23) -> 3592/23
        let mut b = Real::from_rational(&rat(3592, 23), 128);
        b.rad = b.rad.add(&crate::arith::Mag::two_pow(-27));
        let got = recognize_rational(&b, &BigInt::from(23)).unwrap();
        assert_eq!(got, rat(3592, 23));
        // ambiguous ball fails
        let mut wide = Real::from_rational(&rat(1, 2), 64);
        wide.rad = wide.rad.add(&crate::arith::Mag::two_pow(-1));
        assert!(recognize_rational(&wide, &BigInt::from(10)).is_err());
    }

    #[test]
    fn trace_rejects_n_zero() {
        assert!(trace(0).is_err());
    }

    #[test]
    fn euler_p_cross_checks() {
        assert_eq!(euler_p(0), BigUint::from(1u32));
        assert_eq!(euler_p(4), BigUint::from(5u32));
    }
}
