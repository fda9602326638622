//! Certified evaluation of q-series at points in the upper half-plane.
//!
//! A series value is computed with ball arithmetic (every rounding accounted
//! for) plus a certified truncation-tail bound derived from the coefficient
//! envelope |a_m| <= C e^(4 pi sqrt(m)); C is fitted on the stored
//! coefficients with a 4x safety factor. The returned ball contains the true
//! value of the completed series, or a precision failure is raised when no
//! bound can be certified at the requested order.

use num_rational::BigRational;

use super::series::QSeries;
use super::standard::{e2_series, f_derivative_series, f_series};
use crate::arith::{exp, pi, sin_cos, Complex, Mag, Real};
use crate::error::{Error, Result};

/// Working precision and truncation for one evaluation run.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext {
    pub bits: u32,
    /// truncation order in full powers of q
    pub n_terms: i64,
}

impl EvalContext {
    pub fn new(bits: u32, n_terms: i64) -> Self {
        EvalContext { bits, n_terms }
    }

    /// The adaptive plan: bits = 128 + ceil(h log2 |D|), and the truncation
    /// chosen so the envelope tail at the smallest imaginary part is below
    /// 2^(-bits-16).
    pub fn plan(h: u64, abs_delta: u64, min_im: f64) -> Self {
        let bits = 128 + (h as f64 * (abs_delta as f64).log2()).ceil() as u32;
        let n_terms = plan_terms(bits, min_im);
        EvalContext { bits, n_terms }
    }

    /// A lighter plan for targets of small height (the trace itself, single
    /// reduced invariants): the class-count factor is dropped.
    pub fn plan_single(abs_delta: u64, min_im: f64) -> Self {
        let bits = 128 + (abs_delta as f64).log2().ceil() as u32;
        let n_terms = plan_terms(bits, min_im);
        EvalContext { bits, n_terms }
    }

    pub fn doubled(&self) -> Self {
        EvalContext {
            bits: self.bits * 2,
            n_terms: self.n_terms * 2,
        }
    }
}

/// Smallest truncation order making the geometric envelope tail certifiable
/// below 2^-(bits+16) at Im tau = y (with the 4 pi sqrt(m) growth).
pub fn plan_terms(bits: u32, y: f64) -> i64 {
    let target = -((bits + 16) as f64) * std::f64::consts::LN_2;
    let mut n = (1.0 / (y * y)).max(16.0);
    loop {
        // log tail ~ 4 pi sqrt(n) - 2 pi y n
        let log_tail = 4.0 * std::f64::consts::PI * n.sqrt() - 2.0 * std::f64::consts::PI * y * n;
        if log_tail < target && n > 4.0 / (y * y) {
            return n.ceil() as i64 + 8;
        }
        n *= 1.25;
    }
}

/// Certified upper bound on sum_{m >= N} |a_m| |q|^m for the envelope
/// |a_m| <= C e^(4 pi sqrt(m)), |q| <= q_up < 1. The envelope constant is
/// fitted over the stored coefficients and inflated 4x.
fn tail_bound(series: &QSeries, q_up: &Mag) -> Result<Mag> {
    if series.is_exact() || q_up.is_zero() {
        return Ok(Mag::zero());
    }
    let n = (series.trunc24() as f64 / 24.0).floor();
    let log2_q = q_up.log2_upper();
    if log2_q >= -1e-6 {
        return Err(Error::PrecisionFailure(
            "tail bound: |q| not certifiably below 1".into(),
        ));
    }
    const LOG2_E: f64 = std::f64::consts::LOG2_E;
    let four_pi = 4.0 * std::f64::consts::PI;
    // envelope fit: log2 C = max over stored m of log2|a_m| - 4 pi sqrt(m+) log2(e)
    let mut log2_c = f64::NEG_INFINITY;
    for (i, c) in series.coeffs().iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let m = (series.lead24() + 24 * i as i64) as f64 / 24.0;
        let log2_a = c.numer().bits() as f64 - c.denom().bits() as f64 + 1.0;
        let env = four_pi * m.max(0.0).sqrt() * LOG2_E;
        log2_c = log2_c.max(log2_a - env);
        if i >= 50 {
            break;
        }
    }
    if log2_c == f64::NEG_INFINITY {
        return Ok(Mag::zero());
    }
    log2_c += 2.0; // the 4x safety factor
    // ratio rho = e^(2 pi / sqrt(N)) * |q| must be < 1
    let log2_rho = 2.0 * std::f64::consts::PI / n.sqrt() * LOG2_E + log2_q;
    if log2_rho >= -1e-9 {
        return Err(Error::PrecisionFailure(format!(
            "tail bound not certifiable: N={n} too small for |q| <= 2^{log2_q:.2}"
        )));
    }
    // first term: C e^(4 pi sqrt(N)) |q|^N ; sum <= first / (1 - rho)
    let log2_first = log2_c + four_pi * n.sqrt() * LOG2_E + log2_q * n;
    let rho = log2_rho.exp2();
    let log2_sum = log2_first - (1.0 - rho).log2() + 1.0; // +1 bit margin
    if log2_sum > 60.0 {
        return Err(Error::PrecisionFailure(
            "tail bound exceeds threshold; raise the truncation order".into(),
        ));
    }
    Ok(Mag::two_pow(log2_sum.ceil() as i64))
}

/// e^(2 pi i z) as a complex ball.
pub fn exp_2pi_i(z: &Complex, prec: u32) -> Complex {
    let two_pi = pi(prec).mul_2exp(1);
    let minus_two_pi_y = two_pi.mul(&z.im_ball(), prec).neg();
    let scale = exp(&minus_two_pi_y, prec);
    let angle = two_pi.mul(&z.re_ball(), prec);
    let (s, c) = sin_cos(&angle, prec);
    Complex::from_parts(c.mul(&scale, prec), s.mul(&scale, prec))
}

/// Evaluate a series at tau (Im tau > 0). The ball contains the true value
/// of the completed series, tail included.
pub fn evaluate(series: &QSeries, tau: &Complex, ctx: &EvalContext) -> Result<Complex> {
    let prec = ctx.bits;
    if series.is_zero() {
        return Ok(Complex::zero());
    }
    // w = e^(2 pi i tau / 24), q = w^24
    let tau24 = Complex::from_parts(
        tau.re_ball()
            .div(&Real::from_i64(24), prec)
            .expect("divide by 24"),
        tau.im_ball()
            .div(&Real::from_i64(24), prec)
            .expect("divide by 24"),
    );
    let w = exp_2pi_i(&tau24, prec);
    let q = w.pow_u32(24, prec);

    let q_up = q.abs_upper();
    let tail = tail_bound(series, &q_up)?;

    // Coefficients can be far wider than the target precision; rounding a
    // partial sum of magnitude 2^C to `prec` significant bits injects an
    // absolute error 2^(C - prec), so the Horner runs at prec + C instead.
    let coeff_top: i64 = series
        .coeffs()
        .iter()
        .map(|c| c.numer().bits() as i64 - c.denom().bits() as i64 + 1)
        .max()
        .unwrap_or(0);
    let wp = prec + coeff_top.clamp(0, 1 << 20) as u32 + 16;

    // Horner over the stored coefficients (descending exponent).
    let mut acc = Complex::zero();
    for c in series.coeffs().iter().rev() {
        acc = acc.mul(&q, wp);
        if !num_traits::Zero::is_zero(c) {
            acc = acc.add(&Complex::from_rational(c, wp), wp);
        }
    }
    // multiply by w^lead24
    let lead = series.lead24();
    let lead_factor = if lead >= 0 {
        w.pow_u32(lead as u32, prec)
    } else {
        w.pow_u32((-lead) as u32, prec).recip(prec)?
    };
    let value = acc.mul(&lead_factor, prec);
    Ok(value.inflate(&tail))
}

/// The value P(tau) = -(q dF/dq)(tau) - F(tau) / (2 pi Im tau); this is the
/// weight-0 Maass value whose CM traces give the partition numbers.
pub fn eval_p(tau: &Complex, ctx: &EvalContext) -> Result<Complex> {
    let prec = ctx.bits;
    let f = f_series(ctx.n_terms);
    let fd = f_derivative_series(ctx.n_terms);
    let f_val = evaluate(&f, tau, ctx)?;
    let fd_val = evaluate(&fd, tau, ctx)?;
    let two_pi_y = pi(prec).mul_2exp(1).mul(&tau.im_ball(), prec);
    let correction = f_val.mul_real(&two_pi_y.recip(prec)?, prec);
    Ok(fd_val.add(&correction, prec).neg())
}

/// E2*(tau) = E2(tau) - 3/(pi Im tau).
pub fn eval_e2_star(tau: &Complex, ctx: &EvalContext) -> Result<Complex> {
    let prec = ctx.bits;
    let e2 = e2_series(ctx.n_terms);
    let e2_val = evaluate(&e2, tau, ctx)?;
    let pi_y = pi(prec).mul(&tau.im_ball(), prec);
    let corr = Real::from_i64(3).div(&pi_y, prec)?;
    Ok(e2_val.sub(&Complex::from_real(corr), prec))
}

/// Holomorphic-part helper: (q dF/dq)(tau) + E2(tau) F(tau) / 6 is the
/// weight-(-2) Serre derivative of F; the split identity is
/// P = -(Serre derivative) + E2* F / 6.
pub fn eval_serre_derivative_f(tau: &Complex, ctx: &EvalContext) -> Result<Complex> {
    let prec = ctx.bits;
    let f = f_series(ctx.n_terms);
    let fd = f_derivative_series(ctx.n_terms);
    let e2 = e2_series(ctx.n_terms);
    let f_val = evaluate(&f, tau, ctx)?;
    let fd_val = evaluate(&fd, tau, ctx)?;
    let e2_val = evaluate(&e2, tau, ctx)?;
    let sixth = Real::from_rational(
        &BigRational::new(1.into(), 6.into()),
        prec,
    );
    Ok(fd_val.add(&e2_val.mul(&f_val, prec).mul_real(&sixth, prec), prec))
}

pub fn eval_f(tau: &Complex, ctx: &EvalContext) -> Result<Complex> {
    evaluate(&f_series(ctx.n_terms), tau, ctx)
}

/// A certified f64 lower bound on the imaginary part of a ball point.
pub fn im_lower_bound(tau: &Complex) -> Result<f64> {
    let imb = tau.im_ball();
    let y = imb.to_f64() - imb.rad.to_f64() * 1.001 - 1e-300;
    if y <= 0.0 {
        return Err(Error::InvalidInput("point not in the upper half-plane".into()));
    }
    Ok(y * (1.0 - 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heegner::{cm_point, QuadForm};
    use crate::qseries::standard::{eta_series, j_series};
    use num_bigint::BigInt;

    fn tau_i(_prec: u32) -> Complex {
        Complex::from_parts(Real::zero(), Real::from_i64(1))
    }

    #[test]
    fn eta_at_i_classical_value() {
        // eta(i) = Gamma(1/4) / (2 pi^(3/4)) ~ 0.7682254223260566
        // Oracle: direct pentagonal summation at two precisions.
        let ctx = EvalContext::new(128, 64);
        let tau = tau_i(ctx.bits);
        let eta = eta_series(1, ctx.n_terms);
        let v1 = evaluate(&eta, &tau, &ctx).unwrap();
        let direct: f64 = {
            let q = (-2.0 * std::f64::consts::PI).exp();
            let mut sum = 0.0f64;
            for k in -12i32..=12 {
                let e = (6.0 * k as f64 + 1.0).powi(2) / 24.0;
                sum += if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 } * q.powf(e);
            }
            sum
        };
        assert!((v1.re_ball().to_f64() - direct).abs() < 1e-12);
        assert!(v1.re_ball().to_f64().to_string().starts_with("0.768225"));
        // higher precision ball is nested in the lower one
        let ctx2 = EvalContext::new(256, 128);
        let v2 = evaluate(&eta, &tau_i(ctx2.bits), &ctx2).unwrap();
        assert!((v2.re_ball().to_f64() - v1.re_ball().to_f64()).abs() <= v1.rad.to_f64());
        assert!(v2.rad.to_f64() < v1.rad.to_f64());
    }

    #[test]
    fn j_at_i_is_1728() {
        let ctx = EvalContext::new(192, 80);
        let tau = tau_i(ctx.bits);
        let j = j_series(ctx.n_terms);
        let v = evaluate(&j, &tau, &ctx).unwrap();
        assert!(v.re_ball().contains_bigint(&BigInt::from(1728)));
        assert!(v.im_ball().contains_bigint(&BigInt::from(0)));
        assert!(v.rad.to_f64() < 1e-40);
    }

    #[test]
    fn constant_series_evaluates_exactly() {
        let ctx = EvalContext::new(96, 16);
        let one = QSeries::exact_polynomial(0, vec![num_rational::BigRational::from_integer(1.into())]);
        let tau = tau_i(ctx.bits);
        let v = evaluate(&one, &tau, &ctx).unwrap();
        assert!(v.re_ball().contains_bigint(&BigInt::from(1)));
        assert!(v.rad.is_zero());
    }

    #[test]
    fn e2_at_i_is_3_over_pi() {
        // classical: E2(i) = 3/pi, i.e. E2*(i) = 0
        let ctx = EvalContext::new(192, 96);
        let tau = tau_i(ctx.bits);
        let star = eval_e2_star(&tau, &ctx).unwrap();
        assert!(star.abs_below_2pow(-150));
        let e2v = evaluate(&e2_series(ctx.n_terms), &tau, &ctx).unwrap();
        assert!((e2v.re_ball().to_f64() - 3.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!((e2v.re_ball().to_f64() - 0.9549296585513720).abs() < 1e-12);
    }

    #[test]
    fn e2_star_real_on_imaginary_axis() {
        let ctx = EvalContext::new(128, 64);
        let tau = Complex::from_parts(
            Real::zero(),
            Real::from_rational(&num_rational::BigRational::new(7.into(), 5.into()), 128),
        );
        let star = eval_e2_star(&tau, &ctx).unwrap();
        assert!(star.im_ball().abs_below_2pow(-100));
    }

    #[test]
    fn tail_refusal_when_order_too_small() {
        // At a low point (Im ~ 0.09) a 16-term truncation cannot be certified.
        let p = cm_point(&QuadForm::new(144, 1, 1), 128).unwrap();
        let _ = p;
        let ctx = EvalContext::new(64, 8);
        let tau = Complex::from_parts(
            Real::zero(),
            Real::from_rational(&num_rational::BigRational::new(9.into(), 100.into()), 64),
        );
        let eta = eta_series(1, ctx.n_terms);
        assert!(matches!(
            evaluate(&eta, &tau, &ctx),
            Err(Error::PrecisionFailure(_))
        ));
    }

    #[test]
    fn split_p_identity_at_cm_point() {
        // P = -(SerreD F) + E2* F / 6 must match the direct definition
        // P = -(q dF/dq) - F/(2 pi y) at any point; check at alpha for
        // [6,1,1] (D = -23).
        let ctx = EvalContext::new(160, 120);
        let p = cm_point(&QuadForm::new(6, 1, 1), ctx.bits).unwrap();
        let direct = eval_p(&p.value, &ctx).unwrap();
        let serre = eval_serre_derivative_f(&p.value, &ctx).unwrap();
        let f_val = eval_f(&p.value, &ctx).unwrap();
        let star = eval_e2_star(&p.value, &ctx).unwrap();
        let sixth = Real::from_rational(&num_rational::BigRational::new(1.into(), 6.into()), ctx.bits);
        let split = serre
            .neg()
            .add(&star.mul(&f_val, ctx.bits).mul_real(&sixth, ctx.bits), ctx.bits);
        let diff = direct.sub(&split, ctx.bits);
        assert!(diff.abs_below_2pow(-100), "split/direct mismatch: {}", diff.to_decimal(8));
    }
}
