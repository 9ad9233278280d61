use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

const LN_FACTORIAL_TABLE: usize = 4096;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let mut acc = 0.0_f64;
        t.push(0.0);
        for n in 1..LN_FACTORIAL_TABLE {
            acc += (n as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`, tabulated for small `n` and from Stirling's series beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n < LN_FACTORIAL_TABLE {
        return ln_factorial_table()[n];
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `ln|C(z, k)|` and the sign of the generalized binomial coefficient.
///
/// The sign is `0.0` when the coefficient vanishes.
pub fn ln_binomial_signed(z: f64, k: usize) -> (f64, f64) {
    let mut ln = -ln_factorial(k);
    let mut sign = 1.0;
    for i in 0..k {
        let f = z - i as f64;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if f < 0.0 {
            sign = -sign;
        }
        ln += f.abs().ln();
    }
    (ln, sign)
}

/// Generalized binomial `C(z, k)` for real `z`.
pub fn binomial(z: f64, k: usize) -> f64 {
    let (ln, sign) = ln_binomial_signed(z, k);
    if sign == 0.0 {
        0.0
    } else {
        sign * ln.exp()
    }
}

/// Exact generalized binomial `C(z, k)` for integer `z`; `None` on i128 overflow.
pub fn binomial_i128(z: i64, k: usize) -> Option<i128> {
    let mut c: i128 = 1;
    for i in 0..k {
        // C(z, i) * (z - i) is divisible by (i + 1).
        c = c.checked_mul(z as i128 - i as i128)? / (i as i128 + 1);
    }
    Some(c)
}

/// Jacobi polynomial `P_n^(alpha, beta)(x)` from its finite binomial sum.
///
/// Valid for arbitrary real `alpha`, `beta` (including negative integers,
/// where the classical weight is not integrable).
pub fn jacobi_p(n: usize, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if !(alpha.is_finite() && beta.is_finite() && x.is_finite()) {
        return Err(invalid("jacobi_p", "arguments must be finite"));
    }
    let u = 0.5 * (x - 1.0);
    let v = 0.5 * (x + 1.0);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for s in 0..=n {
        let (l1, s1) = ln_binomial_signed(n as f64 + alpha, n - s);
        let (l2, s2) = ln_binomial_signed(n as f64 + beta, s);
        if s1 == 0.0 || s2 == 0.0 {
            continue;
        }
        let term = s1 * s2 * (l1 + l2).exp() * u.powi(s as i32) * v.powi((n - s) as i32);
        // Neumaier summation; the terms alternate for the arguments used here.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

/// Integer coefficients `e_j` with
/// `mu^(2n) P_n^(alpha, beta)(-1 - 2/mu^2) = (-1)^n sum_j e_j mu^(2j)`.
///
/// Evaluating the polynomial on the right avoids the catastrophic
/// cancellation of the binomial sum at arguments below -1. Returns `None`
/// if an intermediate value leaves the i128 range.
pub fn jacobi_reciprocal_expansion(n: usize, alpha: i64, beta: i64) -> Option<Vec<i128>> {
    let nn = n as i64;
    let mut g = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let a = binomial_i128(nn + alpha, n - s)?;
        let b = binomial_i128(nn + beta, s)?;
        g.push(a.checked_mul(b)?);
    }
    let mut e = vec![0i128; n + 1];
    for (s, &gs) in g.iter().enumerate() {
        if gs == 0 {
            continue;
        }
        let mut c: i128 = 1;
        for (j, ej) in e.iter_mut().enumerate().take(s + 1) {
            *ej = ej.checked_add(gs.checked_mul(c)?)?;
            c = c * (s - j) as i128 / (j as i128 + 1);
        }
    }
    Some(e)
}

/// Terminating generalized hypergeometric series `pFq(upper; lower; x)`.
///
/// One upper parameter must be a non-positive integer `-m`; the series is
/// summed exactly over its `m + 1` terms, accumulating term magnitudes in
/// log space so that large intermediate Pochhammer ratios do not overflow.
pub fn hyp_pfq_terminating(upper: &[f64], lower: &[f64], x: f64) -> Result<f64> {
    let m = upper
        .iter()
        .filter(|a| **a <= 0.0 && a.fract() == 0.0)
        .map(|a| (-a) as usize)
        .min()
        .ok_or(Error::NonTerminating)?;
    if !x.is_finite() {
        return Err(invalid("x", "must be finite"));
    }
    let mut ln_terms = Vec::with_capacity(m + 1);
    let mut signs = Vec::with_capacity(m + 1);
    let (mut ln_t, mut sign) = (0.0_f64, 1.0_f64);
    ln_terms.push(ln_t);
    signs.push(sign);
    for j in 0..m {
        let jf = j as f64;
        for &b in lower {
            let d = b + jf;
            if d == 0.0 {
                return Err(Error::HypergeometricPole(j));
            }
            ln_t -= d.abs().ln();
            if d < 0.0 {
                sign = -sign;
            }
        }
        let mut zero = false;
        for &a in upper {
            let d = a + jf;
            if d == 0.0 {
                zero = true;
                break;
            }
            ln_t += d.abs().ln();
            if d < 0.0 {
                sign = -sign;
            }
        }
        if zero || x == 0.0 {
            break;
        }
        ln_t += x.abs().ln() - (jf + 1.0).ln();
        if x < 0.0 {
            sign = -sign;
        }
        ln_terms.push(ln_t);
        signs.push(sign);
    }
    let peak = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (l, s) in ln_terms.iter().zip(&signs) {
        sum += s * (l - peak).exp();
    }
    Ok(sum * peak.exp())
}

/// `2F1(-n, b; c; x)`.
pub fn hyp2f1_terminating(n: usize, b: f64, c: f64, x: f64) -> Result<f64> {
    hyp_pfq_terminating(&[-(n as f64), b], &[c], x)
}

/// `4F3(a1..a4; b1..b3; x)`, terminating.
pub fn hyp4f3_terminating(upper: [f64; 4], lower: [f64; 3], x: f64) -> Result<f64> {
    hyp_pfq_terminating(&upper, &lower, x)
}

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const CF_SWITCH: f64 = 2.0;

/// `e^(-x^2) * sum 2^n x^(2n+1) / (2n+1)!!`: every term is positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// `sqrt(pi) e^(x^2) erfc(x)` for `x >= CF_SWITCH` by the modified Lentz
/// evaluation of the Laplace continued fraction.
fn erfc_scaled_cf(x: f64) -> f64 {
    // erfc(x) = e^(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 3.0 {
        erf_series(x)
    } else {
        1.0 - erfc(x)
    }
}

/// Complementary error function, accurate in relative terms for large `x`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < CF_SWITCH {
        return 1.0 - erf(x);
    }
    if x > 27.3 {
        return 0.0;
    }
    (-x * x).exp() * erfc_scaled_cf(x) / PI.sqrt()
}

/// Scaled complementary error function `e^(x^2) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < CF_SWITCH {
        return (x * x).exp() * (1.0 - erf(x));
    }
    erfc_scaled_cf(x) / PI.sqrt()
}
