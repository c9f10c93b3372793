//! Scalar special functions backing the closed-form SIR distributions:
//! log-gamma, the beta function, the regularized incomplete beta function,
//! and the Gauss hypergeometric function ₂F₁ on nonpositive arguments.
//!
//! Everything here is a pure function of its arguments. Iteration budgets
//! are hard limits; exhausting one returns [`Error::NoConvergence`] instead
//! of a truncated value.

use crate::error::{Error, Result};

/// Power-series budget for ₂F₁.
pub const MAX_SERIES_TERMS: usize = 500;
/// Continued-fraction budget for the incomplete beta function.
pub const MAX_CF_STEPS: usize = 300;

// Lanczos approximation with g = 7 and 9 double-precision coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

fn log_gamma_unchecked(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        // reflection: ln Γ(x) = ln(π / sin(πx)) − ln Γ(1 − x)
        (PI / (PI * x).sin()).ln() - log_gamma_unchecked(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Beta function B(p, q) = Γ(p)Γ(q)/Γ(p+q) for p, q > 0.
pub fn beta(p: f64, q: f64) -> Result<f64> {
    Ok(ln_beta(p, q)?.exp())
}

/// ln B(p, q); keeps products finite for large shape factors.
pub fn ln_beta(p: f64, q: f64) -> Result<f64> {
    if !(p.is_finite() && p > 0.0 && q.is_finite() && q > 0.0) {
        return Err(Error::Domain(format!(
            "beta requires positive arguments, got ({p}, {q})"
        )));
    }
    Ok(log_gamma_unchecked(p) + log_gamma_unchecked(q) - log_gamma_unchecked(p + q))
}

/// Regularized incomplete beta function I_u(p, q) for u in [0, 1].
///
/// Continued fraction evaluated with Lentz's method, with the symmetry
/// swap I_u(p, q) = 1 − I_{1−u}(q, p) when u is past (p+1)/(p+q+2) so the
/// fraction always runs on its fast-converging side.
pub fn reg_inc_beta(u: f64, p: f64, q: f64) -> Result<f64> {
    if !(p.is_finite() && p > 0.0 && q.is_finite() && q > 0.0) {
        return Err(Error::Domain(format!(
            "reg_inc_beta requires positive shapes, got ({p}, {q})"
        )));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!(
            "reg_inc_beta requires u in [0, 1], got {u}"
        )));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u == 1.0 {
        return Ok(1.0);
    }
    let front = (p * u.ln() + q * (1.0 - u).ln() - ln_beta(p, q)?).exp();
    if u < (p + 1.0) / (p + q + 2.0) {
        Ok(front * beta_cf(p, q, u)? / p)
    } else {
        Ok(1.0 - front * beta_cf(q, p, 1.0 - u)? / q)
    }
}

/// Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cf(p: f64, q: f64, u: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;

    let pq = p + q;
    let pp1 = p + 1.0;
    let pm1 = p - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - pq * u / pp1;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_CF_STEPS {
        let mf = m as f64;
        let m2 = 2.0 * mf;

        // even step
        let aa = mf * (q - mf) * u / ((pm1 + m2) * (p + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        // odd step
        let aa = -(p + mf) * (pq + mf) * u / ((p + m2) * (pp1 + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        what: "incomplete beta continued fraction",
        budget: MAX_CF_STEPS,
    })
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for z ≤ 0 and positive
/// a, b, c.
///
/// The Pfaff transformation ₂F₁(a, b; c; z) = (1−z)^−a ₂F₁(a, c−b; c; w)
/// maps z ≤ 0 onto w = z/(z−1) ∈ [0, 1), where the defining power series
/// converges. Arguments far enough into the tail that the series cannot
/// reach tolerance within the term budget are an error.
pub fn gauss_2f1_neg(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0 && c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!(
            "gauss_2f1_neg requires positive a, b, c, got ({a}, {b}, {c})"
        )));
    }
    if !z.is_finite() || z > 0.0 {
        return Err(Error::Domain(format!(
            "gauss_2f1_neg requires z <= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let w = z / (z - 1.0);
    Ok((1.0 - z).powf(-a) * hyp_series(a, c - b, c, w)?)
}

/// Power series Σ (a)ₙ(b)ₙ/((c)ₙ n!) wⁿ for 0 ≤ w < 1. The `b` slot may be
/// nonpositive, in which case the series terminates.
fn hyp_series(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut was_small = false;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * w;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        let small = term.abs() <= f64::EPSILON * sum.abs();
        if small && was_small {
            return Ok(sum);
        }
        was_small = small;
    }
    Err(Error::NoConvergence {
        what: "hypergeometric series",
        budget: MAX_SERIES_TERMS,
    })
}
