//! Log-space evaluation of the asymptotic formulas: the bubble/bridge
//! model, bridge-count moments, the crystallized-diagram asymptotics and
//! the short-chord moments.
//!
//! Everything is evaluated in natural-log space with explicit sign
//! tracking; magnitudes at n = 1000 overflow any fixed-width float.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// A real number stored as `sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    /// Natural log of the absolute value; `NEG_INFINITY` when sign is 0.
    pub log_abs: f64,
    /// +1, -1, or 0.
    pub sign: i8,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        log_abs: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn positive(log_abs: f64) -> Self {
        LogValue { log_abs, sign: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The plain value; +/- infinity when the magnitude overflows f64.
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }
}

/// ln(m!).
fn ln_fact(m: f64) -> f64 {
    ln_gamma(m + 1.0)
}

/// ln((2m-1)!!) via (2m-1)!! = (2m)! / (2^m m!); m = 0 gives 0.
fn ln_dfact_odd(m: f64) -> f64 {
    ln_fact(2.0 * m) - m * std::f64::consts::LN_2 - ln_fact(m)
}

/// ln C(a, b) with the combinatorial convention: zero ways (returns None)
/// unless 0 <= b <= a.
fn ln_binom(a: i64, b: i64) -> Option<f64> {
    if b < 0 || a < 0 || b > a {
        return None;
    }
    Some(ln_fact(a as f64) - ln_fact(b as f64) - ln_fact((a - b) as f64))
}

/// ln of the falling factorial (x)_b = x (x-1) ... (x-b+1).
fn ln_falling(x: i64, b: i64) -> Option<f64> {
    if b < 0 || x < b {
        return None;
    }
    Some(ln_fact(x as f64) - ln_fact((x - b) as f64))
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Domain and parity guard shared by the model evaluators: bubbles of
/// size q with b bridges require q - b and 2(n-1) - (q + b) both even and
/// nonnegative inside/outside matchings.
fn model_domain(n: usize, q: usize, b: usize) -> Option<(i64, i64, i64)> {
    let (n, q, b) = (n as i64, q as i64, b as i64);
    if b > q || q > 2 * n {
        return None;
    }
    let outside = 2 * (n - 1) - q;
    if outside < b {
        return None;
    }
    if (q - b) % 2 != 0 || (outside - b) % 2 != 0 {
        return None;
    }
    Some((n, q, b))
}

/// The bubble/bridge model for N_{q,b}(n): the full double sum over the
/// would-be-short-chord count p and the free bridge endpoints b0.
/// Parity or domain violations yield the zero value (the model assigns no
/// configurations there).
pub fn model_nqb(n: usize, q: usize, b: usize) -> LogValue {
    let Some((n, q, b)) = model_domain(n, q, b) else {
        return LogValue::ZERO;
    };
    let outside = 2 * (n - 1) - q;
    let Some(placements) = ln_falling(outside, b) else {
        return LogValue::ZERO;
    };
    // Common prefactor: 2 (2(n-1)-q)_b (2(n-1)-(q+b)-1)!! (q-b-1)!! / e.
    let prefix = std::f64::consts::LN_2 + placements + ln_dfact_odd(((outside - b) / 2) as f64)
        + ln_dfact_odd(((q - b) / 2) as f64)
        - 1.0;

    let mut terms = Vec::new();
    for p in 0..=b {
        // p = 0: no would-be short chords, so all b endpoints are free;
        // the b0 sum degenerates to the single term b0 = b, i.e. C(q, b).
        let inner: Vec<f64> = if p == 0 {
            ln_binom(q, b).map(|x| vec![x]).unwrap_or_default()
        } else {
            (0..=(b - p))
                .filter_map(|b0| {
                    let free = ln_binom(b0 + q - b - p, b0)?;
                    let punctured = ln_binom(b - b0 - 1, p - 1)?;
                    Some(free + punctured)
                })
                .collect()
        };
        if inner.is_empty() {
            continue;
        }
        terms.push(log_sum_exp(&inner) - ln_fact(p as f64));
    }
    if terms.is_empty() {
        return LogValue::ZERO;
    }
    LogValue::positive(prefix + log_sum_exp(&terms))
}

/// The simplified leading form of the model (binomial in place of the
/// p-sum, sum_p 1/p! replaced by e).
pub fn model_nqb_leading(n: usize, q: usize, b: usize) -> LogValue {
    let Some((n, q, b)) = model_domain(n, q, b) else {
        return LogValue::ZERO;
    };
    let outside = 2 * (n - 1) - q;
    let (Some(placements), Some(choose)) = (ln_falling(outside, b), ln_binom(q, b)) else {
        return LogValue::ZERO;
    };
    LogValue::positive(
        std::f64::consts::LN_2
            + placements
            + ln_dfact_odd(((outside - b) / 2) as f64)
            + ln_dfact_odd(((q - b) / 2) as f64)
            + choose,
    )
}

/// Mean number of bridges in a bubble of size q: q(2(n-1)-q)/(2(n-1)).
pub fn mean_bridges(n: usize, q: usize) -> f64 {
    let q = q as f64;
    let m = 2.0 * (n as f64 - 1.0);
    q * (m - q) / m
}

/// The n -> infinity limit form: q(2n-q)/(2n).
pub fn mean_bridges_limit(n: usize, q: usize) -> f64 {
    let q = q as f64;
    let m = 2.0 * n as f64;
    q * (m - q) / m
}

/// Variance of the bridge count: q^2 (2(n-1)-q)^2 / (4(n-1)^3).
pub fn var_bridges(n: usize, q: usize) -> f64 {
    let q = q as f64;
    let nm1 = n as f64 - 1.0;
    let d = 2.0 * nm1 - q;
    q * q * d * d / (4.0 * nm1 * nm1 * nm1)
}

/// Asymptotic R_{n,k}:
/// (k+1)^(-1/2) 2^(n+1/2) e^(k-n) k^(n-k/2) pi^(k/2) ((n-k)/(k+1))^(n-k/2).
pub fn log_rnk_asympt(n: usize, k: usize) -> Result<LogValue> {
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "rnk asymptotics require 1 <= k < n, got n={n} k={k}"
        )));
    }
    let (nf, kf) = (n as f64, k as f64);
    let log = -0.5 * (kf + 1.0).ln()
        + (nf + 0.5) * std::f64::consts::LN_2
        + (kf - nf)
        + (nf - kf / 2.0) * kf.ln()
        + (kf / 2.0) * std::f64::consts::PI.ln()
        + (nf - kf / 2.0) * ((nf - kf) / (kf + 1.0)).ln();
    Ok(LogValue::positive(log))
}

/// Asymptotic C_{n,k,q}, valid for n >> k ~ q >> 1.
pub fn log_cnkq_asympt(n: usize, k: usize, q: usize) -> Result<LogValue> {
    if k < 2 || n <= k + q {
        return Err(Error::Domain(format!(
            "cnkq asymptotics require k >= 2 and n > k + q, got n={n} k={k} q={q}"
        )));
    }
    let (nf, kf, qf) = (n as f64, k as f64, q as f64);
    let log = -0.5 * kf.ln()
        + (nf - qf - 0.5) * std::f64::consts::LN_2
        + (kf - nf)
        + (nf - qf - (kf + 1.0) / 2.0) * (kf - 1.0).ln()
        + (kf + 1.0).ln()
        + ((kf - 1.0) / 2.0) * std::f64::consts::PI.ln()
        + (nf - qf - (kf + 1.0) / 2.0) * ((nf - kf - qf) / kf).ln()
        + (0.5 + kf - 2.0 * nf + 2.0 * qf) * (2.0 * nf - 2.0 * qf - kf - 1.0).ln()
        + (-0.5 - kf + 2.0 * nf - qf) * (2.0 * nf - qf - kf - 1.0).ln();
    Ok(LogValue::positive(log))
}

/// Asymptotic moments of the short-chord count in crystallized diagrams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortChordMoments {
    pub n: usize,
    /// Leading-order mean: sqrt(2n / log n).
    pub kbar_leading: f64,
    /// Cubic-refined mean:
    /// sqrt(2n / log(n/pi)) - 1/2 - 1/(2 log(n/pi)).
    pub kbar_refined: f64,
    /// Var(k) ~ kbar^3 / (2n), with the refined kbar.
    pub variance: f64,
    /// Mean bubble size qbar = 2n / kbar_leading.
    pub qbar: f64,
}

pub fn short_chord_moments(n: usize) -> Result<ShortChordMoments> {
    if n < 3 {
        return Err(Error::Domain(format!("short-chord moments require n >= 3, got {n}")));
    }
    let nf = n as f64;
    let kbar_leading = (2.0 * nf / nf.ln()).sqrt();
    let log_np = (nf / std::f64::consts::PI).ln();
    let kbar_refined = (2.0 * nf / log_np).sqrt() - 0.5 - 1.0 / (2.0 * log_np);
    let variance = kbar_refined.powi(3) / (2.0 * nf);
    Ok(ShortChordMoments {
        n,
        kbar_leading,
        kbar_refined,
        variance,
        qbar: 2.0 * nf / kbar_leading,
    })
}
