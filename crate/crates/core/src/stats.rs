//! Statistical primitives: Student-t upper tail, the paired one-sided t-test,
//! and Spearman rank correlation with average ranks for ties.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
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
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=20_000 {
        let m = f64::from(m);
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
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
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
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
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`, given both `x` and `1 - x` so
/// callers can supply the complement without cancellation.
fn reg_inc_beta_split(a: f64, b: f64, x: f64, one_minus_x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if one_minus_x <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * one_minus_x.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(b, a, one_minus_x) / b
    }
}

/// Regularized incomplete beta function `I_x(a, b)` for `x` in `[0, 1]`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && (0.0..=1.0).contains(&x)) {
        return Err(Error::invalid(format!("incomplete beta undefined at a={a}, b={b}, x={x}")));
    }
    Ok(reg_inc_beta_split(a, b, x, 1.0 - x))
}

/// Upper-tail probability `P(T > t)` of Student's t with `dof` degrees of
/// freedom.
pub fn student_t_sf(t: f64, dof: u32) -> Result<f64> {
    if dof == 0 {
        return Err(Error::invalid("degrees of freedom must be at least 1"));
    }
    if t.is_nan() {
        return Err(Error::invalid("t statistic is NaN"));
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 0.0 } else { 1.0 });
    }
    let nu = f64::from(dof);
    let t2 = t * t;
    // P(|T| > |t|) = I_{nu / (nu + t^2)}(nu / 2, 1 / 2)
    let x = nu / (nu + t2);
    let one_minus_x = t2 / (nu + t2);
    let two_sided = reg_inc_beta_split(0.5 * nu, 0.5, x, one_minus_x);
    let tail = 0.5 * two_sided;
    Ok(if t >= 0.0 { tail } else { 1.0 - tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub t_statistic: f64,
    pub p_value: f64,
    pub dof: u32,
}

/// One-sided paired t-test of `mean(a - b) > 0`.
///
/// When every difference is the same value the statistic is infinite or
/// undefined; by convention p is 0 for a positive shift, 1 for a negative
/// shift and 0.5 when `a == b`.
pub fn paired_t_greater(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::invalid("paired t-test needs at least two pairs"));
    }
    if let Some(i) = a.iter().chain(b).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i % n));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let sd = var.sqrt();
    let dof = (n - 1) as u32;
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sd <= 8.0 * f64::EPSILON * scale || scale == 0.0 {
        let (t_statistic, p_value) = if mean.abs() <= 8.0 * f64::EPSILON * scale || scale == 0.0 {
            (0.0, 0.5)
        } else if mean > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (f64::NEG_INFINITY, 1.0)
        };
        return Ok(TestResult {
            t_statistic,
            p_value,
            dof,
        });
    }
    let t = mean / (sd / nf.sqrt());
    Ok(TestResult {
        t_statistic: t,
        p_value: student_t_sf(t, dof)?,
        dof,
    })
}

/// 1-based ranks with ties assigned their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation; errors when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two observations"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank-order correlation (Pearson correlation of average ranks).
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("spearman_rho needs finite inputs"));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}
