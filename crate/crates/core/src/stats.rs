//! Means, Pearson correlation and two-tailed significance from the Student-t
//! distribution.
//!
//! The t tail is evaluated through the regularized incomplete beta function:
//! for `nu` degrees of freedom, `P(|T| >= |t|) = I_x(nu/2, 1/2)` with
//! `x = nu / (nu + t^2)`. `I_x` uses the modified Lentz continued fraction.

use crate::error::AnalysisError;
use crate::real::Real;

/// Continued-fraction iteration cap.
pub const BETA_MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    label: String,
    values: Vec<T>,
}

impl<T: Real> Sample<T> {
    pub fn new(label: impl Into<String>, values: Vec<T>) -> Result<Self, AnalysisError> {
        let label = label.into();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::NonFinite(label));
        }
        Ok(Sample { label, values })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult<T> {
    pub r: T,
    pub n: usize,
    pub t_statistic: T,
    pub dof: usize,
    pub p_two_tailed: T,
}

pub fn mean<T: Real>(s: &Sample<T>) -> Result<T, AnalysisError> {
    if s.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let sum = s.values.iter().fold(T::zero(), |a, &b| a + b);
    Ok(sum / T::of(s.len() as f64))
}

/// Pearson product-moment correlation, clamped to [-1, 1].
pub fn pearson_r<T: Real>(x: &Sample<T>, y: &Sample<T>) -> Result<T, AnalysisError> {
    if x.is_empty() || y.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(AnalysisError::DegenerateSample(x.len()));
    }
    let mx = mean(x)?;
    let my = mean(y)?;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.values.iter().zip(&y.values) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() {
        return Err(AnalysisError::ZeroVariance(x.label.clone()));
    }
    if syy == T::zero() {
        return Err(AnalysisError::ZeroVariance(y.label.clone()));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// Two-tailed p-value of a Pearson coefficient `r` over `n` pairs.
pub fn p_value_two_tailed<T: Real>(r: T, n: usize) -> Result<T, AnalysisError> {
    Ok(t_test(r, n)?.1)
}

fn t_test<T: Real>(r: T, n: usize) -> Result<(T, T), AnalysisError> {
    if n < 3 {
        return Err(AnalysisError::DegenerateSample(n));
    }
    let r = r.max(-T::one()).min(T::one());
    let dof = T::of((n - 2) as f64);
    if T::one() - r.abs() <= T::of(1e-12) {
        let t = if r < T::zero() { T::neg_infinity() } else { T::infinity() };
        return Ok((t, T::zero()));
    }
    let t = r * (dof / (T::one() - r * r)).sqrt();
    Ok((t, student_t_two_tailed(t, dof)?))
}

/// `P(|T| >= |t|)` for a Student-t variable with `dof` degrees of freedom.
pub fn student_t_two_tailed<T: Real>(t: T, dof: T) -> Result<T, AnalysisError> {
    if t.is_infinite() {
        return Ok(T::zero());
    }
    let x = dof / (dof + t * t);
    let half = T::of(0.5);
    regularized_incomplete_beta(dof * half, half, x)
}

pub fn correlate<T: Real>(x: &Sample<T>, y: &Sample<T>) -> Result<CorrelationResult<T>, AnalysisError> {
    let r = pearson_r(x, y)?;
    let n = x.len();
    let (t, p) = t_test(r, n)?;
    Ok(CorrelationResult { r, n, t_statistic: t, dof: n - 2, p_two_tailed: p })
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta<T: Real>(a: T, b: T, x: T) -> Result<T, AnalysisError> {
    let fail = || AnalysisError::NonConvergence { a: a.to_string(), b: b.to_string(), x: x.to_string() };
    if !(a > T::zero() && b > T::zero()) || !(x >= T::zero() && x <= T::one()) {
        return Err(fail());
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::one() {
        return Ok(T::one());
    }
    let ln_front = a * x.ln() + b * (T::one() - x).ln() - ln_beta(a, b);
    let two = T::of(2.0);
    if x > (a + T::one()) / (a + b + two) {
        let cf = beta_continued_fraction(b, a, T::one() - x).ok_or_else(fail)?;
        Ok((T::one() - ln_front.exp() * cf / b).max(T::zero()).min(T::one()))
    } else {
        let cf = beta_continued_fraction(a, b, x).ok_or_else(fail)?;
        Ok((ln_front.exp() * cf / a).max(T::zero()).min(T::one()))
    }
}

fn beta_continued_fraction<T: Real>(a: T, b: T, x: T) -> Option<T> {
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon() * T::of(4.0);
    let one = T::one();
    let guard = |v: T| if v.abs() < tiny { tiny } else { v };

    let (qab, qap, qam) = (a + b, a + one, a - one);
    let mut c = one;
    let mut d = one / guard(one - qab * x / qap);
    let mut h = d;
    for m in 1..=BETA_MAX_ITERATIONS {
        let m = T::of(m as f64);
        let m2 = m + m;
        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one / guard(one + even * d);
        c = guard(one + even / c);
        h = h * d * c;
        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one / guard(one + odd * d);
        c = guard(one + odd / c);
        let step = d * c;
        h = h * step;
        if (step - one).abs() <= eps {
            return Some(h);
        }
    }
    None
}

fn ln_beta<T: Real>(a: T, b: T) -> T {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive arguments (Lanczos).
pub fn ln_gamma<T: Real>(z: T) -> T {
    let half = T::of(0.5);
    if z < half {
        // reflection
        let pi = T::of(std::f64::consts::PI);
        return (pi / (pi * z).sin()).ln() - ln_gamma(T::one() - z);
    }
    let z = z - T::one();
    let mut acc = T::of(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::of(c) / (z + T::of(i as f64));
    }
    let t = z + T::of(LANCZOS_G) + half;
    T::of(0.5 * (2.0 * std::f64::consts::PI).ln()) + (z + half) * t.ln() - t + acc.ln()
}
