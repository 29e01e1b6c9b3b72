//! Reference computations that share no code with the library.

/// Two-tailed Student-t tail probability by adaptive Simpson quadrature of the
/// unnormalized density. The substitution `u = tan(theta)` maps the real line
/// onto a finite interval, and dividing by the full integral removes the need
/// for any gamma-function normalizer.
pub fn t_two_tailed_quadrature(t: f64, dof: f64) -> f64 {
    let h = |theta: f64| {
        let u = theta.tan();
        let c = theta.cos();
        (1.0 + u * u / dof).powf(-(dof + 1.0) / 2.0) / (c * c)
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let tail = simpson(&h, t.abs().atan(), half_pi, 1e-14);
    let total = simpson(&h, 0.0, half_pi, 1e-14);
    tail / total
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, fa, fm, fb, whole, eps, 60)
}

#[allow(clippy::too_many_arguments)]
fn refine(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + refine(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// Successive-interval counts for -12..=12 (index `d + 12`) plus the number of
/// wider leaps, by scanning every pair once per candidate interval.
pub fn naive_interval_counts(pitches: &[u8]) -> ([u32; 25], u32) {
    let mut counts = [0u32; 25];
    for (slot, d) in (-12i32..=12).enumerate() {
        for i in 1..pitches.len() {
            if i32::from(pitches[i]) - i32::from(pitches[i - 1]) == d {
                counts[slot] += 1;
            }
        }
    }
    let pairs = pitches.len().saturating_sub(1) as u32;
    let overflow = pairs - counts.iter().sum::<u32>();
    (counts, overflow)
}

/// Closed form `I_x(1/2, 1/2) = (2/pi) asin(sqrt(x))`.
pub fn arcsine_cdf(x: f64) -> f64 {
    2.0 / std::f64::consts::PI * x.sqrt().asin()
}
