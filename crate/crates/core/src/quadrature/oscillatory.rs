use super::{integrate, integrate_with_breaks, QuadratureConfig};
use crate::error::{Error, Result};
use crate::result::{EvalResult, Method};

const STALL_CYCLES: usize = 50;
const WYNN_WINDOW: usize = 24;

/// ∫_R^∞ A x^{−p} dx.
pub fn power_tail_bound(r: f64, amplitude: f64, p: f64) -> f64 {
    amplitude * r.powf(1.0 - p) / (p - 1.0)
}

/// Last even-column entry of the Wynn epsilon table built from `s`.
fn wynn(s: &[f64]) -> f64 {
    let n = s.len();
    if n < 3 {
        return s[n - 1];
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = s[n - 1];
    let mut col = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                return if col % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

fn locate_zero<F: Fn(f64) -> f64>(f: &F, center: f64, half: f64) -> Option<f64> {
    let n = 32;
    let mut best: Option<f64> = None;
    let mut x0 = center - half;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = center - half + 2.0 * half * i as f64 / n as f64;
        let f1 = f(x1);
        if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            let z = 0.5 * (lo + hi);
            if best.is_none_or(|b: f64| (z - center).abs() < (b - center).abs()) {
                best = Some(z);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    best
}

/// ∫_a^∞ f for an integrand whose zeros are asymptotically `zero_spacing`
/// apart and whose envelope decays like x^{−p}, p = `cfg.tail_exponent_hint`.
///
/// Cycles are integrated one at a time; sign-alternating cycle sums are
/// accelerated with the Wynn epsilon algorithm, same-sign sums are summed
/// until the envelope tail is negligible.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    zero_spacing: f64,
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    cfg.validate()?;
    if !(zero_spacing > 0.0) || !zero_spacing.is_finite() || !a.is_finite() {
        return Err(Error::InvalidParameter("zero spacing must be positive".into()));
    }
    let p = cfg.tail_exponent_hint;
    if !(p > 1.0) {
        return Err(Error::InvalidParameter("tail exponent must exceed 1".into()));
    }
    let h = zero_spacing;
    let mut phase = 0.0;
    let mut lo = a;
    let mut partial = Vec::new();
    let mut cycle_sums: Vec<f64> = Vec::new();
    let mut sum = 0.0f64;
    let mut quad_err = 0.0f64;
    let mut evaluations = 0usize;
    let mut best_abs = f64::INFINITY;
    let mut stall = 0usize;
    let mut resabs = 0.0f64;
    let mut last_estimates: Vec<f64> = Vec::new();
    for k in 0..cfg.max_subdivisions {
        if k == 5 {
            if let Some(z) = locate_zero(&f, a + 6.0 * h, 0.5 * h) {
                phase = z - (a + 6.0 * h);
            }
        }
        let mut hi = a + phase + (k + 1) as f64 * h;
        if hi <= lo {
            hi = lo + h;
        }
        let c = integrate(&f, lo, hi, cfg)?;
        evaluations += c.terms_or_nodes;
        quad_err += c.abs_error_estimate;
        resabs += c.value.abs() * c.cancellation_ratio;
        sum += c.value;
        partial.push(sum);
        cycle_sums.push(c.value);
        lo = hi;

        if c.value.abs() < best_abs {
            best_abs = c.value.abs();
            stall = 0;
        } else {
            stall += 1;
            if stall >= STALL_CYCLES {
                return Err(Error::NonDecayingEnvelope(STALL_CYCLES));
            }
        }
        if k < 7 {
            continue;
        }
        let n = cycle_sums.len();
        let alternating = cycle_sums[n - 4..].windows(2).all(|w| w[0] * w[1] < 0.0);
        let amp = envelope_amplitude(&f, hi - h, hi, p);
        let floor = cfg.abs_tol;
        if alternating {
            let window = &partial[partial.len().saturating_sub(WYNN_WINDOW)..];
            let est = wynn(window);
            last_estimates.push(est);
            let m = last_estimates.len();
            if m >= 3 {
                let d1 = (last_estimates[m - 1] - last_estimates[m - 2]).abs();
                let d2 = (last_estimates[m - 2] - last_estimates[m - 3]).abs();
                let tol = (cfg.osc_cycle_tol * est.abs()).max(floor);
                if d1 <= tol && d2 <= tol {
                    let tail = amp * hi.powf(-p) * h;
                    let err = quad_err + d1.max(d2) + tail;
                    return Ok(EvalResult::new(est, err, Method::Quadrature, evaluations)
                        .with_cancellation(crate::result::ratio_of(resabs, est)));
                }
            }
        } else {
            last_estimates.clear();
            let tail = power_tail_bound(hi, amp, p);
            let tol = (cfg.osc_cycle_tol.max(cfg.rel_tol) * sum.abs()).max(floor);
            let recent_small = cycle_sums[n - 3..].iter().all(|c| c.abs() <= cfg.osc_cycle_tol * sum.abs());
            if tail <= tol || recent_small {
                // same-sign cycles: everything beyond hi is still missing
                let err = quad_err + tail;
                return Ok(EvalResult::new(sum, err, Method::Quadrature, evaluations)
                    .with_cancellation(crate::result::ratio_of(resabs, sum)));
            }
        }
    }
    // Cycle budget spent: report what was reached with the envelope tail bound.
    let amp = envelope_amplitude(&f, lo - h, lo, p);
    let tail = power_tail_bound(lo, amp, p);
    let value = if last_estimates.is_empty() { sum } else { *last_estimates.last().unwrap() };
    Ok(EvalResult::new(value, quad_err + tail, Method::Quadrature, evaluations)
        .with_cancellation(crate::result::ratio_of(resabs, value)))
}

/// A with |f(x)| ≈ A x^{−p}, sampled over one cycle.
fn envelope_amplitude<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, p: f64) -> f64 {
    (0..=16)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 16.0;
            f(x).abs() * x.abs().powf(p)
        })
        .fold(0.0, f64::max)
}

/// ∫_a^R f split at the estimated zeros a + k·spacing; no tail is added.
pub fn integrate_oscillatory_to<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    zero_spacing: f64,
    horizon: f64,
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    if !(zero_spacing > 0.0) || !(horizon > a) {
        return Err(Error::InvalidParameter("need positive spacing and horizon beyond a".into()));
    }
    let cycles = ((horizon - a) / zero_spacing).ceil() as usize;
    let mut breaks: Vec<f64> = (0..cycles).map(|k| a + k as f64 * zero_spacing).collect();
    breaks.push(horizon);
    let local = QuadratureConfig { max_subdivisions: cfg.max_subdivisions.max(8 * cycles), ..*cfg };
    integrate_with_breaks(f, &breaks, &local)
}
