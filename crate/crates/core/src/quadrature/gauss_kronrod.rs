use super::QuadratureConfig;
use crate::error::{Error, Result};
use crate::result::{EvalResult, Method};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    /// Discretisation error estimate; zero once it sinks below the rounding floor.
    raw: f64,
    /// Reported error: the larger of the estimate and the rounding floor.
    err: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.raw == o.raw
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.raw.total_cmp(&o.raw)
    }
}

fn gk15<F: Fn(f64) -> (f64, f64)>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, mc) = f(c);
    if !fc.is_finite() {
        return Err(Error::NonFiniteIntegrand(c));
    }
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut resabs = mc * WGK[7];
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let (x1, x2) = (c - dx, c + dx);
        let ((f1, m1), (f2, m2)) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(Error::NonFiniteIntegrand(x1));
        }
        if !f2.is_finite() {
            return Err(Error::NonFiniteIntegrand(x2));
        }
        *slot = (f1, f2);
        k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (m1 + m2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * k;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        resasc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let scale = h.abs();
    let value = k * h;
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut err = ((k - g) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    let raw = if err <= floor { 0.0 } else { err };
    Ok(Segment { a, b, value, raw, err: err.max(floor), resabs })
}

/// ∫_a^b f by adaptive 7/15-point Gauss–Kronrod bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    integrate_with_breaks(f, &[a, b], cfg)
}

/// Like [`integrate`], starting from the partition given by `breaks`
/// (strictly increasing, at least two points).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    integrate_with_noise(
        |x| {
            let v = f(x);
            (v, v.abs())
        },
        breaks,
        cfg,
    )
}

/// Like [`integrate_with_breaks`] for an integrand that returns its value
/// together with the magnitude of the terms it was computed from. The rounding
/// floor follows that magnitude, so integrands formed as small differences
/// stop refining once the remaining error is below their evaluation noise.
pub fn integrate_with_noise<F: Fn(f64) -> (f64, f64)>(
    f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    cfg.validate()?;
    if breaks.len() < 2 || breaks.iter().any(|x| !x.is_finite()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("integration limits must be finite and increasing".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Segment> = Vec::new();
    let mut evaluations = 0usize;
    for w in breaks.windows(2) {
        let s = gk15(&f, w[0], w[1])?;
        evaluations += 15;
        heap.push(s);
    }
    let mut count = heap.len();
    loop {
        let (value, err, raw, resabs) = totals(heap.iter().chain(done.iter()));
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if raw <= tol || heap.is_empty() {
            return Ok(finish(value, err, resabs, evaluations, err > tol));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        let width_floor = 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if worst.raw == 0.0 || worst.b - worst.a <= width_floor || mid <= worst.a || mid >= worst.b {
            done.push(Segment { raw: 0.0, err: worst.err.max(worst.raw), ..worst });
            continue;
        }
        if count >= cfg.max_subdivisions {
            heap.push(worst);
            let (value, err, _, _) = totals(heap.iter().chain(done.iter()));
            return Err(Error::SubdivisionLimit { value, error: err });
        }
        let left = gk15(&f, worst.a, mid)?;
        let right = gk15(&f, mid, worst.b)?;
        evaluations += 30;
        count += 1;
        heap.push(left);
        heap.push(right);
    }
}

fn totals<'a>(segs: impl Iterator<Item = &'a Segment>) -> (f64, f64, f64, f64) {
    // Neumaier-compensated value sum.
    let (mut s, mut c, mut e, mut r, mut raw) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seg in segs {
        let t = s + seg.value;
        if s.abs() >= seg.value.abs() {
            c += (s - t) + seg.value;
        } else {
            c += (seg.value - t) + s;
        }
        s = t;
        e += seg.err;
        raw += seg.raw;
        r += seg.resabs;
    }
    (s + c, e, raw, r)
}

fn finish(value: f64, err: f64, resabs: f64, evaluations: usize, roundoff_limited: bool) -> EvalResult {
    let mut out = EvalResult::new(value, err, Method::Quadrature, evaluations)
        .with_cancellation(crate::result::ratio_of(resabs, value));
    out.flags.roundoff_limited = roundoff_limited;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::with_tolerances(1e-12, 1e-15)
    }

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15 && (g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_exact_to_degree_22() {
        let s = gk15(&|x: f64| (x.powi(22), x.powi(22)), 0.0, 1.0).unwrap();
        assert!((s.value - 1.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn basic_integrals() {
        let r = integrate(|_| 1.0, 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let r = integrate(f64::sin, 0.0, PI, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate(|t: f64| t.powf(-0.5), 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
        assert!((r.value - 2.0).abs() <= r.abs_error_estimate.max(1e-12));
    }

    #[test]
    fn nan_and_bad_limits_are_errors() {
        assert!(matches!(
            integrate(|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &cfg()),
            Err(Error::NonFiniteIntegrand(_))
        ));
        assert!(integrate(|x| x, 1.0, 0.0, &cfg()).is_err());
    }

    #[test]
    fn subdivision_limit_reported() {
        let tight = QuadratureConfig { max_subdivisions: 3, ..cfg() };
        let r = integrate(|x: f64| (1.0 / (x + 1e-6)).sin(), 0.0, 1.0, &tight);
        assert!(matches!(r, Err(Error::SubdivisionLimit { .. })));
    }

    #[test]
    fn breaks_give_same_answer() {
        let f = |x: f64| (5.0 * x).cos() * (-x).exp();
        let a = integrate(f, 0.0, 3.0, &cfg()).unwrap();
        let b = integrate_with_breaks(f, &[0.0, 1.0, 2.2, 3.0], &cfg()).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }
}
