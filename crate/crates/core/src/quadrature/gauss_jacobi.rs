use crate::error::{Error, Result};
use crate::hypernum::DoubleWord;

/// Gauss rule on [0, 1] for the weight t^p (1−t)^q, normalised to unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Recurrence coefficients (diagonal, squared off-diagonal) of the monic
/// orthogonal polynomials for t^p (1−t)^q on [0, 1].
fn jacobi_matrix(n: usize, p: f64, q: f64) -> (Vec<f64>, Vec<f64>) {
    // Classical Jacobi weight (1−x)^α (1+x)^β on [−1, 1], then t = (1+x)/2.
    let (al, be) = (q, p);
    let s = al + be;
    let mut diag = Vec::with_capacity(n);
    let mut off2 = vec![0.0; n];
    for k in 0..n {
        let kf = k as f64;
        let a = if k == 0 {
            (be - al) / (s + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
        };
        diag.push(0.5 * (1.0 + a));
        if k >= 1 {
            let b = if k == 1 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                let t = 2.0 * kf + s;
                4.0 * kf * (kf + al) * (kf + be) * (kf + s) / (t * t * (t + 1.0) * (t - 1.0))
            };
            off2[k] = 0.25 * b;
        }
    }
    (diag, off2)
}

/// Number of eigenvalues of the tridiagonal matrix below x.
fn sturm_count(diag: &[f64], off2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for k in 0..diag.len() {
        d = diag[k] - x - if k == 0 { 0.0 } else { off2[k] / d };
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// n-point Gauss rule for t^p (1−t)^q on [0, 1] (p, q > −1). Nodes come from
/// Sturm bisection on the Jacobi matrix, weights from the Christoffel sum of
/// the orthonormal polynomials.
pub fn gauss_jacobi(n: usize, p: f64, q: f64) -> Result<GaussRule> {
    if n == 0 || !(p > -1.0) || !(q > -1.0) {
        return Err(Error::InvalidParameter(format!("gauss_jacobi(n={n}, p={p}, q={q})")));
    }
    let (diag, off2) = jacobi_matrix(n, p, q);
    let off: Vec<f64> = off2.iter().map(|v| v.sqrt()).collect();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut lo_prev = 0.0f64;
    for k in 0..n {
        // k-th smallest eigenvalue: bracket [lo, hi] with count(lo) ≤ k < count(hi).
        let mut lo = lo_prev;
        let mut hi = 1.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(&diag, &off2, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        lo_prev = lo;
        // Christoffel function: 1/Σ p_j(t)² with orthonormal p_j, p_0 = 1.
        let mut prev = 0.0f64;
        let mut cur = 1.0f64;
        let mut sum = 1.0f64;
        for j in 0..n - 1 {
            let next = ((t - diag[j]) * cur - if j == 0 { 0.0 } else { off[j] * prev }) / off[j + 1];
            prev = cur;
            cur = next;
            sum += cur * cur;
        }
        nodes.push(t);
        weights.push(1.0 / sum);
    }
    Ok(GaussRule { nodes, weights })
}

/// Gauss rule with nodes and weights carried as double-words.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRuleDd {
    pub nodes: Vec<DoubleWord>,
    pub weights: Vec<DoubleWord>,
}

fn jacobi_matrix_dd(n: usize, p: f64, q: f64) -> (Vec<DoubleWord>, Vec<DoubleWord>) {
    let dw = DoubleWord::new;
    let (al, be) = (dw(q), dw(p));
    let s = al + be;
    let mut diag = Vec::with_capacity(n);
    let mut off2 = vec![DoubleWord::ZERO; n];
    for k in 0..n {
        let kf = k as f64;
        let a = if k == 0 {
            (be - al) / s.add_f64(2.0)
        } else {
            let t = s.add_f64(2.0 * kf);
            (be * be - al * al) / (t * t.add_f64(2.0))
        };
        diag.push(a.add_f64(1.0).mul_f64(0.5));
        if k >= 1 {
            let b = if k == 1 {
                let t = s.add_f64(2.0);
                (al.add_f64(1.0) * be.add_f64(1.0)).mul_f64(4.0) / (t * t * s.add_f64(3.0))
            } else {
                let t = s.add_f64(2.0 * kf);
                (al.add_f64(kf) * be.add_f64(kf) * s.add_f64(kf)).mul_f64(4.0 * kf)
                    / (t * t * t.add_f64(1.0) * t.add_f64(-1.0))
            };
            off2[k] = b.mul_f64(0.25);
        }
    }
    (diag, off2)
}

/// [`gauss_jacobi`] refined to double-word accuracy: Newton steps on the
/// monic recurrence polish each node, weights follow from the Christoffel sum.
pub fn gauss_jacobi_dd(n: usize, p: f64, q: f64) -> Result<GaussRuleDd> {
    let start = gauss_jacobi(n, p, q)?;
    let (diag, off2) = jacobi_matrix_dd(n, p, q);
    let off: Vec<DoubleWord> = off2.iter().map(|v| v.sqrt()).collect();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &t0 in &start.nodes {
        let mut t = DoubleWord::new(t0);
        for _ in 0..3 {
            // monic π_k and π_k'
            let (mut p0, mut p1) = (DoubleWord::ZERO, DoubleWord::ONE);
            let (mut d0, mut d1) = (DoubleWord::ZERO, DoubleWord::ZERO);
            for k in 0..n {
                let x = t - diag[k];
                let p2 = x * p1 - off2[k] * p0;
                let d2 = p1 + x * d1 - off2[k] * d0;
                p0 = p1;
                p1 = p2;
                d0 = d1;
                d1 = d2;
            }
            if d1.hi == 0.0 {
                break;
            }
            t = t - p1 / d1;
        }
        let mut prev = DoubleWord::ZERO;
        let mut cur = DoubleWord::ONE;
        let mut sum = DoubleWord::ONE;
        for j in 0..n - 1 {
            let next = ((t - diag[j]) * cur - off[j] * prev) / off[j + 1];
            prev = cur;
            cur = next;
            sum += cur * cur;
        }
        nodes.push(t);
        weights.push(sum.recip());
    }
    Ok(GaussRuleDd { nodes, weights })
}
