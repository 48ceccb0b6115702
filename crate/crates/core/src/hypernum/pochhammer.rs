//! Rising factorials (c)_n = Γ(c+n)/Γ(c).

use super::dd::DoubleWord;
use super::gamma::is_nonpositive_integer;

fn hits_zero(c: f64, n: usize) -> bool {
    is_nonpositive_integer(c) && (n as f64) > -c
}

/// (c)_n in f64; may overflow to ±∞ for large n.
pub fn pochhammer(c: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if hits_zero(c, n) {
        return 0.0;
    }
    if n <= 20_000 {
        // Product with binary rescaling so that partial products never overflow.
        let mut mant = 1.0f64;
        let mut exp2 = 0i64;
        for j in 0..n {
            mant *= c + j as f64;
            if mant.abs() > 1e150 || mant.abs() < 1e-150 {
                let e = mant.abs().log2().floor() as i64;
                mant *= 2f64.powi(-e as i32);
                exp2 += e;
            }
        }
        return scale2(mant, exp2);
    }
    match pochhammer_log(c, n) {
        Some((l, s)) => s * l.exp(),
        None => 0.0,
    }
}

fn scale2(mant: f64, exp2: i64) -> f64 {
    let mut v = mant;
    let mut e = exp2;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

/// (ln|(c)_n|, sign), or `None` when (c)_n = 0.
pub fn pochhammer_log(c: f64, n: usize) -> Option<(f64, f64)> {
    if n == 0 {
        return Some((0.0, 1.0));
    }
    if hits_zero(c, n) {
        return None;
    }
    if n <= 64 {
        let mut l = 0.0;
        let mut s = 1.0;
        for j in 0..n {
            let f = c + j as f64;
            l += f.abs().ln();
            if f < 0.0 {
                s = -s;
            }
        }
        return Some((l, s));
    }
    let top = c + n as f64;
    let (lt, st) = if is_nonpositive_integer(top) {
        // c + n lands on a pole only when c itself is a negative integer,
        // which was handled above.
        unreachable!()
    } else {
        let (l, s) = libm::lgamma_r(top);
        (l, if s < 0 { -1.0 } else { 1.0 })
    };
    let (lc, sc) = {
        let (l, s) = libm::lgamma_r(c);
        (l, if s < 0 { -1.0 } else { 1.0 })
    };
    Some((lt - lc, st * sc))
}

/// (c)_n in double-word arithmetic.
pub fn pochhammer_dd(c: f64, n: usize) -> DoubleWord {
    if hits_zero(c, n) {
        return DoubleWord::ZERO;
    }
    let mut p = DoubleWord::ONE;
    for j in 0..n {
        p = p * DoubleWord::new(c).add_f64(j as f64);
    }
    p
}
