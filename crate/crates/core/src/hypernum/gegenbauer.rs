//! Gegenbauer polynomials C_m^{λ'}(t).

/// C_m^{λ'}(t) by the three-term recurrence. For λ' = 0 the Chebyshev
/// polynomial T_m(t) is returned, which is the limit of the normalised
/// polynomial C_m^{λ'}(t)/C_m^{λ'}(1).
pub fn gegenbauer(m: usize, lam: f64, t: f64) -> f64 {
    assert!(lam >= 0.0, "gegenbauer needs λ' ≥ 0");
    if lam == 0.0 {
        return chebyshev(m, t);
    }
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lam * t;
    for n in 1..m {
        let nf = n as f64;
        let next = (2.0 * (nf + lam) * t * cur - (nf + 2.0 * lam - 1.0) * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn chebyshev(m: usize, t: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, t);
    for _ in 1..m {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// C_m^{λ'}(t)/C_m^{λ'}(1) for m = 0..=max_m, via the normalised recurrence
/// P_{m+1} = (2(m+λ')t P_m − m P_{m−1})/(m+2λ'), which never overflows.
pub fn gegenbauer_normalized_all(max_m: usize, lam: f64, t: f64) -> Vec<f64> {
    assert!(lam >= 0.0);
    let mut out = Vec::with_capacity(max_m + 1);
    out.push(1.0);
    if max_m == 0 {
        return out;
    }
    out.push(t);
    for n in 1..max_m {
        let nf = n as f64;
        let next = (2.0 * (nf + lam) * t * out[n] - nf * out[n - 1]) / (nf + 2.0 * lam);
        out.push(next);
    }
    out
}

/// C_m^{λ'}(t)/C_m^{λ'}(1).
pub fn gegenbauer_normalized(m: usize, lam: f64, t: f64) -> f64 {
    gegenbauer_normalized_all(m, lam, t)[m]
}
