//! Oracles shared by unit tests.

/// ρ(T, α) by composite Simpson on [a, A] plus the convergent series
/// ∫_A^∞ du/(1+u^k) = Σ_n (−1)^n A^{1−k(n+1)}/(k(n+1) − 1) for the tail.
pub(crate) fn rho_series_oracle(t: f64, alpha: f64) -> f64 {
    let k = alpha / 2.0;
    let a = t.powf(-2.0 / alpha);
    let big = a.max(4.0);
    let n = 200_000;
    let h = (big - a) / n as f64;
    let f = |u: f64| 1.0 / (1.0 + u.powf(k));
    let mut acc = f(a) + f(big);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    let head = acc * h / 3.0;
    let mut tail = 0.0;
    for m in 1..400 {
        let m = m as f64;
        let term = big.powf(1.0 - k * m) / (k * m - 1.0);
        tail += if m as u32 % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    t.powf(2.0 / alpha) * (head + tail)
}
