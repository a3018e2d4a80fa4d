//! Special functions: associated Laguerre polynomials, harmonic-oscillator
//! eigenfunctions and log-factorials.
//!
//! Everything here is evaluated by upward three-term recurrences. These are
//! stable for real arguments of the size that show up in this crate
//! (`x = 4|α|²` on bounded phase-space grids) and cost O(n).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Degree and association index of an associated Laguerre polynomial
/// `L_n^{(a)}`. `a = 0` gives the ordinary polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LaguerreOrder {
    pub n: usize,
    pub a: usize,
}

impl LaguerreOrder {
    pub fn new(n: usize, a: usize) -> Self {
        LaguerreOrder { n, a }
    }

    /// Ordinary Laguerre polynomial of degree `n`.
    pub fn ordinary(n: usize) -> Self {
        LaguerreOrder { n, a: 0 }
    }
}

/// Evaluates `L_n^{(a)}(x)`.
///
/// Uses `(j+1) L_{j+1} = (2j+1+a-x) L_j - (j+a) L_{j-1}` seeded with
/// `L_0 = 1`, `L_1 = 1+a-x`.
pub fn laguerre(order: LaguerreOrder, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid("x", format!("must be finite, got {x}")));
    }
    Ok(laguerre_unchecked(order.n, order.a as f64, x))
}

#[inline]
pub(crate) fn laguerre_unchecked(n: usize, a: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Harmonic-oscillator eigenfunction `φ_n(x) = H_n(x) e^{-x²/2} / √(2ⁿ n! √π)`
/// for the convention `[x, p] = i`.
pub fn oscillator_eigenfunction(n: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid("x", format!("must be finite, got {x}")));
    }
    let mut out = 0.0;
    fill_oscillator(n, x, |m, v| {
        if m == n {
            out = v;
        }
    });
    Ok(out)
}

/// All of `φ_0(x) ..= φ_nmax(x)` in one pass.
pub fn oscillator_eigenfunctions(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    fill_oscillator(nmax, x, |m, v| out[m] = v);
    out
}

fn fill_oscillator(nmax: usize, x: f64, mut sink: impl FnMut(usize, f64)) {
    let phi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    sink(0, phi0);
    if nmax == 0 {
        return;
    }
    let mut prev = phi0;
    let mut cur = std::f64::consts::SQRT_2 * x * phi0;
    sink(1, cur);
    for m in 1..nmax {
        let mf = m as f64;
        let next = x * (2.0 / (mf + 1.0)).sqrt() * cur - (mf / (mf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        sink(m + 1, cur);
    }
}

/// `ln(n!)`.
///
/// Exact (up to the final rounding of `ln`) for `n ≤ 20`, where `n!` fits
/// in a `u64`; Stirling's series with four correction terms above that.
pub fn log_factorial(n: usize) -> f64 {
    if n <= 20 {
        let f: u64 = (1..=n as u64).product();
        return (f as f64).ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
        - inv * inv2 * inv2 * inv2 / 1680.0;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> f64 {
        (log_factorial(n) - log_factorial(k) - log_factorial(n - k)).exp().round()
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(LaguerreOrder::ordinary(0), 7.3).unwrap(), 1.0);
        assert_eq!(laguerre(LaguerreOrder::ordinary(1), 4.0).unwrap(), -3.0);
        // 1 - 2x + x²/2 at x = 2
        assert!((laguerre(LaguerreOrder::ordinary(2), 2.0).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn laguerre_rejects_non_finite() {
        assert!(laguerre(LaguerreOrder::ordinary(3), f64::NAN).is_err());
        assert!(laguerre(LaguerreOrder::new(3, 1), f64::INFINITY).is_err());
    }

    #[test]
    fn laguerre_at_origin_is_binomial() {
        for n in 0..=20 {
            for a in 0..=20 {
                let v = laguerre(LaguerreOrder::new(n, a), 0.0).unwrap();
                let expect = binom(n + a, n);
                assert!((v - expect).abs() <= 1e-12 * expect, "n={n} a={a}: {v} vs {expect}");
            }
        }
    }

    #[test]
    fn oscillator_ground_state_and_parity() {
        let g = oscillator_eigenfunction(0, 0.0).unwrap();
        assert!((g - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(oscillator_eigenfunction(1, 0.0).unwrap(), 0.0);
        for n in 0..12 {
            for &x in &[0.3, 1.1, 2.7, 4.9] {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                let a = oscillator_eigenfunction(n, x).unwrap();
                let b = oscillator_eigenfunction(n, -x).unwrap();
                assert!((a - s * b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn oscillator_batch_matches_single() {
        let all = oscillator_eigenfunctions(15, 1.7);
        for (n, v) in all.iter().enumerate() {
            assert_eq!(*v, oscillator_eigenfunction(n, 1.7).unwrap());
        }
    }

    #[test]
    fn log_factorial_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert!((log_factorial(5) - 120f64.ln()).abs() < 1e-15);
        let cumulative: f64 = (1..=170).map(|k| (k as f64).ln()).sum();
        let v = log_factorial(170);
        assert!(((v - cumulative) / cumulative).abs() < 1e-10);
        // switch-over point between exact and asymptotic branches
        let c21: f64 = (1..=21).map(|k| (k as f64).ln()).sum();
        assert!((log_factorial(21) - c21).abs() < 1e-13);
    }
}
