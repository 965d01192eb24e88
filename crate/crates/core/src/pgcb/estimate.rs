//! Closed-form sizing estimates for macrochunks and batches.

use crate::error::{Error, Result};

/// Upper estimates on the largest of `k` macrochunks, in messages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacrochunkEstimate {
    /// `E[S₁] = 2m/k`, the mean macrochunk size.
    pub mean: f64,
    /// `sqrt(n·ln(k)/(2k)·Var(D))`
    pub deviation: f64,
    /// `sqrt(2·ln(k)·Var(S₁))` with `Var(S₁) = (n/k)·Var(D)`, for comparison
    /// with `deviation`.
    pub deviation_from_var_s1: f64,
    /// `mean + deviation`
    pub expected_upper: f64,
    /// `n·Var(D)`
    pub variance_upper: f64,
}

pub fn estimate_max_macrochunk(
    n: u64,
    k: u64,
    degree_mean: f64,
    degree_variance: f64,
) -> Result<MacrochunkEstimate> {
    if k == 0 || n == 0 {
        return Err(Error::invalid("need n >= 1 and k >= 1"));
    }
    if degree_mean < 0.0 || degree_variance < 0.0 {
        return Err(Error::invalid("degree moments must be non-negative"));
    }
    let (n, kf) = (n as f64, k as f64);
    let mean = n * degree_mean / kf;
    let ln_k = kf.ln();
    let deviation = (n * ln_k / (2.0 * kf) * degree_variance).sqrt();
    let deviation_from_var_s1 = (2.0 * ln_k * n / kf * degree_variance).sqrt();
    Ok(MacrochunkEstimate {
        mean,
        deviation,
        deviation_from_var_s1,
        expected_upper: mean + deviation,
        variance_upper: n * degree_variance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchEstimate {
    /// `m/(k·z)`
    pub avg_batch_msgs: f64,
    /// `C(p,2)·2m/(k²z²p²)`: messages between microchunks of one batch.
    pub critical_msgs: f64,
}

pub fn estimate_batch_dependencies(m: u64, k: u64, z: u64, p_threads: u64) -> Result<BatchEstimate> {
    if k == 0 || z == 0 || p_threads == 0 {
        return Err(Error::invalid("k, z and p must be at least 1"));
    }
    let (m, k, z, p) = (m as f64, k as f64, z as f64, p_threads as f64);
    let pairs = p * (p - 1.0) / 2.0;
    Ok(BatchEstimate {
        avg_batch_msgs: m / (k * z),
        critical_msgs: pairs * 2.0 * m / (k * k * z * z * p * p),
    })
}

/// Smallest power of two `k ≤ max_k` whose estimated largest macrochunk,
/// `expected_upper + 3·sqrt(variance_upper)/k`, fits into `budget` messages.
/// Falls back to the largest power of two not above `max_k`.
pub fn choose_k(n: u64, degree_mean: f64, degree_variance: f64, budget: u64, max_k: u64) -> Result<u64> {
    let max_k = max_k.max(1);
    let mut k = 1u64;
    loop {
        let est = estimate_max_macrochunk(n, k, degree_mean, degree_variance)?;
        let need = est.expected_upper + 3.0 * est.variance_upper.sqrt() / k as f64;
        if need <= budget as f64 || k * 2 > max_k {
            return Ok(k);
        }
        k *= 2;
    }
}

/// `max(64, ⌈n/(k·p·1024)⌉)`
pub fn default_z(n: u64, k: u64, p_threads: u64) -> u64 {
    64.max(n.div_ceil((k * p_threads * 1024).max(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_instance_batch_estimate() {
        let e = estimate_batch_dependencies(12_000_000_000, 32, 1 << 11, 16).unwrap();
        assert!((e.critical_msgs - 2.62).abs() < 0.005, "{}", e.critical_msgs);
        assert!((e.avg_batch_msgs - 1.83e5).abs() < 0.005e5, "{}", e.avg_batch_msgs);
        assert!(e.critical_msgs < 4.0);
    }

    #[test]
    fn single_thread_has_no_critical_messages() {
        assert_eq!(estimate_batch_dependencies(1000, 4, 8, 1).unwrap().critical_msgs, 0.0);
        assert!(estimate_batch_dependencies(1000, 0, 8, 1).is_err());
    }

    #[test]
    fn regular_graph_bound_is_the_mean() {
        let e = estimate_max_macrochunk(1000, 8, 10.0, 0.0).unwrap();
        assert_eq!(e.expected_upper, 2.0 * 5000.0 / 8.0);
        assert_eq!(e.variance_upper, 0.0);
        // k = 1: ln 1 = 0, the bound is all 2m messages
        let e = estimate_max_macrochunk(1000, 1, 10.0, 4.0).unwrap();
        assert_eq!(e.expected_upper, 10_000.0);
        assert_eq!(e.variance_upper, 4000.0);
    }

    #[test]
    fn variants_differ_by_factor_two() {
        let e = estimate_max_macrochunk(10_000, 16, 5.0, 6.0).unwrap();
        assert!((e.deviation_from_var_s1 / e.deviation - 2.0).abs() < 1e-12);
    }

    #[test]
    fn k_selection() {
        assert_eq!(choose_k(1000, 10.0, 0.0, 20_000, 64).unwrap(), 1);
        assert_eq!(choose_k(1000, 10.0, 0.0, 5_000, 64).unwrap(), 2);
        assert_eq!(choose_k(1000, 10.0, 0.0, 1, 64).unwrap(), 64);
        assert_eq!(default_z(1 << 30, 4, 4), 1 << 16);
        assert_eq!(default_z(1000, 4, 4), 64);
    }
}
