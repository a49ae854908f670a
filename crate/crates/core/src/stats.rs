//! Sample statistics shared by the sweeps.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Sample mean and standard error (sample standard deviation over `√len`).
///
/// The error is 0 for a single value; both are NaN for none.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTest {
    pub pairs: usize,
    pub mean_diff: f64,
    pub se: f64,
    pub t: f64,
    /// One-sided p-value for a positive mean difference.
    pub p_greater: f64,
}

/// Paired t-test of `a - b > 0`.
///
/// Identical differences have no spread: the p-value is then 0 for a positive
/// difference and 1 otherwise.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> PairedTest {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (mean, se) = mean_se(&diffs);
    let pairs = diffs.len();
    if pairs < 2 || se == 0.0 || !se.is_finite() {
        let p = if mean > 0.0 { 0.0 } else { 1.0 };
        let t = if mean > 0.0 { f64::INFINITY } else if mean < 0.0 { f64::NEG_INFINITY } else { 0.0 };
        return PairedTest { pairs, mean_diff: mean, se: if se.is_finite() { se } else { 0.0 }, t, p_greater: p };
    }
    let t = mean / se;
    let dist = StudentsT::new(0.0, 1.0, (pairs - 1) as f64).expect("degrees of freedom are positive");
    PairedTest { pairs, mean_diff: mean, se, t, p_greater: 1.0 - dist.cdf(t) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_se_basics() {
        assert_eq!(mean_se(&[2.0, 4.0]), (3.0, 1.0));
        assert_eq!(mean_se(&[1.0]), (1.0, 0.0));
        assert!(mean_se(&[]).0.is_nan());
    }

    #[test]
    fn paired_test_reference_value() {
        // Differences 1,2,3,4,5: mean 3, se = sqrt(2.5/5), t = 4.2426, df 4.
        let a = [2.0, 4.0, 6.0, 8.0, 10.0];
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = paired_t_test(&a, &b);
        assert!((r.t - 4.242640687).abs() < 1e-8);
        // Upper tail of Student's t with 4 degrees of freedom.
        assert!((r.p_greater - 0.0066178).abs() < 1e-6, "{}", r.p_greater);
    }

    #[test]
    fn degenerate_paired_tests() {
        assert_eq!(paired_t_test(&[1.0, 1.0], &[1.0, 1.0]).p_greater, 1.0);
        assert_eq!(paired_t_test(&[2.0, 2.0], &[1.0, 1.0]).p_greater, 0.0);
    }
}
