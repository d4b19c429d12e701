//! Summation and small-sample statistics helpers.
//!
//! Divergence computations accumulate millions of terms that nearly cancel,
//! and the sweep harness must produce byte-identical aggregates regardless of
//! execution order. Both concerns are solved here: compensated (Neumaier)
//! accumulation for the analytic code, and an order-fixed pairwise reduction
//! for Monte Carlo aggregates.

/// Neumaier-compensated running sum.
///
/// Like Kahan summation but also correct when the next term is larger in
/// magnitude than the running total.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sums a slice by recursive halving.
///
/// The reduction tree depends only on the slice length, so the result is a
/// pure function of the input order — the property the sweep harness relies
/// on for serial/parallel byte equality (trial results are always collected
/// in index order before aggregation).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Sample mean and standard error of the mean.
///
/// Returns `(mean, 0.0)` for a single observation and `(NaN, NaN)` for an
/// empty slice.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.len() as f64;
    let mean = pairwise_sum(xs) / m;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Three-sigma radius for an empirical frequency of a Bernoulli(p) draw over
/// `samples` observations.
pub fn binomial_three_sigma(p: f64, samples: u64) -> f64 {
    3.0 * (p * (1.0 - p) / samples as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut s = NeumaierSum::new();
        s.add(1.0);
        s.add(1e100);
        s.add(1.0);
        s.add(-1e100);
        assert_eq!(s.total(), 2.0);
    }

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let xs = [0.25, 1.5, -0.75, 3.0, 0.125];
        let naive: f64 = xs.iter().sum();
        assert_eq!(pairwise_sum(&xs), naive);
    }

    #[test]
    fn mean_and_stderr_basics() {
        let (m, se) = mean_and_stderr(&[2.0, 4.0, 6.0, 8.0]);
        assert_eq!(m, 5.0);
        // sample variance 20/3, se = sqrt(20/12)
        assert!((se - (20.0f64 / 12.0).sqrt()).abs() < 1e-15);
        let (m1, se1) = mean_and_stderr(&[7.0]);
        assert_eq!((m1, se1), (7.0, 0.0));
    }

    #[test]
    fn pairwise_is_order_fixed() {
        // Same multiset in the same order must reproduce exactly; this is a
        // smoke check that the reduction tree has no data-dependent branches.
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64) * 0.1 - 31.7).collect();
        assert_eq!(pairwise_sum(&xs), pairwise_sum(&xs.clone()));
    }
}
