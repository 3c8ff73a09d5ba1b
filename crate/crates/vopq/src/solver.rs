//! Bracketed root finding for monotone threshold problems.

/// Result of a coarse sign scan over a closed interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignScan {
    /// Number of positive-to-nonpositive transitions observed.
    pub crossings: usize,
    /// The first bracketing cell `(lo, hi)` with `f(lo) > 0 >= f(hi)`.
    pub bracket: Option<(f64, f64)>,
}

/// Samples `f` at `steps + 1` equispaced points on `[lo, hi]` and counts
/// sign changes from positive to nonpositive.
pub fn scan_decreasing_crossing<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    steps: usize,
) -> SignScan {
    let mut crossings = 0;
    let mut bracket = None;
    let mut x_prev = lo;
    let mut positive_prev = f(lo) > 0.0;
    for i in 1..=steps {
        let x = lo + (hi - lo) * (i as f64) / (steps as f64);
        let positive = f(x) > 0.0;
        if positive_prev && !positive {
            crossings += 1;
            if bracket.is_none() {
                bracket = Some((x_prev, x));
            }
        } else if !positive_prev && positive {
            // An upward recrossing also counts against single-crossing
            // assumptions.
            crossings += 1;
        }
        positive_prev = positive;
        x_prev = x;
    }
    SignScan { crossings, bracket }
}

/// Bisection on a bracket with `f(lo) > 0 >= f(hi)`, to absolute
/// tolerance `tol` on the abscissa.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> f64 {
    debug_assert!(lo < hi);
    for _ in 0..max_iter {
        if (hi - lo) <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cosine_root() {
        let f = |x: f64| x.cos();
        let scan = scan_decreasing_crossing(&f, 0.0, 3.0, 1000);
        assert_eq!(scan.crossings, 1);
        let (lo, hi) = scan.bracket.unwrap();
        let root = bisect_decreasing(&f, lo, hi, 1e-12, 200);
        assert!((root - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn counts_multiple_crossings() {
        let f = |x: f64| (3.0 * x).sin();
        let scan = scan_decreasing_crossing(&f, 0.1, 3.0, 1000);
        assert!(scan.crossings > 1);
    }

    #[test]
    fn no_crossing_reported_for_positive_function() {
        let f = |x: f64| 1.0 + x * x;
        let scan = scan_decreasing_crossing(&f, 0.0, 1.0, 100);
        assert_eq!(scan.crossings, 0);
        assert!(scan.bracket.is_none());
    }
}
