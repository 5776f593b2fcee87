//! Small order-statistic helpers shared by the bootstrap aggregation
//! and the experiment harness.

/// Median of a nonempty slice; for an even count, the midpoint of the
/// two central values.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// (first quartile, median, third quartile) with linear interpolation
/// between order statistics.
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    assert!(!values.is_empty(), "quartiles of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    (
        interpolated(&sorted, 0.25),
        interpolated(&sorted, 0.5),
        interpolated(&sorted, 0.75),
    )
}

fn interpolated(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[5.0]), 5.0);
    }

    #[test]
    fn quartiles_ordered() {
        let (q1, med, q3) = quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_abs_diff_eq!(q1, 2.0);
        assert_abs_diff_eq!(med, 3.0);
        assert_abs_diff_eq!(q3, 4.0);
        assert!(q1 <= med && med <= q3);
    }

    #[test]
    fn quartiles_singleton_collapse() {
        let (q1, med, q3) = quartiles(&[7.5]);
        assert_eq!((q1, med, q3), (7.5, 7.5, 7.5));
    }
}
