use core::cmp::Ordering;

/// Mean absolute difference between two equally long vectors.
pub(crate) fn mean_abs_change(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

/// Descending score order; NaN sorts after every number.
pub(crate) fn cmp_desc(a: f64, b: f64) -> Ordering {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => b.partial_cmp(&a).unwrap_or(Ordering::Equal),
    }
}

/// Ascending order with NaN last.
pub(crate) fn cmp_asc(a: f64, b: f64) -> Ordering {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => a.partial_cmp(&b).unwrap_or(Ordering::Equal),
    }
}

/// Floor of `fraction * n`, guarded against representation error in
/// `fraction` (e.g. `0.29 * 100.0 == 28.999999999999996`).
pub(crate) fn floor_fraction(fraction: f64, n: usize) -> usize {
    let raw = fraction * n as f64;
    libm::floor(raw + raw.abs() * 1e-12 + 1e-12) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_fraction_absorbs_rounding() {
        assert_eq!(floor_fraction(0.29, 100), 29);
        assert_eq!(floor_fraction(0.01, 200), 2);
        assert_eq!(floor_fraction(0.01, 199), 1);
        assert_eq!(floor_fraction(0.005, 100), 0);
    }

    #[test]
    fn nan_goes_last_both_ways() {
        assert_eq!(cmp_desc(f64::NAN, 1.0), Ordering::Greater);
        assert_eq!(cmp_asc(f64::NAN, 1.0), Ordering::Greater);
        assert_eq!(cmp_asc(0.0, 1.0), Ordering::Less);
        assert_eq!(cmp_desc(-0.0, 0.0), Ordering::Equal);
    }
}
