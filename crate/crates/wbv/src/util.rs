//! Small numeric helpers shared across modules.

/// Pairwise (cascade) summation. Deterministic regardless of how the
/// terms were produced, and more accurate than naive left-to-right.
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    match terms.len() {
        0 => 0.0,
        1 => terms[0],
        2 => terms[0] + terms[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
        }
    }
}

/// Measure-theory product convention: w * g with 0 * inf = 0 when g = 0.
/// An infinite weight only contributes where the variation mass is nonzero.
pub fn weighted_term(w: f64, g: f64) -> f64 {
    if g == 0.0 {
        0.0
    } else {
        w * g
    }
}

/// Euclidean norm of a small vector.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(weighted_term(f64::INFINITY, 0.0), 0.0);
        assert_eq!(weighted_term(f64::INFINITY, 1.0), f64::INFINITY);
        assert_eq!(weighted_term(2.0, 3.0), 6.0);
    }

    #[test]
    fn pairwise_matches_naive_on_smooth_data() {
        let terms: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = terms.iter().sum();
        assert!((pairwise_sum(&terms) - naive).abs() < 1e-9);
    }
}
