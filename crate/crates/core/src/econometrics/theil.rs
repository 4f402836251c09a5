//! Theil index of a wage distribution.

use super::{EconError, Result};

/// `T = (1/N) Σ (w/μ) ln(w/μ)`.
pub fn theil_entropy(wages: &[f64]) -> Result<f64> {
    if wages.is_empty() {
        return Err(EconError::EmptyWages);
    }
    if let Some(&w) = wages.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(EconError::NonPositiveWage(w));
    }
    let n = wages.len() as f64;
    let mu = wages.iter().sum::<f64>() / n;
    let t = wages
        .iter()
        .map(|w| {
            let r = w / mu;
            r * r.ln()
        })
        .sum::<f64>()
        / n;
    // Rounding can leave a tiny negative value for near-equal wages.
    Ok(t.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equal_wages_have_zero_entropy() {
        assert_eq!(theil_entropy(&[3.5; 7]).unwrap(), 0.0);
    }

    #[test]
    fn one_one_four() {
        assert_abs_diff_eq!(
            theil_entropy(&[1.0, 1.0, 4.0]).unwrap(),
            2f64.ln() / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn concentration_approaches_ln_n() {
        let n = 10_000;
        let mut w = vec![1e-12; n];
        w[0] = 1.0;
        assert_abs_diff_eq!(theil_entropy(&w).unwrap(), (n as f64).ln(), epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(theil_entropy(&[]), Err(EconError::EmptyWages));
        assert_eq!(theil_entropy(&[1.0, 0.0]), Err(EconError::NonPositiveWage(0.0)));
    }
}
