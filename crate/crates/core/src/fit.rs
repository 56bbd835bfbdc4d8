//! Log–log least-squares fits for growth and decay exponents.

use crate::error::{Error, Result};

/// Result of a power-law regression `y ≈ A x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    /// `ln A`, the intercept of the log–log line.
    pub log_prefactor: f64,
    /// Coefficient of determination of the log–log fit, clamped to `[0, 1]`.
    pub r_squared: f64,
    /// Smallest and largest abscissa used.
    pub window: (f64, f64),
    pub points: usize,
}

/// Ordinary least squares slope of `ln y` against `ln x`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::invalid(format!(
                "power-law fit needs positive finite coordinates, got ({x}, {y})"
            )));
        }
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("power-law fit needs at least two distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = logs
            .iter()
            .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentFit {
        exponent: slope,
        log_prefactor: intercept,
        r_squared,
        window: (lo, hi),
        points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let fit = fit_power_law(&[(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)]).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.log_prefactor - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exact_square() {
        let fit = fit_power_law(&[(2.0, 4.0), (4.0, 16.0), (8.0, 64.0)]).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.window, (2.0, 8.0));
    }

    #[test]
    fn noisy_line() {
        // Closed form on ln-coordinates: x = (0, ln2, ln4), y = (0, ln2.1, ln3.9).
        let fit = fit_power_law(&[(1.0, 1.0), (2.0, 2.1), (4.0, 3.9)]).unwrap();
        let lx = [0.0, 2f64.ln(), 4f64.ln()];
        let ly = [0.0, 2.1f64.ln(), 3.9f64.ln()];
        let mx = lx.iter().sum::<f64>() / 3.0;
        let my = ly.iter().sum::<f64>() / 3.0;
        let sxy: f64 = (0..3).map(|i| (lx[i] - mx) * (ly[i] - my)).sum();
        let sxx: f64 = (0..3).map(|i| (lx[i] - mx).powi(2)).sum();
        assert!((fit.exponent - sxy / sxx).abs() < 1e-12);
        assert!(fit.exponent > 0.9 && fit.exponent < 1.1);
        assert!(fit.r_squared > 0.99);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_power_law(&[(-1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
    }
}
