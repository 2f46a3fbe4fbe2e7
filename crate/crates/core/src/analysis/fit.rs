use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Least-squares line through `(x, y)`: `(slope, intercept)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Knobs of [`fit_decay`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// `|value|` below which a step counts as decayed.
    pub threshold: f64,
    /// Fit points need `|value|` above this floor.
    pub floor: f64,
    /// Fit points need `|value|` below this ceiling.
    pub ceiling: f64,
    /// Earliest step admitted to the fit.
    pub min_t: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { threshold: 0.05, floor: 1e-12, ceiling: 0.9, min_t: 2.0 }
    }
}

/// Exponential fit `log2|value| ≈ rate·t + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Base-2 decay exponent per step (negative for decay).
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// First and last fitted step.
    pub window: (f64, f64),
    /// First step with `|value| < threshold`, interpolated linearly between
    /// samples; infinite when the series never decays.
    pub steps_to_decay: f64,
    pub threshold: f64,
}

/// Steps until `|value|` first drops below `threshold`.
pub fn steps_to_decay(series: &[(f64, f64)], threshold: f64) -> f64 {
    let mut prev: Option<(f64, f64)> = None;
    for &(t, v) in series {
        let a = v.abs();
        if a < threshold {
            return match prev {
                Some((tp, ap)) if ap > a => tp + (ap - threshold) / (ap - a) * (t - tp),
                _ => t,
            };
        }
        prev = Some((t, a));
    }
    f64::INFINITY
}

/// Fits an exponential to the decaying part of `series`.
///
/// The window is the contiguous run of samples with `t ≥ min_t`, starting
/// at the first one below `ceiling` and ending before the first one at or
/// below `floor`.
pub fn fit_decay(series: &[(f64, f64)], options: &FitOptions) -> Result<DecayFit> {
    let floor = options.floor.max(1e-12);
    if series.iter().all(|&(_, v)| v.abs() <= floor) {
        return Err(Error::validation("every value is below the numerical floor"));
    }
    let points: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= options.min_t)
        .skip_while(|&(_, v)| v.abs() >= options.ceiling)
        .take_while(|&(_, v)| v.abs() > floor && v.abs() < options.ceiling)
        .collect();
    if points.len() < 3 {
        return Err(Error::validation(format!(
            "decay fit needs at least 3 points in the window, found {}",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.abs().log2()).collect();
    let (rate, intercept) = linear_fit(&xs, &ys);
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - rate * x - intercept).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(DecayFit {
        rate,
        intercept,
        r_squared,
        window: (xs[0], xs[xs.len() - 1]),
        steps_to_decay: steps_to_decay(series, options.threshold),
        threshold: options.threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponentials() {
        for rate in [-0.5, -0.013, -2.25] {
            let series: Vec<(f64, f64)> = (0..30).map(|t| (t as f64, (rate * t as f64).exp2())).collect();
            let opts = FitOptions { ceiling: 1.01, min_t: 0.0, ..FitOptions::default() };
            let fit = fit_decay(&series, &opts).unwrap();
            assert!((fit.rate / rate - 1.0).abs() < 1e-12, "{} vs {rate}", fit.rate);
            assert!((fit.r_squared - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn steps_to_decay_interpolates() {
        let series = [(0.0, 1.0), (1.0, 0.5), (2.0, 0.04)];
        let t = steps_to_decay(&series, 0.05);
        assert!((t - (1.0 + 0.45 / 0.46)).abs() < 1e-12);
        assert_eq!(steps_to_decay(&[(0.0, 1.0), (5.0, 1.0)], 0.05), f64::INFINITY);
        assert_eq!(steps_to_decay(&[(3.0, 0.01)], 0.05), 3.0);
    }

    #[test]
    fn errors() {
        assert!(fit_decay(&[(0.0, 0.0), (1.0, 0.0)], &FitOptions::default()).is_err());
        let flat: Vec<(f64, f64)> = (0..10).map(|t| (t as f64, 1.0)).collect();
        assert!(fit_decay(&flat, &FitOptions::default()).is_err());
    }
}
