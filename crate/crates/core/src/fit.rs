//! Polynomial fits of error-rate curves and pseudo-threshold extraction.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Unencoded failure rate of a qubit prepared in |0⟩ under depolarizing
/// noise: two of the three Paulis flip it.
pub const UNENCODED_SLOPE: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub p: f64,
    pub rate: f64,
    /// Variance of `rate`; `None` weights the point like every other.
    pub variance: Option<f64>,
}

impl FitPoint {
    pub fn new(p: f64, rate: f64) -> Self {
        FitPoint { p, rate, variance: None }
    }

    pub fn with_variance(p: f64, rate: f64, variance: f64) -> Self {
        FitPoint { p, rate, variance: Some(variance) }
    }
}

/// `Σ_i a_i p^(lowest_power + i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub lowest_power: u32,
    pub coefficients: Vec<f64>,
    /// Standard errors of the coefficients.
    pub std_errors: Vec<f64>,
    /// `rate − fit(p)` per input point.
    pub residuals: Vec<f64>,
    /// Weighted sum of squared residuals.
    pub chi2: f64,
}

impl FitResult {
    pub fn eval(&self, p: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| a * p.powi((self.lowest_power as usize + i) as i32))
            .sum()
    }

    /// Coefficient of `p²`, if the model has one.
    pub fn leading_order(&self) -> Option<f64> {
        let i = 2usize.checked_sub(self.lowest_power as usize)?;
        self.coefficients.get(i).copied()
    }

    /// Coefficient of `p`, if the model has one.
    pub fn linear(&self) -> Option<(f64, f64)> {
        (self.lowest_power == 1).then(|| (self.coefficients[0], self.std_errors[0]))
    }
}

fn fit_powers(points: &[FitPoint], lowest: u32, highest: u32) -> Result<FitResult> {
    if highest < lowest {
        return Err(Error::Fit(format!("degree {highest} has no terms")));
    }
    let terms = (highest - lowest + 1) as usize;
    let mut ps: Vec<f64> = points.iter().map(|pt| pt.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    if ps.len() < terms {
        return Err(Error::Fit(format!("{} distinct p values for {terms} coefficients", ps.len())));
    }
    if points.iter().any(|pt| !(pt.p > 0.0) || !pt.rate.is_finite()) {
        return Err(Error::Fit("p must be positive and rates finite".into()));
    }

    let weights = points
        .iter()
        .map(|pt| match pt.variance {
            Some(v) if v > 0.0 => Ok(1.0 / v),
            Some(_) => Err(Error::Fit(format!("non-positive variance at p = {}", pt.p))),
            None => Ok(1.0),
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = points.len();
    let mut a = DMatrix::<f64>::zeros(m, terms);
    let mut y = DVector::<f64>::zeros(m);
    for (r, (pt, w)) in points.iter().zip(&weights).enumerate() {
        let sw = w.sqrt();
        for c in 0..terms {
            a[(r, c)] = sw * pt.p.powi((lowest as usize + c) as i32);
        }
        y[r] = sw * pt.rate;
    }
    // Columns are normalised before solving; p^k spans many decades.
    let scale: Vec<f64> = (0..terms).map(|c| a.column(c).norm()).collect();
    for (c, s) in scale.iter().enumerate() {
        if *s == 0.0 {
            return Err(Error::Fit("degenerate design matrix".into()));
        }
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let tol = 1e-12 * svd.singular_values.max();
    let solved = svd.solve(&y, tol).map_err(|e| Error::Fit(e.to_string()))?;
    let ata = a.transpose() * &a;
    let cov = ata.try_inverse().ok_or_else(|| Error::Fit("singular normal matrix".into()))?;

    let coefficients: Vec<f64> = (0..terms).map(|c| solved[c] / scale[c]).collect();
    let fitted = FitResult {
        lowest_power: lowest,
        coefficients,
        std_errors: vec![],
        residuals: vec![],
        chi2: 0.0,
    };
    let residuals: Vec<f64> = points.iter().map(|pt| pt.rate - fitted.eval(pt.p)).collect();
    let chi2: f64 = residuals.iter().zip(&weights).map(|(r, w)| r * r * w).sum();
    let dof = m.saturating_sub(terms);
    let inflate = if dof > 0 && points.iter().all(|pt| pt.variance.is_some()) {
        (chi2 / dof as f64).max(1.0)
    } else if dof > 0 {
        chi2 / dof as f64
    } else {
        0.0
    };
    let std_errors = (0..terms).map(|c| (cov[(c, c)] * inflate).sqrt() / scale[c]).collect();
    Ok(FitResult { std_errors, residuals, chi2, ..fitted })
}

/// Least squares fit of `a_0 p² + a_1 p³ + … + a_{d−2} p^d`.
pub fn fit_polynomial(points: &[FitPoint], degree: u32) -> Result<FitResult> {
    fit_powers(points, 2, degree)
}

/// As [`fit_polynomial`] with an extra `p` term, to expose first-order failures.
pub fn fit_with_linear(points: &[FitPoint], degree: u32) -> Result<FitResult> {
    fit_powers(points, 1, degree)
}

/// Smallest `p` in `[1e-8, 1]` with `fit(p) = (2/3) p`. Scans a log grid for
/// the first sign change and bisects it. `None` without a positive leading
/// coefficient or a crossing.
pub fn pseudo_threshold(fit: &FitResult) -> Option<f64> {
    if fit.coefficients.first().is_none_or(|&a| a <= 0.0) {
        return None;
    }
    first_crossing(fit)
}

/// Fit summary used for threshold tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub fit: FitResult,
    pub linear_fit: Option<FitResult>,
    /// The linear coefficient exceeds three standard errors.
    pub linear_floor: bool,
    pub pseudo_threshold: Option<f64>,
}

/// Fits `Σ a_i p^(i+2)` and, when enough points are available, the same
/// model with a `p` term. A significant linear term means first-order
/// failures: the threshold then comes from the linear model, and is absent
/// when the linear slope alone reaches 2/3.
pub fn analyze(points: &[FitPoint], degree: u32) -> Result<Analysis> {
    let fit = fit_polynomial(points, degree)?;
    let linear_fit = fit_with_linear(points, degree).ok().filter(|f| f.residuals.len() > f.coefficients.len());
    let linear_floor = linear_fit
        .as_ref()
        .and_then(FitResult::linear)
        .is_some_and(|(a, se)| a > 0.0 && a > 3.0 * se);
    let pseudo_threshold = match (&linear_fit, linear_floor) {
        (Some(lf), true) => {
            let (a1, _) = lf.linear().expect("linear model");
            if a1 >= UNENCODED_SLOPE {
                None
            } else {
                first_crossing(lf)
            }
        }
        _ => pseudo_threshold(&fit),
    };
    Ok(Analysis { fit, linear_fit, linear_floor, pseudo_threshold })
}

fn first_crossing(fit: &FitResult) -> Option<f64> {
    let g = |p: f64| fit.eval(p) - UNENCODED_SLOPE * p;
    let steps = 800;
    let lo = 1e-8f64.ln();
    let mut prev = 1e-8;
    if g(prev) >= 0.0 {
        return None;
    }
    for i in 1..=steps {
        let p = (lo * (1.0 - i as f64 / steps as f64)).exp();
        if g(p) >= 0.0 {
            let (mut a, mut b) = (prev, p);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if g(mid) < 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = p;
    }
    None
}

/// `rate / p²` with the band `[min/p², max/p²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingOrderPoint {
    pub p: f64,
    pub value: f64,
    pub low: f64,
    pub high: f64,
}

pub fn leading_order_series(points: &[(f64, f64, f64, f64)]) -> Vec<LeadingOrderPoint> {
    points
        .iter()
        .filter(|(p, ..)| *p > 0.0)
        .map(|&(p, mean, min, max)| {
            let p2 = p * p;
            LeadingOrderPoint { p, value: mean / p2, low: min / p2, high: max / p2 }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<FitPoint> {
        [2e-4, 5e-4, 1e-3, 2e-3, 4e-3].iter().map(|&p| FitPoint::new(p, f(p))).collect()
    }

    #[test]
    fn exact_quadratic() {
        let fit = fit_polynomial(&synthetic(|p| 270.0 * p * p), 3).unwrap();
        assert!((fit.coefficients[0] - 270.0).abs() < 1e-6);
        assert!(fit.coefficients[1].abs() < 1e-3);
    }

    #[test]
    fn quadratic_plus_cubic() {
        let fit = fit_polynomial(&synthetic(|p| 550.0 * p * p + 1e4 * p * p * p), 3).unwrap();
        assert!((fit.coefficients[0] / 550.0 - 1.0).abs() < 0.01);
        assert!((fit.coefficients[1] / 1e4 - 1.0).abs() < 0.01);
    }

    #[test]
    fn threshold_closed_form() {
        for a0 in [550.0, 2016.0, 270.0] {
            let fit = FitResult {
                lowest_power: 2,
                coefficients: vec![a0],
                std_errors: vec![0.0],
                residuals: vec![],
                chi2: 0.0,
            };
            let t = pseudo_threshold(&fit).unwrap();
            assert!((t - 2.0 / (3.0 * a0)).abs() < 1e-12, "{t}");
        }
        let neg = FitResult { lowest_power: 2, coefficients: vec![-1.0], std_errors: vec![0.0], residuals: vec![], chi2: 0.0 };
        assert_eq!(pseudo_threshold(&neg), None);
    }

    #[test]
    fn underdetermined() {
        let pts = vec![FitPoint::new(1e-3, 1e-4)];
        assert!(matches!(fit_polynomial(&pts, 3), Err(Error::Fit(_))));
    }

    #[test]
    fn linear_floor_above_baseline_has_no_threshold() {
        let pts: Vec<FitPoint> = synthetic(|p| 0.9 * p + 300.0 * p * p)
            .into_iter()
            .map(|pt| FitPoint::with_variance(pt.p, pt.rate, (pt.rate * 1e-3).powi(2)))
            .collect();
        let a = analyze(&pts, 3).unwrap();
        assert!(a.linear_floor);
        assert_eq!(a.pseudo_threshold, None);
        // the pure quadratic model alone would have reported one
        assert!(pseudo_threshold(&a.fit).is_some());
    }

    #[test]
    fn series_divides_by_p_squared() {
        let s = leading_order_series(&[(1e-3, 270e-6, 200e-6, 300e-6)]);
        assert!((s[0].value - 270.0).abs() < 1e-9);
        assert!((s[0].low - 200.0).abs() < 1e-9);
    }
}
