//! Binomial summaries.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Signed distance of the empirical rate from `model`, in binomial standard
/// deviations under the model. `None` when the model is deterministic (0 or
/// 1) and the rate disagrees; zero when it agrees.
pub fn std_devs_off(successes: u64, trials: u64, model: f64) -> Option<f64> {
    if trials == 0 {
        return Some(0.0);
    }
    let n = trials as f64;
    let rate = successes as f64 / n;
    let var = model * (1.0 - model) / n;
    if var <= 0.0 {
        return if (rate - model).abs() == 0.0 { Some(0.0) } else { None };
    }
    Some((rate - model) / var.sqrt())
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}
