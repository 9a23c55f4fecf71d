//! Goodness-of-fit helpers used to check samplers against closed forms.

/// Two-sided Kolmogorov–Smirnov statistic of `sample` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value `sqrt(-ln(level / 2) / 2) / sqrt(n)`.
pub fn ks_critical_value(n: usize, level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// z-score of the count of positive values against Binomial(m, 1/2), where
/// `m` is the number of nonzero values.
pub fn sign_balance_z(sample: &[f64]) -> f64 {
    let positive = sample.iter().filter(|&&x| x > 0.0).count() as f64;
    let nonzero = sample.iter().filter(|&&x| x != 0.0).count() as f64;
    if nonzero == 0.0 {
        return 0.0;
    }
    (positive - nonzero / 2.0) / (nonzero / 4.0).sqrt()
}
