//! Summary statistics over coefficient sequences.

/// Statistic taken over a sequence of wavelet coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryStat {
    Mean,
    Median,
    Std,
    Var,
    Kurtosis,
    Q25,
    Q75,
}

impl SummaryStat {
    pub fn apply(self, values: &[f64]) -> f64 {
        match self {
            SummaryStat::Mean => mean(values),
            SummaryStat::Median => quantile(values, 0.5),
            SummaryStat::Std => variance(values).sqrt(),
            SummaryStat::Var => variance(values),
            SummaryStat::Kurtosis => kurtosis(values),
            SummaryStat::Q25 => quantile(values, 0.25),
            SummaryStat::Q75 => quantile(values, 0.75),
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population variance (divides by n).
pub fn variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Fisher (excess) kurtosis with population normalization; 0 for
/// zero-variance sequences.
pub fn kurtosis(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    let n = values.len() as f64;
    let m2 = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return 0.0;
    }
    let m4 = values.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
