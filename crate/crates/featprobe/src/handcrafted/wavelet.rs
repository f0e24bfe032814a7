//! Ricker-wavelet transform summaries of mel-spectrograms.

use crate::dsp::MelSpectrogram;
use crate::handcrafted::stats::SummaryStat;

/// Whether each frequency bin is transformed along time (one output per
/// mel bin) or each frame is transformed along frequency (one output per
/// frame).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletAxis {
    OverTime,
    OverFrequency,
}

/// Samples of the Ricker (Mexican hat) mother wavelet with bandwidth `a`,
/// taken at integer offsets centered on `(m - 1) / 2`:
///
/// psi(t) = 2 / (sqrt(3a) * pi^(1/4)) * (1 - (t/a)^2) * exp(-t^2 / (2a^2))
pub fn ricker_sample(a: f64, m: usize) -> Vec<f64> {
    assert!(a > 0.0 && m >= 1);
    let amp = 2.0 / ((3.0 * a).sqrt() * std::f64::consts::PI.powf(0.25));
    let center = (m as f64 - 1.0) / 2.0;
    (0..m)
        .map(|k| {
            let t = k as f64 - center;
            let u = t / a;
            amp * (1.0 - u * u) * (-t * t / (2.0 * a * a)).exp()
        })
        .collect()
}

/// Wavelet support length: `min(10a, sequence length)`, at least 1.
pub fn support_len(a: f64, seq_len: usize) -> usize {
    (((10.0 * a).floor() as usize).min(seq_len)).max(1)
}

/// Same-length zero-padded convolution of `seq` with `kernel`, aligned so
/// output index i sits over input index i (kernel centered at
/// `(len-1)/2`).
pub fn convolve_same(seq: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = seq.len();
    let m = kernel.len();
    let offset = (m - 1) / 2;
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &w) in kernel.iter().enumerate() {
            let j = i as isize + offset as isize - k as isize;
            if j >= 0 && (j as usize) < n {
                acc += w * seq[j as usize];
            }
        }
        *o = acc;
    }
    out
}

/// Continuous wavelet coefficients of one sequence at bandwidth `a`.
pub fn cwt_coefficients(seq: &[f64], a: f64) -> Vec<f64> {
    let kernel = ricker_sample(a, support_len(a, seq.len()));
    convolve_same(seq, &kernel)
}

/// Per-row (or per-column) wavelet transform of a dB spectrogram followed
/// by a summary statistic of the coefficients.
///
/// Output length is 128 for [`WaveletAxis::OverTime`], `frames` for
/// [`WaveletAxis::OverFrequency`].
pub fn cwt_summary(spec: &MelSpectrogram, a: f64, stat: SummaryStat, axis: WaveletAxis) -> Vec<f64> {
    let values = spec.values();
    match axis {
        WaveletAxis::OverTime => (0..values.rows())
            .map(|r| stat.apply(&cwt_coefficients(values.row(r), a)))
            .collect(),
        WaveletAxis::OverFrequency => (0..values.cols())
            .map(|c| stat.apply(&cwt_coefficients(&values.col(c), a)))
            .collect(),
    }
}
