//! Frame-wise spectral features computed from raw audio with the same
//! framing as the mel-spectrogram pipeline.

use crate::dsp::{num_frames, stft_power, windowed_frame, AudioClip, FFT_LEN, HOP};

const EPS: f64 = 1e-10;

/// Frame-wise spectral feature family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    Rms,
    Centroid,
    Bandwidth,
    Flatness,
    Rolloff,
}

/// One statistic of a single one-sided power spectrum whose bin `k` sits
/// at `k * bin_hz`.
///
/// Silent spectra (zero total power) yield 0 for centroid, bandwidth and
/// rolloff, and 1 for flatness.
pub fn spectral_statistic(
    spectrum: &[f64],
    bin_hz: f64,
    kind: SpectralKind,
    rolloff_fraction: f64,
) -> f64 {
    let total: f64 = spectrum.iter().sum();
    match kind {
        SpectralKind::Rms => panic!("rms is a time-domain statistic"),
        SpectralKind::Centroid => centroid(spectrum, bin_hz, total),
        SpectralKind::Bandwidth => {
            if total <= 0.0 {
                return 0.0;
            }
            let c = centroid(spectrum, bin_hz, total);
            let spread: f64 = spectrum
                .iter()
                .enumerate()
                .map(|(k, &s)| {
                    let f = k as f64 * bin_hz;
                    s * (f - c) * (f - c)
                })
                .sum();
            (spread / total).sqrt()
        }
        SpectralKind::Flatness => {
            let n = spectrum.len() as f64;
            let log_sum: f64 = spectrum.iter().map(|&s| s.max(EPS).ln()).sum();
            let gm = (log_sum / n).exp();
            let am = spectrum.iter().map(|&s| s.max(EPS)).sum::<f64>() / n;
            gm / am
        }
        SpectralKind::Rolloff => {
            if total <= 0.0 {
                return 0.0;
            }
            let threshold = rolloff_fraction * total;
            let mut cum = 0.0;
            for (k, &s) in spectrum.iter().enumerate() {
                cum += s;
                if cum >= threshold {
                    return k as f64 * bin_hz;
                }
            }
            (spectrum.len() - 1) as f64 * bin_hz
        }
    }
}

/// One value per analysis frame, using the exact mel-pipeline framing.
pub fn framewise_spectral(clip: &AudioClip, kind: SpectralKind, rolloff_fraction: f64) -> Vec<f64> {
    let frames = num_frames(clip.len(), HOP);
    if kind == SpectralKind::Rms {
        return (0..frames)
            .map(|t| {
                let frame = windowed_frame(clip, FFT_LEN, HOP, t);
                (frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64).sqrt()
            })
            .collect();
    }

    let power = stft_power(clip, FFT_LEN, HOP);
    let bin_hz = clip.sample_rate() as f64 / FFT_LEN as f64;
    (0..frames)
        .map(|t| spectral_statistic(&power.col(t), bin_hz, kind, rolloff_fraction))
        .collect()
}

fn centroid(spectrum: &[f64], bin_hz: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let weighted: f64 = spectrum
        .iter()
        .enumerate()
        .map(|(k, &s)| k as f64 * bin_hz * s)
        .sum();
    weighted / total
}
