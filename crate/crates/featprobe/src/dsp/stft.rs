//! Centered short-time Fourier transform on the power scale.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::dsp::AudioClip;
use crate::mat::Mat;

/// FFT window length.
pub const FFT_LEN: usize = 2048;
/// Hop between frame centers, in samples.
pub const HOP: usize = 502;

/// Periodic Hann window of length `len`.
pub fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos())
        .collect()
}

/// Reflected read at (possibly out-of-range) index `i - pad`, mirroring
/// around both ends without repeating the boundary sample.
fn reflect_at(samples: &[f64], i: isize) -> f64 {
    let n = samples.len() as isize;
    if n == 1 {
        return samples[0];
    }
    let period = 2 * (n - 1);
    let mut j = i.rem_euclid(period);
    if j >= n {
        j = period - j;
    }
    samples[j as usize]
}

/// Number of centered analysis frames for a clip of `len` samples.
pub fn num_frames(len: usize, hop: usize) -> usize {
    if len == 0 {
        0
    } else {
        1 + len / hop
    }
}

/// The `t`-th centered, Hann-windowed analysis frame of a clip.
pub fn windowed_frame(clip: &AudioClip, fft_len: usize, hop: usize, t: usize) -> Vec<f64> {
    let window = hann_window(fft_len);
    let start = (t * hop) as isize - (fft_len / 2) as isize;
    (0..fft_len)
        .map(|j| reflect_at(clip.samples(), start + j as isize) * window[j])
        .collect()
}

/// Squared-magnitude one-sided spectrogram: `(fft_len/2 + 1) x frames`.
///
/// Frames are centered (reflect padding of `fft_len/2` on each side) and
/// Hann-windowed, so a clip of `len` samples yields `1 + len/hop` frames.
pub fn stft_power(clip: &AudioClip, fft_len: usize, hop: usize) -> Mat {
    let samples = clip.samples();
    let n = samples.len();
    let bins = fft_len / 2 + 1;
    if n == 0 {
        return Mat::zeros(bins, 0);
    }
    let frames = num_frames(n, hop);
    let window = hann_window(fft_len);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fft_len);
    let pad = (fft_len / 2) as isize;

    let mut out = Mat::zeros(bins, frames);
    let mut buf = vec![Complex::new(0.0, 0.0); fft_len];
    for t in 0..frames {
        let start = (t * hop) as isize - pad;
        for (j, (slot, w)) in buf.iter_mut().zip(&window).enumerate() {
            let x = reflect_at(samples, start + j as isize);
            *slot = Complex::new(x * w, 0.0);
        }
        fft.process(&mut buf);
        for (k, v) in buf.iter().take(bins).enumerate() {
            *out.at_mut(k, t) = v.norm_sqr();
        }
    }
    out
}
