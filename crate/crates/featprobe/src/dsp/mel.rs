//! Slaney-scale mel filterbank and dB conversion.

use crate::dsp::{stft_power, AudioClip, FFT_LEN, HOP};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::tensorio::Tensor;

/// Number of mel bins in every spectrogram.
pub const MEL_BINS: usize = 128;
/// Upper edge of the mel filterbank.
pub const FMAX_HZ: f64 = 8000.0;

const AMIN: f64 = 1e-10;
const TOP_DB: f64 = 80.0;

/// Whether spectrogram values are linear power or dB re max.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Power,
    Db,
}

/// A 128-mel spectrogram with its pipeline provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    values: Mat,
    scale: Scale,
    sample_rate: u32,
    hop: usize,
}

impl MelSpectrogram {
    pub fn new(values: Mat, scale: Scale, sample_rate: u32, hop: usize) -> Self {
        assert_eq!(values.rows(), MEL_BINS, "expected {MEL_BINS} mel bins");
        Self {
            values,
            scale,
            sample_rate,
            hop,
        }
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn mel_bins(&self) -> usize {
        self.values.rows()
    }

    pub fn frames(&self) -> usize {
        self.values.cols()
    }

    /// Packs the spectrogram as an f32 tensor named `melspec`.
    pub fn to_tensor(&self) -> Tensor {
        Tensor::new(
            "melspec",
            vec![self.mel_bins(), self.frames()],
            self.values.data().iter().map(|&v| v as f32).collect(),
        )
        .expect("melspec dims always match data")
    }
}

/// Hz to Slaney mel: linear below 1 kHz, logarithmic above.
pub fn hz_to_mel(hz: f64) -> f64 {
    let f_sp = 200.0 / 3.0;
    let min_log_hz = 1000.0;
    let min_log_mel = min_log_hz / f_sp;
    let logstep = (6.4f64).ln() / 27.0;
    if hz >= min_log_hz {
        min_log_mel + (hz / min_log_hz).ln() / logstep
    } else {
        hz / f_sp
    }
}

/// Inverse of [`hz_to_mel`].
pub fn mel_to_hz(mel: f64) -> f64 {
    let f_sp = 200.0 / 3.0;
    let min_log_hz = 1000.0;
    let min_log_mel = min_log_hz / f_sp;
    let logstep = (6.4f64).ln() / 27.0;
    if mel >= min_log_mel {
        min_log_hz * (logstep * (mel - min_log_mel)).exp()
    } else {
        f_sp * mel
    }
}

/// Triangular mel filterbank (`mel_bins x (fft_len/2 + 1)`) on the Slaney
/// scale with area normalization; fMin is 0.
pub fn mel_filterbank(
    sample_rate: u32,
    fft_len: usize,
    mel_bins: usize,
    fmax: f64,
) -> Result<Mat> {
    let nyquist = sample_rate as f64 / 2.0;
    if fmax > nyquist {
        return Err(Error::FmaxAboveNyquist { fmax, nyquist });
    }
    let bins = fft_len / 2 + 1;

    // mel_bins + 2 band edges, uniformly spaced in mel.
    let mel_min = hz_to_mel(0.0);
    let mel_max = hz_to_mel(fmax);
    let edges: Vec<f64> = (0..mel_bins + 2)
        .map(|i| mel_to_hz(mel_min + (mel_max - mel_min) * i as f64 / (mel_bins + 1) as f64))
        .collect();

    let mut fb = Mat::zeros(mel_bins, bins);
    for m in 0..mel_bins {
        let (lo, center, hi) = (edges[m], edges[m + 1], edges[m + 2]);
        let enorm = 2.0 / (hi - lo);
        for k in 0..bins {
            let f = k as f64 * sample_rate as f64 / fft_len as f64;
            let rising = (f - lo) / (center - lo);
            let falling = (hi - f) / (hi - center);
            let w = rising.min(falling).max(0.0);
            *fb.at_mut(m, k) = w * enorm;
        }
    }
    Ok(fb)
}

/// Power-scale mel spectrogram of a clip: `filterbank x stft_power`.
pub fn melspectrogram(clip: &AudioClip) -> Result<MelSpectrogram> {
    let fb = mel_filterbank(clip.sample_rate(), FFT_LEN, MEL_BINS, FMAX_HZ)?;
    let power = stft_power(clip, FFT_LEN, HOP);
    let values = fb.matmul(&power);
    Ok(MelSpectrogram::new(
        values,
        Scale::Power,
        clip.sample_rate(),
        HOP,
    ))
}

/// Converts a power spectrogram to dB re the maximum, floored at -80 dB.
///
/// Returns the dB spectrogram and a flag that is true when the input was
/// all zero (every value is then defined as -80 dB).
pub fn power_to_db(spec: &MelSpectrogram) -> (MelSpectrogram, bool) {
    assert_eq!(spec.scale(), Scale::Power, "input must be on power scale");
    let max = spec.values().max_value();
    let mut out = spec.values().clone();
    let all_zero = !(max > 0.0);
    if all_zero {
        out.data_mut().fill(-TOP_DB);
    } else {
        let ref_db = 10.0 * max.max(AMIN).log10();
        for v in out.data_mut() {
            let db = 10.0 * v.max(AMIN).log10() - ref_db;
            *v = db.max(-TOP_DB);
        }
    }
    (
        MelSpectrogram::new(out, Scale::Db, spec.sample_rate(), spec.hop()),
        all_zero,
    )
}
