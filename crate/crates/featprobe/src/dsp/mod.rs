//! Audio ingestion and the mel-spectrogram pipeline.
//!
//! Fixed pipeline parameters: FFT length 2048, hop 502, periodic Hann
//! window, centered frames with reflect padding, 128 Slaney-scale mel
//! filters from 0 Hz to 8 kHz, dB conversion referenced to the maximum
//! power with an 80 dB floor.

mod mel;
mod stft;
mod wav;

pub use mel::{
    mel_filterbank, melspectrogram, power_to_db, MelSpectrogram, Scale, FMAX_HZ, MEL_BINS,
};
pub use stft::{hann_window, num_frames, stft_power, windowed_frame, FFT_LEN, HOP};
pub use wav::{read_wav, write_wav};

use crate::error::Result;

/// A mono audio clip with amplitudes in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Zero-pads or truncates to exactly `seconds` of audio.
    pub fn fit_length(mut self, seconds: f64) -> Self {
        let target = (seconds * self.sample_rate as f64).round() as usize;
        self.samples.resize(target, 0.0);
        self
    }

    /// Errors unless the clip's rate matches the manifest's.
    pub fn expect_sample_rate(&self, expected: u32) -> Result<()> {
        if self.sample_rate != expected {
            return Err(crate::error::Error::SampleRateMismatch {
                found: self.sample_rate,
                expected,
            });
        }
        Ok(())
    }
}
