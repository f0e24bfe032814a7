//! Deterministic synthetic audio corpora: parameterized tones, chirps and
//! noise decays with class/pitch/amplitude labels.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::dsp::AudioClip;
use crate::tensorio::{DatasetManifest, ManifestRecord, Split, TaskKind};

/// Waveform family of one synthetic clip; doubles as its class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipKind {
    /// Steady sine at the labeled pitch with an exponential decay envelope.
    Tone,
    /// Sine sweeping upward from the labeled pitch over the clip.
    Chirp,
    /// White noise with an exponential decay envelope.
    NoiseDecay,
}

impl ClipKind {
    pub fn class_index(self) -> usize {
        match self {
            ClipKind::Tone => 0,
            ClipKind::Chirp => 1,
            ClipKind::NoiseDecay => 2,
        }
    }
}

/// One generated example: audio plus its task labels.
#[derive(Debug, Clone)]
pub struct SynthClip {
    pub kind: ClipKind,
    pub clip: AudioClip,
    pub pitch_hz: f64,
    pub amplitude: f64,
}

/// Corpus generation parameters.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n: usize,
    pub classes: usize,
    pub sample_rate: u32,
    pub clip_seconds: f64,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 200,
            classes: 2,
            sample_rate: 16000,
            clip_seconds: 4.0,
            seed: 7,
            train_fraction: 0.7,
        }
    }
}

/// Generates `cfg.n` clips, cycling through the first `cfg.classes` kinds.
///
/// Pitch is drawn log-uniform over two octaves for every class, so pitch
/// never identifies the class.
pub fn synth_corpus(cfg: &SynthConfig) -> Vec<SynthClip> {
    assert!((1..=3).contains(&cfg.classes), "classes must be 1..=3");
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let len = (cfg.clip_seconds * cfg.sample_rate as f64).round() as usize;
    let kinds = [ClipKind::Tone, ClipKind::Chirp, ClipKind::NoiseDecay];

    (0..cfg.n)
        .map(|i| {
            let kind = kinds[i % cfg.classes];
            let pitch_hz = 220.0 * 2f64.powf(rng.random_range(0.0..2.0));
            let amplitude = rng.random_range(0.3..0.9);
            let decay_s = rng.random_range(1.0..3.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let noise_seed = rng.random::<u64>();
            let samples = render(
                kind,
                len,
                cfg.sample_rate,
                pitch_hz,
                amplitude,
                decay_s,
                phase,
                noise_seed,
            );
            SynthClip {
                kind,
                clip: AudioClip::new(samples, cfg.sample_rate),
                pitch_hz,
                amplitude,
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn render(
    kind: ClipKind,
    len: usize,
    sample_rate: u32,
    pitch_hz: f64,
    amplitude: f64,
    decay_s: f64,
    phase: f64,
    noise_seed: u64,
) -> Vec<f64> {
    let sr = sample_rate as f64;
    let mut noise = ChaCha20Rng::seed_from_u64(noise_seed);
    (0..len)
        .map(|s| {
            let t = s as f64 / sr;
            let env = amplitude * (-t / decay_s).exp();
            let x = match kind {
                ClipKind::Tone => (std::f64::consts::TAU * pitch_hz * t + phase).sin(),
                ClipKind::Chirp => {
                    // One octave per second of linear frequency sweep; the
                    // instantaneous phase integrates f0 * (1 + t/2).
                    let inst_phase = std::f64::consts::TAU * pitch_hz * (t + t * t / 4.0);
                    (inst_phase + phase).sin()
                }
                ClipKind::NoiseDecay => noise.random_range(-1.0..1.0),
            };
            env * x
        })
        .collect()
}

/// Builds the manifest for a generated corpus: first `train_fraction` of
/// each class cycle goes to train, the remainder to test.
pub fn corpus_manifest(cfg: &SynthConfig, clips: &[SynthClip], dir_prefix: &str) -> DatasetManifest {
    let mut tasks = BTreeMap::new();
    tasks.insert("class".to_string(), TaskKind::Classification);
    tasks.insert("pitchHz".to_string(), TaskKind::Regression);
    tasks.insert("amplitude".to_string(), TaskKind::Regression);

    let n_train = (cfg.n as f64 * cfg.train_fraction).round() as usize;
    let records = clips
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut labels = BTreeMap::new();
            labels.insert("class".to_string(), c.kind.class_index() as f64);
            labels.insert("pitchHz".to_string(), c.pitch_hz);
            labels.insert("amplitude".to_string(), c.amplitude);
            ManifestRecord {
                path: format!("{dir_prefix}clip{i:05}.wav").into(),
                split: if i < n_train { Split::Train } else { Split::Test },
                labels,
            }
        })
        .collect();

    DatasetManifest {
        sample_rate: cfg.sample_rate,
        clip_seconds: cfg.clip_seconds,
        tasks,
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_per_seed() {
        let cfg = SynthConfig {
            n: 6,
            ..SynthConfig::default()
        };
        let a = synth_corpus(&cfg);
        let b = synth_corpus(&cfg);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.clip.samples(), y.clip.samples());
            assert_eq!(x.pitch_hz, y.pitch_hz);
        }
        let other = synth_corpus(&SynthConfig {
            seed: 8,
            ..cfg.clone()
        });
        assert_ne!(a[0].clip.samples(), other[0].clip.samples());
    }

    #[test]
    fn split_is_seventy_thirty() {
        let cfg = SynthConfig {
            n: 200,
            ..SynthConfig::default()
        };
        let clips = synth_corpus(&cfg);
        let manifest = corpus_manifest(&cfg, &clips, "");
        assert_eq!(manifest.split_counts(), (140, 60));
    }

    #[test]
    fn pitch_labels_match_generators() {
        let cfg = SynthConfig {
            n: 10,
            ..SynthConfig::default()
        };
        let clips = synth_corpus(&cfg);
        let manifest = corpus_manifest(&cfg, &clips, "");
        for (c, r) in clips.iter().zip(&manifest.records) {
            assert_eq!(r.labels["pitchHz"], c.pitch_hz);
            assert_eq!(r.labels["class"], c.kind.class_index() as f64);
        }
    }

    #[test]
    fn classes_cycle() {
        let cfg = SynthConfig {
            n: 5,
            classes: 2,
            ..SynthConfig::default()
        };
        let clips = synth_corpus(&cfg);
        let kinds: Vec<_> = clips.iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            [
                ClipKind::Tone,
                ClipKind::Chirp,
                ClipKind::Tone,
                ClipKind::Chirp,
                ClipKind::Tone
            ]
        );
    }

    #[test]
    fn amplitudes_stay_in_range() {
        let cfg = SynthConfig {
            n: 9,
            classes: 3,
            ..SynthConfig::default()
        };
        for c in synth_corpus(&cfg) {
            let peak = c.clip.samples().iter().fold(0.0f64, |m, &s| m.max(s.abs()));
            assert!(peak <= 0.9 + 1e-12);
        }
    }
}
