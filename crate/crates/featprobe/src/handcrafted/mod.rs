//! The hand-crafted feature catalog: power statistics, decay times,
//! frame-wise spectral descriptors and Ricker-wavelet summaries, all
//! computed from dB mel-spectrograms (or raw audio for the frame-wise
//! family).

mod melstats;
mod spectral;
mod stats;
mod wavelet;

pub use melstats::{mean_power, median_power, time_to_db};
pub use spectral::{framewise_spectral, spectral_statistic, SpectralKind};
pub use stats::SummaryStat;
pub use wavelet::{
    convolve_same, cwt_coefficients, cwt_summary, ricker_sample, support_len, WaveletAxis,
};

use std::fmt;
use std::str::FromStr;

use crate::dsp::{AudioClip, MelSpectrogram, Scale};
use crate::error::{Error, Result};
use crate::tensorio::FeatureMatrix;

/// Default Top-4 wavelet bandwidth.
pub const TOP4_BANDWIDTH: f64 = 25.0;
/// Default time-to-dB threshold used by the Top-4 combination.
pub const TOP4_THRESHOLD_DB: f64 = -70.0;

/// One entry of the hand-crafted feature catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSpec {
    MeanPower,
    MedianPower,
    TimeToDb { threshold_db: f64 },
    Rms,
    SpectralCentroid,
    SpectralBandwidth,
    SpectralFlatness,
    SpectralRolloff { fraction: f64 },
    WaveletStat { bandwidth: f64, stat: SummaryStat, axis: WaveletAxis },
    WaveletCombined { bandwidth: f64, axis: WaveletAxis },
    /// Mean power + time to -70 dB + mean wavelet (25) + combined wavelet
    /// (25), concatenated.
    Top4Combined,
}

/// Inputs for one example: the dB spectrogram, plus the raw clip when any
/// frame-wise spectral feature is requested.
#[derive(Debug, Clone, Copy)]
pub struct FeatureInput<'a> {
    pub spec: &'a MelSpectrogram,
    pub clip: Option<&'a AudioClip>,
}

impl FeatureSpec {
    /// Whether this feature needs the raw audio clip.
    pub fn needs_audio(&self) -> bool {
        matches!(
            self,
            FeatureSpec::Rms
                | FeatureSpec::SpectralCentroid
                | FeatureSpec::SpectralBandwidth
                | FeatureSpec::SpectralFlatness
                | FeatureSpec::SpectralRolloff { .. }
        )
    }

    /// Feature width for a spectrogram geometry of `frames` frames.
    pub fn width(&self, mel_bins: usize, frames: usize) -> usize {
        match self {
            FeatureSpec::MeanPower | FeatureSpec::MedianPower | FeatureSpec::TimeToDb { .. } => {
                mel_bins
            }
            FeatureSpec::Rms
            | FeatureSpec::SpectralCentroid
            | FeatureSpec::SpectralBandwidth
            | FeatureSpec::SpectralFlatness
            | FeatureSpec::SpectralRolloff { .. } => frames,
            FeatureSpec::WaveletStat { axis, .. } => match axis {
                WaveletAxis::OverTime => mel_bins,
                WaveletAxis::OverFrequency => frames,
            },
            FeatureSpec::WaveletCombined { axis, .. } => {
                5 * match axis {
                    WaveletAxis::OverTime => mel_bins,
                    WaveletAxis::OverFrequency => frames,
                }
            }
            FeatureSpec::Top4Combined => 3 * mel_bins + 5 * mel_bins,
        }
    }
}

/// The combined-wavelet statistic set.
const COMBINED_STATS: [SummaryStat; 5] = [
    SummaryStat::Std,
    SummaryStat::Var,
    SummaryStat::Kurtosis,
    SummaryStat::Q25,
    SummaryStat::Q75,
];

/// Computes one feature vector for one example.
pub fn feature_vector(spec: &FeatureSpec, input: &FeatureInput) -> Result<Vec<f64>> {
    if input.spec.scale() != Scale::Db {
        return Err(Error::BadFeatureSpec(
            "hand-crafted features expect a dB spectrogram".into(),
        ));
    }
    if spec.needs_audio() && input.clip.is_none() {
        return Err(Error::BadFeatureSpec(format!(
            "{spec} needs the raw audio clip"
        )));
    }
    let mel = input.spec;
    Ok(match spec {
        FeatureSpec::MeanPower => mean_power(mel),
        FeatureSpec::MedianPower => median_power(mel),
        FeatureSpec::TimeToDb { threshold_db } => time_to_db(mel, *threshold_db),
        FeatureSpec::Rms => framewise_spectral(input.clip.unwrap(), SpectralKind::Rms, 0.85),
        FeatureSpec::SpectralCentroid => {
            framewise_spectral(input.clip.unwrap(), SpectralKind::Centroid, 0.85)
        }
        FeatureSpec::SpectralBandwidth => {
            framewise_spectral(input.clip.unwrap(), SpectralKind::Bandwidth, 0.85)
        }
        FeatureSpec::SpectralFlatness => {
            framewise_spectral(input.clip.unwrap(), SpectralKind::Flatness, 0.85)
        }
        FeatureSpec::SpectralRolloff { fraction } => {
            framewise_spectral(input.clip.unwrap(), SpectralKind::Rolloff, *fraction)
        }
        FeatureSpec::WaveletStat { bandwidth, stat, axis } => {
            cwt_summary(mel, *bandwidth, *stat, *axis)
        }
        FeatureSpec::WaveletCombined { bandwidth, axis } => {
            let mut out = Vec::new();
            for stat in COMBINED_STATS {
                out.extend(cwt_summary(mel, *bandwidth, stat, *axis));
            }
            out
        }
        FeatureSpec::Top4Combined => {
            let mut out = mean_power(mel);
            out.extend(time_to_db(mel, TOP4_THRESHOLD_DB));
            out.extend(cwt_summary(
                mel,
                TOP4_BANDWIDTH,
                SummaryStat::Mean,
                WaveletAxis::OverTime,
            ));
            for stat in COMBINED_STATS {
                out.extend(cwt_summary(mel, TOP4_BANDWIDTH, stat, WaveletAxis::OverTime));
            }
            out
        }
    })
}

/// Assembles the requested features for every example into one matrix:
/// per example, horizontal concatenation of the feature vectors in spec
/// order. All spectrograms must share a geometry.
pub fn assemble(specs: &[FeatureSpec], examples: &[FeatureInput]) -> Result<FeatureMatrix> {
    if specs.is_empty() {
        return Err(Error::BadFeatureSpec("empty feature spec list".into()));
    }
    let geometry = examples
        .first()
        .map(|e| (e.spec.mel_bins(), e.spec.frames()));
    let mut rows = Vec::with_capacity(examples.len());
    for (i, ex) in examples.iter().enumerate() {
        if geometry != Some((ex.spec.mel_bins(), ex.spec.frames())) {
            return Err(Error::ExampleMismatch(format!(
                "example {i} geometry ({}, {}) differs from example 0",
                ex.spec.mel_bins(),
                ex.spec.frames()
            )));
        }
        let mut row = Vec::new();
        for s in specs {
            row.extend(feature_vector(s, ex)?);
        }
        rows.push(row);
    }

    let mut names = Vec::new();
    if let Some((mel_bins, frames)) = geometry {
        for s in specs {
            let w = s.width(mel_bins, frames);
            for i in 0..w {
                names.push(format!("{s}[{i}]"));
            }
        }
    }
    let m = FeatureMatrix::from_rows(&rows)?;
    if names.len() == m.cols() {
        m.with_col_names(names)
    } else {
        Ok(m)
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSpec::MeanPower => write!(f, "mean_power"),
            FeatureSpec::MedianPower => write!(f, "median_power"),
            FeatureSpec::TimeToDb { threshold_db } => write!(f, "time_to_db({threshold_db})"),
            FeatureSpec::Rms => write!(f, "rms"),
            FeatureSpec::SpectralCentroid => write!(f, "spectral_centroid"),
            FeatureSpec::SpectralBandwidth => write!(f, "spectral_bandwidth"),
            FeatureSpec::SpectralFlatness => write!(f, "spectral_flatness"),
            FeatureSpec::SpectralRolloff { fraction } => write!(f, "spectral_rolloff({fraction})"),
            FeatureSpec::WaveletStat { bandwidth, stat, axis } => {
                write!(
                    f,
                    "wavelet({bandwidth},{},{})",
                    stat_token(*stat),
                    axis_token(*axis)
                )
            }
            FeatureSpec::WaveletCombined { bandwidth, axis } => {
                write!(f, "wavelet_combined({bandwidth},{})", axis_token(*axis))
            }
            FeatureSpec::Top4Combined => write!(f, "top4_combined"),
        }
    }
}

fn stat_token(stat: SummaryStat) -> &'static str {
    match stat {
        SummaryStat::Mean => "mean",
        SummaryStat::Median => "median",
        SummaryStat::Std => "std",
        SummaryStat::Var => "var",
        SummaryStat::Kurtosis => "kurtosis",
        SummaryStat::Q25 => "q25",
        SummaryStat::Q75 => "q75",
    }
}

fn axis_token(axis: WaveletAxis) -> &'static str {
    match axis {
        WaveletAxis::OverTime => "time",
        WaveletAxis::OverFrequency => "freq",
    }
}

impl FromStr for FeatureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => {
                return Err(Error::BadFeatureSpec(format!("unbalanced parens in '{s}'")))
            }
            None => (s, None),
        };
        let bad = |msg: &str| Error::BadFeatureSpec(format!("'{s}': {msg}"));
        let parse_f64 = |tok: &str| -> Result<f64> {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| bad("expected a number"))
        };
        match (head, args) {
            ("mean_power", None) => Ok(FeatureSpec::MeanPower),
            ("median_power", None) => Ok(FeatureSpec::MedianPower),
            ("time_to_db", Some(a)) => Ok(FeatureSpec::TimeToDb {
                threshold_db: parse_f64(a)?,
            }),
            ("rms", None) => Ok(FeatureSpec::Rms),
            ("spectral_centroid", None) => Ok(FeatureSpec::SpectralCentroid),
            ("spectral_bandwidth", None) => Ok(FeatureSpec::SpectralBandwidth),
            ("spectral_flatness", None) => Ok(FeatureSpec::SpectralFlatness),
            ("spectral_rolloff", Some(a)) => Ok(FeatureSpec::SpectralRolloff {
                fraction: parse_f64(a)?,
            }),
            ("spectral_rolloff", None) => Ok(FeatureSpec::SpectralRolloff { fraction: 0.85 }),
            ("wavelet", Some(a)) => {
                let parts: Vec<&str> = a.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(bad("expected wavelet(bandwidth,stat,axis)"));
                }
                Ok(FeatureSpec::WaveletStat {
                    bandwidth: parse_f64(parts[0])?,
                    stat: parse_stat(parts[1]).ok_or_else(|| bad("unknown stat"))?,
                    axis: parse_axis(parts[2]).ok_or_else(|| bad("unknown axis"))?,
                })
            }
            ("wavelet_combined", Some(a)) => {
                let parts: Vec<&str> = a.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(bad("expected wavelet_combined(bandwidth,axis)"));
                }
                Ok(FeatureSpec::WaveletCombined {
                    bandwidth: parse_f64(parts[0])?,
                    axis: parse_axis(parts[1]).ok_or_else(|| bad("unknown axis"))?,
                })
            }
            ("top4_combined", None) => Ok(FeatureSpec::Top4Combined),
            _ => Err(bad("unknown feature")),
        }
    }
}

fn parse_stat(tok: &str) -> Option<SummaryStat> {
    Some(match tok {
        "mean" => SummaryStat::Mean,
        "median" => SummaryStat::Median,
        "std" => SummaryStat::Std,
        "var" => SummaryStat::Var,
        "kurtosis" => SummaryStat::Kurtosis,
        "q25" => SummaryStat::Q25,
        "q75" => SummaryStat::Q75,
        _ => return None,
    })
}

fn parse_axis(tok: &str) -> Option<WaveletAxis> {
    Some(match tok {
        "time" => WaveletAxis::OverTime,
        "freq" => WaveletAxis::OverFrequency,
        _ => return None,
    })
}
