//! JSON-lines dataset manifests.
//!
//! First line is a header declaring sample rate, clip length and the task
//! table; every following line is one record with a path, split and a full
//! set of task labels.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensorio::fnv1a64;

/// How a task's labels are decoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Classification,
    Regression,
}

/// Train/test split membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// One audio example with its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRecord {
    pub path: PathBuf,
    pub split: Split,
    pub labels: BTreeMap<String, f64>,
}

/// A validated dataset manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub sample_rate: u32,
    pub clip_seconds: f64,
    pub tasks: BTreeMap<String, TaskKind>,
    pub records: Vec<ManifestRecord>,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    #[serde(rename = "sampleRate")]
    sample_rate: u32,
    #[serde(rename = "clipSeconds")]
    clip_seconds: f64,
    tasks: BTreeMap<String, TaskKind>,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    path: String,
    split: String,
    labels: BTreeMap<String, f64>,
}

impl DatasetManifest {
    /// Expected number of samples per clip.
    pub fn clip_samples(&self) -> usize {
        (self.clip_seconds * self.sample_rate as f64).round() as usize
    }

    /// Count of records per split, as (train, test).
    pub fn split_counts(&self) -> (usize, usize) {
        let train = self
            .records
            .iter()
            .filter(|r| r.split == Split::Train)
            .count();
        (train, self.records.len() - train)
    }

    /// Record indices belonging to `split`, in manifest order.
    pub fn split_indices(&self, split: Split) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.split == split)
            .map(|(i, _)| i)
            .collect()
    }

    /// Label column for one task, in manifest order.
    pub fn labels(&self, task: &str) -> Option<Vec<f64>> {
        if !self.tasks.contains_key(task) {
            return None;
        }
        Some(self.records.iter().map(|r| r.labels[task]).collect())
    }

    /// Digest over record paths and splits; two artifacts computed from the
    /// same manifest share it, so example-order mismatches are detectable.
    pub fn order_digest(&self) -> u64 {
        let mut buf = Vec::new();
        for r in &self.records {
            buf.extend_from_slice(r.path.to_string_lossy().as_bytes());
            buf.push(match r.split {
                Split::Train => 0,
                Split::Test => 1,
            });
            buf.push(b'\n');
        }
        fnv1a64(&buf)
    }
}

/// Loads and validates a JSON-lines manifest.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let (_, header_line) = lines
        .next()
        .ok_or_else(|| Error::MissingHeader("empty file".into()))?;
    let header_line = header_line?;
    let header: HeaderLine = serde_json::from_str(&header_line)
        .map_err(|e| Error::MissingHeader(e.to_string()))?;

    let mut records = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record_index = records.len();
        let raw: RecordLine = serde_json::from_str(&line).map_err(|source| Error::ManifestJson {
            line: lineno + 1,
            source,
        })?;
        let split = match raw.split.as_str() {
            "train" => Split::Train,
            "test" => Split::Test,
            other => {
                return Err(Error::UnknownSplit {
                    record: record_index,
                    split: other.to_string(),
                })
            }
        };
        for task in header.tasks.keys() {
            if !raw.labels.contains_key(task) {
                return Err(Error::MissingLabel {
                    record: record_index,
                    task: task.clone(),
                });
            }
        }
        records.push(ManifestRecord {
            path: PathBuf::from(raw.path),
            split,
            labels: raw.labels,
        });
    }

    Ok(DatasetManifest {
        sample_rate: header.sample_rate,
        clip_seconds: header.clip_seconds,
        tasks: header.tasks,
        records,
    })
}

/// Writes a manifest in the same JSON-lines layout `load_manifest` reads.
pub fn save_manifest(manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header = HeaderLine {
        sample_rate: manifest.sample_rate,
        clip_seconds: manifest.clip_seconds,
        tasks: manifest.tasks.clone(),
    };
    writeln!(w, "{}", serde_json::to_string(&header).expect("header json"))?;
    for r in &manifest.records {
        let line = RecordLine {
            path: r.path.to_string_lossy().into_owned(),
            split: match r.split {
                Split::Train => "train".into(),
                Split::Test => "test".into(),
            },
            labels: r.labels.clone(),
        };
        writeln!(w, "{}", serde_json::to_string(&line).expect("record json"))?;
    }
    w.flush()?;
    Ok(())
}
