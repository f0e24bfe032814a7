//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any featprobe operation.
#[derive(Debug, Error)]
pub enum Error {
    /// An underlying I/O error.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A bundle file did not start with the `FTB1` magic bytes.
    #[error("bad magic bytes {found:?}, expected \"FTB1\"")]
    BadMagic { found: [u8; 4] },

    /// A bundle file ended in the middle of a field or payload.
    #[error("truncated bundle file while reading {context}")]
    Truncated { context: &'static str },

    /// A bundle tensor used a dtype code other than 1 (f32).
    #[error("unknown dtype code {0}, only 1 (f32) is supported")]
    UnknownDtype(u8),

    /// Tensor data length does not match the product of its dims.
    #[error("tensor '{name}': data length {len} != product of dims {dims:?}")]
    ShapeMismatch {
        name: String,
        dims: Vec<usize>,
        len: usize,
    },

    /// Tensor dims are empty or contain a zero.
    #[error("tensor '{name}': invalid dims {dims:?}")]
    BadDims { name: String, dims: Vec<usize> },

    /// Two tensors in one bundle share a name.
    #[error("duplicate tensor name '{0}' in bundle")]
    DuplicateName(String),

    /// A bundle does not match the weight layout required by an architecture.
    #[error("weight bundle does not match architecture {arch}: {detail}")]
    WeightMismatch { arch: String, detail: String },

    /// A manifest line failed JSON parsing.
    #[error("manifest line {line}: {source}")]
    ManifestJson {
        line: usize,
        source: serde_json::Error,
    },

    /// A manifest record is missing a label required by a declared task.
    #[error("manifest record {record} is missing label for task '{task}'")]
    MissingLabel { record: usize, task: String },

    /// A manifest record used a split token other than train/test.
    #[error("manifest record {record}: unknown split '{split}'")]
    UnknownSplit { record: usize, split: String },

    /// A manifest file without a valid header line.
    #[error("manifest is missing its header line: {0}")]
    MissingHeader(String),

    /// A WAV file uses an encoding outside 16-bit PCM / 32-bit float.
    #[error("unsupported wav encoding: {0}")]
    UnsupportedEncoding(String),

    /// A WAV file could not be decoded at all.
    #[error("corrupt wav file: {0}")]
    CorruptWav(String),

    /// A clip's sample rate disagrees with the manifest.
    #[error("sample rate mismatch: clip is {found} Hz, manifest expects {expected} Hz")]
    SampleRateMismatch { found: u32, expected: u32 },

    /// A mel filterbank was requested beyond the Nyquist frequency.
    #[error("mel fmax {fmax} Hz exceeds Nyquist {nyquist} Hz")]
    FmaxAboveNyquist { fmax: f64, nyquist: f64 },

    /// Matrix construction with inconsistent row lengths or non-finite values.
    #[error("invalid feature matrix: {0}")]
    BadMatrix(String),

    /// Operation got matrices whose example counts or order disagree.
    #[error("example mismatch: {0}")]
    ExampleMismatch(String),

    /// Feature extraction was configured inconsistently.
    #[error("feature spec error: {0}")]
    BadFeatureSpec(String),

    /// Convolution geometry does not admit an output.
    #[error("conv geometry: {0}")]
    BadGeometry(String),

    /// A similarity measure is undefined for the given inputs.
    #[error("similarity undefined: {0}")]
    DegenerateSimilarity(String),

    /// Logistic-regression training produced a non-finite loss.
    #[error("training diverged at epoch {epoch} (non-finite loss)")]
    Divergence { epoch: usize },

    /// Decoding inputs are inconsistent (labels, dims, class counts).
    #[error("decode error: {0}")]
    BadDecode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
