//! Named, shaped f32 tensors and ordered bundles of them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A named tensor: row-major f32 data with explicit dims.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    name: String,
    dims: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    /// Builds a tensor, rejecting empty/zero dims and length mismatches.
    pub fn new(name: impl Into<String>, dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        let name = name.into();
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::BadDims { name, dims });
        }
        let numel: usize = dims.iter().product();
        if data.len() != numel {
            return Err(Error::ShapeMismatch {
                name,
                dims,
                len: data.len(),
            });
        }
        Ok(Self { name, dims, data })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }
}

/// An ordered collection of uniquely named tensors plus string metadata
/// (architecture id, seed, trained flag, ...).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensorBundle {
    entries: Vec<Tensor>,
    meta: BTreeMap<String, String>,
}

impl TensorBundle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a tensor, preserving insertion order.
    pub fn push(&mut self, tensor: Tensor) -> Result<()> {
        if self.get(tensor.name()).is_some() {
            return Err(Error::DuplicateName(tensor.name().to_string()));
        }
        self.entries.push(tensor);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.entries.iter().find(|t| t.name() == name)
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.insert(key.into(), value.into());
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.get(key).map(String::as_str)
    }
}
