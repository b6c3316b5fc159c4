//! Named trainable parameters.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::autodiff::Tensor;
use crate::error::{Error, Result};

/// All named trainable tensors of a model, in a fixed creation order that
/// also defines the checkpoint layout and the SGD/clipping iteration order.
#[derive(Debug, Default)]
pub struct ParameterStore {
    entries: Vec<(String, Tensor)>,
}

impl ParameterStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a tensor under `name` and returns a shared handle to it.
    pub fn add(&mut self, name: impl Into<String>, tensor: Tensor) -> Tensor {
        let name = name.into();
        debug_assert!(
            self.get(&name).is_none(),
            "duplicate parameter name {name}"
        );
        tensor.set_requires_grad(true);
        self.entries.push((name, tensor.clone()));
        tensor
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn require(&self, name: &str) -> Result<Tensor> {
        self.get(name)
            .cloned()
            .ok_or_else(|| Error::BadCheckpoint(format!("missing parameter {name:?}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of scalar parameters.
    pub fn scalar_count(&self) -> usize {
        self.entries.iter().map(|(_, t)| t.len()).sum()
    }

    pub fn zero_grads(&self) {
        for (_, t) in &self.entries {
            t.zero_grad();
        }
    }

    /// Deep copy of all values, for best-epoch snapshots.
    pub fn snapshot(&self) -> Vec<(String, Vec<f64>)> {
        self.entries
            .iter()
            .map(|(n, t)| (n.clone(), t.values()))
            .collect()
    }

    pub fn restore(&self, snapshot: &[(String, Vec<f64>)]) {
        assert_eq!(snapshot.len(), self.entries.len());
        for ((name, values), (n, t)) in snapshot.iter().zip(&self.entries) {
            assert_eq!(name, n, "snapshot/store parameter order mismatch");
            t.set_values(values);
        }
    }
}

/// Deterministic weight initializer driving a seeded stream.
pub struct Initializer {
    rng: ChaCha8Rng,
}

impl Initializer {
    pub fn new(rng: ChaCha8Rng) -> Self {
        Initializer { rng }
    }

    fn uniform(&mut self, limit: f64) -> f64 {
        (self.rng.random::<f64>() * 2.0 - 1.0) * limit
    }

    /// `[rows, cols]` matrix, uniform in `±sqrt(6/(fan_in+fan_out))`.
    pub fn glorot_matrix(&mut self, rows: usize, cols: usize) -> Tensor {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        let values = (0..rows * cols).map(|_| self.uniform(limit)).collect();
        Tensor::from_vec(&[rows, cols], values)
    }

    /// Uniform in `±limit`, any shape.
    pub fn uniform_tensor(&mut self, shape: &[usize], limit: f64) -> Tensor {
        let n: usize = shape.iter().product();
        let values = (0..n).map(|_| self.uniform(limit)).collect();
        Tensor::from_vec(shape, values)
    }

    pub fn uniform_row(&mut self, cols: usize, limit: f64) -> Vec<f64> {
        (0..cols).map(|_| self.uniform(limit)).collect()
    }
}
