//! Policy network: a small MLP mapping a normalized target intensity to the
//! concentration parameters of a Dirichlet over fusion weights.
//!
//! Architecture: two hidden blocks (affine, then layer normalization, then
//! Tanh) of width 128, and an output affine followed by Softplus plus a 0.01
//! offset so every concentration stays strictly positive. Concentrations may
//! fall below 1, which lets the policy place mass near simplex corners and
//! select single adapters when a sparse mixture fits best.
//!
//! Parameters live in one flat vector with a fixed layout, which keeps the
//! optimizer, gradient clipping, and checkpoint format trivial.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsonio;
use crate::seed::stage_rng;

/// Offset added to the Softplus output so concentrations stay positive.
pub const EPSILON_OFFSET: f64 = 0.01;
/// Variance floor inside layer normalization.
pub const LAYER_NORM_EPS: f64 = 1e-5;
/// Hidden width of both hidden blocks.
pub const HIDDEN_WIDTH: usize = 128;
/// Version of the policy checkpoint schema.
pub const POLICY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("target intensity {0} outside [0, 100]")]
    InvalidTarget(f64),
    #[error("normalized input {0} outside [-1, 1]")]
    InvalidInput(f64),
    #[error("numerical error: non-finite value in {0}")]
    NumericalError(String),
    #[error("policy checkpoint format error in {path}: {detail}")]
    FormatError { path: String, detail: String },
    #[error("policy checkpoint version mismatch in {path}: found {found}, expected {expected}")]
    VersionError { path: String, found: u32, expected: u32 },
    #[error("io error on {path}: {detail}")]
    Io { path: String, detail: String },
    #[error("gradient length {got} does not match parameter count {expected}")]
    GradientShape { expected: usize, got: usize },
}

/// Map a target intensity in [0, 100] to the network input in [-1, 1].
pub fn normalize_target(p_target: f64) -> Result<f64, PolicyError> {
    if !p_target.is_finite() || !(0.0..=100.0).contains(&p_target) {
        return Err(PolicyError::InvalidTarget(p_target));
    }
    Ok((p_target - 50.0) / 50.0)
}

/// Positive Dirichlet concentrations produced by the policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationVector {
    alpha: Vec<f64>,
}

impl ConcentrationVector {
    /// Wrap raw concentrations, enforcing the `>= EPSILON_OFFSET` invariant.
    pub fn new(alpha: Vec<f64>) -> Result<Self, PolicyError> {
        for &a in &alpha {
            if !a.is_finite() || a < EPSILON_OFFSET {
                return Err(PolicyError::NumericalError(format!(
                    "concentration {a} below offset {EPSILON_OFFSET}"
                )));
            }
        }
        Ok(Self { alpha })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.alpha.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Network dimensions. `input` is 1 in the pipeline (the normalized target);
/// the fields stay explicit so tests can shrink the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDims {
    pub input: usize,
    pub hidden: usize,
    pub outputs: usize,
}

impl PolicyDims {
    pub fn param_count(&self) -> usize {
        // w1, b1, gain1, bias1, w2, b2, gain2, bias2, w3, b3
        self.hidden * self.input
            + self.hidden * 3
            + self.hidden * self.hidden
            + self.hidden * 3
            + self.outputs * self.hidden
            + self.outputs
    }
}

/// Offsets of each parameter block inside the flat vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    w1: usize,
    b1: usize,
    g1: usize,
    be1: usize,
    w2: usize,
    b2: usize,
    g2: usize,
    be2: usize,
    w3: usize,
    b3: usize,
    total: usize,
}

impl Layout {
    fn new(d: &PolicyDims) -> Self {
        let w1 = 0;
        let b1 = w1 + d.hidden * d.input;
        let g1 = b1 + d.hidden;
        let be1 = g1 + d.hidden;
        let w2 = be1 + d.hidden;
        let b2 = w2 + d.hidden * d.hidden;
        let g2 = b2 + d.hidden;
        let be2 = g2 + d.hidden;
        let w3 = be2 + d.hidden;
        let b3 = w3 + d.outputs * d.hidden;
        let total = b3 + d.outputs;
        Self { w1, b1, g1, be1, w2, b2, g2, be2, w3, b3, total }
    }
}

/// The policy parameters: dimensions plus one flat `f64` vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    dims: PolicyDims,
    params: Vec<f64>,
}

/// Intermediate activations kept from a forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    input: Vec<f64>,
    xhat1: Vec<f64>,
    s1: f64,
    a1: Vec<f64>,
    xhat2: Vec<f64>,
    s2: f64,
    a2: Vec<f64>,
    z3: Vec<f64>,
    pub alpha: Vec<f64>,
}

fn softplus(x: f64) -> f64 {
    // Stable for large |x|.
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl PolicyParams {
    /// Initialize the standard-width network for `n_basis` outputs.
    ///
    /// Hidden affines get uniform fan-in scaled weights, normalization gains
    /// start at 1, and the output affine starts at zero so the initial policy
    /// is the symmetric `alpha = ln 2 + 0.01` everywhere (maximal initial
    /// exploration).
    pub fn init(n_basis: usize, seed: u64) -> Self {
        Self::with_dims(PolicyDims { input: 1, hidden: HIDDEN_WIDTH, outputs: n_basis }, seed)
    }

    /// Initialize with explicit dimensions (tests use small widths).
    pub fn with_dims(dims: PolicyDims, seed: u64) -> Self {
        let layout = Layout::new(&dims);
        let mut params = vec![0.0; layout.total];
        let mut rng = stage_rng(seed, "policy-init");
        let bound1 = 1.0 / (dims.input as f64).sqrt();
        for p in &mut params[layout.w1..layout.g1] {
            *p = rng.random_range(-bound1..bound1);
        }
        let bound2 = 1.0 / (dims.hidden as f64).sqrt();
        for p in &mut params[layout.w2..layout.g2] {
            *p = rng.random_range(-bound2..bound2);
        }
        // Normalization gains start at 1.
        for p in &mut params[layout.g1..layout.be1] {
            *p = 1.0;
        }
        for p in &mut params[layout.g2..layout.be2] {
            *p = 1.0;
        }
        // w3 and b3 stay zero.
        Self { dims, params }
    }

    pub fn dims(&self) -> PolicyDims {
        self.dims
    }

    pub fn n_outputs(&self) -> usize {
        self.dims.outputs
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layout(&self) -> Layout {
        Layout::new(&self.dims)
    }

    /// Concentrations for a normalized input in [-1, 1].
    pub fn forward(&self, p_hat: f64) -> Result<ConcentrationVector, PolicyError> {
        Ok(ConcentrationVector { alpha: self.forward_cached(p_hat)?.alpha })
    }

    /// Forward pass keeping the activations needed for [`Self::backward`].
    pub fn forward_cached(&self, p_hat: f64) -> Result<ForwardCache, PolicyError> {
        if !p_hat.is_finite() || !(-1.0..=1.0).contains(&p_hat) {
            return Err(PolicyError::InvalidInput(p_hat));
        }
        let d = self.dims;
        let l = self.layout();
        let p = &self.params;
        let input = vec![p_hat];

        let mut z1 = vec![0.0; d.hidden];
        for i in 0..d.hidden {
            let mut acc = p[l.b1 + i];
            for (j, &x) in input.iter().enumerate() {
                acc += p[l.w1 + i * d.input + j] * x;
            }
            z1[i] = acc;
        }
        let (xhat1, s1) = layer_norm(&z1);
        let mut a1 = vec![0.0; d.hidden];
        for i in 0..d.hidden {
            a1[i] = (p[l.g1 + i] * xhat1[i] + p[l.be1 + i]).tanh();
        }

        let mut z2 = vec![0.0; d.hidden];
        for i in 0..d.hidden {
            let mut acc = p[l.b2 + i];
            let row = l.w2 + i * d.hidden;
            for (j, &a) in a1.iter().enumerate() {
                acc += p[row + j] * a;
            }
            z2[i] = acc;
        }
        let (xhat2, s2) = layer_norm(&z2);
        let mut a2 = vec![0.0; d.hidden];
        for i in 0..d.hidden {
            a2[i] = (p[l.g2 + i] * xhat2[i] + p[l.be2 + i]).tanh();
        }

        let mut z3 = vec![0.0; d.outputs];
        let mut alpha = vec![0.0; d.outputs];
        for i in 0..d.outputs {
            let mut acc = p[l.b3 + i];
            let row = l.w3 + i * d.hidden;
            for (j, &a) in a2.iter().enumerate() {
                acc += p[row + j] * a;
            }
            z3[i] = acc;
            alpha[i] = softplus(acc) + EPSILON_OFFSET;
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(PolicyError::NumericalError("policy forward output".into()));
        }
        Ok(ForwardCache { input, xhat1, s1, a1, xhat2, s2, a2, z3, alpha })
    }

    /// Backpropagate `d_alpha = dL/d alpha` through the network, returning
    /// `dL/d params` in the flat layout.
    pub fn backward(&self, cache: &ForwardCache, d_alpha: &[f64]) -> Result<Vec<f64>, PolicyError> {
        let d = self.dims;
        if d_alpha.len() != d.outputs {
            return Err(PolicyError::GradientShape { expected: d.outputs, got: d_alpha.len() });
        }
        let l = self.layout();
        let p = &self.params;
        let mut grad = vec![0.0; p.len()];

        // alpha = softplus(z3) + eps  =>  d z3 = d alpha * logistic(z3)
        let mut dz3 = vec![0.0; d.outputs];
        for i in 0..d.outputs {
            dz3[i] = d_alpha[i] * logistic(cache.z3[i]);
        }
        let mut da2 = vec![0.0; d.hidden];
        for i in 0..d.outputs {
            let row = l.w3 + i * d.hidden;
            for j in 0..d.hidden {
                grad[row + j] += dz3[i] * cache.a2[j];
                da2[j] += dz3[i] * p[row + j];
            }
            grad[l.b3 + i] += dz3[i];
        }

        // Block 2: tanh, then layer norm with gain/bias, then affine.
        let dz2 = self.norm_block_backward(
            &mut grad,
            &da2,
            &cache.a2,
            &cache.xhat2,
            cache.s2,
            l.g2,
            l.be2,
        );
        let mut da1 = vec![0.0; d.hidden];
        for i in 0..d.hidden {
            let row = l.w2 + i * d.hidden;
            for j in 0..d.hidden {
                grad[row + j] += dz2[i] * cache.a1[j];
                da1[j] += dz2[i] * p[row + j];
            }
            grad[l.b2 + i] += dz2[i];
        }

        // Block 1.
        let dz1 = self.norm_block_backward(
            &mut grad,
            &da1,
            &cache.a1,
            &cache.xhat1,
            cache.s1,
            l.g1,
            l.be1,
        );
        for i in 0..d.hidden {
            for (j, &x) in cache.input.iter().enumerate() {
                grad[l.w1 + i * d.input + j] += dz1[i] * x;
            }
            grad[l.b1 + i] += dz1[i];
        }

        if grad.iter().any(|g| !g.is_finite()) {
            return Err(PolicyError::NumericalError("policy backward".into()));
        }
        Ok(grad)
    }

    /// Backward through tanh(gain * xhat + bias) and the normalization,
    /// accumulating gain/bias gradients and returning dL/dz for the affine
    /// input of the block.
    fn norm_block_backward(
        &self,
        grad: &mut [f64],
        d_act: &[f64],
        act: &[f64],
        xhat: &[f64],
        s: f64,
        gain_off: usize,
        bias_off: usize,
    ) -> Vec<f64> {
        let n = d_act.len();
        let p = &self.params;
        // tanh'(u) = 1 - tanh(u)^2, with act = tanh(u)
        let mut dn = vec![0.0; n];
        for i in 0..n {
            dn[i] = d_act[i] * (1.0 - act[i] * act[i]);
        }
        let mut dxhat = vec![0.0; n];
        for i in 0..n {
            grad[gain_off + i] += dn[i] * xhat[i];
            grad[bias_off + i] += dn[i];
            dxhat[i] = dn[i] * p[gain_off + i];
        }
        // dz_k = (dxhat_k - mean(dxhat) - xhat_k * mean(dxhat .* xhat)) / s
        let mean_dx = dxhat.iter().sum::<f64>() / n as f64;
        let mean_dx_xhat =
            dxhat.iter().zip(xhat).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        (0..n)
            .map(|k| (dxhat[k] - mean_dx - xhat[k] * mean_dx_xhat) / s)
            .collect()
    }

    /// Write a checkpoint: layer dims, flat parameter segments, and the RNG
    /// seed recorded alongside.
    pub fn save(&self, path: &Path, seed: u64) -> Result<(), PolicyError> {
        let l = self.layout();
        let seg = |from: usize, to: usize| self.params[from..to].to_vec();
        let file = PolicyFile {
            format_version: POLICY_FORMAT_VERSION,
            input_dim: self.dims.input,
            hidden_dim: self.dims.hidden,
            n_basis: self.dims.outputs,
            seed,
            layers: vec![
                LayerRecord::new("hidden1.weight", vec![self.dims.hidden, self.dims.input], seg(l.w1, l.b1)),
                LayerRecord::new("hidden1.bias", vec![self.dims.hidden], seg(l.b1, l.g1)),
                LayerRecord::new("norm1.gain", vec![self.dims.hidden], seg(l.g1, l.be1)),
                LayerRecord::new("norm1.bias", vec![self.dims.hidden], seg(l.be1, l.w2)),
                LayerRecord::new("hidden2.weight", vec![self.dims.hidden, self.dims.hidden], seg(l.w2, l.b2)),
                LayerRecord::new("hidden2.bias", vec![self.dims.hidden], seg(l.b2, l.g2)),
                LayerRecord::new("norm2.gain", vec![self.dims.hidden], seg(l.g2, l.be2)),
                LayerRecord::new("norm2.bias", vec![self.dims.hidden], seg(l.be2, l.w3)),
                LayerRecord::new("output.weight", vec![self.dims.outputs, self.dims.hidden], seg(l.w3, l.b3)),
                LayerRecord::new("output.bias", vec![self.dims.outputs], seg(l.b3, l.total)),
            ],
        };
        let text = jsonio::to_string_precise(&file).map_err(|e| PolicyError::FormatError {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        fs::write(path, text).map_err(|e| PolicyError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    }

    /// Read a checkpoint written by [`Self::save`]; returns the parameters
    /// and the recorded seed.
    pub fn load(path: &Path) -> Result<(Self, u64), PolicyError> {
        let display = path.display().to_string();
        let text = fs::read_to_string(path)
            .map_err(|e| PolicyError::Io { path: display.clone(), detail: e.to_string() })?;
        let file: PolicyFile = serde_json::from_str(&text).map_err(|e| PolicyError::FormatError {
            path: display.clone(),
            detail: format!("line {}, column {}: {e}", e.line(), e.column()),
        })?;
        if file.format_version != POLICY_FORMAT_VERSION {
            return Err(PolicyError::VersionError {
                path: display,
                found: file.format_version,
                expected: POLICY_FORMAT_VERSION,
            });
        }
        let dims =
            PolicyDims { input: file.input_dim, hidden: file.hidden_dim, outputs: file.n_basis };
        let mut params = Vec::with_capacity(dims.param_count());
        for layer in &file.layers {
            let expected: usize = layer.shape.iter().product();
            if layer.data.len() != expected {
                return Err(PolicyError::FormatError {
                    path: display.clone(),
                    detail: format!(
                        "layer {} has {} values, shape {:?} needs {expected}",
                        layer.name,
                        layer.data.len(),
                        layer.shape
                    ),
                });
            }
            params.extend_from_slice(&layer.data);
        }
        if params.len() != dims.param_count() {
            return Err(PolicyError::FormatError {
                path: display,
                detail: format!(
                    "checkpoint has {} parameters, dims need {}",
                    params.len(),
                    dims.param_count()
                ),
            });
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(PolicyError::NumericalError("checkpoint parameters".into()));
        }
        Ok((Self { dims, params }, file.seed))
    }
}

/// Normalize to zero mean and (floored) unit variance; returns the
/// normalized values and the denominator `s = sqrt(var + eps)`.
fn layer_norm(z: &[f64]) -> (Vec<f64>, f64) {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let s = (var + LAYER_NORM_EPS).sqrt();
    (z.iter().map(|v| (v - mean) / s).collect(), s)
}

#[derive(Serialize, Deserialize)]
struct LayerRecord {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl LayerRecord {
    fn new(name: &str, shape: Vec<usize>, data: Vec<f64>) -> Self {
        Self { name: name.into(), shape, data }
    }
}

#[derive(Serialize, Deserialize)]
struct PolicyFile {
    format_version: u32,
    input_dim: usize,
    hidden_dim: usize,
    n_basis: usize,
    seed: u64,
    layers: Vec<LayerRecord>,
}
