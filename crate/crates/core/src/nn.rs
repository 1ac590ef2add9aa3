//! Small feed-forward networks with hand-written reverse-mode gradients.
//!
//! A [`MicroNet`] is a chain of dense layers. Optional conditioning features
//! (a sinusoidal embedding of the normalised timestep and a class vector) are
//! concatenated onto the input before the first layer. One forward pass
//! caches everything needed for both gradient modes: with respect to the
//! parameters (training) and with respect to the input (guidance).

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::IndexedRandom;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

static GENERATION: AtomicU64 = AtomicU64::new(1);

fn next_generation() -> u64 {
    GENERATION.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// `z * sigmoid(z)`: smooth everywhere, so input gradients have no kinks.
    Silu,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Silu => z / (1.0 + (-z).exp()),
            Activation::Identity => z,
        }
    }

    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Silu => {
                let s = 1.0 / (1.0 + (-z).exp());
                s * (1.0 + z * (1.0 - s))
            }
            Activation::Identity => 1.0,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Activation::Silu => "silu",
            Activation::Identity => "identity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    /// Row-major `outputs x inputs`.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

/// Class conditioning fed to the first layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassInput<'a> {
    None,
    Label(usize),
    /// A probability vector in place of the one-hot label.
    Soft(&'a [f64]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cond<'a> {
    /// Timestep divided by the schedule length, in `[0, 1]`.
    pub time: Option<f64>,
    pub class: ClassInput<'a>,
}

impl<'a> Cond<'a> {
    pub const NONE: Cond<'static> = Cond { time: None, class: ClassInput::None };

    pub fn time(time: f64) -> Self {
        Cond { time: Some(time), class: ClassInput::None }
    }

    pub fn time_label(time: f64, label: usize) -> Self {
        Cond { time: Some(time), class: ClassInput::Label(label) }
    }
}

/// Layer sizes plus conditioning widths; enough to build a fresh network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
    pub time_features: usize,
    pub num_classes: usize,
    /// Width of an identity "embedding" layer inserted before the output head.
    pub embedding_width: Option<usize>,
}

impl Architecture {
    pub fn denoiser(dim: usize, num_classes: usize, hidden: usize, depth: usize) -> Self {
        Self {
            input_dim: dim,
            hidden: vec![hidden; depth],
            output_dim: dim,
            time_features: TIME_FEATURES,
            num_classes,
            embedding_width: None,
        }
    }

    pub fn embedder(dim: usize, num_classes: usize, hidden: usize, depth: usize, width: usize) -> Self {
        Self {
            input_dim: dim,
            hidden: vec![hidden; depth],
            output_dim: num_classes,
            time_features: TIME_FEATURES,
            num_classes: 0,
            embedding_width: Some(width),
        }
    }

    pub fn discriminator(dim: usize, hidden: usize, depth: usize) -> Self {
        Self {
            input_dim: dim,
            hidden: vec![hidden; depth],
            output_dim: 2,
            time_features: TIME_FEATURES,
            num_classes: 0,
            embedding_width: None,
        }
    }
}

/// Width of the sinusoidal timestep features.
pub const TIME_FEATURES: usize = 16;

/// Sinusoidal features of a normalised timestep `s = t / T`.
pub fn time_features(s: f64, width: usize, out: &mut Vec<f64>) {
    let half = width / 2;
    for i in 0..half {
        let freq = if half > 1 { 200f64.powf(i as f64 / (half - 1) as f64) } else { 1.0 };
        out.push((s * freq).sin());
    }
    for i in 0..half {
        let freq = if half > 1 { 200f64.powf(i as f64 / (half - 1) as f64) } else { 1.0 };
        out.push((s * freq).cos());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroNet {
    pub layers: Vec<Layer>,
    pub input_dim: usize,
    pub time_features: usize,
    pub num_classes: usize,
    /// Index of the layer whose output is the embedding `f(x)`.
    pub embedding_layer: Option<usize>,
    generation: u64,
}

/// Activations of one forward pass, tied to the parameters that produced it.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    generation: u64,
    /// `acts[0]` is the full first-layer input; `acts[l + 1]` is layer `l`'s output.
    acts: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("cache holds at least the input")
    }

    pub fn depth(&self) -> usize {
        self.pre.len()
    }
}

/// Gradient with respect to every weight and bias, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrad {
    pub weight: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl ParamGrad {
    pub fn zeros_like(net: &MicroNet) -> Self {
        Self {
            weight: net.layers.iter().map(|l| vec![0.0; l.weight.len()]).collect(),
            bias: net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &ParamGrad) {
        for (a, b) in self.weight.iter_mut().zip(&other.weight) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.bias.iter_mut().zip(&other.bias) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.weight.iter_mut().flatten().for_each(|x| *x *= s);
        self.bias.iter_mut().flatten().for_each(|x| *x *= s);
    }

    /// Layer-by-layer `weight, bias` order, matching [`MicroNet::parameters`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weight.iter().zip(&self.bias) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

impl MicroNet {
    /// Builds a network with seeded Gaussian initialisation (variance `1/fan_in`).
    pub fn new(arch: &Architecture, seed: u64) -> Result<Self> {
        if arch.input_dim == 0 || arch.output_dim == 0 {
            return Err(Error::contract("network input and output dims must be >= 1"));
        }
        if !arch.time_features.is_multiple_of(2) {
            return Err(Error::contract("time feature width must be even"));
        }
        let mut widths = vec![arch.input_dim + arch.time_features + arch.num_classes];
        let mut acts = Vec::new();
        for &h in &arch.hidden {
            widths.push(h);
            acts.push(Activation::Silu);
        }
        let mut embedding_layer = None;
        if let Some(w) = arch.embedding_width {
            widths.push(w);
            acts.push(Activation::Identity);
            embedding_layer = Some(acts.len() - 1);
        }
        widths.push(arch.output_dim);
        acts.push(Activation::Identity);

        let layers = (0..acts.len())
            .map(|l| {
                let (inputs, outputs) = (widths[l], widths[l + 1]);
                let mut rng = stream_rng(seed, Stream::Init, l as u64, 0);
                let normal = Normal::new(0.0, (1.0 / inputs as f64).sqrt()).expect("positive sd");
                Layer {
                    inputs,
                    outputs,
                    weight: (0..inputs * outputs).map(|_| normal.sample(&mut rng)).collect(),
                    bias: vec![0.0; outputs],
                    activation: acts[l],
                }
            })
            .collect();
        Self::from_layers(layers, arch.input_dim, arch.time_features, arch.num_classes, embedding_layer)
    }

    pub fn from_layers(
        layers: Vec<Layer>,
        input_dim: usize,
        time_features: usize,
        num_classes: usize,
        embedding_layer: Option<usize>,
    ) -> Result<Self> {
        let first = layers.first().ok_or_else(|| Error::contract("network has no layers"))?;
        if first.inputs != input_dim + time_features + num_classes {
            return Err(Error::contract(format!(
                "first layer takes {} inputs, conditioning implies {}",
                first.inputs,
                input_dim + time_features + num_classes
            )));
        }
        for (l, layer) in layers.iter().enumerate() {
            if layer.weight.len() != layer.inputs * layer.outputs || layer.bias.len() != layer.outputs {
                return Err(Error::contract(format!("layer {l} parameter shapes are inconsistent")));
            }
            if l > 0 && layers[l - 1].outputs != layer.inputs {
                return Err(Error::contract(format!("layer {l} does not chain onto layer {}", l - 1)));
            }
            if layer.weight.iter().chain(&layer.bias).any(|v| !v.is_finite()) {
                return Err(Error::contract(format!("layer {l} has non-finite parameters")));
            }
        }
        if embedding_layer.is_some_and(|e| e >= layers.len()) {
            return Err(Error::contract("embedding layer index out of range"));
        }
        Ok(Self { layers, input_dim, time_features, num_classes, embedding_layer, generation: next_generation() })
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs)
    }

    /// Width of the embedding layer, if the network has one.
    pub fn embedding_dim(&self) -> Option<usize> {
        self.embedding_layer.map(|e| self.layers[e].outputs)
    }

    fn assemble_input(&self, x: &[f64], cond: &Cond<'_>) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::contract(format!("input has dim {}, network expects {}", x.len(), self.input_dim)));
        }
        let mut input = Vec::with_capacity(self.layers[0].inputs);
        input.extend_from_slice(x);
        if self.time_features > 0 {
            let s = cond
                .time
                .ok_or_else(|| Error::contract("time-conditioned network called without a timestep"))?;
            if !(-1e-12..=1.0 + 1e-12).contains(&s) {
                return Err(Error::contract(format!("normalised timestep {s} outside [0, 1]")));
            }
            time_features(s, self.time_features, &mut input);
        }
        if self.num_classes > 0 {
            match cond.class {
                ClassInput::Label(y) if y < self.num_classes => {
                    input.extend((0..self.num_classes).map(|c| if c == y { 1.0 } else { 0.0 }));
                }
                ClassInput::Label(y) => {
                    return Err(Error::contract(format!("class {y} >= class count {}", self.num_classes)))
                }
                ClassInput::Soft(p) if p.len() == self.num_classes => input.extend_from_slice(p),
                ClassInput::Soft(p) => {
                    return Err(Error::contract(format!(
                        "class vector has {} entries, expected {}",
                        p.len(),
                        self.num_classes
                    )))
                }
                ClassInput::None => return Err(Error::contract("class-conditioned network called without a class")),
            }
        }
        Ok(input)
    }

    pub fn forward(&self, x: &[f64], cond: &Cond<'_>) -> Result<ForwardCache> {
        self.forward_to(x, cond, self.layers.len())
    }

    /// Runs only the first `depth` layers.
    pub fn forward_to(&self, x: &[f64], cond: &Cond<'_>, depth: usize) -> Result<ForwardCache> {
        if depth == 0 || depth > self.layers.len() {
            return Err(Error::contract(format!("forward depth {depth} outside 1..={}", self.layers.len())));
        }
        let mut acts = Vec::with_capacity(depth + 1);
        let mut pre = Vec::with_capacity(depth);
        acts.push(self.assemble_input(x, cond)?);
        for layer in &self.layers[..depth] {
            let a = acts.last().expect("non-empty");
            let mut z = layer.bias.clone();
            for (o, zo) in z.iter_mut().enumerate() {
                let row = &layer.weight[o * layer.inputs..(o + 1) * layer.inputs];
                *zo += row.iter().zip(a).map(|(w, v)| w * v).sum::<f64>();
            }
            let out = z.iter().map(|&v| layer.activation.apply(v)).collect();
            pre.push(z);
            acts.push(out);
        }
        Ok(ForwardCache { generation: self.generation, acts, pre })
    }

    /// Forward to the embedding layer; the cache's output is `f(x)`.
    pub fn embed(&self, x: &[f64], cond: &Cond<'_>) -> Result<ForwardCache> {
        let e = self
            .embedding_layer
            .ok_or_else(|| Error::contract("network has no embedding layer"))?;
        self.forward_to(x, cond, e + 1)
    }

    fn check_cache(&self, cache: &ForwardCache, adjoint: &[f64]) -> Result<()> {
        if cache.generation != self.generation {
            return Err(Error::contract("stale forward cache: parameters changed since the forward pass"));
        }
        if adjoint.len() != cache.output().len() {
            return Err(Error::contract(format!(
                "adjoint has {} entries, cached output has {}",
                adjoint.len(),
                cache.output().len()
            )));
        }
        Ok(())
    }

    fn backward(&self, cache: &ForwardCache, adjoint: &[f64], mut params: Option<&mut ParamGrad>) -> Vec<f64> {
        let mut g = adjoint.to_vec();
        for l in (0..cache.depth()).rev() {
            let layer = &self.layers[l];
            let delta: Vec<f64> = g
                .iter()
                .zip(&cache.pre[l])
                .map(|(gi, &z)| gi * layer.activation.derivative(z))
                .collect();
            let a = &cache.acts[l];
            if let Some(p) = params.as_deref_mut() {
                let gw = &mut p.weight[l];
                for (o, d) in delta.iter().enumerate() {
                    if *d == 0.0 {
                        continue;
                    }
                    let row = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                    row.iter_mut().zip(a).for_each(|(w, v)| *w += d * v);
                }
                p.bias[l].iter_mut().zip(&delta).for_each(|(b, d)| *b += d);
            }
            let mut next = vec![0.0; layer.inputs];
            for (o, d) in delta.iter().enumerate() {
                let row = &layer.weight[o * layer.inputs..(o + 1) * layer.inputs];
                next.iter_mut().zip(row).for_each(|(n, w)| *n += d * w);
            }
            g = next;
        }
        g
    }

    /// Gradient of `adjoint . output` with respect to the data input `x`
    /// (conditioning features excluded).
    pub fn grad_input(&self, cache: &ForwardCache, adjoint: &[f64]) -> Result<Vec<f64>> {
        self.check_cache(cache, adjoint)?;
        let mut g = self.backward(cache, adjoint, None);
        g.truncate(self.input_dim);
        Ok(g)
    }

    /// Gradient of `adjoint . output` with respect to all parameters.
    pub fn grad_params(&self, cache: &ForwardCache, adjoint: &[f64]) -> Result<ParamGrad> {
        let mut grad = ParamGrad::zeros_like(self);
        self.accumulate_grad_params(cache, adjoint, &mut grad)?;
        Ok(grad)
    }

    /// Adds this example's parameter gradient into `grad`.
    pub fn accumulate_grad_params(&self, cache: &ForwardCache, adjoint: &[f64], grad: &mut ParamGrad) -> Result<()> {
        self.check_cache(cache, adjoint)?;
        self.backward(cache, adjoint, Some(grad));
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            out.extend_from_slice(&l.weight);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_parameters(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.parameter_count() {
            return Err(Error::contract("parameter vector has the wrong length"));
        }
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weight.len();
            l.weight.copy_from_slice(&flat[at..at + nw]);
            at += nw;
            let nb = l.bias.len();
            l.bias.copy_from_slice(&flat[at..at + nb]);
            at += nb;
        }
        self.generation = next_generation();
        Ok(())
    }

    fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weight.iter().chain(&l.bias).all(|v| v.is_finite()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("#lowdens-micronet v1\n");
        let _ = writeln!(s, "input_dim {}", self.input_dim);
        let _ = writeln!(s, "time_features {}", self.time_features);
        let _ = writeln!(s, "num_classes {}", self.num_classes);
        match self.embedding_layer {
            Some(e) => {
                let _ = writeln!(s, "embedding_layer {e}");
            }
            None => s.push_str("embedding_layer none\n"),
        }
        let _ = writeln!(s, "layers {}", self.layers.len());
        for l in &self.layers {
            let _ = writeln!(s, "layer {} {} {}", l.inputs, l.outputs, l.activation.tag());
            let row: Vec<String> = l.weight.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
            let row: Vec<String> = l.bias.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the text checkpoint written by [`MicroNet::to_text`], reading
    /// lines from `lines` (which may continue past the network block).
    pub fn parse_lines<'a, I>(lines: &mut I, origin: &str) -> Result<Self>
    where
        I: Iterator<Item = (usize, &'a str)>,
    {
        let mut last = 0;
        let mut next = |what: &str| -> Result<(usize, &'a str)> {
            let item = lines.next().ok_or_else(|| Error::Parse {
                path: origin.into(),
                line: last + 1,
                msg: format!("truncated network checkpoint, expected {what}"),
            })?;
            last = item.0;
            Ok(item)
        };
        let perr = |line: usize, msg: String| Error::Parse { path: origin.into(), line, msg };
        let (no, head) = next("header")?;
        if head != "#lowdens-micronet v1" {
            return Err(perr(no, format!("expected '#lowdens-micronet v1', found '{head}'")));
        }
        let mut kv = |key: &str| -> Result<(usize, String)> {
            let (no, line) = next(key)?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok((no, v.trim().to_string())),
                _ => Err(perr(no, format!("expected '{key} <value>', found '{line}'"))),
            }
        };
        let num = |(no, v): (usize, String)| v.parse::<usize>().map_err(|e| perr(no, format!("{e}: '{v}'")));
        let input_dim = num(kv("input_dim")?)?;
        let time_features = num(kv("time_features")?)?;
        let num_classes = num(kv("num_classes")?)?;
        let (eno, ev) = kv("embedding_layer")?;
        let embedding_layer = if ev == "none" { None } else { Some(num((eno, ev))?) };
        let n_layers = num(kv("layers")?)?;
        let mut layers = Vec::with_capacity(n_layers);
        for _ in 0..n_layers {
            let (no, line) = next("layer shape")?;
            let f: Vec<&str> = line.split_ascii_whitespace().collect();
            if f.len() != 4 || f[0] != "layer" {
                return Err(perr(no, format!("expected 'layer <in> <out> <activation>', found '{line}'")));
            }
            let inputs = num((no, f[1].to_string()))?;
            let outputs = num((no, f[2].to_string()))?;
            let activation = match f[3] {
                "silu" => Activation::Silu,
                "identity" => Activation::Identity,
                other => return Err(perr(no, format!("unknown activation '{other}'"))),
            };
            let mut floats = |expect: usize| -> Result<Vec<f64>> {
                let (no, line) = next("parameter row")?;
                let v = line
                    .split_ascii_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|e| perr(no, format!("{e}: '{t}'"))))
                    .collect::<Result<Vec<_>>>()?;
                if v.len() != expect {
                    return Err(perr(no, format!("expected {expect} values, found {}", v.len())));
                }
                Ok(v)
            };
            let weight = floats(inputs * outputs)?;
            let bias = floats(outputs)?;
            layers.push(Layer { inputs, outputs, weight, bias, activation });
        }
        MicroNet::from_layers(layers, input_dim, time_features, num_classes, embedding_layer)
            .map_err(|e| perr(last, e.to_string()))
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        Self::parse_lines(&mut lines, origin)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    /// Heavy-ball SGD.
    Sgd,
    /// Adam with decoupled weight decay; `momentum` is the first-moment decay.
    Adam,
}

const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub optimizer: Optimizer,
    pub step_size: f64,
    pub steps: usize,
    pub batch: usize,
    pub seed: u64,
    pub weight_decay: f64,
    /// Heavy-ball momentum; 0 gives plain SGD.
    pub momentum: f64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size >= 0.0 && self.step_size.is_finite()) {
            return Err(Error::Config(format!("step_size must be >= 0, got {}", self.step_size)));
        }
        if self.batch == 0 {
            return Err(Error::Config("batch must be >= 1".into()));
        }
        if !(self.weight_decay >= 0.0) || !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config("weight_decay must be >= 0 and momentum in [0, 1)".into()));
        }
        Ok(())
    }
}

/// A per-example differentiable loss.
///
/// `draw` is a unique counter for this (step, slot) pair; objectives use it to
/// address their own randomness (timesteps, noise) so results do not depend
/// on thread scheduling.
pub trait Objective: Sync {
    fn len(&self) -> usize;

    /// Returns the example's loss and adds its parameter gradient into `grad`.
    fn example(&self, net: &MicroNet, example: usize, draw: u64, grad: &mut ParamGrad) -> Result<f64>;
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub net: MicroNet,
    /// Mean minibatch loss at every step.
    pub trace: Vec<f64>,
}

const REDUCTION_CHUNKS: usize = 8;

/// Minibatch SGD (optionally with momentum) or Adam, with weight decay.
///
/// The batch is reduced in a fixed number of chunks summed in order, so the
/// result is identical regardless of the size of the thread pool.
pub fn train<O: Objective>(mut net: MicroNet, objective: &O, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let n = objective.len();
    if n == 0 && cfg.steps > 0 {
        return Err(Error::contract("training objective has no examples"));
    }
    let all: Vec<usize> = (0..n).collect();
    let mut velocity = ParamGrad::zeros_like(&net);
    let mut second = ParamGrad::zeros_like(&net);
    let mut trace = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps {
        let mut rng = stream_rng(cfg.seed, Stream::Batch, step as u64, 0);
        let batch: Vec<usize> = (0..cfg.batch).map(|_| *all.choose(&mut rng).expect("n > 0")).collect();
        let chunk = cfg.batch.div_ceil(REDUCTION_CHUNKS);
        let parts = batch
            .par_chunks(chunk)
            .enumerate()
            .map(|(ci, ex)| {
                let mut g = ParamGrad::zeros_like(&net);
                let mut loss = 0.0;
                for (j, &e) in ex.iter().enumerate() {
                    let draw = (step as u64) << 20 | (ci * chunk + j) as u64;
                    loss += objective.example(&net, e, draw, &mut g)?;
                }
                Ok((loss, g))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut grad = ParamGrad::zeros_like(&net);
        let mut loss = 0.0;
        for (l, g) in &parts {
            loss += l;
            grad.add_assign(g);
        }
        loss /= cfg.batch as f64;
        if !loss.is_finite() {
            return Err(Error::Numerical { stage: "training", step, msg: format!("loss became {loss}") });
        }
        trace.push(loss);
        grad.scale(1.0 / cfg.batch as f64);

        if cfg.step_size == 0.0 {
            continue;
        }
        let t = (step + 1) as i32;
        let (c1, c2) = (1.0 - cfg.momentum.powi(t), 1.0 - ADAM_BETA2.powi(t));
        for (l, layer) in net.layers.iter_mut().enumerate() {
            let update = |p: &mut [f64], g: &[f64], v: &mut [f64], s: &mut [f64], decay: f64| match cfg.optimizer {
                Optimizer::Sgd => {
                    for ((p, g), v) in p.iter_mut().zip(g).zip(v.iter_mut()) {
                        *v = cfg.momentum * *v + g + decay * *p;
                        *p -= cfg.step_size * *v;
                    }
                }
                Optimizer::Adam => {
                    for (((p, g), v), s) in p.iter_mut().zip(g).zip(v.iter_mut()).zip(s.iter_mut()) {
                        *v = cfg.momentum * *v + (1.0 - cfg.momentum) * g;
                        *s = ADAM_BETA2 * *s + (1.0 - ADAM_BETA2) * g * g;
                        *p -= cfg.step_size * ((*v / c1) / ((*s / c2).sqrt() + ADAM_EPS) + decay * *p);
                    }
                }
            };
            update(&mut layer.weight, &grad.weight[l], &mut velocity.weight[l], &mut second.weight[l], cfg.weight_decay);
            update(&mut layer.bias, &grad.bias[l], &mut velocity.bias[l], &mut second.bias[l], 0.0);
        }
        net.generation = next_generation();
    }
    if !net.is_finite() {
        return Err(Error::Numerical {
            stage: "training",
            step: cfg.steps,
            msg: "parameters became non-finite".into(),
        });
    }
    Ok(TrainOutcome { net, trace })
}
