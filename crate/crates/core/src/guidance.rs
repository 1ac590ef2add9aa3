//! Hardness scores from per-class Gaussians in an embedding space, and the
//! two guiding losses with their input gradients.
//!
//! The hardness of `x` under class `y` is the Gaussian negative
//! log-likelihood of its embedding `f(x)`:
//!
//! ```text
//! H(x, y) = 1/2 [ (f - mu_y)^T Sigma_y^-1 (f - mu_y) + ln det Sigma_y + k ln 2 pi ]
//! ```
//!
//! During sampling the embedder sees noisy inputs, so class statistics are
//! fitted on forward-diffused training data at a grid of timesteps and looked
//! up by nearest grid point.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{log_sum_exp, LabeledDataset};
use crate::diffusion::{forward_diffuse, NoiseSchedule};
use crate::error::{Error, Result};
use crate::nn::{self, Architecture, Cond, MicroNet, Objective, ParamGrad, TrainConfig};
use crate::rng::{normal_vec, stream_rng, Stream};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Relative covariance shrinkage: `lambda = SHRINKAGE * trace(Sigma) / k`.
pub const SHRINKAGE: f64 = 1e-3;
/// Absolute floor on `lambda`, so a class of identical points still fits.
pub const SHRINKAGE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassGaussian {
    pub mean: Vec<f64>,
    /// Regularised covariance, row-major.
    pub covariance: Vec<f64>,
    pub precision: Vec<f64>,
    pub log_det: f64,
    pub shrinkage: f64,
    pub count: usize,
}

impl ClassGaussian {
    /// Builds from a mean and an unregularised covariance; adds `lambda I`.
    pub fn from_moments(mean: Vec<f64>, raw_cov: &[f64], count: usize) -> Result<Self> {
        let k = mean.len();
        let trace: f64 = (0..k).map(|i| raw_cov[i * k + i]).sum();
        let shrinkage = (SHRINKAGE * trace / k as f64).max(SHRINKAGE_FLOOR);
        let mut cov = DMatrix::from_row_slice(k, k, raw_cov);
        cov = (&cov + cov.transpose()) * 0.5;
        for i in 0..k {
            cov[(i, i)] += shrinkage;
        }
        Self::from_covariance(mean, cov, shrinkage, count)
    }

    fn from_covariance(mean: Vec<f64>, cov: DMatrix<f64>, shrinkage: f64, count: usize) -> Result<Self> {
        let k = mean.len();
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numerical { stage: "class model", step: 0, msg: "covariance is not SPD".into() })?;
        let log_det = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let precision = chol.inverse();
        let row_major = |m: &DMatrix<f64>| -> Vec<f64> { (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|ij| m[ij]).collect() };
        Ok(Self { covariance: row_major(&cov), precision: row_major(&precision), mean, log_det, shrinkage, count })
    }

    /// Unit covariance around `mean`; used where embedding statistics are unreliable.
    pub fn identity(mean: Vec<f64>, count: usize) -> Self {
        let k = mean.len();
        let eye: Vec<f64> = (0..k * k).map(|i| if i % (k + 1) == 0 { 1.0 } else { 0.0 }).collect();
        Self { covariance: eye.clone(), precision: eye, mean, log_det: 0.0, shrinkage: 0.0, count }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `(H, Sigma^-1 (f - mu))`.
    fn score(&self, f: &[f64]) -> (f64, Vec<f64>) {
        let k = self.dim();
        let diff: Vec<f64> = f.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        let pd: Vec<f64> = (0..k)
            .map(|i| self.precision[i * k..(i + 1) * k].iter().zip(&diff).map(|(p, d)| p * d).sum())
            .collect();
        let maha: f64 = diff.iter().zip(&pd).map(|(a, b)| a * b).sum();
        (0.5 * (maha + self.log_det + k as f64 * LN_2PI), pd)
    }
}

/// Gaussian models of every class's embeddings at one timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianClassModel {
    pub timestep: usize,
    pub identity_precision: bool,
    pub classes: Vec<ClassGaussian>,
}

impl GaussianClassModel {
    pub fn embedding_dim(&self) -> usize {
        self.classes.first().map_or(0, ClassGaussian::dim)
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    fn class(&self, y: usize) -> Result<&ClassGaussian> {
        self.classes
            .get(y)
            .ok_or_else(|| Error::contract(format!("class {y} not in class model ({} classes)", self.classes.len())))
    }
}

/// Hardness of embedding `f` under class `y`.
pub fn hardness_score(model: &GaussianClassModel, embedding: &[f64], y: usize) -> Result<f64> {
    let c = model.class(y)?;
    if embedding.len() != c.dim() {
        return Err(Error::contract("embedding dimension does not match class model"));
    }
    Ok(c.score(embedding).0)
}

fn embedding_cond(net: &MicroNet, t: usize, steps: usize) -> Cond<'static> {
    if net.time_features > 0 {
        Cond::time(t as f64 / steps.max(1) as f64)
    } else {
        Cond::NONE
    }
}

/// Embeds the dataset, forward-diffused to `t` (no noise at `t = 0`).
fn embed_dataset(
    embedder: &MicroNet,
    ds: &LabeledDataset,
    t: usize,
    schedule: &NoiseSchedule,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let cond = embedding_cond(embedder, t, schedule.steps);
    (0..ds.len())
        .map(|i| {
            let x = if t == 0 {
                ds.point(i).to_vec()
            } else {
                let eps = normal_vec(seed, Stream::Diffuse, i as u64, t as u64, ds.dim);
                forward_diffuse(ds.point(i), t, &eps, schedule)?
            };
            Ok(embedder.embed(&x, &cond)?.output().to_vec())
        })
        .collect()
}

/// Per-class sample mean and shrinkage-regularised sample covariance of
/// embeddings at timestep `t`.
pub fn fit_class_model(
    embedder: &MicroNet,
    ds: &LabeledDataset,
    t: usize,
    schedule: &NoiseSchedule,
    seed: u64,
) -> Result<GaussianClassModel> {
    let k = embedder.embedding_dim().ok_or_else(|| Error::contract("embedder has no embedding layer"))?;
    let emb = embed_dataset(embedder, ds, t, schedule, seed)?;
    let classes = (0..ds.num_classes)
        .map(|c| {
            let rows: Vec<&Vec<f64>> = ds.class_indices(c).into_iter().map(|i| &emb[i]).collect();
            if rows.is_empty() {
                return Err(Error::EmptyClass(c));
            }
            let n = rows.len() as f64;
            let mut mean = vec![0.0; k];
            for r in &rows {
                mean.iter_mut().zip(r.iter()).for_each(|(m, v)| *m += v / n);
            }
            let mut cov = vec![0.0; k * k];
            let denom = (n - 1.0).max(1.0);
            for r in &rows {
                for i in 0..k {
                    let di = r[i] - mean[i];
                    for j in 0..k {
                        cov[i * k + j] += di * (r[j] - mean[j]) / denom;
                    }
                }
            }
            ClassGaussian::from_moments(mean, &cov, rows.len())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianClassModel { timestep: t, identity_precision: false, classes })
}

/// Class models over a grid of timesteps.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModelGrid {
    pub steps: usize,
    pub models: Vec<GaussianClassModel>,
}

/// True when `t` lies in the top quarter of the schedule, where embeddings of
/// near-white-noise inputs collapse and the precision is replaced by `I`.
pub fn in_identity_band(t: usize, steps: usize) -> bool {
    4 * t > 3 * steps
}

impl ClassModelGrid {
    /// Fits class models at `grid_size` evenly spaced timesteps in `0..=T`.
    pub fn fit(
        embedder: &MicroNet,
        ds: &LabeledDataset,
        schedule: &NoiseSchedule,
        grid_size: usize,
        seed: u64,
    ) -> Result<Self> {
        if grid_size < 2 {
            return Err(Error::Config("class-model grid needs at least 2 timesteps".into()));
        }
        let steps = schedule.steps;
        let mut grid: Vec<usize> = (0..grid_size)
            .map(|i| ((steps as f64) * i as f64 / (grid_size - 1) as f64).round() as usize)
            .collect();
        grid.dedup();
        let models = grid
            .into_iter()
            .map(|t| {
                let mut m = fit_class_model(embedder, ds, t, schedule, seed)?;
                if in_identity_band(t, steps) {
                    m.identity_precision = true;
                    m.classes = m.classes.into_iter().map(|c| ClassGaussian::identity(c.mean, c.count)).collect();
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { steps, models })
    }

    /// The clean-data (`t = 0`) model.
    pub fn clean(&self) -> &GaussianClassModel {
        &self.models[0]
    }

    /// Nearest grid model on the same side of the identity band as `t`.
    pub fn model_for(&self, t: usize) -> &GaussianClassModel {
        let band = in_identity_band(t, self.steps);
        self.models
            .iter()
            .filter(|m| in_identity_band(m.timestep, self.steps) == band)
            .min_by_key(|m| m.timestep.abs_diff(t))
            .unwrap_or_else(|| self.models.iter().min_by_key(|m| m.timestep.abs_diff(t)).expect("non-empty grid"))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("#lowdens-classmodel v1\n");
        let _ = writeln!(s, "steps {}", self.steps);
        let _ = writeln!(s, "grid {}", self.models.len());
        for m in &self.models {
            let _ = writeln!(
                s,
                "timestep {} {} {} {}",
                m.timestep,
                if m.identity_precision { "identity" } else { "fitted" },
                m.classes.len(),
                m.embedding_dim()
            );
            for c in &m.classes {
                let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
                let _ = writeln!(s, "class {} {:?}", c.count, c.shrinkage);
                let _ = writeln!(s, "{}", join(&c.mean));
                let _ = writeln!(s, "{}", join(&c.covariance));
            }
        }
        s
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { path: origin.into(), line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut last = 0;
        let mut next = || {
            let item = lines.next();
            if let Some((n, _)) = item {
                last = n;
            }
            item.ok_or_else(|| perr(last + 1, "truncated class-model file".into()))
        };
        let (no, head) = next()?;
        if head != "#lowdens-classmodel v1" {
            return Err(perr(no, "expected '#lowdens-classmodel v1' header".into()));
        }
        let mut kv = |key: &str| -> Result<usize> {
            let (no, line) = next()?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => v.trim().parse().map_err(|e| perr(no, format!("{e}"))),
                _ => Err(perr(no, format!("expected '{key} <n>'"))),
            }
        };
        let steps = kv("steps")?;
        let n = kv("grid")?;
        let mut models = Vec::with_capacity(n);
        let floats = |no: usize, line: &str| -> Result<Vec<f64>> {
            line.split_ascii_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| perr(no, format!("{e}: '{t}'"))))
                .collect()
        };
        for _ in 0..n {
            let (no, line) = next()?;
            let f: Vec<&str> = line.split_ascii_whitespace().collect();
            if f.len() != 5 || f[0] != "timestep" {
                return Err(perr(no, format!("expected 'timestep <t> <kind> <classes> <k>', found '{line}'")));
            }
            let parse = |s: &str| s.parse::<usize>().map_err(|e| perr(no, format!("{e}")));
            let (timestep, n_classes, k) = (parse(f[1])?, parse(f[3])?, parse(f[4])?);
            let identity = match f[2] {
                "identity" => true,
                "fitted" => false,
                other => return Err(perr(no, format!("unknown class-model kind '{other}'"))),
            };
            let mut classes = Vec::with_capacity(n_classes);
            for _ in 0..n_classes {
                let (no, line) = next()?;
                let h: Vec<&str> = line.split_ascii_whitespace().collect();
                if h.len() != 3 || h[0] != "class" {
                    return Err(perr(no, "expected 'class <count> <shrinkage>'".into()));
                }
                let count = h[1].parse().map_err(|e| perr(no, format!("{e}")))?;
                let shrinkage: f64 = h[2].parse().map_err(|e| perr(no, format!("{e}")))?;
                let (no, line) = next()?;
                let mean = floats(no, line)?;
                let (no2, line) = next()?;
                let cov = floats(no2, line)?;
                if mean.len() != k || cov.len() != k * k {
                    return Err(perr(no, "class block has the wrong dimensions".into()));
                }
                let c = if identity {
                    ClassGaussian::identity(mean, count)
                } else {
                    ClassGaussian::from_covariance(mean, DMatrix::from_row_slice(k, k, &cov), shrinkage, count)
                        .map_err(|e| perr(no2, e.to_string()))?
                };
                classes.push(c);
            }
            models.push(GaussianClassModel { timestep, identity_precision: identity, classes });
        }
        if models.is_empty() {
            return Err(perr(last, "class-model grid is empty".into()));
        }
        Ok(Self { steps, models })
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
#[serde(rename_all = "kebab-case")]
pub enum LossSpace {
    EmbeddingHardness,
    LogitSoftmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradNorm {
    UnitLinf,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceConfig {
    pub alpha: f64,
    pub beta_fid: f64,
    pub tau: f64,
    pub loss_space: LossSpace,
    pub grad_norm: GradNorm,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self { alpha: 0.0, beta_fid: 0.0, tau: 1.0, loss_space: LossSpace::EmbeddingHardness, grad_norm: GradNorm::UnitLinf }
    }
}

impl GuidanceConfig {
    pub fn with_scales(alpha: f64, beta_fid: f64) -> Self {
        Self { alpha, beta_fid, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.alpha >= 0.0 && self.beta_fid >= 0.0) || !self.alpha.is_finite() || !self.beta_fid.is_finite() {
            return Err(Error::Config("alpha and beta_fid must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// A loss value and its gradient with respect to the input `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// Hardness of `x` under class `y` at timestep `t`, with its input gradient.
pub fn hardness_with_grad(
    model: &GaussianClassModel,
    embedder: &MicroNet,
    x: &[f64],
    y: usize,
    t: usize,
    steps: usize,
) -> Result<LossGrad> {
    let cache = embedder.embed(x, &embedding_cond(embedder, t, steps))?;
    let (h, pd) = model.class(y)?.score(cache.output());
    Ok(LossGrad { value: h, grad: embedder.grad_input(&cache, &pd)? })
}

/// Hardness of every row of `points` under its label, on clean inputs.
pub fn hardness_scores(
    model: &GaussianClassModel,
    embedder: &MicroNet,
    points: &LabeledDataset,
) -> Result<Vec<f64>> {
    let cond = embedding_cond(embedder, 0, 1);
    points
        .iter()
        .map(|(x, y)| hardness_score(model, embedder.embed(x, &cond)?.output(), y))
        .collect()
}

/// Contrastive guiding loss `log softmax_j(H(x, j) / tau)[y]`: every class
/// hypothesis is evaluated on the same input `x`.
pub fn loss_g1(
    model: &GaussianClassModel,
    embedder: &MicroNet,
    x: &[f64],
    y: usize,
    tau: f64,
    t: usize,
    steps: usize,
) -> Result<LossGrad> {
    if !(tau > 0.0) {
        return Err(Error::contract("tau must be > 0"));
    }
    model.class(y)?;
    let cache = embedder.embed(x, &embedding_cond(embedder, t, steps))?;
    let f = cache.output();
    let scored: Vec<(f64, Vec<f64>)> = model.classes.iter().map(|c| c.score(f)).collect();
    let logits: Vec<f64> = scored.iter().map(|(h, _)| h / tau).collect();
    let lse = log_sum_exp(&logits);
    let value = log_softmax_at(&logits, y);
    let mut adjoint = vec![0.0; f.len()];
    for (j, (_, pd)) in scored.iter().enumerate() {
        let p = (logits[j] - lse).exp();
        let coef = ((j == y) as u8 as f64 - p) / tau;
        adjoint.iter_mut().zip(pd).for_each(|(a, v)| *a += coef * v);
    }
    Ok(LossGrad { value, grad: embedder.grad_input(&cache, &adjoint)? })
}

/// `log softmax(logits)[y]`, accurate to full relative precision when `y`
/// holds the largest logit and the value is close to zero.
fn log_softmax_at(logits: &[f64], y: usize) -> f64 {
    let ly = logits[y];
    if logits.iter().all(|&l| l <= ly) {
        let rest: f64 = logits.iter().enumerate().filter(|&(j, _)| j != y).map(|(_, l)| (l - ly).exp()).sum();
        -rest.ln_1p()
    } else {
        ly - log_sum_exp(logits)
    }
}

/// `-log softmax(logits / tau)[target]` with its input gradient.
fn neg_log_softmax(net: &MicroNet, x: &[f64], cond: &Cond<'_>, target: usize, tau: f64) -> Result<LossGrad> {
    if !(tau > 0.0) {
        return Err(Error::contract("tau must be > 0"));
    }
    let cache = net.forward(x, cond)?;
    let logits: Vec<f64> = cache.output().iter().map(|v| v / tau).collect();
    if target >= logits.len() {
        return Err(Error::contract(format!("class {target} >= logit count {}", logits.len())));
    }
    let lse = log_sum_exp(&logits);
    let value = -log_softmax_at(&logits, target);
    let adjoint: Vec<f64> = logits
        .iter()
        .enumerate()
        .map(|(j, l)| ((l - lse).exp() - (j == target) as u8 as f64) / tau)
        .collect();
    Ok(LossGrad { value, grad: net.grad_input(&cache, &adjoint)? })
}

/// Logit-space variant of the first guiding loss: `-log p(y | x)` from the
/// embedder's class head. Increasing it lowers the correct-class probability.
pub fn loss_g1_logit(embedder: &MicroNet, x: &[f64], y: usize, tau: f64, t: usize, steps: usize) -> Result<LossGrad> {
    neg_log_softmax(embedder, x, &embedding_cond(embedder, t, steps), y, tau)
}

/// Label of real data in the discriminator's output.
pub const REAL: usize = 1;
/// Label of synthetic data in the discriminator's output.
pub const SYNTHETIC: usize = 0;

/// Discriminator loss `-log p(real | x)` at temperature `tau`. It falls
/// toward zero as `x` looks more real, so samplers follow `-grad`.
pub fn loss_g2(discriminator: &MicroNet, x: &[f64], tau: f64, t: usize, steps: usize) -> Result<LossGrad> {
    neg_log_softmax(discriminator, x, &embedding_cond(discriminator, t, steps), REAL, tau)
}

struct CrossEntropy<'a> {
    points: &'a LabeledDataset,
    schedule: &'a NoiseSchedule,
    seed: u64,
}

impl Objective for CrossEntropy<'_> {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn example(&self, net: &MicroNet, e: usize, draw: u64, grad: &mut ParamGrad) -> Result<f64> {
        let mut rng = stream_rng(self.seed, Stream::Diffuse, draw, 1);
        let t = rng.random_range(0..=self.schedule.steps);
        let x0 = self.points.point(e);
        let eps: Vec<f64> = (0..x0.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x = forward_diffuse(x0, t, &eps, self.schedule)?;
        let cond = embedding_cond(net, t, self.schedule.steps);
        let cache = net.forward(&x, &cond)?;
        let logits = cache.output();
        let lse = log_sum_exp(logits);
        let y = self.points.labels[e];
        let adjoint: Vec<f64> = logits
            .iter()
            .enumerate()
            .map(|(j, l)| (l - lse).exp() - (j == y) as u8 as f64)
            .collect();
        net.accumulate_grad_params(&cache, &adjoint, grad)?;
        Ok(lse - logits[y])
    }
}

/// Trains a timestep-conditioned classifier on inputs noised to a uniform
/// mixture of timesteps `0..=T` (0 = clean).
pub fn train_classifier(
    points: &LabeledDataset,
    schedule: &NoiseSchedule,
    arch: &Architecture,
    init_seed: u64,
    cfg: &TrainConfig,
) -> Result<nn::TrainOutcome> {
    if points.is_empty() {
        return Err(Error::contract("classifier training set is empty"));
    }
    let net = MicroNet::new(arch, init_seed)?;
    nn::train(net, &CrossEntropy { points, schedule, seed: cfg.seed }, cfg)
}

/// Fraction of `points` whose clean-input argmax logit equals the label.
pub fn accuracy(net: &MicroNet, points: &LabeledDataset) -> Result<f64> {
    if points.is_empty() {
        return Ok(f64::NAN);
    }
    let cond = embedding_cond(net, 0, 1);
    let mut hits = 0usize;
    for (x, y) in points.iter() {
        let out = net.forward(x, &cond)?;
        let arg = out
            .output()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("at least one logit");
        hits += (arg == y) as usize;
    }
    Ok(hits as f64 / points.len() as f64)
}

#[derive(Debug, Clone)]
pub struct DiscriminatorFit {
    pub net: MicroNet,
    pub trace: Vec<f64>,
    /// Clean-input accuracy on the 20% of each set held back from training.
    pub heldout_accuracy: f64,
}

/// Trains a real (label 1) vs synthetic (label 0) discriminator.
pub fn train_discriminator(
    real: &LabeledDataset,
    synthetic: &LabeledDataset,
    schedule: &NoiseSchedule,
    arch: &Architecture,
    init_seed: u64,
    cfg: &TrainConfig,
) -> Result<DiscriminatorFit> {
    if real.is_empty() || synthetic.is_empty() {
        return Err(Error::contract("discriminator needs non-empty real and synthetic sets"));
    }
    if real.dim != synthetic.dim {
        return Err(Error::contract("real and synthetic sets differ in dimension"));
    }
    let relabel = |ds: &LabeledDataset, label: usize| LabeledDataset {
        labels: vec![label; ds.len()],
        num_classes: 2,
        ..ds.clone()
    };
    let mut points = relabel(synthetic, SYNTHETIC).points;
    points.extend_from_slice(&real.points);
    let mut labels = vec![SYNTHETIC; synthetic.len()];
    labels.extend(std::iter::repeat_n(REAL, real.len()));
    let pooled = LabeledDataset { labels, points, ..relabel(real, REAL) };
    let (train_set, held) = pooled.split_holdout(0.2, cfg.seed);
    let out = train_classifier(&train_set, schedule, arch, init_seed, cfg).map_err(|e| match e {
        Error::Numerical { step, msg, .. } => Error::Numerical { stage: "discriminator training", step, msg },
        other => other,
    })?;
    let heldout_accuracy = accuracy(&out.net, &held)?;
    Ok(DiscriminatorFit { net: out.net, trace: out.trace, heldout_accuracy })
}

/// Everything the guided samplers need beyond the diffusion model.
#[derive(Debug, Clone)]
pub struct GuidanceArtifacts {
    pub embedder: MicroNet,
    pub class_models: ClassModelGrid,
    pub discriminator: Option<MicroNet>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SplitTag;
    use crate::nn::{Activation, Layer};

    fn model_with(classes: Vec<ClassGaussian>) -> GaussianClassModel {
        GaussianClassModel { timestep: 0, identity_precision: false, classes }
    }

    #[test]
    fn hardness_reference_values() {
        let m = model_with(vec![ClassGaussian::identity(vec![0.5, -1.0], 1)]);
        let h0 = hardness_score(&m, &[0.5, -1.0], 0).unwrap();
        assert!((h0 - 1.837_877_066_409_345_5).abs() < 1e-12);
        let h1 = hardness_score(&m, &[1.5, -1.0], 0).unwrap();
        assert!((h1 - 2.337_877_066_409_345_5).abs() < 1e-12);
        assert!(hardness_score(&m, &[0.0, 0.0], 1).is_err());
    }

    #[test]
    fn radial_monotonicity() {
        let m = model_with(vec![ClassGaussian::identity(vec![0.0; 3], 1)]);
        let mut prev = f64::NEG_INFINITY;
        for r in [0.0, 0.1, 0.5, 1.0, 3.0, 10.0] {
            let h = hardness_score(&m, &[r * 0.6, r * 0.8, 0.0], 0).unwrap();
            assert!(h > prev);
            prev = h;
        }
    }

    fn identity_embedder(k: usize) -> MicroNet {
        let eye: Vec<f64> = (0..k * k).map(|i| if i % (k + 1) == 0 { 1.0 } else { 0.0 }).collect();
        MicroNet::from_layers(
            vec![
                Layer { inputs: k, outputs: k, weight: eye, bias: vec![0.0; k], activation: Activation::Identity },
                Layer { inputs: k, outputs: 1, weight: vec![1.0; k], bias: vec![0.0], activation: Activation::Identity },
            ],
            k,
            0,
            0,
            Some(0),
        )
        .unwrap()
    }

    #[test]
    fn fit_symmetric_and_degenerate_classes() {
        let sch = NoiseSchedule::linear(10, 1e-3, 0.2).unwrap();
        let emb = identity_embedder(2);
        let ds = LabeledDataset::new(2, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 5.0, 5.0, 5.0], vec![0, 0, 1, 1], SplitTag::Train, 0)
            .unwrap();
        let m = fit_class_model(&emb, &ds, 0, &sch, 0).unwrap();
        assert_eq!(m.classes[0].mean, vec![2.0, 3.0]);
        let c1 = &m.classes[1];
        assert_eq!(c1.covariance, vec![SHRINKAGE_FLOOR, 0.0, 0.0, SHRINKAGE_FLOOR]);

        let missing = LabeledDataset::new(2, 3, vec![0.0, 0.0], vec![0], SplitTag::Train, 0).unwrap();
        assert!(matches!(fit_class_model(&emb, &missing, 0, &sch, 0), Err(Error::EmptyClass(1))));
    }

    #[test]
    fn fit_recovers_standard_normal() {
        let sch = NoiseSchedule::linear(10, 1e-3, 0.2).unwrap();
        let n = 100_000;
        let pts: Vec<f64> = (0..n).flat_map(|i| normal_vec(2, Stream::Data, i as u64, 0, 2)).collect();
        let ds = LabeledDataset::new(2, 1, pts, vec![0; n], SplitTag::Train, 0).unwrap();
        let m = fit_class_model(&identity_embedder(2), &ds, 0, &sch, 0).unwrap();
        let c = &m.classes[0];
        for v in &c.mean {
            assert!(v.abs() < 3.0 / (n as f64).sqrt());
        }
        for (i, v) in c.covariance.iter().enumerate() {
            let want = if i % 3 == 0 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 0.05);
        }
        // precision * covariance = I
        let k = 2;
        for i in 0..k {
            for j in 0..k {
                let s: f64 = (0..k).map(|l| c.precision[i * k + l] * c.covariance[l * k + j]).sum();
                assert!((s - (i == j) as u8 as f64).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn loss_g1_symmetric_and_saturated() {
        let emb = identity_embedder(2);
        let m = model_with(vec![ClassGaussian::identity(vec![1.0, 0.0], 1), ClassGaussian::identity(vec![-1.0, 0.0], 1)]);
        for tau in [0.3, 1.0, 4.0] {
            let l = loss_g1(&m, &emb, &[0.0, 0.7], 0, tau, 0, 1).unwrap();
            assert!((l.value + std::f64::consts::LN_2).abs() < 1e-12);
        }
        // H(x, 0) - H(x, 1) = 20, so L = -ln(1 + e^-20)
        let far = loss_g1(&m, &emb, &[-10.0, 0.0], 0, 1.0, 0, 1).unwrap();
        assert!(far.value < 0.0 && far.value > -1e-8);
        assert!((far.value + (-20f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn logit_losses_reference_values() {
        let mut head = identity_embedder(4);
        // zero head weights: uniform logits over 1 output is degenerate, so use a 4-way head
        head.layers[1] = Layer { inputs: 4, outputs: 4, weight: vec![0.0; 16], bias: vec![0.0; 4], activation: Activation::Identity };
        let head = MicroNet::from_layers(head.layers, 4, 0, 0, Some(0)).unwrap();
        let l = loss_g1_logit(&head, &[1.0, 2.0, 3.0, 4.0], 2, 1.0, 0, 1).unwrap();
        assert!((l.value - 4f64.ln()).abs() < 1e-12);

        let disc = MicroNet::from_layers(
            vec![Layer { inputs: 1, outputs: 2, weight: vec![0.0, 1.0], bias: vec![0.0, 0.0], activation: Activation::Identity }],
            1,
            0,
            0,
            None,
        )
        .unwrap();
        assert!((loss_g2(&disc, &[0.0], 1.0, 0, 1).unwrap().value - std::f64::consts::LN_2).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for r in [0.5, 1.0, 5.0, 20.0, 60.0] {
            let v = loss_g2(&disc, &[r], 1.0, 0, 1).unwrap().value;
            assert!(v < prev && v >= 0.0);
            prev = v;
        }
        assert!(prev < 1e-20);
    }

    #[test]
    fn identity_band_lookup() {
        let sch = NoiseSchedule::linear(100, 1e-3, 0.05).unwrap();
        let emb = MicroNet::new(&Architecture::embedder(2, 2, 8, 1, 3), 1).unwrap();
        let pts: Vec<f64> = (0..40).flat_map(|i| normal_vec(1, Stream::Data, i, 0, 2)).collect();
        let labels = (0..40).map(|i| i % 2).collect();
        let ds = LabeledDataset::new(2, 2, pts, labels, SplitTag::Train, 0).unwrap();
        let grid = ClassModelGrid::fit(&emb, &ds, &sch, 9, 3).unwrap();
        for t in 0..=100 {
            let m = grid.model_for(t);
            assert_eq!(m.identity_precision, in_identity_band(t, 100), "t = {t}");
            if in_identity_band(t, 100) {
                for c in &m.classes {
                    assert_eq!(c.precision, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
                }
            }
        }
        let back = ClassModelGrid::from_text(&grid.to_text(), "mem").unwrap();
        assert_eq!(back.models.len(), grid.models.len());
        for (a, b) in back.models.iter().zip(&grid.models) {
            for (ca, cb) in a.classes.iter().zip(&b.classes) {
                assert_eq!(ca.mean, cb.mean);
                assert_eq!(ca.covariance, cb.covariance);
                assert_eq!(ca.log_det, cb.log_det);
            }
        }
    }

    #[test]
    fn guidance_config_validation() {
        assert!(GuidanceConfig::with_scales(0.5, 0.5).validate().is_ok());
        assert!(GuidanceConfig { tau: 0.0, ..Default::default() }.validate().is_err());
        assert!(GuidanceConfig::with_scales(-0.1, 0.0).validate().is_err());
    }
}
