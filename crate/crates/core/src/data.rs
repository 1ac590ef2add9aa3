//! Synthetic long-tailed, class-conditional datasets.
//!
//! Each class is a Gaussian mixture with one dominant mode and at least one
//! light "minor" mode, so most samples crowd into a few dense regions while
//! the rest spread thinly over the tail.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Largest weight a component may carry and still count as a minor mode.
pub const MINOR_MODE_WEIGHT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Row-major `d x d`.
    pub covariance: Vec<f64>,
    chol: DMatrix<f64>,
    log_det: f64,
}

impl Component {
    pub fn new(weight: f64, mean: Vec<f64>, covariance: Vec<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 || covariance.len() != d * d {
            return Err(Error::contract(format!(
                "component covariance must be {d}x{d}, got {} entries",
                covariance.len()
            )));
        }
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::contract(format!("component weight {weight} outside (0, 1]")));
        }
        let cov = DMatrix::from_row_slice(d, d, &covariance);
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::contract("component covariance is not symmetric"));
        }
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::contract("component covariance is not positive definite"))?;
        let l = chol.l();
        let log_det = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Ok(Self { weight, mean, covariance, chol: l, log_det })
    }

    /// Isotropic component `N(mean, sd^2 I)`.
    pub fn isotropic(weight: f64, mean: Vec<f64>, sd: f64) -> Result<Self> {
        let d = mean.len();
        let mut cov = vec![0.0; d * d];
        for i in 0..d {
            cov[i * d + i] = sd * sd;
        }
        Self::new(weight, mean, cov)
    }

    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        let d = self.mean.len();
        let diff = DVector::from_iterator(d, x.iter().zip(&self.mean).map(|(a, b)| a - b));
        let y = self
            .chol
            .solve_lower_triangular(&diff)
            .expect("cholesky factor has a positive diagonal");
        -0.5 * (y.norm_squared() + self.log_det + d as f64 * LN_2PI)
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.mean.len();
        let z = DVector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(rng)));
        let v = &self.chol * z;
        self.mean.iter().zip(v.iter()).map(|(m, e)| m + e).collect()
    }
}

/// The density of one class: a weighted Gaussian mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    pub class_id: usize,
    pub components: Vec<Component>,
    pub dim: usize,
}

impl MixtureSpec {
    pub fn new(class_id: usize, components: Vec<Component>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::contract(format!("class {class_id} has no mixture components")))?;
        let dim = first.mean.len();
        if components.iter().any(|c| c.mean.len() != dim) {
            return Err(Error::contract("mixture components disagree on dimension"));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::contract(format!(
                "class {class_id}: mixture weights sum to {total}, expected 1"
            )));
        }
        if !components.iter().any(|c| c.weight <= MINOR_MODE_WEIGHT) {
            return Err(Error::contract(format!(
                "class {class_id}: no minor mode with weight <= {MINOR_MODE_WEIGHT}"
            )));
        }
        Ok(Self { class_id, components, dim })
    }

    /// Exact mixture density at `x`.
    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        let terms: Vec<f64> = self.components.iter().map(|c| c.weight.ln() + c.log_pdf(x)).collect();
        log_sum_exp(&terms)
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = self.components.len() - 1;
        for (j, c) in self.components.iter().enumerate() {
            acc += c.weight;
            if u < acc {
                pick = j;
                break;
            }
        }
        self.components[pick].draw(rng)
    }
}

/// Free function form of [`MixtureSpec::density`].
pub fn true_density(spec: &MixtureSpec, x: &[f64]) -> f64 {
    spec.density(x)
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Parameters of the default desk-scale world: `C` classes arranged on a
/// ring, each a mixture of a dominant mode and lighter satellite modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingWorld {
    pub classes: usize,
    pub radius: f64,
    pub weights: Vec<f64>,
    /// Offset of each component from the class centre, along the ring's
    /// outward normal.
    pub offset_radial: Vec<f64>,
    /// Offset of each component along the ring's tangent.
    pub offset_tangential: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Default for RingWorld {
    fn default() -> Self {
        Self {
            classes: 4,
            radius: 3.0,
            weights: vec![0.80, 0.15, 0.05],
            offset_radial: vec![0.0, 1.05, -0.75],
            offset_tangential: vec![0.0, 0.9, -1.05],
            sd: vec![0.36, 0.24, 0.3],
        }
    }
}

impl RingWorld {
    pub fn specs(&self) -> Result<Vec<MixtureSpec>> {
        let n = self.weights.len();
        if n == 0
            || self.offset_radial.len() != n
            || self.offset_tangential.len() != n
            || self.sd.len() != n
        {
            return Err(Error::Config(
                "world: weights, offsets and sd must have the same non-zero length".into(),
            ));
        }
        if self.classes == 0 {
            return Err(Error::Config("world: classes must be >= 1".into()));
        }
        (0..self.classes)
            .map(|c| {
                let theta = std::f64::consts::TAU * c as f64 / self.classes as f64
                    + std::f64::consts::FRAC_PI_4;
                let (s, co) = theta.sin_cos();
                let comps = (0..n)
                    .map(|j| {
                        let r = self.radius + self.offset_radial[j];
                        let tg = self.offset_tangential[j];
                        let mean = vec![r * co - tg * s, r * s + tg * co];
                        Component::isotropic(self.weights[j], mean, self.sd[j])
                    })
                    .collect::<Result<Vec<_>>>()?;
                MixtureSpec::new(c, comps)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Holdout,
    Synthetic,
}

impl SplitTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitTag::Train => "train",
            SplitTag::Holdout => "holdout",
            SplitTag::Synthetic => "synthetic",
        }
    }
}

impl std::str::FromStr for SplitTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(SplitTag::Train),
            "holdout" => Ok(SplitTag::Holdout),
            "synthetic" => Ok(SplitTag::Synthetic),
            other => Err(format!("unknown split tag '{other}'")),
        }
    }
}

/// Points with class labels, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub dim: usize,
    pub num_classes: usize,
    pub points: Vec<f64>,
    pub labels: Vec<usize>,
    pub split: SplitTag,
    pub seed: u64,
}

impl LabeledDataset {
    pub fn new(
        dim: usize,
        num_classes: usize,
        points: Vec<f64>,
        labels: Vec<usize>,
        split: SplitTag,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 || points.len() != labels.len() * dim {
            return Err(Error::contract(format!(
                "dataset has {} coordinates for {} labels of dimension {dim}",
                points.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::contract(format!("label {bad} >= class count {num_classes}")));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("dataset contains non-finite coordinates"));
        }
        Ok(Self { dim, num_classes, points, labels, split, seed })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], usize)> {
        self.points.chunks_exact(self.dim).zip(self.labels.iter().copied())
    }

    pub fn class_indices(&self, class: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    /// Rows belonging to `class`, as a new dataset.
    pub fn filter_class(&self, class: usize) -> LabeledDataset {
        self.select(&self.class_indices(class))
    }

    pub fn select(&self, idx: &[usize]) -> LabeledDataset {
        let mut points = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            points.extend_from_slice(self.point(i));
        }
        LabeledDataset {
            dim: self.dim,
            num_classes: self.num_classes,
            points,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            split: self.split,
            seed: self.seed,
        }
    }

    /// Stratified split: `holdout_fraction` of every class goes to the holdout set.
    pub fn split_holdout(&self, holdout_fraction: f64, seed: u64) -> (LabeledDataset, LabeledDataset) {
        let mut train_idx = Vec::new();
        let mut hold_idx = Vec::new();
        for c in 0..self.num_classes {
            let mut idx = self.class_indices(c);
            let mut rng = stream_rng(seed, Stream::Split, c as u64, 0);
            idx.shuffle(&mut rng);
            let n_hold = (idx.len() as f64 * holdout_fraction).round() as usize;
            hold_idx.extend_from_slice(&idx[..n_hold]);
            train_idx.extend_from_slice(&idx[n_hold..]);
        }
        train_idx.sort_unstable();
        hold_idx.sort_unstable();
        let mut train = self.select(&train_idx);
        train.split = SplitTag::Train;
        let mut hold = self.select(&hold_idx);
        hold.split = SplitTag::Holdout;
        (train, hold)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(32 + self.len() * 12 * (self.dim + 1));
        s.push_str("#lowdens-dataset v1\n");
        let _ = writeln!(s, "dim {}", self.dim);
        let _ = writeln!(s, "classes {}", self.num_classes);
        let _ = writeln!(s, "seed {}", self.seed);
        let _ = writeln!(s, "split {}", self.split.as_str());
        let _ = writeln!(s, "count {}", self.len());
        for (p, l) in self.iter() {
            let _ = write!(s, "{l}");
            for v in p {
                let _ = write!(s, " {v:?}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, "#lowdens-dataset v1")) => {}
            _ => return Err(err(1, "missing '#lowdens-dataset v1' header".into())),
        }
        let mut header = |key: &str| -> Result<String> {
            let (no, line) = lines.next().ok_or_else(|| err(0, format!("truncated header, expected '{key}'")))?;
            let mut parts = line.splitn(2, ' ');
            let k = parts.next().unwrap_or("");
            let v = parts.next().unwrap_or("").trim();
            if k != key || v.is_empty() {
                return Err(err(no, format!("expected '{key} <value>', found '{line}'")));
            }
            Ok(v.to_string())
        };
        let parse_num = |no: usize, v: &str| v.parse::<u64>().map_err(|e| err(no, format!("{e}: '{v}'")));
        let dim = parse_num(2, &header("dim")?)? as usize;
        let classes = parse_num(3, &header("classes")?)? as usize;
        let seed = parse_num(4, &header("seed")?)?;
        let split: SplitTag = header("split")?.parse().map_err(|e| err(5, e))?;
        let count = parse_num(6, &header("count")?)? as usize;

        let mut points = Vec::with_capacity(count * dim);
        let mut labels = Vec::with_capacity(count);
        for (no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_ascii_whitespace();
            let label: usize = fields
                .next()
                .unwrap()
                .parse()
                .map_err(|e| err(no, format!("bad label: {e}")))?;
            let mut n = 0;
            for f in fields {
                points.push(f.parse::<f64>().map_err(|e| err(no, format!("bad coordinate '{f}': {e}")))?);
                n += 1;
            }
            if n != dim {
                return Err(err(no, format!("expected {dim} coordinates, found {n}")));
            }
            labels.push(label);
        }
        if labels.len() != count {
            return Err(err(
                text.lines().count(),
                format!("header declares {count} rows but file holds {}", labels.len()),
            ));
        }
        LabeledDataset::new(dim, classes, points, labels, split, seed)
            .map_err(|e| err(0, e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

/// Draws `n_per_class` points from every spec by component-weighted
/// ancestral sampling. Point `i` of class `c` depends only on `(seed, c, i)`.
pub fn generate(specs: &[MixtureSpec], n_per_class: usize, seed: u64) -> Result<LabeledDataset> {
    if n_per_class == 0 {
        return Err(Error::contract("n_per_class must be >= 1"));
    }
    let dim = specs.first().ok_or_else(|| Error::contract("no class specs"))?.dim;
    let num_classes = specs.iter().map(|s| s.class_id + 1).max().unwrap_or(0);
    let mut points = Vec::with_capacity(specs.len() * n_per_class * dim);
    let mut labels = Vec::with_capacity(specs.len() * n_per_class);
    for spec in specs {
        if spec.dim != dim {
            return Err(Error::contract("class specs disagree on dimension"));
        }
        for i in 0..n_per_class {
            let mut rng = stream_rng(seed, Stream::Data, spec.class_id as u64, i as u64);
            points.extend(spec.draw(&mut rng));
            labels.push(spec.class_id);
        }
    }
    LabeledDataset::new(dim, num_classes, points, labels, SplitTag::Train, seed)
}
