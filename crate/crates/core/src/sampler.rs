//! Reverse-process samplers: the unguided ancestral baseline, the
//! hardness-guided and hardness+fidelity-guided variants, guided DDIM,
//! class-embedding smoothing and a rejection-sampling baseline.
//!
//! Every chain is seeded by `(seed, chain index)`; the initial latent and the
//! per-step noise are addressed by counter, so two runs that differ only in
//! guidance scales consume identical noise.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::data::{LabeledDataset, SplitTag};
use crate::diffusion::{DiffusionModel, ReverseStep};
use crate::error::{Error, Result};
use crate::guidance::{self, GradNorm, GuidanceArtifacts, GuidanceConfig, LossSpace};
use crate::nn::ClassInput;
use crate::rng::{normal_vec, Stream};

/// `g / max_i |g_i|`; the zero vector maps to itself.
pub fn normalize_grad(g: &[f64]) -> Vec<f64> {
    let m = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if m == 0.0 {
        return g.to_vec();
    }
    g.iter().map(|v| v / m).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Baseline,
    Alpha,
    Guided,
    Ddim,
    Smooth,
    Reject,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Baseline => "baseline",
            SamplerKind::Alpha => "alpha",
            SamplerKind::Guided => "guided",
            SamplerKind::Ddim => "ddim",
            SamplerKind::Smooth => "smooth",
            SamplerKind::Reject => "reject",
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "baseline" => SamplerKind::Baseline,
            "alpha" => SamplerKind::Alpha,
            "guided" => SamplerKind::Guided,
            "ddim" => SamplerKind::Ddim,
            "smooth" => SamplerKind::Smooth,
            "reject" => SamplerKind::Reject,
            other => return Err(Error::Config(format!("unknown sampler '{other}'"))),
        })
    }
}

/// Knobs shared by all samplers.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOptions {
    pub seed: u64,
    /// Evaluate every `stride`-th timestep (1 = all).
    pub stride: usize,
    /// Timesteps at which to snapshot the chain state (0 = final output).
    pub snapshot_at: Vec<usize>,
    /// Keep per-step means, variances and guidance increments.
    pub record_steps: bool,
    /// Index of the first chain; chain `i` of a run is chain `first_chain + i`.
    pub first_chain: u64,
}

impl SampleOptions {
    pub fn seeded(seed: u64) -> Self {
        Self { seed, stride: 1, snapshot_at: Vec::new(), record_steps: false, first_chain: 0 }
    }
}

/// One reverse step of one chain, as recorded with `record_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub mean: Vec<f64>,
    pub variance: f64,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub next: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: usize,
    /// Row-major `n x d`.
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalCount {
    pub denoiser: u64,
    pub guidance: u64,
}

/// Rejection-sampling bookkeeping. Merging two ledgers is order-insensitive
/// in every counter.
#[derive(Debug, Clone, PartialEq)]
pub struct CostLedger {
    pub threshold: f64,
    pub quota: usize,
    pub draws: usize,
    pub accepted: usize,
    pub denoiser_evals: u64,
    pub guidance_evals: u64,
    pub quota_met: bool,
    /// Hardness of every draw, in draw order.
    pub draw_hardness: Vec<f64>,
}

impl CostLedger {
    pub fn merge(&mut self, other: &CostLedger) {
        self.draws += other.draws;
        self.accepted += other.accepted;
        self.denoiser_evals += other.denoiser_evals;
        self.guidance_evals += other.guidance_evals;
        self.quota_met = self.accepted >= self.quota;
        self.draw_hardness.extend_from_slice(&other.draw_hardness);
    }
}

/// Configuration echo written alongside every run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub kind: SamplerKind,
    pub guidance: GuidanceConfig,
    pub seed: u64,
    pub extra: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerRun {
    pub samples: LabeledDataset,
    /// Ordered by decreasing `t`.
    pub snapshots: Vec<Snapshot>,
    pub evaluations: Vec<EvalCount>,
    pub meta: RunMeta,
    pub steps: Option<Vec<Vec<StepRecord>>>,
    pub ledger: Option<CostLedger>,
}

impl SamplerRun {
    pub fn total_denoiser_evals(&self) -> u64 {
        self.evaluations.iter().map(|e| e.denoiser).sum()
    }

    pub fn total_guidance_evals(&self) -> u64 {
        self.evaluations.iter().map(|e| e.guidance).sum()
    }

    pub fn meta_path(path: &Path) -> PathBuf {
        let mut p = path.as_os_str().to_owned();
        p.push(".meta");
        PathBuf::from(p)
    }

    pub fn meta_text(&self) -> String {
        let g = &self.meta.guidance;
        let mut s = String::from("#lowdens-run v1\n");
        let _ = writeln!(s, "sampler={}", self.meta.kind.as_str());
        let _ = writeln!(s, "alpha={:?}", g.alpha);
        let _ = writeln!(s, "beta_fid={:?}", g.beta_fid);
        let _ = writeln!(s, "tau={:?}", g.tau);
        let _ = writeln!(
            s,
            "loss_space={}",
            match g.loss_space {
                LossSpace::EmbeddingHardness => "embedding-hardness",
                LossSpace::LogitSoftmax => "logit-softmax",
            }
        );
        let _ = writeln!(s, "grad_norm={}", match g.grad_norm { GradNorm::UnitLinf => "unit-linf", GradNorm::None => "none" });
        let _ = writeln!(s, "seed={}", self.meta.seed);
        for (k, v) in &self.meta.extra {
            let _ = writeln!(s, "{k}={v}");
        }
        let _ = writeln!(s, "denoiser_evals_total={}", self.total_denoiser_evals());
        let _ = writeln!(s, "guidance_evals_total={}", self.total_guidance_evals());
        let per: Vec<String> = self.evaluations.iter().map(|e| format!("{}:{}", e.denoiser, e.guidance)).collect();
        let _ = writeln!(s, "evals_per_sample={}", per.join(","));
        if let Some(l) = &self.ledger {
            let _ = writeln!(s, "ledger.threshold={:?}", l.threshold);
            let _ = writeln!(s, "ledger.quota={}", l.quota);
            let _ = writeln!(s, "ledger.draws={}", l.draws);
            let _ = writeln!(s, "ledger.accepted={}", l.accepted);
            let _ = writeln!(s, "ledger.denoiser_evals={}", l.denoiser_evals);
            let _ = writeln!(s, "ledger.guidance_evals={}", l.guidance_evals);
            let _ = writeln!(s, "ledger.quota_met={}", l.quota_met);
            let h: Vec<String> = l.draw_hardness.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(s, "ledger.draw_hardness={}", h.join(","));
        }
        s
    }

    /// Writes the samples in dataset format plus a `.meta` sidecar, and one
    /// extra dataset file per snapshot (`<path>.t<step>`).
    pub fn save(&self, path: &Path) -> Result<()> {
        self.samples.save(path)?;
        let meta = Self::meta_path(path);
        std::fs::write(&meta, self.meta_text()).map_err(|e| Error::io(&meta, e))?;
        for snap in &self.snapshots {
            let mut p = path.as_os_str().to_owned();
            p.push(format!(".t{}", snap.t));
            let ds = LabeledDataset { points: snap.points.clone(), ..self.samples.clone() };
            ds.save(Path::new(&p))?;
        }
        Ok(())
    }
}

/// Key-value pairs of a run sidecar.
pub fn read_meta(path: &Path) -> Result<BTreeMap<String, String>> {
    let meta = SamplerRun::meta_path(path);
    let text = std::fs::read_to_string(&meta).map_err(|e| Error::io(&meta, e))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "#lowdens-run v1" {
                return Err(Error::Parse { path: meta.display().to_string(), line: 1, msg: "bad run header".into() });
            }
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: meta.display().to_string(),
            line: i + 1,
            msg: format!("expected key=value, found '{line}'"),
        })?;
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

/// Reads the rejection ledger back out of a run sidecar, if it has one.
pub fn read_ledger(path: &Path) -> Result<Option<CostLedger>> {
    let m = read_meta(path)?;
    let Some(draws) = m.get("ledger.draws") else { return Ok(None) };
    let origin = SamplerRun::meta_path(path).display().to_string();
    let bad = |k: &str| Error::Parse { path: origin.clone(), line: 0, msg: format!("bad or missing '{k}'") };
    let get = |k: &str| m.get(k).ok_or_else(|| bad(k));
    let hardness = get("ledger.draw_hardness")?;
    let draw_hardness = if hardness.is_empty() {
        Vec::new()
    } else {
        hardness.split(',').map(|v| v.parse::<f64>().map_err(|_| bad("ledger.draw_hardness"))).collect::<Result<_>>()?
    };
    Ok(Some(CostLedger {
        threshold: get("ledger.threshold")?.parse().map_err(|_| bad("ledger.threshold"))?,
        quota: get("ledger.quota")?.parse().map_err(|_| bad("ledger.quota"))?,
        draws: draws.parse().map_err(|_| bad("ledger.draws"))?,
        accepted: get("ledger.accepted")?.parse().map_err(|_| bad("ledger.accepted"))?,
        denoiser_evals: get("ledger.denoiser_evals")?.parse().map_err(|_| bad("ledger.denoiser_evals"))?,
        guidance_evals: get("ledger.guidance_evals")?.parse().map_err(|_| bad("ledger.guidance_evals"))?,
        quota_met: get("ledger.quota_met")?.parse().map_err(|_| bad("ledger.quota_met"))?,
        draw_hardness,
    }))
}

/// What a chain is conditioned on and how it is guided.
#[derive(Clone, Copy)]
struct ChainSpec<'a> {
    model: &'a DiffusionModel,
    guidance: Option<(&'a GuidanceArtifacts, &'a GuidanceConfig)>,
    soft_class: Option<&'a [f64]>,
    ddim: bool,
}

struct ChainOut {
    x0: Vec<f64>,
    snapshots: Vec<(usize, Vec<f64>)>,
    evals: EvalCount,
    steps: Option<Vec<StepRecord>>,
}

impl ChainSpec<'_> {
    /// Scaled guidance increments `(u1, u2)` at `x_t`.
    fn increments(&self, x: &[f64], y: usize, t: usize, variance: f64, evals: &mut EvalCount) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = x.len();
        let (mut u1, mut u2) = (vec![0.0; d], vec![0.0; d]);
        let Some((art, cfg)) = self.guidance else { return Ok((u1, u2)) };
        let steps = self.model.schedule.steps;
        let norm = |g: Vec<f64>| match cfg.grad_norm {
            GradNorm::UnitLinf => normalize_grad(&g),
            GradNorm::None => g,
        };
        if cfg.alpha > 0.0 {
            let g = match cfg.loss_space {
                LossSpace::EmbeddingHardness => {
                    guidance::loss_g1(art.class_models.model_for(t), &art.embedder, x, y, cfg.tau, t, steps)?
                }
                LossSpace::LogitSoftmax => guidance::loss_g1_logit(&art.embedder, x, y, cfg.tau, t, steps)?,
            };
            evals.guidance += 1;
            u1 = norm(g.grad).into_iter().map(|v| cfg.alpha * variance * v).collect();
        }
        if cfg.beta_fid > 0.0 {
            let disc = art
                .discriminator
                .as_ref()
                .ok_or_else(|| Error::contract("fidelity guidance needs a trained discriminator"))?;
            let g = guidance::loss_g2(disc, x, cfg.tau, t, steps)?;
            evals.guidance += 1;
            // descend -log p(real): move toward the real manifold
            let ascent: Vec<f64> = g.grad.iter().map(|v| -v).collect();
            u2 = norm(ascent).into_iter().map(|v| cfg.beta_fid * variance * v).collect();
        }
        Ok((u1, u2))
    }

    fn run(&self, steps: &[ReverseStep], chain: u64, y: usize, opts: &SampleOptions) -> Result<ChainOut> {
        let d = self.model.dim();
        let class = match self.soft_class {
            Some(p) => ClassInput::Soft(p),
            None => ClassInput::Label(y),
        };
        let mut x = normal_vec(opts.seed, Stream::InitialLatent, chain, 0, d);
        let mut evals = EvalCount::default();
        let mut snapshots = Vec::new();
        let mut records = opts.record_steps.then(Vec::new);
        for step in steps {
            if opts.snapshot_at.contains(&step.t) {
                snapshots.push((step.t, x.clone()));
            }
            let last = step.prev == 0;
            let eps = self.model.predict_noise(&x, step.t, class)?;
            evals.denoiser += 1;
            let (mean, var) = if self.ddim {
                let ab = step.alpha_bar;
                let abp = step.alpha_bar_prev;
                let mean = x
                    .iter()
                    .zip(&eps)
                    .map(|(xv, e)| {
                        let x0 = (xv - (1.0 - ab).sqrt() * e) / ab.sqrt();
                        abp.sqrt() * x0 + (1.0 - abp).sqrt() * e
                    })
                    .collect();
                // a jump carries the variance of every timestep it skips; the
                // deterministic flow takes half the score term of the ancestral chain
                (mean, 0.5 * step.covered_var)
            } else {
                self.model.mean_from_eps(&x, &eps, step)
            };
            let next = if last {
                // final step: no noise and no guidance
                mean.clone()
            } else {
                let (u1, u2) = self.increments(&x, y, step.t, var, &mut evals)?;
                let mut next = mean.clone();
                if !self.ddim {
                    let z = normal_vec(opts.seed, Stream::StepNoise, chain, step.t as u64, d);
                    let sd = var.sqrt();
                    next.iter_mut().zip(&z).for_each(|(n, zv)| *n += sd * zv);
                }
                if self.guidance.is_some_and(|(_, c)| c.alpha > 0.0) {
                    next.iter_mut().zip(&u1).for_each(|(n, u)| *n += u);
                }
                if self.guidance.is_some_and(|(_, c)| c.beta_fid > 0.0) {
                    next.iter_mut().zip(&u2).for_each(|(n, u)| *n += u);
                }
                if let Some(r) = records.as_mut() {
                    r.push(StepRecord { t: step.t, mean: mean.clone(), variance: var, u1, u2, next: next.clone() });
                }
                next
            };
            if last {
                if let Some(r) = records.as_mut() {
                    r.push(StepRecord { t: step.t, mean, variance: var, u1: vec![0.0; d], u2: vec![0.0; d], next: next.clone() });
                }
            }
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical { stage: "sampling", step: step.t, msg: format!("chain {chain} left the finite range") });
            }
            x = next;
        }
        if opts.snapshot_at.contains(&0) {
            snapshots.push((0, x.clone()));
        }
        Ok(ChainOut { x0: x, snapshots, evals, steps: records })
    }
}

fn run_chains(
    spec: ChainSpec<'_>,
    steps: &[ReverseStep],
    labels: &[usize],
    opts: &SampleOptions,
    meta: RunMeta,
) -> Result<SamplerRun> {
    let model = spec.model;
    let c = model.num_classes().max(1);
    if let Some(&bad) = labels.iter().find(|&&y| y >= c) {
        return Err(Error::contract(format!("class {bad} >= class count {c}")));
    }
    if let Some((_, cfg)) = spec.guidance {
        cfg.validate()?;
    }
    let outs: Vec<ChainOut> = labels
        .par_iter()
        .enumerate()
        .map(|(i, &y)| spec.run(steps, opts.first_chain + i as u64, y, opts))
        .collect::<Result<_>>()?;
    let d = model.dim();
    let mut points = Vec::with_capacity(labels.len() * d);
    for o in &outs {
        points.extend_from_slice(&o.x0);
    }
    let mut snap_ts: Vec<usize> = opts.snapshot_at.clone();
    snap_ts.sort_unstable_by(|a, b| b.cmp(a));
    snap_ts.dedup();
    let snapshots = snap_ts
        .into_iter()
        .filter_map(|t| {
            let pts: Vec<f64> = outs
                .iter()
                .filter_map(|o| o.snapshots.iter().find(|(st, _)| *st == t).map(|(_, p)| p.clone()))
                .flatten()
                .collect();
            (pts.len() == labels.len() * d).then_some(Snapshot { t, points: pts })
        })
        .collect();
    let evaluations = outs.iter().map(|o| o.evals).collect();
    let steps = opts.record_steps.then(|| outs.iter().map(|o| o.steps.clone().unwrap_or_default()).collect());
    let samples = LabeledDataset::new(d, c, points, labels.to_vec(), SplitTag::Synthetic, opts.seed)?;
    Ok(SamplerRun { samples, snapshots, evaluations, meta, steps, ledger: None })
}

fn ancestral_steps(model: &DiffusionModel, stride: usize) -> Result<Vec<ReverseStep>> {
    model.schedule.reverse_steps(&model.schedule.strided_timesteps(stride)?)
}

fn meta(kind: SamplerKind, guidance: GuidanceConfig, opts: &SampleOptions) -> RunMeta {
    let mut extra = BTreeMap::new();
    extra.insert("stride".into(), opts.stride.to_string());
    RunMeta { kind, guidance, seed: opts.seed, extra }
}

/// Unguided ancestral sampling: `x_{t-1} = mu_theta + Sigma_theta^{1/2} z`,
/// with `z = 0` on the final step.
pub fn baseline_sample(model: &DiffusionModel, labels: &[usize], opts: &SampleOptions) -> Result<SamplerRun> {
    let spec = ChainSpec { model, guidance: None, soft_class: None, ddim: false };
    let steps = ancestral_steps(model, opts.stride)?;
    run_chains(spec, &steps, labels, opts, meta(SamplerKind::Baseline, GuidanceConfig::default(), opts))
}

/// Hardness guidance only (`beta_fid` must be zero).
pub fn sample_alpha(
    model: &DiffusionModel,
    artifacts: &GuidanceArtifacts,
    labels: &[usize],
    cfg: &GuidanceConfig,
    opts: &SampleOptions,
) -> Result<SamplerRun> {
    if cfg.beta_fid != 0.0 {
        return Err(Error::Config("the alpha-only sampler requires beta_fid = 0".into()));
    }
    let spec = ChainSpec { model, guidance: Some((artifacts, cfg)), soft_class: None, ddim: false };
    let steps = ancestral_steps(model, opts.stride)?;
    run_chains(spec, &steps, labels, opts, meta(SamplerKind::Alpha, *cfg, opts))
}

/// Hardness plus fidelity guidance:
/// `x_{t-1} = mu + Sigma^{1/2} z + s (alpha Sigma N(grad L_g1) + beta Sigma N(grad log p_real))`.
pub fn sample_guided(
    model: &DiffusionModel,
    artifacts: &GuidanceArtifacts,
    labels: &[usize],
    cfg: &GuidanceConfig,
    opts: &SampleOptions,
) -> Result<SamplerRun> {
    let spec = ChainSpec { model, guidance: Some((artifacts, cfg)), soft_class: None, ddim: false };
    let steps = ancestral_steps(model, opts.stride)?;
    run_chains(spec, &steps, labels, opts, meta(SamplerKind::Guided, *cfg, opts))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub alpha: f64,
    pub beta_fid: f64,
    pub run: SamplerRun,
}

/// One guided run per `(alpha, beta_fid)` pair, all from the same latents and
/// noise streams.
pub fn sample_grid(
    model: &DiffusionModel,
    artifacts: &GuidanceArtifacts,
    labels: &[usize],
    base: &GuidanceConfig,
    alphas: &[f64],
    betas: &[f64],
    opts: &SampleOptions,
) -> Result<Vec<GridCell>> {
    if alphas.is_empty() || betas.is_empty() {
        return Err(Error::Config("grid axes must be non-empty".into()));
    }
    let mut cells = Vec::with_capacity(alphas.len() * betas.len());
    for &alpha in alphas {
        for &beta_fid in betas {
            let cfg = GuidanceConfig { alpha, beta_fid, ..*base };
            cells.push(GridCell { alpha, beta_fid, run: sample_guided(model, artifacts, labels, &cfg, opts)? });
        }
    }
    Ok(cells)
}

/// Deterministic DDIM over `substeps` evenly spaced timesteps, with the same
/// Sigma-scaled normalised guidance added to the DDIM update. `guidance =
/// None` (or zero scales) is plain DDIM.
pub fn sample_ddim_guided(
    model: &DiffusionModel,
    artifacts: Option<&GuidanceArtifacts>,
    labels: &[usize],
    substeps: usize,
    cfg: &GuidanceConfig,
    opts: &SampleOptions,
) -> Result<SamplerRun> {
    if substeps < 2 {
        return Err(Error::Config(format!("DDIM needs at least 2 substeps, got {substeps}")));
    }
    let steps = model.schedule.reverse_steps(&model.schedule.spaced_timesteps(substeps)?)?;
    let guided = cfg.alpha > 0.0 || cfg.beta_fid > 0.0;
    let guidance = match (guided, artifacts) {
        (false, _) => None,
        (true, Some(a)) => Some((a, cfg)),
        (true, None) => return Err(Error::contract("guided DDIM needs guidance artifacts")),
    };
    let spec = ChainSpec { model, guidance, soft_class: None, ddim: true };
    let mut m = meta(SamplerKind::Ddim, *cfg, opts);
    m.extra.insert("substeps".into(), substeps.to_string());
    run_chains(spec, &steps, labels, opts, m)
}

/// Class vector with `y_max` on `y` and the rest spread evenly.
pub fn smoothed_class_vector(y: usize, num_classes: usize, y_max: f64) -> Result<Vec<f64>> {
    let c = num_classes as f64;
    if !(y_max >= 1.0 / c - 1e-12 && y_max <= 1.0) {
        return Err(Error::Config(format!("y_max must lie in [1/C, 1] = [{}, 1], got {y_max}", 1.0 / c)));
    }
    if y >= num_classes {
        return Err(Error::contract(format!("class {y} >= class count {num_classes}")));
    }
    let rest = if num_classes > 1 { (1.0 - y_max) / (c - 1.0) } else { 0.0 };
    Ok((0..num_classes).map(|j| if j == y { y_max } else { rest }).collect())
}

/// Baseline sampling of class `y` with the one-hot class input replaced by
/// a smoothed distribution.
pub fn sample_smoothed_embedding(
    model: &DiffusionModel,
    y: usize,
    y_max: f64,
    n: usize,
    opts: &SampleOptions,
) -> Result<SamplerRun> {
    if !model.class_conditional {
        return Err(Error::contract("class smoothing needs a class-conditional model"));
    }
    let vector = smoothed_class_vector(y, model.num_classes(), y_max)?;
    let spec = ChainSpec { model, guidance: None, soft_class: Some(&vector), ddim: false };
    let steps = ancestral_steps(model, opts.stride)?;
    let mut m = meta(SamplerKind::Smooth, GuidanceConfig::default(), opts);
    m.extra.insert("y_max".into(), format!("{y_max:?}"));
    run_chains(spec, &steps, &vec![y; n], opts, m)
}

/// Draws chains for class `y` in order until `quota` of them score hardness
/// strictly above `threshold` (under the clean class model) or `max_draws`
/// is spent. With `cfg = None` the draws are baseline samples; otherwise
/// guided. Chains are generated in parallel batches but accounted in draw
/// order, so the ledger does not depend on `batch`.
#[allow(clippy::too_many_arguments)]
pub fn rejection_sample(
    model: &DiffusionModel,
    artifacts: &GuidanceArtifacts,
    cfg: Option<&GuidanceConfig>,
    y: usize,
    threshold: f64,
    quota: usize,
    max_draws: usize,
    batch: usize,
    opts: &SampleOptions,
) -> Result<SamplerRun> {
    if batch == 0 {
        return Err(Error::Config("batch must be >= 1".into()));
    }
    let clean = artifacts.class_models.clean();
    let d = model.dim();
    let mut accepted_pts = Vec::new();
    let mut evaluations = Vec::new();
    let mut ledger = CostLedger {
        threshold,
        quota,
        draws: 0,
        accepted: 0,
        denoiser_evals: 0,
        guidance_evals: 0,
        quota_met: quota == 0,
        draw_hardness: Vec::new(),
    };
    while ledger.accepted < quota && ledger.draws < max_draws {
        let n = batch.min(max_draws - ledger.draws);
        let chunk_opts = SampleOptions { first_chain: opts.first_chain + ledger.draws as u64, snapshot_at: vec![], record_steps: false, ..opts.clone() };
        let labels = vec![y; n];
        let run = match cfg {
            None => baseline_sample(model, &labels, &chunk_opts)?,
            Some(c) => sample_guided(model, artifacts, &labels, c, &chunk_opts)?,
        };
        let hardness = guidance::hardness_scores(clean, &artifacts.embedder, &run.samples)?;
        for (i, h) in hardness.into_iter().enumerate() {
            let e = run.evaluations[i];
            ledger.draws += 1;
            ledger.denoiser_evals += e.denoiser;
            ledger.guidance_evals += e.guidance;
            ledger.draw_hardness.push(h);
            if h > threshold {
                ledger.accepted += 1;
                accepted_pts.extend_from_slice(run.samples.point(i));
                evaluations.push(e);
                if ledger.accepted == quota {
                    break;
                }
            }
        }
    }
    ledger.quota_met = ledger.accepted >= quota;
    let n_acc = ledger.accepted;
    let guidance_cfg = cfg.copied().unwrap_or_default();
    let mut m = meta(SamplerKind::Reject, guidance_cfg, opts);
    m.extra.insert("threshold".into(), format!("{threshold:?}"));
    m.extra.insert("class".into(), y.to_string());
    m.extra.insert("quota".into(), quota.to_string());
    m.extra.insert("proposal".into(), if cfg.is_some() { "guided" } else { "baseline" }.into());
    let samples = LabeledDataset::new(d, model.num_classes().max(1), accepted_pts, vec![y; n_acc], SplitTag::Synthetic, opts.seed)?;
    Ok(SamplerRun { samples, snapshots: vec![], evaluations, meta: m, steps: None, ledger: Some(ledger) })
}

/// Rejection sampling from the unguided baseline.
#[allow(clippy::too_many_arguments)]
pub fn rejection_baseline(
    model: &DiffusionModel,
    artifacts: &GuidanceArtifacts,
    y: usize,
    threshold: f64,
    quota: usize,
    max_draws: usize,
    batch: usize,
    opts: &SampleOptions,
) -> Result<SamplerRun> {
    rejection_sample(model, artifacts, None, y, threshold, quota, max_draws, batch, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_grad(&[2.0, -4.0]), vec![0.5, -1.0]);
        assert_eq!(normalize_grad(&[0.0, 0.0]), vec![0.0, 0.0]);
        let g = normalize_grad(&[0.3, -0.01, 0.2]);
        assert_eq!(g.iter().fold(0.0f64, |a, v| a.max(v.abs())), 1.0);
    }

    #[test]
    fn smoothed_vectors() {
        assert_eq!(smoothed_class_vector(2, 4, 1.0).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
        let u = smoothed_class_vector(1, 4, 0.25).unwrap();
        assert!(u.iter().all(|v| (v - 0.25).abs() < 1e-15));
        assert!(smoothed_class_vector(0, 4, 0.2).is_err());
        assert!(smoothed_class_vector(0, 4, 1.1).is_err());
    }

    #[test]
    fn ledger_merge_is_order_insensitive() {
        let a = CostLedger { threshold: 1.0, quota: 5, draws: 4, accepted: 2, denoiser_evals: 40, guidance_evals: 3, quota_met: false, draw_hardness: vec![1.0, 2.0, 0.5, 3.0] };
        let b = CostLedger { draws: 3, accepted: 3, denoiser_evals: 30, guidance_evals: 0, draw_hardness: vec![4.0, 5.0, 6.0], ..a.clone() };
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!((ab.draws, ab.accepted, ab.denoiser_evals, ab.guidance_evals, ab.quota_met), (ba.draws, ba.accepted, ba.denoiser_evals, ba.guidance_evals, ba.quota_met));
        assert!(ab.quota_met);
    }

    #[test]
    fn sampler_kind_parse() {
        for k in ["baseline", "alpha", "guided", "ddim", "smooth", "reject"] {
            assert_eq!(k.parse::<SamplerKind>().unwrap().as_str(), k);
        }
        assert!("euler".parse::<SamplerKind>().is_err());
    }
}
