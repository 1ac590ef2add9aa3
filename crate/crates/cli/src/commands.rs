use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use lowdens_core::config::ExperimentConfig;
use lowdens_core::data::{true_density, LabeledDataset};
use lowdens_core::diffusion::vlb_nll;
use lowdens_core::guidance::{fit_class_model, hardness_scores, GuidanceConfig};
use lowdens_core::metrics::{
    classwise_precision, correlation_report, cost_report, cost_table, density_report, memorization_report, quantile,
    CostPool, Neighborhood, Space,
};
use lowdens_core::pipeline::{Datasets, Layout, Trained};
use lowdens_core::sampler::{
    baseline_sample, read_ledger, read_meta, rejection_sample, sample_alpha, sample_ddim_guided, sample_grid,
    sample_guided, sample_smoothed_embedding, SampleOptions, SamplerKind, SamplerRun,
};

use crate::failure::{Failure, Kind};

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::new(Kind::Usage, msg)
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::new(Kind::Input, msg)
}

fn write(path: &Path, text: &str) -> Outcome {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| input(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| input(format!("cannot write {}: {e}", path.display())))
}

/// A loaded config plus the experiment directory it points at.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub dir: PathBuf,
}

impl Context {
    /// Relative output directories are resolved against the config file's
    /// own directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let cfg = ExperimentConfig::load(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let dir = if cfg.output.dir.is_absolute() { cfg.output.dir.clone() } else { base.join(&cfg.output.dir) };
        Ok(Self { cfg, dir })
    }

    fn data(&self) -> Result<Datasets, Failure> {
        Datasets::load(&self.dir).map_err(|e| match e {
            lowdens_core::Error::MissingInput(p) => {
                input(format!("dataset {} not found; run `lowdens gen` first", p.display()))
            }
            other => other.into(),
        })
    }

    fn trained(&self) -> Result<Trained, Failure> {
        Trained::load(&self.dir).map_err(|e| match e {
            lowdens_core::Error::MissingInput(p) => {
                input(format!("checkpoint {} not found; run `lowdens train` first", p.display()))
            }
            other => other.into(),
        })
    }

    fn runs_dir(&self) -> PathBuf {
        self.dir.join("runs")
    }

    fn neighborhood(&self) -> Neighborhood {
        Neighborhood { avg_knn_k: self.cfg.metrics.avg_knn_k, lof_k: self.cfg.metrics.lof_k }
    }
}

pub fn init_config(out: &Path) -> Outcome {
    write(out, &ExperimentConfig::default().to_toml())
}

pub fn gen(ctx: &Context) -> Outcome {
    let data = Datasets::generate(&ctx.cfg)?;
    data.save(&ctx.dir)?;
    let l = Layout::new(&ctx.dir);
    println!("train {} ({} points)", l.train.display(), data.train.len());
    println!("holdout {} ({} points)", l.holdout.display(), data.holdout.len());
    Ok(())
}

pub fn train(ctx: &Context) -> Outcome {
    let data = ctx.data()?;
    let trained = Trained::train(&ctx.cfg, &data)?;
    trained.save(&ctx.dir)?;
    println!("checkpoints written to {}", ctx.dir.display());
    println!("discriminator held-out accuracy {:.4}", trained.discriminator_accuracy);
    println!("embedder holdout accuracy {:.4}", trained.embedder_accuracy);
    Ok(())
}

fn balanced_labels(n: usize, classes: usize, y: Option<usize>) -> Vec<usize> {
    match y {
        Some(y) => vec![y; n],
        None => (0..n).map(|i| i % classes).collect(),
    }
}

fn check_class(y: Option<usize>, classes: usize) -> Outcome {
    match y {
        Some(y) if y >= classes => Err(usage(format!("--y {y} is not a class (classes: 0..{classes})"))),
        _ => Ok(()),
    }
}

/// `pNN` is the NN-th percentile of class-`y` holdout hardness; anything
/// else must parse as a number (`-inf` included).
fn parse_threshold(spec: &str, y: usize, data: &Datasets, trained: &Trained) -> Result<f64, Failure> {
    if let Some(p) = spec.strip_prefix('p') {
        let q: f64 = p.parse().map_err(|_| usage(format!("bad percentile threshold '{spec}'")))?;
        if !(0.0..=100.0).contains(&q) {
            return Err(usage(format!("percentile {q} outside [0, 100]")));
        }
        let h = hardness_scores(trained.guidance.class_models.clean(), &trained.guidance.embedder, &data.holdout.filter_class(y))?;
        return Ok(quantile(&h, q / 100.0));
    }
    spec.parse::<f64>().map_err(|_| usage(format!("bad threshold '{spec}'")))
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// baseline | alpha | guided | ddim | smooth | reject
    #[arg(long)]
    pub sampler: String,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Correct-class probability of the smoothed class vector.
    #[arg(long)]
    pub y_max: Option<f64>,
    /// DDIM sub-schedule length.
    #[arg(long)]
    pub substeps: Option<usize>,
    /// Hardness threshold: a number or `pNN` (holdout percentile).
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub quota: Option<usize>,
    #[arg(long)]
    pub max_draws: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Class of every chain (default: classes in rotation).
    #[arg(long)]
    pub y: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub stride: Option<usize>,
    /// Timesteps at which to snapshot the chains.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an (x, y) series file of the samples.
    #[arg(long)]
    pub series: bool,
}

impl SampleArgs {
    fn reject_flags(&self, kind: SamplerKind) -> Outcome {
        use SamplerKind::*;
        let given = [
            ("--alpha", self.alpha.is_some(), &[Alpha, Guided, Ddim, Reject][..]),
            ("--beta", self.beta.is_some(), &[Guided, Ddim, Reject][..]),
            ("--tau", self.tau.is_some(), &[Alpha, Guided, Ddim, Reject][..]),
            ("--y-max", self.y_max.is_some(), &[Smooth][..]),
            ("--substeps", self.substeps.is_some(), &[Ddim][..]),
            ("--threshold", self.threshold.is_some(), &[Reject][..]),
            ("--quota", self.quota.is_some(), &[Reject][..]),
            ("--max-draws", self.max_draws.is_some(), &[Reject][..]),
            ("--n", self.n.is_some(), &[Baseline, Alpha, Guided, Ddim, Smooth][..]),
            ("--stride", self.stride.is_some(), &[Baseline, Alpha, Guided, Smooth, Reject][..]),
        ];
        for (flag, present, allowed) in given {
            if present && !allowed.contains(&kind) {
                return Err(usage(format!("{flag} does not apply to --sampler {}", kind.as_str())));
            }
        }
        Ok(())
    }
}

fn guidance(ctx: &Context, a: &SampleArgs, default_alpha: f64, default_beta: f64) -> GuidanceConfig {
    GuidanceConfig {
        alpha: a.alpha.unwrap_or(default_alpha),
        beta_fid: a.beta.unwrap_or(default_beta),
        tau: a.tau.unwrap_or(ctx.cfg.guidance.tau),
        ..ctx.cfg.guidance.guidance_config()
    }
}

pub fn sample(ctx: &Context, a: &SampleArgs) -> Outcome {
    let kind: SamplerKind = a.sampler.parse().map_err(|e: lowdens_core::Error| usage(e.to_string()))?;
    a.reject_flags(kind)?;
    let cfg = &ctx.cfg;
    let trained = ctx.trained()?;
    let model = &trained.model;
    let classes = model.num_classes().max(1);
    check_class(a.y, classes)?;
    let n = a.n.unwrap_or(cfg.sampling.n);
    if n == 0 {
        return Err(usage("--n must be >= 1"));
    }
    let opts = SampleOptions {
        seed: a.seed.unwrap_or(cfg.sampling.seed),
        stride: a.stride.unwrap_or(cfg.schedule.stride),
        snapshot_at: a.snapshots.clone(),
        ..SampleOptions::seeded(0)
    };
    let labels = balanced_labels(n, classes, a.y);
    let art = &trained.guidance;
    let g = &cfg.guidance;
    let run = match kind {
        SamplerKind::Baseline => baseline_sample(model, &labels, &opts)?,
        SamplerKind::Alpha => sample_alpha(model, art, &labels, &guidance(ctx, a, g.alpha, 0.0), &opts)?,
        SamplerKind::Guided => sample_guided(model, art, &labels, &guidance(ctx, a, g.alpha, g.beta_fid), &opts)?,
        SamplerKind::Ddim => {
            let substeps = a.substeps.unwrap_or(50);
            if substeps > cfg.schedule.steps {
                return Err(usage(format!("--substeps {substeps} exceeds the {} diffusion steps", cfg.schedule.steps)));
            }
            sample_ddim_guided(model, Some(art), &labels, substeps, &guidance(ctx, a, 0.0, 0.0), &opts)?
        }
        SamplerKind::Smooth => {
            let y_max = a.y_max.ok_or_else(|| usage("--sampler smooth needs --y-max"))?;
            let mut runs = Vec::new();
            for y in 0..classes {
                let count = labels.iter().filter(|&&l| l == y).count();
                if count > 0 {
                    let first = labels.iter().position(|&l| l == y).unwrap_or(0) as u64;
                    let o = SampleOptions { first_chain: first * 1_000_003, ..opts.clone() };
                    runs.push(sample_smoothed_embedding(model, y, y_max, count, &o)?);
                }
            }
            concat_runs(runs)
        }
        SamplerKind::Reject => {
            let spec = a.threshold.as_deref().ok_or_else(|| usage("--sampler reject needs --threshold"))?;
            let y = a.y.unwrap_or(0);
            let data = ctx.data()?;
            let threshold = parse_threshold(spec, y, &data, &trained)?;
            let proposal = (a.alpha.is_some() || a.beta.is_some()).then(|| guidance(ctx, a, 0.0, 0.0));
            rejection_sample(
                model,
                art,
                proposal.as_ref(),
                y,
                threshold,
                a.quota.unwrap_or(cfg.sampling.quota),
                a.max_draws.unwrap_or(cfg.sampling.max_draws),
                64,
                &opts,
            )?
        }
    };
    let out = a.out.clone().unwrap_or_else(|| ctx.runs_dir().join(format!("{}.txt", kind.as_str())));
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| input(format!("cannot create {}: {e}", parent.display())))?;
    }
    run.save(&out)?;
    if a.series {
        write(&series_path(&out, "xy"), &xy_series(&run.samples))?;
    }
    println!("{} samples written to {}", run.samples.len(), out.display());
    println!("denoiser evaluations {}", run.total_denoiser_evals());
    if let Some(l) = &run.ledger {
        println!(
            "ledger: threshold {:.4} draws {} accepted {}/{} denoiser evaluations {}{}",
            l.threshold,
            l.draws,
            l.accepted,
            l.quota,
            l.denoiser_evals,
            if l.quota_met { "" } else { " (quota not met)" }
        );
    }
    Ok(())
}

fn concat_runs(mut runs: Vec<SamplerRun>) -> SamplerRun {
    let mut first = runs.remove(0);
    for r in runs {
        first.samples.points.extend_from_slice(&r.samples.points);
        first.samples.labels.extend_from_slice(&r.samples.labels);
        first.evaluations.extend_from_slice(&r.evaluations);
    }
    first.snapshots.clear();
    first
}

fn series_path(base: &Path, tag: &str) -> PathBuf {
    let mut p = base.as_os_str().to_owned();
    p.push(format!(".{tag}.series"));
    PathBuf::from(p)
}

fn xy_series(ds: &LabeledDataset) -> String {
    let mut s = String::from("#schema x y label\n");
    for (x, y) in ds.iter() {
        let _ = writeln!(s, "{:?} {:?} {y}", x[0], x.get(1).copied().unwrap_or(0.0));
    }
    s
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub betas: Vec<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub series: bool,
}

pub fn grid(ctx: &Context, a: &GridArgs) -> Outcome {
    if a.alphas.is_empty() || a.betas.is_empty() {
        return Err(usage("grid axes must be non-empty"));
    }
    let cfg = &ctx.cfg;
    let trained = ctx.trained()?;
    let data = ctx.data()?;
    let n = a.n.unwrap_or(cfg.sampling.n);
    let labels = balanced_labels(n, trained.model.num_classes().max(1), None);
    let opts = SampleOptions { stride: cfg.schedule.stride, ..SampleOptions::seeded(a.seed.unwrap_or(cfg.sampling.seed)) };
    let base = cfg.guidance.guidance_config();
    let cells = sample_grid(&trained.model, &trained.guidance, &labels, &base, &a.alphas, &a.betas, &opts)?;
    let clean = trained.guidance.class_models.clean();
    let mut table = String::from("#schema alpha beta_fid median_hardness mean_hardness precision\n");
    let mut rows = Vec::new();
    for c in &cells {
        let h = hardness_scores(clean, &trained.guidance.embedder, &c.run.samples)?;
        let p = classwise_precision(&c.run.samples, &data.train, cfg.metrics.precision_k)?;
        let (med, mean) = (quantile(&h, 0.5), lowdens_core::metrics::mean(&h));
        let _ = writeln!(table, "{:?} {:?} {med:.6} {mean:.6} {p:.6}", c.alpha, c.beta_fid);
        rows.push((c.alpha, c.beta_fid, med, p));
    }
    let out = a.out.clone().unwrap_or_else(|| ctx.runs_dir().join("grid.txt"));
    write(&out, &table)?;
    if a.series {
        for &b in &a.betas {
            let mut s = String::from("#schema alpha median_hardness\n");
            for r in rows.iter().filter(|r| r.1 == b) {
                let _ = writeln!(s, "{:?} {:.6}", r.0, r.2);
            }
            write(&series_path(&out, &format!("hardness_vs_alpha.beta{b}")), &s)?;
        }
        for &al in &a.alphas {
            let mut s = String::from("#schema beta_fid precision\n");
            for r in rows.iter().filter(|r| r.0 == al) {
                let _ = writeln!(s, "{:?} {:.6}", r.1, r.3);
            }
            write(&series_path(&out, &format!("precision_vs_beta.alpha{al}")), &s)?;
        }
    }
    print!("{table}");
    Ok(())
}

fn load_samples(path: &Path, trained: &Trained) -> Result<LabeledDataset, Failure> {
    let ds = LabeledDataset::load(path)?;
    if ds.dim != trained.model.dim() {
        return Err(input(format!(
            "{} has dimension {} but the checkpoints expect {}",
            path.display(),
            ds.dim,
            trained.model.dim()
        )));
    }
    if ds.num_classes != trained.model.num_classes() {
        return Err(input(format!(
            "{} has {} classes but the checkpoints expect {}",
            path.display(),
            ds.num_classes,
            trained.model.num_classes()
        )));
    }
    Ok(ds)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into())
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Sample files (dataset format).
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    /// Reference for the distribution comparison: `holdout`, `train`, or a dataset path.
    #[arg(long, default_value = "holdout")]
    pub against: String,
    #[arg(long, default_value = "embedding")]
    pub space: String,
    /// Add a Monte-Carlo variational-bound column to the correlation matrix.
    #[arg(long)]
    pub vlb: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub series: bool,
}

pub fn eval(ctx: &Context, a: &EvalArgs) -> Outcome {
    let space: Space = a.space.parse().map_err(|e: lowdens_core::Error| usage(e.to_string()))?;
    let cfg = &ctx.cfg;
    let trained = ctx.trained()?;
    let data = ctx.data()?;
    let reference = match a.against.as_str() {
        "holdout" => data.holdout.clone(),
        "train" => data.train.clone(),
        path => load_samples(Path::new(path), &trained)?,
    };
    let specs = cfg.world.specs()?;
    let schedule = cfg.schedule()?;
    let clean = trained.guidance.class_models.clean();
    let second_model = fit_class_model(&trained.second_embedder, &data.train, 0, &schedule, cfg.guidance.class_seed)?;
    let out_dir = a.out.clone().unwrap_or_else(|| ctx.dir.join("reports"));
    for run in &a.runs {
        let samples = load_samples(run, &trained)?;
        let emb = &trained.guidance.embedder;
        let rep = density_report(&samples, &reference, &data.train, emb, clean, space, ctx.neighborhood())?;
        let second = density_report(&samples, &reference, &data.train, &trained.second_embedder, &second_model, space, ctx.neighborhood())?;
        let precision = classwise_precision(&samples, &data.train, cfg.metrics.precision_k)?;
        let nld: Vec<f64> = samples.iter().map(|(x, y)| -true_density(&specs[y], x).ln()).collect();
        let mut columns: Vec<(&str, &[f64])> = vec![
            ("hardness", &rep.hardness),
            ("avg_knn", &rep.avg_knn),
            ("lof", &rep.lof),
            ("neg_log_true_density", &nld),
        ];
        let vlb: Vec<f64>;
        if a.vlb {
            vlb = samples
                .iter()
                .enumerate()
                .map(|(i, (x, y))| {
                    let seed = cfg.metrics.vlb_seed.wrapping_add(i as u64);
                    vlb_nll(&trained.model, x, y, cfg.metrics.vlb_samples, seed).map(|v| v.mean)
                })
                .collect::<lowdens_core::Result<_>>()?;
            columns.insert(0, ("vlb_nll", &vlb));
        }
        let name = stem(run);
        let mut text = rep.to_table();
        let _ = writeln!(text, "# precision {precision:.6}");
        let _ = writeln!(
            text,
            "# second_embedder ks hardness {:.6} avg_knn {:.6} lof {:.6}",
            second.ks_hardness, second.ks_avg_knn, second.ks_lof
        );
        write(&out_dir.join(format!("{name}.eval.txt")), &text)?;
        match correlation_report(&columns) {
            Ok(m) => write(&out_dir.join(format!("{name}.corr.txt")), &m.to_table())?,
            Err(e) => eprintln!("lowdens: correlation matrix skipped for {}: {e}", run.display()),
        }
        if a.series {
            let mut s = String::from("#schema hardness avg_knn lof\n");
            for i in 0..rep.hardness.len() {
                let _ = writeln!(s, "{:?} {:?} {:?}", rep.hardness[i], rep.avg_knn[i], rep.lof[i]);
            }
            write(&out_dir.join(format!("{name}.density.series")), &s)?;
        }
        println!(
            "{name}: precision {precision:.4} ks hardness {:.4} avg_knn {:.4} lof {:.4} mean hardness {:.4} avg_knn {:.4} lof {:.4}",
            rep.ks_hardness,
            rep.ks_avg_knn,
            rep.ks_lof,
            lowdens_core::metrics::mean(&rep.hardness),
            lowdens_core::metrics::mean(&rep.avg_knn),
            lowdens_core::metrics::mean(&rep.lof)
        );
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct MemcheckArgs {
    pub run: PathBuf,
    #[arg(long, default_value = "embedding")]
    pub space: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn memcheck(ctx: &Context, a: &MemcheckArgs) -> Outcome {
    let space: Space = a.space.parse().map_err(|e: lowdens_core::Error| usage(e.to_string()))?;
    let trained = ctx.trained()?;
    let data = ctx.data()?;
    let samples = load_samples(&a.run, &trained)?;
    let m = &ctx.cfg.metrics;
    let rep = memorization_report(&samples, &data.train, &data.holdout, &trained.guidance.embedder, m.top_p, m.neighbor_k, space)?;
    let out = a.out.clone().unwrap_or_else(|| ctx.dir.join("reports").join(format!("{}.memcheck.txt", stem(&a.run))));
    write(&out, &rep.to_table(&samples.labels))?;
    println!(
        "mean nn distance {:.6} holdout {:.6} ratio {:.4} label mismatches {}",
        rep.mean_distance,
        rep.holdout_mean_distance,
        rep.ratio,
        rep.label_mismatch.iter().filter(|m| **m).count()
    );
    if rep.alarm {
        println!("ALARM memorization: ratio {:.4}", rep.ratio);
        return Err(Failure::new(Kind::Alarm, format!("memorisation alarm: ratio {:.4}", rep.ratio)));
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct CostArgs {
    pub guided: PathBuf,
    pub reject: PathBuf,
    /// Thresholds: numbers or `pNN` holdout percentiles.
    #[arg(long, value_delimiter = ',', default_value = "p50,p90", allow_hyphen_values = true)]
    pub thresholds: Vec<String>,
    #[arg(long)]
    pub quota: Option<usize>,
    /// Class whose holdout percentiles define `pNN` thresholds.
    #[arg(long)]
    pub y: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Proposal stream of a run: the rejection ledger when there is one,
/// otherwise every sample in chain order.
fn pool(path: &Path, trained: &Trained) -> Result<CostPool, Failure> {
    if let Some(l) = read_ledger(path)? {
        if l.draws == 0 || l.denoiser_evals % l.draws as u64 != 0 {
            return Err(input(format!("{}: ledger evaluations are not uniform per draw", path.display())));
        }
        let per = l.denoiser_evals / l.draws as u64;
        return Ok(CostPool { hardness: l.draw_hardness, evals_per_draw: vec![per; l.draws] });
    }
    let samples = load_samples(path, trained)?;
    let meta = read_meta(path)?;
    let per: Vec<u64> = meta
        .get("evals_per_sample")
        .ok_or_else(|| input(format!("{}: sidecar has no evals_per_sample", path.display())))?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.split(':').next().and_then(|d| d.parse().ok()))
        .collect::<Option<_>>()
        .ok_or_else(|| input(format!("{}: bad evals_per_sample", path.display())))?;
    if per.len() != samples.len() {
        return Err(input(format!("{}: evaluation counts do not match the samples", path.display())));
    }
    let hardness = hardness_scores(trained.guidance.class_models.clean(), &trained.guidance.embedder, &samples)?;
    Ok(CostPool { hardness, evals_per_draw: per })
}

pub fn cost(ctx: &Context, a: &CostArgs) -> Outcome {
    let trained = ctx.trained()?;
    let data = ctx.data()?;
    check_class(a.y, trained.model.num_classes().max(1))?;
    let y = match a.y {
        Some(y) => y,
        None => read_meta(&a.reject)?.get("class").and_then(|v| v.parse().ok()).unwrap_or(0),
    };
    let thresholds = a
        .thresholds
        .iter()
        .map(|t| parse_threshold(t, y, &data, &trained))
        .collect::<Result<Vec<_>, _>>()?;
    let guided = pool(&a.guided, &trained)?;
    let reject = pool(&a.reject, &trained)?;
    let rows = cost_report(&guided, &reject, &thresholds, a.quota.unwrap_or(ctx.cfg.sampling.quota));
    let table = cost_table(&rows);
    let out = a.out.clone().unwrap_or_else(|| ctx.dir.join("reports").join("cost.txt"));
    write(&out, &table)?;
    print!("{table}");
    Ok(())
}
