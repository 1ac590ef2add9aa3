//! Acceptance suite on the default world. Trains once, then checks every
//! criterion and prints one `ACCEPTANCE nn PASS|FAIL` line each. Exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use lowdens_core::config::ExperimentConfig;
use lowdens_core::data::{generate, true_density, LabeledDataset, RingWorld, SplitTag};
use lowdens_core::diffusion::NoiseSchedule;
use lowdens_core::guidance::{
    fit_class_model, hardness_scores, hardness_with_grad, loss_g1, loss_g1_logit, loss_g2, GuidanceConfig, LossGrad,
};
use lowdens_core::metrics::{
    avg_knn, classwise_precision, density_report, euclidean, lof, memorization_report, precision,
    quantile, spearman, Neighborhood, NeighborIndex, Queries, Space,
};
use lowdens_core::nn::{Architecture, ClassInput, MicroNet};
use lowdens_core::pipeline::{Datasets, Trained};
use lowdens_core::rng::{normal_vec, stream_rng, Stream};
use lowdens_core::sampler::{
    baseline_sample, rejection_baseline, rejection_sample, sample_alpha, sample_ddim_guided, sample_guided,
    sample_smoothed_embedding, SampleOptions, SamplerRun,
};
use rand::Rng;

/// Samples per evaluated sampler setting.
const N: usize = 1000;
/// Guidance strength of the cost comparison, aimed at the upper hardness band.
const COST_GUIDANCE: (f64, f64) = (1.25, 1.25);

struct World {
    cfg: ExperimentConfig,
    config_path: PathBuf,
    data: Datasets,
    trained: Trained,
    labels: Vec<usize>,
    opts: SampleOptions,
}

impl World {
    fn prec(&self, run: &SamplerRun) -> f64 {
        classwise_precision(&run.samples, &self.data.train, self.cfg.metrics.precision_k).unwrap()
    }

    fn hardness(&self, ds: &LabeledDataset) -> Vec<f64> {
        hardness_scores(self.trained.guidance.class_models.clean(), &self.trained.guidance.embedder, ds).unwrap()
    }

    fn guided(&self, alpha: f64, beta: f64) -> SamplerRun {
        let g = GuidanceConfig { alpha, beta_fid: beta, ..self.cfg.guidance.guidance_config() };
        sample_guided(&self.trained.model, &self.trained.guidance, &self.labels, &g, &self.opts).unwrap()
    }

    fn alpha_only(&self, alpha: f64) -> SamplerRun {
        let g = GuidanceConfig { alpha, beta_fid: 0.0, ..self.cfg.guidance.guidance_config() };
        sample_alpha(&self.trained.model, &self.trained.guidance, &self.labels, &g, &self.opts).unwrap()
    }
}

fn build_world(dir: &Path) -> World {
    let mut cfg = ExperimentConfig::default();
    cfg.output.dir = dir.join("world");
    let config_path = dir.join("config.toml");
    cfg.save(&config_path).unwrap();
    let data = Datasets::generate(&cfg).unwrap();
    data.save(&cfg.output.dir).unwrap();
    let trained = Trained::train(&cfg, &data).unwrap();
    trained.save(&cfg.output.dir).unwrap();
    let classes = trained.model.num_classes();
    let labels = (0..N).map(|i| i % classes).collect();
    let opts = SampleOptions::seeded(cfg.sampling.seed);
    World { cfg, config_path, data, trained, labels, opts }
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn c01_reduction(w: &World) -> Verdict {
    let labels = &w.labels[..200];
    let m = &w.trained.model;
    let art = &w.trained.guidance;
    let zero = GuidanceConfig { alpha: 0.0, beta_fid: 0.0, ..w.cfg.guidance.guidance_config() };
    let base = baseline_sample(m, labels, &w.opts).unwrap();
    let guided = sample_guided(m, art, labels, &zero, &w.opts).unwrap();
    let alpha = sample_alpha(m, art, labels, &zero, &w.opts).unwrap();
    let plain = sample_ddim_guided(m, None, labels, 25, &zero, &w.opts).unwrap();
    let ddim = sample_ddim_guided(m, Some(art), labels, 25, &zero, &w.opts).unwrap();
    let same = |a: &SamplerRun, b: &SamplerRun| {
        a.samples.points.len() == b.samples.points.len()
            && a.samples.points.iter().zip(&b.samples.points).all(|(x, y)| x.to_bits() == y.to_bits())
    };
    let (g, a, d) = (same(&guided, &base), same(&alpha, &base), same(&ddim, &plain));
    verdict(g && a && d, format!("bit-identical: guided {g}, alpha-only {a}, ddim {d}"))
}

/// Lower 2.5% bound of the paired bootstrap distribution of
/// `median(hi) - median(lo)`; the two samples share chain seeds.
fn paired_bootstrap_lower(lo: &[f64], hi: &[f64], reps: usize, seed: u64) -> f64 {
    let n = lo.len();
    let mut rng = stream_rng(seed, Stream::Batch, 0, 0);
    let diffs: Vec<f64> = (0..reps)
        .map(|_| {
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let a: Vec<f64> = idx.iter().map(|&i| lo[i]).collect();
            let b: Vec<f64> = idx.iter().map(|&i| hi[i]).collect();
            quantile(&b, 0.5) - quantile(&a, 0.5)
        })
        .collect();
    quantile(&diffs, 0.025)
}

fn c02_alpha_monotone(w: &World) -> Verdict {
    let alphas = [0.0, 0.25, 0.5, 1.0];
    let h: Vec<Vec<f64>> = alphas.iter().map(|&a| w.hardness(&w.alpha_only(a).samples)).collect();
    let medians: Vec<f64> = h.iter().map(|v| quantile(v, 0.5)).collect();
    let bounds: Vec<f64> = (0..3).map(|i| paired_bootstrap_lower(&h[i], &h[i + 1], 2000, 17 + i as u64)).collect();
    let pass = medians.windows(2).all(|p| p[1] > p[0]) && bounds.iter().all(|&b| b > 0.0);
    verdict(pass, format!("medians {medians:.3?}, bootstrap 2.5% bounds of adjacent gains {bounds:.3?}"))
}

fn c03_beta_fidelity(w: &World) -> Verdict {
    let p0 = w.prec(&w.alpha_only(0.5));
    let p1 = w.prec(&w.guided(0.5, 1.0));
    verdict(p1 - p0 >= 0.05, format!("precision at alpha 0.5: beta 0 {p0:.3}, beta 1 {p1:.3}, gain {:.3} (need >= 0.05)", p1 - p0))
}

fn c04_density(w: &World) -> Verdict {
    let art = &w.trained.guidance;
    let clean = art.class_models.clean();
    let report = |run: &SamplerRun| {
        density_report(&run.samples, &w.data.holdout, &w.data.train, &art.embedder, clean, Space::Embedding, Neighborhood::default())
            .unwrap()
    };
    let base = report(&baseline_sample(&w.trained.model, &w.labels, &w.opts).unwrap());
    let guided = report(&w.guided(0.5, 0.5));
    let mean = lowdens_core::metrics::mean;
    let (kb, kg) = (base.ks_hardness, guided.ks_hardness);
    let (ab, ag) = (mean(&base.avg_knn), mean(&guided.avg_knn));
    let (lb, lg) = (mean(&base.lof), mean(&guided.lof));
    verdict(
        kb < kg && ag > ab && lg > lb,
        format!("KS vs holdout: baseline {kb:.3} < guided {kg:.3}; mean AvgkNN {ab:.3} -> {ag:.3}; mean LOF {lb:.3} -> {lg:.3}"),
    )
}

fn c05_cost(w: &World) -> Verdict {
    let art = &w.trained.guidance;
    let s = &w.cfg.sampling;
    let g = GuidanceConfig { alpha: COST_GUIDANCE.0, beta_fid: COST_GUIDANCE.1, ..w.cfg.guidance.guidance_config() };
    let y = 0;
    let holdout = w.hardness(&w.data.holdout.filter_class(y));
    let mut ratios = Vec::new();
    let mut met = true;
    for q in [0.5, 0.9] {
        let th = quantile(&holdout, q);
        let rej = rejection_baseline(&w.trained.model, art, y, th, s.quota, s.max_draws, 64, &w.opts).unwrap();
        let gui = rejection_sample(&w.trained.model, art, Some(&g), y, th, s.quota, s.max_draws, 64, &w.opts).unwrap();
        let (r, gl) = (rej.ledger.unwrap(), gui.ledger.unwrap());
        met &= r.quota_met && gl.quota_met;
        ratios.push((r.denoiser_evals as f64 / gl.denoiser_evals as f64, r.draws, gl.draws));
    }
    let (r50, r90) = (ratios[0].0, ratios[1].0);
    verdict(
        met && r90 >= 2.0 && (0.8..=1.5).contains(&r50),
        format!(
            "class {y}, quota {}: p50 speedup {r50:.2} ({} vs {} draws, need 0.8..1.5); p90 speedup {r90:.2} ({} vs {} draws, need >= 2)",
            s.quota, ratios[0].1, ratios[0].2, ratios[1].1, ratios[1].2
        ),
    )
}

fn c06_memorization(w: &World, dir: &Path) -> Verdict {
    let m = &w.cfg.metrics;
    let guided = w.guided(0.5, 0.5);
    let rep = memorization_report(&guided.samples, &w.data.train, &w.data.holdout, &w.trained.guidance.embedder, m.top_p, m.neighbor_k, Space::Embedding)
        .unwrap();
    // planted copies: training points passed off as samples
    let idx: Vec<usize> = (0..200).collect();
    let mut planted = w.data.train.select(&idx);
    planted.split = SplitTag::Synthetic;
    let path = dir.join("planted.txt");
    planted.save(&path).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_lowdens"))
        .arg("--config")
        .arg(&w.config_path)
        .arg("memcheck")
        .arg(&path)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let planted_ratio: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("ALARM memorization: ratio "))
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(f64::NAN);
    let code = out.status.code();
    verdict(
        rep.ratio >= 1.0 && code == Some(4) && planted_ratio < 0.1,
        format!("guided / holdout NN distance ratio {:.3} (need >= 1); planted copies ratio {planted_ratio:.2e}, exit code {code:?}", rep.ratio),
    )
}

/// Relative error of an analytic gradient against central differences.
fn fd_error(f: &dyn Fn(&[f64]) -> LossGrad, x: &[f64]) -> f64 {
    let g = f(x).grad;
    let h = 1e-5;
    let fd: Vec<f64> = (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (f(&p).value - f(&m).value) / (2.0 * h)
        })
        .collect();
    let diff = g.iter().zip(&fd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let scale = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(fd.iter().map(|v| v * v).sum::<f64>().sqrt());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

fn c07_gradients() -> Verdict {
    let specs = RingWorld::default().specs().unwrap();
    let schedule = NoiseSchedule::linear(200, 5e-4, 0.1).unwrap();
    let mut worst = [0.0f64; 4];
    let configs = 24;
    for c in 0..configs as u64 {
        let mut rng = stream_rng(c, Stream::Init, 99, 0);
        let depth = 1 + (c as usize % 4);
        let hidden = rng.random_range(4..24);
        let width = rng.random_range(2..8);
        let emb = MicroNet::new(&Architecture::embedder(2, 4, hidden, depth, width), 1000 + c).unwrap();
        let disc = MicroNet::new(&Architecture::discriminator(2, hidden, depth), 2000 + c).unwrap();
        let pts = generate(&specs, 40, 3000 + c).unwrap();
        let t = rng.random_range(0..=200);
        let class_model = fit_class_model(&emb, &pts, 0, &schedule, c).unwrap();
        let x = normal_vec(c, Stream::Data, 7, 0, 2).iter().map(|v| 3.0 * v).collect::<Vec<_>>();
        let y = rng.random_range(0..4);
        let tau = rng.random_range(0.5..2.0);
        let errs = [
            fd_error(&|p| loss_g1(&class_model, &emb, p, y, tau, t, 200).unwrap(), &x),
            fd_error(&|p| loss_g1_logit(&emb, p, y, tau, t, 200).unwrap(), &x),
            fd_error(&|p| loss_g2(&disc, p, tau, t, 200).unwrap(), &x),
            fd_error(&|p| hardness_with_grad(&class_model, &emb, p, y, t, 200).unwrap(), &x),
        ];
        for (w, e) in worst.iter_mut().zip(errs) {
            *w = w.max(e);
        }
    }
    verdict(
        worst.iter().all(|&e| e < 1e-4),
        format!(
            "{configs} configs each, worst relative error: L_g1 {:.1e}, L_g1-logit {:.1e}, L_g2 {:.1e}, hardness {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn brute_knn(q: &[f64], refs: &[Vec<f64>], k: usize, skip: Option<usize>) -> Vec<(f64, usize)> {
    let mut d: Vec<(f64, usize)> =
        refs.iter().enumerate().filter(|(i, _)| Some(*i) != skip).map(|(i, r)| (euclidean(q, r), i)).collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    d.truncate(k);
    d
}

fn brute_lof(queries: &[Vec<f64>], refs: &[Vec<f64>], k: usize) -> Vec<f64> {
    let kdist: Vec<f64> = (0..refs.len()).map(|i| brute_knn(&refs[i], refs, k, Some(i))[k - 1].0).collect();
    let lrd = |nn: &[(f64, usize)]| 1.0 / (nn.iter().map(|&(d, o)| d.max(kdist[o])).sum::<f64>() / k as f64);
    let ref_lrd: Vec<f64> = (0..refs.len()).map(|i| lrd(&brute_knn(&refs[i], refs, k, Some(i)))).collect();
    queries
        .iter()
        .map(|q| {
            let nn = brute_knn(q, refs, k, None);
            let own = lrd(&nn);
            nn.iter().map(|&(_, o)| ref_lrd[o] / own).sum::<f64>() / k as f64
        })
        .collect()
}

fn brute_spearman(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|x| {
                let less = v.iter().filter(|y| *y < x).count() as f64;
                let equal = v.iter().filter(|y| *y == x).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (ra, rb) = (rank(a), rank(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn brute_precision(syn: &[Vec<f64>], real: &[Vec<f64>], k: usize) -> f64 {
    let radius: Vec<f64> = (0..real.len()).map(|i| brute_knn(&real[i], real, k, Some(i))[k - 1].0).collect();
    let covered = syn.iter().filter(|s| real.iter().zip(&radius).any(|(r, &rad)| euclidean(s, r) <= rad)).count();
    covered as f64 / syn.len() as f64
}

fn c08_metric_oracles() -> Verdict {
    let mut worst = [0.0f64; 4];
    let mut instances = 0;
    for inst in 0..6u64 {
        let mut rng = stream_rng(inst, Stream::Data, 1, 0);
        let m = rng.random_range(100..=500);
        let nq = rng.random_range(100..=300);
        let dim = rng.random_range(2..=5);
        let refs: Vec<Vec<f64>> = (0..m).map(|i| normal_vec(inst, Stream::Data, 2, i as u64, dim)).collect();
        let qs: Vec<Vec<f64>> = (0..nq).map(|i| normal_vec(inst, Stream::Data, 3, i as u64, dim).iter().map(|v| 1.5 * v).collect()).collect();
        let index = NeighborIndex::new(dim, refs.concat()).unwrap();
        let flat = qs.concat();
        let dev = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

        let fast = avg_knn(Queries::External(&flat), &index, 5).unwrap();
        let slow: Vec<f64> = qs.iter().map(|q| brute_knn(q, &refs, 5, None).iter().map(|p| p.0).sum::<f64>() / 5.0).collect();
        let fast_self = avg_knn(Queries::Reference, &index, 5).unwrap();
        let slow_self: Vec<f64> =
            (0..m).map(|i| brute_knn(&refs[i], &refs, 5, Some(i)).iter().map(|p| p.0).sum::<f64>() / 5.0).collect();
        worst[0] = worst[0].max(dev(&fast, &slow)).max(dev(&fast_self, &slow_self));

        let fast = lof(Queries::External(&flat), &index, 20).unwrap().scores;
        worst[1] = worst[1].max(dev(&fast, &brute_lof(&qs, &refs, 20)));

        let a: Vec<f64> = qs.iter().map(|q| q[0]).collect();
        let b: Vec<f64> = qs.iter().map(|q| (q[1] * 4.0).round() + 0.3 * q[0]).collect();
        let tied: Vec<f64> = qs.iter().map(|q| (q[1] * 2.0).round()).collect();
        worst[2] = worst[2]
            .max((spearman(&a, &b).unwrap() - brute_spearman(&a, &b)).abs())
            .max((spearman(&a, &tied).unwrap() - brute_spearman(&a, &tied)).abs());

        worst[3] = worst[3].max((precision(&flat, &index, 3).unwrap() - brute_precision(&qs, &refs, 3)).abs());
        instances += 1;
    }
    verdict(
        worst.iter().all(|&e| e <= 1e-9),
        format!(
            "{instances} instances, max deviation: AvgkNN {:.1e}, LOF {:.1e}, Spearman {:.1e}, precision {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn c09_hardness_validity(w: &World) -> Verdict {
    let art = &w.trained.guidance;
    let rep = density_report(
        &w.data.holdout,
        &w.data.holdout,
        &w.data.train,
        &art.embedder,
        art.class_models.clean(),
        Space::Embedding,
        Neighborhood::default(),
    )
    .unwrap();
    let specs = w.cfg.world.specs().unwrap();
    let nld: Vec<f64> = w.data.holdout.iter().map(|(x, y)| -true_density(&specs[y], x).ln()).collect();
    let r_knn = spearman(&rep.reference_hardness, &rep.reference_avg_knn).unwrap_or(f64::NAN);
    let r_nld = spearman(&rep.reference_hardness, &nld).unwrap_or(f64::NAN);
    verdict(r_knn > 0.3 && r_nld > 0.3, format!("holdout Spearman: hardness vs AvgkNN {r_knn:.3}, hardness vs -log density {r_nld:.3} (need > 0.3)"))
}

fn c10_ddim(w: &World) -> Verdict {
    let m = &w.trained.model;
    let art = &w.trained.guidance;
    let g = w.cfg.guidance.guidance_config();
    let run = |guided: bool, s: usize| {
        let r = if guided {
            sample_ddim_guided(m, Some(art), &w.labels, s, &g, &w.opts)
        } else {
            sample_ddim_guided(m, None, &w.labels, s, &GuidanceConfig::default(), &w.opts)
        };
        w.prec(&r.unwrap())
    };
    let (p10, p50) = (run(false, 10), run(false, 50));
    let (g10, g50) = (run(true, 10), run(true, 50));
    verdict(
        p50 >= p10 && g50 >= g10,
        format!("precision 10 -> 50 substeps: plain {p10:.3} -> {p50:.3}, guided (alpha {}, beta {}) {g10:.3} -> {g50:.3}", g.alpha, g.beta_fid),
    )
}

fn c11_smoothing(w: &World) -> Verdict {
    let classes = w.trained.model.num_classes();
    let per_class = N / classes;
    let prec_at = |y_max: f64| {
        let mut covered = 0.0;
        for y in 0..classes {
            let opts = SampleOptions { first_chain: (y * per_class) as u64, ..w.opts.clone() };
            let run = sample_smoothed_embedding(&w.trained.model, y, y_max, per_class, &opts).unwrap();
            covered += w.prec(&run) * per_class as f64;
        }
        covered / (classes * per_class) as f64
    };
    let (p1, pu) = (prec_at(1.0), prec_at(1.0 / classes as f64));
    verdict(p1 - pu >= 0.05, format!("precision y_max 1: {p1:.3}, y_max 1/C: {pu:.3}, drop {:.3} (need >= 0.05)", p1 - pu))
}

fn c12_algorithm(w: &World) -> Verdict {
    let m = &w.trained.model;
    let g = w.cfg.guidance.guidance_config();
    let labels = &w.labels[..32];
    let opts = SampleOptions { record_steps: true, ..w.opts.clone() };
    let run = sample_guided(m, &w.trained.guidance, labels, &g, &opts).unwrap();
    let steps = run.steps.as_ref().unwrap();
    let mut final_exact = true;
    let mut worst_excess = f64::NEG_INFINITY;
    let bound_scale = g.alpha.max(g.beta_fid);
    for (chain, recs) in steps.iter().enumerate() {
        let last = recs.last().unwrap();
        let x1 = &recs[recs.len() - 2].next;
        let (mu, _) = m.posterior_mean_var(x1, 1, ClassInput::Label(labels[chain])).unwrap();
        final_exact &= last.t == 1 && last.next == mu && run.samples.point(chain) == mu.as_slice();
        for r in recs {
            let linf = |u: &[f64]| u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let bound = bound_scale * r.variance;
            worst_excess = worst_excess.max(linf(&r.u1) - bound).max(linf(&r.u2) - bound);
        }
    }
    verdict(
        final_exact && worst_excess <= 1e-15,
        format!("x0 == mu(x1, 1) exactly: {final_exact}; max (|u|_inf - max(alpha, beta) Sigma) over steps {worst_excess:.2e}"),
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    results.push((7, "gradient suite", c07_gradients()));
    results.push((8, "metric oracles", c08_metric_oracles()));
    let world = build_world(tmp.path());
    println!(
        "world trained in {:.0}s (discriminator held-out accuracy {:.3})",
        start.elapsed().as_secs_f64(),
        world.trained.discriminator_accuracy
    );
    results.push((1, "reduction identity", c01_reduction(&world)));
    results.push((2, "alpha monotonicity", c02_alpha_monotone(&world)));
    results.push((3, "beta fidelity", c03_beta_fidelity(&world)));
    results.push((4, "density imitation", c04_density(&world)));
    results.push((5, "cost table shape", c05_cost(&world)));
    results.push((6, "memorization audit", c06_memorization(&world, tmp.path())));
    results.push((9, "hardness validity", c09_hardness_validity(&world)));
    results.push((10, "ddim integration", c10_ddim(&world)));
    results.push((11, "smoothing baseline", c11_smoothing(&world)));
    results.push((12, "algorithm fidelity", c12_algorithm(&world)));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, v) in &results {
        println!("ACCEPTANCE {n:02} {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed in {:.0}s", results.len() - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
