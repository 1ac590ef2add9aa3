//! Neighbourhood-density metrics (AvgkNN, LOF), the k-NN-ball precision
//! estimate, two-sample KS and Spearman statistics, the memorisation audit
//! and the rejection-sampling cost table.
//!
//! All neighbour searches are exact: full distance scans, ties broken by
//! reference index.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::guidance::{hardness_score, GaussianClassModel};
use crate::nn::{Cond, MicroNet};

/// AvgkNN neighbour count.
pub const AVG_KNN_K: usize = 5;
/// LOF neighbour count.
pub const LOF_K: usize = 20;
/// Neighbour count of the precision support balls.
pub const PRECISION_K: usize = 3;
/// Reachability floor: `lrd` is capped at `1 / LRD_EPS`.
pub const LRD_EPS: f64 = 1e-12;
/// Synthetic-to-holdout nearest-train distance ratio below which the audit
/// raises a memorisation alarm.
pub const MEMORIZATION_ALARM_RATIO: f64 = 0.1;

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Exact nearest-neighbour search over a fixed reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborIndex {
    pub dim: usize,
    pub points: Vec<f64>,
}

/// Where the queries come from.
#[derive(Debug, Clone, Copy)]
pub enum Queries<'a> {
    /// Row-major points outside the reference set.
    External(&'a [f64]),
    /// The reference points themselves; each skips itself as a neighbour.
    Reference,
}

impl NeighborIndex {
    pub fn new(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 || !points.len().is_multiple_of(dim) {
            return Err(Error::contract("reference points do not match the dimension"));
        }
        Ok(Self { dim, points })
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// The `k` nearest `(distance, index)` pairs to `q`, ascending, skipping `skip`.
    pub fn knn(&self, q: &[f64], k: usize, skip: Option<usize>) -> Vec<(f64, usize)> {
        let mut all: Vec<(f64, usize)> = (0..self.len())
            .filter(|&i| Some(i) != skip)
            .map(|i| (euclidean(q, self.point(i)), i))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < all.len() {
            all.select_nth_unstable_by(k, cmp);
            all.truncate(k);
        }
        all.sort_unstable_by(cmp);
        all
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || self.len() <= k {
            return Err(Error::contract(format!("need more than k = {k} reference points, have {}", self.len())));
        }
        Ok(())
    }

    fn query_rows<'a>(&'a self, queries: Queries<'a>) -> Result<Vec<(&'a [f64], Option<usize>)>> {
        match queries {
            Queries::External(q) => {
                if q.len() % self.dim != 0 {
                    return Err(Error::contract("query points do not match the dimension"));
                }
                Ok(q.chunks_exact(self.dim).map(|r| (r, None)).collect())
            }
            Queries::Reference => Ok((0..self.len()).map(|i| (self.point(i), Some(i))).collect()),
        }
    }
}

/// Mean distance to the `k` nearest reference points.
pub fn avg_knn(queries: Queries<'_>, index: &NeighborIndex, k: usize) -> Result<Vec<f64>> {
    index.check_k(k)?;
    let rows = index.query_rows(queries)?;
    Ok(rows
        .par_iter()
        .map(|(q, skip)| index.knn(q, k, *skip).iter().map(|(d, _)| d).sum::<f64>() / k as f64)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LofResult {
    pub scores: Vec<f64>,
    /// How many local reachability densities hit the `1 / LRD_EPS` cap.
    pub capped: usize,
}

/// Local outlier factor of each query against the reference set, with
/// exactly `k` neighbours per point:
///
/// `reach(a, b) = max(kdist(b), d(a, b))`, `lrd(a) = 1 / mean reach(a, .)`,
/// `LOF(a) = mean lrd(o) / lrd(a)` over the neighbours `o` of `a`.
pub fn lof(queries: Queries<'_>, index: &NeighborIndex, k: usize) -> Result<LofResult> {
    index.check_k(k)?;
    let m = index.len();
    let ref_nn: Vec<Vec<(f64, usize)>> = (0..m).into_par_iter().map(|i| index.knn(index.point(i), k, Some(i))).collect();
    let kdist: Vec<f64> = ref_nn.iter().map(|nn| nn[k - 1].0).collect();
    let lrd_of = |nn: &[(f64, usize)]| -> (f64, bool) {
        let mean_reach = nn.iter().map(|&(d, o)| kdist[o].max(d)).sum::<f64>() / nn.len() as f64;
        if mean_reach < LRD_EPS {
            (1.0 / LRD_EPS, true)
        } else {
            (1.0 / mean_reach, false)
        }
    };
    let ref_lrd: Vec<(f64, bool)> = ref_nn.iter().map(|nn| lrd_of(nn)).collect();
    let mut capped = ref_lrd.iter().filter(|(_, c)| *c).count();
    let rows = index.query_rows(queries)?;
    let per_query: Vec<(f64, bool)> = rows
        .par_iter()
        .map(|(q, skip)| {
            let nn = match skip {
                Some(i) => ref_nn[*i].clone(),
                None => index.knn(q, k, None),
            };
            let (lrd_a, cap) = lrd_of(&nn);
            let ratio = nn.iter().map(|&(_, o)| ref_lrd[o].0 / lrd_a).sum::<f64>() / k as f64;
            (ratio, cap)
        })
        .collect();
    if matches!(queries, Queries::External(_)) {
        capped += per_query.iter().filter(|(_, c)| *c).count();
    }
    Ok(LofResult { scores: per_query.into_iter().map(|(s, _)| s).collect(), capped })
}

/// Fraction of synthetic points inside the union of k-NN balls around the
/// real points (ball radius = distance from a real point to its `k`-th
/// nearest other real point).
pub fn precision(synthetic: &[f64], real: &NeighborIndex, k: usize) -> Result<f64> {
    real.check_k(k)?;
    if synthetic.is_empty() || !synthetic.len().is_multiple_of(real.dim) {
        return Err(Error::contract("precision needs a non-empty synthetic set of matching dimension"));
    }
    let radii: Vec<f64> = (0..real.len()).into_par_iter().map(|i| real.knn(real.point(i), k, Some(i))[k - 1].0).collect();
    let rows: Vec<&[f64]> = synthetic.chunks_exact(real.dim).collect();
    let covered = rows
        .par_iter()
        .filter(|s| (0..real.len()).any(|i| euclidean(s, real.point(i)) <= radii[i]))
        .count();
    Ok(covered as f64 / rows.len() as f64)
}

/// Precision computed class by class (synthetic points of class `c` against
/// real points of class `c`) and pooled over all synthetic points.
pub fn classwise_precision(synthetic: &LabeledDataset, real: &LabeledDataset, k: usize) -> Result<f64> {
    let mut covered = 0.0;
    for c in 0..synthetic.num_classes {
        let s = synthetic.filter_class(c);
        if s.is_empty() {
            continue;
        }
        let r = real.filter_class(c);
        let idx = NeighborIndex::new(real.dim, r.points)?;
        covered += precision(&s.points, &idx, k)? * s.len() as f64;
    }
    Ok(covered / synthetic.len() as f64)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut best) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        best = best.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    best
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &p in &idx[i..=j] {
            ranks[p] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation; `None` when either column is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Linear-interpolation quantile of an unsorted sample.
pub fn quantile(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Embedding,
    Ambient,
}

impl Space {
    pub fn as_str(self) -> &'static str {
        match self {
            Space::Embedding => "embedding",
            Space::Ambient => "ambient",
        }
    }
}

impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "embedding" => Ok(Space::Embedding),
            "ambient" => Ok(Space::Ambient),
            other => Err(Error::Config(format!("unknown space '{other}'"))),
        }
    }
}

/// Clean-input embeddings of every row, or the raw points for `Ambient`.
pub fn features(ds: &LabeledDataset, embedder: &MicroNet, space: Space) -> Result<(usize, Vec<f64>)> {
    match space {
        Space::Ambient => Ok((ds.dim, ds.points.clone())),
        Space::Embedding => {
            let k = embedder.embedding_dim().ok_or_else(|| Error::contract("embedder has no embedding layer"))?;
            let cond = if embedder.time_features > 0 { Cond::time(0.0) } else { Cond::NONE };
            let rows = (0..ds.len())
                .into_par_iter()
                .map(|i| Ok(embedder.embed(ds.point(i), &cond)?.output().to_vec()))
                .collect::<Result<Vec<_>>>()?;
            Ok((k, rows.concat()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// 10th, 20th, ..., 90th percentiles.
    pub deciles: [f64; 9],
}

impl Summary {
    pub fn of(v: &[f64]) -> Self {
        let mut deciles = [0.0; 9];
        for (i, d) in deciles.iter_mut().enumerate() {
            *d = quantile(v, (i + 1) as f64 / 10.0);
        }
        Self { mean: mean(v), deciles }
    }
}

/// Per-sample density metrics plus their distributions against a reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub space: Space,
    pub hardness: Vec<f64>,
    pub avg_knn: Vec<f64>,
    pub lof: Vec<f64>,
    pub reference_hardness: Vec<f64>,
    pub reference_avg_knn: Vec<f64>,
    pub reference_lof: Vec<f64>,
    pub ks_hardness: f64,
    pub ks_avg_knn: f64,
    pub ks_lof: f64,
    pub lof_capped: usize,
}

impl DensityReport {
    pub fn summaries(&self) -> [(&'static str, Summary, Summary); 3] {
        [
            ("hardness", Summary::of(&self.hardness), Summary::of(&self.reference_hardness)),
            ("avg_knn", Summary::of(&self.avg_knn), Summary::of(&self.reference_avg_knn)),
            ("lof", Summary::of(&self.lof), Summary::of(&self.reference_lof)),
        ]
    }

    pub fn to_table(&self) -> String {
        let mut s = String::from("#schema sample hardness avg_knn lof\n");
        for i in 0..self.hardness.len() {
            let _ = writeln!(s, "{i} {:?} {:?} {:?}", self.hardness[i], self.avg_knn[i], self.lof[i]);
        }
        let _ = writeln!(s, "# space {}", self.space.as_str());
        for (name, ours, theirs) in self.summaries() {
            let fmt = |d: &[f64; 9]| d.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(",");
            let _ = writeln!(s, "# {name} mean {:.6} reference_mean {:.6}", ours.mean, theirs.mean);
            let _ = writeln!(s, "# {name} deciles {} reference_deciles {}", fmt(&ours.deciles), fmt(&theirs.deciles));
        }
        let _ = writeln!(s, "# ks hardness {:.6} avg_knn {:.6} lof {:.6}", self.ks_hardness, self.ks_avg_knn, self.ks_lof);
        let _ = writeln!(s, "# lof_capped {}", self.lof_capped);
        s
    }
}

/// Neighbour counts of the density metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighborhood {
    pub avg_knn_k: usize,
    pub lof_k: usize,
}

impl Default for Neighborhood {
    fn default() -> Self {
        Self { avg_knn_k: AVG_KNN_K, lof_k: LOF_K }
    }
}

/// Density metrics for `samples`, with neighbours drawn from
/// `neighbor_reference` (the real training set) and distributions compared
/// against `holdout` scored the same way.
pub fn density_report(
    samples: &LabeledDataset,
    holdout: &LabeledDataset,
    neighbor_reference: &LabeledDataset,
    embedder: &MicroNet,
    class_model: &GaussianClassModel,
    space: Space,
    nb: Neighborhood,
) -> Result<DensityReport> {
    let (k, ref_feats) = features(neighbor_reference, embedder, space)?;
    let index = NeighborIndex::new(k, ref_feats)?;
    let (_, sample_feats) = features(samples, embedder, space)?;
    let (_, hold_feats) = features(holdout, embedder, space)?;
    let hard = |ds: &LabeledDataset| -> Result<Vec<f64>> {
        let (_, emb) = features(ds, embedder, Space::Embedding)?;
        let kk = embedder.embedding_dim().unwrap_or(1);
        emb.chunks_exact(kk).zip(&ds.labels).map(|(f, &y)| hardness_score(class_model, f, y)).collect()
    };
    let hardness = hard(samples)?;
    let reference_hardness = hard(holdout)?;
    let avg = avg_knn(Queries::External(&sample_feats), &index, nb.avg_knn_k)?;
    let ref_avg = avg_knn(Queries::External(&hold_feats), &index, nb.avg_knn_k)?;
    let l = lof(Queries::External(&sample_feats), &index, nb.lof_k)?;
    let rl = lof(Queries::External(&hold_feats), &index, nb.lof_k)?;
    Ok(DensityReport {
        space,
        ks_hardness: ks_statistic(&hardness, &reference_hardness),
        ks_avg_knn: ks_statistic(&avg, &ref_avg),
        ks_lof: ks_statistic(&l.scores, &rl.scores),
        lof_capped: l.capped,
        hardness,
        avg_knn: avg,
        lof: l.scores,
        reference_hardness,
        reference_avg_knn: ref_avg,
        reference_lof: rl.scores,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosePair {
    pub synthetic: usize,
    pub train: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemorizationReport {
    pub space: Space,
    pub nn_distance: Vec<f64>,
    pub mean_distance: f64,
    /// Mean nearest-train distance of held-out real data.
    pub holdout_mean_distance: f64,
    pub ratio: f64,
    /// Ascending by distance.
    pub top_pairs: Vec<ClosePair>,
    /// Labels of each synthetic sample's `neighbor_k` nearest training points.
    pub neighbor_labels: Vec<Vec<usize>>,
    /// Whether the nearest training point carries a different label.
    pub label_mismatch: Vec<bool>,
    pub alarm: bool,
}

impl MemorizationReport {
    pub fn to_table(&self, labels: &[usize]) -> String {
        let mut s = String::from("#schema sample label nn_distance neighbor_labels mismatch\n");
        for i in 0..self.nn_distance.len() {
            let nl: Vec<String> = self.neighbor_labels[i].iter().map(|l| l.to_string()).collect();
            let _ = writeln!(s, "{i} {} {:?} {} {}", labels[i], self.nn_distance[i], nl.join(","), self.label_mismatch[i]);
        }
        let _ = writeln!(s, "# space {}", self.space.as_str());
        let _ = writeln!(s, "# mean_nn_distance {:?}", self.mean_distance);
        let _ = writeln!(s, "# holdout_mean_nn_distance {:?}", self.holdout_mean_distance);
        let _ = writeln!(s, "# ratio {:?}", self.ratio);
        let _ = writeln!(s, "# label_mismatches {}", self.label_mismatch.iter().filter(|m| **m).count());
        for p in &self.top_pairs {
            let _ = writeln!(s, "# pair synthetic {} train {} distance {:?}", p.synthetic, p.train, p.distance);
        }
        if self.alarm {
            let _ = writeln!(s, "# ALARM memorization: ratio {:.4} < {MEMORIZATION_ALARM_RATIO}", self.ratio);
        }
        s
    }
}

/// Nearest-training-point audit of synthetic samples, benchmarked against
/// held-out real data.
pub fn memorization_report(
    synthetic: &LabeledDataset,
    train: &LabeledDataset,
    holdout: &LabeledDataset,
    embedder: &MicroNet,
    top_p: usize,
    neighbor_k: usize,
    space: Space,
) -> Result<MemorizationReport> {
    if synthetic.is_empty() || train.is_empty() || holdout.is_empty() {
        return Err(Error::contract("memorisation audit needs non-empty synthetic, train and holdout sets"));
    }
    let (k, train_feats) = features(train, embedder, space)?;
    let index = NeighborIndex::new(k, train_feats)?;
    let (_, syn) = features(synthetic, embedder, space)?;
    let (_, hold) = features(holdout, embedder, space)?;
    let nk = neighbor_k.max(1).min(index.len());
    let syn_nn: Vec<Vec<(f64, usize)>> = syn.par_chunks(k).map(|q| index.knn(q, nk, None)).collect();
    let hold_nn: Vec<f64> = hold.par_chunks(k).map(|q| index.knn(q, 1, None)[0].0).collect();
    let nn_distance: Vec<f64> = syn_nn.iter().map(|nn| nn[0].0).collect();
    let mean_distance = mean(&nn_distance);
    let holdout_mean_distance = mean(&hold_nn);
    let ratio = mean_distance / holdout_mean_distance;
    let mut pairs: Vec<ClosePair> = syn_nn
        .iter()
        .enumerate()
        .map(|(i, nn)| ClosePair { synthetic: i, train: nn[0].1, distance: nn[0].0 })
        .collect();
    pairs.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.synthetic.cmp(&b.synthetic)));
    pairs.truncate(top_p);
    let neighbor_labels: Vec<Vec<usize>> = syn_nn.iter().map(|nn| nn.iter().map(|&(_, j)| train.labels[j]).collect()).collect();
    let label_mismatch = neighbor_labels.iter().zip(&synthetic.labels).map(|(nl, &y)| nl[0] != y).collect();
    Ok(MemorizationReport {
        space,
        nn_distance,
        mean_distance,
        holdout_mean_distance,
        ratio,
        top_pairs: pairs,
        neighbor_labels,
        label_mismatch,
        alarm: ratio < MEMORIZATION_ALARM_RATIO,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// `None` where a column is constant.
    pub rho: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        self.rho[i][j]
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("#schema metric {}\n", self.names.join(" "));
        for (name, row) in self.names.iter().zip(&self.rho) {
            let cells: Vec<String> = row.iter().map(|v| v.map_or("undefined".to_string(), |r| format!("{r:.6}"))).collect();
            let _ = writeln!(s, "{name} {}", cells.join(" "));
        }
        s
    }
}

/// Pairwise Spearman matrix of named per-sample columns.
pub fn correlation_report(columns: &[(&str, &[f64])]) -> Result<CorrelationMatrix> {
    let n = columns.first().map_or(0, |c| c.1.len());
    if n < 30 {
        return Err(Error::contract(format!("correlation report needs >= 30 rows, got {n}")));
    }
    if columns.iter().any(|c| c.1.len() != n) {
        return Err(Error::contract("correlation columns are not aligned"));
    }
    let rho = columns
        .iter()
        .map(|a| columns.iter().map(|b| spearman(a.1, b.1)).collect())
        .collect();
    Ok(CorrelationMatrix { names: columns.iter().map(|c| c.0.to_string()).collect(), rho })
}

/// Per-draw hardness and denoiser cost of a stream of proposals, in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct CostPool {
    pub hardness: Vec<f64>,
    pub evals_per_draw: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub threshold: f64,
    pub guided_draws: usize,
    pub guided_evals: u64,
    pub guided_met: bool,
    pub rejection_draws: usize,
    pub rejection_evals: u64,
    pub rejection_met: bool,
    /// `rejection_evals / guided_evals`.
    pub speedup: f64,
}

fn cost_to_quota(pool: &CostPool, threshold: f64, quota: usize) -> (usize, u64, bool) {
    let (mut acc, mut evals) = (0, 0);
    for (i, (&h, &e)) in pool.hardness.iter().zip(&pool.evals_per_draw).enumerate() {
        evals += e;
        if h > threshold {
            acc += 1;
            if acc == quota {
                return (i + 1, evals, true);
            }
        }
    }
    (pool.hardness.len(), evals, quota == 0)
}

/// Denoiser evaluations each proposal stream needs to collect `quota`
/// samples with hardness above each threshold.
pub fn cost_report(guided: &CostPool, rejection: &CostPool, thresholds: &[f64], quota: usize) -> Vec<CostRow> {
    thresholds
        .iter()
        .map(|&threshold| {
            let (gd, ge, gm) = cost_to_quota(guided, threshold, quota);
            let (rd, re, rm) = cost_to_quota(rejection, threshold, quota);
            CostRow {
                threshold,
                guided_draws: gd,
                guided_evals: ge,
                guided_met: gm,
                rejection_draws: rd,
                rejection_evals: re,
                rejection_met: rm,
                speedup: re as f64 / ge as f64,
            }
        })
        .collect()
}

pub fn cost_table(rows: &[CostRow]) -> String {
    let mut s = String::from("#schema threshold guided_draws guided_evals guided_met rejection_draws rejection_evals rejection_met speedup\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:?} {} {} {} {} {} {} {:.4}",
            r.threshold, r.guided_draws, r.guided_evals, r.guided_met, r.rejection_draws, r.rejection_evals, r.rejection_met, r.speedup
        );
    }
    s
}
