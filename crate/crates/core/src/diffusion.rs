//! Noise schedule, forward noising, the epsilon-prediction objective and a
//! Monte-Carlo variational-bound likelihood estimate.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::nn::{self, Architecture, ClassInput, Cond, MicroNet, Objective, ParamGrad, TrainConfig};
use crate::rng::{stream_rng, Stream};

pub use crate::sampler::baseline_sample;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Variance ladder for `T` diffusion steps. Index 0 is the clean-data
/// convention (`alpha_bar[0] = 1`); steps run `1..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    pub steps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub sched_beta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_bar: Vec<f64>,
    /// Variance of `q(x_{t-1} | x_t, x_0)`. The `t = 1` entry is zero in
    /// closed form and is clipped to the `t = 2` value.
    pub posterior_var: Vec<f64>,
}

impl NoiseSchedule {
    /// Linearly spaced `sched_beta` from `beta_start` to `beta_end`.
    pub fn linear(steps: usize, beta_start: f64, beta_end: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Config("diffusion steps must be >= 1".into()));
        }
        if !(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end) {
            return Err(Error::Config(format!(
                "need 0 < beta_start <= beta_end < 1, got {beta_start}..{beta_end}"
            )));
        }
        let mut sched_beta = vec![0.0];
        for i in 0..steps {
            let frac = if steps > 1 { i as f64 / (steps - 1) as f64 } else { 0.0 };
            sched_beta.push(beta_start + frac * (beta_end - beta_start));
        }
        let alpha: Vec<f64> = sched_beta.iter().map(|b| 1.0 - b).collect();
        let mut alpha_bar = vec![1.0];
        for t in 1..=steps {
            alpha_bar.push(alpha_bar[t - 1] * alpha[t]);
        }
        let mut posterior_var = vec![0.0; steps + 1];
        for t in 2..=steps {
            posterior_var[t] = sched_beta[t] * (1.0 - alpha_bar[t - 1]) / (1.0 - alpha_bar[t]);
        }
        posterior_var[1] = if steps >= 2 { posterior_var[2] } else { sched_beta[1] };
        Ok(Self { steps, beta_start, beta_end, sched_beta, alpha, alpha_bar, posterior_var })
    }

    pub fn terminal_alpha_bar(&self) -> f64 {
        self.alpha_bar[self.steps]
    }

    fn check_t(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.steps {
            return Err(Error::contract(format!("timestep {t} outside 1..={}", self.steps)));
        }
        Ok(())
    }

    /// Evenly spaced timesteps `1 = t_1 < ... < t_K = T`, `K = count`.
    pub fn spaced_timesteps(&self, count: usize) -> Result<Vec<usize>> {
        if count == 0 || count > self.steps {
            return Err(Error::contract(format!("cannot pick {count} of {} timesteps", self.steps)));
        }
        if count == 1 {
            return Ok(vec![self.steps]);
        }
        let mut ts: Vec<usize> = (0..count)
            .map(|i| 1 + ((self.steps - 1) as f64 * i as f64 / (count - 1) as f64).round() as usize)
            .collect();
        ts.dedup();
        Ok(ts)
    }

    /// Every `stride`-th timestep, always ending at `T`.
    pub fn strided_timesteps(&self, stride: usize) -> Result<Vec<usize>> {
        if stride == 0 {
            return Err(Error::contract("stride must be >= 1"));
        }
        let mut ts: Vec<usize> = (1..=self.steps).rev().step_by(stride).collect();
        ts.reverse();
        Ok(ts)
    }

    /// Reverse-process steps over an increasing timestep subsequence; the
    /// returned list runs from the largest timestep down.
    pub fn reverse_steps(&self, timesteps: &[usize]) -> Result<Vec<ReverseStep>> {
        if timesteps.is_empty() {
            return Err(Error::contract("empty timestep subsequence"));
        }
        for w in timesteps.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::contract("timestep subsequence must be strictly increasing"));
            }
        }
        let mut steps = Vec::with_capacity(timesteps.len());
        for (i, &t) in timesteps.iter().enumerate() {
            self.check_t(t)?;
            let prev = if i == 0 { 0 } else { timesteps[i - 1] };
            let alpha_bar = self.alpha_bar[t];
            let alpha_bar_prev = self.alpha_bar[prev];
            let (beta, posterior_var) = if prev + 1 == t {
                (self.sched_beta[t], self.posterior_var[t])
            } else {
                let beta = 1.0 - alpha_bar / alpha_bar_prev;
                (beta, beta * (1.0 - alpha_bar_prev) / (1.0 - alpha_bar))
            };
            let covered_var = self.posterior_var[prev + 1..=t].iter().sum();
            steps.push(ReverseStep { t, prev, alpha_bar, alpha_bar_prev, beta, posterior_var, covered_var });
        }
        // posterior variance of the final jump is zero in closed form
        if steps.len() >= 2 && steps[0].prev == 0 && steps[0].posterior_var == 0.0 {
            steps[0].posterior_var = steps[1].posterior_var;
        }
        steps.reverse();
        Ok(steps)
    }
}

/// One jump `t -> prev` of a (possibly respaced) reverse process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReverseStep {
    pub t: usize,
    pub prev: usize,
    pub alpha_bar: f64,
    pub alpha_bar_prev: f64,
    /// Effective `1 - alpha_bar / alpha_bar_prev`.
    pub beta: f64,
    pub posterior_var: f64,
    /// Sum of the single-step posterior variances over `prev+1..=t`; equal to
    /// `posterior_var` when nothing is skipped.
    pub covered_var: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceMode {
    FixedPosterior,
    FixedBeta,
}

impl VarianceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            VarianceMode::FixedPosterior => "fixed-posterior",
            VarianceMode::FixedBeta => "fixed-beta",
        }
    }
}

impl std::str::FromStr for VarianceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-posterior" => Ok(VarianceMode::FixedPosterior),
            "fixed-beta" => Ok(VarianceMode::FixedBeta),
            other => Err(Error::Config(format!("unknown variance mode '{other}'"))),
        }
    }
}

/// `x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) noise`. `t = 0` returns `x0`.
pub fn forward_diffuse(x0: &[f64], t: usize, noise: &[f64], sch: &NoiseSchedule) -> Result<Vec<f64>> {
    if t > sch.steps {
        return Err(Error::contract(format!("timestep {t} outside 0..={}", sch.steps)));
    }
    if noise.len() != x0.len() {
        return Err(Error::contract("noise and x0 differ in dimension"));
    }
    let a = sch.alpha_bar[t].sqrt();
    let s = (1.0 - sch.alpha_bar[t]).sqrt();
    Ok(x0.iter().zip(noise).map(|(x, e)| a * x + s * e).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionModel {
    pub denoiser: MicroNet,
    pub schedule: NoiseSchedule,
    pub class_conditional: bool,
    pub variance: VarianceMode,
}

impl DiffusionModel {
    pub fn dim(&self) -> usize {
        self.denoiser.input_dim
    }

    pub fn num_classes(&self) -> usize {
        self.denoiser.num_classes
    }

    fn cond_class<'a>(&self, class: ClassInput<'a>) -> ClassInput<'a> {
        if self.class_conditional {
            class
        } else {
            ClassInput::None
        }
    }

    /// Denoiser output `eps_hat(x_t, t, y)`.
    pub fn predict_noise(&self, x_t: &[f64], t: usize, class: ClassInput<'_>) -> Result<Vec<f64>> {
        let cond = Cond { time: Some(t as f64 / self.schedule.steps as f64), class: self.cond_class(class) };
        Ok(self.denoiser.forward(x_t, &cond)?.output().to_vec())
    }

    /// Mean and diagonal variance of `p(x_prev | x_t)` for one reverse step.
    pub fn step_mean_var(&self, x_t: &[f64], step: &ReverseStep, class: ClassInput<'_>) -> Result<(Vec<f64>, f64)> {
        let eps = self.predict_noise(x_t, step.t, class)?;
        Ok(self.mean_from_eps(x_t, &eps, step))
    }

    pub(crate) fn mean_from_eps(&self, x_t: &[f64], eps: &[f64], step: &ReverseStep) -> (Vec<f64>, f64) {
        let inv_sqrt_alpha = 1.0 / (1.0 - step.beta).sqrt();
        let coef = step.beta / (1.0 - step.alpha_bar).sqrt();
        let mean = x_t.iter().zip(eps).map(|(x, e)| inv_sqrt_alpha * (x - coef * e)).collect();
        let var = match self.variance {
            VarianceMode::FixedPosterior => step.posterior_var,
            VarianceMode::FixedBeta => step.beta,
        };
        (mean, var)
    }

    fn full_step(&self, t: usize) -> Result<ReverseStep> {
        self.schedule.check_t(t)?;
        let s = &self.schedule;
        Ok(ReverseStep {
            t,
            prev: t - 1,
            alpha_bar: s.alpha_bar[t],
            alpha_bar_prev: s.alpha_bar[t - 1],
            beta: s.sched_beta[t],
            posterior_var: s.posterior_var[t],
            covered_var: s.posterior_var[t],
        })
    }

    /// `(mu_theta, diag Sigma_theta)` of the single-step reverse transition at `t`.
    pub fn posterior_mean_var(&self, x_t: &[f64], t: usize, class: ClassInput<'_>) -> Result<(Vec<f64>, Vec<f64>)> {
        let step = self.full_step(t)?;
        let (mean, var) = self.step_mean_var(x_t, &step, class)?;
        Ok((mean, vec![var; x_t.len()]))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("#lowdens-diffusion v1\n");
        let _ = writeln!(
            s,
            "schedule linear {} {:?} {:?}",
            self.schedule.steps, self.schedule.beta_start, self.schedule.beta_end
        );
        let _ = writeln!(s, "variance {}", self.variance.as_str());
        let _ = writeln!(s, "class_conditional {}", self.class_conditional);
        s.push_str(&self.denoiser.to_text());
        s
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { path: origin.into(), line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| lines.next().ok_or_else(|| perr(0, format!("truncated checkpoint, expected {what}")));
        let (no, head) = next("header")?;
        if head != "#lowdens-diffusion v1" {
            return Err(perr(no, format!("expected '#lowdens-diffusion v1', found '{head}'")));
        }
        let (no, line) = next("schedule")?;
        let f: Vec<&str> = line.split_ascii_whitespace().collect();
        if f.len() != 5 || f[0] != "schedule" || f[1] != "linear" {
            return Err(perr(no, format!("expected 'schedule linear <T> <start> <end>', found '{line}'")));
        }
        let steps = f[2].parse().map_err(|e| perr(no, format!("{e}")))?;
        let start = f[3].parse().map_err(|e| perr(no, format!("{e}")))?;
        let end = f[4].parse().map_err(|e| perr(no, format!("{e}")))?;
        let schedule = NoiseSchedule::linear(steps, start, end).map_err(|e| perr(no, e.to_string()))?;
        let (no, line) = next("variance")?;
        let variance = line
            .strip_prefix("variance ")
            .ok_or_else(|| perr(no, "expected 'variance <mode>'".into()))?
            .parse()
            .map_err(|e: Error| perr(no, e.to_string()))?;
        let (no, line) = next("class_conditional")?;
        let class_conditional = match line.strip_prefix("class_conditional ") {
            Some("true") => true,
            Some("false") => false,
            _ => return Err(perr(no, format!("expected 'class_conditional <bool>', found '{line}'"))),
        };
        let denoiser = MicroNet::parse_lines(&mut lines, origin)?;
        Ok(Self { denoiser, schedule, class_conditional, variance })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

struct EpsilonObjective<'a> {
    data: &'a LabeledDataset,
    schedule: &'a NoiseSchedule,
    class_conditional: bool,
    seed: u64,
}

impl Objective for EpsilonObjective<'_> {
    fn len(&self) -> usize {
        self.data.len()
    }

    fn example(&self, net: &MicroNet, e: usize, draw: u64, grad: &mut ParamGrad) -> Result<f64> {
        let mut rng = stream_rng(self.seed, Stream::Diffuse, draw, 0);
        let t = rng.random_range(1..=self.schedule.steps);
        let x0 = self.data.point(e);
        let eps: Vec<f64> = (0..x0.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x_t = forward_diffuse(x0, t, &eps, self.schedule)?;
        let class = if self.class_conditional { ClassInput::Label(self.data.labels[e]) } else { ClassInput::None };
        let cond = Cond { time: Some(t as f64 / self.schedule.steps as f64), class };
        let cache = net.forward(&x_t, &cond)?;
        let d = x0.len() as f64;
        let resid: Vec<f64> = cache.output().iter().zip(&eps).map(|(p, e)| p - e).collect();
        let adjoint: Vec<f64> = resid.iter().map(|r| 2.0 * r / d).collect();
        net.accumulate_grad_params(&cache, &adjoint, grad)?;
        Ok(resid.iter().map(|r| r * r).sum::<f64>() / d)
    }
}

/// Output of [`train_diffusion`].
#[derive(Debug, Clone)]
pub struct TrainedDiffusion {
    pub model: DiffusionModel,
    pub trace: Vec<f64>,
}

/// Fits the denoiser with the simplified objective `E ||eps - eps_hat(x_t, t, y)||^2`.
pub fn train_diffusion(
    ds: &LabeledDataset,
    schedule: &NoiseSchedule,
    arch: &Architecture,
    init_seed: u64,
    cfg: &TrainConfig,
) -> Result<TrainedDiffusion> {
    if ds.is_empty() {
        return Err(Error::contract("cannot train a diffusion model on an empty dataset"));
    }
    if arch.input_dim != ds.dim || arch.output_dim != ds.dim {
        return Err(Error::contract("denoiser input/output dims must equal the data dimension"));
    }
    let class_conditional = arch.num_classes > 0;
    let net = MicroNet::new(arch, init_seed)?;
    let objective = EpsilonObjective { data: ds, schedule, class_conditional, seed: cfg.seed };
    let out = nn::train(net, &objective, cfg).map_err(|e| match e {
        Error::Numerical { step, msg, .. } => Error::Numerical { stage: "diffusion training", step, msg },
        other => other,
    })?;
    Ok(TrainedDiffusion {
        model: DiffusionModel {
            denoiser: out.net,
            schedule: schedule.clone(),
            class_conditional,
            variance: VarianceMode::FixedPosterior,
        },
        trace: out.trace,
    })
}

/// Monte-Carlo estimate of the variational bound, in nats per dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlbEstimate {
    pub mean: f64,
    pub std_err: f64,
}

fn gaussian_kl(mq: f64, vq: f64, mp: f64, vp: f64) -> f64 {
    0.5 * ((vp / vq).ln() + vq / vp + (mq - mp) * (mq - mp) / vp - 1.0)
}

/// Negative variational lower bound of `x0`, estimated from `n_mc` uniform
/// draws of `(t, eps)`: `T * L_{t-1}` (or `T * L_0` at `t = 1`) plus the
/// prior term `L_T`.
pub fn vlb_nll(model: &DiffusionModel, x0: &[f64], y: usize, n_mc: usize, seed: u64) -> Result<VlbEstimate> {
    if n_mc == 0 {
        return Err(Error::contract("n_mc must be >= 1"));
    }
    let s = &model.schedule;
    let big_t = s.steps;
    let d = x0.len() as f64;
    let ab_t = s.alpha_bar[big_t];
    let prior: f64 = x0
        .iter()
        .map(|&x| gaussian_kl(ab_t.sqrt() * x, 1.0 - ab_t, 0.0, 1.0))
        .sum();
    let mut draws = Vec::with_capacity(n_mc);
    for i in 0..n_mc {
        let mut rng = stream_rng(seed, Stream::Vlb, i as u64, 0);
        let t = rng.random_range(1..=big_t);
        let eps: Vec<f64> = (0..x0.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x_t = forward_diffuse(x0, t, &eps, s)?;
        let (mu, var) = model.posterior_mean_var(&x_t, t, ClassInput::Label(y))?;
        let term: f64 = if t == 1 {
            x0.iter()
                .zip(&mu)
                .zip(&var)
                .map(|((x, m), v)| 0.5 * ((x - m) * (x - m) / v + v.ln() + LN_2PI))
                .sum()
        } else {
            let c1 = s.alpha_bar[t - 1].sqrt() * s.sched_beta[t] / (1.0 - s.alpha_bar[t]);
            let c2 = s.alpha[t].sqrt() * (1.0 - s.alpha_bar[t - 1]) / (1.0 - s.alpha_bar[t]);
            let vq = s.posterior_var[t];
            x0.iter()
                .zip(&x_t)
                .zip(mu.iter().zip(&var))
                .map(|((x, xt), (m, v))| gaussian_kl(c1 * x + c2 * xt, vq, *m, *v))
                .sum()
        };
        let total = big_t as f64 * term + prior;
        if !total.is_finite() {
            return Err(Error::Numerical { stage: "vlb", step: t, msg: format!("bound term is {total}") });
        }
        draws.push(total / d);
    }
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = if draws.len() > 1 {
        draws.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(VlbEstimate { mean, std_err: (var / n).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::normal_vec;

    fn default_schedule() -> NoiseSchedule {
        NoiseSchedule::linear(200, 5e-4, 0.1).unwrap()
    }

    #[test]
    fn schedule_invariants() {
        let s = default_schedule();
        assert!(s.alpha_bar.windows(2).all(|w| w[1] < w[0]));
        assert!(s.terminal_alpha_bar() < 1e-4, "alpha_bar_T = {}", s.terminal_alpha_bar());
        assert!(s.sched_beta[1..].iter().all(|&b| b > 0.0 && b < 1.0));
        assert!(s.posterior_var[1..].iter().all(|&v| v > 0.0));
        assert!(NoiseSchedule::linear(0, 1e-4, 0.02).is_err());
        assert!(NoiseSchedule::linear(10, 0.0, 0.02).is_err());
    }

    #[test]
    fn forward_diffuse_values() {
        let s = default_schedule();
        assert_eq!(forward_diffuse(&[2.0, -1.0], 0, &[5.0, 5.0], &s).unwrap(), vec![2.0, -1.0]);
        assert!(forward_diffuse(&[2.0], 201, &[0.0], &s).is_err());

        let mut q = s.clone();
        q.alpha_bar[3] = 0.25;
        let x = forward_diffuse(&[2.0, 0.0], 3, &[0.0, 2.0], &q).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15);
        assert!((x[1] - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_composed_steps() {
        let s = NoiseSchedule::linear(10, 0.05, 0.3).unwrap();
        let x0 = [1.5, -0.5];
        let n = 100_000;
        let (mut sum, mut sq) = ([0.0; 2], [0.0; 2]);
        for i in 0..n {
            let mut x = x0.to_vec();
            for step in 1..=3 {
                let z = normal_vec(1, Stream::Data, i, step, 2);
                let b = s.sched_beta[step as usize];
                x = x.iter().zip(&z).map(|(v, e)| (1.0 - b).sqrt() * v + b.sqrt() * e).collect();
            }
            for k in 0..2 {
                sum[k] += x[k];
                sq[k] += x[k] * x[k];
            }
        }
        let ab = s.alpha_bar[3];
        for k in 0..2 {
            let mean = sum[k] / n as f64;
            let var = sq[k] / n as f64 - mean * mean;
            let want_var = 1.0 - ab;
            assert!((mean - ab.sqrt() * x0[k]).abs() < 3.0 * (want_var / n as f64).sqrt());
            // var of the sample variance of a Gaussian is 2 sigma^4 / n
            assert!((var - want_var).abs() < 3.0 * want_var * (2.0 / n as f64).sqrt());
        }
    }

    #[test]
    fn oracle_noise_reconstructs_x0() {
        let s = default_schedule();
        let x0 = [0.7, -1.2];
        for t in [1, 17, 100, 200] {
            let eps = normal_vec(3, Stream::Data, t as u64, 0, 2);
            let xt = forward_diffuse(&x0, t, &eps, &s).unwrap();
            let ab = s.alpha_bar[t];
            for k in 0..2 {
                let rec = (xt[k] - (1.0 - ab).sqrt() * eps[k]) / ab.sqrt();
                assert!((rec - x0[k]).abs() < 1e-9 * (1.0 / ab.sqrt()));
            }
        }
    }

    fn zero_model(s: &NoiseSchedule) -> DiffusionModel {
        let mut net = MicroNet::new(&Architecture::denoiser(2, 4, 8, 1), 0).unwrap();
        let zeros = vec![0.0; net.parameter_count()];
        net.set_parameters(&zeros).unwrap();
        DiffusionModel { denoiser: net, schedule: s.clone(), class_conditional: true, variance: VarianceMode::FixedPosterior }
    }

    #[test]
    fn posterior_with_zero_noise_prediction() {
        let s = default_schedule();
        let m = zero_model(&s);
        let x = [0.4, -2.0];
        for t in [1, 2, 50, 200] {
            let (mu, var) = m.posterior_mean_var(&x, t, ClassInput::Label(1)).unwrap();
            for k in 0..2 {
                assert!((mu[k] - x[k] / s.alpha[t].sqrt()).abs() < 1e-14);
            }
            assert!(var.iter().all(|&v| v > 0.0));
        }
        let (_, var1) = m.posterior_mean_var(&x, 1, ClassInput::Label(0)).unwrap();
        assert_eq!(var1, vec![s.posterior_var[1]; 2]);
        assert!(m.posterior_mean_var(&x, 0, ClassInput::Label(0)).is_err());
    }

    #[test]
    fn reverse_steps_respacing() {
        let s = default_schedule();
        let full = s.reverse_steps(&s.strided_timesteps(1).unwrap()).unwrap();
        assert_eq!(full.len(), 200);
        assert_eq!(full[0].t, 200);
        assert_eq!(full[199].t, 1);
        assert_eq!(full[5].beta, s.sched_beta[full[5].t]);
        let ts = s.spaced_timesteps(50).unwrap();
        assert_eq!(ts.len(), 50);
        assert_eq!((ts[0], ts[49]), (1, 200));
        let sub = s.reverse_steps(&ts).unwrap();
        assert!(sub.iter().all(|st| st.posterior_var > 0.0 && st.beta > 0.0 && st.beta < 1.0));
        // the respaced chain reaches the same terminal alpha_bar
        let prod: f64 = sub.iter().map(|st| 1.0 - st.beta).product();
        assert!((prod - s.terminal_alpha_bar()).abs() < 1e-12);
    }

    #[test]
    fn checkpoint_round_trip() {
        let s = default_schedule();
        let m = zero_model(&s);
        let back = DiffusionModel::from_text(&m.to_text(), "mem").unwrap();
        assert_eq!(back, DiffusionModel { denoiser: back.denoiser.clone(), ..m.clone() });
        assert_eq!(back.denoiser.parameters(), m.denoiser.parameters());
    }
}
