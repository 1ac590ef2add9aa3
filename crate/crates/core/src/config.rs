//! Experiment configuration: a TOML file with one level of sections.
//!
//! Every seed used anywhere in an experiment is named here. The CLI may
//! override sampling seeds per invocation but never draws OS entropy.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::RingWorld;
use crate::diffusion::NoiseSchedule;
use crate::error::{Error, Result};
use crate::guidance::{GradNorm, GuidanceConfig, LossSpace};
use crate::nn::{Architecture, Optimizer, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub n_per_class: usize,
    pub seed: u64,
    pub holdout_fraction: f64,
    pub split_seed: u64,
    /// Seed of the baseline corpus the discriminator learns to reject.
    pub synthetic_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub steps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub denoiser_hidden: usize,
    pub denoiser_depth: usize,
    pub embedder_hidden: usize,
    pub embedder_depth: usize,
    pub embedding_width: usize,
    pub discriminator_hidden: usize,
    pub discriminator_depth: usize,
}

/// Optimiser settings for one network plus the seed of its initial weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub optimizer: Optimizer,
    pub init_seed: u64,
    pub seed: u64,
    pub steps: usize,
    pub batch: usize,
    pub step_size: f64,
    pub momentum: f64,
    pub weight_decay: f64,
}

impl TrainSection {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            optimizer: self.optimizer,
            step_size: self.step_size,
            steps: self.steps,
            batch: self.batch,
            seed: self.seed,
            weight_decay: self.weight_decay,
            momentum: self.momentum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidanceSection {
    pub alpha: f64,
    pub beta_fid: f64,
    pub tau: f64,
    pub loss_space: LossSpace,
    pub grad_norm: GradNorm,
    /// Number of timesteps at which class models are fitted.
    pub class_grid: usize,
    pub class_seed: u64,
    /// Init seed of the independently trained second embedder used for the
    /// feature-extractor robustness check.
    pub second_embedder_seed: u64,
}

impl GuidanceSection {
    pub fn guidance_config(&self) -> GuidanceConfig {
        GuidanceConfig {
            alpha: self.alpha,
            beta_fid: self.beta_fid,
            tau: self.tau,
            loss_space: self.loss_space,
            grad_norm: self.grad_norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub seed: u64,
    pub n: usize,
    pub max_draws: usize,
    pub quota: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    pub avg_knn_k: usize,
    pub lof_k: usize,
    pub precision_k: usize,
    pub top_p: usize,
    pub neighbor_k: usize,
    pub vlb_samples: usize,
    pub vlb_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub world: RingWorld,
    pub data: DataSection,
    pub schedule: ScheduleSection,
    pub networks: NetworkSection,
    pub train_diffusion: TrainSection,
    pub train_embedder: TrainSection,
    pub train_discriminator: TrainSection,
    pub guidance: GuidanceSection,
    pub sampling: SamplingSection,
    pub metrics: MetricsSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            world: RingWorld::default(),
            data: DataSection { n_per_class: 1000, seed: 1, holdout_fraction: 0.2, split_seed: 2, synthetic_seed: 3 },
            schedule: ScheduleSection { steps: 200, beta_start: 5e-4, beta_end: 0.1, stride: 1 },
            networks: NetworkSection {
                denoiser_hidden: 64,
                denoiser_depth: 4,
                embedder_hidden: 64,
                embedder_depth: 3,
                embedding_width: 16,
                discriminator_hidden: 64,
                discriminator_depth: 3,
            },
            // Deliberately short: a converged denoiser leaves the discriminator
            // nothing to separate, and fidelity guidance then only adds drift.
            train_diffusion: TrainSection {
                optimizer: Optimizer::Adam,
                init_seed: 11,
                seed: 12,
                steps: 200,
                batch: 64,
                step_size: 0.002,
                momentum: 0.9,
                weight_decay: 0.0,
            },
            train_embedder: TrainSection {
                optimizer: Optimizer::Adam,
                init_seed: 21,
                seed: 22,
                steps: 3000,
                batch: 64,
                step_size: 0.002,
                momentum: 0.9,
                weight_decay: 0.0,
            },
            train_discriminator: TrainSection {
                optimizer: Optimizer::Adam,
                init_seed: 31,
                seed: 32,
                steps: 40000,
                batch: 64,
                step_size: 0.002,
                momentum: 0.9,
                weight_decay: 0.0,
            },
            guidance: GuidanceSection {
                alpha: 0.5,
                beta_fid: 0.5,
                tau: 1.0,
                loss_space: LossSpace::EmbeddingHardness,
                grad_norm: GradNorm::UnitLinf,
                class_grid: 21,
                class_seed: 41,
                second_embedder_seed: 51,
            },
            sampling: SamplingSection { seed: 7, n: 1000, max_draws: 20000, quota: 200 },
            metrics: MetricsSection {
                avg_knn_k: 5,
                lof_k: 20,
                precision_k: 3,
                top_p: 10,
                neighbor_k: 5,
                vlb_samples: 8,
                vlb_seed: 61,
            },
            output: OutputSection { dir: PathBuf::from("runs/default") },
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }

    pub fn schedule(&self) -> Result<NoiseSchedule> {
        NoiseSchedule::linear(self.schedule.steps, self.schedule.beta_start, self.schedule.beta_end)
    }

    pub fn denoiser_arch(&self) -> Architecture {
        let n = &self.networks;
        Architecture::denoiser(2, self.world.classes, n.denoiser_hidden, n.denoiser_depth)
    }

    pub fn embedder_arch(&self) -> Architecture {
        let n = &self.networks;
        Architecture::embedder(2, self.world.classes, n.embedder_hidden, n.embedder_depth, n.embedding_width)
    }

    pub fn discriminator_arch(&self) -> Architecture {
        let n = &self.networks;
        Architecture::discriminator(2, n.discriminator_hidden, n.discriminator_depth)
    }

    /// Rejects configurations that cannot run, before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.world.specs()?;
        if self.data.n_per_class == 0 {
            return Err(Error::Config("data.n_per_class must be >= 1".into()));
        }
        if !(self.data.holdout_fraction > 0.0 && self.data.holdout_fraction < 1.0) {
            return Err(Error::Config("data.holdout_fraction must lie in (0, 1)".into()));
        }
        if self.schedule.steps == 0 {
            return Err(Error::Config("schedule.steps must be >= 1".into()));
        }
        if self.schedule.stride == 0 || self.schedule.stride > self.schedule.steps {
            return Err(Error::Config("schedule.stride must lie in 1..=steps".into()));
        }
        self.schedule()?;
        let n = &self.networks;
        if [n.denoiser_hidden, n.denoiser_depth, n.embedder_hidden, n.embedder_depth, n.embedding_width]
            .into_iter()
            .chain([n.discriminator_hidden, n.discriminator_depth])
            .any(|v| v == 0)
        {
            return Err(Error::Config("network widths and depths must be >= 1".into()));
        }
        for (name, t) in [
            ("train_diffusion", &self.train_diffusion),
            ("train_embedder", &self.train_embedder),
            ("train_discriminator", &self.train_discriminator),
        ] {
            if t.steps == 0 {
                return Err(Error::Config(format!("{name}.steps must be >= 1")));
            }
            t.train_config().validate().map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        self.guidance.guidance_config().validate()?;
        if self.guidance.class_grid < 2 {
            return Err(Error::Config("guidance.class_grid must be >= 2".into()));
        }
        let m = &self.metrics;
        if [m.avg_knn_k, m.lof_k, m.precision_k, m.neighbor_k, m.vlb_samples].contains(&0) {
            return Err(Error::Config("metric neighbour counts and vlb_samples must be >= 1".into()));
        }
        if self.sampling.n == 0 || self.sampling.quota == 0 || self.sampling.max_draws == 0 {
            return Err(Error::Config("sampling.n, quota and max_draws must be >= 1".into()));
        }
        Ok(())
    }
}
