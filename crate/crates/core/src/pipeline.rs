//! End-to-end experiment plumbing: data generation, the training order
//! (diffusion, then a baseline corpus the size of the training set, then the
//! discriminator; embedders and class models alongside), and the on-disk
//! layout of every artifact.

use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::data::{generate, LabeledDataset, SplitTag};
use crate::diffusion::{train_diffusion, DiffusionModel};
use crate::error::{Error, Result};
use crate::guidance::{accuracy, train_classifier, train_discriminator, ClassModelGrid, GuidanceArtifacts};
use crate::nn::MicroNet;
use crate::sampler::{baseline_sample, SampleOptions};

#[derive(Debug, Clone)]
pub struct Datasets {
    pub train: LabeledDataset,
    pub holdout: LabeledDataset,
}

impl Datasets {
    pub fn generate(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let full = generate(&cfg.world.specs()?, cfg.data.n_per_class, cfg.data.seed)?;
        let (train, holdout) = full.split_holdout(cfg.data.holdout_fraction, cfg.data.split_seed);
        Ok(Self { train, holdout })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        self.train.save(&Layout::new(dir).train)?;
        self.holdout.save(&Layout::new(dir).holdout)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let l = Layout::new(dir);
        Ok(Self { train: LabeledDataset::load(&l.train)?, holdout: LabeledDataset::load(&l.holdout)? })
    }
}

/// File names inside an experiment directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub train: PathBuf,
    pub holdout: PathBuf,
    pub diffusion: PathBuf,
    pub synthetic: PathBuf,
    pub discriminator: PathBuf,
    pub embedder: PathBuf,
    pub second_embedder: PathBuf,
    pub class_models: PathBuf,
    pub traces: PathBuf,
}

impl Layout {
    pub fn new(dir: &Path) -> Self {
        Self {
            train: dir.join("train.txt"),
            holdout: dir.join("holdout.txt"),
            diffusion: dir.join("diffusion.ckpt"),
            synthetic: dir.join("synthetic.txt"),
            discriminator: dir.join("discriminator.ckpt"),
            embedder: dir.join("embedder.ckpt"),
            second_embedder: dir.join("embedder2.ckpt"),
            class_models: dir.join("classmodels.txt"),
            traces: dir.join("traces.txt"),
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub model: DiffusionModel,
    pub synthetic: LabeledDataset,
    pub guidance: GuidanceArtifacts,
    pub second_embedder: MicroNet,
    pub discriminator_accuracy: f64,
    pub embedder_accuracy: f64,
    /// `(network, per-step minibatch loss)`.
    pub traces: Vec<(String, Vec<f64>)>,
}

impl Trained {
    pub fn train(cfg: &ExperimentConfig, data: &Datasets) -> Result<Self> {
        cfg.validate()?;
        let schedule = cfg.schedule()?;
        let td = &cfg.train_diffusion;
        let diffusion = train_diffusion(&data.train, &schedule, &cfg.denoiser_arch(), td.init_seed, &td.train_config())?;
        let model = diffusion.model;

        let opts = SampleOptions::seeded(cfg.data.synthetic_seed);
        let mut synthetic = baseline_sample(&model, &data.train.labels, &opts)?.samples;
        synthetic.split = SplitTag::Synthetic;
        let tdis = &cfg.train_discriminator;
        let disc = train_discriminator(&data.train, &synthetic, &schedule, &cfg.discriminator_arch(), tdis.init_seed, &tdis.train_config())?;

        let te = &cfg.train_embedder;
        let emb = train_classifier(&data.train, &schedule, &cfg.embedder_arch(), te.init_seed, &te.train_config())?;
        let second = train_classifier(
            &data.train,
            &schedule,
            &cfg.embedder_arch(),
            cfg.guidance.second_embedder_seed,
            &te.train_config(),
        )?;
        let class_models = ClassModelGrid::fit(&emb.net, &data.train, &schedule, cfg.guidance.class_grid, cfg.guidance.class_seed)?;
        let embedder_accuracy = accuracy(&emb.net, &data.holdout)?;
        Ok(Self {
            model,
            synthetic,
            guidance: GuidanceArtifacts { embedder: emb.net, class_models, discriminator: Some(disc.net) },
            second_embedder: second.net,
            discriminator_accuracy: disc.heldout_accuracy,
            embedder_accuracy,
            traces: vec![
                ("diffusion".into(), diffusion.trace),
                ("discriminator".into(), disc.trace),
                ("embedder".into(), emb.trace),
                ("embedder2".into(), second.trace),
            ],
        })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        let l = Layout::new(dir);
        self.model.save(&l.diffusion)?;
        self.synthetic.save(&l.synthetic)?;
        self.guidance.discriminator.as_ref().expect("trained pipeline has a discriminator").save(&l.discriminator)?;
        self.guidance.embedder.save(&l.embedder)?;
        self.second_embedder.save(&l.second_embedder)?;
        self.guidance.class_models.save(&l.class_models)?;
        let mut s = format!(
            "#lowdens-traces v1\n# discriminator_heldout_accuracy {:?}\n# embedder_holdout_accuracy {:?}\n#schema network step loss\n",
            self.discriminator_accuracy, self.embedder_accuracy
        );
        for (name, trace) in &self.traces {
            for (i, v) in trace.iter().enumerate() {
                s.push_str(&format!("{name} {i} {v:?}\n"));
            }
        }
        std::fs::write(&l.traces, s).map_err(|e| Error::io(&l.traces, e))
    }

    /// Loads the checkpoints written by [`Trained::save`]; training traces
    /// are not reloaded.
    pub fn load(dir: &Path) -> Result<Self> {
        let l = Layout::new(dir);
        let traces = std::fs::read_to_string(&l.traces).map_err(|e| Error::io(&l.traces, e))?;
        let stat = |key: &str| {
            traces
                .lines()
                .find_map(|line| line.strip_prefix(key).and_then(|v| v.trim().parse::<f64>().ok()))
                .unwrap_or(f64::NAN)
        };
        Ok(Self {
            model: DiffusionModel::load(&l.diffusion)?,
            synthetic: LabeledDataset::load(&l.synthetic)?,
            guidance: GuidanceArtifacts {
                embedder: MicroNet::load(&l.embedder)?,
                class_models: ClassModelGrid::load(&l.class_models)?,
                discriminator: Some(MicroNet::load(&l.discriminator)?),
            },
            second_embedder: MicroNet::load(&l.second_embedder)?,
            discriminator_accuracy: stat("# discriminator_heldout_accuracy"),
            embedder_accuracy: stat("# embedder_holdout_accuracy"),
            traces: Vec::new(),
        })
    }
}
