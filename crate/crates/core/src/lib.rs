//! Low-density sampling for small class-conditional diffusion models.
//!
//! The pipeline generates a labelled 2-D mixture world ([`data`]), trains a
//! DDPM denoiser, an embedding classifier and a real/synthetic discriminator
//! on small MLPs ([`nn`], [`diffusion`], [`guidance`]), and then samples with
//! hardness guidance toward the rare regions of each class while a fidelity
//! term keeps samples on the data manifold ([`sampler`]). [`metrics`] scores
//! the results by density, precision, memorization and sampling cost.
//!
//! All randomness is addressed by `(seed, stream, counters)` through [`rng`],
//! so every run is reproducible bit for bit regardless of thread count.

pub mod config;
pub mod data;
pub mod diffusion;
pub mod error;
pub mod guidance;
pub mod metrics;
pub mod nn;
pub mod pipeline;
pub mod rng;
pub mod sampler;

pub use config::ExperimentConfig;
pub use data::LabeledDataset;
pub use diffusion::{DiffusionModel, NoiseSchedule};
pub use error::{Error, Result};
pub use guidance::{GuidanceArtifacts, GuidanceConfig};
pub use pipeline::{Datasets, Trained};
pub use sampler::{SampleOptions, SamplerKind, SamplerRun};
