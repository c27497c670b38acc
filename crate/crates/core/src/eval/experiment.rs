//! Repeated random-partition classification experiments.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use crate::data::rng::derive;
use crate::data::{self, generate_union_of_subspaces, LabeledDataset, NoiseSpec, SubspaceSpec};
use crate::error::{PceError, Result};
use crate::eval::{accuracy, nn_classify, pca_fit};
use crate::graph::{embed, lle_graph, LleConfig};
use crate::linalg::Ridge;
use crate::matrix::DataMatrix;
use crate::pce::{fit_with, FitOptions, DEFAULT_LAMBDA};

const SEED_TAG_DATA: u64 = 1;
const SEED_TAG_NOISE: u64 = 2;
const SEED_TAG_SPLIT: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Loaded once; every trial re-partitions the same samples.
    File(PathBuf),
    /// Regenerated per trial from the trial seed.
    Synthetic(SubspaceSpec),
    /// An in-memory data set, used as-is by every trial.
    Given(LabeledDataset),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseStage {
    /// Corrupt the whole set, then split (train and test both noisy).
    #[default]
    BeforeSplit,
    /// Split first, then corrupt the two parts independently.
    AfterSplit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Pce { lambda: f64, center: bool },
    Pca { dim: usize },
    LleNpe { neighbors: usize, dim: usize, reg: f64 },
    Raw,
}

impl Method {
    pub const NAMES: [&'static str; 4] = ["pce", "pca", "lle-npe", "raw"];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Pce { .. } => "pce",
            Method::Pca { .. } => "pca",
            Method::LleNpe { .. } => "lle-npe",
            Method::Raw => "raw",
        }
    }
}

impl Default for Method {
    fn default() -> Self {
        Method::Pce {
            lambda: DEFAULT_LAMBDA,
            center: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Classifier {
    #[default]
    Nn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub noise: Option<NoiseSpec>,
    pub noise_stage: NoiseStage,
    pub method: Method,
    pub classifier: Classifier,
    pub trials: usize,
    pub train_fraction: f64,
    pub base_seed: u64,
    /// Where the CLI writes the report.
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(source: DataSource, method: Method) -> Self {
        Self {
            source,
            noise: None,
            noise_stage: NoiseStage::default(),
            method,
            classifier: Classifier::default(),
            trials: 10,
            train_fraction: 0.5,
            base_seed: 0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(PceError::InvalidArgument("trials must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(PceError::InvalidArgument(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        if let DataSource::Synthetic(spec) = &self.source {
            spec.validate()?;
        }
        match self.method {
            Method::Pce { lambda, .. } if !(lambda.is_finite() && lambda > 0.0) => Err(PceError::InvalidLambda(lambda)),
            Method::Pca { dim: 0 } | Method::LleNpe { dim: 0, .. } => Err(PceError::BadDim { dim: 0, max: 0 }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub accuracy: f64,
    /// Feature dimension used (estimated for PCE, configured otherwise).
    pub k: Option<usize>,
    pub fit_s: f64,
    pub transform_s: f64,
    pub classify_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub method: &'static str,
    pub trials: Vec<TrialResult>,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for one trial.
    pub std: f64,
}

impl Report {
    pub fn from_trials(method: &'static str, trials: Vec<TrialResult>) -> Self {
        let accs: Vec<f64> = trials.iter().map(|t| t.accuracy).collect();
        let (mean, std) = mean_std(&accs);
        Self {
            method,
            trials,
            mean,
            std,
        }
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.accuracy).collect()
    }

    /// Most frequent `k`, smallest on ties.
    pub fn k_mode(&self) -> Option<usize> {
        let mut ks: Vec<usize> = self.trials.iter().filter_map(|t| t.k).collect();
        ks.sort_unstable();
        let mut best: Option<(usize, usize)> = None;
        for chunk in ks.chunk_by(|a, b| a == b) {
            if best.is_none_or(|(_, count)| chunk.len() > count) {
                best = Some((chunk[0], chunk.len()));
            }
        }
        best.map(|(k, _)| k)
    }

    /// `trial,accuracy,k,fit_s,transform_s,classify_s`, one row per trial and a
    /// final `summary` row holding the means (and the modal `k`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,accuracy,k,fit_s,transform_s,classify_s\n");
        let k_str = |k: Option<usize>| k.map(|k| k.to_string()).unwrap_or_default();
        for t in &self.trials {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6}",
                t.trial,
                t.accuracy,
                k_str(t.k),
                t.fit_s,
                t.transform_s,
                t.classify_s
            );
        }
        let avg = |f: fn(&TrialResult) -> f64| self.trials.iter().map(f).sum::<f64>() / self.trials.len().max(1) as f64;
        let _ = writeln!(
            out,
            "summary,{},{},{:.6},{:.6},{:.6}",
            self.mean,
            k_str(self.k_mode()),
            avg(|t| t.fit_s),
            avg(|t| t.transform_s),
            avg(|t| t.classify_s)
        );
        out
    }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every trial; trial `t` uses seed `base_seed + t` for data generation,
/// corruption and partitioning (each through its own derived stream).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let loaded = match &cfg.source {
        DataSource::File(path) => Some(data::load_dataset(path).map_err(|e| PceError::InvalidArgument(e.to_string()))?),
        DataSource::Given(ds) => Some(ds.clone()),
        DataSource::Synthetic(_) => None,
    };
    let mut trials = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let seed = cfg.base_seed.wrapping_add(t as u64);
        let result = run_trial(cfg, loaded.as_ref(), t, seed).map_err(|e| PceError::TrialFailed {
            trial: t,
            source: Box::new(e),
        })?;
        trials.push(result);
    }
    Ok(Report::from_trials(cfg.method.name(), trials))
}

fn run_trial(cfg: &ExperimentConfig, loaded: Option<&LabeledDataset>, trial: usize, seed: u64) -> Result<TrialResult> {
    let ds = match (&cfg.source, loaded) {
        (DataSource::Synthetic(spec), _) => generate_union_of_subspaces(spec, derive(seed, SEED_TAG_DATA))?,
        (_, Some(ds)) => ds.clone(),
        (_, None) => unreachable!("file sources are loaded before the trials"),
    };
    let noise_seed = derive(seed, SEED_TAG_NOISE);
    let corrupt = |ds: &LabeledDataset, salt: u64| -> Result<LabeledDataset> {
        match &cfg.noise {
            Some(noise) => ds.with_matrix(noise.apply(&ds.matrix, derive(noise_seed, salt))?),
            None => Ok(ds.clone()),
        }
    };
    let split_seed = derive(seed, SEED_TAG_SPLIT);
    let (train, test) = match cfg.noise_stage {
        NoiseStage::BeforeSplit => data::split(&corrupt(&ds, 0)?, cfg.train_fraction, split_seed)?,
        NoiseStage::AfterSplit => {
            let (train, test) = data::split(&ds, cfg.train_fraction, split_seed)?;
            (corrupt(&train, 1)?, corrupt(&test, 2)?)
        }
    };
    if train.is_empty() {
        return Err(PceError::EmptyTrainingSet);
    }

    let started = Instant::now();
    let projector = Projector::fit(&cfg.method, &train.matrix)?;
    let fit_s = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let train_z = projector.apply(&train.matrix)?;
    let test_z = projector.apply(&test.matrix)?;
    let transform_s = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let predicted = match cfg.classifier {
        Classifier::Nn => nn_classify(&train_z, &train.labels, &test_z)?,
    };
    let classify_s = started.elapsed().as_secs_f64();

    Ok(TrialResult {
        trial,
        seed,
        accuracy: accuracy(&predicted, &test.labels)?,
        k: projector.dim(),
        fit_s,
        transform_s,
        classify_s,
    })
}

/// A fitted feature extractor of any supported method.
enum Projector {
    Pce(crate::pce::PceModel),
    Pca(crate::eval::PcaModel),
    Linear(nalgebra::DMatrix<f64>),
    Identity,
}

impl Projector {
    fn fit(method: &Method, train: &DataMatrix) -> Result<Self> {
        Ok(match *method {
            Method::Pce { lambda, center } => {
                let opts = FitOptions {
                    lambda,
                    center,
                    ridge: Ridge::Auto,
                };
                Projector::Pce(fit_with(train, &opts)?.model)
            }
            Method::Pca { dim } => Projector::Pca(pca_fit(train, dim)?),
            Method::LleNpe { neighbors, dim, reg } => {
                let graph = lle_graph(train, &LleConfig { neighbors, reg })?;
                Projector::Linear(embed(train, &graph, dim, Ridge::Auto)?.theta)
            }
            Method::Raw => Projector::Identity,
        })
    }

    fn apply(&self, y: &DataMatrix) -> Result<DataMatrix> {
        match self {
            Projector::Pce(model) => model.transform(y),
            Projector::Pca(model) => model.transform(y),
            Projector::Linear(theta) => DataMatrix::new(theta.transpose() * y.as_matrix()),
            Projector::Identity => Ok(y.clone()),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Projector::Pce(model) => Some(model.k),
            Projector::Pca(model) => Some(model.projection.ncols()),
            Projector::Linear(theta) => Some(theta.ncols()),
            Projector::Identity => None,
        }
    }
}
