//! Run configuration: JSON file first, command-line flags on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use gwsr::shape_factor::EtaMaxMethod;
use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(deserialize_with = "one_or_many")]
    pub n: Vec<u64>,
    #[serde(deserialize_with = "one_or_many")]
    pub beta: Vec<f64>,
    pub omega_bar: f64,
    pub h_plus: f64,
    pub theta0: f64,
    pub phi0: f64,
    pub t_max: f64,
    /// Time at which the angular emission rate is evaluated.
    pub t: f64,
    pub samples: usize,
    pub phi_samples: usize,
    pub series_threshold: f64,
    pub quad_tol: f64,
    pub workers: Option<usize>,
    pub method: EtaMaxMethod,
    pub suite: String,
    pub tol: f64,
    pub lambda0: f64,
    pub gamma0: f64,
    pub dark_count_rate: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: vec![100],
            beta: vec![1.0],
            omega_bar: 1e-2,
            h_plus: 1e-21,
            theta0: 0.8 * std::f64::consts::PI,
            phi0: 0.0,
            t_max: gwsr::emission::DEFAULT_T_MAX,
            t: 0.5,
            samples: 512,
            phi_samples: gwsr::angular::DEFAULT_PHI_SAMPLES,
            series_threshold: gwsr::kernels::DEFAULT_SERIES_THRESHOLD,
            quad_tol: gwsr::angular::DEFAULT_QUAD_TOL,
            workers: None,
            method: EtaMaxMethod::Scan,
            suite: "all".into(),
            tol: 1e-8,
            lambda0: 791e-9,
            gamma0: 2.5e4,
            dark_count_rate: 1e-6,
        }
    }
}

fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

/// Flags shared by every model subcommand. Each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON run configuration; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Atom count; comma-separated for sweep and scaling.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    /// Spacing d / lambda0; comma-separated for sweep.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long)]
    pub omega_bar: Option<f64>,
    #[arg(long)]
    pub h_plus: Option<f64>,
    #[arg(long)]
    pub theta0: Option<f64>,
    #[arg(long)]
    pub phi0: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub phi_samples: Option<usize>,
    #[arg(long)]
    pub series_threshold: Option<f64>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, env = "GWSR_WORKERS")]
    pub workers: Option<usize>,
    /// eta-max method: scan, envelope or cumulative-max.
    #[arg(long)]
    pub method: Option<String>,
    /// Validation suite: kernels, quadrature, pair-sums, emission, angular or all.
    #[arg(long)]
    pub suite: Option<String>,
    /// Tolerance for the quadrature identities in validate.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub dark_count_rate: Option<f64>,
}

impl Flags {
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { cfg.$field = v.clone(); })*
            };
        }
        take!(
            n,
            beta,
            omega_bar,
            h_plus,
            theta0,
            phi0,
            t_max,
            t,
            samples,
            phi_samples,
            series_threshold,
            quad_tol,
            suite,
            tol
        );
        take!(lambda0, gamma0, dark_count_rate);
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        if let Some(m) = &self.method {
            cfg.method = m.parse()?;
        }
        cfg.check()?;
        Ok(cfg)
    }
}

fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

impl RunConfig {
    /// Every numeric control must be positive.
    pub fn check(&self) -> anyhow::Result<()> {
        let positive = [
            ("t_max", self.t_max),
            ("series_threshold", self.series_threshold),
            ("quad_tol", self.quad_tol),
            ("tol", self.tol),
            ("lambda0", self.lambda0),
            ("gamma0", self.gamma0),
            ("dark_count_rate", self.dark_count_rate),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            bail!("t must be nonnegative, got {}", self.t);
        }
        if self.samples == 0 || self.phi_samples == 0 {
            bail!("sample counts must be positive");
        }
        if self.workers == Some(0) {
            bail!("workers must be positive");
        }
        if self.n.is_empty() || self.beta.is_empty() {
            bail!("n and beta need at least one value each");
        }
        Ok(())
    }

    pub fn single_n(&self) -> anyhow::Result<u64> {
        match self.n.as_slice() {
            [n] => Ok(*n),
            _ => bail!("this subcommand takes a single n, got {:?}", self.n),
        }
    }

    pub fn single_beta(&self) -> anyhow::Result<f64> {
        match self.beta.as_slice() {
            [b] => Ok(*b),
            _ => bail!("this subcommand takes a single beta, got {:?}", self.beta),
        }
    }
}
