use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::baselines::GradientConfig;
use crate::channel::NetworkDims;
use crate::error::{Error, Result};
use crate::filters::{PowerConstraint, RateWeights};
use crate::optimizer::OptimizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Wmmse,
    SimpleMmse,
    Gradient,
}

impl MethodKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Wmmse => "wmmse",
            Self::SimpleMmse => "simple_mmse",
            Self::Gradient => "gradient",
        }
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "wmmse" => Ok(Self::Wmmse),
            "simple_mmse" | "simple-mmse" => Ok(Self::SimpleMmse),
            "gradient" => Ok(Self::Gradient),
            other => Err(format!("unknown method {other:?} (expected wmmse, simple_mmse, gradient)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    Sum,
    PerNode,
}

impl ConstraintMode {
    pub fn label(self) -> &'static str {
        match self {
            Self::Sum => "sum",
            Self::PerNode => "pernode",
        }
    }

    /// `P_T = K` or `P_k = 1`, so that the SNR equals `σ_h²` in both modes.
    pub fn constraint(self, k: usize) -> PowerConstraint {
        match self {
            Self::Sum => PowerConstraint::SumPower(k as f64),
            Self::PerNode => PowerConstraint::PerNode(vec![1.0; k]),
        }
    }
}

impl FromStr for ConstraintMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "sum" => Ok(Self::Sum),
            "pernode" | "per-node" | "ind" => Ok(Self::PerNode),
            other => Err(format!("unknown constraint {other:?} (expected sum or pernode)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MuProfile {
    /// `μ_k = 1`.
    Equal,
    /// `μ_1 = 2`, `μ_k = 0.25` otherwise.
    FavorFirst,
    Explicit(Vec<f64>),
}

impl MuProfile {
    pub fn weights(&self, k: usize) -> Result<RateWeights> {
        match self {
            Self::Equal => Ok(RateWeights::equal(k)),
            Self::FavorFirst => RateWeights::favor_first(k, 2.0, 0.25),
            Self::Explicit(mu) if mu.len() != k => Err(Error::InvalidParameter(format!(
                "{} rate weights given for K = {k}",
                mu.len()
            ))),
            Self::Explicit(mu) => RateWeights::new(mu.clone()),
        }
    }
}

impl FromStr for MuProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "equal" => Ok(Self::Equal),
            "unequal" | "favor_first" => Ok(Self::FavorFirst),
            list => parse_list::<f64>(list).map(Self::Explicit),
        }
    }
}

impl fmt::Display for MuProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Equal => write!(f, "equal"),
            Self::FavorFirst => write!(f, "unequal"),
            Self::Explicit(mu) => write!(f, "{}", mu.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")),
        }
    }
}

/// Mismatch variance as a fraction of `σ_h²`, and the designer's
/// over-estimate as a fraction of the mismatch variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustSetting {
    pub sigma_delta_frac: f64,
    pub sigma_eps_frac: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub dims: NetworkDims,
    pub snr_points_db: Vec<f64>,
    pub mu: MuProfile,
    pub constraints: Vec<ConstraintMode>,
    pub methods: Vec<MethodKind>,
    pub robust: Option<RobustSetting>,
    pub trials: usize,
    pub master_seed: u64,
    pub optimizer: OptimizerConfig,
    pub gradient: GradientConfig,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            dims: NetworkDims { k: 4, m: 5, n: 5, d: 2 },
            snr_points_db: vec![0.0, 10.0, 20.0],
            mu: MuProfile::Equal,
            constraints: vec![ConstraintMode::Sum, ConstraintMode::PerNode],
            methods: vec![MethodKind::Wmmse],
            robust: None,
            trials: 100,
            master_seed: 1,
            optimizer: OptimizerConfig::default(),
            gradient: GradientConfig::default(),
            output: None,
        }
    }
}

pub(crate) fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected on/off, got {other:?}")),
    }
}

fn parse_scalar<T: FromStr>(s: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| format!("{s:?}: {e}"))
}

impl ExperimentSpec {
    /// Applies one `key = value` setting.
    ///
    /// | key | value |
    /// |---|---|
    /// | `K`, `M`, `N`, `d` | positive integers |
    /// | `snr_db` | comma-separated dB values |
    /// | `mu` | `equal`, `unequal` (2, 0.25, …) or a comma list of K weights |
    /// | `constraint` | comma list of `sum`, `pernode` |
    /// | `methods` | comma list of `wmmse`, `simple_mmse`, `gradient` |
    /// | `robust` | `on` / `off` |
    /// | `sigma_delta_frac`, `sigma_eps_frac` | nonnegative reals |
    /// | `trials`, `seed` | integers |
    /// | `epsilon`, `max_iters`, `restarts`, `bisection_tol` | optimizer settings |
    /// | `grad_outer_iters`, `grad_step_trials`, `grad_initial_step`, `grad_shrink`, `grad_epsilon` | gradient baseline |
    /// | `out` | output CSV path |
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let robust = |spec: &mut Self| {
            *spec.robust.get_or_insert(RobustSetting { sigma_delta_frac: 0.1, sigma_eps_frac: 0.0 })
        };
        match key.trim() {
            "K" | "k" => self.dims.k = parse_scalar(value)?,
            "M" | "m" => self.dims.m = parse_scalar(value)?,
            "N" | "n" => self.dims.n = parse_scalar(value)?,
            "d" => self.dims.d = parse_scalar(value)?,
            "snr_db" | "snr" => self.snr_points_db = parse_list(value)?,
            "mu" => self.mu = value.parse()?,
            "constraint" | "constraints" => self.constraints = parse_list(value)?,
            "methods" | "method" => self.methods = parse_list(value)?,
            "robust" => {
                if parse_bool(value)? {
                    robust(self);
                } else {
                    self.robust = None;
                }
            }
            "sigma_delta_frac" => {
                let mut r = robust(self);
                r.sigma_delta_frac = parse_scalar(value)?;
                self.robust = Some(r);
            }
            "sigma_eps_frac" => {
                let mut r = robust(self);
                r.sigma_eps_frac = parse_scalar(value)?;
                self.robust = Some(r);
            }
            "trials" => self.trials = parse_scalar(value)?,
            "seed" => self.master_seed = parse_scalar(value)?,
            "epsilon" => self.optimizer.epsilon = parse_scalar(value)?,
            "max_iters" => self.optimizer.max_iters = parse_scalar(value)?,
            "restarts" => self.optimizer.restarts = parse_scalar(value)?,
            "bisection_tol" => self.optimizer.bisection_tol = parse_scalar(value)?,
            "grad_outer_iters" => self.gradient.outer_iters = parse_scalar(value)?,
            "grad_step_trials" => self.gradient.max_step_trials = parse_scalar(value)?,
            "grad_initial_step" => self.gradient.initial_step = parse_scalar(value)?,
            "grad_shrink" => self.gradient.shrink = parse_scalar(value)?,
            "grad_epsilon" => self.gradient.epsilon = parse_scalar(value)?,
            "out" | "output" => self.output = Some(PathBuf::from(value.trim())),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults. `#` starts a
    /// comment; blank lines are ignored. `origin` labels error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut spec = Self::default();
        spec.apply_text(text, origin)?;
        Ok(spec)
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { origin: origin.to_string(), line: idx + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            self.set(key, value).map_err(err)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.snr_points_db.is_empty() {
            return Err(Error::InvalidParameter("snr_db list is empty".into()));
        }
        if self.snr_points_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("snr_db values must be finite".into()));
        }
        if self.methods.is_empty() || self.constraints.is_empty() {
            return Err(Error::InvalidParameter("at least one method and one constraint are required".into()));
        }
        self.mu.weights(self.dims.k)?;
        if let Some(r) = self.robust {
            if !(r.sigma_delta_frac >= 0.0 && r.sigma_eps_frac >= 0.0) {
                return Err(Error::InvalidParameter("mismatch fractions must be nonnegative".into()));
            }
        }
        self.optimizer.validate()?;
        self.gradient.validate()?;
        Ok(())
    }
}
