//! TOML experiment configuration.
//!
//! ```toml
//! [scheme]
//! modes = 32
//! nu = 0.2
//! kappa = 0.2
//! horizon = 1.0
//!
//! [noise.velocity]
//! covariance = { law = "power_law", alpha = 2.0, modes = 64 }
//! diffusion = { preset = "mode_projection", sigma = 0.5 }
//!
//! [noise.temperature]
//! diffusion = { preset = "additive", sigma = 0.5 }
//!
//! [initial]
//! kind = "gaussian"
//! velocity_scale = 1.0
//! temperature_scale = 1.0
//!
//! [campaign]
//! ladder = [16, 32, 64]
//! reference = 256
//! paths = 8
//! base_seed = 1
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::initial::InitialData;
use crate::noise::{CovarianceSpec, DeclaredConstants, DiffusionFamily, DiffusionSpec, EigenLaw, ModeBasis};
use crate::scheme::{Model, NoiseModel, SchemeConfig, DEFAULT_PICARD_MAX_ITER, DEFAULT_PICARD_TOL};
use crate::spectral::{FieldKind, TorusGrid};
use crate::{Error, Result};

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SchemeSection,
    pub velocity_noise: NoiseSection,
    pub temperature_noise: NoiseSection,
    pub initial: InitialData,
    pub campaign: CampaignSection,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    /// Grid points per dimension `K`.
    pub modes: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    /// Largest retained wavenumber index; defaults to the 2/3-rule value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    pub nu: f64,
    pub kappa: f64,
    pub horizon: f64,
    #[serde(default = "default_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_max_iter")]
    pub picard_max_iter: usize,
    #[serde(default)]
    pub linear: bool,
}

fn default_length() -> f64 {
    2.0 * std::f64::consts::PI
}

fn default_tol() -> f64 {
    DEFAULT_PICARD_TOL
}

fn default_max_iter() -> usize {
    DEFAULT_PICARD_MAX_ITER
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSection {
    pub covariance: CovarianceSpec,
    pub diffusion: DiffusionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    /// Coarse meshes `N`; each must divide `reference`.
    #[serde(default)]
    pub ladder: Vec<usize>,
    /// Finest mesh `N_ref`: the reference solution and the sampled paths
    /// live on it.
    pub reference: usize,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Localization threshold `M` (absent: every path localizes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Alternatively, choose `M` as the smallest value that localizes this
    /// fraction of the successful paths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub localize_fraction: Option<f64>,
    /// Exponent of the in-probability threshold `N^{-eta}`.
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Slack `gamma` in the rate constant.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Moment orders `q` of `E[sup ||.||^q]`.
    #[serde(default = "default_orders")]
    pub moment_orders: Vec<u32>,
    /// Increment lags in steps of the reference mesh (default: powers of
    /// two up to `reference / 16`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lags: Option<Vec<usize>>,
    /// Largest tolerated fraction of diverged paths.
    #[serde(default = "default_failure_tolerance")]
    pub failure_tolerance: f64,
    /// `simulate`: write a trajectory checkpoint every this many steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_every: Option<usize>,
}

fn default_paths() -> usize {
    1
}

fn default_eta() -> f64 {
    0.8
}

fn default_gamma() -> f64 {
    0.1
}

fn default_orders() -> Vec<u32> {
    vec![2, 4, 8]
}

fn default_failure_tolerance() -> f64 {
    0.05
}

// ---- document shapes ------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    scheme: SchemeSection,
    #[serde(default)]
    noise: NoiseDocument,
    initial: InitialData,
    campaign: CampaignSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<OutputDocument>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    velocity: Option<NoiseDocumentBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    temperature: Option<NoiseDocumentBlock>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseDocumentBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    covariance: Option<CovarianceDocument>,
    diffusion: DiffusionDocument,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CovarianceDocument {
    law: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modes: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffusionDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coefficient: Option<DiffusionFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constants: Option<DeclaredConstants>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputDocument {
    dir: PathBuf,
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl CovarianceDocument {
    fn resolve(self, at: &str) -> Result<CovarianceSpec> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| config_error(format!("{at}.covariance: law '{}' needs '{key}'", self.law)))
        };
        let unused = |present: bool, key: &str| {
            if present {
                Err(config_error(format!(
                    "{at}.covariance: '{key}' does not apply to law '{}'",
                    self.law
                )))
            } else {
                Ok(())
            }
        };
        let default_modes = CovarianceSpec::default().modes;
        let spec = match self.law.as_str() {
            "power_law" => {
                unused(self.gamma.is_some(), "gamma")?;
                unused(self.values.is_some(), "values")?;
                CovarianceSpec::power_law(need(self.alpha, "alpha")?, self.modes.unwrap_or(default_modes))
            }
            "exponential" => {
                unused(self.alpha.is_some(), "alpha")?;
                unused(self.values.is_some(), "values")?;
                CovarianceSpec::exponential(need(self.gamma, "gamma")?, self.modes.unwrap_or(default_modes))
            }
            "finite_list" => {
                unused(self.alpha.is_some(), "alpha")?;
                unused(self.gamma.is_some(), "gamma")?;
                let values = self
                    .values
                    .ok_or_else(|| config_error(format!("{at}.covariance: law 'finite_list' needs 'values'")))?;
                if let Some(m) = self.modes.filter(|&m| m != values.len()) {
                    return Err(config_error(format!(
                        "{at}.covariance: modes = {m} but {} values given",
                        values.len()
                    )));
                }
                CovarianceSpec::finite(values)
            }
            other => {
                return Err(config_error(format!(
                    "{at}.covariance.law: unknown law '{other}' (expected power_law, exponential or finite_list)"
                )))
            }
        };
        spec.map_err(|e| config_error(format!("{at}.covariance: {e}")))
    }

    fn from_spec(spec: &CovarianceSpec) -> Self {
        let mut doc = Self {
            law: String::new(),
            alpha: None,
            gamma: None,
            values: None,
            modes: Some(spec.modes),
        };
        match &spec.law {
            EigenLaw::PowerLaw { alpha } => {
                doc.law = "power_law".into();
                doc.alpha = Some(*alpha);
            }
            EigenLaw::Exponential { gamma } => {
                doc.law = "exponential".into();
                doc.gamma = Some(*gamma);
            }
            EigenLaw::FiniteList { values } => {
                doc.law = "finite_list".into();
                doc.values = Some(values.clone());
            }
        }
        doc
    }
}

impl DiffusionDocument {
    fn resolve(self, at: &str, basis: &ModeBasis) -> Result<DiffusionSpec> {
        let spec = match (self.preset, self.coefficient) {
            (Some(_), Some(_)) => {
                return Err(config_error(format!(
                    "{at}.diffusion: give either 'preset' or 'coefficient', not both"
                )))
            }
            (Some(name), None) => {
                let sigma = self
                    .sigma
                    .ok_or_else(|| config_error(format!("{at}.diffusion: preset '{name}' needs 'sigma'")))?;
                let mut spec = DiffusionSpec::preset(&name, sigma, basis)
                    .map_err(|e| config_error(format!("{at}.diffusion: {e}")))?;
                if let Some(c) = self.constants {
                    spec.constants = c;
                }
                spec
            }
            (None, Some(coefficient)) => {
                if self.sigma.is_some() {
                    return Err(config_error(format!(
                        "{at}.diffusion: 'sigma' belongs inside 'coefficient' when no preset is used"
                    )));
                }
                let constants = self.constants.ok_or_else(|| {
                    config_error(format!(
                        "{at}.diffusion.constants: missing declared constants (k0, k1, k2, k3, l1)"
                    ))
                })?;
                DiffusionSpec { coefficient, constants }
            }
            (None, None) => return Err(config_error(format!("{at}.diffusion: needs 'preset' or 'coefficient'"))),
        };
        spec.validate()
            .map_err(|e| config_error(format!("{at}.diffusion: {e}")))?;
        Ok(spec)
    }
}

impl NoiseDocumentBlock {
    fn resolve(self, at: &str, grid: TorusGrid, kind: FieldKind) -> Result<NoiseSection> {
        let covariance = match self.covariance {
            Some(c) => c.resolve(at)?,
            None => CovarianceSpec::default(),
        };
        let basis = ModeBasis::new(grid, kind, covariance.count()).map_err(|e| config_error(format!("{at}: {e}")))?;
        let diffusion = self.diffusion.resolve(at, &basis)?;
        Ok(NoiseSection { covariance, diffusion })
    }

    fn from_section(s: &NoiseSection) -> Self {
        Self {
            covariance: Some(CovarianceDocument::from_spec(&s.covariance)),
            diffusion: DiffusionDocument {
                preset: None,
                sigma: None,
                coefficient: Some(s.diffusion.coefficient.clone()),
                constants: Some(s.diffusion.constants),
            },
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a TOML document, filling defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Document = toml::from_str(text).map_err(config_error)?;
        let mut scheme = doc.scheme;
        let grid = TorusGrid::new(scheme.modes, scheme.length).map_err(|e| config_error(format!("scheme: {e}")))?;
        let grid = match scheme.cutoff {
            Some(c) => TorusGrid::with_cutoff(scheme.modes, scheme.length, c)
                .map_err(|e| config_error(format!("scheme.cutoff: {e}")))?,
            None => grid,
        };
        scheme.cutoff = Some(grid.cutoff());
        let missing = |which: &str| config_error(format!("noise.{which}: missing section"));
        let velocity_noise = doc.noise.velocity.ok_or_else(|| missing("velocity"))?.resolve(
            "noise.velocity",
            grid,
            FieldKind::Vector,
        )?;
        let temperature_noise = doc.noise.temperature.ok_or_else(|| missing("temperature"))?.resolve(
            "noise.temperature",
            grid,
            FieldKind::Scalar,
        )?;
        let cfg = Self {
            scheme,
            velocity_noise,
            temperature_noise,
            initial: doc.initial,
            campaign: doc.campaign,
            output: doc.output.map(|o| o.dir).unwrap_or_else(|| PathBuf::from("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Serializes to a document that [`parse`](Self::parse) maps back to `self`.
    pub fn to_toml(&self) -> Result<String> {
        let doc = Document {
            scheme: self.scheme.clone(),
            noise: NoiseDocument {
                velocity: Some(NoiseDocumentBlock::from_section(&self.velocity_noise)),
                temperature: Some(NoiseDocumentBlock::from_section(&self.temperature_noise)),
            },
            initial: self.initial.clone(),
            campaign: self.campaign.clone(),
            output: Some(OutputDocument {
                dir: self.output.clone(),
            }),
        };
        toml::to_string(&doc).map_err(config_error)
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.campaign;
        self.scheme_config(c.reference.max(1))
            .map_err(|e| config_error(format!("scheme: {e}")))?;
        if c.reference == 0 {
            return Err(config_error("campaign.reference must be positive"));
        }
        if c.paths == 0 {
            return Err(config_error("campaign.paths must be at least 1"));
        }
        for &n in &c.ladder {
            if n == 0 || !c.reference.is_multiple_of(n) {
                return Err(config_error(format!(
                    "campaign.ladder: N = {n} does not divide campaign.reference = {}",
                    c.reference
                )));
            }
        }
        if let Some(m) = c.threshold {
            if m.is_nan() || m <= 0.0 {
                return Err(config_error(format!("campaign.threshold must be positive, got {m}")));
            }
        }
        if let Some(f) = c.localize_fraction {
            if c.threshold.is_some() {
                return Err(config_error(
                    "campaign: give either 'threshold' or 'localize_fraction', not both",
                ));
            }
            if !(f > 0.0 && f <= 1.0) {
                return Err(config_error(format!(
                    "campaign.localize_fraction must lie in (0, 1], got {f}"
                )));
            }
        }
        if !(c.eta > 0.0 && c.eta < 1.0) {
            return Err(config_error(format!("campaign.eta must lie in (0, 1), got {}", c.eta)));
        }
        if c.gamma.is_nan() || c.gamma <= 0.0 {
            return Err(config_error(format!(
                "campaign.gamma must be positive, got {}",
                c.gamma
            )));
        }
        if c.moment_orders.contains(&0) {
            return Err(config_error("campaign.moment_orders must be positive"));
        }
        if let Some(lags) = &c.lags {
            if let Some(l) = lags.iter().find(|&&l| l == 0 || 4 * l > c.reference) {
                return Err(config_error(format!(
                    "campaign.lags: lag {l} outside [1, reference/4 = {}]",
                    c.reference / 4
                )));
            }
        }
        if !(0.0..=1.0).contains(&c.failure_tolerance) {
            return Err(config_error("campaign.failure_tolerance must lie in [0, 1]"));
        }
        if c.checkpoint_every == Some(0) {
            return Err(config_error("campaign.checkpoint_every must be positive"));
        }
        self.initial.validate(&self.grid().map_err(config_error)?)
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        let s = &self.scheme;
        match s.cutoff {
            Some(c) => TorusGrid::with_cutoff(s.modes, s.length, c),
            None => TorusGrid::new(s.modes, s.length),
        }
    }

    pub fn scheme_config(&self, steps: usize) -> Result<SchemeConfig> {
        let s = &self.scheme;
        let mut cfg = SchemeConfig::new(self.grid()?, s.nu, s.kappa, s.horizon, steps)?;
        cfg.picard_tol = s.picard_tol;
        cfg.picard_max_iter = s.picard_max_iter;
        cfg.linear = s.linear;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn model(&self, steps: usize) -> Result<Model> {
        let grid = self.grid()?;
        let noise = |s: &NoiseSection, kind| NoiseModel::new(grid, kind, s.covariance.clone(), s.diffusion.clone());
        Model::new(
            self.scheme_config(steps)?,
            noise(&self.velocity_noise, FieldKind::Vector)?,
            noise(&self.temperature_noise, FieldKind::Scalar)?,
        )
    }

    /// Increment lags in reference steps.
    pub fn lags(&self) -> Vec<usize> {
        self.campaign.lags.clone().unwrap_or_else(|| {
            let top = (self.campaign.reference / 16).max(1);
            (0..).map(|i| 1usize << i).take_while(|&l| l <= top).collect()
        })
    }
}
