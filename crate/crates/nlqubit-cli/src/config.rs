//! Experiment configuration: JSON schema and validation.
//!
//! One experiment per file. The `experiment` tag selects the kind; the
//! remaining fields are kind-specific. `seed`, `threads`, and `out_dir`
//! are common to all kinds.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use nlqubit::discrimination::Scheme;

/// Top-level config: common knobs plus the tagged experiment kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub kind: ExperimentKind,
    /// RNG seed; overridable from the command line.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads for sweeps; defaults to the machine's cores.
    /// The NLQUBIT_THREADS environment variable overrides this field.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Output directory; overridable from the command line.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentKind {
    Flow(FlowConfig),
    Discriminate(DiscriminateConfig),
    MeanfieldError(MeanfieldErrorConfig),
    Correlators(CorrelatorsConfig),
    OrthScaling(OrthScalingConfig),
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Flow(_) => "flow",
            ExperimentKind::Discriminate(_) => "discriminate",
            ExperimentKind::MeanfieldError(_) => "meanfield-error",
            ExperimentKind::Correlators(_) => "correlators",
            ExperimentKind::OrthScaling(_) => "orth-scaling",
        }
    }
}

/// Scheme names as they appear in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeCfg {
    Simple,
    ChildsYoung,
}

impl SchemeCfg {
    pub fn to_scheme(self) -> Scheme {
        match self {
            SchemeCfg::Simple => Scheme::Simple,
            SchemeCfg::ChildsYoung => Scheme::ChildsYoung,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SchemeCfg::Simple => "simple",
            SchemeCfg::ChildsYoung => "childs-young",
        }
    }
}

/// Bloch-sphere flow field over a latitude/longitude grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowConfig {
    pub n_polar: usize,
    pub n_azimuth: usize,
    pub v01: f64,
    pub bz: f64,
    pub g: f64,
    /// Torsion flow when true; fixed sigma_z coefficient otherwise.
    pub nonlinear: bool,
}

/// Seeded end-to-end discrimination trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscriminateConfig {
    pub scheme: SchemeCfg,
    pub theta_ab: f64,
    pub g: f64,
    pub shots: u64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub orth_eps: Option<f64>,
}

/// Mean-field model-error sweep over particle numbers and times.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanfieldErrorConfig {
    pub n_list: Vec<usize>,
    pub t_list: Vec<f64>,
    pub omega0: f64,
    pub omega: f64,
    pub k: f64,
    pub k_prime: f64,
    pub v00: f64,
    pub v11: f64,
    pub v01: f64,
    /// Initial Bloch vector; defaults to the +x equator point.
    #[serde(default)]
    pub q0_bloch: Option<[f64; 3]>,
    #[serde(default)]
    pub dt: Option<f64>,
}

/// Correlator-formula residuals over random encoded states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelatorsConfig {
    pub n_list: Vec<usize>,
    pub samples: usize,
}

/// Orthogonalization-time scaling across Bloch angles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthScalingConfig {
    pub schemes: Vec<SchemeCfg>,
    pub theta_list: Vec<f64>,
    pub g: f64,
    #[serde(default)]
    pub orth_eps: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
}

fn check_finite(out: &mut Vec<String>, name: &str, value: f64) {
    if !value.is_finite() {
        out.push(format!("`{name}` must be finite, got {value}"));
    }
}

fn check_positive(out: &mut Vec<String>, name: &str, value: f64) {
    if !value.is_finite() || value <= 0.0 {
        out.push(format!("`{name}` must be positive and finite, got {value}"));
    }
}

fn check_opt_positive(out: &mut Vec<String>, name: &str, value: Option<f64>) {
    if let Some(v) = value {
        check_positive(out, name, v);
    }
}

fn check_theta(out: &mut Vec<String>, name: &str, value: f64) {
    if !value.is_finite() || !(0.0..=std::f64::consts::PI).contains(&value) {
        out.push(format!("`{name}` must lie in [0, pi], got {value}"));
    }
}

/// Lists every violation in the config; empty means valid.
pub fn validate(config: &ExperimentConfig) -> Vec<String> {
    let mut out = Vec::new();
    match &config.kind {
        ExperimentKind::Flow(c) => {
            if c.n_polar == 0 {
                out.push("`n_polar` must be at least 1".into());
            }
            if c.n_azimuth == 0 {
                out.push("`n_azimuth` must be at least 1".into());
            }
            check_finite(&mut out, "v01", c.v01);
            check_finite(&mut out, "bz", c.bz);
            check_finite(&mut out, "g", c.g);
        }
        ExperimentKind::Discriminate(c) => {
            check_theta(&mut out, "theta_ab", c.theta_ab);
            check_finite(&mut out, "g", c.g);
            if c.shots == 0 {
                out.push("`shots` must be at least 1".into());
            }
            check_opt_positive(&mut out, "dt", c.dt);
            check_opt_positive(&mut out, "t_max", c.t_max);
            if let Some(eps) = c.orth_eps {
                if !(eps > 0.0 && eps < 1.0) {
                    out.push(format!("`orth_eps` must lie in (0, 1), got {eps}"));
                }
            }
        }
        ExperimentKind::MeanfieldError(c) => {
            if c.n_list.is_empty() {
                out.push("`n_list` must not be empty".into());
            }
            if c.n_list.contains(&0) {
                out.push("`n_list` entries must be at least 1".into());
            }
            if c.t_list.is_empty() {
                out.push("`t_list` must not be empty".into());
            }
            for &t in &c.t_list {
                if !t.is_finite() || t < 0.0 {
                    out.push(format!("`t_list` entries must be non-negative, got {t}"));
                }
            }
            check_positive(&mut out, "omega0", c.omega0);
            check_finite(&mut out, "omega", c.omega);
            check_finite(&mut out, "k", c.k);
            check_finite(&mut out, "k_prime", c.k_prime);
            check_finite(&mut out, "v00", c.v00);
            check_finite(&mut out, "v11", c.v11);
            check_finite(&mut out, "v01", c.v01);
            check_opt_positive(&mut out, "dt", c.dt);
            if let Some(r) = c.q0_bloch {
                let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                if !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
                    out.push(format!(
                        "`q0_bloch` must be a unit vector, got norm {norm}"
                    ));
                }
            }
        }
        ExperimentKind::Correlators(c) => {
            if c.n_list.is_empty() {
                out.push("`n_list` must not be empty".into());
            }
            if c.n_list.contains(&0) {
                out.push("`n_list` entries must be at least 1".into());
            }
            if c.samples == 0 {
                out.push("`samples` must be at least 1".into());
            }
        }
        ExperimentKind::OrthScaling(c) => {
            if c.schemes.is_empty() {
                out.push("`schemes` must not be empty".into());
            }
            if c.theta_list.is_empty() {
                out.push("`theta_list` must not be empty".into());
            }
            for &t in &c.theta_list {
                check_theta(&mut out, "theta_list", t);
            }
            check_finite(&mut out, "g", c.g);
            check_opt_positive(&mut out, "dt", c.dt);
            check_opt_positive(&mut out, "t_max", c.t_max);
            if let Some(eps) = c.orth_eps {
                if !(eps > 0.0 && eps < 1.0) {
                    out.push(format!("`orth_eps` must lie in (0, 1), got {eps}"));
                }
            }
        }
    }
    out
}

/// Parses a config file, reporting serde problems as a single violation.
pub fn load(path: &std::path::Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}
