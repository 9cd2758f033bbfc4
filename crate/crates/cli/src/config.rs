//! Scenario files: one JSON object per scenario, or the bundled catalog (a
//! JSON array of scenarios). Unknown keys are rejected. Errors carry the file
//! and line they refer to.

use std::fmt;
use std::path::{Path, PathBuf};

use lcslab::perron::DriftScheme;
use lcslab::pipeline::PipelineConfig;
use serde::{Deserialize, Serialize};

pub const CATALOG_TEXT: &str = include_str!("../scenarios.json");
pub const CATALOG_PATH: &str = "catalog:scenarios.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    PerronEig,
    LcsFind,
    InoueVerify,
    HopfFamily,
    Cohomology,
    Identities,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::PerronEig => "perron-eig",
            Command::LcsFind => "lcs-find",
            Command::InoueVerify => "inoue-verify",
            Command::HopfFamily => "hopf-family",
            Command::Cohomology => "cohomology",
            Command::Identities => "identities",
        }
    }

    fn backend(&self) -> Option<Backend> {
        match self {
            Command::InoueVerify | Command::Cohomology => Some(Backend::Lie),
            Command::PerronEig | Command::LcsFind | Command::Identities => Some(Backend::Mesh),
            Command::HopfFamily => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Lie,
    Mesh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
}

/// Seeded smooth random field: a mean-free Fourier sum bounded by `amplitude`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub amplitude: f64,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_max_k")]
    pub max_k: i32,
    /// Added to the scenario seed.
    #[serde(default)]
    pub seed_offset: u64,
}

fn default_modes() -> usize {
    3
}

fn default_max_k() -> i32 {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Zero,
    Constant(f64),
    Random(RandomSpec),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum FormSpec {
    #[default]
    Zero,
    Constant(Vec<f64>),
    Random(RandomSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerronParams {
    /// Conformal factor `φ` of `g = e^{2φ}·flat`.
    #[serde(default)]
    pub phi: FieldSpec,
    #[serde(default)]
    pub drift: FormSpec,
    #[serde(default)]
    pub potential: FieldSpec,
    #[serde(default)]
    pub scheme: DriftScheme,
    /// Random positive fields used for the variational sandwich.
    #[serde(default = "default_sandwich")]
    pub sandwich_samples: usize,
    #[serde(default = "yes")]
    pub dense: bool,
}

fn default_sandwich() -> usize {
    100
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSpec {
    /// Flat metric, constant Lee form.
    Constant { theta: Vec<f64> },
    /// Random conformal factor and co-exact part, harmonic part `c0·dx₁`.
    Perturbed {
        c0: f64,
        phi_amplitude: f64,
        gamma_amplitude: f64,
    },
    /// Exact Lee form (`θ_h = 0`).
    Exact { phi_amplitude: f64, gamma_amplitude: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcsParams {
    pub data: DataSpec,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    /// Extra `t` values where `λ(t)` is tabulated (and compared with the
    /// closed form for constant data).
    #[serde(default)]
    pub curve: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InoueParams {
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default = "default_control")]
    pub control: String,
    #[serde(default = "default_ks")]
    pub ks: Vec<f64>,
}

fn default_model() -> String {
    "sol41".into()
}

fn default_control() -> String {
    "abelian4".into()
}

fn default_ks() -> Vec<f64> {
    lcslab::surfaces::K_SCAN.to_vec()
}

impl Default for InoueParams {
    fn default() -> Self {
        Self {
            model: default_model(),
            control: default_control(),
            ks: default_ks(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfParams {
    /// `[re, im]`.
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    #[serde(default)]
    pub lambda: [f64; 2],
    #[serde(default = "one_u32")]
    pub m: u32,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Step of the finite-difference oracle for `dF_t`.
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_ts")]
    pub ts: Vec<f64>,
    #[serde(default = "default_positivity_ts")]
    pub positivity_ts: Vec<f64>,
    /// Parameters `s` of the pluricanonical deformation `F + (s/‖θ‖²)θ∧Jθ`.
    #[serde(default = "default_deformations")]
    pub deformations: Vec<f64>,
    /// Expected value of `‖θ_t‖²_{g_t}`.
    #[serde(default = "one_f64")]
    pub lee_norm: f64,
    #[serde(default = "default_cov_points")]
    pub covariant_points: usize,
    #[serde(default = "default_cov_step")]
    pub covariant_step: f64,
}

fn one_u32() -> u32 {
    1
}

fn one_f64() -> f64 {
    1.0
}

fn default_points() -> usize {
    50
}

fn default_step() -> f64 {
    2.5e-4
}

fn default_ts() -> Vec<f64> {
    vec![1.0, 1.5, 3.0]
}

fn default_positivity_ts() -> Vec<f64> {
    vec![1.0, 1.25, 1.5, 2.0, 3.0]
}

fn default_deformations() -> Vec<f64> {
    vec![0.5, 1.0]
}

fn default_cov_points() -> usize {
    10
}

fn default_cov_step() -> f64 {
    1e-2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohomologyParams {
    #[serde(default)]
    pub model: Option<String>,
    /// Model in the Lie text format; relative paths are resolved against the
    /// scenario file.
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    #[serde(default = "one_f64")]
    pub k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    LemmaLie,
    LemmaMesh,
    Ibp,
    Degree,
    Derivative,
    SignObstruction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityParams {
    pub suite: Vec<Identity>,
    /// Coarse size of the `T⁴` refinement study (refined to `2N`).
    #[serde(default = "default_mesh_n")]
    pub mesh_n: usize,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_phi_amp")]
    pub phi_amplitude: f64,
    #[serde(default = "default_gamma_amp")]
    pub gamma_amplitude: f64,
    /// Coefficient of the constant twist used for the sign obstruction.
    #[serde(default = "default_twist")]
    pub twist: f64,
}

fn default_mesh_n() -> usize {
    16
}

fn default_c0() -> f64 {
    2.0
}

fn default_phi_amp() -> f64 {
    0.2
}

fn default_gamma_amp() -> f64 {
    0.3
}

fn default_twist() -> f64 {
    0.7
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub command: Command,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Eigen-solver tolerance.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub perron: Option<PerronParams>,
    #[serde(default)]
    pub lcs: Option<LcsParams>,
    #[serde(default)]
    pub inoue: Option<InoueParams>,
    #[serde(default)]
    pub hopf: Option<HopfParams>,
    #[serde(default)]
    pub cohomology: Option<CohomologyParams>,
    #[serde(default)]
    pub identities: Option<IdentityParams>,
    /// Directory of the scenario file, for relative paths.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// A configuration problem, anchored at a line of its source.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub source_name: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.source_name, self.line, self.message)
    }
}

/// Source text of a scenario, used to anchor messages.
#[derive(Clone, Debug)]
pub struct Source {
    pub name: String,
    pub text: String,
    /// First line of the scenario inside the text (catalog entries).
    pub start_line: usize,
}

impl Source {
    /// Line of the first `"key"` at or after the scenario start, else the
    /// start line.
    pub fn line_of(&self, key: &str) -> usize {
        let needle = format!("\"{key}\"");
        self.text
            .lines()
            .enumerate()
            .skip(self.start_line.saturating_sub(1))
            .find(|(_, l)| l.contains(&needle))
            .map_or(self.start_line, |(i, _)| i + 1)
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            source_name: self.name.clone(),
            line: self.line_of(key),
            message: message.into(),
        }
    }
}

fn json_error(name: &str, e: &serde_json::Error) -> ConfigError {
    ConfigError {
        source_name: name.to_string(),
        line: e.line().max(1),
        message: format!("{e}"),
    }
}

pub fn catalog() -> Vec<Scenario> {
    serde_json::from_str(CATALOG_TEXT).expect("bundled catalog parses")
}

pub fn catalog_names() -> Vec<String> {
    catalog().into_iter().map(|s| s.name).collect()
}

/// Looks up a catalog scenario by name.
pub fn from_catalog(name: &str) -> Result<(Scenario, Source), ConfigError> {
    let all = catalog();
    let idx = all.iter().position(|s| s.name == name).ok_or_else(|| ConfigError {
        source_name: "--scenario".into(),
        line: 1,
        message: format!("unknown scenario {name:?}; available: {}", catalog_names().join(", ")),
    })?;
    let needle = format!("\"name\": \"{name}\"");
    let start_line = CATALOG_TEXT
        .lines()
        .position(|l| l.contains(&needle))
        .map_or(1, |i| i + 1);
    Ok((
        all[idx].clone(),
        Source {
            name: CATALOG_PATH.into(),
            text: CATALOG_TEXT.into(),
            start_line,
        },
    ))
}

/// First catalog scenario for a command.
pub fn default_for(command: Command) -> Result<(Scenario, Source), ConfigError> {
    let name = catalog()
        .into_iter()
        .find(|s| s.command == command)
        .map(|s| s.name)
        .expect("catalog covers every command");
    from_catalog(&name)
}

pub fn parse_str(text: &str, name: &str) -> Result<(Scenario, Source), ConfigError> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| json_error(name, &e))?;
    Ok((
        scenario,
        Source {
            name: name.into(),
            text: text.into(),
            start_line: 1,
        },
    ))
}

pub fn load_file(path: &Path) -> Result<(Scenario, Source), ConfigError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        source_name: name.clone(),
        line: 0,
        message: format!("cannot read config: {e}"),
    })?;
    let (mut s, src) = parse_str(&text, &name)?;
    s.base_dir = path.parent().map(Path::to_path_buf);
    Ok((s, src))
}

/// Command-line overrides.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
}

impl Scenario {
    pub fn apply(&mut self, o: &Overrides, src: &Source) -> Result<(), ConfigError> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(n) = o.grid_n {
            match &mut self.grid {
                Some(g) => g.n = n,
                None => return Err(src.error("command", "--grid-n given but the scenario has no grid")),
            }
        }
        if let Some(t) = o.tol {
            self.tol = Some(t);
        }
        Ok(())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// Checks module preconditions before dispatch.
    pub fn validate(&self, expected: Command, src: &Source) -> Result<(), ConfigError> {
        if self.command != expected {
            return Err(src.error(
                "command",
                format!("scenario is for `{}`, not `{}`", self.command.as_str(), expected.as_str()),
            ));
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(src.error("name", "name must be non-empty and use only [A-Za-z0-9-_.]"));
        }
        if let (Some(b), want) = (self.backend, self.command.backend()) {
            if Some(b) != want {
                return Err(src.error("backend", format!("backend {b:?} does not serve `{}`", self.command.as_str())));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(src.error("tol", format!("tol must lie in (0, 1), got {t}")));
            }
        }
        let needs_grid = matches!(self.command, Command::PerronEig | Command::LcsFind | Command::Identities);
        if needs_grid {
            let g = self.grid.ok_or_else(|| src.error("command", "mesh scenarios need a \"grid\""))?;
            if !(1..=4).contains(&g.dim) {
                return Err(src.error("dim", format!("grid dimension must be 1..=4, got {}", g.dim)));
            }
            if g.n < 4 || g.n > 4096 {
                return Err(src.error("n", format!("grid size must be in 4..=4096, got {}", g.n)));
            }
        }
        let missing = |key: &str| src.error("command", format!("missing \"{key}\" section"));
        match self.command {
            Command::PerronEig => {
                let p = self.perron.as_ref().ok_or_else(|| missing("perron"))?;
                let dim = self.grid.expect("checked").dim;
                check_field(&p.phi, "phi", src)?;
                check_field(&p.potential, "potential", src)?;
                match &p.drift {
                    FormSpec::Constant(v) if v.len() != dim => {
                        return Err(src.error("drift", format!("drift needs {dim} components, got {}", v.len())))
                    }
                    FormSpec::Constant(v) if v.iter().any(|x| !x.is_finite()) => {
                        return Err(src.error("drift", "drift components must be finite"))
                    }
                    FormSpec::Random(r) => check_random(r, "drift", src)?,
                    _ => {}
                }
            }
            Command::LcsFind => {
                let p = self.lcs.as_ref().ok_or_else(|| missing("lcs"))?;
                let dim = self.grid.expect("checked").dim;
                match &p.data {
                    DataSpec::Constant { theta } if theta.len() != dim => {
                        return Err(src.error("theta", format!("theta needs {dim} components, got {}", theta.len())))
                    }
                    DataSpec::Perturbed { phi_amplitude, gamma_amplitude, .. }
                    | DataSpec::Exact { phi_amplitude, gamma_amplitude }
                        if !(*phi_amplitude >= 0.0 && *gamma_amplitude >= 0.0) =>
                    {
                        return Err(src.error("data", "amplitudes must be non-negative"))
                    }
                    _ => {}
                }
                let c = &p.pipeline;
                if !(c.t_max > 0.0) {
                    return Err(src.error("t_max", "t_max must be positive"));
                }
                if c.samples < 2 {
                    return Err(src.error("samples", "need at least 2 samples"));
                }
                if p.curve.iter().any(|t| !t.is_finite()) {
                    return Err(src.error("curve", "curve points must be finite"));
                }
            }
            Command::InoueVerify => {
                let p = self.inoue.clone().unwrap_or_default();
                for (key, name) in [("model", &p.model), ("control", &p.control)] {
                    if lcslab::lie::catalog(name).is_none() {
                        return Err(src.error(key, format!("unknown Lie model {name:?}")));
                    }
                }
                if p.ks.is_empty() || p.ks.iter().any(|k| !k.is_finite()) {
                    return Err(src.error("ks", "ks must be a non-empty list of finite numbers"));
                }
            }
            Command::HopfFamily => {
                let p = self.hopf.as_ref().ok_or_else(|| missing("hopf"))?;
                let c = |v: [f64; 2]| lcslab::surfaces::Complex64::new(v[0], v[1]);
                lcslab::surfaces::HopfModel::new(c(p.alpha), c(p.beta), c(p.lambda), p.m)
                    .map_err(|e| src.error("alpha", e.to_string()))?;
                if p.points == 0 || p.covariant_points == 0 {
                    return Err(src.error("points", "need at least one sample point"));
                }
                if !(p.step > 0.0 && p.step < 0.05) || !(p.covariant_step > 0.0 && p.covariant_step < 0.05) {
                    return Err(src.error("step", "steps must lie in (0, 0.05)"));
                }
                if p.ts.iter().chain(&p.positivity_ts).any(|t| !(*t > 0.0)) {
                    return Err(src.error("ts", "potential family needs t > 0"));
                }
                if p.deformations.iter().any(|s| !(*s > -1.0)) {
                    return Err(src.error("deformations", "deformation parameters must exceed -1"));
                }
            }
            Command::Cohomology => {
                let p = self.cohomology.as_ref().ok_or_else(|| missing("cohomology"))?;
                match (&p.model, &p.model_file) {
                    (Some(m), None) if lcslab::lie::catalog(m).is_none() => {
                        return Err(src.error("model", format!("unknown Lie model {m:?}")))
                    }
                    (Some(_), Some(_)) | (None, None) => {
                        return Err(src.error("cohomology", "give exactly one of \"model\" and \"model_file\""))
                    }
                    _ => {}
                }
                if !p.k.is_finite() {
                    return Err(src.error("k", "k must be finite"));
                }
            }
            Command::Identities => {
                let p = self.identities.as_ref().ok_or_else(|| missing("identities"))?;
                if p.suite.is_empty() {
                    return Err(src.error("suite", "suite is empty"));
                }
                if p.suite.contains(&Identity::LemmaMesh) && !(4..=64).contains(&p.mesh_n) {
                    return Err(src.error("mesh_n", "mesh_n must be in 4..=64"));
                }
            }
        }
        Ok(())
    }
}

fn check_random(r: &RandomSpec, key: &str, src: &Source) -> Result<(), ConfigError> {
    if !(r.amplitude >= 0.0 && r.amplitude.is_finite()) || r.modes == 0 || r.max_k < 1 {
        return Err(src.error(key, "random fields need amplitude >= 0, modes >= 1, max_k >= 1"));
    }
    Ok(())
}

fn check_field(f: &FieldSpec, key: &str, src: &Source) -> Result<(), ConfigError> {
    match f {
        FieldSpec::Constant(c) if !c.is_finite() => Err(src.error(key, "constant must be finite")),
        FieldSpec::Random(r) => check_random(r, key, src),
        _ => Ok(()),
    }
}
