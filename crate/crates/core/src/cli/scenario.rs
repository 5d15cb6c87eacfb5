//! Scenario files: TOML with fixed sections, validated on load.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dynamics::{FrequencyBranch, Observable};
use crate::error::Error;
use crate::limits::RegimeTolerances;
use crate::model::SystemParams;
use crate::operator::{Basis, SpinState};
use crate::spectral::{QuadratureSettings, SpectralDensity};

const DEFAULT_N_POINTS: usize = 401;
const DEFAULT_ORACLE_MODES: usize = 6;
const DEFAULT_ORACLE_FOCK: usize = 2;
const DEFAULT_ORACLE_LAMBDAS: [f64; 3] = [0.5, 0.3, 0.2];
const DEFAULT_ORACLE_T_MAX: f64 = 2.0;
const DEFAULT_ORACLE_N_POINTS: usize = 41;

/// Column order of the series output.
pub const OBSERVABLE_ORDER: [Observable; 3] = [Observable::PScalar, Observable::UTrace, Observable::CTrace];

/// The file as written, and (after [`Scenario::load`]) with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub system: SystemSection,
    pub bath: BathSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub regime: RegimeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default)]
    pub epsilon: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PowerLaw,
    Ohmic,
    Box,
    Table,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub family: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_hi: Option<f64>,
    /// Two-column text file, relative to the scenario file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff_upper: Option<f64>,
    pub rel_tol: Option<f64>,
    pub subtraction_window: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(NamedState),
    /// `[re ↑, im ↑, re ↓, im ↓]`, normalized on load.
    Custom([f64; 4]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    Up,
    Down,
    Plus,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    pub n_points: Option<usize>,
    pub initial_state: Option<InitialState>,
    pub observables: Option<Vec<Observable>>,
    pub branch: Option<FrequencyBranch>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingSection {
    /// Search interval for α; without it the amplitude is solved for directly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub modes: Option<usize>,
    pub omega_max: Option<f64>,
    pub fock_truncation: Option<usize>,
    pub lambda_list: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub n_points: Option<usize>,
    pub branch: Option<FrequencyBranch>,
}

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("", &["system", "bath", "quadrature", "run", "regime", "damping", "oracle"]),
    ("system", &["epsilon", "delta"]),
    ("bath", &["family", "alpha", "s", "omega_c", "omega_lo", "omega_hi", "path", "beta"]),
    ("quadrature", &["cutoff_upper", "rel_tol", "subtraction_window"]),
    ("run", &["t_max", "n_points", "initial_state", "observables", "branch"]),
    ("regime", &["gamma_tol", "omega_tol"]),
    ("damping", &["bracket"]),
    ("oracle", &["modes", "omega_max", "fock_truncation", "lambda_list", "t_max", "n_points", "branch"]),
];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub modes: usize,
    pub omega_max: f64,
    pub fock_truncation: usize,
    pub lambdas: Vec<f64>,
    pub t_max: f64,
    pub n_points: usize,
    pub branch: FrequencyBranch,
}

/// A validated scenario. `file` echoes the input with every default resolved
/// except `run.t_max`, which depends on γ.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub system: SystemParams,
    pub density: SpectralDensity,
    pub beta: Option<f64>,
    pub quadrature: QuadratureSettings,
    pub t_max: Option<f64>,
    pub n_points: usize,
    pub initial: SpinState,
    pub observables: Vec<Observable>,
    pub branch: FrequencyBranch,
    pub gamma_tol: Option<f64>,
    pub omega_tol: Option<f64>,
    pub damping_bracket: Option<(f64, f64)>,
    pub oracle: Option<OracleConfig>,
    base_dir: PathBuf,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn parse_error(path: &Path, text: &str, err: &toml::de::Error) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        line: err.span().map_or(0, |s| line_of(text, s.start)),
        message: err.message().trim().to_string(),
    }
}

fn check_unknown_keys(table: &toml::Table) -> Result<(), CliError> {
    let known = |section: &str| KNOWN_KEYS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
    for (key, value) in table {
        if !known("").contains(&key.as_str()) {
            return Err(CliError::validation(key.clone(), "unknown key"));
        }
        let Some(inner) = value.as_table() else {
            return Err(CliError::validation(key.clone(), "must be a section"));
        };
        for inner_key in inner.keys() {
            if !known(key).contains(&inner_key.as_str()) {
                return Err(CliError::validation(format!("{key}.{inner_key}"), "unknown key"));
            }
        }
    }
    Ok(())
}

/// Maps a core parameter error onto the scenario field it came from.
fn in_section(section: &str, err: Error) -> CliError {
    match err {
        Error::InvalidParameter { name, reason } => CliError::validation(format!("{section}.{name}"), reason),
        other => other.into(),
    }
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::validation(field, format!("must be finite and > 0, got {v}")))
    }
}

fn required(field: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::validation(field, "required for this family"))
}

impl BathSection {
    /// The density of this section with its amplitude replaced by `alpha`.
    pub fn density_with_alpha(&self, alpha: f64, base_dir: &Path) -> Result<SpectralDensity, CliError> {
        let family = self.family.ok_or_else(|| CliError::validation("bath.family", "required"))?;
        let built = match family {
            Family::PowerLaw => SpectralDensity::power_law(
                alpha,
                required("bath.s", self.s)?,
                required("bath.omega_c", self.omega_c)?,
            ),
            Family::Ohmic => SpectralDensity::ohmic(alpha, required("bath.omega_c", self.omega_c)?),
            Family::Box => SpectralDensity::boxcar(
                alpha,
                required("bath.omega_lo", self.omega_lo)?,
                required("bath.omega_hi", self.omega_hi)?,
            ),
            Family::Table => {
                let path = self.path.as_ref().ok_or_else(|| CliError::validation("bath.path", "required for a table"))?;
                let table = SpectralDensity::load_table(base_dir.join(path)).map_err(|e| in_section("bath", e))?;
                table.scaled(alpha)
            }
        };
        built.map_err(|e| in_section("bath", e))
    }

    fn alpha_or_default(&self) -> f64 {
        match self.family {
            Some(Family::Table) => self.alpha.unwrap_or(1.0),
            _ => self.alpha.unwrap_or(f64::NAN),
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, path, &base_dir)
    }

    /// Parses scenario text; `origin` only labels errors and `base_dir`
    /// anchors relative table paths.
    pub fn parse(text: &str, origin: &Path, base_dir: &Path) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e| parse_error(origin, text, &e))?;
        check_unknown_keys(&table)?;
        let file: ScenarioFile = toml::from_str(text).map_err(|e| parse_error(origin, text, &e))?;
        Self::from_file(file, base_dir)
    }

    pub fn from_file(mut file: ScenarioFile, base_dir: &Path) -> Result<Self, CliError> {
        if !file.system.epsilon.is_finite() {
            return Err(CliError::validation("epsilon", "must be finite"));
        }
        if !(file.system.delta.is_finite() && file.system.delta > 0.0) {
            return Err(CliError::validation("delta", format!("must be finite and > 0, got {}", file.system.delta)));
        }
        let system = SystemParams::new(file.system.epsilon, file.system.delta);

        if file.bath.family != Some(Family::Table) && file.bath.alpha.is_none() {
            return Err(CliError::validation("bath.alpha", "required"));
        }
        let density = file.bath.density_with_alpha(file.bath.alpha_or_default(), base_dir)?;
        if file.bath.family == Some(Family::Table) {
            file.bath.alpha = Some(file.bath.alpha_or_default());
        }
        let beta = file.bath.beta.map(|b| positive("bath.beta", b)).transpose()?;

        let q = &mut file.quadrature;
        let defaults = QuadratureSettings::default();
        let quadrature = QuadratureSettings {
            cutoff_upper: q.cutoff_upper,
            rel_tol: *q.rel_tol.get_or_insert(defaults.rel_tol),
            subtraction_window: *q.subtraction_window.get_or_insert(defaults.subtraction_window),
        };
        quadrature.validate().map_err(|e| in_section("quadrature", e))?;
        quadrature.cutoff_for(&density).map_err(|e| in_section("quadrature", e))?;

        let run = &mut file.run;
        let t_max = run.t_max.map(|t| positive("run.t_max", t)).transpose()?;
        let n_points = *run.n_points.get_or_insert(DEFAULT_N_POINTS);
        if n_points < 2 {
            return Err(CliError::validation("run.n_points", "need at least 2 points"));
        }
        let initial = match *run.initial_state.get_or_insert(InitialState::Named(NamedState::Up)) {
            InitialState::Named(NamedState::Up) => SpinState::spin_up(),
            InitialState::Named(NamedState::Down) => SpinState::spin_down(),
            InitialState::Named(NamedState::Plus) => SpinState::plus(),
            InitialState::Custom([a, b, c, d]) => {
                SpinState::normalized(Basis::SigmaZ, [Complex64::new(a, b), Complex64::new(c, d)])
                    .map_err(|e| in_section("run", e))?
            }
        };
        let requested = run.observables.get_or_insert_with(|| OBSERVABLE_ORDER.to_vec());
        if requested.is_empty() {
            return Err(CliError::validation("run.observables", "must not be empty"));
        }
        let observables: Vec<Observable> = OBSERVABLE_ORDER.into_iter().filter(|o| requested.contains(o)).collect();
        *requested = observables.clone();
        let branch = *run.branch.get_or_insert_with(FrequencyBranch::default);

        let gamma_tol = file.regime.gamma_tol.map(|v| positive("regime.gamma_tol", v)).transpose()?;
        let omega_tol = file.regime.omega_tol.map(|v| positive("regime.omega_tol", v)).transpose()?;

        let damping_bracket = match file.damping.as_ref().and_then(|d| d.bracket) {
            Some([lo, hi]) if lo > 0.0 && hi > lo && hi.is_finite() => Some((lo, hi)),
            Some(_) => return Err(CliError::validation("damping.bracket", "need 0 < lo < hi")),
            None => None,
        };

        let oracle = match file.oracle.as_mut() {
            Some(o) => Some(resolve_oracle(o, &density, &system)?),
            None => None,
        };

        Ok(Self {
            file,
            system,
            density,
            beta,
            quadrature,
            t_max,
            n_points,
            initial,
            observables,
            branch,
            gamma_tol,
            omega_tol,
            damping_bracket,
            oracle,
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    /// Oracle settings, falling back to the defaults when the scenario has
    /// no `[oracle]` section.
    pub fn oracle_or_default(&self) -> Result<OracleConfig, CliError> {
        match &self.oracle {
            Some(o) => Ok(o.clone()),
            None => resolve_oracle(&mut OracleSection::default(), &self.density, &self.system),
        }
    }

    pub fn regime_tolerances(&self, eig: &crate::model::Eigensystem) -> RegimeTolerances {
        let base = RegimeTolerances::scale_free(eig, &self.density);
        RegimeTolerances {
            gamma_tol: self.gamma_tol.unwrap_or(base.gamma_tol),
            omega_tol: self.omega_tol.unwrap_or(base.omega_tol),
        }
    }
}

fn resolve_oracle(
    o: &mut OracleSection,
    density: &SpectralDensity,
    system: &SystemParams,
) -> Result<OracleConfig, CliError> {
    let modes = *o.modes.get_or_insert(DEFAULT_ORACLE_MODES);
    if modes == 0 {
        return Err(CliError::validation("oracle.modes", "need at least one mode"));
    }
    let fock_truncation = *o.fock_truncation.get_or_insert(DEFAULT_ORACLE_FOCK);
    if fock_truncation == 0 {
        return Err(CliError::validation("oracle.fock_truncation", "must be >= 1"));
    }
    let omega_max = match o.omega_max {
        Some(w) => positive("oracle.omega_max", w)?,
        None => crate::oracle::default_omega_max(density, system)?,
    };
    o.omega_max = Some(omega_max);
    let lambdas = o.lambda_list.get_or_insert_with(|| DEFAULT_ORACLE_LAMBDAS.to_vec()).clone();
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0 && *l <= 1.0)) {
        return Err(CliError::validation("oracle.lambda_list", "values must lie in (0, 1]"));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::validation("oracle.lambda_list", "must be strictly decreasing"));
    }
    let t_max = positive("oracle.t_max", *o.t_max.get_or_insert(DEFAULT_ORACLE_T_MAX))?;
    let n_points = *o.n_points.get_or_insert(DEFAULT_ORACLE_N_POINTS);
    if n_points < 2 {
        return Err(CliError::validation("oracle.n_points", "need at least 2 points"));
    }
    let branch = *o.branch.get_or_insert(FrequencyBranch::Correlator);
    Ok(OracleConfig { modes, omega_max, fock_truncation, lambdas, t_max, n_points, branch })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario, CliError> {
        Scenario::parse(text, Path::new("test.toml"), Path::new("."))
    }

    const MINIMAL: &str = "[system]\nepsilon = 0.0\ndelta = 1.0\n[bath]\nfamily = \"ohmic\"\nalpha = 0.1\nomega_c = 10.0\n";

    #[test]
    fn minimal_scenario_gets_defaults() {
        let s = parse(MINIMAL).unwrap();
        assert_eq!(s.beta, None);
        assert_eq!(s.t_max, None);
        assert_eq!(s.n_points, DEFAULT_N_POINTS);
        assert_eq!(s.initial, SpinState::spin_up());
        assert_eq!(s.observables, OBSERVABLE_ORDER.to_vec());
        assert_eq!(s.file.quadrature.rel_tol, Some(1e-10));
    }

    #[test]
    fn negative_delta_names_the_field() {
        let err = parse(&MINIMAL.replace("delta = 1.0", "delta = -1.0")).unwrap_err();
        assert!(matches!(err, CliError::Validation { ref field, .. } if field == "delta"), "{err}");
    }

    #[test]
    fn unknown_key_names_the_key() {
        let err = parse(&format!("{MINIMAL}gama = 1.0\n")).unwrap_err();
        assert!(matches!(err, CliError::Validation { ref field, .. } if field == "bath.gama"), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse("[system]\ndelta = 1.0\n[bath\n").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn type_error_reports_line() {
        let err = parse(&MINIMAL.replace("alpha = 0.1", "alpha = \"x\"")).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 6, .. }), "{err}");
    }

    #[test]
    fn custom_state_is_normalized_and_observables_ordered() {
        let s = parse(&format!(
            "{MINIMAL}[run]\ninitial_state = [1.0, 0.0, 1.0, 0.0]\nobservables = [\"c_trace\", \"p_scalar\"]\n"
        ))
        .unwrap();
        assert!((s.initial.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.observables, vec![Observable::PScalar, Observable::CTrace]);
    }

    #[test]
    fn oracle_defaults_resolve() {
        let s = parse(&format!("{MINIMAL}[oracle]\n")).unwrap();
        let o = s.oracle.unwrap();
        assert_eq!((o.modes, o.fock_truncation, o.omega_max), (6, 2, 50.0));
        assert_eq!(o.lambdas, vec![0.5, 0.3, 0.2]);
        assert_eq!(o.branch, FrequencyBranch::Correlator);
    }

    #[test]
    fn increasing_lambda_list_is_rejected() {
        let err = parse(&format!("{MINIMAL}[oracle]\nlambda_list = [0.2, 0.5]\n")).unwrap_err();
        assert!(matches!(err, CliError::Validation { ref field, .. } if field == "oracle.lambda_list"));
    }
}
