//! Builds the artifacts of each subcommand from a validated scenario.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::output::{fmt_f64, Artifact, Format, Table};
use super::scenario::{Scenario, ScenarioFile};
use super::CliError;
use crate::dynamics::{correlator_with, sample_series, uniform_grid, Observable};
use crate::limits::{
    classify_regime, coefficients_finite_temperature, coefficients_zero_temperature, solve_damping_condition,
    AmplitudeFamily, DampingSolution, LimitCoefficients, RegimeReport,
};
use crate::model::{eigensystem, Eigensystem};
use crate::oracle::{convergence_study, discretize_bath, ConvergenceStudy, OracleOptions};
use crate::spectral::SpectralDensity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub gamma_tol: f64,
    pub omega_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceEntry {
    pub quantity: String,
    pub omega: f64,
    pub value: f64,
    pub abs_error: f64,
}

/// Contents of `coefficients.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsReport {
    pub scenario: ScenarioFile,
    pub nu: f64,
    pub gap: f64,
    pub d_pp: f64,
    pub d_mm: f64,
    pub d_pm: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub phi: f64,
    pub beta: Option<f64>,
    pub resonant_density: f64,
    pub regime: String,
    pub effective_frequency: f64,
    pub tolerances: Tolerances,
    pub off_resonance: bool,
    /// `γ(β) / γ(zero temperature)`, when a temperature is given and the
    /// zero-temperature rate is nonzero.
    pub coth_ratio: Option<f64>,
    pub gamma_coth: Option<f64>,
    pub phi_extrapolated: bool,
    pub provenance: Vec<ProvenanceEntry>,
}

const REGIME_NAMES: [&str; 4] = ["PureDamping", "PureOscillation", "DampedOscillation", "Frozen"];

impl CoefficientsReport {
    /// Parses a `coefficients.json` and re-validates the embedded scenario.
    pub fn validate_json(text: &str) -> Result<Self, CliError> {
        let report: Self = serde_json::from_str(text)
            .map_err(|e| CliError::Parse { path: "coefficients.json".into(), line: e.line(), message: e.to_string() })?;
        if !REGIME_NAMES.contains(&report.regime.as_str()) {
            return Err(CliError::validation("regime", format!("unknown regime `{}`", report.regime)));
        }
        let finite = [report.nu, report.gap, report.gamma, report.sigma, report.phi, report.effective_frequency];
        if finite.iter().any(|x| !x.is_finite()) || report.gamma < 0.0 {
            return Err(CliError::validation("gamma", "coefficients must be finite with γ >= 0"));
        }
        Scenario::from_file(report.scenario.clone(), std::path::Path::new("."))?;
        Ok(report)
    }
}

/// Coefficients and regime shared by most subcommands.
pub struct Analysis {
    pub eig: Eigensystem,
    pub coefficients: LimitCoefficients,
    pub regime: RegimeReport,
    pub coth_ratio: Option<f64>,
    pub t_max: f64,
}

pub fn analyse(s: &Scenario) -> Result<Analysis, CliError> {
    let eig = eigensystem(&s.system)?;
    let coefficients = match s.beta {
        Some(beta) => coefficients_finite_temperature(&eig, &s.density, beta, &s.quadrature)?,
        None => coefficients_zero_temperature(&eig, &s.density, &s.quadrature)?,
    };
    let regime = classify_regime(&coefficients, &eig, s.regime_tolerances(&eig));
    let coth_ratio = s.beta.and_then(|_| {
        let zero_t = std::f64::consts::PI * s.density.evaluate(eig.gap()) / (eig.nu * eig.nu);
        (zero_t > 0.0).then(|| coefficients.gamma / zero_t)
    });
    let t_max = s.t_max.unwrap_or(if coefficients.gamma > 0.0 {
        20.0 / coefficients.gamma
    } else {
        20.0 / s.system.delta
    });
    Ok(Analysis { eig, coefficients, regime, coth_ratio, t_max })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn coefficients_report(s: &Scenario, a: &Analysis) -> CoefficientsReport {
    let c = &a.coefficients;
    let mut scenario = s.file.clone();
    scenario.run.t_max = Some(a.t_max);
    let provenance = c
        .provenance
        .evaluations
        .iter()
        .map(|e| ProvenanceEntry {
            quantity: serde_json::to_value(e.quantity).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            omega: e.omega,
            value: e.value,
            abs_error: e.abs_error,
        })
        .collect();
    CoefficientsReport {
        scenario,
        nu: a.eig.nu,
        gap: a.eig.gap(),
        d_pp: a.eig.d_pp,
        d_mm: a.eig.d_mm,
        d_pm: a.eig.d_pm,
        gamma: c.gamma,
        sigma: c.sigma,
        phi: c.phi,
        beta: c.beta,
        resonant_density: c.resonant_density,
        regime: a.regime.regime.as_str().to_string(),
        effective_frequency: a.regime.effective_frequency,
        tolerances: Tolerances { gamma_tol: a.regime.tolerances.gamma_tol, omega_tol: a.regime.tolerances.omega_tol },
        off_resonance: a.regime.off_resonance,
        coth_ratio: a.coth_ratio,
        gamma_coth: c.provenance.gamma_coth,
        phi_extrapolated: c.provenance.phi_extrapolated,
        provenance,
    }
}

pub fn series_table(s: &Scenario, a: &Analysis) -> Result<Table, CliError> {
    let grid = uniform_grid(a.t_max, s.n_points);
    let mut columns = vec!["t"];
    let mut series = Vec::new();
    for &obs in &s.observables {
        columns.extend(match obs {
            Observable::PScalar => &["re_p", "im_p", "abs_p"][..],
            Observable::UTrace => &["re_trU", "im_trU"][..],
            Observable::CTrace => &["re_trC"][..],
        });
        series.push(sample_series(obs, &a.coefficients, &a.eig, Some(&s.initial), &grid, s.branch)?);
    }
    let mut table = Table::new(columns);
    for (k, &t) in grid.iter().enumerate() {
        let mut row = vec![t];
        for ts in &series {
            let z = ts.values[k];
            match ts.observable {
                Observable::PScalar => row.extend([z.re, z.im, z.norm()]),
                Observable::UTrace => row.extend([z.re, z.im]),
                Observable::CTrace => row.push(z.re),
            }
        }
        table.push(row);
    }
    Ok(table)
}

pub fn correlator_table(s: &Scenario, a: &Analysis) -> Result<Table, CliError> {
    let grid = uniform_grid(a.t_max, s.n_points);
    let mut table = Table::new(["t", "re_trC", "im_trC", "trC_closed_form", "residual"]);
    for &t in &grid {
        let r = correlator_with(&a.coefficients, &a.eig, t, s.branch)?;
        table.push(vec![t, r.trace_anticommutator.re, r.trace_anticommutator.im, r.trace_closed_form, r.residual]);
    }
    Ok(table)
}

pub fn plot_script(s: &Scenario, format: Format) -> Option<String> {
    if format != Format::Csv {
        return None;
    }
    let mut script = String::from("set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n");
    let mut curves = Vec::new();
    let mut col = 2;
    for &obs in &s.observables {
        match obs {
            Observable::PScalar => {
                curves.push(format!("'series.csv' using 1:{col} with lines"));
                curves.push(format!("'series.csv' using 1:{} with lines dashtype 2", col + 2));
                col += 3;
            }
            Observable::UTrace => {
                curves.push(format!("'series.csv' using 1:{col} with lines"));
                col += 2;
            }
            Observable::CTrace => {
                curves.push(format!("'series.csv' using 1:{col} with lines"));
                col += 1;
            }
        }
    }
    let _ = writeln!(script, "plot {}", curves.join(", \\\n     "));
    Some(script)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampingReport {
    pub family: &'static str,
    pub alpha: f64,
    pub sigma_unit: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub gap: f64,
}

pub fn solve_damping(s: &Scenario) -> Result<DampingReport, CliError> {
    let eig = eigensystem(&s.system)?;
    let bath = &s.file.bath;
    let base = s.base_dir();
    let build = |alpha: f64| -> crate::error::Result<SpectralDensity> {
        bath.density_with_alpha(alpha, base).map_err(|e| crate::error::Error::InvalidParameter {
            name: "alpha",
            reason: e.to_string(),
        })
    };
    let (family, solution): (&'static str, DampingSolution) = match s.damping_bracket {
        Some(bracket) => ("parametrized", solve_damping_condition(&AmplitudeFamily::Parametrized { build: &build, bracket }, &eig, &s.quadrature)?),
        None => {
            let shape = bath.density_with_alpha(1.0, base)?;
            ("scaling", solve_damping_condition(&AmplitudeFamily::Scaling(shape), &eig, &s.quadrature)?)
        }
    };
    Ok(DampingReport {
        family,
        alpha: solution.alpha,
        sigma_unit: solution.sigma_unit,
        residual: solution.residual,
        iterations: solution.iterations,
        gap: eig.gap(),
    })
}

pub fn oracle_study(s: &Scenario) -> Result<ConvergenceStudy, CliError> {
    let cfg = s.oracle_or_default()?;
    let bath = discretize_bath(&s.density, cfg.modes, cfg.omega_max, cfg.fock_truncation)?;
    let grid = uniform_grid(cfg.t_max, cfg.n_points);
    let opts = OracleOptions { branch: cfg.branch, initial: s.initial, ..OracleOptions::default() };
    Ok(convergence_study(&s.system, &bath, &cfg.lambdas, &grid, &opts)?)
}

pub fn oracle_artifacts(study: &ConvergenceStudy, format: Format) -> Vec<Artifact> {
    let ext = format.extension();
    let mut out = Vec::new();
    for run in &study.runs {
        let mut t = Table::new(["t_limit", "t_physical", "re_sigma_z", "p_limit", "abs_error"]);
        for r in &run.rows {
            t.push(vec![r.t_limit, r.t_physical, r.re_sigma_z, r.p_limit, r.abs_error]);
        }
        out.push(Artifact::new(format!("oracle/lambda_{}.{ext}", fmt_f64(run.lambda)), t.render(format)));
    }
    let mut conv = Table::new([
        "lambda",
        "sup_error",
        "sup_error_other_branch",
        "max_norm_drift",
        "max_energy_drift",
        "halving_change",
        "beyond_recurrence",
    ]);
    for run in &study.runs {
        conv.push(vec![
            run.lambda,
            run.sup_error,
            run.sup_error_other_branch,
            run.max_norm_drift,
            run.max_energy_drift,
            run.halving_change,
            if run.beyond_recurrence { 1.0 } else { 0.0 },
        ]);
    }
    out.push(Artifact::new(format!("oracle/convergence.{ext}"), conv.render(format)));
    out
}

/// Everything a subcommand produces: files plus a short stdout summary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: String,
}

pub fn coeffs(s: &Scenario) -> Result<Outcome, CliError> {
    let a = analyse(s)?;
    let c = &a.coefficients;
    Ok(Outcome {
        artifacts: vec![Artifact::new("coefficients.json", to_json(&coefficients_report(s, &a)))],
        summary: format!(
            "gamma = {}\nsigma = {}\nphi = {}\nregime = {}\n",
            fmt_f64(c.gamma),
            fmt_f64(c.sigma),
            fmt_f64(c.phi),
            a.regime.regime.as_str()
        ),
    })
}

pub fn evolve(s: &Scenario, format: Format) -> Result<Outcome, CliError> {
    let a = analyse(s)?;
    let table = series_table(s, &a)?;
    let mut artifacts = vec![Artifact::new(format!("series.{}", format.extension()), table.render(format))];
    if let Some(script) = plot_script(s, format) {
        artifacts.push(Artifact::new("plot.gp", script));
    }
    Ok(Outcome { artifacts, summary: format!("{} points on [0, {}]\n", table.rows.len(), fmt_f64(a.t_max)) })
}

pub fn correlator(s: &Scenario, format: Format) -> Result<Outcome, CliError> {
    let a = analyse(s)?;
    let table = correlator_table(s, &a)?;
    let worst = table.rows.iter().map(|r| r[4]).fold(0.0, f64::max);
    Ok(Outcome {
        artifacts: vec![Artifact::new(format!("correlator.{}", format.extension()), table.render(format))],
        summary: format!("max residual = {}\n", fmt_f64(worst)),
    })
}

pub fn regime(s: &Scenario) -> Result<Outcome, CliError> {
    let a = analyse(s)?;
    Ok(Outcome {
        artifacts: vec![Artifact::new("regime.json", to_json(&a.regime))],
        summary: format!("{}\n", a.regime.regime.as_str()),
    })
}

pub fn damping(s: &Scenario) -> Result<Outcome, CliError> {
    let r = solve_damping(s)?;
    Ok(Outcome {
        artifacts: vec![Artifact::new("damping.json", to_json(&r))],
        summary: format!("alpha* = {}\nresidual = {}\n", fmt_f64(r.alpha), fmt_f64(r.residual)),
    })
}

fn oracle_summary(study: &ConvergenceStudy) -> String {
    let mut out = String::from("lambda,sup_error\n");
    for row in &study.rows {
        let _ = writeln!(out, "{},{}", fmt_f64(row.lambda), fmt_f64(row.sup_error));
    }
    let _ = writeln!(out, "monotone = {}", study.monotone);
    out
}

pub fn oracle(s: &Scenario, format: Format) -> Result<Outcome, CliError> {
    let study = oracle_study(s)?;
    Ok(Outcome { artifacts: oracle_artifacts(&study, format), summary: oracle_summary(&study) })
}

/// Coefficients, series, correlator and plot script, plus the damping
/// solution and oracle study when their sections are present.
pub fn run_all(s: &Scenario, format: Format) -> Result<Outcome, CliError> {
    let mut out = coeffs(s)?;
    for part in [evolve(s, format)?, correlator(s, format)?] {
        out.artifacts.extend(part.artifacts);
    }
    if s.file.damping.is_some() {
        let part = damping(s)?;
        out.artifacts.extend(part.artifacts);
        out.summary.push_str(&part.summary);
    }
    if s.oracle.is_some() {
        let part = oracle(s, format)?;
        out.artifacts.extend(part.artifacts);
        out.summary.push_str(&part.summary);
    }
    Ok(out)
}
