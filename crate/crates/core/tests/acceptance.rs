//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sbstoch::cli::{execute, CommandKind, Format, Scenario};
use sbstoch::dynamics::{correlator, p_analytic, p_operator, uniform_grid, vacuum_evolution_trace, FrequencyBranch};
use sbstoch::limits::{
    coefficients_finite_temperature, coefficients_zero_temperature, solve_damping_condition, AmplitudeFamily,
    LimitCoefficients,
};
use sbstoch::model::{jump_operators, sigma_z_heisenberg};
use sbstoch::oracle::{convergence_study, discretize_bath, sigma_z_expectation_rescaled, OracleOptions};
use sbstoch::spectral::{hilbert_pv, QuadratureSettings, SpectralDensity};
use sbstoch::{eigensystem, Basis, Error, SpinOperator, SpinState, SystemParams};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn q() -> QuadratureSettings {
    QuadratureSettings::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn algebraic_suite() -> Check {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0_f64;
    let diag_z = SpinOperator::new(
        Basis::SigmaZ,
        [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]],
    );
    for case in 0..1000 {
        let eps = rng.gen_range(-5.0..5.0);
        let delta = rng.gen_range(0.05..5.0);
        let e = eigensystem(&SystemParams::new(eps, delta)).map_err(|x| x.to_string())?;
        let k = LimitCoefficients::from_values(rng.gen_range(0.0..2.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let t = rng.gen_range(0.0..20.0);

        let product = (e.mu_plus * e.mu_minus + 1.0).abs();
        let dot = |a: &[Complex64; 2], b: &[Complex64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
        let ortho = [
            (dot(&e.e_plus, &e.e_plus) - 1.0).norm(),
            (dot(&e.e_minus, &e.e_minus) - 1.0).norm(),
            dot(&e.e_plus, &e.e_minus).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let recon = e.to_sigma_z_basis(&jump_operators(&e).recombine(0.0)).max_abs_diff(&diag_z);
        let heis = e.to_sigma_z_basis(&sigma_z_heisenberg(&e, 0.0)).max_abs_diff(&diag_z);
        let p0 = p_operator(&k, &e, 0.0).map_err(|x| x.to_string())?.max_abs_diff(&e.sigma_z());
        let mut herm = 0.0_f64;
        for branch in [FrequencyBranch::Printed, FrequencyBranch::Correlator] {
            let p = sbstoch::dynamics::p_operator_with(&k, &e, t, branch).map_err(|x| x.to_string())?;
            let c = sbstoch::dynamics::correlator_with(&k, &e, t, branch).map_err(|x| x.to_string())?;
            herm = herm.max(p.hermiticity_defect()).max(c.operator.hermiticity_defect());
        }
        let case_worst = [product, ortho, recon, heis, p0, herm].into_iter().fold(0.0, f64::max);
        ensure(case_worst < 1e-12, || format!("case {case} (ε={eps}, Δ={delta}, t={t}): defect {case_worst:.2e}"))?;
        worst = worst.max(case_worst);
    }
    Ok(format!("1000 cases, worst defect {worst:.2e}"))
}

fn quadrature_closed_forms() -> Check {
    let ohmic = SpectralDensity::ohmic(0.1, 10.0).map_err(|x| x.to_string())?;
    let i0 = hilbert_pv(&ohmic, 0.0, &q()).map_err(|x| x.to_string())?;
    ensure((i0 - 1.0).abs() < 1e-10, || format!("ohmic I(0) = {i0}"))?;

    let mut worst_box = 0.0_f64;
    let wide = QuadratureSettings { cutoff_upper: Some(100.0), ..q() };
    for (a, lo, hi) in [(1.0, 0.2, 0.5), (0.7, 1.0, 4.0), (2.5, 0.05, 0.3)] {
        let d = SpectralDensity::boxcar(a, lo, hi).map_err(|x| x.to_string())?;
        for w in [-3.0, -0.4, 0.0, 0.1, 0.35, 0.77, 2.0, 5.0] {
            if (w - lo).abs() < 1e-6 || (w - hi).abs() < 1e-6 {
                continue;
            }
            let got = hilbert_pv(&d, w, &wide).map_err(|x| x.to_string())?;
            let want = a * ((hi - w) / (lo - w)).abs().ln();
            worst_box = worst_box.max((got - want).abs());
        }
    }
    ensure(worst_box < 1e-9, || format!("box error {worst_box:.2e}"))?;

    let mut worst_sym = 0.0_f64;
    for (w, half) in [(1.0, 0.3), (2.5, 0.1), (0.4, 0.39)] {
        let d = SpectralDensity::boxcar(1.3, w - half, w + half).map_err(|x| x.to_string())?;
        worst_sym = worst_sym.max(hilbert_pv(&d, w, &q()).map_err(|x| x.to_string())?.abs());
    }
    ensure(worst_sym < 1e-9, || format!("symmetric box {worst_sym:.2e}"))?;
    Ok(format!("|I(0)−αω_c| {:.1e}, box {worst_box:.1e}, symmetric {worst_sym:.1e}", (i0 - 1.0).abs()))
}

fn off_resonance() -> Check {
    let mut worst = 0.0_f64;
    let mut worst_gamma = 0.0_f64;
    for delta in [0.5, 1.0, 2.0] {
        let e = eigensystem(&SystemParams::new(0.0, delta)).map_err(|x| x.to_string())?;
        let d = SpectralDensity::boxcar(0.2, 2.0 * e.gap(), 3.0 * e.gap()).map_err(|x| x.to_string())?;
        let c = coefficients_zero_temperature(&e, &d, &q()).map_err(|x| x.to_string())?;
        worst_gamma = worst_gamma.max(c.gamma);
        for t in uniform_grid(100.0 / delta, 1001) {
            for psi in [SpinState::spin_up(), SpinState::spin_down()] {
                let z = p_analytic(&c, &e, &psi, t, FrequencyBranch::Printed).map_err(|x| x.to_string())?;
                worst = worst.max((z.norm() - 1.0).abs());
            }
        }
    }
    ensure(worst_gamma < 1e-12, || format!("γ = {worst_gamma:.2e}"))?;
    ensure(worst < 1e-9, || format!("envelope varies by {worst:.2e}"))?;
    Ok(format!("γ ≤ {worst_gamma:.1e}, envelope deviation {worst:.1e}"))
}

fn damping_condition() -> Check {
    let e = eigensystem(&SystemParams::new(0.0, 1.0)).map_err(|x| x.to_string())?;
    let shape = SpectralDensity::boxcar(1.0, 0.2, 0.5).map_err(|x| x.to_string())?;
    let s = solve_damping_condition(&AmplitudeFamily::Scaling(shape), &e, &q()).map_err(|x| x.to_string())?;
    let want = 1.0 / ((1.5f64 / 1.2).ln() + (0.8f64 / 0.5).ln());
    ensure((s.alpha - want).abs() < 1e-8 && s.residual < 1e-8, || {
        format!("α* = {} (want {want}), residual {:.2e}", s.alpha, s.residual)
    })?;
    let ohmic = SpectralDensity::ohmic(1.0, 10.0).map_err(|x| x.to_string())?;
    match solve_damping_condition(&AmplitudeFamily::Scaling(ohmic), &e, &q()) {
        Err(Error::NoSolution { .. }) => {}
        other => return Err(format!("ohmic family gave {other:?}")),
    }
    Ok(format!("α* = {:.10}, residual {:.1e}, ohmic NoSolution", s.alpha, s.residual))
}

fn coth_law() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let d = SpectralDensity::ohmic(0.1, 10.0).map_err(|x| x.to_string())?;
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let beta = 10f64.powf(rng.gen_range(-1.5..1.5));
        let delta = rng.gen_range(0.1..5.0);
        let e = eigensystem(&SystemParams::new(0.0, delta)).map_err(|x| x.to_string())?;
        let c = coefficients_finite_temperature(&e, &d, beta, &q()).map_err(|x| x.to_string())?;
        let coth = c.provenance.gamma_coth.ok_or("no coth form")?;
        let rel = (c.gamma - coth).abs() / coth;
        ensure(rel < 1e-10, || format!("β={beta}, Δ={delta}: relative {rel:.2e}"))?;
        worst = worst.max(rel);
    }
    let e = eigensystem(&SystemParams::new(0.0, 1.0)).map_err(|x| x.to_string())?;
    let zero = coefficients_zero_temperature(&e, &d, &q()).map_err(|x| x.to_string())?;
    let cold = coefficients_finite_temperature(&e, &d, 1e6, &q()).map_err(|x| x.to_string())?;
    let rel = (cold.gamma - zero.gamma).abs() / zero.gamma;
    ensure(rel < 1e-8, || format!("β=1e6: relative {rel:.2e}"))?;
    Ok(format!("sum vs coth {worst:.1e}, cold limit {rel:.1e}"))
}

fn trace_law() -> Check {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let k = LimitCoefficients::from_values(rng.gen_range(0.0..2.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        for t in uniform_grid(10.0, 100) {
            let z = vacuum_evolution_trace(&k, t).map_err(|x| x.to_string())?;
            worst = worst.max((z.norm() - (-k.gamma * t).exp()).abs());
        }
    }
    ensure(worst < 1e-12, || format!("|tr U| deviation {worst:.2e}"))?;
    let e = eigensystem(&SystemParams::new(0.0, 1.0)).map_err(|x| x.to_string())?;
    let r = correlator(&LimitCoefficients::from_values(0.28, -0.35, 0.8), &e, 0.0).map_err(|x| x.to_string())?;
    let c0 = (r.trace_anticommutator - 2.0).norm().max((r.trace_closed_form - 2.0).abs());
    ensure(c0 < 1e-12, || format!("tr C(0) off by {c0:.2e}"))?;
    Ok(format!("|tr U| deviation {worst:.1e}, tr C(0) off by {c0:.1e}"))
}

fn oracle_convergence() -> Check {
    let params = SystemParams::new(0.0, 1.0);
    let d = SpectralDensity::ohmic(0.1, 10.0).map_err(|x| x.to_string())?;
    let grid = uniform_grid(2.0, 41);
    let opts = OracleOptions::default();
    let bath = discretize_bath(&d, 6, 50.0, 2).map_err(|x| x.to_string())?;
    let study = convergence_study(&params, &bath, &[0.5, 0.3, 0.2], &grid, &opts).map_err(|x| x.to_string())?;
    let errors: Vec<String> = study.rows.iter().map(|r| format!("{:.4}", r.sup_error)).collect();
    let printed: Vec<String> = study.rows.iter().map(|r| format!("{:.3}", r.sup_error_other_branch)).collect();
    let drift = study.rows.iter().map(|r| r.max_norm_drift).fold(0.0, f64::max);
    ensure(study.monotone, || format!("sup-errors {errors:?} not decreasing"))?;
    ensure(drift < 1e-8, || format!("norm drift {drift:.2e}"))?;

    let coarse = &study.runs[1];
    let fine_bath = discretize_bath(&d, 6, 50.0, 3).map_err(|x| x.to_string())?;
    let fine = sigma_z_expectation_rescaled(&params, &fine_bath, 0.3, &grid, &opts).map_err(|x| x.to_string())?;
    let stability =
        coarse.rows.iter().zip(&fine.rows).map(|(a, b)| (a.re_sigma_z - b.re_sigma_z).abs()).fold(0.0, f64::max);
    ensure(fine.max_norm_drift < 1e-8, || format!("norm drift {:.2e} at n_max = 3", fine.max_norm_drift))?;
    ensure(stability < 1e-3, || format!("n_max 2→3 changes ⟨σ_z⟩ by {stability:.2e}"))?;
    Ok(format!(
        "sup-errors {} (printed branch {}), drift {drift:.1e}, n_max 2→3 {stability:.1e}",
        errors.join(" > "),
        printed.join(", ")
    ))
}

fn determinism() -> Check {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|x| x.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    let mut files = 0;
    for path in &paths {
        let s = Scenario::load(path).map_err(|x| x.to_string())?;
        for format in [Format::Csv, Format::Json] {
            let a = execute(CommandKind::Run, &s, format).map_err(|x| format!("{}: {x}", path.display()))?;
            let b = execute(CommandKind::Run, &s, format).map_err(|x| x.to_string())?;
            ensure(a == b, || format!("{} differs between runs", path.display()))?;
            files += a.artifacts.len();
        }
    }
    Ok(format!("{} scenarios, {files} artifacts identical", paths.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("algebraic suite", algebraic_suite, Duration::from_secs(5)),
        ("quadrature closed forms", quadrature_closed_forms, Duration::from_secs(5)),
        ("off-resonance regime", off_resonance, Duration::from_secs(2)),
        ("pure-damping condition", damping_condition, Duration::from_secs(2)),
        ("finite-temperature coth law", coth_law, Duration::from_secs(2)),
        ("trace law", trace_law, Duration::from_secs(1)),
        ("oracle convergence", oracle_convergence, Duration::from_secs(300)),
        ("determinism", determinism, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (n, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(msg) if elapsed <= *budget => ("PASS", msg),
            Ok(msg) => ("FAIL", format!("{msg}; took {elapsed:.2?}, budget {budget:?}")),
            Err(msg) => ("FAIL", msg),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {}: {name} ({elapsed:.2?}) {detail}", n + 1);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
