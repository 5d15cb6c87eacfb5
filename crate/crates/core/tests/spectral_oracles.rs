//! Principal-value transforms against closed forms computed independently
//! here (exponential-integral series, elementary logs, brute-force sums).

use proptest::prelude::*;
use sbstoch::spectral::{hilbert_pv, thermal_split, QuadratureSettings, SpectralDensity};
use sbstoch::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Series `Σ x^k / (k·k!)`.
fn ein_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn e1(x: f64) -> f64 {
    -EULER_GAMMA - x.ln() - ein_series(-x)
}

fn ei(x: f64) -> f64 {
    EULER_GAMMA + x.ln() + ein_series(x)
}

/// Ohmic `α ω e^{−ω/ω_c}` transform at `ω ≠ 0`, infinite cutoff.
fn ohmic_transform(alpha: f64, omega_c: f64, w: f64) -> f64 {
    let x = w / omega_c;
    let kernel = if w < 0.0 { (-x).exp() * e1(-x) } else { -(-x).exp() * ei(x) };
    alpha * (omega_c + w * kernel)
}

fn q() -> QuadratureSettings {
    QuadratureSettings::default()
}

#[test]
fn exponential_integral_series_reference_points() {
    assert!((e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
    assert!((ei(1.0) - 1.895_117_816_355_936_8).abs() < 1e-15);
}

#[test]
fn ohmic_zero_point() {
    let d = SpectralDensity::ohmic(0.1, 10.0).unwrap();
    assert!((hilbert_pv(&d, 0.0, &q()).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn ohmic_reference_values() {
    let d = SpectralDensity::ohmic(0.1, 10.0).unwrap();
    let below = hilbert_pv(&d, -1.0, &q()).unwrap();
    let above = hilbert_pv(&d, 1.0, &q()).unwrap();
    assert!((below - ohmic_transform(0.1, 10.0, -1.0)).abs() < 1e-9, "{below}");
    assert!((above - ohmic_transform(0.1, 10.0, 1.0)).abs() < 1e-9, "{above}");
    assert!((below - 0.798_54).abs() < 1e-5);
    assert!((above - 1.146_84).abs() < 1e-5);
}

#[test]
fn power_law_zero_point_is_gamma_function() {
    // α ω_c Γ(s): Γ(2) = 1, Γ(3) = 2, Γ(1/2)·… via Γ(1.5) = √π/2.
    for (s, gamma_s) in [(2.0, 1.0), (3.0, 2.0), (1.5, 0.5 * std::f64::consts::PI.sqrt())] {
        let d = SpectralDensity::power_law(0.2, s, 4.0).unwrap();
        let v = hilbert_pv(&d, 0.0, &q()).unwrap();
        assert!((v - 0.2 * 4.0 * gamma_s).abs() < 1e-9, "s={s}: {v}");
    }
}

#[test]
fn sub_ohmic_zero_point_is_finite() {
    let d = SpectralDensity::power_law(0.1, 0.5, 1.0).unwrap();
    let v = hilbert_pv(&d, 0.0, &q()).unwrap();
    assert!((v - 0.1 * std::f64::consts::PI.sqrt()).abs() < 1e-9, "{v}");
}

#[test]
fn thermal_ohmic_zero_point_diverges() {
    let d = SpectralDensity::ohmic(0.1, 1.0).unwrap();
    let t = thermal_split(&d, 2.0).unwrap();
    assert_eq!(hilbert_pv(&t.plus(), 0.0, &q()).unwrap_err(), Error::DivergentI0);
    assert_eq!(hilbert_pv(&t.minus(), 0.0, &q()).unwrap_err(), Error::DivergentI0);
}

#[test]
fn box_discontinuity_at_the_evaluation_point_diverges() {
    let d = SpectralDensity::boxcar(1.0, 0.5, 2.0).unwrap();
    assert!(matches!(hilbert_pv(&d, 2.0, &q()), Err(Error::DivergentPrincipalValue { .. })));
}

#[test]
fn evaluation_beyond_cutoff_is_rejected() {
    let d = SpectralDensity::ohmic(0.1, 1.0).unwrap();
    let q = QuadratureSettings { cutoff_upper: Some(5.0), ..q() };
    assert!(matches!(hilbert_pv(&d, 6.0, &q), Err(Error::InvalidCutoff { .. })));
}

/// Composite Simpson on `[0, w_max]` of `(J(x) − J(ω))/(x − ω)` plus the log
/// term, for a density that is continuous at ω.
fn subtracted_simpson(d: &SpectralDensity, w: f64, w_max: f64, n: usize) -> f64 {
    let jw = d.evaluate(w);
    let f = |x: f64| {
        if (x - w).abs() < 1e-9 {
            (d.evaluate(w + 1e-7) - d.evaluate(w - 1e-7)) / 2e-7
        } else {
            (d.evaluate(x) - jw) / (x - w)
        }
    };
    let h = w_max / n as f64;
    let mut s = f(0.0) + f(w_max);
    for k in 1..n {
        s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0 + jw * ((w_max - w) / w).abs().ln()
}

#[test]
fn table_transform_matches_brute_force() {
    let omega: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
    let values: Vec<f64> = omega.iter().map(|w| w * (-w / 3.0f64).exp() * (1.0 + 0.3 * (2.0 * w).sin())).collect();
    let d = SpectralDensity::table(omega, values).unwrap();
    for w in [-2.0, 0.6, 1.3, 4.1, 7.77] {
        let exact = hilbert_pv(&d, w, &q()).unwrap();
        let brute = subtracted_simpson(&d, w, 10.0, 400_000);
        assert!((exact - brute).abs() < 1e-6, "ω={w}: {exact} vs {brute}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ohmic_matches_exponential_integrals(omega_c in 0.5f64..20.0, x in prop_oneof![-3.0f64..-0.05, 0.05f64..3.0]) {
        let d = SpectralDensity::ohmic(0.3, omega_c).unwrap();
        let w = x * omega_c;
        let got = hilbert_pv(&d, w, &q()).unwrap();
        let want = ohmic_transform(0.3, omega_c, w);
        prop_assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "{got} vs {want}");
    }

    #[test]
    fn box_matches_log_antiderivative(
        lo in 0.05f64..2.0,
        width in 0.1f64..3.0,
        w in -3.0f64..6.0,
    ) {
        let hi = lo + width;
        prop_assume!((w - lo).abs() > 1e-3 && (w - hi).abs() > 1e-3);
        let d = SpectralDensity::boxcar(0.7, lo, hi).unwrap();
        let q = QuadratureSettings { cutoff_upper: Some(100.0), ..q() };
        let got = hilbert_pv(&d, w, &q).unwrap();
        let want = 0.7 * ((hi - w) / (lo - w)).abs().ln();
        prop_assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn symmetric_box_cancels(w in 0.5f64..5.0, half in 0.01f64..0.45) {
        let d = SpectralDensity::boxcar(1.3, w - half * w, w + half * w).unwrap();
        prop_assert!(hilbert_pv(&d, w, &q()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn thermal_split_identities(beta in 0.5f64..10.0, w in 0.5f64..10.0) {
        let d = SpectralDensity::ohmic(0.2, 3.0).unwrap();
        let t = thermal_split(&d, beta).unwrap();
        let (jp, jm, j) = (t.j_plus(w), t.j_minus(w), d.evaluate(w));
        prop_assert!(((jp - jm) - j).abs() <= 1e-14 * j);
        prop_assert!((jm - (-beta * w).exp() * jp).abs() <= 1e-14 * jp);
        let coth = 1.0 / (0.5 * beta * w).tanh();
        prop_assert!(((jp + jm) - j * coth).abs() <= 1e-13 * j * coth);
    }
}
