//! Spectral densities `J(ω)`, their detailed-balance split at finite
//! temperature, and the principal-value transform
//! `I(ω) = P.V. ∫₀^∞ J(ω′)/(ω′ − ω) dω′`.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// A nonnegative density on `ω ≥ 0`, zero for `ω < 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpectralDensity {
    /// `α ω^s ω_c^{1−s} e^{−ω/ω_c}`; `s = 1` is Ohmic.
    PowerLaw { alpha: f64, s: f64, omega_c: f64 },
    /// `α` on `[ω_lo, ω_hi]`, zero elsewhere.
    Box { alpha: f64, omega_lo: f64, omega_hi: f64 },
    /// Piecewise-linear interpolation of tabulated points, zero outside.
    Table(TableDensity),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableDensity {
    omega: Vec<f64>,
    values: Vec<f64>,
}

impl TableDensity {
    pub fn new(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if omega.len() != values.len() {
            return Err(Error::invalid("table", "frequency and value columns differ in length"));
        }
        if omega.len() < 2 {
            return Err(Error::invalid("table", "needs at least 2 rows"));
        }
        if omega.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::invalid("table", "entries must be finite"));
        }
        if omega[0] < 0.0 {
            return Err(Error::invalid("table", "frequencies must be >= 0"));
        }
        if let Some(i) = omega.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid("table", format!("frequencies not strictly increasing at row {}", i + 2)));
        }
        if let Some(i) = values.iter().position(|&v| v < 0.0) {
            return Err(Error::invalid("table", format!("negative density at row {}", i + 1)));
        }
        Ok(Self { omega, values })
    }

    /// Parses whitespace- or comma-separated `ω J` rows. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
            if fields.len() != 2 {
                return Err(Error::invalid(
                    "table",
                    format!("line {}: expected 2 columns, found {}", lineno + 1, fields.len()),
                ));
            }
            let parse = |f: &str| {
                f.parse::<f64>()
                    .map_err(|e| Error::invalid("table", format!("line {}: {e}: `{f}`", lineno + 1)))
            };
            omega.push(parse(fields[0])?);
            values.push(parse(fields[1])?);
        }
        Self::new(omega, values)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn value(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if w < self.omega[0] || w > self.omega[n - 1] {
            return 0.0;
        }
        let k = self.omega.partition_point(|&x| x <= w).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.omega[k], self.omega[k + 1]);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        y0 + (y1 - y0) * (w - x0) / (x1 - x0)
    }

    /// Exact principal value from the piecewise-linear antiderivative.
    ///
    /// Segment `k` contributes `b_k (x_{k+1} − x_k) + L_k(ω) ln|(x_{k+1}−ω)/(x_k−ω)|`
    /// with `L_k` its linear extension; the log terms are collected per node
    /// so that continuous nodes at `ω` cancel.
    fn hilbert(&self, w: f64) -> Result<f64> {
        let n = self.omega.len();
        let slope = |k: usize| (self.values[k + 1] - self.values[k]) / (self.omega[k + 1] - self.omega[k]);
        let extend = |k: usize| self.values[k] + slope(k) * (w - self.omega[k]);
        let scale = self.values.iter().fold(0.0_f64, |m, &v| m.max(v));
        let mut total = 0.0;
        for k in 0..n - 1 {
            total += self.values[k + 1] - self.values[k];
        }
        for k in 0..n {
            let left = if k > 0 { extend(k - 1) } else { 0.0 };
            let right = if k + 1 < n { extend(k) } else { 0.0 };
            let coeff = left - right;
            let dist = (self.omega[k] - w).abs();
            if dist == 0.0 {
                if coeff.abs() > 1e-12 * scale {
                    return Err(if w == 0.0 { Error::DivergentI0 } else { Error::DivergentPrincipalValue { omega: w } });
                }
                continue;
            }
            total += coeff * dist.ln();
        }
        Ok(total)
    }
}

impl SpectralDensity {
    pub fn power_law(alpha: f64, s: f64, omega_c: f64) -> Result<Self> {
        check_amplitude(alpha)?;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::invalid("s", format!("exponent must be > 0, got {s}")));
        }
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(Error::invalid("omega_c", format!("cutoff must be > 0, got {omega_c}")));
        }
        Ok(Self::PowerLaw { alpha, s, omega_c })
    }

    pub fn ohmic(alpha: f64, omega_c: f64) -> Result<Self> {
        Self::power_law(alpha, 1.0, omega_c)
    }

    pub fn boxcar(alpha: f64, omega_lo: f64, omega_hi: f64) -> Result<Self> {
        check_amplitude(alpha)?;
        if !(omega_lo.is_finite() && omega_lo >= 0.0) {
            return Err(Error::invalid("omega_lo", format!("must be >= 0, got {omega_lo}")));
        }
        if !(omega_hi.is_finite() && omega_hi > omega_lo) {
            return Err(Error::invalid("omega_hi", format!("must exceed omega_lo, got {omega_hi}")));
        }
        Ok(Self::Box { alpha, omega_lo, omega_hi })
    }

    pub fn table(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        TableDensity::new(omega, values).map(Self::Table)
    }

    pub fn load_table(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::invalid("table", format!("{}: {e}", path.display())))?;
        TableDensity::parse(&text).map(Self::Table)
    }

    /// The identically zero density.
    pub fn zero() -> Self {
        Self::Box { alpha: 0.0, omega_lo: 0.0, omega_hi: 1.0 }
    }

    pub fn evaluate(&self, w: f64) -> f64 {
        if w.is_nan() || w < 0.0 {
            return 0.0;
        }
        match *self {
            Self::PowerLaw { alpha, s, omega_c } => {
                if w == 0.0 {
                    0.0
                } else {
                    alpha * (w / omega_c).powf(s) * omega_c * (-w / omega_c).exp()
                }
            }
            Self::Box { alpha, omega_lo, omega_hi } => {
                if (omega_lo..=omega_hi).contains(&w) {
                    alpha
                } else {
                    0.0
                }
            }
            Self::Table(ref t) => t.value(w),
        }
    }

    /// Same shape with every value multiplied by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_amplitude(factor)?;
        Ok(match self {
            Self::PowerLaw { alpha, s, omega_c } => Self::PowerLaw { alpha: alpha * factor, s: *s, omega_c: *omega_c },
            Self::Box { alpha, omega_lo, omega_hi } => {
                Self::Box { alpha: alpha * factor, omega_lo: *omega_lo, omega_hi: *omega_hi }
            }
            Self::Table(t) => Self::Table(TableDensity {
                omega: t.omega.clone(),
                values: t.values.iter().map(|v| v * factor).collect(),
            }),
        })
    }

    /// Upper edge of the support, if compact.
    pub fn support_upper(&self) -> Option<f64> {
        match self {
            Self::PowerLaw { .. } => None,
            Self::Box { omega_hi, .. } => Some(*omega_hi),
            Self::Table(t) => t.omega.last().copied(),
        }
    }

    /// A frequency that sets the scale of the density: `ω_c`, or the upper
    /// support edge for compact families.
    pub fn characteristic_frequency(&self) -> f64 {
        match self {
            Self::PowerLaw { omega_c, .. } => *omega_c,
            _ => self.support_upper().unwrap_or(1.0),
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            Self::PowerLaw { s, omega_c, .. } => self.evaluate(s * omega_c),
            Self::Box { alpha, .. } => *alpha,
            Self::Table(t) => t.values.iter().fold(0.0, |m: f64, &v| m.max(v)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::PowerLaw { alpha, .. } | Self::Box { alpha, .. } => *alpha == 0.0,
            Self::Table(t) => t.values.iter().all(|&v| v == 0.0),
        }
    }
}

fn check_amplitude(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("amplitude must be finite and >= 0, got {alpha}")))
    }
}

/// What the principal-value routine needs to know about an integrand.
pub trait Density {
    fn value(&self, w: f64) -> f64;

    /// Interior points where the density is not smooth, ascending.
    fn breakpoints(&self) -> Vec<f64>;

    /// Exponent `e` of the leading behaviour `J(ω) ~ ω^e` as `ω → 0⁺`, or
    /// `None` if the density vanishes identically near zero.
    fn low_exponent(&self) -> Option<f64>;

    fn default_cutoff(&self) -> f64;

    fn support_upper(&self) -> Option<f64>;

    /// Closed-form principal value, when one exists.
    fn exact_hilbert(&self, _w: f64) -> Option<Result<f64>> {
        None
    }
}

impl Density for SpectralDensity {
    fn value(&self, w: f64) -> f64 {
        self.evaluate(w)
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::PowerLaw { s, omega_c, .. } => vec![s * omega_c],
            Self::Box { omega_lo, omega_hi, .. } => vec![*omega_lo, *omega_hi],
            Self::Table(t) => t.omega.clone(),
        }
    }

    fn low_exponent(&self) -> Option<f64> {
        match self {
            Self::PowerLaw { s, .. } => Some(*s),
            Self::Box { omega_lo, .. } => (*omega_lo == 0.0).then_some(0.0),
            Self::Table(t) => {
                if t.omega[0] > 0.0 {
                    None
                } else if t.values[0] > 0.0 {
                    Some(0.0)
                } else {
                    Some(1.0)
                }
            }
        }
    }

    fn default_cutoff(&self) -> f64 {
        match self {
            Self::PowerLaw { omega_c, .. } => 50.0 * omega_c,
            _ => 10.0 * self.characteristic_frequency(),
        }
    }

    fn support_upper(&self) -> Option<f64> {
        SpectralDensity::support_upper(self)
    }

    fn exact_hilbert(&self, w: f64) -> Option<Result<f64>> {
        match self {
            Self::Table(t) => Some(t.hilbert(w)),
            _ if self.is_zero() => Some(Ok(0.0)),
            _ => None,
        }
    }
}

/// Detailed-balance densities `J_±` at inverse temperature β.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalDensities {
    base: SpectralDensity,
    beta: f64,
}

/// Bose occupation `1/(e^x − 1)`, with a two-term Laurent series near zero.
fn bose(x: f64) -> f64 {
    if x < 1e-8 {
        1.0 / x - 0.5
    } else {
        1.0 / x.exp_m1()
    }
}

pub fn thermal_split(density: &SpectralDensity, beta: f64) -> Result<ThermalDensities> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("beta", format!("inverse temperature must be finite and > 0, got {beta}")));
    }
    Ok(ThermalDensities { base: density.clone(), beta })
}

impl ThermalDensities {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn base(&self) -> &SpectralDensity {
        &self.base
    }

    /// `J_−(ω) = J(ω) e^{−βω}/(1 − e^{−βω})`; zero for `ω ≤ 0`.
    pub fn j_minus(&self, w: f64) -> f64 {
        if w.is_nan() || w <= 0.0 {
            return 0.0;
        }
        let j = self.base.evaluate(w);
        if j == 0.0 {
            0.0
        } else {
            j * bose(self.beta * w)
        }
    }

    /// `J_+(ω) = J(ω)/(1 − e^{−βω}) = J(ω) + J_−(ω)`; zero for `ω ≤ 0`.
    pub fn j_plus(&self, w: f64) -> f64 {
        if w.is_nan() || w <= 0.0 {
            return 0.0;
        }
        self.base.evaluate(w) + self.j_minus(w)
    }

    pub fn plus(&self) -> ThermalBranch<'_> {
        ThermalBranch { parent: self, emission: false }
    }

    pub fn minus(&self) -> ThermalBranch<'_> {
        ThermalBranch { parent: self, emission: true }
    }
}

/// One of `J_+` / `J_−` viewed as a density in its own right.
#[derive(Debug, Clone, Copy)]
pub struct ThermalBranch<'a> {
    parent: &'a ThermalDensities,
    emission: bool,
}

impl Density for ThermalBranch<'_> {
    fn value(&self, w: f64) -> f64 {
        if self.emission {
            self.parent.j_minus(w)
        } else {
            self.parent.j_plus(w)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = self.parent.base.breakpoints();
        let thermal = 1.0 / self.parent.beta;
        pts.extend([thermal, 10.0 * thermal]);
        pts.sort_by(f64::total_cmp);
        pts
    }

    fn low_exponent(&self) -> Option<f64> {
        self.parent.base.low_exponent().map(|e| e - 1.0)
    }

    fn default_cutoff(&self) -> f64 {
        self.parent.base.default_cutoff()
    }

    fn support_upper(&self) -> Option<f64> {
        self.parent.base.support_upper()
    }

    fn exact_hilbert(&self, _w: f64) -> Option<Result<f64>> {
        self.parent.base.is_zero().then_some(Ok(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSettings {
    /// Upper integration limit; `None` picks a family-specific default.
    pub cutoff_upper: Option<f64>,
    pub rel_tol: f64,
    /// Half-width of the subtraction window around the singular point.
    pub subtraction_window: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self { cutoff_upper: None, rel_tol: 1e-10, subtraction_window: 1.0 }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::invalid("rel_tol", format!("must lie in (0, 1), got {}", self.rel_tol)));
        }
        if !(self.subtraction_window.is_finite() && self.subtraction_window > 0.0) {
            return Err(Error::invalid("subtraction_window", "must be finite and > 0"));
        }
        if let Some(c) = self.cutoff_upper {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::invalid("cutoff_upper", "must be finite and > 0"));
            }
        }
        Ok(())
    }

    pub fn cutoff_for<D: Density + ?Sized>(&self, density: &D) -> Result<f64> {
        let cutoff = self.cutoff_upper.unwrap_or_else(|| density.default_cutoff());
        if let Some(hi) = density.support_upper() {
            if cutoff <= hi {
                return Err(Error::invalid(
                    "cutoff_upper",
                    format!("{cutoff} does not exceed the support edge {hi}"),
                ));
            }
        }
        Ok(cutoff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrincipalValue {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Power `p` for the substitution `x = b·u^p` that turns an endpoint
/// behaviour `x^e` into `u^{p(e+1)−1}` with `p(e+1) ≥ 2`.
fn endpoint_power(e: f64) -> u32 {
    if e >= 1.0 || (e >= 0.0 && e.fract() == 0.0) {
        1
    } else {
        ((2.0 / (e + 1.0)).ceil() as u32).clamp(1, 32)
    }
}

struct Accumulator {
    value: f64,
    abs_error: f64,
    evaluations: usize,
}

impl Accumulator {
    fn new() -> Self {
        Self { value: 0.0, abs_error: 0.0, evaluations: 0 }
    }

    /// Integrates `f` over consecutive `points`, with a power substitution on
    /// the first panel when it starts at the origin and `zero_exponent` asks
    /// for one.
    fn add<F: Fn(f64) -> f64>(&mut self, f: F, points: &[f64], zero_exponent: Option<f64>, opts: QuadOptions) -> Result<()> {
        if points.len() < 2 {
            return Ok(());
        }
        let mut rest = points;
        if points[0] == 0.0 {
            let p = zero_exponent.map_or(1, endpoint_power);
            if p > 1 {
                let b = points[1];
                let pf = p as f64;
                let mapped = |u: f64| {
                    let up = u.powi(p as i32 - 1);
                    f(b * up * u) * b * pf * up
                };
                let r = integrate(mapped, &[0.0, 1.0], opts)?;
                self.value += r.value;
                self.abs_error += r.abs_error;
                self.evaluations += r.evaluations;
                rest = &points[1..];
            }
        }
        let r = integrate(f, rest, opts)?;
        self.value += r.value;
        self.abs_error += r.abs_error;
        self.evaluations += r.evaluations;
        Ok(())
    }
}

/// Sorted, deduplicated list `[lo, interior breakpoints..., hi]`.
fn panel_points(lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo];
    pts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

pub fn hilbert_pv<D: Density + ?Sized>(density: &D, w: f64, q: &QuadratureSettings) -> Result<f64> {
    hilbert_pv_detailed(density, w, q).map(|pv| pv.value)
}

/// `I(ω)` with its quadrature error estimate.
///
/// For `ω > 0` the integrand is split into a window `[ω−h, ω+h]`, on which
/// `(J(x) − J(ω))/(x − ω)` is integrated (the subtracted constant integrates
/// to zero over a symmetric window), and the regular remainder outside it.
/// For `ω ≤ 0` the integrand has no interior singularity.
pub fn hilbert_pv_detailed<D: Density + ?Sized>(density: &D, w: f64, q: &QuadratureSettings) -> Result<PrincipalValue> {
    q.validate()?;
    if !w.is_finite() {
        return Err(Error::invalid("omega", "evaluation point must be finite"));
    }
    let cutoff = q.cutoff_for(density)?;
    if w >= cutoff {
        return Err(Error::InvalidCutoff { omega: w, cutoff });
    }
    if let Some(exact) = density.exact_hilbert(w) {
        return exact.map(|value| PrincipalValue { value, abs_error: 0.0, evaluations: 0 });
    }

    let exponent = density.low_exponent();
    let integrand_exponent = exponent.map(|e| if w == 0.0 { e - 1.0 } else { e });
    if let Some(e) = integrand_exponent {
        if e <= -1.0 {
            return Err(if w == 0.0 { Error::DivergentI0 } else { Error::DivergentPrincipalValue { omega: w } });
        }
    }

    let opts = QuadOptions { rel_tol: q.rel_tol, ..QuadOptions::default() };
    let breaks = density.breakpoints();
    let mut acc = Accumulator::new();

    if w <= 0.0 {
        let pts = panel_points(0.0, cutoff, &breaks);
        acc.add(|x| density.value(x) / (x - w), &pts, integrand_exponent, opts)?;
    } else {
        let left = density.value(w.next_down());
        let right = density.value(w.next_up());
        if (left - right).abs() > 1e-8 * left.abs().max(right.abs()) {
            return Err(Error::DivergentPrincipalValue { omega: w });
        }
        let j0 = density.value(w);
        let h = q.subtraction_window.min(w).min(cutoff - w);
        let subtracted = |x: f64| (density.value(x) - j0) / (x - w);
        acc.add(subtracted, &panel_points(w - h, w, &breaks), integrand_exponent, opts)?;
        acc.add(subtracted, &panel_points(w, w + h, &breaks), None, opts)?;
        let plain = |x: f64| density.value(x) / (x - w);
        acc.add(plain, &panel_points(0.0, w - h, &breaks), integrand_exponent, opts)?;
        acc.add(plain, &panel_points(w + h, cutoff, &breaks), None, opts)?;
    }
    Ok(PrincipalValue { value: acc.value, abs_error: acc.abs_error, evaluations: acc.evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn density_values() {
        let ohmic = SpectralDensity::ohmic(0.1, 10.0).unwrap();
        assert!((ohmic.evaluate(1.0) - 0.1 * (-0.1f64).exp()).abs() < 1e-16);
        let b = SpectralDensity::boxcar(2.0, 2.0, 3.0).unwrap();
        assert_eq!(b.evaluate(1.0), 0.0);
        assert_eq!(b.evaluate(2.5), 2.0);
        for d in [ohmic, b] {
            assert_eq!(d.evaluate(-5.0), 0.0);
        }
    }

    #[test]
    fn rejects_invalid_families() {
        assert!(SpectralDensity::power_law(0.1, 0.0, 1.0).is_err());
        assert!(SpectralDensity::power_law(-0.1, 1.0, 1.0).is_err());
        assert!(SpectralDensity::boxcar(1.0, 3.0, 2.0).is_err());
        assert!(SpectralDensity::table(vec![0.0], vec![1.0]).is_err());
        assert!(SpectralDensity::table(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn table_parsing() {
        let t = TableDensity::parse("# w J\n0 0\n1, 2\n\n3 0\n").unwrap();
        assert_eq!(t.omega(), &[0.0, 1.0, 3.0]);
        assert_eq!(t.value(2.0), 1.0);
        let err = TableDensity::parse("0 0\n1 x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        assert!(TableDensity::parse("0 0\n").is_err());
    }

    #[test]
    fn ohmic_i0_is_alpha_omega_c() {
        let ohmic = SpectralDensity::ohmic(0.1, 10.0).unwrap();
        let i0 = hilbert_pv(&ohmic, 0.0, &q()).unwrap();
        assert!((i0 - 1.0).abs() < 1e-10, "{i0}");
    }

    #[test]
    fn box_outside_singularity() {
        let b = SpectralDensity::boxcar(1.0, 2.0, 3.0).unwrap();
        let v = hilbert_pv(&b, 1.0, &q()).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn box_touching_zero_has_divergent_i0() {
        let b = SpectralDensity::boxcar(1.0, 0.0, 3.0).unwrap();
        assert_eq!(hilbert_pv(&b, 0.0, &q()).unwrap_err(), Error::DivergentI0);
    }

    #[test]
    fn singularity_on_box_edge_diverges() {
        let b = SpectralDensity::boxcar(1.0, 2.0, 3.0).unwrap();
        assert!(matches!(hilbert_pv(&b, 2.0, &q()), Err(Error::DivergentPrincipalValue { .. })));
    }

    #[test]
    fn cutoff_is_enforced() {
        let ohmic = SpectralDensity::ohmic(0.1, 10.0).unwrap();
        assert!(matches!(hilbert_pv(&ohmic, 600.0, &q()), Err(Error::InvalidCutoff { .. })));
        let b = SpectralDensity::boxcar(1.0, 2.0, 3.0).unwrap();
        let tight = QuadratureSettings { cutoff_upper: Some(2.5), ..q() };
        assert!(matches!(hilbert_pv(&b, 1.0, &tight), Err(Error::InvalidParameter { name: "cutoff_upper", .. })));
    }

    #[test]
    fn table_exact_matches_quadrature_path() {
        let t = SpectralDensity::table(vec![0.0, 0.5, 1.5, 2.0], vec![0.0, 1.0, 0.4, 0.0]).unwrap();
        // Same density routed through the quadrature path via a thin wrapper.
        struct Quad<'a>(&'a SpectralDensity);
        impl Density for Quad<'_> {
            fn value(&self, w: f64) -> f64 {
                self.0.evaluate(w)
            }
            fn breakpoints(&self) -> Vec<f64> {
                self.0.breakpoints()
            }
            fn low_exponent(&self) -> Option<f64> {
                Some(1.0)
            }
            fn default_cutoff(&self) -> f64 {
                20.0
            }
            fn support_upper(&self) -> Option<f64> {
                Some(2.0)
            }
        }
        for w in [-1.0, 0.0, 0.3, 0.5, 1.0, 1.7, 2.5] {
            let exact = hilbert_pv(&t, w, &q()).unwrap();
            let quad = hilbert_pv(&Quad(&t), w, &q()).unwrap();
            assert!((exact - quad).abs() < 1e-9, "w={w}: {exact} vs {quad}");
        }
    }

    #[test]
    fn thermal_split_limits() {
        let j = SpectralDensity::ohmic(0.1, 10.0).unwrap();
        let th = thermal_split(&j, 1e6).unwrap();
        assert!((th.j_plus(1.0) - j.evaluate(1.0)).abs() <= 1e-12 * j.evaluate(1.0));
        assert!(th.j_minus(1.0) <= 1e-12 * j.evaluate(1.0));
        assert!(thermal_split(&j, 0.0).is_err());
        assert!(thermal_split(&j, -1.0).is_err());
    }

    #[test]
    fn thermal_small_argument_is_finite() {
        let j = SpectralDensity::ohmic(0.1, 10.0).unwrap();
        let th = thermal_split(&j, 1.0).unwrap();
        let w = 1e-12;
        // J(ω)/(βω) → α as ω → 0 for Ohmic.
        assert!((th.j_minus(w) - 0.1).abs() < 1e-9);
        assert!((th.j_plus(w) - 0.1).abs() < 1e-9);
    }
}
