//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Sum over panels of |Kronrod − Gauss|.
    pub abs_error: f64,
    /// Kronrod estimate of ∫|f|, the scale the relative tolerance refers to.
    pub l1: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    l1: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        l1 += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        l1: l1 * half.abs(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-300, max_panels: 20_000 }
    }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from one panel
/// per consecutive pair of `points` and bisecting the worst panel until the
/// summed error estimate is below `max(abs_tol, rel_tol · ∫|f|)`.
///
/// Fails with [`Error::NonConvergence`] if the estimate is still more than ten
/// times the target after `max_panels` panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod(&f, w[0], w[1]));
        }
    }
    if heap.is_empty() {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, l1: 0.0, evaluations: 0 });
    }
    let mut evaluations = 15 * heap.len();
    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter().fold((0.0, 0.0, 0.0), |(v, e, l), p| (v + p.value, e + p.error, l + p.l1))
    };
    loop {
        let (value, error, l1) = totals(&heap);
        let target = opts.abs_tol.max(opts.rel_tol * l1);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence { estimate: f64::NAN, target });
        }
        let exhausted = heap.len() >= opts.max_panels;
        if error <= target || exhausted {
            if error > 10.0 * target {
                return Err(Error::NonConvergence { estimate: error, target });
            }
            return Ok(QuadResult { value, abs_error: error, l1, evaluations });
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in floating point.
            return if error > 10.0 * target {
                Err(Error::NonConvergence { estimate: error, target })
            } else {
                heap.push(worst);
                let (value, error, l1) = totals(&heap);
                Ok(QuadResult { value, abs_error: error, l1, evaluations })
            };
        }
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
        evaluations += 30;
    }
}
