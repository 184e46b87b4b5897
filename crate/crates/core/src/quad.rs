//! Quadrature building blocks: globally adaptive Gauss–Kronrod (21-point),
//! Wynn's epsilon extrapolation, Gauss–Legendre rules and product
//! integration against x^β on uniform grids.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_630_215,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Result of one Gauss–Kronrod application.
#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let error = rescale_error(
        (res_k - res_g) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    Panel { a, b, value, error }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss–Kronrod integrator (QAG-style bisection of the
/// panel with the largest error estimate).
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_panels: 2000,
        }
    }
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64, max_panels: usize) -> Self {
        Integrator {
            abs_tol,
            rel_tol,
            max_panels,
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_breaks(f, &[a, b])
    }

    /// Integrates over consecutive intervals of `breaks`, adapting globally.
    pub fn integrate_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        breaks: &[f64],
    ) -> Result<Estimate> {
        assert!(breaks.len() >= 2, "need at least one interval");
        let mut heap = BinaryHeap::with_capacity(self.max_panels + breaks.len());
        let mut value = 0.0;
        let mut error = 0.0;
        let mut evaluations = 0;
        for w in breaks.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            let p = gk21(&mut f, w[0], w[1]);
            evaluations += 21;
            value += p.value;
            error += p.error;
            heap.push(p);
        }
        loop {
            if error <= self.abs_tol.max(self.rel_tol * value.abs()) {
                break;
            }
            if heap.len() >= self.max_panels {
                return Err(Error::convergence(
                    "adaptive quadrature",
                    format!(
                        "panel budget {} exhausted on [{}, {}]: estimate {value:e}, error {error:e}",
                        self.max_panels,
                        breaks[0],
                        breaks[breaks.len() - 1]
                    ),
                ));
            }
            let worst = match heap.pop() {
                Some(p) => p,
                None => break,
            };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval exhausted at machine resolution; keep its contribution
                heap.push(Panel {
                    error: 0.0,
                    ..worst
                });
                error -= worst.error;
                continue;
            }
            let left = gk21(&mut f, worst.a, mid);
            let right = gk21(&mut f, mid, worst.b);
            evaluations += 42;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
        // re-sum to shed accumulated cancellation from the running updates
        let value = heap.iter().map(|p| p.value).sum();
        let error = heap.iter().map(|p| p.error).sum();
        Ok(Estimate {
            value,
            error,
            evaluations,
        })
    }
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
///
/// Returns the extrapolated limit and an error estimate (difference of the
/// two most recent even-column entries). With fewer than three sums the last
/// sum is returned with an infinite error.
pub fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let n = sums.len();
    if n < 3 {
        return (sums.last().copied().unwrap_or(0.0), f64::INFINITY);
    }
    // eps[k] holds column k along the anti-diagonal ending at the last sum
    let mut prev2 = vec![0.0; n + 1];
    let mut prev: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut best_prev = sums[n - 2];
    let mut col = 1;
    while prev.len() >= 2 {
        let mut next = Vec::with_capacity(prev.len() - 1);
        for i in 0..prev.len() - 1 {
            let diff = prev[i + 1] - prev[i];
            let base = if col == 1 { 0.0 } else { prev2[i + 1] };
            if diff == 0.0 {
                // table degenerates; keep the last even-column estimate
                return (best, (best - best_prev).abs());
            }
            next.push(base + 1.0 / diff);
        }
        col += 1;
        if col % 2 == 1 && !next.is_empty() {
            let len = next.len();
            best_prev = if len >= 2 { next[len - 2] } else { best };
            best = next[len - 1];
        }
        prev2 = prev;
        prev = next;
    }
    (best, (best - best_prev).abs())
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Product integration of ∫_0^X x^β g(x) dx from samples of a smooth `g` on the
/// uniform grid x_k = k·h, k = 0..values.len().
///
/// The grid is split into blocks of `BLOCK` intervals on which `g` is replaced
/// by its degree-`BLOCK` interpolant; the first block integrates the weight x^β
/// exactly, the others use a Gauss–Legendre rule. Trailing samples that do not
/// fill a whole block are dropped, so the caller should ensure `g` has decayed
/// there.
pub fn power_weighted_uniform(values: &[f64], h: f64, beta: f64) -> f64 {
    const BLOCK: usize = 7;
    if values.len() < BLOCK + 1 {
        return 0.0;
    }
    let blocks = (values.len() - 1) / BLOCK;
    let nodes: Vec<f64> = (0..=BLOCK).map(|i| i as f64).collect();

    // first block, in units of h: ∫_0^7 s^β ℓ_i(s) ds via monomial moments
    let first_weights: Vec<f64> = (0..=BLOCK)
        .map(|i| {
            let coeffs = lagrange_monomial_coeffs(&nodes, i);
            coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    let e = beta + m as f64 + 1.0;
                    c * (BLOCK as f64).powf(e) / e
                })
                .sum::<f64>()
        })
        .collect();
    let mut total: f64 = first_weights
        .iter()
        .zip(&values[..=BLOCK])
        .map(|(w, v)| w * v)
        .sum::<f64>()
        * h.powf(beta + 1.0);

    // remaining blocks: Gauss–Legendre on the block against the interpolant
    let (gx, gw) = gauss_legendre(16);
    let half = BLOCK as f64 / 2.0;
    let basis: Vec<Vec<f64>> = gx
        .iter()
        .map(|&g| {
            let s = half * (g + 1.0);
            (0..=BLOCK).map(|i| lagrange_eval(&nodes, i, s)).collect()
        })
        .collect();
    for blk in 1..blocks {
        let start = blk * BLOCK;
        let vals = &values[start..=start + BLOCK];
        let mut acc = 0.0;
        for (g, (&node, &weight)) in gx.iter().zip(&gw).enumerate() {
            let x = h * (start as f64 + half * (node + 1.0));
            let interp: f64 = basis[g].iter().zip(vals).map(|(l, v)| l * v).sum();
            acc += weight * x.powf(beta) * interp;
        }
        total += acc * half * h;
    }
    total
}

fn lagrange_eval(nodes: &[f64], i: usize, s: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &xj)| (s - xj) / (nodes[i] - xj))
        .product()
}

fn lagrange_monomial_coeffs(nodes: &[f64], i: usize) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    let mut denom = 1.0;
    for (j, &xj) in nodes.iter().enumerate() {
        if j == i {
            continue;
        }
        denom *= nodes[i] - xj;
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * xj;
        }
        coeffs = next;
    }
    coeffs.iter().map(|c| c / denom).collect()
}
