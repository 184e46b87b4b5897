//! Finite-sample positive-definiteness tests for the kernels exp(−‖x−y‖_q^β):
//! Gram matrices, their smallest eigenvalues and searches for point sets with
//! a negative eigenvalue.

mod eigen;
mod witness;

pub use eigen::{
    dot2, jacobi_eigen, min_eigenvalue, rayleigh_quotient, verified_min_eigenvalue, Eigen,
};
pub use witness::{
    search_best, witness_search, GramWitness, WitnessConfig, DEFAULT_BUDGET, DEFAULT_EIG_TOL,
    DEFAULT_RESTARTS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::ShiftRegisterRng;
use crate::specfun::QExponent;

/// Points closer than this (in the ℓ_q distance) count as duplicates.
pub const MIN_SEPARATION: f64 = 1e-6;

/// (Σ|x_k|^q)^{1/q}, applied verbatim for every q > 0.
pub fn lq_norm(x: &[f64], q: QExponent) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let q = q.value();
    let sum: f64 = x.iter().map(|v| (v.abs() / scale).powf(q)).sum();
    scale * sum.powf(1.0 / q)
}

/// The kernel exp(−‖x−y‖_q^β) on ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub q: QExponent,
    pub beta: f64,
    pub n: usize,
}

impl KernelSpec {
    pub fn new(q: QExponent, beta: f64, n: usize) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!(
                "kernel exponent beta must be positive, got {beta}"
            )));
        }
        if n == 0 {
            return Err(Error::domain("kernel dimension must be at least 1"));
        }
        Ok(KernelSpec { q, beta, n })
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        lq_norm(&diff, self.q)
    }

    pub fn value_at(&self, d: f64) -> f64 {
        (-d.powf(self.beta)).exp()
    }
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    size: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Accepts a square matrix symmetric to within 1e−12.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 || rows.iter().any(|r| r.len() != size) {
            return Err(Error::domain("matrix must be square and nonempty"));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        for i in 0..size {
            for j in 0..i {
                if (data[i * size + j] - data[j * size + i]).abs() > 1e-12 {
                    return Err(Error::domain(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SymmetricMatrix { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.size).map(<[f64]>::to_vec).collect()
    }
}

fn check_points(points: &[Vec<f64>], k: &KernelSpec) -> Result<()> {
    if points.is_empty() {
        return Err(Error::domain("need at least one point"));
    }
    if let Some(p) = points.iter().find(|p| p.len() != k.n) {
        return Err(Error::domain(format!(
            "point has {} coordinates, kernel dimension is {}",
            p.len(),
            k.n
        )));
    }
    if points.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::domain("point coordinates must be finite"));
    }
    Ok(())
}

/// G_ij = exp(−‖x_i − x_j‖_q^β); exactly symmetric with unit diagonal.
pub fn gram_matrix(points: &[Vec<f64>], k: &KernelSpec) -> Result<SymmetricMatrix> {
    check_points(points, k)?;
    let m = points.len();
    let mut data = vec![0.0; m * m];
    for i in 0..m {
        data[i * m + i] = 1.0;
        for j in 0..i {
            let v = k.value_at(k.distance(&points[i], &points[j]));
            data[i * m + j] = v;
            data[j * m + i] = v;
        }
    }
    Ok(SymmetricMatrix { size: m, data })
}

/// Smallest pairwise ℓ_q distance (infinite for fewer than two points).
pub fn min_separation(points: &[Vec<f64>], q: QExponent) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in 0..i {
            let diff: Vec<f64> = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| a - b)
                .collect();
            best = best.min(lq_norm(&diff, q));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdVerdict {
    Psd,
    NotPsd,
    Borderline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub verdict: PsdVerdict,
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub m: usize,
}

pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// psd if λ_min ≥ −tol·m, not_psd if λ_min < −10·tol·m, borderline otherwise.
pub fn psd_check(points: &[Vec<f64>], k: &KernelSpec, tol: f64) -> Result<PsdReport> {
    if !(tol > 0.0) {
        return Err(Error::domain("psd tolerance must be positive"));
    }
    let g = gram_matrix(points, k)?;
    let lam = min_eigenvalue(&g)?;
    let m = points.len();
    let scale = tol * m as f64;
    let verdict = if lam >= -scale {
        PsdVerdict::Psd
    } else if lam < -10.0 * scale {
        PsdVerdict::NotPsd
    } else {
        PsdVerdict::Borderline
    };
    Ok(PsdReport {
        verdict,
        min_eigenvalue: lam,
        tol,
        m,
    })
}

/// `m` points uniform in [−half_width, half_width]ⁿ, redrawing any point that
/// lands within [`MIN_SEPARATION`] of an earlier one.
pub fn random_configuration(
    m: usize,
    n: usize,
    half_width: f64,
    q: QExponent,
    rng: &mut ShiftRegisterRng,
) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(m);
    while points.len() < m {
        let p: Vec<f64> = (0..n)
            .map(|_| rng.uniform(-half_width, half_width))
            .collect();
        let clash = points.iter().any(|o| {
            let diff: Vec<f64> = p.iter().zip(o).map(|(a, b)| a - b).collect();
            lq_norm(&diff, q) <= MIN_SEPARATION
        });
        if !clash {
            points.push(p);
        }
    }
    points
}
