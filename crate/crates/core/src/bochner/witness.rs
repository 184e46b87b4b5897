//! Derivative-free search for point sets whose Gram matrix has a negative
//! eigenvalue.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gammaq::GammaQEvaluator;
use crate::rng::ShiftRegisterRng;

use super::{
    gram_matrix, lq_norm, min_eigenvalue, min_separation, random_configuration,
    verified_min_eigenvalue, KernelSpec, SymmetricMatrix, MIN_SEPARATION,
};

pub const DEFAULT_BUDGET: usize = 2500;
pub const DEFAULT_RESTARTS: usize = 4;
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

/// Search parameters; `budget` counts eigenvalue evaluations per restart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessConfig {
    pub m: usize,
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    pub eig_tol: f64,
}

impl WitnessConfig {
    pub fn new(m: usize, budget: usize, seed: u64) -> Self {
        WitnessConfig {
            m,
            budget,
            restarts: DEFAULT_RESTARTS,
            seed,
            eig_tol: DEFAULT_EIG_TOL,
        }
    }

    /// Default budget, restart count and eigenvalue tolerance.
    pub fn with_defaults(m: usize, seed: u64) -> Self {
        Self::new(m, DEFAULT_BUDGET, seed)
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::domain("witness search needs at least two points"));
        }
        if self.budget == 0 || self.restarts == 0 {
            return Err(Error::domain("budget and restart count must be positive"));
        }
        if !(self.eig_tol > 0.0) {
            return Err(Error::domain("eigenvalue tolerance must be positive"));
        }
        Ok(())
    }
}

/// A point configuration together with its recomputed smallest eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramWitness {
    pub kernel: KernelSpec,
    pub points: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
    pub verified_eigenvalue: f64,
    pub eig_tol: f64,
    pub verified: bool,
    pub seed: u64,
    pub budget: usize,
    pub restarts: usize,
    pub restart_index: usize,
    pub evaluations: usize,
}

impl GramWitness {
    /// Recomputes both eigenvalue estimates from the stored points and returns
    /// (jacobi value, compensated upper bound).
    pub fn recheck(&self) -> Result<(f64, f64)> {
        let g = gram_matrix(&self.points, &self.kernel)?;
        Ok((min_eigenvalue(&g)?, verified_min_eigenvalue(&g)?))
    }

    /// True if the stored points are well separated and the compensated bound
    /// is still below −eig_tol.
    pub fn reverify(&self) -> Result<bool> {
        if min_separation(&self.points, self.kernel.q) <= MIN_SEPARATION {
            return Ok(false);
        }
        Ok(self.recheck()?.1 < -self.eig_tol)
    }
}

struct Restart {
    index: usize,
    points: Vec<Vec<f64>>,
    value: f64,
    evaluations: usize,
}

/// Runs every restart and returns the best configuration found, verified or not.
pub fn search_best(k: &KernelSpec, cfg: &WitnessConfig) -> Result<GramWitness> {
    cfg.validate()?;
    let grid = if k.n == 1 {
        one_dimensional_spacing(k)
    } else {
        None
    };
    let runs: Vec<Result<Restart>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(k, cfg, r, grid))
        .collect();
    let mut best: Option<Restart> = None;
    for run in runs {
        let run = run?;
        // ties go to the lower restart index, which arrives first
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    let g = gram_matrix(&best.points, k)?;
    let jacobi = min_eigenvalue(&g)?;
    let bound = verified_min_eigenvalue(&g)?;
    let separated = min_separation(&best.points, k.q) > MIN_SEPARATION;
    Ok(GramWitness {
        kernel: *k,
        points: best.points,
        min_eigenvalue: jacobi,
        verified_eigenvalue: bound,
        eig_tol: cfg.eig_tol,
        verified: separated && bound < -cfg.eig_tol,
        seed: cfg.seed,
        budget: cfg.budget,
        restarts: cfg.restarts,
        restart_index: best.index,
        evaluations: best.evaluations,
    })
}

/// Multi-restart pattern search; `None` if no configuration verifies.
pub fn witness_search(k: &KernelSpec, cfg: &WitnessConfig) -> Result<Option<GramWitness>> {
    let best = search_best(k, cfg)?;
    Ok(best.verified.then_some(best))
}

/// Spacing scale π/t* where t* is the first negative point of the 1-D
/// transform of exp(−|x|^β); `None` if it has no sign change.
fn one_dimensional_spacing(k: &KernelSpec) -> Option<f64> {
    let g = GammaQEvaluator::with_defaults(k.beta).ok()?;
    let t = g.first_sign_change(40.0).ok()??;
    Some(std::f64::consts::PI / t)
}

fn lattice(m: usize, h: f64) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| vec![h * (i as f64 - 0.5 * (m - 1) as f64)])
        .collect()
}

struct Objective<'a> {
    k: &'a KernelSpec,
    gram: SymmetricMatrix,
    evaluations: usize,
}

impl<'a> Objective<'a> {
    fn new(k: &'a KernelSpec, points: &[Vec<f64>]) -> Result<Self> {
        Ok(Objective {
            k,
            gram: gram_matrix(points, k)?,
            evaluations: 0,
        })
    }

    fn update_row(&mut self, points: &[Vec<f64>], i: usize) {
        let m = points.len();
        for j in (0..m).filter(|&j| j != i) {
            let v = self.k.value_at(self.k.distance(&points[i], &points[j]));
            self.gram.data[i * m + j] = v;
            self.gram.data[j * m + i] = v;
        }
    }

    fn eval(&mut self) -> Result<f64> {
        self.evaluations += 1;
        min_eigenvalue(&self.gram)
    }
}

fn too_close(points: &[Vec<f64>], i: usize, k: &KernelSpec) -> bool {
    points.iter().enumerate().any(|(j, p)| {
        j != i && {
            let diff: Vec<f64> = points[i].iter().zip(p).map(|(a, b)| a - b).collect();
            lq_norm(&diff, k.q) <= MIN_SEPARATION
        }
    })
}

fn run_restart(
    k: &KernelSpec,
    cfg: &WitnessConfig,
    index: usize,
    grid: Option<f64>,
) -> Result<Restart> {
    let mut rng = ShiftRegisterRng::stream(cfg.seed, index as u64);
    let mut evaluations = 0;
    let (mut points, step) = match grid {
        Some(unit) => {
            // restart 0 scans lattice spacings; later restarts jitter one
            let mut best: Option<(f64, f64)> = None;
            if index == 0 {
                for i in 0..10 {
                    let h = unit * (0.55 + 0.05 * i as f64);
                    let mut obj = Objective::new(k, &lattice(cfg.m, h))?;
                    let v = obj.eval()?;
                    evaluations += 1;
                    if best.is_none_or(|(_, b)| v < b) {
                        best = Some((h, v));
                    }
                }
            }
            let h = best.map_or_else(|| unit * rng.uniform(0.55, 1.0), |(h, _)| h);
            let mut pts = lattice(cfg.m, h);
            if index > 0 {
                for p in pts.iter_mut() {
                    p[0] += rng.uniform(-0.1, 0.1) * h;
                }
            }
            (pts, 0.25 * h)
        }
        None => {
            let half_width = 0.5 * (cfg.m as f64).powf(1.0 / k.n as f64);
            let pts = random_configuration(cfg.m, k.n, half_width, k.q, &mut rng);
            (pts, 0.25 * half_width)
        }
    };
    let mut obj = Objective::new(k, &points)?;
    let mut value = obj.eval()?;
    let min_step = 1e-6 * step;
    let mut step = step;
    'outer: while obj.evaluations + evaluations < cfg.budget && step > min_step {
        let mut improved = false;
        for i in 0..points.len() {
            for d in 0..k.n {
                for dir in [1.0, -1.0] {
                    if obj.evaluations + evaluations >= cfg.budget {
                        break 'outer;
                    }
                    let old = points[i][d];
                    points[i][d] = old + dir * step;
                    if too_close(&points, i, k) {
                        points[i][d] = old;
                        continue;
                    }
                    obj.update_row(&points, i);
                    let v = obj.eval()?;
                    if v < value {
                        value = v;
                        improved = true;
                        break;
                    }
                    points[i][d] = old;
                    obj.update_row(&points, i);
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(Restart {
        index,
        points,
        value,
        evaluations: obj.evaluations + evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::QExponent;

    fn kernel(q: f64, beta: f64, n: usize) -> KernelSpec {
        KernelSpec::new(QExponent::new(q).unwrap(), beta, n).unwrap()
    }

    #[test]
    fn finds_one_dimensional_witness() {
        let k = kernel(3.0, 3.0, 1);
        let cfg = WitnessConfig::new(40, 300, 1);
        let w = witness_search(&k, &cfg).unwrap().expect("witness");
        assert!(w.verified_eigenvalue < -1e-8);
        assert!(w.reverify().unwrap());
    }

    #[test]
    fn gaussian_has_no_witness() {
        let k = kernel(2.0, 2.0, 3);
        let mut cfg = WitnessConfig::new(20, 150, 3);
        cfg.restarts = 2;
        assert!(witness_search(&k, &cfg).unwrap().is_none());
    }

    #[test]
    fn deterministic_given_seed() {
        let k = kernel(2.5, 1.0, 2);
        let mut cfg = WitnessConfig::new(8, 60, 11);
        cfg.restarts = 2;
        let a = search_best(&k, &cfg).unwrap();
        let b = search_best(&k, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip() {
        let k = kernel(3.0, 3.0, 1);
        let w = search_best(&k, &WitnessConfig::new(10, 40, 2)).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        let back: GramWitness = serde_json::from_str(&s).unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn rejects_bad_config() {
        let k = kernel(3.0, 3.0, 1);
        assert!(search_best(&k, &WitnessConfig::new(1, 10, 0)).is_err());
        assert!(search_best(&k, &WitnessConfig::new(5, 0, 0)).is_err());
    }
}
