//! Cyclic Jacobi eigensolver and compensated Rayleigh-quotient verification.

use crate::error::{Error, Result};

use super::SymmetricMatrix;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// vectors[k] is the unit eigenvector for values[k].
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// 1e−12 of the matrix norm.
pub fn jacobi_eigen(a: &SymmetricMatrix) -> Result<Eigen> {
    let (values, v) = jacobi(a, true)?;
    let m = a.size();
    let v = v.expect("vectors requested");
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Ok(Eigen {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..m).map(|r| v[r * m + k]).collect())
            .collect(),
    })
}

/// Smallest eigenvalue by cyclic Jacobi.
pub fn min_eigenvalue(a: &SymmetricMatrix) -> Result<f64> {
    let (values, _) = jacobi(a, false)?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

fn jacobi(a: &SymmetricMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let m = a.size();
    let mut w = a.data().to_vec();
    let mut v = want_vectors.then(|| {
        let mut id = vec![0.0; m * m];
        for i in 0..m {
            id[i * m + i] = 1.0;
        }
        id
    });
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diag = |w: &[f64]| (0..m).map(|i| w[i * m + i]).collect::<Vec<f64>>();
    if norm == 0.0 {
        return Ok((diag(&w), v));
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..m {
            for q in 0..m {
                if p != q {
                    off += w[p * m + q] * w[p * m + q];
                }
            }
        }
        if off.sqrt() <= OFF_DIAGONAL_TOL * norm {
            return Ok((diag(&w), v));
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = w[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[q * m + q] - w[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                w[p * m + p] -= t * apq;
                w[q * m + q] += t * apq;
                w[p * m + q] = 0.0;
                w[q * m + p] = 0.0;
                for r in 0..m {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = w[r * m + p];
                    let arq = w[r * m + q];
                    let np = c * arp - s * arq;
                    let nq = s * arp + c * arq;
                    w[r * m + p] = np;
                    w[p * m + r] = np;
                    w[r * m + q] = nq;
                    w[q * m + r] = nq;
                }
                if let Some(v) = v.as_mut() {
                    for r in 0..m {
                        let vrp = v[r * m + p];
                        let vrq = v[r * m + q];
                        v[r * m + p] = c * vrp - s * vrq;
                        v[r * m + q] = s * vrp + c * vrq;
                    }
                }
            }
        }
    }
    Err(Error::convergence(
        "jacobi eigensolver",
        format!("off-diagonal norm not reduced within {MAX_SWEEPS} sweeps"),
    ))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Dot product in twice the working precision (Ogita–Rump–Oishi Dot2).
pub fn dot2(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let (p, ep) = two_prod(a, b);
        let (t, es) = two_sum(s, p);
        s = t;
        c += ep + es;
    }
    s + c
}

/// vᵀAv / vᵀv with compensated accumulation. For any nonzero v this is an
/// upper bound on the smallest eigenvalue.
pub fn rayleigh_quotient(a: &SymmetricMatrix, v: &[f64]) -> f64 {
    let m = a.size();
    let av: Vec<f64> = (0..m).map(|i| dot2(a.row(i), v)).collect();
    dot2(v, &av) / dot2(v, v)
}

/// Solves (A − σI) y = b by Gaussian elimination with partial pivoting.
fn shifted_solve(a: &SymmetricMatrix, sigma: f64, b: &[f64]) -> Option<Vec<f64>> {
    let m = a.size();
    let mut w: Vec<f64> = a.data().to_vec();
    for i in 0..m {
        w[i * m + i] -= sigma;
    }
    let mut x = b.to_vec();
    for col in 0..m {
        let piv =
            (col..m).max_by(|&i, &j| w[i * m + col].abs().total_cmp(&w[j * m + col].abs()))?;
        if w[piv * m + col] == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..m {
                w.swap(piv * m + k, col * m + k);
            }
            x.swap(piv, col);
        }
        let d = w[col * m + col];
        for r in col + 1..m {
            let f = w[r * m + col] / d;
            if f != 0.0 {
                for k in col..m {
                    w[r * m + k] -= f * w[col * m + k];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for col in (0..m).rev() {
        let mut s = x[col];
        for k in col + 1..m {
            s -= w[col * m + k] * x[k];
        }
        x[col] = s / w[col * m + col];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Upper bound on λ_min from the Jacobi eigenvector, improved by one step of
/// Rayleigh-quotient iteration; both quotients use compensated sums.
pub fn verified_min_eigenvalue(a: &SymmetricMatrix) -> Result<f64> {
    let eig = jacobi_eigen(a)?;
    let v = &eig.vectors[0];
    let rq = rayleigh_quotient(a, v);
    let refined = shifted_solve(a, rq, v).and_then(|y| {
        let norm = dot2(&y, &y).sqrt();
        (norm > 0.0 && norm.is_finite()).then(|| {
            let y: Vec<f64> = y.iter().map(|c| c / norm).collect();
            rayleigh_quotient(a, &y)
        })
    });
    Ok(match refined {
        Some(r) if r.is_finite() => rq.min(r),
        _ => rq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: Vec<Vec<f64>>) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn small_examples() {
        let id = mat(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        assert_eq!(min_eigenvalue(&id).unwrap(), 1.0);
        let ones = mat(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(min_eigenvalue(&ones).unwrap().abs() < 1e-15);
        let d = mat(vec![vec![2.0, 0.0], vec![0.0, -3.0]]);
        assert_eq!(min_eigenvalue(&d).unwrap(), -3.0);
    }

    #[test]
    fn decomposition_reconstructs() {
        // tridiagonal 2,-1 matrix: eigenvalues 2 - 2cos(kπ/(m+1))
        let m = 12;
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| match (i as i64 - j as i64).abs() {
                        0 => 2.0,
                        1 => -1.0,
                        _ => 0.0,
                    })
                    .collect()
            })
            .collect();
        let a = mat(rows);
        let eig = jacobi_eigen(&a).unwrap();
        for (k, &lam) in eig.values.iter().enumerate() {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (m + 1) as f64).cos();
            assert!((lam - want).abs() < 1e-12, "{lam} vs {want}");
            let v = &eig.vectors[k];
            assert!((rayleigh_quotient(&a, v) - lam).abs() < 1e-12);
        }
    }

    #[test]
    fn dot2_recovers_cancellation() {
        let x = [1e16, 1.0, -1e16];
        let y = [1.0, 1.0, 1.0];
        assert_eq!(dot2(&x, &y), 1.0);
    }

    #[test]
    fn verified_bound_is_tight() {
        let a = mat(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        let v = verified_min_eigenvalue(&a).unwrap();
        assert!((v + 1.0).abs() < 1e-14);
    }
}
