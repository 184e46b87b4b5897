//! Seeded samples from Gaussian and symmetric stable laws, one-dimensional
//! projections, Kolmogorov–Smirnov distances and absolute moments.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::rng::ShiftRegisterRng;

/// Asymptotic 1% critical value of √m·D_m.
pub const KS_CRITICAL_1PCT: f64 = 1.63;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GeneratorTag {
    Gaussian,
    Stable1d { beta: f64 },
}

/// m points of ℝⁿ stored row-major, with the parameters that regenerate them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub seed: u64,
    pub generator: GeneratorTag,
    n: usize,
    data: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    /// Column j as a vector.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// The first `m` rows.
    pub fn prefix(&self, m: usize) -> SampleSet {
        SampleSet {
            seed: self.seed,
            generator: self.generator,
            n: self.n,
            data: self.data[..m.min(self.len()) * self.n].to_vec(),
        }
    }

    /// One CSV row per point, columns x1..xn.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record((1..=self.n).map(|j| format!("x{j}")))?;
        for r in self.rows() {
            w.write_record(r.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Fills `out` with independent standard normals by Box–Muller.
pub fn fill_gaussian(rng: &mut ShiftRegisterRng, out: &mut [f64]) {
    for pair in out.chunks_mut(2) {
        let r = (-2.0 * rng.next_f64_open0().ln()).sqrt();
        let (s, c) = (2.0 * PI * rng.next_f64()).sin_cos();
        pair[0] = r * c;
        if pair.len() == 2 {
            pair[1] = r * s;
        }
    }
}

/// m independent standard Gaussian vectors in ℝⁿ.
pub fn sample_gaussian(n: usize, m: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 || m == 0 {
        return Err(Error::domain("sample dimension and size must be positive"));
    }
    let mut rng = ShiftRegisterRng::new(seed);
    let mut data = vec![0.0; n * m];
    fill_gaussian(&mut rng, &mut data);
    Ok(SampleSet {
        seed,
        generator: GeneratorTag::Gaussian,
        n,
        data,
    })
}

/// ⟨x, ξ_i⟩/‖x‖₂ for each sample row.
pub fn project_unit(s: &SampleSet, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != s.n {
        return Err(Error::domain(format!(
            "direction has {} coordinates, samples have {}",
            x.len(),
            s.n
        )));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::domain(
            "projection direction must be nonzero and finite",
        ));
    }
    // normalize first so that x and cx give the same unit vector bit for bit
    // whenever the scaling itself is exact
    let u: Vec<f64> = x.iter().map(|v| v / norm).collect();
    Ok(s.rows()
        .map(|r| r.iter().zip(&u).map(|(a, b)| a * b).sum())
        .collect())
}

/// Uniformly distributed unit vector in ℝⁿ.
pub fn random_direction(n: usize, rng: &mut ShiftRegisterRng) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; n];
        fill_gaussian(rng, &mut v);
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ReferenceCdf {
    StdNormal,
    Normal { sd: f64 },
}

impl ReferenceCdf {
    pub fn cdf(&self, x: f64) -> f64 {
        let z = match self {
            ReferenceCdf::StdNormal => x,
            ReferenceCdf::Normal { sd } => x / sd,
        };
        0.5 * erfc(-z / SQRT_2)
    }
}

/// sup_x |F_m(x) − F(x)| for the empirical CDF F_m of `sample`.
pub fn ks_statistic(sample: &[f64], reference: ReferenceCdf) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::domain("KS statistic of an empty sample"));
    }
    if sample.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("sample contains NaN"));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = reference.cdf(x);
        d.max((i + 1) as f64 / m - f).max(f - i as f64 / m)
    }))
}

/// Symmetric β-stable variate with characteristic function exp(−|t|^β)
/// from an angle v ∈ (−π/2, π/2) and a standard exponential w.
pub fn stable_variate(beta: f64, v: f64, w: f64) -> f64 {
    if beta == 1.0 {
        v.tan()
    } else if beta == 2.0 {
        2.0 * v.sin() * w.sqrt()
    } else {
        stable_variate_general(beta, v, w)
    }
}

fn stable_variate_general(beta: f64, v: f64, w: f64) -> f64 {
    (beta * v).sin() / v.cos().powf(1.0 / beta)
        * (((1.0 - beta) * v).cos() / w).powf((1.0 - beta) / beta)
}

/// m draws of the symmetric β-stable law, β ∈ (0, 2].
pub fn stable_sample(beta: f64, m: usize, seed: u64) -> Result<SampleSet> {
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::domain(format!(
            "stable index must lie in (0, 2], got {beta}"
        )));
    }
    if m == 0 {
        return Err(Error::domain("sample size must be positive"));
    }
    let mut rng = ShiftRegisterRng::new(seed);
    let mut data = Vec::with_capacity(m);
    while data.len() < m {
        let u = rng.next_f64();
        let w = -rng.next_f64_open0().ln();
        if u == 0.0 || w == 0.0 {
            continue;
        }
        data.push(stable_variate(beta, PI * u - FRAC_PI_2, w));
    }
    Ok(SampleSet {
        seed,
        generator: GeneratorTag::Stable1d { beta },
        n: 1,
        data,
    })
}

/// (1/m)Σ|x_i|^p over all coordinates of a one-dimensional sample.
pub fn empirical_moment(s: &SampleSet, p: f64) -> Result<f64> {
    if !(p > -1.0) {
        return Err(Error::domain(format!(
            "moment order must exceed -1, got {p}"
        )));
    }
    if s.is_empty() {
        return Err(Error::domain("moment of an empty sample"));
    }
    let sum: f64 = s.data.iter().map(|x| x.abs().powf(p)).sum();
    Ok(sum / s.data.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPoint {
    pub m: usize,
    pub moment: f64,
}

/// Empirical p-th moments over nested prefixes of one stable sample.
pub fn moment_growth(beta: f64, p: f64, sizes: &[usize], seed: u64) -> Result<Vec<MomentPoint>> {
    let largest = sizes
        .iter()
        .copied()
        .max()
        .ok_or_else(|| Error::domain("no sample sizes"))?;
    let s = stable_sample(beta, largest, seed)?;
    sizes
        .iter()
        .map(|&m| {
            Ok(MomentPoint {
                m,
                moment: empirical_moment(&s.prefix(m), p)?,
            })
        })
        .collect()
}

pub fn write_growth_csv(points: &[MomentPoint], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(x: &[f64]) -> (f64, f64) {
        let m = x.len() as f64;
        let mean = x.iter().sum::<f64>() / m;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        (mean, var)
    }

    #[test]
    fn gaussian_is_deterministic() {
        let a = sample_gaussian(2, 4, 7).unwrap();
        let b = sample_gaussian(2, 4, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.len(), a.dim()), (4, 2));
        assert_ne!(a, sample_gaussian(2, 4, 8).unwrap());
    }

    #[test]
    fn gaussian_moments_within_clt_bounds() {
        let m = 20_000;
        let s = sample_gaussian(3, m, 1).unwrap();
        for j in 0..3 {
            let (mean, var) = mean_var(&s.coordinate(j));
            let r = (m as f64).sqrt();
            assert!(mean.abs() < 4.0 / r, "{mean}");
            assert!((var - 1.0).abs() < 5.0 / r, "{var}");
        }
    }

    #[test]
    fn projection_examples() {
        let s = sample_gaussian(3, 50, 2).unwrap();
        assert_eq!(project_unit(&s, &[1.0, 0.0, 0.0]).unwrap(), s.coordinate(0));
        let x = [0.3, -1.1, 2.0];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert_eq!(
            project_unit(&s, &x).unwrap(),
            project_unit(&s, &x2).unwrap()
        );
        assert!(project_unit(&s, &[0.0, 0.0, 0.0]).is_err());
        assert!(project_unit(&s, &[1.0]).is_err());
    }

    #[test]
    fn ks_examples() {
        let m = 200;
        let quantiles: Vec<f64> = (1..=m)
            .map(|i| {
                let p = (i as f64 - 0.5) / m as f64;
                // invert the normal CDF by bisection
                let (mut lo, mut hi) = (-10.0, 10.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if ReferenceCdf::StdNormal.cdf(mid) < p {
                        lo = mid
                    } else {
                        hi = mid
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let d = ks_statistic(&quantiles, ReferenceCdf::StdNormal).unwrap();
        assert!(d <= 0.5 / m as f64 + 1e-12, "{d}");
        let d = ks_statistic(&[0.0; 10], ReferenceCdf::StdNormal).unwrap();
        assert!(d >= 0.5);
        assert!(ks_statistic(&[], ReferenceCdf::StdNormal).is_err());
    }

    #[test]
    fn exact_special_cases_agree_with_general_formula() {
        let mut rng = ShiftRegisterRng::new(5);
        for _ in 0..200 {
            let v = PI * rng.uniform(0.001, 0.999) - FRAC_PI_2;
            let w = -rng.next_f64_open0().ln();
            for beta in [1.0, 2.0] {
                let exact = stable_variate(beta, v, w);
                let general = stable_variate_general(beta, v, w);
                assert!((exact - general).abs() <= 1e-12 * (1.0 + exact.abs()));
            }
        }
    }

    #[test]
    fn stable_two_is_normal_with_variance_two() {
        let m = 20_000;
        let s = stable_sample(2.0, m, 3).unwrap();
        let (_, var) = mean_var(&s.coordinate(0));
        assert!((var - 2.0).abs() < 10.0 / (m as f64).sqrt(), "{var}");
        let d = ks_statistic(&s.coordinate(0), ReferenceCdf::Normal { sd: SQRT_2 }).unwrap();
        assert!(d < KS_CRITICAL_1PCT / (m as f64).sqrt(), "{d}");
    }

    #[test]
    fn cauchy_quartiles() {
        let s = stable_sample(1.0, 20_001, 4).unwrap();
        let mut x = s.coordinate(0);
        x.sort_by(f64::total_cmp);
        let q = |p: f64| x[(p * (x.len() - 1) as f64) as usize];
        assert!(q(0.5).abs() < 0.05);
        assert!((q(0.75) - q(0.25) - 2.0).abs() < 0.1);
    }

    #[test]
    fn half_moment_of_cauchy() {
        let s = stable_sample(1.0, 200_000, 9).unwrap();
        let m = empirical_moment(&s, 0.5).unwrap();
        assert!((m / SQRT_2 - 1.0).abs() < 0.02, "{m}");
        assert!(empirical_moment(&s, -1.0).is_err());
    }

    #[test]
    fn rejects_bad_stable_index() {
        assert!(stable_sample(0.0, 10, 1).is_err());
        assert!(stable_sample(2.5, 10, 1).is_err());
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let s = sample_gaussian(2, 3, 1).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("x1,x2"));
    }
}
