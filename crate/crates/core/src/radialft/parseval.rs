//! One-dimensional check of ∫ |xξ|^β ψ̂(x) dx = c_β ∫ |t|^{−1−β} ψ(tξ) dt for a
//! smooth even ψ vanishing near the origin.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gammaq::QuadratureSpec;
use crate::quad::{power_weighted_uniform, Integrator};
use crate::specfun::parseval_constant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    /// amplitude · exp(−1/(1−s²)) with s the position of |t| inside the annulus
    /// rescaled to (−1, 1); zero outside.
    AnnularBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub kind: BumpKind,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub grid_size: usize,
    pub box_halfwidth: f64,
    pub amplitude: f64,
}

impl Default for TestFunctionSpec {
    fn default() -> Self {
        TestFunctionSpec {
            kind: BumpKind::AnnularBump,
            inner_radius: 0.5,
            outer_radius: 1.5,
            grid_size: 1 << 16,
            box_halfwidth: 64.0,
            amplitude: 1.0,
        }
    }
}

impl TestFunctionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.inner_radius
            && self.inner_radius < self.outer_radius
            && self.outer_radius < self.box_halfwidth)
        {
            return Err(Error::domain(
                "test function needs 0 < inner_radius < outer_radius < box_halfwidth",
            ));
        }
        if self.grid_size < 64 || self.grid_size % 2 != 0 {
            return Err(Error::domain("grid_size must be even and at least 64"));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::domain("amplitude must be finite"));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (a, b) = (self.inner_radius, self.outer_radius);
        let r = t.abs();
        if r <= a || r >= b {
            return 0.0;
        }
        let s = (2.0 * r - a - b) / (b - a);
        match self.kind {
            BumpKind::AnnularBump => self.amplitude * (-1.0 / (1.0 - s * s)).exp(),
        }
    }

    /// ψ̂(x_k) = ∫ ψ(t) e^{−i x_k t} dt at x_k = πk/L, k = 0..N/2, by DFT of the
    /// samples ψ(−L + jΔt).
    pub fn transform_samples(&self) -> Vec<f64> {
        let n = self.grid_size;
        let l = self.box_halfwidth;
        let dt = 2.0 * l / n as f64;
        let mut buf: Vec<Complex<f64>> = (0..n)
            .map(|j| Complex::new(self.eval(-l + j as f64 * dt), 0.0))
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        // e^{−i x_k (−L)} = (−1)^k; ψ is even so the transform is real
        buf[..=n / 2]
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { dt * c.re } else { -dt * c.re })
            .collect()
    }

    /// Grid spacing of [`Self::transform_samples`].
    pub fn frequency_step(&self) -> f64 {
        std::f64::consts::PI / self.box_halfwidth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

impl ParsevalOutcome {
    pub const PASS_TOL: f64 = 1e-3;

    pub fn passed(&self) -> bool {
        self.rel_err < Self::PASS_TOL
    }
}

/// Both sides of the identity: the left from a discrete transform of ψ and
/// product integration against |x|^β, the right by direct quadrature.
pub fn parseval_check(
    beta: f64,
    psi: &TestFunctionSpec,
    xi: f64,
    spec: QuadratureSpec,
) -> Result<ParsevalOutcome> {
    psi.validate()?;
    spec.validate()?;
    if !(beta > -1.0 && beta < 2.0) || beta == 0.0 {
        return Err(Error::domain(format!(
            "beta = {beta} outside (-1, 2) \\ {{0}}"
        )));
    }
    if !(xi.is_finite() && xi != 0.0) {
        return Err(Error::domain("xi must be finite and nonzero"));
    }
    let c_beta = parseval_constant(beta)?;

    let samples = psi.transform_samples();
    let lhs =
        2.0 * xi.abs().powf(beta) * power_weighted_uniform(&samples, psi.frequency_step(), beta);

    let ax = xi.abs();
    let (lo, hi) = (psi.inner_radius / ax, psi.outer_radius / ax);
    let int = Integrator::new(spec.abs_tol, spec.rel_tol, spec.max_panels);
    let half = int.integrate(|t| t.powf(-1.0 - beta) * psi.eval(t * xi), lo, hi)?;
    let rhs = 2.0 * c_beta * half.value;

    let rel_err = if rhs != 0.0 {
        ((lhs - rhs) / rhs).abs()
    } else {
        (lhs - rhs).abs()
    };
    Ok(ParsevalOutcome { lhs, rhs, rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_holds_for_standard_bump() {
        let spec = QuadratureSpec::default();
        let psi = TestFunctionSpec::default();
        let r = parseval_check(-0.5, &psi, 1.0, spec).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = parseval_check(0.5, &psi, 2.0, spec).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.lhs < 0.0 && r.rhs < 0.0);
    }

    #[test]
    fn linear_in_amplitude() {
        let spec = QuadratureSpec::default();
        let psi = TestFunctionSpec::default();
        let doubled = TestFunctionSpec {
            amplitude: 2.0,
            ..psi
        };
        let a = parseval_check(-0.5, &psi, 1.0, spec).unwrap();
        let b = parseval_check(-0.5, &doubled, 1.0, spec).unwrap();
        assert!((b.lhs / a.lhs - 2.0).abs() < 1e-12);
        assert!((b.rhs / a.rhs - 2.0).abs() < 1e-9);
    }

    #[test]
    fn transform_at_zero_is_the_integral() {
        let psi = TestFunctionSpec::default();
        let int = Integrator::default();
        let direct = 2.0 * int.integrate(|t| psi.eval(t), 0.5, 1.5).unwrap().value;
        assert!((psi.transform_samples()[0] - direct).abs() < 1e-10);
    }

    #[test]
    fn validation() {
        let spec = QuadratureSpec::default();
        let bad = TestFunctionSpec {
            inner_radius: 2.0,
            ..TestFunctionSpec::default()
        };
        assert!(parseval_check(0.5, &bad, 1.0, spec).is_err());
        let psi = TestFunctionSpec::default();
        assert!(parseval_check(0.0, &psi, 1.0, spec).is_err());
        assert!(parseval_check(2.0, &psi, 1.0, spec).is_err());
        assert!(parseval_check(0.5, &psi, 0.0, spec).is_err());
    }
}
