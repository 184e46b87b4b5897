//! Direct evaluation of the unfactorized J_n integral.

use crate::error::{Error, Result};
use crate::gammaq::{ErrorSlot, GammaQEvaluator, QuadratureSpec};
use crate::quad::Integrator;
use crate::specfun::{MomentOrder, QExponent, RadialPower};

use super::radial_integral;

/// ∫_{ℝ^{n−1}} Π|ξ_k|^{α_k} ∫_ℝ |t|^{n+β−1} γ_q(t) Π γ_q(tξ_k) dt dξ for n ≤ 3,
/// by nested quadrature with no use of the product formula.
pub fn jn_direct(q: QExponent, beta: f64, alphas: &[f64], spec: QuadratureSpec) -> Result<f64> {
    let n = alphas.len() + 1;
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    RadialPower::new(beta, n)?.check_against(q)?;
    if let Some(a) = alphas.iter().find(|a| !(**a > -1.0 && **a < 0.0)) {
        return Err(Error::domain(format!("alpha = {a} outside (-1, 0)")));
    }
    let residual = beta - alphas.iter().sum::<f64>();
    MomentOrder::new(residual, q)?;

    let g = GammaQEvaluator::new(q, spec)?.table(spec.tail_switch)?;
    let inner = Integrator::new(0.1 * spec.abs_tol, 0.1 * spec.rel_tol, spec.max_panels);
    let p = n as f64 + beta - 1.0;
    // the t-integrand is even, hence the factor 2 on the half line
    let h = |xi: &[f64]| -> Result<f64> {
        let mut coords = Vec::with_capacity(xi.len() + 1);
        coords.push(1.0);
        coords.extend_from_slice(xi);
        Ok(2.0 * radial_integral(&g, p, &coords, &inner)?)
    };

    let outer = Integrator::new(1e-9, 1e-7, spec.max_panels);
    // each ξ_k integrand is even in ξ_k, hence 2 per dimension
    let sym = 2f64.powi(alphas.len() as i32);
    let value = match alphas {
        [] => h(&[])?,
        [a1] => half_line_moment(&outer, *a1, |x| h(&[x]))?,
        [a1, a2] => {
            let angular = Integrator::new(1e-11, 1e-9, spec.max_panels);
            let radial = Integrator::new(1e-9, 1e-6, spec.max_panels);
            quadrant_moment(
                &radial,
                &angular,
                *a1,
                *a2,
                (p - q.value()).max(0.0),
                |x1, x2| h(&[x1, x2]),
            )?
        }
        _ => unreachable!(),
    };
    Ok(sym * value)
}

/// ∫_0^∞ ξ^α f(ξ) dξ for α ∈ (−1, 0): ξ = u^{1/(1+α)} on [0,1] and ξ = 1/w on [1,∞).
fn half_line_moment(
    int: &Integrator,
    alpha: f64,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let e = 1.0 / (1.0 + alpha);
    let slot = ErrorSlot::new();
    let near = int.integrate(|u| slot.catch(f(u.powf(e))), 0.0, 1.0);
    slot.check()?;
    let near = near?.value * e;
    let slot = ErrorSlot::new();
    let far = int.integrate(|w| w.powf(-alpha - 2.0) * slot.catch(f(1.0 / w)), 0.0, 1.0);
    slot.check()?;
    Ok(near + far?.value)
}

/// ∫_0^∞∫_0^∞ ξ_1^{α_1} ξ_2^{α_2} f(ξ_1, ξ_2) dξ in polar coordinates, for f
/// growing at most like r^{−d} at the origin.
///
/// The radial map r = u^{2/(1+λ)}, λ = 1+α_1+α_2−d, absorbs the power law at
/// the corner; the angular factors are absorbed by power maps at θ = 0, π/2.
fn quadrant_moment(
    int: &Integrator,
    angular_int: &Integrator,
    a1: f64,
    a2: f64,
    d: f64,
    f: impl Fn(f64, f64) -> Result<f64>,
) -> Result<f64> {
    let quarter = std::f64::consts::FRAC_PI_4;
    // ∫_0^{π/2} cos^{a1}θ sin^{a2}θ f(r cos θ, r sin θ) dθ
    let angular = |r: f64| -> Result<f64> {
        let mut total = 0.0;
        for (a_near, mirrored) in [(a2, false), (a1, true)] {
            let e = 1.0 / (1.0 + a_near);
            let slot = ErrorSlot::new();
            let piece = angular_int.integrate(
                |v| {
                    // φ is the distance from the nearer axis
                    let phi = quarter * v.powf(e);
                    let jac = quarter * e * v.powf(e - 1.0);
                    let (c, s) = if mirrored {
                        (phi.sin(), phi.cos())
                    } else {
                        (phi.cos(), phi.sin())
                    };
                    c.powf(a1) * s.powf(a2) * jac * slot.catch(f(r * c, r * s))
                },
                0.0,
                1.0,
            );
            slot.check()?;
            total += piece?.value;
        }
        Ok(total)
    };
    let sum_a = a1 + a2;
    let lam = 1.0 + sum_a - d;
    if !(lam > -1.0) {
        return Err(Error::domain("corner singularity is not integrable"));
    }
    // r^{1+α_1+α_2} dr ~ u^{k(1+λ+d)−1} du and the growth of f contributes
    // u^{−kd}; k = 2/(1+λ) leaves a factor u, which also tames a log at d = 0
    let k = 2.0 / (1.0 + lam);
    let slot = ErrorSlot::new();
    let near = int.integrate(
        |u| k * u.powf(k * (2.0 + sum_a) - 1.0) * slot.catch(angular(u.powf(k))),
        0.0,
        1.0,
    );
    slot.check()?;
    let slot = ErrorSlot::new();
    let far = int.integrate(
        |w| w.powf(-3.0 - sum_a) * slot.catch(angular(1.0 / w)),
        0.0,
        1.0,
    );
    slot.check()?;
    Ok(near?.value + far?.value)
}
