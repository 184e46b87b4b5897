//! Fourier transform of ‖x‖_q^β on ℝⁿ through the one-dimensional
//! representation
//!
//! ```text
//! (‖x‖_q^β)^∧(ξ) = q/Γ(−β/q) · ∫_0^∞ t^{n+β−1} Π_k γ_q(t ξ_k) dt,
//! ```
//!
//! the factorized moment integral J_n, the admissible δ windows that make J_n
//! negative, and a discrete-Fourier check of the one-dimensional Parseval
//! identity.

mod certificate;
mod fubini;
mod parseval;

pub use certificate::{
    contradiction_report, delta_window, jn_product, CaseTag, SignCertificate, Verdict,
};
pub use fubini::jn_direct;
pub use parseval::{parseval_check, BumpKind, ParsevalOutcome, TestFunctionSpec};

use crate::error::{Error, Result};
use crate::gammaq::{ErrorSlot, GammaQ, GammaQEvaluator, QuadratureSpec};
use crate::quad::Integrator;
use crate::specfun::{gamma_fn, QExponent, RadialPower};

/// Coordinates closer to zero than this are rejected by [`radial_ft`].
pub const MIN_COORDINATE: f64 = 1e-9;

/// (‖x‖_q^β)^∧(ξ) with a fresh direct evaluator of γ_q.
pub fn radial_ft(q: QExponent, rp: RadialPower, xi: &[f64], spec: QuadratureSpec) -> Result<f64> {
    let g = GammaQEvaluator::new(q, spec)?;
    radial_ft_with(&g, rp, xi)
}

/// (‖x‖_q^β)^∧(ξ) using any γ_q source, e.g. an interpolation table.
pub fn radial_ft_with<G: GammaQ + ?Sized>(g: &G, rp: RadialPower, xi: &[f64]) -> Result<f64> {
    let q = g.q();
    rp.check_against(q)?;
    if xi.len() != rp.n {
        return Err(Error::domain(format!(
            "xi has {} coordinates but n = {}",
            xi.len(),
            rp.n
        )));
    }
    if let Some(bad) = xi.iter().find(|x| !(x.abs() > MIN_COORDINATE)) {
        return Err(Error::domain(format!(
            "xi coordinate {bad} is zero or below {MIN_COORDINATE:e}"
        )));
    }
    let qv = q.value();
    let prefactor = qv / gamma_fn(-rp.beta / qv)?;
    let spec = g.spec();
    let int = Integrator::new(spec.abs_tol, spec.rel_tol, spec.max_panels);
    let p = rp.n as f64 + rp.beta - 1.0;
    Ok(prefactor * radial_integral(g, p, xi, &int)?)
}

/// 2^{β+n} π^{n/2} Γ((n+β)/2)/Γ(−β/2) · ‖ξ‖₂^{−n−β}, the transform of ‖x‖₂^β.
pub fn riesz_closed_form(beta: f64, xi: &[f64]) -> Result<f64> {
    let n = xi.len() as f64;
    if xi.is_empty() || !(beta > -n) {
        return Err(Error::domain(format!(
            "beta = {beta} must exceed -n = -{n}"
        )));
    }
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::domain("xi must be nonzero"));
    }
    let c = 2f64.powf(beta + n) * std::f64::consts::PI.powf(n / 2.0) * gamma_fn((n + beta) / 2.0)?
        / gamma_fn(-beta / 2.0)?;
    Ok(c * norm.powf(-n - beta))
}

/// ∫_0^∞ t^p Π_k γ_q(t ξ_k) dt for p > −1 and nonzero ξ_k.
pub fn radial_integral<G: GammaQ + ?Sized>(
    g: &G,
    p: f64,
    xi: &[f64],
    int: &Integrator,
) -> Result<f64> {
    let xs: Vec<f64> = xi.iter().map(|x| x.abs()).collect();
    let xmax = xs.iter().cloned().fold(0.0, f64::max);
    let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(xmin > 0.0) || !(p > -1.0) {
        return Err(Error::domain(format!(
            "radial integral needs p > -1 and nonzero xi (p = {p}, min |xi| = {xmin})"
        )));
    }
    let spec = *g.spec();
    let product = |t: f64, slot: &ErrorSlot| {
        let mut acc = 1.0;
        for &x in &xs {
            acc *= slot.catch(g.gamma_q(t * x));
        }
        acc
    };

    // t = u^{1/(1+p)} absorbs t^p on the head [0, 1/ξ_max]
    let t0 = 1.0 / xmax;
    let e = 1.0 / (1.0 + p);
    let slot = ErrorSlot::new();
    let head = int.integrate(|u| product(u.powf(e), &slot), 0.0, t0.powf(1.0 + p));
    slot.check()?;
    let head = head?.value * e;

    if g.series().is_degenerate() {
        // no power-law tail: the factor with the largest coordinate decays
        // faster than any power once t ξ_max passes the switch point
        let far = (spec.tail_switch / xmax).max(2.0 * t0);
        let slot = ErrorSlot::new();
        let body = int.integrate_breaks(
            |t| t.powf(p) * product(t, &slot),
            &geometric_breaks(t0, far),
        );
        slot.check()?;
        let mut total = head + body?.value;
        let mut lo = far;
        let mut quiet = 0;
        while quiet < 2 {
            let hi = 2.0 * lo;
            let slot = ErrorSlot::new();
            let chunk = int.integrate(|t| t.powf(p) * product(t, &slot), lo, hi);
            slot.check()?;
            let chunk = chunk?.value;
            total += chunk;
            if chunk.abs() <= 1e-3 * int.abs_tol.max(int.rel_tol * total.abs()) {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if hi > 1e6 * far {
                return Err(Error::convergence(
                    "radial integral",
                    format!("integrand not negligible by t = {hi}"),
                ));
            }
            lo = hi;
        }
        return Ok(total);
    }

    let tail_start = (spec.tail_switch / xmin).max(2.0 * t0);
    let slot = ErrorSlot::new();
    let body = int.integrate_breaks(
        |t| t.powf(p) * product(t, &slot),
        &geometric_breaks(t0, tail_start),
    );
    slot.check()?;
    let body = body?.value;

    let tol = 0.01 * spec.abs_tol;
    let mut tail = 0.0;
    let mut lo = tail_start;
    loop {
        if let Some(v) = product_series_tail(g, p, &xs, lo, tol) {
            tail += v;
            break;
        }
        // some factor's series is not yet accurate at lo
        let hi = 2.0 * lo;
        let slot = ErrorSlot::new();
        let chunk = int.integrate(|t| t.powf(p) * product(t, &slot), lo, hi);
        slot.check()?;
        tail += chunk?.value;
        if hi > 1e4 * tail_start {
            return Err(Error::convergence(
                "radial integral",
                format!("tail not resolved by t = {hi}"),
            ));
        }
        lo = hi;
    }
    Ok(head + body + tail)
}

/// Breakpoints from `lo` to `hi`, roughly doubling, at most 64 pieces.
fn geometric_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let ratio = hi / lo;
    let pieces = (ratio.log2().ceil() as usize).clamp(1, 64);
    let factor = ratio.powf(1.0 / pieces as f64);
    let mut breaks: Vec<f64> = (0..pieces).map(|i| lo * factor.powi(i as i32)).collect();
    breaks.push(hi);
    breaks
}

/// ∫_lo^∞ t^p Π_k γ_q(t ξ_k) dt from the product of asymptotic series, or
/// `None` when some factor's series is not accurate at `lo`.
fn product_series_tail<G: GammaQ + ?Sized>(
    g: &G,
    p: f64,
    xs: &[f64],
    lo: f64,
    tol: f64,
) -> Option<f64> {
    let series = g.series();
    let q = g.q().value();
    // with t = lo·s every factor becomes Σ_j c_j (lo x)^{−qj−1} s^{−qj−1};
    // poly[i] multiplies s^{−q(i+m)−m} after m factors
    let mut poly = vec![1.0];
    for &x in xs {
        let kept = series.kept_terms(lo * x, tol)?;
        let ln_lx = (lo * x).ln();
        let factor: Vec<f64> = (1..=kept)
            .map(|j| series.coeff(j) * (-(q * j as f64 + 1.0) * ln_lx).exp())
            .collect();
        let mut next = vec![0.0; poly.len() + factor.len() - 1];
        for (i, &a) in poly.iter().enumerate() {
            for (j, &c) in factor.iter().enumerate() {
                next[i + j] += a * c;
            }
        }
        poly = next;
    }
    let n = xs.len() as f64;
    let mut sum = 0.0;
    for (i, &b) in poly.iter().enumerate() {
        let decay = q * (i + xs.len()) as f64 + n - p - 1.0;
        sum += b / decay;
    }
    let sum = sum * ((p + 1.0) * lo.ln()).exp();
    Some(sum)
}
