//! Numerical evaluation of γ_q(t) = ∫ e^{−itx} e^{−|x|^q} dx = 2∫_0^∞ cos(tx) e^{−x^q} dx
//! and of its absolute moments S_q(α) = ∫ |t|^α γ_q(t) dt.
//!
//! γ_q is computed by Gauss–Kronrod panels between consecutive zeros of
//! cos(tx), with Wynn extrapolation of the alternating panel sums. For large
//! |t| the asymptotic expansion
//!
//! ```text
//! γ_q(t) ~ 2 Σ_{k≥1} (−1)^{k+1} Γ(qk+1)/k! · sin(πqk/2) · t^{−qk−1}
//! ```
//!
//! takes over once its truncation error is below tolerance. For even integer
//! q every coefficient vanishes (γ_q decays faster than any power) and the
//! quadrature path is used everywhere.
//!
//! These routines are the independent numerical oracle for the closed forms in
//! [`crate::specfun`].

use std::cell::Cell;
use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{wynn_epsilon, Integrator};
use crate::specfun::{gamma_fn, ln_gamma, sin_pi, MomentOrder, QExponent};

/// e^{−x^q} is below e^{−41.5} ≈ 1e−18 beyond x = 41.5^{1/q}.
const ENVELOPE_LOG: f64 = 41.5;
const MAX_SERIES_TERMS: usize = 80;

/// Tolerances and switch points shared by every semi-infinite integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper end of the leading non-oscillatory panel.
    pub smooth_cut: f64,
    pub max_panels: usize,
    /// |t| beyond which the asymptotic series may replace quadrature.
    pub tail_switch: f64,
    /// Minimum number of asymptotic-series terms.
    pub asym_terms: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            smooth_cut: 1.0,
            max_panels: 2000,
            tail_switch: 40.0,
            asym_terms: 3,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_panels < 1 || self.asym_terms < 1 {
            return Err(Error::domain(
                "max_panels and asym_terms must be at least 1",
            ));
        }
        if !(self.smooth_cut > 0.0 && self.tail_switch > 0.0) {
            return Err(Error::domain("smooth_cut and tail_switch must be positive"));
        }
        Ok(())
    }
}

/// Coefficients of the large-|t| expansion of γ_q.
#[derive(Debug, Clone)]
pub struct AsymptoticSeries {
    q: f64,
    min_terms: usize,
    /// coeffs[k-1] multiplies t^{−qk−1}
    coeffs: Vec<f64>,
}

impl AsymptoticSeries {
    pub fn new(q: QExponent, min_terms: usize) -> Self {
        let qv = q.value();
        let coeffs = (1..=MAX_SERIES_TERMS)
            .map(|k| {
                let kf = k as f64;
                let s = sin_pi(qv * kf / 2.0);
                if s == 0.0 {
                    return 0.0;
                }
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                // Γ(qk+1)/k!, in log form once Γ would overflow
                let mag = if qv * kf < 170.0 {
                    gamma_fn(qv * kf + 1.0).unwrap_or(f64::INFINITY)
                        / gamma_fn(kf + 1.0).unwrap_or(f64::INFINITY)
                } else {
                    (ln_gamma(qv * kf + 1.0).unwrap_or(f64::INFINITY)
                        - ln_gamma(kf + 1.0).unwrap_or(0.0))
                    .exp()
                };
                2.0 * sign * s * mag
            })
            .collect();
        AsymptoticSeries {
            q: qv,
            min_terms,
            coeffs,
        }
    }

    /// True when every coefficient vanishes (q an even integer).
    pub fn is_degenerate(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Leading coefficient c_1 = A_q.
    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient of t^{−qk−1}, k ≥ 1.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Sums Σ c_k g(k) with the smallest-term truncation rule, where
    /// `g(k)` is the k-th basis value. Returns (sum, first omitted term,
    /// index of the last included term).
    fn truncated_sum(&self, tol: f64, g: impl Fn(usize) -> f64) -> (f64, f64, usize) {
        let mut sum = 0.0;
        let mut last_mag = f64::INFINITY;
        let mut last_k = 0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let k = i + 1;
            let term = c * g(k);
            let mag = term.abs();
            if !mag.is_finite() {
                break;
            }
            if k > self.min_terms && mag > last_mag {
                // divergent part of the asymptotic series reached
                break;
            }
            if k > self.min_terms && mag < tol {
                return (sum, mag, last_k);
            }
            sum += term;
            last_mag = mag;
            last_k = k;
        }
        (sum, last_mag, last_k)
    }

    /// Series value of γ_q(t) and its truncation-error estimate.
    pub fn eval(&self, t: f64, tol: f64) -> (f64, f64) {
        let t = t.abs();
        let lt = t.ln();
        let (sum, err, _) = self.truncated_sum(tol, |k| (-(self.q * k as f64 + 1.0) * lt).exp());
        (sum, err)
    }

    /// Number of coefficient slots the series needs at `t` for accuracy
    /// `tol`, or `None` when the series cannot reach it there.
    pub fn kept_terms(&self, t: f64, tol: f64) -> Option<usize> {
        if self.is_degenerate() {
            return None;
        }
        let lt = t.abs().ln();
        let (_, err, k) = self.truncated_sum(tol, |k| (-(self.q * k as f64 + 1.0) * lt).exp());
        (err <= tol).then_some(k)
    }

    /// ∫_T^∞ t^α γ_q(t) dt from the series, term by term.
    pub fn moment_tail(&self, alpha: f64, lower: f64, tol: f64) -> (f64, f64) {
        let lt = lower.ln();
        let (sum, err, _) = self.truncated_sum(tol, |k| {
            let e = self.q * k as f64 - alpha;
            ((-e) * lt).exp() / e
        });
        (sum, err)
    }

    /// Whether the series is accurate to `tol` at `t`.
    pub fn usable_at(&self, t: f64, tol: f64) -> bool {
        !self.is_degenerate() && self.eval(t, tol).1 <= tol
    }
}

/// Anything that can evaluate γ_q for a fixed q.
pub trait GammaQ: Sync {
    fn q(&self) -> QExponent;
    fn spec(&self) -> &QuadratureSpec;
    fn series(&self) -> &AsymptoticSeries;
    fn gamma_q(&self, t: f64) -> Result<f64>;
}

/// Direct quadrature evaluator of γ_q.
#[derive(Debug, Clone)]
pub struct GammaQEvaluator {
    q: QExponent,
    spec: QuadratureSpec,
    series: AsymptoticSeries,
    envelope_cut: f64,
    memo: Option<HashMap<i64, f64>>,
}

fn memo_key(t: f64) -> i64 {
    (t * 1e12).round() as i64
}

impl GammaQEvaluator {
    pub fn new(q: QExponent, spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        Ok(GammaQEvaluator {
            q,
            spec,
            series: AsymptoticSeries::new(q, spec.asym_terms),
            envelope_cut: ENVELOPE_LOG.powf(1.0 / q.value()),
            memo: None,
        })
    }

    pub fn with_defaults(q: f64) -> Result<Self> {
        Self::new(QExponent::new(q)?, QuadratureSpec::default())
    }

    /// Precomputes γ_q at `points` (keyed on a 1e−12 grid). The table is
    /// immutable afterwards.
    pub fn with_memo(mut self, points: &[f64]) -> Result<Self> {
        let mut memo = HashMap::with_capacity(points.len());
        for &t in points {
            let t = t.abs();
            memo.insert(memo_key(t), self.compute(t)?);
        }
        self.memo = Some(memo);
        Ok(self)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.as_ref().map_or(0, HashMap::len)
    }

    fn compute(&self, t: f64) -> Result<f64> {
        if t >= self.spec.tail_switch {
            let tol = 0.01 * self.spec.abs_tol;
            if !self.series.is_degenerate() {
                let (value, err) = self.series.eval(t, tol);
                if err <= tol {
                    return Ok(value);
                }
            }
        }
        self.quadrature_value(t)
    }

    /// γ_q(t) by quadrature only, bypassing the asymptotic series and the memo.
    /// Results below 1e−3·abs_tol are rounding noise and returned as zero.
    pub fn quadrature_value(&self, t: f64) -> Result<f64> {
        let v = self.quadrature_raw(t.abs())?;
        Ok(if v.abs() < 1e-3 * self.spec.abs_tol {
            0.0
        } else {
            v
        })
    }

    fn quadrature_raw(&self, t: f64) -> Result<f64> {
        let q = self.q.value();
        let x_env = self.envelope_cut;
        let f = |x: f64| (t * x).cos() * (-x.powf(q)).exp();
        let head_int = Integrator::new(
            0.05 * self.spec.abs_tol,
            0.1 * self.spec.rel_tol,
            self.spec.max_panels,
        );
        let panel_int = Integrator::new(0.005 * self.spec.abs_tol, 0.1 * self.spec.rel_tol, 64);

        let period = if t > 0.0 { PI / t } else { f64::INFINITY };
        let first_zero = 0.5 * period;
        let head_target = self.spec.smooth_cut.min(x_env);
        let head_end = if first_zero >= head_target {
            if first_zero >= x_env {
                x_env
            } else {
                first_zero
            }
        } else {
            let k = ((head_target - first_zero) / period).ceil();
            (first_zero + k * period).min(x_env)
        };
        let mut breaks = vec![0.0];
        if head_end > 1.0 && x_env > 1.0 {
            breaks.push(1.0);
        }
        breaks.push(head_end);
        let head = head_int.integrate_breaks(f, &breaks)?.value;
        if head_end >= x_env {
            return Ok(2.0 * head);
        }

        let mut partial = Vec::with_capacity(64);
        let mut sum = 0.0;
        let mut lo = head_end;
        let mut prev_err = f64::INFINITY;
        let target = 0.02 * self.spec.abs_tol;
        // summing up to the envelope cut is exact enough and cheap when few
        // panels remain; extrapolation is reserved for long oscillatory tails
        let direct = (x_env - lo) / period <= DIRECT_PANELS;
        for panel in 0..self.spec.max_panels {
            let hi = (lo + period).min(x_env);
            sum += panel_int.integrate(f, lo, hi)?.value;
            if hi >= x_env {
                return Ok(2.0 * (head + sum));
            }
            partial.push(sum);
            if !direct && panel >= 5 {
                let window = &partial[partial.len().saturating_sub(24)..];
                let (est, err) = wynn_epsilon(window);
                if err < target && prev_err < target {
                    return Ok(2.0 * (head + est));
                }
                prev_err = err;
            }
            lo = hi;
        }
        Err(Error::convergence(
            "gamma_q",
            format!(
                "{} oscillatory panels exhausted at t = {t} (q = {})",
                self.spec.max_panels, self.q
            ),
        ))
    }

    /// S_q(α) = 2∫_0^∞ t^α γ_q(t) dt by quadrature plus an analytic series tail.
    pub fn sq_numeric(&self, order: MomentOrder) -> Result<f64> {
        if order.q() != self.q {
            return Err(Error::domain(format!(
                "moment order paired with q = {} but evaluator has q = {}",
                order.q(),
                self.q
            )));
        }
        Ok(2.0 * moment_integral(self, order.alpha())?)
    }

    /// Smallest t ≤ `search_limit` with γ_q(t) < −abs_tol, to within 1e−6.
    pub fn first_sign_change(&self, search_limit: f64) -> Result<Option<f64>> {
        if !(search_limit > 0.0) {
            return Err(Error::domain("search limit must be positive"));
        }
        let threshold = -self.spec.abs_tol;
        let step = 0.05;
        let mut prev = 0.0;
        let mut t = step;
        while t <= search_limit + 1e-12 {
            if self.gamma_q(t)? < threshold {
                let (mut lo, mut hi) = (prev, t);
                while hi - lo > 1e-6 {
                    let mid = 0.5 * (lo + hi);
                    if self.gamma_q(mid)? < threshold {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(Some(hi));
            }
            prev = t;
            t += step;
        }
        Ok(None)
    }

    /// Piecewise Chebyshev interpolant of γ_q on [0, t_max], verified against
    /// direct evaluation at off-node points.
    pub fn table(&self, t_max: f64) -> Result<GammaQTable> {
        GammaQTable::build(self.clone(), t_max)
    }
}

impl GammaQ for GammaQEvaluator {
    fn q(&self) -> QExponent {
        self.q
    }

    fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    fn series(&self) -> &AsymptoticSeries {
        &self.series
    }

    fn gamma_q(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if let Some(v) = self.memo.as_ref().and_then(|m| m.get(&memo_key(t))) {
            return Ok(*v);
        }
        self.compute(t)
    }
}

/// Runs `f` inside a closure-based integration, capturing the first error.
pub(crate) struct ErrorSlot(Cell<Option<Error>>);

impl ErrorSlot {
    pub(crate) fn new() -> Self {
        ErrorSlot(Cell::new(None))
    }

    pub(crate) fn catch(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let prev = self.0.take();
                self.0.set(Some(prev.unwrap_or(e)));
                0.0
            }
        }
    }

    pub(crate) fn check(self) -> Result<()> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// ∫_0^∞ t^α γ_q(t) dt.
pub(crate) fn moment_integral<G: GammaQ + ?Sized>(g: &G, alpha: f64) -> Result<f64> {
    let spec = *g.spec();
    let outer = Integrator::new(spec.abs_tol, spec.rel_tol, spec.max_panels);
    let slot = ErrorSlot::new();

    // t = u^{1/(1+α)} removes the power singularity on [0, 1]
    let p = 1.0 / (1.0 + alpha);
    let head = outer.integrate(|u| slot.catch(g.gamma_q(u.powf(p))), 0.0, 1.0);
    slot.check()?;
    let head = head?.value * p;

    let tail_start = spec.tail_switch.max(1.0);
    let mut breaks = vec![1.0];
    let mut b = 2.0;
    while b < tail_start {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(tail_start);
    let slot = ErrorSlot::new();
    let body = outer.integrate_breaks(|t| t.powf(alpha) * slot.catch(g.gamma_q(t)), &breaks);
    slot.check()?;
    let body = body?.value;

    let tol = 0.01 * spec.abs_tol;
    let mut tail = 0.0;
    let mut lo = tail_start;
    loop {
        if g.series().usable_at(lo, tol) {
            let (v, err) = g.series().moment_tail(alpha, lo, tol);
            if err <= spec.abs_tol {
                tail += v;
                break;
            }
        }
        let hi = 2.0 * lo;
        // accuracy is owed to the whole moment, not to each chunk
        // and cannot beat rounding in γ_q amplified by t^α over the chunk
        let running = (head + body + tail).abs();
        let rounding = ROUNDING_ULPS
            * f64::EPSILON
            * gamma_q_at_zero(g.q())
            * (hi.powf(alpha + 1.0) - lo.powf(alpha + 1.0))
            / (alpha + 1.0);
        let chunk_tol = spec.abs_tol.max(spec.rel_tol * running).max(rounding);
        let chunk_int = Integrator::new(chunk_tol, spec.rel_tol, spec.max_panels);
        let slot = ErrorSlot::new();
        let chunk = chunk_int.integrate(|t| t.powf(alpha) * slot.catch(g.gamma_q(t)), lo, hi);
        slot.check()?;
        let chunk = chunk?.value;
        tail += chunk;
        if chunk.abs() < spec.abs_tol && g.series().is_degenerate() {
            break;
        }
        if hi > 1e4 * tail_start {
            return Err(Error::convergence(
                "moment tail",
                format!("tail of t^{alpha} gamma_q not resolved by t = {hi}"),
            ));
        }
        lo = hi;
    }
    Ok(head + body + tail)
}

const CHEB_DEGREE: usize = 20;
const DIRECT_PANELS: f64 = 512.0;
const ROUNDING_ULPS: f64 = 8.0;
const TABLE_PANEL: f64 = 0.25;

/// Piecewise barycentric Chebyshev interpolant of γ_q on [0, t_max].
/// Beyond t_max it defers to the underlying evaluator.
#[derive(Debug, Clone)]
pub struct GammaQTable {
    evaluator: GammaQEvaluator,
    t_max: f64,
    panels: usize,
    nodes: [f64; CHEB_DEGREE + 1],
    weights: [f64; CHEB_DEGREE + 1],
    values: Vec<f64>,
    max_check_error: f64,
}

impl GammaQTable {
    fn build(evaluator: GammaQEvaluator, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::domain("table range must be positive"));
        }
        let panels = (t_max / TABLE_PANEL).ceil() as usize;
        let mut nodes = [0.0; CHEB_DEGREE + 1];
        let mut weights = [0.0; CHEB_DEGREE + 1];
        for j in 0..=CHEB_DEGREE {
            // Chebyshev–Lobatto points on [0, 1], ascending
            nodes[j] = 0.5 * (1.0 - (PI * j as f64 / CHEB_DEGREE as f64).cos());
            let w = if j % 2 == 0 { 1.0 } else { -1.0 };
            weights[j] = if j == 0 || j == CHEB_DEGREE {
                0.5 * w
            } else {
                w
            };
        }
        let mut values = Vec::with_capacity(panels * (CHEB_DEGREE + 1));
        for p in 0..panels {
            let base = p as f64 * TABLE_PANEL;
            for &s in &nodes {
                values.push(evaluator.gamma_q(base + s * TABLE_PANEL)?);
            }
        }
        let t_max = panels as f64 * TABLE_PANEL;
        let mut table = GammaQTable {
            evaluator,
            t_max,
            panels,
            nodes,
            weights,
            values,
            max_check_error: 0.0,
        };
        let mut worst: f64 = 0.0;
        for p in 0..panels {
            for frac in [0.137, 0.5, 0.871] {
                let t = (p as f64 + frac) * TABLE_PANEL;
                let direct = table.evaluator.gamma_q(t)?;
                worst = worst.max((table.interpolate(t) - direct).abs());
            }
        }
        let allowed = 10.0 * table.evaluator.spec.abs_tol;
        if worst > allowed {
            return Err(Error::convergence(
                "gamma_q table",
                format!("interpolation error {worst:e} exceeds {allowed:e}"),
            ));
        }
        table.max_check_error = worst;
        Ok(table)
    }

    /// Largest interpolation error observed at the check points.
    pub fn max_check_error(&self) -> f64 {
        self.max_check_error
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn interpolate(&self, t: f64) -> f64 {
        let p = ((t / TABLE_PANEL) as usize).min(self.panels - 1);
        let s = t / TABLE_PANEL - p as f64;
        let vals = &self.values[p * (CHEB_DEGREE + 1)..(p + 1) * (CHEB_DEGREE + 1)];
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..=CHEB_DEGREE {
            let d = s - self.nodes[j];
            if d == 0.0 {
                return vals[j];
            }
            let c = self.weights[j] / d;
            num += c * vals[j];
            den += c;
        }
        num / den
    }
}

impl GammaQ for GammaQTable {
    fn q(&self) -> QExponent {
        self.evaluator.q
    }

    fn spec(&self) -> &QuadratureSpec {
        &self.evaluator.spec
    }

    fn series(&self) -> &AsymptoticSeries {
        &self.evaluator.series
    }

    fn gamma_q(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if t < self.t_max {
            Ok(self.interpolate(t))
        } else {
            self.evaluator.gamma_q(t)
        }
    }
}

/// γ_q(0) = 2Γ(1 + 1/q).
pub fn gamma_q_at_zero(q: QExponent) -> f64 {
    2.0 * gamma_fn(1.0 + 1.0 / q.value()).expect("1 + 1/q is positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{sq_closed_form, tail_constant};

    fn ev(q: f64) -> GammaQEvaluator {
        GammaQEvaluator::with_defaults(q).unwrap()
    }

    #[test]
    fn gaussian_and_cauchy_examples() {
        let g2 = ev(2.0).gamma_q(1.0).unwrap();
        assert!((g2 - PI.sqrt() * (-0.25f64).exp()).abs() < 1e-10);
        let g1 = ev(1.0).gamma_q(2.0).unwrap();
        assert!((g1 - 0.4).abs() < 1e-10);
        let g3 = ev(3.0).gamma_q(0.0).unwrap();
        assert!((g3 - 1.785_959_023_138_5).abs() < 1e-10);
    }

    #[test]
    fn matches_high_precision_reference() {
        // mpmath quadosc at 30 digits
        let reference = [
            (1.0, 1.476_631_848_488_19),
            (3.0, 0.192_951_343_071_105),
            (4.0, -0.074_149_714_389_164_2),
            (6.0, -0.036_393_185_026_518_7),
            (8.0, 7.224_146_770_539_74e-5),
        ];
        let e = ev(3.0);
        for (t, want) in reference {
            let got = e.gamma_q(t).unwrap();
            assert!((got - want).abs() < 1e-10, "t = {t}: {got} vs {want}");
        }
        // even q: no usable series, decays super-polynomially
        let e6 = ev(6.0);
        assert!((e6.gamma_q(40.0).unwrap() + 1.768_814_7e-8).abs() < 1e-12);
        assert!((e6.gamma_q(20.0).unwrap() - 6.267_292_6e-4).abs() < 1e-10);
    }

    #[test]
    fn symmetric_and_bounded() {
        let e = ev(2.5);
        let g0 = e.gamma_q(0.0).unwrap();
        for i in 0..60 {
            let t = 0.37 * i as f64;
            let a = e.gamma_q(t).unwrap();
            assert_eq!(a, e.gamma_q(-t).unwrap());
            assert!(a.abs() <= g0 + 1e-12);
        }
    }

    #[test]
    fn normalization() {
        for q in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0] {
            let qe = QExponent::new(q).unwrap();
            let got = ev(q).gamma_q(0.0).unwrap();
            assert!((got - gamma_q_at_zero(qe)).abs() < 1e-9, "q = {q}: {got}");
        }
    }

    #[test]
    fn series_agrees_with_quadrature_past_switch() {
        for q in [1.5, 2.5, 3.0] {
            let e = ev(q);
            for t in [40.0, 60.0, 100.0] {
                let (series, err) = e.series().eval(t, 1e-14);
                let quad = e.quadrature_value(t).unwrap();
                assert!(err < 1e-11, "q {q} t {t}: err {err}");
                assert!(
                    (series - quad).abs() < 1e-10,
                    "q {q} t {t}: {series} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn series_degenerate_for_even_q() {
        assert!(ev(2.0).series().is_degenerate());
        assert!(ev(4.0).series().is_degenerate());
        assert!(!ev(3.0).series().is_degenerate());
        assert_eq!(
            ev(3.0).series().leading(),
            tail_constant(QExponent::new(3.0).unwrap())
        );
    }

    #[test]
    fn tail_law_for_q3() {
        let t: f64 = 100.0;
        let v = ev(3.0).gamma_q(t).unwrap();
        assert!((t.powi(4) * v / -12.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn sq_numeric_matches_closed_form() {
        for (q, a) in [(2.0, 1.0), (3.0, -0.5), (3.0, 2.5)] {
            let qe = QExponent::new(q).unwrap();
            let order = MomentOrder::new(a, qe).unwrap();
            let num = ev(q).sq_numeric(order).unwrap();
            let closed = sq_closed_form(order).unwrap();
            assert!(
                (num / closed - 1.0).abs() < 1e-6,
                "q {q} alpha {a}: {num} vs {closed}"
            );
        }
    }

    #[test]
    fn sq_numeric_rejects_mismatched_q() {
        let order = MomentOrder::new(1.0, QExponent::new(2.0).unwrap()).unwrap();
        assert!(matches!(ev(3.0).sq_numeric(order), Err(Error::Domain(_))));
    }

    #[test]
    fn sign_change_search() {
        assert_eq!(ev(2.0).first_sign_change(100.0).unwrap(), None);
        assert_eq!(ev(1.0).first_sign_change(100.0).unwrap(), None);
        let t = ev(3.0)
            .first_sign_change(100.0)
            .unwrap()
            .expect("q = 3 has a negative lobe");
        let e = ev(3.0);
        assert!(e.gamma_q(t).unwrap() < -1e-10);
        assert!(e.gamma_q(t - 1e-6).unwrap() >= -1e-10);
        assert!(t > 3.0 && t < 4.0, "{t}");
    }

    #[test]
    fn memo_returns_identical_values() {
        let pts = [0.5, 1.25, 7.0];
        let plain = ev(3.0);
        let memo = ev(3.0).with_memo(&pts).unwrap();
        assert_eq!(memo.memo_len(), 3);
        for t in pts {
            assert_eq!(
                plain.gamma_q(t).unwrap().to_bits(),
                memo.gamma_q(t).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn table_matches_direct() {
        let e = ev(3.0);
        let table = e.table(40.0).unwrap();
        assert!(table.max_check_error() < 1e-10);
        for i in 0..200 {
            let t = 0.1987 * i as f64 + 0.003;
            assert!((table.gamma_q(t).unwrap() - e.gamma_q(t).unwrap()).abs() < 1e-10);
        }
        assert_eq!(table.gamma_q(55.0).unwrap(), e.gamma_q(55.0).unwrap());
    }

    #[test]
    fn spec_validation() {
        let bad = QuadratureSpec {
            abs_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(GammaQEvaluator::new(QExponent::new(3.0).unwrap(), bad).is_err());
        let bad = QuadratureSpec {
            asym_terms: 0,
            ..QuadratureSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
