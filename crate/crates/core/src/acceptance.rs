//! The numbered acceptance checks, runnable from tests and from `verify-all`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::bochner::{
    psd_check, random_configuration, witness_search, KernelSpec, PsdVerdict, WitnessConfig,
};
use crate::error::Result;
use crate::gammaq::{GammaQ, GammaQEvaluator, QuadratureSpec};
use crate::measures::{
    empirical_moment, ks_statistic, moment_growth, project_unit, random_direction, sample_gaussian,
    stable_sample, ReferenceCdf, KS_CRITICAL_1PCT,
};
use crate::radialft::{
    contradiction_report, delta_window, jn_direct, jn_product, parseval_check, radial_ft,
    riesz_closed_form, CaseTag, TestFunctionSpec, Verdict,
};
use crate::rng::ShiftRegisterRng;
use crate::specfun::{
    parseval_constant, sq_closed_form, tail_constant, MomentOrder, QExponent, RadialPower,
};

pub const CRITERIA: usize = 14;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
    pub limit_secs: Option<f64>,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let limit = self
            .limit_secs
            .map_or(String::new(), |l| format!(" / {l:.0} s"));
        write!(
            f,
            "[{}] #{:02} {} ({:.2} s{}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_secs,
            limit,
            self.detail
        )
    }
}

struct Check {
    passed: bool,
    detail: String,
}

impl Check {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Check {
            passed,
            detail: detail.into(),
        }
    }
}

type CheckFn = fn() -> Result<Check>;

const TABLE: [(&str, Option<f64>, CheckFn); CRITERIA] = [
    (
        "gaussian and cauchy oracles",
        Some(5.0),
        gaussian_cauchy_oracles,
    ),
    ("tail law", Some(5.0), tail_law),
    (
        "moment closed form vs quadrature",
        Some(60.0),
        moment_oracle,
    ),
    ("moment sign grid", None, moment_signs),
    (
        "one-dimensional parseval identity",
        Some(30.0),
        parseval_identity,
    ),
    (
        "radial transform in one dimension",
        None,
        radial_one_dimension,
    ),
    ("radial transform vs riesz kernel", None, radial_riesz),
    ("direct vs factorized J_n", Some(120.0), fubini),
    ("contradiction certificates", Some(10.0), certificates),
    ("delta windows", None, windows),
    ("gram positive controls", Some(60.0), positive_controls),
    (
        "one-dimensional gram witness",
        Some(120.0),
        one_dimensional_witness,
    ),
    ("gaussian projections", Some(60.0), gaussian_projections),
    ("stable moments", None, stable_moments),
];

/// Runs criterion `id` (1-based). Errors and overruns count as failures.
pub fn run_criterion(id: usize) -> Option<CriterionOutcome> {
    let (name, limit, check) = *TABLE.get(id.checked_sub(1)?)?;
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match result {
        Ok(c) => (c.passed, c.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(l) = limit {
        if elapsed >= l {
            passed = false;
            detail = format!("{detail}; over the {l} s limit");
        }
    }
    Some(CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed_secs: elapsed,
        limit_secs: limit,
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=CRITERIA).filter_map(run_criterion).collect()
}

fn q(v: f64) -> Result<QExponent> {
    QExponent::new(v)
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn gaussian_cauchy_oracles() -> Result<Check> {
    let g2 = GammaQEvaluator::with_defaults(2.0)?;
    let g1 = GammaQEvaluator::with_defaults(1.0)?;
    let (mut e2, mut e1) = (0.0f64, 0.0f64);
    for i in 0..=500 {
        let t = 0.1 * i as f64;
        e2 = e2.max((g2.gamma_q(t)? - PI.sqrt() * (-t * t / 4.0).exp()).abs());
        e1 = e1.max((g1.gamma_q(t)? - 2.0 / (1.0 + t * t)).abs());
    }
    Ok(Check::new(
        e2 < 1e-8 && e1 < 1e-8,
        format!("max error q=2 {e2:.2e}, q=1 {e1:.2e} (< 1e-8)"),
    ))
}

fn tail_law() -> Result<Check> {
    let t: f64 = 100.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for qv in [2.5, 3.0, 4.0] {
        let qe = q(qv)?;
        let a = tail_constant(qe);
        if a.abs() < 1e-12 {
            parts.push(format!("q={qv} skipped (A_q = 0)"));
            continue;
        }
        let g = GammaQEvaluator::with_defaults(qv)?.quadrature_value(t)?;
        let r = (t.powf(1.0 + qv) * g / a - 1.0).abs();
        ok &= r < 0.02;
        parts.push(format!("q={qv} {r:.2e}"));
    }
    Ok(Check::new(
        ok,
        format!("|t^(1+q)γ/A_q − 1| at t=100: {}", parts.join(", ")),
    ))
}

fn moment_oracle() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for qv in [2.5, 3.0, 4.0, 6.0] {
        let qe = q(qv)?;
        let g = GammaQEvaluator::with_defaults(qv)?;
        let base = [-0.9, -0.5, -0.1, 0.5, 1.0, 1.5];
        let starred = [2.2, 2.5, 3.5];
        for alpha in base
            .into_iter()
            .chain(starred.into_iter().filter(|a| *a < qv))
        {
            let Ok(order) = MomentOrder::new(alpha, qe) else {
                continue;
            };
            let r = rel(g.sq_numeric(order)?, sq_closed_form(order)?);
            worst = worst.max(r);
            count += 1;
        }
    }
    Ok(Check::new(
        worst < 1e-6,
        format!("{count} (q, α) pairs, worst relative error {worst:.2e} (< 1e-6)"),
    ))
}

fn moment_signs() -> Result<Check> {
    let mut points = 0;
    let mut failures = Vec::new();
    for qv in [2.5, 3.0, 4.0, 6.0] {
        let qe = q(qv)?;
        let g = GammaQEvaluator::with_defaults(qv)?;
        let upper = qv.min(4.0);
        let positive = [-0.9, -0.7, -0.5, -0.3, -0.1, 0.2, 0.6, 1.0, 1.4, 1.8];
        let negative: Vec<f64> = (1..=6)
            .map(|k| 2.0 + (upper - 2.0) * k as f64 / 7.0)
            .collect();
        for (alpha, sign) in positive
            .iter()
            .map(|a| (*a, 1.0))
            .chain(negative.iter().map(|a| (*a, -1.0)))
        {
            let order = MomentOrder::new(alpha, qe)?;
            let closed = sq_closed_form(order)?;
            let numeric = g.sq_numeric(order)?;
            points += 1;
            if closed * sign <= 0.0 || numeric * sign <= 0.0 {
                failures.push(format!("q={qv} α={alpha:.3}"));
            }
        }
    }
    Ok(Check::new(
        failures.is_empty() && points >= 60,
        format!("{points} grid points, failures: [{}]", failures.join(", ")),
    ))
}

fn parseval_identity() -> Result<Check> {
    let psi = TestFunctionSpec::default();
    let mut worst = 0.0f64;
    for beta in [-0.5, 0.5, 1.5] {
        for xi in [1.0, 2.0] {
            let out = parseval_check(beta, &psi, xi, QuadratureSpec::default())?;
            worst = worst.max(out.rel_err);
        }
    }
    Ok(Check::new(
        worst < 1e-3,
        format!("worst rel_err {worst:.2e} (< 1e-3)"),
    ))
}

fn radial_one_dimension() -> Result<Check> {
    let mut worst = 0.0f64;
    for qv in [2.5, 3.0] {
        for beta in [-0.5, 0.5] {
            for xi in [0.5f64, 1.0, 2.0] {
                let got = radial_ft(
                    q(qv)?,
                    RadialPower::new(beta, 1)?,
                    &[xi],
                    QuadratureSpec::default(),
                )?;
                let want = parseval_constant(beta)? * xi.powf(-1.0 - beta);
                worst = worst.max(rel(got, want));
            }
        }
    }
    Ok(Check::new(
        worst < 1e-6,
        format!("worst relative error {worst:.2e} (< 1e-6)"),
    ))
}

fn radial_riesz() -> Result<Check> {
    let xis2: [&[f64]; 3] = [&[1.0, 0.5], &[0.3, 2.0], &[1.5, -1.2]];
    let xis3: [&[f64]; 3] = [&[1.0, 0.5, 0.25], &[0.3, 2.0, -0.7], &[1.2, 1.2, 1.2]];
    let mut worst = 0.0f64;
    for (n, xis) in [(2, xis2), (3, xis3)] {
        for beta in [-0.5, 0.5, 1.0] {
            for xi in xis {
                let got = radial_ft(
                    q(2.0)?,
                    RadialPower::new(beta, n)?,
                    xi,
                    QuadratureSpec::default(),
                )?;
                worst = worst.max(rel(got, riesz_closed_form(beta, xi)?));
            }
        }
    }
    Ok(Check::new(
        worst < 1e-5,
        format!("worst relative error {worst:.2e} (< 1e-5)"),
    ))
}

fn fubini() -> Result<Check> {
    let cases: [(f64, f64, &[f64]); 3] = [
        (3.0, 1.0, &[-0.75, -0.75]),
        (3.0, 1.5, &[-0.75]),
        (2.5, 0.8, &[-0.8, -0.8]),
    ];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (qv, beta, alphas) in cases {
        let direct = jn_direct(q(qv)?, beta, alphas, QuadratureSpec::default())?;
        let product = jn_product(q(qv)?, beta, alphas)?.product;
        let r = rel(direct, product);
        worst = worst.max(r);
        parts.push(format!("({qv}, {beta}, {alphas:?}) {r:.1e}"));
    }
    Ok(Check::new(worst < 1e-4, parts.join("; ")))
}

/// Sign S_q(α) must have: + on (−1,2)\{0}, − on (2, min(4,q)).
fn expected_moment_sign(alpha: f64, qv: f64) -> Option<f64> {
    if alpha > -1.0 && alpha < 2.0 && alpha != 0.0 {
        Some(1.0)
    } else if alpha > 2.0 && alpha < qv.min(4.0) {
        Some(-1.0)
    } else {
        None
    }
}

fn certificates() -> Result<Check> {
    let grid: [(CaseTag, &[f64], &[f64]); 3] = [
        (CaseTag::A, &[2.5, 3.0, 4.0, 6.0], &[0.5, 1.0, 1.5]),
        (CaseTag::B, &[2.5, 3.0, 4.0], &[1.2, 1.5, 1.8]),
        (CaseTag::C, &[3.0, 4.0, 6.0], &[-0.2, -0.5, -0.8]),
    ];
    let mut total = 0;
    let mut failures = Vec::new();
    for (case, qs, betas) in grid {
        for &qv in qs {
            for &beta in betas {
                total += 1;
                let cert = match contradiction_report(case, q(qv)?, beta, None) {
                    Ok(c) => c,
                    Err(e) => {
                        failures.push(format!("{case} q={qv} β={beta}: {e}"));
                        continue;
                    }
                };
                let orders = cert
                    .alphas
                    .iter()
                    .chain(std::iter::once(&cert.residual_order));
                let signs_ok = orders
                    .zip(&cert.s_factors)
                    .all(|(&a, &s)| expected_moment_sign(a, qv).is_some_and(|sign| s * sign > 0.0));
                let gamma_sign = if beta < 0.0 { 1 } else { -1 };
                if cert.verdict != Verdict::Contradiction
                    || !signs_ok
                    || cert.gamma_prefactor_sign != gamma_sign
                    || !cert.product_consistent()
                {
                    failures.push(format!("{case} q={qv} β={beta}"));
                }
            }
        }
    }
    Ok(Check::new(
        failures.is_empty(),
        format!("{total} certificates, failures: [{}]", failures.join(", ")),
    ))
}

fn windows() -> Result<Check> {
    let cases = [
        (CaseTag::A, 3.0, 1.0, (0.0, 0.5)),
        (CaseTag::B, 3.0, 1.5, (0.0, 0.5)),
        (CaseTag::C, 4.0, -0.5, (0.0, 1.0 / 6.0)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (case, qv, beta, (lo, hi)) in cases {
        let (a, b) = delta_window(case, q(qv)?, beta)?;
        ok &= (a - lo).abs() < 1e-12 && (b - hi).abs() < 1e-12;
        parts.push(format!("{case}: ({a}, {b})"));
    }
    Ok(Check::new(ok, parts.join("; ")))
}

fn positive_controls() -> Result<Check> {
    let mut total = 0;
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for qv in [1.0, 1.5, 2.0] {
        for beta in [0.5, qv] {
            for n in [2, 3] {
                let k = KernelSpec::new(q(qv)?, beta, n)?;
                for seed in 0..100 {
                    let mut rng = ShiftRegisterRng::stream(seed, total as u64);
                    let pts = random_configuration(20, n, 2.0, k.q, &mut rng);
                    let r = psd_check(&pts, &k, 1e-9)?;
                    worst = worst.min(r.min_eigenvalue);
                    total += 1;
                    if r.verdict != PsdVerdict::Psd {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(Check::new(
        failures == 0,
        format!("{total} tests, {failures} not psd, smallest eigenvalue {worst:.3e}"),
    ))
}

fn one_dimensional_witness() -> Result<Check> {
    let k = KernelSpec::new(q(3.0)?, 3.0, 1)?;
    match witness_search(&k, &WitnessConfig::with_defaults(40, 1))? {
        Some(w) => {
            let ok = w.reverify()? && w.verified_eigenvalue < -1e-8;
            Ok(Check::new(
                ok,
                format!(
                    "λ_min {:.3e}, compensated bound {:.3e}",
                    w.min_eigenvalue, w.verified_eigenvalue
                ),
            ))
        }
        None => Ok(Check::new(
            false,
            "no verified witness within the default budget",
        )),
    }
}

fn gaussian_projections() -> Result<Check> {
    let m = 10_000;
    let threshold = KS_CRITICAL_1PCT / (m as f64).sqrt();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let mut below = 0;
        let mut trials = 0;
        for seed in 1..=20u64 {
            let s = sample_gaussian(n, m, seed)?;
            let mut rng = ShiftRegisterRng::stream(seed, 1_000 + n as u64);
            for _ in 0..20 {
                let x = random_direction(n, &mut rng);
                let d = ks_statistic(&project_unit(&s, &x)?, ReferenceCdf::StdNormal)?;
                trials += 1;
                if d < threshold {
                    below += 1;
                }
            }
        }
        let frac = below as f64 / trials as f64;
        ok &= frac >= 0.95;
        parts.push(format!("n={n}: {below}/{trials} below {threshold:.4}"));
    }
    Ok(Check::new(ok, parts.join("; ")))
}

fn stable_moments() -> Result<Check> {
    let s = stable_sample(1.0, 1_000_000, 1)?;
    let half = empirical_moment(&s, 0.5)?;
    let half_ok = rel(half, SQRT_2) < 0.02;
    let sizes = [1_000, 10_000, 100_000, 1_000_000];
    let mut monotone = 0;
    for seed in 1..=5 {
        let curve = moment_growth(1.0, 1.5, &sizes, seed)?;
        if curve.windows(2).all(|w| w[1].moment > w[0].moment) {
            monotone += 1;
        }
    }
    Ok(Check::new(
        half_ok && monotone >= 4,
        format!(
            "E|X|^0.5 = {half:.5} (√2 within 2%: {half_ok}); p=1.5 moment increasing for {monotone}/5 seeds (need 4)"
        ),
    ))
}
