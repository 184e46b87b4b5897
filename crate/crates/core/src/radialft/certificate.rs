use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{gamma_fn, sq_closed_form, MomentOrder, QExponent, RadialPower};

/// Which dimension/exponent regime a certificate addresses:
/// a: n = 3, β ∈ (0,2); b: n = 2, β ∈ (1,2); c: n = 4, β ∈ (−1,0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    A,
    B,
    C,
}

impl CaseTag {
    pub const ALL: [CaseTag; 3] = [CaseTag::A, CaseTag::B, CaseTag::C];

    pub fn dimension(self) -> usize {
        match self {
            CaseTag::A => 3,
            CaseTag::B => 2,
            CaseTag::C => 4,
        }
    }

    /// Open β range the case covers.
    pub fn beta_range(self) -> (f64, f64) {
        match self {
            CaseTag::A => (0.0, 2.0),
            CaseTag::B => (1.0, 2.0),
            CaseTag::C => (-1.0, 0.0),
        }
    }

    fn infer(n: usize, beta: f64) -> Option<CaseTag> {
        CaseTag::ALL.into_iter().find(|c| {
            let (lo, hi) = c.beta_range();
            c.dimension() == n && beta > lo && beta < hi
        })
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::A => "a",
            CaseTag::B => "b",
            CaseTag::C => "c",
        })
    }
}

impl std::str::FromStr for CaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(CaseTag::A),
            "b" | "B" => Ok(CaseTag::B),
            "c" | "C" => Ok(CaseTag::C),
            _ => Err(Error::domain(format!(
                "unknown case '{s}', expected a, b or c"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Contradiction,
    Inconclusive,
}

/// Sign record of J_n = S_q(α_1)···S_q(α_{n−1})·S_q(β − Σα).
///
/// A negative product contradicts the non-negativity forced on J_n by a
/// positive definite exp(−‖x‖_q^β) whose one-dimensional measure has a finite
/// β-th moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCertificate {
    pub case_tag: Option<CaseTag>,
    pub q: QExponent,
    pub beta: f64,
    pub n: usize,
    pub delta: Option<f64>,
    pub delta_window: Option<(f64, f64)>,
    pub alphas: Vec<f64>,
    pub residual_order: f64,
    pub s_factors: Vec<f64>,
    pub product: f64,
    pub gamma_prefactor_sign: i8,
    pub verdict: Verdict,
}

impl SignCertificate {
    /// Checks the recorded product against the factors.
    pub fn product_consistent(&self) -> bool {
        let p: f64 = self.s_factors.iter().product();
        ((p - self.product) / self.product).abs() <= 1e-12
    }
}

/// Certificate for J_n with the given α_1..α_{n−1} (n = alphas.len() + 1).
pub fn jn_product(q: QExponent, beta: f64, alphas: &[f64]) -> Result<SignCertificate> {
    let n = alphas.len() + 1;
    if alphas.is_empty() {
        return Err(Error::domain("J_n needs at least one alpha (n ≥ 2)"));
    }
    RadialPower::new(beta, n)?.check_against(q)?;
    if let Some(a) = alphas.iter().find(|a| !(**a > -1.0 && **a < 0.0)) {
        return Err(Error::domain(format!("alpha = {a} outside (-1, 0)")));
    }
    let residual = beta - alphas.iter().sum::<f64>();
    let mut s_factors = Vec::with_capacity(n);
    for &a in alphas.iter().chain(std::iter::once(&residual)) {
        s_factors.push(sq_closed_form(MomentOrder::new(a, q)?)?);
    }
    let product: f64 = s_factors.iter().product();
    let prefactor = gamma_fn(-beta / q.value())?;
    let delta = {
        let d = 1.0 + alphas[0];
        alphas.iter().all(|&a| a == alphas[0]).then_some(d)
    };
    Ok(SignCertificate {
        case_tag: CaseTag::infer(n, beta),
        q,
        beta,
        n,
        delta,
        delta_window: None,
        alphas: alphas.to_vec(),
        residual_order: residual,
        s_factors,
        product,
        gamma_prefactor_sign: if prefactor < 0.0 { -1 } else { 1 },
        verdict: if product < 0.0 {
            Verdict::Contradiction
        } else {
            Verdict::Inconclusive
        },
    })
}

/// Open interval of δ ∈ (0,1) for which α_k = −1+δ gives J_n < 0.
///
/// The case a lower bound is (2+β−min(4,q))/2: with two α's equal to −1+δ the
/// residual order 2−2δ+β stays below min(4,q) exactly when δ exceeds it.
pub fn delta_window(case: CaseTag, q: QExponent, beta: f64) -> Result<(f64, f64)> {
    let qv = q.value();
    if !(qv > 2.0) {
        return Err(Error::domain(format!("delta windows need q > 2, got {qv}")));
    }
    let (blo, bhi) = case.beta_range();
    if !(beta > blo && beta < bhi) {
        return Err(Error::domain(format!(
            "case {case} needs beta in ({blo}, {bhi}), got {beta}"
        )));
    }
    let m = qv.min(4.0);
    let (lo, hi) = match case {
        CaseTag::A => ((2.0 + beta - m) / 2.0, beta / 2.0),
        CaseTag::B => (1.0 + beta - m, beta - 1.0),
        CaseTag::C => ((3.0 + beta - m) / 3.0, (beta + 1.0) / 3.0),
    };
    let (lo, hi) = (lo.max(0.0), hi.min(1.0));
    if !(lo < hi) {
        return Err(Error::domain(format!(
            "empty delta window for case {case}, q = {qv}, beta = {beta}"
        )));
    }
    Ok((lo, hi))
}

/// Builds the case's certificate at δ (the window midpoint by default).
pub fn contradiction_report(
    case: CaseTag,
    q: QExponent,
    beta: f64,
    delta: Option<f64>,
) -> Result<SignCertificate> {
    let window = delta_window(case, q, beta)?;
    let delta = match delta {
        Some(d) if d > window.0 && d < window.1 => d,
        Some(d) => {
            return Err(Error::domain(format!(
                "delta = {d} outside the window ({}, {})",
                window.0, window.1
            )))
        }
        None => 0.5 * (window.0 + window.1),
    };
    let alphas = vec![-1.0 + delta; case.dimension() - 1];
    let mut cert = jn_product(q, beta, &alphas)?;
    cert.case_tag = Some(case);
    cert.delta = Some(delta);
    cert.delta_window = Some(window);
    Ok(cert)
}
