//! Closed-form special-function values.
//!
//! | Function | Value |
//! |----------|-------|
//! | [`gamma_fn`] | Γ(x) on real non-pole arguments |
//! | [`parseval_constant`] | c_β = 2^{β+1} √π Γ((β+1)/2) / Γ(−β/2) |
//! | [`sq_closed_form`] | S_q(α) = 2^{α+2} √π Γ(−α/q) Γ((α+1)/2) / (q Γ(−α/2)) |
//! | [`tail_constant`] | A_q = 2 Γ(q+1) sin(πq/2) |
//!
//! c_β is the constant in the one-dimensional transform (|x|^β)^∧(t) = c_β |t|^{−1−β}.
//! S_q(α) is the α-th absolute moment of γ_q, the Fourier transform of
//! exp(−|x|^q), and A_q is the limit of t^{1+q} γ_q(t) as t → ∞.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute distance to a pole or excluded integer below which arguments are rejected.
pub const EXCLUSION_TOL: f64 = 1e-6;

// Lanczos approximation, g = 607/128, 15 terms (Godfrey).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

fn lanczos_sum(z: f64) -> f64 {
    LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| {
            acc + c / (z + (i + 1) as f64)
        })
}

/// sin(πx), exact at integers and half-integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // r in [-1, 1], exact for all representable x
    let mut r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    if r == 0.0 {
        return 0.0;
    }
    if r == 0.5 {
        return 1.0;
    }
    if r == -0.5 {
        return -1.0;
    }
    (PI * r).sin()
}

fn near_nonpositive_integer(x: f64) -> bool {
    x < EXCLUSION_TOL && (x - x.round()).abs() < EXCLUSION_TOL
}

/// Γ(x) for real `x` away from the poles {0, −1, −2, …}.
///
/// Lanczos approximation for x ≥ 0.5, reflection Γ(x)Γ(1−x) = π / sin(πx)
/// below. Positive integers up to 171 are returned as exact factorials.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("Gamma of NaN"));
    }
    if near_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x == x.floor() && (1.0..=171.0).contains(&x) {
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power so that t^(z+1/2) does not overflow before exp(-t) damps it
    let half_pow = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half_pow * (half_pow * (-t).exp()) * lanczos_sum(z)
}

/// ln |Γ(x)| for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / sin_pi(x)).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Whether the regime of q is the classical one (q ≤ 2) or above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Classical,
    Supercritical,
}

/// Norm exponent q > 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QExponent(f64);

impl QExponent {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 {
            Ok(QExponent(q))
        } else {
            Err(Error::domain(format!(
                "norm exponent q must be positive, got {q}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn regime(self) -> Regime {
        if self.0 <= 2.0 {
            Regime::Classical
        } else {
            Regime::Supercritical
        }
    }

    /// The excluded moment orders {0, 2, …, 2⌊q/2⌋}.
    pub fn excluded_orders(self) -> impl Iterator<Item = f64> {
        let top = (self.0 / 2.0).floor() as u32;
        (0..=top).map(|k| 2.0 * k as f64)
    }
}

impl TryFrom<f64> for QExponent {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        QExponent::new(q)
    }
}

impl From<QExponent> for f64 {
    fn from(q: QExponent) -> f64 {
        q.0
    }
}

impl fmt::Display for QExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A moment order α paired with its q: −1 < α < q, off the excluded even integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentOrder {
    alpha: f64,
    q: QExponent,
}

impl MomentOrder {
    pub fn new(alpha: f64, q: QExponent) -> Result<Self> {
        if !(alpha > -1.0 && alpha < q.value()) {
            return Err(Error::domain(format!(
                "moment order alpha = {alpha} outside (-1, {q})"
            )));
        }
        if let Some(k) = q
            .excluded_orders()
            .find(|k| (alpha - k).abs() < EXCLUSION_TOL)
        {
            return Err(Error::domain(format!(
                "moment order alpha = {alpha} is within {EXCLUSION_TOL} of excluded order {k}"
            )));
        }
        Ok(MomentOrder { alpha, q })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn q(&self) -> QExponent {
        self.q
    }
}

/// Exponent β of ‖x‖_q^β in ambient dimension n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPower {
    pub beta: f64,
    pub n: usize,
}

impl RadialPower {
    pub fn new(beta: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension n must be at least 1"));
        }
        if !beta.is_finite() {
            return Err(Error::domain(format!("beta must be finite, got {beta}")));
        }
        Ok(RadialPower { beta, n })
    }

    /// Checks −n < β < qn and that β/q is not a non-negative integer.
    pub fn check_against(&self, q: QExponent) -> Result<()> {
        let n = self.n as f64;
        let qv = q.value();
        if !(self.beta > -n && self.beta < qv * n) {
            return Err(Error::domain(format!(
                "beta = {} outside (-{n}, {})",
                self.beta,
                qv * n
            )));
        }
        let ratio = self.beta / qv;
        if ratio > -EXCLUSION_TOL && (ratio - ratio.round()).abs() < EXCLUSION_TOL {
            return Err(Error::domain(format!(
                "beta/q = {ratio} is a non-negative integer"
            )));
        }
        Ok(())
    }
}

/// The constant c_β with (|x|^β)^∧(t) = c_β |t|^{−1−β} in one dimension.
pub fn parseval_constant(beta: f64) -> Result<f64> {
    if !(beta > -1.0 + EXCLUSION_TOL) || !beta.is_finite() {
        return Err(Error::domain(format!(
            "parseval constant requires beta in (-1, inf), got {beta}"
        )));
    }
    if beta > -EXCLUSION_TOL {
        let half = beta / 2.0;
        if (half - half.round()).abs() < EXCLUSION_TOL / 2.0 {
            return Err(Error::domain(format!(
                "parseval constant undefined at even integer beta = {beta}"
            )));
        }
    }
    let num = 2f64.powf(beta + 1.0) * PI.sqrt() * gamma_fn((beta + 1.0) / 2.0)?;
    Ok(num / gamma_fn(-beta / 2.0)?)
}

/// Closed form of S_q(α) = ∫ |t|^α γ_q(t) dt.
pub fn sq_closed_form(order: MomentOrder) -> Result<f64> {
    let a = order.alpha();
    let q = order.q().value();
    let num = 2f64.powf(a + 2.0) * PI.sqrt() * gamma_fn(-a / q)? * gamma_fn((a + 1.0) / 2.0)?;
    Ok(num / (q * gamma_fn(-a / 2.0)?))
}

/// A_q = 2Γ(q+1) sin(πq/2), the limit of t^{1+q} γ_q(t).
pub fn tail_constant(q: QExponent) -> f64 {
    2.0 * gamma_unchecked(q.value() + 1.0) * sin_pi(q.value() / 2.0)
}
