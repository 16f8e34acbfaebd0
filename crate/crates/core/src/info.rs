//! Closed-form information quantities, in dits (log base d).

use serde::Serialize;

use crate::attack::clamped_sqrt;
use crate::error::{check_range, Error, Result};
use crate::protocol::ProtocolSpec;

/// Probabilities may overshoot [0, 1] by this much from round-off.
pub const PROB_SLACK: f64 = 1e-14;

/// `x·log_d(x)` with `0·log 0 = 0`.
fn xlogx(x: f64, ln_d: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln() / ln_d
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

fn clamp_prob(name: &'static str, x: f64) -> Result<f64> {
    check_range(name, x, -PROB_SLACK, 1.0 + PROB_SLACK)?;
    Ok(x.clamp(0.0, 1.0))
}

/// Information of a d-ary symmetric channel with success probability `x`:
/// `1 + x·log_d x + (1-x)·log_d((1-x)/(d-1))`.
pub fn i_d(x: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    let x = clamp_prob("x", x)?;
    let ln_d = (d as f64).ln();
    let miss = 1.0 - x;
    let spread = if miss <= 0.0 {
        0.0
    } else {
        miss * (miss / (d as f64 - 1.0)).ln() / ln_d
    };
    Ok(1.0 + xlogx(x, ln_d) + spread)
}

fn check_disturbance(disturbance: f64) -> Result<()> {
    if disturbance >= 1.0 {
        return Err(Error::Singular);
    }
    check_range("D", disturbance, 0.0, 1.0)
}

/// Eve's success probability on rounds Bob received correctly, two-basis protocol.
pub fn phi_d(disturbance: f64, w: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    check_disturbance(disturbance)?;
    let df = d as f64;
    let spread = 1.0 + (df - 1.0) * w;
    let radicand =
        (df - 1.0) * disturbance * spread * (df - disturbance * (1.0 + df + (df - 1.0) * w));
    let root = clamped_sqrt("phi_d", radicand)?;
    let linear = df + disturbance * (-2.0 + (df - 2.0) * (df - 1.0) * w);
    clamp_prob(
        "phi_d",
        (linear + 2.0 * root) / (df * df * (1.0 - disturbance)),
    )
}

/// Eve's success probability on rounds where Bob got an error.
pub fn lambda_d(w: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    let dm1 = d as f64 - 1.0;
    check_range("w", w, -1.0 / dm1 - PROB_SLACK, 1.0 + PROB_SLACK)?;
    let spread = 1.0 + dm1 * w;
    let root = clamped_sqrt("lambda_d", (1.0 - w) * spread)?;
    let df = d as f64;
    clamp_prob(
        "lambda_d",
        (spread + dm1 * dm1 * (1.0 - w) + 2.0 * dm1 * root) / (df * df),
    )
}

/// `(μ, ν)`: Eve's success probabilities for the three-basis qutrit protocol.
pub fn mu_nu_threebasis(disturbance: f64, w: f64) -> Result<(f64, f64)> {
    check_disturbance(disturbance)?;
    let radicand = 2.0 * disturbance * (3.0 + disturbance * (w - 4.0)) * (1.0 - w);
    let root = clamped_sqrt("mu", radicand)?;
    let denom = 9.0 * (1.0 - disturbance);
    let mu = clamp_prob(
        "mu",
        (3.0 - disturbance * (w + 2.0)) / denom + 2.0 * root / denom,
    )?;
    let nu_root = clamped_sqrt("nu", 1.0 + w - 2.0 * w * w)?;
    let nu = clamp_prob("nu", (5.0 - 2.0 * w + 4.0 * nu_root) / 9.0)?;
    Ok((mu, nu))
}

/// `(P(correct guess | Bob correct), P(correct guess | Bob error))`.
pub fn guess_pair(spec: &ProtocolSpec, disturbance: f64, w: f64) -> Result<(f64, f64)> {
    if spec.is_three_basis() {
        mu_nu_threebasis(disturbance, w)
    } else {
        Ok((phi_d(disturbance, w, spec.dim())?, lambda_d(w, spec.dim())?))
    }
}

/// Alice-Eve mutual information `(1-D)·I_d(g₁) + D·I_d(g₂)`.
pub fn i_ae(spec: &ProtocolSpec, disturbance: f64, w: f64) -> Result<f64> {
    let (g1, g2) = guess_pair(spec, disturbance, w)?;
    let d = spec.dim();
    Ok((1.0 - disturbance) * i_d(g1, d)? + disturbance * i_d(g2, d)?)
}

/// Alice-Bob mutual information `1 + (1-D)·log_d(1-D) + D·log_d(D/(d-1))`.
pub fn i_ab(d: usize, disturbance: f64) -> Result<f64> {
    i_d(1.0 - disturbance, d)
}

/// Eve's overall probability of guessing Alice's symbol, `(1-D)·g₁ + D·g₂`.
pub fn guess_probability(spec: &ProtocolSpec, disturbance: f64, w: f64) -> Result<f64> {
    let (g1, g2) = guess_pair(spec, disturbance, w)?;
    Ok((1.0 - disturbance) * g1 + disturbance * g2)
}

/// One sample of the information trade-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoPoint {
    #[serde(rename = "D")]
    pub disturbance: f64,
    pub w: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub p_eve_correct: f64,
}

impl InfoPoint {
    pub fn evaluate(spec: &ProtocolSpec, disturbance: f64, w: f64) -> Result<Self> {
        Ok(InfoPoint {
            disturbance,
            w,
            i_ab: i_ab(spec.dim(), disturbance)?,
            i_ae: i_ae(spec, disturbance, w)?,
            p_eve_correct: guess_probability(spec, disturbance, w)?,
        })
    }
}
