//! Numerical audit of one constructed attack.

use serde::Serialize;

use crate::attack::{
    build_eve_states, build_isometry, disturbance_per_state, AttackParams, ErrorLayout,
};
use crate::info::i_ae;
use crate::optimize::{w_domain, STATIONARITY_STEP};
use crate::protocol::ProtocolSpec;

/// Threshold for the exact structural checks.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Threshold on `|∂_w I_AE|` for the stationarity check.
pub const STATIONARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub residual: Option<f64>,
    pub threshold: Option<f64>,
    pub pass: bool,
    /// Informational checks never fail the report.
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl VerifyCheck {
    fn bounded(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        VerifyCheck {
            name: name.into(),
            residual: Some(residual),
            threshold: Some(threshold),
            pass: residual <= threshold,
            informational: false,
            detail: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub bases: usize,
    #[serde(rename = "D")]
    pub disturbance: f64,
    pub w: f64,
    pub s: Option<f64>,
    pub layout: ErrorLayout,
    pub checks: Vec<VerifyCheck>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&VerifyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn finish(
    spec: &ProtocolSpec,
    disturbance: f64,
    w: f64,
    s: Option<f64>,
    layout: ErrorLayout,
    checks: Vec<VerifyCheck>,
) -> VerifyReport {
    let pass = checks.iter().all(|c| c.pass || c.informational);
    VerifyReport {
        dim: spec.dim(),
        bases: spec.bases_count(),
        disturbance,
        w,
        s,
        layout,
        checks,
        pass,
    }
}

/// Build the attack at `(D, w)` and check it. Construction errors become a
/// failed `construction` check rather than an `Err`.
pub fn verify_attack(
    spec: &ProtocolSpec,
    disturbance: f64,
    w: f64,
    layout: ErrorLayout,
) -> VerifyReport {
    let built = AttackParams::new(*spec, disturbance, w).and_then(|p| {
        let p = p.with_layout(layout);
        Ok((p, build_eve_states(&p)?, build_isometry(&p)?))
    });
    let (params, states, iso) = match built {
        Ok(parts) => parts,
        Err(e) => {
            let check = VerifyCheck {
                name: "construction".into(),
                residual: None,
                threshold: None,
                pass: false,
                informational: false,
                detail: Some(e.to_string()),
            };
            return finish(spec, disturbance, w, None, layout, vec![check]);
        }
    };

    let mut checks = vec![VerifyCheck::bounded(
        "isometry",
        iso.isometry_residual(),
        STRUCTURE_TOL,
    )];
    for basis in spec.bases() {
        let worst = match disturbance_per_state(&iso, &basis) {
            Ok(ds) => ds
                .iter()
                .map(|x| (x - disturbance).abs())
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        };
        checks.push(VerifyCheck::bounded(
            format!("equal_disturbance[{}]", basis.label()),
            worst,
            STRUCTURE_TOL,
        ));
    }
    let profile = states.profile();
    checks.push(VerifyCheck::bounded(
        "eve_state_normalization",
        states.normalization_residual(),
        STRUCTURE_TOL,
    ));
    checks.push(VerifyCheck::bounded(
        "cross_block_orthogonality",
        states.cross_block_residual(),
        STRUCTURE_TOL,
    ));
    checks.push(VerifyCheck::bounded(
        "scalar_products_xyzt",
        profile.max_vanishing(),
        STRUCTURE_TOL,
    ));
    checks.push(VerifyCheck::bounded(
        "overlap_w",
        (profile.w - w).abs().max(profile.w_spread),
        STRUCTURE_TOL,
    ));
    checks.push(VerifyCheck::bounded(
        "overlap_s",
        (profile.s - params.s()).abs().max(profile.s_spread),
        STRUCTURE_TOL,
    ));
    checks.push(VerifyCheck::bounded(
        "unitarity_relations",
        states.unitarity_relation_residual(disturbance),
        STRUCTURE_TOL,
    ));

    let stationarity = w_domain(spec, disturbance).and_then(|(lo, hi)| {
        let h = STATIONARITY_STEP;
        let x = w.clamp(lo + h, hi - h);
        let f = |v: f64| i_ae(spec, disturbance, v);
        Ok(((f(x + h)? - f(x - h)?) / (2.0 * h)).abs())
    });
    let mut check = match stationarity {
        Ok(r) => VerifyCheck::bounded("stationarity", r, STATIONARITY_TOL),
        Err(e) => VerifyCheck {
            name: "stationarity".into(),
            residual: None,
            threshold: Some(STATIONARITY_TOL),
            pass: false,
            informational: true,
            detail: Some(e.to_string()),
        },
    };
    check.informational = true;
    checks.push(check);

    finish(spec, disturbance, w, Some(params.s()), layout, checks)
}
