//! Maximizing Eve's information over the free overlap `w`, and locating the
//! disturbance at which her information overtakes Bob's.

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::info::{i_ab, i_ae, lambda_d, phi_d};
use crate::protocol::ProtocolSpec;

/// Admissible w-intervals are shrunk by this much at both ends.
pub const ENDPOINT_SHRINK: f64 = 1e-9;
/// Step for the central-difference stationarity check.
pub const STATIONARITY_STEP: f64 = 1e-5;
/// Step for the second-difference concavity witness.
pub const CONCAVITY_STEP: f64 = 1e-4;
/// Default w-tolerance for golden-section search.
pub const DEFAULT_W_TOL: f64 = 1e-10;
/// Default bracket width for the critical-disturbance bisection.
pub const DEFAULT_DC_TOL: f64 = 1e-12;
/// Bisection bracket is `[BRACKET_MARGIN, (d-1)/d - BRACKET_MARGIN]`.
pub const BRACKET_MARGIN: f64 = 1e-4;
/// Grid size for `Method::GridScan`.
pub const SCAN_POINTS: usize = 4000;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Optimal overlap `w̄ = d/(d-1)·((d-1)/d - D)` for the two-basis protocol.
pub fn w_bar(d: usize, disturbance: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let df = d as f64;
    check_range("D", disturbance, 0.0, (df - 1.0) / df)?;
    Ok(df / (df - 1.0) * ((df - 1.0) / df - disturbance))
}

/// Raw admissible w-interval (no shrink): every radicand of the closed forms is
/// nonnegative and `s`, `w` are valid Gram overlaps.
pub fn w_domain(spec: &ProtocolSpec, disturbance: f64) -> Result<(f64, f64)> {
    check_range("D", disturbance, 0.0, spec.max_disturbance())?;
    let d = spec.dim() as f64;
    let (lo, hi) = if spec.is_three_basis() {
        let lo = if disturbance > 0.0 {
            (4.0 - 3.0 / disturbance).max(-0.5)
        } else {
            -0.5
        };
        (lo, 1.0)
    } else {
        let hi = if disturbance > 0.0 {
            ((d - disturbance * (d + 1.0)) / (disturbance * (d - 1.0))).min(1.0)
        } else {
            1.0
        };
        (-1.0 / (d - 1.0), hi)
    };
    if lo >= hi {
        return Err(Error::EmptyInterval { disturbance });
    }
    Ok((lo, hi))
}

/// Search interval: `w_domain` shrunk by `ENDPOINT_SHRINK` at both ends.
pub fn search_interval(spec: &ProtocolSpec, disturbance: f64) -> Result<(f64, f64)> {
    let (lo, hi) = w_domain(spec, disturbance)?;
    let (lo, hi) = (lo + ENDPOINT_SHRINK, hi - ENDPOINT_SHRINK);
    if lo >= hi {
        return Err(Error::EmptyInterval { disturbance });
    }
    Ok((lo, hi))
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "golden section needs lo < hi and tol > 0 (got [{lo}, {hi}], tol {tol})"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..500 {
        if b - a <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Bisection for a sign change of `g` on `[lo, hi]`; needs `g(lo) < 0 < g(hi)`.
/// Returns the final bracket.
pub fn bisect<G>(mut g: G, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let g_lo = g(lo)?;
    let g_hi = g(hi)?;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid)? < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    GoldenSection,
    /// Dense grid over the whole search interval, refined by golden section
    /// around the best cell. Finds the global maximum when `I_AE` is not unimodal.
    GridScan,
}

impl Method {
    /// Analytic `w̄` for two bases, golden section for three.
    pub fn default_for(spec: &ProtocolSpec) -> Self {
        if spec.is_three_basis() {
            Method::GoldenSection
        } else {
            Method::Analytic
        }
    }
}

fn grid_scan_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let at = |k: usize| lo + (hi - lo) * k as f64 / SCAN_POINTS as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..=SCAN_POINTS {
        let v = f(at(k))?;
        if v > best.1 {
            best = (k, v);
        }
    }
    let (k, v) = best;
    let (a, b) = (at(k.saturating_sub(1)), at((k + 1).min(SCAN_POINTS)));
    let refined = golden_section_max(&f, a, b, tol)?;
    Ok(if refined.1 >= v { refined } else { (at(k), v) })
}

/// Result of maximizing `I_AE` over `w` at fixed `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimumReport {
    #[serde(rename = "D")]
    pub disturbance: f64,
    pub w_opt: f64,
    pub i_ae_opt: f64,
    pub method: Method,
    /// `|∂_w I_AE|` at `w_opt`, central difference.
    pub stationarity_residual: f64,
    /// Second difference of `I_AE` at `w_opt`; negative at a strict maximum.
    pub concavity_witness: f64,
}

/// A stencil `[x - h, x + h]` moved inside `[lo, hi]` if it sticks out.
fn stencil_center(x: f64, h: f64, lo: f64, hi: f64) -> f64 {
    x.clamp(lo + h, hi - h)
}

fn central_derivative<F>(f: &F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

fn second_difference<F>(f: &F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(x + h)? - 2.0 * f(x)? + f(x - h)?) / (h * h))
}

/// Maximize `I_AE(D, ·)`: analytic `w̄` for two bases, golden-section for three.
pub fn maximize_w(spec: &ProtocolSpec, disturbance: f64, tol: f64) -> Result<OptimumReport> {
    maximize_w_with(spec, disturbance, tol, Method::default_for(spec))
}

/// As [`maximize_w`] with an explicit method. `Method::Analytic` is only
/// available for two-basis protocols.
pub fn maximize_w_with(
    spec: &ProtocolSpec,
    disturbance: f64,
    tol: f64,
    method: Method,
) -> Result<OptimumReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    let (lo, hi) = search_interval(spec, disturbance)?;
    let objective = |w: f64| i_ae(spec, disturbance, w);
    let (w_opt, i_ae_opt) = match method {
        Method::Analytic => {
            if spec.is_three_basis() {
                return Err(Error::InvalidArgument(
                    "no closed-form optimum for the three-basis protocol".into(),
                ));
            }
            let w = w_bar(spec.dim(), disturbance)?;
            (w, objective(w)?)
        }
        Method::GoldenSection => golden_section_max(objective, lo, hi, tol)?,
        Method::GridScan => grid_scan_max(objective, lo, hi, tol)?,
    };

    let (raw_lo, raw_hi) = w_domain(spec, disturbance)?;
    let x = stencil_center(w_opt, STATIONARITY_STEP, raw_lo, raw_hi);
    let stationarity_residual = central_derivative(&objective, x, STATIONARITY_STEP)?.abs();
    let x = stencil_center(w_opt, CONCAVITY_STEP, raw_lo, raw_hi);
    let concavity_witness =
        second_difference(&objective, x, CONCAVITY_STEP)? * CONCAVITY_STEP.powi(2);

    Ok(OptimumReport {
        disturbance,
        w_opt,
        i_ae_opt,
        method,
        stationarity_residual,
        concavity_witness,
    })
}

/// `max_w I_AE(D, w)`.
pub fn i_ae_opt(spec: &ProtocolSpec, disturbance: f64) -> Result<f64> {
    Ok(maximize_w(spec, disturbance, DEFAULT_W_TOL)?.i_ae_opt)
}

/// Disturbance at which Eve's optimal information equals Bob's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub dim: usize,
    pub bases_count: usize,
    #[serde(rename = "D_c")]
    pub critical: f64,
    /// `I_AE,opt(D_c) - I_AB(D_c)`.
    pub gap_at_dc: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
}

/// Bisection on `I_AE,opt(D) - I_AB(D)` over `[1e-4, (d-1)/d - 1e-4]`.
pub fn critical_disturbance(spec: &ProtocolSpec, tol: f64) -> Result<CriticalPoint> {
    critical_disturbance_with(spec, tol, Method::default_for(spec))
}

/// As [`critical_disturbance`], maximizing over `w` with `method`.
pub fn critical_disturbance_with(
    spec: &ProtocolSpec,
    tol: f64,
    method: Method,
) -> Result<CriticalPoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    let gap = |dist: f64| {
        let opt = maximize_w_with(spec, dist, DEFAULT_W_TOL, method)?;
        Ok(opt.i_ae_opt - i_ab(spec.dim(), dist)?)
    };
    let (a, b) = bisect(
        gap,
        BRACKET_MARGIN,
        spec.max_disturbance() - BRACKET_MARGIN,
        tol,
    )?;
    let critical = 0.5 * (a + b);
    Ok(CriticalPoint {
        dim: spec.dim(),
        bases_count: spec.bases_count(),
        critical,
        gap_at_dc: gap(critical)?,
        bracket: (a, b),
    })
}

/// `D_c(d) = (1 - 1/√d)/2` for the two-basis protocol.
pub fn d_c_closed_form(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(0.5 * (1.0 - 1.0 / (d as f64).sqrt()))
}

/// Numerical witnesses of the optimality argument for the two-basis protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub dim: usize,
    #[serde(rename = "D")]
    pub disturbance: f64,
    pub w_bar: f64,
    /// `|φ_d(D, w̄) - λ_d(w̄)|`.
    pub phi_equals_lambda: f64,
    /// `|∂_wφ_d / ∂_wλ_d - D/(D-1)|` at `w̄`.
    pub derivative_ratio: f64,
    /// `|∂_w I_AE|` at `w̄`.
    pub stationarity: f64,
    /// Largest second-difference quotient of `I_AE` over the interior grid.
    pub max_second_difference: f64,
    /// Where that maximum occurs.
    pub worst_w: f64,
    /// Grid endpoints.
    pub grid: (f64, f64),
}

impl AppendixReport {
    pub fn concave_on_grid(&self) -> bool {
        self.max_second_difference < 0.0
    }
}

/// Number of interior grid points for the concavity scan.
pub const CONCAVITY_GRID: usize = 100;

/// Optimality witnesses for the qutrit two-basis protocol at `0 < D < 2/3`.
pub fn appendix_checks(disturbance: f64, step: f64) -> Result<AppendixReport> {
    appendix_checks_for(3, disturbance, step)
}

/// As [`appendix_checks`] in dimension `d`, for `0 < D < (d-1)/d`.
pub fn appendix_checks_for(d: usize, disturbance: f64, step: f64) -> Result<AppendixReport> {
    let spec = ProtocolSpec::two_bases(d)?;
    let top = spec.max_disturbance();
    if !(disturbance > 0.0 && disturbance < top) {
        return Err(Error::OutOfDomain {
            name: "D",
            value: disturbance,
            lo: 0.0,
            hi: top,
        });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be > 0, got {step}"
        )));
    }
    let wb = w_bar(d, disturbance)?;
    let phi = |w: f64| phi_d(disturbance, w, d);
    let lambda = |w: f64| lambda_d(w, d);
    let objective = |w: f64| i_ae(&spec, disturbance, w);

    let phi_equals_lambda = (phi(wb)? - lambda(wb)?).abs();
    let ratio = central_derivative(&phi, wb, step)? / central_derivative(&lambda, wb, step)?;
    let derivative_ratio = (ratio - disturbance / (disturbance - 1.0)).abs();
    let stationarity = central_derivative(&objective, wb, step)?.abs();

    let (lo, hi) = search_interval(&spec, disturbance)?;
    let mut max_second_difference = f64::NEG_INFINITY;
    let mut worst_w = lo;
    for k in 1..=CONCAVITY_GRID {
        let w = lo + (hi - lo) * k as f64 / (CONCAVITY_GRID + 1) as f64;
        let x = stencil_center(w, step, lo, hi);
        let sd = second_difference(&objective, x, step)?;
        if sd > max_second_difference {
            max_second_difference = sd;
            worst_w = w;
        }
    }

    Ok(AppendixReport {
        dim: d,
        disturbance,
        w_bar: wb,
        phi_equals_lambda,
        derivative_ratio,
        stationarity,
        max_second_difference,
        worst_w,
        grid: (lo, hi),
    })
}
