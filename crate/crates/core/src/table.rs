//! Information curves over a disturbance grid, with CSV and JSON encodings.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::info::i_ab;
use crate::optimize::{maximize_w, DEFAULT_W_TOL};
use crate::protocol::ProtocolSpec;

/// Significant digits in every serialized number.
pub const SIG_DIGITS: usize = 12;
/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "mub-eve/1";
pub const CSV_HEADER: &str = "D,w_opt,I_AB_dits,I_AE_dits,I_AB_bits,I_AE_bits";

/// `x` to 12 significant digits; scientific notation below `1e-4` in magnitude.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < 1e-4 {
        return format!("{:.*e}", SIG_DIGITS - 1, x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `x` rounded to what [`format_number`] prints.
pub fn round_sig(x: f64) -> f64 {
    format_number(x).parse().unwrap_or(x)
}

/// Round every float in a JSON tree to 12 significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    #[serde(rename = "D")]
    pub disturbance: f64,
    pub w_opt: f64,
    #[serde(rename = "I_AB_dits")]
    pub i_ab: f64,
    #[serde(rename = "I_AE_dits")]
    pub i_ae: f64,
}

impl CurveRow {
    /// Column values in CSV order, bits computed as `dits · log2 d`.
    pub fn columns(&self, d: usize) -> [f64; 6] {
        let bits = (d as f64).log2();
        [
            self.disturbance,
            self.w_opt,
            self.i_ab,
            self.i_ae,
            self.i_ab * bits,
            self.i_ae * bits,
        ]
    }

    /// `I_AE - I_AB`.
    pub fn gap(&self) -> f64 {
        self.i_ae - self.i_ab
    }
}

/// Optimal `I_AE` and `I_AB` sampled on an evenly spaced disturbance grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    spec: ProtocolSpec,
    rows: Vec<CurveRow>,
}

impl CurveTable {
    /// `steps` points from `d_min` to `d_max` inclusive.
    pub fn compute(spec: ProtocolSpec, d_min: f64, d_max: f64, steps: usize) -> Result<Self> {
        let top = spec.max_disturbance();
        if !(0.0 <= d_min && d_min < d_max && d_max <= top) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= d_min < d_max <= {top}, got [{d_min}, {d_max}]"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "steps must be >= 2, got {steps}"
            )));
        }
        let span = d_max - d_min;
        let rows = (0..steps)
            .into_par_iter()
            .map(|k| {
                let dist = if k + 1 == steps {
                    d_max
                } else {
                    d_min + span * k as f64 / (steps - 1) as f64
                };
                let opt = maximize_w(&spec, dist, DEFAULT_W_TOL)?;
                Ok(CurveRow {
                    disturbance: dist,
                    w_opt: opt.w_opt,
                    i_ab: i_ab(spec.dim(), dist)?,
                    i_ae: opt.i_ae_opt,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CurveTable { spec, rows })
    }

    pub fn spec(&self) -> ProtocolSpec {
        self.spec
    }

    pub fn rows(&self) -> &[CurveRow] {
        &self.rows
    }

    /// Index `k` of the first sign change of `I_AE - I_AB` between rows `k` and `k + 1`.
    pub fn crossing(&self) -> Option<usize> {
        self.rows
            .windows(2)
            .position(|pair| pair[0].gap() < 0.0 && pair[1].gap() >= 0.0)
    }

    /// Number of sign changes of `I_AE - I_AB` along the grid.
    pub fn crossing_count(&self) -> usize {
        self.rows
            .windows(2)
            .filter(|pair| (pair[0].gap() < 0.0) != (pair[1].gap() < 0.0))
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .columns(self.spec.dim())
                .iter()
                .map(|&x| format_number(x))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON document; `metadata` is embedded verbatim.
    pub fn to_json(&self, metadata: Value) -> Value {
        let d = self.spec.dim();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let c = row.columns(d);
                json!({
                    "D": c[0],
                    "w_opt": c[1],
                    "I_AB_dits": c[2],
                    "I_AE_dits": c[3],
                    "I_AB_bits": c[4],
                    "I_AE_bits": c[5],
                })
            })
            .collect();
        let mut doc = json!({
            "schema": SCHEMA,
            "metadata": metadata,
            "dim": d,
            "bases": self.spec.bases_count(),
            "rows": rows,
        });
        round_json(&mut doc);
        doc
    }
}

/// Parse CSV written by [`CurveTable::to_csv`] back into numeric rows.
pub fn parse_curve_csv(text: &str) -> Result<Vec<[f64; 6]>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => {
            return Err(Error::InvalidArgument(format!(
                "unexpected CSV header {other:?}"
            )))
        }
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let cells: Vec<f64> = line
                .split(',')
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("row {}: {e}", n + 1)))?;
            cells.try_into().map_err(|v: Vec<f64>| {
                Error::InvalidArgument(format!("row {}: {} columns", n + 1, v.len()))
            })
        })
        .collect()
}
