//! Name and file resolution for sequences, weight functions, convex weights
//! and matrices. Catalog names are tried first; anything else is treated as
//! a path. Schema failures and validation failures carry distinct exit
//! codes per the process contract.

use std::path::Path;
use std::sync::Arc;

use weightlab_core::catalog;
use weightlab_core::matrix::{make_constant, make_gevrey, WeightMatrix};
use weightlab_core::seqcore::LogSeq;
use weightlab_core::weightfn::{
    associated_matrix, phi_matrix, power_conjugate_constant, ConvexWeight, OmegaParams,
    WeightFunction,
};

use crate::config::Config;

/// Exit codes: 2 validation, 64 usage, 65 schema.
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_STRICT_INCONCLUSIVE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_SCHEMA: i32 = 65;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl ToString) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: msg.to_string(),
        }
    }

    pub fn schema(msg: impl ToString) -> Self {
        CliError {
            code: EXIT_SCHEMA,
            message: msg.to_string(),
        }
    }

    pub fn usage(msg: impl ToString) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: msg.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn looks_like_path(name: &str) -> bool {
    name.contains('/') || name.ends_with(".json") || name.ends_with(".csv") || Path::new(name).exists()
}

/// Resolve a sequence: catalog name or JSON file `{label, log_values}`.
pub fn load_seq(name: &str, n: usize) -> CliResult<LogSeq> {
    if !looks_like_path(name) {
        return catalog::by_name(name, n).map_err(CliError::validation);
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| CliError::validation(format!("reading {name}: {e}")))?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::schema(format!("{name}: {e}")))?;
    let label = raw
        .get("label")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::schema(format!("{name}: missing `label`")))?;
    let values = raw
        .get("log_values")
        .and_then(|v| v.as_array())
        .ok_or_else(|| CliError::schema(format!("{name}: missing `log_values`")))?;
    let log_values: Vec<f64> = values
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| CliError::schema(format!("{name}: non-numeric entry"))))
        .collect::<CliResult<_>>()?;
    LogSeq::new(label, log_values).map_err(CliError::validation)
}

/// Resolve a weight function: `log_power:s`, `gevrey_weight:s`, `linear`,
/// `log`, or a CSV file of `t,omega` lines.
pub fn load_omega(name: &str, params: OmegaParams) -> CliResult<WeightFunction> {
    if looks_like_path(name) {
        let text = std::fs::read_to_string(name)
            .map_err(|e| CliError::validation(format!("reading {name}: {e}")))?;
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("t,") {
                continue;
            }
            let Some((t, v)) = line.split_once(',') else {
                return Err(CliError::schema(format!("{name}:{}: expected t,omega", i + 1)));
            };
            let t: f64 = t
                .trim()
                .parse()
                .map_err(|e| CliError::schema(format!("{name}:{}: {e}", i + 1)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| CliError::schema(format!("{name}:{}: {e}", i + 1)))?;
            points.push((t, v));
        }
        return WeightFunction::from_table(name, points, params).map_err(CliError::validation);
    }
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let parse_arg = || -> CliResult<f64> {
        arg.and_then(|a| a.parse().ok())
            .ok_or_else(|| CliError::validation(format!("weight `{name}` needs a numeric parameter")))
    };
    match head {
        "log_power" => WeightFunction::log_power(parse_arg()?, params).map_err(CliError::validation),
        "gevrey_weight" => {
            WeightFunction::gevrey_weight(parse_arg()?, params).map_err(CliError::validation)
        }
        "linear" => WeightFunction::linear(params).map_err(CliError::validation),
        "log" => WeightFunction::log_weight(params).map_err(CliError::validation),
        _ => Err(CliError::validation(format!("unknown weight function `{name}`"))),
    }
}

/// Resolve a convex weight: `power:p`, `tlogt`, `exp_gap`, or
/// `conj_power:s` (the closed-form conjugate of `y^s`).
pub fn load_phi(name: &str) -> CliResult<ConvexWeight> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let parse_arg = || -> CliResult<f64> {
        arg.and_then(|a| a.parse().ok())
            .ok_or_else(|| CliError::validation(format!("convex weight `{name}` needs a parameter")))
    };
    match head {
        "power" => ConvexWeight::power(parse_arg()?).map_err(CliError::validation),
        "tlogt" => ConvexWeight::t_log_t().map_err(CliError::validation),
        "exp_gap" => ConvexWeight::exp_gap().map_err(CliError::validation),
        "conj_power" => {
            let s = parse_arg()?;
            if s <= 1.0 {
                return Err(CliError::validation("conj_power needs s > 1"));
            }
            let r = power_conjugate_constant(s);
            let exponent = s / (s - 1.0);
            ConvexWeight::new(
                format!("conj_power:{s}"),
                Arc::new(move |t: f64| if t <= 0.0 { 0.0 } else { r * t.powf(exponent) }),
                ConvexWeight::default_grid(),
            )
            .map_err(CliError::validation)
        }
        _ => Err(CliError::validation(format!("unknown convex weight `{name}`"))),
    }
}

/// Resolve a matrix: `gevrey`, `omega:<weight>`, `phi:<convex-weight>`,
/// `constant:<seq>`, or a JSON file `{label, lambda, rows}`.
pub fn load_matrix(spec: &str, cfg: &Config) -> CliResult<WeightMatrix> {
    if looks_like_path(spec) {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::validation(format!("reading {spec}: {e}")))?;
        let raw: WeightMatrix =
            serde_json::from_str(&text).map_err(|e| CliError::schema(format!("{spec}: {e}")))?;
        // Re-validate through the constructor.
        return WeightMatrix::new(raw.label, raw.lambda, raw.rows).map_err(CliError::validation);
    }
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    match head {
        "gevrey" => make_gevrey(&cfg.lambda_grid, cfg.n).map_err(CliError::validation),
        "omega" => {
            let name = arg.ok_or_else(|| CliError::validation("omega:<weight> needs a name"))?;
            let w = load_omega(name, cfg.omega_params())?;
            associated_matrix(
                &w,
                &cfg.lambda_grid,
                cfg.n,
                cfg.trend_params(),
                cfg.omega_params(),
            )
            .map_err(CliError::validation)
        }
        "phi" => {
            let name = arg.ok_or_else(|| CliError::validation("phi:<convex-weight> needs a name"))?;
            let cw = load_phi(name)?;
            phi_matrix(&cw, &cfg.lambda_grid, cfg.n).map_err(CliError::validation)
        }
        "constant" => {
            let name = arg.ok_or_else(|| CliError::validation("constant:<seq> needs a name"))?;
            let seq = load_seq(name, cfg.n)?;
            make_constant(seq).map_err(CliError::validation)
        }
        _ => Err(CliError::validation(format!("unknown matrix spec `{spec}`"))),
    }
}
