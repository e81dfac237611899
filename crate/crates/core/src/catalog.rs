//! Named sequence constructors addressable from the CLI and test suites.

use crate::seqcore::LogSeq;
use crate::{log_factorial, Error, Result};

/// Construct a catalog sequence by name at truncation `n`.
///
/// Recognized names:
/// - `factorial` — `M_k = k!`
/// - `gevrey:s` — `M_k = k!^(s+1)`, `s > 0`
/// - `constant_one` — `M_k = 1`
/// - `geometric:q` — `M_k = q^k`, `q > 0`
/// - `exp_quadratic` — `M_k = exp(k^2)`
/// - `exp_power:p` — `M_k = exp(k^p)`, `p > 1`
/// - `scaled_factorial:c` — `M_k = c^k k!`, `c > 0`
/// - `sqrt_factorial` — `M_k = k!^(1/2)`
/// - `recip:<name>` — entrywise reciprocal of any catalog sequence
pub fn by_name(name: &str, n: usize) -> Result<LogSeq> {
    if let Some(inner) = name.strip_prefix("recip:") {
        return Ok(by_name(inner, n)?.recip());
    }
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let parse_arg = |what: &str| -> Result<f64> {
        arg.and_then(|a| a.parse::<f64>().ok())
            .ok_or_else(|| Error::UnknownCatalogName(format!("{name} (expected {head}:<{what}>)")))
    };
    match head {
        "factorial" => LogSeq::from_fn(name, n, log_factorial),
        "gevrey" => {
            let s = parse_arg("s")?;
            if s <= 0.0 {
                return Err(Error::UnknownCatalogName(format!("{name} (need s > 0)")));
            }
            LogSeq::from_fn(name, n, |k| (s + 1.0) * log_factorial(k))
        }
        "constant_one" => LogSeq::from_fn(name, n, |_| 0.0),
        "geometric" => {
            let q = parse_arg("q")?;
            if q <= 0.0 {
                return Err(Error::UnknownCatalogName(format!("{name} (need q > 0)")));
            }
            LogSeq::from_fn(name, n, |k| k as f64 * q.ln())
        }
        "exp_quadratic" => LogSeq::from_fn(name, n, |k| (k as f64) * (k as f64)),
        "exp_power" => {
            let p = parse_arg("p")?;
            if p <= 1.0 {
                return Err(Error::UnknownCatalogName(format!("{name} (need p > 1)")));
            }
            LogSeq::from_fn(name, n, |k| (k as f64).powf(p))
        }
        "scaled_factorial" => {
            let c = parse_arg("c")?;
            if c <= 0.0 {
                return Err(Error::UnknownCatalogName(format!("{name} (need c > 0)")));
            }
            LogSeq::from_fn(name, n, |k| log_factorial(k) + k as f64 * c.ln())
        }
        "sqrt_factorial" => LogSeq::from_fn(name, n, |k| 0.5 * log_factorial(k)),
        _ => Err(Error::UnknownCatalogName(name.to_string())),
    }
}

/// The standing catalog used by implication suites and property tests.
pub fn standard_names() -> Vec<&'static str> {
    vec![
        "factorial",
        "gevrey:0.5",
        "gevrey:1",
        "gevrey:2",
        "gevrey:3",
        "constant_one",
        "geometric:2",
        "geometric:4",
        "exp_quadratic",
        "exp_power:1.5",
        "scaled_factorial:2",
        "sqrt_factorial",
    ]
}

/// All standard catalog members at a shared truncation.
pub fn standard(n: usize) -> Vec<LogSeq> {
    standard_names()
        .into_iter()
        .map(|name| by_name(name, n).expect("standard catalog names are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_constructors_produce_expected_values() {
        let f = by_name("factorial", 10).unwrap();
        assert!((f.log(4) - 24.0_f64.ln()).abs() < 1e-9);
        let g = by_name("gevrey:1", 10).unwrap();
        assert!((g.log(3) - (36.0_f64).ln()).abs() < 1e-9);
        let q = by_name("geometric:2", 10).unwrap();
        assert!((q.log(5) - 32.0_f64.ln()).abs() < 1e-12);
        let r = by_name("recip:factorial", 10).unwrap();
        assert!((r.log(4) + 24.0_f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(by_name("gevrey", 10).is_err());
        assert!(by_name("gevrey:-1", 10).is_err());
        assert!(by_name("nope", 10).is_err());
    }

    #[test]
    fn standard_catalog_has_at_least_ten_members() {
        assert!(standard_names().len() >= 10);
        assert_eq!(standard(16).len(), standard_names().len());
    }
}
