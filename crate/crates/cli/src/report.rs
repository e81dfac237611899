//! Serializable run reports. JSON is the primary format and round-trips
//! losslessly; CSV flattens verdict-shaped results into rows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use weightlab_core::matrix::{MatrixVerdict, RowOutcome, WeightMatrix};
use weightlab_core::reproduce::StepReport;
use weightlab_core::seqcore::{LogSeq, RelationResult};
use weightlab_core::trend::Verdict;
use weightlab_core::witness::{BlockWitness, FamilyTag};

use crate::config::Config;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub config: Config,
    pub results: Vec<ResultEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub name: String,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Verdict { verdict: Verdict },
    Relation { relation: RelationResult },
    Value { value: f64 },
    VerdictMap { map: BTreeMap<String, Verdict> },
    Matrix { matrix_verdict: MatrixVerdict },
    Families { families: Vec<FamilyTag> },
    Step { step: StepReport },
    IndexPair { pair: Option<(usize, usize)> },
    Sequence { sequence: LogSeq },
    MatrixData { matrix: WeightMatrix },
    Blocks { blocks: BlockWitness },
    Text { text: String },
}

impl Report {
    pub fn new(command: &str, config: &Config) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: BTreeMap::new(),
            config: config.clone(),
            results: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, name: impl Into<String>, payload: Payload) -> &mut Self {
        self.results.push(ResultEntry {
            name: name.into(),
            payload,
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Any inconclusive verdict anywhere in the results (drives `--strict`).
    pub fn has_inconclusive(&self) -> bool {
        use weightlab_core::trend::Trend;
        let verdict_inconclusive = |v: &Verdict| v.trend == Trend::Inconclusive;
        self.results.iter().any(|entry| match &entry.payload {
            Payload::Verdict { verdict } => verdict_inconclusive(verdict),
            Payload::VerdictMap { map } => map.values().any(verdict_inconclusive),
            Payload::Matrix { matrix_verdict } => verdict_inconclusive(&matrix_verdict.verdict),
            Payload::Families { families } => {
                families.iter().any(|t| verdict_inconclusive(&t.verdict))
            }
            _ => false,
        })
    }

    /// Flatten to CSV: `result,condition,at_truncation,trend,constant,witness`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("result,condition,at_truncation,trend,constant,witness\n");
        let fmt_verdict = |out: &mut String, name: &str, cond: &str, v: &Verdict| {
            let constant = v
                .constant()
                .map(|c| format!("{c}"))
                .unwrap_or_default();
            let witness = v
                .witness
                .as_ref()
                .map(|w| {
                    w.iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(";")
                })
                .unwrap_or_default();
            out.push_str(&format!(
                "{name},{cond},{},{:?},{constant},{witness}\n",
                v.at_truncation, v.trend
            ));
        };
        for entry in &self.results {
            match &entry.payload {
                Payload::Verdict { verdict } => {
                    fmt_verdict(&mut out, &entry.name, &entry.name, verdict)
                }
                Payload::VerdictMap { map } => {
                    for (cond, v) in map {
                        fmt_verdict(&mut out, &entry.name, cond, v);
                    }
                }
                Payload::Matrix { matrix_verdict } => {
                    fmt_verdict(
                        &mut out,
                        &entry.name,
                        &matrix_verdict.condition,
                        &matrix_verdict.verdict,
                    );
                    for (key, outcome) in &matrix_verdict.per_row {
                        let key_s = key
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(";");
                        let (trend, constant, witness) = match outcome {
                            RowOutcome::Certified { y, log_constant } => {
                                ("certified", format!("{}", log_constant.exp()), y.to_string())
                            }
                            RowOutcome::Failed { best_y, log_constant } => {
                                ("failed", format!("{}", log_constant.exp()), best_y.to_string())
                            }
                            RowOutcome::GridExhausted { best_y, .. } => {
                                ("grid_exhausted", String::new(), best_y.to_string())
                            }
                        };
                        out.push_str(&format!(
                            "{},{}[x={key_s}],{},{trend},{constant},{witness}\n",
                            entry.name, matrix_verdict.condition, outcome.certified()
                        ));
                    }
                }
                Payload::Relation { relation } => {
                    out.push_str(&format!(
                        "{},relation,true,{:?},{},\n",
                        entry.name, relation.kind, relation.sup_ratio_root
                    ));
                }
                Payload::Value { value } => {
                    out.push_str(&format!("{},value,true,,{value},\n", entry.name));
                }
                Payload::Families { families } => {
                    for tag in families {
                        let witness = tag
                            .witness_param
                            .map(|w| w.to_string())
                            .unwrap_or_default();
                        out.push_str(&format!(
                            "{},{},{},{:?},,{witness}\n",
                            entry.name,
                            tag.family.name(),
                            tag.verdict.at_truncation,
                            tag.verdict.trend
                        ));
                    }
                }
                Payload::Step { step } => {
                    for check in &step.checks {
                        out.push_str(&format!(
                            "{},{},{},,,\n",
                            step.step,
                            check.name.replace(',', ";"),
                            check.passed
                        ));
                    }
                }
                Payload::IndexPair { pair } => {
                    let w = pair
                        .map(|(j, k)| format!("{j};{k}"))
                        .unwrap_or_default();
                    out.push_str(&format!("{},mg_violation,true,,,{w}\n", entry.name));
                }
                Payload::Sequence { .. }
                | Payload::MatrixData { .. }
                | Payload::Blocks { .. }
                | Payload::Text { .. } => {
                    out.push_str(&format!("{},data,true,,,\n", entry.name));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use weightlab_core::trend::Trend;

    #[test]
    fn json_round_trip_is_lossless() {
        let cfg = Config::default();
        let mut report = Report::new("check", &cfg);
        report.input("seq", "gevrey:1");
        report.push(
            "lc",
            Payload::Verdict {
                verdict: Verdict {
                    at_truncation: true,
                    trend: Trend::Holds,
                    log_constant: Some(0.123456789012345),
                    witness: Some(vec![3, 4]),
                },
            },
        );
        report.push("value", Payload::Value { value: 1.0 / 3.0 });
        let json = report.to_json();
        let parsed: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn csv_has_verdict_columns() {
        let cfg = Config::default();
        let mut report = Report::new("check", &cfg);
        report.push(
            "mg",
            Payload::Verdict {
                verdict: Verdict {
                    at_truncation: true,
                    trend: Trend::Holds,
                    log_constant: Some(0.0),
                    witness: None,
                },
            },
        );
        let csv = report.to_csv();
        assert!(csv.starts_with("result,condition,at_truncation,trend,constant,witness"));
        assert!(csv.contains("mg,mg,true,Holds,1,"));
    }
}
