//! `weightlab`: construct weight sequences, weight functions and weight
//! matrices, check their regularity conditions, compute growth relations and
//! conjugates, and reproduce the library's worked computations.
//!
//! Every command emits a JSON report (CSV with `--format csv`). Exit codes:
//! 0 success, 2 validation error, 3 inconclusive verdicts under `--strict`,
//! 64 usage error, 65 schema error.

mod config;
mod parse;
mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use weightlab_core::fdb::{check_fdb, check_rai, compose_max};
use weightlab_core::matrix::{
    check_inclusion_flags, check_matrix_condition, check_msc, relate_matrices, Flavor,
    MatrixCondition, RelationFlavor,
};
use weightlab_core::reproduce;
use weightlab_core::seqcore::{
    check_dc, check_lc, check_lcset, check_mg, derive, relate, ConvexityView,
};
use weightlab_core::trend::Verdict;
use weightlab_core::weightfn::{check_omega_conditions, check_phi_mg};
use weightlab_core::witness::{
    build_block_witness, characteristic_derivatives, classify_family, find_mg_violation,
};

use config::Config;
use parse::{CliError, CliResult, EXIT_STRICT_INCONCLUSIVE, EXIT_USAGE};
use report::{Payload, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "weightlab", version, about = "Weight sequences, weight functions and weight matrices: conditions, relations and conjugates")]
struct Cli {
    /// Truncation length override.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Parameter grid override (comma-separated).
    #[arg(long, global = true, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Exit with code 3 when any verdict is inconclusive.
    #[arg(long, global = true)]
    strict: bool,
    /// Config file (key=value); defaults to $WEIGHTLAB_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check single-sequence conditions (lc, slc, mg, dc, lcset, fdb, rai).
    Check {
        #[arg(long)]
        seq: String,
        /// Conditions, comma-separated; defaults to all.
        #[arg(long, value_delimiter = ',')]
        cond: Option<Vec<String>>,
    },
    /// Growth relation between two sequences.
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Legendre-Fenchel-Young conjugate of a weight function at x.
    Conjugate {
        #[arg(long)]
        omega: String,
        #[arg(long)]
        x: f64,
    },
    /// Weight-function condition sweep (omega0..omega6, omega1').
    OmegaCheck {
        #[arg(long)]
        omega: String,
    },
    /// Construct a matrix and emit it (also validates the invariant).
    BuildMatrix {
        /// gevrey | omega:<w> | phi:<cw> | constant:<seq>
        #[arg(long)]
        from: String,
        /// Write the matrix JSON here instead of embedding it in the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a matrix condition in one flavor.
    MatrixCheck {
        #[arg(long)]
        cond: String,
        #[arg(long, value_enum)]
        flavor: FlavorArg,
        matrix: String,
    },
    /// Relate two matrices.
    MatrixRelate {
        a: String,
        b: String,
        #[arg(long, value_enum)]
        flavor: RelationFlavorArg,
    },
    /// Composed sequence, Faa-di-Bruno and root-comparability checks.
    Fdb {
        seq: String,
        /// Largest index whose witness partition is printed.
        #[arg(long, default_value_t = 16)]
        max_k: usize,
    },
    /// Moderate growth of a convex weight: Phi(2t) <= 2 Phi(t) + D t.
    PhiCheck {
        #[arg(long)]
        phi: String,
    },
    /// Constructive witnesses.
    Witness {
        #[command(subcommand)]
        sub: WitnessCmd,
    },
    /// Re-run the worked computations and compare to the closed forms.
    Reproduce,
    /// Export a catalog sequence or constructed matrix as JSON.
    Export {
        #[arg(long)]
        seq: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    /// Block construction for a bound sequence against a matrix.
    Blocks {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 1)]
        alpha_offset: usize,
    },
    /// Search for a moderate-growth violation witness.
    MgViolation {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        x: f64,
        /// The violation constant (the negated condition instantiates
        /// C = y = n).
        #[arg(long)]
        constant: f64,
        #[arg(long)]
        j_max: Option<usize>,
        /// Probe a specific row instead of the default smallest row >= n.
        #[arg(long)]
        y: Option<f64>,
    },
    /// Characteristic-derivative series of a sequence.
    CharDerivs {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        j_max: Option<usize>,
    },
    /// Family classification of an auxiliary sequence.
    Family {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        matrix: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Roumieu,
    Beurling,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Roumieu => Flavor::Roumieu,
            FlavorArg::Beurling => Flavor::Beurling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelationFlavorArg {
    Roumieu,
    Beurling,
    Triangle,
}

impl From<RelationFlavorArg> for RelationFlavor {
    fn from(f: RelationFlavorArg) -> RelationFlavor {
        match f {
            RelationFlavorArg::Roumieu => RelationFlavor::Roumieu,
            RelationFlavorArg::Beurling => RelationFlavor::Beurling,
            RelationFlavorArg::Triangle => RelationFlavor::Triangle,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports --help/--version through the error path too.
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(EXIT_USAGE);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    let strict = cli.strict;
    let format = cli.format;
    match run(cli) {
        Ok(report) => {
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Csv => print!("{}", report.to_csv()),
            }
            if strict && report.has_inconclusive() {
                std::process::exit(EXIT_STRICT_INCONCLUSIVE);
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn effective_config(cli: &Cli) -> CliResult<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path).map_err(CliError::validation)?,
        None => match std::env::var_os("WEIGHTLAB_CONFIG") {
            Some(path) => Config::load(path.as_ref()).map_err(CliError::validation)?,
            None => Config::default(),
        },
    };
    if let Some(n) = cli.n {
        if n < 8 {
            return Err(CliError::usage("truncation must be at least 8"));
        }
        cfg.n = n;
    }
    if let Some(grid) = &cli.lambda_grid {
        cfg.lambda_grid = grid.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<Report> {
    let cfg = effective_config(&cli)?;
    let tp = cfg.trend_params();
    let op = cfg.omega_params();
    match cli.cmd {
        Cmd::Check { seq, cond } => {
            let mut report = Report::new("check", &cfg);
            report.input("seq", &seq);
            let s = parse::load_seq(&seq, cfg.n)?;
            let conds = cond.unwrap_or_else(|| {
                ["lc", "slc", "mg", "dc", "lcset", "fdb", "rai"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect()
            });
            for c in conds {
                let verdict: Verdict = match c.as_str() {
                    "lc" => check_lc(&s, ConvexityView::M),
                    "slc" => check_lc(&s, ConvexityView::SmallM),
                    "mg" => check_mg(&s, tp),
                    "dc" => check_dc(&s, tp),
                    "lcset" => check_lcset(&s, tp),
                    "fdb" => check_fdb(&s, tp),
                    "rai" => check_rai(&s, tp),
                    other => {
                        return Err(CliError::usage(format!("unknown condition `{other}`")))
                    }
                };
                report.push(c, Payload::Verdict { verdict });
            }
            Ok(report)
        }
        Cmd::Compare { a, b } => {
            let mut report = Report::new("compare", &cfg);
            report.input("a", &a).input("b", &b);
            let sa = parse::load_seq(&a, cfg.n)?;
            let sb = parse::load_seq(&b, cfg.n)?;
            let relation = relate(&sa, &sb, tp).map_err(CliError::validation)?;
            report.push("relation", Payload::Relation { relation });
            Ok(report)
        }
        Cmd::Conjugate { omega, x } => {
            if x < 0.0 {
                return Err(CliError::usage("x must be >= 0"));
            }
            let mut report = Report::new("conjugate", &cfg);
            report.input("omega", &omega).input("x", x);
            let w = parse::load_omega(&omega, op)?;
            let phi = w.phi();
            let value = weightlab_core::weightfn::conjugate_of(phi.as_ref(), x, op)
                .map_err(CliError::validation)?;
            report.push("conjugate", Payload::Value { value });
            Ok(report)
        }
        Cmd::OmegaCheck { omega } => {
            let mut report = Report::new("omega-check", &cfg);
            report.input("omega", &omega);
            let w = parse::load_omega(&omega, op)?;
            let map = check_omega_conditions(&w, tp).map_err(CliError::validation)?;
            if w.shift != 0.0 {
                report.push(
                    "normalization",
                    Payload::Text {
                        text: format!("table shifted by -{} so omega(1) = 0", w.shift),
                    },
                );
            }
            report.push("conditions", Payload::VerdictMap { map });
            Ok(report)
        }
        Cmd::BuildMatrix { from, out } => {
            let mut report = Report::new("build-matrix", &cfg);
            report.input("from", &from);
            let mx = parse::load_matrix(&from, &cfg)?;
            report.push(
                "msc",
                Payload::Verdict {
                    verdict: check_msc(&mx, tp),
                },
            );
            match out {
                Some(path) => {
                    let json = serde_json::to_string_pretty(&mx)
                        .expect("matrix serialization cannot fail");
                    std::fs::write(&path, json).map_err(|e| {
                        CliError::validation(format!("writing {}: {e}", path.display()))
                    })?;
                    report.push(
                        "written",
                        Payload::Text {
                            text: path.display().to_string(),
                        },
                    );
                }
                None => {
                    report.push("matrix", Payload::MatrixData { matrix: mx });
                }
            }
            Ok(report)
        }
        Cmd::MatrixCheck { cond, flavor, matrix } => {
            let mut report = Report::new("matrix-check", &cfg);
            report
                .input("matrix", &matrix)
                .input("cond", &cond)
                .input("flavor", format!("{flavor:?}"));
            let mx = parse::load_matrix(&matrix, &cfg)?;
            if cond == "msc" {
                report.push(
                    "msc",
                    Payload::Verdict {
                        verdict: check_msc(&mx, tp),
                    },
                );
                return Ok(report);
            }
            if cond == "inclusion" {
                report.push(
                    "inclusion",
                    Payload::VerdictMap {
                        map: check_inclusion_flags(&mx, tp),
                    },
                );
                return Ok(report);
            }
            let condition = MatrixCondition::parse(&cond)
                .ok_or_else(|| CliError::usage(format!("unknown matrix condition `{cond}`")))?;
            let mv = check_matrix_condition(&mx, condition, flavor.into(), tp);
            report.push(cond, Payload::Matrix { matrix_verdict: mv });
            Ok(report)
        }
        Cmd::MatrixRelate { a, b, flavor } => {
            let mut report = Report::new("matrix-relate", &cfg);
            report
                .input("a", &a)
                .input("b", &b)
                .input("flavor", format!("{flavor:?}"));
            let ma = parse::load_matrix(&a, &cfg)?;
            let mb = parse::load_matrix(&b, &cfg)?;
            let mv =
                relate_matrices(&ma, &mb, flavor.into(), tp).map_err(CliError::validation)?;
            report.push("relation", Payload::Matrix { matrix_verdict: mv });
            Ok(report)
        }
        Cmd::Fdb { seq, max_k } => {
            let mut report = Report::new("fdb", &cfg);
            report.input("seq", &seq).input("max_k", max_k);
            let s = parse::load_seq(&seq, cfg.n)?;
            let (m, _) = derive(&s);
            let composed = compose_max(&m);
            report.push(
                "fdb",
                Payload::Verdict {
                    verdict: check_fdb(&s, tp),
                },
            );
            report.push(
                "rai",
                Payload::Verdict {
                    verdict: check_rai(&s, tp),
                },
            );
            report.push(
                "composed",
                Payload::Sequence {
                    sequence: composed.circ.clone(),
                },
            );
            for k in 1..=max_k.min(s.n()) {
                if let Some(w) = &composed.witnesses[k] {
                    report.push(
                        format!("argmax[{k}]"),
                        Payload::Text {
                            text: format!("j = {}, parts = {:?}", w.outer, w.parts),
                        },
                    );
                }
            }
            Ok(report)
        }
        Cmd::PhiCheck { phi } => {
            let mut report = Report::new("phi-check", &cfg);
            report.input("phi", &phi);
            let cw = parse::load_phi(&phi)?;
            report.push(
                "phi_mg",
                Payload::Verdict {
                    verdict: check_phi_mg(&cw, tp),
                },
            );
            Ok(report)
        }
        Cmd::Witness { sub } => run_witness(sub, &cfg),
        Cmd::Reproduce => {
            let mut report = Report::new("reproduce", &cfg);
            let steps = reproduce::run_all(tp, op);
            let failed: Vec<&str> = steps
                .iter()
                .filter(|s| !s.passed)
                .map(|s| s.step.as_str())
                .collect();
            let summary = if failed.is_empty() {
                "all steps passed".to_string()
            } else {
                format!("failed: {}", failed.join(", "))
            };
            for step in steps {
                report.push(step.step.clone(), Payload::Step { step });
            }
            report.push("summary", Payload::Text { text: summary });
            Ok(report)
        }
        Cmd::Export { seq, matrix, out } => {
            let mut report = Report::new("export", &cfg);
            let json = match (&seq, &matrix) {
                (Some(name), None) => {
                    report.input("seq", name);
                    let s = parse::load_seq(name, cfg.n)?;
                    serde_json::to_string_pretty(&s).expect("serialization cannot fail")
                }
                (None, Some(spec)) => {
                    report.input("matrix", spec);
                    let mx = parse::load_matrix(spec, &cfg)?;
                    serde_json::to_string_pretty(&mx).expect("serialization cannot fail")
                }
                _ => {
                    return Err(CliError::usage(
                        "export needs exactly one of --seq or --matrix",
                    ))
                }
            };
            match out {
                Some(path) => {
                    std::fs::write(&path, &json).map_err(|e| {
                        CliError::validation(format!("writing {}: {e}", path.display()))
                    })?;
                    report.push(
                        "written",
                        Payload::Text {
                            text: path.display().to_string(),
                        },
                    );
                }
                None => {
                    report.push("data", Payload::Text { text: json });
                }
            }
            Ok(report)
        }
    }
}

fn run_witness(sub: WitnessCmd, cfg: &Config) -> CliResult<Report> {
    let tp = cfg.trend_params();
    match sub {
        WitnessCmd::Blocks { matrix, b, alpha_offset } => {
            let mut report = Report::new("witness blocks", cfg);
            report
                .input("matrix", &matrix)
                .input("b", &b)
                .input("alpha_offset", alpha_offset);
            let mx = parse::load_matrix(&matrix, cfg)?;
            let bs = parse::load_seq(&b, cfg.n)?;
            let blocks =
                build_block_witness(&mx, &bs, alpha_offset, tp).map_err(CliError::validation)?;
            blocks.verify_blocks(&bs).map_err(CliError::validation)?;
            report.push("blocks", Payload::Blocks { blocks });
            Ok(report)
        }
        WitnessCmd::MgViolation { matrix, x, constant, j_max, y } => {
            let mut report = Report::new("witness mg-violation", cfg);
            report
                .input("matrix", &matrix)
                .input("x", x)
                .input("constant", constant);
            if let Some(y) = y {
                report.input("y", y);
            }
            let mx = parse::load_matrix(&matrix, cfg)?;
            let j_max = j_max.unwrap_or(cfg.n);
            let pair =
                find_mg_violation(&mx, x, constant, j_max, y).map_err(CliError::validation)?;
            report.push("violation", Payload::IndexPair { pair });
            Ok(report)
        }
        WitnessCmd::CharDerivs { seq, j_max } => {
            let mut report = Report::new("witness char-derivs", cfg);
            report.input("seq", &seq);
            let s = parse::load_seq(&seq, cfg.n)?;
            let j_max = j_max.unwrap_or(s.n() / 2);
            report.input("j_max", j_max);
            let series =
                characteristic_derivatives(&s, j_max, tp).map_err(CliError::validation)?;
            report.push("series", Payload::Sequence { sequence: series });
            Ok(report)
        }
        WitnessCmd::Family { seq, matrix } => {
            let mut report = Report::new("witness family", cfg);
            report.input("seq", &seq);
            let s = parse::load_seq(&seq, cfg.n)?;
            let mx = match &matrix {
                Some(spec) => {
                    report.input("matrix", spec);
                    Some(parse::load_matrix(spec, cfg)?)
                }
                None => None,
            };
            let families = classify_family(&s, mx.as_ref(), tp).map_err(CliError::validation)?;
            report.push("families", Payload::Families { families });
            Ok(report)
        }
    }
}
