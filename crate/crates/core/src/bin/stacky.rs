use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use stacky::abgroup::cokernel_of_hom;
use stacky::exactla::{smith_normal_form, IntMatrix};
use stacky::gerbe::{gerbe_stacky_fan, rigidify};
use stacky::json::{self as js, to_canonical_string};
use stacky::momentangle::{verify_lemma, DEFAULT_MAX_VERTICES};
use stacky::stackyfan::{quotient_presentation, validate_stacky_fan, StackyFan};
use stacky::{gale_dual, verify_gale_sequences, Error};

#[derive(Parser)]
#[command(name = "stacky", version, about = "Computations with stacky fans")]
struct Cli {
    /// Human-readable output instead of JSON
    #[arg(long, global = true)]
    pretty: bool,

    /// Also check that cones meet in common faces
    #[arg(long, global = true)]
    strict_fan: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a stacky fan file
    Validate { fan: String },
    /// Quotient presentation [Z/G]
    Present { fan: String },
    /// Gale dual of beta with both exact sequences checked
    GaleDual { fan: String },
    /// Stacky fan of the gerbe given by an extension file
    Gerbe {
        fan: String,
        extension: String,
        /// Write the new stacky fan here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Underlying orbifold (N modulo torsion)
    Rigidify {
        fan: String,
        /// Write the reduced stacky fan here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generic stabilizer mu
    Mu { fan: String },
    /// Check H^1 = H^2 = 0 on the arrangement complement
    Lemma {
        fan: String,
        #[arg(long, default_value = "2")]
        coeff: BigInt,
        #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
        max_n: usize,
    },
    /// Smith normal form of a JSON matrix
    Snf { matrix: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Present { .. } => "present",
            Command::GaleDual { .. } => "gale-dual",
            Command::Gerbe { .. } => "gerbe",
            Command::Rigidify { .. } => "rigidify",
            Command::Mu { .. } => "mu",
            Command::Lemma { .. } => "lemma",
            Command::Snf { .. } => "snf",
        }
    }
}

/// A failed run: code 1 when the input parsed but the mathematics says no,
/// code 2 for parse and IO problems.
struct Failure {
    code: u8,
    diagnostics: Vec<Value>,
    outputs: Value,
}

impl Failure {
    fn parse(msg: impl ToString) -> Self {
        Failure {
            code: 2,
            diagnostics: vec![json!({ "code": "parse", "message": msg.to_string() })],
            outputs: json!({}),
        }
    }

    fn domain(e: &Error) -> Self {
        let diagnostics = match e {
            Error::InvalidFan(ds) => ds.iter().map(js::diagnostic_to_json).collect(),
            Error::InvalidExtension(x) => vec![json!({ "code": "invalid_extension", "message": x.to_string() })],
            Error::SizeBound { .. } => vec![json!({ "code": "size_bound", "message": e.to_string() })],
            other => vec![json!({ "code": "error", "message": other.to_string() })],
        };
        Failure {
            code: 1,
            diagnostics,
            outputs: json!({}),
        }
    }

    fn from_error(e: Error) -> Self {
        match e {
            Error::Input(_) | Error::DimensionMismatch(_) => Failure::parse(e),
            e => Failure::domain(&e),
        }
    }
}

struct Success {
    outputs: Value,
    pretty: String,
}

struct Inputs {
    digests: Vec<Value>,
    stdin_used: bool,
}

impl Inputs {
    fn read(&mut self, path: &str) -> Result<Vec<u8>, Failure> {
        let bytes = if path == "-" {
            if self.stdin_used {
                return Err(Failure::parse("stdin can be read only once"));
            }
            self.stdin_used = true;
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::parse(format!("stdin: {e}")))?;
            buf
        } else {
            std::fs::read(path).map_err(|e| Failure::parse(format!("{path}: {e}")))?
        };
        self.digests.push(json!({ "path": path, "sha256": hex::encode(Sha256::digest(&bytes)) }));
        Ok(bytes)
    }

    fn json(&mut self, path: &str) -> Result<Value, Failure> {
        let bytes = self.read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| Failure::parse(format!("{path}: {e}")))
    }

    fn stacky_fan(&mut self, path: &str) -> Result<StackyFan, Failure> {
        let v = self.json(path)?;
        js::stacky_fan_from_json(&v).map_err(|e| Failure::parse(format!("{path}: {e}")))
    }
}

fn validated(x: &StackyFan, strict: bool) -> Result<(), Failure> {
    let report = validate_stacky_fan(x, strict);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            diagnostics: report.diagnostics.iter().map(js::diagnostic_to_json).collect(),
            outputs: json!({ "valid": false }),
        })
    }
}

fn write_fan(out: &Option<PathBuf>, x: &StackyFan) -> Result<(), Failure> {
    if let Some(path) = out {
        let text = to_canonical_string(&js::stacky_fan_to_json(x)) + "\n";
        std::fs::write(path, text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn fmt_matrix(m: &IntMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| format!("{x:>4}")).collect::<String>())
        .collect::<Vec<_>>()
        .join("\n")
}

fn fmt_fan(x: &StackyFan) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "N = {}", x.group());
    let m = x.beta().matrix();
    for i in 0..x.n_rays() {
        let b: Vec<String> = m.column(i).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "b{} = ({})", i + 1, b.join(","));
    }
    let cones: Vec<String> = x
        .fan()
        .max_cones()
        .iter()
        .map(|c| format!("{{{}}}", c.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    let _ = write!(s, "cones: {}  (rays numbered from 1)", cones.join(" "));
    s
}

fn run(command: &Command, strict: bool, inputs: &mut Inputs) -> Result<Success, Failure> {
    match command {
        Command::Validate { fan } => {
            let x = inputs.stacky_fan(fan)?;
            validated(&x, strict)?;
            Ok(Success {
                outputs: json!({ "valid": true }),
                pretty: format!("{}\nvalid", fmt_fan(&x)),
            })
        }
        Command::Present { fan } => {
            let x = inputs.stacky_fan(fan)?;
            validated(&x, strict)?;
            let q = quotient_presentation(&x).map_err(Failure::from_error)?;
            let ideal: Vec<String> = q
                .ideal_generators
                .iter()
                .map(|g| {
                    if g.is_empty() {
                        "1".to_string()
                    } else {
                        g.iter().map(|i| format!("z{}", i + 1)).collect::<Vec<_>>().join("")
                    }
                })
                .collect();
            let mut p = String::new();
            let _ = writeln!(p, "G = {}", q.g);
            let _ = writeln!(p, "weights:\n{}", fmt_matrix(&q.weight_matrix));
            let _ = writeln!(p, "action: {}", q.action_formula());
            let _ = writeln!(p, "μ = {}", q.mu);
            let _ = writeln!(p, "T = (ℂ^×)^{}", q.torus_rank_t);
            let _ = writeln!(p, "J = <{}>", ideal.join(", "));
            let _ = write!(p, "codim V = {}", q.excluded_codim);
            Ok(Success {
                outputs: js::presentation_to_json(&q),
                pretty: p,
            })
        }
        Command::GaleDual { fan } => {
            let x = inputs.stacky_fan(fan)?;
            let gd = gale_dual(x.beta()).map_err(Failure::from_error)?;
            let report = verify_gale_sequences(x.beta(), &gd).map_err(Failure::from_error)?;
            let p = format!(
                "DG(β) = {}  (display {})\nβ^∨:\n{}\nCoker(β^∨) = {}\n{}",
                gd.dg,
                gd.display.group_string(),
                fmt_matrix(gd.beta_vee.matrix()),
                gd.coker_beta_vee,
                report
            );
            let out = js::gale_dual_to_json(&gd, &report);
            if !report.all_pass() {
                return Err(Failure {
                    code: 1,
                    diagnostics: vec![json!({ "code": "not_exact", "message": "a Gale sequence failed" })],
                    outputs: out,
                });
            }
            Ok(Success { outputs: out, pretty: p })
        }
        Command::Gerbe { fan, extension, out } => {
            let x = inputs.stacky_fan(fan)?;
            let ext = inputs.json(extension)?;
            validated(&x, strict)?;
            let spec = js::extension_from_json(&ext, &x).map_err(Failure::from_error)?;
            let r = gerbe_stacky_fan(&x, &spec).map_err(Failure::from_error)?;
            write_fan(out, &r.stacky_fan)?;
            let shown: Vec<String> = (0..r.display.matrix.cols())
                .map(|i| {
                    let b: Vec<String> = r.display.matrix.column(i).iter().map(|v| v.to_string()).collect();
                    format!("b{} = ({})", i + 1, b.join(","))
                })
                .collect();
            let p = format!(
                "Ñ = {}  (display {}: {})\n{}\nν = {}\nG̃ = {}\nweights:\n{}\n{}",
                r.stacky_fan.group(),
                r.display.group_string(),
                shown.join(", "),
                fmt_fan(&r.stacky_fan),
                r.nu,
                r.g_tilde,
                fmt_matrix(r.weights.matrix()),
                r.report
            );
            let outputs = js::gerbe_to_json(&r);
            if !r.report.all_pass() {
                return Err(Failure {
                    code: 1,
                    diagnostics: vec![json!({ "code": "kernel_sequence", "message": r.report.to_string() })],
                    outputs,
                });
            }
            Ok(Success { outputs, pretty: p })
        }
        Command::Rigidify { fan, out } => {
            let x = inputs.stacky_fan(fan)?;
            validated(&x, strict)?;
            let r = rigidify(&x).map_err(Failure::from_error)?.canonical();
            write_fan(out, &r)?;
            Ok(Success {
                outputs: json!({ "stacky_fan": js::stacky_fan_to_json(&r) }),
                pretty: fmt_fan(&r),
            })
        }
        Command::Mu { fan } => {
            let x = inputs.stacky_fan(fan)?;
            validated(&x, strict)?;
            let gd = gale_dual(x.beta()).map_err(Failure::from_error)?;
            let (_, proj) = cokernel_of_hom(&gd.beta_vee).map_err(Failure::from_error)?;
            let mu = gd.mu();
            Ok(Success {
                pretty: format!("μ = {mu}  (|μ| = {})", mu.order_of_finite_part()),
                outputs: json!({
                    "mu": js::diag_group_to_json(&mu),
                    "coker_beta_vee": js::group_to_json(&gd.coker_beta_vee),
                    "projection": js::matrix_to_json(proj.matrix()),
                }),
            })
        }
        Command::Lemma { fan, coeff, max_n } => {
            let x = inputs.stacky_fan(fan)?;
            validated(&x, strict)?;
            if *coeff < BigInt::from(2) {
                return Err(Failure::parse(format!("--coeff must be at least 2, got {coeff}")));
            }
            let r = verify_lemma(x.fan(), coeff, *max_n).map_err(Failure::from_error)?;
            let p = format!(
                "codim V = {}\nH^1(Z; ℤ/{m}) = {}\nH^2(Z; ℤ/{m}) = {}\n{}",
                r.codim,
                r.h1,
                r.h2,
                if r.pass { "pass" } else { "FAIL" },
                m = r.modulus
            );
            let outputs = js::lemma_to_json(&r);
            if !r.pass {
                return Err(Failure {
                    code: 1,
                    diagnostics: vec![json!({ "code": "nonvanishing", "message": "H^1 or H^2 is nonzero" })],
                    outputs,
                });
            }
            Ok(Success { outputs, pretty: p })
        }
        Command::Snf { matrix } => {
            let v = inputs.json(matrix)?;
            let a = js::matrix_from_json(&v).map_err(Failure::parse)?;
            let s = smith_normal_form(&a);
            Ok(Success {
                pretty: format!(
                    "U:\n{}\nD:\n{}\nV:\n{}",
                    fmt_matrix(&s.u),
                    fmt_matrix(&s.d),
                    fmt_matrix(&s.v)
                ),
                outputs: js::smith_to_json(&s),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut inputs = Inputs {
        digests: Vec::new(),
        stdin_used: false,
    };
    let result = run(&cli.command, cli.strict_fan, &mut inputs);
    let (code, status, outputs, diagnostics, pretty) = match result {
        Ok(s) => (0u8, "ok", s.outputs, Vec::new(), Some(s.pretty)),
        Err(f) => (
            f.code,
            if f.code == 1 { "failed" } else { "error" },
            f.outputs,
            f.diagnostics,
            None,
        ),
    };
    if cli.pretty {
        match pretty {
            Some(text) => println!("{text}"),
            None => {
                for d in &diagnostics {
                    eprintln!("{}: {}", d["code"].as_str().unwrap_or("error"), d["message"].as_str().unwrap_or(""));
                }
            }
        }
    } else {
        let report = json!({
            "command": cli.command.name(),
            "inputs": inputs.digests,
            "outputs": outputs,
            "diagnostics": diagnostics,
            "status": status,
        });
        println!("{}", to_canonical_string(&report));
    }
    ExitCode::from(code)
}
