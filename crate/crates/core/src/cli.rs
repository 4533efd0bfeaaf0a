//! Command-line front end.
//!
//! Exit codes: 0 success or pass, 1 mathematical failure (failed
//! certificate, violation found, nonzero defect), 2 usage or parse error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use crate::algebra::{bracket, Element, Family};
use crate::annihilator::{annihilator_basis, GradedWindow};
use crate::derivations::{leibniz_defect, LocalMap, SuperDerivation};
use crate::expr::{format_element, format_rational, parse_element, parse_rational};
use crate::reproductions;
use crate::two_local::{
    globalize, make_adversarial_oracle, make_honest_oracle, AdversarialKind, TestSet,
    TwoLocalError, TwoLocalOracle, Verdict,
};

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "SUPERDERIV_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "superderiv",
    version,
    about = "Exact super Virasoro / super W(2,2) computations"
)]
struct Cli {
    /// Algebra family: vir, svir0, svir12 or sw22.
    #[arg(long, global = true)]
    algebra: Option<String>,
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// JSON config file with defaults for algebra, window and seed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the bracket [A, B].
    Bracket { a: String, b: String },
    /// Sweep the graded Jacobi identity over all basis triples.
    Jacobi {
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Leibniz defect of ad(D) + lambda*Outer on (X, Y).
    Defect {
        d: String,
        x: String,
        y: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
    },
    /// Annihilator of X inside a graded window.
    Annihilate {
        x: String,
        #[arg(long)]
        bound: Option<String>,
    },
    /// Globalize a 2-local oracle and print its certificate.
    Globalize {
        /// `honest:<element>` or `adversarial:<coefficient_square|shift_map|pairwise_inconsistent>`.
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long, default_value_t = 20)]
        random: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Outer coefficient of an honest oracle (SW(2,2) only).
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
        /// Mask window of an honest oracle; 0 disables masking.
        #[arg(long, default_value_t = 4)]
        mask: u32,
    },
    /// Run a built-in reproduction.
    Lemma { name: String },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    algebra: Option<String>,
    window: Option<u32>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

fn usage(kind: &'static str, message: impl ToString) -> Failure {
    Failure {
        code: 2,
        kind,
        message: message.to_string(),
    }
}

struct Settings {
    family: Family,
    window: Option<u32>,
    seed: u64,
    json: bool,
}

/// Runs one invocation. `argv[0]` is the program name. The seed override
/// is read from `env_seed` rather than the process environment so callers
/// control it.
pub fn run_command<S: AsRef<str>>(argv: &[S], env_seed: Option<&str>) -> CommandOutput {
    let args: Vec<&str> = argv.iter().map(AsRef::as_ref).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            return if code == 0 {
                CommandOutput {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                CommandOutput {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let json_mode = cli.json;
    match dispatch(cli, env_seed) {
        Ok((code, stdout)) => CommandOutput {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(f) => {
            let stderr = if json_mode {
                format!(
                    "{}\n",
                    json!({ "error": { "kind": f.kind, "message": f.message } })
                )
            } else {
                format!("error[{}]: {}\n", f.kind, f.message)
            };
            CommandOutput {
                code: f.code,
                stdout: String::new(),
                stderr,
            }
        }
    }
}

fn settings(cli: &Cli, env_seed: Option<&str>) -> Result<Settings, Failure> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage("config", format!("{}: {e}", path.display())))?;
            serde_json::from_str::<Config>(&text).map_err(|e| usage("config", e))?
        }
        None => Config::default(),
    };
    let name = cli
        .algebra
        .clone()
        .or(config.algebra)
        .unwrap_or_else(|| "svir0".to_string());
    let family = Family::from_name(&name).ok_or_else(|| {
        usage(
            "usage",
            format!("unknown algebra {name:?}; expected vir, svir0, svir12 or sw22"),
        )
    })?;
    let seed = match env_seed {
        Some(s) => s.trim().parse().map_err(|_| {
            usage(
                "usage",
                format!("{SEED_ENV} must be an unsigned integer, got {s:?}"),
            )
        })?,
        None => config.seed.unwrap_or(0),
    };
    Ok(Settings {
        family,
        window: config.window,
        seed,
        json: cli.json,
    })
}

fn element(src: &str, family: Family) -> Result<Element, Failure> {
    parse_element(src, family).map_err(|e| usage("parse", format!("{src:?}: {e}")))
}

fn emit(json_mode: bool, value: serde_json::Value, text: String) -> String {
    if json_mode {
        format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))
    } else {
        text
    }
}

fn format_derivation(d: &SuperDerivation) -> String {
    let mut parts = Vec::new();
    if !d.inner_part().is_zero() {
        parts.push(format!("ad({})", format_element(d.inner_part())));
    }
    let lambda = d.outer_lambda();
    if *lambda != num_traits::Zero::zero() {
        parts.push(if num_traits::One::is_one(lambda) {
            "D".to_string()
        } else {
            format!("{}*D", format_rational(lambda))
        });
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn dispatch(cli: Cli, env_seed: Option<&str>) -> Result<(i32, String), Failure> {
    let s = settings(&cli, env_seed)?;
    let family = s.family;
    match cli.command {
        Command::Bracket { a, b } => {
            let (x, y) = (element(&a, family)?, element(&b, family)?);
            let z = bracket(&x, &y).map_err(|e| usage("algebra", e))?;
            let out = format_element(&z);
            Ok((
                0,
                emit(
                    s.json,
                    json!({ "family": family.name(), "x": format_element(&x), "y": format_element(&y), "bracket": out }),
                    format!("{out}\n"),
                ),
            ))
        }
        Command::Jacobi { bound } => {
            let bound = bound.or(s.window).unwrap_or(3);
            let (triples, violations, first) = jacobi_sweep(family, bound);
            let verdict = if violations == 0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            let out = emit(
                s.json,
                json!({
                    "family": family.name(),
                    "bound": bound,
                    "triples": triples,
                    "violations": violations,
                    "first_violation": first,
                    "verdict": verdict,
                }),
                format!("{violations} violations / {triples} triples\n"),
            );
            Ok((i32::from(violations > 0), out))
        }
        Command::Defect { d, x, y, lambda } => {
            let inner = element(&d, family)?;
            let lambda = parse_rational(&lambda).map_err(|e| usage("parse", e))?;
            let d = SuperDerivation::new(inner, lambda).map_err(|e| usage("algebra", e))?;
            let (x, y) = (element(&x, family)?, element(&y, family)?);
            let defect = leibniz_defect(&LocalMap::Derivation(d.clone()), &x, &y)
                .map_err(|e| usage("algebra", e))?;
            let out = format_element(&defect);
            Ok((
                i32::from(!defect.is_zero()),
                emit(
                    s.json,
                    json!({ "family": family.name(), "derivation": format_derivation(&d), "x": format_element(&x), "y": format_element(&y), "defect": out }),
                    format!("{out}\n"),
                ),
            ))
        }
        Command::Annihilate { x, bound } => {
            let target = element(&x, family)?;
            let bound = match bound {
                Some(b) => parse_rational(&b).map_err(|e| usage("parse", e))?,
                None => crate::linalg::rat(i64::from(s.window.unwrap_or(4))),
            };
            let window = GradedWindow::new(bound).map_err(|e| usage("usage", e))?;
            let space = annihilator_basis(&target, &window).map_err(|e| usage("usage", e))?;
            let basis: Vec<String> = space.basis.iter().map(format_derivation).collect();
            let mut text = format!("dim {}\n", space.dim());
            for b in &basis {
                text.push_str(&format!("  {b}\n"));
            }
            Ok((
                0,
                emit(
                    s.json,
                    json!({
                        "family": family.name(),
                        "target": format_element(&target),
                        "bound": format_rational(window.bound()),
                        "dim": space.dim(),
                        "basis": basis,
                    }),
                    text,
                ),
            ))
        }
        Command::Globalize {
            oracle,
            bound,
            random,
            seed,
            lambda,
            mask,
        } => {
            let seed = seed.unwrap_or(s.seed);
            let oracle = build_oracle(&oracle, family, &lambda, mask, seed)?;
            let t = TestSet::new(bound.or(s.window).unwrap_or(3), random, seed);
            let cert = globalize(oracle.as_ref(), &t).map_err(|e| match e {
                TwoLocalError::OracleDefect { .. } => Failure {
                    code: 1,
                    kind: "oracle_defect",
                    message: e.to_string(),
                },
                other => usage("usage", other),
            })?;
            Ok((
                i32::from(cert.verdict == Verdict::Fail),
                format!("{}\n", cert.to_json()),
            ))
        }
        Command::Lemma { name } => {
            let report = reproductions::run(&name, family).map_err(|e| usage("usage", e))?;
            let code = i32::from(report.verdict == Verdict::Fail);
            Ok((code, emit(s.json, report.to_json_value(), report.to_text())))
        }
    }
}

fn build_oracle(
    spec: &str,
    family: Family,
    lambda: &str,
    mask: u32,
    seed: u64,
) -> Result<Box<dyn TwoLocalOracle>, Failure> {
    if let Some(src) = spec.strip_prefix("honest:") {
        let inner = element(src, family)?;
        let lambda = parse_rational(lambda).map_err(|e| usage("parse", e))?;
        let d = SuperDerivation::new(inner, lambda).map_err(|e| usage("algebra", e))?;
        Ok(Box::new(make_honest_oracle(
            d,
            GradedWindow::int(mask),
            seed,
        )))
    } else if let Some(kind) = spec.strip_prefix("adversarial:") {
        let kind = AdversarialKind::from_name(kind)
            .ok_or_else(|| usage("usage", format!("unknown adversarial oracle {kind:?}")))?;
        Ok(Box::new(make_adversarial_oracle(kind, family)))
    } else {
        Err(usage(
            "usage",
            format!("oracle spec {spec:?} must start with 'honest:' or 'adversarial:'"),
        ))
    }
}

/// Counts graded Jacobi violations over all basis triples with
/// `|index| <= bound`. Returns (triples, violations, first violating triple).
pub fn jacobi_sweep(family: Family, bound: u32) -> (usize, usize, Option<String>) {
    let basis: Vec<Element> = family
        .basis_within(&crate::linalg::rat(i64::from(bound)))
        .into_iter()
        .map(|b| Element::from_basis(family, b))
        .collect();
    let mut triples = 0;
    let mut violations = 0;
    let mut first = None;
    for u in &basis {
        for v in &basis {
            let uv = bracket(u, v).expect("same family");
            let sign = crate::linalg::rat(
                u.homogeneous_parity()
                    .expect("basis vector")
                    .sign(v.homogeneous_parity().expect("basis vector")),
            );
            for w in &basis {
                triples += 1;
                if !jacobi_holds(u, v, w, &uv, &sign) {
                    violations += 1;
                    first.get_or_insert_with(|| {
                        format!(
                            "({}, {}, {})",
                            format_element(u),
                            format_element(v),
                            format_element(w)
                        )
                    });
                }
            }
        }
    }
    (triples, violations, first)
}

/// `[u,[v,w]] = [[u,v],w] + (-1)^{|u||v|} [v,[u,w]]`
fn jacobi_holds(
    u: &Element,
    v: &Element,
    w: &Element,
    uv: &Element,
    sign: &crate::linalg::Rational,
) -> bool {
    let lhs = bracket(u, &bracket(v, w).expect("same family")).expect("same family");
    let mut rhs = bracket(uv, w).expect("same family");
    rhs.add_scaled(
        &bracket(v, &bracket(u, w).expect("same family")).expect("same family"),
        sign,
    )
    .expect("same family");
    lhs == rhs
}
