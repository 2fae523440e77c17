//! Command-line front end: group files, subcommand dispatch and reports.

pub mod expr;

use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::closure::{self, Certificate, ClosureError, Decomposition};
use crate::field::{FieldError, FieldSpec};
use crate::group::{FiniteGroup, GroupElement, GroupError, DEFAULT_CAP};
use crate::poly::{Poly, RatFunc};
use crate::saturation::{self, SatError, SatOptions, Status, Verdict, Witness};
use expr::ExprError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    File { path: String, msg: String },
    #[error("group file: {0}")]
    Schema(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Saturation(#[from] SatError),
    #[error("no witness route applies: {0}")]
    NoWitness(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::File { .. } => "file",
            CliError::Schema(_) => "schema",
            CliError::Expr(_) => "parse",
            CliError::Field(_) => "field",
            CliError::Group(_) => "group",
            CliError::Closure(_) => "closure",
            CliError::Saturation(_) => "saturation",
            CliError::NoWitness(_) => "no_witness",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Linear,
    Moebius,
    Permutation,
}

/// JSON group definition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    #[serde(default = "default_field")]
    pub field: String,
    pub action: ActionKind,
    pub nvars: usize,
    pub generators: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submodule: Option<[String; 2]>,
}

fn default_field() -> String {
    "Q".into()
}

/// A group file after parsing.
pub struct LoadedGroup {
    pub field: FieldSpec,
    pub group: FiniteGroup,
    pub submodule: Option<(Poly, Poly)>,
}

impl GroupFile {
    pub fn load(path: &Path) -> Result<GroupFile, CliError> {
        let file_err = |msg: String| CliError::File { path: path.display().to_string(), msg };
        let text = std::fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| file_err(e.to_string()))
    }

    fn entry(&self, v: &Value, k: &FieldSpec) -> Result<crate::field::Elem, CliError> {
        match v {
            Value::String(s) => Ok(expr::parse_elem(s, k)?),
            Value::Number(n) if n.is_i64() => Ok(k.from_i64(n.as_i64().unwrap())),
            _ => Err(CliError::Schema(format!("bad matrix entry {v}"))),
        }
    }

    fn matrix(&self, v: &Value, k: &FieldSpec, n: usize) -> Result<Vec<Vec<crate::field::Elem>>, CliError> {
        let rows = v.as_array().filter(|r| r.len() == n).ok_or_else(|| CliError::Schema(format!("expected {n} rows")))?;
        rows.iter()
            .map(|r| {
                let r = r.as_array().filter(|r| r.len() == n).ok_or_else(|| CliError::Schema(format!("expected {n} columns")))?;
                r.iter().map(|e| self.entry(e, k)).collect()
            })
            .collect()
    }

    pub fn build(&self, cap: usize) -> Result<LoadedGroup, CliError> {
        let k = FieldSpec::parse(&self.field)?;
        let n = self.nvars;
        let gens: Vec<GroupElement> = match self.action {
            ActionKind::Linear => {
                self.generators.iter().map(|g| Ok(GroupElement::Matrix(self.matrix(g, &k, n)?))).collect::<Result<_, CliError>>()?
            }
            ActionKind::Moebius => {
                if n != 1 {
                    return Err(CliError::Schema("Moebius action needs nvars = 1".into()));
                }
                self.generators
                    .iter()
                    .map(|g| {
                        let m = self.matrix(g, &k, 2)?;
                        Ok(GroupElement::moebius(&k, [m[0][0].clone(), m[0][1].clone(), m[1][0].clone(), m[1][1].clone()]))
                    })
                    .collect::<Result<_, CliError>>()?
            }
            ActionKind::Permutation => self
                .generators
                .iter()
                .map(|g| {
                    let p: Vec<usize> = serde_json::from_value(g.clone()).map_err(|e| CliError::Schema(e.to_string()))?;
                    if p.len() != n {
                        return Err(CliError::Schema(format!("permutation of length {} for nvars {n}", p.len())));
                    }
                    Ok(GroupElement::Permutation(p))
                })
                .collect::<Result<_, CliError>>()?,
        };
        let group = FiniteGroup::closure(Some(&k), &gens, cap)?;
        let submodule = match &self.submodule {
            Some([p, q]) => Some((expr::parse_poly(p, &k, n)?, expr::parse_poly(q, &k, n)?)),
            None => None,
        };
        Ok(LoadedGroup { field: k, group, submodule })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "satfield", version, about = "Generative elements of rational functions and saturation of invariant fields")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Fiber samples for closedness tests (default d^2 + 1).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Largest group order enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub max_order: usize,
    /// Degree bound for semi-invariant search.
    #[arg(long, global = true, default_value_t = 8)]
    pub max_degree: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Polynomials.
    #[command(subcommand)]
    Poly(FnCommand),
    /// Rational functions.
    #[command(subcommand)]
    Rat(FnCommand),
    /// Finite groups given by generator files.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Saturation verdicts for a group file.
    #[command(subcommand)]
    Saturate(SaturateCommand),
    /// Constructs and validates a non-saturation witness.
    Witness(FileArg),
}

#[derive(Subcommand, Debug)]
pub enum FnCommand {
    /// Decides whether the function is closed.
    Closed(ExprArg),
    /// Finds a generative element and its outer function.
    Generative(ExprArg),
}

#[derive(Args, Debug)]
pub struct ExprArg {
    /// Number of variables; defaults to the largest index used.
    #[arg(long)]
    pub nvars: Option<usize>,
    /// Field description: Q, GF(p) or Q[w]/(m(w)).
    #[arg(long, default_value = "Q")]
    pub field: String,
    pub expr: String,
}

#[derive(Subcommand, Debug)]
pub enum GroupCommand {
    /// Order, classes, normal subgroups and abelianization.
    Analyze(FileArg),
}

#[derive(Subcommand, Debug)]
pub enum SaturateCommand {
    /// Saturation of the invariant ring.
    Ring(FileArg),
    /// Field saturation using the group action.
    Field(FileArg),
    /// Field saturation from the abstract group only.
    FieldAbstract(FileArg),
}

#[derive(Args, Debug)]
pub struct FileArg {
    pub file: std::path::PathBuf,
}

/// Serialized outcome of one command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub seed: u64,
    pub result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub justification: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub elapsed_us: u64,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Value::Object(m) = &self.result {
            for (key, v) in m {
                out.push_str(&format!("{key}: {}\n", plain(v)));
            }
        }
        for j in &self.justification {
            out.push_str(&format!("  - {j}\n"));
        }
        if let Some(Value::Object(w)) = &self.witness {
            out.push_str("witness:\n");
            for (key, v) in w {
                out.push_str(&format!("  {key}: {}\n", plain(v)));
            }
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(plain).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn infer_nvars(src: &str) -> usize {
    let b = src.as_bytes();
    let mut best = 1;
    for i in 0..b.len() {
        if b[i] == b'x' && (i == 0 || !b[i - 1].is_ascii_alphanumeric()) {
            let digits: String = src[i + 1..].chars().take_while(|c| c.is_ascii_digit()).collect();
            if let Ok(v) = digits.parse::<usize>() {
                best = best.max(v);
            }
        }
    }
    best
}

fn names(n: usize) -> Vec<String> {
    Poly::default_names(n)
}

fn show(f: &RatFunc) -> String {
    let names = names(f.nvars());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    f.to_string_vars(&refs)
}

fn show_poly(p: &Poly) -> String {
    let names = names(p.nvars());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    p.to_string_vars(&refs)
}

pub fn show_element(k: Option<&FieldSpec>, g: &GroupElement) -> String {
    let row = |r: &[crate::field::Elem]| format!("[{}]", r.iter().map(|e| k.unwrap().fmt_elem(e)).collect::<Vec<_>>().join(", "));
    match g {
        GroupElement::Matrix(m) => format!("[{}]", m.iter().map(|r| row(r)).collect::<Vec<_>>().join(", ")),
        GroupElement::Moebius(m) => format!("[{}, {}]", row(&m[..2]), row(&m[2..])),
        GroupElement::Permutation(s) => format!("{s:?}"),
    }
}

fn decomposition_json(d: &Decomposition) -> Value {
    json!({
        "pencil": [show_poly(d.pencil.p()), show_poly(d.pencil.q())],
        "psi": show(&d.psi()),
        "outer": d.outer.to_string(),
        "inner_degree": d.inner_degree,
        "outer_degree": d.outer_degree,
        "closed": d.closed,
    })
}

fn certificate_json(k: &FieldSpec, c: &Certificate) -> Value {
    match c {
        Certificate::Linear => json!({"kind": "linear"}),
        Certificate::IrreducibleFiber { lambda, point } => json!({
            "kind": "irreducible_fiber",
            "lambda": k.fmt_elem(lambda),
            "point": point.iter().map(|e| k.fmt_elem(e)).collect::<Vec<_>>(),
        }),
        Certificate::Decomposed { inner_degree, outer_degree } => {
            json!({"kind": "decomposed", "inner_degree": inner_degree, "outer_degree": outer_degree})
        }
        Certificate::Reducible { samples, skipped } => json!({"kind": "reducible", "samples": samples, "skipped": skipped}),
    }
}

pub fn witness_json(k: Option<&FieldSpec>, w: &Witness) -> Value {
    json!({
        "phi": show(&w.phi),
        "pencil": [show_poly(w.pencil.p()), show_poly(w.pencil.q())],
        "psi": show(&w.psi()),
        "outer": w.outer.to_string(),
        "g": show_element(k, &w.g),
    })
}

fn verdict_parts(k: Option<&FieldSpec>, v: &Verdict) -> (Value, Vec<String>, Option<Value>) {
    (
        json!({"status": v.status.to_string(), "scope": v.scope.to_string()}),
        v.justification.clone(),
        v.witness.as_ref().map(|w| witness_json(k, w)),
    )
}

fn verdict_code(v: &Verdict) -> i32 {
    if v.status == Status::Saturated {
        0
    } else {
        1
    }
}

/// Group facts reported by `group analyze`.
pub fn analyze(g: &FiniteGroup) -> Value {
    let c = g.cayley();
    let realization = match g.element(0) {
        GroupElement::Matrix(_) => "linear",
        GroupElement::Moebius(_) => "moebius",
        GroupElement::Permutation(_) => "permutation",
    };
    let mut out = json!({
        "order": g.order(),
        "realization": realization,
        "arity": g.arity(),
        "perfect": c.is_perfect(),
        "abelian": c.is_abelian(),
        "abelianization": c.abelianization(),
        "center": c.center().order(),
        "classes": c.classes().len(),
        "normal_subgroups": c.normal_subgroups().len(),
        "recognized": c.recognize().to_string(),
    });
    if let Some(k) = g.field() {
        out["field"] = json!(k.describe());
        if g.is_matrix() {
            out["characters_to_field"] = json!(c.characters_to_field(k));
        }
    }
    out
}

fn run_command(cli: &Cli) -> Result<(i32, Value, Vec<String>, Option<Value>), CliError> {
    let opts = SatOptions { seed: cli.seed, max_degree: cli.max_degree };
    let load = |f: &FileArg| GroupFile::load(&f.file)?.build(cli.max_order);
    match &cli.command {
        Command::Poly(fc) | Command::Rat(fc) => {
            let is_poly = matches!(cli.command, Command::Poly(_));
            let (ExprArg { nvars, field, expr: src }, closed_cmd) = match fc {
                FnCommand::Closed(a) => (a, true),
                FnCommand::Generative(a) => (a, false),
            };
            let k = FieldSpec::parse(field)?;
            let n = nvars.unwrap_or_else(|| infer_nvars(src));
            let f = if is_poly {
                RatFunc::from_poly(expr::parse_poly(src, &k, n)?)
            } else {
                expr::parse_ratfunc(src, &k, n)?
            };
            if closed_cmd {
                let c = closure::is_closed_rat(&f, cli.samples, cli.seed)?;
                let code = if c.closed { 0 } else { 1 };
                Ok((code, json!({"closed": c.closed, "certificate": certificate_json(&k, &c.certificate)}), vec![], None))
            } else {
                let d = if is_poly {
                    closure::generative_poly(f.num(), cli.seed)?
                } else {
                    closure::generative_rat(&f, cli.seed)?
                };
                Ok((0, decomposition_json(&d), vec![], None))
            }
        }
        Command::Group(GroupCommand::Analyze(f)) => {
            let lg = load(f)?;
            Ok((0, analyze(&lg.group), vec![], None))
        }
        Command::Saturate(sc) => {
            let (lg, v) = match sc {
                SaturateCommand::Ring(f) => {
                    let lg = load(f)?;
                    let v = saturation::ring_saturated(&lg.group)?;
                    (lg, v)
                }
                SaturateCommand::Field(f) => {
                    let lg = load(f)?;
                    let sub = lg.submodule.as_ref().map(|(p, q)| (p, q));
                    let v = saturation::field_saturated(&lg.group, sub, &opts)?;
                    (lg, v)
                }
                SaturateCommand::FieldAbstract(f) => {
                    let lg = load(f)?;
                    let v = saturation::field_saturated_sufficient(&lg.group);
                    (lg, v)
                }
            };
            let (r, j, w) = verdict_parts(Some(&lg.field), &v);
            Ok((verdict_code(&v), r, j, w))
        }
        Command::Witness(f) => {
            let lg = load(f)?;
            let g = &lg.group;
            let w = if matches!(g.element(0), GroupElement::Moebius(_)) {
                saturation::witness_univariate(g)?
            } else if let Some((p, q)) = &lg.submodule {
                saturation::witness_submodule(g, p, q)?
            } else if g.is_matrix() && g.arity() == 2 {
                saturation::witness_plane(g)?
            } else {
                return Err(CliError::NoWitness("needs a Moebius group, a plane group or a submodule".into()));
            };
            Ok((0, json!({"valid": true}), vec![], Some(witness_json(Some(&lg.field), &w))))
        }
    }
}

/// Runs a command line; returns the exit code and the printed output.
pub fn run(argv: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    let start = Instant::now();
    let outcome = run_command(&cli);
    let elapsed_us = start.elapsed().as_micros() as u64;
    let command: Vec<String> = argv.iter().skip(1).cloned().collect();
    match outcome {
        Ok((code, result, justification, witness)) => {
            let report = Report { command, seed: cli.seed, result, justification, witness, elapsed_us };
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report).unwrap() + "\n",
                Format::Text => report.to_text(),
            };
            (code, text)
        }
        Err(e) => {
            let text = match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({"command": command, "error": e.code(), "message": e.to_string()})).unwrap()
                        + "\n"
                }
                Format::Text => format!("error[{}]: {e}\n", e.code()),
            };
            (2, text)
        }
    }
}

/// Entry point for the binary.
pub fn dispatch(argv: Vec<String>) -> i32 {
    let (code, out) = run(&argv);
    if code == 2 {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    code
}
