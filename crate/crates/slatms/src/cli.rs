//! `slatms` command line.
//!
//! Exit codes: 0 success, 1 problem or usage error, 2 I/O error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use slatms_core::evidence::EvalOptions;
use slatms_core::{AssumptionId, DisjunctionId, NodeId};

use crate::compile::{compile, Compiled};
use crate::lang::{lex, parse, parse_prop, Directive, Program, TokenKind};
use crate::model::{static_regime_violation, OracleModel};
use crate::report;

/// Deltas above this fail `compare` inside the equivalence regime.
pub const COMPARE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "slatms", version, about = "Evidential truth maintenance for .slp problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Decimals in text output.
    #[arg(long, global = true, default_value_t = 3, value_name = "N")]
    precision: usize,
    /// Solve scope: comma-separated one-of members, or `all`.
    #[arg(long, global = true, value_name = "PROPS|all")]
    scope: Option<String>,
    /// Only environments consistent with these assumptions count.
    #[arg(long, global = true, value_name = "A,B")]
    kernel: Option<String>,
    /// Replace an assumption's mass, e.g. `e0+=0`. Repeatable.
    #[arg(long, global = true, value_name = "NAME=VALUE")]
    clamp: Vec<String>,
    /// Print labels and the combination trace.
    #[arg(long, global = true)]
    explain: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and compile only.
    Check { file: PathBuf },
    /// Rank interpretations of the solve scope.
    Solve { file: PathBuf },
    /// Support pair of a proposition, or run the file's `?-` directives.
    Query { file: PathBuf, prop: Option<String> },
    /// Evidence evaluation against the brute-force oracle.
    Compare { file: PathBuf, prop: Option<String> },
    /// Oracle belief and plausibility.
    Oracle { file: PathBuf, prop: Option<String> },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn problem(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

struct Session<'a> {
    cli: &'a Cli,
    file: &'a Path,
    program: Program,
    compiled: Compiled,
    out: &'a mut dyn Write,
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let file = match &cli.command {
        Command::Check { file }
        | Command::Solve { file }
        | Command::Query { file, .. }
        | Command::Compare { file, .. }
        | Command::Oracle { file, .. } => file.clone(),
    };
    let result = load(&file, err).and_then(|(program, compiled)| {
        let mut s = Session {
            cli: &cli,
            file: &file,
            program,
            compiled,
            out,
        };
        match &cli.command {
            Command::Check { .. } => s.check(),
            Command::Solve { .. } => s.solve_default(),
            Command::Query { prop, .. } => s.query(prop.as_deref()),
            Command::Compare { prop, .. } => s.compare(prop.as_deref()),
            Command::Oracle { prop, .. } => s.oracle(prop.as_deref()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn load(file: &Path, err: &mut dyn Write) -> Result<(Program, Compiled), Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", file.display()),
    })?;
    let located = |d: crate::lang::Diagnostic| Failure::problem(format!("{}:{d}", file.display()));
    let program = parse(&text).map_err(located)?;
    let compiled = compile(&program).map_err(located)?;
    for w in &compiled.warnings {
        let _ = writeln!(err, "{}:{w}", file.display());
    }
    Ok((program, compiled))
}

/// Candidates closest to `wanted` by edit distance.
fn suggestions<'a>(wanted: &str, candidates: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut scored: Vec<(usize, &str)> = candidates
        .map(|c| (strsim::levenshtein(wanted, c), c))
        .collect();
    scored.sort();
    scored.into_iter().take(5).map(|(_, c)| c).collect()
}

fn unknown(kind: &str, wanted: &str, near: Vec<&str>) -> Failure {
    let mut message = format!("unknown {kind} `{wanted}`");
    if !near.is_empty() {
        message.push_str("; did you mean one of:");
        for n in near {
            message.push_str("\n  ");
            message.push_str(n);
        }
    }
    Failure::problem(message)
}

fn parse_value(text: &str) -> Option<f64> {
    let tokens = lex(text.trim()).ok()?;
    match tokens.as_slice() {
        [t, eof] if eof.kind == TokenKind::Eof => match t.kind {
            TokenKind::Number(v) => Some(v),
            _ => None,
        },
        _ => None,
    }
}

impl Session<'_> {
    fn prec(&self) -> usize {
        self.cli.precision
    }

    fn emit(&mut self, text: &str) -> Outcome {
        self.out.write_all(text.as_bytes()).map_err(|e| Failure {
            code: 2,
            message: format!("write failed: {e}"),
        })
    }

    fn emit_json(&mut self, v: &Value) -> Outcome {
        let text = serde_json::to_string_pretty(v).expect("json values serialise");
        self.emit(&format!("{text}\n"))
    }

    fn node(&self, name: &str) -> Result<(String, NodeId), Failure> {
        let db = self.compiled.reasoner.atms();
        let datum = parse_prop(name)
            .map(|p| p.datum())
            .unwrap_or_else(|_| name.trim().to_string());
        match db.node_by_datum(&datum) {
            Some(n) => Ok((datum, n)),
            None => Err(unknown(
                "proposition",
                &datum,
                suggestions(&datum, db.nodes().map(|n| n.datum.as_str())),
            )),
        }
    }

    fn assumption(&self, name: &str) -> Result<AssumptionId, Failure> {
        let db = self.compiled.reasoner.atms();
        let name = name.trim();
        if let Some(a) = db.assumption_by_name(name) {
            return Ok(a);
        }
        if let Some(a) = parse_prop(name)
            .ok()
            .and_then(|p| db.assumption_by_name(&p.datum()))
        {
            return Ok(a);
        }
        Err(unknown(
            "assumption",
            name,
            suggestions(name, db.assumptions().iter().map(|a| a.name.as_str())),
        ))
    }

    fn options(&self) -> Result<EvalOptions, Failure> {
        let mut opts = EvalOptions::default();
        if let Some(k) = &self.cli.kernel {
            let mut kernel = Vec::new();
            for name in k.split(',').filter(|s| !s.trim().is_empty()) {
                kernel.push(self.assumption(name)?);
            }
            opts.kernel = Some(slatms_core::atms::canonical(&kernel));
        }
        let mut overrides = BTreeMap::new();
        for c in &self.cli.clamp {
            let (name, value) = c
                .rsplit_once('=')
                .ok_or_else(|| Failure::problem(format!("--clamp `{c}`: expected NAME=VALUE")))?;
            let v = parse_value(value)
                .filter(|v| (0.0..=1.0).contains(v))
                .ok_or_else(|| {
                    Failure::problem(format!("--clamp `{c}`: value must be a number in [0, 1]"))
                })?;
            overrides.insert(self.assumption(name)?, v);
        }
        opts.overrides = overrides;
        Ok(opts)
    }

    fn check(&mut self) -> Outcome {
        let db = self.compiled.reasoner.atms();
        let line = format!(
            "ok: {} statements, {} nodes, {} assumptions, {} one-ofs\n",
            self.program.statements.len(),
            db.nodes().count(),
            db.assumptions().len(),
            db.disjunctions().len(),
        );
        if self.cli.json {
            let v = json!({
                "ok": true,
                "statements": self.program.statements.len(),
                "nodes": db.nodes().count(),
                "assumptions": db.assumptions().len(),
                "one_ofs": db.disjunctions().len(),
            });
            return self.emit_json(&v);
        }
        self.emit(&line)
    }

    fn scope(&self) -> Result<Vec<DisjunctionId>, Failure> {
        let db = self.compiled.reasoner.atms();
        match self.cli.scope.as_deref().map(str::trim) {
            None => Ok(self.compiled.default_scope.clone()),
            Some("all") => Ok(db.disjunctions().iter().map(|d| d.id).collect()),
            Some(list) => {
                let mut scope = Vec::new();
                for name in list.split(',').filter(|s| !s.trim().is_empty()) {
                    let (datum, n) = self.node(name)?;
                    let d = db
                        .node(n)
                        .ok()
                        .and_then(|n| n.assumption())
                        .and_then(|a| db.assumption(a).ok())
                        .and_then(|a| a.disjunction)
                        .ok_or_else(|| {
                            Failure::problem(format!("{datum} is not a one-of member"))
                        })?;
                    if !scope.contains(&d) {
                        scope.push(d);
                    }
                }
                scope.sort();
                Ok(scope)
            }
        }
    }

    fn solutions(&self) -> Result<(Vec<String>, Value), Failure> {
        let opts = self.options()?;
        let scope = self.scope()?;
        let r = &self.compiled.reasoner;
        let solutions = r
            .rank_solutions_with(&scope, &opts)
            .map_err(|e| Failure::problem(e.to_string()))?;
        let mut lines = Vec::new();
        let mut records = Vec::new();
        for s in &solutions {
            lines.push(format!(
                "Solution: {}: {}",
                s.datum,
                report::pair(s.evaluation.pair, self.prec())
            ));
            if self.cli.explain {
                lines.push(report::explain(r, &s.evaluation, self.prec()).trim_end().to_string());
            }
            let props: Vec<&str> = s
                .nodes
                .iter()
                .map(|&n| r.atms().node(n).map(|n| n.datum.as_str()).unwrap_or(""))
                .collect();
            let mut rec = report::evaluation_json(r, &s.evaluation);
            rec["props"] = json!(props);
            records.push(rec);
        }
        Ok((lines, json!({ "solutions": records })))
    }

    fn solve_default(&mut self) -> Outcome {
        let (lines, v) = self.solutions()?;
        if self.cli.json {
            return self.emit_json(&v);
        }
        self.emit(&lines.iter().map(|l| format!("{l}\n")).collect::<String>())
    }

    fn query_one(&self, name: &str) -> Result<(String, Value), Failure> {
        let (datum, node) = self.node(name)?;
        let opts = self.options()?;
        let r = &self.compiled.reasoner;
        let ev = r
            .evaluate_with(node, &opts)
            .map_err(|e| Failure::problem(format!("{datum}: {e}")))?;
        let mut text = format!("{datum}: {}\n", report::pair(ev.pair, self.prec()));
        if self.cli.explain {
            text.push_str(&report::explain(r, &ev, self.prec()));
        }
        let mut v = report::evaluation_json(r, &ev);
        v["prop"] = json!(datum);
        Ok((text, v))
    }

    fn query(&mut self, prop: Option<&str>) -> Outcome {
        if let Some(p) = prop {
            let (text, v) = self.query_one(p)?;
            return if self.cli.json {
                self.emit_json(&v)
            } else {
                self.emit(&text)
            };
        }
        if self.compiled.directives.is_empty() {
            return Err(Failure::problem(format!(
                "no proposition given and {} has no `?-` directives",
                self.file.display()
            )));
        }
        let mut text = String::new();
        let mut values = Vec::new();
        for d in self.compiled.directives.clone() {
            match d {
                Directive::Query(p) => {
                    let (t, v) = self.query_one(&p.datum())?;
                    text.push_str(&t);
                    values.push(v);
                }
                Directive::Solve => {
                    let (lines, v) = self.solutions()?;
                    for l in lines {
                        text.push_str(&l);
                        text.push('\n');
                    }
                    values.push(v);
                }
            }
        }
        if self.cli.json {
            self.emit_json(&Value::Array(values))
        } else {
            self.emit(&text)
        }
    }

    fn model(&self) -> Result<OracleModel, Failure> {
        OracleModel::build(&self.program).map_err(|e| Failure::problem(format!("oracle: {e}")))
    }

    fn oracle_props(&self, model: &OracleModel, prop: Option<&str>) -> Result<Vec<crate::lang::Prop>, Failure> {
        match prop {
            None => Ok(model.props().cloned().collect()),
            Some(name) => {
                let p = parse_prop(name).map_err(|d| Failure::problem(format!("`{name}`: {d}")))?;
                if model.support(&p).is_none() {
                    let all: Vec<String> = model.props().map(|p| p.datum()).collect();
                    return Err(unknown(
                        "proposition",
                        &p.datum(),
                        suggestions(&p.datum(), all.iter().map(String::as_str)),
                    ));
                }
                Ok(vec![p])
            }
        }
    }

    fn oracle(&mut self, prop: Option<&str>) -> Outcome {
        let model = self.model()?;
        let props = self.oracle_props(&model, prop)?;
        let mut text = String::new();
        let mut rows = Vec::new();
        for p in &props {
            let s = model.support(p).expect("prop is modelled");
            text.push_str(&format!(
                "{p}: [{}, {}]\n",
                report::number(s.belief, self.prec()),
                report::number(s.plausibility, self.prec())
            ));
            rows.push(json!({"prop": p.datum(), "belief": s.belief, "plausibility": s.plausibility}));
        }
        text.push_str(&format!(
            "worlds: {}\nconflict: {}\n",
            model.worlds,
            report::number(model.conflict, self.prec())
        ));
        if self.cli.json {
            let v = json!({"props": rows, "worlds": model.worlds, "conflict": model.conflict});
            return self.emit_json(&v);
        }
        self.emit(&text)
    }

    fn compare(&mut self, prop: Option<&str>) -> Outcome {
        let model = self.model()?;
        let props = self.oracle_props(&model, prop)?;
        let r = &self.compiled.reasoner;
        let mut reason = static_regime_violation(&self.program);
        if reason.is_none() && model.conflict > 0.0 {
            reason = Some(format!("oracle conflict {}", model.conflict));
        }
        let mut text = String::new();
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for p in &props {
            let s = model.support(p).expect("prop is modelled");
            let node = r
                .atms()
                .node_by_datum(&p.datum())
                .ok_or_else(|| Failure::problem(format!("{p} has no node")))?;
            let ev = r
                .evaluate(node)
                .map_err(|e| Failure::problem(format!("{p}: {e}")))?;
            if reason.is_none() && ev.plan.approximated() {
                reason = Some(format!("{p} combines partially independent evidence"));
            }
            let dl = (ev.pair.lower() - s.belief).abs();
            let du = (ev.pair.upper() - s.plausibility).abs();
            worst = worst.max(dl).max(du);
            text.push_str(&format!(
                "{p}: evidence {} oracle [{}, {}] delta [{dl:.3e}, {du:.3e}]\n",
                report::pair(ev.pair, self.prec()),
                report::number(s.belief, self.prec()),
                report::number(s.plausibility, self.prec()),
            ));
            rows.push(json!({
                "prop": p.datum(),
                "evidence": [ev.pair.lower(), ev.pair.upper()],
                "oracle": [s.belief, s.plausibility],
                "delta": [dl, du],
            }));
        }
        let equivalent = reason.is_none();
        match &reason {
            None => text.push_str(&format!("regime: equivalence, max delta {worst:.3e}\n")),
            Some(why) => text.push_str(&format!("regime: non-equivalence regime ({why})\n")),
        }
        if self.cli.json {
            let v = json!({
                "props": rows,
                "equivalence": equivalent,
                "reason": reason,
                "max_delta": worst,
            });
            self.emit_json(&v)?;
        } else {
            self.emit(&text)?;
        }
        if equivalent && worst > COMPARE_TOLERANCE {
            return Err(Failure::problem(format!(
                "evidence and oracle differ by {worst:.3e} inside the equivalence regime"
            )));
        }
        Ok(())
    }
}
