//! Commands behind the `qhvk` binary. Every command produces a [`RunReport`]
//! (or, for `export`, a document) and an exit code:
//! 0 all checks pass, 2 a check failed, 3 bad input, 4 solver indeterminate.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use qhvk_core::cyclo::{self, CycError};
use qhvk_core::deffile::{self, AlgebraDefFile, DefError};
use qhvk_core::qhopf::{Check, QhError, QuasiHopfData};
use qhvk_core::solver::{self, SolverError, Status};
use qhvk_core::transport::Transport;
use qhvk_core::uqsl2::{self, QElements, QModel};
use qhvk_core::{salg, CycNum, Elem, SuperAlgebra, TensorElem};

pub const TOOL: &str = "qhvk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_INDETERMINATE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("bad β: {0}")]
    Beta(#[from] CycError),
    #[error("definition file: {0}")]
    Def(#[from] DefError),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error(transparent)]
    Qh(#[from] QhError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Beta(_) | CliError::Def(_) | CliError::Read { .. } => EXIT_INPUT,
            // an internal construction failure on built-in data is a verification failure
            CliError::Qh(_) | CliError::Solver(_) => EXIT_FAIL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Axioms,
    Ribbon,
    Transport,
}

impl Suite {
    fn includes(self, s: Suite) -> bool {
        self == Suite::All || self == s
    }

    fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Axioms => "axioms",
            Suite::Ribbon => "ribbon",
            Suite::Transport => "transport",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub status: Outcome,
    pub exit_code: i32,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    /// Milliseconds per stage; left out of JSON unless asked for so reports stay byte-stable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u128>>,
    #[serde(skip)]
    pub timings: BTreeMap<String, u128>,
}

impl RunReport {
    fn new(command: &str, target: &str) -> Self {
        RunReport {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            target: target.into(),
            beta: None,
            suite: None,
            status: Outcome::Pass,
            exit_code: EXIT_PASS,
            checks: Vec::new(),
            notes: Vec::new(),
            data: Value::Null,
            timings_ms: None,
            timings: BTreeMap::new(),
        }
    }

    fn push_group(&mut self, group: &str, checks: impl IntoIterator<Item = Check>) {
        for mut c in checks {
            c.name = format!("{group}.{}", c.name);
            self.checks.push(c);
        }
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.timings.entry(stage.into()).or_default() += t.elapsed().as_millis();
        out
    }

    /// Status and exit code from the checks, unless already marked indeterminate.
    fn finish(mut self) -> Self {
        if self.status != Outcome::Indeterminate {
            let ok = self.checks.iter().all(|c| c.pass);
            self.status = if ok { Outcome::Pass } else { Outcome::Fail };
            self.exit_code = if ok { EXIT_PASS } else { EXIT_FAIL };
        } else {
            self.exit_code = EXIT_INDETERMINATE;
        }
        self
    }

    pub fn with_timings(mut self, on: bool) -> Self {
        self.timings_ms = on.then(|| self.timings.clone());
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{TOOL} {VERSION} {} {}", self.command, self.target);
        if let Some(b) = &self.beta {
            let _ = writeln!(s, "beta   {b}");
        }
        if let Some(su) = &self.suite {
            let _ = writeln!(s, "suite  {su}");
        }
        for c in &self.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            match &c.first_failure {
                Some(m) => {
                    let _ = writeln!(s, "{mark} {}  at {:?} residual {}", c.name, m.indices, m.residual);
                }
                None => {
                    let _ = writeln!(s, "{mark} {}", c.name);
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note   {n}");
        }
        if !self.data.is_null() {
            let _ = writeln!(s, "data   {}", serde_json::to_string(&self.data).expect("data serializes"));
        }
        for (k, ms) in &self.timings {
            let _ = writeln!(s, "time   {k} {ms} ms");
        }
        let status = match self.status {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Indeterminate => "indeterminate",
        };
        let _ = writeln!(s, "status {status} (exit {})", self.exit_code);
        s
    }
}

/// Accepts `zeta^k` or any CycNum text form; β⁴ = −1 is enforced.
pub fn parse_beta(token: &str) -> Result<CycNum, CliError> {
    Ok(cyclo::parse_beta(&token.replace("zeta", "z"))?)
}

pub fn beta_token(beta: &CycNum) -> String {
    match cyclo::beta_exponent(beta) {
        Some(k) => format!("zeta^{k}"),
        None => beta.to_string(),
    }
}

fn verify_hopf(rep: &mut RunReport, hopf: &QuasiHopfData, ribbon: Option<&Elem>, suite: Suite) -> Result<(), CliError> {
    if suite.includes(Suite::Axioms) {
        let axioms = rep.timed("axioms", || hopf.verify_axioms());
        rep.push_group("axioms", axioms.checks);
    }
    if suite.includes(Suite::Ribbon) && hopf.r.is_some() {
        let mut checks = hopf.verify_gamma()?;
        let u = hopf.drinfeld_u()?;
        checks.push(hopf.verify_s_squared(&u)?);
        if let Some(v) = ribbon {
            checks.extend(hopf.verify_ribbon(v)?);
        }
        rep.push_group("ribbon", checks);
    }
    Ok(())
}

fn verify_uqsl2(rep: &mut RunReport, beta: &CycNum, suite: Suite) -> Result<(), CliError> {
    let m: QModel = rep.timed("build", || uqsl2::build_q(beta))?;
    verify_hopf(rep, &m.hopf, Some(&m.v), suite)?;
    if suite.includes(Suite::Ribbon) {
        let appendix = rep.timed("appendix", || uqsl2::verify_appendix(&m))?;
        rep.push_group("appendix", appendix);
        rep.push_group("r_consistency", uqsl2::r_consistency(&m)?);
    }
    Ok(())
}

fn verify_transport(rep: &mut RunReport, beta: &CycNum) -> Result<(), CliError> {
    let checks = rep.timed("transport", || Transport::new(beta).and_then(|t| t.all_checks()))?;
    rep.push_group("transport", checks);
    Ok(())
}

/// Build a file-defined algebra, turning construction failures into failed checks.
fn verify_file(rep: &mut RunReport, def: &AlgebraDefFile, suite: Suite) -> Result<(), CliError> {
    if suite == Suite::Transport {
        return Err(CliError::Usage("the transport suite needs a built-in target".into()));
    }
    let spec = def.to_spec()?;
    rep.push_group("algebra", [deffile::unit_check(&spec.algebra), deffile::associativity_check(&spec.algebra)]);
    match QuasiHopfData::new(spec) {
        Ok(hopf) => {
            if let Err(e) = verify_hopf(rep, &hopf, def.ribbon_elem().as_ref(), suite) {
                rep.checks.push(Check::flag("ribbon.invertible_data", false));
                rep.notes.push(e.to_string());
            }
        }
        Err(e) => {
            rep.checks.push(Check::flag("algebra.invertible_data", false));
            rep.notes.push(e.to_string());
        }
    }
    Ok(())
}

pub fn load_deffile(path: &Path) -> Result<AlgebraDefFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
    Ok(text.parse()?)
}

pub fn cmd_verify(target: &str, beta: &CycNum, suite: Suite) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new("verify", target);
    rep.beta = Some(beta_token(beta));
    rep.suite = Some(suite.name().into());
    match target {
        "uqsl2" => {
            verify_uqsl2(&mut rep, beta, suite)?;
            if suite.includes(Suite::Transport) {
                verify_transport(&mut rep, beta)?;
            }
        }
        "salg" => {
            if suite == Suite::Ribbon {
                return Err(CliError::Usage("salg has no ribbon suite".into()));
            }
            if suite.includes(Suite::Axioms) {
                let m = rep.timed("build", || salg::build_s(beta))?;
                let checks = rep.timed("axioms", || m.suite());
                rep.push_group("salg", checks.checks);
            }
            if suite.includes(Suite::Transport) {
                verify_transport(&mut rep, beta)?;
            }
        }
        path => {
            let p = Path::new(path);
            if !p.is_file() {
                return Err(CliError::Usage(format!("unknown target `{path}`")));
            }
            let def = load_deffile(p)?;
            rep.beta = None;
            verify_file(&mut rep, &def, suite)?;
        }
    }
    Ok(rep.finish())
}

fn theorem_run_report(rep: &mut RunReport, run: &solver::TheoremRun) {
    rep.data = json!({
        "label": run.label,
        "linear_dimension": run.linear_dim,
        "equations": run.equations,
        "steps": run.outcome.steps,
        "leaves": run.outcome.leaves,
        "depth": run.outcome.depth,
        "tree": run.outcome.tree,
    });
    if run.outcome.status == Status::Indeterminate {
        rep.status = Outcome::Indeterminate;
    }
}

/// `uqsl2` needs `eps = ±1`; `q0` is the positive control on the 8-dimensional quotient.
pub fn cmd_norm(target: &str, eps: Option<i64>) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new("norm", target);
    match target {
        "uqsl2" => {
            let eps = match eps {
                Some(e @ (1 | -1)) => e,
                _ => return Err(CliError::Usage("norm uqsl2 needs --eps 1 or --eps -1".into())),
            };
            let hopf = solver::q_with_phi_eps(eps)?;
            let (_, _, run) = rep.timed("solver", || solver::run_search(&format!("Q, eps = {eps:+}"), &hopf))?;
            rep.checks.push(Check::flag("norm.unsat", run.outcome.status == Status::Unsat));
            rep.checks.push(Check::flag("norm.certificate_replayed", run.certificate_replayed));
            theorem_run_report(&mut rep, &run);
        }
        "q0" => {
            let control = rep.timed("solver", solver::q0_control)?;
            rep.checks.push(Check::flag("control.sat", control.run.outcome.status == Status::Sat));
            rep.checks.push(Check::flag("control.contains_rst", control.contains_rst));
            rep.checks.push(Check::flag("control.witness_verified", control.witness_verified));
            theorem_run_report(&mut rep, &control.run);
        }
        other => return Err(CliError::Usage(format!("unknown norm target `{other}`"))),
    }
    Ok(rep.finish())
}

fn labelled_terms(alg: &SuperAlgebra, e: &Elem) -> Value {
    Value::Array(e.iter().map(|(i, c)| json!({"label": alg.label(i), "coeff": c})).collect())
}

fn matrix_json(m: &[Vec<CycNum>]) -> Value {
    json!(m)
}

pub fn cmd_sl2z(beta: &CycNum) -> Result<RunReport, CliError> {
    let mut rep = RunReport::new("sl2z", "uqsl2");
    rep.beta = Some(beta_token(beta));
    let m = rep.timed("build", || uqsl2::build_q(beta))?;
    let act = rep.timed("action", || m.sl2z_action())?;
    let flipped = rep.timed("action", || uqsl2::build_q(&-beta).and_then(|f| f.sl2z_action()))?;
    rep.push_group("sl2z", act.against_reference(beta));
    rep.push_group("sl2z", act.relations());
    rep.push_group("sl2z", [act.conjugacy(&flipped)]);
    let basis = m.sl2z_basis()?;
    let elements: serde_json::Map<String, Value> =
        act.names.iter().zip(basis.iter()).map(|(n, e)| (n.clone(), labelled_terms(m.alg(), e))).collect();
    rep.data = json!({
        "basis": act.names,
        "b": act.b,
        "s": matrix_json(&act.s),
        "t": matrix_json(&act.t),
        "basis_elements": elements,
    });
    Ok(rep.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportWhat {
    Elements,
    Phi,
    R,
    Monodromy,
    Report,
    /// The built-in uqsl2 data as a definition file.
    Algebra,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

fn tensor_doc(alg: &SuperAlgebra, key: &str, t: &TensorElem, format: Format) -> String {
    match format {
        Format::Json => {
            let slots = alg.dim().pow(t.legs() as u32);
            let terms: Vec<Value> = t
                .iter()
                .map(|(idx, c)| {
                    let labels: Vec<&str> = idx.iter().map(|&i| alg.label(i)).collect();
                    json!({"indices": idx, "labels": labels, "coeff": c})
                })
                .collect();
            let doc = json!({"object": key, "legs": t.legs(), "slots": slots, "nonzero": t.len(), "terms": terms});
            serde_json::to_string_pretty(&doc).expect("serializes") + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            for (idx, c) in t.iter() {
                let labels: Vec<&str> = idx.iter().map(|&i| alg.label(i)).collect();
                let _ = writeln!(s, "{key} {} : {c}", labels.join(" "));
            }
            s
        }
    }
}

fn named_elements(m: &QModel) -> Result<Vec<(String, Elem)>, CliError> {
    let QElements { e, f, k, k_inv, e0, e1, fp, fm, casimir, e1p, e1m, wp, wm } = m.el.clone();
    let mut out: Vec<(String, Elem)> = [
        ("E", e),
        ("F", f),
        ("K", k),
        ("K_inv", k_inv),
        ("e0", e0),
        ("e1", e1),
        ("f_plus", fp),
        ("f_minus", fm),
        ("casimir", casimir),
        ("e1_plus", e1p),
        ("e1_minus", e1m),
        ("w_plus", wp),
        ("w_minus", wm),
        ("alpha", m.hopf.alpha.clone()),
        ("beta", m.hopf.beta_el.clone()),
        ("ribbon_v", m.v.clone()),
        ("drinfeld_u", m.u.clone()),
        ("balancing_g", m.g.clone()),
        ("cointegral", m.coint.clone()),
    ]
    .into_iter()
    .map(|(n, e)| (n.to_string(), e))
    .collect();
    for (n, e) in uqsl2::SL2Z_BASIS.iter().zip(m.sl2z_basis()?) {
        out.push((n.to_string(), e));
    }
    Ok(out)
}

/// Export a built-in object. `eps` selects Φ_ε for `phi` instead of the β-dependent Φ.
pub fn cmd_export(what: ExportWhat, beta: &CycNum, eps: Option<i64>, format: Format) -> Result<String, CliError> {
    let alg = uqsl2::q_algebra();
    Ok(match what {
        ExportWhat::Phi => {
            let phi = match eps {
                None => uqsl2::build_phi(&alg, beta),
                Some(e @ (1 | -1)) => uqsl2::build_phi_eps(&alg, e),
                Some(e) => return Err(CliError::Usage(format!("--eps must be 1 or -1, got {e}"))),
            };
            tensor_doc(&alg, "phi", &phi, format)
        }
        ExportWhat::R => tensor_doc(&alg, "r", &uqsl2::build_r(&alg, beta), format),
        ExportWhat::Monodromy => {
            let m = uqsl2::build_q(beta)?;
            tensor_doc(&alg, "monodromy", &m.monodromy, format)
        }
        ExportWhat::Elements => {
            let m = uqsl2::build_q(beta)?;
            let named = named_elements(&m)?;
            match format {
                Format::Json => {
                    let map: serde_json::Map<String, Value> =
                        named.iter().map(|(n, e)| (n.clone(), labelled_terms(&alg, e))).collect();
                    let doc = json!({"beta": beta_token(beta), "elements": map});
                    serde_json::to_string_pretty(&doc).expect("serializes") + "\n"
                }
                Format::Text => {
                    let mut s = String::new();
                    for (n, e) in &named {
                        for (i, c) in e.iter() {
                            let _ = writeln!(s, "{n} {} : {c}", alg.label(i));
                        }
                    }
                    s
                }
            }
        }
        ExportWhat::Report => {
            let rep = cmd_verify("uqsl2", beta, Suite::All)?;
            match format {
                Format::Json => rep.to_json(),
                Format::Text => rep.to_text(),
            }
        }
        ExportWhat::Algebra => {
            if format == Format::Json {
                return Err(CliError::Usage("the algebra export is a definition file; use --format text".into()));
            }
            let m = uqsl2::build_q(beta)?;
            let header = format!("# uqsl2 at beta = {}\n", beta_token(beta));
            header + &AlgebraDefFile::from_spec(&m.hopf.spec(), Some(&m.v)).to_string()
        }
    })
}
