//! Command-line front end. `run` is the whole program minus process exit,
//! so it can be driven from tests.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use num_traits::Signed;
use serde_json::{json, Map, Value};

use crate::generate::{random_market, GeneratorConfig};
use crate::market::OptionQuote;
use crate::pricing::semistatic::{semistatic_price, SemiStaticVerdict, StaticArbitrage};
use crate::pricing::{
    check_price_system, dual_cones, dual_scps, pricing_report, primal_cones, primal_superhedge, recover_scps,
    verify_superhedge_with, ConeChoice, DualResult, HedgingStrategy, PrimalResult, Violation,
};
use crate::randomized::{build_enlarged_market, dp_value, equality_check};
use crate::recursion::{
    backward_dual_cones, interior_diagnostic, strict_arbitrage_search, tilde_decomposition_check, verify_witness,
    ArbitrageWitness, NaVerdict,
};
use crate::{approx_decimal, Extended, Market, MarketError, NodeId, Rational, Scalar, Vector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_ARBITRAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Validate,
    Polar,
    Recursion,
    Arbitrage,
    Price,
    Duality,
    Randomize,
    Semistatic,
}

impl Verb {
    fn name(self) -> &'static str {
        match self {
            Verb::Validate => "validate",
            Verb::Polar => "polar",
            Verb::Recursion => "recursion",
            Verb::Arbitrage => "arbitrage",
            Verb::Price => "price",
            Verb::Duality => "duality",
            Verb::Randomize => "randomize",
            Verb::Semistatic => "semistatic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Primal,
    Dual,
    Dp,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Cones {
    #[value(name = "K")]
    K,
    #[value(name = "K-tilde")]
    KTilde,
}

impl From<Cones> for ConeChoice {
    fn from(c: Cones) -> Self {
        match c {
            Cones::K => ConeChoice::K,
            Cones::KTilde => ConeChoice::KTilde,
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    Rational::parse_exact(text.trim()).ok_or_else(|| format!("not an exact rational: {text:?}"))
}

fn parse_positive(text: &str) -> Result<Rational, String> {
    let r = parse_rational(text)?;
    if r.is_positive() {
        Ok(r)
    } else {
        Err(format!("epsilon must be positive, got {text}"))
    }
}

/// Certify superhedging prices on finite scenario trees with proportional
/// transaction costs and portfolio constraints.
#[derive(Parser, Debug)]
#[command(name = "friction", version)]
pub struct Command {
    #[arg(value_enum)]
    pub verb: Verb,

    /// Market files. With --seed, the literal `random` stands for a
    /// generated instance.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    #[arg(long, value_enum, default_value = "all")]
    pub method: Method,

    #[arg(long, value_enum, default_value = "K")]
    pub cones: Cones,

    /// Enlargement parameter for `dp` and `randomize`, as "p/q".
    #[arg(long, value_parser = parse_positive, default_value = "1/100")]
    pub epsilon: Rational,

    /// Comma-separated epsilons; enables the enlargement cross-check in
    /// `duality` and overrides --epsilon in `randomize`.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    pub epsilon_schedule: Vec<Rational>,

    /// Also print a human-readable table on stderr.
    #[arg(long)]
    pub pretty: bool,

    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Infeasible,
    Arbitrage,
    Invalid,
    Internal,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Infeasible => "infeasible",
            Status::Arbitrage => "arbitrage",
            Status::Invalid | Status::Internal => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Infeasible => EXIT_OK,
            Status::Arbitrage => EXIT_ARBITRAGE,
            Status::Invalid => EXIT_VALIDATION,
            Status::Internal => EXIT_INTERNAL,
        }
    }
}

/// One report per input file.
#[derive(Clone, Debug)]
pub struct Report {
    pub verb: Verb,
    pub input: String,
    pub status: Status,
    pub body: Map<String, Value>,
    pub elapsed: Duration,
}

impl Report {
    pub fn to_value(&self) -> Value {
        let mut doc = self.body.clone();
        doc.insert("verb".into(), json!(self.verb.name()));
        doc.insert("input".into(), json!(self.input));
        doc.insert("status".into(), json!(self.status.label()));
        prune(Value::Object(doc))
    }
}

/// Drops nulls and empty arrays/objects, recursively.
fn prune(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, prune(v)))
                .filter(|(_, v)| !is_empty(v))
                .collect(),
        ),
        Value::Array(items) => Value::Array(items.into_iter().map(prune).collect()),
        other => other,
    }
}

fn is_empty(v: &Value) -> bool {
    match v {
        Value::Null => true,
        Value::Array(a) => a.is_empty(),
        Value::Object(o) => o.is_empty(),
        _ => false,
    }
}

/// The machine document: a single report object, or an array of them for
/// several inputs. Keys are sorted and numbers stay exact strings.
pub fn emit_machine(reports: &[Report]) -> String {
    let doc = match reports {
        [one] => one.to_value(),
        many => Value::Array(many.iter().map(Report::to_value).collect()),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
    text.push('\n');
    text
}

/// Human table: every top-level or nested scalar that parses as a rational
/// gets an approximate decimal column.
pub fn emit_pretty(reports: &[Report]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "{} {}: {} ({:.3}s)\n",
            r.verb.name(),
            r.input,
            r.status.label(),
            r.elapsed.as_secs_f64()
        ));
        let mut rows = Vec::new();
        collect_rows("", &r.to_value(), &mut rows);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (key, text) in rows {
            let approx = match Rational::parse_exact(&text) {
                Some(q) if !q.is_integer() => format!("{} (approx)", approx_decimal(&q, 20)),
                _ => String::new(),
            };
            out.push_str(&format!("  {key:<width$}  {text:<24} {approx}\n"));
        }
    }
    out
}

fn collect_rows(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let Value::Object(map) = v else { return };
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::String(s) if !matches!(k.as_str(), "verb" | "input" | "status") => rows.push((key, s.clone())),
            Value::Bool(b) => rows.push((key, b.to_string())),
            // strategies and price systems are long vectors; keep the table short
            Value::Object(_) if !matches!(k.as_str(), "strategy" | "price_system" | "witness" | "scps" | "nodes") => {
                collect_rows(&key, v, rows)
            }
            _ => {}
        }
    }
}

fn num(x: &impl Display) -> Value {
    Value::String(x.to_string())
}

fn vec_json(v: &Vector<Rational>) -> Value {
    Value::Array(v.iter().map(num).collect())
}

fn by_node<T>(spec: &Market, map: &BTreeMap<NodeId, T>, f: impl Fn(&T) -> Value) -> Value {
    let tree = spec.tree();
    Value::Object(map.iter().map(|(v, x)| (tree.node(*v).id.clone(), f(x))).collect())
}

fn node_names(spec: &Market, nodes: &[NodeId]) -> Value {
    Value::Array(nodes.iter().map(|&v| json!(spec.tree().node(v).id)).collect())
}

fn violation_json(r: &Result<(), Violation>) -> Value {
    match r {
        Ok(()) => json!({"valid": true}),
        Err(v) => json!({"valid": false, "node": v.node, "violation": v.what}),
    }
}

fn witness_json(spec: &Market, w: &ArbitrageWitness<Rational>) -> Value {
    json!({
        "time": w.time,
        "nonzero_node": spec.tree().node(w.nonzero_node).id,
        "transfers": by_node(spec, &w.transfers, vec_json),
        "positions": by_node(spec, &w.positions, vec_json),
        "verified": verify_witness(spec, w),
    })
}

fn static_witness_json(spec: &Market, w: &StaticArbitrage<Rational>) -> Value {
    json!({
        "transfers": by_node(spec, &w.transfers, vec_json),
        "terminal": by_node(spec, &w.terminal, vec_json),
        "statics": w.statics.iter().map(num).collect::<Vec<_>>(),
    })
}

fn strategy_json(spec: &Market, s: &HedgingStrategy<Rational>) -> Value {
    json!({
        "y": num(&s.y),
        "transfers": by_node(spec, &s.transfers, vec_json),
        "positions": by_node(spec, &s.positions, vec_json),
        "statics": s.statics.iter().map(num).collect::<Vec<_>>(),
    })
}

fn primal_json(spec: &Market, p: &PrimalResult<Rational>, check: Option<&Result<(), Violation>>) -> Value {
    json!({
        "value": num(&p.value),
        "strategy": p.strategy.as_ref().map(|s| strategy_json(spec, s)),
        "strategy_check": check.map(violation_json),
    })
}

fn dual_json(spec: &Market, d: &DualResult<Rational>, check: Option<&Result<(), Violation>>) -> Value {
    let scps = d.price_system.as_ref().and_then(|m| recover_scps(spec, m).ok()).map(|s| {
        json!({
            "z": by_node(spec, &s.z, vec_json),
            "q": by_node(spec, &s.q, num),
            "expectation": num(&s.expectation),
        })
    });
    json!({
        "value": num(&d.value),
        "price_system": d.price_system.as_ref().map(|m| by_node(spec, &m.m, vec_json)),
        "price_system_check": check.map(violation_json),
        "scps": scps,
    })
}

fn na_json(spec: &Market, verdict: &NaVerdict<Rational>) -> Value {
    match verdict.witness() {
        None => json!({"verdict": "pass"}),
        Some(w) => json!({"verdict": "fail", "witness": witness_json(spec, w)}),
    }
}

fn load(input: &str, seed: Option<u64>) -> Result<Market, MarketError> {
    match seed {
        Some(seed) if input == "random" => Ok(random_market(seed, &GeneratorConfig::default())),
        _ => Market::load(input),
    }
}

type Outcome = (Status, Map<String, Value>);

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("report bodies are objects"),
    }
}

fn validate(spec: &Market) -> Outcome {
    let tree = spec.tree();
    (
        Status::Ok,
        obj(json!({
            "dimension": spec.dim(),
            "horizon": spec.horizon(),
            "node_count": tree.len(),
            "leaf_count": tree.leaves().len(),
            "option_count": spec.options().len(),
        })),
    )
}

fn polar(spec: &Market) -> Outcome {
    let p = spec.polar();
    (
        Status::Ok,
        obj(json!({
            "polar": node_names(spec, &p.polar_nodes()),
            "non_polar": node_names(spec, &p.non_polar_nodes()),
        })),
    )
}

fn recursion(spec: &Market) -> Outcome {
    let r = backward_dual_cones(spec);
    let diag = interior_diagnostic(&r);
    let tree = spec.tree();
    let d = spec.dim();
    let mut nodes = Map::new();
    for v in r.polar.non_polar_nodes() {
        let cone = &r.tilde_dual[v];
        let section = cone.normalized_section(d - 1).ok().map(|s| {
            json!({
                "vertices": s.vertices.iter().map(vec_json).collect::<Vec<_>>(),
                "rays": s.rays.iter().map(vec_json).collect::<Vec<_>>(),
            })
        });
        nodes.insert(
            tree.node(v).id.clone(),
            json!({
                "dual_generators": cone.generators().iter().map(vec_json).collect::<Vec<_>>(),
                "section": section,
                "interior": !r.empty_interior_nodes.contains(&v),
            }),
        );
    }
    let decomposition = tilde_decomposition_check(&r, spec);
    let status = if decomposition { Status::Ok } else { Status::Internal };
    (
        status,
        obj(json!({
            "nodes": nodes,
            "empty_interior": node_names(spec, &diag.flagged),
            "necessary_condition": diag.message(),
            "decomposition_holds": decomposition,
        })),
    )
}

fn arbitrage(spec: &Market) -> Outcome {
    let verdict = strict_arbitrage_search(spec);
    let status = match verdict.witness() {
        None => Status::Ok,
        Some(w) if verify_witness(spec, w) => Status::Arbitrage,
        Some(_) => Status::Internal,
    };
    (status, obj(json!({ "na": na_json(spec, &verdict) })))
}

fn price(spec: &Market, cmd: &Command) -> Outcome {
    let verdict = strict_arbitrage_search(spec);
    if !verdict.passes() {
        return (Status::Arbitrage, obj(json!({ "na": na_json(spec, &verdict) })));
    }
    let r = backward_dual_cones(spec);
    let choice: ConeChoice = cmd.cones.into();
    let mut body = Map::new();
    body.insert("cones".into(), json!(choice.name()));
    let mut status = Status::Ok;
    if matches!(cmd.method, Method::Primal | Method::All) {
        let cones = primal_cones(spec, choice, Some(&r));
        let p = primal_superhedge(spec, choice, Some(&r));
        let check = p.strategy.as_ref().map(|s| verify_superhedge_with(spec, &cones, &[], s));
        if matches!(check, Some(Err(_))) {
            status = Status::Internal;
        } else if p.value == Extended::PosInf {
            status = status.max(Status::Infeasible);
        }
        body.insert("primal".into(), primal_json(spec, &p, check.as_ref()));
    }
    if matches!(cmd.method, Method::Dual | Method::All) {
        let cones = dual_cones(spec, choice, Some(&r));
        let d = dual_scps(spec, choice, Some(&r));
        let check = d.price_system.as_ref().map(|m| check_price_system(spec, &cones, m));
        if matches!(check, Some(Err(_))) {
            status = Status::Internal;
        }
        body.insert("dual".into(), dual_json(spec, &d, check.as_ref()));
    }
    if matches!(cmd.method, Method::Dp | Method::All) {
        match build_enlarged_market(spec, &r, cmd.epsilon.clone()) {
            Ok(e) => {
                let value = dp_value(&e, &e.claim_values());
                body.insert("dp".into(), json!({"epsilon": num(&cmd.epsilon), "value": num(&value)}));
            }
            Err(err) => {
                body.insert("dp".into(), json!({"epsilon": num(&cmd.epsilon), "error": err.to_string()}));
            }
        }
    }
    (status, body)
}

fn duality(spec: &Market, cmd: &Command) -> Outcome {
    let verdict = strict_arbitrage_search(spec);
    let r = backward_dual_cones(spec);
    let diag = interior_diagnostic(&r);
    let decomposition = tilde_decomposition_check(&r, spec);
    let mut body = obj(json!({
        "na": na_json(spec, &verdict),
        "polar": node_names(spec, &r.polar.polar_nodes()),
        "empty_interior": node_names(spec, &diag.flagged),
        "decomposition_holds": decomposition,
    }));
    if !verdict.passes() {
        let status = if verdict.witness().is_some_and(|w| verify_witness(spec, w)) {
            Status::Arbitrage
        } else {
            Status::Internal
        };
        return (status, body);
    }
    let p = pricing_report(spec, &r);
    body.insert("primal_K".into(), primal_json(spec, &p.primal_k, p.strategy_check.as_ref()));
    body.insert("primal_K_tilde".into(), json!({"value": num(&p.primal_tilde.value)}));
    body.insert("dual_K_tilde".into(), dual_json(spec, &p.dual_tilde, p.price_system_check.as_ref()));
    body.insert("dual_K".into(), json!({"value": num(&p.dual_k.value)}));
    body.insert("gap".into(), p.gap.as_ref().map(num).unwrap_or(Value::Null));
    body.insert("reduction_identity".into(), json!(p.reduction_identity));
    body.insert("duals_agree".into(), json!(p.duals_agree));
    let mut ok = p.consistent() && decomposition && diag.necessary_condition_holds();
    if !cmd.epsilon_schedule.is_empty() {
        match equality_check(spec, &r, &cmd.epsilon_schedule) {
            Ok(eq) => {
                ok &= eq.sandwich_holds() && eq.dp_agrees();
                body.insert("enlargement".into(), equality_json(spec, &eq));
            }
            Err(err) => {
                ok = false;
                body.insert("enlargement".into(), json!({"error": err.to_string()}));
            }
        }
    }
    let status = if !ok {
        Status::Internal
    } else if p.primal_k.value == Extended::PosInf {
        Status::Infeasible
    } else {
        Status::Ok
    };
    (status, body)
}

fn equality_json(spec: &Market, eq: &crate::randomized::EqualityReport<Rational>) -> Value {
    let tree = spec.tree();
    let runs: Vec<Value> = eq
        .runs
        .iter()
        .map(|run| {
            json!({
                "epsilon": num(&run.epsilon),
                "atom_count": run.atom_count,
                "atoms_interior": run.atoms_interior,
                "randomized": num(&run.randomized),
                "consistent": num(&run.consistent),
                "dp": num(&run.dp),
                "dual": num(&run.dual),
                "gap": run.gap.as_ref().map(num),
                "sandwich": run.sandwich,
                "one_step_arbitrage": run.one_step_failures.iter()
                    .map(|&(v, a)| json!({"node": tree.node(v).id, "atom": a}))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "primal_K": num(&eq.primal_k),
        "runs": runs,
        "gaps_nonincreasing": eq.gaps_nonincreasing,
        "classes_agree": eq.classes_agree(),
        "dp_agrees": eq.dp_agrees(),
        "sandwich_holds": eq.sandwich_holds(),
        "one_step_clean": eq.one_step_clean(),
    })
}

fn randomize(spec: &Market, cmd: &Command) -> Outcome {
    let verdict = strict_arbitrage_search(spec);
    if !verdict.passes() {
        return (Status::Arbitrage, obj(json!({ "na": na_json(spec, &verdict) })));
    }
    let r = backward_dual_cones(spec);
    let schedule = if cmd.epsilon_schedule.is_empty() {
        vec![cmd.epsilon.clone()]
    } else {
        cmd.epsilon_schedule.clone()
    };
    match equality_check(spec, &r, &schedule) {
        Ok(eq) => {
            let status = if eq.sandwich_holds() && eq.dp_agrees() { Status::Ok } else { Status::Internal };
            (status, obj(json!({ "enlargement": equality_json(spec, &eq) })))
        }
        // NA held, so an empty interior means the recursion and the search disagree
        Err(err) => (Status::Internal, obj(json!({ "error": err.to_string() }))),
    }
}

fn semistatic(spec: &Market) -> Outcome {
    let options: Vec<OptionQuote<Rational>> = spec.options().to_vec();
    let rep = semistatic_price(spec, &options);
    let na = match &rep.na {
        SemiStaticVerdict::Pass => json!({"verdict": "pass"}),
        SemiStaticVerdict::Dynamic(w) => json!({"verdict": "dynamic", "witness": witness_json(spec, w)}),
        SemiStaticVerdict::Static(w) => json!({"verdict": "static", "witness": static_witness_json(spec, w)}),
    };
    let mut body = obj(json!({ "na": na, "option_count": options.len() }));
    if !rep.na.passes() {
        return (Status::Arbitrage, body);
    }
    let dynamic = primal_superhedge(&spec.without_options(), ConeChoice::K, None).value;
    body.insert("slater_margin".into(), rep.slater_margin.as_ref().map(num).unwrap_or(Value::Null));
    body.insert("slater".into(), json!(rep.slater()));
    body.insert("primal".into(), primal_json(spec, &rep.primal, rep.strategy_check.as_ref()));
    body.insert("dual".into(), dual_json(spec, &rep.dual, rep.price_system_check.as_ref()));
    body.insert("gap".into(), rep.gap.as_ref().map(num).unwrap_or(Value::Null));
    body.insert("dynamic_primal".into(), num(&dynamic));
    let status = if !rep.consistent() || rep.primal.value > dynamic {
        Status::Internal
    } else if rep.primal.value == Extended::PosInf {
        Status::Infeasible
    } else {
        Status::Ok
    };
    (status, body)
}

fn dispatch(spec: &Market, cmd: &Command) -> Outcome {
    match cmd.verb {
        Verb::Validate => validate(spec),
        Verb::Polar => polar(spec),
        Verb::Recursion => recursion(spec),
        Verb::Arbitrage => arbitrage(spec),
        Verb::Price => price(spec, cmd),
        Verb::Duality => duality(spec, cmd),
        Verb::Randomize => randomize(spec, cmd),
        Verb::Semistatic => semistatic(spec),
    }
}

fn run_one(cmd: &Command, input: &str) -> Report {
    let start = Instant::now();
    let (status, body) = match load(input, cmd.seed) {
        Err(e) => {
            log::info!("{input}: {e}");
            let mut body = obj(json!({ "error": e.to_string() }));
            if let MarketError::Invariant { node, what } = &e {
                body.insert("node".into(), json!(node));
                body.insert("violation".into(), json!(what));
            }
            (Status::Invalid, body)
        }
        Ok(spec) => {
            log::debug!("{input}: loaded {} nodes", spec.tree().len());
            match panic::catch_unwind(AssertUnwindSafe(|| dispatch(&spec, cmd))) {
                Ok(outcome) => outcome,
                Err(payload) => {
                    let msg = payload
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "internal error".into());
                    log::error!("{input}: {msg}");
                    (Status::Internal, obj(json!({ "error": msg })))
                }
            }
        }
    };
    log::info!("{input}: {} in {:?}", status.label(), start.elapsed());
    Report { verb: cmd.verb, input: input.to_string(), status, body, elapsed: start.elapsed() }
}

/// Runs a parsed command over all inputs in parallel, keeping input order.
pub fn execute(cmd: &Command) -> (i32, Vec<Report>) {
    let inputs: Vec<String> = cmd.inputs.iter().map(|p| p.display().to_string()).collect();
    let reports: Vec<Report> = inputs.par_iter().map(|input| run_one(cmd, input)).collect();
    let worst = reports.iter().map(|r| r.status).max().unwrap_or(Status::Ok);
    (worst.exit_code(), reports)
}

/// Parses `args` (including the program name) and runs them. Returns the
/// exit code and what would go to stdout and stderr.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cmd = match Command::try_parse_from(args) {
        Ok(cmd) => cmd,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() { (code, String::new(), text) } else { (code, text, String::new()) };
        }
    };
    let (code, reports) = execute(&cmd);
    let stderr = if cmd.pretty { emit_pretty(&reports) } else { String::new() };
    (code, emit_machine(&reports), stderr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pretty_column_shows_twenty_digits() {
        let report = Report {
            verb: Verb::Price,
            input: "x".into(),
            status: Status::Ok,
            body: obj(json!({"value": "7/3"})),
            elapsed: Duration::ZERO,
        };
        assert!(emit_pretty(&[report]).contains("2.3333333333333333333 (approx)"));
    }

    #[test]
    fn empty_certificates_are_omitted() {
        let v = prune(json!({"a": null, "b": [], "c": {"d": {}}, "e": "1"}));
        assert_eq!(v, json!({"e": "1"}));
    }

    #[test]
    fn usage_errors_exit_64() {
        let (code, _, err) = run(["friction", "frobnicate", "x.json"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
        assert_eq!(run(["friction", "price"]).0, EXIT_USAGE);
        assert_eq!(run(["friction", "price", "--epsilon", "0.1", "x.json"]).0, EXIT_USAGE);
        assert_eq!(run(["friction", "--help"]).0, EXIT_OK);
    }

    #[test]
    fn severity_orders_exit_codes() {
        assert!(Status::Internal > Status::Invalid && Status::Invalid > Status::Arbitrage);
        assert_eq!(Status::Infeasible.exit_code(), EXIT_OK);
    }
}
