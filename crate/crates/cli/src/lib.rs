//! The `trace-forge` command line.
//!
//! Every invocation exits with 0 (yes, or success), 1 (no) or 2 (error).
//! [`run`] does all the work and returns the exit code with the text that
//! would be printed, so the binary is a thin wrapper.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use trace_forge::decide::{
    condition_table_with, decide_by_search, decide_existence_with, table_specs,
    witness_from_certificate, Condition, DecideError, DecideOptions, DecisionCertificate, Evidence,
};
use trace_forge::formats::{parse_edge_list, parse_graph6, parse_trace_line, ParseError};
use trace_forge::search::UNBUDGETED_EDGE_LIMIT;
use trace_forge::spanning::{
    cotree_decomposition, graph_deficiency, graph_deficiency_with, qualified_deficiency,
    SpanningError, SpanningTree,
};
use trace_forge::walks::{
    direction_profile, repetition_analysis, RepetitionMode, RepetitionReport, TraceError,
};
use trace_forge::{
    classify_trace, validate_double_trace, Direction, DirectionReq, DoubleTrace, Execution, Graph,
    SearchError, TraceKind, TraceSpec,
};

pub const SCHEMA: &str = "trace-forge/1";
pub const BUDGET_ENV: &str = "TRACE_FORGE_BUDGET";

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Spanning(#[from] SpanningError),
    #[error("invalid trace: {0}")]
    Trace(#[from] TraceError),
    #[error("{BUDGET_ENV} must be a non-negative integer, got {0:?}")]
    Budget(String),
    #[error("{0}")]
    Usage(String),
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),
    #[error("a {0} trace exists but the witness search ran out of budget")]
    Unwitnessed(TraceSpec),
}

#[derive(Parser, Debug)]
#[command(
    name = "trace-forge",
    version,
    about = "Decide, construct and verify double traces of graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a trace of the requested kind exists.
    Decide(Opts),
    /// Produce a trace of the requested kind.
    Find(Opts),
    /// Check a trace file against the requested kind.
    Verify(Opts),
    /// Betti number, deficiency and qualified deficiencies.
    Deficiency(Opts),
    /// The kind by direction existence matrix.
    Table(Opts),
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Graph file.
    #[arg(short, long)]
    input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value_t = KindArg::Double)]
    kind: KindArg,
    /// Stability order; a comma-separated list for `table` and `deficiency`.
    #[arg(short = 'd', value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Any)]
    direction: DirectionArg,
    #[arg(long)]
    json: bool,
    /// Cross-check answers by exhaustive search; exit 2 on disagreement.
    #[arg(long)]
    oracle: bool,
    /// Trace file for `verify`.
    #[arg(short = 't', long = "trace")]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Edgelist,
    Graph6,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Double,
    Stable,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Any,
    Parallel,
    Antiparallel,
}

impl From<DirectionArg> for DirectionReq {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Any => DirectionReq::Any,
            DirectionArg::Parallel => DirectionReq::Parallel,
            DirectionArg::Antiparallel => DirectionReq::Antiparallel,
        }
    }
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    json: Value,
    text: String,
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_YES };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), rendered)
            } else {
                (rendered, String::new())
            };
            return Output {
                code,
                stdout,
                stderr,
            };
        }
    };
    let (name, opts) = match &cli.command {
        Command::Decide(o) => ("decide", o),
        Command::Find(o) => ("find", o),
        Command::Verify(o) => ("verify", o),
        Command::Deficiency(o) => ("deficiency", o),
        Command::Table(o) => ("table", o),
    };
    let result = budget_from_env().and_then(|budget| {
        let ctx = Context::load(opts, budget)?;
        match &cli.command {
            Command::Decide(_) => ctx.decide(),
            Command::Find(_) => ctx.find(),
            Command::Verify(_) => ctx.verify(),
            Command::Deficiency(_) => ctx.deficiency(),
            Command::Table(_) => ctx.table(),
        }
    });
    match result {
        Ok(report) => {
            let stdout = if opts.json {
                let mut doc = report.json;
                doc["schema"] = json!(SCHEMA);
                doc["command"] = json!(name);
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&doc).expect("json values serialize")
                )
            } else {
                report.text
            };
            Output {
                code: report.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => {
            let stdout = if opts.json {
                let doc = json!({"schema": SCHEMA, "command": name, "error": e.to_string()});
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&doc).expect("json values serialize")
                )
            } else {
                String::new()
            };
            Output {
                code: EXIT_ERROR,
                stdout,
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

fn budget_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Budget(v)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(v)) => {
            Err(CliError::Budget(v.to_string_lossy().into_owned()))
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Reads a graph, choosing the parser from `format` or the file extension.
pub fn load_graph(path: &Path, format: Option<&str>) -> Result<Graph, CliError> {
    let format = match format {
        Some("graph6") => Format::Graph6,
        Some("edgelist") => Format::Edgelist,
        Some(other) => return Err(CliError::Usage(format!("unknown format {other:?}"))),
        None => guess_format(path),
    };
    load_graph_as(path, format)
}

fn guess_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("g6" | "graph6") => Format::Graph6,
        _ => Format::Edgelist,
    }
}

fn load_graph_as(path: &Path, format: Format) -> Result<Graph, CliError> {
    let text = read(path)?;
    let parsed = match format {
        Format::Edgelist => parse_edge_list(&text),
        Format::Graph6 => parse_graph6(&text),
    };
    parsed.map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

struct Context<'a> {
    opts: &'a Opts,
    graph: Graph,
    budget: Option<u64>,
}

impl<'a> Context<'a> {
    fn load(opts: &'a Opts, budget: Option<u64>) -> Result<Self, CliError> {
        let format = opts.format.unwrap_or_else(|| guess_format(&opts.input));
        let graph = load_graph_as(&opts.input, format)?;
        Ok(Context {
            opts,
            graph,
            budget,
        })
    }

    fn decide_opts(&self) -> DecideOptions {
        DecideOptions {
            budget: self.budget,
        }
    }

    fn spec(&self) -> Result<TraceSpec, CliError> {
        let kind = match (self.opts.kind, self.opts.d.as_slice()) {
            (KindArg::Double, []) => TraceKind::Double,
            (KindArg::Strong, []) => TraceKind::Strong,
            (KindArg::Stable, [d]) => TraceKind::Stable(*d),
            (KindArg::Stable, []) => {
                return Err(CliError::Usage("--kind stable needs -d N".into()))
            }
            (KindArg::Stable, _) => {
                return Err(CliError::Usage("give a single -d for this command".into()))
            }
            (_, _) => return Err(CliError::Usage("-d only applies to --kind stable".into())),
        };
        Ok(TraceSpec::new(kind, self.opts.direction.into())?)
    }

    fn ds_or(&self, default: &[usize]) -> Vec<usize> {
        if self.opts.d.is_empty() {
            default.to_vec()
        } else {
            self.opts.d.clone()
        }
    }

    /// Cross-checks a verdict by exhaustive search. `None` when the search
    /// ran out of budget.
    fn oracle(&self, cert: &DecisionCertificate) -> Result<Option<bool>, CliError> {
        match decide_by_search(&self.graph, &cert.spec, self.budget)? {
            Some(o) if o.exists != cert.exists => Err(CliError::OracleDisagreement(format!(
                "conditions say {} but search says {} for {}",
                yes_no(cert.exists),
                yes_no(o.exists),
                cert.spec
            ))),
            Some(o) => Ok(Some(o.exists)),
            None => Ok(None),
        }
    }

    fn decide(&self) -> Result<Report, CliError> {
        let spec = self.spec()?;
        let cert = decide_existence_with(&self.graph, &spec, self.decide_opts())?;
        let mut doc = json!({
            "graph": graph_json(&self.graph),
            "spec": spec_json(&spec),
            "exists": cert.exists,
            "evidence": evidence_json(&cert.evidence),
        });
        let mut text = format!(
            "{}: {spec} trace\n{}",
            yes_no(cert.exists),
            evidence_text(&cert.evidence)
        );
        if self.opts.oracle {
            let o = self.oracle(&cert)?;
            doc["oracle"] = json!(o);
            text.push_str(&format!(
                "search: {}\n",
                o.map_or("budget exhausted", yes_no)
            ));
        }
        Ok(Report {
            code: exit_for(cert.exists),
            json: doc,
            text,
        })
    }

    fn find(&self) -> Result<Report, CliError> {
        let spec = self.spec()?;
        let cert = decide_existence_with(&self.graph, &spec, self.decide_opts())?;
        if self.opts.oracle {
            self.oracle(&cert)?;
        }
        if !cert.exists {
            let reason = cert
                .condition()
                .map(Condition::to_string)
                .unwrap_or_default();
            return Ok(Report {
                code: EXIT_NO,
                json: json!({
                    "graph": graph_json(&self.graph),
                    "spec": spec_json(&spec),
                    "found": false,
                    "evidence": evidence_json(&cert.evidence),
                }),
                text: format!("no {spec} trace: {reason}\n"),
            });
        }
        let w = witness_from_certificate(&self.graph, &cert)?.ok_or(CliError::Unwitnessed(spec))?;
        let class = classify_trace(&w);
        if !class.satisfies(&spec) {
            return Err(
                DecideError::Internal(format!("produced trace does not satisfy {spec}")).into(),
            );
        }
        let mut doc = trace_json(&w);
        doc["graph"] = graph_json(&self.graph);
        doc["spec"] = spec_json(&spec);
        doc["found"] = json!(true);
        let text = format!(
            "{}\n# length {}, {}, stability order {}, {}\n",
            w.to_line(),
            w.len(),
            class.direction,
            class.stability_order,
            if class.strong { "strong" } else { "not strong" }
        );
        Ok(Report {
            code: EXIT_YES,
            json: doc,
            text,
        })
    }

    fn verify(&self) -> Result<Report, CliError> {
        let spec = self.spec()?;
        let path = self
            .opts
            .trace
            .as_deref()
            .ok_or_else(|| CliError::Usage("verify needs -t <trace file>".into()))?;
        let text = read(path)?;
        let line = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .find(|l| !l.is_empty())
            .unwrap_or("");
        let seq = parse_trace_line(line).map_err(|source| CliError::Parse {
            path: path.to_owned(),
            source,
        })?;
        let w = validate_double_trace(&self.graph, &seq)?;
        let class = classify_trace(&w);
        let report = repetition_analysis(&w, RepetitionMode::Components);
        if self.opts.oracle && repetition_analysis(&w, RepetitionMode::BruteForce) != report {
            return Err(CliError::OracleDisagreement(
                "transition components and subset enumeration give different repetitions".into(),
            ));
        }
        let ok = class.satisfies(&spec);
        let mut doc = trace_json(&w);
        doc["spec"] = spec_json(&spec);
        doc["satisfies"] = json!(ok);
        doc["repetitions"] = repetitions_json(&report);
        let mut out = format!(
            "{} {spec}\nlength {}, {}, stability order {}, {}\n",
            if ok { "satisfies" } else { "violates" },
            w.len(),
            class.direction,
            class.stability_order,
            if class.strong { "strong" } else { "not strong" }
        );
        for v in report.repetition_vertices() {
            let sets: Vec<String> = report.minimal[&v]
                .iter()
                .map(|s| set_text(s.iter()))
                .collect();
            out.push_str(&format!("repetitions at {v}: {}\n", sets.join(" ")));
        }
        Ok(Report {
            code: exit_for(ok),
            json: doc,
            text: out,
        })
    }

    fn deficiency(&self) -> Result<Report, CliError> {
        let g = &self.graph;
        let betti = g.betti_number().map_err(SpanningError::from)?;
        let cert = graph_deficiency(g)?;
        if self.opts.oracle {
            let seq = graph_deficiency_with(g, Execution::Sequential)?;
            if seq.value != cert.value || cert.value % 2 != betti % 2 {
                return Err(CliError::OracleDisagreement(format!(
                    "deficiency {} (sequential {}) with Betti number {betti}",
                    cert.value, seq.value
                )));
            }
        }
        let dec = cotree_decomposition(g, &cert.witness_tree)?;
        let components: Vec<Value> = dec
            .components
            .iter()
            .map(|c| json!({"edges": edges_json(c.edges.iter().map(|e| e.endpoints())), "odd": c.is_odd()}))
            .collect();
        let mut text = format!(
            "betti {betti}\ndeficiency {} (tree {})\n",
            cert.value,
            tree_text(&cert.witness_tree)
        );
        let mut qualified = Vec::new();
        for d in self.ds_or(&[1]) {
            let bound = 2 * d + 2;
            match qualified_deficiency(g, bound, None) {
                Ok(q) => {
                    text.push_str(&format!(
                        "qualified deficiency for degree {bound} (d = {d}): {} (tree {})\n",
                        q.value,
                        tree_text(&q.witness_tree)
                    ));
                    qualified.push(json!({
                        "d": d, "bound": bound, "value": q.value, "tree": tree_json(&q.witness_tree),
                    }));
                }
                Err(SpanningError::NoQualifiedTree { .. }) => {
                    let c = Condition::NoQualifiedTree { bound };
                    text.push_str(&format!(
                        "qualified deficiency for degree {bound} (d = {d}): {c}\n"
                    ));
                    qualified.push(
                        json!({"d": d, "bound": bound, "value": null, "condition": c.to_string()}),
                    );
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(Report {
            code: EXIT_YES,
            json: json!({
                "graph": graph_json(g),
                "betti": betti,
                "deficiency": {
                    "value": cert.value,
                    "tree": tree_json(&cert.witness_tree),
                    "cotree_components": components,
                },
                "qualified": qualified,
            }),
            text,
        })
    }

    fn table(&self) -> Result<Report, CliError> {
        let ds = self.ds_or(&[1, 2, 3]);
        if ds.contains(&0) {
            return Err(SearchError::ZeroOrder.into());
        }
        let cells =
            condition_table_with(&self.graph, &ds, self.decide_opts(), Execution::default())?;
        debug_assert_eq!(
            cells.iter().map(|c| c.spec).collect::<Vec<_>>(),
            table_specs(&ds)?
        );
        let searchable = self.budget.is_some() || self.graph.edge_count() <= UNBUDGETED_EDGE_LIMIT;
        let mut rows = Vec::new();
        let mut grid = vec![vec![
            "kind".to_string(),
            "any".to_string(),
            "parallel".to_string(),
            "antiparallel".to_string(),
        ]];
        for row in cells.chunks(3) {
            let kind = row[0].spec.kind;
            let mut doc = json!({"kind": kind_name(kind)});
            if let TraceKind::Stable(d) = kind {
                doc["d"] = json!(d);
            }
            let mut line = vec![kind.to_string()];
            for cert in row {
                let mut cell = json!({"exists": cert.exists, "basis": basis(&cert.evidence)});
                if self.opts.oracle && searchable {
                    cell["search"] = json!(self.oracle(cert)?);
                }
                line.push(match cert.condition() {
                    Some(c) => format!("no, {c}"),
                    None => yes_no(cert.exists).to_string(),
                });
                doc[cert.spec.direction.to_string()] = cell;
            }
            grid.push(line);
            rows.push(doc);
        }
        let widths: Vec<usize> = (0..4)
            .map(|i| grid.iter().map(|r| r[i].len()).max().unwrap_or(0) + 2)
            .collect();
        let mut text = String::new();
        for r in &grid {
            let line: String = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            text.push_str(line.trim_end());
            text.push('\n');
        }
        Ok(Report {
            code: EXIT_YES,
            json: json!({"graph": graph_json(&self.graph), "d_values": ds, "rows": rows}),
            text,
        })
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn exit_for(b: bool) -> i32 {
    if b {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn kind_name(kind: TraceKind) -> &'static str {
    match kind {
        TraceKind::Double => "double",
        TraceKind::Stable(_) => "stable",
        TraceKind::Strong => "strong",
    }
}

fn spec_json(spec: &TraceSpec) -> Value {
    let mut doc = json!({"kind": kind_name(spec.kind), "direction": spec.direction.to_string()});
    if let TraceKind::Stable(d) = spec.kind {
        doc["d"] = json!(d);
    }
    doc
}

fn graph_json(g: &Graph) -> Value {
    json!({"vertices": g.vertex_count(), "edges": g.edge_count()})
}

fn edges_json(edges: impl Iterator<Item = (u32, u32)>) -> Value {
    Value::Array(edges.map(|(a, b)| json!([a, b])).collect())
}

fn tree_json(t: &SpanningTree) -> Value {
    edges_json(t.edge_list().into_iter())
}

fn tree_text(t: &SpanningTree) -> String {
    let parts: Vec<String> = t.edges().iter().map(ToString::to_string).collect();
    if parts.is_empty() {
        "empty".into()
    } else {
        parts.join(" ")
    }
}

fn set_text<'a>(items: impl Iterator<Item = &'a u32>) -> String {
    let parts: Vec<String> = items.map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn basis(e: &Evidence) -> String {
    match e {
        Evidence::Trace(_) => "trace".into(),
        Evidence::Tree { .. } => "tree".into(),
        Evidence::Unwitnessed => "unwitnessed".into(),
        Evidence::Violated(c) => c.to_string(),
        Evidence::ExhaustedSearch => "search".into(),
    }
}

fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::Trace(w) => json!({"type": "trace", "sequence": w.sequence()}),
        Evidence::Tree { tree, bound } => {
            json!({"type": "tree", "bound": bound, "edges": tree_json(tree)})
        }
        Evidence::Unwitnessed => json!({"type": "unwitnessed"}),
        Evidence::Violated(c) => {
            json!({"type": "violated", "condition": c, "reason": c.to_string()})
        }
        Evidence::ExhaustedSearch => json!({"type": "exhausted_search"}),
    }
}

fn evidence_text(e: &Evidence) -> String {
    match e {
        Evidence::Trace(w) => format!("witness trace: {}\n", w.to_line()),
        Evidence::Tree {
            tree,
            bound: Some(b),
        } => {
            format!(
                "witness tree, qualified for degree {b}: {}\n",
                tree_text(tree)
            )
        }
        Evidence::Tree { tree, bound: None } => {
            format!(
                "witness tree, all co-tree components even: {}\n",
                tree_text(tree)
            )
        }
        Evidence::Unwitnessed => "witness search ran out of budget\n".into(),
        Evidence::Violated(c) => format!("violated: {c}\n"),
        Evidence::ExhaustedSearch => "exhaustive search found none\n".into(),
    }
}

fn trace_json(w: &DoubleTrace) -> Value {
    let class = classify_trace(w);
    let profile = direction_profile(w);
    let count = |d: Direction| profile.values().filter(|&&x| x == d).count();
    json!({
        "trace": w.sequence(),
        "length": w.len(),
        "direction": class.direction.to_string(),
        "parallel_edges": count(Direction::Parallel),
        "antiparallel_edges": count(Direction::Antiparallel),
        "stability_order": class.stability_order,
        "strong": class.strong,
    })
}

fn repetitions_json(report: &RepetitionReport) -> Value {
    let mut map = serde_json::Map::new();
    for v in report.repetition_vertices() {
        map.insert(v.to_string(), json!(report.minimal[&v]));
    }
    Value::Object(map)
}
