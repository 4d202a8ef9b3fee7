//! The `signflow` command line. `run` does all the work and returns a
//! [`CommandResult`]; the binary only prints it and exits with its code.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::circuits::{certificates, is_flow_admissible, Circuit, Method};
use crate::error::{LemmaError, TheoremError};
use crate::flows::{check_int_flow, parse_flow_file, write_flow_file, IntFlow};
use crate::generators::{generate, Family, FamilySpec};
use crate::graph::{EdgeId, SignedGraph, VertexId};
use crate::lemmas::{
    barbell_3_flow, eulerian_2_flow, extend_flow_over_circuit, hc_cover_4_flow, klein_to_4_flow, z2_to_3_lift,
};
use crate::oracle::{flow_number, nz_k_flow_search, three_edge_coloring, z2z2_nz_flow_search, SearchBudget, SearchOutcome};
use crate::sgf::{parse_sgf, write_sgf};
use crate::surgery::contract;
use crate::theorem8::{blow_up_vertex, eight_flow_with_budget};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    HypothesisFailed,
    Absent,
    Budget,
    InputError,
    InternalError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::HypothesisFailed => 2,
            Status::Absent => 3,
            Status::Budget => 4,
            Status::InputError => 5,
            Status::InternalError => 10,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::HypothesisFailed => "hypothesis-failed",
            Status::Absent => "absent",
            Status::Budget => "budget",
            Status::InputError => "input-error",
            Status::InternalError => "internal-error",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of one command: a status, key/value lines, files written and a
/// closing line of prose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub status: Status,
    pub lines: Vec<(String, String)>,
    pub paths: Vec<PathBuf>,
    pub summary: String,
}

impl CommandResult {
    fn new(status: Status, summary: impl Into<String>) -> CommandResult {
        CommandResult { status, lines: Vec::new(), paths: Vec::new(), summary: summary.into() }
    }

    fn with(mut self, key: impl Into<String>, value: impl ToString) -> CommandResult {
        self.lines.push((key.into(), value.to_string()));
        self
    }

    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    fn wrote(&mut self, path: &Path) {
        self.paths.push(path.to_path_buf());
        self.push("wrote", path.display());
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    /// `result: <status>`, the key/value lines, then the summary.
    pub fn render(&self) -> String {
        let mut out = format!("result: {}\n", self.status);
        for (k, v) in &self.lines {
            out.push_str(&format!("{k}: {v}\n"));
        }
        if !self.summary.is_empty() {
            out.push_str(&self.summary);
            out.push('\n');
        }
        out
    }
}

fn input_error(msg: impl fmt::Display) -> CommandResult {
    CommandResult::new(Status::InputError, msg.to_string())
}

fn internal_error(msg: impl fmt::Display) -> CommandResult {
    CommandResult::new(Status::InternalError, msg.to_string())
}

type Outcome = Result<CommandResult, CommandResult>;

#[derive(Parser, Debug)]
#[command(name = "signflow", version, about = "Nowhere-zero flows on signed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Balance and flow-admissibility, with one certificate per edge.
    Check { graph: PathBuf },
    /// A 3-edge-coloring of a cubic graph.
    Color { graph: PathBuf },
    /// Construct a nowhere-zero 8-flow.
    Flow8 {
        graph: PathBuf,
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[arg(long)]
        flow: Option<PathBuf>,
        /// Search node limit for the internal searches.
        #[arg(long)]
        nodes: Option<u64>,
    },
    /// Check a flow file against a graph.
    Verify {
        graph: PathBuf,
        flow: PathBuf,
        /// Bound to check against; defaults to the file's header.
        #[arg(long)]
        k: Option<i64>,
    },
    /// Exhaustive searches.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Write a seeded corpus of SGF files.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        neg: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        chords: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run a single lemma construction.
    Lemma {
        #[command(subcommand)]
        which: LemmaCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// A nowhere-zero k-flow.
    Flow {
        graph: PathBuf,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        nodes: Option<u64>,
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// The least k with a nowhere-zero k-flow.
    Flownum {
        graph: PathBuf,
        #[arg(long, default_value_t = 11)]
        max: i64,
        #[arg(long)]
        nodes: Option<u64>,
    },
    /// A proper 3-edge-coloring.
    Color {
        graph: PathBuf,
        #[arg(long)]
        nodes: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum LemmaCommand {
    /// Nowhere-zero 2-flow of an eulerian graph.
    E2f { graph: PathBuf },
    /// Nowhere-zero 3-flow of a barbell.
    Barbell { graph: PathBuf },
    /// 3-flow with |f| = 1 exactly on the given edges.
    Lift {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        edges: Vec<usize>,
    },
    /// 4-flow covering an unbalanced circuit.
    Hccover {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        circuit: Vec<usize>,
    },
    /// Extend a flow on the contraction over an all-positive circuit.
    Extend {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        circuit: Vec<usize>,
        /// Flow file on the graph contracted along the circuit.
        #[arg(long)]
        flow: PathBuf,
        #[arg(long, default_value_t = 8)]
        k: i64,
    },
    /// 4-flow of a balanced graph from a Klein-group flow.
    Klein { graph: PathBuf },
    /// Blow up one vertex and print the record.
    Blowup {
        graph: PathBuf,
        #[arg(long)]
        vertex: usize,
        /// Write the blown-up graph here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let status = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Status::Ok,
                _ => Status::InputError,
            };
            return CommandResult::new(status, e.render().to_string().trim_end());
        }
    };
    let out = match cli.command {
        Command::Check { graph } => check(&graph),
        Command::Color { graph } => color(&graph, None),
        Command::Flow8 { graph, transcript, flow, nodes } => flow8(&graph, transcript.as_deref(), flow.as_deref(), nodes),
        Command::Verify { graph, flow, k } => verify(&graph, &flow, k),
        Command::Oracle { which } => match which {
            OracleCommand::Flow { graph, k, nodes, out } => oracle_flow(&graph, k, nodes, out.as_deref()),
            OracleCommand::Flownum { graph, max, nodes } => oracle_flownum(&graph, max, nodes),
            OracleCommand::Color { graph, nodes } => color(&graph, nodes),
        },
        Command::Gen { family, n, neg, seed, count, out_dir, chords, jobs } => {
            let spec = FamilySpec { chords, ..FamilySpec::new(family, n, neg, seed) };
            gen(&spec, count, &out_dir, jobs)
        }
        Command::Lemma { which } => lemma(which),
    };
    out.unwrap_or_else(|e| e)
}

fn budget(nodes: Option<u64>) -> SearchBudget {
    nodes.map(SearchBudget::nodes).unwrap_or_default()
}

fn load_graph(path: &Path) -> Result<SignedGraph, CommandResult> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    parse_sgf(&text).map_err(|e| input_error(format!("{}: {e}", path.display())).with("line", e.line))
}

fn save(path: &Path, text: &str) -> Result<(), CommandResult> {
    fs::write(path, text).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn edge_list(ids: impl IntoIterator<Item = EdgeId>) -> String {
    ids.into_iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

fn flow_lines(res: &mut CommandResult, f: &IntFlow) {
    for (e, v) in f.iter() {
        res.push(format!("f {e}"), v);
    }
}

fn check(path: &Path) -> Outcome {
    let g = load_graph(path)?;
    let admissible = is_flow_admissible(&g, Method::CrossCheck).map_err(internal_error)?;
    let mut res = CommandResult::new(
        Status::Ok,
        if admissible { "every edge lies in a signed circuit" } else { "some edge lies in no signed circuit" },
    )
    .with("vertices", g.vertex_count())
    .with("edges", g.edge_count())
    .with("negative", g.negative_count())
    .with("balanced", yes_no(g.is_balanced()))
    .with("admissible", yes_no(admissible));
    for (e, cert) in certificates(&g) {
        match cert {
            Some(c) => {
                res.push(format!("cert {e}"), c.kind.name());
                for line in c.to_text().lines().skip(1) {
                    if let Some((k, v)) = line.split_once(':') {
                        res.push(format!("  {k}"), v.trim());
                    }
                }
            }
            None => res.push(format!("cert {e}"), "none"),
        }
    }
    Ok(res)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn color(path: &Path, nodes: Option<u64>) -> Outcome {
    let g = load_graph(path)?;
    if !g.is_cubic() {
        return Err(input_error("graph is not cubic"));
    }
    match three_edge_coloring(&g, &budget(nodes)).map_err(internal_error)? {
        SearchOutcome::Found(c) => {
            let mut res = CommandResult::new(Status::Ok, "proper 3-edge-coloring found");
            for (e, x) in &c.color {
                res.push(format!("color {e}"), x);
            }
            Ok(res)
        }
        SearchOutcome::Absent => Ok(CommandResult::new(Status::Absent, "no proper 3-edge-coloring exists")),
        SearchOutcome::BudgetExhausted => Ok(CommandResult::new(Status::Budget, "search budget exhausted")),
    }
}

fn flow8(path: &Path, transcript: Option<&Path>, flow: Option<&Path>, nodes: Option<u64>) -> Outcome {
    let g = load_graph(path)?;
    let (f, t) = match eight_flow_with_budget(&g, &budget(nodes)) {
        Ok(ok) => ok,
        Err(e) => return Err(theorem_failure(e)),
    };
    let mut res = CommandResult::new(Status::Ok, "nowhere-zero 8-flow constructed and verified")
        .with("components", t.components.len())
        .with("max", f.max_abs());
    for c in t.cubic_cases() {
        res.push("case", c.final_case().label());
    }
    if let Some(p) = transcript {
        save(p, &t.to_text())?;
        res.wrote(p);
    }
    match flow {
        Some(p) => {
            save(p, &write_flow_file(&f, 8, Some(&g)))?;
            res.wrote(p);
        }
        None => flow_lines(&mut res, &f),
    }
    Ok(res)
}

fn theorem_failure(e: TheoremError) -> CommandResult {
    match e {
        TheoremError::NotFlowAdmissible => CommandResult::new(Status::HypothesisFailed, e.to_string()).with("hypothesis", "flow-admissible"),
        TheoremError::NoFourFlow => {
            CommandResult::new(Status::HypothesisFailed, e.to_string()).with("hypothesis", "underlying-4-flow")
        }
        TheoremError::Budget => CommandResult::new(Status::Budget, e.to_string()),
        other => internal_error(other),
    }
}

fn verify(graph: &Path, flow: &Path, k: Option<i64>) -> Outcome {
    let g = load_graph(graph)?;
    let text = fs::read_to_string(flow).map_err(|e| input_error(format!("cannot read {}: {e}", flow.display())))?;
    let ff = parse_flow_file(&text).map_err(|e| input_error(format!("{}: {e}", flow.display())).with("line", e.line))?;
    let k = k.unwrap_or(ff.k);
    if k < 2 {
        return Err(input_error(format!("bound k must be at least 2, got {k}")));
    }
    let f = ff.canonical_flow(&g).map_err(input_error)?;
    match check_int_flow(&g, &f, k, true).map_err(input_error)? {
        None => Ok(CommandResult::new(Status::Ok, format!("valid nowhere-zero {k}-flow")).with("k", k)),
        Some(v) => {
            let mut res = CommandResult::new(Status::Absent, format!("not a nowhere-zero {k}-flow: {v}")).with("k", k);
            use crate::flows::FlowViolation as V;
            match v {
                V::ZeroValue(e) => res.push("edge", e),
                V::OutOfBound { edge, value } => {
                    res.push("edge", edge);
                    res.push("value", value);
                }
                V::Conservation { vertex, sum } => {
                    res.push("vertex", vertex);
                    res.push("sum", sum);
                }
            }
            Ok(res)
        }
    }
}

fn oracle_flow(path: &Path, k: i64, nodes: Option<u64>, out: Option<&Path>) -> Outcome {
    let g = load_graph(path)?;
    if k < 2 {
        return Err(input_error(format!("bound k must be at least 2, got {k}")));
    }
    let outcome = nz_k_flow_search(&g, k, None, &budget(nodes)).map_err(internal_error)?;
    let mut res = search_result(&outcome, format!("nowhere-zero {k}-flow")).with("k", k);
    if let SearchOutcome::Found(f) = outcome {
        match out {
            Some(p) => {
                save(p, &write_flow_file(&f, k, Some(&g)))?;
                res.wrote(p);
            }
            None => flow_lines(&mut res, &f),
        }
    }
    Ok(res)
}

fn search_result<T>(outcome: &SearchOutcome<T>, what: String) -> CommandResult {
    match outcome {
        SearchOutcome::Found(_) => CommandResult::new(Status::Ok, format!("{what} found")),
        SearchOutcome::Absent => CommandResult::new(Status::Absent, format!("no {what} exists")),
        SearchOutcome::BudgetExhausted => CommandResult::new(Status::Budget, "search budget exhausted"),
    }
    .with("search", outcome.label())
}

fn oracle_flownum(path: &Path, max: i64, nodes: Option<u64>) -> Outcome {
    let g = load_graph(path)?;
    if max < 2 {
        return Err(input_error(format!("--max must be at least 2, got {max}")));
    }
    let outcome = flow_number(&g, max, &budget(nodes)).map_err(internal_error)?;
    let mut res = search_result(&outcome, format!("nowhere-zero flow with k <= {max}"));
    if let SearchOutcome::Found(k) = outcome {
        res.push("flownum", k);
    }
    Ok(res)
}

fn gen(spec: &FamilySpec, count: usize, out_dir: &Path, jobs: usize) -> Outcome {
    spec.validate().map_err(input_error)?;
    if jobs == 0 {
        return Err(input_error("--jobs must be at least 1"));
    }
    fs::create_dir_all(out_dir).map_err(|e| input_error(format!("cannot create {}: {e}", out_dir.display())))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(internal_error)?;
    let texts: Vec<Result<String, String>> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| generate(&spec.at(i as u64)).map(|g| write_sgf(&g)).map_err(|e| e.to_string()))
            .collect()
    });
    let mut res = CommandResult::new(Status::Ok, format!("{count} graphs written"))
        .with("family", spec.family)
        .with("seed", spec.seed)
        .with("count", count);
    for (i, text) in texts.into_iter().enumerate() {
        let text = text.map_err(internal_error)?;
        let path = out_dir.join(format!("{}-{i:04}.sgf", spec.family));
        save(&path, &text)?;
        res.wrote(&path);
    }
    Ok(res)
}

fn lemma_failure(e: LemmaError) -> CommandResult {
    match e {
        LemmaError::Precondition(msg) => CommandResult::new(Status::HypothesisFailed, format!("precondition violated: {msg}")),
        LemmaError::Budget => CommandResult::new(Status::Budget, "search budget exhausted"),
        other => internal_error(other),
    }
}

fn flow_result(summary: &str, f: &IntFlow) -> CommandResult {
    let mut res = CommandResult::new(Status::Ok, summary).with("max", f.max_abs());
    flow_lines(&mut res, f);
    res
}

fn circuit_arg(g: &SignedGraph, ids: &[usize]) -> Result<Circuit, CommandResult> {
    let edges: Vec<EdgeId> = ids.iter().map(|&i| EdgeId(i)).collect();
    Circuit::from_edges(g, &edges).ok_or_else(|| input_error("--circuit does not list the edges of a circuit"))
}

fn lemma(which: LemmaCommand) -> Outcome {
    match which {
        LemmaCommand::E2f { graph } => {
            let g = load_graph(&graph)?;
            Ok(match eulerian_2_flow(&g) {
                Some(f) => flow_result("nowhere-zero 2-flow", &f),
                None => CommandResult::new(Status::Absent, "graph is not eulerian with even negative count per component"),
            })
        }
        LemmaCommand::Barbell { graph } => {
            let g = load_graph(&graph)?;
            barbell_3_flow(&g).map(|f| flow_result("nowhere-zero 3-flow on the barbell", &f)).map_err(lemma_failure)
        }
        LemmaCommand::Lift { graph, edges } => {
            let g = load_graph(&graph)?;
            let s: BTreeSet<EdgeId> = edges.into_iter().map(EdgeId).collect();
            match z2_to_3_lift(&g, &s, &SearchBudget::default()).map_err(lemma_failure)? {
                Some(f) => Ok(flow_result("3-flow with |f| = 1 exactly on the given edges", &f)),
                None => Ok(CommandResult::new(Status::Absent, "no such 3-flow exists")),
            }
        }
        LemmaCommand::Hccover { graph, circuit } => {
            let g = load_graph(&graph)?;
            let c = circuit_arg(&g, &circuit)?;
            hc_cover_4_flow(&g, &c, &SearchBudget::default())
                .map(|f| flow_result("4-flow covering the circuit", &f))
                .map_err(lemma_failure)
        }
        LemmaCommand::Extend { graph, circuit, flow, k } => {
            let g = load_graph(&graph)?;
            let c = circuit_arg(&g, &circuit)?;
            let text = fs::read_to_string(&flow).map_err(|e| input_error(format!("cannot read {}: {e}", flow.display())))?;
            let ff = parse_flow_file(&text).map_err(|e| input_error(format!("{}: {e}", flow.display())).with("line", e.line))?;
            let (h, _) = contract(&g, &c.edge_set()).map_err(input_error)?;
            let f = ff.canonical_flow(&h).map_err(input_error)?;
            extend_flow_over_circuit(&g, &c, &f, k)
                .map(|f| flow_result("flow extended over the circuit", &f))
                .map_err(lemma_failure)
        }
        LemmaCommand::Klein { graph } => {
            let g = load_graph(&graph)?;
            let gf = match z2z2_nz_flow_search(&g, &SearchBudget::default()).map_err(internal_error)? {
                SearchOutcome::Found(gf) => gf,
                SearchOutcome::Absent => return Ok(CommandResult::new(Status::Absent, "no nowhere-zero Klein-group flow")),
                SearchOutcome::BudgetExhausted => return Ok(CommandResult::new(Status::Budget, "search budget exhausted")),
            };
            klein_to_4_flow(&g, &gf).map(|f| flow_result("nowhere-zero 4-flow", &f)).map_err(lemma_failure)
        }
        LemmaCommand::Blowup { graph, vertex, out } => {
            let g = load_graph(&graph)?;
            if vertex >= g.vertex_count() {
                return Err(input_error(format!("no vertex {vertex}")));
            }
            let gf = match z2z2_nz_flow_search(&g, &SearchBudget::default()).map_err(internal_error)? {
                SearchOutcome::Found(gf) => gf,
                SearchOutcome::Absent => return Ok(CommandResult::new(Status::Absent, "no nowhere-zero Klein-group flow")),
                SearchOutcome::BudgetExhausted => return Ok(CommandResult::new(Status::Budget, "search budget exhausted")),
            };
            let (blown, _, rec) = blow_up_vertex(&g, &gf, VertexId(vertex)).map_err(theorem_failure)?;
            let mut res = CommandResult::new(Status::Ok, "vertex blown up")
                .with("case", rec.case.label())
                .with("a", rec.a)
                .with("b", rec.b)
                .with("c", rec.c)
                .with("circuit", edge_list(rec.circuit_edges.iter().copied()));
            if let Some(p) = out {
                save(&p, &write_sgf(&blown))?;
                res.wrote(&p);
            }
            Ok(res)
        }
    }
}
