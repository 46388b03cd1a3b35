//! Command-line front end for the marked-graph bracket library.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use markbracket::diagram::random_kappa_walk;
use markbracket::{
    apply_move, bracket, bracket_recursive, build_universe, detect_moves, equivalent_bounded, euler_system,
    interlacement_graph, jones, kauffman_oracle, parse_gauss_code, parse_marked_graphs, print_marked_graph,
    reduced_bracket, BracketPoly, GaussCode, MarkedGraph, MoveSpec, Named, Verdict, VertexId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Graphs above this size use the recursive bracket instead of the state sum.
const STATE_SUM_LIMIT: usize = 20;

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_FAILED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Debug, Parser)]
#[command(name = "markbracket", version, about = "Bracket and Jones polynomials of marked graphs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the bracket [G] of each graph.
    Bracket { file: PathBuf },
    /// Print the reduced bracket <G> of each graph.
    Reduced { file: PathBuf },
    /// Print the Jones polynomial in A- and t-notation.
    Jones { file: PathBuf },
    /// Build the marked interlacement graph of a Gauss code.
    Interlace {
        file: PathBuf,
        /// Apply this many random kappa-transforms, seeded by the same number.
        #[arg(long)]
        euler_seed: Option<u64>,
    },
    /// Print the Kauffman bracket of a Gauss code by direct state enumeration.
    Oracle { file: PathBuf },
    /// Marked local complement at a vertex.
    Complement {
        file: PathBuf,
        #[arg(long)]
        vertex: VertexId,
    },
    /// Marked pivot on an edge.
    Pivot {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["V", "W"])]
        vertex: Vec<VertexId>,
    },
    /// Drop every r from the marks, toggling loops.
    Rsimplify { file: PathBuf },
    /// Apply a move such as `o2a 3 4`; without --move, list the applicable moves.
    Move {
        file: PathBuf,
        #[arg(long = "move")]
        spec: Option<String>,
    },
    /// Bounded search for a sequence of moves relating two graphs.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
    },
    /// Recheck the invariance identities on each input file.
    Verify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_graphs(path: &Path) -> Result<Vec<Named<MarkedGraph>>, Failure> {
    parse_marked_graphs(&read_input(path)?)
        .map_err(|e| Failure::usage(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message)))
}

fn load_graph(path: &Path) -> Result<MarkedGraph, Failure> {
    let mut all = load_graphs(path)?;
    if all.len() != 1 {
        return Err(Failure::usage(format!("{}: expected one graph, found {}", path.display(), all.len())));
    }
    Ok(all.remove(0).graph)
}

fn load_code(path: &Path) -> Result<GaussCode, Failure> {
    parse_gauss_code(&read_input(path)?)
        .map_err(|e| Failure::usage(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message)))
}

fn looks_like_graph(text: &str) -> bool {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty()).is_none_or(|l| {
        let word = l.split_whitespace().next().unwrap_or("");
        matches!(word, "graph" | "vertex" | "edge" | "freeloops")
    })
}

fn any_bracket(g: &MarkedGraph) -> BracketPoly {
    if g.n() <= STATE_SUM_LIMIT {
        bracket(g)
    } else {
        bracket_recursive(g)
    }
}

fn w(out: &mut dyn Write, s: impl Display) -> Result<(), Failure> {
    writeln!(out, "{s}").map_err(|e| Failure::usage(format!("write failed: {e}")))
}

/// Prints one value per graph: bare when there is a single unnamed text result, else prefixed.
fn emit_per_graph(out: &mut dyn Write, format: Format, rows: &[Row], single: bool) -> Result<(), Failure> {
    for (name, values) in rows {
        match format {
            Format::Tsv => w(out, format!("{name}\t{}", values.join("\t")))?,
            Format::Text if single => {
                for v in values {
                    w(out, v)?;
                }
            }
            Format::Text => {
                w(out, format!("{name}:"))?;
                for v in values {
                    w(out, format!("  {v}"))?;
                }
            }
        }
    }
    Ok(())
}

/// A graph name and its output values.
type Row = (String, Vec<String>);

fn graph_rows<F>(path: &Path, mut f: F) -> Result<(Vec<Row>, bool), Failure>
where
    F: FnMut(&MarkedGraph) -> Result<Vec<String>, Failure>,
{
    let graphs = load_graphs(path)?;
    let single = graphs.len() == 1 && graphs[0].name.is_none();
    let mut rows = Vec::new();
    for (i, named) in graphs.iter().enumerate() {
        let name = named.name.clone().unwrap_or_else(|| format!("#{}", i + 1));
        rows.push((name, f(&named.graph)?));
    }
    Ok((rows, single))
}

fn bracket_error(e: impl Display) -> Failure {
    Failure::usage(e.to_string())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let format = cli.format;
    match &cli.command {
        Command::Bracket { file } => {
            let (rows, single) = graph_rows(file, |g| Ok(vec![any_bracket(g).to_string()]))?;
            emit_per_graph(out, format, &rows, single)?;
        }
        Command::Reduced { file } => {
            let (rows, single) =
                graph_rows(file, |g| Ok(vec![reduced_bracket(g).map_err(bracket_error)?.to_string()]))?;
            emit_per_graph(out, format, &rows, single)?;
        }
        Command::Jones { file } => {
            let (rows, single) = graph_rows(file, |g| {
                let v = jones(g).map_err(bracket_error)?;
                Ok(vec![v.to_string(), v.render_t()])
            })?;
            emit_per_graph(out, format, &rows, single)?;
        }
        Command::Interlace { file, euler_seed } => {
            let code = load_code(file)?;
            let u = build_universe(&code);
            let mut c = euler_system(&u);
            if let Some(k) = euler_seed {
                let mut rng = ChaCha8Rng::seed_from_u64(*k);
                c = random_kappa_walk(&u, &c, *k as usize, &mut rng);
            }
            let g = interlacement_graph(&u, &c).map_err(bracket_error)?;
            out.write_all(print_marked_graph(None, &g).as_bytes()).map_err(bracket_error)?;
        }
        Command::Oracle { file } => {
            let code = load_code(file)?;
            let p = kauffman_oracle(&code).map_err(bracket_error)?;
            emit_per_graph(out, format, &[("oracle".into(), vec![p.to_string()])], true)?;
        }
        Command::Complement { file, vertex } => {
            let g = load_graph(file)?.marked_local_complement(*vertex).map_err(bracket_error)?;
            out.write_all(print_marked_graph(None, &g).as_bytes()).map_err(bracket_error)?;
        }
        Command::Pivot { file, vertex } => {
            let g = load_graph(file)?.marked_pivot(vertex[0], vertex[1]).map_err(bracket_error)?;
            out.write_all(print_marked_graph(None, &g).as_bytes()).map_err(bracket_error)?;
        }
        Command::Rsimplify { file } => {
            let g = load_graph(file)?.r_simplify();
            out.write_all(print_marked_graph(None, &g).as_bytes()).map_err(bracket_error)?;
        }
        Command::Move { file, spec } => {
            let g = load_graph(file)?;
            match spec {
                Some(spec) => {
                    let m: MoveSpec = spec.parse().map_err(bracket_error)?;
                    let h = apply_move(&g, &m).map_err(bracket_error)?;
                    out.write_all(print_marked_graph(None, &h).as_bytes()).map_err(bracket_error)?;
                }
                None => {
                    for m in detect_moves(&g) {
                        w(out, m)?;
                    }
                }
            }
        }
        Command::Equiv { first, second, budget } => {
            let (g, h) = (load_graph(first)?, load_graph(second)?);
            let line = match equivalent_bounded(&g, &h, *budget) {
                Verdict::Equivalent { depth } => format!("equivalent\t{depth}"),
                Verdict::DistinctByInvariant => "distinct\tjones".to_string(),
                Verdict::Inconclusive { explored } => format!("inconclusive\t{explored}"),
            };
            w(out, if format == Format::Tsv { line } else { line.replace('\t', " ") })?;
        }
        Command::Verify { files } => {
            let mut all_ok = true;
            for file in files {
                for (name, ok) in verify_file(file)? {
                    all_ok &= ok;
                    let status = if ok { "PASS" } else { "FAIL" };
                    match format {
                        Format::Tsv => w(out, format!("{}\t{name}\t{status}", file.display()))?,
                        Format::Text => w(out, format!("{status} {}: {name}", file.display()))?,
                    }
                }
            }
            return Ok(if all_ok { EXIT_OK } else { EXIT_FAILED });
        }
    }
    Ok(EXIT_OK)
}

/// Euler systems tried per Gauss code in `verify`.
const VERIFY_WALKS: u64 = 5;

fn graph_checks(label: &str, g: &MarkedGraph, checks: &mut Vec<(String, bool)>) {
    let b = any_bracket(g);
    let mlc_ok =
        g.ids().iter().all(|&v| any_bracket(&g.marked_local_complement(v).expect("known vertex")) == b);
    checks.push((format!("{label}mlc invariance"), mlc_ok));
    if g.n() <= STATE_SUM_LIMIT {
        checks.push((format!("{label}recursion = state sum"), bracket_recursive(g) == b));
    }
}

fn verify_file(path: &Path) -> Result<Vec<(String, bool)>, Failure> {
    let text = read_input(path)?;
    let mut checks = Vec::new();
    if looks_like_graph(&text) {
        let graphs = load_graphs(path)?;
        let many = graphs.len() > 1;
        for (i, named) in graphs.iter().enumerate() {
            let label = match (&named.name, many) {
                (Some(n), _) => format!("{n}: "),
                (None, true) => format!("#{}: ", i + 1),
                (None, false) => String::new(),
            };
            graph_checks(&label, &named.graph, &mut checks);
        }
    } else {
        let code = load_code(path)?;
        let oracle = kauffman_oracle(&code).map_err(bracket_error)?;
        let u = build_universe(&code);
        let start = euler_system(&u);
        let mut agree = true;
        for seed in 0..VERIFY_WALKS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_kappa_walk(&u, &start, seed as usize * 3, &mut rng);
            let g = interlacement_graph(&u, &c).map_err(bracket_error)?;
            agree &= any_bracket(&g) == oracle;
        }
        checks.push(("interlacement bracket = diagram bracket".to_string(), agree));
        let g = interlacement_graph(&u, &start).map_err(bracket_error)?;
        graph_checks("", &g, &mut checks);
    }
    Ok(checks)
}
