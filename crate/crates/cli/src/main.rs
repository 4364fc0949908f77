mod plot;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use paraclose::generate;
use paraclose::io::{
    graph_to_json, parse_graph, parse_poset, parse_polygon, parse_profile, parse_semiorder, poset_to_json, polygon_to_json,
    profile_to_json, semiorder_to_json, witness_names,
};
use paraclose::parametric::{format_rational, maximize_quasiconvex, minimize_quasiconcave, parametric_profile, Objective, ParametricProfile};
use paraclose::poset::incidence_poset;
use paraclose::semiorder::solve_semiorder_with;
use paraclose::series_parallel::{solve_sp_with, sp_from_value, RootedTree};
use paraclose::treewidth::{greedy_tree_decomposition, solve_treewidth_with, TreeDecomposition, TreewidthLimits};
use paraclose::width::{chain_partition_width2, min_chain_cover, solve_width2_with};
use paraclose::{ConvexPolygon, Point, SPTree, Semiorder, WeightedPoset};

#[derive(Parser)]
#[command(name = "paraclose", version, about = "Convex hulls of lower-set weights for parametric closure problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolveOpts {
    /// Also enumerate all lower sets and compare the hulls.
    #[arg(long)]
    check_oracle: bool,
    /// Largest instance the brute-force oracle accepts.
    #[arg(long, default_value_t = 20)]
    oracle_limit: usize,
    /// Tree decomposition for the treewidth solver; a heuristic one is computed otherwise.
    #[arg(long, value_name = "FILE")]
    decomposition: Option<PathBuf>,
    /// Skip witness bookkeeping.
    #[arg(long)]
    no_witness: bool,
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Instance {
    /// Input file, or `-` for stdin.
    input: PathBuf,
    #[command(flatten)]
    opts: SolveOpts,
}

#[derive(Args)]
struct AutoInstance {
    #[command(flatten)]
    inst: Instance,
    /// Solver to use; `auto` picks one from the file contents.
    #[arg(long, value_enum, default_value_t = Solver::Auto)]
    solver: Solver,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solver {
    Auto,
    Oracle,
    Semiorder,
    Sp,
    Treewidth,
    Width2,
    Incidence,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenClass {
    Semiorder,
    Sp,
    Tree,
    Width2,
    Treewidth,
    Poset,
    Graph,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchClass {
    Sp,
    Semiorder,
    Width2,
}

#[derive(Subcommand)]
enum Command {
    /// Hull of all lower sets by enumeration.
    Oracle(Instance),
    /// Semiorder solver.
    Semiorder(Instance),
    /// Series-parallel solver; also accepts a rooted tree edge list.
    Sp(Instance),
    /// Bounded-treewidth solver.
    Treewidth(Instance),
    /// Width-two solver.
    Width2(Instance),
    /// Incidence poset of a graph, solved through its tree decomposition.
    Incidence(Instance),
    /// Parametric profile: optimal lower set as a function of lambda.
    Profile(AutoInstance),
    /// Best hull vertex under a built-in objective.
    Optimize {
        #[command(flatten)]
        auto: AutoInstance,
        #[arg(long, value_name = "ratio|dist2|linear:a,b")]
        objective: String,
        /// Minimize instead (the objective should then be quasiconcave).
        #[arg(long)]
        minimize: bool,
    },
    /// Random instance with a known class.
    Gen {
        #[arg(long, value_enum)]
        class: GenClass,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Weight components are drawn from `-weight..=weight`.
        #[arg(long, default_value_t = 9)]
        weight: i64,
        /// Treewidth of generated DAGs.
        #[arg(long, default_value_t = 2)]
        width: usize,
        /// Relation probability for width2 and poset, edge count factor for graph.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Semiorder utilities lie in `[0, span]`.
        #[arg(long, default_value_t = 3)]
        span: i64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// SVG of a polygon, a profile, or a solved instance.
    Plot {
        #[command(flatten)]
        auto: AutoInstance,
        /// Draw every projected lower set (enumerates them).
        #[arg(long)]
        points: bool,
    },
    /// CSV of size, hull vertex count, time and splay steps over sizes 2^min..2^max.
    Bench {
        #[arg(long, value_enum, default_value_t = BenchClass::Sp)]
        class: BenchClass,
        #[arg(long, default_value_t = 10)]
        min_exp: u32,
        #[arg(long, default_value_t = 17)]
        max_exp: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        weight: i64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        CliError { code: 1, msg: msg.into() }
    }

    fn invariant(msg: impl Into<String>) -> Self {
        CliError { code: 2, msg: msg.into() }
    }
}

impl From<paraclose::Error> for CliError {
    fn from(e: paraclose::Error) -> Self {
        CliError::input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parsed input of any kind.
enum Input {
    Poset(WeightedPoset),
    Semiorder(Semiorder),
    Sp(SPTree),
    Graph(WeightedPoset),
    Polygon(ConvexPolygon, Vec<String>),
    Profile(ParametricProfile),
}

impl Input {
    fn poset(&self) -> CliResult<WeightedPoset> {
        Ok(match self {
            Input::Poset(p) | Input::Graph(p) => p.clone(),
            Input::Semiorder(s) => s.to_poset()?,
            Input::Sp(t) => t.to_poset()?,
            Input::Polygon(..) | Input::Profile(_) => return Err(CliError::input("input is a result file, not an instance")),
        })
    }

    fn ids(&self) -> Vec<String> {
        match self {
            Input::Poset(p) | Input::Graph(p) => p.ids().to_vec(),
            Input::Semiorder(s) => s.items().iter().map(|it| it.id.clone()).collect(),
            Input::Sp(t) => t.ids().to_vec(),
            Input::Polygon(_, ids) => ids.clone(),
            Input::Profile(_) => Vec::new(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Input::Poset(p) | Input::Graph(p) => p.len(),
            Input::Semiorder(s) => s.len(),
            Input::Sp(t) => t.len(),
            Input::Polygon(..) | Input::Profile(_) => 0,
        }
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| CliError::input(format!("stdout: {e}")))
        }
    }
}

fn emit_json(out: Option<&Path>, v: &Value) -> CliResult<()> {
    emit(out, &format!("{v}\n"))
}

/// Witness names appearing in a polygon or profile file, in order of first use.
fn witness_ids(v: &Value) -> Vec<String> {
    let lists: Vec<&Value> = match v.get("pieces").and_then(Value::as_array) {
        Some(pieces) => pieces.iter().filter_map(|p| p.get("witness")).collect(),
        None => v.get("witnesses").and_then(Value::as_array).into_iter().flatten().collect(),
    };
    let mut seen = std::collections::HashSet::new();
    let mut ids = Vec::new();
    for w in lists {
        for name in w.as_array().into_iter().flatten().filter_map(Value::as_str) {
            if seen.insert(name.to_string()) {
                ids.push(name.to_string());
            }
        }
    }
    ids
}

fn detect(v: &Value) -> CliResult<Solver> {
    let has = |k: &str| v.get(k).is_some();
    if has("items") {
        Ok(Solver::Semiorder)
    } else if has("series") || has("parallel") || has("leaf") || has("root") {
        Ok(Solver::Sp)
    } else if has("elements") {
        Ok(Solver::Oracle)
    } else if has("vertices") && has("edges") {
        Ok(Solver::Incidence)
    } else {
        Err(CliError::input("unrecognised input file; expected a poset, graph, semiorder, SP tree, polygon or profile"))
    }
}

fn load(text: &str, solver: Solver) -> CliResult<Input> {
    let v: Value = serde_json::from_str(text).map_err(paraclose::Error::from)?;
    if solver == Solver::Auto {
        if v.get("pieces").is_some() {
            return Ok(Input::Profile(parse_profile(text, &witness_ids(&v))?));
        }
        if v.get("vertices").is_some() && v.get("edges").is_none() {
            let ids = witness_ids(&v);
            return Ok(Input::Polygon(parse_polygon(text, &ids)?, ids));
        }
    }
    let kind = if solver == Solver::Auto { detect(&v)? } else { solver };
    Ok(match kind {
        Solver::Semiorder => Input::Semiorder(parse_semiorder(text)?),
        Solver::Sp if v.get("root").is_some() => Input::Sp(RootedTree::parse(text)?.to_sp()?),
        Solver::Sp => Input::Sp(sp_from_value(&v)?),
        Solver::Incidence => Input::Graph(incidence_poset(&parse_graph(text)?)?),
        Solver::Oracle | Solver::Treewidth | Solver::Width2 | Solver::Auto => Input::Poset(parse_poset(text)?),
    })
}

/// Fastest applicable solver for an explicit poset.
fn pick_poset_solver(p: &WeightedPoset, opts: &SolveOpts) -> CliResult<Solver> {
    if min_chain_cover(p).len() <= 2 {
        return Ok(Solver::Width2);
    }
    let limits = TreewidthLimits::default();
    if opts.decomposition.is_some() || (p.len() <= limits.max_elements && greedy_tree_decomposition(p).width() <= limits.max_width) {
        return Ok(Solver::Treewidth);
    }
    if p.len() <= opts.oracle_limit {
        return Ok(Solver::Oracle);
    }
    Err(CliError::input(format!(
        "no solver applies: {} elements, width above 2 and no small tree decomposition; see --solver",
        p.len()
    )))
}

fn decomposition(p: &WeightedPoset, opts: &SolveOpts) -> CliResult<TreeDecomposition> {
    match &opts.decomposition {
        Some(path) => {
            let v: Value = serde_json::from_str(&read_input(path)?).map_err(paraclose::Error::from)?;
            Ok(TreeDecomposition::from_json(&v, p)?)
        }
        None => Ok(greedy_tree_decomposition(p)),
    }
}

fn solve_width2_cli(p: &WeightedPoset, witness: bool) -> CliResult<ConvexPolygon> {
    match chain_partition_width2(p) {
        Ok(chains) => Ok(solve_width2_with(p, &chains, witness)?.0),
        Err(paraclose::Error::WidthExceeded(anti)) => Err(CliError::input(format!(
            "width-{} sketch unsupported: only width at most 2 is solved (antichain {})",
            min_chain_cover(p).len(),
            anti.join(", ")
        ))),
        Err(e) => Err(e.into()),
    }
}

fn solve(input: &Input, solver: Solver, opts: &SolveOpts) -> CliResult<ConvexPolygon> {
    let witness = !opts.no_witness;
    let poly = match input {
        Input::Semiorder(s) => solve_semiorder_with(s, witness).0,
        Input::Sp(t) => solve_sp_with(t, witness)?.0,
        Input::Polygon(p, _) => {
            if witness {
                p.clone()
            } else {
                p.clone().without_witnesses()
            }
        }
        Input::Profile(_) => return Err(CliError::input("a profile has no polygon; use it with `plot`")),
        Input::Poset(p) | Input::Graph(p) => {
            let solver = match solver {
                Solver::Auto => pick_poset_solver(p, opts)?,
                Solver::Incidence => Solver::Treewidth,
                s => s,
            };
            log::info!("solving {} elements with the {} solver", p.len(), solver_name(solver));
            match solver {
                Solver::Width2 => solve_width2_cli(p, witness)?,
                Solver::Treewidth => solve_treewidth_with(p, &decomposition(p, opts)?, TreewidthLimits::default(), witness)?,
                _ => {
                    let poly = p.oracle_polygon(opts.oracle_limit)?;
                    if witness {
                        poly
                    } else {
                        poly.without_witnesses()
                    }
                }
            }
        }
    };
    if opts.check_oracle {
        check_oracle(input, &poly, opts.oracle_limit)?;
    }
    Ok(poly)
}

fn solver_name(s: Solver) -> &'static str {
    match s {
        Solver::Auto => "auto",
        Solver::Oracle => "oracle",
        Solver::Semiorder => "semiorder",
        Solver::Sp => "sp",
        Solver::Treewidth => "treewidth",
        Solver::Width2 => "width2",
        Solver::Incidence => "incidence",
    }
}

fn check_oracle(input: &Input, poly: &ConvexPolygon, limit: usize) -> CliResult<()> {
    if input.len() > limit {
        return Err(CliError::input(format!("--check-oracle: {} elements exceed --oracle-limit {limit}", input.len())));
    }
    let p = input.poset()?;
    let oracle = p.oracle_polygon(limit)?;
    let (got, want) = (poly.vertices(), oracle.vertices());
    if got != want {
        let i = got.iter().zip(want).position(|(a, b)| a != b).unwrap_or(got.len().min(want.len()));
        let show = |v: Option<&Point>| v.map_or("none".to_string(), |v| format!("({}, {})", v.x, v.y));
        return Err(CliError::invariant(format!(
            "oracle: MISMATCH at vertex {i}: solver {} oracle {} ({} vs {} vertices)",
            show(got.get(i)),
            show(want.get(i)),
            got.len(),
            want.len()
        )));
    }
    for (i, v) in got.iter().enumerate() {
        if let Some(w) = poly.witness(i) {
            let m = w.expand();
            if !p.is_lower_set(&m) || p.project(&m)? != *v {
                return Err(CliError::invariant(format!("oracle: witness of vertex {i} does not project onto ({}, {})", v.x, v.y)));
            }
        }
    }
    eprintln!("oracle: MATCH");
    Ok(())
}

fn run_solver(inst: &Instance, solver: Solver) -> CliResult<()> {
    let input = load(&read_input(&inst.input)?, solver)?;
    if matches!(input, Input::Polygon(..) | Input::Profile(_)) {
        return Err(CliError::input("expected an instance file"));
    }
    let poly = solve(&input, solver, &inst.opts)?;
    emit_json(inst.opts.out.as_deref(), &polygon_to_json(&poly, &input.ids()))
}

fn run_profile(a: &AutoInstance) -> CliResult<()> {
    let input = load(&read_input(&a.inst.input)?, a.solver)?;
    let poly = solve(&input, a.solver, &a.inst.opts)?;
    let prof = parametric_profile(&poly)?;
    emit_json(a.inst.opts.out.as_deref(), &profile_to_json(&prof, &input.ids()))
}

fn run_optimize(a: &AutoInstance, objective: &str, minimize: bool) -> CliResult<()> {
    let obj = Objective::parse(objective)?;
    let input = load(&read_input(&a.inst.input)?, a.solver)?;
    let poly = solve(&input, a.solver, &a.inst.opts)?;
    let o = if minimize { minimize_quasiconcave(&poly, |v| obj.eval(v))? } else { maximize_quasiconvex(&poly, |v| obj.eval(v))? };
    let mut v = json!({"vertex": [o.vertex.x, o.vertex.y], "value": format_rational(Some(o.value), false)});
    if let Some(w) = &o.witness {
        v["witness"] = json!(witness_names(w, &input.ids()));
    }
    emit_json(a.inst.opts.out.as_deref(), &v)
}

fn run_plot(a: &AutoInstance, points: bool) -> CliResult<()> {
    let text = read_input(&a.inst.input)?;
    let input = load(&text, a.solver)?;
    let svg = match &input {
        Input::Profile(prof) => plot::profile_svg(prof),
        _ => {
            let poly = solve(&input, a.solver, &a.inst.opts)?;
            let cloud = if points {
                let p = input.poset()?;
                let mut pts = p
                    .enumerate_lower_sets(a.inst.opts.oracle_limit)?
                    .iter()
                    .map(|s| p.project(&s.members))
                    .collect::<paraclose::Result<Vec<_>>>()?;
                pts.sort();
                pts
            } else {
                Vec::new()
            };
            plot::polygon_svg(&poly, &cloud)
        }
    };
    emit(a.inst.opts.out.as_deref(), &svg)
}

#[allow(clippy::too_many_arguments)]
fn run_gen(class: GenClass, n: usize, seed: u64, weight: i64, width: usize, density: f64, span: i64, out: Option<&Path>) -> CliResult<()> {
    if !(0.0..=1.0).contains(&density) {
        return Err(CliError::input("--density must lie in [0, 1]"));
    }
    if !(0..=paraclose::poset::WEIGHT_LIMIT).contains(&weight) {
        return Err(CliError::input(format!("--weight must lie in [0, {}]", paraclose::poset::WEIGHT_LIMIT)));
    }
    let mut r = generate::rng(seed);
    let v = match class {
        GenClass::Semiorder => semiorder_to_json(&generate::semiorder(&mut r, n, weight, span.max(0))),
        GenClass::Sp => generate::sp_tree(&mut r, n, weight).to_json(),
        GenClass::Tree => generate::rooted_tree(&mut r, n, weight).to_json(),
        GenClass::Width2 => poset_to_json(&generate::width2_poset(&mut r, n, weight, density)),
        GenClass::Treewidth => poset_to_json(&generate::partial_ktree_dag(&mut r, n, width.max(1), weight, 0.7)),
        GenClass::Poset => poset_to_json(&generate::random_poset(&mut r, n, weight, density)),
        GenClass::Graph => {
            let m = ((n * n.saturating_sub(1) / 2) as f64 * density).round() as usize;
            graph_to_json(&generate::random_graph(&mut r, n, m, weight))
        }
    };
    emit_json(out, &v)
}

fn run_bench(class: BenchClass, min_exp: u32, max_exp: u32, seed: u64, weight: i64, out: Option<&Path>) -> CliResult<()> {
    if min_exp > max_exp || max_exp > 20 {
        return Err(CliError::input("need --min-exp <= --max-exp <= 20"));
    }
    let mut r = generate::rng(seed);
    let mut csv = String::from("class,n,vertices,seconds,splay_rotations,splays\n");
    for e in min_exp..=max_exp {
        let n = 1usize << e;
        let (name, vertices, secs, splay) = match class {
            BenchClass::Sp => {
                let t = generate::sp_tree(&mut r, n, weight);
                let start = Instant::now();
                let (poly, stats) = solve_sp_with(&t, true)?;
                ("sp", poly.len(), start.elapsed(), Some(stats.splay))
            }
            BenchClass::Semiorder => {
                let s = generate::semiorder(&mut r, n, weight, (n as i64 / 16).max(3));
                let start = Instant::now();
                let (poly, _) = solve_semiorder_with(&s, false);
                ("semiorder", poly.len(), start.elapsed(), None)
            }
            BenchClass::Width2 => {
                let p = generate::width2_poset(&mut r, n, weight, 4.0 / n as f64);
                let start = Instant::now();
                let poly = solve_width2_cli(&p, false)?;
                ("width2", poly.len(), start.elapsed(), None)
            }
        };
        let (rot, spl) = splay.map_or((String::new(), String::new()), |s| (s.rotations.to_string(), s.splays.to_string()));
        csv += &format!("{name},{n},{vertices},{:.6},{rot},{spl}\n", secs.as_secs_f64());
        log::info!("{name} n={n} done in {:.3} s", secs.as_secs_f64());
    }
    emit(out, &csv)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Oracle(i) => run_solver(&i, Solver::Oracle),
        Command::Semiorder(i) => run_solver(&i, Solver::Semiorder),
        Command::Sp(i) => run_solver(&i, Solver::Sp),
        Command::Treewidth(i) => run_solver(&i, Solver::Treewidth),
        Command::Width2(i) => run_solver(&i, Solver::Width2),
        Command::Incidence(i) => run_solver(&i, Solver::Incidence),
        Command::Profile(a) => run_profile(&a),
        Command::Optimize { auto, objective, minimize } => run_optimize(&auto, &objective, minimize),
        Command::Gen { class, n, seed, weight, width, density, span, out } => run_gen(class, n, seed, weight, width, density, span, out.as_deref()),
        Command::Plot { auto, points } => run_plot(&auto, points),
        Command::Bench { class, min_exp, max_exp, seed, weight, out } => run_bench(class, min_exp, max_exp, seed, weight, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PARACLOSE_LOG", "warn")).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
