//! `csskit` command-line front end.
//!
//! Results go to stdout (or `--output`) as JSON or CSV. Usage errors exit
//! with status 2; computation and input errors exit with status 1 and print
//! `{"error": {"kind", "message", "line"?}}` on stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use csskit::contextuality::{deformation_sweep, ncf_with, scenario_from_game, theta_grid, LpMode};
use csskit::cssgame::{CssCode, GameMode, GameSpec, GameSummary, InputSet, InputSets, NamedCode};
use csskit::graphstate::{self, bell_extraction_circuit, standard_form, walsh_from_symmetries};
use csskit::quantum::{self, build_state, EmpiricalModel, MeasurementScenario, StateKind};
use csskit::statmech::{self, Boundary};
use csskit::strategy::{self, OmegaBudget};
use csskit::{BitMatrix, BitVector, Exec, Graph};

#[derive(Parser)]
#[command(name = "csskit", version, about = "Nonlocal games from CSS codes")]
struct Cli {
    /// Output format; each command has a natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true, env = "CSSKIT_THREADS")]
    threads: Option<usize>,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(flatten)]
    caps: Caps,
    #[command(subcommand)]
    command: Command,
}

/// Enumeration limits for the classical optimum; environment variables
/// override the built-in defaults.
#[derive(Args)]
struct Caps {
    #[arg(long, global = true, env = "CSSKIT_MAX_SPAN_LOG2")]
    max_span_log2: Option<u32>,
    #[arg(long, global = true, env = "CSSKIT_MAX_VARS")]
    max_vars: Option<usize>,
    #[arg(long, global = true, env = "CSSKIT_MAX_COST_LOG2")]
    max_cost_log2: Option<u32>,
}

impl Caps {
    fn budget(&self) -> Result<OmegaBudget, CliError> {
        let d = OmegaBudget::default();
        let b = OmegaBudget {
            max_span_log2: self.max_span_log2.unwrap_or(d.max_span_log2),
            max_vars: self.max_vars.unwrap_or(d.max_vars),
            max_cost_log2: self.max_cost_log2.unwrap_or(d.max_cost_log2),
        };
        if b.max_span_log2 == 0 || b.max_vars == 0 || b.max_cost_log2 == 0 {
            return Err(CliError::new("parameter", "caps must be positive"));
        }
        Ok(b)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build games, compute classical optima and score quantum strategies.
    Game {
        #[command(subcommand)]
        action: GameAction,
    },
    /// Reduce a symmetric zero-diagonal matrix to standard form and emit
    /// the Bell-pair extraction circuit.
    StandardForm {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Walsh spectrum of the quadratic function of a graph.
    Walsh {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "symmetry")]
        method: WalshMethod,
    },
    /// Noncontextual fraction of an empirical model.
    Ncf {
        #[arg(long)]
        model: PathBuf,
        /// Confirm the optimum in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Empirical model of a state on a measurement scenario.
    NcfModel {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value = "codeword")]
        state: String,
        /// Scenario JSON; defaults to one context per query of the game.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Pauli score, noncontextual fraction and bound along a deformation.
    Sweep {
        #[arg(long, value_enum)]
        game: SweepGame,
        #[arg(long, default_value_t = 0.5)]
        theta_max: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// Transfer-matrix and partition-function reports.
    Statmech {
        #[command(subcommand)]
        action: StatmechAction,
    },
}

#[derive(Subcommand)]
enum GameAction {
    /// Emit the game as JSON.
    Build {
        #[command(flatten)]
        game: GameArgs,
    },
    /// Optimal classical success fraction.
    Omega {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum, default_value = "exact")]
        method: OmegaMethodArg,
    },
    /// Success probability of a quantum strategy.
    Play {
        #[command(flatten)]
        game: GameArgs,
        /// `ghz`, `codeword` or `deformed:<theta>`.
        #[arg(long, default_value = "codeword")]
        state: String,
        #[arg(long, value_enum, default_value = "pauli")]
        strategy: StrategyArg,
    },
}

#[derive(Args)]
struct GameArgs {
    /// Game JSON as written by `game build`.
    #[arg(long, conflicts_with_all = ["code", "n", "fix_x", "fix_z", "mode"])]
    spec: Option<PathBuf>,
    /// `ghz`, `cluster`, `toric`, `toric-redundant` (sized by `--n`), a
    /// `kind:size` name such as `honeycomb:2x2`, or a code file.
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated X generator labels (one bit per row of H_X).
    #[arg(long)]
    fix_x: Option<String>,
    /// Comma-separated Z generator labels (one bit per row of H_Z).
    #[arg(long)]
    fix_z: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Xor,
    Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum OmegaMethodArg {
    Exact,
    Bounds,
    Oracle,
    FixedX,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Pauli,
    Merp,
}

#[derive(Clone, Copy, ValueEnum)]
enum WalshMethod {
    Symmetry,
    Fwht,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepGame {
    Ghz3,
    Cluster4,
}

#[derive(Subcommand)]
enum StatmechAction {
    /// Exact `W_C(0,0)` and the lower and upper growth rates.
    ClusterBounds {
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
    /// Honeycomb loop-model partition function.
    Loop {
        /// Torus size in cells, `COLSxROWS`.
        #[arg(long, default_value = "3x3")]
        cells: String,
        #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
        t: f64,
        #[arg(long, default_value_t = 2.0)]
        loop_weight: f64,
    },
    /// Quadrature of the digamma integral against ln(27/4).
    Digamma,
    /// Ground states of the plaquette Ising model.
    Plaquette {
        #[arg(long = "L", alias = "side", default_value_t = 4)]
        side: usize,
    },
    /// Exhaustive check that Z operators never increase the cluster overlap.
    ZRemoval {
        #[arg(long, default_value_t = 8)]
        ell: usize,
        #[arg(long, value_enum, default_value = "open")]
        boundary: BoundaryArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Debug)]
struct CliError {
    kind: String,
    message: String,
    line: Option<usize>,
}

impl CliError {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError { kind: kind.into(), message: message.into(), line: None }
    }

    fn to_json(&self) -> Value {
        let mut e = json!({ "kind": self.kind, "message": self.message });
        if let Some(line) = self.line {
            e["line"] = json!(line);
        }
        json!({ "error": e })
    }
}

impl From<csskit::Error> for CliError {
    fn from(e: csskit::Error) -> Self {
        let line = match &e {
            csskit::Error::Format { line, .. } => Some(*line),
            _ => None,
        };
        CliError { kind: e.kind().into(), message: e.to_string(), line }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { kind: "format".into(), message: e.to_string(), line: Some(e.line()) }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// A rendered result: JSON always, plus a table when CSV makes sense.
struct Output {
    json: Value,
    table: Option<(Vec<String>, Vec<Vec<String>>)>,
    default_format: Format,
}

impl Output {
    fn json(value: impl Serialize) -> CliResult<Self> {
        Ok(Output { json: serde_json::to_value(value)?, table: None, default_format: Format::Json })
    }

    fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header.iter().map(|s| s.to_string()).collect(), rows));
        self
    }

    fn render(&self, format: Option<Format>) -> CliResult<Vec<u8>> {
        match format.unwrap_or(self.default_format) {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)?;
                s.push('\n');
                Ok(s.into_bytes())
            }
            Format::Csv => {
                let (header, rows) = match &self.table {
                    Some((h, r)) => (h.clone(), r.clone()),
                    None => scalar_row(&self.json),
                };
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&header)?;
                for r in rows {
                    w.write_record(&r)?;
                }
                w.into_inner().map_err(|e| CliError::new("io", e.to_string()))
            }
        }
    }
}

/// One CSV row from the scalar top-level fields of a JSON object.
fn scalar_row(v: &Value) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = Vec::new();
    let mut row = Vec::new();
    if let Value::Object(map) = v {
        for (k, x) in map {
            let cell = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                Value::Null => String::new(),
                _ => continue,
            };
            header.push(k.clone());
            row.push(cell);
        }
    }
    (header, vec![row])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::new("parameter", "--threads must be positive"));
        }
        csskit::exec::set_threads(t);
    }
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let out = match &cli.command {
        Command::Game { action } => game_command(action, &cli.caps, exec)?,
        Command::StandardForm { matrix } => standard_form_command(matrix)?,
        Command::Walsh { graph, method } => walsh_command(graph, *method, exec)?,
        Command::Ncf { model, exact } => {
            let model: EmpiricalModel = serde_json::from_str(&read(model)?)?;
            model.scenario.validate()?;
            let mode = if *exact { LpMode::Exact } else { LpMode::Float };
            Output::json(ncf_with(&model, mode)?)?
        }
        Command::NcfModel { game, state, scenario } => {
            let spec = load_game(game)?;
            let scenario: MeasurementScenario = match scenario {
                Some(p) => serde_json::from_str(&read(p)?)?,
                None => scenario_from_game(&spec)?,
            };
            scenario.validate()?;
            let state = build_state(&state_kind(state, &spec)?)?;
            Output::json(quantum::empirical_model(&state, &scenario)?)?
        }
        Command::Sweep { game, theta_max, steps } => sweep_command(*game, *theta_max, *steps, exec)?,
        Command::Statmech { action } => statmech_command(action, exec)?,
    };
    let bytes = out.render(cli.format)?;
    match &cli.output {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn load_code(name: &str, size: Option<usize>) -> CliResult<CssCode> {
    let sized = |kind: &str| -> CliResult<NamedCode> {
        let n = size.ok_or_else(|| CliError::new("parameter", format!("code {kind} needs --n")))?;
        Ok(format!("{kind}:{n}").parse::<NamedCode>()?)
    };
    let named = match name {
        "ghz" | "cluster" | "toric" | "toric-redundant" => Some(sized(name)?),
        _ if name.contains(':') => Some(name.parse::<NamedCode>()?),
        _ => None,
    };
    match named {
        Some(c) => Ok(c.build()?),
        None if Path::new(name).is_file() => Ok(CssCode::parse_text(&read(Path::new(name))?, true)?),
        None => Err(CliError::new("parameter", format!("{name:?} is neither a known code nor a file"))),
    }
}

fn fixed_list(spec: &str, code: &CssCode, x_side: bool) -> CliResult<InputSet> {
    let rows = if x_side { code.hx().rows() } else { code.hz().rows() };
    let list = spec
        .split(',')
        .map(|label| {
            let bits = BitVector::parse(label)?;
            if bits.len() != rows {
                return Err(CliError::new(
                    "parameter",
                    format!("label {label:?} has {} bits, the code has {rows} generators", bits.len()),
                ));
            }
            let mask = bits.iter_ones().fold(0u64, |m, i| m | 1 << i);
            let image = if x_side { code.x_image(mask) } else { code.z_image(mask) };
            Ok(BitVector::from_u64(code.nqubits(), image))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(InputSet::FixedList(list))
}

fn load_game(args: &GameArgs) -> CliResult<GameSpec> {
    if let Some(path) = &args.spec {
        let summary: GameSummary = serde_json::from_str(&read(path)?)?;
        return Ok(GameSpec::from_summary(&summary)?);
    }
    let name = args
        .code
        .as_deref()
        .ok_or_else(|| CliError::new("parameter", "either --spec or --code is required"))?;
    let code = load_code(name, args.n)?;
    let x = match &args.fix_x {
        Some(s) => fixed_list(s, &code, true)?,
        None => InputSet::AllOfImage,
    };
    let z = match &args.fix_z {
        Some(s) => fixed_list(s, &code, false)?,
        None => InputSet::AllOfImage,
    };
    let mode = match args.mode {
        Some(ModeArg::Sub) => GameMode::Submeasurement,
        _ => GameMode::Xor,
    };
    Ok(GameSpec::build(code, InputSets { x, z }, mode)?)
}

fn state_kind(spec: &str, game: &GameSpec) -> CliResult<StateKind> {
    let codeword = || StateKind::CssCodeword(game.code().clone());
    match spec {
        "ghz" => Ok(StateKind::Ghz(game.nplayers())),
        "codeword" => Ok(codeword()),
        _ => {
            let theta = spec
                .strip_prefix("deformed:")
                .and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| CliError::new("parameter", format!("unknown state {spec:?}")))?;
            Ok(StateKind::Deformed(Box::new(codeword()), theta))
        }
    }
}

fn game_command(action: &GameAction, caps: &Caps, exec: Exec) -> CliResult<Output> {
    match action {
        GameAction::Build { game } => {
            let spec = load_game(game)?;
            let summary = spec.summary();
            let n = spec.nplayers();
            let rows = (0..spec.query_map().num_queries())
                .map(|q| {
                    let (a, b) = spec.query_map().question(q);
                    vec![
                        q.to_string(),
                        BitVector::from_u64(n, a).to_string(),
                        BitVector::from_u64(n, b).to_string(),
                        u8::from(spec.target().get(q)).to_string(),
                    ]
                })
                .collect();
            Ok(Output::json(summary)?.with_table(&["query", "a", "b", "target"], rows))
        }
        GameAction::Omega { game, method } => {
            let spec = load_game(game)?;
            let value = match method {
                OmegaMethodArg::Exact => {
                    let r = strategy::omega_exact_with(&spec, &caps.budget()?, exec)?;
                    let mut v = serde_json::to_value(&r)?;
                    v["omega_float"] = json!(r.omega.to_f64());
                    v
                }
                OmegaMethodArg::FixedX => serde_json::to_value(strategy::omega_fixed_x(&spec)?)?,
                OmegaMethodArg::Bounds => serde_json::to_value(strategy::omega_bounds_with(&spec, exec)?)?,
                OmegaMethodArg::Oracle => {
                    let omega = strategy::omega_bruteforce_oracle(&spec)?;
                    json!({ "omega": omega, "method": "brute_force", "omega_float": omega.to_f64() })
                }
            };
            Output::json(value)
        }
        GameAction::Play { game, state, strategy } => {
            let spec = load_game(game)?;
            let (name, score) = match strategy {
                StrategyArg::Pauli => {
                    let s = build_state(&state_kind(state, &spec)?)?;
                    ("pauli", quantum::pauli_strategy_score(&s, &spec, exec)?)
                }
                StrategyArg::Merp => ("merp", quantum::merp_strategy_score(&spec, exec)?),
            };
            let state = if matches!(strategy, StrategyArg::Merp) { "ghz" } else { state.as_str() };
            Output::json(json!({ "strategy": name, "state": state, "mode": spec.mode(), "score": score }))
        }
    }
}

fn matrix_rows(m: &BitMatrix) -> Vec<String> {
    (0..m.rows()).map(|r| m.row(r).to_string()).collect()
}

fn standard_form_command(path: &Path) -> CliResult<Output> {
    let b = BitMatrix::parse_text(&read(path)?)?;
    let sf = standard_form(&b)?;
    let graph = Graph::from_adjacency(&b)?;
    let circuit = bell_extraction_circuit(&graph)?;
    let rows = circuit
        .gates
        .iter()
        .map(|g| match *g {
            graphstate::CircuitGate::Cx { control, target } => {
                vec!["cx".into(), control.to_string(), target.to_string()]
            }
            graphstate::CircuitGate::Z { site } => vec!["z".into(), site.to_string(), String::new()],
        })
        .collect();
    Output::json(json!({
        "rank": sf.rank2k,
        "bell_blocks": sf.rank2k / 2,
        "reduced": matrix_rows(&sf.reduced),
        "transform": matrix_rows(&sf.transform),
        "ops": sf.ops,
        "gates": circuit.gates,
        "bell_pairs": circuit.pairs,
        "isolated": circuit.isolated,
    }))
    .map(|o| o.with_table(&["gate", "a", "b"], rows))
}

fn walsh_command(path: &Path, method: WalshMethod, exec: Exec) -> CliResult<Output> {
    let graph = Graph::parse_text(&read(path)?)?;
    let n = graph.nvertices();
    let values: Vec<(u64, i128)> = match method {
        WalshMethod::Symmetry => {
            let w = walsh_from_symmetries(&graph)?;
            let list: Vec<(u64, i64)> = if n <= 20 {
                let s = w.spectrum()?;
                (0..1u64 << n).map(|y| (y, s.get(y))).filter(|&(_, v)| v != 0).collect()
            } else {
                Vec::new()
            };
            let rows = list.iter().map(|(y, v)| vec![y.to_string(), v.to_string()]).collect();
            let out = json!({
                "method": "symmetry",
                "nvars": n,
                "n_x": w.n_x,
                "magnitude_log2": w.magnitude_log2,
                "support_count": w.support_count().to_string(),
                "offset": w.offset.to_string(),
                "offset_negative": w.offset_negative,
                "values": list.iter().map(|(y, v)| json!([y, v.to_string()])).collect::<Vec<_>>(),
            });
            return Ok(Output::json(out)?.with_table(&["y", "w"], rows));
        }
        WalshMethod::Fwht => {
            let f = graph.function()?;
            let s = f.walsh_transform_with(exec)?;
            (0..1u64 << n).map(|y| (y, s.get(y) as i128)).filter(|&(_, v)| v != 0).collect()
        }
    };
    let support = values.len();
    let max = values.iter().map(|&(_, v)| v.unsigned_abs()).max().unwrap_or(0);
    let rows = values.iter().map(|(y, v)| vec![y.to_string(), v.to_string()]).collect();
    let out = json!({
        "method": "fwht",
        "nvars": n,
        "n_x": n - support.trailing_zeros() as usize,
        "magnitude_log2": max.trailing_zeros(),
        "support_count": support.to_string(),
        "values": values.iter().map(|(y, v)| json!([y, v.to_string()])).collect::<Vec<_>>(),
    });
    Ok(Output::json(out)?.with_table(&["y", "w"], rows))
}

fn sweep_command(which: SweepGame, theta_max: f64, steps: usize, exec: Exec) -> CliResult<Output> {
    let game = match which {
        SweepGame::Ghz3 => {
            let code = NamedCode::Ghz(3).build()?;
            let x = InputSet::singleton(BitVector::ones(3));
            GameSpec::xor(code, InputSets { x, z: InputSet::AllOfImage })?
        }
        SweepGame::Cluster4 => GameSpec::xor(NamedCode::Cluster1D(4).build()?, InputSets::unrestricted())?,
    };
    let omega = strategy::omega_exact_with(&game, &OmegaBudget::default(), exec)?.omega;
    let grid = theta_grid(theta_max, steps)?;
    let base = StateKind::CssCodeword(game.code().clone());
    let points = deformation_sweep(&game, &base, omega, &grid, exec)?;
    let rows = points
        .iter()
        .map(|p| vec![p.theta.to_string(), p.pauli_score.to_string(), p.ncf.to_string(), p.bound.to_string()])
        .collect();
    let mut out = Output::json(json!({ "omega": omega, "points": points }))?
        .with_table(&["theta", "pauli_score", "ncf", "bound"], rows);
    out.default_format = Format::Csv;
    Ok(out)
}

fn parse_cells(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::new("parameter", format!("cells must look like 3x3, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn statmech_command(action: &StatmechAction, exec: Exec) -> CliResult<Output> {
    match action {
        StatmechAction::ClusterBounds { n } => {
            let t = statmech::ccz_transfer_matrix();
            let w = statmech::cluster_w00(*n)?;
            let brute = if *n <= statmech::MAX_BRUTE_LENGTH {
                Some(statmech::cluster_w00_brute(*n, exec)?.to_string())
            } else {
                None
            };
            let growth = if *n >= 3 { Some(statmech::cluster_growth_estimate(n - 2, *n)?) } else { None };
            Output::json(json!({
                "n": n,
                "w00": w.to_string(),
                "w00_brute": brute,
                "characteristic_polynomial": t.characteristic_polynomial().iter().map(|c| *c as i64).collect::<Vec<_>>(),
                "lower_rate": statmech::cubic_dominant_root(),
                "lower_rate_closed_form": statmech::cubic_root_closed_form(),
                "growth_estimate": growth,
                "golden_ratio": statmech::golden_ratio(),
                "upper_rate": statmech::cluster_upper_rate(),
            }))
        }
        StatmechAction::Loop { cells, t, loop_weight } => {
            let (cols, rows) = parse_cells(cells)?;
            let p = statmech::loop_partition(cols, rows, *t, *loop_weight, exec)?;
            let mut v = serde_json::to_value(&p)?;
            v["limit_vertex_rate"] = json!(statmech::loop_limit_rate());
            v["limit_player_rate"] = json!(3f64.sqrt());
            Output::json(v)
        }
        StatmechAction::Digamma => {
            let r = statmech::digamma_identity_check()?;
            let mut v = serde_json::to_value(&r)?;
            v["lhs"] = json!(r.integral_at_zero);
            v["rhs"] = json!(r.log_27_over_4);
            Output::json(v)
        }
        StatmechAction::Plaquette { side } => Output::json(statmech::plaquette_ising_count(*side)?),
        StatmechAction::ZRemoval { ell, boundary } => {
            let b = match boundary {
                BoundaryArg::Open => Boundary::Open,
                BoundaryArg::Periodic => Boundary::Periodic,
            };
            Output::json(statmech::z_removal_check(*ell, b)?)
        }
    }
}
