//! `vgraph`: map time series onto visibility graphs and report their
//! structural properties.
//!
//! Exit codes: 0 success, 1 ingestion failure, 2 analysis failure,
//! 3 output I/O failure.

mod analyze;
mod output;
mod report;

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use vgraph::dfa::{estimate_hurst, DfaConfig, Direction};
use vgraph::distfit::{bootstrap_pvalue, fit_powerlaw, fit_truncated_powerlaw, KMin};
use vgraph::series::{csv_headers, generate, load_csv, write_csv, SyntheticKind, SyntheticSpec};
use vgraph::vg::{build_vg_dc, build_vg_oracle, build_vg_sweep, export_edgelist_path};
use vgraph::{Column, TimeSeries, VisibilityGraph};

use analyze::{analyze_series, degrees_from_edge_list, FamilyChoice, PipelineConfig};
use output::{write_atomic, write_figures};
use report::{ConfigEcho, Report, ToolInfo, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "vgraph", version, about = "Visibility-graph analysis of time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write report.json plus figure CSVs.
    Analyze(AnalyzeArgs),
    /// Build a visibility graph and print its node/edge counts.
    Graph(GraphArgs),
    /// Detrended fluctuation analysis of one series.
    Dfa(DfaArgs),
    /// Fit degree-tail models, optionally with a bootstrap p-value.
    Fit(FitArgs),
    /// Average shortest path length across window lengths.
    Smallworld(SmallworldArgs),
    /// Write a synthetic series as CSV.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input CSV path.
    #[arg(long)]
    input: PathBuf,
    /// Column name (with header) or 0-based position.
    #[arg(long, default_value = "0")]
    column: String,
    /// Treat the file as headerless.
    #[arg(long)]
    no_header: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Analyze every column of a headered CSV.
    #[arg(long)]
    all_columns: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Seed for the null models and the bootstrap.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Bootstrap replicas per tail fit (0 skips the p-value).
    #[arg(long, default_value_t = 1000)]
    replicas: usize,
    /// G(N, M) realizations for the null-model comparison.
    #[arg(long, default_value_t = 20)]
    realizations: usize,
    #[arg(long, default_value_t = 10)]
    bins_per_decade: usize,
    /// Small-world window grid as MIN:MAX:COUNT (log-spaced); defaults to
    /// 10:T:50.
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
    family: FamilyArg,
    /// Tail lower bound: "auto" or a fixed value.
    #[arg(long, default_value = "auto")]
    kmin: String,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = AlgoArg::Dc)]
    algo: AlgoArg,
    /// Write the edge list here (gzip when the path ends in .gz).
    #[arg(long)]
    emit_edgelist: Option<PathBuf>,
}

#[derive(Args)]
struct DfaArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    min_scale: Option<usize>,
    #[arg(long)]
    max_scale: Option<usize>,
    #[arg(long, default_value_t = 50)]
    scales: usize,
    /// Segment from both ends and average (instead of forward only).
    #[arg(long)]
    both_ends: bool,
    /// Write the (s, F) points to this CSV file.
    #[arg(long)]
    points: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Edge-list file to take degrees from (plain or .gz).
    #[arg(long, conflicts_with = "input")]
    degrees_from: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "0")]
    column: String,
    #[arg(long)]
    no_header: bool,
    #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
    family: FamilyArg,
    #[arg(long, default_value = "auto")]
    kmin: String,
    /// Bootstrap replicas (0 skips the p-value).
    #[arg(long, default_value_t = 1000)]
    replicas: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SmallworldArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Window grid as MIN:MAX:COUNT (log-spaced); defaults to 10:T:50.
    #[arg(long)]
    lengths: Option<String>,
    /// Write the (N, L, windows) points to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Hurst parameter, required for --kind fgn.
    #[arg(long, value_parser = parse_hurst)]
    hurst: Option<f64>,
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "power-law", alias = "power_law")]
    PowerLaw,
    #[value(name = "truncated", alias = "truncated_power_law")]
    Truncated,
    Both,
}

impl From<FamilyArg> for FamilyChoice {
    fn from(value: FamilyArg) -> Self {
        match value {
            FamilyArg::PowerLaw => FamilyChoice::PowerLaw,
            FamilyArg::Truncated => FamilyChoice::Truncated,
            FamilyArg::Both => FamilyChoice::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Oracle,
    Sweep,
    Dc,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Fgn,
    #[value(name = "white", alias = "white_noise")]
    White,
    #[value(name = "ramp", alias = "linear_ramp")]
    Ramp,
    Constant,
}

fn parse_hurst(s: &str) -> Result<f64, String> {
    let h: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if h > 0.0 && h < 1.0 {
        Ok(h)
    } else {
        Err(format!("hurst must lie strictly inside (0, 1), got {h}"))
    }
}

/// Failure stage, mapped onto the exit-code contract.
#[derive(Debug)]
enum CliError {
    Ingest(String),
    Analysis(String),
    Output(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Ingest(_) => 1,
            CliError::Analysis(_) => 2,
            CliError::Output(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Ingest(m) => write!(f, "ingestion: {m}"),
            CliError::Analysis(m) => write!(f, "analysis: {m}"),
            CliError::Output(m) => write!(f, "output: {m}"),
        }
    }
}

type CliResult = Result<(), CliError>;

fn ingest<T>(r: vgraph::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Ingest(e.to_string()))
}

fn analysis<T>(r: vgraph::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Analysis(e.to_string()))
}

fn out_io<T>(r: std::io::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Output(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Dfa(args) => cmd_dfa(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Smallworld(args) => cmd_smallworld(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vgraph: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// VGRAPH_THREADS caps the rayon worker pool.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("VGRAPH_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn resolve_column(input: &InputArgs) -> Column {
    resolve_column_for(&input.input, &input.column, !input.no_header)
}

/// A column selector is a header name when it matches one, otherwise a
/// 0-based position.
fn resolve_column_for(path: &Path, selector: &str, has_header: bool) -> Column {
    if has_header {
        if let Ok(headers) = csv_headers(path) {
            if headers.iter().any(|h| h == selector) {
                return Column::Name(selector.to_string());
            }
        }
    }
    match selector.parse::<usize>() {
        Ok(idx) => Column::Position(idx),
        Err(_) => Column::Name(selector.to_string()),
    }
}

fn load_input(input: &InputArgs) -> Result<TimeSeries, CliError> {
    ingest(load_csv(&input.input, &resolve_column(input), !input.no_header))
}

/// MIN:MAX:COUNT, log-spaced.
fn parse_lengths(spec: &str, series_len: usize) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Ingest(format!(
            "--lengths {spec:?}: expected MIN:MAX:COUNT"
        )));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| CliError::Ingest(format!("--lengths {spec:?}: {s:?} is not an integer")))
    };
    let (lo, hi, count) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if lo < 10 || hi > series_len || lo >= hi || count == 0 {
        return Err(CliError::Ingest(format!(
            "--lengths {spec:?}: need 10 <= MIN < MAX <= {series_len} and COUNT >= 1"
        )));
    }
    Ok(vgraph::dfa::log_spaced_integers(lo, hi, count))
}

fn parse_kmin(s: &str) -> Result<KMin, CliError> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(KMin::Auto);
    }
    s.parse::<f64>()
        .ok()
        .filter(|k| *k >= 1.0)
        .map(KMin::Fixed)
        .ok_or_else(|| CliError::Ingest(format!("--kmin {s:?}: expected \"auto\" or a value >= 1")))
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult {
    let has_header = !args.input.no_header;
    let series: Vec<TimeSeries> = if args.all_columns {
        if !has_header {
            return Err(CliError::Ingest(
                "--all-columns needs a headered CSV".to_string(),
            ));
        }
        // non-numeric columns (dates, notes) are skipped with a warning
        let headers = ingest(csv_headers(&args.input.input))?;
        let mut loaded = Vec::new();
        for name in &headers {
            match load_csv(&args.input.input, &Column::Name(name.clone()), true) {
                Ok(s) => loaded.push(s),
                Err(e) => eprintln!("vgraph: skipping column {name:?}: {e}"),
            }
        }
        if loaded.is_empty() {
            return Err(CliError::Ingest(format!(
                "{}: no numeric columns found",
                args.input.input.display()
            )));
        }
        loaded
    } else {
        vec![load_input(&args.input)?]
    };

    let shortest = series.iter().map(|s| s.len()).min().unwrap_or(0);
    let lengths = match &args.lengths {
        Some(spec) => Some(parse_lengths(spec, shortest)?),
        None => None,
    };
    let cfg = PipelineConfig {
        seed: args.seed,
        replicas: args.replicas,
        realizations: args.realizations,
        bins_per_decade: args.bins_per_decade,
        lengths,
        family: args.family.into(),
        k_min: parse_kmin(&args.kmin)?,
        ..PipelineConfig::default()
    };

    let analyses: Vec<_> = series
        .par_iter()
        .map(|s| analyze_series(s, &cfg).map_err(|e| CliError::Analysis(format!("{}: {e}", s.label()))))
        .collect::<Result<_, _>>()?;

    out_io(std::fs::create_dir_all(&args.out))?;
    let mut blocks = Vec::new();
    for analysis in &analyses {
        out_io(write_figures(&args.out, &analysis.block.label, &analysis.figures))?;
    }
    for analysis in analyses {
        blocks.push(analysis.block);
    }

    let report = Report {
        schema: SCHEMA_VERSION,
        tool: ToolInfo {
            name: "vgraph",
            version: env!("CARGO_PKG_VERSION"),
        },
        config: ConfigEcho {
            input: args.input.input.display().to_string(),
            columns: series.iter().map(|s| s.label().to_string()).collect(),
            has_header,
            algo: "dc",
            seed: args.seed,
            replicas: args.replicas,
            realizations: args.realizations,
            bins_per_decade: args.bins_per_decade,
            lengths: cfg.lengths.clone().unwrap_or_default(),
            family: cfg.family.as_str().to_string(),
            k_min: args.kmin.clone(),
            log_fit_degree_cap: cfg.log_fit_degree_cap,
        },
        series: blocks,
    };
    let body = serde_json::to_vec_pretty(&report)
        .map_err(|e| CliError::Output(format!("serializing report: {e}")))?;
    out_io(write_atomic(&args.out.join("report.json"), &body))?;
    println!("wrote {}", args.out.join("report.json").display());
    Ok(())
}

fn cmd_graph(args: GraphArgs) -> CliResult {
    let series = load_input(&args.input)?;
    let graph: VisibilityGraph = match args.algo {
        AlgoArg::Oracle => build_vg_oracle(&series),
        AlgoArg::Sweep => build_vg_sweep(&series),
        AlgoArg::Dc => build_vg_dc(&series),
    };
    if let Some(path) = &args.emit_edgelist {
        let lines = out_io(export_edgelist_path(&graph, path))?;
        eprintln!("edge list: {} lines -> {}", lines, path.display());
    }
    println!("nodes {} edges {}", graph.node_count(), graph.edge_count());
    Ok(())
}

fn cmd_dfa(args: DfaArgs) -> CliResult {
    let series = load_input(&args.input)?;
    let default = analysis(DfaConfig::default_for_len(series.len()))?;
    let config = DfaConfig {
        min_scale: args.min_scale.unwrap_or(default.min_scale),
        max_scale: args.max_scale.unwrap_or(default.max_scale),
        scale_count: args.scales,
        direction: if args.both_ends {
            Direction::BothEnds
        } else {
            Direction::ForwardOnly
        },
    };
    let result = analysis(estimate_hurst(&series, &config))?;
    if let Some(path) = &args.points {
        let mut csv = String::from("s,F\n");
        for (s, f) in &result.points {
            csv.push_str(&format!("{s},{f}\n"));
        }
        out_io(write_atomic(path, csv.as_bytes()))?;
    }
    let summary = serde_json::json!({
        "hurst": result.hurst,
        "slope_se": result.fit.slope_se,
        "r": result.fit.pearson_r,
        "scales_used": result.points.len(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

fn cmd_fit(args: FitArgs) -> CliResult {
    let degrees: Vec<f64> = if let Some(path) = &args.degrees_from {
        let mut text = String::new();
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "gz") {
            flate2::read::GzDecoder::new(file)
                .read_to_string(&mut text)
                .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
        } else {
            std::io::BufReader::new(file)
                .read_to_string(&mut text)
                .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
        }
        degrees_from_edge_list(&text).map_err(CliError::Ingest)?
    } else if let Some(input) = &args.input {
        let column = resolve_column_for(input, &args.column, !args.no_header);
        let series = ingest(load_csv(input, &column, !args.no_header))?;
        build_vg_dc(&series).degrees().iter().map(|&d| d as f64).collect()
    } else {
        return Err(CliError::Ingest(
            "provide --degrees-from or --input".to_string(),
        ));
    };

    let k_min = parse_kmin(&args.kmin)?;
    let family: FamilyChoice = args.family.into();
    let mut fits = Vec::new();
    if matches!(family, FamilyChoice::PowerLaw | FamilyChoice::Both) {
        fits.push(analysis(fit_powerlaw(&degrees, k_min))?);
    }
    if matches!(family, FamilyChoice::Truncated | FamilyChoice::Both) {
        fits.push(analysis(fit_truncated_powerlaw(&degrees, k_min))?);
    }
    if args.replicas >= 100 {
        for fit in &mut fits {
            fit.p_value = Some(analysis(bootstrap_pvalue(
                &degrees,
                fit,
                args.replicas,
                args.seed,
            ))?);
        }
    }
    let body = serde_json::json!({
        "observations": degrees.len(),
        "replicas": args.replicas,
        "seed": args.seed,
        "fits": fits,
    });
    println!("{}", serde_json::to_string_pretty(&body).unwrap());
    Ok(())
}

fn cmd_smallworld(args: SmallworldArgs) -> CliResult {
    let series = load_input(&args.input)?;
    let grid = match &args.lengths {
        Some(spec) => parse_lengths(spec, series.len())?,
        None => vgraph::metrics::default_length_grid(series.len()),
    };
    let scan = analysis(vgraph::metrics::small_world_scan(&series, &grid))?;
    if let Some(path) = &args.out {
        let mut csv = String::from("N,L,windows\n");
        for p in &scan.points {
            csv.push_str(&format!(
                "{},{},{}\n",
                p.window_len, p.mean_path_length, p.windows
            ));
        }
        out_io(write_atomic(path, csv.as_bytes()))?;
    }
    let body = serde_json::json!({
        "points": scan.points,
        "fit_all": scan.fit_all,
        "fit_small": scan.fit_small,
    });
    println!("{}", serde_json::to_string_pretty(&body).unwrap());
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> CliResult {
    let kind = match args.kind {
        KindArg::Fgn => {
            let hurst = args.hurst.ok_or_else(|| {
                CliError::Ingest("--kind fgn needs --hurst".to_string())
            })?;
            SyntheticKind::Fgn { hurst }
        }
        KindArg::White => SyntheticKind::WhiteNoise,
        KindArg::Ramp => SyntheticKind::LinearRamp,
        KindArg::Constant => SyntheticKind::Constant,
    };
    let spec = SyntheticSpec {
        kind,
        length: args.length,
        seed: args.seed,
    };
    let series = analysis(generate(&spec))?;
    match &args.out {
        Some(path) => {
            let mut buf = Vec::new();
            analysis(write_csv(&series, &mut buf))?;
            out_io(write_atomic(path, &buf))?;
        }
        None => {
            let stdout = std::io::stdout();
            analysis(write_csv(&series, stdout.lock()))?;
        }
    }
    Ok(())
}
