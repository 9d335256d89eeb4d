//! Command-line front end: construction, analysis, decoding and Monte-Carlo
//! simulation as reproducible batch workflows.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;

use ldpc_peg::alist::{from_alist, to_alist};
use ldpc_peg::decoder::decode;
use ldpc_peg::degree::{
    balance_sockets, check_count_for, design_rate, quantize_sequence, BalancedChecks,
    DegreeDistribution, DegreeSequence, Side,
};
use ldpc_peg::error::{Error, Result};
use ldpc_peg::graph::TannerGraph;
use ldpc_peg::manifest::RunManifest;
use ldpc_peg::peg::{construct, ConstructionReport, PegConfig, PegVariant};
use ldpc_peg::sim::{
    format_sig6, sweep, sweep_to_csv, ChannelSpec, SnrConvention, StopRule,
};

#[derive(Parser)]
#[command(
    name = "ldpc-peg",
    version,
    about = "Irregular LDPC code construction, analysis, decoding and FER simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a Tanner graph complying with both degree distributions
    Construct(ConstructArgs),
    /// Report structural properties of an alist file
    Analyze(AnalyzeArgs),
    /// Run belief-propagation decoding on a vector of channel LLRs
    Decode(DecodeArgs),
    /// Estimate frame error rates over a channel grid
    Simulate(SimulateArgs),
    /// Construct all five variants from one input set and compare them
    Compare(CompareArgs),
}

#[derive(clap::Args)]
struct ConstructArgs {
    /// Symbol-side distribution file (lambda)
    #[arg(long)]
    lambda: PathBuf,
    /// Check-side distribution file (rho)
    #[arg(long)]
    rho: PathBuf,
    /// Number of symbol nodes
    #[arg(long)]
    n: usize,
    /// Construction variant
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    variant: u8,
    /// Use relaxed edge selection (FCD variants only)
    #[arg(long)]
    relaxed: bool,
    /// Master seed; drawn randomly and recorded when omitted
    #[arg(long)]
    seed: Option<u64>,
    /// Cap on the subgraph expansion depth
    #[arg(long)]
    max_depth: Option<usize>,
    /// Output alist path; the report and manifest are written next to it
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    #[arg(long)]
    alist: PathBuf,
    /// Optional check-side distribution for compliance reporting
    #[arg(long)]
    rho: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DecodeArgs {
    #[arg(long)]
    alist: PathBuf,
    /// Whitespace-separated channel LLRs, `#` comments allowed
    #[arg(long)]
    llr: PathBuf,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Bsc,
    Awgn,
}

#[derive(Clone, Copy, ValueEnum)]
enum SnrConventionArg {
    Ebn0,
    Esn0,
}

impl From<SnrConventionArg> for SnrConvention {
    fn from(value: SnrConventionArg) -> Self {
        match value {
            SnrConventionArg::Ebn0 => SnrConvention::EbN0,
            SnrConventionArg::Esn0 => SnrConvention::EsN0,
        }
    }
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Code to simulate as `label=path.alist`; repeat for several codes
    #[arg(long = "code", required = true)]
    codes: Vec<String>,
    #[arg(long, value_enum)]
    channel: ChannelArg,
    /// Comma-separated channel parameters (crossover probabilities or dB)
    #[arg(long)]
    grid: String,
    /// Code rate for the Eb/N0 conversion; default 1 - m/n of the codes
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, value_enum, default_value = "ebn0")]
    snr_convention: SnrConventionArg,
    #[arg(long, default_value_t = 100)]
    min_errors: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: usize,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Worker threads; 0 uses all cores. Never changes the results.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct CompareArgs {
    #[arg(long)]
    lambda: PathBuf,
    #[arg(long)]
    rho: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    channel: ChannelArg,
    #[arg(long)]
    grid: String,
    /// Also construct relaxed FCD variants and report their compliance
    #[arg(long)]
    relaxed: bool,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, value_enum, default_value = "ebn0")]
    snr_convention: SnrConventionArg,
    #[arg(long, default_value_t = 100)]
    min_errors: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: usize,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Prefix for the alist, CSV, summary and manifest outputs
    #[arg(long)]
    out_prefix: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

// 2 for bad usage or inputs, 1 for failures of the run itself
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Validation(_) | Error::Infeasible(_) | Error::Io(_) => 2,
        Error::Structural(_) | Error::Construction(_) => 1,
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| rand::rng().random())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_distribution(path: &Path, side: Side) -> Result<DegreeDistribution> {
    DegreeDistribution::parse(&read_text(path)?, side)
}

fn parse_grid(grid: &str) -> Result<Vec<f64>> {
    let values: Result<Vec<f64>> = grid
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("invalid grid value {tok:?}")))
        })
        .collect();
    let values = values?;
    if values.is_empty() {
        return Err(Error::Validation("empty channel grid".into()));
    }
    Ok(values)
}

fn channel_grid(
    kind: ChannelArg,
    values: &[f64],
    rate: f64,
    convention: SnrConvention,
) -> Result<Vec<ChannelSpec>> {
    let grid: Vec<ChannelSpec> = values
        .iter()
        .map(|&v| match kind {
            ChannelArg::Bsc => ChannelSpec::bsc(v),
            ChannelArg::Awgn => ChannelSpec::awgn(v, rate, convention),
        })
        .collect();
    for spec in &grid {
        spec.validate()?;
    }
    Ok(grid)
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Validation(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

struct Inputs {
    lambda: DegreeDistribution,
    rho: DegreeDistribution,
    symbols: DegreeSequence,
    checks: BalancedChecks,
}

fn prepare_inputs(lambda_path: &Path, rho_path: &Path, n: usize) -> Result<Inputs> {
    let lambda = load_distribution(lambda_path, Side::Symbol)?;
    let rho = load_distribution(rho_path, Side::Check)?;
    let symbols = quantize_sequence(&lambda, n)?;
    let m = check_count_for(symbols.total_sockets(), &rho);
    let checks = balance_sockets(&symbols, &rho, m)?;
    Ok(Inputs {
        lambda,
        rho,
        symbols,
        checks,
    })
}

fn girth_display(girth: Option<usize>) -> String {
    girth.map_or_else(|| "inf".to_string(), |g| g.to_string())
}

fn print_construction_summary(
    graph: &TannerGraph,
    report: &ConstructionReport,
    rho: &DegreeDistribution,
    checks: &BalancedChecks,
) -> Result<()> {
    println!("n {}", graph.symbol_count());
    println!("m {}", graph.check_count());
    println!("edges {}", graph.edge_count());
    println!("girth {}", girth_display(report.girth));
    println!("eta_edge {}", format_sig6(graph.rho_compliance(rho)?));
    println!("eta_node {}", format_sig6(graph.rho_compliance_node(rho)?));
    println!("overfill {}", report.overfill_events);
    println!(
        "socket_adjustments {} (check count {:+})",
        checks.adjustments.len(),
        checks.check_count_delta
    );
    Ok(())
}

fn cmd_construct(args: ConstructArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let inputs = prepare_inputs(&args.lambda, &args.rho, args.n)?;
    let variant = PegVariant::from_number(args.variant)?;
    let mut config = PegConfig::new(variant, args.relaxed, seed)?;
    config.max_expansion_depth = args.max_depth;
    let (graph, report) = construct(&config, &inputs.symbols, &inputs.checks.sequence)?;

    std::fs::write(&args.out, to_alist(&graph))?;
    let report_path = args.out.with_extension("report");
    std::fs::write(&report_path, report.to_log())?;

    let mut argv = vec![
        "construct".to_string(),
        "--lambda".into(),
        args.lambda.display().to_string(),
        "--rho".into(),
        args.rho.display().to_string(),
        "--n".into(),
        args.n.to_string(),
        "--variant".into(),
        args.variant.to_string(),
    ];
    if args.relaxed {
        argv.push("--relaxed".into());
    }
    if let Some(depth) = args.max_depth {
        argv.push("--max-depth".into());
        argv.push(depth.to_string());
    }
    argv.extend([
        "--seed".to_string(),
        seed.to_string(),
        "--out".into(),
        args.out.display().to_string(),
    ]);
    let mut manifest = RunManifest::new("construct", argv, seed);
    manifest.record_input(&args.lambda)?;
    manifest.record_input(&args.rho)?;
    manifest.record_output(&args.out);
    manifest.record_output(&report_path);
    manifest.write(&manifest_path(&args.out))?;

    print_construction_summary(&graph, &report, &inputs.rho, &inputs.checks)
}

fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    artifact.with_file_name(name)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let graph = from_alist(&read_text(&args.alist)?)?;
    let n = graph.symbol_count();
    let m = graph.check_count();
    println!("n {n}");
    println!("m {m}");
    println!("edges {}", graph.edge_count());
    println!("rate {}", format_sig6(1.0 - m as f64 / n as f64));
    let spectrum = |s: &std::collections::BTreeMap<usize, usize>| {
        s.iter()
            .map(|(d, c)| format!("{d}:{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("symbol_degrees {}", spectrum(&graph.symbol_degree_spectrum()));
    println!("check_degrees {}", spectrum(&graph.check_degree_spectrum()));
    println!("girth {}", girth_display(graph.girth()));
    let chains = graph.degree2_chain_report();
    println!(
        "degree2_chains acyclic={} count={} longest={}",
        chains.acyclic, chains.chain_count, chains.longest_chain
    );
    if let Some(rho_path) = &args.rho {
        let rho = load_distribution(rho_path, Side::Check)?;
        println!("eta_edge {}", format_sig6(graph.rho_compliance(&rho)?));
        println!("eta_node {}", format_sig6(graph.rho_compliance_node(&rho)?));
    }
    Ok(())
}

fn parse_llr_file(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            values.push(tok.parse::<f64>().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("invalid LLR value {tok:?}"),
            })?);
        }
    }
    Ok(values)
}

fn cmd_decode(args: DecodeArgs) -> Result<()> {
    let graph = from_alist(&read_text(&args.alist)?)?;
    let llr = parse_llr_file(&read_text(&args.llr)?)?;
    let result = decode(&graph, &llr, args.max_iters)?;
    let bits: String = result
        .hard_decision
        .iter()
        .map(|&b| if b == 0 { '0' } else { '1' })
        .collect();
    let text = format!(
        "hard {bits}\niterations {}\nsyndrome_zero {}\n",
        result.iterations_used, result.syndrome_zero
    );
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_code_spec(spec: &str) -> Result<(String, PathBuf)> {
    let (label, path) = spec.split_once('=').ok_or_else(|| {
        Error::Validation(format!("code spec {spec:?} must look like label=path"))
    })?;
    if label.is_empty() || label.contains(',') {
        return Err(Error::Validation(format!("invalid code label {label:?}")));
    }
    Ok((label.to_string(), PathBuf::from(path)))
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let mut labeled: Vec<(String, TannerGraph)> = Vec::new();
    let mut input_paths = Vec::new();
    for spec in &args.codes {
        let (label, path) = parse_code_spec(spec)?;
        let graph = from_alist(&read_text(&path)?)?;
        labeled.push((label, graph));
        input_paths.push(path);
    }
    let rate = args.rate.unwrap_or_else(|| {
        let g = &labeled[0].1;
        1.0 - g.check_count() as f64 / g.symbol_count() as f64
    });
    let grid = channel_grid(
        args.channel,
        &parse_grid(&args.grid)?,
        rate,
        args.snr_convention.into(),
    )?;
    let stop = StopRule {
        min_frame_errors: args.min_errors,
        max_frames: args.max_frames,
    };
    let codes: Vec<(String, &TannerGraph)> = labeled
        .iter()
        .map(|(label, graph)| (label.clone(), graph))
        .collect();
    let max_iters = args.max_iters;
    let rows = with_pool(args.workers, move || {
        sweep(&codes, &grid, &stop, seed, max_iters)
    })??;
    std::fs::write(&args.out, sweep_to_csv(&rows))?;

    let mut argv = vec!["simulate".to_string()];
    for spec in &args.codes {
        argv.push("--code".into());
        argv.push(spec.clone());
    }
    argv.extend([
        "--channel".to_string(),
        match args.channel {
            ChannelArg::Bsc => "bsc".into(),
            ChannelArg::Awgn => "awgn".into(),
        },
        "--grid".into(),
        args.grid.clone(),
        "--rate".into(),
        rate.to_string(),
        "--snr-convention".into(),
        match args.snr_convention {
            SnrConventionArg::Ebn0 => "ebn0".into(),
            SnrConventionArg::Esn0 => "esn0".into(),
        },
        "--min-errors".into(),
        args.min_errors.to_string(),
        "--max-frames".into(),
        args.max_frames.to_string(),
        "--max-iters".into(),
        args.max_iters.to_string(),
        "--workers".into(),
        args.workers.to_string(),
        "--seed".into(),
        seed.to_string(),
        "--out".into(),
        args.out.display().to_string(),
    ]);
    let mut manifest = RunManifest::new("simulate", argv, seed);
    for path in &input_paths {
        manifest.record_input(path)?;
    }
    manifest.record_output(&args.out);
    manifest.write(&manifest_path(&args.out))?;

    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let inputs = prepare_inputs(&args.lambda, &args.rho, args.n)?;
    let rate = args
        .rate
        .unwrap_or_else(|| design_rate(&inputs.lambda, &inputs.rho));

    struct VariantRow {
        variant: PegVariant,
        girth: Option<usize>,
        eta_edge: f64,
        eta_node: f64,
        overfill: usize,
        eta_edge_relaxed: Option<f64>,
    }

    let mut graphs: Vec<(String, TannerGraph)> = Vec::new();
    let mut rows: Vec<VariantRow> = Vec::new();
    let mut alist_paths = Vec::new();
    for variant in PegVariant::all() {
        let config = PegConfig::new(variant, false, seed)?;
        let (graph, report) = construct(&config, &inputs.symbols, &inputs.checks.sequence)?;
        let eta_edge = graph.rho_compliance(&inputs.rho)?;
        let eta_node = graph.rho_compliance_node(&inputs.rho)?;
        let eta_edge_relaxed = if args.relaxed && variant.uses_fcd() {
            let relaxed_config = PegConfig::new(variant, true, seed)?;
            let (relaxed_graph, _) =
                construct(&relaxed_config, &inputs.symbols, &inputs.checks.sequence)?;
            Some(relaxed_graph.rho_compliance(&inputs.rho)?)
        } else {
            None
        };
        let label = format!("v{}", variant.number());
        let alist_path = args
            .out_prefix
            .with_file_name(format!(
                "{}.{label}.alist",
                args.out_prefix
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            ));
        std::fs::write(&alist_path, to_alist(&graph))?;
        alist_paths.push(alist_path);
        rows.push(VariantRow {
            variant,
            girth: report.girth,
            eta_edge,
            eta_node,
            overfill: report.overfill_events,
            eta_edge_relaxed,
        });
        graphs.push((label, graph));
    }

    let grid = channel_grid(
        args.channel,
        &parse_grid(&args.grid)?,
        rate,
        args.snr_convention.into(),
    )?;
    let stop = StopRule {
        min_frame_errors: args.min_errors,
        max_frames: args.max_frames,
    };
    let codes: Vec<(String, &TannerGraph)> = graphs
        .iter()
        .map(|(label, graph)| (label.clone(), graph))
        .collect();
    let max_iters = args.max_iters;
    let sweep_rows = with_pool(args.workers, move || {
        sweep(&codes, &grid, &stop, seed, max_iters)
    })??;

    let csv_path = args.out_prefix.with_extension("csv");
    std::fs::write(&csv_path, sweep_to_csv(&sweep_rows))?;

    let mut summary = String::from("variant girth eta_edge eta_node overfill eta_edge_relaxed\n");
    for row in &rows {
        summary.push_str(&format!(
            "{} {} {} {} {} {}\n",
            row.variant.number(),
            girth_display(row.girth),
            format_sig6(row.eta_edge),
            format_sig6(row.eta_node),
            row.overfill,
            row.eta_edge_relaxed
                .map_or_else(|| "-".to_string(), format_sig6),
        ));
    }
    let summary_path = args.out_prefix.with_extension("summary.txt");
    std::fs::write(&summary_path, &summary)?;
    print!("{summary}");

    let mut argv = vec![
        "compare".to_string(),
        "--lambda".into(),
        args.lambda.display().to_string(),
        "--rho".into(),
        args.rho.display().to_string(),
        "--n".into(),
        args.n.to_string(),
        "--channel".into(),
        match args.channel {
            ChannelArg::Bsc => "bsc".into(),
            ChannelArg::Awgn => "awgn".into(),
        },
        "--grid".into(),
        args.grid.clone(),
    ];
    if args.relaxed {
        argv.push("--relaxed".into());
    }
    argv.extend([
        "--rate".to_string(),
        rate.to_string(),
        "--snr-convention".into(),
        match args.snr_convention {
            SnrConventionArg::Ebn0 => "ebn0".into(),
            SnrConventionArg::Esn0 => "esn0".into(),
        },
        "--min-errors".into(),
        args.min_errors.to_string(),
        "--max-frames".into(),
        args.max_frames.to_string(),
        "--max-iters".into(),
        args.max_iters.to_string(),
        "--workers".into(),
        args.workers.to_string(),
        "--seed".into(),
        seed.to_string(),
        "--out-prefix".into(),
        args.out_prefix.display().to_string(),
    ]);
    let mut manifest = RunManifest::new("compare", argv, seed);
    manifest.record_input(&args.lambda)?;
    manifest.record_input(&args.rho)?;
    for path in &alist_paths {
        manifest.record_output(path);
    }
    manifest.record_output(&csv_path);
    manifest.record_output(&summary_path);
    manifest.write(&args.out_prefix.with_extension("manifest.json"))?;
    Ok(())
}
