use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grassfeed::codebook_io::{load_codebook, save_codebook};
use grassfeed::config::ExperimentConfig;
use grassfeed::experiment::{resolve_codebook, run_experiment};
use grassfeed::output::emit_outputs;
use grassfeed::{SimError, SimResult};
use grassfeed_core::codebook::{build_transition_table, generate_glp_codebook, property1_deviation, Codebook};

#[derive(Parser)]
#[command(
    name = "grassfeed",
    version,
    about = "Differential Grassmannian beamforming feedback simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments of a config file.
    Simulate(SimulateArgs),
    /// Generate or inspect codebooks.
    #[command(subcommand)]
    Codebook(CodebookCommand),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Codebook file; overrides the config.
    #[arg(long, conflicts_with = "generate_codebook")]
    codebook: Option<PathBuf>,
    /// Generate the codebook as `Mt,N,seed`.
    #[arg(long, value_name = "MT,N,SEED")]
    generate_codebook: Option<String>,
}

#[derive(Subcommand)]
enum CodebookCommand {
    /// Search for a Grassmannian packing and write it to a file.
    Gen {
        #[arg(long, default_value_t = 4)]
        mt: usize,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 3000)]
        iterations: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the minimum distance and Property-1 deviation of a codebook.
    Check { path: PathBuf },
}

fn parse_generate(spec: &str) -> SimResult<(usize, usize, u64)> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || SimError::Config(format!("--generate-codebook expects Mt,N,seed, got {spec:?}"));
    let [mt, n, seed] = parts[..] else {
        return Err(bad());
    };
    Ok((
        mt.parse().map_err(|_| bad())?,
        n.parse().map_err(|_| bad())?,
        seed.parse().map_err(|_| bad())?,
    ))
}

fn summarize(cb: &Codebook) {
    let tt = build_transition_table(cb);
    println!("Mt = {}, N = {}", cb.dim(), cb.size());
    println!("J = {:.6}", cb.min_distance());
    println!("property-1 deviation = {:.6}", property1_deviation(&tt));
    let betas: Vec<String> = tt.betas_of(0).iter().take(5).map(|b| format!("{b:.4}")).collect();
    println!("beta_1(1..5) = {}", betas.join(", "));
}

fn simulate(args: SimulateArgs) -> SimResult<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.experiment.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.experiment.output = out;
    }
    if let Some(path) = args.codebook {
        cfg.codebook.path = Some(path);
    }
    if let Some(spec) = &args.generate_codebook {
        let (mt, n, seed) = parse_generate(spec)?;
        if mt != cfg.experiment.tx {
            return Err(SimError::Config(format!(
                "generated codebook dimension {mt} does not match {} transmit antennas",
                cfg.experiment.tx
            )));
        }
        cfg.codebook.path = None;
        cfg.codebook.size = n;
        cfg.codebook.seed = seed;
    }
    cfg.validate()?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| SimError::Config(format!("--threads: {e}")))?;
    }
    let codebook = resolve_codebook(&cfg)?;
    log::info!("codebook J = {:.4}", codebook.min_distance());
    let report = run_experiment(&cfg, codebook)?;
    for s in &report.scenarios {
        println!("scenario {}", s.name);
        println!(
            "  {:>4} {:>9} {:>9} {:>9} {:>9}",
            "G", "baseline", "frozen", "adaptive", "entropy"
        );
        for r in &s.rows {
            println!(
                "  {:>4} {:>9} {:>9.2} {:>9.2} {:>9.2}",
                r.cluster_size, r.baseline_bits, r.huffman_bits_frozen, r.huffman_bits_adaptive, r.entropy
            );
        }
    }
    for path in emit_outputs(&report, &cfg.experiment.output)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> SimResult<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Codebook(CodebookCommand::Gen {
            mt,
            n,
            seed,
            restarts,
            iterations,
            out,
        }) => {
            let cb = generate_glp_codebook(mt, n, seed, restarts, iterations)?.codebook;
            save_codebook(&cb, &out)?;
            summarize(&cb);
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Codebook(CodebookCommand::Check { path }) => {
            summarize(&load_codebook(&path)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
