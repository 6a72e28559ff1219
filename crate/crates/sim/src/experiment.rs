//! Monte-Carlo runner: channel -> cluster selection -> differential feedback.
//!
//! Random streams: the warm-up for the frozen tables draws from stream 0,
//! trial `k` from stream `k + 1`. Every scenario of a trial restarts the same
//! stream, so scenarios are compared on common random numbers.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use grassfeed_core::beamform::{count_eigen_switches, select_all_clusters, ClusterConfig, SwitchCount};
use grassfeed_core::channel::{ChannelSampler, ChannelTensor, FreqProfile};
use grassfeed_core::codebook::{
    build_transition_table, generate_glp_codebook, property1_deviation, Codebook, CodebookSource, TransitionTable,
};
use grassfeed_core::feedback::{
    differential_decode_indices, differential_encode_indices, CodecSession, ProbabilityMode, ProbabilityModel, Role,
};
use grassfeed_core::rng::{stream_rng, SimRng};

use crate::codebook_io::load_codebook;
use crate::config::{ExperimentConfig, ModeSetting};
use crate::error::{SimError, SimResult};

/// Stream reserved for the frozen-table warm-up.
pub const WARMUP_STREAM: u64 = 0;

/// Window lengths of the steady-state rule.
pub const TRAILING_WINDOW: usize = 5;
pub const FINAL_WINDOW: usize = 10;
pub const STEADY_STATE_TOLERANCE: f64 = 0.05;

/// Shortest run for which the steady-state estimate is meaningful.
pub const MIN_CONVERGENCE_SYMBOLS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub codebook: CodebookSummary,
    pub scenarios: Vec<ScenarioReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookSummary {
    pub dim: usize,
    pub size: usize,
    pub min_distance: f64,
    pub property1_deviation: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub mode: ModeSetting,
    /// Adjacent-subcarrier correlation magnitude of an exponential profile.
    pub adjacent_correlation: Option<f64>,
    pub spatial: bool,
    pub rows: Vec<ClusterReport>,
}

/// One row of a bits-versus-cluster-size table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub cluster_size: usize,
    pub clusters: usize,
    /// `M * log2(N)`: every index sent raw.
    pub baseline_bits: u64,
    /// Mean bits per symbol with tables fixed from the warm-up estimate.
    pub huffman_bits_frozen: f64,
    /// Mean bits per symbol with on-the-fly estimation from a uniform start.
    pub huffman_bits_adaptive: f64,
    /// Header plus empirical entropy of the transitions, bits per symbol.
    pub entropy: f64,
    pub frozen_total_bits: u64,
    pub adaptive_total_bits: u64,
    /// Symbols simulated, `T * trials`.
    pub symbols: u64,
    /// Eigen-mode switches per neighboring cluster pair; `None` if `Mr < 2`.
    pub switching_rate: Option<f64>,
    /// Pooled raw transition frequencies `p(k)` from the warm-up.
    pub transition_probabilities: Vec<f64>,
    /// Trial-averaged bits of symbol `t = 1..T`.
    pub convergence: Vec<f64>,
    /// 1-based steady-state symbol index.
    pub steady_state: Option<usize>,
}

/// Loads or generates the codebook named by the config.
pub fn resolve_codebook(cfg: &ExperimentConfig) -> SimResult<Codebook> {
    let cb = match &cfg.codebook.path {
        Some(path) => load_codebook(path)?,
        None => {
            let c = &cfg.codebook;
            generate_glp_codebook(cfg.experiment.tx, c.size, c.seed, c.restarts, c.iterations)?.codebook
        }
    };
    check_codebook(cfg, &cb)?;
    Ok(cb)
}

fn check_codebook(cfg: &ExperimentConfig, cb: &Codebook) -> SimResult<()> {
    if cb.dim() != cfg.experiment.tx {
        return Err(SimError::Config(format!(
            "codebook dimension {} does not match {} transmit antennas",
            cb.dim(),
            cfg.experiment.tx
        )));
    }
    if !cb.size().is_power_of_two() {
        return Err(SimError::Config(format!(
            "codebook size {} is not a power of two",
            cb.size()
        )));
    }
    Ok(())
}

struct Scenario {
    mode: ProbabilityMode,
    sampler: ChannelSampler,
}

struct Shared {
    codebook: Codebook,
    table: Arc<TransitionTable>,
    clusters: Vec<ClusterConfig>,
    scenarios: Vec<Scenario>,
    /// Frozen-table models, `[scenario][cluster size]`.
    warm: Vec<Vec<ProbabilityModel>>,
    symbols: usize,
    seed: u64,
    rebuild: u64,
    switching: bool,
}

/// Per-trial state of one (scenario, cluster size) pair.
struct Lane {
    adaptive: (CodecSession, CodecSession),
    frozen: (CodecSession, CodecSession),
    observed: ProbabilityModel,
    bits: Vec<u64>,
    frozen_bits: u64,
    switches: SwitchCount,
}

#[derive(Default)]
struct LaneTotals {
    bits: Vec<u64>,
    frozen_bits: u64,
    observed: Option<ProbabilityModel>,
    switches: SwitchCount,
}

impl LaneTotals {
    fn add(&mut self, lane: Lane) {
        if self.bits.is_empty() {
            self.bits = lane.bits;
        } else {
            self.bits.iter_mut().zip(&lane.bits).for_each(|(a, b)| *a += b);
        }
        self.frozen_bits += lane.frozen_bits;
        match &mut self.observed {
            Some(m) => m.merge(&lane.observed),
            None => self.observed = Some(lane.observed),
        }
        self.switches += lane.switches;
    }
}

fn session_pair(sh: &Shared, mode: ProbabilityMode) -> SimResult<(CodecSession, CodecSession)> {
    Ok((
        CodecSession::encoder(sh.table.clone(), mode)?.with_rebuild_interval(sh.rebuild)?,
        CodecSession::decoder(sh.table.clone(), mode)?.with_rebuild_interval(sh.rebuild)?,
    ))
}

/// Encodes, decodes and checks one message; returns its bit count.
fn exchange(
    pair: &mut (CodecSession, CodecSession),
    iv: &grassfeed_core::beamform::IndexVector,
    table: &TransitionTable,
) -> SimResult<usize> {
    let msg = pair.0.encode_message(&differential_encode_indices(iv, table))?;
    let sv = pair.1.decode_message(&msg)?;
    if differential_decode_indices(&sv, table) != *iv {
        return Err(SimError::Numeric(
            "decoded index vector differs from the encoded one".into(),
        ));
    }
    if pair.0.model() != pair.1.model() {
        return Err(SimError::Numeric("encoder and decoder models diverged".into()));
    }
    Ok(msg.bit_count())
}

impl Lane {
    fn new(sh: &Shared, s: usize, g: usize) -> SimResult<Self> {
        let mode = sh.scenarios[s].mode;
        let warm = sh.warm[s][g].clone();
        Ok(Lane {
            adaptive: session_pair(sh, mode)?,
            frozen: (
                CodecSession::frozen(Role::Encoder, sh.table.clone(), warm.clone())?,
                CodecSession::frozen(Role::Decoder, sh.table.clone(), warm)?,
            ),
            observed: ProbabilityModel::new(mode, sh.codebook.size()),
            bits: Vec::with_capacity(sh.symbols),
            frozen_bits: 0,
            switches: SwitchCount::default(),
        })
    }

    fn step(&mut self, sh: &Shared, ch: &ChannelTensor, cfg: &ClusterConfig) -> SimResult<()> {
        let iv = select_all_clusters(ch, cfg, &sh.codebook)?;
        self.bits.push(exchange(&mut self.adaptive, &iv, &sh.table)? as u64);
        self.frozen_bits += exchange(&mut self.frozen, &iv, &sh.table)? as u64;
        self.observed
            .update(&differential_encode_indices(&iv, &sh.table), &sh.table);
        if sh.switching {
            self.switches += count_eigen_switches(ch, cfg)?;
        }
        Ok(())
    }
}

fn warm_up(sh: &Shared, s: usize, warmup: usize) -> SimResult<Vec<ProbabilityModel>> {
    let sc = &sh.scenarios[s];
    let mut models: Vec<_> = sh
        .clusters
        .iter()
        .map(|_| ProbabilityModel::new(sc.mode, sh.codebook.size()))
        .collect();
    let mut rng = stream_rng(sh.seed, WARMUP_STREAM);
    for _ in 0..warmup {
        let ch = sc.sampler.sample(&mut rng);
        for (cfg, model) in sh.clusters.iter().zip(&mut models) {
            let iv = select_all_clusters(&ch, cfg, &sh.codebook)?;
            model.update(&differential_encode_indices(&iv, &sh.table), &sh.table);
        }
    }
    Ok(models)
}

fn run_trial(sh: &Shared, trial: usize) -> SimResult<Vec<Vec<Lane>>> {
    let mut out = Vec::with_capacity(sh.scenarios.len());
    for (s, sc) in sh.scenarios.iter().enumerate() {
        let mut lanes = (0..sh.clusters.len())
            .map(|g| Lane::new(sh, s, g))
            .collect::<SimResult<Vec<_>>>()?;
        let mut rng: SimRng = stream_rng(sh.seed, trial as u64 + 1);
        for _ in 0..sh.symbols {
            let ch = sc.sampler.sample(&mut rng);
            for (lane, cfg) in lanes.iter_mut().zip(&sh.clusters) {
                lane.step(sh, &ch, cfg)?;
            }
        }
        out.push(lanes);
    }
    Ok(out)
}

/// Entropy of the empirical transition distribution of each context, plus
/// the raw header, in bits per symbol.
fn empirical_entropy(model: &ProbabilityModel, header_bits: u32, symbols: u64) -> f64 {
    let mut bits = 0.0;
    for ctx in 0..model.contexts() {
        let total = model.total(ctx) as f64;
        for &c in model.counts(ctx) {
            if c > 0 {
                bits -= c as f64 * (c as f64 / total).log2();
            }
        }
    }
    header_bits as f64 + bits / symbols as f64
}

fn pooled_frequencies(model: &ProbabilityModel) -> Vec<f64> {
    let mut counts = vec![0u64; model.size()];
    for ctx in 0..model.contexts() {
        counts.iter_mut().zip(model.counts(ctx)).for_each(|(a, b)| *a += b);
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Vec::new();
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Runs every scenario of `cfg` with `codebook`. Deterministic for a fixed
/// config, independent of the thread count.
pub fn run_experiment(cfg: &ExperimentConfig, codebook: Codebook) -> SimResult<ExperimentReport> {
    cfg.validate()?;
    check_codebook(cfg, &codebook)?;
    let e = &cfg.experiment;
    if e.symbols < MIN_CONVERGENCE_SYMBOLS {
        log::warn!(
            "T = {} symbols is below {MIN_CONVERGENCE_SYMBOLS}; steady-state estimates are unreliable",
            e.symbols
        );
    }
    let table = Arc::new(build_transition_table(&codebook));
    let clusters = e
        .cluster_sizes
        .iter()
        .map(|&g| ClusterConfig::new(e.subcarriers, g))
        .collect::<grassfeed_core::Result<Vec<_>>>()?;
    let mut scenarios = Vec::with_capacity(cfg.scenarios.len());
    let mut specs = Vec::with_capacity(cfg.scenarios.len());
    for s in &cfg.scenarios {
        let spec = cfg.correlation_spec(s)?;
        scenarios.push(Scenario {
            mode: s.mode.into(),
            sampler: ChannelSampler::new(&spec)?,
        });
        specs.push(spec);
    }
    let mut sh = Shared {
        codebook,
        table,
        clusters,
        scenarios,
        warm: Vec::new(),
        symbols: e.symbols,
        seed: e.seed,
        rebuild: e.rebuild_interval,
        switching: e.rx >= 2,
    };
    sh.warm = (0..sh.scenarios.len())
        .into_par_iter()
        .map(|s| warm_up(&sh, s, e.warmup))
        .collect::<SimResult<_>>()?;

    let trials = (0..e.trials)
        .into_par_iter()
        .map(|k| run_trial(&sh, k))
        .collect::<SimResult<Vec<_>>>()?;

    let mut totals: Vec<Vec<LaneTotals>> = sh
        .scenarios
        .iter()
        .map(|_| sh.clusters.iter().map(|_| LaneTotals::default()).collect())
        .collect();
    for trial in trials {
        for (s, lanes) in trial.into_iter().enumerate() {
            for (g, lane) in lanes.into_iter().enumerate() {
                totals[s][g].add(lane);
            }
        }
    }

    let n = sh.codebook.size();
    let header_bits = n.trailing_zeros();
    let runs = (e.symbols * e.trials) as u64;
    let scenarios = cfg
        .scenarios
        .iter()
        .zip(totals)
        .zip(&specs)
        .enumerate()
        .map(|(s, ((sc, lanes), spec))| ScenarioReport {
            name: sc.name.clone(),
            mode: sc.mode,
            adjacent_correlation: match spec.freq {
                FreqProfile::ExponentialPdp { adjacent_corr } => Some(adjacent_corr),
                FreqProfile::Explicit(_) => None,
            },
            spatial: !matches!(spec.spatial, grassfeed_core::channel::SpatialProfile::None),
            rows: lanes
                .into_iter()
                .zip(&sh.clusters)
                .enumerate()
                .map(|(g, (t, cc))| {
                    let observed = t.observed.expect("at least one trial");
                    let adaptive_total: u64 = t.bits.iter().sum();
                    let convergence: Vec<f64> = t.bits.iter().map(|&b| b as f64 / e.trials as f64).collect();
                    ClusterReport {
                        cluster_size: cc.cluster_size(),
                        clusters: cc.clusters(),
                        baseline_bits: cc.clusters() as u64 * header_bits as u64,
                        huffman_bits_frozen: t.frozen_bits as f64 / runs as f64,
                        huffman_bits_adaptive: adaptive_total as f64 / runs as f64,
                        entropy: empirical_entropy(&observed, header_bits, runs),
                        frozen_total_bits: t.frozen_bits,
                        adaptive_total_bits: adaptive_total,
                        symbols: runs,
                        switching_rate: sh.switching.then(|| t.switches.rate()),
                        transition_probabilities: pooled_frequencies(&sh.warm[s][g]),
                        steady_state: steady_state(&convergence),
                        convergence,
                    }
                })
                .collect(),
        })
        .collect();

    let cb = &sh.codebook;
    Ok(ExperimentReport {
        config: cfg.clone(),
        codebook: CodebookSummary {
            dim: cb.dim(),
            size: cb.size(),
            min_distance: cb.min_distance(),
            property1_deviation: property1_deviation(&sh.table),
            source: describe_source(cb.source()),
        },
        scenarios,
    })
}

fn describe_source(src: &CodebookSource) -> String {
    match src {
        CodebookSource::Inline => "inline".into(),
        CodebookSource::File(p) => format!("file {p}"),
        CodebookSource::Generated {
            seed,
            restarts,
            iterations,
        } => format!("generated seed={seed} restarts={restarts} iterations={iterations}"),
    }
}

/// `(t, mean bits)` pairs of one report row, `t` starting at 1.
pub fn convergence_curve(row: &ClusterReport) -> Vec<(usize, f64)> {
    row.convergence.iter().enumerate().map(|(i, &b)| (i + 1, b)).collect()
}

/// First 1-based `t` whose trailing mean over [`TRAILING_WINDOW`] symbols
/// lies within [`STEADY_STATE_TOLERANCE`] of the mean of the last
/// [`FINAL_WINDOW`] symbols. Short series use what they have.
pub fn steady_state(curve: &[f64]) -> Option<usize> {
    if curve.is_empty() {
        return None;
    }
    let mean = |w: &[f64]| w.iter().sum::<f64>() / w.len() as f64;
    let target = mean(&curve[curve.len().saturating_sub(FINAL_WINDOW)..]);
    let w = TRAILING_WINDOW.min(curve.len());
    (w..=curve.len()).find(|&t| (mean(&curve[t - w..t]) - target).abs() <= STEADY_STATE_TOLERANCE * target)
}
