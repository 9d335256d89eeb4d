//! Monte-Carlo frame-error-rate estimation over BSC and binary-input AWGN
//! channels.
//!
//! Simulation transmits the all-zero codeword, which is representative for
//! linear codes under belief propagation because both channels are output
//! symmetric. The technique removes the need for an encoder but bars any
//! extension to asymmetric channels.
//!
//! Every frame draws its noise from an RNG seeded by `seed ^ frame_index`,
//! so aggregates do not depend on execution order or worker count. A frame
//! counts as an error when the decoder fails to converge or converges to a
//! word other than the transmitted all-zero codeword (miscorrection).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::decoder::{awgn_llr, bsc_llr, decode, LlrVector};
use crate::error::{Error, Result};
use crate::graph::TannerGraph;

/// Default iteration cap for the decoder during simulation.
pub const DEFAULT_MAX_ITERATIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Bsc,
    Awgn,
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelKind::Bsc => write!(f, "bsc"),
            ChannelKind::Awgn => write!(f, "awgn"),
        }
    }
}

/// How an AWGN signal-to-noise parameter is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrConvention {
    /// Energy per information bit: sigma^2 = 1 / (2 R 10^(dB/10)).
    EbN0,
    /// Energy per channel symbol: sigma^2 = 1 / (2 * 10^(dB/10)).
    EsN0,
}

/// A single operating point of a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    /// Crossover probability for BSC, SNR in dB for AWGN.
    pub parameter: f64,
    /// Code rate, needed to map Eb/N0 to a noise deviation.
    pub code_rate: f64,
    pub snr_convention: SnrConvention,
}

impl ChannelSpec {
    pub fn bsc(epsilon: f64) -> Self {
        Self {
            kind: ChannelKind::Bsc,
            parameter: epsilon,
            code_rate: 0.0,
            snr_convention: SnrConvention::EbN0,
        }
    }

    pub fn awgn(snr_db: f64, code_rate: f64, snr_convention: SnrConvention) -> Self {
        Self {
            kind: ChannelKind::Awgn,
            parameter: snr_db,
            code_rate,
            snr_convention,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ChannelKind::Bsc => {
                if self.parameter.is_nan() || self.parameter <= 0.0 || self.parameter >= 0.5 {
                    return Err(Error::Validation(format!(
                        "BSC crossover probability must lie in (0, 0.5), got {}",
                        self.parameter
                    )));
                }
            }
            ChannelKind::Awgn => {
                self.noise_sigma()?;
            }
        }
        Ok(())
    }

    /// Noise standard deviation for the AWGN operating point.
    pub fn noise_sigma(&self) -> Result<f64> {
        if self.kind != ChannelKind::Awgn {
            return Err(Error::Validation(
                "noise sigma is only defined for AWGN channels".into(),
            ));
        }
        let snr_linear = 10f64.powf(self.parameter / 10.0);
        let variance = match self.snr_convention {
            SnrConvention::EbN0 => {
                if !(self.code_rate > 0.0 && self.code_rate < 1.0) {
                    return Err(Error::Validation(format!(
                        "Eb/N0 conversion requires a code rate in (0, 1), got {}",
                        self.code_rate
                    )));
                }
                1.0 / (2.0 * self.code_rate * snr_linear)
            }
            SnrConvention::EsN0 => 1.0 / (2.0 * snr_linear),
        };
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::Validation(format!(
                "noise variance {variance} out of range"
            )));
        }
        Ok(variance.sqrt())
    }
}

/// Halting rule for one simulation point: whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_frame_errors: usize,
    pub max_frames: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frame_errors: 100,
            max_frames: 1_000_000,
        }
    }
}

/// Estimated frame error rate at one channel point.
#[derive(Debug, Clone, PartialEq)]
pub struct FerPoint {
    pub channel: ChannelSpec,
    pub frames: usize,
    pub frame_errors: usize,
    pub fer: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub mean_iterations: f64,
}

/// Simulates transmitting the all-zero codeword over the channel once,
/// returning the channel LLRs seen by the decoder.
pub fn transmit_all_zero(
    channel: &ChannelSpec,
    n: usize,
    rng: &mut impl Rng,
) -> Result<LlrVector> {
    channel.validate()?;
    match channel.kind {
        ChannelKind::Bsc => {
            let epsilon = channel.parameter;
            let received: Vec<u8> = (0..n)
                .map(|_| u8::from(rng.random_bool(epsilon)))
                .collect();
            bsc_llr(&received, epsilon)
        }
        ChannelKind::Awgn => {
            let sigma = channel.noise_sigma()?;
            let received: Vec<f64> = (0..n)
                .map(|_| 1.0 + sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            awgn_llr(&received, sigma)
        }
    }
}

/// 95% Wilson score interval for `errors` successes in `trials`.
pub fn wilson_interval(errors: usize, trials: usize) -> (f64, f64) {
    assert!(trials > 0, "Wilson interval needs at least one trial");
    let z = 1.96f64;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

// one frame: transmit, decode, classify
fn run_frame(
    graph: &TannerGraph,
    channel: &ChannelSpec,
    max_iterations: usize,
    seed: u64,
    frame_index: usize,
) -> (bool, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ frame_index as u64);
    let llr = transmit_all_zero(channel, graph.symbol_count(), &mut rng)
        .expect("channel validated before the frame loop");
    let result =
        decode(graph, &llr, max_iterations).expect("LLR length matches the graph");
    let error = !result.syndrome_zero || result.hard_decision.iter().any(|&b| b != 0);
    (error, result.iterations_used)
}

/// Estimates the FER of one code at one channel point.
///
/// Frames are evaluated in deterministic chunks; the stop rule is applied to
/// the sequential prefix, so the estimate does not depend on how many worker
/// threads evaluate the chunks.
pub fn run_point(
    graph: &TannerGraph,
    channel: &ChannelSpec,
    stop: &StopRule,
    seed: u64,
    max_iterations: usize,
) -> Result<FerPoint> {
    channel.validate()?;
    if stop.max_frames == 0 {
        return Err(Error::Validation("stop rule allows zero frames".into()));
    }
    const CHUNK: usize = 256;
    let mut frames = 0usize;
    let mut frame_errors = 0usize;
    let mut iteration_sum = 0usize;
    'outer: while frames < stop.max_frames {
        let begin = frames;
        let end = (begin + CHUNK).min(stop.max_frames);
        let results: Vec<(bool, usize)> = (begin..end)
            .into_par_iter()
            .map(|idx| run_frame(graph, channel, max_iterations, seed, idx))
            .collect();
        for (error, iterations) in results {
            frames += 1;
            iteration_sum += iterations;
            if error {
                frame_errors += 1;
                if frame_errors >= stop.min_frame_errors {
                    break 'outer;
                }
            }
        }
    }
    let fer = frame_errors as f64 / frames as f64;
    let (ci95_low, ci95_high) = wilson_interval(frame_errors, frames);
    Ok(FerPoint {
        channel: *channel,
        frames,
        frame_errors,
        fer,
        ci95_low,
        ci95_high,
        mean_iterations: iteration_sum as f64 / frames as f64,
    })
}

/// One labeled row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub label: String,
    pub point: FerPoint,
    pub seed: u64,
}

/// Seed for one (code, point) cell, derived from the master seed so that it
/// is stable across runs, row order and worker counts.
pub fn derive_point_seed(master_seed: u64, label: &str, channel: &ChannelSpec) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update([match channel.kind {
        ChannelKind::Bsc => 0u8,
        ChannelKind::Awgn => 1u8,
    }]);
    hasher.update(channel.parameter.to_bits().to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is long enough"))
}

/// Evaluates the full cross product of codes and channel points.
pub fn sweep(
    codes: &[(String, &TannerGraph)],
    grid: &[ChannelSpec],
    stop: &StopRule,
    master_seed: u64,
    max_iterations: usize,
) -> Result<Vec<SweepRow>> {
    if let Some((first, rest)) = codes.split_first() {
        for (label, graph) in rest {
            if graph.symbol_count() != first.1.symbol_count()
                || graph.check_count() != first.1.check_count()
            {
                return Err(Error::Validation(format!(
                    "code {label:?} has different dimensions than {:?}; \
                     a sweep compares codes of equal length and rate",
                    first.0
                )));
            }
        }
    }
    let mut rows = Vec::with_capacity(codes.len() * grid.len());
    for (label, graph) in codes {
        for channel in grid {
            let seed = derive_point_seed(master_seed, label, channel);
            let point = run_point(graph, channel, stop, seed, max_iterations)?;
            rows.push(SweepRow {
                label: label.clone(),
                point,
                seed,
            });
        }
    }
    Ok(rows)
}

/// Formats a real with six significant digits, locale independent.
pub fn format_sig6(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if !(-5..7).contains(&magnitude) {
        return format!("{value:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

/// Renders sweep rows as CSV with a fixed header and deterministic order.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "label,channel_kind,parameter,frames,frame_errors,fer,ci95_low,ci95_high,mean_iterations,seed\n",
    );
    for row in rows {
        let p = &row.point;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.label,
            p.channel.kind,
            format_sig6(p.channel.parameter),
            p.frames,
            p.frame_errors,
            format_sig6(p.fer),
            format_sig6(p.ci95_low),
            format_sig6(p.ci95_high),
            format_sig6(p.mean_iterations),
            row.seed
        ));
    }
    out
}
