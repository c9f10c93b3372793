//! Monte-Carlo engine for the exact multi-hop channel. Samples per-hop
//! gains, forms the exact end-to-end SIR and its min-based bounds, and
//! estimates outage probabilities with binomial error bars.
//!
//! Determinism contract: trials are partitioned into fixed-size chunks and
//! every chunk draws from its own counter-indexed substream of a keyed
//! ChaCha12 generator. Chunk results are reduced in chunk order, so a given
//! (seed, chunk, trials, config) produces bit-identical estimates for any
//! number of worker threads.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::analysis::{self, OutageQuery};
use crate::channel::{sample_power_gain, SystemConfig};
use crate::error::{Error, Result};
use crate::experiment::db_to_linear;
use crate::sir;

/// Trial count, base seed and substream chunk size of one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Trials per deterministic substream.
    pub chunk: u64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, chunk: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if chunk == 0 || chunk > trials {
            return Err(Error::InvalidParameter(format!(
                "chunk must be in [1, trials]; got chunk {chunk} with {trials} trials"
            )));
        }
        Ok(Self { trials, seed, chunk })
    }

    fn num_chunks(&self) -> u64 {
        self.trials.div_ceil(self.chunk)
    }

    fn chunk_len(&self, idx: u64) -> u64 {
        let start = idx * self.chunk;
        self.chunk.min(self.trials - start)
    }
}

/// A binomial estimate with its standard error sqrt(p(1−p)/n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl McEstimate {
    fn from_events(events: u64, trials: u64) -> Self {
        let mean = events as f64 / trials as f64;
        Self {
            mean,
            stderr: (mean * (1.0 - mean) / trials as f64).sqrt(),
            trials,
        }
    }
}

/// One sampled realization: exact end-to-end SIR and its two bounds.
/// `lower` is `upper / K` exactly and the SIR always lies between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E2eSample {
    pub e2e: f64,
    pub upper: f64,
    pub lower: f64,
}

/// SplitMix64 finalizer over (base, tags): decorrelated sub-seeds for
/// per-point and per-series simulations.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut state = base;
    for &t in tags {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(t);
        state = splitmix64(state);
    }
    splitmix64(state)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Expand the 64-bit seed into a 256-bit key, then select the chunk's
/// dedicated stream of the keyed generator.
fn chunk_rng(seed: u64, chunk_idx: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    let mut word = seed;
    for slot in key.chunks_exact_mut(8) {
        word = splitmix64(word);
        slot.copy_from_slice(&word.to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(chunk_idx);
    rng
}

fn effective_workers(workers: usize, chunks: u64) -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    let w = if workers == 0 { hw } else { workers };
    w.min(chunks as usize).max(1)
}

/// Run `job` over all chunks on `workers` threads and return the per-chunk
/// results in chunk order.
fn run_chunks<T, F>(mc: &McConfig, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha12Rng, u64) -> T + Sync,
{
    let chunks = mc.num_chunks();
    let slots: Vec<Mutex<Option<T>>> = (0..chunks).map(|_| Mutex::new(None)).collect();
    let next = AtomicU64::new(0);
    std::thread::scope(|scope| {
        for _ in 0..effective_workers(workers, chunks) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= chunks {
                    break;
                }
                let mut rng = chunk_rng(mc.seed, idx);
                let out = job(&mut rng, mc.chunk_len(idx));
                *slots[idx as usize].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("chunk result"))
        .collect()
}

/// Draw the per-hop SIRs of one realization. A zero interferer gain is a
/// probability-zero degenerate draw and is rejected and redrawn, which
/// cannot bias a continuous distribution.
fn draw_hop_sirs(config: &SystemConfig, rng: &mut ChaCha12Rng, out: &mut Vec<f64>) {
    out.clear();
    for hop in &config.hops {
        let desired = sample_power_gain(hop.alpha, hop.snr_desired, rng);
        let interferer = loop {
            let g = sample_power_gain(hop.beta, hop.inr, rng);
            if g > 0.0 {
                break g;
            }
        };
        out.push(sir::hop_sir(config.power, desired, interferer).expect("positive interferer"));
    }
}

/// Empirical outage of the exact end-to-end SIR at γ_th.
pub fn simulate_outage(
    config: &SystemConfig,
    query: &OutageQuery,
    mc: &McConfig,
    workers: usize,
) -> McEstimate {
    let counts = run_chunks(mc, workers, |rng, len| {
        let mut sirs = Vec::with_capacity(config.num_hops());
        let mut events = 0u64;
        for _ in 0..len {
            draw_hop_sirs(config, rng, &mut sirs);
            let e2e = sir::end_to_end_sir(&sirs).expect("nonempty chain");
            if e2e < query.threshold {
                events += 1;
            }
        }
        events
    });
    McEstimate::from_events(counts.iter().sum(), mc.trials)
}

/// Empirical CDFs of both bounds at γ_th, from the same draws: the upper
/// bound min γᵢ and the lower bound min γᵢ / K.
pub fn simulate_bound_outages(
    config: &SystemConfig,
    query: &OutageQuery,
    mc: &McConfig,
    workers: usize,
) -> (McEstimate, McEstimate) {
    let k = config.num_hops() as f64;
    let counts = run_chunks(mc, workers, |rng, len| {
        let mut sirs = Vec::with_capacity(config.num_hops());
        let mut upper_events = 0u64;
        let mut lower_events = 0u64;
        for _ in 0..len {
            draw_hop_sirs(config, rng, &mut sirs);
            let bounds = sir::sir_bounds(&sirs).expect("nonempty chain");
            if bounds.upper < query.threshold {
                upper_events += 1;
            }
            if bounds.upper / k < query.threshold {
                lower_events += 1;
            }
        }
        (upper_events, lower_events)
    });
    let upper_total: u64 = counts.iter().map(|c| c.0).sum();
    let lower_total: u64 = counts.iter().map(|c| c.1).sum();
    (
        McEstimate::from_events(upper_total, mc.trials),
        McEstimate::from_events(lower_total, mc.trials),
    )
}

/// Per-trial (end-to-end, upper bound, lower bound) triples, concatenated
/// in chunk order.
pub fn sample_e2e_batch(config: &SystemConfig, mc: &McConfig, workers: usize) -> Vec<E2eSample> {
    let batches = run_chunks(mc, workers, |rng, len| {
        let mut sirs = Vec::with_capacity(config.num_hops());
        let mut samples = Vec::with_capacity(len as usize);
        for _ in 0..len {
            draw_hop_sirs(config, rng, &mut sirs);
            let e2e = sir::end_to_end_sir(&sirs).expect("nonempty chain");
            let bounds = sir::sir_bounds(&sirs).expect("nonempty chain");
            samples.push(E2eSample { e2e, upper: bounds.upper, lower: bounds.lower });
        }
        samples
    });
    batches.into_iter().flatten().collect()
}

/// Least-squares slope of log10(outage) against log10(γ̄_D) over a set of
/// SNR points, each simulated with a sub-seed derived from its index. At
/// high SNR the slope approaches −α.
///
/// Every point's desired-channel SNR is applied uniformly across hops, and
/// every point must have a closed-form expected outage of at least
/// 100/trials; rarer events would leave the estimator statistically
/// meaningless.
pub fn estimate_diversity_slope(
    config: &SystemConfig,
    query: &OutageQuery,
    snr_points_db: &[f64],
    mc: &McConfig,
    workers: usize,
) -> Result<f64> {
    if snr_points_db.len() < 2 {
        return Err(Error::Unreliable("need at least two SNR points".into()));
    }
    if snr_points_db.iter().any(|db| !db.is_finite()) {
        return Err(Error::InvalidParameter("SNR points must be finite".into()));
    }
    let spread = snr_points_db
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if spread.0 == spread.1 {
        return Err(Error::Unreliable(
            "SNR points are all identical; the fit is degenerate".into(),
        ));
    }

    let floor = 100.0 / mc.trials as f64;
    let mut log_snr = Vec::with_capacity(snr_points_db.len());
    let mut log_outage = Vec::with_capacity(snr_points_db.len());
    for (i, &db) in snr_points_db.iter().enumerate() {
        let mut point_config = config.clone();
        let snr = db_to_linear(db);
        for hop in &mut point_config.hops {
            hop.snr_desired = snr;
        }
        let expected = analysis::upper_bound_cdf_general(&point_config, query.threshold)?;
        if expected < floor {
            return Err(Error::Unreliable(format!(
                "expected outage {expected:.3e} at {db} dB is below the floor {floor:.3e}"
            )));
        }
        let sub = McConfig { seed: derive_seed(mc.seed, &[i as u64]), ..*mc };
        let est = simulate_outage(&point_config, query, &sub, workers);
        if est.mean <= 0.0 {
            return Err(Error::Unreliable(format!("no outage events at {db} dB")));
        }
        log_snr.push(db / 10.0); // log10 of the linear SNR
        log_outage.push(est.mean.log10());
    }

    let n = log_snr.len() as f64;
    let mean_x = log_snr.iter().sum::<f64>() / n;
    let mean_y = log_outage.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in log_snr.iter().zip(&log_outage) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    Ok(sxy / sxx)
}
