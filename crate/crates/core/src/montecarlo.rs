//! Campaign orchestration: per-trial RNG streams, trial execution, and
//! deterministic aggregation over the user-count sweep.
//!
//! Trials are embarrassingly parallel. Each trial's randomness comes from
//! its own counter-derived stream, and aggregation runs in `(n_ue, trial)`
//! order whatever the execution schedule, so serial and parallel campaigns
//! produce identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::antenna::ArrayDesign;
use crate::channel::build_uplink_channel;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{sample_placement, UePlacement};
use crate::propagation::noise_psd;
use crate::receiver::{
    achievable_rates, sinr_mmse, sinr_sdma, CombinerKind, LinkBudgetContext,
};

/// 64-bit finalizer (the splitmix64 output stage): bijective, avalanching.
fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Stateless stream derivation: trial `t` of user-count `n` draws from a
/// ChaCha12 stream seeded by chained `mix64` applications,
///
/// ```text
/// s1 = mix64(master_seed);  s2 = mix64(s1 ^ n);  s3 = mix64(s2 ^ t)
/// seed = [mix64(s3), mix64(mix64(s3)), ...] as 4 little-endian words
/// ```
///
/// so any trial's stream can be reconstructed without running the others.
pub fn trial_rng(master_seed: u64, n_ue: usize, trial_index: usize) -> ChaCha12Rng {
    let s = mix64(mix64(mix64(master_seed) ^ n_ue as u64) ^ trial_index as u64);
    let mut seed = [0u8; 32];
    let mut word = s;
    for chunk in seed.chunks_exact_mut(8) {
        word = mix64(word);
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}

/// One combiner's outcome within a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialCombinerOutput {
    pub combiner: CombinerKind,
    pub sinr_per_user: Vec<f64>,
    pub rate_per_user_bps: Vec<f64>,
    pub sum_rate_bps: f64,
}

/// Everything recorded about one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub n_ue: usize,
    pub trial_index: usize,
    /// Per-user range, m.
    pub ranges_m: Vec<f64>,
    /// Per-user polar angle from the AP boresight, radians.
    pub thetas_rad: Vec<f64>,
    /// Outcomes in the configured combiner order.
    pub combiners: Vec<TrialCombinerOutput>,
}

impl TrialResult {
    pub fn combiner(&self, kind: CombinerKind) -> Option<&TrialCombinerOutput> {
        self.combiners.iter().find(|c| c.combiner == kind)
    }
}

/// Mean/stderr summary for one `(n_ue, combiner)` cell of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub n_ue: usize,
    pub combiner: CombinerKind,
    pub mean_user_rate_bps: f64,
    pub stderr_user_rate_bps: f64,
    pub mean_sum_rate_bps: f64,
    pub stderr_sum_rate_bps: f64,
    pub n_trials: usize,
}

/// A full campaign: every trial, plus the per-cell aggregates in sweep
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub trials: Vec<TrialResult>,
    pub aggregates: Vec<AggregateRow>,
}

impl CampaignResult {
    pub fn aggregate(&self, n_ue: usize, kind: CombinerKind) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.n_ue == n_ue && a.combiner == kind)
    }
}

/// A campaign with its array designs (and thus coupling matrices) built
/// once up front; trials only read from it.
#[derive(Debug)]
pub struct PreparedCampaign {
    cfg: ScenarioConfig,
    ap_subarray: ArrayDesign,
    ue_array: ArrayDesign,
    budget: LinkBudgetContext,
    wavelength_m: f64,
    digest: u64,
}

impl PreparedCampaign {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let pattern = cfg.element_pattern.build(cfg.carrier_hz)?;
        let ap_subarray = ArrayDesign::new(cfg.ap_subarray, pattern.clone(), cfg.quadrature)?;
        let ue_array = ArrayDesign::new(cfg.ue_array, pattern, cfg.quadrature)?;
        let budget = LinkBudgetContext::new(
            cfg.p_tx_watts,
            cfg.bandwidth_hz,
            noise_psd(&cfg.atmosphere, &cfg.rx_noise),
        )?;
        Ok(Self {
            wavelength_m: cfg.carrier_wavelength_m(),
            digest: cfg.digest(),
            cfg: cfg.clone(),
            ap_subarray,
            ue_array,
            budget,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn ap_subarray(&self) -> &ArrayDesign {
        &self.ap_subarray
    }

    pub fn ue_array(&self) -> &ArrayDesign {
        &self.ue_array
    }

    pub fn budget(&self) -> &LinkBudgetContext {
        &self.budget
    }

    /// Runs one trial. Fully determined by the config, the user count, and
    /// the trial index.
    pub fn run_trial(&self, n_ue: usize, trial_index: usize) -> Result<TrialResult> {
        self.run_trial_inner(n_ue, trial_index).map_err(|e| {
            Error::Numerical(format!(
                "trial failed (config {:016x}, n_ue {}, trial {}): {e}",
                self.digest, n_ue, trial_index
            ))
        })
    }

    fn run_trial_inner(&self, n_ue: usize, trial_index: usize) -> Result<TrialResult> {
        let mut rng = trial_rng(self.cfg.master_seed, n_ue, trial_index);
        let placements: Vec<UePlacement> = (0..n_ue)
            .map(|_| sample_placement(&mut rng, &self.cfg.shell))
            .collect();
        let channel = build_uplink_channel(
            &placements,
            &self.ap_subarray,
            &self.ue_array,
            &self.cfg.atmosphere,
            self.wavelength_m,
            self.cfg.yaw,
            &mut rng,
        )?;
        let mut combiners = Vec::with_capacity(self.cfg.combiners.len());
        for kind in &self.cfg.combiners {
            let output = match kind {
                CombinerKind::Mmse => sinr_mmse(&channel, &self.budget)?,
                CombinerKind::Identity => sinr_sdma(&channel, &self.budget)?,
            };
            let (rate_per_user_bps, sum_rate_bps) =
                achievable_rates(&output.sinr_per_user, self.cfg.bandwidth_hz)?;
            combiners.push(TrialCombinerOutput {
                combiner: *kind,
                sinr_per_user: output.sinr_per_user,
                rate_per_user_bps,
                sum_rate_bps,
            });
        }
        Ok(TrialResult {
            n_ue,
            trial_index,
            ranges_m: placements.iter().map(|p| p.r_m).collect(),
            thetas_rad: placements.iter().map(|p| p.theta_rad).collect(),
            combiners,
        })
    }

    fn tasks(&self) -> Vec<(usize, usize)> {
        let mut tasks = Vec::with_capacity(self.cfg.n_ue_sweep.len() * self.cfg.n_trials);
        for &n_ue in &self.cfg.n_ue_sweep {
            for trial in 0..self.cfg.n_trials {
                tasks.push((n_ue, trial));
            }
        }
        tasks
    }

    /// Runs the whole sweep on a single thread.
    pub fn run_sequential(&self) -> Result<CampaignResult> {
        let trials = self
            .tasks()
            .into_iter()
            .map(|(n, t)| self.run_trial(n, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.aggregate(trials))
    }

    /// Runs the sweep on the current rayon thread pool. Trial order in the
    /// result is `(n_ue, trial)` regardless of scheduling.
    #[cfg(feature = "parallel")]
    pub fn run_parallel(&self) -> Result<CampaignResult> {
        let outcomes: Vec<Result<TrialResult>> = self
            .tasks()
            .into_par_iter()
            .map(|(n, t)| self.run_trial(n, t))
            .collect();
        let trials = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(self.aggregate(trials))
    }

    /// Runs the sweep: parallel when the `parallel` feature is enabled,
    /// sequential otherwise.
    pub fn run(&self) -> Result<CampaignResult> {
        #[cfg(feature = "parallel")]
        {
            self.run_parallel()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.run_sequential()
        }
    }

    /// Deterministic reduction over trials already ordered by
    /// `(n_ue, trial)`.
    fn aggregate(&self, trials: Vec<TrialResult>) -> CampaignResult {
        let mut aggregates = Vec::new();
        for &n_ue in &self.cfg.n_ue_sweep {
            let cell: Vec<&TrialResult> =
                trials.iter().filter(|t| t.n_ue == n_ue).collect();
            for &kind in &self.cfg.combiners {
                let sums: Vec<f64> = cell
                    .iter()
                    .filter_map(|t| t.combiner(kind))
                    .map(|c| c.sum_rate_bps)
                    .collect();
                let user_means: Vec<f64> =
                    sums.iter().map(|s| s / n_ue as f64).collect();
                aggregates.push(AggregateRow {
                    n_ue,
                    combiner: kind,
                    mean_user_rate_bps: mean(&user_means),
                    stderr_user_rate_bps: stderr(&user_means),
                    mean_sum_rate_bps: mean(&sums),
                    stderr_sum_rate_bps: stderr(&sums),
                    n_trials: sums.len(),
                });
            }
        }
        CampaignResult { trials, aggregates }
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample standard deviation over sqrt(n));
/// zero for fewer than two samples.
fn stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Prepares and runs a campaign from a validated config.
pub fn run_campaign(cfg: &ScenarioConfig) -> Result<CampaignResult> {
    PreparedCampaign::new(cfg)?.run()
}
