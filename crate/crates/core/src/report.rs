//! Machine-readable output tables and the run manifest.
//!
//! Tables are comma-delimited with a header row and a fixed column order.
//! Floats are written with Rust's shortest round-trip formatting, so rows
//! parse back to exactly the values that produced them and identical
//! campaigns render byte-identical tables.

use crate::config::ScenarioConfig;
use crate::montecarlo::CampaignResult;

pub const TRIALS_HEADER: &str = "n_ue,trial,user_index,combiner,sinr_db,rate_bps,range_m,theta_deg";
pub const SUMMARY_HEADER: &str = "n_ue,combiner,mean_user_rate_bps,stderr,mean_sum_rate_bps";

/// The three artifacts a run produces.
#[derive(Debug, Clone)]
pub struct OutputBundle {
    pub trials_table: String,
    pub summary_table: String,
    pub run_manifest: String,
}

/// One row per (trial, user, combiner): SINR in dB, rate in bits/s, range
/// in meters, polar angle in degrees.
pub fn render_trials_table(result: &CampaignResult) -> String {
    let mut out = String::with_capacity(64 * result.trials.len() + 64);
    out.push_str(TRIALS_HEADER);
    out.push('\n');
    for trial in &result.trials {
        for user in 0..trial.n_ue {
            for c in &trial.combiners {
                let sinr_db = 10.0 * c.sinr_per_user[user].log10();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    trial.n_ue,
                    trial.trial_index,
                    user,
                    c.combiner.as_str(),
                    sinr_db,
                    c.rate_per_user_bps[user],
                    trial.ranges_m[user],
                    trial.thetas_rad[user].to_degrees(),
                ));
            }
        }
    }
    out
}

/// One row per (n_ue, combiner) in sweep order; `stderr` is the standard
/// error of the mean per-user rate.
pub fn render_summary_table(result: &CampaignResult) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for row in &result.aggregates {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n_ue,
            row.combiner.as_str(),
            row.mean_user_rate_bps,
            row.stderr_user_rate_bps,
            row.mean_sum_rate_bps,
        ));
    }
    out
}

/// TOML manifest with a `[run]` table (version, wall time, threads, config
/// digest) and the full normalized scenario under `[config]`. Feeding the
/// manifest back as a config reproduces the run bit-exactly; wall time is
/// informational only.
pub fn render_manifest(
    cfg: &ScenarioConfig,
    version: &str,
    threads: Option<usize>,
    wall_time_s: f64,
) -> String {
    let mut run = toml::Table::new();
    run.insert("version".into(), toml::Value::String(version.to_string()));
    run.insert(
        "config_digest".into(),
        toml::Value::String(format!("{:016x}", cfg.digest())),
    );
    if let Some(t) = threads {
        run.insert("threads".into(), toml::Value::Integer(t as i64));
    }
    run.insert("wall_time_s".into(), toml::Value::Float(wall_time_s));
    let config_table: toml::Table = cfg
        .to_normalized_toml()
        .parse()
        .expect("normalized config parses");
    let mut root = toml::Table::new();
    root.insert("run".into(), toml::Value::Table(run));
    root.insert("config".into(), toml::Value::Table(config_table));
    toml::to_string(&root).expect("manifest serialization cannot fail")
}

/// Renders all three artifacts for a finished campaign.
pub fn build_bundle(
    cfg: &ScenarioConfig,
    result: &CampaignResult,
    version: &str,
    threads: Option<usize>,
    wall_time_s: f64,
) -> OutputBundle {
    OutputBundle {
        trials_table: render_trials_table(result),
        summary_table: render_summary_table(result),
        run_manifest: render_manifest(cfg, version, threads, wall_time_s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::PreparedCampaign;

    fn tiny_result() -> (ScenarioConfig, CampaignResult) {
        let cfg = ScenarioConfig::from_toml_str(
            "n_trials = 3\nn_ue_sweep = [2]\nelement_pattern = \"isotropic\"\n\
             [quadrature]\nn_theta = 32\nn_phi = 64\n",
        )
        .unwrap();
        let result = PreparedCampaign::new(&cfg).unwrap().run_sequential().unwrap();
        (cfg, result)
    }

    #[test]
    fn tables_have_expected_shape() {
        let (_, result) = tiny_result();
        let trials = render_trials_table(&result);
        let mut lines = trials.lines();
        assert_eq!(lines.next().unwrap(), TRIALS_HEADER);
        // 3 trials x 2 users x 2 combiners.
        assert_eq!(lines.count(), 12);
        let summary = render_summary_table(&result);
        assert_eq!(summary.lines().count(), 1 + 2);
    }

    #[test]
    fn rows_round_trip_losslessly() {
        let (_, result) = tiny_result();
        let trials = render_trials_table(&result);
        for line in trials.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 8);
            for idx in [4usize, 5, 6, 7] {
                let v: f64 = fields[idx].parse().expect("numeric field parses");
                assert_eq!(format!("{v}"), fields[idx], "field {idx} not lossless");
            }
        }
    }

    #[test]
    fn identical_campaigns_render_identical_bytes() {
        let (cfg, result) = tiny_result();
        let again = PreparedCampaign::new(&cfg).unwrap().run_sequential().unwrap();
        assert_eq!(render_trials_table(&result), render_trials_table(&again));
        assert_eq!(render_summary_table(&result), render_summary_table(&again));
    }

    #[test]
    fn manifest_embeds_the_scenario() {
        let (cfg, _) = tiny_result();
        let manifest = render_manifest(&cfg, "1.2.3", Some(8), 0.25);
        assert!(manifest.contains("[run]"));
        assert!(manifest.contains("version = \"1.2.3\""));
        assert!(manifest.contains("[config"));
        let back = ScenarioConfig::from_toml_str(&manifest).unwrap();
        assert_eq!(back, cfg);
    }
}
