//! Compares the sequential trial loop against the rayon-parallel one on a
//! mid-sized campaign. Array designs (the expensive coupling-matrix
//! quadrature) are prepared outside the timed region; the timed work is the
//! trial loop itself, which is what the `parallel` feature parallelizes.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use aeromimo::config::ScenarioConfig;
use aeromimo::montecarlo::PreparedCampaign;

fn campaign_config(n_trials: usize) -> ScenarioConfig {
    ScenarioConfig::from_toml_str(&format!(
        "n_trials = {n_trials}\n\
         n_ue_sweep = [4, 8]\n\
         [quadrature]\n\
         n_theta = 96\n\
         n_phi = 192\n"
    ))
    .expect("bench config is valid")
}

fn bench_campaign(c: &mut Criterion) {
    let campaign = PreparedCampaign::new(&campaign_config(128)).expect("prepare");
    let mut group = c.benchmark_group("campaign_128_trials_n4_n8");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(campaign.run_sequential().expect("sequential run")))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(campaign.run_parallel().expect("parallel run")))
    });
    group.finish();
}

fn bench_single_trial(c: &mut Criterion) {
    let campaign = PreparedCampaign::new(&campaign_config(1)).expect("prepare");
    c.bench_function("trial_n8", |b| {
        let mut t = 0usize;
        b.iter(|| {
            t += 1;
            black_box(campaign.run_trial(8, t).expect("trial"))
        })
    });
}

criterion_group!(benches, bench_campaign, bench_single_trial);
criterion_main!(benches);
