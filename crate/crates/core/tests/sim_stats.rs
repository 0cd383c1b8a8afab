//! Statistical checks of the simulator against known distributions and the
//! analytic model. Seeds are fixed, so these are deterministic.

use lrfhss_core::analytic::evaluate;
use lrfhss_core::sim::{generate_traffic, simulate};
use lrfhss_core::{AllocationDistribution, NetworkConfig, SetupCatalog};

#[test]
fn attempt_counts_follow_the_poisson_oracle() {
    // One device over 3600 s at rate 1/900 attempts 4 transmissions on
    // average (variance 4). The mean over 1000 seeds must land within three
    // standard errors.
    let cfg = NetworkConfig::new(1);
    let cat = SetupCatalog::default();
    let dr8 = AllocationDistribution::dr8(&cat).unwrap();
    let runs = 1000;
    let total: u64 = (0..runs)
        .map(|seed| generate_traffic(&cfg, &cat, &dr8, seed).unwrap().len() as u64)
        .sum();
    let mean = total as f64 / runs as f64;
    let standard_error = (4.0f64 / runs as f64).sqrt();
    assert!(
        (mean - 4.0).abs() <= 3.0 * standard_error,
        "mean attempts {mean} outside 4 +/- {}",
        3.0 * standard_error
    );
}

#[test]
fn setup_sampling_matches_the_allocation() {
    // >= 1e5 transmissions; per-setup frequency within three binomial
    // standard deviations of its weight.
    let cfg = NetworkConfig::new(30_000);
    let cat = SetupCatalog::default();
    let weights = [0.1, 0.2, 0.3, 0.2, 0.1, 0.1];
    let delta = AllocationDistribution::new(weights.to_vec()).unwrap();
    let traffic = generate_traffic(&cfg, &cat, &delta, 2024).unwrap();
    let n = traffic.len() as f64;
    assert!(n >= 1e5, "need at least 1e5 transmissions, got {n}");
    let mut counts = [0u64; 6];
    for tx in &traffic {
        counts[tx.setup_index] += 1;
    }
    for (k, (&count, &weight)) in counts.iter().zip(&weights).enumerate() {
        let freq = count as f64 / n;
        let bound = 3.0 * (weight * (1.0 - weight) / n).sqrt();
        assert!(
            (freq - weight).abs() <= bound,
            "setup {k}: frequency {freq} vs weight {weight} (bound {bound})"
        );
    }
}

#[test]
fn congestion_is_monotone_in_device_count() {
    // Seed-averaged empirical success at twice the devices never improves.
    let cat = SetupCatalog::default();
    let dr8 = AllocationDistribution::dr8(&cat).unwrap();
    let mean_ps = |devices: u32| {
        let cfg = NetworkConfig::new(devices);
        let total: f64 = (1..=10)
            .map(|seed| {
                simulate(&cfg, &cat, &dr8, seed)
                    .unwrap()
                    .empirical_ps
                    .expect("traffic present")
            })
            .sum();
        total / 10.0
    };
    let at_20k = mean_ps(20_000);
    let at_40k = mean_ps(40_000);
    assert!(
        at_40k <= at_20k,
        "empirical Ps rose with congestion: {at_20k} -> {at_40k}"
    );
}

#[test]
fn low_load_simulation_matches_the_analytic_model() {
    // Where collisions are rare the independence assumption is near-exact:
    // seed-averaged empirical Ps within 0.02 of the closed form.
    let cat = SetupCatalog::default();
    let dr8 = AllocationDistribution::dr8(&cat).unwrap();
    for devices in [400u32, 2_000] {
        let cfg = NetworkConfig::new(devices);
        let analytic = evaluate(&cfg, &cat, &dr8).unwrap().packet_success;
        let mean: f64 = (1..=10)
            .map(|seed| {
                simulate(&cfg, &cat, &dr8, seed)
                    .unwrap()
                    .empirical_ps
                    .expect("traffic present")
            })
            .sum::<f64>()
            / 10.0;
        assert!(
            (mean - analytic).abs() <= 0.02,
            "M={devices}: empirical {mean} vs analytic {analytic}"
        );
    }
}
