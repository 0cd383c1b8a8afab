//! Closed-form success-probability, goodput and energy-efficiency model.
//!
//! Collisions dominate decoding errors: an element (header replica or payload
//! fragment) is lost when another element lands on its channel inside its
//! vulnerability window. Headers and fragments contend network-wide, but a
//! transmission hops only within one frequency grid, so the element pressure
//! seen by any single element is the per-grid share of the network load.
//!
//! All operations are pure and reentrant; none hold shared mutable state.

use alloc::vec::Vec;

use crate::math;
use crate::model::{AllocationDistribution, CodeRate, NetworkConfig, SetupCatalog};
use crate::Error;

/// Traffic intensity derived from a scenario and an allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSummary {
    /// Mean header replicas per transmission across the allocation.
    pub mean_headers: f64,
    /// Mean payload fragments per transmission across the allocation.
    pub mean_fragments: f64,
    /// Network-wide header arrivals per second.
    pub header_rate_hz: f64,
    /// Network-wide fragment arrivals per second.
    pub fragment_rate_hz: f64,
    /// Mean elements arriving in a header's vulnerability window on its own
    /// grid, including itself; clamped at 1.
    pub header_vulnerable_count: f64,
    /// Same for a fragment's vulnerability window.
    pub fragment_vulnerable_count: f64,
}

/// Per-setup intermediates of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupReport {
    /// Payload fragments sent by this setup.
    pub fragments: u32,
    /// Fragments that must survive for the payload to decode.
    pub decode_threshold: u32,
    /// Probability at least one header replica survives.
    pub header_success: f64,
    /// Probability at least `decode_threshold` fragments survive.
    pub payload_success: f64,
}

/// Full analytic evaluation of one (scenario, catalog, allocation) triple.
///
/// Setups with zero weight still report their per-setup probabilities; they
/// simply contribute nothing to `packet_success`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticReport {
    pub per_setup: Vec<SetupReport>,
    /// Probability a single payload fragment survives (setup-independent).
    pub fragment_success: f64,
    /// Packet success probability, allocation-weighted over setups.
    pub packet_success: f64,
    /// Successfully received payload bytes per second, network-wide.
    pub goodput_bps: f64,
    /// Mean transmit power drawn by the network, joules per second.
    pub avg_power_w: f64,
    /// Goodput per unit power, bytes per joule.
    pub energy_eff_bpj: f64,
    pub loads: LoadSummary,
}

/// Payload fragments produced by `payload_bytes` at `code_rate`:
/// `ceil((payload_bytes + 3) / (6 * code_rate))`, computed in exact integer
/// arithmetic.
pub fn fragments_for(payload_bytes: u32, code_rate: CodeRate) -> Result<u32, Error> {
    if payload_bytes == 0 {
        return Err(Error::ZeroPayload);
    }
    let numerator = (payload_bytes as u64 + 3) * code_rate.denom() as u64;
    let denominator = 6 * code_rate.numer() as u64;
    Ok(numerator.div_ceil(denominator) as u32)
}

/// Fragments that must survive to decode: `ceil(fragments * code_rate)`.
/// Always lies in `1..=fragments`.
pub fn decode_threshold(fragments: u32, code_rate: CodeRate) -> Result<u32, Error> {
    if fragments == 0 {
        return Err(Error::ZeroFragments);
    }
    let numerator = fragments as u64 * code_rate.numer() as u64;
    Ok(numerator.div_ceil(code_rate.denom() as u64) as u32)
}

/// Probability that at least one of `replicas` header copies survives when
/// `header_vulnerable` elements (itself included) arrive in a header window
/// on a grid of `channels` channels.
pub fn header_success(
    header_vulnerable: f64,
    channels: u32,
    replicas: u32,
) -> Result<f64, Error> {
    if channels < 2 {
        return Err(Error::TooFewChannels { channels });
    }
    if replicas == 0 {
        return Err(Error::ZeroHeaderReplicas);
    }
    let single = single_element_success(header_vulnerable, channels)?;
    Ok(1.0 - powi(1.0 - single, replicas))
}

/// Probability that a single payload fragment survives `fragment_vulnerable`
/// elements in its window on a grid of `channels` channels.
pub fn fragment_success(fragment_vulnerable: f64, channels: u32) -> Result<f64, Error> {
    if channels < 2 {
        return Err(Error::TooFewChannels { channels });
    }
    single_element_success(fragment_vulnerable, channels)
}

// (1 - 1/c)^(count - 1), with the real exponent evaluated via exp/ln since
// vulnerable counts are averages, not integers.
fn single_element_success(count: f64, channels: u32) -> Result<f64, Error> {
    if count < 1.0 || !count.is_finite() {
        return Err(Error::InvalidVulnerableCount { value: count });
    }
    let keep = 1.0 - 1.0 / channels as f64;
    Ok(math::exp((count - 1.0) * math::ln(keep)))
}

/// Probability that at least `threshold` of `fragments` fragments survive
/// when each survives independently with probability `fragment_success`.
///
/// The binomial trials parameter is the integer fragment count of the setup,
/// even though the vulnerable-element averages feeding `fragment_success`
/// are fractional.
pub fn payload_success(
    fragment_success: f64,
    fragments: u32,
    threshold: u32,
) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&fragment_success) || fragment_success.is_nan() {
        return Err(Error::InvalidProbability {
            value: fragment_success,
        });
    }
    if fragments == 0 {
        return Err(Error::ZeroFragments);
    }
    if threshold == 0 || threshold > fragments {
        return Err(Error::InvalidThreshold {
            threshold,
            fragments,
        });
    }
    Ok(binomial_tail(fragment_success, fragments, threshold, |i| {
        math::binomial_coefficient(fragments, i)
    }))
}

// P(X >= threshold) for X ~ Binomial(fragments, p), with the coefficient for
// each miss count supplied by the caller (precomputed in the hot path).
fn binomial_tail(p: f64, fragments: u32, threshold: u32, coeff: impl Fn(u32) -> f64) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    let q = 1.0 - p;
    let mut below = 0.0;
    for i in 0..threshold {
        below += coeff(i) * powi(p, i) * powi(q, fragments - i);
    }
    (1.0 - below).clamp(0.0, 1.0)
}

// Integer power by squaring; deterministic across platforms.
fn powi(base: f64, mut exponent: u32) -> f64 {
    let mut result = 1.0;
    let mut base = base;
    while exponent > 0 {
        if exponent & 1 == 1 {
            result *= base;
        }
        base *= base;
        exponent >>= 1;
    }
    result
}

/// Traffic summary for a scenario and allocation.
///
/// Rates are network-wide; the vulnerable-element counts divide the load
/// across the scenario's grids (each transmission hops within one grid) and
/// clamp at 1 so an element always counts itself.
pub fn load_summary(
    cfg: &NetworkConfig,
    catalog: &SetupCatalog,
    allocation: &AllocationDistribution,
) -> Result<LoadSummary, Error> {
    Ok(Prepared::new(cfg, catalog)?.loads(allocation.weights_checked(catalog)?))
}

/// Evaluates the full analytic model for one (scenario, catalog, allocation).
pub fn evaluate(
    cfg: &NetworkConfig,
    catalog: &SetupCatalog,
    allocation: &AllocationDistribution,
) -> Result<AnalyticReport, Error> {
    let prepared = Prepared::new(cfg, catalog)?;
    let weights = allocation.weights_checked(catalog)?;
    let loads = prepared.loads(weights);

    let single_header =
        single_element_success(loads.header_vulnerable_count, prepared.channels)?;
    let fragment_ok =
        single_element_success(loads.fragment_vulnerable_count, prepared.channels)?;

    let mut per_setup = Vec::with_capacity(prepared.setups.len());
    let mut packet_success = 0.0;
    for (setup, &weight) in prepared.setups.iter().zip(weights) {
        let header_ok = 1.0 - powi(1.0 - single_header, setup.replicas);
        let payload_ok = binomial_tail(fragment_ok, setup.fragments, setup.threshold, |i| {
            setup.coeffs[i as usize]
        });
        packet_success += weight * header_ok * payload_ok;
        per_setup.push(SetupReport {
            fragments: setup.fragments,
            decode_threshold: setup.threshold,
            header_success: header_ok,
            payload_success: payload_ok,
        });
    }

    let goodput_bps = packet_success * prepared.network_rate * prepared.payload_bytes;
    let avg_power_w = prepared.watts
        * prepared.network_rate
        * (loads.mean_headers * prepared.header_toa + loads.mean_fragments * prepared.fragment_toa);
    let energy_eff_bpj = goodput_bps / avg_power_w;

    Ok(AnalyticReport {
        per_setup,
        fragment_success: fragment_ok,
        packet_success,
        goodput_bps,
        avg_power_w,
        energy_eff_bpj,
        loads,
    })
}

impl AllocationDistribution {
    fn weights_checked(&self, catalog: &SetupCatalog) -> Result<&[f64], Error> {
        self.check_matches(catalog)?;
        Ok(self.weights())
    }
}

/// Scenario with per-setup constants resolved, shared by `evaluate` and the
/// optimizer's inner loop.
pub(crate) struct Prepared {
    pub(crate) setups: Vec<PreparedSetup>,
    /// Transmissions per second network-wide (devices x rate).
    pub(crate) network_rate: f64,
    pub(crate) payload_bytes: f64,
    pub(crate) watts: f64,
    pub(crate) header_toa: f64,
    pub(crate) fragment_toa: f64,
    pub(crate) channels: u32,
    pub(crate) grids: f64,
}

pub(crate) struct PreparedSetup {
    pub(crate) replicas: u32,
    pub(crate) fragments: u32,
    pub(crate) threshold: u32,
    /// C(fragments, i) for every miss count i < threshold.
    coeffs: Vec<f64>,
}

impl Prepared {
    pub(crate) fn new(cfg: &NetworkConfig, catalog: &SetupCatalog) -> Result<Self, Error> {
        cfg.validate()?;
        let mut setups = Vec::with_capacity(catalog.len());
        for setup in catalog.setups() {
            let fragments = fragments_for(cfg.payload_bytes, setup.code_rate)?;
            let threshold = decode_threshold(fragments, setup.code_rate)?;
            let coeffs = (0..threshold)
                .map(|i| math::binomial_coefficient(fragments, i))
                .collect();
            setups.push(PreparedSetup {
                replicas: setup.header_replicas,
                fragments,
                threshold,
                coeffs,
            });
        }
        Ok(Prepared {
            setups,
            network_rate: cfg.devices as f64 * cfg.tx_rate_hz,
            payload_bytes: cfg.payload_bytes as f64,
            watts: cfg.tx_power_watts().watts,
            header_toa: cfg.header_toa_s,
            fragment_toa: cfg.fragment_toa_s,
            channels: cfg.channels,
            grids: cfg.grids as f64,
        })
    }

    pub(crate) fn loads(&self, weights: &[f64]) -> LoadSummary {
        let mut mean_headers = 0.0;
        let mut mean_fragments = 0.0;
        for (setup, &weight) in self.setups.iter().zip(weights) {
            mean_headers += setup.replicas as f64 * weight;
            mean_fragments += setup.fragments as f64 * weight;
        }
        let header_rate_hz = mean_headers * self.network_rate;
        let fragment_rate_hz = mean_fragments * self.network_rate;
        let cross_window = self.header_toa + self.fragment_toa;
        let header_window =
            header_rate_hz * 2.0 * self.header_toa + fragment_rate_hz * cross_window;
        let fragment_window =
            fragment_rate_hz * 2.0 * self.fragment_toa + header_rate_hz * cross_window;
        LoadSummary {
            mean_headers,
            mean_fragments,
            header_rate_hz,
            fragment_rate_hz,
            header_vulnerable_count: (header_window / self.grids).max(1.0),
            fragment_vulnerable_count: (fragment_window / self.grids).max(1.0),
        }
    }

    /// (packet success, goodput, energy efficiency) without building a
    /// report; zero-weight setups are skipped.
    pub(crate) fn metrics(&self, weights: &[f64]) -> (f64, f64, f64) {
        let loads = self.loads(weights);
        let keep = math::ln(1.0 - 1.0 / self.channels as f64);
        let single_header = math::exp((loads.header_vulnerable_count - 1.0) * keep);
        let fragment_ok = math::exp((loads.fragment_vulnerable_count - 1.0) * keep);

        let mut packet_success = 0.0;
        for (setup, &weight) in self.setups.iter().zip(weights) {
            if weight == 0.0 {
                continue;
            }
            let header_ok = 1.0 - powi(1.0 - single_header, setup.replicas);
            let payload_ok = binomial_tail(fragment_ok, setup.fragments, setup.threshold, |i| {
                setup.coeffs[i as usize]
            });
            packet_success += weight * header_ok * payload_ok;
        }
        let goodput = packet_success * self.network_rate * self.payload_bytes;
        let power = self.watts
            * self.network_rate
            * (loads.mean_headers * self.header_toa + loads.mean_fragments * self.fragment_toa);
        (packet_success, goodput, goodput / power)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Setup;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn default_scenario(devices: u32) -> (NetworkConfig, SetupCatalog) {
        (NetworkConfig::new(devices), SetupCatalog::default())
    }

    #[test]
    fn fragment_counts_for_ten_byte_payload() {
        assert_eq!(fragments_for(10, CodeRate::ONE_THIRD).unwrap(), 7);
        assert_eq!(fragments_for(10, CodeRate::FIVE_SIXTHS).unwrap(), 3);
        assert_eq!(fragments_for(10, CodeRate::TWO_THIRDS).unwrap(), 4);
        assert_eq!(fragments_for(10, CodeRate::ONE_HALF).unwrap(), 5);
        assert!(fragments_for(0, CodeRate::ONE_HALF).is_err());
    }

    #[test]
    fn decode_thresholds_match_code_rates() {
        assert_eq!(decode_threshold(7, CodeRate::ONE_THIRD).unwrap(), 3);
        assert_eq!(decode_threshold(3, CodeRate::FIVE_SIXTHS).unwrap(), 3);
        assert_eq!(decode_threshold(4, CodeRate::TWO_THIRDS).unwrap(), 3);
        assert!(decode_threshold(0, CodeRate::ONE_HALF).is_err());
    }

    #[test]
    fn threshold_never_exceeds_fragments() {
        for numer in 1..=6u32 {
            for denom in numer..=6u32 {
                let cr = CodeRate::new(numer, denom).unwrap();
                for payload in 1..=80u32 {
                    let f = fragments_for(payload, cr).unwrap();
                    let mu = decode_threshold(f, cr).unwrap();
                    assert!(mu >= 1 && mu <= f, "payload {payload} cr {cr}: mu {mu} f {f}");
                }
            }
        }
    }

    // Hand evaluation with the networkwide element pressure (single grid):
    // 20000 devices, all on (3 replicas, CR 1/3), t_h = 0.233472, t_f = 0.1024.
    #[test]
    fn load_summary_single_grid_reference() {
        let (mut cfg, cat) = default_scenario(20_000);
        cfg.grids = 1;
        let dr8 = AllocationDistribution::dr8(&cat).unwrap();
        let loads = load_summary(&cfg, &cat, &dr8).unwrap();
        assert_abs_diff_eq!(loads.mean_headers, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(loads.mean_fragments, 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(loads.header_rate_hz, 66.66666666666666, epsilon = 1e-9);
        assert_abs_diff_eq!(loads.fragment_rate_hz, 155.55555555555554, epsilon = 1e-9);
        assert_abs_diff_eq!(loads.header_vulnerable_count, 83.37635555555555, epsilon = 1e-9);
        assert_abs_diff_eq!(loads.fragment_vulnerable_count, 54.24924444444444, epsilon = 1e-9);
    }

    #[test]
    fn vulnerable_counts_clamp_at_one() {
        let (mut cfg, cat) = default_scenario(1);
        cfg.tx_rate_hz = 1e-12;
        let dr8 = AllocationDistribution::dr8(&cat).unwrap();
        let loads = load_summary(&cfg, &cat, &dr8).unwrap();
        assert_eq!(loads.header_vulnerable_count, 1.0);
        assert_eq!(loads.fragment_vulnerable_count, 1.0);
    }

    #[test]
    fn mixed_allocation_means() {
        let (cfg, cat) = default_scenario(20_000);
        let mix = AllocationDistribution::new(vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.5]).unwrap();
        let loads = load_summary(&cfg, &cat, &mix).unwrap();
        assert_abs_diff_eq!(loads.mean_headers, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(loads.mean_fragments, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn load_summary_rejects_dimension_mismatch() {
        let (cfg, cat) = default_scenario(100);
        let short = AllocationDistribution::new(vec![1.0]).unwrap();
        assert!(matches!(
            load_summary(&cfg, &cat, &short),
            Err(Error::DimensionMismatch { expected: 6, got: 1 })
        ));
    }

    #[test]
    fn header_success_reference_points() {
        // No competing elements: every replica survives.
        assert_eq!(header_success(1.0, 35, 3).unwrap(), 1.0);
        // One competing element misses the channel with probability 34/35.
        assert_abs_diff_eq!(header_success(2.0, 35, 1).unwrap(), 34.0 / 35.0, epsilon = 1e-15);
        // More replicas never hurt.
        let mut last = 0.0;
        for replicas in 1..6 {
            let p = header_success(40.0, 35, replicas).unwrap();
            assert!(p >= last);
            last = p;
        }
        assert!(header_success(2.0, 1, 1).is_err());
        assert!(header_success(0.5, 35, 1).is_err());
    }

    #[test]
    fn fragment_success_reference_points() {
        assert_eq!(fragment_success(1.0, 35).unwrap(), 1.0);
        assert_abs_diff_eq!(fragment_success(2.0, 35).unwrap(), 34.0 / 35.0, epsilon = 1e-15);
        // Continuation of the single-grid 20000-device example (rounded
        // vulnerable count).
        assert_abs_diff_eq!(
            fragment_success(54.25, 35).unwrap(),
            0.2136136352,
            epsilon = 1e-9
        );
        assert!(fragment_success(2.0, 1).is_err());
    }

    #[test]
    fn payload_success_reference_points() {
        assert_eq!(payload_success(1.0, 7, 3).unwrap(), 1.0);
        assert_eq!(payload_success(0.0, 7, 3).unwrap(), 0.0);
        // All 2^3 outcomes enumerated by hand: P(X >= 2) = 4/8.
        assert_abs_diff_eq!(payload_success(0.5, 3, 2).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            payload_success(0.5, 3, 4),
            Err(Error::InvalidThreshold { threshold: 4, fragments: 3 })
        ));
        assert!(payload_success(1.5, 3, 2).is_err());
    }

    #[test]
    fn evaluate_zero_load_limit() {
        let (mut cfg, cat) = default_scenario(1);
        cfg.tx_rate_hz = 1e-12;
        let dr8 = AllocationDistribution::dr8(&cat).unwrap();
        let report = evaluate(&cfg, &cat, &dr8).unwrap();
        assert_abs_diff_eq!(report.packet_success, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            report.goodput_bps,
            cfg.devices as f64 * cfg.tx_rate_hz * cfg.payload_bytes as f64,
            epsilon = 1e-20
        );
    }

    #[test]
    fn evaluate_single_device_goodput() {
        let (cfg, cat) = default_scenario(1);
        let dr8 = AllocationDistribution::dr8(&cat).unwrap();
        let report = evaluate(&cfg, &cat, &dr8).unwrap();
        assert!(report.packet_success > 0.9999);
        assert_abs_diff_eq!(report.goodput_bps, 10.0 / 900.0, epsilon = 1e-5);
    }

    // Defaults, 20000 devices, all on DR8; values frozen from hand
    // evaluation of the closed-form chain.
    #[test]
    fn evaluate_dr8_reference_scenario() {
        let (cfg, cat) = default_scenario(20_000);
        let dr8 = AllocationDistribution::dr8(&cat).unwrap();
        let report = evaluate(&cfg, &cat, &dr8).unwrap();
        assert_abs_diff_eq!(report.packet_success, 0.9849718347529597, epsilon = 1e-12);
        assert_abs_diff_eq!(report.avg_power_w, 3.149368888888889, epsilon = 1e-12);
        assert_abs_diff_eq!(report.goodput_bps, 218.88262994510214, epsilon = 1e-9);
        // Energy efficiency is goodput per unit power by construction.
        assert!(
            (report.energy_eff_bpj * report.avg_power_w - report.goodput_bps).abs()
                / report.goodput_bps
                < 1e-12
        );
    }

    #[test]
    fn evaluate_dr9_and_mixed_reference_scenarios() {
        let (cfg, cat) = default_scenario(20_000);
        let dr9 = AllocationDistribution::dr9(&cat).unwrap();
        let report = evaluate(&cfg, &cat, &dr9).unwrap();
        assert_abs_diff_eq!(report.packet_success, 0.9400055424765685, epsilon = 1e-12);

        let (cfg, _) = default_scenario(120_000);
        let mix = AllocationDistribution::new(vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.5]).unwrap();
        let report = evaluate(&cfg, &cat, &mix).unwrap();
        assert_abs_diff_eq!(report.packet_success, 0.23602542210659752, epsilon = 1e-12);
    }

    #[test]
    fn per_setup_reported_even_at_zero_weight() {
        let (cfg, cat) = default_scenario(50_000);
        let dr8 = AllocationDistribution::dr8(&cat).unwrap();
        let report = evaluate(&cfg, &cat, &dr8).unwrap();
        assert_eq!(report.per_setup.len(), 6);
        for s in &report.per_setup {
            assert!(s.header_success > 0.0 && s.header_success <= 1.0);
            assert!((0.0..=1.0).contains(&s.payload_success));
        }
        // The weighted sum over per-setup probabilities reproduces Ps.
        let weighted: f64 = report
            .per_setup
            .iter()
            .zip(dr8.weights())
            .map(|(s, w)| w * s.header_success * s.payload_success)
            .sum();
        assert_abs_diff_eq!(weighted, report.packet_success, epsilon = 1e-15);
    }

    #[test]
    fn packet_success_decreases_with_devices() {
        let cat = SetupCatalog::default();
        for delta in [
            AllocationDistribution::dr8(&cat).unwrap(),
            AllocationDistribution::dr9(&cat).unwrap(),
            AllocationDistribution::new(vec![0.25, 0.25, 0.0, 0.0, 0.25, 0.25]).unwrap(),
        ] {
            let mut last = f64::INFINITY;
            for devices in (20_000..=200_000).step_by(20_000) {
                let cfg = NetworkConfig::new(devices as u32);
                let ps = evaluate(&cfg, &cat, &delta).unwrap().packet_success;
                assert!(ps <= last + 1e-15, "Ps not monotone at M = {devices}");
                last = ps;
            }
        }
    }

    #[test]
    fn dr_modes_match_point_evaluations() {
        // Evaluating DR8/DR9 one-point allocations reproduces the pure-setup
        // formulas with (3, 1/3) and (2, 2/3).
        let (cfg, cat) = default_scenario(40_000);
        for (delta, setup) in [
            (AllocationDistribution::dr8(&cat).unwrap(), Setup::DR8),
            (AllocationDistribution::dr9(&cat).unwrap(), Setup::DR9),
        ] {
            let report = evaluate(&cfg, &cat, &delta).unwrap();
            let k = cat.index_of(&setup).unwrap();
            let expected =
                report.per_setup[k].header_success * report.per_setup[k].payload_success;
            assert_abs_diff_eq!(report.packet_success, expected, epsilon = 1e-15);
        }
    }
}
