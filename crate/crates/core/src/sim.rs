//! Seeded discrete-event simulation of the LR-FHSS uplink.
//!
//! Every device emits transmissions separated by exponential idle gaps; each
//! transmission samples a setup from the allocation, picks one frequency
//! grid, and hops pseudo-randomly inside it (consecutive hops never reuse a
//! channel unless the scenario allows it). Any nonzero time overlap between
//! two elements on the same physical channel destroys both; there is no
//! capture. A transmission is delivered when at least one header replica
//! survives and at least the decode threshold of its fragments survive.
//!
//! Runs are deterministic: a root seed plus per-device ChaCha streams make
//! the traffic independent of device iteration order. Independent runs may
//! execute concurrently; the simulator holds no global state.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{decode_threshold, fragments_for};
use crate::math;
use crate::model::{AllocationDistribution, NetworkConfig, SetupCatalog};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Header,
    Fragment,
}

/// One on-air element: a header replica or a payload fragment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketElement {
    pub kind: ElementKind,
    pub start_s: f64,
    pub duration_s: f64,
    /// Physical channel id: grid index x channels-per-grid + hop channel.
    pub channel: u16,
}

impl PacketElement {
    pub fn end_s(&self) -> f64 {
        self.start_s + self.duration_s
    }
}

/// One packet transmission: header replicas back to back, then fragments
/// back to back, with no inter-hop gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub device_id: u32,
    pub start_time_s: f64,
    pub setup_index: usize,
    pub elements: Vec<PacketElement>,
}

/// Outcome counters for one setup.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PerSetupStats {
    pub attempts: u64,
    pub successes: u64,
    /// Transmissions with no surviving header replica.
    pub header_losses: u64,
    /// Transmissions with a surviving header but too few fragments.
    pub fragment_shortfalls: u64,
}

/// Empirical counterpart of an analytic evaluation, for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub attempted: u64,
    pub delivered: u64,
    /// delivered / attempted; `None` when nothing was attempted.
    pub empirical_ps: Option<f64>,
    /// Delivered payload bytes per second of simulated time.
    pub empirical_goodput_bps: f64,
    /// Delivered bytes per joule spent, using each transmission's actual
    /// setup; `None` when nothing was attempted.
    pub empirical_energy_eff_bpj: Option<f64>,
    pub per_setup: Vec<PerSetupStats>,
    pub seed: u64,
    pub duration_s: f64,
}

// Element counts and on-air time for each catalog setup at one payload size.
struct SetupShape {
    headers: u32,
    fragments: u32,
    threshold: u32,
    toa_s: f64,
}

fn setup_shapes(cfg: &NetworkConfig, catalog: &SetupCatalog) -> Result<Vec<SetupShape>, Error> {
    catalog
        .setups()
        .iter()
        .map(|setup| {
            let fragments = fragments_for(cfg.payload_bytes, setup.code_rate)?;
            let threshold = decode_threshold(fragments, setup.code_rate)?;
            Ok(SetupShape {
                headers: setup.header_replicas,
                fragments,
                threshold,
                toa_s: setup.header_replicas as f64 * cfg.header_toa_s
                    + fragments as f64 * cfg.fragment_toa_s,
            })
        })
        .collect()
}

/// Generates the full transmission set for one seeded run.
///
/// Per device, idle gaps between a transmission's end and the next start are
/// exponential with mean `1 / tx_rate_hz` (a device never overlaps itself).
/// Every transmission whose start falls inside `[0, sim_duration_s)` is
/// generated in full, even if its tail crosses the horizon. Device `d` draws
/// from ChaCha stream `d` of the root seed, so traffic does not depend on
/// iteration order. Within a transmission the draw order is: gap, setup,
/// grid, then one channel per element.
pub fn generate_traffic(
    cfg: &NetworkConfig,
    catalog: &SetupCatalog,
    allocation: &AllocationDistribution,
    seed: u64,
) -> Result<Vec<Transmission>, Error> {
    cfg.validate()?;
    allocation.check_matches(catalog)?;
    let shapes = setup_shapes(cfg, catalog)?;

    let mut cumulative = Vec::with_capacity(allocation.len());
    let mut sum = 0.0;
    for &w in allocation.weights() {
        sum += w;
        cumulative.push(sum);
    }

    let mean_gap = 1.0 / cfg.tx_rate_hz;
    let channels = cfg.channels as u16;
    let mut transmissions = Vec::new();

    for device in 0..cfg.devices {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(device as u64);
        let mut clock = 0.0_f64;
        loop {
            let u: f64 = rng.gen();
            let start = clock + -math::ln(1.0 - u) * mean_gap;
            if start >= cfg.sim_duration_s {
                break;
            }
            let setup_index = pick_setup(&cumulative, rng.gen());
            let shape = &shapes[setup_index];
            let grid_base = rng.gen_range(0..cfg.grids) as u16 * channels;

            let total = shape.headers + shape.fragments;
            let mut elements = Vec::with_capacity(total as usize);
            let mut cursor = start;
            let mut previous_hop: Option<u16> = None;
            for i in 0..total {
                let (kind, duration) = if i < shape.headers {
                    (ElementKind::Header, cfg.header_toa_s)
                } else {
                    (ElementKind::Fragment, cfg.fragment_toa_s)
                };
                let hop = next_hop(&mut rng, channels, previous_hop, cfg.allow_channel_repeats);
                previous_hop = Some(hop);
                elements.push(PacketElement {
                    kind,
                    start_s: cursor,
                    duration_s: duration,
                    channel: grid_base + hop,
                });
                cursor += duration;
            }
            transmissions.push(Transmission {
                device_id: device,
                start_time_s: start,
                setup_index,
                elements,
            });
            clock = cursor;
        }
    }
    Ok(transmissions)
}

fn pick_setup(cumulative: &[f64], draw: f64) -> usize {
    cumulative
        .iter()
        .position(|&edge| draw < edge)
        .unwrap_or(cumulative.len() - 1)
}

fn next_hop(rng: &mut ChaCha8Rng, channels: u16, previous: Option<u16>, allow_repeats: bool) -> u16 {
    match previous {
        Some(prev) if !allow_repeats => {
            // Uniform over the other channels.
            let r = rng.gen_range(0..channels - 1);
            if r >= prev {
                r + 1
            } else {
                r
            }
        }
        _ => rng.gen_range(0..channels),
    }
}

/// Destructive pairwise collision detection.
///
/// An element survives iff no other element overlaps it in time on the same
/// channel; any nonzero overlap kills both parties. Intervals touching only
/// at an endpoint do not collide, so the contiguous elements of one
/// transmission never destroy each other.
///
/// Per-channel sweep over start-sorted elements, O(n log n).
pub fn detect_collisions(elements: &[PacketElement]) -> Vec<bool> {
    let mut survived = vec![true; elements.len()];
    let mut order: Vec<u32> = (0..elements.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        let ea = &elements[a as usize];
        let eb = &elements[b as usize];
        ea.channel
            .cmp(&eb.channel)
            .then(ea.start_s.total_cmp(&eb.start_s))
    });

    let mut current_channel = u32::MAX;
    let mut reach_end = f64::NEG_INFINITY;
    let mut reach_owner = usize::MAX;
    for &i in &order {
        let element = &elements[i as usize];
        if element.channel as u32 != current_channel {
            current_channel = element.channel as u32;
            reach_end = f64::NEG_INFINITY;
            reach_owner = usize::MAX;
        }
        // Any earlier same-channel element still reaching past our start
        // overlaps us; every other overlapper is already marked dead, so
        // killing the farthest-reaching one is exhaustive.
        if element.start_s < reach_end {
            survived[i as usize] = false;
            survived[reach_owner] = false;
        }
        let end = element.end_s();
        if end > reach_end {
            reach_end = end;
            reach_owner = i as usize;
        }
    }
    survived
}

/// Runs one seeded simulation and aggregates delivery statistics.
pub fn simulate(
    cfg: &NetworkConfig,
    catalog: &SetupCatalog,
    allocation: &AllocationDistribution,
    seed: u64,
) -> Result<SimReport, Error> {
    let transmissions = generate_traffic(cfg, catalog, allocation, seed)?;
    let shapes = setup_shapes(cfg, catalog)?;
    let watts = cfg.tx_power_watts().watts;

    let flat: Vec<PacketElement> = transmissions
        .iter()
        .flat_map(|t| t.elements.iter().copied())
        .collect();
    let survived = detect_collisions(&flat);

    let mut per_setup = vec![PerSetupStats::default(); catalog.len()];
    let mut delivered: u64 = 0;
    let mut energy_j = 0.0_f64;
    let mut offset = 0usize;
    for transmission in &transmissions {
        let shape = &shapes[transmission.setup_index];
        let stats = &mut per_setup[transmission.setup_index];
        stats.attempts += 1;
        energy_j += watts * shape.toa_s;

        let headers = shape.headers as usize;
        let header_ok = survived[offset..offset + headers].iter().any(|&s| s);
        let fragments_ok = survived[offset + headers..offset + transmission.elements.len()]
            .iter()
            .filter(|&&s| s)
            .count() as u32
            >= shape.threshold;
        if header_ok && fragments_ok {
            stats.successes += 1;
            delivered += 1;
        } else if !header_ok {
            stats.header_losses += 1;
        } else {
            stats.fragment_shortfalls += 1;
        }
        offset += transmission.elements.len();
    }

    let attempted = transmissions.len() as u64;
    let delivered_bytes = delivered as f64 * cfg.payload_bytes as f64;
    Ok(SimReport {
        attempted,
        delivered,
        empirical_ps: (attempted > 0).then(|| delivered as f64 / attempted as f64),
        empirical_goodput_bps: delivered_bytes / cfg.sim_duration_s,
        empirical_energy_eff_bpj: (attempted > 0).then(|| delivered_bytes / energy_j),
        per_setup,
        seed,
        duration_s: cfg.sim_duration_s,
    })
}
