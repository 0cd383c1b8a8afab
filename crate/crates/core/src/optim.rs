//! Exhaustive search for the allocation maximizing goodput or energy
//! efficiency, over a discretized probability simplex, plus the quantized
//! two-setup variant whose parameter fits a single downlink octet.
//!
//! Grid points are independent, so callers may evaluate them concurrently;
//! this implementation scans sequentially in lexicographic order, which makes
//! the declared tie-break (lexicographically smallest allocation) fall out of
//! a strict-improvement comparison.

use alloc::vec;
use alloc::vec::Vec;

use crate::analytic::{AnalyticReport, Prepared};
use crate::model::{
    AllocationDistribution, CodeRate, NetworkConfig, Setup, SetupCatalog,
};
use crate::sim::simulate;
use crate::Error;

/// Metric being maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Goodput,
    EnergyEfficiency,
}

impl Objective {
    pub fn of_report(&self, report: &AnalyticReport) -> f64 {
        match self {
            Objective::Goodput => report.goodput_bps,
            Objective::EnergyEfficiency => report.energy_eff_bpj,
        }
    }

    fn of_metrics(&self, metrics: (f64, f64, f64)) -> f64 {
        match self {
            Objective::Goodput => metrics.1,
            Objective::EnergyEfficiency => metrics.2,
        }
    }
}

impl core::fmt::Display for Objective {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Objective::Goodput => write!(f, "goodput"),
            Objective::EnergyEfficiency => write!(f, "energy-efficiency"),
        }
    }
}

/// Discretized probability simplex: all `dimension`-tuples of nonnegative
/// multiples of `1/resolution` summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexGrid {
    dimension: u32,
    resolution: u32,
}

impl SimplexGrid {
    /// Default granularity: steps of 1/20 = 5%.
    pub const DEFAULT_RESOLUTION: u32 = 20;

    pub fn new(dimension: u32, resolution: u32) -> Result<Self, Error> {
        if dimension == 0 {
            return Err(Error::NonPositive { field: "dimension" });
        }
        if resolution == 0 {
            return Err(Error::NonPositive { field: "resolution" });
        }
        Ok(SimplexGrid {
            dimension,
            resolution,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn step(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    /// Number of grid points: C(resolution + dimension - 1, dimension - 1).
    pub fn point_count(&self) -> u128 {
        let n = (self.resolution + self.dimension - 1) as u128;
        let k = (self.dimension - 1) as u128;
        let k = k.min(n - k);
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) / (i + 1);
        }
        c
    }

    /// Iterates every grid point in lexicographically ascending weight order.
    pub fn iter(&self) -> SimplexIter {
        let mut counts = vec![0u32; self.dimension as usize];
        *counts.last_mut().expect("dimension >= 1") = self.resolution;
        SimplexIter {
            counts: Some(counts),
            resolution: self.resolution,
        }
    }
}

/// Advances a composition (counts summing to the resolution) to its
/// lexicographic successor. Returns false once the last composition
/// `(resolution, 0, .., 0)` has been passed.
fn advance_composition(counts: &mut [u32]) -> bool {
    let last_nonzero = match counts.iter().rposition(|&c| c > 0) {
        Some(p) => p,
        None => return false,
    };
    if last_nonzero == 0 {
        return false;
    }
    let bump = if last_nonzero == counts.len() - 1 {
        counts.len() - 2
    } else {
        last_nonzero - 1
    };
    let moved: u32 = counts[bump + 1..].iter().sum();
    counts[bump] += 1;
    for c in counts[bump + 1..].iter_mut() {
        *c = 0;
    }
    *counts.last_mut().expect("non-empty") = moved - 1;
    true
}

pub struct SimplexIter {
    counts: Option<Vec<u32>>,
    resolution: u32,
}

impl Iterator for SimplexIter {
    type Item = AllocationDistribution;

    fn next(&mut self) -> Option<Self::Item> {
        let counts = self.counts.as_mut()?;
        let weights: Vec<f64> = counts
            .iter()
            .map(|&c| c as f64 / self.resolution as f64)
            .collect();
        if !advance_composition(counts) {
            self.counts = None;
        }
        Some(AllocationDistribution::new(weights).expect("grid weights are a valid distribution"))
    }
}

/// Outcome of an exhaustive grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub objective: Objective,
    /// Best allocation found; ties resolved toward the lexicographically
    /// smallest weight tuple.
    pub best_delta: AllocationDistribution,
    /// Analytic metric value at `best_delta`.
    pub best_value: f64,
    /// Grid points visited.
    pub evaluations: u64,
}

/// Scans every point of the simplex grid with step `1/resolution` and
/// returns the allocation maximizing the analytic metric.
pub fn optimize(
    cfg: &NetworkConfig,
    catalog: &SetupCatalog,
    objective: Objective,
    resolution: u32,
) -> Result<OptimizationResult, Error> {
    let prepared = Prepared::new(cfg, catalog)?;
    SimplexGrid::new(catalog.len() as u32, resolution)?;

    let mut counts = vec![0u32; catalog.len()];
    *counts.last_mut().expect("catalog non-empty") = resolution;
    let mut weights = vec![0.0f64; catalog.len()];
    let mut best_value = f64::NEG_INFINITY;
    let mut best_weights = weights.clone();
    let mut evaluations: u64 = 0;

    loop {
        for (w, &c) in weights.iter_mut().zip(counts.iter()) {
            *w = c as f64 / resolution as f64;
        }
        let value = objective.of_metrics(prepared.metrics(&weights));
        evaluations += 1;
        // Strict improvement keeps the first (lexicographically smallest)
        // maximizer of the ascending scan.
        if value > best_value {
            best_value = value;
            best_weights.copy_from_slice(&weights);
        }
        if !advance_composition(&mut counts) {
            break;
        }
    }

    Ok(OptimizationResult {
        objective,
        best_delta: AllocationDistribution::new(best_weights)?,
        best_value,
        evaluations,
    })
}

/// One candidate of a simulation-verified search.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifiedCandidate {
    pub delta: AllocationDistribution,
    pub analytic_value: f64,
    /// Empirical metric averaged over the verification seeds.
    pub simulated_value: f64,
}

/// Grid search with simulation re-scoring: the `top_n` grid points by
/// analytic metric are each simulated over `seeds`, and candidates are
/// returned ordered by their empirical metric, best first.
pub fn optimize_verified(
    cfg: &NetworkConfig,
    catalog: &SetupCatalog,
    objective: Objective,
    resolution: u32,
    top_n: usize,
    seeds: &[u64],
) -> Result<Vec<VerifiedCandidate>, Error> {
    if top_n == 0 {
        return Err(Error::NonPositive { field: "top_n" });
    }
    if seeds.is_empty() {
        return Err(Error::NonPositive { field: "seeds" });
    }
    let prepared = Prepared::new(cfg, catalog)?;
    let mut counts = vec![0u32; catalog.len()];
    *counts.last_mut().expect("catalog non-empty") = resolution.max(1);
    let mut weights = vec![0.0f64; catalog.len()];
    // Best-first shortlist; stable insertion keeps earlier (lexicographically
    // smaller) points ahead on ties.
    let mut shortlist: Vec<(f64, Vec<f64>)> = Vec::with_capacity(top_n + 1);

    loop {
        for (w, &c) in weights.iter_mut().zip(counts.iter()) {
            *w = c as f64 / resolution as f64;
        }
        let value = objective.of_metrics(prepared.metrics(&weights));
        let pos = shortlist.partition_point(|(v, _)| *v >= value);
        if pos < top_n {
            shortlist.insert(pos, (value, weights.clone()));
            shortlist.truncate(top_n);
        }
        if !advance_composition(&mut counts) {
            break;
        }
    }

    let mut candidates = Vec::with_capacity(shortlist.len());
    for (analytic_value, weights) in shortlist {
        let delta = AllocationDistribution::new(weights)?;
        let mut total = 0.0;
        for &seed in seeds {
            let report = simulate(cfg, catalog, &delta, seed)?;
            total += match objective {
                Objective::Goodput => report.empirical_goodput_bps,
                Objective::EnergyEfficiency => report.empirical_energy_eff_bpj.unwrap_or(0.0),
            };
        }
        candidates.push(VerifiedCandidate {
            delta,
            analytic_value,
            simulated_value: total / seeds.len() as f64,
        });
    }
    candidates.sort_by(|a, b| b.simulated_value.total_cmp(&a.simulated_value));
    Ok(candidates)
}

/// A `bits`-wide quantization of the two-setup mixing parameter.
///
/// `alpha = code / (2^bits - 1)` is the probability of the lowest-overhead
/// setup (1 replica, CR 5/6); the rest of the mass goes to DR8. Both
/// endpoints are representable at every resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizedAlpha {
    pub bits: u8,
    pub code: u16,
    pub alpha: f64,
}

impl QuantizedAlpha {
    pub fn new(bits: u8, code: u16) -> Result<Self, Error> {
        if bits == 0 || bits > 16 {
            return Err(Error::BitsOutOfRange { bits });
        }
        let levels = (1u32 << bits) - 1;
        if code as u32 > levels {
            return Err(Error::CodeOutOfRange { code, bits });
        }
        Ok(QuantizedAlpha {
            bits,
            code,
            alpha: code as f64 / levels as f64,
        })
    }
}

// The two setups that dominate optimal allocations across the device range.
const TWO_SETUP_LIGHT: Setup = Setup {
    header_replicas: 1,
    code_rate: CodeRate::FIVE_SIXTHS,
};
const TWO_SETUP_HEAVY: Setup = Setup::DR8;

/// Two-point allocation: `alpha` on the lowest-overhead setup, `1 - alpha`
/// on DR8. Errors if either setup is missing from the catalog.
pub fn two_setup_distribution(
    catalog: &SetupCatalog,
    alpha: f64,
) -> Result<AllocationDistribution, Error> {
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(Error::InvalidProbability { value: alpha });
    }
    let light = catalog
        .index_of(&TWO_SETUP_LIGHT)
        .ok_or(Error::SetupNotInCatalog {
            replicas: 1,
            numer: 5,
            denom: 6,
        })?;
    let heavy = catalog
        .index_of(&TWO_SETUP_HEAVY)
        .ok_or(Error::SetupNotInCatalog {
            replicas: 3,
            numer: 1,
            denom: 3,
        })?;
    let mut weights = vec![0.0; catalog.len()];
    weights[light] = alpha;
    weights[heavy] = 1.0 - alpha;
    AllocationDistribution::new(weights)
}

/// Evaluates the metric at all `2^bits` quantized two-setup allocations and
/// returns the best code; ties resolve toward the smaller code.
pub fn optimize_quantized(
    cfg: &NetworkConfig,
    catalog: &SetupCatalog,
    objective: Objective,
    bits: u8,
) -> Result<QuantizedAlpha, Error> {
    if bits == 0 || bits > 16 {
        return Err(Error::BitsOutOfRange { bits });
    }
    let prepared = Prepared::new(cfg, catalog)?;
    let mut best: Option<(f64, QuantizedAlpha)> = None;
    for code in 0..(1u32 << bits) {
        let quantized = QuantizedAlpha::new(bits, code as u16)?;
        let delta = two_setup_distribution(catalog, quantized.alpha)?;
        let value = objective.of_metrics(prepared.metrics(delta.weights()));
        if best.is_none_or(|(v, _)| value > v) {
            best = Some((value, quantized));
        }
    }
    Ok(best.expect("codebook non-empty").1)
}

/// Packs a quantized alpha into one downlink octet: the code occupies the
/// low `bits` bits, higher bits are zero.
pub fn encode_downlink(quantized: &QuantizedAlpha) -> Result<u8, Error> {
    if quantized.bits == 0 || quantized.bits > 8 {
        return Err(Error::BitsOutOfRange {
            bits: quantized.bits,
        });
    }
    if quantized.code >> quantized.bits != 0 {
        return Err(Error::CodeOutOfRange {
            code: quantized.code,
            bits: quantized.bits,
        });
    }
    Ok(quantized.code as u8)
}

/// Inverse of [`encode_downlink`]; rejects octets with bits set above the
/// declared resolution.
pub fn decode_downlink(octet: u8, bits: u8) -> Result<QuantizedAlpha, Error> {
    if bits == 0 || bits > 8 {
        return Err(Error::BitsOutOfRange { bits });
    }
    if bits < 8 && octet >> bits != 0 {
        return Err(Error::CodeOutOfRange {
            code: octet as u16,
            bits,
        });
    }
    QuantizedAlpha::new(bits, octet as u16)
}
