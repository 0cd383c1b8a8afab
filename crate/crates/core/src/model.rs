//! Domain types shared by the analytic model, the simulator and the
//! optimizer: transmission setups, the setup catalog, allocation
//! distributions and the network scenario.

use alloc::vec::Vec;

use crate::math;
use crate::Error;

/// Absolute tolerance on the sum of allocation weights.
///
/// Grid-search weights are exact multiples of the grid step; the tolerance
/// only absorbs floating-point accumulation error.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// Convolutional code rate as an exact rational in (0, 1].
///
/// Stored as integers so the fragment-count ceiling is bit-exact and never
/// flips due to float rounding.
#[derive(Debug, Clone, Copy)]
pub struct CodeRate {
    numer: u32,
    denom: u32,
}

impl CodeRate {
    pub const ONE_THIRD: CodeRate = CodeRate { numer: 1, denom: 3 };
    pub const ONE_HALF: CodeRate = CodeRate { numer: 1, denom: 2 };
    pub const TWO_THIRDS: CodeRate = CodeRate { numer: 2, denom: 3 };
    pub const FIVE_SIXTHS: CodeRate = CodeRate { numer: 5, denom: 6 };

    pub fn new(numer: u32, denom: u32) -> Result<Self, Error> {
        if numer == 0 || denom == 0 || numer > denom {
            return Err(Error::InvalidCodeRate { numer, denom });
        }
        Ok(CodeRate { numer, denom })
    }

    pub fn numer(&self) -> u32 {
        self.numer
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn value(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }
}

impl PartialEq for CodeRate {
    fn eq(&self, other: &Self) -> bool {
        // Rational equality; catalog rates need not be reduced.
        self.numer as u64 * other.denom as u64 == other.numer as u64 * self.denom as u64
    }
}

impl Eq for CodeRate {}

impl core::fmt::Display for CodeRate {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

/// One transmission setup: a header-replica count paired with a payload code
/// rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Setup {
    pub header_replicas: u32,
    pub code_rate: CodeRate,
}

impl Setup {
    /// Standardized data rate DR8: 3 header replicas, code rate 1/3.
    pub const DR8: Setup = Setup {
        header_replicas: 3,
        code_rate: CodeRate::ONE_THIRD,
    };

    /// Standardized data rate DR9: 2 header replicas, code rate 2/3.
    pub const DR9: Setup = Setup {
        header_replicas: 2,
        code_rate: CodeRate::TWO_THIRDS,
    };

    pub fn new(header_replicas: u32, code_rate: CodeRate) -> Result<Self, Error> {
        if header_replicas == 0 {
            return Err(Error::ZeroHeaderReplicas);
        }
        Ok(Setup {
            header_replicas,
            code_rate,
        })
    }
}

/// Ordered list of the setups devices may draw from.
///
/// The default catalog lists the six combinations supported by current
/// LR-FHSS radios, lightest first:
///
/// | index | replicas | code rate |
/// |-------|----------|-----------|
/// | 0     | 1        | 5/6       |
/// | 1     | 1        | 2/3       |
/// | 2     | 2        | 2/3       | (= DR9)
/// | 3     | 2        | 1/2       |
/// | 4     | 3        | 1/2       |
/// | 5     | 3        | 1/3       | (= DR8)
#[derive(Debug, Clone, PartialEq)]
pub struct SetupCatalog {
    setups: Vec<Setup>,
}

impl SetupCatalog {
    /// Builds a catalog from explicit setups, rejecting empty lists and
    /// duplicate (replicas, code rate) pairs.
    pub fn new(setups: Vec<Setup>) -> Result<Self, Error> {
        if setups.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        for (i, s) in setups.iter().enumerate() {
            if s.header_replicas == 0 {
                return Err(Error::ZeroHeaderReplicas);
            }
            if setups[..i].contains(s) {
                return Err(Error::DuplicateSetup { index: i });
            }
        }
        Ok(SetupCatalog { setups })
    }

    pub fn len(&self) -> usize {
        self.setups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.setups.is_empty()
    }

    pub fn setups(&self) -> &[Setup] {
        &self.setups
    }

    pub fn get(&self, index: usize) -> Option<&Setup> {
        self.setups.get(index)
    }

    /// Index of an exact (replicas, code rate) match, if present.
    pub fn index_of(&self, setup: &Setup) -> Option<usize> {
        self.setups.iter().position(|s| s == setup)
    }

    /// Index of the DR8-equivalent setup (3 replicas, CR 1/3).
    pub fn dr8_index(&self) -> Option<usize> {
        self.index_of(&Setup::DR8)
    }

    /// Index of the DR9-equivalent setup (2 replicas, CR 2/3).
    pub fn dr9_index(&self) -> Option<usize> {
        self.index_of(&Setup::DR9)
    }
}

impl Default for SetupCatalog {
    fn default() -> Self {
        SetupCatalog {
            setups: alloc::vec![
                Setup { header_replicas: 1, code_rate: CodeRate::FIVE_SIXTHS },
                Setup { header_replicas: 1, code_rate: CodeRate::TWO_THIRDS },
                Setup::DR9,
                Setup { header_replicas: 2, code_rate: CodeRate::ONE_HALF },
                Setup { header_replicas: 3, code_rate: CodeRate::ONE_HALF },
                Setup::DR8,
            ],
        }
    }
}

/// Probability distribution over the setup catalog; entry `k` is the chance
/// a device picks setup `k` for one transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationDistribution {
    weights: Vec<f64>,
}

impl AllocationDistribution {
    /// Validates that every weight lies in [0, 1] and the weights sum to 1
    /// within [`PROBABILITY_SUM_TOLERANCE`].
    pub fn new(weights: Vec<f64>) -> Result<Self, Error> {
        if weights.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(0.0..=1.0).contains(&weight) || weight.is_nan() {
                return Err(Error::WeightOutOfRange { index, weight });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::WeightSumMismatch { sum });
        }
        Ok(AllocationDistribution { weights })
    }

    /// Degenerate distribution putting all mass on `index`.
    pub fn point(index: usize, len: usize) -> Result<Self, Error> {
        if index >= len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: index + 1,
            });
        }
        let mut weights = alloc::vec![0.0; len];
        weights[index] = 1.0;
        Ok(AllocationDistribution { weights })
    }

    /// "DR8 mode": all mass on the catalog's DR8-equivalent setup.
    pub fn dr8(catalog: &SetupCatalog) -> Result<Self, Error> {
        let index = catalog.dr8_index().ok_or(Error::SetupNotInCatalog {
            replicas: 3,
            numer: 1,
            denom: 3,
        })?;
        Self::point(index, catalog.len())
    }

    /// "DR9 mode": all mass on the catalog's DR9-equivalent setup.
    pub fn dr9(catalog: &SetupCatalog) -> Result<Self, Error> {
        let index = catalog.dr9_index().ok_or(Error::SetupNotInCatalog {
            replicas: 2,
            numer: 2,
            denom: 3,
        })?;
        Self::point(index, catalog.len())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Errors unless the distribution length matches the catalog.
    pub fn check_matches(&self, catalog: &SetupCatalog) -> Result<(), Error> {
        if self.weights.len() != catalog.len() {
            return Err(Error::DimensionMismatch {
                expected: catalog.len(),
                got: self.weights.len(),
            });
        }
        Ok(())
    }
}

/// Transmit power on the linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxPowerWatts {
    pub watts: f64,
}

/// Converts dBm to linear watts: `10^((dBm - 30) / 10)`.
pub fn dbm_to_watts(dbm: f64) -> TxPowerWatts {
    TxPowerWatts {
        watts: math::powf(10.0, (dbm - 30.0) / 10.0),
    }
}

/// The network scenario under study.
///
/// Defaults follow the common evaluation setting: 20 dBm transmit power, one
/// transmission per device per 900 s on average, 10-byte payloads, 8
/// frequency grids of 35 channels each, one-hour horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Number of end-devices (M).
    pub devices: u32,
    /// Mean per-device transmission rate in 1/s.
    pub tx_rate_hz: f64,
    /// Application payload length in bytes.
    pub payload_bytes: u32,
    /// Physical channels per frequency grid.
    pub channels: u32,
    /// Number of frequency grids; each transmission hops within one grid.
    pub grids: u32,
    /// Transmit power in dBm.
    pub tx_power_dbm: f64,
    /// Time-on-air of one header replica, seconds.
    pub header_toa_s: f64,
    /// Time-on-air of one payload fragment, seconds.
    pub fragment_toa_s: f64,
    /// Simulation horizon, seconds.
    pub sim_duration_s: f64,
    /// Allow consecutive hops of one transmission to reuse a channel.
    pub allow_channel_repeats: bool,
}

impl NetworkConfig {
    pub const DEFAULT_TX_RATE_HZ: f64 = 1.0 / 900.0;
    pub const DEFAULT_PAYLOAD_BYTES: u32 = 10;
    pub const DEFAULT_CHANNELS: u32 = 35;
    pub const DEFAULT_GRIDS: u32 = 8;
    pub const DEFAULT_TX_POWER_DBM: f64 = 20.0;
    pub const DEFAULT_HEADER_TOA_S: f64 = 0.233472;
    pub const DEFAULT_FRAGMENT_TOA_S: f64 = 0.1024;
    pub const DEFAULT_SIM_DURATION_S: f64 = 3600.0;

    /// Scenario with the default parameters and the given device count.
    pub fn new(devices: u32) -> Self {
        NetworkConfig {
            devices,
            tx_rate_hz: Self::DEFAULT_TX_RATE_HZ,
            payload_bytes: Self::DEFAULT_PAYLOAD_BYTES,
            channels: Self::DEFAULT_CHANNELS,
            grids: Self::DEFAULT_GRIDS,
            tx_power_dbm: Self::DEFAULT_TX_POWER_DBM,
            header_toa_s: Self::DEFAULT_HEADER_TOA_S,
            fragment_toa_s: Self::DEFAULT_FRAGMENT_TOA_S,
            sim_duration_s: Self::DEFAULT_SIM_DURATION_S,
            allow_channel_repeats: false,
        }
    }

    /// Transmit power on the linear scale.
    pub fn tx_power_watts(&self) -> TxPowerWatts {
        dbm_to_watts(self.tx_power_dbm)
    }

    /// Total physical channels across all grids.
    pub fn total_channels(&self) -> u64 {
        self.channels as u64 * self.grids as u64
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.devices == 0 {
            return Err(Error::NonPositive { field: "devices" });
        }
        if self.tx_rate_hz <= 0.0 || !self.tx_rate_hz.is_finite() {
            return Err(Error::NonPositive { field: "tx_rate_hz" });
        }
        if self.payload_bytes == 0 {
            return Err(Error::ZeroPayload);
        }
        if self.channels < 2 {
            return Err(Error::TooFewChannels {
                channels: self.channels,
            });
        }
        if self.grids == 0 {
            return Err(Error::NonPositive { field: "grids" });
        }
        // Simulator channel ids are u16.
        if self.total_channels() > u16::MAX as u64 + 1 {
            return Err(Error::ChannelSpaceTooLarge {
                total: self.total_channels(),
            });
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::NonPositive {
                field: "tx_power_dbm",
            });
        }
        if self.header_toa_s <= 0.0 || !self.header_toa_s.is_finite() {
            return Err(Error::NonPositive {
                field: "header_toa_s",
            });
        }
        if self.fragment_toa_s <= 0.0 || !self.fragment_toa_s.is_finite() {
            return Err(Error::NonPositive {
                field: "fragment_toa_s",
            });
        }
        if self.sim_duration_s <= 0.0 || !self.sim_duration_s.is_finite() {
            return Err(Error::NonPositive {
                field: "sim_duration_s",
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_matches_radio_table() {
        let cat = SetupCatalog::default();
        assert_eq!(cat.len(), 6);
        // S6 = (3 replicas, CR 1/3), S3 = (2 replicas, CR 2/3).
        assert_eq!(cat.get(5).unwrap().header_replicas, 3);
        assert_eq!(cat.get(5).unwrap().code_rate, CodeRate::ONE_THIRD);
        assert_eq!(cat.get(2).unwrap().header_replicas, 2);
        assert_eq!(cat.get(2).unwrap().code_rate, CodeRate::TWO_THIRDS);
        assert_eq!(cat.dr8_index(), Some(5));
        assert_eq!(cat.dr9_index(), Some(2));
    }

    #[test]
    fn dr_modes_equal_hand_built_distributions() {
        let cat = SetupCatalog::default();
        let dr8 = AllocationDistribution::dr8(&cat).unwrap();
        let dr9 = AllocationDistribution::dr9(&cat).unwrap();
        let hand8 =
            AllocationDistribution::new(alloc::vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let hand9 =
            AllocationDistribution::new(alloc::vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(dr8, hand8);
        assert_eq!(dr9, hand9);
    }

    #[test]
    fn allocation_rejects_bad_weights() {
        assert!(matches!(
            AllocationDistribution::new(alloc::vec![0.5, 0.6]),
            Err(Error::WeightSumMismatch { .. })
        ));
        assert!(matches!(
            AllocationDistribution::new(alloc::vec![-0.1, 1.1]),
            Err(Error::WeightOutOfRange { .. })
        ));
        // 1e-9 tolerance absorbs accumulation error but nothing larger.
        assert!(AllocationDistribution::new(alloc::vec![0.5, 0.5 + 5e-10]).is_ok());
        assert!(AllocationDistribution::new(alloc::vec![0.5, 0.5 + 5e-9]).is_err());
    }

    #[test]
    fn catalog_rejects_duplicates_and_empty() {
        assert!(matches!(
            SetupCatalog::new(alloc::vec![]),
            Err(Error::EmptyCatalog)
        ));
        let dup = SetupCatalog::new(alloc::vec![Setup::DR8, Setup::DR8]);
        assert!(matches!(dup, Err(Error::DuplicateSetup { index: 1 })));
        // Unreduced rationals compare equal.
        let s = Setup::new(3, CodeRate::new(2, 6).unwrap()).unwrap();
        assert_eq!(s, Setup::DR8);
    }

    #[test]
    fn dbm_conversion_reference_points() {
        assert!((dbm_to_watts(20.0).watts - 0.1).abs() < 1e-15);
        assert!((dbm_to_watts(30.0).watts - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(0.0).watts - 0.001).abs() < 1e-15);
    }

    #[test]
    fn code_rate_bounds() {
        assert!(CodeRate::new(0, 3).is_err());
        assert!(CodeRate::new(4, 3).is_err());
        assert!(CodeRate::new(3, 0).is_err());
        assert!(CodeRate::new(3, 3).is_ok());
    }

    #[test]
    fn config_validation_catches_zeroes() {
        let mut cfg = NetworkConfig::new(0);
        assert!(cfg.validate().is_err());
        cfg.devices = 10;
        assert!(cfg.validate().is_ok());
        cfg.channels = 1;
        assert!(matches!(
            cfg.validate(),
            Err(Error::TooFewChannels { channels: 1 })
        ));
    }
}
