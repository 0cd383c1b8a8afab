use core::fmt;

/// Errors raised by constructors and model operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// Code rate outside (0, 1] or with a zero denominator.
    InvalidCodeRate { numer: u32, denom: u32 },
    /// A setup declared zero header replicas.
    ZeroHeaderReplicas,
    /// Catalog has no setups.
    EmptyCatalog,
    /// Two catalog entries share the same (replicas, code rate) pair.
    DuplicateSetup { index: usize },
    /// An allocation weight fell outside [0, 1].
    WeightOutOfRange { index: usize, weight: f64 },
    /// Allocation weights do not sum to 1 within tolerance.
    WeightSumMismatch { sum: f64 },
    /// Allocation length differs from the catalog size.
    DimensionMismatch { expected: usize, got: usize },
    /// A configuration field that must be strictly positive was not.
    NonPositive { field: &'static str },
    /// Fewer than two channels per grid; hopping is undefined.
    TooFewChannels { channels: u32 },
    /// channels x grids exceeds the supported channel id space.
    ChannelSpaceTooLarge { total: u64 },
    /// Payload length of zero bytes.
    ZeroPayload,
    /// Fragment count of zero.
    ZeroFragments,
    /// Decode threshold outside 1..=fragments.
    InvalidThreshold { threshold: u32, fragments: u32 },
    /// A probability argument fell outside [0, 1].
    InvalidProbability { value: f64 },
    /// A vulnerable-element count below 1 (the model clamps at 1).
    InvalidVulnerableCount { value: f64 },
    /// A named setup required by an operation is absent from the catalog.
    SetupNotInCatalog { replicas: u32, numer: u32, denom: u32 },
    /// Quantizer resolution outside the supported range.
    BitsOutOfRange { bits: u8 },
    /// Downlink octet carries bits above the declared resolution.
    CodeOutOfRange { code: u16, bits: u8 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::InvalidCodeRate { numer, denom } => {
                write!(f, "code rate {numer}/{denom} is not in (0, 1]")
            }
            Error::ZeroHeaderReplicas => write!(f, "setup must send at least one header replica"),
            Error::EmptyCatalog => write!(f, "setup catalog is empty"),
            Error::DuplicateSetup { index } => {
                write!(f, "catalog entry {index} duplicates an earlier setup")
            }
            Error::WeightOutOfRange { index, weight } => {
                write!(f, "allocation weight {index} = {weight} is outside [0, 1]")
            }
            Error::WeightSumMismatch { sum } => {
                write!(f, "allocation weights sum to {sum}, expected 1")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "allocation has {got} weights, catalog has {expected} setups")
            }
            Error::NonPositive { field } => write!(f, "{field} must be strictly positive"),
            Error::TooFewChannels { channels } => {
                write!(f, "need at least 2 channels per grid, got {channels}")
            }
            Error::ChannelSpaceTooLarge { total } => {
                write!(f, "channels x grids = {total} exceeds the supported channel space")
            }
            Error::ZeroPayload => write!(f, "payload must be at least one byte"),
            Error::ZeroFragments => write!(f, "fragment count must be at least 1"),
            Error::InvalidThreshold { threshold, fragments } => {
                write!(f, "decode threshold {threshold} is outside 1..={fragments}")
            }
            Error::InvalidProbability { value } => {
                write!(f, "probability {value} is outside [0, 1]")
            }
            Error::InvalidVulnerableCount { value } => {
                write!(f, "vulnerable-element count {value} is below 1")
            }
            Error::SetupNotInCatalog { replicas, numer, denom } => {
                write!(f, "catalog lacks setup ({replicas} replicas, CR {numer}/{denom})")
            }
            Error::BitsOutOfRange { bits } => {
                write!(f, "quantizer resolution {bits} bits is outside the supported range")
            }
            Error::CodeOutOfRange { code, bits } => {
                write!(f, "code {code} does not fit in {bits} bits")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
