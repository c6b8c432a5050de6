use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid class catalog: {0}")]
    Catalog(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown scenario preset `{0}`")]
    UnknownPreset(String),

    #[error("negative investment request from firm {firm}: {quantity}")]
    NegativeRequest { firm: usize, quantity: f64 },

    #[error("negative investment delivery to firm {firm}: {quantity}")]
    NegativeDelivery { firm: usize, quantity: f64 },

    #[error(
        "accounting identity violated in year {year}: gdp {gdp} vs value added {value_added} \
         (relative error {relative_error:.3e})"
    )]
    IdentityViolation {
        year: u32,
        gdp: f64,
        value_added: f64,
        relative_error: f64,
    },

    #[error("invariant violated at tick {tick}: {message}")]
    Invariant { tick: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
