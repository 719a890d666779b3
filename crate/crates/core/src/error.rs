use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    Spectrum(String),
    #[error("index {index} out of range for dim_k = {dim}")]
    Index { index: usize, dim: usize },
    #[error("rapidity {re}+{im}i outside the strip {lo} <= Im <= {hi}")]
    OutsideStrip { re: f64, im: f64, lo: f64, hi: f64 },
    #[error("gamma function pole hit exactly at z = {0}")]
    GammaPole(f64),
    #[error("resource cap exceeded: {0}")]
    Cap(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("{0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
