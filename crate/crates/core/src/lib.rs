//! Exact-arithmetic toolkit for vertex operator algebras at finite weight
//! cutoff: formal calculus, Zhu's algebra and its bimodules, the dual
//! representation actions, induced modules and fusion dimensions.

pub mod dualrep;
pub mod formal;
pub mod fusion;
pub mod induce;
pub mod liealg;
pub mod linalg;
pub mod rat;
pub mod verify;
pub mod voa;
pub mod zhu;

pub use rat::Rat;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("result of weight {weight} escapes the cutoff {cutoff}")]
    CutoffEscape { weight: i64, cutoff: i64 },
    #[error("exponent {exponent} lies outside the certified window [{lo}, {hi}]")]
    Window { exponent: i64, lo: i64, hi: i64 },
    #[error("certificate (k={k}, l={l}) fails: nonzero coefficient at x^{exponent}")]
    Certificate { k: i64, l: i64, exponent: i64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
