//! The retrieval protocol over an `(N, K, alpha)` MDS array-coded store.
//!
//! With `g = gcd(N, K)`, each file is cut into `B = (N-K)/g` sub-stripes of
//! `K` blocks and every sub-stripe is encoded into one codeword row spread
//! over the `N` servers. Rows `B..B+S` (`S = K/g`) are virtual all-zero rows
//! that are never stored.
//!
//! A retrieval of file `theta` goes:
//!
//! 1. the client samples an `M x S` [`QueryMatrix`] whose rows each hold `S`
//!    distinct indices in `[0, B+S)`;
//! 2. server `i` receives the same matrix with row `theta` shifted by `+i`
//!    modulo `B+S` ([`QueryMatrix::server_query`]);
//! 3. each server returns, per column, the sum over all files of the
//!    addressed blocks, omitting columns that address only virtual rows
//!    ([`answer`]);
//! 4. the client strips the interference of the other files column by
//!    column, then erasure-decodes each sub-stripe ([`decode_file`]).
//!
//! The expected total download is `alpha * S * N * (1 - (K/N)^M)`, which
//! makes the rate `L / E[download]` equal to the MDS-coded PIR capacity.

mod decode;
mod params;
mod privacy;
mod query;
mod response;
mod store;

use thiserror::Error;

use crate::code::CodeError;

pub use decode::{decode_file, DecodePlan};
pub use params::{gcd, sub_stripe_dims, SystemParams};
pub use privacy::{
    download_enumeration, marginal_uniformity_check, privacy_enumeration_check, DownloadTally,
    PrivacyVerdict, DEFAULT_ENUMERATION_CAP,
};
pub use query::{OmegaIter, QueryMatrix, ServerQuery};
pub use response::{answer, prunable_columns, response_length, Response};
pub use store::{encode_system, EncodedStore, FileMatrix, ServerShard};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PirError {
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),
    #[error("code is ({got_n}, {got_k}, {got_alpha}) but the system expects ({n}, {k}, {alpha})")]
    CodeMismatch {
        n: usize,
        k: usize,
        alpha: usize,
        got_n: usize,
        got_k: usize,
        got_alpha: usize,
    },
    #[error("expected {expected} symbols, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("symbol {0:#x} is outside the field")]
    SymbolOutOfRange(u16),
    #[error("expected {expected} files, got {got}")]
    FileCount { expected: usize, got: usize },
    #[error("file index {theta} out of range for {m} files")]
    FileOutOfRange { theta: usize, m: usize },
    #[error("server index {server} out of range for {n} servers")]
    ServerOutOfRange { server: usize, n: usize },
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("expected {expected} responses, got {got}")]
    ResponseCount { expected: usize, got: usize },
    #[error("malformed response from server {server}: {reason}")]
    MalformedResponse { server: usize, reason: String },
    #[error("server {server} presence bitmap disagrees with the query")]
    BitmapMismatch { server: usize },
    #[error("query space has {size} elements, above the enumeration cap {cap}")]
    EnumerationCap { size: u128, cap: u128 },
    #[error(transparent)]
    Code(#[from] CodeError),
}
