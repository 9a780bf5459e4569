use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{response_length, PirError, QueryMatrix, SystemParams};

/// Default bound on `|Omega|` for exhaustive checks.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

fn enumerable(params: &SystemParams, cap: u128) -> Result<u128, PirError> {
    let size = params.omega_size().unwrap_or(u128::MAX);
    if size > cap {
        return Err(PirError::EnumerationCap { size, cap });
    }
    Ok(size)
}

/// Result of [`privacy_enumeration_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivacyVerdict {
    pub omega_size: u128,
    /// `(server, theta)` pairs whose query map is not a permutation of the
    /// query space.
    pub non_bijective: Vec<(usize, usize)>,
    /// `(server, theta0, theta1)` triples with differing query multisets.
    pub distinguishable: Vec<(usize, usize, usize)>,
}

impl PrivacyVerdict {
    pub fn holds(&self) -> bool {
        self.non_bijective.is_empty() && self.distinguishable.is_empty()
    }
}

/// Exhaustively checks that, for every server, the query it receives has
/// the same distribution whichever file is requested.
///
/// For each `(server, theta)` the map `Q -> Q^(server, theta)` is applied to
/// all of the query space; the resulting multisets are compared across
/// `theta`, and each is also checked to be the query space itself.
pub fn privacy_enumeration_check(params: &SystemParams, cap: u128) -> Result<PrivacyVerdict, PirError> {
    let omega_size = enumerable(params, cap)?;
    let omega: Vec<QueryMatrix> = QueryMatrix::enumerate(params).collect();
    let mut sorted_omega: Vec<&[usize]> = omega.iter().map(|q| q.entries()).collect();
    sorted_omega.sort_unstable();

    let mut verdict = PrivacyVerdict {
        omega_size,
        non_bijective: Vec::new(),
        distinguishable: Vec::new(),
    };
    for server in 0..params.n() {
        let mut images: Vec<Vec<Vec<usize>>> = Vec::with_capacity(params.m());
        for theta in 0..params.m() {
            let mut image: Vec<Vec<usize>> = omega
                .iter()
                .map(|q| Ok(q.server_query(theta, server, params)?.entries().to_vec()))
                .collect::<Result<_, PirError>>()?;
            image.sort_unstable();
            if !image.iter().map(Vec::as_slice).eq(sorted_omega.iter().copied()) {
                verdict.non_bijective.push((server, theta));
            }
            images.push(image);
        }
        for t0 in 0..params.m() {
            for t1 in (t0 + 1)..params.m() {
                if images[t0] != images[t1] {
                    verdict.distinguishable.push((server, t0, t1));
                }
            }
        }
    }
    Ok(verdict)
}

/// Checks by enumeration that every column of every server query is
/// uniform on `[0, B+S)^M` when the query matrix is uniform.
pub fn marginal_uniformity_check(params: &SystemParams, cap: u128) -> Result<bool, PirError> {
    let omega_size = enumerable(params, cap)?;
    let cells = (params.zone() as u128).pow(params.m() as u32);
    if omega_size % cells != 0 {
        return Ok(false);
    }
    let expected = (omega_size / cells) as usize;
    let omega: Vec<QueryMatrix> = QueryMatrix::enumerate(params).collect();
    for server in 0..params.n() {
        for theta in 0..params.m() {
            for j in 0..params.s() {
                let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
                for q in &omega {
                    let sq = q.server_query(theta, server, params)?;
                    *counts.entry(sq.column(j).collect()).or_default() += 1;
                }
                if counts.len() as u128 != cells || counts.values().any(|&c| c != expected) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Total download summed over a set of sessions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DownloadTally {
    pub sessions: u128,
    pub total_symbols: u128,
}

impl DownloadTally {
    pub fn record(&mut self, symbols: usize) {
        self.sessions += 1;
        self.total_symbols += symbols as u128;
    }

    /// Exact mean download per session.
    pub fn mean(&self) -> Option<BigRational> {
        (self.sessions > 0).then(|| {
            BigRational::new(BigInt::from(self.total_symbols), BigInt::from(self.sessions))
        })
    }
}

/// Sums the predicted download `sum_i l_i` over every query matrix.
pub fn download_enumeration(
    params: &SystemParams,
    theta: usize,
    cap: u128,
) -> Result<DownloadTally, PirError> {
    enumerable(params, cap)?;
    let mut tally = DownloadTally::default();
    for q in QueryMatrix::enumerate(params) {
        let mut total = 0;
        for i in 0..params.n() {
            total += response_length(&q.server_query(theta, i, params)?, params);
        }
        tally.record(total);
    }
    Ok(tally)
}
