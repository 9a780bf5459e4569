use crate::field::add_slice;

use super::{PirError, ServerQuery, ServerShard, SystemParams};

/// One server's answer: an `alpha`-symbol block for every query column that
/// is not known to be zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    alpha: usize,
    present: Vec<bool>,
    data: Vec<u16>,
}

impl Response {
    /// `data` holds the present blocks back to back, in column order.
    pub fn new(alpha: usize, present: Vec<bool>, data: Vec<u16>) -> Result<Self, PirError> {
        let expected = alpha * present.iter().filter(|&&p| p).count();
        if alpha == 0 || data.len() != expected {
            return Err(PirError::DimensionMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(Self {
            alpha,
            present,
            data,
        })
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn present(&self) -> &[bool] {
        &self.present
    }

    /// Block for column `j`, or `None` if the server pruned it.
    pub fn block(&self, j: usize) -> Option<&[u16]> {
        if !self.present[j] {
            return None;
        }
        let idx = self.present[..j].iter().filter(|&&p| p).count();
        Some(&self.data[idx * self.alpha..(idx + 1) * self.alpha])
    }

    /// Symbols actually carried.
    pub fn symbol_count(&self) -> usize {
        self.data.len()
    }

    pub fn symbols(&self) -> &[u16] {
        &self.data
    }
}

/// Columns a server omits: every entry addresses a virtual zero row.
pub fn prunable_columns(sq: &ServerQuery, params: &SystemParams) -> Vec<bool> {
    (0..sq.cols())
        .map(|c| sq.column(c).all(|v| v >= params.b()))
        .collect()
}

/// Symbols in the response to `sq`: `alpha` per column whose smallest entry
/// is below `B`.
pub fn response_length(sq: &ServerQuery, params: &SystemParams) -> usize {
    params.alpha() * prunable_columns(sq, params).iter().filter(|&&p| !p).count()
}

/// Server-side evaluation: column `j` of the answer is the sum over all `M`
/// files `l` of block `Y^l_{sq[l][j], i}`.
///
/// The server cannot tell which row was shifted, so every row is treated
/// alike; zero virtual rows make this equal to the designated/interference
/// split the client reasons about.
pub fn answer(
    shard: &ServerShard,
    sq: &ServerQuery,
    params: &SystemParams,
) -> Result<Response, PirError> {
    sq.validate(params)?;
    let alpha = params.alpha();
    let pruned = prunable_columns(sq, params);
    let mut data = Vec::with_capacity(alpha * pruned.iter().filter(|&&p| !p).count());
    for (j, &skip) in pruned.iter().enumerate() {
        if skip {
            continue;
        }
        let mut acc = vec![0u16; alpha];
        for (l, row) in sq.column(j).enumerate() {
            add_slice(&mut acc, shard.block(l, row));
        }
        data.extend_from_slice(&acc);
    }
    Response::new(alpha, pruned.into_iter().map(|p| !p).collect(), data)
}
