//! `(N, K, alpha)` MDS array codes.
//!
//! A codeword is an `alpha x N` array over GF(2^w): `N` blocks (columns) of
//! `alpha` symbols each, of which the first `K` carry the data verbatim. Any
//! `K` blocks determine the rest. Codes are described by a systematic
//! generator matrix ([`GeneratorMatrix`]) of shape `K*alpha x N*alpha`, and
//! everything else (encoding, erasure decoding, repair) is derived from it.
//!
//! Two families ship with the crate:
//!
//! * [`StackedReedSolomon`]: `alpha` independent systematic Reed-Solomon
//!   codewords stacked row-wise, over any GF(2^w) with `2^w > N`.
//! * [`EvenOdd`]: the binary EVENODD code with two parity columns.
//!
//! Other constructions plug in by implementing [`ArrayCode`].

mod descriptor;
mod evenodd;
mod stacked_rs;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use itertools::Itertools;
use thiserror::Error;

use crate::field::{FieldError, FieldSpec};
use crate::matrix::Matrix;

pub use descriptor::{CodeDescriptor, DescriptorError};
pub use evenodd::EvenOdd;
pub use stacked_rs::StackedReedSolomon;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("GF(2^{width}) has {order} elements but the code needs more than {n}")]
    FieldTooSmall { width: u8, order: usize, n: usize },
    #[error("{0} is not an odd prime")]
    NotPrime(usize),
    #[error("expected {expected} symbols, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("column {column} out of range for a code of length {n}")]
    ColumnOutOfRange { column: usize, n: usize },
    #[error("column {0} supplied more than once")]
    DuplicateColumn(usize),
    #[error("need at least {needed} distinct columns, got {got}")]
    InsufficientColumns { needed: usize, got: usize },
    #[error("supplied blocks are not consistent with a single codeword (column {0} disagrees)")]
    Inconsistent(usize),
    #[error("failed column {0} cannot also be a helper")]
    FailedIsHelper(usize),
    #[error("generator restricted to columns {0:?} is singular")]
    Singular(Vec<usize>),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Shape of an `(N, K, alpha)` array code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub field: FieldSpec,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, alpha: usize, field: FieldSpec) -> Result<Self, CodeError> {
        if k == 0 || k >= n {
            return Err(CodeError::InvalidParams(format!(
                "need 0 < K < N, got N={n}, K={k}"
            )));
        }
        if alpha == 0 {
            return Err(CodeError::InvalidParams("alpha must be at least 1".into()));
        }
        Ok(Self { n, k, alpha, field })
    }
}

/// `K` data blocks of `alpha` symbols, stored block after block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripe {
    alpha: usize,
    data: Vec<u16>,
}

impl Stripe {
    pub fn new(alpha: usize, data: Vec<u16>) -> Self {
        assert!(alpha > 0 && data.len().is_multiple_of(alpha), "stripe is not whole blocks");
        Self { alpha, data }
    }

    pub fn zeros(k: usize, alpha: usize) -> Self {
        Self::new(alpha, vec![0; k * alpha])
    }

    pub fn from_blocks<B: AsRef<[u16]>>(blocks: &[B]) -> Self {
        let alpha = blocks.first().map(|b| b.as_ref().len()).unwrap_or(1);
        let data = blocks.iter().flat_map(|b| b.as_ref().iter().copied()).collect();
        Self::new(alpha, data)
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn num_blocks(&self) -> usize {
        self.data.len() / self.alpha
    }

    pub fn block(&self, j: usize) -> &[u16] {
        &self.data[j * self.alpha..(j + 1) * self.alpha]
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u16> {
        self.data
    }
}

/// `N` blocks of `alpha` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    alpha: usize,
    data: Vec<u16>,
}

impl Codeword {
    pub fn new(alpha: usize, data: Vec<u16>) -> Self {
        assert!(alpha > 0 && data.len().is_multiple_of(alpha), "codeword is not whole blocks");
        Self { alpha, data }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.alpha
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn block(&self, c: usize) -> &[u16] {
        &self.data[c * self.alpha..(c + 1) * self.alpha]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[u16]> {
        self.data.chunks(self.alpha)
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.data
    }
}

/// Outcome of rebuilding one column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub block: Vec<u16>,
    /// Helper columns actually read.
    pub read_from: Vec<usize>,
    /// Symbols downloaded from helpers.
    pub bandwidth: usize,
}

/// Systematic generator matrix `G` of an `(N, K, alpha)` array code, seen as
/// a `K x N` grid of `alpha x alpha` blocks.
///
/// Decoding matrices for each column subset are computed on first use and
/// cached; the cache never changes what any method returns.
pub struct GeneratorMatrix {
    params: CodeParams,
    matrix: Matrix,
    decoders: RwLock<HashMap<Vec<usize>, Arc<Matrix>>>,
}

impl fmt::Debug for GeneratorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorMatrix")
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl Clone for GeneratorMatrix {
    fn clone(&self) -> Self {
        Self::new(self.params, self.matrix.clone()).expect("already validated")
    }
}

impl GeneratorMatrix {
    /// Wraps a full `K*alpha x N*alpha` matrix, checking systematic form.
    pub fn new(params: CodeParams, matrix: Matrix) -> Result<Self, CodeError> {
        let (ka, na) = (params.k * params.alpha, params.n * params.alpha);
        if matrix.rows() != ka || matrix.cols() != na {
            return Err(CodeError::DimensionMismatch {
                expected: ka * na,
                got: matrix.rows() * matrix.cols(),
            });
        }
        for r in 0..ka {
            for c in 0..ka {
                if matrix.get(r, c) != (r == c) as u16 {
                    return Err(CodeError::InvalidParams(
                        "generator is not systematic in the first K block-columns".into(),
                    ));
                }
            }
        }
        Ok(Self {
            params,
            matrix,
            decoders: RwLock::new(HashMap::new()),
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// The `alpha x alpha` block in block-row `r`, block-column `c`.
    pub fn block(&self, r: usize, c: usize) -> Matrix {
        let a = self.params.alpha;
        let mut out = Matrix::zeros(a, a);
        for i in 0..a {
            for j in 0..a {
                out.set(i, j, self.matrix.get(r * a + i, c * a + j));
            }
        }
        out
    }

    fn scalar_columns(&self, block_cols: &[usize]) -> Vec<usize> {
        let a = self.params.alpha;
        block_cols
            .iter()
            .flat_map(|&c| (c * a)..((c + 1) * a))
            .collect()
    }

    /// `Kalpha x Kalpha` restriction of `G` to the given block-columns.
    pub fn restrict(&self, block_cols: &[usize]) -> Matrix {
        self.matrix.select_columns(&self.scalar_columns(block_cols))
    }

    pub fn encode(&self, stripe: &Stripe) -> Result<Codeword, CodeError> {
        let CodeParams { n, k, alpha, field } = self.params;
        if stripe.alpha() != alpha || stripe.as_slice().len() != k * alpha {
            return Err(CodeError::DimensionMismatch {
                expected: k * alpha,
                got: stripe.as_slice().len(),
            });
        }
        let f = field.field();
        let mut out = vec![0u16; n * alpha];
        out[..k * alpha].copy_from_slice(stripe.as_slice());
        let (_, parity) = out.split_at_mut(k * alpha);
        for (row, &s) in stripe.as_slice().iter().enumerate() {
            if s != 0 {
                f.mul_add_slice(parity, &self.matrix.row(row)[k * alpha..], s);
            }
        }
        Ok(Codeword::new(alpha, out))
    }

    fn decoder_for(&self, cols: &[usize]) -> Result<Arc<Matrix>, CodeError> {
        if let Some(m) = self.decoders.read().expect("decoder cache poisoned").get(cols) {
            return Ok(m.clone());
        }
        let inv = self
            .restrict(cols)
            .inverse(self.params.field.field())
            .ok_or_else(|| CodeError::Singular(cols.to_vec()))?;
        let inv = Arc::new(inv);
        self.decoders
            .write()
            .expect("decoder cache poisoned")
            .insert(cols.to_vec(), inv.clone());
        Ok(inv)
    }

    /// Recovers the stripe from at least `K` blocks. The `K` lowest-indexed
    /// columns are used to solve; any further blocks must agree with the
    /// result.
    pub fn decode(&self, available: &[(usize, &[u16])]) -> Result<Stripe, CodeError> {
        let CodeParams { n, k, alpha, field } = self.params;
        let mut seen = BTreeSet::new();
        for &(c, block) in available {
            if c >= n {
                return Err(CodeError::ColumnOutOfRange { column: c, n });
            }
            if block.len() != alpha {
                return Err(CodeError::DimensionMismatch {
                    expected: alpha,
                    got: block.len(),
                });
            }
            if !seen.insert(c) {
                return Err(CodeError::DuplicateColumn(c));
            }
        }
        if seen.len() < k {
            return Err(CodeError::InsufficientColumns {
                needed: k,
                got: seen.len(),
            });
        }
        let mut sorted: Vec<(usize, &[u16])> = available.to_vec();
        sorted.sort_by_key(|&(c, _)| c);
        let (solve, check) = sorted.split_at(k);
        let cols: Vec<usize> = solve.iter().map(|&(c, _)| c).collect();

        let stripe = if cols.iter().copied().eq(0..k) {
            Stripe::new(alpha, solve.iter().flat_map(|&(_, b)| b.iter().copied()).collect())
        } else {
            let y: Vec<u16> = solve.iter().flat_map(|&(_, b)| b.iter().copied()).collect();
            let inv = self.decoder_for(&cols)?;
            Stripe::new(alpha, inv.left_mul_vec(&y, field.field()))
        };

        if !check.is_empty() {
            let cw = self.encode(&stripe)?;
            for &(c, block) in check {
                if cw.block(c) != block {
                    return Err(CodeError::Inconsistent(c));
                }
            }
        }
        Ok(stripe)
    }

    /// Column subsets of size `K` whose restriction is singular. Empty iff
    /// the code is MDS.
    pub fn singular_subsets(&self) -> Vec<Vec<usize>> {
        let CodeParams { n, k, field, .. } = self.params;
        let f = field.field();
        (0..n)
            .combinations(k)
            .filter(|cols| {
                let m = self.restrict(cols);
                m.rank(f) < m.rows()
            })
            .collect()
    }

    pub fn is_mds(&self) -> bool {
        self.singular_subsets().is_empty()
    }
}

/// An `(N, K, alpha)` linear MDS array code in systematic form.
///
/// Implementors supply parameters and a generator; the provided methods give
/// encoding, erasure decoding and a decode-then-reencode repair that reads
/// `alpha` symbols from each of `K` helpers. Codes with cheaper repair
/// override [`ArrayCode::repair`].
pub trait ArrayCode: fmt::Debug + Send + Sync {
    fn params(&self) -> &CodeParams;

    fn generator(&self) -> &GeneratorMatrix;

    fn descriptor(&self) -> CodeDescriptor;

    fn encode_stripe(&self, stripe: &Stripe) -> Result<Codeword, CodeError> {
        self.generator().encode(stripe)
    }

    fn erasure_decode(&self, available: &[(usize, &[u16])]) -> Result<Stripe, CodeError> {
        self.generator().decode(available)
    }

    /// All `N` blocks of the codeword determined by `available`.
    fn reencode_full(&self, available: &[(usize, &[u16])]) -> Result<Codeword, CodeError> {
        let stripe = self.erasure_decode(available)?;
        self.encode_stripe(&stripe)
    }

    /// Rebuilds column `failed` from helper blocks.
    fn repair(
        &self,
        failed: usize,
        helpers: &[(usize, &[u16])],
    ) -> Result<RepairOutcome, CodeError> {
        let CodeParams { n, k, alpha, .. } = *self.params();
        if failed >= n {
            return Err(CodeError::ColumnOutOfRange { column: failed, n });
        }
        if helpers.iter().any(|&(c, _)| c == failed) {
            return Err(CodeError::FailedIsHelper(failed));
        }
        let distinct: BTreeSet<usize> = helpers.iter().map(|&(c, _)| c).collect();
        if distinct.len() < k {
            return Err(CodeError::InsufficientColumns {
                needed: k,
                got: distinct.len(),
            });
        }
        let mut chosen: Vec<(usize, &[u16])> = helpers.to_vec();
        chosen.sort_by_key(|&(c, _)| c);
        chosen.dedup_by_key(|&mut (c, _)| c);
        chosen.truncate(k);
        let cw = self.reencode_full(&chosen)?;
        Ok(RepairOutcome {
            block: cw.block(failed).to_vec(),
            read_from: chosen.iter().map(|&(c, _)| c).collect(),
            bandwidth: k * alpha,
        })
    }
}
