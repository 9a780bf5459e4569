use rand::Rng;

use crate::code::Stripe;

use super::{PirError, SystemParams};

/// One file as a `B x K` grid of `alpha`-symbol blocks, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileMatrix {
    b: usize,
    k: usize,
    alpha: usize,
    data: Vec<u16>,
}

impl FileMatrix {
    pub fn from_symbols(params: &SystemParams, data: Vec<u16>) -> Result<Self, PirError> {
        if data.len() != params.file_len() {
            return Err(PirError::DimensionMismatch {
                expected: params.file_len(),
                got: data.len(),
            });
        }
        let order = params.field().order();
        if let Some(&bad) = data.iter().find(|&&s| s as usize >= order) {
            return Err(PirError::SymbolOutOfRange(bad));
        }
        Ok(Self {
            b: params.b(),
            k: params.k(),
            alpha: params.alpha(),
            data,
        })
    }

    pub fn zeros(params: &SystemParams) -> Self {
        Self::from_symbols(params, vec![0; params.file_len()]).expect("zero file fits")
    }

    pub fn random<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Self {
        let q = params.field().order() as u32;
        let data = (0..params.file_len())
            .map(|_| rng.random_range(0..q) as u16)
            .collect();
        Self::from_symbols(params, data).expect("random symbols are in range")
    }

    /// `W_{j,l}`.
    pub fn block(&self, j: usize, l: usize) -> &[u16] {
        let start = (j * self.k + l) * self.alpha;
        &self.data[start..start + self.alpha]
    }

    /// The `j`-th sub-stripe `(W_{j,0}, ..., W_{j,K-1})`.
    pub fn sub_stripe(&self, j: usize) -> Stripe {
        let len = self.k * self.alpha;
        Stripe::new(self.alpha, self.data[j * len..(j + 1) * len].to_vec())
    }

    pub fn rows(&self) -> usize {
        self.b
    }

    pub fn as_symbols(&self) -> &[u16] {
        &self.data
    }

    pub fn into_symbols(self) -> Vec<u16> {
        self.data
    }

    pub(crate) fn from_sub_stripes(
        params: &SystemParams,
        stripes: Vec<Stripe>,
    ) -> Result<Self, PirError> {
        let data = stripes.into_iter().flat_map(Stripe::into_vec).collect();
        Self::from_symbols(params, data)
    }
}

/// Column `i` of the coded store: `Y^l_{j,i}` for every file `l` and
/// sub-stripe `j < B`. Rows `B..B+S` read as zero blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerShard {
    index: usize,
    m: usize,
    b: usize,
    zone: usize,
    alpha: usize,
    data: Vec<u16>,
    zero: Vec<u16>,
}

impl ServerShard {
    /// Rebuilds a shard from its stored symbols (file-major, then row).
    pub fn from_symbols(
        params: &SystemParams,
        index: usize,
        data: Vec<u16>,
    ) -> Result<Self, PirError> {
        if index >= params.n() {
            return Err(PirError::ServerOutOfRange {
                server: index,
                n: params.n(),
            });
        }
        let expected = params.m() * params.b() * params.alpha();
        if data.len() != expected {
            return Err(PirError::DimensionMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(Self {
            index,
            m: params.m(),
            b: params.b(),
            zone: params.zone(),
            alpha: params.alpha(),
            data,
            zero: vec![0; params.alpha()],
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// `Y^file_{row, index}`; rows in `[B, B+S)` are the zero block.
    ///
    /// Panics if `file >= M` or `row >= B + S`.
    pub fn block(&self, file: usize, row: usize) -> &[u16] {
        assert!(file < self.m && row < self.zone, "block ({file}, {row}) out of range");
        if row >= self.b {
            return &self.zero;
        }
        let start = (file * self.b + row) * self.alpha;
        &self.data[start..start + self.alpha]
    }

    /// Stored symbols, without the virtual rows.
    pub fn as_symbols(&self) -> &[u16] {
        &self.data
    }

    pub fn stored_blocks(&self) -> usize {
        self.m * self.b
    }
}

/// The `N` shards of an encoded system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedStore {
    shards: Vec<ServerShard>,
}

impl EncodedStore {
    pub fn from_shards(shards: Vec<ServerShard>) -> Self {
        Self { shards }
    }

    pub fn shards(&self) -> &[ServerShard] {
        &self.shards
    }

    pub fn shard(&self, i: usize) -> &ServerShard {
        &self.shards[i]
    }

    pub fn into_shards(self) -> Vec<ServerShard> {
        self.shards
    }
}

/// Encodes every sub-stripe of every file and distributes column `i` of each
/// codeword to server `i`.
pub fn encode_system(files: &[FileMatrix], params: &SystemParams) -> Result<EncodedStore, PirError> {
    if files.len() != params.m() {
        return Err(PirError::FileCount {
            expected: params.m(),
            got: files.len(),
        });
    }
    let (n, b, alpha) = (params.n(), params.b(), params.alpha());
    let mut columns = vec![Vec::with_capacity(params.m() * b * alpha); n];
    for file in files {
        if (file.b, file.k, file.alpha) != (b, params.k(), alpha) {
            return Err(PirError::DimensionMismatch {
                expected: params.file_len(),
                got: file.data.len(),
            });
        }
        for j in 0..b {
            let cw = params.code().encode_stripe(&file.sub_stripe(j))?;
            for (col, block) in columns.iter_mut().zip(cw.blocks()) {
                col.extend_from_slice(block);
            }
        }
    }
    let shards = columns
        .into_iter()
        .enumerate()
        .map(|(i, data)| ServerShard::from_symbols(params, i, data))
        .collect::<Result<_, _>>()?;
    Ok(EncodedStore { shards })
}
