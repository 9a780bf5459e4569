//! In-process `N`-server cluster: hosting, retrieval sessions with wire-level
//! accounting, and failure/repair with bandwidth measurement.
//!
//! Every query and response is serialized and parsed even though nothing
//! leaves the process, so the reported download is the real wire cost.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bits::{byte_capacity, bytes_to_symbols, symbols_to_bytes};
use crate::code::CodeError;
use crate::pir::{
    answer, decode_file, encode_system, response_length, DownloadTally, EncodedStore, FileMatrix, PirError,
    QueryMatrix, Response, ServerShard, SystemParams,
};
use crate::wire::{self, WireError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("expected {expected} files, got {got}")]
    FileCount { expected: usize, got: usize },
    #[error("file {file} is {len} bytes, capacity is {capacity}")]
    InputTooLong { file: usize, len: usize, capacity: usize },
    #[error("server {server} out of range for N = {n}")]
    ServerOutOfRange { server: usize, n: usize },
    #[error("server {0} has failed")]
    ShardFailed(usize),
    #[error("server {0} is already failed")]
    AlreadyFailed(usize),
    #[error("server {0} has not failed")]
    NotFailed(usize),
    #[error("at most {limit} servers may fail")]
    TooManyFailures { limit: usize },
    #[error("need {needed} distinct live helpers, got {got}")]
    InsufficientHelpers { needed: usize, got: usize },
    #[error("shard in slot {0} has the wrong index or size")]
    ShardMismatch(usize),
    #[error("sessions decoded different files")]
    Inconsistent,
    #[error(transparent)]
    Pir(#[from] PirError),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Accounting for one retrieval session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionReport {
    pub session_id: u64,
    pub theta: usize,
    /// Symbols carried in each server's response.
    pub l: Vec<usize>,
    pub total: usize,
    /// Response bits that are not symbols: headers, presence bitmap,
    /// padding.
    pub overhead_bits: u64,
    /// Decoding succeeded and every `l_i` matched its prediction from the
    /// query alone.
    pub ok: bool,
}

impl SessionReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

/// Outcome of rebuilding one failed server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairReport {
    pub failed: usize,
    pub helpers: Vec<usize>,
    /// Symbols downloaded from helpers across all stripes.
    pub bandwidth_symbols: u64,
    /// MSR-optimal bandwidth for the same stripes with `D = |helpers|`.
    pub gamma_msr: BigRational,
    pub ratio: BigRational,
}

impl RepairReport {
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "failed": self.failed,
            "helpers": self.helpers,
            "bandwidth_symbols": self.bandwidth_symbols,
            "gamma_msr": self.gamma_msr.to_string(),
            "gamma_msr_decimal": self.gamma_msr.to_f64(),
            "ratio": self.ratio.to_string(),
            "ratio_decimal": self.ratio.to_f64(),
        })
        .to_string()
    }
}

/// `N` shard slots plus cumulative accounting.
#[derive(Debug)]
pub struct Cluster {
    params: SystemParams,
    slots: Vec<Option<ServerShard>>,
    sessions: AtomicU64,
    repair_bandwidth: u64,
}

impl Cluster {
    pub fn new(params: SystemParams, store: EncodedStore) -> Result<Self, SimError> {
        Self::from_slots(params, store.into_shards().into_iter().map(Some).collect())
    }

    /// Builds a cluster in which `None` slots are failed servers.
    pub fn from_slots(params: SystemParams, slots: Vec<Option<ServerShard>>) -> Result<Self, SimError> {
        let n = params.n();
        if slots.len() != n {
            return Err(PirError::ResponseCount {
                expected: n,
                got: slots.len(),
            }
            .into());
        }
        for (i, slot) in slots.iter().enumerate() {
            if let Some(shard) = slot {
                if shard.index() != i || shard.stored_blocks() != params.m() * params.b() {
                    return Err(SimError::ShardMismatch(i));
                }
            }
        }
        let limit = n - params.k();
        if slots.iter().filter(|s| s.is_none()).count() > limit {
            return Err(SimError::TooManyFailures { limit });
        }
        Ok(Self {
            params,
            slots,
            sessions: AtomicU64::new(0),
            repair_bandwidth: 0,
        })
    }

    /// Largest file, in bytes, that fits in `L` symbols.
    pub fn file_byte_capacity(params: &SystemParams) -> usize {
        byte_capacity(params.field().width(), params.file_len())
    }

    /// Frames `M` byte strings into zero-padded files and encodes them.
    pub fn ingest<B: AsRef<[u8]>>(params: SystemParams, files: &[B]) -> Result<Self, SimError> {
        if files.len() != params.m() {
            return Err(SimError::FileCount {
                expected: params.m(),
                got: files.len(),
            });
        }
        let capacity = Self::file_byte_capacity(&params);
        let width = params.field().width();
        let matrices = files
            .iter()
            .enumerate()
            .map(|(file, bytes)| {
                let bytes = bytes.as_ref();
                let symbols = bytes_to_symbols(bytes, width, params.file_len()).ok_or(SimError::InputTooLong {
                    file,
                    len: bytes.len(),
                    capacity,
                })?;
                Ok(FileMatrix::from_symbols(&params, symbols)?)
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        let store = encode_system(&matrices, &params)?;
        Self::new(params, store)
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn shard(&self, i: usize) -> Result<&ServerShard, SimError> {
        self.slots
            .get(i)
            .ok_or(SimError::ServerOutOfRange { server: i, n: self.params.n() })?
            .as_ref()
            .ok_or(SimError::ShardFailed(i))
    }

    pub fn failed(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&i| self.slots[i].is_none()).collect()
    }

    /// Total symbols downloaded by all repairs so far.
    pub fn repair_bandwidth(&self) -> u64 {
        self.repair_bandwidth
    }

    /// Retrieves file `theta` with a freshly sampled query.
    pub fn retrieve<R: Rng + ?Sized>(&self, theta: usize, rng: &mut R) -> Result<(FileMatrix, SessionReport), SimError> {
        let q = QueryMatrix::sample(&self.params, rng);
        self.retrieve_with_query(theta, &q)
    }

    /// Runs one session with a given query matrix.
    pub fn retrieve_with_query(&self, theta: usize, q: &QueryMatrix) -> Result<(FileMatrix, SessionReport), SimError> {
        let p = &self.params;
        if theta >= p.m() {
            return Err(PirError::FileOutOfRange { theta, m: p.m() }.into());
        }
        if let Some(&i) = self.failed().first() {
            return Err(SimError::ShardFailed(i));
        }
        let width = p.field().width();
        let mut responses: Vec<Response> = Vec::with_capacity(p.n());
        let mut l = Vec::with_capacity(p.n());
        let mut overhead_bits = 0;
        let mut predicted_ok = true;
        for i in 0..p.n() {
            let sq = q.server_query(theta, i, p)?;
            let predicted = response_length(&sq, p);
            let received = wire::decode_server_query(&wire::encode_server_query(&sq), i, p)?;
            let resp = answer(self.shard(i)?, &received, p)?;
            let parsed = wire::decode_response(&wire::encode_response(&resp, width))?;
            let symbols = parsed.response.symbol_count();
            predicted_ok &= symbols == predicted;
            overhead_bits += parsed.overhead_bits;
            l.push(symbols);
            responses.push(parsed.response);
        }
        let file = decode_file(&responses, q, theta, p)?;
        let report = SessionReport {
            session_id: self.sessions.fetch_add(1, Ordering::Relaxed),
            theta,
            total: l.iter().sum(),
            l,
            overhead_bits,
            ok: predicted_ok,
        };
        Ok((file, report))
    }

    /// Retrieves file `theta` and returns its bytes, including padding.
    pub fn retrieve_bytes<R: Rng + ?Sized>(&self, theta: usize, rng: &mut R) -> Result<(Vec<u8>, SessionReport), SimError> {
        let (file, report) = self.retrieve(theta, rng)?;
        Ok((symbols_to_bytes(file.as_symbols(), self.params.field().width()), report))
    }

    /// Runs a full session for every query matrix and tallies the measured
    /// downloads. Every session must decode the same file.
    pub fn enumerate_sessions(&self, theta: usize, cap: u128) -> Result<DownloadTally, SimError> {
        let size = self.params.omega_size().unwrap_or(u128::MAX);
        if size > cap {
            return Err(PirError::EnumerationCap { size, cap }.into());
        }
        let mut tally = DownloadTally::default();
        let mut first: Option<FileMatrix> = None;
        for q in QueryMatrix::enumerate(&self.params) {
            let (file, report) = self.retrieve_with_query(theta, &q)?;
            if !report.ok || first.get_or_insert_with(|| file.clone()) != &file {
                return Err(SimError::Inconsistent);
            }
            tally.record(report.total);
        }
        Ok(tally)
    }

    /// Erases shard `i`.
    pub fn fail_server(&mut self, i: usize) -> Result<(), SimError> {
        let n = self.params.n();
        let limit = n - self.params.k();
        let slot = self.slots.get(i).ok_or(SimError::ServerOutOfRange { server: i, n })?;
        if slot.is_none() {
            return Err(SimError::AlreadyFailed(i));
        }
        if self.failed().len() >= limit {
            return Err(SimError::TooManyFailures { limit });
        }
        self.slots[i] = None;
        Ok(())
    }

    /// Rebuilds shard `i` stripe by stripe from `helpers`.
    pub fn repair_server(&mut self, i: usize, helpers: &[usize]) -> Result<RepairReport, SimError> {
        let p = &self.params;
        let (n, k, alpha) = (p.n(), p.k(), p.alpha());
        if i >= n {
            return Err(SimError::ServerOutOfRange { server: i, n });
        }
        if self.slots[i].is_some() {
            return Err(SimError::NotFailed(i));
        }
        let distinct: BTreeSet<usize> = helpers.iter().copied().collect();
        for &h in &distinct {
            self.shard(h)?;
        }
        if distinct.len() < k {
            return Err(SimError::InsufficientHelpers {
                needed: k,
                got: distinct.len(),
            });
        }
        let helpers: Vec<usize> = distinct.into_iter().collect();
        let mut data = Vec::with_capacity(p.m() * p.b() * alpha);
        let mut bandwidth = 0u64;
        for file in 0..p.m() {
            for row in 0..p.b() {
                let blocks: Vec<(usize, &[u16])> = helpers
                    .iter()
                    .map(|&h| (h, self.slots[h].as_ref().expect("checked live").block(file, row)))
                    .collect();
                let out = p.code().repair(i, &blocks)?;
                bandwidth += out.bandwidth as u64;
                data.extend_from_slice(&out.block);
            }
        }
        let shard = ServerShard::from_symbols(p, i, data)?;
        let d = helpers.len();
        let stripes = (p.m() * p.b()) as i64;
        let gamma_msr = BigRational::new(BigInt::from(stripes * (alpha * d) as i64), BigInt::from(d - k + 1));
        let ratio = BigRational::from_integer(BigInt::from(bandwidth)) / &gamma_msr;
        self.slots[i] = Some(shard);
        self.repair_bandwidth += bandwidth;
        Ok(RepairReport {
            failed: i,
            helpers,
            bandwidth_symbols: bandwidth,
            gamma_msr,
            ratio,
        })
    }

    /// The live shards, or an error naming the first failed slot.
    pub fn store(&self) -> Result<EncodedStore, SimError> {
        let shards = (0..self.slots.len())
            .map(|i| self.shard(i).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EncodedStore::from_shards(shards))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{ArrayCode, EvenOdd, StackedReedSolomon};
    use crate::field::FieldSpec;
    use crate::pir::DEFAULT_ENUMERATION_CAP;
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn rs_params(n: usize, k: usize, alpha: usize, m: usize) -> SystemParams {
        let code = StackedReedSolomon::new(n, k, alpha, FieldSpec::exceeding(n).unwrap()).unwrap();
        SystemParams::for_code(Arc::new(code), m).unwrap()
    }

    fn random_bytes(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
        (0..len).map(|_| rng.random()).collect()
    }

    fn padded(bytes: &[u8], capacity: usize) -> Vec<u8> {
        let mut v = bytes.to_vec();
        v.resize(capacity, 0);
        v
    }

    #[test]
    fn empty_single_file() {
        let p = rs_params(5, 3, 2, 1);
        let cluster = Cluster::ingest(p, &[b""]).unwrap();
        for i in 0..5 {
            assert!(cluster.shard(i).unwrap().as_symbols().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn byte_round_trip() {
        let p = rs_params(5, 3, 4, 3);
        let cap = Cluster::file_byte_capacity(&p);
        // L = 4 * 2 * 3 = 24 symbols of 3 bits
        assert_eq!(cap, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let files = [random_bytes(&mut rng, 9), random_bytes(&mut rng, 4), Vec::new()];
        let cluster = Cluster::ingest(p, &files).unwrap();
        for (theta, f) in files.iter().enumerate() {
            let (bytes, report) = cluster.retrieve_bytes(theta, &mut rng).unwrap();
            assert_eq!(bytes, padded(f, cap));
            assert!(report.ok);
            assert_eq!(report.total, report.l.iter().sum::<usize>());
        }
    }

    #[test]
    fn ingest_errors() {
        let p = rs_params(5, 3, 1, 2);
        assert!(matches!(Cluster::ingest(p.clone(), &[b"x"]), Err(SimError::FileCount { .. })));
        let big = vec![0u8; Cluster::file_byte_capacity(&p) + 1];
        assert!(matches!(
            Cluster::ingest(p, &[big.as_slice(), b""]),
            Err(SimError::InputTooLong { file: 0, .. })
        ));
    }

    #[test]
    fn worked_example_session() {
        for alpha in [1, 2, 4] {
            let p = rs_params(5, 3, alpha, 2);
            let cluster = Cluster::ingest(p.clone(), &[b"ab", b"cd"]).unwrap();
            let q = QueryMatrix::from_rows(&p, &[[0, 2, 4], [1, 3, 0]]).unwrap();
            let (_, report) = cluster.retrieve_with_query(0, &q).unwrap();
            assert_eq!(report.total, 12 * alpha);
            assert_eq!(report.l, [2 * alpha, 2 * alpha, 2 * alpha, 3 * alpha, 3 * alpha]);
            assert!(report.ok);
            assert!(cluster.retrieve_with_query(2, &q).is_err());
        }
    }

    #[test]
    fn session_ids_increase() {
        let p = rs_params(4, 2, 1, 2);
        let cluster = Cluster::ingest(p, &[b"", b""]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ids: Vec<_> = (0..3).map(|_| cluster.retrieve(1, &mut rng).unwrap().1.session_id).collect();
        assert_eq!(ids, [0, 1, 2]);
        let line = cluster.retrieve(0, &mut rng).unwrap().1.to_json_line();
        assert!(line.starts_with("{\"session_id\":3,\"theta\":0,\"l\":["));
    }

    #[test]
    fn exhaustive_sessions_match_expectation() {
        let p = rs_params(5, 3, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cluster = Cluster::ingest(p, &[random_bytes(&mut rng, 4), random_bytes(&mut rng, 4)]).unwrap();
        let tally = cluster.enumerate_sessions(1, DEFAULT_ENUMERATION_CAP).unwrap();
        let expected = crate::analysis::expected_download(5, 3, 2, 2).unwrap();
        assert_eq!(tally.mean().unwrap(), expected);
    }

    #[test]
    fn failure_limits() {
        let p = rs_params(5, 3, 1, 2);
        let mut cluster = Cluster::ingest(p, &[b"", b""]).unwrap();
        cluster.fail_server(1).unwrap();
        assert!(matches!(cluster.shard(1), Err(SimError::ShardFailed(1))));
        assert!(matches!(cluster.fail_server(1), Err(SimError::AlreadyFailed(1))));
        cluster.fail_server(3).unwrap();
        assert!(matches!(cluster.fail_server(0), Err(SimError::TooManyFailures { limit: 2 })));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(cluster.retrieve(0, &mut rng), Err(SimError::ShardFailed(1))));
        assert!(matches!(cluster.fail_server(5), Err(SimError::ServerOutOfRange { .. })));
    }

    #[test]
    fn repair_restores_every_shard() {
        let codes: Vec<Arc<dyn ArrayCode>> = vec![
            Arc::new(StackedReedSolomon::new(5, 3, 1, FieldSpec::new(3).unwrap()).unwrap()),
            Arc::new(StackedReedSolomon::new(7, 3, 2, FieldSpec::new(3).unwrap()).unwrap()),
            Arc::new(EvenOdd::new(3, 5).unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for code in codes {
            let p = SystemParams::for_code(code, 2).unwrap();
            let cap = Cluster::file_byte_capacity(&p);
            let files = [random_bytes(&mut rng, cap), random_bytes(&mut rng, cap)];
            let mut cluster = Cluster::ingest(p.clone(), &files).unwrap();
            let before = cluster.store().unwrap();
            let q = QueryMatrix::sample(&p, &mut rng);
            let (file_before, _) = cluster.retrieve_with_query(1, &q).unwrap();
            for i in 0..p.n() {
                cluster.fail_server(i).unwrap();
                let helpers: Vec<usize> = (0..p.n()).filter(|&h| h != i).collect();
                let report = cluster.repair_server(i, &helpers).unwrap();
                assert_eq!(cluster.shard(i).unwrap(), before.shard(i));
                assert_eq!(report.bandwidth_symbols as usize, p.m() * p.b() * p.k() * p.alpha());
                let (n, k) = (p.n() as i64, p.k() as i64);
                assert_eq!(report.ratio, BigRational::new(BigInt::from(k * (n - k)), BigInt::from(n - 1)));
            }
            assert_eq!(cluster.retrieve_with_query(1, &q).unwrap().0, file_before);
        }
    }

    #[test]
    fn repair_at_worked_example() {
        let p = rs_params(5, 3, 1, 2);
        let mut cluster = Cluster::ingest(p, &[b"", b""]).unwrap();
        cluster.fail_server(2).unwrap();
        let report = cluster.repair_server(2, &[0, 1, 3, 4]).unwrap();
        assert_eq!(report.bandwidth_symbols, 12);
        assert_eq!(report.ratio, BigRational::new(3.into(), 2.into()));
        assert_eq!(report.gamma_msr, BigRational::from_integer(8.into()));
        assert!(report.to_json_line().contains("\"ratio\":\"3/2\""));
        // D = K: full-download repair is optimal
        cluster.fail_server(0).unwrap();
        let report = cluster.repair_server(0, &[1, 2, 3]).unwrap();
        assert!(report.ratio.is_one());
        assert_eq!(cluster.repair_bandwidth(), 24);
    }

    #[test]
    fn repair_errors() {
        let p = rs_params(5, 3, 1, 2);
        let mut cluster = Cluster::ingest(p, &[b"", b""]).unwrap();
        assert!(matches!(cluster.repair_server(0, &[1, 2, 3]), Err(SimError::NotFailed(0))));
        cluster.fail_server(0).unwrap();
        cluster.fail_server(1).unwrap();
        assert!(matches!(cluster.repair_server(0, &[1, 2, 3]), Err(SimError::ShardFailed(1))));
        assert!(matches!(
            cluster.repair_server(0, &[2, 3, 3]),
            Err(SimError::InsufficientHelpers { needed: 3, got: 2 })
        ));
        assert!(matches!(cluster.repair_server(0, &[0, 2, 3]), Err(SimError::ShardFailed(0))));
    }
}
