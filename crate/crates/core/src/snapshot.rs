//! On-disk cluster snapshots: a JSON manifest plus one packed file per shard.
//!
//! Shard files hold the stored symbols, `w` bits each, most significant bit
//! first, zero-padded to a byte. The manifest records the code descriptor,
//! the original file lengths and a SHA-256 digest per shard file. Files are
//! written to a temporary name and renamed into place.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bits::{pack_symbols, unpack_symbols};
use crate::code::{CodeDescriptor, CodeError};
use crate::pir::{PirError, ServerShard, SystemParams};
use crate::sim::{Cluster, SimError};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("unsupported snapshot format {0}")]
    Version(u32),
    #[error("manifest lists {got} shards, code has {expected}")]
    ShardCount { expected: usize, got: usize },
    #[error("shard {index} does not match its recorded digest")]
    DigestMismatch { index: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Pir(#[from] PirError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SnapshotError + '_ {
    move |source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardEntry {
    pub index: usize,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub code: CodeDescriptor,
    pub m: usize,
    /// Sub-stripes per file.
    pub b: usize,
    /// Symbols per file.
    pub file_len: usize,
    /// Original byte length of each file before padding.
    pub file_bytes: Vec<usize>,
    pub shards: Vec<ShardEntry>,
}

impl Manifest {
    pub fn params(&self) -> Result<SystemParams, SnapshotError> {
        let params = SystemParams::for_code(self.code.build()?, self.m)?;
        if self.shards.len() != params.n() {
            return Err(SnapshotError::ShardCount {
                expected: params.n(),
                got: self.shards.len(),
            });
        }
        Ok(params)
    }
}

pub fn shard_file_name(index: usize) -> String {
    format!("shard-{index}.bin")
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn shard_bytes(shard: &ServerShard, params: &SystemParams) -> Vec<u8> {
    pack_symbols(shard.as_symbols(), params.field().width())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SnapshotError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Writes every shard and the manifest into `dir`, creating it if needed.
pub fn write_snapshot(
    dir: &Path,
    cluster: &Cluster,
    code: &CodeDescriptor,
    file_bytes: Vec<usize>,
) -> Result<Manifest, SnapshotError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let params = cluster.params();
    let mut shards = Vec::with_capacity(params.n());
    for i in 0..params.n() {
        let bytes = shard_bytes(cluster.shard(i)?, params);
        let file = shard_file_name(i);
        write_atomic(&dir.join(&file), &bytes)?;
        shards.push(ShardEntry {
            index: i,
            file,
            sha256: digest(&bytes),
        });
    }
    let manifest = Manifest {
        format: FORMAT_VERSION,
        code: *code,
        m: params.m(),
        b: params.b(),
        file_len: params.file_len(),
        file_bytes,
        shards,
    };
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), SnapshotError> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, SnapshotError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    if manifest.format != FORMAT_VERSION {
        return Err(SnapshotError::Version(manifest.format));
    }
    Ok(manifest)
}

/// Loads shard `index`, checking its digest.
pub fn read_shard(dir: &Path, manifest: &Manifest, params: &SystemParams, index: usize) -> Result<ServerShard, SnapshotError> {
    let entry = &manifest.shards[index];
    let path = dir.join(&entry.file);
    let bytes = fs::read(&path).map_err(io_err(&path))?;
    if digest(&bytes) != entry.sha256 {
        return Err(SnapshotError::DigestMismatch { index });
    }
    let count = params.m() * params.b() * params.alpha();
    let symbols = unpack_symbols(&bytes, params.field().width(), count).ok_or(SnapshotError::DigestMismatch { index })?;
    Ok(ServerShard::from_symbols(params, index, symbols)?)
}

/// Loads a snapshot. Shards whose file is missing or fails its digest are
/// returned as failed slots, up to the cluster's failure limit.
pub fn load_cluster(dir: &Path) -> Result<(Manifest, Cluster), SnapshotError> {
    let manifest = read_manifest(dir)?;
    let params = manifest.params()?;
    let mut slots = Vec::with_capacity(params.n());
    for i in 0..params.n() {
        slots.push(match read_shard(dir, &manifest, &params, i) {
            Ok(shard) => Some(shard),
            Err(SnapshotError::DigestMismatch { .. }) => None,
            Err(SnapshotError::Io { source, .. }) if source.kind() == io::ErrorKind::NotFound => None,
            Err(e) => return Err(e),
        });
    }
    Ok((manifest, Cluster::from_slots(params, slots)?))
}
