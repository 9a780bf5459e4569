//! Capacity-achieving private information retrieval from servers that store
//! files under an MDS array code.
//!
//! Each of `M` files is split into sub-stripes of `K` blocks, every
//! sub-stripe is encoded with an `(N, K, alpha)` array code, and server `i`
//! keeps column `i` of every codeword. A user who wants file `theta` sends
//! every server a shifted copy of one random query matrix; the servers sum
//! the addressed blocks, omit columns that are known to be zero, and the
//! user strips the interference and erasure-decodes. No single server learns
//! `theta`, and the mean download meets the MDS-coded PIR capacity.
//!
//! Modules, bottom up:
//!
//! - [`field`]: `GF(2^w)` arithmetic for `w <= 16`.
//! - [`matrix`]: dense matrices over those fields.
//! - [`code`]: the [`code::ArrayCode`] trait with stacked Reed-Solomon and
//!   binary EVENODD instances.
//! - [`pir`]: parameters, query sampling, server answers and decoding,
//!   plus exhaustive privacy checks.
//! - [`wire`]: bit-exact query and response messages.
//! - [`sim`]: an in-process cluster with download and repair accounting.
//! - [`snapshot`]: cluster snapshots on disk.
//! - [`analysis`]: capacities, regenerating-code bounds and the protocol
//!   comparison, in exact rationals.
//!
//! ```
//! use std::sync::Arc;
//! use mds_pir::code::StackedReedSolomon;
//! use mds_pir::field::FieldSpec;
//! use mds_pir::pir::SystemParams;
//! use mds_pir::sim::Cluster;
//! use rand::SeedableRng;
//!
//! let code = StackedReedSolomon::new(5, 3, 4, FieldSpec::new(3)?)?;
//! let params = SystemParams::for_code(Arc::new(code), 2)?;
//! let cluster = Cluster::ingest(params, &[b"first", b"other"])?;
//! let mut rng = rand::rngs::StdRng::seed_from_u64(1);
//! let (bytes, report) = cluster.retrieve_bytes(0, &mut rng)?;
//! assert!(bytes.starts_with(b"first"));
//! assert_eq!(report.total, report.l.iter().sum::<usize>());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod bits;
pub mod code;
pub mod field;
pub mod matrix;
pub mod pir;
pub mod sim;
pub mod snapshot;
pub mod wire;
