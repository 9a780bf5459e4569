use std::sync::Arc;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mds_pir::analysis::{capacity_mds, empirical_rate};
use mds_pir::code::{ArrayCode, CodeDescriptor, EvenOdd, StackedReedSolomon};
use mds_pir::field::FieldSpec;
use mds_pir::pir::{encode_system, marginal_uniformity_check, DownloadTally, FileMatrix, SystemParams};
use mds_pir::sim::Cluster;
use mds_pir::snapshot::{load_cluster, write_snapshot};

fn rs(n: usize, k: usize, alpha: usize) -> Arc<dyn ArrayCode> {
    Arc::new(StackedReedSolomon::new(n, k, alpha, FieldSpec::exceeding(n).unwrap()).unwrap())
}

fn cluster(code: Arc<dyn ArrayCode>, m: usize, seed: u64) -> (Cluster, Vec<FileMatrix>) {
    let params = SystemParams::for_code(code, m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let files: Vec<_> = (0..m).map(|_| FileMatrix::random(&params, &mut rng)).collect();
    let store = encode_system(&files, &params).unwrap();
    (Cluster::new(params, store).unwrap(), files)
}

#[test]
fn monte_carlo_rate_approaches_capacity() {
    let (c, files) = cluster(rs(6, 4, 1), 3, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut tally = DownloadTally::default();
    for i in 0..100_000 {
        let theta = i % 3;
        let (file, report) = c.retrieve(theta, &mut rng).unwrap();
        assert!(report.ok);
        if i % 997 == 0 {
            assert_eq!(file, files[theta]);
        }
        tally.record(report.total);
    }
    let rate = empirical_rate(c.params().file_len() as u64, &tally.mean().unwrap()).unwrap();
    let cap = capacity_mds(6, 4, 3).unwrap().to_f64().unwrap();
    let err = (rate.to_f64().unwrap() - cap).abs() / cap;
    assert!(err < 0.01, "rate {rate} vs capacity {cap}");
}

#[test]
fn server_views_are_uniform_per_column() {
    for (n, k, m) in [(4, 2, 2), (5, 3, 2), (6, 4, 2), (4, 2, 3)] {
        let p = SystemParams::for_code(rs(n, k, 1), m).unwrap();
        assert!(marginal_uniformity_check(&p, 100_000).unwrap(), "({n},{k},{m})");
    }
}

#[test]
fn snapshot_survives_failure_and_repair() {
    let code: CodeDescriptor = "stacked-rs:n=7,k=3,alpha=4,w=3".parse().unwrap();
    let params = SystemParams::for_code(code.build().unwrap(), 2).unwrap();
    let files: [&[u8]; 2] = [b"alpha file", b"beta"];
    let c = Cluster::ingest(params, &files).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_snapshot(dir.path(), &c, &code, files.iter().map(|f| f.len()).collect()).unwrap();

    for i in [1, 5] {
        std::fs::remove_file(dir.path().join(format!("shard-{i}.bin"))).unwrap();
    }
    let (_, mut damaged) = load_cluster(dir.path()).unwrap();
    assert_eq!(damaged.failed(), vec![1, 5]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    assert!(damaged.retrieve(0, &mut rng).is_err());
    damaged.repair_server(1, &[0, 2, 3, 4, 6]).unwrap();
    damaged.repair_server(5, &[0, 1, 2]).unwrap();
    assert_eq!(damaged.store().unwrap(), c.store().unwrap());
    let (bytes, _) = damaged.retrieve_bytes(1, &mut rng).unwrap();
    assert!(bytes.starts_with(b"beta"));
}

#[test]
fn evenodd_cluster_round_trip() {
    let code: Arc<dyn ArrayCode> = Arc::new(EvenOdd::new(4, 5).unwrap());
    let (c, files) = cluster(code, 3, 21);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (theta, want) in files.iter().enumerate() {
        let (file, report) = c.retrieve(theta, &mut rng).unwrap();
        assert_eq!(&file, want);
        assert_eq!(report.total % 4, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_small_system_round_trips(
        (n, k) in (3usize..8).prop_flat_map(|n| (Just(n), 1..n)),
        alpha in 1usize..4,
        m in 1usize..4,
        seed in any::<u64>(),
    ) {
        let (c, files) = cluster(rs(n, k, alpha), m, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for (theta, want) in files.iter().enumerate() {
            let (file, report) = c.retrieve(theta, &mut rng).unwrap();
            prop_assert_eq!(&file, want);
            prop_assert!(report.ok);
        }
    }
}
