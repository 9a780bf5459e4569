//! Failing and repairing servers in a simulated cluster, with the repair
//! bandwidth compared against the MSR optimum.

use std::sync::Arc;

use mds_pir::code::StackedReedSolomon;
use mds_pir::field::FieldSpec;
use mds_pir::pir::SystemParams;
use mds_pir::sim::Cluster;
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let code = StackedReedSolomon::new(7, 3, 4, FieldSpec::new(3)?)?;
    let params = SystemParams::for_code(Arc::new(code), 2)?;
    let mut cluster = Cluster::ingest(params, &[b"first file".as_slice(), b"second".as_slice()])?;
    let original = cluster.store()?;

    for server in [2, 6, 0, 1] {
        cluster.fail_server(server)?;
    }
    println!("failed servers: {:?}", cluster.failed());
    if let Err(e) = cluster.fail_server(3) {
        println!("fifth failure refused: {e}");
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    if let Err(e) = cluster.retrieve(0, &mut rng) {
        println!("retrieval during failure: {e}");
    }

    for (server, helpers) in [(0, vec![3, 4, 5]), (1, vec![0, 3, 4, 5]), (2, vec![0, 1, 3, 4, 5]), (6, vec![0, 1, 2, 3, 4, 5])] {
        println!("{}", cluster.repair_server(server, &helpers)?.to_json_line());
    }
    assert_eq!(cluster.store()?, original);
    println!("total repair bandwidth: {} symbols", cluster.repair_bandwidth());
    let (bytes, _) = cluster.retrieve_bytes(0, &mut rng)?;
    println!("after repair: {:?}", String::from_utf8_lossy(&bytes[..10]));
    Ok(())
}
