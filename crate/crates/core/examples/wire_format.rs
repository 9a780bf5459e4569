//! Byte-level query and response messages, and the overhead they add.

use std::sync::Arc;

use mds_pir::code::StackedReedSolomon;
use mds_pir::field::FieldSpec;
use mds_pir::pir::{answer, QueryMatrix, SystemParams};
use mds_pir::sim::Cluster;
use mds_pir::wire;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect::<Vec<_>>().join(" ")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let code = StackedReedSolomon::new(5, 3, 2, FieldSpec::new(3)?)?;
    let params = SystemParams::for_code(Arc::new(code), 2)?;
    let cluster = Cluster::ingest(params.clone(), &[b"abcd".as_slice(), b"wxyz".as_slice()])?;
    let q = QueryMatrix::from_rows(&params, &[[0, 2, 4], [1, 3, 0]])?;

    let sq = q.server_query(0, 1, &params)?;
    let query_bytes = wire::encode_server_query(&sq);
    println!("query to server 1: {}", hex(&query_bytes));
    let received = wire::decode_server_query(&query_bytes, 1, &params)?;
    assert_eq!(received, sq);

    let resp = answer(cluster.shard(1)?, &received, &params)?;
    let resp_bytes = wire::encode_response(&resp, params.field().width());
    let parsed = wire::decode_response(&resp_bytes)?;
    println!("response: {}", hex(&resp_bytes));
    println!(
        "{} symbols of {} bits, {} overhead bits",
        parsed.response.symbol_count(),
        parsed.width,
        parsed.overhead_bits
    );

    for bad in [&resp_bytes[..5], &[0x7f, 0, 0][..]] {
        println!("{:?} -> {}", hex(bad), wire::decode_response(bad).unwrap_err());
    }
    Ok(())
}
