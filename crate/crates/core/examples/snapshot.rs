//! Writing a cluster to disk, corrupting a shard, and loading it back with
//! the damaged shard reported as failed.

use mds_pir::code::CodeDescriptor;
use mds_pir::pir::SystemParams;
use mds_pir::sim::Cluster;
use mds_pir::snapshot::{load_cluster, write_snapshot, MANIFEST_FILE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("mds-pir-snapshot-{}", std::process::id()));
    let code: CodeDescriptor = "evenodd:k=3,p=5".parse()?;
    let params = SystemParams::for_code(code.build()?, 2)?;
    println!("{} holds {} bytes per file", code, Cluster::file_byte_capacity(&params));
    let cluster = Cluster::ingest(params, &[b"ab".as_slice(), b"c".as_slice()])?;
    let manifest = write_snapshot(&dir, &cluster, &code, vec![2, 1])?;
    println!("{}", std::fs::read_to_string(dir.join(MANIFEST_FILE))?);

    std::fs::write(dir.join(&manifest.shards[4].file), [0xff])?;
    let (_, mut loaded) = load_cluster(&dir)?;
    println!("failed after load: {:?}", loaded.failed());
    let report = loaded.repair_server(4, &[0, 1, 2, 3])?;
    println!("{}", report.to_json_line());
    assert_eq!(loaded.store()?, cluster.store()?);

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
