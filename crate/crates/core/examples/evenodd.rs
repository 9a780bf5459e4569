//! The binary EVENODD code: XOR-only parity over GF(2), checked to be MDS.

use mds_pir::code::{ArrayCode, EvenOdd, Stripe};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let code = EvenOdd::new(3, 5)?;
    let p = *code.params();
    println!("{}: N={}, K={}, alpha={}", code.descriptor(), p.n, p.k, p.alpha);
    println!("every K-subset of columns decodes: {}", code.generator().is_mds());

    let bits: Vec<u16> = [1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0].to_vec();
    let stripe = Stripe::new(p.alpha, bits);
    let cw = code.encode_stripe(&stripe)?;
    println!("row parity      {:?}", cw.block(3));
    println!("diagonal parity {:?}", cw.block(4));

    let survivors: Vec<(usize, &[u16])> = [1, 3, 4].iter().map(|&c| (c, cw.block(c))).collect();
    assert_eq!(code.erasure_decode(&survivors)?, stripe);
    println!("recovered both lost data columns from one data column and the two parities");

    for bad in [4, 9] {
        if let Err(e) = EvenOdd::new(3, bad) {
            println!("p = {bad}: {e}");
        }
    }
    Ok(())
}
