//! Encode one stripe with a stacked Reed-Solomon code, erase two columns,
//! decode from the rest, and rebuild a lost column.

use mds_pir::code::{ArrayCode, StackedReedSolomon, Stripe};
use mds_pir::field::FieldSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let code = StackedReedSolomon::new(6, 4, 2, FieldSpec::new(4)?)?;
    let p = *code.params();
    println!("{} (field order {})", code.descriptor(), p.field.order());

    let stripe = Stripe::new(p.alpha, (0..(p.k * p.alpha) as u16).collect());
    let codeword = code.encode_stripe(&stripe)?;
    for (c, block) in codeword.blocks().enumerate() {
        println!("column {c}: {block:?}");
    }

    let survivors: Vec<(usize, &[u16])> = [0, 2, 3, 5].iter().map(|&c| (c, codeword.block(c))).collect();
    let decoded = code.erasure_decode(&survivors)?;
    assert_eq!(decoded, stripe);
    println!("decoded from columns 0, 2, 3, 5");

    let helpers: Vec<(usize, &[u16])> = [0, 1, 2, 3, 5].iter().map(|&c| (c, codeword.block(c))).collect();
    let outcome = code.repair(4, &helpers)?;
    assert_eq!(outcome.block, codeword.block(4));
    println!(
        "column 4 rebuilt from {:?}, {} symbols downloaded",
        outcome.read_from, outcome.bandwidth
    );
    Ok(())
}
