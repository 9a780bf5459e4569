//! Arithmetic in GF(2^8): raw symbol operations and the checked `Symbol` type.

use mds_pir::field::FieldSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = FieldSpec::new(8)?;
    let f = spec.field();
    println!("GF(2^{}) with reduction polynomial {:#x}", spec.width(), spec.reduction_polynomial());

    let (a, b) = (0x53, 0xCA);
    let product = f.mul(a, b);
    println!("{a:#04x} + {b:#04x} = {:#04x}", f.add(a, b));
    println!("{a:#04x} * {b:#04x} = {product:#04x}");
    println!("{a:#04x}^-1 = {:#04x}", f.inv(a)?);
    println!("{a:#04x}^255 = {:#04x}", f.pow(a, 255));
    assert_eq!(f.div(product, b)?, a);

    let x = spec.symbol(0x53)?;
    let y = spec.symbol(0xCA)?;
    println!("checked: x*y = {:#04x}", x.checked_mul(y)?.value());

    let small = FieldSpec::new(3)?.symbol(5)?;
    match x.checked_add(small) {
        Ok(_) => unreachable!(),
        Err(e) => println!("mixing widths is rejected: {e}"),
    }
    Ok(())
}
