//! The eight-protocol comparison at one parameter point, its ordering
//! checks, and one figure sweep as CSV.

use mds_pir::analysis::{comparison_table, msr_mbr_params, ordering_checks, write_figure_csv, Figure, TheoryInputs};
use num_rational::BigRational;
use num_traits::ToPrimitive;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, k, m, s) = (12, 10, 30, 3);
    println!("N={n} K={k} M={m} s={s}");
    for row in comparison_table(n, k, m, s)? {
        let l = row.sub_packetization.map_or("-".into(), |l| l.to_string());
        println!(
            "{} {:<28} L={:<14} q{:<4} gamma_bar={:<6} rate={:<8.4} {}",
            row.index,
            row.name,
            l,
            row.field_bound.to_string(),
            row.bandwidth_ratio.to_string(),
            row.rate.to_f64().unwrap_or(f64::NAN),
            if row.applicable { "" } else { "(not applicable)" }
        );
    }
    for link in ordering_checks(n, k, m, s)? {
        println!("{link}");
    }

    let inputs = TheoryInputs::new(5, 3, 2, 4, 1, BigRational::from_integer(192.into()))?;
    let pts = msr_mbr_params(&inputs);
    println!("MSR: alpha={} gamma={}; MBR: alpha={} gamma={}", pts.alpha_msr, pts.gamma_msr, pts.alpha_mbr, pts.gamma_mbr);

    let fig = Figure::new(1)?;
    write_figure_csv(fig, 8..=24, std::io::stdout())?;
    Ok(())
}
