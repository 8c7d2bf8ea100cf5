//! Monte Carlo scatter of F against I(S:W) for the qubit depolarizing
//! channel, summarized as per-bin maxima against C_E(1 - q/2).

use chancap::capacity::{bin_maxima, depolarizing_closed_forms, mc_scan, StateFamily};
use chancap::channels::KrausChannel;

fn main() -> chancap::Result<()> {
    let lam = 0.2;
    let ch = KrausChannel::depolarizing(2, lam)?;
    let forms = depolarizing_closed_forms(lam)?;
    let records = mc_scan(&ch, StateFamily::TenParam, 2000, 3)?;
    let bins = bin_maxima(&records, 0.2, 2.0, |q| forms.chi_star(q))?;

    println!("C_E = {:.6}, C = {:.6}", forms.c_e, forms.c);
    println!("{:>11} {:>6} {:>8} {:>9}", "bin", "count", "F_max", "C_E line");
    for b in bins {
        println!(
            "[{:.1}, {:.1}) {:>6} {:>8.4} {:>9.4}",
            b.q_lo, b.q_hi, b.count, b.f_max, b.reference
        );
    }
    Ok(())
}
