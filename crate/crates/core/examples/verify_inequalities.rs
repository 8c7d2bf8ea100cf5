//! Seeded checks of the entropy inequalities the capacity bounds rest on.

use chancap::channels::{weyl_group, KrausChannel};
use chancap::verify::{
    check_dpi, check_lemma1, check_subadditivity, check_superadditivity_i,
    check_superadditivity_ii,
};

fn main() -> chancap::Result<()> {
    let seed = 1;
    let mut reports = vec![
        check_dpi(100, seed),
        check_superadditivity_i(100, seed),
        check_superadditivity_ii(100, seed),
        check_subadditivity(100, seed),
    ];
    reports.push(check_lemma1(&KrausChannel::depolarizing(2, 0.3)?, &weyl_group(2), 100, seed)?);

    for r in &reports {
        let verdict = if r.passed() { "ok" } else { "FAILED" };
        println!("{:<20} n={} min slack {:+.3e} {verdict}", r.name, r.instances, r.min_slack);
    }
    Ok(())
}
