//! ED of symmetric two-mode cat states on a truncated Fock space.

use entdist::cvmode::{cat_report, cv_ed, CatSpec, Cutoff};
use entdist::C64;

fn main() {
    println!("{:>14} {:>14} {:>6} {:>12} {:>12} {:>9}", "alpha1", "alpha2", "N", "E", "closed", "diff");
    for (a1, a2) in [
        (C64::new(1.0, 0.0), C64::new(-1.0, 0.0)),
        (C64::new(2.0, 0.0), C64::new(0.0, 0.0)),
        (C64::new(0.5, 0.5), C64::new(0.5, 0.5)),
        (C64::new(0.3, -1.2), C64::new(-2.0, 0.7)),
        (C64::new(0.1, 0.0), C64::new(0.0, 0.0)),
    ] {
        let rep = cat_report(&CatSpec::new(a1, a2).unwrap(), Cutoff::Auto).unwrap();
        println!(
            "{:>14} {:>14} {:>6} {:>12.8} {:>12.8} {:>9.1e}",
            format!("{:.1}{:+.1}i", a1.re, a1.im),
            format!("{:.1}{:+.1}i", a2.re, a2.im),
            rep.cutoff,
            rep.ed,
            rep.closed_form,
            rep.difference
        );
    }
    let spec = CatSpec::new(C64::new(1.5, 0.0), C64::new(-0.5, 1.0)).unwrap();
    let state = entdist::cvmode::symmetric_cat(&spec, Cutoff::Auto).unwrap();
    let shifted = state.displace(C64::new(0.7, -0.2)).unwrap();
    println!("displacing both modes: E {:.10} -> {:.10}", cv_ed(&state), cv_ed(&shifted));
}
