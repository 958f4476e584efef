//! Classify parameter tuples against the global-existence and blow-up cases.
//!
//! Run with `cargo run --example classify_regimes`.

use dinls::params::{classify_blowup, classify_global, ProblemParams, Rational};

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

fn main() {
    let tuples = [
        ("both defocusing", 1.0, 1.0, "1", "3", "1/2", "1/2"),
        ("mixed, b1 between (p1/p2)b2 and b2", 1.0, -1.0, "2", "3", "2/5", "1/2"),
        ("mixed, b1 above b2", 1.0, -1.0, "1", "3", "1", "1/2"),
        ("both focusing", -1.0, -1.0, "1", "3", "2/5", "1/2"),
    ];
    for (label, l1, l2, p1, p2, b1, b2) in tuples {
        let params = ProblemParams::new(3, l1, l2, r(p1), r(p2), r(b1), r(b2)).unwrap();
        let verdict = classify_global(&params);
        println!("{label}: global -> {:?}", verdict.kind);
        for c in verdict.evaluated_conditions.iter().filter(|c| c.holds) {
            println!("    {} ({} vs {})", c.name, c.left, c.right);
        }
    }

    // Blow-up classification needs data-level quantities: energy, mass, and
    // the initial virial quantity.
    let params =
        ProblemParams::new(3, 1.0, -1.0, r("1"), r("3"), r("2/5"), r("1/2")).unwrap();
    for (label, e0, y0) in [
        ("negative energy, inward flux", -0.1, 0.3),
        ("positive energy", 0.1, 0.3),
        ("negative energy, outward flux", -0.1, -0.3),
    ] {
        let verdict = classify_blowup(&params, e0, 1.0, y0, 1.0).unwrap();
        println!("E0={e0}, y0={y0} ({label}): blow-up -> {:?}", verdict.kind);
    }
}
