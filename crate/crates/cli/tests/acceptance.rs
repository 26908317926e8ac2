//! One PASS/FAIL line per acceptance criterion, with the individual checks
//! indented below it. Tolerances live in `hybrid_bell::verify`.

use hybrid_bell::verify::{self, VerifyOptions};

#[test]
fn acceptance() {
    let opts = VerifyOptions::default();
    println!(
        "tolerances: seesaw {:e}, thresholds {}, family quantum {:e}, family noise {:e}, purity {:e}, Bell {:e}",
        verify::SVETLICHNY_SEESAW_TOL,
        verify::THRESHOLD_TOL,
        verify::FAMILY_QUANTUM_TOL,
        verify::FAMILY_NOISE_TOL,
        verify::STATE_PURITY_TOL,
        verify::STATE_BELL_TOL
    );
    let reports = verify::run(&[], &opts, |r| print!("{r}")).expect("catalogs build");
    println!();
    for r in &reports {
        println!("{}", r.summary());
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| format!("C{}", r.id)).collect();
    assert!(failed.is_empty(), "failing criteria: {}", failed.join(", "));
}
