//! Exact rational Strichartz-exponent arithmetic: the intercritical pair
//! (γ_b, ρ_b) and the auxiliary W⁰/V⁰/Z exponents with their η-perturbations.
//!
//! Run with `cargo run --example exponent_calculus`.

use dinls::params::{default_eta, intercritical_pair, wvz_exponents, Rational};

fn main() {
    println!("intercritical pairs (gamma_b, rho_b) = (4(p+2)/(p(N-2)+2b), N(p+2)/(N+p-b)):");
    for (p, b, n) in [
        (Rational::from(2), Rational::new(1, 2), 3u32),
        (Rational::from(3), Rational::new(1, 2), 3),
        (Rational::from(1), Rational::new(1, 1000), 4),
    ] {
        let pair = intercritical_pair(&p, &b, n).unwrap();
        let defect = pair.as_pair().admissibility_defect(n);
        println!("  p={p}, b={b}, N={n}: {pair}   2/gamma + N/rho - N/2 = {defect}");
    }

    println!("\nauxiliary space exponents at N=3, b2=1/2, eta=1/1000:");
    let e = wvz_exponents(3, &Rational::new(1, 2), &default_eta()).unwrap();
    println!("  W0 = {}  (defect {})", e.w0, e.w0.as_pair().admissibility_defect(3));
    println!("  V0 = {}  (defect {})", e.v0, e.v0.as_pair().admissibility_defect(3));
    println!(
        "  Z  = {}  (defect {}; Sobolev-shifted, not L2-admissible)",
        e.z,
        e.z.admissibility_defect(3)
    );
    println!("  W+ = {}  W- = {}", e.w_plus, e.w_minus);
    println!("  V+ = {}  V- = {}", e.v_plus, e.v_minus);
    println!("\nevery pair above satisfies its identity exactly, in rational arithmetic");
}
