//! Numerical search where no construction is known, and how many zero
//! blocks make a matrix apportionable.
use apportion::classify::MatrixInput;
use apportion::jordan::{build_jordan, JordanSpec};
use apportion::matrix::C64;
use apportion::search::{find_apportioning, sigma_estimate, SearchConfig};

fn main() -> apportion::error::Result<()> {
    let cfg = SearchConfig { seed: 7, restarts: 16, ..SearchConfig::default() };
    let open = JordanSpec::from_pairs(&[(C64::new(1.0, 0.0), 2), (C64::new(-2.0, 1.0), 1)])?;
    let out = find_apportioning(&build_jordan(&open), &cfg)?;
    println!(
        "J2(1) ⊕ [-2+i]: found {} after {} restarts, best defect {:.2e}",
        out.found, out.restarts_used, out.best_defect
    );

    for pairs in [vec![(C64::new(1.0, 0.0), 1), (C64::new(1.0, 0.0), 1)], vec![(C64::new(1.0, 0.0), 2)]] {
        let spec = JordanSpec::from_pairs(&pairs)?;
        let report = sigma_estimate(&MatrixInput::Jordan(spec.clone()), None, &cfg)?;
        println!(
            "{}: zero blocks needed ≤ {:?} (theory bound {})",
            spec.to_json(),
            report.sigma_upper_empirical,
            report.sigma_theory_upper
        );
        for step in &report.steps {
            println!("  m = {}: {:?} via {:?}", step.m, step.verdict, step.source);
        }
    }
    Ok(())
}
