//! Apportion a nilpotent matrix at several constants.
use apportion::constructors::apportion_nilpotent;
use apportion::jordan::{build_jordan, JordanSpec};
use apportion::uniform::Tolerance;

fn main() -> apportion::error::Result<()> {
    let spec = JordanSpec::from_real(&[(0.0, 3), (0.0, 2)])?;
    let a = build_jordan(&spec);
    for kappa in [1.0 / 3f64.sqrt(), 1e-3, 250.0] {
        let cert = apportion_nilpotent(&spec, kappa)?;
        let report = cert.verify(&a, Tolerance::default())?;
        println!("kappa {kappa:.6e}: measured {:.6e}, defect {:.1e}", report.kappa, report.defect);
    }
    let cert = apportion_nilpotent(&spec, 1.0 / 3f64.sqrt())?;
    println!("M = {:?}", cert.m);
    println!("M A M^-1 = {:?}", cert.b);
    Ok(())
}
