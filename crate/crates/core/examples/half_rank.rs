//! Matrices of rank at most half their order: every constant above ρ/2.
use apportion::constructors::{apportion_a_oplus_zeros, apportion_half_rank, apportion_i_oplus_o};
use apportion::jordan::{build_jordan, JordanSpec};
use apportion::matrix::C64;
use apportion::uniform::Tolerance;

fn main() -> apportion::error::Result<()> {
    let io = apportion_i_oplus_o(2, 0.5)?;
    println!("I2 ⊕ O2 at its endpoint 1/2: B = {:?}", io.b);

    let spec = JordanSpec::from_pairs(&[(C64::new(1.0, 1.0), 2), (C64::new(0.0, 0.0), 1), (C64::new(0.0, 0.0), 1)])?;
    let rho = spec.spectral_radius();
    for kappa in [rho / 2.0 + 1e-6, rho, 10.0] {
        let cert = apportion_half_rank(&spec, kappa)?;
        let r = cert.verify(&build_jordan(&spec), Tolerance::default())?;
        println!("J2(1+i) ⊕ O2 at {kappa:.6}: measured {:.6}", r.kappa);
    }
    if let Err(e) = apportion_half_rank(&spec, rho / 2.0) {
        println!("at ρ/2 exactly: {e}");
    }

    // a full-rank block needs zeros appended first
    let j = JordanSpec::from_pairs(&[(C64::new(2.0, 0.0), 2)])?;
    let (cert, added) = apportion_a_oplus_zeros(&j, 1.5)?;
    println!("J2(2) becomes apportionable after {added} zero rows: kappa {:.6}", cert.kappa);
    Ok(())
}
