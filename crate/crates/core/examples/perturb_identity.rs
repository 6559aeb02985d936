//! I ⊕ [λ] with Re λ = 1 - n/2: the unitary DFT certificate and every constant.
use apportion::constructors::{apportion_perturb_identity, perturb_identity_constants};
use apportion::matrix::{ComplexMatrix, C64};

fn main() -> apportion::error::Result<()> {
    let n = 5;
    let lambda = C64::new(1.0 - n as f64 / 2.0, 0.8);
    let set = perturb_identity_constants(n, lambda)?;
    println!("K(I{} ⊕ [{lambda}]) = {set}", n - 1);

    let dft = apportion_perturb_identity(n, lambda, None)?;
    let unitary = (&dft.m * &dft.m.adjoint()).max_abs_diff(&ComplexMatrix::identity(n));
    println!("DFT certificate: kappa {:.12}, ‖MM* - I‖ = {unitary:.1e}", dft.kappa);

    for k in set.values() {
        let cert = apportion_perturb_identity(n, lambda, Some(k))?;
        println!("target {k:.12} reached with {:.12}", cert.kappa);
    }
    if let Err(e) = apportion_perturb_identity(n, C64::new(0.0, 1.0), None) {
        println!("Re λ off the line: {e}");
    }
    Ok(())
}
