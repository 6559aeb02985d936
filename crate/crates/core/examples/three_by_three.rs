//! The two fixed 3×3 constructions.
use apportion::constructors::{apportion_3x3_template, TemplateKind};
use apportion::matrix::C64;

fn main() -> apportion::error::Result<()> {
    let lambda = C64::new(2.0, -1.0);
    for kind in [TemplateKind::LambdaJ2PlusZero, TemplateKind::LambdaPlusN2] {
        let cert = apportion_3x3_template(kind, lambda)?;
        println!("{kind:?} at λ = {lambda}: kappa {:.12} (|λ| = {:.12})", cert.kappa, lambda.norm());
        println!("B = {:?}", cert.b);
    }
    Ok(())
}
