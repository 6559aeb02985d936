//! Classify raw matrices and Jordan specs of small order.
use apportion::classify::{certificate_at, classify, MatrixInput};
use apportion::jordan::JordanSpec;
use apportion::matrix::{ComplexMatrix, C64};

fn show(name: &str, input: &MatrixInput) -> apportion::error::Result<()> {
    let r = classify(input)?;
    println!(
        "{name}: {:?}, K = {}, by {}, bounds trace {:.4} hadamard {:.4}",
        r.verdict, r.constants, r.theorem_tag, r.bounds.trace, r.bounds.hadamard
    );
    Ok(())
}

fn main() -> apportion::error::Result<()> {
    let raw = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, -1.0]]);
    show("[[1,2],[0,-1]]", &MatrixInput::Entries(raw.clone()))?;
    let rank_one = ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0], &[0.0, 0.0, 0.0]]);
    show("rank one 3×3", &MatrixInput::Entries(rank_one))?;
    for pairs in [
        vec![(C64::new(1.0, 0.0), 2)],
        vec![(C64::new(1.0, 0.0), 1), (C64::new(1.0, 0.0), 1), (C64::new(-0.5, 2.0), 1)],
        vec![(C64::new(3.0, 0.0), 1), (C64::new(0.0, 0.0), 2)],
        vec![(C64::new(1.0, 0.0), 2), (C64::new(2.0, 0.0), 1)],
    ] {
        let spec = JordanSpec::from_pairs(&pairs)?;
        show(&spec.to_json(), &MatrixInput::Jordan(spec))?;
    }
    let cert = certificate_at(&MatrixInput::Entries(raw), Some(1.0))?;
    println!("[[1,2],[0,-1]] at kappa 1: B = {:?}", cert.b);
    Ok(())
}
