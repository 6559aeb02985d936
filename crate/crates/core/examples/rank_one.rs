//! Rank-one matrices and the spiral sum behind them.
use apportion::constructors::{apportion_rank_one, spiral_sum};
use apportion::matrix::{ComplexMatrix, C64};
use apportion::uniform::Tolerance;

fn main() -> apportion::error::Result<()> {
    let r = 0.6;
    let s = spiral_sum(4, r)?;
    println!("spiral n=4 r=0.6: rho {:.12}, alpha {:.12}, |r·sum - 1| = {:.1e}", s.rho, s.alpha, (s.sum() * r - 1.0).norm());

    let lambda = C64::new(-1.0, 2.0);
    let n = 4;
    let mut d = vec![C64::new(0.0, 0.0); n];
    d[0] = lambda;
    let a = ComplexMatrix::diag(&d);
    for kappa in [lambda.norm() / n as f64, 1.0, 3.0] {
        let cert = apportion_rank_one(lambda, n, kappa)?;
        let r = cert.verify(&a, Tolerance::default())?;
        println!("kappa {kappa:.6}: measured {:.6}, defect {:.1e}", r.kappa, r.defect);
    }
    if let Err(e) = apportion_rank_one(lambda, n, 0.5) {
        println!("below |λ|/n: {e}");
    }
    Ok(())
}
