//! Which diag(λ₁, λ₂) are apportionable, pointwise and as a raster.
use apportion::classify::{admissible_region, region_svg, RegionGrid, RegionStatus};
use apportion::constructors::apportion_2x2;
use apportion::matrix::{C64, ONE};

fn main() -> apportion::error::Result<()> {
    for l2 in [C64::new(-1.0, 0.0), C64::new(-0.5, 1.0), C64::new(0.0, 2.0), C64::new(2.0, 0.0)] {
        let r = apportion_2x2(ONE, l2, None)?;
        let kappa = r.certificate.as_ref().map(|c| c.kappa);
        println!("diag(1, {l2}): {:?}, K = {}, certificate kappa {kappa:?}", r.verdict, r.constants);
    }

    let grid = RegionGrid::square(3.0, 201);
    let samples = admissible_region(ONE, &grid)?;
    let inside = samples.iter().filter(|s| s.status == RegionStatus::Admissible).count();
    println!("{inside} of {} grid points admissible", samples.len());
    let path = std::env::temp_dir().join("apportion_region.svg");
    std::fs::write(&path, region_svg(&samples, &grid)).expect("write svg");
    println!("raster written to {}", path.display());
    Ok(())
}
