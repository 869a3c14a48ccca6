//! Sampled Hamiltonians have covariance N·ν(R), and conditioning on the
//! value and gradient at q n̂ leaves N·Σ_{k≥2} α_k(q)² on the band.

use glasscape::montecarlo::experiments::{band_conditional_variance, covariance_law};
use glasscape::Mixture;

fn main() -> glasscape::Result<()> {
    let m = Mixture::new([(3, 0.96), (4, 0.04)])?;
    let probes = covariance_law(&m, 16, &[1.0, 0.9, 0.5, 0.0, -0.5], 300, 2)?;
    for p in &probes {
        println!(
            "R = {:>5.2}  mean H H'/N = {:>8.4} ± {:.4}  nu(R) = {:>8.4}  z = {:>5.2}",
            p.overlap,
            p.stats.mean,
            p.stats.se,
            p.target,
            p.z()
        );
    }
    for q in [0.5, 0.9, 0.99] {
        let (cond, tail) = band_conditional_variance(&m, 10, q, 1)?;
        println!("q = {q}: conditional variance {cond:.10}, N sum alpha_k^2 = {tail:.10}");
    }
    Ok(())
}
