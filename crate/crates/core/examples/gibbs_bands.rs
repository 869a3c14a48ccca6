//! Gibbs samples at low temperature: band membership, overlap masses and
//! cross-temperature overlaps.
//!
//! cargo run --release --example gibbs_bands [N] [sweeps]

use glasscape::montecarlo::gibbs::{chaos_experiment, gibbs_experiment, GibbsConfig};
use glasscape::montecarlo::sample_hamiltonian;
use glasscape::Mixture;

fn main() -> glasscape::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(16);
    let sweeps: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let m = Mixture::new([(3, 0.96), (4, 0.04)])?;
    let h = sample_hamiltonian(&m, n, 5)?;
    let cfg = GibbsConfig {
        sweeps,
        ..GibbsConfig::default()
    };
    let r = gibbs_experiment(&h, 20.0, &cfg, 3)?;
    println!("N = {n}, beta = 20: q* = {:.5}, E* = {:.5}", r.q_star, r.e_star);
    println!("band centres: {}  band mass: {:.3}", r.centers.len(), r.band_mass);
    println!("same-band pairs {}  mass near q*^2 {:.3}", r.same_band_pairs, r.same_band_mass);
    println!("cross-band pairs {}  mass near 0 {:.3}", r.cross_band_pairs, r.cross_band_mass);
    println!("acceptance {:.3}  non-mixing {}", r.min_acceptance, r.non_mixing);
    for (i, c) in r.histogram.counts.iter().enumerate() {
        if *c > 0 {
            println!("  [{:>5.2}, {:>5.2})  {}", r.histogram.bin_edges[i], r.histogram.bin_edges[i + 1], c);
        }
    }
    let chaos = chaos_experiment(&h, 20.0, 30.0, &cfg, 0.2, 3)?;
    println!("beta 20 vs 30: mass |R| < 0.2 = {:.3} (z = {:.2})", chaos.mass_near_zero, chaos.z);
    Ok(())
}
