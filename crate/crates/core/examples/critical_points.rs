//! Locate q-critical points of one sample, then follow the deepest minimum
//! from q = 1 down to q = 0.9.

use glasscape::complexity::ground_state_solution;
use glasscape::montecarlo::critical::DEFAULT_TOL;
use glasscape::montecarlo::{find_q_critical, overlap, sample_hamiltonian, track_critical_path};
use glasscape::Mixture;

fn main() -> glasscape::Result<()> {
    let m = Mixture::new([(3, 0.96), (4, 0.04)])?;
    let n = 24;
    let h = sample_hamiltonian(&m, n, 42)?;
    let pts = find_q_critical(&h, 1.0, 5 * n, DEFAULT_TOL)?;
    let e0 = ground_state_solution(&m, 1.0)?.e0;
    println!("N = {n}: {} distinct points, -E0 = {:.4}", pts.len(), -e0);
    for p in pts.iter().take(5) {
        println!(
            "  energy {:.5}  radial {:.5}  residual {:.1e}  index {}",
            p.energy_per_site, p.radial_per_sqrt, p.grad_residual, p.index
        );
    }
    if pts.len() > 1 {
        println!("overlap of the two deepest: {:.4}", overlap(&pts[0].sigma, &pts[1].sigma));
    }

    let path = track_critical_path(&h, &pts[0], 0.9)?;
    println!("\npath status {} after {} points, max speed {:.3}", path.status.as_str(), path.points.len(), path.max_speed());
    for p in path.points.iter().step_by(20) {
        let e0q = ground_state_solution(&m, p.q)?.e0;
        println!("  q = {:.3}  H/N = {:.5}  -E0(q) = {:.5}", p.q, p.energy_per_site, -e0q);
    }
    Ok(())
}
