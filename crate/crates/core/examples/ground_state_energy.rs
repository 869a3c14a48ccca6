//! E₀(q) and x₀(q) from the complexity, and the identity dE₀/dq = x₀.

use glasscape::complexity::{e0_pure, ground_state_solution, theta_pure, ThetaSurface};
use glasscape::Mixture;

fn main() -> glasscape::Result<()> {
    for p in 3..=6 {
        let e0 = e0_pure(p)?;
        println!("pure p={p}: E0 = {e0:.10}  Theta_p(-E0) = {:.2e}", theta_pure(p, -e0)?);
    }

    let m = Mixture::new([(3, 0.96), (4, 0.04)])?;
    println!("\nmixture {m}");
    println!("{:>6} {:>14} {:>14} {:>14}", "q", "E0(q)", "x0(q)", "FD dE0/dq");
    let h = 1e-4;
    for q in [0.9, 0.95, 0.97, 0.98, 0.99] {
        let gs = ground_state_solution(&m, q)?;
        let fd = (ground_state_solution(&m, q + h)?.e0 - ground_state_solution(&m, q - h)?.e0) / (2.0 * h);
        println!("{q:>6} {:>14.10} {:>14.10} {:>14.10}", gs.e0, gs.x0, fd);
    }

    // A slice of the surface through the ground state.
    let surf = ThetaSurface::new(&m, 1.0)?;
    let gs = ground_state_solution(&m, 1.0)?;
    println!("\nTheta(u, x0) along u at q = 1");
    for k in -4..=4 {
        let u = -gs.e0 + 0.05 * k as f64;
        let (v, x) = surf.sup_x(u)?;
        println!("u = {u:>9.5}  sup_x Theta = {v:>11.6}  at x = {x:.5}");
    }
    Ok(())
}
