//! Empirical first moment of the number of critical points in an
//! energy/radial window against sup Θ over the window.
//!
//! cargo run --release --example kac_rice_count [replicas]

use glasscape::complexity::ground_state_solution;
use glasscape::montecarlo::experiments::{crt_count_from, search_replicas};
use glasscape::Mixture;

fn main() -> glasscape::Result<()> {
    let replicas: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let m = Mixture::new([(3, 0.96), (4, 0.04)])?;
    let gs = ground_state_solution(&m, 1.0)?;
    for n in [16, 24, 32] {
        let searches = search_replicas(&m, n, 1.0, replicas, 5 * n, 7)?;
        let w = 0.05;
        let at_ground = crt_count_from(
            &m,
            &searches,
            (-gs.e0 - w, -gs.e0 + w),
            (-gs.x0 - w, -gs.x0 + w),
        )?;
        let above = crt_count_from(&m, &searches, (-gs.e0 + 0.05, -gs.e0 + 0.15), (-gs.x0, -gs.x0 + 0.5))?;
        println!(
            "N = {n}: ground window exponent {:.4} (sup Theta {:.4}), higher window exponent {:.4} (sup Theta {:.4})",
            at_ground.log_mean_count_per_n, at_ground.theta_sup, above.log_mean_count_per_n, above.theta_sup
        );
    }
    Ok(())
}
