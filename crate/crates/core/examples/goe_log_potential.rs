//! Average log|det(M − x)|/n of GOE matrices against Ω(x).

use glasscape::montecarlo::goe_check;

fn main() -> glasscape::Result<()> {
    for n in [50, 100, 200] {
        for x in [-3.0, 3.0, 4.0] {
            let c = goe_check(n, x, 40, 11)?;
            println!(
                "n = {n:>3}  x = {x:>4}  mean = {:.6} ± {:.6}  Omega = {:.6}  diff = {:+.2e}",
                c.mean_log_det_per_n,
                c.standard_error,
                c.omega_x,
                c.mean_log_det_per_n - c.omega_x
            );
        }
    }
    Ok(())
}
