//! q**, q_c, q* and the free energy gap as β grows, against their limits.

use glasscape::thermo::phase_summary;
use glasscape::Mixture;

fn main() -> glasscape::Result<()> {
    for m in [Mixture::new([(3, 0.96), (4, 0.04)])?, Mixture::new([(2, 0.1), (4, 0.9)])?] {
        println!("mixture {m}");
        println!(
            "{:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            "beta", "q**", "q_c", "q*", "b(1-q_c)", "b(1-q*)", "gap"
        );
        let mut limits = None;
        for beta in [20.0, 40.0, 80.0, 160.0] {
            let s = phase_summary(&m, beta)?;
            println!(
                "{beta:>6} {:>12.8} {:>12.8} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
                s.q_star_star,
                s.q_c,
                s.q_star,
                beta * (1.0 - s.q_c),
                beta * (1.0 - s.q_star),
                s.gap_finite
            );
            limits = Some((s.t_c, s.t_minus, s.gap_limit));
        }
        if let Some((tc, tm, g)) = limits {
            println!("limits: t_c = {tc:.8}, t_- = {tm:.8}, gap = {g:.8}\n");
        }
    }
    Ok(())
}
