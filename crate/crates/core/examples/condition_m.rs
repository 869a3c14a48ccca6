//! The Ψ⁰ profile and the Condition M verdict.
//!
//! cargo run --example condition_m [mixture file]

use glasscape::paircomplexity::{check_condition_m, Psi0Profile};
use glasscape::Mixture;

fn main() -> glasscape::Result<()> {
    let m: Mixture = match std::env::args().nth(1) {
        Some(f) => std::fs::read_to_string(f)?.parse()?,
        None => Mixture::new([(3, 0.96), (4, 0.04)])?,
    };
    println!("mixture {m}");
    let prof = Psi0Profile::new(&m)?;
    for i in 0..=20 {
        let r = -1.0 + 0.1 * i as f64;
        println!("r = {r:>5.2}  psi0 = {:.6}", prof.eval(r)?);
    }
    let v = check_condition_m(&m, 0.005)?;
    println!("\nholds          {}", v.holds);
    println!("failed_clause  {}", v.failed_clause.map(|c| c.as_str()).unwrap_or("none"));
    println!("psi0(0)        {:.3e}", v.psi0_at_zero);
    println!("psi0''(0)      {:.6}", v.d2_psi0_at_zero);
    println!("max_margin     {:.6e}", v.max_margin);
    println!("endpoint_plus  {}", v.endpoint_plus);
    println!("endpoint_minus {}", v.endpoint_minus);
    Ok(())
}
