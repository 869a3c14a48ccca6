//! Classify a few mixtures and show both classifier values.
//!
//! cargo run --example classify_mixtures [mixture files...]

use glasscape::mixture::classify;
use glasscape::Mixture;

fn main() -> glasscape::Result<()> {
    let files: Vec<String> = std::env::args().skip(1).collect();
    let mixtures: Vec<(String, Mixture)> = if files.is_empty() {
        vec![
            ("x^3".into(), Mixture::pure(3)?),
            ("0.96x^3+0.04x^4".into(), Mixture::new([(3, 0.96), (4, 0.04)])?),
            ("0.1x^2+0.9x^4".into(), Mixture::new([(2, 0.1), (4, 0.9)])?),
            ("0.9x^2+0.1x^5".into(), Mixture::new([(2, 0.9), (5, 0.1)])?),
        ]
    } else {
        files
            .iter()
            .map(|f| Ok((f.clone(), std::fs::read_to_string(f)?.parse()?)))
            .collect::<glasscape::Result<_>>()?
    };
    println!("{:<20} {:<10} {:>14} {:>14} {:>6}", "mixture", "kind", "g_literal", "g_via_theta", "agree");
    for (name, m) in &mixtures {
        let c = classify(m)?;
        println!(
            "{:<20} {:<10} {:>14.6e} {:>14.6e} {:>6}",
            name, c.kind, c.g_literal, c.g_via_theta, c.agree
        );
    }
    Ok(())
}
