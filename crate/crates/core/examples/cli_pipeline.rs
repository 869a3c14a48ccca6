//! Drive the command line from code: classify, Condition M and the phase
//! summary for the bundled mixture, written into a temporary directory.

use std::path::PathBuf;

use glasscape::cli::run_args;

fn main() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mix = data.join("near_pure3.mix");
    let mix = mix.to_str().expect("utf-8 path");
    let out = std::env::temp_dir().join("glasscape-cli-pipeline");
    for args in [
        vec!["classify", "--mixture", mix],
        vec!["condm", "--mixture", mix],
        vec!["phase", "--mixture", mix, "--beta", "20,40,80"],
        vec!["goe-check", "--n", "100", "--replicas", "20"],
    ] {
        let code = run_args(&args, &out);
        println!("  -> exit {code}");
    }
    println!("outputs in {}", out.display());
}
