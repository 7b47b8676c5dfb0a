//! Prints a LAT vs RAT comparison table for one synthetic example.
//!
//! cargo run --release -p hdls-core --example table2 -- ii 500 10000 20

use hdls::bench::{run_bench, BenchConfig, MethodSpec};
use hdls::datagen::Example;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let example: Example = args.first().map_or("ii", String::as_str).parse()?;
    let n = args.get(1).map_or(Ok(200), |s| s.parse())?;
    let p = args.get(2).map_or(Ok(1000), |s| s.parse())?;
    let reps = args.get(3).map_or(Ok(10), |s| s.parse())?;
    let cfg = BenchConfig::new(example, n, p, reps, vec![MethodSpec::lat(), MethodSpec::rat_cv()]);
    let report = run_bench(&cfg)?;
    print!("{}", report.table());
    Ok(())
}
