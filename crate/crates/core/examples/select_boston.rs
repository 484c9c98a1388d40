//! Forward stagewise selection on Boston housing with both roughening modes.

use nvsd::io::{ingest, IngestSpec, ResponseColumn};
use nvsd::roughening::{RougheningConfig, RougheningMode};
use nvsd::selector::{select_variables, SelectionConfig};
use nvsd::smoother::SmootherSpec;

fn main() -> nvsd::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/boston.csv");
    let (data, _) = ingest(&IngestSpec::new(path, ResponseColumn::Name("medv".into())))?;

    for mode in [RougheningMode::Smoother, RougheningMode::DcolGradient] {
        let cfg = SelectionConfig {
            roughening: RougheningConfig::new(0.01, mode, SmootherSpec::Gcv)?,
            ..SelectionConfig::default()
        };
        let trace = select_variables(&data, &cfg)?;
        println!(
            "{mode:?}: {:?} after {} iterations ({:?})",
            trace.selected_names,
            trace.iterations.len(),
            trace.stop_reason
        );
        let last = trace.iterations.last().expect("at least one iteration");
        println!("  last pick {} with p = {:.2e}", last.name, last.p_combined);
    }
    Ok(())
}
