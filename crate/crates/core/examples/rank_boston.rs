//! One scoring pass over the bundled Boston housing data.

use nvsd::io::{ingest, IngestSpec, ResponseColumn};
use nvsd::selector::{rank_variables, SelectionConfig};

fn main() -> nvsd::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/boston.csv");
    let (data, _) = ingest(&IngestSpec::new(path, ResponseColumn::Name("medv".into())))?;
    let scores = rank_variables(&data, &SelectionConfig::default())?;

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].p_linear.total_cmp(&scores[b].p_linear));
    println!("{:<8} {:>10} {:>10} {:>9}", "var", "p_linear", "p_dcol", "explained");
    for j in order {
        let s = &scores[j];
        println!(
            "{:<8} {:>10.2e} {:>10.2e} {:>9.3}",
            data.names()[j], s.p_linear, s.p_dcol, s.explained_fraction
        );
    }
    Ok(())
}
