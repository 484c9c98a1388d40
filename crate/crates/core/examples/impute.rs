//! Ingestion with the missing-value filter and KNN imputation.

use nvsd::io::{ingest_table, knn_impute, read_table, IngestSpec, ResponseColumn};

const CSV: &str = "\
id,a,b,c,y
r1,1.0,2.0,NA,10
r2,1.1,2.1,3.1,11
r3,5.0,NA,7.0,30
r4,5.2,6.1,7.1,31
r5,0.9,1.9,2.9,NA
r6,5.1,6.0,,29
r7,1.2,2.2,3.0,12
";

fn main() -> nvsd::Result<()> {
    let raw = read_table(CSV.as_bytes(), b',', &["id".to_string()])?;
    let cells = &raw.columns[..3];
    let filled = knn_impute(cells, 2)?;
    for (name, col) in raw.names.iter().zip(&filled) {
        println!("{name}: {col:?}");
    }

    let spec = IngestSpec {
        column_na_threshold: 0.2,
        ..IngestSpec::new("inline.csv", ResponseColumn::Name("y".into()))
    };
    let (data, report) = ingest_table(raw, &spec)?;
    println!("{} rows x {} predictors; {report:?}", data.n(), data.p());
    Ok(())
}
