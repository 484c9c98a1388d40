//! Select on a training half, choose the model size by 5-fold CV, fit the
//! additive spline model, round-trip it through text and score the test half.

use nvsd::io::{ingest, IngestSpec, ResponseColumn};
use nvsd::predictor::{fit_additive, AdditiveModel};
use nvsd::selector::{choose_k_by_cv, cv_curve, select_variables, SelectionConfig};
use nvsd::simulation::{nrmse, split_half};

fn main() -> nvsd::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/boston.csv");
    let (data, _) = ingest(&IngestSpec::new(path, ResponseColumn::Name("medv".into())))?;
    let (train_rows, test_rows) = split_half(data.n(), 2024);
    let train = data.subset_rows(&train_rows)?;
    let test = data.subset_rows(&test_rows)?;

    let trace = select_variables(&train, &SelectionConfig::default())?;
    let curve = cv_curve(&train, &trace.selected, 5, 1)?;
    let k = choose_k_by_cv(&train, &trace.selected, 5, 1)?;
    println!("selected {:?}", trace.selected_names);
    println!("cv nrmse by k {curve:.3?} -> k = {k}");

    let model = fit_additive(&train, &trace.selected[..k])?;
    let text = model.to_text();
    let reloaded = AdditiveModel::from_text(&text)?;
    let pred = reloaded.predict(test.predictors())?;
    let mean = vec![nvsd::stats::mean(train.response()); test.n()];
    println!(
        "test nrmse {:.3} (train-mean baseline {:.3})",
        nrmse(test.response(), &pred)?,
        nrmse(test.response(), &mean)?
    );
    println!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}
