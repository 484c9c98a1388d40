//! Iterative group selection: select, drop the selected columns, repeat.

use nvsd::data::{Dataset, Frame};
use nvsd::selector::{iterative_group_selection, SelectionConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> nvsd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (n, p) = (300, 30);
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    // a strong pair and a weaker nonlinear pair
    let y: Vec<f64> = (0..n)
        .map(|i| {
            2.0 * cols[0][i] - 1.5 * cols[1][i]
                + (2.0 * cols[2][i]).sin()
                + cols[3][i].abs()
                + 0.5 * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    let names = (0..p).map(|j| format!("g{j}")).collect();
    let data = Dataset::new(Frame::new(names, cols)?, y, "y")?;

    let cfg = SelectionConfig {
        max_iters: Some(3000),
        ..SelectionConfig::default()
    };
    let groups = iterative_group_selection(&data, &cfg, 3)?;
    for (i, g) in groups.iter().enumerate() {
        let names: Vec<&str> = g.iter().map(|&j| data.names()[j].as_str()).collect();
        println!("group {i}: {names:?}");
    }
    Ok(())
}
