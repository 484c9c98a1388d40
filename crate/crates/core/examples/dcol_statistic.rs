//! S_delta as a model-free noise variance estimate, and the tests built on it.

use nvsd::assoc::{self, PairedSample, PermutationPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> nvsd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.5).unwrap();
    let n = 500;
    let x: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let y: Vec<f64> = x.iter().map(|v| (4.0 * v).sin() + noise.sample(&mut rng)).collect();

    let sample = PairedSample::new(x.clone(), y.clone())?;
    let sorted = assoc::sort_pairs(&sample);
    println!("S_delta            {:.4}  (noise variance 0.25)", assoc::s_delta(&sorted)?);
    println!("explained fraction {:.3}", assoc::explained_fraction(&sorted)?);

    let mut plan = PermutationPlan::new(2000, 7)?;
    let scored = assoc::score(&sample, &mut plan)?;
    println!(
        "p_dcol {:.2e}  p_linear {:.2e}  combined {:.2e}",
        scored.p_dcol, scored.p_linear, scored.p_combined
    );

    // an unrelated predictor; the cached null is reused because y is unchanged
    let z: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let unrelated = assoc::score(&PairedSample::new(z, y)?, &mut plan)?;
    println!("unrelated predictor: combined p {:.3}", unrelated.p_combined);
    Ok(())
}
