//! One roughening step in each mode: the response gets rougher along the chosen
//! predictor, so S_delta goes up and the predictor looks less significant.

use nvsd::assoc::{self, PairedSample, PermutationPlan};
use nvsd::roughening::{self, RougheningConfig, RougheningMode};
use nvsd::smoother::SmootherSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> nvsd::Result<()> {
    // the small worked case: y + theta * (n - 2) * grad
    println!("{:?}", roughening::roughen_dcol(&[1.0, 2.0, 3.0], 0.1)?);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 300;
    let x1: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let x2: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| (3.0 * x1[i]).sin() + x2[i].abs() + 0.3 * rng.sample::<f64, _>(StandardNormal))
        .collect();

    for mode in [RougheningMode::DcolGradient, RougheningMode::Smoother] {
        let cfg = RougheningConfig::new(0.05, mode, SmootherSpec::Gcv)?;
        let mut yk = y.clone();
        for _ in 0..10 {
            yk = roughening::roughen(&x1, &yk, &cfg)?;
        }
        let mut plan = PermutationPlan::new(2000, 1)?;
        let before = assoc::score(&PairedSample::new(x1.clone(), y.clone())?, &mut plan)?;
        let after = assoc::score(&PairedSample::new(x1.clone(), yk.clone())?, &mut plan)?;
        let other = assoc::score(&PairedSample::new(x2.clone(), yk)?, &mut plan)?;
        println!(
            "{mode:?}: x1 explained {:.3} -> {:.3}; x2 explained after {:.3}",
            before.explained_fraction, after.explained_fraction, other.explained_fraction
        );
    }
    Ok(())
}
