//! Cubic smoothing spline with the penalty picked by generalized cross-validation.

use nvsd::smoother::{SmootherSpec, SmoothingSpline};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> nvsd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..200).map(|i| i as f64 / 199.0 * 6.0).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| v.sin() + 0.3 * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let gcv = SmoothingSpline::fit(&x, &y, SmootherSpec::Gcv)?;
    println!("GCV: lambda {:.3e}, edf {:.2}", gcv.lambda(), gcv.edf());
    for spec in [SmootherSpec::Lambda(1e-8), SmootherSpec::Lambda(1e2)] {
        let s = SmoothingSpline::fit(&x, &y, spec)?;
        println!("{spec:?}: edf {:.2}", s.edf());
    }

    // 9.0 is past the last knot, where the fit is held at its boundary value
    for t in [0.0, 1.5, 3.0, 4.5, 6.0, 9.0] {
        println!("f({t}) = {:+.3}   sin = {:+.3}", gcv.evaluate(t), f64::sin(t));
    }
    Ok(())
}
