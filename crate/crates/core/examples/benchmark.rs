//! Sparse additive simulation and a small benchmark run.

use nvsd::selector::SelectionConfig;
use nvsd::simulation::{run_benchmark, simulate, CorrelationSource, SimulationSpec};

fn main() -> nvsd::Result<()> {
    let spec = SimulationSpec {
        correlation: CorrelationSource::Ar1 { rho: 0.3 },
        ..SimulationSpec::new(3, 50, 300, 1.0, 42)
    };
    println!("{}", spec.to_toml()?);

    let one = simulate(&spec)?;
    for (j, link) in one.true_vars.iter().zip(&one.links) {
        println!("x{}: {:?} * {:.2}", j + 1, link.function.family, link.coefficient);
    }

    let report = run_benchmark(&spec, &SelectionConfig::default(), 4)?;
    for r in &report.rows {
        println!(
            "rep {} selected {} (tp {}, fp {}) k {} nrmse {:.3} baseline {:.3}",
            r.replicate, r.selected, r.true_positives, r.false_positives, r.k, r.nrmse, r.baseline_nrmse
        );
    }
    let s = &report.summary;
    println!("mean nrmse {:.3} +/- {:.3}, full recovery {:.0}%", s.mean_nrmse, s.sd_nrmse, 100.0 * s.full_recovery_rate);
    Ok(())
}
