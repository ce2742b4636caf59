//! One-sided vs two-sided Gregory schemes at a fixed grid: accuracy parity
//! and the speed gain from halving the correction rank, plus the baseline's
//! position in the accuracy/time trade-off.
//!
//! ```sh
//! cargo run --release --example scheme_comparison
//! ```

use marchenko::experiment::{run_pareto, ExperimentConfig, Fixture};
use marchenko::spectral::Dispersion;
use marchenko::zs::SignalKind;

fn main() {
    let cfg = ExperimentConfig {
        signal: SignalKind::ChirpedSech { a: 5.2, c: 4.0 },
        dispersion: Dispersion::Anomalous,
        l: 64.0,
        ladder: vec![1 << 10, 1 << 11, 1 << 12],
        schemes: vec![
            "TIB".into(),
            "G2".into(),
            "G2d".into(),
            "G4".into(),
            "G4d".into(),
            "G6".into(),
            "G6d".into(),
        ],
        m_xi: 2049,
        l_xi: 40.0,
        seed: 0,
        jobs: 1,
    };
    let fx = Fixture::prepare(&cfg).unwrap();
    let table = run_pareto(&cfg, &fx).unwrap();

    println!("scheme    M      RMSE         sweep time");
    for c in &table.cells {
        println!(
            "{:<7}  {:<6} {:.4e}   {:6.3}s",
            c.scheme.to_string(),
            c.m_out,
            c.rmse,
            c.sweep_seconds
        );
    }

    println!("\none-sided vs two-sided at M = 4096:");
    for n in [2usize, 4, 6] {
        let pick = |two: bool| {
            table
                .cells
                .iter()
                .find(|c| {
                    c.m_out == 4096
                        && c.scheme
                            == marchenko::glme::Scheme::Gregory { n, two_sided: two }
                })
                .unwrap()
        };
        let one = pick(false);
        let two = pick(true);
        println!(
            "  n = {n}: RMSE ratio {:.3}, speedup {:.2}x",
            one.rmse / two.rmse,
            two.sweep_seconds / one.sweep_seconds
        );
    }

    println!("\nfastest scheme per accuracy target:");
    for (target, scheme, m, secs) in &table.fastest_at {
        println!("  RMSE <= {target:.0e}: {scheme} at M = {m} in {secs:.3}s");
    }
}
