//! Convergence study on a grid-doubling ladder: RMSE and approximation
//! order per scheme, for both dispersion regimes.
//!
//! ```sh
//! cargo run --release --example convergence_ladder
//! ```

use marchenko::experiment::{run_convergence, ExperimentConfig, Fixture};
use marchenko::spectral::Dispersion;
use marchenko::zs::SignalKind;

fn main() {
    for dispersion in [Dispersion::Anomalous, Dispersion::Normal] {
        let cfg = ExperimentConfig {
            signal: SignalKind::ChirpedSech { a: 5.2, c: 4.0 },
            dispersion,
            l: 64.0,
            ladder: vec![1 << 10, 1 << 11, 1 << 12],
            schemes: vec!["TIB".into(), "G2".into(), "G4".into(), "G6".into(), "G6d".into()],
            m_xi: 2049,
            l_xi: 40.0,
            seed: 0,
            jobs: 1,
        };
        let fx = Fixture::prepare(&cfg).unwrap();
        let table = run_convergence(&cfg, &fx).unwrap();
        println!("--- {dispersion:?} dispersion");
        println!("  scheme    M      RMSE         order   time");
        for c in &table.cells {
            let order = table
                .orders
                .iter()
                .find(|(s, m, _)| *s == c.scheme && *m == c.m_out)
                .map(|(_, _, o)| format!("{o:5.2}"))
                .unwrap_or_else(|| "    -".into());
            println!(
                "  {:<7} {:<6} {:.4e}  {}  {:6.2}s",
                c.scheme.to_string(),
                c.m_out,
                c.rmse,
                order,
                c.total_seconds
            );
        }
    }
}
