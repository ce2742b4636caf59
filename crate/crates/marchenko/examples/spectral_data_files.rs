//! The JSON interchange format for spectral data: write it, reload it, and
//! feed it back into a recovery — the same files the `marchenko` CLI
//! produces and consumes.
//!
//! ```sh
//! cargo run --release --example spectral_data_files
//! ```

use marchenko::experiment::{pointwise_eps, rmse};
use marchenko::glme::{recover, GridConfig, RecoverOptions, Scheme};
use marchenko::spectral::{Dispersion, SpectralData};
use marchenko::zs::{analytic_spectral_data, SignalKind};
use num_complex::Complex64 as C64;
use std::path::Path;

fn main() {
    let kind = SignalKind::Sech { a: 2.2 };
    let sd = analytic_spectral_data(kind, Dispersion::Anomalous, 1025, 30.0).unwrap();
    println!(
        "sech(A = 2.2): {} bound states at {}",
        sd.discrete.len(),
        sd.discrete
            .iter()
            .map(|p| format!("{:.2}i", p.zeta.im))
            .collect::<Vec<_>>()
            .join(", ")
    );

    let path = Path::new("sech_spectrum.json");
    sd.save(path).unwrap();
    println!("wrote {} ({} bytes)", path.display(), std::fs::metadata(path).unwrap().len());

    let back = SpectralData::load(path).unwrap();
    let grid = GridConfig::split_at_zero(28.0, 512).unwrap();
    let rp = recover(
        &back,
        Some(&back),
        &grid,
        Scheme::Gregory { n: 5, two_sided: true },
        RecoverOptions::default(),
    )
    .unwrap();
    let exact: Vec<C64> = rp.t.iter().map(|&t| kind.eval(t)).collect();
    println!(
        "recovery from the reloaded file: RMSE {:.3e}",
        rmse(&pointwise_eps(&rp.q, &exact).unwrap())
    );
}
