//! Direct scattering of the chirped hyperbolic secant: continuous spectrum,
//! bound states, and the transfer-matrix invariants.
//!
//! ```sh
//! cargo run --release --example forward_scattering
//! ```

use marchenko::spectral::Dispersion;
use marchenko::zs::{
    chirped_sech_a, chirped_sech_b, find_eigenvalues, forward_scatter, make_signal, SignalKind,
};
use num_complex::Complex64 as C64;

fn main() {
    let kind = SignalKind::ChirpedSech { a: 5.2, c: 4.0 };
    let sig = make_signal(kind, 32.0, 1 << 14);

    for dispersion in [Dispersion::Anomalous, Dispersion::Normal] {
        println!("--- {dispersion:?} dispersion");
        let scat = forward_scatter(&sig, 9, 8.0, dispersion);
        println!(
            "  unitarity residual {:.2e}, boundary decay {:.2e}",
            scat.unitarity_residual, scat.boundary_residual
        );
        println!("  xi     |l(xi)| numeric   |l(xi)| exact");
        for (j, l) in scat.reflection.iter().enumerate() {
            let xi = scat.xi_min + (scat.xi_max - scat.xi_min) * j as f64 / 8.0;
            let z = C64::new(xi, 0.0);
            let exact = chirped_sech_b(z, 5.2, 4.0, dispersion).conj()
                / chirped_sech_a(z, 5.2, 4.0, dispersion);
            println!("  {xi:5.1}  {:14.8}   {:14.8}", l.norm(), exact.norm());
        }
    }

    println!("--- bound states (anomalous)");
    let eigen = find_eigenvalues(&sig, Dispersion::Anomalous, None).unwrap();
    for p in &eigen {
        println!(
            "  zeta = {:+.6}{:+.6}i   l = {:+.4}{:+.4}i",
            p.zeta.re, p.zeta.im, p.norm.re, p.norm.im
        );
    }
    println!("  ({} bound states found)", eigen.len());
}
