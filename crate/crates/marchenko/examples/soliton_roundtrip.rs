//! Full round trip with no shared code between the two directions: sample a
//! closed-form soliton, run the forward scattering oracle to get its
//! spectrum, then recover the signal from that spectrum alone.
//!
//! ```sh
//! cargo run --release --example soliton_roundtrip
//! ```

use marchenko::experiment::{pointwise_eps, rmse};
use marchenko::glme::{recover, GridConfig, RecoverOptions, Scheme};
use marchenko::spectral::{Dispersion, Side, SpectralData};
use marchenko::zs::{find_eigenvalues, forward_scatter, make_signal, SearchBox, SignalKind};
use num_complex::Complex64 as C64;

fn main() {
    let kind = SignalKind::Soliton {
        zeta: [0.0, 0.5],
        norm: [0.0, -1.0],
    };
    let l = 24.0;
    let sig = make_signal(kind, l, 1 << 15);
    println!("signal: one soliton, q(0) = {:.6}", kind.eval(0.0).re);

    let bx = SearchBox {
        re_min: -2.0,
        re_max: 2.0,
        im_min: 0.05,
        im_max: 1.2,
    };
    let eigen = find_eigenvalues(&sig, Dispersion::Anomalous, Some(bx)).unwrap();
    println!(
        "oracle found zeta = {:+.6}{:+.6}i, l = {:+.6}{:+.6}i",
        eigen[0].zeta.re, eigen[0].zeta.im, eigen[0].norm.re, eigen[0].norm.im
    );

    let scat = forward_scatter(&sig, 257, 30.0, Dispersion::Anomalous);
    println!(
        "continuous spectrum: max |l(xi)| = {:.2e} (reflectionless), unitarity {:.2e}",
        scat.reflection.iter().map(|c| c.norm()).fold(0.0, f64::max),
        scat.unitarity_residual
    );

    let sd = SpectralData::new(
        Side::Left,
        Dispersion::Anomalous,
        scat.xi_min,
        scat.xi_max,
        scat.reflection,
        eigen,
    )
    .unwrap();

    for m_out in [256usize, 1024] {
        let grid = GridConfig::split_at_zero(l, m_out).unwrap();
        let rp = recover(
            &sd,
            Some(&sd),
            &grid,
            Scheme::Gregory { n: 6, two_sided: false },
            RecoverOptions::default(),
        )
        .unwrap();
        let exact: Vec<C64> = rp.t.iter().map(|&t| kind.eval(t)).collect();
        let eps = pointwise_eps(&rp.q, &exact).unwrap();
        println!(
            "recovered at M = {m_out:5}: RMSE {:.3e}, max eps {:.3e}, {:.0} ms",
            rmse(&eps),
            eps.iter().cloned().fold(0.0, f64::max),
            rp.timing.total.as_secs_f64() * 1e3
        );
    }
}
