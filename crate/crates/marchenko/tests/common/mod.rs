//! Shared dense-LU oracle helpers for the integration suites.

use marchenko::block::Pair;
use marchenko::glme::Scheme;
use marchenko::quadrature::weights_for_size;
use marchenko::spectral::{kernel_value, Dispersion, SpectralData};
use marchenko::toeplitz::BlockToeplitzSystem;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn dense_of(sys: &BlockToeplitzSystem) -> DMatrix<C64> {
    let n = 2 * sys.size();
    DMatrix::from_fn(n, n, |r, c| {
        let (bi, sr) = (r / 2, r % 2);
        let (bj, sc) = (c / 2, c % 2);
        sys.block(bi as isize - bj as isize).m[sr][sc]
    })
}

pub fn flatten(rhs: &[Pair]) -> DVector<C64> {
    DVector::from_iterator(2 * rhs.len(), rhs.iter().flat_map(|p| [p[0], p[1]]))
}

pub fn random_omega(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Vec<C64> {
    (0..=2 * m)
        .map(|k| {
            let damp = scale / (1.0 + (k as f64 - m as f64).abs() * 0.4);
            C64::new(
                damp * (rng.gen::<f64>() - 0.5),
                damp * (rng.gen::<f64>() - 0.5),
            )
        })
        .collect()
}

pub fn random_rhs(rng: &mut ChaCha8Rng, size: usize) -> Vec<Pair> {
    (0..size)
        .map(|_| {
            [
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            ]
        })
        .collect()
}

pub fn rel_err(got: &[Pair], want: &DVector<C64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, p) in got.iter().enumerate() {
        num += (p[0] - want[2 * i]).norm_sqr() + (p[1] - want[2 * i + 1]).norm_sqr();
        den += want[2 * i].norm_sqr() + want[2 * i + 1].norm_sqr();
    }
    (num / den.max(1e-300)).sqrt()
}

/// Dense oracle for a whole left-half recovery: solve the unflipped
/// Hankel-form system with LU at every output time and extract q directly.
pub fn dense_recover(
    sd: &SpectralData,
    scheme: Scheme,
    dispersion: Dispersion,
    l: f64,
    m_out: usize,
) -> Vec<C64> {
    let m_sweep = m_out / 2;
    let tau = l / m_out as f64;
    let h = 2.0 * tau;
    let t0 = -0.5 * l;
    let n = scheme.correction_count();
    let kw = sd.kernel_weights(scheme.kernel_order()).unwrap();
    let mut q = Vec::with_capacity(m_sweep + 1);
    for j in 0..=m_sweep {
        let t = t0 + j as f64 * tau;
        if j == 0 {
            let om0 = kernel_value(sd, 2.0 * t, &kw).unwrap();
            q.push(dispersion.extraction_sign() * -om0);
            continue;
        }
        let omega: Vec<C64> = (0..=2 * j)
            .map(|k| kernel_value(sd, 2.0 * t - k as f64 * h, &kw).unwrap())
            .collect();
        match scheme {
            Scheme::Tib => {
                let om_half =
                    |k2: usize| kernel_value(sd, 2.0 * t - 0.5 * k2 as f64 * h, &kw).unwrap();
                let size = j;
                let sign = dispersion.coupling_sign();
                let mut dense = DMatrix::<C64>::zeros(2 * size, 2 * size);
                for i in 0..size {
                    for p in 0..size {
                        let om = omega[i + p + 1];
                        dense[(2 * i, 2 * p)] = if i == p {
                            C64::new(1.0, 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        };
                        dense[(2 * i + 1, 2 * p + 1)] = dense[(2 * i, 2 * p)];
                        dense[(2 * i, 2 * p + 1)] = sign * h * om.conj();
                        dense[(2 * i + 1, 2 * p)] = h * om;
                    }
                }
                let mut rhs = DVector::<C64>::zeros(2 * size);
                for i in 0..size {
                    rhs[2 * i + 1] = -om_half(2 * i + 1);
                }
                let sol = dense.lu().solve(&rhs).unwrap();
                let mut x2 = -omega[0];
                for p in 0..size {
                    x2 -= h * om_half(2 * p + 1) * sol[2 * p];
                }
                q.push(dispersion.extraction_sign() * x2);
            }
            Scheme::Gregory { .. } => {
                let w = weights_for_size(n, j, scheme.sidedness());
                let size = j + 1;
                let sign = dispersion.coupling_sign();
                let mut dense = DMatrix::<C64>::zeros(2 * size, 2 * size);
                for i in 0..size {
                    for p in 0..size {
                        let om = omega[i + p];
                        dense[(i, p)] = if i == p {
                            C64::new(1.0, 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        };
                        dense[(size + i, size + p)] = dense[(i, p)];
                        dense[(i, size + p)] = sign * h * om.conj() * w.weights[p];
                        dense[(size + i, p)] = h * om * w.weights[p];
                    }
                }
                let mut rhs = DVector::<C64>::zeros(2 * size);
                for i in 0..size {
                    rhs[size + i] = -omega[i];
                }
                let sol = dense.lu().solve(&rhs).unwrap();
                q.push(dispersion.extraction_sign() * sol[size]);
            }
        }
    }
    q
}
