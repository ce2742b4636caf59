//! Gregory quadrature: trapezoidal rule with endpoint-difference corrections.
//!
//! A two-sided rule of correction count `n` replaces the `n` weights nearest
//! each end of a uniform grid; the interior weights stay exactly 1. The edge
//! coefficients are not tabulated — they are generated by solving the moment
//! conditions
//!
//! ```text
//! sum_j delta_j j^e = m_e,   m_0 = 0,  m_e = (-1)^(e+1) B_(e+1) / (e+1),
//! ```
//!
//! where `delta` is the deviation from the trapezoidal weights and `B_k` are
//! Bernoulli numbers. This reproduces the classical printed rules for
//! n = 1..4 (checked in the tests below) and extends to n = 5, 6 with a
//! single code path. A one-sided rule keeps the corrected edge and sets every
//! weight at the far edge to 1, endpoint included; it is only valid when the
//! integrand has decayed to nothing by that edge.

use crate::error::QuadratureError;
use num_complex::Complex64 as C64;

/// Which edges of the grid carry the non-unit coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sidedness {
    TwoSided,
    LeftSided,
    RightSided,
}

impl Sidedness {
    pub fn is_two_sided(self) -> bool {
        matches!(self, Sidedness::TwoSided)
    }
}

/// Diagonal of a Gregory weight matrix on a grid of `M + 1` nodes.
#[derive(Clone, Debug)]
pub struct WeightVector {
    pub n: usize,
    pub sidedness: Sidedness,
    pub weights: Vec<f64>,
    /// Highest monomial degree integrated exactly (two-sided, all M).
    pub exact_degree: usize,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Number of subintervals of the underlying grid.
    pub fn subintervals(&self) -> usize {
        self.weights.len() - 1
    }
}

/// Bernoulli numbers B_2 .. B_6 (B_3 = B_5 = 0).
const BERNOULLI: [f64; 5] = [
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
];

pub const MAX_ORDER: usize = 6;

/// Edge deviations from the trapezoidal weights for correction count `n`,
/// obtained from the moment conditions via a small Vandermonde solve with
/// partial pivoting.
fn edge_deltas(n: usize) -> Vec<f64> {
    let mut a = vec![vec![0.0f64; n]; n];
    let mut rhs = vec![0.0f64; n];
    for e in 0..n {
        for (j, entry) in a[e].iter_mut().enumerate() {
            *entry = (j as f64).powi(e as i32);
        }
        if e >= 1 {
            let sign = if e % 2 == 1 { 1.0 } else { -1.0 };
            rhs[e] = sign * BERNOULLI[e - 1] / (e as f64 + 1.0);
        }
    }
    solve_small(&mut a, &mut rhs);
    rhs
}

/// Gaussian elimination with partial pivoting for the tiny exactness systems.
fn solve_small(a: &mut [Vec<f64>], b: &mut [f64]) {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
}

fn exact_degree_for(n: usize) -> usize {
    if n % 2 == 1 {
        n
    } else {
        n - 1
    }
}

/// Build the Gregory weight vector of correction count `n` on `M` subintervals.
pub fn gregory_weights(
    n: usize,
    m: usize,
    sidedness: Sidedness,
) -> Result<WeightVector, QuadratureError> {
    if n < 1 || n > MAX_ORDER {
        return Err(QuadratureError::OrderOutOfRange { n });
    }
    let min = match sidedness {
        Sidedness::TwoSided => 2 * n,
        _ => n,
    };
    if m < min {
        return Err(QuadratureError::GridTooSmall {
            n,
            m,
            min,
            sidedness: match sidedness {
                Sidedness::TwoSided => "two-sided",
                Sidedness::LeftSided => "left-sided",
                Sidedness::RightSided => "right-sided",
            },
        });
    }
    Ok(weights_unchecked(n, m, sidedness))
}

/// Same rule without the size guard. The sweep uses this for the first few
/// bordering steps where the grid is still shorter than the full correction
/// pattern; callers must keep the edge patterns from overlapping.
pub(crate) fn weights_unchecked(n: usize, m: usize, sidedness: Sidedness) -> WeightVector {
    let deltas = edge_deltas(n);
    let mut w = vec![1.0f64; m + 1];
    match sidedness {
        Sidedness::TwoSided => {
            w[0] = 0.5;
            w[m] = 0.5;
            for (j, d) in deltas.iter().enumerate() {
                w[j] += d;
                w[m - j] += d;
            }
        }
        Sidedness::LeftSided => {
            w[0] = 0.5;
            for (j, d) in deltas.iter().enumerate() {
                w[j] += d;
            }
        }
        Sidedness::RightSided => {
            w[m] = 0.5;
            for (j, d) in deltas.iter().enumerate() {
                w[m - j] += d;
            }
        }
    }
    WeightVector {
        n,
        sidedness,
        weights: w,
        exact_degree: exact_degree_for(n),
    }
}

/// Largest correction count (clipped to `n`) that a grid of `m` subintervals
/// can host, falling back to the plain trapezoid below that. The recovery
/// sweep leans on this while the bordered system is still shorter than the
/// full edge pattern.
pub fn weights_for_size(n: usize, m: usize, sidedness: Sidedness) -> WeightVector {
    match sidedness {
        Sidedness::TwoSided => {
            let np = (m / 2).clamp(1, n);
            if m >= 2 * np {
                weights_unchecked(np, m, sidedness)
            } else {
                // m = 1: the two trapezoid halves touch
                WeightVector {
                    n: 1,
                    sidedness,
                    weights: vec![0.5; 2],
                    exact_degree: 1,
                }
            }
        }
        _ => weights_unchecked(n.min(m), m, sidedness),
    }
}

/// Weighted uniform-grid integral `h * sum_j w_j f_j`.
pub fn integrate(samples: &[C64], h: f64, w: &WeightVector) -> Result<C64, QuadratureError> {
    if samples.len() != w.weights.len() {
        return Err(QuadratureError::LengthMismatch {
            samples: samples.len(),
            weights: w.weights.len(),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (s, wj) in samples.iter().zip(&w.weights) {
        acc += s * *wj;
    }
    Ok(acc * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn printed_rules_reproduced() {
        // n = 1 .. 4 match the classical tabulated coefficients exactly.
        let w1 = gregory_weights(1, 4, Sidedness::TwoSided).unwrap();
        assert_eq!(w1.weights, vec![0.5, 1.0, 1.0, 1.0, 0.5]);

        let w2 = gregory_weights(2, 6, Sidedness::TwoSided).unwrap();
        for (got, want) in w2.weights.iter().zip([
            5.0 / 12.0,
            13.0 / 12.0,
            1.0,
            1.0,
            1.0,
            13.0 / 12.0,
            5.0 / 12.0,
        ]) {
            assert!(close(*got, want, 1e-14), "{got} vs {want}");
        }

        let w3 = gregory_weights(3, 8, Sidedness::TwoSided).unwrap();
        for (got, want) in w3.weights.iter().take(4).zip([
            3.0 / 8.0,
            7.0 / 6.0,
            23.0 / 24.0,
            1.0,
        ]) {
            assert!(close(*got, want, 1e-14));
        }

        let w4 = gregory_weights(4, 10, Sidedness::TwoSided).unwrap();
        for (got, want) in w4.weights.iter().take(5).zip([
            251.0 / 720.0,
            299.0 / 240.0,
            211.0 / 240.0,
            739.0 / 720.0,
            1.0,
        ]) {
            assert!(close(*got, want, 1e-13));
        }
    }

    #[test]
    fn one_sided_example() {
        let w = gregory_weights(2, 6, Sidedness::LeftSided).unwrap();
        let want = [5.0 / 12.0, 13.0 / 12.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        for (got, want) in w.weights.iter().zip(want) {
            assert!(close(*got, want, 1e-14));
        }
    }

    #[test]
    fn all_weights_strictly_positive() {
        for n in 1..=MAX_ORDER {
            for side in [Sidedness::TwoSided, Sidedness::LeftSided, Sidedness::RightSided] {
                let m = 3 * n + 2;
                let w = gregory_weights(n, m, side).unwrap();
                assert!(
                    w.weights.iter().all(|&x| x > 0.0),
                    "n = {n}, {side:?} produced a non-positive weight"
                );
            }
        }
    }

    #[test]
    fn two_sided_palindromic_and_interior_unit() {
        for n in 1..=MAX_ORDER {
            let m = 2 * n + 5;
            let w = gregory_weights(n, m, Sidedness::TwoSided).unwrap();
            for j in 0..=m {
                assert_eq!(w.weights[j], w.weights[m - j], "mirror mismatch at {j}");
            }
            for j in n..=m - n {
                assert_eq!(w.weights[j], 1.0);
            }
        }
    }

    #[test]
    fn rejects_bad_sizes_and_orders() {
        assert!(matches!(
            gregory_weights(0, 10, Sidedness::TwoSided),
            Err(QuadratureError::OrderOutOfRange { .. })
        ));
        assert!(matches!(
            gregory_weights(7, 40, Sidedness::TwoSided),
            Err(QuadratureError::OrderOutOfRange { .. })
        ));
        assert!(matches!(
            gregory_weights(3, 5, Sidedness::TwoSided),
            Err(QuadratureError::GridTooSmall { .. })
        ));
        assert!(matches!(
            gregory_weights(3, 2, Sidedness::LeftSided),
            Err(QuadratureError::GridTooSmall { .. })
        ));
    }

    /// Independent oracle for the n = 5 example: exactness on monomials.
    #[test]
    fn degree_five_exactness_from_moment_conditions() {
        let m = 12;
        let h = 0.31;
        let w = gregory_weights(5, m, Sidedness::TwoSided).unwrap();
        let len = m as f64 * h;
        for d in 0..=5u32 {
            let exact = len.powi(d as i32 + 1) / (d as f64 + 1.0);
            let samples: Vec<C64> = (0..=m)
                .map(|j| C64::new((j as f64 * h).powi(d as i32), 0.0))
                .collect();
            let got = integrate(&samples, h, &w).unwrap();
            assert!(
                (got.re - exact).abs() <= 1e-12 * exact.max(1.0),
                "degree {d}: {} vs {exact}",
                got.re
            );
        }
    }

    #[test]
    fn exactness_all_orders_both_modes() {
        // Two-sided: monomials up to the stated degree. One-sided: integrands
        // that have decayed to machine zero at the uncorrected edge.
        for n in 1..=MAX_ORDER {
            let m = 64;
            let h = 1.0 / m as f64;
            let w = gregory_weights(n, m, Sidedness::TwoSided).unwrap();
            for d in 0..=w.exact_degree as u32 {
                let exact = 1.0 / (d as f64 + 1.0);
                let samples: Vec<C64> = (0..=m)
                    .map(|j| C64::new((j as f64 * h).powi(d as i32), 0.0))
                    .collect();
                let got = integrate(&samples, h, &w).unwrap().re;
                assert!(
                    (got - exact).abs() <= 1e-12,
                    "n={n} d={d}: {got} vs {exact}"
                );
            }
        }
        // Left-sided on f(x) = e^-x over [0, 40]: f(40) ~ 4e-18.
        let m = 4000;
        let h = 40.0 / m as f64;
        let exact = 1.0 - (-40.0f64).exp();
        for n in 1..=MAX_ORDER {
            let w = gregory_weights(n, m, Sidedness::LeftSided).unwrap();
            let samples: Vec<C64> = (0..=m)
                .map(|j| C64::new((-(j as f64) * h).exp(), 0.0))
                .collect();
            let got = integrate(&samples, h, &w).unwrap().re;
            let err = (got - exact).abs();
            // error shrinks rapidly with n; n = 1 trapezoid sets the scale
            let bound = match n {
                1 => 1e-4,
                2 => 1e-7,
                3 => 1e-9,
                _ => 1e-11,
            };
            assert!(err < bound, "n={n}: err {err:.3e}");
        }
    }

    #[test]
    fn constant_integrates_to_interval_length_two_sided() {
        for n in 1..=MAX_ORDER {
            let m = 2 * n + 7;
            let h = 0.173;
            let w = gregory_weights(n, m, Sidedness::TwoSided).unwrap();
            let samples = vec![C64::new(1.0, 0.0); m + 1];
            let got = integrate(&samples, h, &w).unwrap().re;
            assert!((got - m as f64 * h).abs() < 1e-13 * m as f64 * h);
        }
    }

    #[test]
    fn cubic_with_n4() {
        // f(x) = x^3 on [0, 1], M = 16, n = 4: exactness degree >= 3.
        let m = 16;
        let h = 1.0 / 16.0;
        let w = gregory_weights(4, m, Sidedness::TwoSided).unwrap();
        let samples: Vec<C64> = (0..=m)
            .map(|j| C64::new((j as f64 * h).powi(3), 0.0))
            .collect();
        let got = integrate(&samples, h, &w).unwrap().re;
        assert!((got - 0.25).abs() < 1e-14);
    }

    #[test]
    fn convergence_ratio_for_smooth_integrand() {
        // e^x on [0, 1]; halving h must reduce the error by at least
        // 2^(exact_degree + 1) * 0.8.
        let exact = std::f64::consts::E - 1.0;
        for n in [1usize, 3, 6] {
            let err = |m: usize| -> f64 {
                let h = 1.0 / m as f64;
                let w = gregory_weights(n, m, Sidedness::TwoSided).unwrap();
                let samples: Vec<C64> =
                    (0..=m).map(|j| C64::new((j as f64 * h).exp(), 0.0)).collect();
                (integrate(&samples, h, &w).unwrap().re - exact).abs()
            };
            let (e1, e2) = (err(32), err(64));
            let ratio = e1 / e2;
            let want = 2f64.powi(exact_degree_for(n) as i32 + 1) * 0.8;
            assert!(ratio >= want, "n={n}: ratio {ratio:.1} < {want:.1}");
        }
    }

    #[test]
    fn exp_ratio_n6_is_about_2_pow_7() {
        let exact = std::f64::consts::E - 1.0;
        let err = |m: usize| -> f64 {
            let h = 1.0 / m as f64;
            let w = gregory_weights(6, m, Sidedness::TwoSided).unwrap();
            let samples: Vec<C64> =
                (0..=m).map(|j| C64::new((j as f64 * h).exp(), 0.0)).collect();
            (integrate(&samples, h, &w).unwrap().re - exact).abs()
        };
        let ratio = err(24) / err(48);
        assert!(
            (ratio / 128.0) > 0.6 && (ratio / 128.0) < 1.7,
            "ratio {ratio:.1} not near 2^7"
        );
    }

    #[test]
    fn integrate_rejects_length_mismatch() {
        let w = gregory_weights(2, 8, Sidedness::TwoSided).unwrap();
        let samples = vec![C64::new(1.0, 0.0); 4];
        assert!(matches!(
            integrate(&samples, 0.1, &w),
            Err(QuadratureError::LengthMismatch { .. })
        ));
    }
}
