//! Low-rank Woodbury correction: solve `B x = b` with `B = A - U V`, where
//! `A` is the block-Toeplitz operator and `U V` is the diagonal correction
//! collecting the non-unit Gregory weights.
//!
//! The factors follow the simplest splitting: `U` holds unit basis columns at
//! the corrected rows, `V` the matching rows scaled by the diagonal values
//! `1 - 1/w`. Solving then takes the textbook four steps: solve `A y = b`,
//! solve `A Z = U`, solve the small capacity system, and recombine.

use crate::block::{Pair, ZERO_PAIR};
use crate::error::SolveError;
use crate::quadrature::WeightVector;
use crate::toeplitz::{levinson_solve, BlockToeplitzSystem};
use num_complex::Complex64 as C64;

/// Scalar row address inside the interleaved block system: block row plus
/// slot (0 = first component, 1 = second).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowAddress {
    pub block: usize,
    pub slot: usize,
}

/// Diagonal low-rank correction `U V` with `(UV)[p][p] = 1 - 1/w` at the
/// corrected rows.
#[derive(Clone, Debug)]
pub struct LowRankCorrection {
    pub positions: Vec<RowAddress>,
    pub values: Vec<f64>,
}

impl LowRankCorrection {
    pub fn rank(&self) -> usize {
        self.positions.len()
    }
}

/// Build the correction for a weight vector on `m` subintervals.
///
/// Slot 0 rows follow the weights directly; slot 1 rows see them through the
/// exchange-matrix flip, so their diagonal entry at block `i` is
/// `1 - 1/w[m - i]`.
pub fn build_correction(w: &WeightVector, m: usize) -> LowRankCorrection {
    assert_eq!(w.weights.len(), m + 1, "weight vector does not match grid");
    let mut positions = Vec::new();
    let mut values = Vec::new();
    for block in 0..=m {
        for slot in 0..2 {
            let weight = if slot == 0 {
                w.weights[block]
            } else {
                w.weights[m - block]
            };
            if weight != 1.0 {
                positions.push(RowAddress { block, slot });
                values.push(1.0 - 1.0 / weight);
            }
        }
    }
    LowRankCorrection { positions, values }
}

/// Anything that can solve batches of right-hand sides against the uncorrected
/// block-Toeplitz operator `A`.
pub trait ToeplitzSolver {
    fn size(&self) -> usize;
    fn solve_batch(&mut self, rhs: &[Vec<Pair>]) -> Result<Vec<Vec<Pair>>, SolveError>;
}

/// Direct Levinson-backed solver over a concrete system.
pub struct LevinsonSolver<'a> {
    pub system: &'a BlockToeplitzSystem,
}

impl ToeplitzSolver for LevinsonSolver<'_> {
    fn size(&self) -> usize {
        self.system.size()
    }

    fn solve_batch(&mut self, rhs: &[Vec<Pair>]) -> Result<Vec<Vec<Pair>>, SolveError> {
        levinson_solve(self.system, rhs)
    }
}

/// Dense LU with partial pivoting on a small complex system, in place.
/// Returns a crude condition estimate on success.
pub(crate) fn solve_small_complex(
    a: &mut [Vec<C64>],
    b: &mut [C64],
) -> Result<f64, ()> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .ok_or(())?;
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        let pn = pivot.norm();
        if pn == 0.0 {
            return Err(());
        }
        min_pivot = min_pivot.min(pn);
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let bv = b[col];
            b[row] -= factor * bv;
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
    Ok(scale / min_pivot)
}

/// Solve the capacity system `(E_r - V Z) z = V y` given accessors into `Z`
/// and `y`. Shared by the one-shot solver below and the bordered sweep.
pub(crate) fn solve_capacity(
    corr: &LowRankCorrection,
    z_entry: impl Fn(usize, usize) -> C64,
    y_entry: impl Fn(usize) -> C64,
) -> Result<Vec<C64>, SolveError> {
    let r = corr.rank();
    let mut cap: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); r]; r];
    let mut rhs: Vec<C64> = vec![C64::new(0.0, 0.0); r];
    for (row, &d) in corr.values.iter().enumerate() {
        for (col, entry) in cap[row].iter_mut().enumerate() {
            let delta = if row == col { 1.0 } else { 0.0 };
            *entry = C64::new(delta, 0.0) - d * z_entry(row, col);
        }
        rhs[row] = d * y_entry(row);
    }
    let cond = solve_small_complex(&mut cap, &mut rhs)
        .map_err(|_| SolveError::CapacitySingular { rank: r, cond: f64::INFINITY })?;
    if cond > crate::toeplitz::BREAKDOWN_COND {
        return Err(SolveError::CapacitySingular { rank: r, cond });
    }
    Ok(rhs)
}

/// Four-step Woodbury solve of `(A - UV) x = b`.
pub fn woodbury_solve(
    solver: &mut dyn ToeplitzSolver,
    corr: &LowRankCorrection,
    b: &[Pair],
) -> Result<Vec<Pair>, SolveError> {
    let size = solver.size();
    let r = corr.rank();
    // steps 1 and 2 as one batch: A y = b and A Z = U (r unit columns)
    let mut batch = Vec::with_capacity(r + 1);
    batch.push(b.to_vec());
    for addr in &corr.positions {
        let mut col = vec![ZERO_PAIR; size];
        col[addr.block][addr.slot] = C64::new(1.0, 0.0);
        batch.push(col);
    }
    let sols = solver.solve_batch(&batch)?;
    let y = &sols[0];
    if r == 0 {
        return Ok(y.clone());
    }
    let z_cols = &sols[1..];
    // step 3: capacity system
    let z = solve_capacity(
        corr,
        |row, col| {
            let addr = corr.positions[row];
            z_cols[col][addr.block][addr.slot]
        },
        |row| {
            let addr = corr.positions[row];
            y[addr.block][addr.slot]
        },
    )?;
    // step 4: x = y + Z z
    let mut x = y.clone();
    for (zc, coeff) in z_cols.iter().zip(&z) {
        for (xe, ze) in x.iter_mut().zip(zc) {
            xe[0] += ze[0] * coeff;
            xe[1] += ze[1] * coeff;
        }
    }
    Ok(x)
}
