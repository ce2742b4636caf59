//! Block Toeplitz systems with 2x2 blocks and the Levinson recursion that
//! solves them, including grow-by-one bordering and multiple simultaneous
//! right-hand sides.
//!
//! The recursion keeps forward and backward predictor columns (the first and
//! last block columns of the inverse of the current leading subsystem). A
//! tracked right-hand side is updated in O(size) per bordering step, so a
//! full sweep over all leading subsystems costs O(size^2) per column.
//!
//! Besides plain columns, a column can be tracked "reflected": it solves the
//! index-reversed system (blocks `s_k -> s_{-k}`), whose predictors are the
//! reversals of the direct ones, so no extra predictor work is needed. The
//! GLME sweep uses this to follow unit columns anchored at the moving far
//! edge of the growing system.

use crate::block::{Block2, Pair, ZERO_PAIR};
use crate::error::SolveError;
use crate::spectral::Dispersion;
use num_complex::Complex64 as C64;

/// Condition-estimate threshold for declaring a leading-minor breakdown.
pub const BREAKDOWN_COND: f64 = 1e12;

/// A 2x2-block Toeplitz operator, blocks indexed by row minus column.
///
/// For the GLME the center block has a unit diagonal and every off-center
/// block a zero diagonal; the off-diagonal entries carry the kernel samples
/// with the dispersion sign on the upper-right entry.
#[derive(Clone, Debug)]
pub struct BlockToeplitzSystem {
    /// `blocks[k]` is `t_(k - size + 1)`, i.e. t_{-M} first, t_M last.
    blocks: Vec<Block2>,
    size: usize,
    pub sign: Dispersion,
}

impl BlockToeplitzSystem {
    pub fn new(blocks: Vec<Block2>, sign: Dispersion) -> Self {
        assert!(blocks.len() % 2 == 1, "need t_-M..t_M, an odd count");
        let size = blocks.len() / 2 + 1;
        Self { blocks, size, sign }
    }

    /// Build the operator from kernel samples `omega_k = Omega(2t - kh)`,
    /// k = 0..2M:
    ///
    /// ```text
    /// t_m = [ delta_m, sign * h * conj(omega_(M+m)) ]
    ///       [ h * omega_(M-m),            delta_m   ]
    /// ```
    pub fn from_omega(omega: &[C64], h: f64, sign: Dispersion) -> Self {
        assert!(omega.len() % 2 == 1, "need 2M + 1 kernel samples");
        let m_max = omega.len() / 2;
        let s = sign.coupling_sign();
        let blocks = (-(m_max as isize)..=m_max as isize)
            .map(|m| {
                let diag = if m == 0 { 1.0 } else { 0.0 };
                Block2::new(
                    C64::new(diag, 0.0),
                    s * h * omega[(m_max as isize + m) as usize].conj(),
                    h * omega[(m_max as isize - m) as usize],
                    C64::new(diag, 0.0),
                )
            })
            .collect();
        Self::new(blocks, sign)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Block at row-minus-column offset `m`.
    pub fn block(&self, m: isize) -> &Block2 {
        &self.blocks[(m + self.size as isize - 1) as usize]
    }

    /// Dense application `y = T x` for residual checks.
    pub fn apply(&self, x: &[Pair]) -> Vec<Pair> {
        assert_eq!(x.len(), self.size);
        (0..self.size)
            .map(|i| {
                let mut acc = ZERO_PAIR;
                for (j, xj) in x.iter().enumerate() {
                    self.block(i as isize - j as isize).acc_apply(&mut acc, xj);
                }
                acc
            })
            .collect()
    }
}

/// How a tracked column relates to the system: a direct column solves the
/// system itself (fed new right-hand-side entries, or zero-extended when it
/// is a unit column), a reflected one solves the index-reversed system and
/// is read back through the block-reversal map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    DirectFed,
    DirectZero,
    Reflected,
}

#[derive(Clone, Debug)]
struct TrackedColumn {
    route: Route,
    x: Vec<Pair>,
}

/// Levinson recursion state at the current leading block size.
#[derive(Clone, Debug)]
pub struct LevinsonState {
    /// s_0..s_m
    spos: Vec<Block2>,
    /// s_0, s_-1, .., s_-m
    sneg: Vec<Block2>,
    fwd: Vec<Block2>,
    bwd: Vec<Block2>,
    cols: Vec<TrackedColumn>,
}

impl LevinsonState {
    /// Start the recursion at block size 1.
    pub fn new(s0: Block2) -> Result<Self, SolveError> {
        let cond = s0.cond_estimate();
        if !cond.is_finite() || cond > BREAKDOWN_COND {
            return Err(SolveError::Breakdown { size: 1, cond });
        }
        let inv = s0.inv().expect("finite condition estimate");
        Ok(Self {
            spos: vec![s0],
            sneg: vec![s0],
            fwd: vec![inv],
            bwd: vec![inv],
            cols: Vec::new(),
        })
    }

    /// Current number of block rows.
    pub fn size(&self) -> usize {
        self.fwd.len()
    }

    /// Number of tracked columns `extend` feeds new right-hand-side entries
    /// to, in registration order.
    pub fn direct_columns(&self) -> usize {
        self.cols
            .iter()
            .filter(|c| c.route == Route::DirectFed)
            .count()
    }

    /// Register a right-hand side at block size 1. Later entries arrive
    /// through `extend`.
    pub fn push_initial_rhs(&mut self, f0: Pair) -> usize {
        assert_eq!(self.size(), 1, "initial right-hand sides enter at size 1");
        let x0 = self.fwd[0].apply(&f0);
        self.cols.push(TrackedColumn {
            route: Route::DirectFed,
            x: vec![x0],
        });
        self.cols.len() - 1
    }

    /// Track the unit column anchored at the current last block row. The
    /// solution is the matching backward-predictor column, extended with
    /// zero right-hand-side entries from here on.
    pub fn push_unit_column_at_end(&mut self, slot: usize) -> usize {
        let x = self
            .bwd
            .iter()
            .map(|b| [b.m[0][slot], b.m[1][slot]])
            .collect();
        self.cols.push(TrackedColumn {
            route: Route::DirectZero,
            x,
        });
        self.cols.len() - 1
    }

    /// Track a unit column of the reflected system anchored at its current
    /// last block row (the direct system's row `size-1` counted from the
    /// far edge stays pinned to this column under bordering).
    pub fn push_reflected_unit_column_at_end(&mut self, slot: usize) -> usize {
        let m = self.size() - 1;
        let x = (0..=m)
            .map(|p| {
                let b = &self.fwd[m - p];
                [b.m[0][slot], b.m[1][slot]]
            })
            .collect();
        self.cols.push(TrackedColumn {
            route: Route::Reflected,
            x,
        });
        self.cols.len() - 1
    }

    /// Grow the system by one block row. `s_neg` and `s_pos` are the new
    /// outer blocks `t_-(m+1)` and `t_(m+1)`; `new_rhs` carries one new
    /// entry per direct column in registration order (reflected columns
    /// always extend by zero).
    pub fn extend(
        &mut self,
        s_neg: Block2,
        s_pos: Block2,
        new_rhs: &[Pair],
    ) -> Result<(), SolveError> {
        let m = self.size() - 1;
        debug_assert_eq!(new_rhs.len(), self.direct_columns());
        self.spos.push(s_pos);
        self.sneg.push(s_neg);

        // inner products of the new border row/column with the predictors
        let mut delta_a = Block2::zero();
        let mut delta_b = Block2::zero();
        for p in 0..=m {
            delta_a.acc_mul(&self.spos[m + 1 - p], &self.fwd[p]);
            delta_b.acc_mul(&self.sneg[p + 1], &self.bwd[p]);
        }
        let id = Block2::identity();
        let k_ba = id.sub(&delta_b.mul(&delta_a));
        let k_ab = id.sub(&delta_a.mul(&delta_b));
        let cond = k_ba.cond_estimate().max(k_ab.cond_estimate());
        if !cond.is_finite() || cond > BREAKDOWN_COND {
            return Err(SolveError::Breakdown { size: m + 2, cond });
        }
        let x = k_ba.inv().expect("checked condition");
        let yp = k_ab.inv().expect("checked condition");
        let y = Block2::zero().sub(&delta_a.mul(&x));
        let xp = Block2::zero().sub(&delta_b.mul(&yp));

        // fwd_new = [fwd;0] X + [0;bwd] Y ; bwd_new = [fwd;0] X' + [0;bwd] Y'
        let mut fwd_new = Vec::with_capacity(m + 2);
        let mut bwd_new = Vec::with_capacity(m + 2);
        for p in 0..=m + 1 {
            let mut f = Block2::zero();
            let mut b = Block2::zero();
            if p <= m {
                f.acc_mul(&self.fwd[p], &x);
                b.acc_mul(&self.fwd[p], &xp);
            }
            if p >= 1 {
                f.acc_mul(&self.bwd[p - 1], &y);
                b.acc_mul(&self.bwd[p - 1], &yp);
            }
            fwd_new.push(f);
            bwd_new.push(b);
        }
        self.fwd = fwd_new;
        self.bwd = bwd_new;

        let mut direct_idx = 0;
        for col in &mut self.cols {
            match col.route {
                Route::DirectFed | Route::DirectZero => {
                    let f_new = if col.route == Route::DirectFed {
                        let f = new_rhs[direct_idx];
                        direct_idx += 1;
                        f
                    } else {
                        ZERO_PAIR
                    };
                    let mut delta = f_new;
                    for (p, xp_) in col.x.iter().enumerate() {
                        let s = &self.spos[m + 1 - p];
                        delta[0] -= s.m[0][0] * xp_[0] + s.m[0][1] * xp_[1];
                        delta[1] -= s.m[1][0] * xp_[0] + s.m[1][1] * xp_[1];
                    }
                    col.x.push(ZERO_PAIR);
                    for (p, xp_) in col.x.iter_mut().enumerate() {
                        self.bwd[p].acc_apply(xp_, &delta);
                    }
                }
                Route::Reflected => {
                    let mut delta = ZERO_PAIR;
                    for (p, xp_) in col.x.iter().enumerate() {
                        let s = &self.sneg[m + 1 - p];
                        delta[0] -= s.m[0][0] * xp_[0] + s.m[0][1] * xp_[1];
                        delta[1] -= s.m[1][0] * xp_[0] + s.m[1][1] * xp_[1];
                    }
                    col.x.push(ZERO_PAIR);
                    let msz = m + 1;
                    for (p, xp_) in col.x.iter_mut().enumerate() {
                        self.fwd[msz - p].acc_apply(xp_, &delta);
                    }
                }
            }
        }
        Ok(())
    }

    /// Solution entry of column `id` at block row `block`, with reflected
    /// columns read through the reversal map.
    pub fn entry(&self, id: usize, block: usize) -> Pair {
        let col = &self.cols[id];
        match col.route {
            Route::DirectFed | Route::DirectZero => col.x[block],
            Route::Reflected => col.x[self.size() - 1 - block],
        }
    }

    /// Materialized solution of column `id` in direct (physical) indexing.
    pub fn solution(&self, id: usize) -> Vec<Pair> {
        (0..self.size()).map(|b| self.entry(id, b)).collect()
    }
}

/// One-shot solve of `sys * x = f` for every right-hand side in `rhs`,
/// running the bordering recursion across all leading subsystems.
pub fn levinson_solve(
    sys: &BlockToeplitzSystem,
    rhs: &[Vec<Pair>],
) -> Result<Vec<Vec<Pair>>, SolveError> {
    for f in rhs {
        if f.len() != sys.size() {
            return Err(SolveError::RhsMismatch {
                got: f.len(),
                expected: sys.size(),
            });
        }
    }
    let mut st = LevinsonState::new(*sys.block(0))?;
    let ids: Vec<usize> = rhs.iter().map(|f| st.push_initial_rhs(f[0])).collect();
    let mut new_entries = Vec::with_capacity(rhs.len());
    for m in 1..sys.size() {
        new_entries.clear();
        new_entries.extend(rhs.iter().map(|f| f[m]));
        st.extend(*sys.block(-(m as isize)), *sys.block(m as isize), &new_entries)?;
    }
    Ok(ids.into_iter().map(|id| st.solution(id)).collect())
}
