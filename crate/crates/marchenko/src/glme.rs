//! Recovery of the potential from spectral data: discretize the GLME on a
//! uniform grid, sweep the output time with inner bordering, apply the
//! low-rank weight correction, and read off `q(t)`.
//!
//! The left equations are solved on `[-L/2, 0]`; the right half comes from
//! running the same machinery on the reversed signal's data and flipping the
//! result. At output step `j` the system covers `[0, j h]` with `h = 2 tau`,
//! so consecutive output times differ by `h / 2` and the block-Toeplitz
//! system grows by exactly one block row per step while all previous blocks
//! and right-hand-side entries stay put. The Gregory weight correction never
//! touches the tracked recursions: it is applied per step through the
//! Woodbury capacity system, using unit columns tracked directly (fixed left
//! edge) and through the reflected recursion (moving far edge).

use crate::block::Pair;
use crate::error::GlmeError;
use crate::quadrature::{self, Sidedness, WeightVector};
use crate::spectral::{Dispersion, KernelTrack, SpectralData};
use crate::toeplitz::{BlockToeplitzSystem, LevinsonState};
use crate::woodbury::{build_correction, solve_capacity, LowRankCorrection, RowAddress};
use num_complex::Complex64 as C64;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

/// Recovery scheme: the classic second-order baseline or a Gregory-corrected
/// scheme of correction count 2..6, one-sided (`G4`) or two-sided (`G4d`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Tib,
    Gregory { n: usize, two_sided: bool },
}

impl Scheme {
    pub fn correction_count(self) -> usize {
        match self {
            Scheme::Tib => 1,
            Scheme::Gregory { n, .. } => n,
        }
    }

    pub fn sidedness(self) -> Sidedness {
        match self {
            Scheme::Tib => Sidedness::TwoSided,
            Scheme::Gregory { two_sided: true, .. } => Sidedness::TwoSided,
            Scheme::Gregory { two_sided: false, .. } => Sidedness::LeftSided,
        }
    }

    /// Gregory order used for the kernel's spectral integral (always
    /// two-sided there; the baseline uses the trapezoid).
    pub fn kernel_order(self) -> usize {
        self.correction_count()
    }

    /// Smallest GLME subinterval count the final system must reach.
    pub fn min_subintervals(self) -> usize {
        match self {
            Scheme::Tib => 1,
            Scheme::Gregory { n, two_sided: true } => 2 * n,
            Scheme::Gregory { n, two_sided: false } => n,
        }
    }

    pub fn all() -> Vec<Scheme> {
        let mut v = vec![Scheme::Tib];
        for n in 2..=6 {
            v.push(Scheme::Gregory { n, two_sided: false });
        }
        for n in 2..=6 {
            v.push(Scheme::Gregory { n, two_sided: true });
        }
        v
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Tib => write!(f, "TIB"),
            Scheme::Gregory { n, two_sided } => {
                write!(f, "G{}{}", n, if *two_sided { "d" } else { "" })
            }
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim();
        if up.eq_ignore_ascii_case("tib") {
            return Ok(Scheme::Tib);
        }
        let rest = up
            .strip_prefix('G')
            .or_else(|| up.strip_prefix('g'))
            .ok_or_else(|| format!("unknown scheme '{s}'"))?;
        let (digits, two_sided) = match rest.strip_suffix(['d', 'D']) {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let n: usize = digits
            .parse()
            .map_err(|_| format!("unknown scheme '{s}'"))?;
        if !(2..=6).contains(&n) {
            return Err(format!("scheme order {n} outside 2..=6"));
        }
        Ok(Scheme::Gregory { n, two_sided })
    }
}

/// How the output interval is covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// Left equations on `[-L/2, 0]`, right equations (reversed data) on
    /// `(0, L/2]`; each side integrates over a region of size `P = L`.
    AtZero,
    /// Left equations across the whole interval.
    LeftOnly,
}

#[derive(Clone, Copy, Debug)]
pub struct GridConfig {
    pub l: f64,
    pub m_out: usize,
    pub split: Split,
}

impl GridConfig {
    pub fn split_at_zero(l: f64, m_out: usize) -> Result<Self, GlmeError> {
        if m_out % 2 != 0 {
            return Err(GlmeError::OddSplit { m_out });
        }
        Ok(Self { l, m_out, split: Split::AtZero })
    }

    pub fn left_only(l: f64, m_out: usize) -> Self {
        Self { l, m_out, split: Split::LeftOnly }
    }

    /// Output grid spacing.
    pub fn tau(&self) -> f64 {
        self.l / self.m_out as f64
    }

    /// GLME step, `h = 2 tau`.
    pub fn h(&self) -> f64 {
        2.0 * self.tau()
    }

    /// Subintervals of one sweep's integration region.
    pub fn sweep_subintervals(&self) -> usize {
        match self.split {
            Split::AtZero => self.m_out / 2,
            Split::LeftOnly => self.m_out,
        }
    }

    pub fn t_at(&self, k: usize) -> f64 {
        -0.5 * self.l + self.tau() * k as f64
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RecoverOptions {
    /// Record the relative residual of the corrected system at each step.
    pub compute_residuals: bool,
    /// Solve every output time from scratch instead of bordering
    /// (verification mode; quadratic cost per point).
    pub from_scratch: bool,
    /// Run the left and right sweeps concurrently. Off by default so a
    /// recovery stays single-threaded for honest timing.
    pub parallel_halves: bool,
    /// Evaluate all kernel values up front instead of one per half-step;
    /// bit-identical results, useful for isolating sweep cost.
    pub precompute_kernel: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SweepTiming {
    /// Time spent evaluating kernel values (spectral sums).
    pub kernel: Duration,
    /// Whole recovery, kernel evaluation included.
    pub total: Duration,
}

/// Recovered signal samples on the output grid.
#[derive(Clone, Debug)]
pub struct RecoveredPotential {
    pub t: Vec<f64>,
    pub q: Vec<C64>,
    pub scheme: Scheme,
    pub residuals: Option<Vec<f64>>,
    pub timing: SweepTiming,
}

impl RecoveredPotential {
    /// CSV with columns `t, re_q, im_q, abs_q[, eps]`; the error column is
    /// present only when a reference is supplied.
    pub fn write_csv(
        &self,
        path: &std::path::Path,
        reference: Option<&[C64]>,
    ) -> std::io::Result<()> {
        use std::io::Write;
        let mut out = String::new();
        let max_ref = reference.map(|r| r.iter().map(|c| c.norm()).fold(0.0f64, f64::max));
        match max_ref {
            Some(_) => out.push_str("t,re_q,im_q,abs_q,eps\n"),
            None => out.push_str("t,re_q,im_q,abs_q\n"),
        }
        for (k, (&t, &q)) in self.t.iter().zip(&self.q).enumerate() {
            match (reference, max_ref) {
                (Some(r), Some(mx)) if mx > 0.0 => {
                    let eps = (q - r[k]).norm() / mx;
                    out.push_str(&format!(
                        "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                        t,
                        q.re,
                        q.im,
                        q.norm(),
                        eps
                    ));
                }
                _ => out.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    t,
                    q.re,
                    q.im,
                    q.norm()
                )),
            }
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(out.as_bytes())
    }
}

/// Assemble the flipped block-Toeplitz form of the discretized GLME at the
/// track's current time: the uncorrected operator `A` (weights live in the
/// Woodbury correction) plus the right-hand side `(0, J F)` interleaved as
/// block rows `[0, -omega_(M-i)]`.
pub fn assemble_system(
    kt: &KernelTrack,
    w: &WeightVector,
    dispersion: Dispersion,
) -> Result<(BlockToeplitzSystem, Vec<Pair>), GlmeError> {
    if w.weights.len() != kt.m + 1 || kt.omega.len() != 2 * kt.m + 1 {
        return Err(GlmeError::Quadrature(
            crate::error::QuadratureError::LengthMismatch {
                samples: kt.omega.len(),
                weights: w.weights.len(),
            },
        ));
    }
    let sys = BlockToeplitzSystem::from_omega(&kt.omega, kt.h, dispersion);
    let rhs = (0..=kt.m)
        .map(|i| [C64::new(0.0, 0.0), -kt.omega[kt.m - i]])
        .collect();
    Ok((sys, rhs))
}

/// Weights used at an intermediate bordering step (clipped correction count
/// while the grid is shorter than the full pattern).
fn step_weights(scheme: Scheme, m: usize, sidedness: Sidedness) -> WeightVector {
    quadrature::weights_for_size(scheme.correction_count(), m, sidedness)
}

fn sweep_block(omega: &[C64], m_sys: usize, m: isize, h: f64, sign: f64) -> crate::block::Block2 {
    let diag = if m == 0 { 1.0 } else { 0.0 };
    let up = (m_sys as isize + m) as usize;
    let lo = (m_sys as isize - m) as usize;
    crate::block::Block2::new(
        C64::new(diag, 0.0),
        sign * h * omega[up].conj(),
        h * omega[lo],
        C64::new(diag, 0.0),
    )
}

/// One growing left-GLME sweep over `[-L/2, -L/2 + m_sweep * tau]`.
struct GregorySweep<'a> {
    sd: &'a SpectralData,
    scheme: Scheme,
    sidedness: Sidedness,
    kernel_w: WeightVector,
    dispersion: Dispersion,
    h: f64,
    track: KernelTrack,
    state: LevinsonState,
    main_id: usize,
    /// direct unit columns: `[block][slot]`
    direct_ids: Vec<[Option<usize>; 2]>,
    /// reflected unit columns: `[offset][slot]`
    reflect_ids: Vec<[Option<usize>; 2]>,
    /// precomputed fresh kernel values, consumed front to back
    cache: Option<std::collections::VecDeque<C64>>,
    kernel_time: Duration,
}

impl<'a> GregorySweep<'a> {
    fn new(
        sd: &'a SpectralData,
        scheme: Scheme,
        dispersion: Dispersion,
        t0: f64,
        h: f64,
        m_sweep: usize,
        precompute: bool,
    ) -> Result<Self, GlmeError> {
        let kernel_w = sd.kernel_weights(scheme.kernel_order())?;
        let started = Instant::now();
        let track = KernelTrack::init(sd, t0, h, m_sweep, &kernel_w)?;
        let cache = if precompute {
            Some(std::collections::VecDeque::from(
                crate::spectral::precompute_advance_values(sd, t0, h, m_sweep, &kernel_w)
                    .map_err(GlmeError::Spectral)?,
            ))
        } else {
            None
        };
        let kernel_time = started.elapsed();
        let s0 = sweep_block(&track.omega, 0, 0, h, dispersion.coupling_sign());
        let mut state = LevinsonState::new(s0)
            .map_err(|e| breakdown_to_glme(e, t0))?;
        let main_id = state.push_initial_rhs([C64::new(0.0, 0.0), -track.omega[0]]);
        let mut sweep = Self {
            sd,
            scheme,
            sidedness: scheme.sidedness(),
            kernel_w,
            dispersion,
            h,
            track,
            state,
            main_id,
            direct_ids: Vec::new(),
            reflect_ids: Vec::new(),
            cache,
            kernel_time,
        };
        sweep.register_columns_at_end();
        Ok(sweep)
    }

    /// After the state has grown to its current size, start tracking the
    /// unit columns anchored at the newest block row (while within the edge
    /// pattern width).
    fn register_columns_at_end(&mut self) {
        let block = self.state.size() - 1;
        let n = self.scheme.correction_count();
        if block >= n {
            return;
        }
        let two_sided = self.sidedness.is_two_sided();
        let mut direct = [None, None];
        let mut reflect = [None, None];
        // slot 0 rows carry the weights directly: corrections at the fixed
        // left edge; slot 1 rows see them flipped: corrections at the moving
        // far edge. Two-sided patterns touch both edges in both slots.
        direct[0] = Some(self.state.push_unit_column_at_end(0));
        reflect[1] = Some(self.state.push_reflected_unit_column_at_end(1));
        if two_sided {
            direct[1] = Some(self.state.push_unit_column_at_end(1));
            reflect[0] = Some(self.state.push_reflected_unit_column_at_end(0));
        }
        self.direct_ids.push(direct);
        self.reflect_ids.push(reflect);
    }

    fn column_for(&self, addr: RowAddress, m_sys: usize, n_step: usize) -> usize {
        if self.sidedness.is_two_sided() {
            // corrections split cleanly by edge: near blocks are tracked
            // directly, far blocks through the reflected recursion
            if addr.block < n_step {
                self.direct_ids[addr.block][addr.slot].expect("direct column registered")
            } else {
                self.reflect_ids[m_sys - addr.block][addr.slot]
                    .expect("reflected column registered")
            }
        } else {
            // one-sided: slot 0 rows correct the fixed left edge, slot 1 rows
            // the moving far edge, regardless of how short the system is
            match addr.slot {
                0 => self.direct_ids[addr.block][0].expect("direct column registered"),
                _ => self.reflect_ids[m_sys - addr.block][1]
                    .expect("reflected column registered"),
            }
        }
    }

    /// Advance to the next output time and grow the system by one block.
    fn step(&mut self) -> Result<(), GlmeError> {
        let started = Instant::now();
        match self.cache.as_mut().and_then(|c| c.pop_front()) {
            Some(fresh) => self.track.advance_with_value(fresh),
            None => self
                .track
                .advance(self.sd, &self.kernel_w)
                .map_err(GlmeError::Spectral)?,
        }
        self.kernel_time += started.elapsed();
        let j = self.state.size(); // new system index after this extension
        let sign = self.dispersion.coupling_sign();
        let s_pos = sweep_block(&self.track.omega, j, j as isize, self.h, sign);
        let s_neg = sweep_block(&self.track.omega, j, -(j as isize), self.h, sign);
        let f_new = [C64::new(0.0, 0.0), -self.track.omega[0]];
        self.state
            .extend(s_neg, s_pos, &[f_new])
            .map_err(|e| breakdown_to_glme(e, self.track.t))?;
        self.register_columns_at_end();
        Ok(())
    }

    /// Correction for the current step size.
    fn correction(&self, m_sys: usize) -> (WeightVector, LowRankCorrection) {
        let w = step_weights(self.scheme, m_sys, self.sidedness);
        let corr = build_correction(&w, m_sys);
        (w, corr)
    }

    /// Extract `q` at the current time via the Woodbury-corrected last block.
    fn extract(&self) -> Result<C64, GlmeError> {
        let m_sys = self.state.size() - 1;
        let (w, corr) = self.correction(m_sys);
        let n_step = w.n;
        let y_last = self.state.entry(self.main_id, m_sys);
        let x_last = if corr.rank() == 0 {
            y_last
        } else {
            let z = solve_capacity(
                &corr,
                |row, col| {
                    let at = corr.positions[row];
                    let id = self.column_for(corr.positions[col], m_sys, n_step);
                    self.state.entry(id, at.block)[at.slot]
                },
                |row| {
                    let at = corr.positions[row];
                    self.state.entry(self.main_id, at.block)[at.slot]
                },
            )
            .map_err(|e| breakdown_to_glme(e, self.track.t))?;
            let mut x = y_last;
            for (col, coeff) in z.iter().enumerate() {
                let id = self.column_for(corr.positions[col], m_sys, n_step);
                let zb = self.state.entry(id, m_sys);
                x[0] += zb[0] * coeff;
                x[1] += zb[1] * coeff;
            }
            x
        };
        Ok(self.dispersion.extraction_sign() * x_last[1] / w.weights[0])
    }

    /// Relative residual of the corrected system at the current step
    /// (materializes the full solution; verification only).
    fn residual(&self) -> f64 {
        let m_sys = self.state.size() - 1;
        let (w, corr) = self.correction(m_sys);
        let n_step = w.n;
        let y = self.state.solution(self.main_id);
        let x = if corr.rank() == 0 {
            y
        } else {
            let z = match solve_capacity(
                &corr,
                |row, col| {
                    let at = corr.positions[row];
                    let id = self.column_for(corr.positions[col], m_sys, n_step);
                    self.state.entry(id, at.block)[at.slot]
                },
                |row| {
                    let at = corr.positions[row];
                    self.state.entry(self.main_id, at.block)[at.slot]
                },
            ) {
                Ok(z) => z,
                Err(_) => return f64::INFINITY,
            };
            let mut x = y;
            for (col, coeff) in z.iter().enumerate() {
                let id = self.column_for(corr.positions[col], m_sys, n_step);
                for (b, xe) in x.iter_mut().enumerate() {
                    let zb = self.state.entry(id, b);
                    xe[0] += zb[0] * coeff;
                    xe[1] += zb[1] * coeff;
                }
            }
            x
        };
        // B x = A x - UV x against the right-hand side
        let sys = BlockToeplitzSystem::from_omega(
            &self.track.omega[..=2 * m_sys],
            self.h,
            self.dispersion,
        );
        let mut bx = sys.apply(&x);
        for (addr, d) in corr.positions.iter().zip(&corr.values) {
            bx[addr.block][addr.slot] -= d * x[addr.block][addr.slot];
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, bxe) in bx.iter().enumerate() {
            let f = [C64::new(0.0, 0.0), -self.track.omega[m_sys - i]];
            num += (bxe[0] - f[0]).norm_sqr() + (bxe[1] - f[1]).norm_sqr();
            den += f[0].norm_sqr() + f[1].norm_sqr();
        }
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

fn breakdown_to_glme(e: crate::error::SolveError, t: f64) -> GlmeError {
    match e {
        crate::error::SolveError::Breakdown { size, .. } => {
            GlmeError::SweepBreakdown { t, size }
        }
        crate::error::SolveError::CapacitySingular { rank, .. } => {
            GlmeError::SweepBreakdown { t, size: rank }
        }
        crate::error::SolveError::RhsMismatch { .. } => GlmeError::SweepBreakdown { t, size: 0 },
    }
}

/// Run one left sweep, returning `q` at `t_j = t0 + j tau`, `j = 0..=m_sweep`.
fn run_gregory_sweep(
    sd: &SpectralData,
    scheme: Scheme,
    dispersion: Dispersion,
    t0: f64,
    h: f64,
    m_sweep: usize,
    opts: RecoverOptions,
) -> Result<(Vec<C64>, Option<Vec<f64>>, Duration), GlmeError> {
    let mut q = Vec::with_capacity(m_sweep + 1);
    let mut residuals = opts.compute_residuals.then(Vec::new);
    let mut sweep =
        GregorySweep::new(sd, scheme, dispersion, t0, h, m_sweep, opts.precompute_kernel)?;
    // first output point: the integration region has zero length, so the
    // second equation gives X2(0, t0) = -Omega(2 t0) exactly
    q.push(dispersion.extraction_sign() * -sweep.track.omega[0]);
    if let Some(r) = residuals.as_mut() {
        r.push(0.0);
    }
    for _ in 1..=m_sweep {
        sweep.step()?;
        q.push(sweep.extract()?);
        if let Some(r) = residuals.as_mut() {
            r.push(sweep.residual());
        }
    }
    Ok((q, residuals, sweep.kernel_time))
}

/// From-scratch variant: one independent Woodbury-corrected Levinson solve
/// per output point (verification mode).
fn run_gregory_from_scratch(
    sd: &SpectralData,
    scheme: Scheme,
    dispersion: Dispersion,
    t0: f64,
    h: f64,
    m_sweep: usize,
) -> Result<(Vec<C64>, Duration), GlmeError> {
    let kernel_w = sd.kernel_weights(scheme.kernel_order())?;
    let started = Instant::now();
    let track = KernelTrack::init(sd, t0, h, m_sweep, &kernel_w)?;
    let mut kernel_time = started.elapsed();
    let mut q = Vec::with_capacity(m_sweep + 1);
    q.push(dispersion.extraction_sign() * -track.omega[0]);
    let mut work = track.clone();
    for j in 1..=m_sweep {
        let started = Instant::now();
        work.advance(sd, &kernel_w).map_err(GlmeError::Spectral)?;
        kernel_time += started.elapsed();
        let w = step_weights(scheme, j, scheme.sidedness());
        let corr = build_correction(&w, j);
        let sys = BlockToeplitzSystem::from_omega(&work.omega[..=2 * j], h, dispersion);
        let rhs: Vec<Pair> = (0..=j)
            .map(|i| [C64::new(0.0, 0.0), -work.omega[j - i]])
            .collect();
        let mut solver = crate::woodbury::LevinsonSolver { system: &sys };
        let x = crate::woodbury::woodbury_solve(&mut solver, &corr, &rhs)
            .map_err(|e| breakdown_to_glme(e, work.t))?;
        q.push(dispersion.extraction_sign() * x[j][1] / w.weights[0]);
    }
    Ok((q, kernel_time))
}

/// TIB baseline sweep: staggered unknowns, kernel sampled on the half-step
/// lattice, no weight correction, extraction through the k = 0 equation.
fn run_tib_sweep(
    sd: &SpectralData,
    dispersion: Dispersion,
    t0: f64,
    h: f64,
    m_sweep: usize,
    precompute: bool,
) -> Result<(Vec<C64>, Duration), GlmeError> {
    let kernel_w = sd.kernel_weights(1)?;
    let h2 = 0.5 * h;
    let started = Instant::now();
    // Track on the half-step lattice: omega'_k = Omega(2t - k h/2), so the
    // integer-h samples sit at even indices and the staggered ones at odd.
    let mut track = KernelTrack::init(sd, t0, h2, 2 * m_sweep, &kernel_w)?;
    let mut cache = if precompute {
        Some(std::collections::VecDeque::from(
            crate::spectral::precompute_advance_values(sd, t0, h2, 2 * m_sweep, &kernel_w)
                .map_err(GlmeError::Spectral)?,
        ))
    } else {
        None
    };
    let mut kernel_time = started.elapsed();
    let sign = dispersion.coupling_sign();
    let mut q = Vec::with_capacity(m_sweep + 1);
    q.push(dispersion.extraction_sign() * -track.omega[0]);
    let mut state: Option<(LevinsonState, usize)> = None; // state, main id
    for j in 1..=m_sweep {
        // two half-lattice advances move t by h/2
        let started = Instant::now();
        for _ in 0..2 {
            match cache.as_mut().and_then(|c| c.pop_front()) {
                Some(fresh) => track.advance_with_value(fresh),
                None => track.advance(sd, &kernel_w).map_err(GlmeError::Spectral)?,
            }
        }
        kernel_time += started.elapsed();
        let om = |k: usize| track.omega[k]; // half-lattice index
        match state.as_mut() {
            None => {
                // size-1 system at j = 1
                let s0 = crate::block::Block2::new(
                    C64::new(1.0, 0.0),
                    sign * h * om(2).conj(),
                    h * om(2),
                    C64::new(1.0, 0.0),
                );
                let mut st =
                    LevinsonState::new(s0).map_err(|e| breakdown_to_glme(e, track.t))?;
                let id = st.push_initial_rhs([C64::new(0.0, 0.0), -om(1)]);
                state = Some((st, id));
            }
            Some((st, id)) => {
                let m = st.size(); // new block offset after extension
                let s_pos = crate::block::Block2::new(
                    C64::new(0.0, 0.0),
                    sign * h * om(2 * (2 * m + 1)).conj(),
                    h * om(2),
                    C64::new(0.0, 0.0),
                );
                let s_neg = crate::block::Block2::new(
                    C64::new(0.0, 0.0),
                    sign * h * om(2).conj(),
                    h * om(2 * (2 * m + 1)),
                    C64::new(0.0, 0.0),
                );
                let f_new = [C64::new(0.0, 0.0), -om(1)];
                st.extend(s_neg, s_pos, &[f_new])
                    .map_err(|e| breakdown_to_glme(e, track.t))?;
                let _ = id;
            }
        }
        let (st, id) = state.as_ref().expect("state initialized");
        // X2(0, t) = -Omega(2t) - h sum_p Omega(2t - (p + 1/2) h) X1_p
        let mut x2 = -om(0);
        for p in 0..st.size() {
            x2 -= h * om(2 * p + 1) * st.entry(*id, p)[0];
        }
        q.push(dispersion.extraction_sign() * x2);
        debug_assert_eq!(st.size(), j);
    }
    Ok((q, kernel_time))
}

fn run_sweep(
    sd: &SpectralData,
    scheme: Scheme,
    dispersion: Dispersion,
    t0: f64,
    h: f64,
    m_sweep: usize,
    opts: RecoverOptions,
) -> Result<(Vec<C64>, Option<Vec<f64>>, Duration), GlmeError> {
    match scheme {
        Scheme::Tib => {
            let (q, kernel) =
                run_tib_sweep(sd, dispersion, t0, h, m_sweep, opts.precompute_kernel)?;
            Ok((q, None, kernel))
        }
        Scheme::Gregory { .. } => {
            if opts.from_scratch {
                let (q, kernel) =
                    run_gregory_from_scratch(sd, scheme, dispersion, t0, h, m_sweep)?;
                Ok((q, None, kernel))
            } else {
                run_gregory_sweep(sd, scheme, dispersion, t0, h, m_sweep, opts)
            }
        }
    }
}

/// Recover the potential on the output grid of `grid` from left spectral
/// data (plus reversed-signal data for the right half in split mode).
pub fn recover(
    sd_left: &SpectralData,
    sd_right: Option<&SpectralData>,
    grid: &GridConfig,
    scheme: Scheme,
    opts: RecoverOptions,
) -> Result<RecoveredPotential, GlmeError> {
    let m_sweep = grid.sweep_subintervals();
    if m_sweep < scheme.min_subintervals() {
        return Err(GlmeError::DegenerateGrid {
            m: m_sweep,
            scheme: scheme.to_string(),
            min: scheme.min_subintervals(),
        });
    }
    let started = Instant::now();
    let h = grid.h();
    let t0 = -0.5 * grid.l;
    let dispersion = sd_left.dispersion;
    let (left, right) = if grid.split == Split::AtZero {
        let sd_right = sd_right.ok_or(GlmeError::MissingRightData)?;
        if opts.parallel_halves {
            let (l, r) = rayon::join(
                || run_sweep(sd_left, scheme, dispersion, t0, h, m_sweep, opts),
                || run_sweep(sd_right, scheme, dispersion, t0, h, m_sweep, opts),
            );
            (l?, Some(r?))
        } else {
            (
                run_sweep(sd_left, scheme, dispersion, t0, h, m_sweep, opts)?,
                Some(run_sweep(sd_right, scheme, dispersion, t0, h, m_sweep, opts)?),
            )
        }
    } else {
        (
            run_sweep(sd_left, scheme, dispersion, t0, h, m_sweep, opts)?,
            None,
        )
    };
    let (mut q, mut residuals, mut kernel_time) = left;
    if let Some((q_rev, res_rev, kernel_rev)) = right {
        kernel_time += kernel_rev;
        // reversed-signal samples flip onto (0, L/2]
        for k in m_sweep + 1..=grid.m_out {
            q.push(q_rev[grid.m_out - k]);
        }
        if let (Some(r), Some(rr)) = (residuals.as_mut(), res_rev) {
            for k in m_sweep + 1..=grid.m_out {
                r.push(rr[grid.m_out - k]);
            }
        }
    }
    let t = (0..q.len()).map(|k| grid.t_at(k)).collect();
    Ok(RecoveredPotential {
        t,
        q,
        scheme,
        residuals,
        timing: SweepTiming {
            kernel: kernel_time,
            total: started.elapsed(),
        },
    })
}

/// Second-order baseline recovery (same contract as `recover`, TIB path).
pub fn recover_reference_tib(
    sd_left: &SpectralData,
    sd_right: Option<&SpectralData>,
    grid: &GridConfig,
    opts: RecoverOptions,
) -> Result<RecoveredPotential, GlmeError> {
    recover(sd_left, sd_right, grid, Scheme::Tib, opts)
}

/// Centralized index bookkeeping for the extraction: the solved unknown is
/// `J Y_2`, so `X_2(0, t) = (J Y_2)[M] / w_0`.
pub fn extract_q(
    last_block: Pair,
    w0: f64,
    dispersion: Dispersion,
) -> C64 {
    dispersion.extraction_sign() * last_block[1] / w0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{DiscretePair, Side};

    fn soliton_data(zeta: C64, norm: C64) -> SpectralData {
        SpectralData::new(
            Side::Left,
            Dispersion::Anomalous,
            0.0,
            0.0,
            vec![],
            vec![DiscretePair { zeta, norm }],
        )
        .unwrap()
    }

    fn zero_data() -> SpectralData {
        SpectralData::new(
            Side::Left,
            Dispersion::Anomalous,
            -5.0,
            5.0,
            vec![C64::new(0.0, 0.0); 65],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn scheme_parse_and_display() {
        assert_eq!("TIB".parse::<Scheme>().unwrap(), Scheme::Tib);
        assert_eq!(
            "G6".parse::<Scheme>().unwrap(),
            Scheme::Gregory { n: 6, two_sided: false }
        );
        assert_eq!(
            "g3d".parse::<Scheme>().unwrap(),
            Scheme::Gregory { n: 3, two_sided: true }
        );
        assert!("G9".parse::<Scheme>().is_err());
        assert!("X2".parse::<Scheme>().is_err());
        for s in Scheme::all() {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
    }

    #[test]
    fn zero_spectrum_recovers_zero() {
        let sd = zero_data();
        let grid = GridConfig::split_at_zero(8.0, 64).unwrap();
        for scheme in [Scheme::Tib, Scheme::Gregory { n: 4, two_sided: true }] {
            let rp = recover(&sd, Some(&sd), &grid, scheme, RecoverOptions::default()).unwrap();
            assert_eq!(rp.q.len(), 65);
            assert!(rp.q.iter().all(|c| c.norm() < 1e-14), "{scheme}");
        }
    }

    #[test]
    fn soliton_recovery_high_order() {
        // zeta = i/2, l = -i  <=>  q(t) = sech(t)
        let sd = soliton_data(C64::new(0.0, 0.5), C64::new(0.0, -1.0));
        let grid = GridConfig::split_at_zero(24.0, 256).unwrap();
        let rp = recover(
            &sd,
            Some(&sd),
            &grid,
            Scheme::Gregory { n: 4, two_sided: true },
            RecoverOptions::default(),
        )
        .unwrap();
        let mut worst = 0.0f64;
        for (&t, &q) in rp.t.iter().zip(&rp.q) {
            let want = 1.0 / t.cosh();
            worst = worst.max((q - C64::new(want, 0.0)).norm());
        }
        assert!(worst < 2e-5, "max error {worst:.3e}");
    }

    #[test]
    fn swept_matches_from_scratch() {
        let sd = soliton_data(C64::new(0.1, 0.45), C64::new(0.3, -0.8));
        let grid = GridConfig::split_at_zero(12.0, 48).unwrap();
        for scheme in [
            Scheme::Gregory { n: 3, two_sided: true },
            Scheme::Gregory { n: 5, two_sided: false },
        ] {
            let swept =
                recover(&sd, Some(&sd), &grid, scheme, RecoverOptions::default()).unwrap();
            let scratch = recover(
                &sd,
                Some(&sd),
                &grid,
                scheme,
                RecoverOptions { from_scratch: true, ..Default::default() },
            )
            .unwrap();
            for (a, b) in swept.q.iter().zip(&scratch.q) {
                assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0), "{scheme}");
            }
        }
    }

    #[test]
    fn precomputed_kernel_is_bit_identical() {
        let nodes = 65;
        let refl: Vec<C64> = (0..nodes)
            .map(|k| {
                let xi = -6.0 + 12.0 * k as f64 / (nodes - 1) as f64;
                C64::new(0.5 * (-0.4 * xi * xi).exp(), 0.2 * xi * (-0.3 * xi * xi).exp())
            })
            .collect();
        let sd = SpectralData::new(
            crate::spectral::Side::Left,
            Dispersion::Anomalous,
            -6.0,
            6.0,
            refl,
            vec![DiscretePair {
                zeta: C64::new(0.0, 0.5),
                norm: C64::new(0.0, -1.0),
            }],
        )
        .unwrap();
        let grid = GridConfig::split_at_zero(10.0, 64).unwrap();
        for scheme in [Scheme::Tib, Scheme::Gregory { n: 4, two_sided: true }] {
            let on_demand =
                recover(&sd, Some(&sd), &grid, scheme, RecoverOptions::default()).unwrap();
            let cached = recover(
                &sd,
                Some(&sd),
                &grid,
                scheme,
                RecoverOptions { precompute_kernel: true, ..Default::default() },
            )
            .unwrap();
            assert_eq!(on_demand.q, cached.q, "{scheme}");
        }
    }

    #[test]
    fn residuals_are_small() {
        let sd = soliton_data(C64::new(0.0, 0.6), C64::new(0.0, -1.2));
        let grid = GridConfig::split_at_zero(10.0, 40).unwrap();
        let rp = recover(
            &sd,
            Some(&sd),
            &grid,
            Scheme::Gregory { n: 3, two_sided: true },
            RecoverOptions { compute_residuals: true, ..Default::default() },
        )
        .unwrap();
        let res = rp.residuals.unwrap();
        assert_eq!(res.len(), rp.q.len());
        assert!(res.iter().all(|&r| r < 1e-9), "max {:?}", res.iter().cloned().fold(0.0f64, f64::max));
    }

    #[test]
    fn degenerate_grid_rejected() {
        let sd = zero_data();
        let grid = GridConfig::split_at_zero(4.0, 16).unwrap(); // m_sweep = 8 < 12
        let err = recover(
            &sd,
            Some(&sd),
            &grid,
            Scheme::Gregory { n: 6, two_sided: true },
            RecoverOptions::default(),
        );
        assert!(matches!(err, Err(GlmeError::DegenerateGrid { .. })));
    }

    #[test]
    fn missing_right_data_rejected() {
        let sd = zero_data();
        let grid = GridConfig::split_at_zero(4.0, 16).unwrap();
        let err = recover(&sd, None, &grid, Scheme::Tib, RecoverOptions::default());
        assert!(matches!(err, Err(GlmeError::MissingRightData)));
    }

    #[test]
    fn left_only_covers_whole_interval() {
        let sd = soliton_data(C64::new(0.0, 0.5), C64::new(0.0, -1.0));
        let grid = GridConfig::left_only(16.0, 128);
        let rp = recover(
            &sd,
            None,
            &grid,
            Scheme::Gregory { n: 3, two_sided: true },
            RecoverOptions::default(),
        )
        .unwrap();
        assert_eq!(rp.q.len(), 129);
        let mid = &rp.q[64];
        assert!((mid - C64::new(1.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn assemble_matches_hand_built_blocks() {
        // M = 2 soliton track: entries must equal h*omega_(M-i+j) in the
        // lower-left slots and the sign-carried conjugates upper-right.
        let sd = soliton_data(C64::new(0.0, 0.5), C64::new(0.0, -1.0));
        let w = sd.kernel_weights(1).unwrap();
        let kw = quadrature::weights_for_size(1, 2, Sidedness::TwoSided);
        let track = KernelTrack::init(&sd, -1.0, 0.25, 2, &w).unwrap();
        let (sys, rhs) = assemble_system(&track, &kw, Dispersion::Anomalous).unwrap();
        assert_eq!(sys.size(), 3);
        for m in -2isize..=2 {
            let b = sys.block(m);
            let up = track.omega[(2 + m) as usize];
            let lo = track.omega[(2 - m) as usize];
            assert_eq!(b.m[1][0], 0.25 * lo);
            assert_eq!(b.m[0][1], -0.25 * up.conj());
            let d = if m == 0 { 1.0 } else { 0.0 };
            assert_eq!(b.m[0][0], C64::new(d, 0.0));
        }
        for (i, f) in rhs.iter().enumerate() {
            assert_eq!(f[1], -track.omega[2 - i]);
        }
    }

    #[test]
    fn tib_second_order_on_soliton() {
        let sd = soliton_data(C64::new(0.0, 0.5), C64::new(0.0, -1.0));
        let err_at = |m_out: usize| -> f64 {
            let grid = GridConfig::split_at_zero(16.0, m_out).unwrap();
            let rp = recover_reference_tib(&sd, Some(&sd), &grid, RecoverOptions::default())
                .unwrap();
            let mut sum = 0.0;
            for (&t, &q) in rp.t.iter().zip(&rp.q) {
                let eps = (q - C64::new(1.0 / t.cosh(), 0.0)).norm();
                sum += eps * eps;
            }
            (sum / rp.q.len() as f64).sqrt()
        };
        let (e1, e2) = (err_at(128), err_at(256));
        let order = (e1 / e2).log2();
        assert!(
            (1.6..=2.4).contains(&order),
            "TIB order {order:.2} (errors {e1:.3e}, {e2:.3e})"
        );
    }
}
