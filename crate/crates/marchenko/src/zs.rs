//! Forward Zakharov-Shabat scattering and test-signal generators: the
//! ground-truth side of every round-trip check, sharing no code with the
//! recovery machinery beyond the spectral data types.
//!
//! The direct solver is a piecewise-constant transfer-matrix integrator
//! (second order in the signal step, exactly norm-preserving). Signals with
//! hypergeometric closed forms also get exact spectral data generators, used
//! wherever discretization error from the forward solve would mask the
//! behavior under study.

use crate::block::Block2;
use crate::error::OracleError;
use crate::gamma::gamma;
use crate::spectral::{DiscretePair, Dispersion, Side, SpectralData};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Closed-form signal families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    /// `q(t) = A sech(t)^(1 + iC)`
    ChirpedSech { a: f64, c: f64 },
    /// `q(t) = A sech(t)`
    Sech { a: f64 },
    /// `q(t) = A` on `|t| <= width/2`, zero outside
    Rectangle { a: f64, width: f64 },
    /// One-soliton profile determined by its eigenvalue and left norming
    /// constant.
    Soliton { zeta: [f64; 2], norm: [f64; 2] },
}

impl SignalKind {
    /// Evaluate the closed form at time `t`.
    pub fn eval(&self, t: f64) -> C64 {
        match *self {
            SignalKind::ChirpedSech { a, c } => {
                let sech = 1.0 / t.cosh();
                // sech^(1+iC) = sech * e^(i C ln sech)
                C64::from_polar(a * sech, c * sech.ln())
            }
            SignalKind::Sech { a } => C64::new(a / t.cosh(), 0.0),
            SignalKind::Rectangle { a, width } => {
                if t.abs() <= 0.5 * width {
                    C64::new(a, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            SignalKind::Soliton { zeta, norm } => {
                let eta = zeta[1];
                let xi0 = zeta[0];
                let l = C64::new(norm[0], norm[1]);
                let t0 = -(l.norm() / (2.0 * eta)).ln() / (2.0 * eta);
                let phase0 = l.arg() + 0.5 * PI;
                let amp = 2.0 * eta / (2.0 * eta * (t - t0)).cosh();
                C64::from_polar(amp, phase0 - 2.0 * xi0 * t)
            }
        }
    }

    /// Closed form of the time-reversed signal `q(-t)`, when expressible in
    /// the same family.
    pub fn reversed(&self) -> SignalKind {
        match *self {
            // even profiles are their own reversal
            SignalKind::ChirpedSech { .. }
            | SignalKind::Sech { .. }
            | SignalKind::Rectangle { .. } => *self,
            SignalKind::Soliton { zeta, norm } => {
                let eta = zeta[1];
                let l = C64::new(norm[0], norm[1]);
                let l_rev = 4.0 * eta * eta / l.conj();
                SignalKind::Soliton {
                    zeta: [-zeta[0], zeta[1]],
                    norm: [l_rev.re, l_rev.im],
                }
            }
        }
    }
}

/// Uniformly sampled signal on `[-L/2, L/2]`.
#[derive(Clone, Debug)]
pub struct SignalSamples {
    pub t: Vec<f64>,
    pub q: Vec<C64>,
    pub closed_form: Option<SignalKind>,
}

impl SignalSamples {
    pub fn dt(&self) -> f64 {
        self.t[1] - self.t[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.q.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Samples of `q(-t)` on the same grid.
    pub fn reversed(&self) -> SignalSamples {
        let mut q = self.q.clone();
        q.reverse();
        SignalSamples {
            t: self.t.clone(),
            q,
            closed_form: self.closed_form.map(|k| k.reversed()),
        }
    }

    /// Midpoint value of interval `k`, from the closed form when available.
    fn midpoint(&self, k: usize) -> C64 {
        match &self.closed_form {
            Some(kind) => kind.eval(0.5 * (self.t[k] + self.t[k + 1])),
            None => 0.5 * (self.q[k] + self.q[k + 1]),
        }
    }
}

/// Sample a closed-form signal on `m_out + 1` points spanning `[-L/2, L/2]`.
pub fn make_signal(kind: SignalKind, l: f64, m_out: usize) -> SignalSamples {
    let t: Vec<f64> = (0..=m_out)
        .map(|j| -0.5 * l + l * j as f64 / m_out as f64)
        .collect();
    let q = t.iter().map(|&tj| kind.eval(tj)).collect();
    SignalSamples {
        t,
        q,
        closed_form: Some(kind),
    }
}

/// sin(z)/z, stable near the origin.
fn sinc_c(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        C64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Exact propagator over one interval of constant `q`:
/// `exp(dt * [[-i zeta, q], [s q*, i zeta]])` with `s = -1` anomalous,
/// `+1` normal.
fn zs_step(q: C64, dt: f64, zeta: C64, dispersion: Dispersion) -> Block2 {
    let qc = dispersion.coupling_sign() * q.conj();
    // G^2 = (q qc - zeta^2) I  =>  k^2 = zeta^2 - q qc
    let k2 = zeta * zeta - q * qc;
    let k = k2.sqrt();
    let c = (k * dt).cos();
    let s = sinc_c(k * dt) * dt;
    let iz = C64::new(0.0, 1.0) * zeta;
    Block2::new(c - iz * s, q * s, qc * s, c + iz * s)
}

/// Scattering coefficients `a`, `b` at one spectral point by propagating the
/// left Jost solution across the grid.
pub fn scatter_at(sig: &SignalSamples, zeta: C64, dispersion: Dispersion) -> (C64, C64) {
    let dt = sig.dt();
    let t0 = sig.t[0];
    let t1 = *sig.t.last().unwrap();
    let i = C64::new(0.0, 1.0);
    let mut phi = [(-i * zeta * t0).exp(), C64::new(0.0, 0.0)];
    for k in 0..sig.t.len() - 1 {
        let m = zs_step(sig.midpoint(k), dt, zeta, dispersion);
        phi = m.apply(&phi);
    }
    let a = phi[0] * (i * zeta * t1).exp();
    let b = phi[1] * (-i * zeta * t1).exp();
    (a, b)
}

/// Jost solution from the right, `psi -> [0, e^(i zeta t)]` as `t -> +inf`,
/// integrated backwards to the matching index.
fn psi_backward(sig: &SignalSamples, zeta: C64, dispersion: Dispersion, stop: usize) -> [C64; 2] {
    let dt = sig.dt();
    let t1 = *sig.t.last().unwrap();
    let i = C64::new(0.0, 1.0);
    let mut psi = [C64::new(0.0, 0.0), (i * zeta * t1).exp()];
    for k in (stop..sig.t.len() - 1).rev() {
        let m = zs_step(sig.midpoint(k), -dt, zeta, dispersion);
        psi = m.apply(&psi);
    }
    psi
}

fn phi_forward(sig: &SignalSamples, zeta: C64, dispersion: Dispersion, stop: usize) -> [C64; 2] {
    let dt = sig.dt();
    let t0 = sig.t[0];
    let i = C64::new(0.0, 1.0);
    let mut phi = [(-i * zeta * t0).exp(), C64::new(0.0, 0.0)];
    for k in 0..stop {
        let m = zs_step(sig.midpoint(k), dt, zeta, dispersion);
        phi = m.apply(&phi);
    }
    phi
}

/// Continuous scattering data on a uniform spectral grid.
#[derive(Clone, Debug)]
pub struct ScatteringResult {
    pub xi_min: f64,
    pub xi_max: f64,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    /// Left reflection coefficient `l = b* / a`.
    pub reflection: Vec<C64>,
    pub discrete: Vec<DiscretePair>,
    /// Worst deviation of `|a|^2 +/- |b|^2` from 1 across the grid.
    pub unitarity_residual: f64,
    /// Boundary decay diagnostic: `max(|q(t_min)|, |q(t_max)|) / max|q|`.
    pub boundary_residual: f64,
}

/// Compute `a(xi)`, `b(xi)` on `m_xi` nodes spanning `[-L_xi/2, L_xi/2]`.
pub fn forward_scatter(
    sig: &SignalSamples,
    m_xi: usize,
    l_xi: f64,
    dispersion: Dispersion,
) -> ScatteringResult {
    let xi_min = -0.5 * l_xi;
    let xi_max = 0.5 * l_xi;
    let max_q = sig.max_abs();
    let boundary_residual = if max_q > 0.0 {
        sig.q[0].norm().max(sig.q.last().unwrap().norm()) / max_q
    } else {
        0.0
    };
    let pairs: Vec<(C64, C64)> = (0..m_xi)
        .into_par_iter()
        .map(|j| {
            let xi = if m_xi == 1 {
                0.0
            } else {
                xi_min + (xi_max - xi_min) * j as f64 / (m_xi - 1) as f64
            };
            scatter_at(sig, C64::new(xi, 0.0), dispersion)
        })
        .collect();
    let sign = match dispersion {
        Dispersion::Anomalous => 1.0,
        Dispersion::Normal => -1.0,
    };
    let mut unitarity_residual = 0.0f64;
    let mut a = Vec::with_capacity(m_xi);
    let mut b = Vec::with_capacity(m_xi);
    let mut reflection = Vec::with_capacity(m_xi);
    for (aj, bj) in pairs {
        // normalized so normal dispersion (where |a|, |b| can be huge and
        // the difference of squares cancels) is judged at working precision
        let scale = (aj.norm_sqr() + bj.norm_sqr()).max(1.0);
        unitarity_residual = unitarity_residual
            .max((aj.norm_sqr() + sign * bj.norm_sqr() - 1.0).abs() / scale);
        reflection.push(bj.conj() / aj);
        a.push(aj);
        b.push(bj);
    }
    ScatteringResult {
        xi_min,
        xi_max,
        a,
        b,
        reflection,
        discrete: Vec::new(),
        unitarity_residual,
        boundary_residual,
    }
}

/// Eigenvalue search box.
#[derive(Clone, Copy, Debug)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    /// Box from the spec'd default: `Re in [-5, 5]`, `Im in (0, max|q|]`.
    pub fn for_signal(sig: &SignalSamples) -> SearchBox {
        SearchBox {
            re_min: -5.0,
            re_max: 5.0,
            im_min: 0.02,
            im_max: sig.max_abs().max(0.1),
        }
    }
}

fn a_only(sig: &SignalSamples, zeta: C64, dispersion: Dispersion) -> C64 {
    scatter_at(sig, zeta, dispersion).0
}

/// Winding number of `a` around the box boundary (argument principle).
fn winding_count(sig: &SignalSamples, bx: &SearchBox, dispersion: Dispersion) -> i64 {
    let per_edge = 600usize;
    let corners = [
        C64::new(bx.re_min, bx.im_min),
        C64::new(bx.re_max, bx.im_min),
        C64::new(bx.re_max, bx.im_max),
        C64::new(bx.re_min, bx.im_max),
    ];
    let mut points = Vec::with_capacity(4 * per_edge);
    for e in 0..4 {
        let from = corners[e];
        let to = corners[(e + 1) % 4];
        for k in 0..per_edge {
            let f = k as f64 / per_edge as f64;
            points.push(from + (to - from) * f);
        }
    }
    let values: Vec<C64> = points
        .par_iter()
        .map(|&z| a_only(sig, z, dispersion))
        .collect();
    let mut total = 0.0f64;
    for k in 0..values.len() {
        let next = values[(k + 1) % values.len()];
        total += (next / values[k]).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Locate the discrete spectrum: Newton-polished zeros of `a(zeta)` in the
/// upper half-plane with left norming constants `l_n = 1 / (b_n a'(zeta_n))`,
/// where `b_n` is the Jost proportionality at the eigenvalue. The root count
/// is cross-checked against the argument-principle winding number.
pub fn find_eigenvalues(
    sig: &SignalSamples,
    dispersion: Dispersion,
    bx: Option<SearchBox>,
) -> Result<Vec<DiscretePair>, OracleError> {
    if dispersion == Dispersion::Normal {
        return Err(OracleError::NormalHasNoDiscrete);
    }
    let bx = bx.unwrap_or_else(|| SearchBox::for_signal(sig));
    let re_seeds = 21usize;
    let im_seeds = 16usize;
    let mut seeds = Vec::new();
    for i in 0..im_seeds {
        for r in 0..re_seeds {
            let re = bx.re_min + (bx.re_max - bx.re_min) * r as f64 / (re_seeds - 1) as f64;
            let im = bx.im_min
                + (bx.im_max - bx.im_min) * (i as f64 + 0.5) / im_seeds as f64;
            seeds.push(C64::new(re, im));
        }
    }
    let roots: Vec<Option<C64>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut z = seed;
            for _ in 0..50 {
                let a = a_only(sig, z, dispersion);
                if a.norm() <= 1e-10 {
                    return Some(z);
                }
                let d = 1e-6 * (1.0 + z.norm());
                let ap = (a_only(sig, z + d, dispersion) - a_only(sig, z - d, dispersion))
                    / (2.0 * d);
                if ap.norm() == 0.0 {
                    return None;
                }
                let step = a / ap;
                z -= step;
                if z.im <= 0.0 || z.re < bx.re_min - 2.0 || z.re > bx.re_max + 2.0 {
                    return None;
                }
            }
            None
        })
        .collect();
    let mut found: Vec<C64> = Vec::new();
    for z in roots.into_iter().flatten() {
        if z.im <= bx.im_min * 0.5 || z.im > bx.im_max * 1.5 {
            continue;
        }
        if !found
            .iter()
            .any(|r| (r - z).norm() < 1e-6 * (1.0 + z.norm()))
        {
            found.push(z);
        }
    }
    found.sort_by(|p, q| q.im.total_cmp(&p.im));
    let expected = winding_count(sig, &bx, dispersion);
    if expected >= 0 && found.len() != expected as usize {
        return Err(OracleError::NewtonStalled {
            re: found.len() as f64,
            im: expected as f64,
        });
    }
    // norming constants by matching the Jost solutions mid-grid
    let mid = sig.t.len() / 2;
    let pairs = found
        .into_iter()
        .map(|zeta| {
            let phi = phi_forward(sig, zeta, dispersion, mid);
            let psi = psi_backward(sig, zeta, dispersion, mid);
            let bn = if psi[1].norm() > psi[0].norm() {
                phi[1] / psi[1]
            } else {
                phi[0] / psi[0]
            };
            let d = 1e-6 * (1.0 + zeta.norm());
            let ap = (a_only(sig, zeta + d, dispersion) - a_only(sig, zeta - d, dispersion))
                / (2.0 * d);
            DiscretePair {
                zeta,
                norm: (bn * ap).inv(),
            }
        })
        .collect();
    Ok(pairs)
}

/// Full numeric spectral data: continuous reflection plus (anomalous) the
/// discrete spectrum.
pub fn numeric_spectral_data(
    sig: &SignalSamples,
    dispersion: Dispersion,
    m_xi: usize,
    l_xi: f64,
) -> Result<SpectralData, OracleError> {
    let scat = forward_scatter(sig, m_xi, l_xi, dispersion);
    let discrete = match dispersion {
        Dispersion::Anomalous => find_eigenvalues(sig, dispersion, None)?,
        Dispersion::Normal => Vec::new(),
    };
    SpectralData::new(
        Side::Left,
        dispersion,
        scat.xi_min,
        scat.xi_max,
        scat.reflection,
        discrete,
    )
    .map_err(|_| OracleError::NewtonStalled { re: 0.0, im: 0.0 })
}

// ---------------------------------------------------------------------------
// exact spectra for the hypergeometric families
// ---------------------------------------------------------------------------

/// `sigma` parameter of the chirped sech: real for anomalous dispersion,
/// imaginary for normal.
fn chirped_sigma(a: f64, c: f64, dispersion: Dispersion) -> C64 {
    match dispersion {
        Dispersion::Anomalous => C64::new((a * a - 0.25 * c * c).sqrt(), 0.0),
        Dispersion::Normal => C64::new(0.0, (a * a + 0.25 * c * c).sqrt()),
    }
}

/// Exact `a(zeta)` for `q = A sech(t)^(1 + iC)`.
pub fn chirped_sech_a(zeta: C64, a: f64, c: f64, dispersion: Dispersion) -> C64 {
    let sig = chirped_sigma(a, c, dispersion);
    let i = C64::new(0.0, 1.0);
    let half = C64::new(0.5, 0.0);
    gamma(half - i * zeta - i * c / 2.0) * gamma(half - i * zeta + i * c / 2.0)
        / (gamma(half - i * zeta - sig) * gamma(half - i * zeta + sig))
}

/// Exact `b(xi)` for the chirped sech.
pub fn chirped_sech_b(zeta: C64, a: f64, c: f64, dispersion: Dispersion) -> C64 {
    let sig = chirped_sigma(a, c, dispersion);
    let i = C64::new(0.0, 1.0);
    let half = C64::new(0.5, 0.0);
    let two_pow = C64::new(2.0, 0.0).powc(-i * c);
    two_pow * gamma(half - i * zeta - i * c / 2.0) * gamma(half + i * zeta - i * c / 2.0)
        / (a * gamma(sig - i * c / 2.0) * gamma(-sig - i * c / 2.0))
}

/// Exact discrete spectrum of the chirped sech (anomalous), eigenvalues
/// `zeta_n = i (sigma + 1/2 - n)` with closed-form left norming constants.
pub fn chirped_sech_discrete(a: f64, c: f64) -> Vec<DiscretePair> {
    let sigma = (a * a - 0.25 * c * c).sqrt();
    let i = C64::new(0.0, 1.0);
    let mut out = Vec::new();
    let mut m = 0usize;
    while sigma - 0.5 - m as f64 > 1e-12 {
        let eta = sigma - 0.5 - m as f64;
        let zeta = C64::new(0.0, eta);
        let norm = if c == 0.0 {
            // C -> 0 limit: l_n = -i Gamma(2A - m) / (m! Gamma(A - m)^2)
            let mf: f64 = (1..=m).map(|k| k as f64).product::<f64>().max(1.0);
            -i * gamma(C64::new(2.0 * a - m as f64, 0.0))
                / (mf * gamma(C64::new(a - m as f64, 0.0)).powi(2))
        } else {
            let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
            let mf: f64 = (1..=m).map(|k| k as f64).product::<f64>().max(1.0);
            let ic2 = i * c / 2.0;
            let s = C64::new(sigma, 0.0);
            let mm = m as f64;
            i * sgn
                * C64::new(2.0, 0.0).powc(i * c)
                * a
                * gamma(2.0 * s - mm)
                * gamma(s - ic2)
                * gamma(-s - ic2)
                / (mf
                    * gamma(s - mm - ic2).powi(2)
                    * gamma(s - mm + ic2)
                    * gamma(C64::new(1.0 + mm - sigma, 0.0) - ic2))
        };
        out.push(DiscretePair { zeta, norm });
        m += 1;
    }
    out
}

/// Exact spectral data for the closed-form families that admit it.
pub fn analytic_spectral_data(
    kind: SignalKind,
    dispersion: Dispersion,
    m_xi: usize,
    l_xi: f64,
) -> Result<SpectralData, OracleError> {
    let (amp, chirp) = match kind {
        SignalKind::ChirpedSech { a, c } => (a, c),
        SignalKind::Sech { a } => (a, 0.0),
        SignalKind::Soliton { zeta, norm } => {
            if dispersion == Dispersion::Normal {
                return Err(OracleError::NormalHasNoDiscrete);
            }
            return SpectralData::new(
                Side::Left,
                dispersion,
                -0.5 * l_xi,
                0.5 * l_xi,
                vec![C64::new(0.0, 0.0); m_xi],
                vec![DiscretePair {
                    zeta: C64::new(zeta[0], zeta[1]),
                    norm: C64::new(norm[0], norm[1]),
                }],
            )
            .map_err(|_| OracleError::NoClosedForm);
        }
        SignalKind::Rectangle { .. } => return Err(OracleError::NoClosedForm),
    };
    let xi_min = -0.5 * l_xi;
    let xi_max = 0.5 * l_xi;
    let reflection: Vec<C64> = (0..m_xi)
        .map(|j| {
            let xi = if m_xi == 1 {
                0.0
            } else {
                xi_min + (xi_max - xi_min) * j as f64 / (m_xi - 1) as f64
            };
            let z = C64::new(xi, 0.0);
            let av = chirped_sech_a(z, amp, chirp, dispersion);
            let bv = chirped_sech_b(z, amp, chirp, dispersion);
            bv.conj() / av
        })
        .collect();
    let discrete = match dispersion {
        Dispersion::Anomalous => chirped_sech_discrete(amp, chirp),
        Dispersion::Normal => Vec::new(),
    };
    SpectralData::new(Side::Left, dispersion, xi_min, xi_max, reflection, discrete)
        .map_err(|_| OracleError::NoClosedForm)
}

/// Spectral data for the reversed signal `q(-t)` (right-half recovery input),
/// through the closed form when available, otherwise the numeric oracle.
pub fn reversed_spectral_data(
    sig: &SignalSamples,
    dispersion: Dispersion,
    m_xi: usize,
    l_xi: f64,
) -> Result<SpectralData, OracleError> {
    let rev = sig.reversed();
    let mut sd = match rev.closed_form {
        Some(kind) => analytic_spectral_data(kind, dispersion, m_xi, l_xi)
            .or_else(|_| numeric_spectral_data(&rev, dispersion, m_xi, l_xi))?,
        None => numeric_spectral_data(&rev, dispersion, m_xi, l_xi)?,
    };
    sd.side = Side::Right;
    Ok(sd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_signal_scatters_trivially() {
        let sig = SignalSamples {
            t: (0..=64).map(|j| -8.0 + 0.25 * j as f64).collect(),
            q: vec![C64::new(0.0, 0.0); 65],
            closed_form: None,
        };
        let res = forward_scatter(&sig, 17, 10.0, Dispersion::Anomalous);
        for (a, b) in res.a.iter().zip(&res.b) {
            assert!((a - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(b.norm() < 1e-12);
        }
        assert!(res.unitarity_residual < 1e-12);
    }

    #[test]
    fn closed_forms_reproduce_samples() {
        for kind in [
            SignalKind::ChirpedSech { a: 5.2, c: 4.0 },
            SignalKind::Sech { a: 1.0 },
            SignalKind::Rectangle { a: 1.0, width: 2.0 },
            SignalKind::Soliton { zeta: [0.0, 0.5], norm: [0.0, -1.0] },
        ] {
            let sig = make_signal(kind, 20.0, 256);
            for (&t, &q) in sig.t.iter().zip(&sig.q) {
                assert!((kind.eval(t) - q).norm() <= 1e-14 * q.norm().max(1.0));
            }
        }
    }

    #[test]
    fn soliton_closed_form_at_center() {
        // zeta = i/2, l = -i places a unit sech at the origin
        let kind = SignalKind::Soliton { zeta: [0.0, 0.5], norm: [0.0, -1.0] };
        assert!((kind.eval(0.0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((kind.eval(1.3) - C64::new(1.0 / 1.3f64.cosh(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn chirped_sech_at_origin() {
        let kind = SignalKind::ChirpedSech { a: 5.2, c: 4.0 };
        assert!((kind.eval(0.0) - C64::new(5.2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rectangle_profile() {
        let kind = SignalKind::Rectangle { a: 1.0, width: 2.0 };
        assert_eq!(kind.eval(0.3), C64::new(1.0, 0.0));
        assert_eq!(kind.eval(-0.99), C64::new(1.0, 0.0));
        assert_eq!(kind.eval(1.2), C64::new(0.0, 0.0));
    }

    #[test]
    fn unit_sech_is_reflectionless_with_half_i_eigenvalue() {
        let sig = make_signal(SignalKind::Sech { a: 1.0 }, 36.0, 1 << 14);
        let res = forward_scatter(&sig, 33, 16.0, Dispersion::Anomalous);
        assert!(res.unitarity_residual < 1e-8, "unitarity {:.3e}", res.unitarity_residual);
        for b in &res.b {
            assert!(b.norm() < 1e-6, "|b| = {:.3e}", b.norm());
        }
        let eigen = find_eigenvalues(&sig, Dispersion::Anomalous, None).unwrap();
        assert_eq!(eigen.len(), 1);
        assert!((eigen[0].zeta - C64::new(0.0, 0.5)).norm() < 1e-6);
        // left norming constant of sech is -i
        assert!(
            (eigen[0].norm - C64::new(0.0, -1.0)).norm() < 1e-4,
            "norm {}",
            eigen[0].norm
        );
    }

    #[test]
    fn sech_2p5_has_two_imaginary_eigenvalues() {
        let sig = make_signal(SignalKind::Sech { a: 2.5 }, 24.0, 1 << 13);
        let eigen = find_eigenvalues(&sig, Dispersion::Anomalous, None).unwrap();
        assert_eq!(eigen.len(), 2, "found {:?}", eigen);
        assert!((eigen[0].zeta - C64::new(0.0, 2.0)).norm() < 1e-5);
        assert!((eigen[1].zeta - C64::new(0.0, 1.0)).norm() < 1e-5);
    }

    #[test]
    fn normal_dispersion_rejects_eigenvalue_search() {
        let sig = make_signal(SignalKind::Sech { a: 1.0 }, 10.0, 64);
        assert!(matches!(
            find_eigenvalues(&sig, Dispersion::Normal, None),
            Err(OracleError::NormalHasNoDiscrete)
        ));
    }

    #[test]
    fn analytic_matches_numeric_for_chirped_sech() {
        let a = 5.2;
        let c = 4.0;
        let sig = make_signal(SignalKind::ChirpedSech { a, c }, 32.0, 1 << 14);
        for dispersion in [Dispersion::Anomalous, Dispersion::Normal] {
            let res = forward_scatter(&sig, 9, 6.0, dispersion);
            assert!(res.unitarity_residual < 1e-8);
            for (j, (an, bn)) in res.a.iter().zip(&res.b).enumerate() {
                let xi = res.xi_min + (res.xi_max - res.xi_min) * j as f64 / 8.0;
                let z = C64::new(xi, 0.0);
                let aa = chirped_sech_a(z, a, c, dispersion);
                let ba = chirped_sech_b(z, a, c, dispersion);
                let scale = an.norm().max(1.0);
                assert!(
                    (an - aa).norm() / scale < 2e-5,
                    "{dispersion:?} xi={xi}: a {an} vs {aa}"
                );
                assert!(
                    (bn - ba).norm() / scale < 2e-5,
                    "{dispersion:?} xi={xi}: b {bn} vs {ba}"
                );
            }
        }
    }

    #[test]
    fn analytic_discrete_matches_numeric_norming() {
        let a = 5.2;
        let c = 4.0;
        let pairs = chirped_sech_discrete(a, c);
        assert_eq!(pairs.len(), 5);
        for (n, p) in pairs.iter().enumerate() {
            let want = 4.8 - 0.5 - n as f64;
            assert!((p.zeta - C64::new(0.0, want)).norm() < 1e-12);
        }
        // numeric cross-check of the two largest bound states
        let sig = make_signal(SignalKind::ChirpedSech { a, c }, 32.0, 1 << 14);
        for p in pairs.iter().take(2) {
            let phi = phi_forward(&sig, p.zeta, Dispersion::Anomalous, sig.t.len() / 2);
            let psi = psi_backward(&sig, p.zeta, Dispersion::Anomalous, sig.t.len() / 2);
            let bn = if psi[1].norm() > psi[0].norm() {
                phi[1] / psi[1]
            } else {
                phi[0] / psi[0]
            };
            let d = 1e-6 * (1.0 + p.zeta.norm());
            let ap = (a_only(&sig, p.zeta + d, Dispersion::Anomalous)
                - a_only(&sig, p.zeta - d, Dispersion::Anomalous))
                / (2.0 * d);
            let l_num = (bn * ap).inv();
            assert!(
                (l_num - p.norm).norm() / p.norm.norm() < 1e-3,
                "zeta {}: {} vs {}",
                p.zeta,
                l_num,
                p.norm
            );
        }
    }

    #[test]
    fn grid_refinement_is_second_order() {
        let kind = SignalKind::ChirpedSech { a: 2.0, c: 1.0 };
        let a_at = |m: usize| {
            let sig = make_signal(kind, 24.0, m);
            scatter_at(&sig, C64::new(0.8, 0.0), Dispersion::Anomalous).0
        };
        let (a1, a2, a3) = (a_at(1 << 10), a_at(1 << 11), a_at(1 << 12));
        let ratio = (a1 - a2).norm() / (a2 - a3).norm();
        assert!(ratio > 3.2, "refinement ratio {ratio:.2}");
    }

    #[test]
    fn reversed_soliton_round_trip() {
        // reversing an off-center soliton flips its center and boost
        let kind = SignalKind::Soliton { zeta: [0.3, 0.6], norm: [0.4, -0.7] };
        let sig = make_signal(kind, 24.0, 512);
        let rev = sig.reversed();
        let back = rev.reversed();
        for (q1, q2) in sig.q.iter().zip(&back.q) {
            assert!((q1 - q2).norm() < 1e-14);
        }
        let rev_kind = kind.reversed();
        for (&t, &qr) in rev.t.iter().zip(&rev.q) {
            assert!(
                (rev_kind.eval(t) - qr).norm() < 1e-12,
                "closed-form reversal mismatch at t = {t}"
            );
        }
    }

    #[test]
    fn boundary_decay_diagnostic() {
        let sig = make_signal(SignalKind::Sech { a: 1.0 }, 6.0, 64);
        let res = forward_scatter(&sig, 5, 4.0, Dispersion::Anomalous);
        assert!(res.boundary_residual > 1e-2); // L = 6 clearly too short
        let sig = make_signal(SignalKind::Sech { a: 1.0 }, 40.0, 256);
        let res = forward_scatter(&sig, 5, 4.0, Dispersion::Anomalous);
        assert!(res.boundary_residual < 1e-6);
    }
}
