//! Scattering data and synthesis of the GLME kernel.
//!
//! The kernel driving the left GLME is
//!
//! ```text
//! Omega(t) = 1/(2 pi) * integral l(xi) e^(-i xi t) dxi  -  i sum_n l_n e^(-i zeta_n t)
//! ```
//!
//! with the continuous integral truncated to the sampled window and evaluated
//! by a two-sided Gregory rule of the same correction count as the recovery
//! scheme.

use crate::error::SpectralError;
use crate::quadrature::{self, Sidedness, WeightVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dispersion {
    Anomalous,
    Normal,
}

impl Dispersion {
    /// Sign s in the ZS system row `psi_2' - i zeta psi_2 = s q* psi_1`
    /// and in the off-diagonal GLME coupling: -1 anomalous, +1 normal.
    pub fn coupling_sign(self) -> f64 {
        match self {
            Dispersion::Anomalous => -1.0,
            Dispersion::Normal => 1.0,
        }
    }

    /// Sign in the extraction `q(t) = sign * 2 X_2(0, t)`.
    pub fn extraction_sign(self) -> f64 {
        match self {
            Dispersion::Anomalous => 2.0,
            Dispersion::Normal => -2.0,
        }
    }
}

/// One bound state: eigenvalue in the open upper half-plane plus its left
/// norming constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscretePair {
    pub zeta: C64,
    pub norm: C64,
}

/// Reflection-coefficient samples on a uniform spectral grid together with
/// the discrete spectrum.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub side: Side,
    pub dispersion: Dispersion,
    pub xi_min: f64,
    pub xi_max: f64,
    pub reflection: Vec<C64>,
    pub discrete: Vec<DiscretePair>,
}

impl SpectralData {
    pub fn new(
        side: Side,
        dispersion: Dispersion,
        xi_min: f64,
        xi_max: f64,
        reflection: Vec<C64>,
        discrete: Vec<DiscretePair>,
    ) -> Result<Self, SpectralError> {
        if reflection.len() > 1 && xi_max <= xi_min {
            return Err(SpectralError::BadGrid);
        }
        if dispersion == Dispersion::Normal && !discrete.is_empty() {
            return Err(SpectralError::DiscreteWithNormalDispersion {
                count: discrete.len(),
            });
        }
        for (index, pair) in discrete.iter().enumerate() {
            if pair.zeta.im <= 0.0 {
                return Err(SpectralError::EigenvalueNotUpperHalf {
                    index,
                    im: pair.zeta.im,
                });
            }
        }
        Ok(Self {
            side,
            dispersion,
            xi_min,
            xi_max,
            reflection,
            discrete,
        })
    }

    pub fn xi_nodes(&self) -> usize {
        self.reflection.len()
    }

    pub fn xi_step(&self) -> f64 {
        if self.reflection.len() < 2 {
            0.0
        } else {
            (self.xi_max - self.xi_min) / (self.reflection.len() - 1) as f64
        }
    }

    pub fn xi_at(&self, j: usize) -> f64 {
        self.xi_min + self.xi_step() * j as f64
    }

    /// Weight vector matching this grid for kernel synthesis: always the
    /// two-sided rule of the requested correction count (trapezoid for n = 1).
    /// A grid too short for the continuous integral (pure-discrete data)
    /// yields an empty rule; `kernel_value` then skips the integral.
    pub fn kernel_weights(&self, n: usize) -> Result<WeightVector, SpectralError> {
        let nodes = self.reflection.len();
        if nodes < 2 {
            return Ok(WeightVector {
                n,
                sidedness: Sidedness::TwoSided,
                weights: vec![1.0; nodes],
                exact_degree: 0,
            });
        }
        quadrature::gregory_weights(n, nodes - 1, Sidedness::TwoSided).map_err(|_| {
            SpectralError::WeightMismatch {
                weights: 0,
                grid: nodes,
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, SpectralError> {
        let text = std::fs::read_to_string(path)?;
        let file: SpectralDataFile = serde_json::from_str(&text)?;
        file.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<(), SpectralError> {
        let file = SpectralDataFile::from(self);
        let text = serde_json::to_string_pretty(&file)?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// On-disk JSON schema. Field names are fixed for CLI interchange.
#[derive(Serialize, Deserialize)]
struct SpectralDataFile {
    side: Side,
    dispersion: Dispersion,
    xi_min: f64,
    xi_max: f64,
    reflection: Vec<[f64; 2]>,
    discrete: Vec<DiscretePairFile>,
}

#[derive(Serialize, Deserialize)]
struct DiscretePairFile {
    zeta: [f64; 2],
    norm: [f64; 2],
}

impl From<&SpectralData> for SpectralDataFile {
    fn from(sd: &SpectralData) -> Self {
        Self {
            side: sd.side,
            dispersion: sd.dispersion,
            xi_min: sd.xi_min,
            xi_max: sd.xi_max,
            reflection: sd.reflection.iter().map(|c| [c.re, c.im]).collect(),
            discrete: sd
                .discrete
                .iter()
                .map(|p| DiscretePairFile {
                    zeta: [p.zeta.re, p.zeta.im],
                    norm: [p.norm.re, p.norm.im],
                })
                .collect(),
        }
    }
}

impl TryFrom<SpectralDataFile> for SpectralData {
    type Error = SpectralError;

    fn try_from(f: SpectralDataFile) -> Result<Self, SpectralError> {
        SpectralData::new(
            f.side,
            f.dispersion,
            f.xi_min,
            f.xi_max,
            f.reflection.iter().map(|c| C64::new(c[0], c[1])).collect(),
            f.discrete
                .iter()
                .map(|p| DiscretePair {
                    zeta: C64::new(p.zeta[0], p.zeta[1]),
                    norm: C64::new(p.norm[0], p.norm[1]),
                })
                .collect(),
        )
    }
}

/// Evaluate the GLME kernel at argument `t`.
///
/// The oscillatory factors e^(-i xi_j t) along the uniform grid form a
/// geometric sequence; they are generated by a chunked recurrence (fresh
/// exponential every 64 nodes) so the quadrature stays at full accuracy
/// without one complex exponential per node.
pub fn kernel_value(sd: &SpectralData, t: f64, w: &WeightVector) -> Result<C64, SpectralError> {
    let mut acc = C64::new(0.0, 0.0);
    let nodes = sd.reflection.len();
    if nodes > 1 {
        if w.weights.len() != nodes {
            return Err(SpectralError::WeightMismatch {
                weights: w.weights.len(),
                grid: nodes,
            });
        }
        let h = sd.xi_step();
        let step = C64::from_polar(1.0, -h * t);
        let mut j = 0;
        while j < nodes {
            let mut phase = C64::from_polar(1.0, -sd.xi_at(j) * t);
            let chunk_end = (j + 64).min(nodes);
            while j < chunk_end {
                acc += sd.reflection[j] * w.weights[j] * phase;
                phase *= step;
                j += 1;
            }
        }
        acc *= h / (2.0 * std::f64::consts::PI);
    }
    for (index, pair) in sd.discrete.iter().enumerate() {
        if pair.zeta.im <= 0.0 {
            return Err(SpectralError::EigenvalueNotUpperHalf {
                index,
                im: pair.zeta.im,
            });
        }
        // -i l_n e^(-i zeta_n t)
        acc += C64::new(0.0, -1.0) * pair.norm * (C64::new(0.0, -1.0) * pair.zeta * t).exp();
    }
    Ok(acc)
}

/// Sampled kernel sequence `omega_k = Omega(2 t - k h)`, k = 0..2M.
#[derive(Clone, Debug)]
pub struct KernelTrack {
    pub t: f64,
    pub h: f64,
    pub m: usize,
    pub omega: Vec<C64>,
}

impl KernelTrack {
    /// Evaluate all samples at anchor time `t0`.
    pub fn init(
        sd: &SpectralData,
        t0: f64,
        h: f64,
        m: usize,
        w: &WeightVector,
    ) -> Result<Self, SpectralError> {
        let omega = (0..=2 * m)
            .map(|k| kernel_value(sd, 2.0 * t0 - k as f64 * h, w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { t: t0, h, m, omega })
    }

    /// Advance the track to `t + h/2`: every index shifts by one and exactly
    /// one new value enters at k = 0.
    pub fn advance(&mut self, sd: &SpectralData, w: &WeightVector) -> Result<(), SpectralError> {
        let t_next = self.t + 0.5 * self.h;
        let fresh = kernel_value(sd, 2.0 * t_next, w)?;
        self.advance_with_value(fresh);
        Ok(())
    }

    /// Advance using an externally supplied fresh value (the precomputed
    /// kernel cache path; bit-identical to `advance` when the value was
    /// produced by the same evaluation).
    pub fn advance_with_value(&mut self, fresh: C64) {
        self.omega.rotate_right(1);
        self.omega[0] = fresh;
        self.t += 0.5 * self.h;
    }
}

/// Precompute the fresh top values `Omega(2 t_j)` an `m_sweep`-step advance
/// sequence will request, replaying the same time accumulation `advance`
/// performs so the cached run is bit-identical to the on-demand one.
pub fn precompute_advance_values(
    sd: &SpectralData,
    t0: f64,
    h: f64,
    steps: usize,
    w: &WeightVector,
) -> Result<Vec<C64>, SpectralError> {
    let mut t = t0;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        t += 0.5 * h;
        out.push(kernel_value(sd, 2.0 * t, w)?);
    }
    Ok(out)
}
