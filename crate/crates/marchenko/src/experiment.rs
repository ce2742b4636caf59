//! Experiment runners: convergence ladders, accuracy/time trade-offs, and
//! pointwise error profiles, emitted as plot-ready CSV tables.
//!
//! Errors follow the usual normalized conventions:
//!
//! ```text
//! eps(t)  = |q(t) - q_exact(t)| / max|q_exact|
//! RMSE    = sqrt( sum_j eps(t_j)^2 / (M + 1) )
//! order m = log2( RMSE_at_M / RMSE_at_2M )
//! ```
//!
//! Every row carries its provenance (scheme, grid, seed, crate version);
//! reruns of the same config and seed produce byte-identical tables except
//! for the timing columns.

use crate::error::ExperimentError;
use crate::glme::{recover, GridConfig, RecoverOptions, Scheme};
use crate::spectral::{Dispersion, SpectralData};
use crate::zs::{
    analytic_spectral_data, make_signal, numeric_spectral_data, reversed_spectral_data,
    SignalKind, SignalSamples,
};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Full description of an experiment run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub signal: SignalKind,
    pub dispersion: Dispersion,
    /// Signal interval length.
    pub l: f64,
    /// Output subinterval counts, strictly increasing powers of two.
    pub ladder: Vec<usize>,
    pub schemes: Vec<String>,
    /// Spectral grid nodes.
    pub m_xi: usize,
    /// Spectral domain size.
    pub l_xi: f64,
    /// Seed recorded with every row (and used by any randomized fixture).
    pub seed: u64,
    /// Worker threads across ladder cells (1 = serial, honest timing).
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

fn default_jobs() -> usize {
    1
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            signal: SignalKind::ChirpedSech { a: 5.2, c: 4.0 },
            dispersion: Dispersion::Anomalous,
            l: 64.0,
            ladder: vec![1 << 10, 1 << 11, 1 << 12, 1 << 13],
            schemes: Scheme::all().iter().map(|s| s.to_string()).collect(),
            m_xi: 2049,
            l_xi: 40.0,
            seed: 0,
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn parsed_schemes(&self) -> Result<Vec<Scheme>, ExperimentError> {
        if self.schemes.is_empty() {
            return Err(ExperimentError::NoSchemes);
        }
        self.schemes
            .iter()
            .map(|s| {
                s.parse::<Scheme>()
                    .map_err(|_| ExperimentError::NoSchemes)
            })
            .collect()
    }

    pub fn validate_ladder(&self) -> Result<(), ExperimentError> {
        let ok = !self.ladder.is_empty()
            && self.ladder.windows(2).all(|w| w[0] < w[1])
            && self.ladder.iter().all(|m| m.is_power_of_two());
        if ok {
            Ok(())
        } else {
            Err(ExperimentError::BadLadder(self.ladder.clone()))
        }
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Reference signal and its spectral data, shared across all ladder cells.
pub struct Fixture {
    pub sd_left: SpectralData,
    pub sd_right: SpectralData,
    pub exact: SignalKind,
}

impl Fixture {
    /// Build spectral data for the configured signal, analytic when the
    /// family admits it, otherwise through the numeric oracle.
    pub fn prepare(cfg: &ExperimentConfig) -> Result<Fixture, ExperimentError> {
        let exact = cfg.signal;
        // grid only matters on the numeric-oracle fallback path
        let sig: SignalSamples = make_signal(exact, cfg.l, 1 << 14);
        let sd_left = match analytic_spectral_data(exact, cfg.dispersion, cfg.m_xi, cfg.l_xi) {
            Ok(sd) => sd,
            Err(_) => numeric_spectral_data(&sig, cfg.dispersion, cfg.m_xi, cfg.l_xi)?,
        };
        let sd_right = reversed_spectral_data(&sig, cfg.dispersion, cfg.m_xi, cfg.l_xi)?;
        Ok(Fixture {
            sd_left,
            sd_right,
            exact,
        })
    }

    pub fn exact_on_grid(&self, grid: &GridConfig) -> Vec<C64> {
        (0..=grid.m_out)
            .map(|k| self.exact.eval(grid.t_at(k)))
            .collect()
    }
}

/// Outcome of one (scheme, M) cell.
#[derive(Clone, Debug)]
pub struct Cell {
    pub scheme: Scheme,
    pub m_out: usize,
    pub rmse: f64,
    pub max_eps: f64,
    pub kernel_seconds: f64,
    pub sweep_seconds: f64,
    pub total_seconds: f64,
    pub error: Option<String>,
}

/// eps(t) for a recovered signal against the exact reference.
pub fn pointwise_eps(q: &[C64], exact: &[C64]) -> Result<Vec<f64>, ExperimentError> {
    let max_ref = exact.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if max_ref == 0.0 {
        return Err(ExperimentError::ZeroReference);
    }
    Ok(q.iter()
        .zip(exact)
        .map(|(got, want)| (got - want).norm() / max_ref)
        .collect())
}

pub fn rmse(eps: &[f64]) -> f64 {
    (eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64).sqrt()
}

/// Approximation order between two rungs of a grid doubling.
pub fn order_between(rmse_coarse: f64, rmse_fine: f64) -> f64 {
    (rmse_coarse / rmse_fine).log2()
}

fn run_cell(fx: &Fixture, cfg: &ExperimentConfig, scheme: Scheme, m_out: usize) -> Cell {
    let grid = match GridConfig::split_at_zero(cfg.l, m_out) {
        Ok(g) => g,
        Err(e) => {
            return Cell {
                scheme,
                m_out,
                rmse: f64::NAN,
                max_eps: f64::NAN,
                kernel_seconds: f64::NAN,
                sweep_seconds: f64::NAN,
                total_seconds: f64::NAN,
                error: Some(e.to_string()),
            }
        }
    };
    match recover(
        &fx.sd_left,
        Some(&fx.sd_right),
        &grid,
        scheme,
        RecoverOptions::default(),
    ) {
        Ok(rp) => {
            let exact = fx.exact_on_grid(&grid);
            match pointwise_eps(&rp.q, &exact) {
                Ok(eps) => Cell {
                    scheme,
                    m_out,
                    rmse: rmse(&eps),
                    max_eps: eps.iter().cloned().fold(0.0, f64::max),
                    kernel_seconds: rp.timing.kernel.as_secs_f64(),
                    sweep_seconds: (rp.timing.total - rp.timing.kernel).as_secs_f64(),
                    total_seconds: rp.timing.total.as_secs_f64(),
                    error: None,
                },
                Err(e) => Cell {
                    scheme,
                    m_out,
                    rmse: f64::NAN,
                    max_eps: f64::NAN,
                    kernel_seconds: f64::NAN,
                    sweep_seconds: f64::NAN,
                    total_seconds: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        }
        Err(e) => Cell {
            scheme,
            m_out,
            rmse: f64::NAN,
            max_eps: f64::NAN,
            kernel_seconds: f64::NAN,
            sweep_seconds: f64::NAN,
            total_seconds: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

fn run_cells(cfg: &ExperimentConfig, fx: &Fixture) -> Result<Vec<Cell>, ExperimentError> {
    cfg.validate_ladder()?;
    let schemes = cfg.parsed_schemes()?;
    let tasks: Vec<(Scheme, usize)> = schemes
        .iter()
        .flat_map(|&s| cfg.ladder.iter().map(move |&m| (s, m)))
        .collect();
    let cells: Vec<Cell> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            tasks
                .par_iter()
                .map(|&(s, m)| run_cell(fx, cfg, s, m))
                .collect()
        })
    } else {
        tasks.iter().map(|&(s, m)| run_cell(fx, cfg, s, m)).collect()
    };
    Ok(cells)
}

/// Convergence study: RMSE and approximation order per scheme along the
/// ladder.
pub struct ConvergenceTable {
    pub cells: Vec<Cell>,
    pub orders: Vec<(Scheme, usize, f64)>, // (scheme, coarse M, order)
    pub seed: u64,
}

pub fn run_convergence(
    cfg: &ExperimentConfig,
    fx: &Fixture,
) -> Result<ConvergenceTable, ExperimentError> {
    let cells = run_cells(cfg, fx)?;
    let schemes = cfg.parsed_schemes()?;
    let mut orders = Vec::new();
    for &s in &schemes {
        for pair in cfg.ladder.windows(2) {
            let coarse = cells
                .iter()
                .find(|c| c.scheme == s && c.m_out == pair[0] && c.error.is_none());
            let fine = cells
                .iter()
                .find(|c| c.scheme == s && c.m_out == pair[1] && c.error.is_none());
            if let (Some(cc), Some(cf)) = (coarse, fine) {
                orders.push((s, pair[0], order_between(cc.rmse, cf.rmse)));
            }
        }
    }
    Ok(ConvergenceTable {
        cells,
        orders,
        seed: cfg.seed,
    })
}

impl ConvergenceTable {
    pub fn mean_order(&self, schemes: &[Scheme]) -> f64 {
        let vals: Vec<f64> = self
            .orders
            .iter()
            .filter(|(s, _, _)| schemes.contains(s))
            .map(|(_, _, o)| *o)
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "scheme,M,rmse,max_eps,order_to_next,t_kernel_s,t_sweep_s,t_total_s,seed,version,status\n",
        );
        for c in &self.cells {
            let order = self
                .orders
                .iter()
                .find(|(s, m, _)| *s == c.scheme && *m == c.m_out)
                .map(|(_, _, o)| format!("{o:.6}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{:.6},{:.6},{:.6},{},{},{}\n",
                c.scheme,
                c.m_out,
                fmt_err(c.rmse),
                fmt_err(c.max_eps),
                order,
                c.kernel_seconds,
                c.sweep_seconds,
                c.total_seconds,
                self.seed,
                CODE_VERSION,
                c.error.clone().unwrap_or_else(|| "ok".into()),
            ));
        }
        out
    }
}

fn fmt_err(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.12e}")
    }
}

/// Accuracy/time trade-off: the convergence cells plus, per accuracy target,
/// the scheme that reaches it in the least sweep time.
pub struct ParetoTable {
    pub cells: Vec<Cell>,
    /// (target RMSE, winning scheme, its M, its time)
    pub fastest_at: Vec<(f64, Scheme, usize, f64)>,
    pub seed: u64,
}

pub fn run_pareto(cfg: &ExperimentConfig, fx: &Fixture) -> Result<ParetoTable, ExperimentError> {
    let cells = run_cells(cfg, fx)?;
    let targets = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8, 1e-10];
    let mut fastest_at = Vec::new();
    for &target in &targets {
        let best = cells
            .iter()
            .filter(|c| c.error.is_none() && c.rmse <= target)
            .min_by(|a, b| a.total_seconds.total_cmp(&b.total_seconds));
        if let Some(c) = best {
            fastest_at.push((target, c.scheme, c.m_out, c.total_seconds));
        }
    }
    Ok(ParetoTable {
        cells,
        fastest_at,
        seed: cfg.seed,
    })
}

impl ParetoTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "scheme,M,rmse,t_kernel_s,t_sweep_s,t_total_s,seed,version,status\n",
        );
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6},{:.6},{},{},{}\n",
                c.scheme,
                c.m_out,
                fmt_err(c.rmse),
                c.kernel_seconds,
                c.sweep_seconds,
                c.total_seconds,
                self.seed,
                CODE_VERSION,
                c.error.clone().unwrap_or_else(|| "ok".into()),
            ));
        }
        out.push_str("\n# fastest scheme per accuracy target\n");
        out.push_str("target_rmse,scheme,M,t_total_s\n");
        for (t, s, m, secs) in &self.fastest_at {
            out.push_str(&format!("{t:.1e},{s},{m},{secs:.6}\n"));
        }
        out
    }
}

/// Pointwise error profiles eps(t) per (scheme, M), plus per-point orders
/// between consecutive rungs on the shared coarse grid.
pub struct PointwiseTable {
    /// (scheme, M, t values, eps values)
    pub profiles: Vec<(Scheme, usize, Vec<f64>, Vec<f64>)>,
    /// (scheme, coarse M, t values, per-point order)
    pub orders: Vec<(Scheme, usize, Vec<f64>, Vec<f64>)>,
    pub seed: u64,
}

pub fn run_pointwise(
    cfg: &ExperimentConfig,
    fx: &Fixture,
) -> Result<PointwiseTable, ExperimentError> {
    cfg.validate_ladder()?;
    let schemes = cfg.parsed_schemes()?;
    let mut profiles = Vec::new();
    for &scheme in &schemes {
        for &m_out in &cfg.ladder {
            let grid = GridConfig::split_at_zero(cfg.l, m_out)?;
            let rp = recover(
                &fx.sd_left,
                Some(&fx.sd_right),
                &grid,
                scheme,
                RecoverOptions::default(),
            )
            .map_err(|e| ExperimentError::Cell {
                cell: format!("{scheme} M={m_out}"),
                source: e,
            })?;
            let eps = pointwise_eps(&rp.q, &fx.exact_on_grid(&grid))?;
            profiles.push((scheme, m_out, rp.t.clone(), eps));
        }
    }
    // per-point order between rungs, sampled on the coarse grid (nested)
    let mut orders = Vec::new();
    for &scheme in &schemes {
        for pair in cfg.ladder.windows(2) {
            let coarse = profiles
                .iter()
                .find(|p| p.0 == scheme && p.1 == pair[0]);
            let fine = profiles.iter().find(|p| p.0 == scheme && p.1 == pair[1]);
            if let (Some(pc), Some(pf)) = (coarse, fine) {
                let ratio = pair[1] / pair[0];
                let t = pc.2.clone();
                let ord = pc
                    .3
                    .iter()
                    .enumerate()
                    .map(|(k, &ec)| {
                        let ef = pf.3[k * ratio];
                        if ec > 0.0 && ef > 0.0 {
                            (ec / ef).log2()
                        } else {
                            f64::NAN
                        }
                    })
                    .collect();
                orders.push((scheme, pair[0], t, ord));
            }
        }
    }
    Ok(PointwiseTable {
        profiles,
        orders,
        seed: cfg.seed,
    })
}

impl PointwiseTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,M,t,eps,order_to_next,seed,version\n");
        for (scheme, m, ts, eps) in &self.profiles {
            let order_row = self
                .orders
                .iter()
                .find(|(s, mc, _, _)| s == scheme && mc == m);
            for (k, (&t, &e)) in ts.iter().zip(eps).enumerate() {
                let o = order_row
                    .and_then(|(_, _, _, ords)| ords.get(k))
                    .map(|o| {
                        if o.is_nan() {
                            String::new()
                        } else {
                            format!("{o:.6}")
                        }
                    })
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{:.12e},{},{},{},{}\n",
                    scheme,
                    m,
                    t,
                    fmt_err(e),
                    o,
                    self.seed,
                    CODE_VERSION,
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_and_rmse_basics() {
        let exact = vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0)];
        let got = vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0)];
        let eps = pointwise_eps(&got, &exact).unwrap();
        assert_eq!(eps, vec![0.0, 0.0]);
        assert_eq!(rmse(&eps), 0.0);
    }

    #[test]
    fn zero_reference_is_refused() {
        let exact = vec![C64::new(0.0, 0.0); 3];
        let got = exact.clone();
        assert!(matches!(
            pointwise_eps(&got, &exact),
            Err(ExperimentError::ZeroReference)
        ));
    }

    #[test]
    fn order_of_known_pair() {
        // RMSE pair (1e-2, 2.5e-3) across a doubling -> order 2
        let m = order_between(1e-2, 2.5e-3);
        assert!((m - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_validation() {
        let mut cfg = ExperimentConfig::default();
        cfg.ladder = vec![64, 128, 256];
        assert!(cfg.validate_ladder().is_ok());
        cfg.ladder = vec![128, 64];
        assert!(cfg.validate_ladder().is_err());
        cfg.ladder = vec![100, 200];
        assert!(cfg.validate_ladder().is_err());
    }

    #[test]
    fn convergence_on_soliton_small_ladder() {
        let cfg = ExperimentConfig {
            signal: SignalKind::Soliton { zeta: [0.0, 0.5], norm: [0.0, -1.0] },
            dispersion: Dispersion::Anomalous,
            l: 20.0,
            ladder: vec![64, 128],
            schemes: vec!["TIB".into(), "G3d".into()],
            m_xi: 1,
            l_xi: 1.0,
            seed: 7,
            jobs: 1,
        };
        let fx = Fixture::prepare(&cfg).unwrap();
        let table = run_convergence(&cfg, &fx).unwrap();
        assert_eq!(table.cells.len(), 4);
        assert!(table.cells.iter().all(|c| c.error.is_none()));
        let tib_order = table.mean_order(&[Scheme::Tib]);
        assert!((1.5..=2.6).contains(&tib_order), "TIB order {tib_order}");
        let g3_order = table.mean_order(&[Scheme::Gregory { n: 3, two_sided: true }]);
        assert!(g3_order > 2.8, "G3d order {g3_order}");
        let csv = table.to_csv();
        assert!(csv.contains("scheme,M,rmse"));
        assert!(csv.lines().count() >= 5);
    }

    #[test]
    fn csv_determinism_excluding_timing() {
        let cfg = ExperimentConfig {
            signal: SignalKind::Soliton { zeta: [0.0, 0.5], norm: [0.0, -1.0] },
            dispersion: Dispersion::Anomalous,
            l: 16.0,
            ladder: vec![32, 64],
            schemes: vec!["G2".into()],
            m_xi: 1,
            l_xi: 1.0,
            seed: 3,
            jobs: 1,
        };
        let fx = Fixture::prepare(&cfg).unwrap();
        let strip = |csv: String| -> Vec<String> {
            csv.lines()
                .map(|l| {
                    l.split(',')
                        .enumerate()
                        .filter(|(i, _)| ![5, 6, 7].contains(i))
                        .map(|(_, f)| f.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect()
        };
        let a = strip(run_convergence(&cfg, &fx).unwrap().to_csv());
        let b = strip(run_convergence(&cfg, &fx).unwrap().to_csv());
        assert_eq!(a, b);
    }
}
