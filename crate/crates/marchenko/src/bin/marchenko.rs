//! Command-line front end: spectral-data generation, potential recovery, and
//! the convergence / trade-off / pointwise experiment runners.

use clap::{Args, Parser, Subcommand};
use marchenko::experiment::{
    run_convergence, run_pareto, run_pointwise, ExperimentConfig, Fixture,
};
use marchenko::glme::{recover, GridConfig, RecoverOptions, Scheme};
use marchenko::spectral::{Dispersion, SpectralData};
use marchenko::zs::{
    analytic_spectral_data, make_signal, numeric_spectral_data, SignalKind,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "marchenko", version, about = "Inverse scattering for the Zakharov-Shabat system via high-order GLME schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SignalArgs {
    /// Signal family: chirped_sech | sech | rectangle | soliton
    #[arg(long, default_value = "chirped_sech")]
    signal: String,
    /// Amplitude A
    #[arg(long = "A", default_value_t = 5.2)]
    amplitude: f64,
    /// Chirp C (chirped_sech)
    #[arg(long = "C", default_value_t = 4.0)]
    chirp: f64,
    /// Rectangle width
    #[arg(long, default_value_t = 2.0)]
    width: f64,
    /// Soliton eigenvalue "re,im"
    #[arg(long, default_value = "0.0,0.5")]
    zeta: String,
    /// Soliton norming constant "re,im"
    #[arg(long, default_value = "0.0,-1.0")]
    norm: String,
    #[arg(long, default_value = "anomalous")]
    dispersion: String,
    /// Signal interval length
    #[arg(long = "L", default_value_t = 64.0)]
    l: f64,
}

impl SignalArgs {
    fn kind(&self) -> Result<SignalKind, String> {
        let pair = |s: &str| -> Result<[f64; 2], String> {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 2 {
                return Err(format!("expected re,im got '{s}'"));
            }
            Ok([
                parts[0].trim().parse().map_err(|e| format!("{e}"))?,
                parts[1].trim().parse().map_err(|e| format!("{e}"))?,
            ])
        };
        match self.signal.as_str() {
            "chirped_sech" => Ok(SignalKind::ChirpedSech { a: self.amplitude, c: self.chirp }),
            "sech" => Ok(SignalKind::Sech { a: self.amplitude }),
            "rectangle" => Ok(SignalKind::Rectangle { a: self.amplitude, width: self.width }),
            "soliton" => Ok(SignalKind::Soliton {
                zeta: pair(&self.zeta)?,
                norm: pair(&self.norm)?,
            }),
            other => Err(format!("unknown signal '{other}'")),
        }
    }

    fn dispersion(&self) -> Result<Dispersion, String> {
        match self.dispersion.as_str() {
            "anomalous" => Ok(Dispersion::Anomalous),
            "normal" => Ok(Dispersion::Normal),
            other => Err(format!("unknown dispersion '{other}'")),
        }
    }
}

#[derive(Args, Clone)]
struct SpectralGridArgs {
    /// Spectral grid nodes
    #[arg(long = "Mxi", default_value_t = 2049)]
    m_xi: usize,
    /// Spectral domain size
    #[arg(long = "Lxi", default_value_t = 40.0)]
    l_xi: f64,
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    #[command(flatten)]
    signal: SignalArgs,
    #[command(flatten)]
    spectral: SpectralGridArgs,
    /// Output subinterval ladder, comma separated powers of two
    #[arg(long, value_delimiter = ',', default_values_t = vec![1024usize, 2048, 4096, 8192])]
    ladder: Vec<usize>,
    /// Schemes, comma separated (TIB, G2..G6, G2d..G6d)
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<String>,
    /// Seed recorded with every row
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads across ladder cells (1 = honest per-cell timing)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Read the full config from a JSON file instead of flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path
    #[arg(long, default_value = "out.csv")]
    out: PathBuf,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig, String> {
        if let Some(path) = &self.config {
            return ExperimentConfig::load(path).map_err(|e| e.to_string());
        }
        let schemes = if self.scheme.is_empty() {
            Scheme::all().iter().map(|s| s.to_string()).collect()
        } else {
            self.scheme.clone()
        };
        Ok(ExperimentConfig {
            signal: self.signal.kind()?,
            dispersion: self.signal.dispersion()?,
            l: self.signal.l,
            ladder: self.ladder.clone(),
            schemes,
            m_xi: self.spectral.m_xi,
            l_xi: self.spectral.l_xi,
            seed: self.seed,
            jobs: self.jobs,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate spectral data (JSON) from a closed-form signal
    Spectrum {
        #[command(flatten)]
        signal: SignalArgs,
        #[command(flatten)]
        spectral: SpectralGridArgs,
        /// analytic | numeric | auto
        #[arg(long, default_value = "auto")]
        method: String,
        /// Emit data for the time-reversed signal (right-half recovery input)
        #[arg(long, default_value_t = false)]
        reversed: bool,
        /// Signal grid points for the numeric oracle
        #[arg(long, default_value_t = 16384)]
        oracle_grid: usize,
        #[arg(long, default_value = "spectrum.json")]
        out: PathBuf,
    },
    /// Recover a potential from spectral data (CSV output)
    Recover {
        /// Left spectral data JSON
        #[arg(long = "in")]
        input: PathBuf,
        /// Reversed-signal spectral data (enables the split at t = 0)
        #[arg(long = "in-reversed")]
        input_reversed: Option<PathBuf>,
        #[arg(long, default_value = "G6")]
        scheme: String,
        /// Output subintervals
        #[arg(long = "M", default_value_t = 4096)]
        m_out: usize,
        /// Reference signal for the eps(t) column; its --L also sets the
        /// output interval length
        #[command(flatten)]
        reference: SignalArgs,
        /// Enable the eps column against the reference signal
        #[arg(long, default_value_t = false)]
        with_reference: bool,
        /// Run the left and right sweeps concurrently
        #[arg(long, default_value_t = false)]
        parallel: bool,
        #[arg(long, default_value = "recovered.csv")]
        out: PathBuf,
    },
    /// RMSE and approximation order along a grid ladder
    Convergence {
        #[command(flatten)]
        args: ExperimentArgs,
    },
    /// Accuracy vs wall-time trade-off table
    Pareto {
        #[command(flatten)]
        args: ExperimentArgs,
    },
    /// Pointwise error profiles eps(t) and per-point orders
    Pointwise {
        #[command(flatten)]
        args: ExperimentArgs,
    },
}

fn run() -> Result<(), String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Spectrum {
            signal,
            spectral,
            method,
            reversed,
            oracle_grid,
            out,
        } => {
            let kind = signal.kind()?;
            let dispersion = signal.dispersion()?;
            let kind = if reversed { kind.reversed() } else { kind };
            let mut sd = match method.as_str() {
                "analytic" => analytic_spectral_data(kind, dispersion, spectral.m_xi, spectral.l_xi)
                    .map_err(|e| e.to_string())?,
                "numeric" => {
                    let sig = make_signal(kind, signal.l, oracle_grid);
                    numeric_spectral_data(&sig, dispersion, spectral.m_xi, spectral.l_xi)
                        .map_err(|e| e.to_string())?
                }
                "auto" => {
                    match analytic_spectral_data(kind, dispersion, spectral.m_xi, spectral.l_xi) {
                        Ok(sd) => sd,
                        Err(_) => {
                            let sig = make_signal(kind, signal.l, oracle_grid);
                            numeric_spectral_data(&sig, dispersion, spectral.m_xi, spectral.l_xi)
                                .map_err(|e| e.to_string())?
                        }
                    }
                }
                other => return Err(format!("unknown method '{other}'")),
            };
            if reversed {
                sd.side = marchenko::spectral::Side::Right;
            }
            sd.save(&out).map_err(|e| e.to_string())?;
            eprintln!(
                "wrote {} ({} reflection nodes, {} bound states)",
                out.display(),
                sd.reflection.len(),
                sd.discrete.len()
            );
            Ok(())
        }
        Command::Recover {
            input,
            input_reversed,
            scheme,
            m_out,
            reference,
            with_reference,
            parallel,
            out,
        } => {
            let scheme: Scheme = scheme.parse()?;
            let l = reference.l;
            let sd_left = SpectralData::load(&input).map_err(|e| e.to_string())?;
            let sd_right = input_reversed
                .map(|p| SpectralData::load(&p))
                .transpose()
                .map_err(|e| e.to_string())?;
            let grid = match sd_right {
                Some(_) => GridConfig::split_at_zero(l, m_out).map_err(|e| e.to_string())?,
                None => GridConfig::left_only(l, m_out),
            };
            let rp = recover(
                &sd_left,
                sd_right.as_ref(),
                &grid,
                scheme,
                RecoverOptions {
                    parallel_halves: parallel,
                    ..Default::default()
                },
            )
            .map_err(|e| e.to_string())?;
            let exact = if with_reference {
                let kind = reference.kind()?;
                Some(rp.t.iter().map(|&t| kind.eval(t)).collect::<Vec<_>>())
            } else {
                None
            };
            rp.write_csv(&out, exact.as_deref()).map_err(|e| e.to_string())?;
            eprintln!(
                "wrote {} ({} samples, kernel {:.3}s, total {:.3}s)",
                out.display(),
                rp.q.len(),
                rp.timing.kernel.as_secs_f64(),
                rp.timing.total.as_secs_f64()
            );
            Ok(())
        }
        Command::Convergence { args } => {
            let cfg = args.config()?;
            let fx = Fixture::prepare(&cfg).map_err(|e| e.to_string())?;
            let table = run_convergence(&cfg, &fx).map_err(|e| e.to_string())?;
            std::fs::write(&args.out, table.to_csv()).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", args.out.display());
            let failed = table.cells.iter().filter(|c| c.error.is_some()).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(format!("{failed} cell(s) failed"))
            }
        }
        Command::Pareto { args } => {
            let cfg = args.config()?;
            let fx = Fixture::prepare(&cfg).map_err(|e| e.to_string())?;
            let table = run_pareto(&cfg, &fx).map_err(|e| e.to_string())?;
            std::fs::write(&args.out, table.to_csv()).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", args.out.display());
            let failed = table.cells.iter().filter(|c| c.error.is_some()).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(format!("{failed} cell(s) failed"))
            }
        }
        Command::Pointwise { args } => {
            let cfg = args.config()?;
            let fx = Fixture::prepare(&cfg).map_err(|e| e.to_string())?;
            let table = run_pointwise(&cfg, &fx).map_err(|e| e.to_string())?;
            std::fs::write(&args.out, table.to_csv()).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", args.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
