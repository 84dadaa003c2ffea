//! `jspec`: coefficient generation, spectra, moment comparisons, deviation
//! diagnostics, trace-limit comparisons, density tables, and subsequence
//! selection, all emitted as CSV/JSON reports.
//!
//! Exit codes: 0 success, 2 configuration problems, 3 numerical-tolerance
//! failures in validation subcommands.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use jacobi_spectra::deviation::{class_slope, deviation_ladder, Band, MaxAbsGrowth};
use jacobi_spectra::distribution::helly_subsequence;
use jacobi_spectra::eigensolve::{all_eigenvalues, default_tolerance};
use jacobi_spectra::ensembles::{builtin, Ensemble, EnsembleParams, BUILTIN_IDS};
use jacobi_spectra::jacobi::JacobiMatrix;
use jacobi_spectra::measures::{
    arcsine_density, marchenko_pastur_density, nevai_ullman_density, semicircle_density,
    DensityCurve, Rect,
};
use jacobi_spectra::moments::moment_deviation_ladder;
use jacobi_spectra::sequences::{CoefficientSequence, SequenceConfig};
use jacobi_spectra::traceformula::{convergence_ladder, suite_subset, test_function_suite};

use output::{csv_document, emit, fmt_opt, fmt_real, metadata};

#[derive(Parser)]
#[command(
    name = "jspec",
    version,
    about = "Spectra of structured Jacobi matrices and their asymptotic trace limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where coefficient data comes from: a built-in ensemble id (with optional
/// parameters) or a sequence configuration file.
#[derive(Args, Debug)]
struct Source {
    /// Built-in ensemble id
    #[arg(long, conflicts_with = "config")]
    ensemble: Option<String>,
    /// Path to a sequence configuration JSON file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ensemble id or config path (auto-detected)
    #[arg(long, conflicts_with_all = ["ensemble", "config"])]
    seq: Option<String>,
    /// Diagonal parameter of parametrized ensembles
    #[arg(long)]
    a: Option<f64>,
    /// Off-diagonal parameter of parametrized ensembles
    #[arg(long)]
    b: Option<f64>,
    /// Exponent of the nevai-ullman ensemble
    #[arg(long)]
    alpha: Option<f64>,
    /// Seed of random ensembles
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum BandArg {
    #[default]
    Diag,
    Offdiag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityName {
    Arcsine,
    Semicircle,
    MarchenkoPastur,
    NevaiUllman,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the coefficient vectors of a sequence at one size
    Gen {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute all eigenvalues at one size (CSV: k,index,lambda)
    Spectrum {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: usize,
        /// Absolute eigenvalue tolerance (default 1e-10 * max(1, M))
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact moment traces vs the combinatorial approximation
    Moments {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total-variation, monotonicity, and discrepancy diagnostics
    Deviation {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<usize>,
        #[arg(long, value_enum, default_value_t)]
        band: BandArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical trace averages vs the limit functional of the ensemble
    Compare {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<usize>,
        /// Test-function ids (default: the whole suite)
        #[arg(long, value_delimiter = ',')]
        phis: Option<Vec<String>>,
        /// Fail (exit 3) when any abs_err exceeds this
        #[arg(long)]
        max_abs_err: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a closed-form spectral density (CSV: x,density)
    Density {
        #[arg(long, value_enum)]
        name: DensityName,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subsequence selection by stabilization of empirical joint CDFs
    Helly {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<usize>,
        #[arg(long)]
        tol: f64,
        /// Nodes per axis of the CDF grid
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Padding added around the unit box for the CDF rectangle
        #[arg(long, default_value_t = 0.125)]
        pad: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Tolerance(String),
    Io(std::io::Error),
}

impl From<jacobi_spectra::Error> for CliError {
    fn from(e: jacobi_spectra::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

impl Source {
    fn ensemble_params(&self) -> EnsembleParams {
        EnsembleParams {
            a: self.a,
            b: self.b,
            alpha: self.alpha,
            seed: self.seed,
        }
    }

    fn load_config(path: &Path) -> CliResult<CoefficientSequence> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read sequence config {}: {e}", path.display()))
        })?;
        let config: SequenceConfig = serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!("invalid sequence config {}: {e}", path.display()))
        })?;
        Ok(CoefficientSequence::from_config(&config)?)
    }

    /// The coefficient sequence this source describes (ensembles are
    /// contracted where applicable).
    fn sequence(&self) -> CliResult<(CoefficientSequence, serde_json::Value)> {
        if let Some(path) = &self.config {
            let seq = Self::load_config(path)?;
            return Ok((seq, json!({"config": path.display().to_string()})));
        }
        if let Some(id) = &self.ensemble {
            let e = builtin(id, &self.ensemble_params())?;
            let meta = json!({"ensemble": id, "seed": self.seed});
            return Ok((e.effective_sequence(), meta));
        }
        if let Some(spec) = &self.seq {
            let path = Path::new(spec);
            if path.exists() {
                let seq = Self::load_config(path)?;
                return Ok((seq, json!({"config": spec})));
            }
            let e = builtin(spec, &self.ensemble_params())?;
            let meta = json!({"ensemble": spec, "seed": self.seed});
            return Ok((e.effective_sequence(), meta));
        }
        Err(CliError::Config(format!(
            "no coefficient source given; pass --ensemble <id>, --config <path> or --seq (ids: {})",
            BUILTIN_IDS.join(", ")
        )))
    }

    /// The full ensemble, required when a limit measure is needed.
    fn ensemble(&self) -> CliResult<(Ensemble, serde_json::Value)> {
        let id = self
            .ensemble
            .as_deref()
            .or(self.seq.as_deref())
            .ok_or_else(|| {
                CliError::Config(format!(
                    "this subcommand needs --ensemble <id> (ids: {})",
                    BUILTIN_IDS.join(", ")
                ))
            })?;
        let e = builtin(id, &self.ensemble_params())?;
        let meta = json!({"ensemble": id, "seed": self.seed});
        Ok((e, meta))
    }
}

fn main() -> ExitCode {
    configure_threads();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("configuration error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Tolerance(message)) => {
            eprintln!("tolerance failure: {message}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(2)
        }
    }
}

/// JS_THREADS caps the rayon pool used by the eigensolver.
fn configure_threads() {
    if let Ok(value) = std::env::var("JS_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen { source, k, out } => {
            let (seq, source_meta) = source.sequence()?;
            let matrix = JacobiMatrix::from_sequence(&seq, k)?;
            let mut rows = Vec::with_capacity(k);
            for (i, &d) in matrix.diagonal().iter().enumerate() {
                let off = matrix.offdiagonal().get(i).copied();
                rows.push(format!("{},{},{}", i + 1, fmt_real(d), fmt_opt(off)));
            }
            let meta = metadata("gen", json!({"k": k, "source": source_meta}));
            emit(out.as_deref(), &csv_document(&meta, "index,diag,offdiag", &rows))?;
            Ok(())
        }
        Command::Spectrum { source, k, tol, out } => {
            let (seq, source_meta) = source.sequence()?;
            let matrix = JacobiMatrix::from_sequence(&seq, k)?;
            let abs_tol = tol.unwrap_or_else(|| default_tolerance(&matrix));
            let spectrum = all_eigenvalues(&matrix, abs_tol)?;
            let rows: Vec<String> = spectrum
                .eigenvalues()
                .iter()
                .enumerate()
                .map(|(i, &l)| format!("{k},{},{}", i + 1, fmt_real(l)))
                .collect();
            let meta = metadata(
                "spectrum",
                json!({"k": k, "solver_abs_tol": abs_tol, "source": source_meta}),
            );
            emit(out.as_deref(), &csv_document(&meta, "k,index,lambda", &rows))?;
            Ok(())
        }
        Command::Moments { source, n, ks, out } => {
            let (seq, source_meta) = source.sequence()?;
            let reports = moment_deviation_ladder(&seq, n, &ks)?;
            let rows: Vec<String> = reports
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{}",
                        r.n,
                        r.k,
                        fmt_real(r.exact_trace),
                        fmt_real(r.approx_trace),
                        fmt_real(r.deviation_per_k)
                    )
                })
                .collect();
            let meta = metadata("moments", json!({"n": n, "ks": ks, "source": source_meta}));
            emit(
                out.as_deref(),
                &csv_document(&meta, "n,k,exact,approx,deviation_per_k", &rows),
            )?;
            Ok(())
        }
        Command::Deviation { source, ks, band, out } => {
            let (seq, source_meta) = source.sequence()?;
            let band = match band {
                BandArg::Diag => Band::Diagonal,
                BandArg::Offdiag => Band::OffDiagonal,
            };
            let reports = deviation_ladder(&seq, band, &ks)?;
            let rows: Vec<String> = reports
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{},{}",
                        r.k,
                        fmt_real(r.total_variation),
                        fmt_real(r.tv_per_k),
                        fmt_real(r.max_abs),
                        fmt_real(r.monotone_fraction),
                        fmt_opt(r.discrepancy)
                    )
                })
                .collect();
            // slope regression needs a 4+ rung ladder; it is a heuristic and
            // is labeled as one in the metadata
            let slopes = if ks.len() >= 4 {
                let slope = class_slope(&seq, band, &ks)?;
                json!({
                    "tv_exponent": slope.tv_exponent,
                    "maxabs_growth": match slope.maxabs_growth {
                        MaxAbsGrowth::Bounded => "bounded",
                        MaxAbsGrowth::Logarithmic => "logarithmic",
                        MaxAbsGrowth::Faster => "faster",
                    },
                    "consistent_with_small_deviation": slope.consistent_with_small_deviation(),
                    "heuristic": true,
                })
            } else {
                serde_json::Value::Null
            };
            let meta = metadata(
                "deviation",
                json!({"ks": ks, "source": source_meta, "class_slope": slopes}),
            );
            emit(
                out.as_deref(),
                &csv_document(
                    &meta,
                    "k,tv,tv_per_k,max_abs,monotone_fraction,discrepancy",
                    &rows,
                ),
            )?;
            Ok(())
        }
        Command::Compare { source, ks, phis, max_abs_err, format, out } => {
            let (ensemble, source_meta) = source.ensemble()?;
            let suite = test_function_suite();
            let selected = match &phis {
                Some(ids) => {
                    let picked = suite_subset(&suite, ids);
                    if picked.len() != ids.len() {
                        let known: Vec<&str> = suite.iter().map(|f| f.id()).collect();
                        return Err(CliError::Config(format!(
                            "unknown test-function id in {ids:?}; known ids: {}",
                            known.join(", ")
                        )));
                    }
                    picked
                }
                None => suite,
            };
            let seq = ensemble.effective_sequence();
            let reports = convergence_ladder(&seq, &ensemble.mu, &selected, &ks)?;
            let meta = metadata(
                "compare",
                json!({
                    "ks": ks,
                    "phis": selected.iter().map(|f| f.id().to_string()).collect::<Vec<_>>(),
                    "solver_tolerance_factor": jacobi_spectra::eigensolve::DEFAULT_TOLERANCE_FACTOR,
                    "max_abs_err": max_abs_err,
                    "source": source_meta,
                }),
            );
            let content = match format {
                Format::Csv => {
                    let rows: Vec<String> = reports
                        .iter()
                        .map(|r| {
                            format!(
                                "{},{},{},{},{}",
                                r.phi_id,
                                r.k,
                                fmt_real(r.empirical),
                                fmt_real(r.limit),
                                fmt_real(r.abs_err)
                            )
                        })
                        .collect();
                    csv_document(&meta, "phi_id,k,empirical,limit,abs_err", &rows)
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = reports
                        .iter()
                        .map(|r| {
                            json!({
                                "phi_id": r.phi_id,
                                "k": r.k,
                                "empirical": r.empirical,
                                "limit": r.limit,
                                "abs_err": r.abs_err,
                            })
                        })
                        .collect();
                    let doc = json!({"metadata": meta, "reports": rows});
                    format!("{doc:#}\n")
                }
            };
            emit(out.as_deref(), &content)?;
            if let Some(bound) = max_abs_err {
                let worst = reports.iter().map(|r| r.abs_err).fold(0.0, f64::max);
                if worst > bound {
                    return Err(CliError::Tolerance(format!(
                        "max abs_err {worst} exceeds the requested bound {bound}"
                    )));
                }
            }
            Ok(())
        }
        Command::Density { name, a, b, radius, alpha, points, out } => {
            if points == 0 {
                return Err(CliError::Config("--points must be positive".into()));
            }
            let density: DensityCurve = match name {
                DensityName::Arcsine => arcsine_density(a.unwrap_or(0.0), b.unwrap_or(0.5))?,
                DensityName::Semicircle => semicircle_density(radius.unwrap_or(1.0))?,
                DensityName::MarchenkoPastur => marchenko_pastur_density(),
                DensityName::NevaiUllman => nevai_ullman_density(
                    alpha.unwrap_or(0.5),
                    a.unwrap_or(0.0),
                    b.unwrap_or(0.5),
                    64,
                )?,
            };
            let (lo, hi) = density.support();
            let rows: Vec<String> = (0..points)
                .map(|i| {
                    let x = lo + (hi - lo) * (i as f64 + 0.5) / points as f64;
                    format!("{},{}", fmt_real(x), fmt_real(density.density(x)))
                })
                .collect();
            let meta = metadata(
                "density",
                json!({"density": density.name(), "support": [lo, hi], "points": points}),
            );
            emit(out.as_deref(), &csv_document(&meta, "x,density", &rows))?;
            Ok(())
        }
        Command::Helly { source, ks, tol, grid, pad, out } => {
            let (seq, source_meta) = source.sequence()?;
            let rect = Rect::unit_box().padded(pad);
            let report = helly_subsequence(&seq, &ks, tol, rect, grid)?;
            let meta = metadata(
                "helly",
                json!({"ks": ks, "tol": tol, "grid": grid, "rect": rect, "source": source_meta}),
            );
            let doc = json!({
                "metadata": meta,
                "converged": report.converged,
                "selected_ks": report.selected_ks,
                "sup_norm_trace": report.sup_norm_trace,
                "best_rejected_sup_norm": if report.best_rejected_sup_norm.is_finite() {
                    json!(report.best_rejected_sup_norm)
                } else {
                    serde_json::Value::Null
                },
                "limit_cdf_grid": serde_json::to_value(&report.limit)
                    .map_err(|e| CliError::Config(e.to_string()))?,
            });
            emit(out.as_deref(), &format!("{doc:#}\n"))?;
            if !report.converged {
                return Err(CliError::Tolerance(format!(
                    "no stabilizing subsequence found; best rejected sup-norm {}",
                    report.best_rejected_sup_norm
                )));
            }
            Ok(())
        }
    }
}
