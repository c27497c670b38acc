//! `pce` command-line front end.
//!
//! Exit status: 0 on success, 1 for unreadable or malformed input, 2 when a
//! numerical stage fails.

mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use pce_core::data::format::{load_data_file, write_atomic, DataFile};
use pce_core::data::save_matrix;
use pce_core::eval::bench::{bench, bench_csv, parse_sizes};
use pce_core::eval::{
    first_decrease, parse_experiment_config, parse_lambda_list, run_experiment, sweep, sweep_csv, DataSource,
    SweepSplit,
};
use pce_core::pce::{materialize_affinity, DEFAULT_AFFINITY_CAP, DEFAULT_LAMBDA};
use pce_core::{
    estimate_dimension, fit_with, load_model, principal_coefficients, recover_clean, save_model, skinny_svd,
    FitOptions, ModelFile, PceError, Ridge,
};

#[derive(Parser)]
#[command(name = "pce", version, about = "Principal coefficients embedding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model and write it to a file.
    Fit {
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        /// Subtract the per-feature mean before fitting.
        #[arg(long)]
        center: bool,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Project data with a saved model.
    Transform {
        model: PathBuf,
        data: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Run a repeated-partition classification experiment.
    Eval {
        config: PathBuf,
        /// Report CSV; overrides `output=` in the config.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Overrides `base_seed=` in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Estimated dimension (and accuracy, for labeled data with --seed) per lambda.
    Sweep {
        data: PathBuf,
        /// `1,3,5` or `start:stop:step`.
        #[arg(long, default_value = "1:99:2")]
        lambdas: String,
        /// Split seed; enables the accuracy column for labeled data.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.5)]
        train_fraction: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Singular values of the data and of the principal coefficients.
    Spectrum {
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also draw the data spectrum as an SVG line chart.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also write |C*| as an n x n CSV grid for heatmaps.
        #[arg(long)]
        affinity: Option<PathBuf>,
    },
    /// Time fits on generated data.
    Bench {
        /// `n1,n2,...` (with --rows) or `m1xn1,m2xn2,...`.
        #[arg(long, default_value = "500,1000,2000,4000")]
        sizes: String,
        #[arg(long, default_value_t = 256)]
        rows: usize,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// A failure tagged with the stage that raised it.
enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    fn input(stage: &str, err: impl std::fmt::Display) -> Self {
        Failure::Input(format!("{stage}: {err}"))
    }

    fn numerical(stage: &str, err: impl std::fmt::Display) -> Self {
        Failure::Numerical(format!("{stage}: {err}"))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Fit {
            data,
            lambda,
            center,
            output,
        } => cmd_fit(&data, lambda, center, &output),
        Command::Transform { model, data, output } => cmd_transform(&model, &data, &output),
        Command::Eval { config, output, seed } => cmd_eval(&config, output, seed),
        Command::Sweep {
            data,
            lambdas,
            seed,
            train_fraction,
            output,
        } => cmd_sweep(&data, &lambdas, seed, train_fraction, output.as_deref()),
        Command::Spectrum {
            data,
            lambda,
            output,
            svg,
            affinity,
        } => cmd_spectrum(&data, lambda, output.as_deref(), svg.as_deref(), affinity.as_deref()),
        Command::Bench {
            sizes,
            rows,
            lambda,
            seed,
            repeats,
            output,
        } => cmd_bench(&sizes, rows, lambda, seed, repeats, output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_data(path: &Path) -> Result<DataFile, Failure> {
    load_data_file(path).map_err(|e| Failure::input("reading data", e))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    write_atomic(path, contents).map_err(|e| Failure::input("writing output", e))
}

/// Writes to `path`, or to standard output without one.
fn emit(path: Option<&Path>, contents: &str) -> Outcome {
    match path {
        Some(path) => write_file(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn fit_stage(err: &PceError) -> &'static str {
    match err {
        PceError::ZeroMatrix | PceError::NotConverged => "svd",
        PceError::InvalidLambda(_) | PceError::DegenerateDimension { .. } => "dimension estimate",
        _ => "embedding",
    }
}

fn check_lambda(lambda: f64) -> Outcome {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Failure::numerical(
            "dimension estimate",
            PceError::InvalidLambda(lambda),
        ))
    }
}

fn cmd_fit(data: &Path, lambda: f64, center: bool, output: &Path) -> Outcome {
    check_lambda(lambda)?;
    let file = read_data(data)?;
    let d = file.matrix();
    let started = Instant::now();
    let opts = FitOptions {
        lambda,
        center,
        ridge: Ridge::Auto,
    };
    let details = fit_with(d, &opts).map_err(|e| Failure::numerical(fit_stage(&e), &e))?;
    let elapsed = started.elapsed().as_secs_f64();
    let centered;
    let fitted = match &details.model.mean {
        Some(mean) => {
            centered = d
                .subtract_row_offsets(mean)
                .map_err(|e| Failure::numerical("recovery", e))?;
            &centered
        }
        None => d,
    };
    let recovery =
        recover_clean(fitted, &details.svd, details.model.k).map_err(|e| Failure::numerical("recovery", e))?;

    let model_file = ModelFile::new(details.model)
        .with_meta("created_by", concat!("pce ", env!("CARGO_PKG_VERSION")))
        .with_meta("source", data.display().to_string().replace(['\n', '\r'], " ").trim());
    save_model(&model_file, output).map_err(|e| Failure::input("writing model", e))?;

    println!("k={}", model_file.model.k);
    println!("rank={}", details.svd.rank());
    println!("error_norm={:?}", recovery.error.frobenius_norm());
    println!("elapsed={elapsed:.6}");
    Ok(())
}

fn cmd_transform(model: &Path, data: &Path, output: &Path) -> Outcome {
    let model = load_model(model).map_err(|e| Failure::input("reading model", e))?.model;
    let file = read_data(data)?;
    let d = file.matrix();
    if d.rows() != model.input_dim() {
        return Err(Failure::numerical(
            "transform",
            format!(
                "model expects {}x{} input (m x k), data is {}x{}",
                model.input_dim(),
                model.k,
                d.rows(),
                d.cols()
            ),
        ));
    }
    let z = model.transform(d).map_err(|e| Failure::numerical("transform", e))?;
    save_matrix(&z, output).map_err(|e| Failure::input("writing output", e))
}

fn cmd_eval(config: &Path, output: Option<PathBuf>, seed: Option<u64>) -> Outcome {
    let text = std::fs::read_to_string(config)
        .map_err(|e| Failure::input("reading config", format!("{}: {e}", config.display())))?;
    let mut cfg = parse_experiment_config(&text).map_err(|e| Failure::input("parsing config", e))?;
    if let DataSource::File(path) = &cfg.source {
        // Relative data paths are resolved against the config file.
        let path = match config.parent() {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.clone(),
        };
        let ds = match read_data(&path)? {
            DataFile::Labeled(ds) => ds,
            DataFile::Matrix(_) => {
                return Err(Failure::input(
                    "reading data",
                    format!("{}: experiments need a labeled data set", path.display()),
                ))
            }
        };
        cfg.source = DataSource::Given(ds);
    }
    if let Some(seed) = seed {
        cfg.base_seed = seed;
    }
    let output = output.or_else(|| cfg.output.clone());
    let report = run_experiment(&cfg).map_err(|e| Failure::numerical("experiment", e))?;
    if let Some(path) = &output {
        write_file(path, &report.to_csv())?;
    }
    let k_mode = report.k_mode().map_or_else(|| "none".to_string(), |k| k.to_string());
    println!("mean={:.6} std={:.6} k_mode={k_mode}", report.mean, report.std);
    Ok(())
}

fn cmd_sweep(data: &Path, lambdas: &str, seed: Option<u64>, train_fraction: f64, output: Option<&Path>) -> Outcome {
    let lambdas = parse_lambda_list(lambdas).map_err(|e| Failure::input("parsing lambdas", e))?;
    let file = read_data(data)?;
    let split = seed.map(|seed| SweepSplit { train_fraction, seed });
    let rows = sweep(file.matrix(), file.labels(), &lambdas, split).map_err(|e| Failure::numerical("sweep", e))?;
    emit(output, &sweep_csv(&rows))?;
    if let Some(i) = first_decrease(&rows) {
        return Err(Failure::numerical(
            "sweep",
            format!("estimated dimension decreases as lambda grows (row {i})"),
        ));
    }
    Ok(())
}

fn cmd_spectrum(
    data: &Path,
    lambda: f64,
    output: Option<&Path>,
    svg_path: Option<&Path>,
    affinity_path: Option<&Path>,
) -> Outcome {
    check_lambda(lambda)?;
    let file = read_data(data)?;
    let svd = skinny_svd(file.matrix()).map_err(|e| Failure::numerical("svd", e))?;
    let k = estimate_dimension(svd.sigma(), lambda).map_err(|e| Failure::numerical("dimension estimate", e))?;
    let spectrum = svd.spectrum();
    let total: f64 = spectrum.iter().map(|s| s * s).sum();
    let mut csv = String::from("index,sigma,c_sigma,cumulative_energy\n");
    let mut running = 0.0;
    for (i, s) in spectrum.iter().enumerate() {
        running += s * s;
        let energy = if i + 1 == spectrum.len() { 1.0 } else { running / total };
        let c_sigma = if i < k { 1.0 } else { 0.0 };
        let _ = writeln!(csv, "{},{s:?},{c_sigma:?},{energy:?}", i + 1);
    }
    emit(output, &csv)?;
    if let Some(path) = svg_path {
        write_file(path, &svg::line_chart("Singular values", &spectrum))?;
    }
    if let Some(path) = affinity_path {
        let factor =
            principal_coefficients(&svd, lambda).map_err(|e| Failure::numerical("principal coefficients", e))?;
        let c = materialize_affinity(&factor, DEFAULT_AFFINITY_CAP).map_err(|e| Failure::numerical("affinity", e))?;
        let mut grid = String::new();
        for row in c.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{:?}", v.abs())).collect();
            let _ = writeln!(grid, "{}", cells.join(","));
        }
        write_file(path, &grid)?;
    }
    Ok(())
}

fn cmd_bench(sizes: &str, rows: usize, lambda: f64, seed: u64, repeats: usize, output: Option<&Path>) -> Outcome {
    check_lambda(lambda)?;
    let sizes = parse_sizes(sizes, rows).map_err(|e| Failure::input("parsing sizes", e))?;
    if repeats == 0 {
        return Err(Failure::input("bench", "--repeats must be positive"));
    }
    let result = bench(&sizes, lambda, seed, repeats).map_err(|e| match e {
        PceError::InvalidArgument(_) => Failure::input("bench", e),
        e => Failure::numerical("bench", e),
    })?;
    emit(output, &bench_csv(&result))
}
