//! Batch front end: `outspace run --config exp.toml` and
//! `outspace lip A.toml B.toml`.

// `!(x > 0)` deliberately rejects NaN as well as nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod experiments;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::{parse_config, ConfigError};
use outspace::free_group::Basis;
use outspace::outer_space::{
    candidates, lipschitz, normalized_log, parse_marked_graph, MarkedMetricGraph,
};
use outspace::{Error, Rational, Scalar};

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "outspace",
    version,
    about = "Experiments on outer space and random walks on Out(F_N)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Offset added to the seed indices `0..seeds`.
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print `d(A,B)`, `d(B,A)`, `d_sym` and the maximizing candidates.
    Lip { a: PathBuf, b: PathBuf },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_VALIDATION,
            CliError::Core(e) if e.is_resource() => EXIT_RESOURCE,
            CliError::Core(Error::Input(_) | Error::Parse { .. } | Error::Contract(_)) => {
                EXIT_VALIDATION
            }
            _ => EXIT_FAILURE,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn run(
    config: &Path,
    seed_base: u64,
    jobs: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config).map_err(|e| io_err(config, e))?;
    let base_dir = config.parent().unwrap_or(Path::new("."));
    let cfg = parse_config(&text, &config.display().to_string(), base_dir)?;
    if let Some(j) = jobs {
        if j == 0 {
            return Err(ConfigError::Field {
                field: "--jobs".into(),
                message: "must be positive".into(),
            }
            .into());
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global();
    }
    let out_dir = out
        .or_else(|| cfg.output.as_ref().map(|o| base_dir.join(o)))
        .unwrap_or_else(|| PathBuf::from("out"));
    let seeds = cfg.seeds(seed_base);
    let outputs = experiments::run_experiment(&cfg, &seeds)?;

    std::fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
    let mut files = Vec::new();
    for o in &outputs {
        for (name, body) in [
            (format!("{}.csv", o.stem), o.record.csv_string()),
            (format!("{}.json", o.stem), o.record.summary_json() + "\n"),
        ] {
            let path = out_dir.join(&name);
            std::fs::write(&path, body).map_err(|e| io_err(&path, e))?;
            files.push(name);
        }
    }
    let manifest = serde_json::json!({
        "toolkit": "outspace",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment.name(),
        "config_sha256": sha256_hex(text.as_bytes()),
        "seed_base": seed_base,
        "seeds": seeds,
        "files": files,
    });
    let path = out_dir.join("manifest.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("json") + "\n",
    )
    .map_err(|e| io_err(&path, e))?;
    for f in &files {
        println!("{}", out_dir.join(f).display());
    }
    Ok(())
}

fn lip_report<S: Scalar>(
    a: &MarkedMetricGraph<S>,
    b: &MarkedMetricGraph<S>,
    basis: &Basis,
    status: &str,
) -> Result<(), CliError> {
    if a.rank() != b.rank() {
        return Err(Error::Input(format!("ranks differ: {} and {}", a.rank(), b.rank())).into());
    }
    let ab = lipschitz(a, b)?;
    let ba = lipschitz(b, a)?;
    let (d_ab, d_ba) = (normalized_log(&ab, a, b), normalized_log(&ba, b, a));
    println!("d(A,B) = {d_ab:.17}");
    println!("d(B,A) = {d_ba:.17}");
    println!("d_sym = {:.17}", d_ab + d_ba);
    for (label, s, src) in [("A->B", &ab, a), ("B->A", &ba, b)] {
        let shape = candidates(src)?
            .candidates()
            .iter()
            .find(|c| c.class == s.witness)
            .map(|c| format!("{:?}", c.shape).to_lowercase())
            .unwrap_or_default();
        println!(
            "witness({label}) = {} ({shape}), stretch {}/{}",
            basis.format_word(s.witness.word()),
            s.target,
            s.source
        );
    }
    println!("status: {status}");
    Ok(())
}

fn lip_command(a: &Path, b: &Path) -> Result<(), CliError> {
    let ta = std::fs::read_to_string(a).map_err(|e| io_err(a, e))?;
    let tb = std::fs::read_to_string(b).map_err(|e| io_err(b, e))?;
    let located = |p: &Path, e: Error| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", p.display()),
        },
        other => other,
    };
    match (
        parse_marked_graph::<Rational>(&ta),
        parse_marked_graph::<Rational>(&tb),
    ) {
        (Ok((basis, ga)), Ok((_, gb))) => {
            lip_report(&ga, &gb, &basis, "exact-rational stretch, float logarithm")
        }
        _ => {
            let (basis, ga) = parse_marked_graph::<f64>(&ta).map_err(|e| located(a, e))?;
            let (_, gb) = parse_marked_graph::<f64>(&tb).map_err(|e| located(b, e))?;
            lip_report(&ga, &gb, &basis, "float")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed_base,
            jobs,
            out,
        } => run(&config, seed_base, jobs, out),
        Command::Lip { a, b } => lip_command(&a, &b),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
