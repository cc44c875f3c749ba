//! `blockdct`: compress, decompress, measure and benchmark 8x8 block DCT coding.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use blockdct::bench::{
    psnr_sweep, render_report, run_benchmark, speedup_report, LabeledImage, ReportFormat,
};
use blockdct::codec::format::{read_dcb, write_dcb};
use blockdct::imageio::{read_pgm, write_pgm, SyntheticSpec};
use blockdct::metrics::{psnr, Peak};
use blockdct::transform::DEFAULT_CORDIC_ITERATIONS;
use blockdct::{compress_image_with, decompress_image_with, DctBackendId, Error, Execution, Image};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_INPUT: u8 = 2;
const EXIT_CONSISTENCY: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "blockdct",
    version,
    about = "8x8 block DCT image compression toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a PGM image into a .dcb file.
    Compress {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        backend: BackendArgs,
        #[arg(short, long, default_value_t = 75, value_parser = clap::value_parser!(u8).range(1..=100))]
        quality: u8,
        #[command(flatten)]
        threads: ThreadArgs,
    },
    /// Reconstruct a PGM image from a .dcb file.
    Decompress {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        threads: ThreadArgs,
    },
    /// Print MSE and PSNR between two PGM images.
    Psnr {
        original: PathBuf,
        reconstructed: PathBuf,
        /// Peak value; defaults to the largest pixel of the original.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..))]
        max: Option<u8>,
    },
    /// Time the pipeline serially and in parallel and report the speedup.
    Bench {
        #[arg(required_unless_present = "synthetic", conflicts_with = "synthetic")]
        input: Option<PathBuf>,
        /// Synthetic source, e.g. gradient:512x512.
        #[arg(long)]
        synthetic: Option<SyntheticSpec>,
        #[command(flatten)]
        backend: BackendArgs,
        #[arg(short, long, default_value_t = 75, value_parser = clap::value_parser!(u8).range(1..=100))]
        quality: u8,
        #[command(flatten)]
        threads: ThreadArgs,
        #[arg(long, default_value_t = blockdct::bench::DEFAULT_REPETITIONS, value_parser = parse_positive)]
        reps: usize,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// PSNR table over images x backends x qualities.
    Sweep {
        inputs: Vec<PathBuf>,
        /// Synthetic sources (repeatable), e.g. radial:512x512.
        #[arg(long)]
        synthetic: Vec<SyntheticSpec>,
        #[arg(long, value_delimiter = ',', default_value = "10,50,90", value_parser = clap::value_parser!(u8).range(1..=100))]
        qualities: Vec<u8>,
        #[arg(long, value_delimiter = ',', required = true)]
        backends: Vec<BackendName>,
        #[arg(long, default_value_t = DEFAULT_CORDIC_ITERATIONS, value_parser = clap::value_parser!(u32).range(1..=32))]
        iterations: u32,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..))]
        max: Option<u8>,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendName {
    Naive,
    Loeffler,
    Cordic,
}

impl BackendName {
    fn with_iterations(self, iterations: u32) -> Result<DctBackendId> {
        Ok(match self {
            BackendName::Naive => DctBackendId::NaiveDirect2D,
            BackendName::Loeffler => DctBackendId::LoefflerSeparable,
            BackendName::Cordic => DctBackendId::cordic(iterations)?,
        })
    }
}

#[derive(Debug, Args)]
struct BackendArgs {
    #[arg(short, long, value_enum, default_value_t = BackendName::Loeffler)]
    backend: BackendName,
    /// CORDIC micro-rotations (cordic backend only).
    #[arg(long, default_value_t = DEFAULT_CORDIC_ITERATIONS, value_parser = clap::value_parser!(u32).range(1..=32))]
    iterations: u32,
}

impl BackendArgs {
    fn resolve(&self) -> Result<DctBackendId> {
        self.backend.with_iterations(self.iterations)
    }
}

#[derive(Debug, Args)]
struct ThreadArgs {
    /// Worker threads; 1 runs serially.
    #[arg(short, long, value_parser = parse_positive)]
    threads: Option<usize>,
}

impl ThreadArgs {
    fn count(&self) -> usize {
        self.threads.unwrap_or_else(default_threads)
    }

    fn execution(&self) -> Execution {
        match self.count() {
            1 => Execution::Serial,
            n => Execution::Parallel { threads: n },
        }
    }
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn read_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_pgm(&bytes).with_context(|| format!("cannot parse {}", path.display()))
}

/// Writes through a temporary file in the destination directory, so a failed
/// run never leaves a partial output behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create output in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn check_output_dir(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => {
            bail!("output directory {} does not exist", p.display())
        }
        _ => Ok(()),
    }
}

fn emit_report(report: &ReportArgs, bytes: &[u8]) -> Result<()> {
    match &report.output {
        Some(path) => write_atomic(path, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Compress {
            input,
            output,
            backend,
            quality,
            threads,
        } => {
            let backend = backend.resolve()?;
            check_output_dir(&output)?;
            let image = read_image(&input)?;
            let compressed = compress_image_with(&image, backend, quality, threads.execution())?;
            write_atomic(&output, &write_dcb(&compressed))?;
            let g = compressed.geometry();
            println!(
                "{}x{} (padded {}x{}), {} blocks, backend {backend}, quality {quality}",
                g.width,
                g.height,
                g.padded_width,
                g.padded_height,
                compressed.blocks().len()
            );
        }
        Command::Decompress {
            input,
            output,
            threads,
        } => {
            check_output_dir(&output)?;
            let bytes =
                fs::read(&input).with_context(|| format!("cannot read {}", input.display()))?;
            let compressed =
                read_dcb(&bytes).with_context(|| format!("cannot parse {}", input.display()))?;
            let image = decompress_image_with(&compressed, threads.execution())?;
            write_atomic(&output, &write_pgm(&image))?;
            println!(
                "{}x{} from {} blocks",
                image.width(),
                image.height(),
                compressed.blocks().len()
            );
        }
        Command::Psnr {
            original,
            reconstructed,
            max,
        } => {
            let o = read_image(&original)?;
            let c = read_image(&reconstructed)?;
            let peak = max.map_or(Peak::OriginalMax, Peak::Fixed);
            let result = psnr(&o, &c, peak)?;
            println!("mse: {:.6}", result.mse);
            println!("max: {}", result.max_value);
            println!("psnr_db: {}", result.psnr);
        }
        Command::Bench {
            input,
            synthetic,
            backend,
            quality,
            threads,
            reps,
            report,
        } => {
            let backend = backend.resolve()?;
            if let Some(path) = &report.output {
                check_output_dir(path)?;
            }
            let (label, image) = match (&input, synthetic) {
                (Some(path), _) => (path.display().to_string(), read_image(path)?),
                (None, Some(spec)) => (spec.to_string(), spec.generate()?),
                (None, None) => bail!("an input image or --synthetic is required"),
            };
            let parallel = Execution::parallel(threads.count())?;
            let serial = run_benchmark(&label, &image, backend, Execution::Serial, quality, reps)?;
            let par = run_benchmark(&label, &image, backend, parallel, quality, reps)?;
            let speedup = speedup_report(&serial, &par)?;
            let mut out = render_report(&[serial, par], report.format)?;
            out.push(b'\n');
            out.extend(render_report(&[speedup], report.format)?);
            emit_report(&report, &out)?;
        }
        Command::Sweep {
            inputs,
            synthetic,
            qualities,
            backends,
            iterations,
            max,
            report,
        } => {
            if inputs.is_empty() && synthetic.is_empty() {
                bail!("sweep needs at least one input image or --synthetic source");
            }
            if let Some(path) = &report.output {
                check_output_dir(path)?;
            }
            let backends = backends
                .iter()
                .map(|b| b.with_iterations(iterations))
                .collect::<Result<Vec<_>>>()?;
            // Read everything up front so a bad path fails before any work.
            let mut images = Vec::new();
            for path in &inputs {
                images.push(LabeledImage::new(
                    path.display().to_string(),
                    read_image(path)?,
                ));
            }
            for spec in &synthetic {
                images.push(LabeledImage::new(spec.to_string(), spec.generate()?));
            }
            let peak = max.map_or(Peak::OriginalMax, Peak::Fixed);
            let mut rows = Vec::new();
            for &quality in &qualities {
                rows.extend(psnr_sweep(&images, &backends, quality, peak)?);
            }
            emit_report(&report, &render_report(&rows, report.format)?)?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let consistency = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<Error>(),
            Some(Error::Determinism(_) | Error::BackendOrdering(_))
        )
    });
    if consistency {
        EXIT_CONSISTENCY
    } else {
        EXIT_INPUT
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
