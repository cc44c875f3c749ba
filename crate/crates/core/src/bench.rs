//! Evaluation harness: serial vs parallel timing of the compress+decompress
//! pipeline, speedups, PSNR sweeps across backends, and CSV/Markdown reports.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::codec::{roundtrip_with, Execution, Image};
use crate::error::{Error, Result};
use crate::metrics::{psnr, Peak, Psnr};
use crate::transform::DctBackendId;

/// How far a CORDIC row may score above its exact counterpart before the
/// sweep is rejected.
pub const CORDIC_PSNR_SLACK_DB: f64 = 0.1;

pub const DEFAULT_REPETITIONS: usize = 10;
pub const CI_REPETITIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub image_label: String,
    pub width: u32,
    pub height: u32,
    pub backend: DctBackendId,
    pub mode: Execution,
    pub quality: u8,
    pub repetitions: usize,
    pub wall_ms_min: f64,
    pub wall_ms_median: f64,
    pub wall_ms_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupRow {
    pub image_label: String,
    pub width: u32,
    pub height: u32,
    pub backend: DctBackendId,
    pub quality: u8,
    pub threads: usize,
    pub serial_ms: f64,
    pub parallel_ms: f64,
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsnrRow {
    pub image_label: String,
    pub width: u32,
    pub height: u32,
    pub backend: DctBackendId,
    pub quality: u8,
    pub psnr: Psnr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledImage {
    pub label: String,
    pub image: Image,
}

impl LabeledImage {
    pub fn new(label: impl Into<String>, image: Image) -> Self {
        Self {
            label: label.into(),
            image,
        }
    }
}

/// Minimum, median and mean of a non-empty sample.
pub fn summarize(samples: &[f64]) -> Result<(f64, f64, f64)> {
    if samples.is_empty() {
        return Err(Error::invalid("no timing samples"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mean = sorted.iter().sum::<f64>() / n as f64;
    Ok((sorted[0], median, mean))
}

fn ensure_identical(reference: &Image, candidate: &Image, context: &str) -> Result<()> {
    if reference == candidate {
        return Ok(());
    }
    let detail = if !reference.same_dimensions(candidate) {
        "dimensions differ".to_string()
    } else {
        let index = reference
            .pixels()
            .iter()
            .zip(candidate.pixels())
            .position(|(a, b)| a != b)
            .unwrap_or_default();
        format!("first differing pixel at index {index}")
    };
    Err(Error::Determinism(format!("{context}: {detail}")))
}

/// Times compress+decompress of `image` under `mode`.
pub fn run_benchmark(
    label: &str,
    image: &Image,
    backend: DctBackendId,
    mode: Execution,
    quality: u8,
    repetitions: usize,
) -> Result<TimingRecord> {
    run_benchmark_with(
        label,
        image,
        backend,
        mode,
        quality,
        repetitions,
        roundtrip_with,
    )
}

/// [`run_benchmark`] over an arbitrary pipeline.
///
/// A serial run provides the reference output; one untimed warm-up run in the
/// requested mode follows. Every timed repetition must reproduce the
/// reference bit for bit, otherwise the benchmark fails with
/// [`Error::Determinism`].
pub fn run_benchmark_with<P>(
    label: &str,
    image: &Image,
    backend: DctBackendId,
    mode: Execution,
    quality: u8,
    repetitions: usize,
    pipeline: P,
) -> Result<TimingRecord>
where
    P: Fn(&Image, DctBackendId, u8, Execution) -> Result<Image>,
{
    if repetitions == 0 {
        return Err(Error::invalid("repetitions must be at least 1"));
    }
    let reference = pipeline(image, backend, quality, Execution::Serial)?;
    if mode != Execution::Serial {
        let warm = pipeline(image, backend, quality, mode)?;
        ensure_identical(
            &reference,
            &warm,
            "parallel warm-up differs from serial output",
        )?;
    }

    let mut samples = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let start = Instant::now();
        let out = pipeline(image, backend, quality, mode)?;
        samples.push(start.elapsed().as_secs_f64() * 1e3);
        ensure_identical(
            &reference,
            &out,
            &format!("repetition {rep} differs from serial output"),
        )?;
    }
    let (min, median, mean) = summarize(&samples)?;
    Ok(TimingRecord {
        image_label: label.to_string(),
        width: image.width(),
        height: image.height(),
        backend,
        mode,
        quality,
        repetitions,
        wall_ms_min: min,
        wall_ms_median: median,
        wall_ms_mean: mean,
    })
}

/// Serial median over parallel median for two runs of the same case.
pub fn speedup_report(serial: &TimingRecord, parallel: &TimingRecord) -> Result<SpeedupRow> {
    let same_case = serial.image_label == parallel.image_label
        && serial.width == parallel.width
        && serial.height == parallel.height
        && serial.backend == parallel.backend
        && serial.quality == parallel.quality;
    if !same_case {
        return Err(Error::invalid(format!(
            "speedup needs matching runs, got {} {} q{} vs {} {} q{}",
            serial.image_label,
            serial.backend,
            serial.quality,
            parallel.image_label,
            parallel.backend,
            parallel.quality
        )));
    }
    if serial.mode != Execution::Serial {
        return Err(Error::invalid("baseline run is not serial"));
    }
    let threads = match parallel.mode {
        Execution::Parallel { threads } => threads,
        Execution::Serial => return Err(Error::invalid("comparison run is not parallel")),
    };
    if serial.wall_ms_median <= 0.0 || parallel.wall_ms_median <= 0.0 {
        return Err(Error::invalid("median time must be positive"));
    }
    Ok(SpeedupRow {
        image_label: serial.image_label.clone(),
        width: serial.width,
        height: serial.height,
        backend: serial.backend,
        quality: serial.quality,
        threads,
        serial_ms: serial.wall_ms_median,
        parallel_ms: parallel.wall_ms_median,
        speedup: serial.wall_ms_median / parallel.wall_ms_median,
    })
}

fn row_key(row: &PsnrRow) -> (&str, u32, u32, u8, DctBackendId) {
    (
        &row.image_label,
        row.width,
        row.height,
        row.quality,
        row.backend,
    )
}

/// One PSNR row per (image, backend) at a fixed quality, sorted by image
/// label then backend.
///
/// Fails with [`Error::BackendOrdering`] if a CORDIC row beats the exact
/// transform for the same image by more than [`CORDIC_PSNR_SLACK_DB`].
pub fn psnr_sweep(
    images: &[LabeledImage],
    backends: &[DctBackendId],
    quality: u8,
    peak: Peak,
) -> Result<Vec<PsnrRow>> {
    if images.is_empty() {
        return Err(Error::invalid("PSNR sweep needs at least one image"));
    }
    if backends.is_empty() {
        return Err(Error::invalid("PSNR sweep needs at least one backend"));
    }
    let mut rows = Vec::with_capacity(images.len() * backends.len());
    for item in images {
        for &backend in backends {
            let reconstructed = roundtrip_with(&item.image, backend, quality, Execution::Serial)?;
            let result = psnr(&item.image, &reconstructed, peak)?;
            rows.push(PsnrRow {
                image_label: item.label.clone(),
                width: item.image.width(),
                height: item.image.height(),
                backend,
                quality,
                psnr: result.psnr,
            });
        }
    }
    rows.sort_by(|a, b| row_key(a).cmp(&row_key(b)));
    check_backend_ordering(&rows)?;
    Ok(rows)
}

/// Checks every CORDIC row against the exact row (Loeffler, else naive) of
/// the same image and quality.
pub fn check_backend_ordering(rows: &[PsnrRow]) -> Result<()> {
    let same_case = |a: &PsnrRow, b: &PsnrRow| {
        a.image_label == b.image_label
            && a.width == b.width
            && a.height == b.height
            && a.quality == b.quality
    };
    for row in rows {
        if row.backend.is_exact() {
            continue;
        }
        let exact = rows
            .iter()
            .filter(|r| r.backend.is_exact() && same_case(r, row))
            .max_by_key(|r| r.backend == DctBackendId::LoefflerSeparable);
        let Some(exact) = exact else { continue };
        let violated = match (row.psnr, exact.psnr) {
            (_, Psnr::Infinite) => false,
            (Psnr::Infinite, Psnr::Finite(_)) => true,
            (Psnr::Finite(c), Psnr::Finite(e)) => c > e + CORDIC_PSNR_SLACK_DB,
        };
        if violated {
            return Err(Error::BackendOrdering(format!(
                "{} q{}: {} scores {} dB, {} scores {} dB",
                row.image_label, row.quality, row.backend, row.psnr, exact.backend, exact.psnr
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::invalid(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "markdown",
        })
    }
}

/// A row type that can be rendered into a report table.
pub trait ReportRow {
    const HEADER: &'static [&'static str];

    fn cells(&self) -> Vec<String>;
}

fn ms(v: f64) -> String {
    format!("{v:.6}")
}

fn mode_cells(mode: Execution) -> [String; 2] {
    match mode {
        Execution::Serial => ["serial".into(), "1".into()],
        Execution::Parallel { threads } => ["parallel".into(), threads.to_string()],
    }
}

impl ReportRow for TimingRecord {
    const HEADER: &'static [&'static str] = &[
        "image",
        "width",
        "height",
        "backend",
        "mode",
        "threads",
        "quality",
        "repetitions",
        "wall_ms_min",
        "wall_ms_median",
        "wall_ms_mean",
    ];

    fn cells(&self) -> Vec<String> {
        let [mode, threads] = mode_cells(self.mode);
        vec![
            self.image_label.clone(),
            self.width.to_string(),
            self.height.to_string(),
            self.backend.to_string(),
            mode,
            threads,
            self.quality.to_string(),
            self.repetitions.to_string(),
            ms(self.wall_ms_min),
            ms(self.wall_ms_median),
            ms(self.wall_ms_mean),
        ]
    }
}

impl ReportRow for SpeedupRow {
    const HEADER: &'static [&'static str] = &[
        "image",
        "width",
        "height",
        "backend",
        "quality",
        "threads",
        "serial_ms",
        "parallel_ms",
        "speedup",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            self.image_label.clone(),
            self.width.to_string(),
            self.height.to_string(),
            self.backend.to_string(),
            self.quality.to_string(),
            self.threads.to_string(),
            ms(self.serial_ms),
            ms(self.parallel_ms),
            ms(self.speedup),
        ]
    }
}

impl ReportRow for PsnrRow {
    const HEADER: &'static [&'static str] =
        &["image", "width", "height", "backend", "quality", "psnr_db"];

    fn cells(&self) -> Vec<String> {
        vec![
            self.image_label.clone(),
            self.width.to_string(),
            self.height.to_string(),
            self.backend.to_string(),
            self.quality.to_string(),
            self.psnr.to_string(),
        ]
    }
}

pub fn render_report<R: ReportRow>(rows: &[R], format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            let report_err = |e: csv::Error| Error::Report(e.to_string());
            writer.write_record(R::HEADER).map_err(report_err)?;
            for row in rows {
                writer.write_record(row.cells()).map_err(report_err)?;
            }
            writer
                .into_inner()
                .map_err(|e| Error::Report(e.to_string()))
        }
        ReportFormat::Markdown => {
            let line = |cells: &[String]| {
                let escaped: Vec<String> = cells.iter().map(|c| c.replace('|', "\\|")).collect();
                format!("| {} |\n", escaped.join(" | "))
            };
            let header: Vec<String> = R::HEADER.iter().map(|h| h.to_string()).collect();
            let mut out = line(&header);
            out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
            for row in rows {
                out.push_str(&line(&row.cells()));
            }
            Ok(out.into_bytes())
        }
    }
}

/// Sorts rows the way [`psnr_sweep`] does.
pub fn sort_psnr_rows(rows: &mut [PsnrRow]) {
    rows.sort_by(|a, b| row_key(a).cmp(&row_key(b)));
}

impl PsnrRow {
    pub fn cmp_psnr(&self, other: &PsnrRow) -> Ordering {
        self.psnr.cmp_db(other.psnr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imageio::{generate_synthetic, Pattern};

    const LOEFFLER: DctBackendId = DctBackendId::LoefflerSeparable;
    const CORDIC: DctBackendId = DctBackendId::CordicLoeffler { iterations: 12 };

    fn record(mode: Execution, median: f64) -> TimingRecord {
        TimingRecord {
            image_label: "img".into(),
            width: 64,
            height: 64,
            backend: LOEFFLER,
            mode,
            quality: 75,
            repetitions: 3,
            wall_ms_min: median,
            wall_ms_median: median,
            wall_ms_mean: median,
        }
    }

    #[test]
    fn summary_statistics() {
        assert_eq!(summarize(&[3.0, 1.0, 2.0]).unwrap(), (1.0, 2.0, 2.0));
        assert_eq!(summarize(&[4.0, 1.0, 2.0, 9.0]).unwrap(), (1.0, 3.0, 4.0));
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn benchmark_record_shape() {
        let img = Image::filled(64, 64, 77).unwrap();
        let r = run_benchmark("flat", &img, LOEFFLER, Execution::Serial, 50, 3).unwrap();
        assert_eq!(r.repetitions, 3);
        assert_eq!((r.width, r.height), (64, 64));
        assert!(r.wall_ms_min <= r.wall_ms_median && r.wall_ms_min <= r.wall_ms_mean);
        assert!(run_benchmark("flat", &img, LOEFFLER, Execution::Serial, 50, 0).is_err());
    }

    #[test]
    fn parallel_benchmark_checks_against_serial() {
        let img = generate_synthetic(Pattern::Radial, 96, 80).unwrap();
        let mode = Execution::parallel(4).unwrap();
        assert!(run_benchmark("radial", &img, CORDIC, mode, 50, 3).is_ok());
    }

    #[test]
    fn injected_nondeterminism_is_fatal() {
        let img = generate_synthetic(Pattern::Gradient, 32, 32).unwrap();
        let flaky = |image: &Image, backend, quality, exec: Execution| {
            let out = roundtrip_with(image, backend, quality, exec)?;
            if exec == Execution::Serial {
                return Ok(out);
            }
            let mut px = out.into_pixels();
            px[5] ^= 1;
            Image::new(image.width(), image.height(), px)
        };
        let mode = Execution::parallel(2).unwrap();
        let err = run_benchmark_with("g", &img, LOEFFLER, mode, 50, 3, flaky).unwrap_err();
        assert!(matches!(err, Error::Determinism(_)));
    }

    #[test]
    fn speedup() {
        let serial = record(Execution::Serial, 100.0);
        let parallel = record(Execution::Parallel { threads: 4 }, 25.0);
        let row = speedup_report(&serial, &parallel).unwrap();
        assert_eq!(row.speedup, 4.0);
        assert_eq!(row.threads, 4);
        let same = record(Execution::Parallel { threads: 1 }, 100.0);
        assert_eq!(speedup_report(&serial, &same).unwrap().speedup, 1.0);

        let mut other = parallel.clone();
        other.quality = 90;
        assert!(speedup_report(&serial, &other).is_err());
        assert!(speedup_report(&parallel, &serial).is_err());
        assert!(speedup_report(&serial, &serial).is_err());
    }

    fn sweep_images() -> Vec<LabeledImage> {
        vec![
            LabeledImage::new(
                "radial",
                generate_synthetic(Pattern::Radial, 48, 40).unwrap(),
            ),
            LabeledImage::new(
                "gradient",
                generate_synthetic(Pattern::Gradient, 40, 48).unwrap(),
            ),
        ]
    }

    #[test]
    fn sweep_rows_sorted_and_order_independent() {
        let images = sweep_images();
        let backends = [CORDIC, LOEFFLER];
        let rows = psnr_sweep(&images, &backends, 50, Peak::OriginalMax).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].image_label, "gradient");
        assert_eq!(rows[0].backend, LOEFFLER);
        assert_eq!(rows[1].backend, CORDIC);

        let reversed: Vec<_> = images.iter().rev().cloned().collect();
        let again = psnr_sweep(&reversed, &[LOEFFLER, CORDIC], 50, Peak::OriginalMax).unwrap();
        assert_eq!(rows, again);
        assert!(psnr_sweep(&images, &[], 50, Peak::OriginalMax).is_err());
        assert!(psnr_sweep(&[], &backends, 50, Peak::OriginalMax).is_err());
    }

    #[test]
    fn ordering_check() {
        let row = |backend, psnr| PsnrRow {
            image_label: "x".into(),
            width: 8,
            height: 8,
            backend,
            quality: 50,
            psnr,
        };
        let ok = [
            row(LOEFFLER, Psnr::Finite(30.0)),
            row(CORDIC, Psnr::Finite(30.05)),
        ];
        assert!(check_backend_ordering(&ok).is_ok());
        let bad = [
            row(LOEFFLER, Psnr::Finite(30.0)),
            row(CORDIC, Psnr::Finite(30.2)),
        ];
        assert!(matches!(
            check_backend_ordering(&bad),
            Err(Error::BackendOrdering(_))
        ));
        let inf = [
            row(LOEFFLER, Psnr::Finite(30.0)),
            row(CORDIC, Psnr::Infinite),
        ];
        assert!(check_backend_ordering(&inf).is_err());
        let naive_only = [
            row(DctBackendId::NaiveDirect2D, Psnr::Finite(10.0)),
            row(CORDIC, Psnr::Finite(20.0)),
        ];
        assert!(check_backend_ordering(&naive_only).is_err());
    }

    #[test]
    fn csv_rendering() {
        let empty: Vec<TimingRecord> = Vec::new();
        let out = String::from_utf8(render_report(&empty, ReportFormat::Csv).unwrap()).unwrap();
        assert_eq!(out, format!("{}\n", TimingRecord::HEADER.join(",")));

        let out = render_report(&[record(Execution::Serial, 1.5)], ReportFormat::Csv).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].split(',').count(), TimingRecord::HEADER.len());
        assert!(lines[1].contains("1.500000"));
        assert!(lines[1].contains(",serial,1,"));

        let row = PsnrRow {
            image_label: "a,b".into(),
            width: 1,
            height: 1,
            backend: LOEFFLER,
            quality: 100,
            psnr: Psnr::Infinite,
        };
        let text = String::from_utf8(render_report(&[row], ReportFormat::Csv).unwrap()).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "\"a,b\",1,1,loeffler,100,inf");
    }

    #[test]
    fn markdown_rendering() {
        let row = PsnrRow {
            image_label: "g".into(),
            width: 2,
            height: 3,
            backend: CORDIC,
            quality: 10,
            psnr: Psnr::Finite(31.157_837_4),
        };
        let text =
            String::from_utf8(render_report(&[row], ReportFormat::Markdown).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "| image | width | height | backend | quality | psnr_db |"
        );
        assert_eq!(lines[1], "|---|---|---|---|---|---|");
        assert_eq!(lines[2], "| g | 2 | 3 | cordic:12 | 10 | 31.157837 |");
    }
}
