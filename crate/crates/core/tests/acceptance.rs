//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! each, and exits non-zero if any criterion fails.
//!
//! `cargo test -p blockdct --test acceptance`

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use blockdct::bench::{run_benchmark, LabeledImage};
use blockdct::codec::format::{read_dcb, write_dcb};
use blockdct::codec::Geometry;
use blockdct::imageio::{generate_synthetic, read_pgm, write_pgm, Pattern};
use blockdct::metrics::{mse, psnr, Peak, Psnr};
use blockdct::transform::{dct1d_direct, dct8_cordic_loeffler, dct8_loeffler};
use blockdct::{
    compress_image_with, dct2d, decompress_image_with, roundtrip, Block, CompressedImage,
    DctBackendId, Execution, Image, QuantizedBlock,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NAIVE: DctBackendId = DctBackendId::NaiveDirect2D;
const LOEFFLER: DctBackendId = DctBackendId::LoefflerSeparable;
const CORDIC12: DctBackendId = DctBackendId::CordicLoeffler { iterations: 12 };
const ALL_BACKENDS: [DctBackendId; 3] = [NAIVE, LOEFFLER, CORDIC12];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn fixtures() -> Vec<LabeledImage> {
    [
        Pattern::Gradient,
        Pattern::Checkerboard(8),
        Pattern::Checkerboard(5),
        Pattern::Radial,
    ]
    .into_iter()
    .map(|p| {
        LabeledImage::new(
            format!("{p}:512x512"),
            generate_synthetic(p, 512, 512).unwrap(),
        )
    })
    .collect()
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_vectors(seed: u64, count: usize) -> Vec<[f64; 8]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.gen_range(-128.0..=127.0)))
        .collect()
}

fn max_pixel_error(a: &Image, b: &Image) -> u8 {
    a.pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| x.abs_diff(*y))
        .max()
        .unwrap_or(0)
}

fn psnr_db(p: Psnr) -> f64 {
    p.db().unwrap_or(f64::INFINITY)
}

/// 1. Loeffler vs direct summation.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_2d: f64 = 0.0;
    for _ in 0..1000 {
        let block = Block::new(std::array::from_fn(|_| rng.gen_range(-128.0..=127.0))).unwrap();
        let naive = dct2d(&block, NAIVE).unwrap();
        let fast = dct2d(&block, LOEFFLER).unwrap();
        worst_2d = worst_2d.max(max_abs(naive.values(), fast.values()));
    }
    let worst_1d = random_vectors(2, 1000)
        .iter()
        .map(|x| max_abs(&dct8_loeffler(x).unwrap(), &dct1d_direct(x).unwrap()))
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    Outcome::new(
        worst_2d <= 1e-9 && worst_1d <= 1e-12 && elapsed < Duration::from_secs(5),
        format!("2-D max diff {worst_2d:.3e} (≤1e-9), 1-D max diff {worst_1d:.3e} (≤1e-12), {elapsed:.2?} (<5s)"),
    )
}

/// 2. CORDIC error bound 64·2^-n, non-increasing in n.
fn cordic_convergence() -> Outcome {
    let start = Instant::now();
    let vectors = random_vectors(3, 1000);
    let mut errors = Vec::new();
    for n in [4u32, 8, 12, 16, 20] {
        let worst = vectors
            .iter()
            .map(|x| {
                max_abs(
                    &dct8_cordic_loeffler(x, n).unwrap(),
                    &dct1d_direct(x).unwrap(),
                )
            })
            .fold(0.0, f64::max);
        errors.push((n, worst, 64.0 * (-(n as f64)).exp2()));
    }
    let elapsed = start.elapsed();
    let within = errors.iter().all(|&(_, e, tol)| e <= tol);
    let monotone = errors.windows(2).all(|w| w[1].1 <= w[0].1);
    let table: Vec<String> = errors
        .iter()
        .map(|(n, e, tol)| format!("n={n}: {e:.3e}/{tol:.3e}"))
        .collect();
    Outcome::new(
        within && monotone && elapsed < Duration::from_secs(10),
        format!(
            "error/tol {}; within tol: {within}; non-increasing: {monotone}; {elapsed:.2?} (<10s)",
            table.join(", ")
        ),
    )
}

/// 3. Identity-table round trip is off by at most one grey level.
fn roundtrip_quality() -> Outcome {
    let mut worst = 0u8;
    let mut lowest = f64::INFINITY;
    for item in fixtures() {
        for backend in [NAIVE, LOEFFLER] {
            let out = roundtrip(&item.image, backend, 100).unwrap();
            worst = worst.max(max_pixel_error(&item.image, &out));
            let p = psnr(&item.image, &out, Peak::Fixed(255)).unwrap();
            lowest = lowest.min(psnr_db(p.psnr));
        }
    }
    Outcome::new(
        worst <= 1 && lowest >= 48.13,
        format!("max pixel error {worst} (≤1), lowest PSNR {lowest:.6} dB (≥48.13)"),
    )
}

/// 4. CORDIC never scores more than 0.1 dB above exact Loeffler.
fn backend_ordering() -> Outcome {
    let mut worst_gap = f64::NEG_INFINITY;
    let mut gaps = Vec::new();
    for item in fixtures() {
        for quality in [10u8, 50, 90] {
            let exact = roundtrip(&item.image, LOEFFLER, quality).unwrap();
            let cordic = roundtrip(&item.image, CORDIC12, quality).unwrap();
            let pe = psnr_db(psnr(&item.image, &exact, Peak::OriginalMax).unwrap().psnr);
            let pc = psnr_db(psnr(&item.image, &cordic, Peak::OriginalMax).unwrap().psnr);
            let gap = if pe.is_infinite() {
                f64::NEG_INFINITY
            } else {
                pc - pe
            };
            worst_gap = worst_gap.max(gap);
            gaps.push(format!("{} q{quality}: {:+.4}", item.label, gap));
        }
    }
    Outcome::new(
        worst_gap <= 0.1,
        format!(
            "largest cordic-minus-exact gap {worst_gap:+.4} dB (≤+0.1) [{}]",
            gaps.join("; ")
        ),
    )
}

/// 5. MSE non-increasing in quality.
fn quality_monotonicity() -> Outcome {
    let qualities = [10u8, 30, 50, 70, 90, 100];
    let mut failures = Vec::new();
    for item in fixtures() {
        for backend in ALL_BACKENDS {
            let errs: Vec<f64> = qualities
                .iter()
                .map(|&q| mse(&item.image, &roundtrip(&item.image, backend, q).unwrap()).unwrap())
                .collect();
            if errs.windows(2).any(|w| w[1] > w[0]) {
                failures.push(format!("{} {backend}: {errs:?}", item.label));
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        if failures.is_empty() {
            "MSE non-increasing over q∈{10,30,50,70,90,100} for all fixtures and backends".into()
        } else {
            failures.join("; ")
        },
    )
}

/// 6. Serial and parallel outputs are bit-identical.
fn determinism_gate() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for item in fixtures() {
        for backend in ALL_BACKENDS {
            let serial = compress_image_with(&item.image, backend, 75, Execution::Serial).unwrap();
            let serial_out = decompress_image_with(&serial, Execution::Serial).unwrap();
            for threads in [2, 4, 8] {
                let exec = Execution::parallel(threads).unwrap();
                let par = compress_image_with(&item.image, backend, 75, exec).unwrap();
                let par_out = decompress_image_with(&par, exec).unwrap();
                checked += 1;
                if par != serial || par_out != serial_out || write_dcb(&par) != write_dcb(&serial) {
                    failures.push(format!("{} {backend} threads={threads}", item.label));
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{checked} serial/parallel comparisons, mismatches: {failures:?}"),
    )
}

/// 7. Serial time grows with image size; Loeffler beats the double summation.
fn timing_trend() -> Outcome {
    let start = Instant::now();
    let mut medians = Vec::new();
    for side in [256u32, 512, 1024, 2048] {
        let image = generate_synthetic(Pattern::Radial, side, side).unwrap();
        let label = format!("radial:{side}x{side}");
        let r = run_benchmark(&label, &image, LOEFFLER, Execution::Serial, 75, 3).unwrap();
        medians.push((side, r.wall_ms_median));
    }
    let growing = medians.windows(2).all(|w| w[1].1 >= w[0].1);

    let image = generate_synthetic(Pattern::Radial, 1024, 1024).unwrap();
    let fast = run_benchmark("radial", &image, LOEFFLER, Execution::Serial, 75, 3).unwrap();
    let slow = run_benchmark("radial", &image, NAIVE, Execution::Serial, 75, 3).unwrap();
    let faster = fast.wall_ms_median <= slow.wall_ms_median;

    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let big = generate_synthetic(Pattern::Radial, 2048, 2048).unwrap();
    let serial = run_benchmark("radial", &big, LOEFFLER, Execution::Serial, 75, 3).unwrap();
    let par = run_benchmark(
        "radial",
        &big,
        LOEFFLER,
        Execution::parallel(threads).unwrap(),
        75,
        3,
    )
    .unwrap();
    let speedup = serial.wall_ms_median / par.wall_ms_median;
    let note = if threads >= 4 {
        format!("informative: speedup {speedup:.2}x on {threads} threads (expect >1.5x)")
    } else {
        format!(
            "informative: speedup {speedup:.2}x on {threads} threads (<4 threads, not assessed)"
        )
    };

    let elapsed = start.elapsed();
    let series: Vec<String> = medians
        .iter()
        .map(|(s, m)| format!("{s}²: {m:.2}ms"))
        .collect();
    Outcome::new(
        growing && faster && elapsed < Duration::from_secs(120),
        format!(
            "serial medians [{}] non-decreasing: {growing}; 1024² loeffler {:.2}ms vs naive {:.2}ms; {note}; {elapsed:.2?} (<2min)",
            series.join(", "),
            fast.wall_ms_median,
            slow.wall_ms_median
        ),
    )
}

/// 8. Format round trips and parser robustness.
fn format_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pgm_ok = true;
    let mut dcb_ok = true;
    for _ in 0..200 {
        let (w, h) = (rng.gen_range(1..=48), rng.gen_range(1..=48));
        let pixels: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
        let image = Image::new(w, h, pixels).unwrap();
        pgm_ok &= read_pgm(&write_pgm(&image)).ok() == Some(image.clone());

        let backend = ALL_BACKENDS[rng.gen_range(0..3)];
        let geometry = Geometry::for_size(w, h).unwrap();
        let blocks = (0..geometry.block_count())
            .map(|_| QuantizedBlock(std::array::from_fn(|_| rng.gen())))
            .collect();
        let c = CompressedImage::new(geometry, backend, rng.gen_range(1..=100), blocks).unwrap();
        dcb_ok &= read_dcb(&write_dcb(&c)).ok() == Some(c);
    }

    let fuzz = panic::catch_unwind(AssertUnwindSafe(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let prefixes: [&[u8]; 5] = [b"", b"P5 ", b"P2\n", b"P5 3 2 255\n", b"DCB1"];
        for i in 0..10_000 {
            let len = rng.gen_range(0..96);
            let mut bytes = prefixes[i % prefixes.len()].to_vec();
            bytes.extend((0..len).map(|_| rng.gen::<u8>()));
            let _ = read_pgm(&bytes);
            let _ = read_dcb(&bytes);
        }
    }));

    Outcome::new(
        pgm_ok && dcb_ok && fuzz.is_ok(),
        format!(
            "PGM read∘write identity: {pgm_ok}; DCB read∘write identity: {dcb_ok}; 10k fuzzed buffers without panic: {}",
            fuzz.is_ok()
        ),
    )
}

/// 9. MSE / PSNR definitions.
fn metric_correctness() -> Outcome {
    let white = Image::filled(64, 64, 255).unwrap();
    let off = Image::filled(64, 64, 254).unwrap();
    let value = psnr_db(psnr(&white, &off, Peak::OriginalMax).unwrap().psnr);
    let exact = (value - 48.130_804).abs() <= 1e-4;

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let symmetric = (0..100).all(|_| {
        let a = Image::from_fn(16, 9, |_, _| rng.gen()).unwrap();
        let b = Image::from_fn(16, 9, |_, _| rng.gen()).unwrap();
        mse(&a, &b).unwrap() == mse(&b, &a).unwrap()
    });
    let infinite = psnr(&off, &off, Peak::OriginalMax).unwrap().psnr == Psnr::Infinite;
    Outcome::new(
        exact && symmetric && infinite,
        format!("psnr(255,254) = {value:.6} dB (48.130804±1e-4); mse symmetric: {symmetric}; identical → inf: {infinite}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 CORDIC convergence", cordic_convergence),
        ("3 round-trip quality", roundtrip_quality),
        ("4 backend ordering", backend_ordering),
        ("5 quality monotonicity", quality_monotonicity),
        ("6 determinism gate", determinism_gate),
        ("7 timing trend", timing_trend),
        ("8 format fidelity", format_fidelity),
        ("9 metric correctness", metric_correctness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
