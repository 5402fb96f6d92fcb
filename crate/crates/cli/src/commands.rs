//! Subcommand bodies for everything except the training experiment.

use std::fs;
use std::path::Path;
use std::time::Instant;

use hexgrid_core::{engine, oracle, GridSpec, HexKernel, HexTensor, OffsetCoord, PoolMode};
use hexgrid_datagen::ShapeClass;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::formats::{read_hexcsv, read_kernel, write_atomic, write_hexcsv};
use crate::svg::hex_image_svg;

pub const GRADCHECK_TOL: f64 = 1e-4;
pub const SYMMETRY_TOL: f64 = 1e-12;

fn read_hex_file(path: &Path) -> Result<HexTensor, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    read_hexcsv(&text)
}

/// Resolves `--kernel`: either a kernel file path or `debug:<n>` for the
/// all-ones kernel of size n matched to the input's channel count.
fn resolve_kernel(spec: &str, in_channels: usize) -> Result<HexKernel, CliError> {
    if let Some(rest) = spec.strip_prefix("debug:") {
        let n: u32 = rest
            .parse()
            .map_err(|_| CliError::Usage(format!("bad debug kernel size {rest:?}")))?;
        return Ok(HexKernel::debug(n, in_channels));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| CliError::Data(format!("cannot read kernel {spec}: {e}")))?;
    read_kernel(&text)
}

pub fn convolve(input: &Path, kernel: &str, stride: usize, output: &Path) -> Result<(), CliError> {
    let x = read_hex_file(input)?;
    let k = resolve_kernel(kernel, x.channels())?;
    let y = engine::conv2d(&x, &k, stride)?;
    write_atomic(output, &write_hexcsv(&y)?)
}

pub fn pool(
    input: &Path,
    mode: PoolMode,
    size: u32,
    stride: usize,
    output: &Path,
) -> Result<(), CliError> {
    let x = read_hex_file(input)?;
    let y = engine::pool2d(&x, size, stride, mode)?;
    write_atomic(output, &write_hexcsv(&y)?)
}

fn shape_name(class: ShapeClass) -> &'static str {
    match class {
        ShapeClass::DiscOne => "disc1",
        ShapeClass::RingTwo => "ring2",
        ShapeClass::DiscTwo => "disc2",
        ShapeClass::RingOne => "ring1",
    }
}

/// Largest |v(p) - v(rot60(p))| over cells whose rotated partner stays
/// in-grid; zero for a perfectly 6-fold-symmetric image around `center`.
pub fn max_asymmetry(x: &HexTensor, center: OffsetCoord) -> f64 {
    let grid = x.grid();
    let c = center.to_axial();
    let mut worst = 0.0f64;
    for p in grid.iter() {
        let q = p.to_axial().rotate60_about(c).to_offset();
        if grid.contains(q) {
            worst = worst.max((x.get(0, 0, p) - x.get(0, 0, q)).abs());
        }
    }
    worst
}

/// Stamps each shape class at the center of a 16x16 grid, convolves it with
/// the all-ones size-1 kernel, and writes before/after images (SVG and
/// hexcsv) plus a symmetry report.
pub fn demo_shapes(out: &Path) -> Result<(), CliError> {
    let grid = GridSpec::new(16, 16)?;
    let center = OffsetCoord::new(8, 8);
    let kernel = HexKernel::debug(1, 1);
    fs::create_dir_all(out)?;

    let mut report = String::from("shape,max_asymmetry\n");
    let mut worst = 0.0f64;
    for class in ShapeClass::ALL {
        let name = shape_name(class);
        let mut before = HexTensor::zeros(1, 1, grid);
        for p in class.cells(center) {
            before.set(0, 0, p, 1.0);
        }
        let after = engine::conv2d(&before, &kernel, 1)?;
        let asym = max_asymmetry(&after, center);
        worst = worst.max(asym);
        report.push_str(&format!("{name},{asym:.3e}\n"));

        write_atomic(&out.join(format!("{name}_before.svg")), &hex_image_svg(&before, 0, 0))?;
        write_atomic(&out.join(format!("{name}_after.svg")), &hex_image_svg(&after, 0, 0))?;
        write_atomic(&out.join(format!("{name}_before.hexcsv")), &write_hexcsv(&before)?)?;
        write_atomic(&out.join(format!("{name}_after.hexcsv")), &write_hexcsv(&after)?)?;
    }
    write_atomic(&out.join("symmetry_report.csv"), &report)?;
    println!("wrote {} shapes to {}; max asymmetry {worst:.3e}", ShapeClass::ALL.len(), out.display());
    if worst > SYMMETRY_TOL {
        return Err(CliError::Check(format!(
            "symmetry broken: max asymmetry {worst:.3e} > {SYMMETRY_TOL:.0e}"
        )));
    }
    Ok(())
}

/// Runs the finite-difference suite and prints one CSV row per check.
pub fn gradcheck(seed: u64) -> Result<(), CliError> {
    let mut worst = 0.0f64;
    println!("check,max_rel_err");
    for (name, err) in hexgrid_nn::gradcheck::layer_reports(seed) {
        println!("{name},{err:.3e}");
        worst = worst.max(err);
    }
    let e2e = hexgrid_nn::gradcheck::end_to_end(seed)?;
    println!("end_to_end,{e2e:.3e}");
    worst = worst.max(e2e);
    println!("max,{worst:.3e}");
    if worst > GRADCHECK_TOL {
        return Err(CliError::Check(format!(
            "worst relative error {worst:.3e} > {GRADCHECK_TOL:.0e}"
        )));
    }
    Ok(())
}

fn random_tensor(rng: &mut ChaCha8Rng, channels: usize, grid: GridSpec) -> HexTensor {
    let mut x = HexTensor::zeros(1, channels, grid);
    for v in x.values_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    x
}

fn time_call<F: FnMut()>(mut f: F) -> f64 {
    let t0 = Instant::now();
    f();
    let once = t0.elapsed().as_secs_f64();
    let reps = ((0.005 / once.max(1e-9)) as usize).clamp(1, 400);
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let t0 = Instant::now();
        for _ in 0..reps {
            f();
        }
        best = best.min(t0.elapsed().as_secs_f64() / reps as f64);
    }
    best
}

/// Times the decomposed engine against the brute-force reference over a
/// size sweep and prints one CSV row per (size, n, stride) combination.
pub fn bench(seed: u64) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channels = 4;
    println!("size,n,stride,engine_ms,oracle_ms,speedup");
    for side in [16usize, 32, 64] {
        let grid = GridSpec::new(side, side)?;
        let x = random_tensor(&mut rng, channels, grid);
        for n in [1u32, 2] {
            let layout = hexgrid_core::KernelLayout::new(n);
            let count = channels * channels * layout.element_count();
            let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let k = HexKernel::new(n, channels, channels, weights, None)?;
            for s in [1usize, 2] {
                let ye = engine::conv2d(&x, &k, s)?;
                let yo = oracle::conv2d(&x, &k, s)?;
                let diff = ye
                    .values()
                    .iter()
                    .zip(yo.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                if diff > 1e-10 {
                    return Err(CliError::Check(format!(
                        "engine and reference disagree by {diff:.3e} at size {side}, n {n}, stride {s}"
                    )));
                }
                let te = time_call(|| {
                    engine::conv2d(&x, &k, s).expect("validated above");
                });
                let to = time_call(|| {
                    oracle::conv2d(&x, &k, s).expect("validated above");
                });
                println!(
                    "{side},{n},{s},{:.4},{:.4},{:.2}",
                    te * 1e3,
                    to * 1e3,
                    to / te
                );
            }
        }
    }
    Ok(())
}
