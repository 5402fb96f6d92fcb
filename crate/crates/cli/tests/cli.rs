//! End-to-end checks of the `hexgrid` binary: exit codes, file outputs,
//! and agreement with the library on the same inputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hexgrid_core::{engine, oracle, GridSpec, HexKernel, HexTensor, OffsetCoord, PoolMode};
use hexgrid_cli::formats::{read_hexcsv, write_hexcsv, write_kernel};

fn hexgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexgrid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_input(dir: &Path, name: &str, x: &HexTensor) -> String {
    let path = dir.join(name);
    fs::write(&path, write_hexcsv(x).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn random_image(seed: u64, rows: usize, cols: usize) -> HexTensor {
    use rand::{Rng as _, SeedableRng as _};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let grid = GridSpec::new(rows, cols).unwrap();
    let mut x = HexTensor::zeros(1, 1, grid);
    for v in x.values_mut() {
        *v = rng.gen_range(-2.0..2.0);
    }
    x
}

#[test]
fn identity_kernel_reproduces_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let x = random_image(3, 5, 6);
    let input = write_input(dir.path(), "in.hexcsv", &x);
    let kernel = dir.path().join("id.hexkernel");
    fs::write(
        &kernel,
        write_kernel(&HexKernel::new(0, 1, 1, vec![1.0], None).unwrap()),
    )
    .unwrap();
    let output = dir.path().join("out.hexcsv");

    let out = hexgrid(&[
        "convolve",
        "--input",
        &input,
        "--kernel",
        kernel.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let y = read_hexcsv(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(y.values(), x.values());
}

#[test]
fn debug_kernel_stamps_an_impulse() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::new(7, 7).unwrap();
    let mut x = HexTensor::zeros(1, 1, grid);
    x.set(0, 0, OffsetCoord::new(3, 3), 1.0);
    let input = write_input(dir.path(), "impulse.hexcsv", &x);
    let output = dir.path().join("out.hexcsv");

    let out = hexgrid(&[
        "convolve",
        "--input",
        &input,
        "--kernel",
        "debug:1",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let y = read_hexcsv(&fs::read_to_string(&output).unwrap()).unwrap();
    let ones = y.values().iter().filter(|&&v| v == 1.0).count();
    let zeros = y.values().iter().filter(|&&v| v == 0.0).count();
    assert_eq!(ones, 7);
    assert_eq!(zeros, 49 - 7);
}

#[test]
fn stride_two_output_has_lattice_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let x = random_image(11, 6, 6);
    let input = write_input(dir.path(), "in.hexcsv", &x);
    let output = dir.path().join("out.hexcsv");

    let out = hexgrid(&[
        "convolve",
        "--input",
        &input,
        "--kernel",
        "debug:1",
        "--stride",
        "2",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let y = read_hexcsv(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!((y.rows(), y.cols()), (3, 3));
}

#[test]
fn pool_agrees_with_the_reference_and_avg_keeps_constants() {
    let dir = tempfile::tempdir().unwrap();
    let x = random_image(17, 8, 9);
    let input = write_input(dir.path(), "in.hexcsv", &x);

    for (mode, pm) in [("max", PoolMode::Max), ("avg", PoolMode::Avg)] {
        let output = dir.path().join(format!("{mode}.hexcsv"));
        let out = hexgrid(&[
            "pool", "--input", &input, "--mode", mode, "--size", "1", "--stride", "2",
            "--output",
            output.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let got = read_hexcsv(&fs::read_to_string(&output).unwrap()).unwrap();
        let want = oracle::pool2d(&x, 1, 2, pm).unwrap();
        assert_eq!(got.values(), want.values(), "{mode}");
    }

    let max = read_hexcsv(&fs::read_to_string(dir.path().join("max.hexcsv")).unwrap()).unwrap();
    let avg = read_hexcsv(&fs::read_to_string(dir.path().join("avg.hexcsv")).unwrap()).unwrap();
    for (m, a) in max.values().iter().zip(avg.values()) {
        assert!(m >= a, "max pooling is bounded below by avg: {m} < {a}");
    }

    let grid = GridSpec::new(6, 6).unwrap();
    let constant = HexTensor::from_values(1, 1, grid, vec![0.75; 36]).unwrap();
    let input = write_input(dir.path(), "const.hexcsv", &constant);
    let output = dir.path().join("const_avg.hexcsv");
    let out = hexgrid(&[
        "pool", "--input", &input, "--mode", "avg", "--size", "1", "--stride", "1",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let y = read_hexcsv(&fs::read_to_string(&output).unwrap()).unwrap();
    assert!(y.values().iter().all(|&v| (v - 0.75).abs() < 1e-12));
}

#[test]
fn demo_shapes_writes_symmetric_outputs_matching_convolve() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("demo");
    let out = hexgrid(&["demo-shapes", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let report = fs::read_to_string(out_dir.join("symmetry_report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("shape,max_asymmetry"));
    let mut shapes = 0;
    for line in lines {
        let (_, asym) = line.split_once(',').unwrap();
        assert!(asym.parse::<f64>().unwrap() <= 1e-12, "{line}");
        shapes += 1;
    }
    assert_eq!(shapes, 4);

    for name in ["disc1", "ring2", "disc2", "ring1"] {
        let svg = fs::read_to_string(out_dir.join(format!("{name}_before.svg"))).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 256);

        let before = out_dir.join(format!("{name}_before.hexcsv"));
        let x = read_hexcsv(&fs::read_to_string(&before).unwrap()).unwrap();
        let redone = dir.path().join("redone.hexcsv");
        let out = hexgrid(&[
            "convolve",
            "--input",
            before.to_str().unwrap(),
            "--kernel",
            "debug:1",
            "--output",
            redone.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        let via_cli = fs::read_to_string(&redone).unwrap();
        let direct = fs::read_to_string(out_dir.join(format!("{name}_after.hexcsv"))).unwrap();
        assert_eq!(via_cli, direct, "{name}: demo output equals convolve output");

        let expect = engine::conv2d(&x, &HexKernel::debug(1, 1), 1).unwrap();
        assert_eq!(read_hexcsv(&direct).unwrap().values(), expect.values());
    }
}

#[test]
fn gradcheck_passes_on_a_fixed_seed() {
    let out = hexgrid(&["gradcheck", "--seed", "11"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("check,max_rel_err\n"));
    assert!(stdout.contains("end_to_end,"));
}

#[test]
fn exit_codes_separate_usage_data_and_success() {
    assert_eq!(code(&hexgrid(&["--help"])), 0);
    assert_eq!(code(&hexgrid(&["convolve", "--no-such-flag"])), 1);
    assert_eq!(code(&hexgrid(&["frobnicate"])), 1);

    let missing = hexgrid(&[
        "convolve", "--input", "/no/such/file.hexcsv", "--kernel", "debug:1", "--output",
        "/tmp/x.hexcsv",
    ]);
    assert_eq!(code(&missing), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.hexcsv");
    fs::write(
        &bad,
        "hexcsv v1 rows=1 cols=1 channels=1 parity=odd-high\n#channel 0\n1.0\n",
    )
    .unwrap();
    let out = hexgrid(&[
        "convolve",
        "--input",
        bad.to_str().unwrap(),
        "--kernel",
        "debug:1",
        "--output",
        dir.path().join("y.hexcsv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("parity"), "{stderr}");
}

#[test]
fn convolve_is_deterministic_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let x = random_image(23, 9, 8);
    let input = write_input(dir.path(), "in.hexcsv", &x);
    let mut bytes = Vec::new();
    for name in ["a.hexcsv", "b.hexcsv"] {
        let output = dir.path().join(name);
        let out = hexgrid(&[
            "convolve",
            "--input",
            &input,
            "--kernel",
            "debug:2",
            "--stride",
            "3",
            "--output",
            output.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        bytes.push(fs::read(&output).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}
