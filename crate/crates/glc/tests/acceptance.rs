//! End-to-end acceptance suite. Each test covers one acceptance criterion
//! and prints a single PASS line (visible with `--nocapture`).

mod common;

use std::process::Command;

use glc::coder::{compress, decompress, CdfTable, Container};
use glc::entropy::{DiscreteDistribution, GllmmParams, MixtureComponent};
use glc::error::Error;
use glc::metrics::{
    dists_score, ms_ssim, DistsWeights, FeatureMap, FeatureStack, MsSsimOptions, DEFAULT_K_DI,
    DEFAULT_K_MS,
};
use glc::model::{generate_model, CodecModel, DEFAULT_COMPONENTS};
use glc::rdo::{rate_bits, rd_sweep, synth_latents, SweepMeasurement, DEFAULT_LAMBDAS};
use glc::SymbolAlphabet;

fn glc_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glc"))
}

fn run_ok(args: &[&str]) -> String {
    let out = glc_bin().args(args).output().expect("spawn glc");
    assert!(
        out.status.success(),
        "glc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn run_err(args: &[&str]) -> String {
    let out = glc_bin().args(args).output().expect("spawn glc");
    assert!(!out.status.success(), "glc {args:?} unexpectedly succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn a01_discretization_matches_adaptive_quadrature() {
    let alphabet = SymbolAlphabet::new(-8, 8).unwrap();
    // 1,000 randomized valid parameter sets in one deterministic batch.
    let model = generate_model(1000, DEFAULT_COMPONENTS, 0, 2024).unwrap();
    assert!(model.validate().is_valid());
    for params in &model.gllmm {
        let probs = params.bin_probs(alphabet).unwrap();
        let sum: f64 = probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-6, "alphabet mass {sum}");
        for k in (alphabet.min() + 1)..alphabet.max() {
            let direct = params.bin_prob(k, alphabet).unwrap();
            let quad = common::bin_prob_by_quadrature(params, k, 1e-12);
            assert!(
                (direct - quad).abs() < 1e-9,
                "bin {k}: closed-form {direct} vs quadrature {quad}"
            );
        }
    }
    println!("ACCEPTANCE [ 1/10] discretized mixture vs adaptive quadrature (1000 param sets): PASS");
}

#[test]
fn a02_single_family_reductions_match_closed_forms() {
    let alphabet = SymbolAlphabet::new(-32, 32).unwrap();
    let one = |mean: f64, scale: f64| {
        vec![MixtureComponent {
            weight: 1.0,
            mean,
            scale,
        }]
    };
    // pure Gaussian: interior bin mass is the erf difference
    let mean = 0.4;
    let var = 1.7;
    let gauss = GllmmParams {
        family_weights: [1.0, 0.0, 0.0],
        gaussian: one(mean, var),
        laplace: one(0.0, 1.0),
        logistic: one(0.0, 1.0),
    };
    for k in -5..=5 {
        let phi = |x: f64| 0.5 * (1.0 + statrs::function::erf::erf((x - mean) / (2.0 * var).sqrt()));
        let expected = phi(k as f64 + 0.5) - phi(k as f64 - 0.5);
        let got = gauss.bin_prob(k, alphabet).unwrap();
        assert!((got - expected).abs() < 1e-12, "gaussian bin {k}");
    }
    // pure Laplace
    let b = 0.9;
    let lap = GllmmParams {
        family_weights: [0.0, 1.0, 0.0],
        gaussian: one(0.0, 1.0),
        laplace: one(-0.3, b),
        logistic: one(0.0, 1.0),
    };
    for k in -5..=5 {
        let cdf = |x: f64| {
            let t = (x + 0.3) / b;
            if t < 0.0 {
                0.5 * t.exp()
            } else {
                1.0 - 0.5 * (-t).exp()
            }
        };
        let expected = cdf(k as f64 + 0.5) - cdf(k as f64 - 0.5);
        let got = lap.bin_prob(k, alphabet).unwrap();
        assert!((got - expected).abs() < 1e-12, "laplace bin {k}");
    }
    // pure Logistic
    let s = 1.2;
    let logi = GllmmParams {
        family_weights: [0.0, 0.0, 1.0],
        gaussian: one(0.0, 1.0),
        laplace: one(0.0, 1.0),
        logistic: one(0.5, s),
    };
    for k in -5..=5 {
        let cdf = |x: f64| 1.0 / (1.0 + (-(x - 0.5) / s).exp());
        let expected = cdf(k as f64 + 0.5) - cdf(k as f64 - 0.5);
        let got = logi.bin_prob(k, alphabet).unwrap();
        assert!((got - expected).abs() < 1e-12, "logistic bin {k}");
    }
    println!("ACCEPTANCE [ 2/10] single-family reductions vs closed forms (1e-12): PASS");
}

#[test]
fn a03_thousand_random_roundtrips_are_lossless() {
    for i in 0..1000u64 {
        let channels = 1 + (i % 4) as usize;
        let hyper_channels = (i % 3) as usize;
        let model = generate_model(channels, DEFAULT_COMPONENTS, hyper_channels, i).unwrap();
        let alphabet = SymbolAlphabet::new(-8 - (i % 5) as i32, 8 + (i % 7) as i32).unwrap();
        let shape = (channels as u16, 3 + (i % 6) as u32, 3 + (i % 9) as u32);
        let y = synth_latents(&model.main_distributions(alphabet).unwrap(), shape, i).unwrap();
        let z = if hyper_channels > 0 {
            Some(
                synth_latents(
                    &model.hyper_distributions(alphabet).unwrap(),
                    glc::coder::hyper_shape(&model, shape),
                    i + 1,
                )
                .unwrap(),
            )
        } else {
            None
        };
        let precision = 8 + (i % 9) as u8;
        let container = compress(&y, z.as_ref(), &model, precision).unwrap();
        let bytes = container.to_bytes();
        let parsed = Container::from_bytes(&bytes).unwrap();
        let (y2, z2) = decompress(&parsed, &model, precision).unwrap();
        assert_eq!(y, y2, "main latent mismatch at iteration {i}");
        assert_eq!(z, z2, "hyper latent mismatch at iteration {i}");
    }
    println!("ACCEPTANCE [ 3/10] 1000 randomized round-trips, zero failures: PASS");
}

#[test]
fn a04_rate_is_near_optimal_on_1e5_symbols() {
    let model = generate_model(1, DEFAULT_COMPONENTS, 0, 99).unwrap();
    let alphabet = SymbolAlphabet::new(-32, 31).unwrap();
    let dist = &model.main_distributions(alphabet).unwrap()[0];
    let table = CdfTable::build(dist, 16).unwrap();
    let y = synth_latents(std::slice::from_ref(dist), (1, 250, 400), 5).unwrap();
    assert_eq!(y.len(), 100_000);

    let shannon_fixed: f64 = y
        .values()
        .iter()
        .map(|&v| table.bits(alphabet.index_of(v as i32).unwrap()))
        .sum();
    let container = compress(&y, None, &model, 16).unwrap();
    let actual = container.payload_bits() as f64;
    let overhead = actual - shannon_fixed;
    assert!(
        overhead <= 64.0,
        "payload exceeds fixed-point Shannon sum by {overhead} bits"
    );

    let estimate = rate_bits(&y, std::slice::from_ref(dist)).unwrap();
    let slack = 0.01 * estimate + 64.0;
    assert!(
        (actual - estimate).abs() <= slack,
        "estimate {estimate} vs actual {actual} beyond {slack}"
    );
    println!(
        "ACCEPTANCE [ 4/10] coder overhead {overhead:.2} bits <= 64 on 1e5 symbols, \
         estimate within 1%: PASS"
    );
}

#[test]
fn a05_sampling_matches_model_within_3_standard_errors() {
    let model = generate_model(1, DEFAULT_COMPONENTS, 0, 31).unwrap();
    let alphabet = SymbolAlphabet::new(-16, 16).unwrap();
    let dist = &model.main_distributions(alphabet).unwrap()[0];
    let n = 1_000_000usize;
    let y = synth_latents(std::slice::from_ref(dist), (1, 1000, 1000), 7).unwrap();
    let mut counts = vec![0u64; alphabet.span()];
    for &v in y.values() {
        counts[alphabet.index_of(v as i32).unwrap()] += 1;
    }
    let mut checked = 0;
    for (i, p) in dist.probs().iter().enumerate() {
        if *p < 1e-3 {
            continue;
        }
        checked += 1;
        let freq = counts[i] as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (freq - p).abs() <= 3.0 * se,
            "bin {i}: empirical {freq} vs model {p} (se {se})"
        );
    }
    assert!(checked >= 10, "too few significant bins ({checked})");
    println!(
        "ACCEPTANCE [ 5/10] 1e6-sample frequencies within 3 SE on {checked} bins: PASS"
    );
}

#[test]
fn a06_msssim_identity_reference_and_monotonicity() {
    let opts = MsSsimOptions::default();
    let base = common::random_image(256, 256, 11);
    let s = ms_ssim(&base, &base, opts).unwrap();
    assert!((s - 1.0).abs() < 1e-9, "identity score {s}");

    for i in 0..20u64 {
        let a = common::random_image(256, 256, 1000 + i);
        let b = if i % 2 == 0 {
            common::add_noise(&a, 2 + (i % 9) as i32, 5000 + i)
        } else {
            common::random_image(256, 256, 9000 + i)
        };
        let fast = ms_ssim(&a, &b, opts).unwrap();
        let dense = common::ms_ssim_reference(&a, &b);
        assert!(
            (fast - dense).abs() < 1e-6,
            "pair {i}: separable {fast} vs dense {dense}"
        );
    }

    let mut prev = 1.0;
    for spread in [2, 8, 20, 40] {
        let noisy = common::add_noise(&base, spread, 77);
        let score = ms_ssim(&base, &noisy, opts).unwrap();
        assert!(score < prev, "no degradation at spread {spread}");
        prev = score;
    }
    println!(
        "ACCEPTANCE [ 6/10] MS-SSIM identity, dense-reference agreement (1e-6, 20 pairs), \
         noise monotonicity: PASS"
    );
}

#[test]
fn a07_dists_identity_hand_case_and_weight_invariant() {
    let stack = |data: Vec<f64>| FeatureStack {
        stages: vec![FeatureMap {
            channels: 1,
            height: 2,
            width: 2,
            data,
        }],
    };
    let f = stack(vec![0.3, 1.2, -0.5, 2.0]);
    let w = DistsWeights::uniform(&f);
    let d = dists_score(&f, &f, &w).unwrap();
    assert!(d.abs() < 1e-9, "identity score {d}");

    // x = [1,2,3,4], y = [1,2,3,5]; population moments by hand.
    let fx = stack(vec![1.0, 2.0, 3.0, 4.0]);
    let fy = stack(vec![1.0, 2.0, 3.0, 5.0]);
    let w = DistsWeights {
        alpha: vec![vec![0.4]],
        beta: vec![vec![0.6]],
    };
    let (c1, c2) = (1e-6, 1e-6);
    let texture = (2.0 * 2.5 * 2.75 + c1) / (2.5 * 2.5 + 2.75 * 2.75 + c1);
    let structure = (2.0 * 1.625 + c2) / (1.25 + 2.1875 + c2);
    let expected = 1.0 - (0.4 * texture + 0.6 * structure);
    let got = dists_score(&fx, &fy, &w).unwrap();
    assert!((got - expected).abs() < 1e-12, "hand case {got} vs {expected}");

    let bad = DistsWeights {
        alpha: vec![vec![0.4]],
        beta: vec![vec![0.7]],
    };
    assert!(dists_score(&fx, &fy, &bad).is_err());
    println!(
        "ACCEPTANCE [ 7/10] DISTS identity, hand-computed 2x2 (1e-12), weight invariant: PASS"
    );
}

#[test]
fn a08_default_constants_and_three_rows_per_input() {
    assert_eq!(DEFAULT_LAMBDAS, [2.0, 1.0, 0.5]);
    assert_eq!(DEFAULT_K_MS, 23.90625);
    assert_eq!(DEFAULT_K_MS, 765.0 * 2f64.powi(-5));
    assert_eq!(DEFAULT_K_DI, 1.0);
    assert_eq!(DEFAULT_COMPONENTS, (3, 3, 3));

    let m = |id: &str| SweepMeasurement {
        input_id: id.into(),
        total_bits: 4096.0,
        width: 64,
        height: 64,
        ms_ssim: 0.97,
        dists: 0.1,
        status: "ok".into(),
    };
    let report = rd_sweep(&[m("a"), m("b")], &DEFAULT_LAMBDAS, DEFAULT_K_MS, DEFAULT_K_DI).unwrap();
    assert_eq!(report.rows.len(), 6);

    // and through the CLI with its defaults
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.glmp");
    let manifest = dir.path().join("manifest.txt");
    let csv = dir.path().join("report.csv");
    run_ok(&[
        "gen-model",
        "--channels",
        "2",
        "--seed",
        "3",
        "--output",
        model.to_str().unwrap(),
    ]);
    std::fs::write(&manifest, "img1,synth:2x16x16:1\nimg2,synth:2x16x16:2\n").unwrap();
    run_ok(&[
        "rd-report",
        "--manifest",
        manifest.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6, "expected 3 rows per input:\n{text}");
    for id in ["img1", "img2"] {
        let lambdas: Vec<&str> = rows
            .iter()
            .filter(|r| r.starts_with(&format!("{id},")))
            .map(|r| r.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(lambdas, ["2.00000000", "1.00000000", "0.500000000"]);
    }
    println!(
        "ACCEPTANCE [ 8/10] defaults lambda {{2,1,0.5}}, k_ms 23.90625, k_di 1, K=M=N=3, \
         3 rows per input: PASS"
    );
}

#[test]
fn a09_cli_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let s = |path: &std::path::PathBuf| path.to_str().unwrap().to_owned();

    for name in ["m1.glmp", "m2.glmp"] {
        run_ok(&[
            "gen-model",
            "--channels",
            "3",
            "--z-channels",
            "2",
            "--seed",
            "17",
            "--output",
            &s(&p(name)),
        ]);
    }
    let m1 = std::fs::read(p("m1.glmp")).unwrap();
    let m2 = std::fs::read(p("m2.glmp")).unwrap();
    assert_eq!(m1, m2, "gen-model is not deterministic");

    for name in ["c1.glc", "c2.glc"] {
        run_ok(&[
            "compress",
            "--model",
            &s(&p("m1.glmp")),
            "--synthetic",
            "3x24x24",
            "--seed",
            "5",
            "--output",
            &s(&p(name)),
        ]);
    }
    let c1 = std::fs::read(p("c1.glc")).unwrap();
    let c2 = std::fs::read(p("c2.glc")).unwrap();
    assert_eq!(c1, c2, "compress is not deterministic");

    let manifest = p("manifest.txt");
    std::fs::write(&manifest, "a,synth:3x16x16:4\n").unwrap();
    for name in ["r1.csv", "r2.csv"] {
        run_ok(&[
            "rd-report",
            "--manifest",
            &s(&manifest),
            "--model",
            &s(&p("m1.glmp")),
            "--output",
            &s(&p(name)),
        ]);
    }
    let r1 = std::fs::read(p("r1.csv")).unwrap();
    let r2 = std::fs::read(p("r2.csv")).unwrap();
    assert_eq!(r1, r2, "rd-report is not deterministic");
    println!(
        "ACCEPTANCE [ 9/10] containers, model files and CSVs byte-identical across runs: PASS"
    );
}

#[test]
fn a10_corruption_and_invalid_inputs_fail_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let s = |path: &std::path::PathBuf| path.to_str().unwrap().to_owned();

    run_ok(&[
        "gen-model",
        "--channels",
        "2",
        "--seed",
        "1",
        "--output",
        &s(&p("m.glmp")),
    ]);
    run_ok(&[
        "compress",
        "--model",
        &s(&p("m.glmp")),
        "--synthetic",
        "2x16x16",
        "--seed",
        "2",
        "--output",
        &s(&p("ok.glc")),
    ]);

    // truncated container
    let bytes = std::fs::read(p("ok.glc")).unwrap();
    std::fs::write(p("trunc.glc"), &bytes[..bytes.len() - 5]).unwrap();
    let err = run_err(&[
        "decompress",
        "--input",
        &s(&p("trunc.glc")),
        "--model",
        &s(&p("m.glmp")),
        "--output",
        &s(&p("out.gltn")),
    ]);
    assert!(err.contains("corrupt stream"), "stderr: {err}");
    assert!(err.contains("truncated"), "stderr: {err}");

    // checksum-corrupted header
    let mut corrupt = bytes.clone();
    corrupt[10] ^= 0x40;
    std::fs::write(p("bad.glc"), &corrupt).unwrap();
    let err = run_err(&[
        "decompress",
        "--input",
        &s(&p("bad.glc")),
        "--model",
        &s(&p("m.glmp")),
        "--output",
        &s(&p("out.gltn")),
    ]);
    assert!(err.contains("checksum"), "stderr: {err}");
    assert!(matches!(
        Container::from_bytes(&corrupt),
        Err(Error::Corruption(_))
    ));

    // invalid parameter file: family weights no longer sum to 1
    let mut model = CodecModel::load(&p("m.glmp")).unwrap();
    model.gllmm[0].family_weights[0] += 0.5;
    model.save(&p("invalid.glmp")).unwrap();
    let err = run_err(&["validate", "--model", &s(&p("invalid.glmp"))]);
    assert!(err.contains("violation"), "stderr: {err}");
    assert!(err.contains("sum to 1"), "stderr: {err}");
    let err = run_err(&[
        "compress",
        "--model",
        &s(&p("invalid.glmp")),
        "--synthetic",
        "2x8x8",
        "--output",
        &s(&p("never.glc")),
    ]);
    assert!(err.contains("model validation failed"), "stderr: {err}");

    // truncated model file
    let mbytes = std::fs::read(p("m.glmp")).unwrap();
    std::fs::write(p("trunc.glmp"), &mbytes[..mbytes.len() - 7]).unwrap();
    let err = run_err(&["validate", "--model", &s(&p("trunc.glmp"))]);
    assert!(err.contains("truncated"), "stderr: {err}");
    println!(
        "ACCEPTANCE [10/10] truncation, checksum damage and invalid models all fail \
         with diagnostics and nonzero exit: PASS"
    );
}
