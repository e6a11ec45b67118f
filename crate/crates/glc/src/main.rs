use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use glc::coder::{compress, decompress, hyper_shape, Container, DEFAULT_PRECISION_BITS};
use glc::entropy::DiscreteDistribution;
use glc::error::{Error, Result};
use glc::latent::LatentTensor;
use glc::metrics::{
    combined_distortion, dists_score, load_feature_file, ms_ssim, ImageRaster, MsSsimOptions,
    DEFAULT_K_DI, DEFAULT_K_MS,
};
use glc::model::{generate_model, CodecModel, DEFAULT_COMPONENTS};
use glc::rdo::{format_sig9, rate_bits, rd_sweep, synth_latents, SweepMeasurement};
use glc::SymbolAlphabet;

#[derive(Parser)]
#[command(name = "glc", version, about = "GLLMM latent codec tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy-code a latent tensor into a GLC1 container.
    Compress(CompressArgs),
    /// Decode a GLC1 container back into latent tensors.
    Decompress(DecompressArgs),
    /// Compare two images (and optional feature stacks).
    Metrics(MetricsArgs),
    /// Run a lambda sweep over a manifest of inputs and emit CSV.
    RdReport(RdReportArgs),
    /// Generate a random valid GLMP model file.
    GenModel(GenModelArgs),
    /// Validate a model file and report every violated invariant.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    model: PathBuf,
    /// Latent tensor file (GLTN). Mutually exclusive with --synthetic.
    #[arg(long, conflicts_with = "synthetic")]
    input: Option<PathBuf>,
    /// Optional hyper-latent tensor file (GLTN).
    #[arg(long)]
    hyper_input: Option<PathBuf>,
    /// Generate synthetic latents of shape CxHxW instead of reading a file.
    #[arg(long, value_name = "CxHxW")]
    synthetic: Option<String>,
    /// Seed for synthetic generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Alphabet for synthetic latents, as "min,max".
    #[arg(long, default_value = "-32,31")]
    alphabet: String,
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
    precision: u8,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct DecompressArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Where to write the hyper latent, when the container carries one.
    #[arg(long)]
    hyper_output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
    precision: u8,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    distorted: PathBuf,
    /// DFTR feature file for the reference image.
    #[arg(long)]
    features_ref: Option<PathBuf>,
    /// DFTR feature file for the distorted image.
    #[arg(long)]
    features_dist: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_K_MS)]
    k_ms: f64,
    #[arg(long, default_value_t = DEFAULT_K_DI)]
    k_di: f64,
    /// Reduce the MS-SSIM scale count for undersized images instead of
    /// failing.
    #[arg(long)]
    allow_scale_reduction: bool,
}

#[derive(Args)]
struct RdReportArgs {
    /// Manifest: one input per line,
    /// `id,latent,hyper,ref,dist,features_ref,features_dist`
    /// where latent/hyper are GLTN paths or `synth:CxHxW:SEED` and `-`
    /// marks an absent field.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated lambda list.
    #[arg(long, default_value = "2,1,0.5")]
    lambda: String,
    #[arg(long, default_value_t = DEFAULT_K_MS)]
    k_ms: f64,
    #[arg(long, default_value_t = DEFAULT_K_DI)]
    k_di: f64,
    /// Alphabet for synthetic latents, as "min,max".
    #[arg(long, default_value = "-32,31")]
    alphabet: String,
    #[arg(long)]
    allow_scale_reduction: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct GenModelArgs {
    #[arg(long)]
    channels: usize,
    /// Component counts per family, as "K,M,N".
    #[arg(long, default_value = "3,3,3")]
    components: String,
    /// Hyper-latent channel count; defaults to --channels.
    #[arg(long)]
    z_channels: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Also write the textual dump of the model.
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compress(args) => cmd_compress(args),
        Command::Decompress(args) => cmd_decompress(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::RdReport(args) => cmd_rd_report(args),
        Command::GenModel(args) => cmd_gen_model(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn parse_alphabet(spec: &str) -> Result<SymbolAlphabet> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parameter(format!(
            "alphabet must be \"min,max\", got {spec}"
        )));
    }
    let min = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("bad alphabet min {}", parts[0])))?;
    let max = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("bad alphabet max {}", parts[1])))?;
    SymbolAlphabet::new(min, max)
}

fn parse_shape(spec: &str) -> Result<(u16, u32, u32)> {
    let parts: Vec<&str> = spec.split('x').collect();
    if parts.len() != 3 {
        return Err(Error::Parameter(format!(
            "shape must be CxHxW, got {spec}"
        )));
    }
    let parse = |s: &str| -> Result<u32> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad shape component {s}")))
    };
    Ok((parse(parts[0])? as u16, parse(parts[1])?, parse(parts[2])?))
}

fn parse_lambdas(spec: &str) -> Result<Vec<f64>> {
    let lambdas: Vec<f64> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad lambda {s}")))
        })
        .collect::<Result<_>>()?;
    for l in &lambdas {
        if !(*l > 0.0) {
            return Err(Error::Parameter(format!("lambda must be positive, got {l}")));
        }
    }
    Ok(lambdas)
}

fn load_valid_model(path: &Path) -> Result<CodecModel> {
    let model = CodecModel::load(path)?;
    let report = model.validate();
    if !report.is_valid() {
        let first = &report.violations()[0];
        return Err(Error::Validation(format!(
            "{} ({} violation(s) total): {}",
            first.location,
            report.violations().len(),
            first.message
        )));
    }
    Ok(model)
}

fn cmd_compress(args: CompressArgs) -> Result<()> {
    let model = load_valid_model(&args.model)?;
    let (main, hyper) = match (&args.input, &args.synthetic) {
        (Some(path), None) => {
            let main = LatentTensor::load(path)?;
            let hyper = args
                .hyper_input
                .as_deref()
                .map(LatentTensor::load)
                .transpose()?;
            (main, hyper)
        }
        (None, Some(spec)) => {
            let shape = parse_shape(spec)?;
            let alphabet = parse_alphabet(&args.alphabet)?;
            let main = synth_latents(&model.main_distributions(alphabet)?, shape, args.seed)?;
            let hyper = if model.hyper_channels() > 0 {
                Some(synth_latents(
                    &model.hyper_distributions(alphabet)?,
                    hyper_shape(&model, shape),
                    args.seed.wrapping_add(1),
                )?)
            } else {
                None
            };
            (main, hyper)
        }
        _ => {
            return Err(Error::Input(
                "exactly one of --input or --synthetic is required".into(),
            ))
        }
    };

    let estimated = estimate_bits(&model, &main, hyper.as_ref())?;
    let container = compress(&main, hyper.as_ref(), &model, args.precision)?;
    container.save(&args.output)?;
    let actual = container.payload_bits() as f64;
    println!(
        "estimated_bits={} actual_bits={} bpp={}",
        format_sig9(estimated),
        format_sig9(actual),
        format_sig9(actual / (main.height().max(1) as f64 * main.width().max(1) as f64)),
    );
    Ok(())
}

fn estimate_bits(
    model: &CodecModel,
    main: &LatentTensor,
    hyper: Option<&LatentTensor>,
) -> Result<f64> {
    let mut bits = rate_bits(main, &model.main_distributions(main.alphabet())?)?;
    if let Some(z) = hyper {
        bits += rate_bits(z, &model.hyper_distributions(z.alphabet())?)?;
    }
    Ok(bits)
}

fn cmd_decompress(args: DecompressArgs) -> Result<()> {
    let model = load_valid_model(&args.model)?;
    let container = Container::load(&args.input)?;
    let (main, hyper) = decompress(&container, &model, args.precision)?;
    main.save(&args.output)?;
    match (hyper, &args.hyper_output) {
        (Some(z), Some(path)) => z.save(path)?,
        (None, Some(_)) => {
            return Err(Error::Input(
                "--hyper-output given but the container has no hyper latent".into(),
            ))
        }
        _ => {}
    }
    println!(
        "symbols={} payload_bits={}",
        main.len(),
        container.payload_bits()
    );
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let reference = ImageRaster::load(&args.reference)?;
    let distorted = ImageRaster::load(&args.distorted)?;
    let opts = MsSsimOptions {
        allow_scale_reduction: args.allow_scale_reduction,
    };
    let score = ms_ssim(&reference, &distorted, opts)?;
    let loss = 1.0 - score;

    let dists = match (&args.features_ref, &args.features_dist) {
        (Some(fr), Some(fd)) => {
            let (stack_ref, weights) = load_feature_file(fr)?;
            let (stack_dist, _) = load_feature_file(fd)?;
            Some(dists_score(&stack_ref, &stack_dist, &weights)?)
        }
        (None, None) => None,
        _ => {
            return Err(Error::Input(
                "--features-ref and --features-dist must be given together".into(),
            ))
        }
    };

    match dists {
        Some(d) => {
            let combined = combined_distortion(loss, d, args.k_ms, args.k_di)?;
            println!(
                "ms_ssim={} ms_ssim_loss={} dists={} combined={} k_ms={} k_di={}",
                format_sig9(score),
                format_sig9(loss),
                format_sig9(d),
                format_sig9(combined),
                format_sig9(args.k_ms),
                format_sig9(args.k_di),
            );
        }
        None => {
            let combined = combined_distortion(loss, 0.0, args.k_ms, 0.0)?;
            println!(
                "ms_ssim={} ms_ssim_loss={} dists=absent combined={} k_ms={} k_di=omitted",
                format_sig9(score),
                format_sig9(loss),
                format_sig9(combined),
                format_sig9(args.k_ms),
            );
        }
    }
    Ok(())
}

/// One parsed manifest line.
struct ManifestEntry {
    id: String,
    latent: String,
    hyper: String,
    reference: String,
    distorted: String,
    features_ref: String,
    features_dist: String,
}

fn parse_manifest(text: &str) -> Vec<ManifestEntry> {
    let mut entries = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        fields.resize(7, String::from("-"));
        entries.push(ManifestEntry {
            id: fields[0].clone(),
            latent: fields[1].clone(),
            hyper: fields[2].clone(),
            reference: fields[3].clone(),
            distorted: fields[4].clone(),
            features_ref: fields[5].clone(),
            features_dist: fields[6].clone(),
        });
    }
    entries
}

fn load_latent_field(
    field: &str,
    dists: &[DiscreteDistribution],
    alphabet_spec: &str,
) -> Result<Option<LatentTensor>> {
    if field == "-" || field.is_empty() {
        return Ok(None);
    }
    if let Some(spec) = field.strip_prefix("synth:") {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 2 {
            return Err(Error::Input(format!(
                "synthetic spec must be synth:CxHxW:SEED, got {field}"
            )));
        }
        let shape = parse_shape(parts[0])?;
        let seed: u64 = parts[1]
            .parse()
            .map_err(|_| Error::Input(format!("bad seed in {field}")))?;
        let _ = parse_alphabet(alphabet_spec)?;
        return Ok(Some(synth_latents(dists, shape, seed)?));
    }
    Ok(Some(LatentTensor::load(Path::new(field))?))
}

fn error_tag(e: &Error) -> String {
    let class = match e {
        Error::Io(_) => "io",
        Error::Parameter(_) => "parameter",
        Error::OutOfAlphabet { .. } => "alphabet",
        Error::UnknownChannel(_) => "channel",
        Error::Capacity { .. } => "capacity",
        Error::Input(_) => "input",
        Error::Shape(_) => "shape",
        Error::Corruption(_) => "corruption",
        Error::Format(_) => "format",
        Error::Validation(_) => "validation",
    };
    format!("error:{class}")
}

fn measure_entry(
    entry: &ManifestEntry,
    model: &CodecModel,
    alphabet_spec: &str,
    opts: MsSsimOptions,
) -> Result<SweepMeasurement> {
    let alphabet = parse_alphabet(alphabet_spec)?;
    let main_dists = model.main_distributions(alphabet)?;
    let main = load_latent_field(&entry.latent, &main_dists, alphabet_spec)?
        .ok_or_else(|| Error::Input(format!("input {} has no latent", entry.id)))?;
    let mut bits = rate_bits(&main, &model.main_distributions(main.alphabet())?)?;
    let hyper_dists = model.hyper_distributions(alphabet)?;
    if let Some(z) = load_latent_field(&entry.hyper, &hyper_dists, alphabet_spec)? {
        bits += rate_bits(&z, &model.hyper_distributions(z.alphabet())?)?;
    }

    let (ms, width, height) = if entry.reference != "-" && entry.distorted != "-" {
        let reference = ImageRaster::load(Path::new(&entry.reference))?;
        let distorted = ImageRaster::load(Path::new(&entry.distorted))?;
        let score = ms_ssim(&reference, &distorted, opts)?;
        (score, reference.width() as u32, reference.height() as u32)
    } else {
        // Rate-only entry: neutral distortion, bpp over the latent grid.
        (1.0, main.width().max(1), main.height().max(1))
    };

    let dists = if entry.features_ref != "-" && entry.features_dist != "-" {
        let (stack_ref, weights) = load_feature_file(Path::new(&entry.features_ref))?;
        let (stack_dist, _) = load_feature_file(Path::new(&entry.features_dist))?;
        dists_score(&stack_ref, &stack_dist, &weights)?
    } else {
        0.0
    };

    Ok(SweepMeasurement {
        input_id: entry.id.clone(),
        total_bits: bits,
        width,
        height,
        ms_ssim: ms,
        dists,
        status: "ok".into(),
    })
}

fn cmd_rd_report(args: RdReportArgs) -> Result<()> {
    let model = load_valid_model(&args.model)?;
    let lambdas = parse_lambdas(&args.lambda)?;
    let manifest = std::fs::read_to_string(&args.manifest)?;
    let entries = parse_manifest(&manifest);
    let opts = MsSsimOptions {
        allow_scale_reduction: args.allow_scale_reduction,
    };

    let measurements: Vec<SweepMeasurement> = entries
        .iter()
        .map(|entry| {
            measure_entry(entry, &model, &args.alphabet, opts).unwrap_or_else(|e| {
                SweepMeasurement {
                    input_id: entry.id.clone(),
                    total_bits: 0.0,
                    width: 1,
                    height: 1,
                    ms_ssim: 0.0,
                    dists: 0.0,
                    status: error_tag(&e),
                }
            })
        })
        .collect();

    let report = rd_sweep(&measurements, &lambdas, args.k_ms, args.k_di)?;
    std::fs::write(&args.output, report.to_csv())?;
    println!(
        "inputs={} rows={} lambdas={}",
        entries.len(),
        report.rows.len(),
        lambdas.len()
    );
    Ok(())
}

fn cmd_gen_model(args: GenModelArgs) -> Result<()> {
    let parts: Vec<&str> = args.components.split(',').collect();
    let components = if parts.len() == 3 {
        let parse = |s: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad component count {s}")))
        };
        (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
    } else if args.components.trim().is_empty() {
        DEFAULT_COMPONENTS
    } else {
        return Err(Error::Parameter(format!(
            "components must be \"K,M,N\", got {}",
            args.components
        )));
    };
    let z_channels = args.z_channels.unwrap_or(args.channels);
    let model = generate_model(args.channels, components, z_channels, args.seed)?;
    debug_assert!(model.validate().is_valid());
    model.save(&args.output)?;
    println!(
        "channels={} k={} m={} n={} z_channels={} seed={}",
        args.channels, components.0, components.1, components.2, z_channels, args.seed
    );
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let model = CodecModel::load(&args.model)?;
    if let Some(dump) = &args.dump {
        std::fs::write(dump, model.to_text())?;
    }
    let report = model.validate();
    if report.is_valid() {
        println!("valid=true violations=0");
        Ok(())
    } else {
        for v in report.violations() {
            eprintln!("violation: {}: {}", v.location, v.message);
        }
        Err(Error::Validation(format!(
            "{} violation(s)",
            report.violations().len()
        )))
    }
}
