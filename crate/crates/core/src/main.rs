use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bixelq::bixelize::{read_sidecar, write_sidecar};
use bixelq::histencode::{histogram_with_edges, BinRange};
use bixelq::imageio::{encode_png, load_image};
use bixelq::metrics::{qubit_accounting, EncodingScheme};
use bixelq::pipeline::{self, PipelineConfig, DEFAULT_BINS};
use bixelq::qbackend::{Backend, DEFAULT_SHOTS};
use bixelq::reconstruct::{measured_sums, reconstruct_image, reconstruct_with_sums, ReconMode};
use bixelq::report::{self, FileEcho, ReportHistogramView};
use bixelq::{Error, Result};

const EXIT_CODES: &str = "\
Exit codes:
  0   success
  1   unclassified failure
  2   invalid command line
  3   file-not-found         4   unsupported-format     5   corrupt-image-data
  6   io-failure             7   invalid-parameter      8   dimension-mismatch
  9   empty-input           10   index-out-of-range    11   norm-violation
 12   invalid-distribution  13   negative-mse          14   zero-shots
 15   malformed-data

Errors are printed to stderr as `error[<name>]: <message>`.";

#[derive(Parser)]
#[command(name = "bixelq", version, about = "Histogram amplitude-embedding image compression on a simulated quantum backend", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress one image, write the reconstruction and a report.
    Compress(CompressArgs),
    /// Run the pipeline for several bin counts and emit a CSV table.
    Sweep(SweepArgs),
    /// Rebuild an image from a sidecar file and a JSON report.
    Reconstruct(ReconstructArgs),
    /// Compare qubit requirements of quantum image encodings.
    Qubits(QubitsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Ideal,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RangeArg {
    Data,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReconArg {
    Paper,
    Measured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug)]
struct Bixel(usize, usize);

fn parse_bixel(s: &str) -> std::result::Result<Bixel, String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got `{s}`"))?;
    let h: usize = h
        .trim()
        .parse()
        .map_err(|_| format!("bad bixel height `{h}`"))?;
    let w: usize = w
        .trim()
        .parse()
        .map_err(|_| format!("bad bixel width `{w}`"))?;
    if h == 0 || w == 0 {
        return Err("bixel dimensions must be positive".into());
    }
    Ok(Bixel(h, w))
}

fn parse_channels(s: &str) -> std::result::Result<u32, String> {
    match s {
        "1" => Ok(1),
        "3" => Ok(3),
        _ => Err(format!("channels must be 1 or 3, got `{s}`")),
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Bixel size as HxW.
    #[arg(long, value_parser = parse_bixel, default_value = "32x32")]
    bixel: Bixel,
    #[arg(long, value_enum, default_value = "sampled")]
    backend: BackendArg,
    /// Measurement shots for the sampled backend.
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    /// Generator seed for the sampled backend (ChaCha20).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Histogram extent: observed block sums, or [0, M].
    #[arg(long = "bin-range", value_enum, default_value = "data")]
    bin_range: RangeArg,
    /// Block sums from bin centers (paper) or centers scaled by measured counts.
    #[arg(long, value_enum, default_value = "paper")]
    recon: ReconArg,
    /// Include wall-clock timings in the report (makes output run-dependent).
    #[arg(long)]
    timings: bool,
}

impl PipelineArgs {
    fn config(&self, bins: usize) -> PipelineConfig {
        PipelineConfig {
            bixel_h: self.bixel.0,
            bixel_w: self.bixel.1,
            bins,
            backend: match self.backend {
                BackendArg::Ideal => Backend::Ideal,
                BackendArg::Sampled => Backend::Sampled {
                    shots: self.shots,
                    seed: self.seed,
                },
            },
            bin_range: match self.bin_range {
                RangeArg::Data => BinRange::Data,
                RangeArg::Full => BinRange::Full,
            },
            recon: match self.recon {
                ReconArg::Paper => ReconMode::Paper,
                ReconArg::Measured => ReconMode::Measured,
            },
        }
    }
}

#[derive(Args)]
struct CompressArgs {
    /// PNG, PGM (P5) or PPM (P6) image.
    input: PathBuf,
    /// Number of histogram bins B.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Where to write the reconstructed PNG.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the report (stdout if omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Also write the block decomposition to this sidecar file.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    input: PathBuf,
    /// Comma-separated bin counts.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64, 128])]
    bins: Vec<usize>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Where to write the CSV (stdout if omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Sidecar written by `compress --sidecar`.
    #[arg(long)]
    sidecar: PathBuf,
    /// JSON report written by the same `compress` run.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QubitsArgs {
    /// Pixel count N.
    #[arg(long, conflicts_with = "size", required_unless_present = "size")]
    pixels: Option<u64>,
    /// Image size as HxW (alternative to --pixels).
    #[arg(long, value_parser = parse_bixel)]
    size: Option<Bixel>,
    #[arg(long, default_value_t = DEFAULT_BINS as u64)]
    bins: u64,
    /// 1 for grayscale, 3 for RGB; sets the default NEQR bit depth.
    #[arg(long, default_value_t = 3, value_parser = parse_channels)]
    channels: u32,
    /// NEQR value-register width l (default 8 per channel).
    #[arg(long = "bit-depth")]
    bit_depth: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_compress(args: CompressArgs) -> Result<()> {
    let config = args.pipeline.config(args.bins);
    let img = load_image(&args.input)?;
    let input_bytes = fs::metadata(&args.input).ok().map(|m| m.len());
    let prepared = pipeline::prepare(&img, config.bixel_h, config.bixel_w)?;
    let outcome = pipeline::run(&prepared, &config)?;
    let timings = outcome.fidelity.timings.unwrap_or_default();
    eprintln!(
        "embed time: {:.4}s | qubits={}",
        timings.embed_s, outcome.qubits
    );
    eprintln!(
        "recon time: {:.4}s | qubits={}",
        timings.recon_s, outcome.qubits
    );
    eprintln!(
        "MSE={:e}, PSNR={:.2} dB",
        outcome.fidelity.mse, outcome.fidelity.psnr_db
    );

    let reconstructed = encode_png(&outcome.reconstruction.image)?;
    if let Some(out) = &args.out {
        fs::write(out, &reconstructed)?;
    }
    if let Some(path) = &args.sidecar {
        write_sidecar(&prepared.decomposition, BufWriter::new(File::create(path)?))?;
    }
    let files = FileEcho {
        input_bytes,
        original_png_bytes: encode_png(&img)?.len() as u64,
        reconstructed_png_bytes: reconstructed.len() as u64,
        output: args.out.as_ref().map(|p| p.display().to_string()),
    };
    let rep = report::build_report(
        &args.input.display().to_string(),
        &config,
        &prepared,
        &outcome,
        files,
        args.pipeline.timings,
    );
    let mut out = open_output(args.report.as_deref())?;
    match args.format {
        ReportFormat::Json => report::write_json(&rep, &mut out)?,
        ReportFormat::Csv => report::write_csv(&rep, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let config = args.pipeline.config(DEFAULT_BINS);
    let img = load_image(&args.input)?;
    let prepared = pipeline::prepare(&img, config.bixel_h, config.bixel_w)?;
    let rows = pipeline::sweep(&prepared, &config, &args.bins)?;
    for r in rows.iter().filter(|r| !r.mse_bound_ok) {
        log::warn!("bins={} exceeds the quantization mse bound", r.bins);
    }
    let mut out = open_output(args.report.as_deref())?;
    report::write_sweep_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ReconstructSummary {
    output: String,
    bytes: u64,
    clip_count: u64,
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<()> {
    let decomp = read_sidecar(io::BufReader::new(
        File::open(&args.sidecar).map_err(|e| open_error(e, &args.sidecar))?,
    ))?;
    let text = fs::read_to_string(&args.report).map_err(|e| open_error(e, &args.report))?;
    let view: ReportHistogramView =
        serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("report: {e}")))?;
    let pad = decomp.pad();
    if view.image.padded_height != pad.padded_height
        || view.image.padded_width != pad.padded_width
        || view.image.channels != decomp.channels()
    {
        return Err(Error::Malformed(
            "report and sidecar describe different images".into(),
        ));
    }
    let hist = histogram_with_edges(decomp.sums(), view.histogram.edges.clone())?;
    if hist.counts() != view.histogram.counts.as_slice() {
        return Err(Error::Malformed(
            "sidecar sums do not reproduce the report histogram".into(),
        ));
    }
    let result = match view.config.recon {
        ReconMode::Paper => reconstruct_image(&decomp, &hist)?,
        ReconMode::Measured => reconstruct_with_sums(
            &decomp,
            measured_sums(&hist, &view.histogram.estimated_counts)?,
        )?,
    };
    let png = encode_png(&result.image)?;
    fs::write(&args.out, &png)?;
    let summary = ReconstructSummary {
        output: args.out.display().to_string(),
        bytes: png.len() as u64,
        clip_count: result.clip_count,
    };
    println!(
        "{}",
        serde_json::to_string(&summary).map_err(|e| Error::Io(e.into()))?
    );
    Ok(())
}

fn open_error(e: io::Error, path: &Path) -> Error {
    if e.kind() == io::ErrorKind::NotFound {
        Error::FileNotFound(path.to_path_buf())
    } else {
        Error::Io(e)
    }
}

#[derive(Serialize)]
struct QubitRow {
    method: &'static str,
    qubits: u32,
    color: &'static str,
    input_constraint: &'static str,
}

fn cmd_qubits(args: QubitsArgs) -> Result<()> {
    let n_pixels = match (args.pixels, args.size) {
        (Some(n), _) => n,
        (None, Some(Bixel(h, w))) => (h as u64)
            .checked_mul(w as u64)
            .ok_or_else(|| Error::InvalidParameter("image size overflows".into()))?,
        (None, None) => unreachable!("clap requires one of --pixels/--size"),
    };
    let bit_depth = args.bit_depth.unwrap_or(8 * args.channels);
    let rows = [
        (EncodingScheme::Frqi, "grayscale", "square 2^n x 2^n"),
        (EncodingScheme::Neqr { bit_depth }, "grayscale", "square"),
        (EncodingScheme::Ncqi, "RGB", "square"),
        (
            EncodingScheme::Proposed { bins: args.bins },
            "RGB",
            "arbitrary size",
        ),
    ]
    .into_iter()
    .map(|(scheme, color, input_constraint)| {
        Ok(QubitRow {
            method: scheme.name(),
            qubits: qubit_accounting(n_pixels, scheme)?,
            color,
            input_constraint,
        })
    })
    .collect::<Result<Vec<_>>>()?;

    let mut out = io::stdout().lock();
    match args.format {
        TableFormat::Json => {
            #[derive(Serialize)]
            struct Table<'a> {
                pixels: u64,
                bins: u64,
                neqr_bit_depth: u32,
                methods: &'a [QubitRow],
            }
            let t = Table {
                pixels: n_pixels,
                bins: args.bins,
                neqr_bit_depth: bit_depth,
                methods: &rows,
            };
            serde_json::to_writer_pretty(&mut out, &t).map_err(|e| Error::Io(e.into()))?;
            writeln!(out)?;
        }
        TableFormat::Text => {
            writeln!(
                out,
                "pixels N = {n_pixels}, bins B = {}, NEQR l = {bit_depth}",
                args.bins
            )?;
            writeln!(out, "{:<10}{:>7}  {:<11}input", "method", "qubits", "color")?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<10}{:>7}  {:<11}{}",
                    r.method, r.qubits, r.color, r.input_constraint
                )?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compress(a) => cmd_compress(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Qubits(a) => cmd_qubits(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(u8::try_from(e.code()).unwrap_or(1))
        }
    }
}
