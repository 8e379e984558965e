//! Command-line front end for the toolkit.
//!
//! Every subcommand reads and writes whole files. Machine-readable output
//! goes to stdout or the path given with `--out`; diagnostics and progress
//! notes go to stderr. The process exits 0 on success, 1 when an operation
//! fails, and 2 when the arguments themselves are invalid.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::RngCore;

use svst::analysis::{
    ascii_histogram, chi_square_uniform, lsb_stream_bytes, mv_diff_report, video_psnr,
    Histogram256,
};
use svst::codec::{decode_video, encode_video, CodecParams, IdentityHook};
use svst::crypto::SymmetricKey;
use svst::formats::container::{read_container, write_container};
use svst::formats::pnm::{read_pnm, write_pnm};
use svst::formats::wav::read_wav;
use svst::formats::y4m::{read_y4m, write_y4m};
use svst::formats::PnmImage;
use svst::stego_lsb;
use svst::stego_video::{self, EmbedMode};
use svst::{RawVideo, StegoContainer};

#[derive(Parser)]
#[command(name = "svst", version, about = "Video steganography toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a y4m video into a container, carrying no payload.
    Transcode(TranscodeArgs),
    /// Decompress a container back to y4m.
    Decode(DecodeArgs),
    /// Hide a payload in motion vectors or coefficients while compressing.
    Embed(EmbedArgs),
    /// Recover a hidden payload from a container.
    Extract(ExtractArgs),
    /// Estimate how many payload bits a video could carry in one mode.
    Capacity(CapacityArgs),
    /// Hide a payload in transform coefficients while compressing.
    EmbedCoeff(EmbedCoeffArgs),
    /// Negate every motion vector in a container.
    InvertMv(InvertMvArgs),
    /// Hide a payload in the low bits of an image's samples.
    LsbEmbed(LsbEmbedArgs),
    /// Recover a payload from the low bits of an image's samples.
    LsbExtract(LsbExtractArgs),
    /// Append a payload after the end of a wav file.
    Inject(InjectArgs),
    /// Recover the bytes appended after the end of a wav file.
    ExtractAppended(ExtractAppendedArgs),
    /// Histogram the least significant bits of an image, packed as bytes.
    HistLsb(HistLsbArgs),
    /// Chi-square uniformity statistic of an image's low bits or a histogram.
    Chi2(Chi2Args),
    /// Per-plane PSNR between two y4m videos.
    Psnr(PsnrArgs),
    /// Motion vector differences between two containers.
    MvDiff(MvDiffArgs),
}

/// Encoder settings shared by every subcommand that compresses video.
#[derive(Args)]
struct CodecArgs {
    /// Frames between intra-only frames; 1 disables prediction entirely.
    #[arg(long, default_value_t = 12)]
    gop: u8,
    /// Quantiser step applied to every transform coefficient.
    #[arg(long, default_value_t = 8)]
    qp: u8,
    /// Motion search radius in integer pixels.
    #[arg(long, default_value_t = 16)]
    search: u8,
}

impl CodecArgs {
    fn params(&self) -> CodecParams {
        CodecParams {
            gop_size: self.gop,
            qp: self.qp,
            search_range: self.search,
            ..CodecParams::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    FirstMbX,
    FirstMbY,
    AllMbX,
    AllMbY,
    Coeff,
}

impl From<ModeArg> for EmbedMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::FirstMbX => EmbedMode::FirstMbX,
            ModeArg::FirstMbY => EmbedMode::FirstMbY,
            ModeArg::AllMbX => EmbedMode::AllMbX,
            ModeArg::AllMbY => EmbedMode::AllMbY,
            ModeArg::Coeff => EmbedMode::Coeff,
        }
    }
}

#[derive(Args)]
struct TranscodeArgs {
    /// Source video, y4m.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output container path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    /// Wav file to carry alongside the video, byte for byte.
    #[arg(long, value_name = "FILE")]
    audio: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Source container.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output video path, y4m.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Write the carried audio here; fails if the container has none.
    #[arg(long, value_name = "FILE")]
    audio: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Source video, y4m.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// File whose bytes are hidden in the video.
    #[arg(long, value_name = "FILE")]
    payload: PathBuf,
    /// Where in the coded stream the payload bits are placed.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Output container path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    /// Encrypt the payload with this AES key, 32, 48 or 64 hex digits.
    #[arg(long, value_parser = parse_key)]
    key: Option<SymmetricKey>,
    /// Counter-mode nonce, 32 hex digits; generated and printed to stderr
    /// when omitted.
    #[arg(long, value_parser = parse_nonce, requires = "key")]
    nonce: Option<Nonce>,
    /// Wav file to carry alongside the video, byte for byte.
    #[arg(long, value_name = "FILE")]
    audio: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    /// Source container.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Write the payload here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// AES key for an encrypted payload, 32, 48 or 64 hex digits.
    #[arg(long, value_parser = parse_key)]
    key: Option<SymmetricKey>,
}

#[derive(Args)]
struct CapacityArgs {
    /// Source video, y4m.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Embedding mode to count slots for.
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Args)]
struct EmbedCoeffArgs {
    /// Source video, y4m.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// File whose bytes are hidden in the video.
    #[arg(long, value_name = "FILE")]
    payload: PathBuf,
    /// Output container path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Write into raw transform coefficients before quantisation, which
    /// destroys the payload; kept for measuring exactly that.
    #[arg(long)]
    pre_quant: bool,
    #[command(flatten)]
    codec: CodecArgs,
    /// Wav file to carry alongside the video, byte for byte.
    #[arg(long, value_name = "FILE")]
    audio: Option<PathBuf>,
}

#[derive(Args)]
struct InvertMvArgs {
    /// Source container.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output container path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct LsbEmbedArgs {
    /// Cover image, pgm or ppm.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// File whose bytes are hidden in the image.
    #[arg(long, value_name = "FILE")]
    payload: PathBuf,
    /// Output image path, same format as the cover.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct LsbExtractArgs {
    /// Stego image, pgm or ppm.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Write the payload here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InjectArgs {
    /// Cover audio, wav.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// File whose bytes are appended after the cover.
    #[arg(long, value_name = "FILE")]
    payload: PathBuf,
    /// Output wav path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractAppendedArgs {
    /// Stego audio, wav.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Write the payload here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HistLsbArgs {
    /// Image to histogram, pgm or ppm.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Write the histogram csv here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Chi2Args {
    /// An image (pgm or ppm, low bits are histogrammed first) or a
    /// histogram csv as written by hist-lsb.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct PsnrArgs {
    /// Reference video, y4m.
    #[arg(value_name = "REFERENCE")]
    reference: PathBuf,
    /// Distorted video, y4m, same dimensions and frame count.
    #[arg(value_name = "DISTORTED")]
    distorted: PathBuf,
}

#[derive(Args)]
struct MvDiffArgs {
    /// First container.
    #[arg(value_name = "A")]
    a: PathBuf,
    /// Second container, same dimensions and frame count.
    #[arg(value_name = "B")]
    b: PathBuf,
    /// Write the per-macroblock csv here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

type Nonce = [u8; 16];

fn parse_key(s: &str) -> std::result::Result<SymmetricKey, String> {
    let bytes = hex::decode(s).map_err(|e| format!("key is not hex: {e}"))?;
    SymmetricKey::new(&bytes).map_err(|e| e.to_string())
}

fn parse_nonce(s: &str) -> std::result::Result<Nonce, String> {
    let bytes = hex::decode(s).map_err(|e| format!("nonce is not hex: {e}"))?;
    let len = bytes.len();
    bytes
        .try_into()
        .map_err(|_| format!("nonce is {len} bytes; it must be 16 (32 hex digits)"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes payload bytes to `out` when given, otherwise to stdout.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write_output(path, bytes),
        None => io::stdout()
            .write_all(bytes)
            .context("writing to stdout"),
    }
}

fn load_video(path: &Path) -> Result<RawVideo> {
    let data = read_input(path)?;
    read_y4m(&data).with_context(|| format!("parsing {}", path.display()))
}

fn load_container(path: &Path) -> Result<StegoContainer> {
    let data = read_input(path)?;
    read_container(&data).with_context(|| format!("parsing {}", path.display()))
}

fn load_pnm(path: &Path) -> Result<PnmImage> {
    let data = read_input(path)?;
    read_pnm(&data).with_context(|| format!("parsing {}", path.display()))
}

/// Validates the wav file at `path` and attaches its raw bytes to the
/// container, to travel with the video untouched.
fn attach_audio(container: &mut StegoContainer, audio: Option<&Path>) -> Result<()> {
    if let Some(path) = audio {
        let data = read_input(path)?;
        read_wav(&data).with_context(|| format!("parsing {}", path.display()))?;
        container.audio = Some(data);
    }
    Ok(())
}

fn save_container(path: &Path, container: &StegoContainer) -> Result<()> {
    write_output(path, &write_container(container)?)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Transcode(a) => {
            let video = load_video(&a.input)?;
            let mut container = encode_video(&video, &a.codec.params(), &mut IdentityHook)?;
            attach_audio(&mut container, a.audio.as_deref())?;
            save_container(&a.out, &container)
        }
        Command::Decode(a) => {
            let container = load_container(&a.input)?;
            let video = decode_video(&container, None)?;
            if let Some(audio_path) = &a.audio {
                match &container.audio {
                    Some(bytes) => write_output(audio_path, bytes)?,
                    None => bail!("container carries no audio"),
                }
            }
            write_output(&a.out, &write_y4m(&video)?)
        }
        Command::Embed(a) => {
            let video = load_video(&a.input)?;
            let payload = read_input(&a.payload)?;
            let encryption = a.key.as_ref().map(|key| {
                let nonce = a.nonce.unwrap_or_else(|| {
                    let mut n = [0u8; 16];
                    rand::rngs::OsRng.fill_bytes(&mut n);
                    eprintln!("nonce: {}", hex::encode(n));
                    n
                });
                (key, nonce)
            });
            let mut container = stego_video::embed(
                &video,
                &payload,
                a.mode.into(),
                &a.codec.params(),
                encryption,
            )?;
            attach_audio(&mut container, a.audio.as_deref())?;
            save_container(&a.out, &container)
        }
        Command::Extract(a) => {
            let container = load_container(&a.input)?;
            let payload = stego_video::extract(&container, a.key.as_ref())?;
            emit(a.out.as_deref(), &payload)
        }
        Command::Capacity(a) => {
            let video = load_video(&a.input)?;
            let report =
                stego_video::estimate_capacity(&video, &a.codec.params(), a.mode.into())?;
            println!("estimated bits: {}", report.estimated_bits);
            if report.caveat {
                println!(
                    "caveat: counted on a clean encode; embedding alters coding \
                     decisions, so the real figure can differ"
                );
            }
            Ok(())
        }
        Command::EmbedCoeff(a) => {
            let video = load_video(&a.input)?;
            let payload = read_input(&a.payload)?;
            let mut container =
                stego_video::embed_coeff(&video, &payload, &a.codec.params(), a.pre_quant)?;
            attach_audio(&mut container, a.audio.as_deref())?;
            save_container(&a.out, &container)
        }
        Command::InvertMv(a) => {
            let container = load_container(&a.input)?;
            save_container(&a.out, &stego_video::invert_motion_vectors(&container)?)
        }
        Command::LsbEmbed(a) => {
            let mut image = load_pnm(&a.input)?;
            let payload = read_input(&a.payload)?;
            image.pixels = stego_lsb::lsb_embed(&image.pixels, &payload)?;
            write_output(&a.out, &write_pnm(&image)?)
        }
        Command::LsbExtract(a) => {
            let image = load_pnm(&a.input)?;
            let payload = stego_lsb::lsb_extract(&image.pixels)?;
            emit(a.out.as_deref(), &payload)
        }
        Command::Inject(a) => {
            let audio = read_input(&a.input)?;
            let payload = read_input(&a.payload)?;
            write_output(&a.out, &stego_lsb::inject_append(&audio, &payload)?)
        }
        Command::ExtractAppended(a) => {
            let audio = read_input(&a.input)?;
            let payload = stego_lsb::extract_appended(&audio)?;
            emit(a.out.as_deref(), &payload)
        }
        Command::HistLsb(a) => {
            let image = load_pnm(&a.input)?;
            let hist = ascii_histogram(&lsb_stream_bytes(&image.pixels));
            emit(a.out.as_deref(), hist.to_csv().as_bytes())
        }
        Command::Chi2(a) => {
            let data = read_input(&a.input)?;
            let hist = if data.starts_with(b"P5") || data.starts_with(b"P6") {
                let image = read_pnm(&data)
                    .with_context(|| format!("parsing {}", a.input.display()))?;
                ascii_histogram(&lsb_stream_bytes(&image.pixels))
            } else {
                let text = std::str::from_utf8(&data)
                    .context("input is neither a pnm image nor utf-8 csv")?;
                Histogram256::from_csv(text)
                    .with_context(|| format!("parsing {}", a.input.display()))?
            };
            println!("{:.4}", chi_square_uniform(&hist)?);
            Ok(())
        }
        Command::Psnr(a) => {
            let reference = load_video(&a.reference)?;
            let distorted = load_video(&a.distorted)?;
            let p = video_psnr(&reference, &distorted)?;
            println!("plane,psnr_db");
            println!("y,{:.4}", p.y);
            println!("cb,{:.4}", p.cb);
            println!("cr,{:.4}", p.cr);
            Ok(())
        }
        Command::MvDiff(a) => {
            let first = load_container(&a.a)?;
            let second = load_container(&a.b)?;
            let report = mv_diff_report(&first, &second)?;
            eprintln!(
                "mean ddx {:.4}, mean ddy {:.4}, max ddx {}, max ddy {}",
                report.mean_ddx, report.mean_ddy, report.max_ddx, report.max_ddy
            );
            emit(a.out.as_deref(), report.to_csv().as_bytes())
        }
    }
}
