//! Command-line surface of the enhancer: `enhance`, `decompose`, `alpha`,
//! `mix`, `synth-noise` and `eval`. Defaults are the published operating
//! point (50 trials at 30 dB, 10 modes, 10240-sample frames, 128-sample
//! hop, μ = 0.8, α_min = 1.1). All audio is written as float32 WAV.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hhtalpha::emd::{eemd, EemdConfig, EmdConfig};
use hhtalpha::enhance::{enhance, profile_alpha, EnhanceConfig, ThresholdCombine};
use hhtalpha::metrics::{evaluate, Metric, MetricConfig};
use hhtalpha::signal::{frame_grid, read_wav, write_wav, WindowKind};
use hhtalpha::stable::{estimate_alpha, AlphaLookup};
use hhtalpha::synth::{mix_at_snr, stable_noise};
use hhtalpha::Signal;

#[derive(Debug, Parser)]
#[command(
    name = "hhtalpha",
    version,
    about = "Impulsiveness-index EEMD speech enhancement"
)]
pub struct Cli {
    /// α lookup table file; the built-in table is used when absent
    #[arg(long, global = true, value_name = "FILE")]
    pub lookup: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enhance a noisy recording
    Enhance(EnhanceArgs),
    /// Write the ensemble EMD modes and residual of a recording
    Decompose(DecomposeArgs),
    /// Estimate α of a recording, optionally per frame and mode
    Alpha(AlphaArgs),
    /// Add noise to clean speech at a target SNR
    Mix(MixArgs),
    /// Synthesize symmetric α-stable noise
    SynthNoise(SynthNoiseArgs),
    /// Score a processed recording against its clean reference (JSON)
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DecompositionArgs {
    /// Master seed for the ensemble noise
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ensemble size N
    #[arg(long, default_value_t = 50)]
    pub ensemble: usize,
    /// SNR of each ensemble noise realization in dB ("inf" for none)
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub ensemble_snr: f64,
    /// Number of modes M
    #[arg(long, default_value_t = 10)]
    pub modes: usize,
}

impl DecompositionArgs {
    fn config(&self) -> Result<EemdConfig> {
        let cfg = EemdConfig {
            emd: EmdConfig {
                max_modes: self.modes,
                ..Default::default()
            },
            ensemble_size: self.ensemble,
            ensemble_snr_db: self.ensemble_snr,
            master_seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct FrameArgs {
    /// Frame length T_d in samples
    #[arg(long, default_value_t = 10240)]
    pub frame: usize,
    /// Frame step S_d in samples
    #[arg(long, default_value_t = 128)]
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThresholdMode {
    /// ρ = max(μ·α_u, α_min)
    Floor,
    /// ρ = min(μ·α_u, α_min)
    LiteralMin,
}

impl From<ThresholdMode> for ThresholdCombine {
    fn from(m: ThresholdMode) -> Self {
        match m {
            ThresholdMode::Floor => ThresholdCombine::Floor,
            ThresholdMode::LiteralMin => ThresholdCombine::LiteralMin,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EnhanceArgs {
    /// Noisy mono recording
    #[arg(long = "in", value_name = "WAV")]
    pub input: PathBuf,
    /// Enhanced output, written as 32-bit float
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
    #[command(flatten)]
    pub decomposition: DecompositionArgs,
    #[command(flatten)]
    pub frames: FrameArgs,
    /// Threshold scale μ
    #[arg(long, default_value_t = 0.8)]
    pub mu: f64,
    /// Threshold bound α_min
    #[arg(long, default_value_t = 1.1)]
    pub alpha_min: f64,
    #[arg(long, value_enum, default_value_t = ThresholdMode::Floor)]
    pub threshold_mode: ThresholdMode,
    /// Write the per-frame α profile as CSV
    #[arg(long, value_name = "CSV")]
    pub profile: Option<PathBuf>,
}

impl EnhanceArgs {
    pub fn config(&self) -> Result<EnhanceConfig> {
        let cfg = EnhanceConfig {
            eemd: self.decomposition.config()?,
            frame_len: self.frames.frame,
            step: self.frames.step,
            mu: self.mu,
            alpha_min: self.alpha_min,
            threshold_combine: self.threshold_mode.into(),
            window: WindowKind::Hann,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    /// Mono recording to decompose
    #[arg(long = "in", value_name = "WAV")]
    pub input: PathBuf,
    /// Output directory for IMF_01.wav .. IMF_MM.wav and residual.wav
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub decomposition: DecompositionArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AlphaArgs {
    /// Mono recording to analyse
    #[arg(long = "in", value_name = "WAV")]
    pub input: PathBuf,
    /// Also decompose and write the per-frame, per-mode α profile as CSV
    #[arg(long, value_name = "CSV")]
    pub profile: Option<PathBuf>,
    #[command(flatten)]
    pub decomposition: DecompositionArgs,
    #[command(flatten)]
    pub frames: FrameArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MixArgs {
    /// Clean speech
    #[arg(long, value_name = "WAV")]
    pub clean: PathBuf,
    /// Noise, cropped or looped to the speech length
    #[arg(long, value_name = "WAV")]
    pub noise: PathBuf,
    /// Target SNR in dB over the active region of the clean signal
    #[arg(long, allow_negative_numbers = true)]
    pub snr: f64,
    /// Mixture output
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
    /// Seed for the noise crop offset
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SynthNoiseArgs {
    /// Characteristic exponent in (0, 2]
    #[arg(long)]
    pub alpha: f64,
    /// Duration in seconds
    #[arg(long, default_value_t = 2.4)]
    pub duration: f64,
    /// Sample rate in Hz
    #[arg(long, default_value_t = 16000)]
    pub rate: u32,
    /// Sampler seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Clean reference
    #[arg(long, value_name = "WAV")]
    pub clean: PathBuf,
    /// Recording to score, same length and rate as the reference
    #[arg(long, value_name = "WAV")]
    pub processed: PathBuf,
    /// Comma-separated subset of llr, fwsnrseg, stoi
    #[arg(long, value_delimiter = ',', default_value = "llr,fwsnrseg,stoi")]
    pub metrics: Vec<Metric>,
    /// Externally computed CSII value to map to a percentage
    #[arg(long)]
    pub csii: Option<f64>,
}

fn load_lookup(path: Option<&Path>) -> Result<AlphaLookup> {
    match path {
        Some(p) => {
            AlphaLookup::load(p).with_context(|| format!("loading lookup table {}", p.display()))
        }
        None => Ok(AlphaLookup::embedded().clone()),
    }
}

fn read(path: &Path) -> Result<Signal> {
    read_wav(path).with_context(|| format!("reading {}", path.display()))
}

fn write(signal: &Signal, path: &Path) -> Result<()> {
    write_wav(signal, path).with_context(|| format!("writing {}", path.display()))
}

fn write_profile(profile: &hhtalpha::enhance::AlphaProfile, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    profile.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

/// Runs one subcommand. Anything meant for stdout goes to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let lookup_path = cli.lookup.as_deref();
    match cli.command {
        Command::Enhance(args) => {
            let cfg = args.config()?;
            let lookup = load_lookup(lookup_path)?;
            let noisy = read(&args.input)?;
            let (enhanced, profile) = enhance(&noisy, &cfg, &lookup)?;
            write(&enhanced, &args.out)?;
            if let Some(p) = &args.profile {
                write_profile(&profile, p)?;
            }
        }
        Command::Decompose(args) => {
            let cfg = args.decomposition.config()?;
            let x = read(&args.input)?;
            let imfs = eemd(&x, &cfg)?;
            fs::create_dir_all(&args.out)
                .with_context(|| format!("creating {}", args.out.display()))?;
            for (m, mode) in imfs.modes().iter().enumerate() {
                write(mode, &args.out.join(format!("IMF_{:02}.wav", m + 1)))?;
            }
            write(imfs.residual(), &args.out.join("residual.wav"))?;
        }
        Command::Alpha(args) => {
            let cfg = args.decomposition.config()?;
            let lookup = load_lookup(lookup_path)?;
            let x = read(&args.input)?;
            let est = estimate_alpha(x.samples(), &lookup)?;
            if let Some(p) = &args.profile {
                let grid = frame_grid(x.len(), args.frames.frame, args.frames.step)?;
                let imfs = eemd(&x, &cfg)?;
                write_profile(&profile_alpha(&imfs, &x, &grid, &lookup)?, p)?;
            }
            let report = json!({
                "alpha": est.alpha,
                "nu_alpha": est.nu_alpha,
                "samples": est.sample_count,
            });
            writeln!(stdout, "{report}")?;
        }
        Command::Mix(args) => {
            if !args.snr.is_finite() {
                bail!("--snr must be finite");
            }
            let clean = read(&args.clean)?;
            let noise = read(&args.noise)?;
            let (mix, _) = mix_at_snr(&clean, &noise, args.snr, args.seed)?;
            write(&mix, &args.out)?;
        }
        Command::SynthNoise(args) => {
            if !(args.alpha > 0.0 && args.alpha <= 2.0) {
                bail!("--alpha must be in (0, 2], got {}", args.alpha);
            }
            if args.duration.is_nan() || args.duration <= 0.0 || args.rate == 0 {
                bail!("--duration and --rate must be positive");
            }
            let len = (args.duration * args.rate as f64).round() as usize;
            let noise = stable_noise(args.alpha, len, args.rate, args.seed)?;
            write(&noise, &args.out)?;
        }
        Command::Eval(args) => {
            let clean = read(&args.clean)?;
            let processed = read(&args.processed)?;
            let mut report = evaluate(&clean, &processed, &args.metrics, &MetricConfig::default())?;
            if let Some(c) = args.csii {
                report = report.with_csii(c);
            }
            writeln!(stdout, "{}", serde_json::to_string(&report)?)?;
        }
    }
    Ok(())
}
