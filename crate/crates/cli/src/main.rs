//! `chaocrypt` — encrypt/decrypt square PGM images with the chaotic-map
//! cipher, run the corner-pixel key-recovery attack, and produce the metric,
//! key-space, and complexity reports as text or CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/processing error.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use chaocrypt_core::{
    adc_sweep, cdr_sweep, complexity_report, corner_attack, corner_attack_forced,
    derive_round_keys, keyspace_report, pcr_curve, read_pgm, write_pgm, AttackError, BakerKey,
    CatKey, CipherConfig, CsvMeta, DiffusionKey, DiffusionKind, FlipSpec, Image, KeyFamily,
    KeyGenerator, MapKey, MapKind, MasterKey, MetricSeries, Permutation, RoundKeys, ScheduleMode,
    StandardKey, SweepConfig, SweepResult,
};

#[derive(Parser)]
#[command(
    name = "chaocrypt",
    version,
    about = "Chaotic-map image cipher workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt a square binary PGM image.
    Encrypt(CryptArgs),
    /// Decrypt a square binary PGM image.
    Decrypt(CryptArgs),
    /// Recover diffusion-key candidates from a plaintext/ciphertext pair.
    Attack(AttackArgs),
    /// Metric sweeps producing (sweep_value, percent) series.
    #[command(subcommand)]
    Metric(MetricCommand),
    /// Key-space accounting for a map family and schedule.
    Keyspace(KeyspaceArgs),
    /// Symbolic operation counts for a configuration.
    Complexity(ComplexityArgs),
    /// Expand a master key into confusion/diffusion sub-key pairs.
    Keygen(KeygenArgs),
    /// Write a seeded pseudorandom test image.
    GenImage(GenImageArgs),
    /// Export a confusion permutation table as CSV for debugging.
    PermCsv(PermCsvArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    Standard,
    Cat,
    Baker,
}

impl From<MapArg> for MapKind {
    fn from(value: MapArg) -> Self {
        match value {
            MapArg::Standard => MapKind::Standard,
            MapArg::Cat => MapKind::Cat,
            MapArg::Baker => MapKind::Baker,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DiffusionArg {
    Add,
    Pow,
}

impl From<DiffusionArg> for DiffusionKind {
    fn from(value: DiffusionArg) -> Self {
        match value {
            DiffusionArg::Add => DiffusionKind::Add,
            DiffusionArg::Pow => DiffusionKind::Pow,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    SameKey,
    PerRound,
    Grouped,
}

impl From<ScheduleArg> for ScheduleMode {
    fn from(value: ScheduleArg) -> Self {
        match value {
            ScheduleArg::SameKey => ScheduleMode::SameKey,
            ScheduleArg::PerRound => ScheduleMode::PerRound,
            ScheduleArg::Grouped => ScheduleMode::Grouped,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BakerFamilyArg {
    /// One wide strip shifted across a bed of width-2 strips.
    Shift,
    /// Rotations of the halving composition [N/2, N/4, ..., 2, 2].
    Rotations,
}

#[derive(Args)]
struct CipherFlags {
    /// Chaotic map family for the confusion step.
    #[arg(long, value_enum)]
    map: MapArg,
    /// Diffusion recurrence.
    #[arg(long, value_enum)]
    diffusion: DiffusionArg,
    /// Iteration count n.
    #[arg(long)]
    n: u32,
    /// Group size n0 (grouped schedule only; must divide n).
    #[arg(long)]
    n0: Option<u32>,
    #[arg(long, value_enum, default_value = "same-key")]
    schedule: ScheduleArg,
    /// Rotate the diffusion scan order each round.
    #[arg(long)]
    harden: bool,
}

impl CipherFlags {
    fn config(&self, n_side: u32, gray_levels: u32) -> Result<CipherConfig, CliError> {
        let schedule = ScheduleMode::from(self.schedule);
        let group_size = match schedule {
            ScheduleMode::Grouped => self
                .n0
                .ok_or_else(|| CliError::Usage("--schedule grouped requires --n0".into()))?,
            _ => {
                if self.n0.is_some() {
                    return Err(CliError::Usage(
                        "--n0 only applies to --schedule grouped".into(),
                    ));
                }
                self.n
            }
        };
        let cfg = CipherConfig {
            map_kind: self.map.into(),
            diffusion_kind: self.diffusion.into(),
            rounds: self.n,
            group_size,
            schedule,
            scan_hardening: self.harden,
            n_side,
            gray_levels,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct CryptArgs {
    #[command(flatten)]
    cipher: CipherFlags,
    /// 32-hex-character master key; derives all round keys.
    #[arg(long, conflicts_with_all = ["confusion_key", "diffusion_key"])]
    master_key: Option<String>,
    /// Explicit confusion key, one per key group. Formats: standard `k`,
    /// cat `u,v`, baker `k1,k2,...`.
    #[arg(long = "confusion-key")]
    confusion_key: Vec<String>,
    /// Explicit diffusion key q_init, one per key group.
    #[arg(long = "diffusion-key")]
    diffusion_key: Vec<u32>,
    /// Input PGM path.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output PGM path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AttackArgs {
    /// Known plaintext PGM.
    #[arg(long)]
    plain: PathBuf,
    /// Observed ciphertext PGM.
    #[arg(long)]
    cipher: PathBuf,
    #[arg(long, value_enum)]
    diffusion: DiffusionArg,
    /// Iteration count the ciphertext was produced with.
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "same-key")]
    schedule: ScheduleArg,
    #[arg(long)]
    n0: Option<u32>,
    /// The ciphertext was produced with scan-order hardening.
    #[arg(long)]
    harden: bool,
    /// Run the recovery even when its preconditions fail.
    #[arg(long)]
    force: bool,
    /// Also write `candidate,verified` rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MetricCommand {
    /// Ciphertext difference rate under perturbed confusion keys.
    Cdr(SweepArgs),
    /// Average distance change of iterated confusion permutations.
    Adc(SweepArgs),
    /// Pixel change rate across diffusion-only rounds.
    Pcr(PcrArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    map: MapArg,
    /// Lattice side N.
    #[arg(long, default_value_t = 256)]
    size: u32,
    #[arg(long, default_value_t = 256)]
    gray_levels: u32,
    #[arg(long, default_value_t = 1)]
    n_min: u32,
    #[arg(long, default_value_t = 6)]
    n_max: u32,
    /// Seed of the generated test image, recorded in the CSV header.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Which baker key family to sweep.
    #[arg(long, value_enum, default_value = "shift")]
    baker_family: BakerFamilyArg,
    /// Write one CSV per series, suffixing the series label to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PcrArgs {
    #[arg(long, value_enum)]
    diffusion: DiffusionArg,
    #[arg(long, default_value_t = 256)]
    size: u32,
    #[arg(long, default_value_t = 256)]
    gray_levels: u32,
    #[arg(long, default_value_t = 20)]
    n_max: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Diffusion key seeding the recurrence.
    #[arg(long, default_value_t = 7)]
    q_init: u32,
    /// Scan position of the flipped pixel.
    #[arg(long, default_value_t = 0)]
    flip_index: usize,
    /// Bit to flip; defaults to 7 for add and 0 for pow (the bits that
    /// exercise each recurrence's characteristic behavior).
    #[arg(long)]
    flip_bit: Option<u32>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct KeyspaceArgs {
    #[arg(long, value_enum)]
    map: MapArg,
    #[arg(long, default_value_t = 256)]
    size: u32,
    #[arg(long, default_value_t = 256)]
    gray_levels: u32,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, value_enum, default_value = "same-key")]
    schedule: ScheduleArg,
    #[arg(long)]
    n0: Option<u32>,
}

#[derive(Args)]
struct ComplexityArgs {
    #[arg(long, value_enum)]
    map: MapArg,
    #[arg(long, value_enum)]
    diffusion: DiffusionArg,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    n0: Option<u32>,
    #[arg(long, value_enum, default_value = "same-key")]
    schedule: ScheduleArg,
    #[arg(long, default_value_t = 256)]
    size: u32,
}

#[derive(Args)]
struct KeygenArgs {
    /// 32 hex characters (128 bits).
    #[arg(long)]
    master_key: String,
    /// Number of sub-key pairs to emit.
    #[arg(long, default_value_t = 4)]
    count: usize,
    /// Logistic iterations between outputs.
    #[arg(long, default_value_t = 100)]
    t: u32,
    /// Sub-key width in bits.
    #[arg(long, default_value_t = 32)]
    bits: u32,
}

#[derive(Args)]
struct GenImageArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    size: u32,
    #[arg(long, default_value_t = 256)]
    gray_levels: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PermCsvArgs {
    #[arg(long, value_enum)]
    map: MapArg,
    /// Confusion key (standard `k`, cat `u,v`, baker `k1,k2,...`).
    #[arg(long)]
    confusion_key: String,
    #[arg(long, default_value_t = 256)]
    size: u32,
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn data(err: impl Display) -> Self {
        CliError::Data(err.to_string())
    }
}

macro_rules! from_data_error {
    ($($ty:ty),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(err: $ty) -> Self {
                CliError::data(err)
            }
        }
    )*};
}

from_data_error!(
    chaocrypt_core::CipherError,
    chaocrypt_core::LatticeError,
    chaocrypt_core::PgmError,
    chaocrypt_core::SweepError,
    chaocrypt_core::KeyGenError,
    chaocrypt_core::ImageError,
    std::io::Error,
);

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encrypt(args) => crypt(args, true),
        Command::Decrypt(args) => crypt(args, false),
        Command::Attack(args) => attack(args),
        Command::Metric(metric) => match metric {
            MetricCommand::Cdr(args) => sweep(args, Metric::Cdr),
            MetricCommand::Adc(args) => sweep(args, Metric::Adc),
            MetricCommand::Pcr(args) => pcr(args),
        },
        Command::Keyspace(args) => keyspace(args),
        Command::Complexity(args) => complexity(args),
        Command::Keygen(args) => keygen(args),
        Command::GenImage(args) => gen_image(args),
        Command::PermCsv(args) => perm_csv(args),
    }
}

fn parse_confusion_key(kind: MapKind, spec: &str) -> Result<MapKey, CliError> {
    let parse_u64 = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("invalid key component {s:?}")))
    };
    match kind {
        MapKind::Standard => Ok(MapKey::Standard(StandardKey {
            k: parse_u64(spec)?,
        })),
        MapKind::Cat => {
            let parts: Vec<&str> = spec.split(',').collect();
            if parts.len() != 2 {
                return Err(CliError::Usage(format!(
                    "cat key must be `u,v`, got {spec:?}"
                )));
            }
            Ok(MapKey::Cat(CatKey {
                u: parse_u64(parts[0])?,
                v: parse_u64(parts[1])?,
            }))
        }
        MapKind::Baker => {
            let strips = spec
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| CliError::Usage(format!("invalid strip width {s:?}")))
                })
                .collect::<Result<Vec<u32>, CliError>>()?;
            Ok(MapKey::Baker(
                BakerKey::new(strips).map_err(CliError::data)?,
            ))
        }
    }
}

fn resolve_keys(args: &CryptArgs, cfg: &CipherConfig) -> Result<RoundKeys, CliError> {
    if let Some(hex) = &args.master_key {
        let master = MasterKey::from_hex(hex).map_err(CliError::data)?;
        return Ok(derive_round_keys(&master, cfg)?);
    }
    let groups = cfg.group_count() as usize;
    if args.confusion_key.is_empty() && args.diffusion_key.is_empty() {
        return Err(CliError::Usage(
            "supply either --master-key or explicit --confusion-key/--diffusion-key".into(),
        ));
    }
    if args.confusion_key.len() != groups || args.diffusion_key.len() != groups {
        return Err(CliError::Usage(format!(
            "schedule needs {groups} key group(s): got {} --confusion-key and {} --diffusion-key",
            args.confusion_key.len(),
            args.diffusion_key.len()
        )));
    }
    let confusion = args
        .confusion_key
        .iter()
        .map(|spec| parse_confusion_key(cfg.map_kind, spec))
        .collect::<Result<Vec<_>, _>>()?;
    let diffusion = args
        .diffusion_key
        .iter()
        .map(|&q| DiffusionKey { q_init: q })
        .collect();
    Ok(RoundKeys {
        confusion,
        diffusion,
    })
}

fn crypt(args: CryptArgs, encrypting: bool) -> Result<(), CliError> {
    let img = read_pgm(&args.input)?;
    let cfg = args.cipher.config(img.n_side(), img.gray_levels())?;
    let keys = resolve_keys(&args, &cfg)?;
    let out = if encrypting {
        chaocrypt_core::encrypt(&img, &cfg, &keys)?
    } else {
        chaocrypt_core::decrypt(&img, &cfg, &keys)?
    };
    write_pgm(&args.out, &out)?;
    println!(
        "{} {} -> {} ({}x{}, L={}, map={}, diffusion={}, n={}, schedule={}{})",
        if encrypting { "encrypted" } else { "decrypted" },
        args.input.display(),
        args.out.display(),
        img.n_side(),
        img.n_side(),
        img.gray_levels(),
        cfg.map_kind.name(),
        cfg.diffusion_kind.name(),
        cfg.rounds,
        cfg.schedule.name(),
        if cfg.scan_hardening { ", hardened" } else { "" },
    );
    Ok(())
}

fn attack(args: AttackArgs) -> Result<(), CliError> {
    let plain = read_pgm(&args.plain)?;
    let cipher = read_pgm(&args.cipher)?;
    let schedule = ScheduleMode::from(args.schedule);
    let cfg = CipherConfig {
        map_kind: MapKind::Cat, // irrelevant to the attack; all maps fix (0,0)
        diffusion_kind: args.diffusion.into(),
        rounds: args.n,
        group_size: match schedule {
            ScheduleMode::Grouped => args
                .n0
                .ok_or_else(|| CliError::Usage("--schedule grouped requires --n0".into()))?,
            _ => args.n,
        },
        schedule,
        scan_hardening: args.harden,
        n_side: plain.n_side(),
        gray_levels: plain.gray_levels(),
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let result = if args.force {
        corner_attack_forced(&plain, &cipher, &cfg)
    } else {
        corner_attack(&plain, &cipher, &cfg)
    };
    let report = match result {
        Ok(report) => report,
        Err(AttackError::Inapplicable(reason)) => {
            return Err(CliError::Data(format!(
                "attack inapplicable: {reason} (use --force to run it anyway)"
            )));
        }
        Err(err) => return Err(CliError::data(err)),
    };

    println!(
        "corner pixels: plaintext {} -> ciphertext {} after n={} rounds (L={})",
        report.input.p0, report.input.q0n, report.input.rounds, report.input.gray_levels
    );
    let listed: Vec<String> = report
        .candidates
        .candidates
        .iter()
        .map(u32::to_string)
        .collect();
    println!(
        "diffusion key candidates ({}): [{}]",
        report.candidates.len(),
        listed.join(", ")
    );
    println!("solver attempts: {}", report.candidates.attempts);
    println!("key-space reduction: {:.1}x", report.reduction_factor);
    if let Some(path) = &args.csv {
        let mut file = BufWriter::new(File::create(path)?);
        report.write_csv(&mut file).map_err(CliError::data)?;
        file.flush()?;
        println!("candidate CSV written to {}", path.display());
    }
    Ok(())
}

enum Metric {
    Cdr,
    Adc,
}

fn family_for(args: &SweepArgs) -> Result<KeyFamily, CliError> {
    Ok(match MapKind::from(args.map) {
        MapKind::Standard => KeyFamily::standard_default(),
        MapKind::Cat => KeyFamily::cat_grid(args.size),
        MapKind::Baker => match args.baker_family {
            BakerFamilyArg::Shift => KeyFamily::baker_heavy_shift(args.size)?,
            BakerFamilyArg::Rotations => KeyFamily::baker_strip_rotations(args.size)?,
        },
    })
}

fn sweep(args: SweepArgs, metric: Metric) -> Result<(), CliError> {
    let family = family_for(&args)?;
    let sweep_cfg = SweepConfig {
        n_side: args.size,
        gray_levels: args.gray_levels,
        n_min: args.n_min,
        n_max: args.n_max,
        seed: args.seed,
    };
    let (name, result): (&str, SweepResult) = match metric {
        Metric::Cdr => ("cdr", cdr_sweep(&family, &sweep_cfg)?),
        Metric::Adc => ("adc", adc_sweep(&family, &sweep_cfg)?),
    };
    for skipped in &result.skipped {
        eprintln!(
            "skipped sweep_value {}: {}",
            skipped.sweep_value, skipped.reason
        );
    }
    let meta = CsvMeta {
        metric: name.into(),
        map: MapKind::from(args.map).name().into(),
        n_side: args.size,
        gray_levels: args.gray_levels,
        seed: args.seed,
    };
    emit_series(&result.series, args.csv.as_deref(), &meta)
}

fn pcr(args: PcrArgs) -> Result<(), CliError> {
    let kind = DiffusionKind::from(args.diffusion);
    let bit = args.flip_bit.unwrap_or(match kind {
        DiffusionKind::Add => 7,
        DiffusionKind::Pow => 0,
    });
    let img = Image::seeded(args.seed, args.size, args.gray_levels);
    let series = pcr_curve(
        &img,
        kind,
        DiffusionKey {
            q_init: args.q_init,
        },
        args.n_max,
        FlipSpec {
            scan_index: args.flip_index,
            bit,
        },
    )?;
    let meta = CsvMeta {
        metric: "pcr".into(),
        map: kind.name().into(),
        n_side: args.size,
        gray_levels: args.gray_levels,
        seed: args.seed,
    };
    emit_series(std::slice::from_ref(&series), args.csv.as_deref(), &meta)
}

/// One CSV file per series; with several series, `out.csv` becomes
/// `out_<label>.csv` per series. Without a path, print a short summary
/// per series instead.
fn emit_series(
    series: &[MetricSeries],
    csv: Option<&Path>,
    meta: &CsvMeta,
) -> Result<(), CliError> {
    match csv {
        Some(path) => {
            for s in series {
                let target = if series.len() == 1 {
                    path.to_path_buf()
                } else {
                    path_with_label(path, &s.label)
                };
                let mut file = BufWriter::new(File::create(&target)?);
                s.write_csv(&mut file, meta).map_err(CliError::data)?;
                file.flush()?;
                println!("wrote {} ({} rows)", target.display(), s.rows.len());
            }
        }
        None => {
            for s in series {
                let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
                for &(_, p) in &s.rows {
                    lo = lo.min(p);
                    hi = hi.max(p);
                    sum += p;
                }
                println!(
                    "{}: {} rows, min {:.3}%, mean {:.3}%, max {:.3}%",
                    s.label,
                    s.rows.len(),
                    lo,
                    sum / s.rows.len() as f64,
                    hi
                );
            }
        }
    }
    Ok(())
}

fn path_with_label(path: &Path, label: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy())
        .unwrap_or_default();
    let ext = path.extension().map(|s| s.to_string_lossy().into_owned());
    let name = match ext {
        Some(ext) => format!("{stem}_{label}.{ext}"),
        None => format!("{stem}_{label}"),
    };
    path.with_file_name(name)
}

fn keyspace(args: KeyspaceArgs) -> Result<(), CliError> {
    let schedule = ScheduleMode::from(args.schedule);
    let group_size = match schedule {
        ScheduleMode::Grouped => args
            .n0
            .ok_or_else(|| CliError::Usage("--schedule grouped requires --n0".into()))?,
        _ => args.n,
    };
    if schedule == ScheduleMode::Grouped && (group_size == 0 || !args.n.is_multiple_of(group_size))
    {
        return Err(CliError::Usage(format!(
            "grouped schedule requires n0 | n, got n0={group_size} n={}",
            args.n
        )));
    }
    let report = keyspace_report(
        args.map.into(),
        args.size,
        args.gray_levels,
        args.n,
        schedule,
        group_size,
    );
    println!("map: {}", report.map_kind.name());
    println!(
        "schedule: {} (n = {}, {} key group(s))",
        report.schedule.name(),
        report.rounds,
        report.key_groups
    );
    println!("parameter space: {:.6} bits", report.log2_parameter_space);
    println!("total key space: {:.6} bits", report.log2_total_key_space);
    Ok(())
}

fn complexity(args: ComplexityArgs) -> Result<(), CliError> {
    let schedule = ScheduleMode::from(args.schedule);
    let cfg = CipherConfig {
        map_kind: args.map.into(),
        diffusion_kind: args.diffusion.into(),
        rounds: args.n,
        group_size: match schedule {
            ScheduleMode::Grouped => args
                .n0
                .ok_or_else(|| CliError::Usage("--schedule grouped requires --n0".into()))?,
            _ => args.n,
        },
        schedule,
        scan_hardening: false,
        n_side: args.size,
        gray_levels: 256,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = complexity_report(&cfg);
    println!(
        "confusion pass ({}): {} a + {} b, computed {} time(s)",
        cfg.map_kind.name(),
        report.confusion.additions,
        report.confusion.multiplications,
        report.confusion_passes
    );
    println!(
        "diffusion pass ({}): {} a + {} b, applied {} time(s)",
        cfg.diffusion_kind.name(),
        report.diffusion.additions,
        report.diffusion.multiplications,
        report.diffusion_passes
    );
    println!(
        "total: {} a + {} b (a = addition/subtraction, b = multiplication/division)",
        report.total.additions, report.total.multiplications
    );
    Ok(())
}

fn keygen(args: KeygenArgs) -> Result<(), CliError> {
    let master = MasterKey::from_hex(&args.master_key).map_err(CliError::data)?;
    let mut generator =
        KeyGenerator::with_params(master, args.t, args.bits).map_err(CliError::data)?;
    for t in 1..=args.count {
        let pair = generator.next_pair().map_err(CliError::data)?;
        println!(
            "t={t} X1=0x{:0width$x} X2=0x{:0width$x}",
            pair.x1,
            pair.x2,
            width = (args.bits as usize).div_ceil(4)
        );
    }
    Ok(())
}

fn gen_image(args: GenImageArgs) -> Result<(), CliError> {
    if args.gray_levels > 256 {
        return Err(CliError::Usage(
            "PGM output supports at most 256 gray levels".into(),
        ));
    }
    let img = Image::seeded(args.seed, args.size, args.gray_levels);
    write_pgm(&args.out, &img)?;
    println!(
        "wrote {} ({}x{}, L={}, seed={})",
        args.out.display(),
        args.size,
        args.size,
        args.gray_levels,
        args.seed
    );
    Ok(())
}

fn perm_csv(args: PermCsvArgs) -> Result<(), CliError> {
    let key = parse_confusion_key(args.map.into(), &args.confusion_key)?;
    let perm = Permutation::from_key(&key, args.size)?;
    let mut file = BufWriter::new(File::create(&args.out)?);
    perm.write_csv(&mut file).map_err(CliError::data)?;
    file.flush()?;
    println!(
        "wrote {} ({} lattice points)",
        args.out.display(),
        perm.point_count()
    );
    Ok(())
}
