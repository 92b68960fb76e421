//! The full cryptosystem: n rounds of confusion (chaotic-map permutation)
//! followed by diffusion (modular recurrence over a pixel scan), with
//! same-key / per-round / grouped key schedules, optional scan-order
//! hardening, and exact decryption.

use thiserror::Error;

use crate::diffusion::{scan_indices, DiffusionError, DiffusionKey, DiffusionKind, ScanOrder};
use crate::image::Image;
use crate::keygen::{KeyGenError, KeyGenerator, MasterKey};
use crate::lattice::{apply_forward, LatticeError, MapKey, MapKind, Permutation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CipherError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("key schedule mismatch: expected {expected} group key pair(s), got {confusion} confusion / {diffusion} diffusion")]
    ConfigKeyMismatch {
        expected: u32,
        confusion: usize,
        diffusion: usize,
    },
    #[error("image is {side}x{side} with {levels} gray levels, config expects {want_side}x{want_side} with {want_levels}")]
    ImageMismatch {
        side: u32,
        levels: u32,
        want_side: u32,
        want_levels: u32,
    },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    KeyGen(#[from] KeyGenError),
}

/// How keys are assigned to rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleMode {
    /// One key pair for all `n` rounds (grouped with `n0 = n`).
    SameKey,
    /// Fresh keys every round (grouped with `n0 = 1`).
    PerRound,
    /// Fresh keys every `n0` consecutive rounds; requires `n0 | n`.
    Grouped,
}

impl ScheduleMode {
    pub const ALL: [ScheduleMode; 3] = [
        ScheduleMode::SameKey,
        ScheduleMode::PerRound,
        ScheduleMode::Grouped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScheduleMode::SameKey => "same-key",
            ScheduleMode::PerRound => "per-round",
            ScheduleMode::Grouped => "grouped",
        }
    }
}

/// Everything that determines a cipher run except the keys themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherConfig {
    pub map_kind: MapKind,
    pub diffusion_kind: DiffusionKind,
    /// Iteration count `n`.
    pub rounds: u32,
    /// Group size `n0`; consulted only when `schedule` is [`ScheduleMode::Grouped`].
    pub group_size: u32,
    pub schedule: ScheduleMode,
    /// Rotate the diffusion scan order each round, displacing the first
    /// scanned pixel away from the maps' (0,0) fixed point.
    pub scan_hardening: bool,
    pub n_side: u32,
    pub gray_levels: u32,
}

impl CipherConfig {
    pub fn validate(&self) -> Result<(), CipherError> {
        if self.rounds == 0 {
            return Err(CipherError::InvalidConfig(
                "iteration count must be >= 1".into(),
            ));
        }
        if self.n_side < 2 {
            return Err(CipherError::InvalidConfig(format!(
                "lattice side must be >= 2, got {}",
                self.n_side
            )));
        }
        if !(2..=crate::image::MAX_GRAY_LEVELS).contains(&self.gray_levels) {
            return Err(CipherError::InvalidConfig(format!(
                "gray levels must be in [2, 65536], got {}",
                self.gray_levels
            )));
        }
        if self.schedule == ScheduleMode::Grouped {
            if self.group_size == 0 || self.group_size > self.rounds {
                return Err(CipherError::InvalidConfig(format!(
                    "group size must satisfy 1 <= n0 <= n, got n0={} n={}",
                    self.group_size, self.rounds
                )));
            }
            if !self.rounds.is_multiple_of(self.group_size) {
                return Err(CipherError::InvalidConfig(format!(
                    "grouped schedule requires n0 | n, got n0={} n={}",
                    self.group_size, self.rounds
                )));
            }
        }
        Ok(())
    }

    /// Rounds per key group: `n` for same-key, 1 for per-round, `n0` grouped.
    pub fn effective_group_size(&self) -> u32 {
        match self.schedule {
            ScheduleMode::SameKey => self.rounds,
            ScheduleMode::PerRound => 1,
            ScheduleMode::Grouped => self.group_size,
        }
    }

    /// Number of key groups, `n / n0`.
    pub fn group_count(&self) -> u32 {
        self.rounds / self.effective_group_size()
    }

    pub fn scan_order_for_round(&self, round: u32) -> ScanOrder {
        if self.scan_hardening {
            ScanOrder::for_round(round)
        } else {
            ScanOrder::TopLeft
        }
    }

    fn check_image(&self, img: &Image) -> Result<(), CipherError> {
        if img.n_side() != self.n_side || img.gray_levels() != self.gray_levels {
            return Err(CipherError::ImageMismatch {
                side: img.n_side(),
                levels: img.gray_levels(),
                want_side: self.n_side,
                want_levels: self.gray_levels,
            });
        }
        Ok(())
    }
}

/// Per-group confusion and diffusion keys; group `g` serves rounds
/// `[g * n0, (g + 1) * n0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundKeys {
    pub confusion: Vec<MapKey>,
    pub diffusion: Vec<DiffusionKey>,
}

impl RoundKeys {
    /// Single key pair, as used by the same-key schedule.
    pub fn single(confusion: MapKey, diffusion: DiffusionKey) -> Self {
        Self {
            confusion: vec![confusion],
            diffusion: vec![diffusion],
        }
    }

    pub fn validate_for(&self, cfg: &CipherConfig) -> Result<(), CipherError> {
        let expected = cfg.group_count();
        if self.confusion.len() != expected as usize || self.diffusion.len() != expected as usize {
            return Err(CipherError::ConfigKeyMismatch {
                expected,
                confusion: self.confusion.len(),
                diffusion: self.diffusion.len(),
            });
        }
        for key in &self.confusion {
            if key.kind() != cfg.map_kind {
                return Err(CipherError::InvalidConfig(format!(
                    "confusion key is a {} key but config selects the {} map",
                    key.kind().name(),
                    cfg.map_kind.name()
                )));
            }
        }
        for key in &self.diffusion {
            if key.q_init >= cfg.gray_levels {
                return Err(CipherError::InvalidConfig(format!(
                    "diffusion key {} outside [0, {})",
                    key.q_init, cfg.gray_levels
                )));
            }
        }
        Ok(())
    }
}

/// Per-invocation instrumentation; `permutation_builds` observes the group
/// economy (one table build per key group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CipherStats {
    pub permutation_builds: u32,
}

pub fn encrypt(img: &Image, cfg: &CipherConfig, keys: &RoundKeys) -> Result<Image, CipherError> {
    encrypt_with_stats(img, cfg, keys).map(|(out, _)| out)
}

pub fn decrypt(img: &Image, cfg: &CipherConfig, keys: &RoundKeys) -> Result<Image, CipherError> {
    decrypt_with_stats(img, cfg, keys).map(|(out, _)| out)
}

pub fn encrypt_with_stats(
    img: &Image,
    cfg: &CipherConfig,
    keys: &RoundKeys,
) -> Result<(Image, CipherStats), CipherError> {
    cfg.validate()?;
    keys.validate_for(cfg)?;
    cfg.check_image(img)?;

    let group_size = cfg.effective_group_size();
    let mut stats = CipherStats::default();
    let mut scans = ScanCache::default();
    let mut pixels = img.pixels().to_vec();
    let mut scratch = vec![0u32; pixels.len()];
    let mut perm: Option<Permutation> = None;
    let mut current_group = u32::MAX;

    for round in 0..cfg.rounds {
        let group = round / group_size;
        if group != current_group {
            perm = Some(Permutation::from_key(
                &keys.confusion[group as usize],
                cfg.n_side,
            )?);
            stats.permutation_builds += 1;
            current_group = group;
        }
        let table = perm.as_ref().expect("permutation built on group entry");
        apply_forward(table.forward(), &pixels, &mut scratch);
        std::mem::swap(&mut pixels, &mut scratch);

        let indices = scans.get(cfg.scan_order_for_round(round), cfg.n_side);
        diffuse_in_place(
            &mut pixels,
            indices,
            cfg,
            keys.diffusion[group as usize],
            false,
        )?;
    }

    let mut out = img.clone();
    out.replace_pixels(pixels);
    Ok((out, stats))
}

pub fn decrypt_with_stats(
    img: &Image,
    cfg: &CipherConfig,
    keys: &RoundKeys,
) -> Result<(Image, CipherStats), CipherError> {
    cfg.validate()?;
    keys.validate_for(cfg)?;
    cfg.check_image(img)?;

    let group_size = cfg.effective_group_size();
    let mut stats = CipherStats::default();
    let mut scans = ScanCache::default();
    let mut pixels = img.pixels().to_vec();
    let mut scratch = vec![0u32; pixels.len()];
    let mut perm: Option<Permutation> = None;
    let mut current_group = u32::MAX;

    for round in (0..cfg.rounds).rev() {
        let group = round / group_size;
        if group != current_group {
            perm = Some(Permutation::from_key(
                &keys.confusion[group as usize],
                cfg.n_side,
            )?);
            stats.permutation_builds += 1;
            current_group = group;
        }
        let indices = scans.get(cfg.scan_order_for_round(round), cfg.n_side);
        diffuse_in_place(
            &mut pixels,
            indices,
            cfg,
            keys.diffusion[group as usize],
            true,
        )?;

        // Undo the confusion: the forward table says where each pixel went.
        let table = perm.as_ref().expect("permutation built on group entry");
        apply_forward(table.inverse(), &pixels, &mut scratch);
        std::mem::swap(&mut pixels, &mut scratch);
    }

    let mut out = img.clone();
    out.replace_pixels(pixels);
    Ok((out, stats))
}

/// Expand a master key into the `n / n0` key pairs the schedule needs.
/// Identical masters yield identical schedules.
pub fn derive_round_keys(master: &MasterKey, cfg: &CipherConfig) -> Result<RoundKeys, CipherError> {
    cfg.validate()?;
    let mut generator = KeyGenerator::new(master.clone());
    let pairs = generator.take_pairs(cfg.group_count() as usize)?;
    Ok(crate::keygen::subkeys_to_round_keys(&pairs, cfg)?)
}

fn diffuse_in_place(
    pixels: &mut [u32],
    scan: &[usize],
    cfg: &CipherConfig,
    key: DiffusionKey,
    invert: bool,
) -> Result<(), CipherError> {
    let seq: Vec<u32> = scan.iter().map(|&i| pixels[i]).collect();
    let out = if invert {
        cfg.diffusion_kind.undiffuse(&seq, key, cfg.gray_levels)?
    } else {
        cfg.diffusion_kind.diffuse(&seq, key, cfg.gray_levels)?
    };
    for (&i, &v) in scan.iter().zip(&out) {
        pixels[i] = v;
    }
    Ok(())
}

/// Lazily built scan-index sequences, one per order actually used.
#[derive(Default)]
struct ScanCache {
    orders: [Option<Vec<usize>>; 4],
}

impl ScanCache {
    fn get(&mut self, order: ScanOrder, n_side: u32) -> &[usize] {
        let slot = ScanOrder::ALL
            .iter()
            .position(|&o| o == order)
            .expect("order in ALL");
        self.orders[slot].get_or_insert_with(|| scan_indices(order, n_side))
    }
}
