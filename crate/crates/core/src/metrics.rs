//! Quantitative security metrics and the key-space / computing-complexity
//! reports.
//!
//! * `Cdr` — ciphertext difference rate between confusions under perturbed
//!   keys: `(Diff(Y, Y1) + Diff(Y, Y2)) / 2N^2 * 100`.
//! * `Adc` — average distance change: how far a permutation tears apart the
//!   four neighbors of each 2x2 cell, normalized by N and given in percent.
//!   The identity permutation scores exactly `100/N`.
//! * `Pcr` — pixel change rate `Diff(Y, Y') / N^2 * 100` after a one-bit
//!   plaintext change.

use std::io::{self, Write};

use thiserror::Error;

use crate::cipher::{CipherConfig, ScheduleMode};
use crate::diffusion::DiffusionKind;
use crate::image::Image;
use crate::lattice::{MapKind, Permutation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error(
        "images differ in shape: {a_side}x{a_side}/L={a_levels} vs {b_side}x{b_side}/L={b_levels}"
    )]
    SizeMismatch {
        a_side: u32,
        a_levels: u32,
        b_side: u32,
        b_levels: u32,
    },
    #[error("flip bit {bit} takes pixel {index} outside [0, {gray_levels})")]
    InvalidFlip {
        index: usize,
        bit: u32,
        gray_levels: u32,
    },
}

fn check_same_shape(a: &Image, b: &Image) -> Result<(), MetricsError> {
    if a.n_side() != b.n_side() || a.gray_levels() != b.gray_levels() {
        return Err(MetricsError::SizeMismatch {
            a_side: a.n_side(),
            a_levels: a.gray_levels(),
            b_side: b.n_side(),
            b_levels: b.gray_levels(),
        });
    }
    Ok(())
}

/// Number of positions where the two images disagree.
pub fn diff_count(a: &Image, b: &Image) -> Result<usize, MetricsError> {
    check_same_shape(a, b)?;
    Ok(a.pixels()
        .iter()
        .zip(b.pixels())
        .filter(|(x, y)| x != y)
        .count())
}

/// Ciphertext difference rate against two perturbed-key ciphertexts, percent.
pub fn cdr(y: &Image, y1: &Image, y2: &Image) -> Result<f64, MetricsError> {
    let d1 = diff_count(y, y1)?;
    let d2 = diff_count(y, y2)?;
    let denom = 2.0 * y.pixels().len() as f64;
    Ok((d1 + d2) as f64 / denom * 100.0)
}

/// Pixel change rate, percent of positions changed.
pub fn pcr(y: &Image, yp: &Image) -> Result<f64, MetricsError> {
    let d = diff_count(y, yp)?;
    Ok(d as f64 / y.pixels().len() as f64 * 100.0)
}

/// Average distance change of a permutation, percent.
///
/// For every 2x2 cell with top-left `(i, j)`, `i, j <= N-2`, average the
/// Euclidean distances between the images of the four edge-adjacent corner
/// pairs, then average over the `(N-1)^2` cells, divide by N and scale to
/// percent.
pub fn adc(perm: &Permutation) -> f64 {
    adc_on_table(perm.forward(), perm.n_side())
}

pub(crate) fn adc_on_table(forward: &[u32], n_side: u32) -> f64 {
    debug_assert!(n_side >= 2);
    let n = n_side as usize;
    let dest = |x: usize, y: usize| -> (f64, f64) {
        let d = forward[y * n + x] as usize;
        ((d % n) as f64, (d / n) as f64)
    };
    let dist = |a: (f64, f64), b: (f64, f64)| -> f64 {
        let (dx, dy) = (a.0 - b.0, a.1 - b.1);
        (dx * dx + dy * dy).sqrt()
    };
    let mut total = 0.0;
    for y in 0..n - 1 {
        for x in 0..n - 1 {
            let tl = dest(x, y);
            let tr = dest(x + 1, y);
            let bl = dest(x, y + 1);
            let br = dest(x + 1, y + 1);
            total += (dist(tl, tr) + dist(tl, bl) + dist(tr, br) + dist(bl, br)) / 4.0;
        }
    }
    let cells = ((n - 1) * (n - 1)) as f64;
    total / cells / f64::from(n_side) * 100.0
}

/// One metric curve: `(sweep_value, percent)` rows ordered by sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub label: String,
    pub rows: Vec<(f64, f64)>,
}

/// Metadata recorded in the CSV header so a series is reproducible.
#[derive(Debug, Clone)]
pub struct CsvMeta {
    pub metric: String,
    pub map: String,
    pub n_side: u32,
    pub gray_levels: u32,
    pub seed: u64,
}

impl MetricSeries {
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    /// `# metric=.. map=.. N=.. L=.. seed=..` header, then one
    /// `sweep_value,percent` row per entry, six decimal places.
    pub fn write_csv<W: Write>(&self, mut w: W, meta: &CsvMeta) -> io::Result<()> {
        writeln!(
            w,
            "# metric={} map={} N={} L={} seed={}",
            meta.metric, meta.map, meta.n_side, meta.gray_levels, meta.seed
        )?;
        writeln!(w, "sweep_value,percent")?;
        for (value, percent) in &self.rows {
            writeln!(w, "{value:.6},{percent:.6}")?;
        }
        Ok(())
    }
}

/// Key-space accounting for one map family and schedule, in log2 terms.
#[derive(Debug, Clone, PartialEq)]
pub struct KeySpaceReport {
    pub map_kind: MapKind,
    pub schedule: ScheduleMode,
    pub rounds: u32,
    pub key_groups: u32,
    pub log2_parameter_space: f64,
    pub log2_total_key_space: f64,
}

/// log2 of the confusion parameter space: `N^2` (cat), `2^(N-1)` (baker),
/// `(N^2)!` (standard).
pub fn log2_parameter_space(map_kind: MapKind, n_side: u32) -> f64 {
    match map_kind {
        MapKind::Cat => 2.0 * f64::from(n_side).log2(),
        MapKind::Baker => f64::from(n_side) - 1.0,
        MapKind::Standard => log2_factorial(u64::from(n_side) * u64::from(n_side)),
    }
}

/// `log2(m!)` by direct summation; exact enough (and dependency-free) for
/// lattice sides up to a few thousand.
pub fn log2_factorial(m: u64) -> f64 {
    (2..=m).map(|k| (k as f64).log2()).sum()
}

/// Total key space: one confusion/diffusion pair per key group, so
/// `groups * (log2 S1 + log2 L)`. Same-key uses one group, per-round uses n.
pub fn keyspace_report(
    map_kind: MapKind,
    n_side: u32,
    gray_levels: u32,
    rounds: u32,
    schedule: ScheduleMode,
    group_size: u32,
) -> KeySpaceReport {
    let key_groups = match schedule {
        ScheduleMode::SameKey => 1,
        ScheduleMode::PerRound => rounds,
        ScheduleMode::Grouped => rounds / group_size.max(1),
    };
    let log2_parameter_space = log2_parameter_space(map_kind, n_side);
    let per_group = log2_parameter_space + f64::from(gray_levels).log2();
    KeySpaceReport {
        map_kind,
        schedule,
        rounds,
        key_groups,
        log2_parameter_space,
        log2_total_key_space: f64::from(key_groups) * per_group,
    }
}

/// Operation counts in abstract units: `additions` multiples of one
/// addition/subtraction (`a`), `multiplications` of one multiply/divide (`b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpCost {
    pub additions: u64,
    pub multiplications: u64,
}

impl OpCost {
    fn scaled(self, times: u64) -> OpCost {
        OpCost {
            additions: self.additions * times,
            multiplications: self.multiplications * times,
        }
    }

    fn plus(self, other: OpCost) -> OpCost {
        OpCost {
            additions: self.additions + other.additions,
            multiplications: self.multiplications + other.multiplications,
        }
    }
}

/// Per-N^2 coefficients of one confusion pass: (additions, multiplications).
pub fn confusion_cost_coeffs(map_kind: MapKind) -> (u64, u64) {
    match map_kind {
        MapKind::Cat => (2, 3),
        MapKind::Baker => (2, 2),
        MapKind::Standard => (2, 4),
    }
}

/// Per-N^2 coefficients of one diffusion pass.
pub fn diffusion_cost_coeffs(kind: DiffusionKind) -> (u64, u64) {
    match kind {
        DiffusionKind::Add => (1, 1),
        DiffusionKind::Pow => (1, 2),
    }
}

/// Cost of one confusion pass over an `N x N` image.
pub fn confusion_cost(map_kind: MapKind, n_side: u32) -> OpCost {
    let (a, b) = confusion_cost_coeffs(map_kind);
    let n2 = u64::from(n_side) * u64::from(n_side);
    OpCost {
        additions: a * n2,
        multiplications: b * n2,
    }
}

/// Cost of one diffusion pass over an `N x N` image.
pub fn diffusion_cost(kind: DiffusionKind, n_side: u32) -> OpCost {
    let (a, b) = diffusion_cost_coeffs(kind);
    let n2 = u64::from(n_side) * u64::from(n_side);
    OpCost {
        additions: a * n2,
        multiplications: b * n2,
    }
}

/// Aggregate cost of a full run: confusion recomputed once per key group,
/// diffusion applied every round — `(n/n0) * Rc + n * Rd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityReport {
    pub confusion_passes: u32,
    pub diffusion_passes: u32,
    pub confusion: OpCost,
    pub diffusion: OpCost,
    pub total: OpCost,
}

pub fn complexity_report(cfg: &CipherConfig) -> ComplexityReport {
    let groups = cfg.group_count();
    let confusion = confusion_cost(cfg.map_kind, cfg.n_side);
    let diffusion = diffusion_cost(cfg.diffusion_kind, cfg.n_side);
    let total = confusion
        .scaled(u64::from(groups))
        .plus(diffusion.scaled(u64::from(cfg.rounds)));
    ComplexityReport {
        confusion_passes: groups,
        diffusion_passes: cfg.rounds,
        confusion,
        diffusion,
        total,
    }
}
