//! Sweep drivers: Cdr and Adc curves over key families and iteration counts,
//! and Pcr curves over diffusion-only rounds.
//!
//! Sweeps are confusion-only (Cdr, Adc) or diffusion-only (Pcr); the full
//! cipher never enters here. Each key in a family is processed independently
//! and in parallel; results are merged in sweep-value order.

use rayon::prelude::*;
use thiserror::Error;

use crate::diffusion::{DiffusionError, DiffusionKey, DiffusionKind};
use crate::image::Image;
use crate::lattice::{BakerKey, CatKey, LatticeError, MapKey, MapKind, Permutation, StandardKey};
use crate::metrics::{adc_on_table, MetricSeries, MetricsError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep range is empty: n_min={n_min} n_max={n_max}")]
    EmptyRange { n_min: u32, n_max: u32 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// A named, ordered collection of confusion keys to sweep over.
///
/// Perturbation for the Cdr experiment follows the per-family conventions:
/// standard keys move to `k - 1` / `k + 1`, cat keys to `v - 1` / `v + 1`
/// (mod N), and baker keys swap to their neighbors in the family list, which
/// for the shift families below is exactly an adjacent strip swap.
#[derive(Debug, Clone)]
pub enum KeyFamily {
    Standard(Vec<u64>),
    Cat(Vec<(u64, u64)>),
    Baker(Vec<BakerKey>),
}

impl KeyFamily {
    /// Standard-map sweep `k in {0, 500, ..., 50000}`.
    pub fn standard_default() -> Self {
        KeyFamily::Standard((0..=100).map(|i| i * 500).collect())
    }

    /// The 16x16 parameter subgrid with both axes evenly spread over `[0, N-1]`.
    pub fn cat_grid(n_side: u32) -> Self {
        let values: Vec<u64> = (0..16).map(|k| k * (u64::from(n_side) - 1) / 15).collect();
        let pairs = values
            .iter()
            .flat_map(|&u| values.iter().map(move |&v| (u, v)))
            .collect();
        KeyFamily::Cat(pairs)
    }

    /// Baker compositions `[2, ..., 2, 8, 2, ..., 2]` with the wide strip at
    /// every position; adjacent family members differ by one strip swap.
    pub fn baker_heavy_shift(n_side: u32) -> Result<Self, LatticeError> {
        const HEAVY: u32 = 8;
        const FILLER: u32 = 2;
        if n_side < 2 * HEAVY || !n_side.is_multiple_of(HEAVY) {
            return Err(LatticeError::InvalidBakerKey(format!(
                "heavy-shift family needs {HEAVY} | N and N >= {}, got N={n_side}",
                2 * HEAVY
            )));
        }
        let fillers = ((n_side - HEAVY) / FILLER) as usize;
        let mut keys = Vec::with_capacity(fillers + 1);
        for pos in 0..=fillers {
            let mut strips = vec![FILLER; fillers + 1];
            strips[pos] = HEAVY;
            keys.push(BakerKey::new(strips)?);
        }
        Ok(KeyFamily::Baker(keys))
    }

    /// Rotations of the halving composition `[N/2, N/4, ..., 4, 2, 2]`; mixed
    /// strip widths avoid the near-periodic behavior of uniform compositions.
    pub fn baker_strip_rotations(n_side: u32) -> Result<Self, LatticeError> {
        if !n_side.is_power_of_two() || n_side < 8 {
            return Err(LatticeError::InvalidBakerKey(format!(
                "rotation family needs a power-of-two N >= 8, got N={n_side}"
            )));
        }
        let mut base = Vec::new();
        let mut width = n_side / 2;
        while width >= 2 {
            base.push(width);
            width /= 2;
        }
        base.push(2);
        let keys = (0..base.len())
            .map(|i| {
                let mut strips = base[i..].to_vec();
                strips.extend_from_slice(&base[..i]);
                BakerKey::new(strips)
            })
            .collect::<Result<_, _>>()?;
        Ok(KeyFamily::Baker(keys))
    }

    pub fn map_kind(&self) -> MapKind {
        match self {
            KeyFamily::Standard(_) => MapKind::Standard,
            KeyFamily::Cat(_) => MapKind::Cat,
            KeyFamily::Baker(_) => MapKind::Baker,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            KeyFamily::Standard(ks) => ks.len(),
            KeyFamily::Cat(ps) => ps.len(),
            KeyFamily::Baker(ks) => ks.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn key(&self, index: usize) -> MapKey {
        match self {
            KeyFamily::Standard(ks) => MapKey::Standard(StandardKey { k: ks[index] }),
            KeyFamily::Cat(ps) => MapKey::Cat(CatKey {
                u: ps[index].0,
                v: ps[index].1,
            }),
            KeyFamily::Baker(ks) => MapKey::Baker(ks[index].clone()),
        }
    }

    /// The x-axis value a key contributes to a series: the parameter itself
    /// for standard keys, the family index otherwise.
    pub fn sweep_value(&self, index: usize) -> f64 {
        match self {
            KeyFamily::Standard(ks) => ks[index] as f64,
            _ => index as f64,
        }
    }

    /// The `K - dK` / `K + dK` pair for the Cdr experiment, or the reason the
    /// sample must be skipped.
    fn perturbed(&self, index: usize, n_side: u32) -> Result<(MapKey, MapKey), String> {
        match self {
            KeyFamily::Standard(ks) => {
                let k = ks[index];
                if k == 0 {
                    return Err("standard key 0 has no valid k - 1 neighbor".into());
                }
                Ok((
                    MapKey::Standard(StandardKey { k: k - 1 }),
                    MapKey::Standard(StandardKey { k: k + 1 }),
                ))
            }
            KeyFamily::Cat(ps) => {
                let (u, v) = ps[index];
                let n = u64::from(n_side);
                Ok((
                    MapKey::Cat(CatKey {
                        u,
                        v: (v + n - 1) % n,
                    }),
                    MapKey::Cat(CatKey { u, v: (v + 1) % n }),
                ))
            }
            KeyFamily::Baker(ks) => {
                if index == 0 || index + 1 == ks.len() {
                    return Err("baker family endpoint has no swap neighbor on one side".into());
                }
                Ok((
                    MapKey::Baker(ks[index - 1].clone()),
                    MapKey::Baker(ks[index + 1].clone()),
                ))
            }
        }
    }
}

/// Shared sweep parameters; `seed` generates the test image and is recorded
/// in CSV headers.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub n_side: u32,
    pub gray_levels: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub seed: u64,
}

impl SweepConfig {
    fn validate(&self) -> Result<(), SweepError> {
        if self.n_min > self.n_max {
            return Err(SweepError::EmptyRange {
                n_min: self.n_min,
                n_max: self.n_max,
            });
        }
        Ok(())
    }
}

/// A key the sweep had to leave out, with the offending sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedKey {
    pub sweep_value: f64,
    pub reason: String,
}

/// All series produced by one sweep (one per iteration count), plus any
/// skipped samples.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub series: Vec<MetricSeries>,
    pub skipped: Vec<SkippedKey>,
}

enum KeyOutcome {
    Curve {
        sweep_value: f64,
        rows: Vec<(u32, f64)>,
    },
    Skipped(SkippedKey),
}

fn count_diff(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Ciphertext difference rate per key and iteration count: confuse the seeded
/// test image under `K - dK`, `K`, `K + dK` and count differing positions.
/// Iteration counts below 1 are meaningless here and clamped up.
pub fn cdr_sweep(family: &KeyFamily, cfg: &SweepConfig) -> Result<SweepResult, SweepError> {
    cfg.validate()?;
    let image = Image::seeded(cfg.seed, cfg.n_side, cfg.gray_levels);
    let n_lo = cfg.n_min.max(1);

    let outcomes: Vec<KeyOutcome> = (0..family.len())
        .into_par_iter()
        .map(|i| -> Result<KeyOutcome, SweepError> {
            let sweep_value = family.sweep_value(i);
            let (minus, plus) = match family.perturbed(i, cfg.n_side) {
                Ok(pair) => pair,
                Err(reason) => {
                    return Ok(KeyOutcome::Skipped(SkippedKey {
                        sweep_value,
                        reason,
                    }))
                }
            };
            let center = Permutation::from_key(&family.key(i), cfg.n_side)?;
            let minus = Permutation::from_key(&minus, cfg.n_side)?;
            let plus = Permutation::from_key(&plus, cfg.n_side)?;

            let mut y = image.pixels().to_vec();
            let mut y1 = y.clone();
            let mut y2 = y.clone();
            let mut scratch = vec![0u32; y.len()];
            let mut rows = Vec::new();
            let denom = 2.0 * y.len() as f64;
            for n in 1..=cfg.n_max {
                for (pixels, perm) in [(&mut y, &center), (&mut y1, &minus), (&mut y2, &plus)] {
                    crate::lattice::apply_forward(perm.forward(), pixels, &mut scratch);
                    std::mem::swap(pixels, &mut scratch);
                }
                if n >= n_lo {
                    let rate = (count_diff(&y, &y1) + count_diff(&y, &y2)) as f64 / denom * 100.0;
                    rows.push((n, rate));
                }
            }
            Ok(KeyOutcome::Curve { sweep_value, rows })
        })
        .collect::<Result<_, _>>()?;

    Ok(assemble("cdr", n_lo, cfg.n_max, outcomes))
}

/// Average distance change per key and iteration count, on the n-fold
/// composed permutation. Supports `n_min = 0` (the identity permutation).
pub fn adc_sweep(family: &KeyFamily, cfg: &SweepConfig) -> Result<SweepResult, SweepError> {
    cfg.validate()?;
    let outcomes: Vec<KeyOutcome> = (0..family.len())
        .into_par_iter()
        .map(|i| -> Result<KeyOutcome, SweepError> {
            let perm = Permutation::from_key(&family.key(i), cfg.n_side)?;
            let mut composed: Vec<u32> = (0..perm.point_count() as u32).collect();
            let mut rows = Vec::new();
            for n in 0..=cfg.n_max {
                if n >= 1 {
                    for slot in composed.iter_mut() {
                        *slot = perm.forward()[*slot as usize];
                    }
                }
                if n >= cfg.n_min {
                    rows.push((n, adc_on_table(&composed, cfg.n_side)));
                }
            }
            Ok(KeyOutcome::Curve {
                sweep_value: family.sweep_value(i),
                rows,
            })
        })
        .collect::<Result<_, _>>()?;

    Ok(assemble("adc", cfg.n_min, cfg.n_max, outcomes))
}

fn assemble(metric: &str, n_lo: u32, n_hi: u32, outcomes: Vec<KeyOutcome>) -> SweepResult {
    let mut skipped = Vec::new();
    let mut curves = Vec::new();
    for outcome in outcomes {
        match outcome {
            KeyOutcome::Curve { sweep_value, rows } => curves.push((sweep_value, rows)),
            KeyOutcome::Skipped(s) => skipped.push(s),
        }
    }
    let mut series = Vec::new();
    for n in n_lo..=n_hi {
        let mut s = MetricSeries {
            label: format!("{metric}_n{n}"),
            rows: curves
                .iter()
                .map(|(value, rows)| {
                    let percent = rows
                        .iter()
                        .find(|(rn, _)| *rn == n)
                        .map(|(_, p)| *p)
                        .expect("every curve covers the full range");
                    (*value, percent)
                })
                .collect(),
        };
        s.sort_rows();
        series.push(s);
    }
    SweepResult { series, skipped }
}

/// Which bit of which scanned pixel a Pcr experiment flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipSpec {
    /// Flat index into the row-major scan.
    pub scan_index: usize,
    /// Bit to XOR into that pixel.
    pub bit: u32,
}

/// Pixel change rate after `n` diffusion-only rounds, `n = 1..=n_max`, of the
/// image versus the image with one bit flipped.
pub fn pcr_curve(
    img: &Image,
    kind: DiffusionKind,
    key: DiffusionKey,
    n_max: u32,
    flip: FlipSpec,
) -> Result<MetricSeries, SweepError> {
    let mut flipped = img.clone();
    flipped
        .flip_pixel_bit(flip.scan_index, flip.bit)
        .map_err(|_| {
            SweepError::Metrics(MetricsError::InvalidFlip {
                index: flip.scan_index,
                bit: flip.bit,
                gray_levels: img.gray_levels(),
            })
        })?;

    let l = img.gray_levels();
    let mut a = img.pixels().to_vec();
    let mut b = flipped.into_pixels();
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        a = kind.diffuse(&a, key, l)?;
        b = kind.diffuse(&b, key, l)?;
        let rate = count_diff(&a, &b) as f64 / a.len() as f64 * 100.0;
        rows.push((f64::from(n), rate));
    }
    Ok(MetricSeries {
        label: format!("pcr_{}", kind.name()),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::cdr;

    #[test]
    fn families_have_expected_shapes() {
        assert_eq!(KeyFamily::standard_default().len(), 101);
        let grid = KeyFamily::cat_grid(256);
        assert_eq!(grid.len(), 256);
        match &grid {
            KeyFamily::Cat(pairs) => {
                assert_eq!(pairs[0], (0, 0));
                assert_eq!(pairs[255], (255, 255));
                assert!(pairs.iter().all(|&(u, v)| u % 17 == 0 && v % 17 == 0));
            }
            _ => unreachable!(),
        }
        let shift = KeyFamily::baker_heavy_shift(16).unwrap();
        assert_eq!(shift.len(), 5);
        let rotations = KeyFamily::baker_strip_rotations(16).unwrap();
        assert_eq!(rotations.len(), 4);
        match &rotations {
            KeyFamily::Baker(keys) => assert_eq!(keys[0].strips(), &[8, 4, 2, 2]),
            _ => unreachable!(),
        }
        assert!(KeyFamily::baker_heavy_shift(12).is_err());
        assert!(KeyFamily::baker_strip_rotations(6).is_err());
    }

    #[test]
    fn standard_zero_key_is_skipped_and_flagged() {
        let family = KeyFamily::Standard(vec![0, 500]);
        let cfg = SweepConfig {
            n_side: 16,
            gray_levels: 256,
            n_min: 1,
            n_max: 2,
            seed: 5,
        };
        let result = cdr_sweep(&family, &cfg).unwrap();
        assert_eq!(result.skipped.len(), 1);
        assert_eq!(result.skipped[0].sweep_value, 0.0);
        assert_eq!(result.series.len(), 2);
        for s in &result.series {
            assert_eq!(s.rows.len(), 1);
            assert_eq!(s.rows[0].0, 500.0);
        }
    }

    #[test]
    fn baker_family_endpoints_are_skipped() {
        let family = KeyFamily::baker_heavy_shift(16).unwrap();
        let cfg = SweepConfig {
            n_side: 16,
            gray_levels: 256,
            n_min: 1,
            n_max: 1,
            seed: 5,
        };
        let result = cdr_sweep(&family, &cfg).unwrap();
        assert_eq!(result.skipped.len(), 2);
        assert_eq!(result.series[0].rows.len(), family.len() - 2);
    }

    #[test]
    fn cdr_sweep_matches_the_public_metric_on_one_key() {
        let family = KeyFamily::Cat(vec![(3, 5)]);
        let cfg = SweepConfig {
            n_side: 8,
            gray_levels: 256,
            n_min: 2,
            n_max: 2,
            seed: 9,
        };
        let result = cdr_sweep(&family, &cfg).unwrap();

        let image = Image::seeded(9, 8, 256);
        let n = 8u32;
        let confuse = |u: u64, v: u64| {
            let perm = Permutation::from_key(&MapKey::Cat(CatKey { u, v }), n).unwrap();
            let mut out = image.clone();
            for _ in 0..2 {
                out = perm.apply_to_image(&out).unwrap();
            }
            out
        };
        let want = cdr(&confuse(3, 5), &confuse(3, 4), &confuse(3, 6)).unwrap();
        assert_eq!(result.series[0].rows[0].1, want);
    }

    #[test]
    fn adc_sweep_starts_at_the_identity_value() {
        let family = KeyFamily::Cat(vec![(1, 1), (2, 3)]);
        let cfg = SweepConfig {
            n_side: 16,
            gray_levels: 256,
            n_min: 0,
            n_max: 1,
            seed: 0,
        };
        let result = adc_sweep(&family, &cfg).unwrap();
        assert_eq!(result.series[0].label, "adc_n0");
        for &(_, percent) in &result.series[0].rows {
            assert_eq!(percent, 100.0 / 16.0);
        }
        for &(_, percent) in &result.series[1].rows {
            assert!(percent > 100.0 / 16.0);
        }
    }

    #[test]
    fn pcr_curve_shape_and_validation() {
        let img = Image::seeded(3, 16, 256);
        let series = pcr_curve(
            &img,
            DiffusionKind::Add,
            DiffusionKey { q_init: 7 },
            10,
            FlipSpec {
                scan_index: 0,
                bit: 0,
            },
        )
        .unwrap();
        assert_eq!(series.rows.len(), 10);
        assert!(series.rows.iter().all(|&(_, p)| (0.0..=100.0).contains(&p)));

        let small = Image::zero(4, 16).unwrap();
        let err = pcr_curve(
            &small,
            DiffusionKind::Add,
            DiffusionKey { q_init: 0 },
            3,
            FlipSpec {
                scan_index: 0,
                bit: 7,
            },
        );
        assert!(err.is_err());
    }

    #[test]
    fn empty_range_is_rejected() {
        let family = KeyFamily::Cat(vec![(1, 1)]);
        let cfg = SweepConfig {
            n_side: 8,
            gray_levels: 256,
            n_min: 3,
            n_max: 2,
            seed: 0,
        };
        assert!(matches!(
            cdr_sweep(&family, &cfg),
            Err(SweepError::EmptyRange { .. })
        ));
    }
}
