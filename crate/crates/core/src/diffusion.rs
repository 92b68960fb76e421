//! Pixel-value diffusion: sequential modular recurrences over a scan of the
//! image, their exact inverses, and the corner-start raster scan orders used
//! by the scan-order hardening.
//!
//! Both recurrences seed from the diffusion key `q_init`:
//!
//! * add: `Q_i = (P_i + Q_{i-1}) mod L`
//! * pow: `Q_i = (P_i + Q_{i-1}^2) mod L`
//!
//! All arithmetic is exact unsigned integer math; squares are computed in
//! 64-bit intermediates, which cannot overflow for `L <= 2^16`.

use thiserror::Error;

use crate::lattice::Point;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiffusionError {
    #[error("pixel {index} has value {value}, outside [0, {gray_levels})")]
    PixelOutOfRange {
        index: usize,
        value: u32,
        gray_levels: u32,
    },
    #[error("gray levels must be in [2, 65536], got {0}")]
    BadGrayLevels(u32),
}

/// The diffusion key: the initial value `Q_{-1}` of the recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiffusionKey {
    pub q_init: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiffusionKind {
    Add,
    Pow,
}

impl DiffusionKind {
    pub const ALL: [DiffusionKind; 2] = [DiffusionKind::Add, DiffusionKind::Pow];

    pub fn name(self) -> &'static str {
        match self {
            DiffusionKind::Add => "add",
            DiffusionKind::Pow => "pow",
        }
    }

    pub fn diffuse(
        self,
        pixels: &[u32],
        key: DiffusionKey,
        gray_levels: u32,
    ) -> Result<Vec<u32>, DiffusionError> {
        match self {
            DiffusionKind::Add => diffuse_add(pixels, key, gray_levels),
            DiffusionKind::Pow => diffuse_pow(pixels, key, gray_levels),
        }
    }

    pub fn undiffuse(
        self,
        pixels: &[u32],
        key: DiffusionKey,
        gray_levels: u32,
    ) -> Result<Vec<u32>, DiffusionError> {
        match self {
            DiffusionKind::Add => undiffuse_add(pixels, key, gray_levels),
            DiffusionKind::Pow => undiffuse_pow(pixels, key, gray_levels),
        }
    }
}

/// Corner-start row-major raster orders. Rows are traversed away from the
/// start corner; the first scanned pixel is the corner itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanOrder {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl ScanOrder {
    pub const ALL: [ScanOrder; 4] = [
        ScanOrder::TopLeft,
        ScanOrder::TopRight,
        ScanOrder::BottomLeft,
        ScanOrder::BottomRight,
    ];

    /// Hardened schedule: round `r` scans in order `r mod 4`, starting
    /// top-left for `r = 0`. Deterministic and key-independent; consecutive
    /// rounds always start at different corners.
    pub fn for_round(round: u32) -> Self {
        Self::ALL[(round % 4) as usize]
    }

    pub fn name(self) -> &'static str {
        match self {
            ScanOrder::TopLeft => "raster-tl",
            ScanOrder::TopRight => "raster-tr",
            ScanOrder::BottomLeft => "raster-bl",
            ScanOrder::BottomRight => "raster-br",
        }
    }
}

/// The full scan as lattice points; a permutation of all `N^2` points whose
/// first element is the order's start corner.
pub fn scan_sequence(order: ScanOrder, n_side: u32) -> Vec<Point> {
    scan_indices(order, n_side)
        .into_iter()
        .map(|i| Point::from_index(i, n_side))
        .collect()
}

/// The same scan as row-major flat indices, the form the cipher consumes.
pub fn scan_indices(order: ScanOrder, n_side: u32) -> Vec<usize> {
    let n = n_side as usize;
    let mut out = Vec::with_capacity(n * n);
    let rows: Vec<usize> = match order {
        ScanOrder::TopLeft | ScanOrder::TopRight => (0..n).collect(),
        ScanOrder::BottomLeft | ScanOrder::BottomRight => (0..n).rev().collect(),
    };
    for y in rows {
        match order {
            ScanOrder::TopLeft | ScanOrder::BottomLeft => out.extend((0..n).map(|x| y * n + x)),
            ScanOrder::TopRight | ScanOrder::BottomRight => {
                out.extend((0..n).rev().map(|x| y * n + x))
            }
        }
    }
    out
}

fn check_inputs(pixels: &[u32], key: DiffusionKey, gray_levels: u32) -> Result<(), DiffusionError> {
    if !(2..=crate::image::MAX_GRAY_LEVELS).contains(&gray_levels) {
        return Err(DiffusionError::BadGrayLevels(gray_levels));
    }
    if key.q_init >= gray_levels {
        return Err(DiffusionError::PixelOutOfRange {
            index: 0,
            value: key.q_init,
            gray_levels,
        });
    }
    if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, &v)| v >= gray_levels) {
        return Err(DiffusionError::PixelOutOfRange {
            index,
            value,
            gray_levels,
        });
    }
    Ok(())
}

/// `Q_i = (P_i + Q_{i-1}) mod L` with `Q_{-1} = q_init`.
pub fn diffuse_add(
    pixels: &[u32],
    key: DiffusionKey,
    gray_levels: u32,
) -> Result<Vec<u32>, DiffusionError> {
    check_inputs(pixels, key, gray_levels)?;
    let mut prev = key.q_init;
    Ok(pixels
        .iter()
        .map(|&p| {
            prev = (p + prev) % gray_levels;
            prev
        })
        .collect())
}

/// `Q_i = (P_i + Q_{i-1}^2) mod L` with `Q_{-1} = q_init`.
pub fn diffuse_pow(
    pixels: &[u32],
    key: DiffusionKey,
    gray_levels: u32,
) -> Result<Vec<u32>, DiffusionError> {
    check_inputs(pixels, key, gray_levels)?;
    let l = u64::from(gray_levels);
    let mut prev = u64::from(key.q_init);
    Ok(pixels
        .iter()
        .map(|&p| {
            prev = (u64::from(p) + prev * prev) % l;
            prev as u32
        })
        .collect())
}

/// Exact inverse of [`diffuse_add`]: `P_i = (Q_i - Q_{i-1}) mod L`.
pub fn undiffuse_add(
    pixels: &[u32],
    key: DiffusionKey,
    gray_levels: u32,
) -> Result<Vec<u32>, DiffusionError> {
    check_inputs(pixels, key, gray_levels)?;
    let mut prev = key.q_init;
    Ok(pixels
        .iter()
        .map(|&q| {
            let p = (q + gray_levels - prev) % gray_levels;
            prev = q;
            p
        })
        .collect())
}

/// Exact inverse of [`diffuse_pow`]: `P_i = (Q_i - Q_{i-1}^2) mod L`.
pub fn undiffuse_pow(
    pixels: &[u32],
    key: DiffusionKey,
    gray_levels: u32,
) -> Result<Vec<u32>, DiffusionError> {
    check_inputs(pixels, key, gray_levels)?;
    let l = u64::from(gray_levels);
    let mut prev = u64::from(key.q_init);
    Ok(pixels
        .iter()
        .map(|&q| {
            let p = (u64::from(q) + l - (prev * prev) % l) % l;
            prev = u64::from(q);
            p as u32
        })
        .collect())
}
