//! Square gray-level images.
//!
//! Pixels are stored row-major with index `y * n_side + x`, the same layout
//! the permutation tables in [`crate::lattice`] use, so confusion is a flat
//! table lookup.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("pixel buffer has {got} entries, expected {expected} for side {side}")]
    BadDimensions {
        side: u32,
        expected: usize,
        got: usize,
    },
    #[error("pixel {index} has value {value}, outside [0, {gray_levels})")]
    PixelOutOfRange {
        index: usize,
        value: u32,
        gray_levels: u32,
    },
    #[error("gray levels must be in [2, 65536], got {0}")]
    BadGrayLevels(u32),
    #[error("flipping bit {bit} of pixel {index} yields {value}, outside [0, {gray_levels})")]
    FlipOutOfRange {
        index: usize,
        bit: u32,
        value: u32,
        gray_levels: u32,
    },
}

/// Maximum supported number of gray levels; keeps all diffusion arithmetic
/// exact in 64-bit intermediates.
pub const MAX_GRAY_LEVELS: u32 = 1 << 16;

/// An `N x N` image with pixel values in `[0, gray_levels)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    n_side: u32,
    gray_levels: u32,
    pixels: Vec<u32>,
}

impl Image {
    pub fn new(n_side: u32, gray_levels: u32, pixels: Vec<u32>) -> Result<Self, ImageError> {
        if !(2..=MAX_GRAY_LEVELS).contains(&gray_levels) {
            return Err(ImageError::BadGrayLevels(gray_levels));
        }
        let expected = n_side as usize * n_side as usize;
        if pixels.len() != expected {
            return Err(ImageError::BadDimensions {
                side: n_side,
                expected,
                got: pixels.len(),
            });
        }
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, &v)| v >= gray_levels) {
            return Err(ImageError::PixelOutOfRange {
                index,
                value,
                gray_levels,
            });
        }
        Ok(Self {
            n_side,
            gray_levels,
            pixels,
        })
    }

    /// All-zero image.
    pub fn zero(n_side: u32, gray_levels: u32) -> Result<Self, ImageError> {
        Self::new(
            n_side,
            gray_levels,
            vec![0; n_side as usize * n_side as usize],
        )
    }

    /// Build an image from a per-coordinate function `(x, y) -> value`.
    pub fn from_fn(
        n_side: u32,
        gray_levels: u32,
        mut f: impl FnMut(u32, u32) -> u32,
    ) -> Result<Self, ImageError> {
        let mut pixels = Vec::with_capacity(n_side as usize * n_side as usize);
        for y in 0..n_side {
            for x in 0..n_side {
                pixels.push(f(x, y));
            }
        }
        Self::new(n_side, gray_levels, pixels)
    }

    /// Deterministic pseudorandom test image: pixel `i` is the `i`-th
    /// `next_u32() % gray_levels` drawn from ChaCha8 seeded with `seed`.
    ///
    /// The stream is platform-independent, so sweep CSVs that record the seed
    /// are reproducible everywhere.
    pub fn seeded(seed: u64, n_side: u32, gray_levels: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = (0..n_side as usize * n_side as usize)
            .map(|_| rng.next_u32() % gray_levels)
            .collect();
        Self {
            n_side,
            gray_levels,
            pixels,
        }
    }

    pub fn n_side(&self) -> u32 {
        self.n_side
    }

    pub fn gray_levels(&self) -> u32 {
        self.gray_levels
    }

    pub fn pixels(&self) -> &[u32] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u32> {
        self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> u32 {
        debug_assert!(x < self.n_side && y < self.n_side);
        self.pixels[(y * self.n_side + x) as usize]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, value: u32) -> Result<(), ImageError> {
        let index = (y * self.n_side + x) as usize;
        if value >= self.gray_levels {
            return Err(ImageError::PixelOutOfRange {
                index,
                value,
                gray_levels: self.gray_levels,
            });
        }
        self.pixels[index] = value;
        Ok(())
    }

    /// XOR one bit into the pixel at flat index `index` (row-major scan).
    /// Errors if the flipped value leaves the gray-level range.
    pub fn flip_pixel_bit(&mut self, index: usize, bit: u32) -> Result<(), ImageError> {
        let value = self.pixels[index] ^ (1 << bit);
        if value >= self.gray_levels {
            return Err(ImageError::FlipOutOfRange {
                index,
                bit,
                value,
                gray_levels: self.gray_levels,
            });
        }
        self.pixels[index] = value;
        Ok(())
    }

    /// Replace the pixel buffer wholesale; caller guarantees values are in range.
    pub(crate) fn replace_pixels(&mut self, pixels: Vec<u32>) {
        debug_assert_eq!(pixels.len(), self.pixels.len());
        self.pixels = pixels;
    }
}
