//! Discretized 2D chaotic maps as exact integer bijections on the N x N
//! lattice, plus precomputed forward/inverse permutation tables.
//!
//! Three map families are implemented:
//!
//! * **Standard map** — `x' = (x + y) mod N`, `y' = (y + round(k sin(2 pi x' / N))) mod N`.
//!   The sine term is evaluated in double precision and rounded half away
//!   from zero; whatever integer comes out, `y` is recoverable from
//!   `(x', y')` and then `x` from `(x', y)`, so the map is a bijection for
//!   every `k`.
//! * **Cat map** — the unimodular matrix `[[1, u], [v, uv + 1]]` mod N.
//! * **Baker map** — vertical strips of widths `k_1..k_t` (each dividing N,
//!   summing to N) stretched horizontally and stacked as horizontal bands.
//!
//! All three fix the origin `(0, 0)`; that fixed point is what the
//! corner-pixel attack in [`crate::attack`] exploits.

use std::io::{self, Write};

use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid baker key: {0}")]
    InvalidBakerKey(String),
    #[error("permutation has a collision at destination index {0}")]
    NotBijective(usize),
    #[error("size mismatch: image side {image} vs permutation side {perm}")]
    SizeMismatch { image: u32, perm: u32 },
    #[error("lattice side must be at least 2, got {0}")]
    LatticeTooSmall(u32),
}

/// A lattice coordinate with `0 <= x, y < N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    /// Row-major flat index `y * n_side + x`.
    pub fn index(self, n_side: u32) -> usize {
        (self.y * n_side + self.x) as usize
    }

    pub fn from_index(index: usize, n_side: u32) -> Self {
        let n = n_side as usize;
        Self {
            x: (index % n) as u32,
            y: (index / n) as u32,
        }
    }
}

/// Standard-map parameter `k >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StandardKey {
    pub k: u64,
}

/// Cat-map parameters; reduced mod N when the map is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CatKey {
    pub u: u64,
    pub v: u64,
}

/// Baker-map strip widths `k_1..k_t` with `sum = N` and each `k_i | N`.
///
/// Both constraints are enforced at construction; without divisibility the
/// map is not well defined as a bijection.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BakerKey {
    strips: Vec<u32>,
    offsets: Vec<u32>,
    n_side: u32,
}

impl BakerKey {
    pub fn new(strips: Vec<u32>) -> Result<Self, LatticeError> {
        if strips.is_empty() {
            return Err(LatticeError::InvalidBakerKey("no strips".into()));
        }
        if strips.contains(&0) {
            return Err(LatticeError::InvalidBakerKey("zero-width strip".into()));
        }
        let n_side: u64 = strips.iter().map(|&k| u64::from(k)).sum();
        if n_side < 2 || n_side > u64::from(u32::MAX) {
            return Err(LatticeError::InvalidBakerKey(format!(
                "strip widths sum to {n_side}, not a usable lattice side"
            )));
        }
        let n_side = n_side as u32;
        if let Some(&k) = strips.iter().find(|&&k| !n_side.is_multiple_of(k)) {
            return Err(LatticeError::InvalidBakerKey(format!(
                "strip width {k} does not divide the lattice side {n_side}"
            )));
        }
        let mut offsets = Vec::with_capacity(strips.len());
        let mut acc = 0;
        for &k in &strips {
            offsets.push(acc);
            acc += k;
        }
        Ok(Self {
            strips,
            offsets,
            n_side,
        })
    }

    pub fn strips(&self) -> &[u32] {
        &self.strips
    }

    /// The lattice side this key is valid for (the sum of its strips).
    pub fn n_side(&self) -> u32 {
        self.n_side
    }

    fn strip_containing(&self, x: u32) -> (u32, u32) {
        let i = self.offsets.partition_point(|&off| off <= x) - 1;
        (self.strips[i], self.offsets[i])
    }
}

/// Confusion key: one of the three map families.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MapKey {
    Standard(StandardKey),
    Cat(CatKey),
    Baker(BakerKey),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Standard,
    Cat,
    Baker,
}

impl MapKind {
    pub const ALL: [MapKind; 3] = [MapKind::Standard, MapKind::Cat, MapKind::Baker];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Standard => "standard",
            MapKind::Cat => "cat",
            MapKind::Baker => "baker",
        }
    }
}

impl MapKey {
    pub fn kind(&self) -> MapKind {
        match self {
            MapKey::Standard(_) => MapKind::Standard,
            MapKey::Cat(_) => MapKind::Cat,
            MapKey::Baker(_) => MapKind::Baker,
        }
    }

    /// One application of the map to `p` on the `n_side` lattice.
    pub fn step(&self, p: Point, n_side: u32) -> Result<Point, LatticeError> {
        match self {
            MapKey::Standard(k) => Ok(standard_step(p, *k, n_side)),
            MapKey::Cat(k) => Ok(cat_step(p, *k, n_side)),
            MapKey::Baker(k) => baker_step(p, k, n_side),
        }
    }
}

/// Rounded sine displacement of the standard map: `round(k sin(2 pi x / N))`,
/// half away from zero. Only this integer enters the cipher.
pub fn standard_sine_term(k: u64, x: u32, n_side: u32) -> i64 {
    let theta = std::f64::consts::TAU * f64::from(x) / f64::from(n_side);
    // f64::round is round-half-away-from-zero.
    (k as f64 * theta.sin()).round() as i64
}

pub fn standard_step(p: Point, key: StandardKey, n_side: u32) -> Point {
    let n = u64::from(n_side);
    let x1 = ((u64::from(p.x) + u64::from(p.y)) % n) as u32;
    let shift = standard_sine_term(key.k, x1, n_side);
    let y1 = (i64::from(p.y) + shift).rem_euclid(n_side as i64) as u32;
    Point::new(x1, y1)
}

pub fn cat_step(p: Point, key: CatKey, n_side: u32) -> Point {
    let n = u128::from(n_side);
    let (x, y) = (u128::from(p.x), u128::from(p.y));
    let u = u128::from(key.u) % n;
    let v = u128::from(key.v) % n;
    let x1 = (x + u * y) % n;
    let y1 = (v * x + (u * v + 1) * y) % n;
    Point::new(x1 as u32, y1 as u32)
}

pub fn baker_step(p: Point, key: &BakerKey, n_side: u32) -> Result<Point, LatticeError> {
    if key.n_side != n_side {
        return Err(LatticeError::InvalidBakerKey(format!(
            "key is for a {}-lattice, not {n_side}",
            key.n_side
        )));
    }
    let (k, off) = key.strip_containing(p.x);
    let q = n_side / k; // integral by construction
    let x1 = q * (p.x - off) + p.y % q;
    let y1 = (p.y - p.y % q) / q + off;
    Ok(Point::new(x1, y1))
}

/// Materialized bijection on the `N x N` lattice with forward and inverse
/// lookup tables over row-major indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    n_side: u32,
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Permutation {
    pub fn identity(n_side: u32) -> Self {
        let table: Vec<u32> = (0..n_side * n_side).collect();
        Self {
            n_side,
            forward: table.clone(),
            inverse: table,
        }
    }

    /// Build the table for one application of `key`; `forward[idx(p)] = idx(step(p))`.
    pub fn from_key(key: &MapKey, n_side: u32) -> Result<Self, LatticeError> {
        if n_side < 2 {
            return Err(LatticeError::LatticeTooSmall(n_side));
        }
        let count = n_side as usize * n_side as usize;
        let mut forward = vec![0u32; count];
        for y in 0..n_side {
            for x in 0..n_side {
                let p = Point::new(x, y);
                forward[p.index(n_side)] = key.step(p, n_side)?.index(n_side) as u32;
            }
        }
        Self::from_forward(n_side, forward)
    }

    /// Wrap an explicit forward table, verifying it is a bijection.
    pub fn from_forward(n_side: u32, forward: Vec<u32>) -> Result<Self, LatticeError> {
        let count = forward.len();
        let mut inverse = vec![u32::MAX; count];
        for (src, &dst) in forward.iter().enumerate() {
            let dst = dst as usize;
            if dst >= count || inverse[dst] != u32::MAX {
                return Err(LatticeError::NotBijective(dst));
            }
            inverse[dst] = src as u32;
        }
        Ok(Self {
            n_side,
            forward,
            inverse,
        })
    }

    pub fn n_side(&self) -> u32 {
        self.n_side
    }

    pub fn point_count(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn inverse(&self) -> &[u32] {
        &self.inverse
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &d)| i as u32 == d)
    }

    /// The inverse permutation, swapping the two tables.
    pub fn inverted(&self) -> Self {
        Self {
            n_side: self.n_side,
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// Composition `self` then `other` (apply `self` first).
    pub fn then(&self, other: &Permutation) -> Result<Self, LatticeError> {
        if self.n_side != other.n_side {
            return Err(LatticeError::SizeMismatch {
                image: other.n_side,
                perm: self.n_side,
            });
        }
        let forward = self
            .forward
            .iter()
            .map(|&mid| other.forward[mid as usize])
            .collect();
        Self::from_forward(self.n_side, forward)
    }

    /// Move every pixel: output at `step(p)` equals input at `p`.
    pub fn apply_to_image(&self, img: &Image) -> Result<Image, LatticeError> {
        if img.n_side() != self.n_side {
            return Err(LatticeError::SizeMismatch {
                image: img.n_side(),
                perm: self.n_side,
            });
        }
        let mut out = img.clone();
        let mut pixels = vec![0u32; self.forward.len()];
        apply_forward(&self.forward, img.pixels(), &mut pixels);
        out.replace_pixels(pixels);
        Ok(out)
    }

    /// Debug export, one `src_index,dst_index` row per lattice point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "src_index,dst_index")?;
        for (src, &dst) in self.forward.iter().enumerate() {
            writeln!(w, "{src},{dst}")?;
        }
        Ok(())
    }
}

/// Scatter `src` through a forward table into `dst`.
pub(crate) fn apply_forward(forward: &[u32], src: &[u32], dst: &mut [u32]) {
    for (i, &d) in forward.iter().enumerate() {
        dst[d as usize] = src[i];
    }
}
