//! Logistic-map sub-key generator: expands a 128-bit master key into per-group
//! confusion/diffusion key pairs.
//!
//! Everything here is fixed-point Q0.64 arithmetic (64 fractional bits,
//! truncating multiplication) — no floating point — so a schedule derived
//! from a master key is bit-identical on every platform. The chaotic source
//! is the logistic map `f(x) = 4x(1-x)` at its fully chaotic parameter; the
//! two generator states are cross-coupled through `(x1 + x2)/2` and
//! `|x1 - x2|/2` before each burst of `T` iterations.

use thiserror::Error;

use crate::cipher::{CipherConfig, RoundKeys};
use crate::diffusion::DiffusionKey;
use crate::lattice::{BakerKey, CatKey, MapKey, MapKind, StandardKey};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyGenError {
    #[error("master key must be 32 hex characters, got {0:?}")]
    BadMasterKeyHex(String),
    #[error("master key half is zero; the generator would start at the absorbing point")]
    DegenerateMasterKey,
    #[error("generator state degenerated at iteration {t} and remediation failed")]
    DegenerateState { t: u64 },
    #[error("sub-key length must be in [1, 64], got {0}")]
    BadSubkeyBits(u32),
    #[error("baker strip derivation requires a power-of-two lattice side, got {0}")]
    BakerRequiresPow2N(u32),
    #[error("schedule needs {needed} sub-key pairs, only {got} supplied")]
    InsufficientSubKeys { needed: usize, got: usize },
}

/// Recommended burst length `T` between sub-key outputs.
pub const RECOMMENDED_ITERATIONS: u32 = 100;

/// Default sub-key width in bits.
pub const DEFAULT_SUBKEY_BITS: u32 = 32;

/// The standard map parameter is reduced into the swept range [0, 50000].
pub const STANDARD_KEY_MODULUS: u64 = 50_001;

/// Q0.64 fraction for 3/4, the nontrivial fixed point of `4x(1-x)`.
pub const THREE_QUARTERS: u64 = 0xC000_0000_0000_0000;

// Replacement seed when a state lands on a fixed point of the map; XORed
// with the iteration index so consecutive remediations differ.
const REMEDY_SEED: u64 = 0x5851_F42D_4C95_7F2D;

/// 128-bit user key split into two Q0.64 fractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterKey {
    k1: u64,
    k2: u64,
}

impl MasterKey {
    /// Both halves must be nonzero; zero is the absorbing point of the map.
    /// Equal halves are allowed — the degenerate `|x1 - x2| = 0` collapse is
    /// repaired by the remediation rule inside the generator.
    pub fn new(k1: u64, k2: u64) -> Result<Self, KeyGenError> {
        if k1 == 0 || k2 == 0 {
            return Err(KeyGenError::DegenerateMasterKey);
        }
        Ok(Self { k1, k2 })
    }

    /// Parse 32 hex characters; the first 16 become `k1`, the rest `k2`.
    pub fn from_hex(hex: &str) -> Result<Self, KeyGenError> {
        let s = hex.trim();
        if s.len() != 32 || !s.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(KeyGenError::BadMasterKeyHex(hex.to_string()));
        }
        let k1 = u64::from_str_radix(&s[..16], 16).expect("validated hex");
        let k2 = u64::from_str_radix(&s[16..], 16).expect("validated hex");
        Self::new(k1, k2)
    }

    pub fn to_hex(&self) -> String {
        format!("{:016x}{:016x}", self.k1, self.k2)
    }

    pub fn halves(&self) -> (u64, u64) {
        (self.k1, self.k2)
    }
}

/// Current chaotic states and the iteration index `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorState {
    pub x1: u64,
    pub x2: u64,
    pub t: u64,
}

impl GeneratorState {
    pub fn from_master(master: &MasterKey) -> Self {
        Self {
            x1: master.k1,
            x2: master.k2,
            t: 0,
        }
    }
}

/// One `t`-th output: two `bits`-wide words taken from the top of the states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubKeyPair {
    pub x1: u64,
    pub x2: u64,
    pub bits: u32,
}

/// One logistic step `x <- 4x(1-x)` in Q0.64.
///
/// The 128-bit product is truncated to 64 fractional bits. `x = 1/2` exactly
/// maps to 1.0, which does not fit the fraction; it is clamped to
/// `1 - 2^-64` so the state stays in `[0, 1)` and is not absorbed at zero.
fn logistic_step(x: u64) -> u64 {
    let p = u128::from(x) * ((1u128 << 64) - u128::from(x));
    let r = p >> 62;
    if r > u128::from(u64::MAX) {
        u64::MAX
    } else {
        r as u64
    }
}

/// `iterations` applications of the logistic map.
pub fn logistic_iterate(x: u64, iterations: u32) -> u64 {
    let mut x = x;
    for _ in 0..iterations {
        x = logistic_step(x);
    }
    x
}

fn remediate(x: u64, t: u64) -> Result<u64, KeyGenError> {
    if x != 0 && x != THREE_QUARTERS {
        return Ok(x);
    }
    let fixed = REMEDY_SEED ^ t;
    if fixed == 0 || fixed == THREE_QUARTERS {
        return Err(KeyGenError::DegenerateState { t });
    }
    Ok(fixed)
}

/// Advance the coupled generator one output: mix the states, run `iterations`
/// logistic steps on each, remediate fixed points, and read the top
/// `subkey_bits` bits of each new state.
pub fn next_subkeys(
    state: &GeneratorState,
    iterations: u32,
    subkey_bits: u32,
) -> Result<(SubKeyPair, GeneratorState), KeyGenError> {
    if !(1..=64).contains(&subkey_bits) {
        return Err(KeyGenError::BadSubkeyBits(subkey_bits));
    }
    let t = state.t + 1;
    let half_sum = ((u128::from(state.x1) + u128::from(state.x2)) >> 1) as u64;
    let half_diff = state.x1.abs_diff(state.x2) >> 1;
    let x1 = remediate(logistic_iterate(half_sum, iterations), t)?;
    let x2 = remediate(logistic_iterate(half_diff, iterations), t)?;
    let pair = SubKeyPair {
        x1: x1 >> (64 - subkey_bits),
        x2: x2 >> (64 - subkey_bits),
        bits: subkey_bits,
    };
    Ok((pair, GeneratorState { x1, x2, t }))
}

/// Streaming interface over [`next_subkeys`] with fixed parameters.
#[derive(Debug, Clone)]
pub struct KeyGenerator {
    state: GeneratorState,
    iterations: u32,
    subkey_bits: u32,
}

impl KeyGenerator {
    pub fn new(master: MasterKey) -> Self {
        Self {
            state: GeneratorState::from_master(&master),
            iterations: RECOMMENDED_ITERATIONS,
            subkey_bits: DEFAULT_SUBKEY_BITS,
        }
    }

    pub fn with_params(
        master: MasterKey,
        iterations: u32,
        subkey_bits: u32,
    ) -> Result<Self, KeyGenError> {
        if !(1..=64).contains(&subkey_bits) {
            return Err(KeyGenError::BadSubkeyBits(subkey_bits));
        }
        Ok(Self {
            state: GeneratorState::from_master(&master),
            iterations,
            subkey_bits,
        })
    }

    pub fn state(&self) -> &GeneratorState {
        &self.state
    }

    pub fn next_pair(&mut self) -> Result<SubKeyPair, KeyGenError> {
        let (pair, state) = next_subkeys(&self.state, self.iterations, self.subkey_bits)?;
        self.state = state;
        Ok(pair)
    }

    pub fn take_pairs(&mut self, count: usize) -> Result<Vec<SubKeyPair>, KeyGenError> {
        (0..count).map(|_| self.next_pair()).collect()
    }
}

/// Deterministically map sub-key pairs onto the schedule's round keys.
///
/// Confusion: standard `k = X1 mod 50001`, cat `(u, v) = (X1 mod N, X2 mod N)`,
/// baker strips drawn from X1's bit stream (powers of two, so the divisor
/// constraint holds by construction). Diffusion: `q_init = X2 mod L`.
pub fn subkeys_to_round_keys(
    pairs: &[SubKeyPair],
    cfg: &CipherConfig,
) -> Result<RoundKeys, KeyGenError> {
    let needed = cfg.group_count() as usize;
    if pairs.len() < needed {
        return Err(KeyGenError::InsufficientSubKeys {
            needed,
            got: pairs.len(),
        });
    }
    let n = u64::from(cfg.n_side);
    let l = u64::from(cfg.gray_levels);
    let mut confusion = Vec::with_capacity(needed);
    let mut diffusion = Vec::with_capacity(needed);
    for pair in &pairs[..needed] {
        let key = match cfg.map_kind {
            MapKind::Standard => MapKey::Standard(StandardKey {
                k: pair.x1 % STANDARD_KEY_MODULUS,
            }),
            MapKind::Cat => {
                let (u, v) = (pair.x1 % n, pair.x2 % n);
                if u == 0 && v == 0 {
                    log::warn!("derived cat key (0, 0): the identity map, legal but weak");
                }
                MapKey::Cat(CatKey { u, v })
            }
            MapKind::Baker => {
                let strips = baker_strips_from_word(pair.x1, pair.bits, cfg.n_side)?;
                MapKey::Baker(
                    BakerKey::new(strips).expect("derived strips are valid by construction"),
                )
            }
        };
        confusion.push(key);
        diffusion.push(DiffusionKey {
            q_init: (pair.x2 % l) as u32,
        });
    }
    Ok(RoundKeys {
        confusion,
        diffusion,
    })
}

/// Draw baker strip widths from a sub-key word: repeatedly take 3 bits `b`
/// (MSB-first, cycling) and emit `k = 2^(1 + (b mod floor(log2 R)))` where `R`
/// is the remaining width, clamped to `R`.
fn baker_strips_from_word(word: u64, bits: u32, n_side: u32) -> Result<Vec<u32>, KeyGenError> {
    if !n_side.is_power_of_two() || n_side < 2 {
        return Err(KeyGenError::BakerRequiresPow2N(n_side));
    }
    let mut strips = Vec::new();
    let mut remaining = n_side;
    let mut cursor = 0u32;
    while remaining > 0 {
        let mut b = 0u64;
        for _ in 0..3 {
            b = (b << 1) | ((word >> (bits - 1 - cursor % bits)) & 1);
            cursor += 1;
        }
        let levels = u64::from(remaining.ilog2()); // >= 1 while remaining >= 2
        let proposed = 1u32 << (1 + (b % levels) as u32);
        let k = proposed.min(remaining);
        strips.push(k);
        remaining -= k;
    }
    Ok(strips)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{CipherConfig, ScheduleMode};
    use crate::diffusion::DiffusionKind;

    #[test]
    fn logistic_fixed_points_and_clamp() {
        assert_eq!(logistic_iterate(0, 17), 0);
        // 3/4 is the nontrivial fixed point, exactly representable
        assert_eq!(logistic_iterate(THREE_QUARTERS, 7), THREE_QUARTERS);
        // 1/2 maps to 1.0 exactly; clamped to 1 - 2^-64
        assert_eq!(logistic_iterate(1u64 << 63, 1), u64::MAX);
    }

    // Frozen from an independent big-integer evaluation of the Q0.64 rule.
    #[test]
    fn logistic_iteration_matches_golden() {
        assert_eq!(
            logistic_iterate(0x0123_4567_89AB_CDEF, 1),
            0x0487_E802_B5DF_5D08
        );
        assert_eq!(
            logistic_iterate(0x0123_4567_89AB_CDEF, 100),
            0x0222_6AB8_C1BF_5810
        );
        assert_eq!(
            logistic_iterate(0xDEAD_BEEF_DEAD_BEEF, 100),
            0x9E2F_DF4C_EB62_75BD
        );
    }

    #[test]
    fn subkey_stream_matches_golden() {
        let master = MasterKey::new(0x0123_4567_89AB_CDEF, 0x0FED_CBA9_8765_4321).unwrap();
        let mut generator = KeyGenerator::new(master);
        let first = generator.next_pair().unwrap();
        assert_eq!((first.x1, first.x2), (0xCD08_60B2, 0x6478_4FE1));
        let second = generator.next_pair().unwrap();
        assert_eq!((second.x1, second.x2), (0xF281_3646, 0xE4BC_3C35));
    }

    #[test]
    fn determinism_across_generators() {
        let master = MasterKey::from_hex("00000000000000ff00000000000000ff").unwrap();
        let a = KeyGenerator::new(master.clone()).take_pairs(16).unwrap();
        let b = KeyGenerator::new(master).take_pairs(16).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn equal_halves_collapse_is_remediated() {
        // |x1 - x2| / 2 = 0 would be absorbed at zero without remediation
        let master = MasterKey::from_hex("00000000000000ff00000000000000ff").unwrap();
        let state = GeneratorState::from_master(&master);
        let (_, next) = next_subkeys(&state, 100, 32).unwrap();
        assert_ne!(next.x2, 0);
        assert_ne!(next.x2, THREE_QUARTERS);
        assert_eq!(next.x2, REMEDY_SEED ^ 1);
    }

    #[test]
    fn master_key_validation() {
        assert!(MasterKey::from_hex("0123456789abcdef0123456789abcdef").is_ok());
        assert_eq!(
            MasterKey::from_hex("00000000000000000123456789abcdef").unwrap_err(),
            KeyGenError::DegenerateMasterKey
        );
        assert!(matches!(
            MasterKey::from_hex("not hex").unwrap_err(),
            KeyGenError::BadMasterKeyHex(_)
        ));
        let key = MasterKey::from_hex("0123456789ABCDEF0123456789abcdef").unwrap();
        assert_eq!(key.to_hex(), "0123456789abcdef0123456789abcdef");
    }

    fn config(map_kind: MapKind, groups: u32) -> CipherConfig {
        CipherConfig {
            map_kind,
            diffusion_kind: DiffusionKind::Add,
            rounds: groups,
            group_size: 1,
            schedule: ScheduleMode::PerRound,
            scan_hardening: false,
            n_side: 8,
            gray_levels: 256,
        }
    }

    #[test]
    fn zero_word_derives_uniform_baker_strips() {
        let pairs = [SubKeyPair {
            x1: 0,
            x2: 9,
            bits: 32,
        }];
        let keys = subkeys_to_round_keys(&pairs, &config(MapKind::Baker, 1)).unwrap();
        match &keys.confusion[0] {
            MapKey::Baker(key) => assert_eq!(key.strips(), &[2, 2, 2, 2]),
            other => panic!("expected baker key, got {other:?}"),
        }
        assert_eq!(keys.diffusion[0], DiffusionKey { q_init: 9 });
    }

    #[test]
    fn zero_words_derive_identity_cat_key() {
        let pairs = [SubKeyPair {
            x1: 0,
            x2: 0,
            bits: 32,
        }];
        let mut cfg = config(MapKind::Cat, 1);
        cfg.n_side = 256;
        let keys = subkeys_to_round_keys(&pairs, &cfg).unwrap();
        assert_eq!(keys.confusion[0], MapKey::Cat(CatKey { u: 0, v: 0 }));
    }

    #[test]
    fn derived_keys_are_in_range() {
        let master = MasterKey::from_hex("deadbeefdeadbeef0123456789abcdef").unwrap();
        let pairs = KeyGenerator::new(master).take_pairs(8).unwrap();
        for kind in MapKind::ALL {
            let keys = subkeys_to_round_keys(&pairs, &config(kind, 8)).unwrap();
            for key in &keys.confusion {
                match key {
                    MapKey::Standard(s) => assert!(s.k <= 50_000),
                    MapKey::Cat(c) => assert!(c.u < 8 && c.v < 8),
                    MapKey::Baker(b) => {
                        assert_eq!(b.strips().iter().sum::<u32>(), 8);
                        assert!(b.strips().iter().all(|k| 8 % k == 0));
                    }
                }
            }
            for key in &keys.diffusion {
                assert!(key.q_init < 256);
            }
        }
    }

    #[test]
    fn baker_derivation_rejects_non_pow2_side() {
        let pairs = [SubKeyPair {
            x1: 1,
            x2: 2,
            bits: 32,
        }];
        let mut cfg = config(MapKind::Baker, 1);
        cfg.n_side = 12;
        assert_eq!(
            subkeys_to_round_keys(&pairs, &cfg).unwrap_err(),
            KeyGenError::BakerRequiresPow2N(12)
        );
    }

    #[test]
    fn insufficient_pairs_is_reported() {
        let pairs = [SubKeyPair {
            x1: 1,
            x2: 2,
            bits: 32,
        }];
        assert_eq!(
            subkeys_to_round_keys(&pairs, &config(MapKind::Cat, 3)).unwrap_err(),
            KeyGenError::InsufficientSubKeys { needed: 3, got: 1 }
        );
    }
}
