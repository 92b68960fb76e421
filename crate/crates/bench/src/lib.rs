//! Shared fixtures for the criterion benches: deterministic images, one
//! representative key per map family, and ready-made cipher configurations.

use chaocrypt_core::{
    BakerKey, CatKey, CipherConfig, DiffusionKey, DiffusionKind, Image, MapKey, MapKind, RoundKeys,
    ScheduleMode, StandardKey,
};

pub const BENCH_SIDE: u32 = 256;
pub const BENCH_SEED: u64 = 0xC0FFEE;

pub fn bench_image() -> Image {
    Image::seeded(BENCH_SEED, BENCH_SIDE, 256)
}

/// A mid-strength key of each family at the bench lattice side.
pub fn bench_key(kind: MapKind) -> MapKey {
    match kind {
        MapKind::Standard => MapKey::Standard(StandardKey { k: 25_000 }),
        MapKind::Cat => MapKey::Cat(CatKey { u: 85, v: 153 }),
        MapKind::Baker => {
            let mut strips = vec![8];
            strips.extend(std::iter::repeat_n(2, ((BENCH_SIDE - 8) / 2) as usize));
            MapKey::Baker(BakerKey::new(strips).expect("bench strips are valid"))
        }
    }
}

pub fn bench_config(kind: MapKind, diffusion: DiffusionKind, rounds: u32) -> CipherConfig {
    CipherConfig {
        map_kind: kind,
        diffusion_kind: diffusion,
        rounds,
        group_size: rounds,
        schedule: ScheduleMode::SameKey,
        scan_hardening: false,
        n_side: BENCH_SIDE,
        gray_levels: 256,
    }
}

pub fn bench_keys(kind: MapKind) -> RoundKeys {
    RoundKeys::single(bench_key(kind), DiffusionKey { q_init: 7 })
}
