//! Cross-module invariants: brute-force composition checks, cipher
//! round-trips over the whole configuration space, corner-law statistics
//! under hardening, and generator health.

use std::collections::HashSet;

use chaocrypt_core::{
    cdr, decrypt, derive_round_keys, encrypt, pcr, BakerKey, CatKey, CipherConfig, DiffusionKey,
    DiffusionKind, GeneratorState, Image, KeyGenerator, MapKey, MapKind, MasterKey, Permutation,
    RoundKeys, ScheduleMode, StandardKey,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn random_baker_key(rng: &mut impl Rng, n_side: u32) -> BakerKey {
    let divisors: Vec<u32> = (1..=n_side).filter(|d| n_side.is_multiple_of(*d)).collect();
    let mut strips = Vec::new();
    let mut remaining = n_side;
    while remaining > 0 {
        let candidates: Vec<u32> = divisors
            .iter()
            .copied()
            .filter(|&d| d <= remaining)
            .collect();
        let d = candidates[rng.random_range(0..candidates.len())];
        strips.push(d);
        remaining -= d;
    }
    BakerKey::new(strips).unwrap()
}

fn random_map_key(rng: &mut impl Rng, kind: MapKind, n_side: u32) -> MapKey {
    match kind {
        MapKind::Standard => MapKey::Standard(StandardKey {
            k: rng.random_range(0..=1_000_000),
        }),
        MapKind::Cat => MapKey::Cat(CatKey {
            u: rng.random_range(0..u64::from(n_side)),
            v: rng.random_range(0..u64::from(n_side)),
        }),
        MapKind::Baker => MapKey::Baker(random_baker_key(rng, n_side)),
    }
}

fn random_round_keys(
    rng: &mut impl Rng,
    kind: MapKind,
    groups: u32,
    n_side: u32,
    gray_levels: u32,
) -> RoundKeys {
    RoundKeys {
        confusion: (0..groups)
            .map(|_| random_map_key(rng, kind, n_side))
            .collect(),
        diffusion: (0..groups)
            .map(|_| DiffusionKey {
                q_init: rng.random_range(0..gray_levels),
            })
            .collect(),
    }
}

#[test]
fn iterated_table_equals_table_of_iterated_map() {
    // m applications of the one-step table == the table built from the
    // m-fold point map, by exhaustive enumeration.
    let mut rng = rand::rngs::StdRng::seed_from_u64(41);
    for n_side in [4u32, 8, 16] {
        for kind in MapKind::ALL {
            let key = random_map_key(&mut rng, kind, n_side);
            let table = Permutation::from_key(&key, n_side).unwrap();
            for m in 1..=4u32 {
                let mut by_table: Vec<u32> = (0..n_side * n_side).collect();
                for _ in 0..m {
                    for slot in by_table.iter_mut() {
                        *slot = table.forward()[*slot as usize];
                    }
                }
                for (index, &dest) in by_table.iter().enumerate() {
                    let mut p = chaocrypt_core::Point::from_index(index, n_side);
                    for _ in 0..m {
                        p = key.step(p, n_side).unwrap();
                    }
                    assert_eq!(dest as usize, p.index(n_side), "{kind:?} N={n_side} m={m}");
                }
            }
        }
    }
}

#[test]
fn bijectivity_spot_check_at_full_scale() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(42);
    for kind in MapKind::ALL {
        let key = random_map_key(&mut rng, kind, 256);
        let perm = Permutation::from_key(&key, 256).unwrap();
        let seen: HashSet<u32> = perm.forward().iter().copied().collect();
        assert_eq!(seen.len(), 65536, "{kind:?}");
        assert_eq!(perm.forward()[0], 0, "{kind:?} must fix the origin");
    }
}

#[test]
fn corner_law_breaks_under_hardening() {
    // With rotated scan orders the corner pixel stops obeying
    // (P0 + n*q) mod L; the law should survive only at chance rate.
    let mut rng = rand::rngs::StdRng::seed_from_u64(43);
    let n = 2u32; // first n where the hardening bites
    let mut held = 0usize;
    let trials = 1000;
    for _ in 0..trials {
        let q = rng.random_range(0..256u32);
        let cfg = CipherConfig {
            map_kind: MapKind::Cat,
            diffusion_kind: DiffusionKind::Add,
            rounds: n,
            group_size: n,
            schedule: ScheduleMode::SameKey,
            scan_hardening: true,
            n_side: 16,
            gray_levels: 256,
        };
        let keys = RoundKeys::single(
            random_map_key(&mut rng, MapKind::Cat, 16),
            DiffusionKey { q_init: q },
        );
        let img = Image::seeded(rng.random(), 16, 256);
        let out = encrypt(&img, &cfg, &keys).unwrap();
        let law = (img.pixel(0, 0) + n * q) % 256;
        if out.pixel(0, 0) == law {
            held += 1;
        }
    }
    let rate = held as f64 / trials as f64;
    assert!(
        rate < 1.0 / 256.0 + 0.05,
        "corner law held in {rate} of hardened trials"
    );
}

#[test]
fn cdr_and_pcr_are_invariant_under_relabeling_positions() {
    // Applying one fixed permutation to every argument cannot change
    // pointwise comparison counts.
    let mut rng = rand::rngs::StdRng::seed_from_u64(44);
    let relabel = Permutation::from_key(&random_map_key(&mut rng, MapKind::Baker, 16), 16).unwrap();
    let y = Image::seeded(1, 16, 256);
    let y1 = Image::seeded(2, 16, 256);
    let y2 = Image::seeded(3, 16, 256);
    let moved = |img: &Image| relabel.apply_to_image(img).unwrap();
    assert_eq!(
        cdr(&y, &y1, &y2).unwrap(),
        cdr(&moved(&y), &moved(&y1), &moved(&y2)).unwrap()
    );
    assert_eq!(pcr(&y, &y1).unwrap(), pcr(&moved(&y), &moved(&y1)).unwrap());
}

#[test]
fn generator_states_do_not_repeat_over_ten_thousand_outputs() {
    let master = MasterKey::from_hex("3a7bd3e2360a3d29eea436fcfb7e44c8").unwrap();
    let mut generator = KeyGenerator::new(master);
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    for _ in 0..10_000 {
        generator.next_pair().unwrap();
        let GeneratorState { x1, x2, .. } = *generator.state();
        assert!(seen.insert((x1, x2)), "combined state repeated");
    }
}

#[test]
fn per_round_schedules_rarely_collide_within_a_master() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(45);
    let cfg = CipherConfig {
        map_kind: MapKind::Cat,
        diffusion_kind: DiffusionKind::Add,
        rounds: 4,
        group_size: 1,
        schedule: ScheduleMode::PerRound,
        scan_hardening: false,
        n_side: 256,
        gray_levels: 256,
    };
    let mut colliding_masters = 0usize;
    let trials = 1000;
    for _ in 0..trials {
        let master =
            MasterKey::new(rng.random_range(1..u64::MAX), rng.random_range(1..u64::MAX)).unwrap();
        let keys = derive_round_keys(&master, &cfg).unwrap();
        let mut unique = HashSet::new();
        for (c, d) in keys.confusion.iter().zip(&keys.diffusion) {
            unique.insert((format!("{c:?}"), d.q_init));
        }
        if unique.len() != keys.confusion.len() {
            colliding_masters += 1;
        }
    }
    assert!(
        (colliding_masters as f64 / trials as f64) < 1e-3,
        "{colliding_masters} of {trials} masters produced duplicate pairs"
    );
}

#[test]
fn same_key_equals_grouped_with_full_group_and_per_round_with_unit_group() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(46);
    let img = Image::seeded(7, 8, 256);
    let keys = random_round_keys(&mut rng, MapKind::Standard, 1, 8, 256);
    let base = CipherConfig {
        map_kind: MapKind::Standard,
        diffusion_kind: DiffusionKind::Pow,
        rounds: 6,
        group_size: 6,
        schedule: ScheduleMode::SameKey,
        scan_hardening: false,
        n_side: 8,
        gray_levels: 256,
    };
    let grouped_full = CipherConfig {
        schedule: ScheduleMode::Grouped,
        ..base.clone()
    };
    assert_eq!(
        encrypt(&img, &base, &keys).unwrap(),
        encrypt(&img, &grouped_full, &keys).unwrap()
    );

    // per-round with n identical key pairs == grouped with n0 = 1
    let per_round_keys = RoundKeys {
        confusion: vec![keys.confusion[0].clone(); 6],
        diffusion: vec![keys.diffusion[0]; 6],
    };
    let per_round = CipherConfig {
        schedule: ScheduleMode::PerRound,
        group_size: 1,
        ..base.clone()
    };
    let grouped_unit = CipherConfig {
        schedule: ScheduleMode::Grouped,
        group_size: 1,
        ..base.clone()
    };
    assert_eq!(
        encrypt(&img, &per_round, &per_round_keys).unwrap(),
        encrypt(&img, &grouped_unit, &per_round_keys).unwrap()
    );
    // and identical per-round keys collapse to the same-key ciphertext
    assert_eq!(
        encrypt(&img, &per_round, &per_round_keys).unwrap(),
        encrypt(&img, &base, &keys).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encrypt_then_decrypt_is_identity(
        seed in 0u64..10_000,
        kind_idx in 0usize..3,
        diff_idx in 0usize..2,
        schedule_idx in 0usize..3,
        harden in proptest::bool::ANY,
        side_idx in 0usize..3,
        l_idx in 0usize..2,
        rounds in 1u32..=6,
    ) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let kind = MapKind::ALL[kind_idx];
        let schedule = ScheduleMode::ALL[schedule_idx];
        let n_side = [4u32, 8, 16][side_idx];
        let gray_levels = [16u32, 256][l_idx];
        let group_size = match schedule {
            ScheduleMode::Grouped => {
                let divisors: Vec<u32> = (1..=rounds).filter(|d| rounds % d == 0).collect();
                divisors[rng.random_range(0..divisors.len())]
            }
            _ => rounds,
        };
        let cfg = CipherConfig {
            map_kind: kind,
            diffusion_kind: DiffusionKind::ALL[diff_idx],
            rounds,
            group_size,
            schedule,
            scan_hardening: harden,
            n_side,
            gray_levels,
        };
        let keys = random_round_keys(&mut rng, kind, cfg.group_count(), n_side, gray_levels);
        let img = Image::seeded(rng.random(), n_side, gray_levels);
        let cipher = encrypt(&img, &cfg, &keys).unwrap();
        prop_assert_eq!(decrypt(&cipher, &cfg, &keys).unwrap(), img);
    }
}
