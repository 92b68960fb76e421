//! A workbench for a chaos-based image cryptosystem and its cryptanalysis.
//!
//! The cipher permutes pixel positions with a discretized 2D chaotic map
//! (standard, cat, or baker), then diffuses pixel values with a modular
//! recurrence, and repeats both for `n` rounds. Around that core the crate
//! provides:
//!
//! * [`lattice`] — the three maps as exact integer bijections with
//!   precomputed permutation tables;
//! * [`diffusion`] — the add / pow recurrences, their inverses, and the
//!   corner-start scan orders;
//! * [`cipher`] — encryption, decryption, key schedules, and the scan-order
//!   hardening;
//! * [`metrics`] / [`sweeps`] — ciphertext difference rate, average distance
//!   change, pixel change rate, key-space and complexity reports, and the
//!   sweep harnesses that produce CSV curves;
//! * [`attack`] — the corner-pixel known-plaintext recovery of the diffusion
//!   key, with a brute-force oracle to validate it;
//! * [`keygen`] — the fixed-point logistic-map sub-key generator;
//! * [`pgm`] — binary 8-bit PGM I/O.

pub mod attack;
pub mod cipher;
pub mod diffusion;
pub mod image;
pub mod keygen;
pub mod lattice;
pub mod metrics;
pub mod pgm;
pub mod sweeps;

pub use attack::{
    brute_force_oracle, corner_attack, corner_attack_forced, fixed_point_audit, recover_key,
    recover_key_add, recover_key_pow, AttackError, AttackInput, AttackReport, CandidateSet,
};
pub use cipher::{
    decrypt, decrypt_with_stats, derive_round_keys, encrypt, encrypt_with_stats, CipherConfig,
    CipherError, CipherStats, RoundKeys, ScheduleMode,
};
pub use diffusion::{
    diffuse_add, diffuse_pow, scan_indices, scan_sequence, undiffuse_add, undiffuse_pow,
    DiffusionError, DiffusionKey, DiffusionKind, ScanOrder,
};
pub use image::{Image, ImageError};
pub use keygen::{
    logistic_iterate, next_subkeys, subkeys_to_round_keys, GeneratorState, KeyGenError,
    KeyGenerator, MasterKey, SubKeyPair,
};
pub use lattice::{
    baker_step, cat_step, standard_step, BakerKey, CatKey, LatticeError, MapKey, MapKind,
    Permutation, Point, StandardKey,
};
pub use metrics::{
    adc, cdr, complexity_report, diff_count, keyspace_report, pcr, ComplexityReport, CsvMeta,
    KeySpaceReport, MetricSeries, MetricsError, OpCost,
};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm, PgmError};
pub use sweeps::{
    adc_sweep, cdr_sweep, pcr_curve, FlipSpec, KeyFamily, SkippedKey, SweepConfig, SweepError,
    SweepResult,
};
