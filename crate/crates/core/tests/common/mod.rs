#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmsv_core::fock::{apply_ladder, suggest_cutoff, tmsv, FockState2, Ladder, Mode, SqueezeParams};

pub fn params(r: f64, theta: f64) -> SqueezeParams {
    SqueezeParams::new(r, theta).unwrap()
}

/// `normalize(a†ᵏ |ξ⟩)` built by ladder operators in a truncated basis.
pub fn subtracted_fock(p: SqueezeParams, k: usize) -> FockState2 {
    let n = suggest_cutoff(p.r(), k, 1e-18).max(2);
    let base = tmsv(p, n).unwrap().padded(n + k).unwrap();
    let s = if k == 0 { base } else { apply_ladder(&base, Mode::A, Ladder::Create, k).unwrap() };
    s.normalize().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, half: f64) -> f64 {
    rng.gen_range(-half..half)
}
