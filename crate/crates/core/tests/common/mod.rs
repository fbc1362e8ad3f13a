#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use virtual_spin::SpinSystemParams;

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// J, δ log-uniform in [1e-2, 1e4] rad/s, ω₀ log-uniform in [10, 1e6] rad/s.
pub fn random_params(rng: &mut ChaCha8Rng) -> SpinSystemParams {
    let j = log_uniform(rng, 1e-2, 1e4);
    let delta = log_uniform(rng, 1e-2, 1e4);
    let omega0 = log_uniform(rng, 10.0, 1e6);
    SpinSystemParams::from_frequencies(omega0, delta, j).unwrap()
}

pub fn reference() -> SpinSystemParams {
    SpinSystemParams::from_frequencies(1000.0, 100.0, 100.0).unwrap()
}
