//! Deterministic benchmark input generation.

use anyhow::{bail, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Input distribution. `Dup(k)` draws from `k` distinct values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Random,
    Sorted,
    Reverse,
    Dup(u32),
}

impl Pattern {
    /// Parses `random`, `sorted`, `reverse`, or `dup-<k>`.
    pub fn parse(name: &str) -> Result<Pattern> {
        match name {
            "random" => Ok(Pattern::Random),
            "sorted" => Ok(Pattern::Sorted),
            "reverse" => Ok(Pattern::Reverse),
            _ => {
                if let Some(k) = name.strip_prefix("dup-") {
                    let k: u32 = k.parse()?;
                    if k == 0 {
                        bail!("dup-k needs at least one distinct value");
                    }
                    return Ok(Pattern::Dup(k));
                }
                bail!("unknown pattern {name:?} (expected random, sorted, reverse or dup-<k>)");
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Pattern::Random => "random".into(),
            Pattern::Sorted => "sorted".into(),
            Pattern::Reverse => "reverse".into(),
            Pattern::Dup(k) => format!("dup-{k}"),
        }
    }
}

/// Generates `size` elements; identical bytes for identical `(pattern, size,
/// seed)` on every run and host.
pub fn gen_input(pattern: Pattern, size: usize, seed: u64) -> Vec<i32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match pattern {
        Pattern::Random => (0..size).map(|_| rng.random()).collect(),
        Pattern::Sorted => (0..size).map(|i| i as i32).collect(),
        Pattern::Reverse => (0..size).map(|i| (size - 1 - i) as i32).collect(),
        Pattern::Dup(k) => (0..size).map(|_| rng.random_range(0..k) as i32).collect(),
    }
}
