//! Sub-sampled instances: a random passenger subset of a base demand, with
//! vehicle capacities scaled by the same fraction.

use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use transit_cg::model::Instance;

use crate::io::{write_instance, InputError};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("fraction must lie in (0, 1], got {0}")]
    Fraction(f64),
    #[error("fraction {fraction} of {base} passengers selects nobody")]
    Empty { fraction: f64, base: usize },
    #[error(transparent)]
    Output(#[from] InputError),
}

#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub base: Instance,
    pub fraction: f64,
    pub seed: u64,
    pub count: usize,
}

pub fn subset_size(fraction: f64, base: usize) -> usize {
    (fraction * base as f64).round() as usize
}

pub fn scaled_capacity(fraction: f64, capacity: u32) -> u32 {
    ((fraction * capacity as f64 - 1e-9).ceil() as u32).max(1)
}

/// Instance number `index`; the subset is drawn from a generator seeded with
/// `seed + index` and keeps the base order.
pub fn generate_instance(base: &Instance, fraction: f64, seed: u64, index: usize) -> Result<Instance, GenerateError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(GenerateError::Fraction(fraction));
    }
    let n = base.requests.len();
    let k = subset_size(fraction, n);
    if k == 0 {
        return Err(GenerateError::Empty { fraction, base: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
    let mut picked = sample(&mut rng, n, k).into_vec();
    picked.sort_unstable();

    let mut inst = base.clone();
    inst.requests = picked.into_iter().map(|i| base.requests[i].clone()).collect();
    for r in &mut inst.routes {
        r.capacity = scaled_capacity(fraction, r.capacity);
    }
    Ok(inst)
}

/// Writes `count` instances to `out/instance_000`, `out/instance_001`, ...
pub fn generate_instances(spec: &GeneratorSpec, out: &Path) -> Result<Vec<PathBuf>, GenerateError> {
    (0..spec.count)
        .map(|i| {
            let inst = generate_instance(&spec.base, spec.fraction, spec.seed, i)?;
            let dir = out.join(format!("instance_{i:03}"));
            write_instance(&inst, &dir)?;
            Ok(dir)
        })
        .collect()
}
