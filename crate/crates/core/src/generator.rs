//! Random instance generation.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! a 64-bit value. Benchmark instances derive their seed from
//! `(base seed, class index, replicate)` through [`mix_seed`], a SplitMix64
//! finalizer chain, so a class can be regenerated on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Instance, Item};

pub type SolverRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("item count must be positive")]
    NoItems,
    #[error("scenario count must be positive")]
    NoScenarios,
    #[error("invalid size range [{lo}, {hi}] for capacity {capacity}")]
    SizeRange { lo: u32, hi: u32, capacity: u32 },
    #[error("membership probability {0} not in (0, 1]")]
    Probability(f64),
}

/// Parameters for [`generate_instance`]; defaults follow the benchmark classes.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub size_lo: u32,
    pub size_hi: u32,
    pub capacity: u32,
    pub membership: f64,
}

impl GeneratorParams {
    pub fn new(n: usize, d: usize, seed: u64) -> Self {
        GeneratorParams {
            n,
            d,
            seed,
            size_lo: 1,
            size_hi: 99,
            capacity: 100,
            membership: 0.5,
        }
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a per-instance seed from a base seed, class index and replicate.
pub fn mix_seed(seed: u64, class: u64, replicate: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ class) ^ replicate)
}

/// Sizes uniform on `[size_lo, size_hi]`; each item belongs to each scenario
/// independently with probability `membership`. An item that draws no
/// scenario redraws its whole set.
pub fn generate_instance(params: &GeneratorParams) -> Result<Instance, GeneratorError> {
    let GeneratorParams {
        n,
        d,
        seed,
        size_lo,
        size_hi,
        capacity,
        membership,
    } = *params;
    if n == 0 {
        return Err(GeneratorError::NoItems);
    }
    if d == 0 {
        return Err(GeneratorError::NoScenarios);
    }
    if size_lo == 0 || size_lo > size_hi || size_hi > capacity {
        return Err(GeneratorError::SizeRange {
            lo: size_lo,
            hi: size_hi,
            capacity,
        });
    }
    if !(membership > 0.0 && membership <= 1.0) {
        return Err(GeneratorError::Probability(membership));
    }
    let mut rng = rng_from_seed(seed);
    let mut items = Vec::with_capacity(n);
    for _ in 0..n {
        let size = rng.gen_range(size_lo..=size_hi);
        let scenarios = loop {
            let set: Vec<usize> = (0..d).filter(|_| rng.gen_bool(membership)).collect();
            if !set.is_empty() {
                break set;
            }
        };
        items.push(Item::new(size, scenarios));
    }
    Ok(Instance::new(d, capacity, items).expect("generator respects instance invariants"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::serialize_instance;

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = GeneratorParams::new(10, 5, 42);
        let a = serialize_instance(&generate_instance(&p).unwrap());
        let b = serialize_instance(&generate_instance(&p).unwrap());
        assert_eq!(a, b);
        let c = serialize_instance(&generate_instance(&GeneratorParams::new(10, 5, 43)).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn large_instance_satisfies_invariants() {
        let inst = generate_instance(&GeneratorParams::new(200, 400, 7)).unwrap();
        assert_eq!(inst.num_items(), 200);
        assert_eq!(inst.num_scenarios(), 400);
        for item in inst.items() {
            assert!((1..=99).contains(&item.size));
            assert!(!item.scenarios.is_empty());
            assert!(item.scenarios.iter().all(|&k| k < 400));
        }
    }

    #[test]
    fn mean_scenario_set_size_is_half_of_d() {
        // 1000 items, d = 100: |K_i| ~ Bin(100, 0.5); the mean has sd 0.158,
        // so [45, 55] is far outside a 5 sigma band around 50.
        let inst = generate_instance(&GeneratorParams::new(1000, 100, 11)).unwrap();
        let mean = inst
            .items()
            .iter()
            .map(|it| it.scenarios.len() as f64)
            .sum::<f64>()
            / 1000.0;
        assert!((45.0..=55.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        let mut p = GeneratorParams::new(5, 5, 1);
        p.size_lo = 0;
        assert!(generate_instance(&p).is_err());
        let mut p = GeneratorParams::new(5, 5, 1);
        p.size_hi = 101;
        assert!(generate_instance(&p).is_err());
        assert_eq!(
            generate_instance(&GeneratorParams::new(0, 5, 1)),
            Err(GeneratorError::NoItems)
        );
    }

    #[test]
    fn mix_seed_separates_classes_and_replicates() {
        let a = mix_seed(1, 0, 0);
        assert_ne!(a, mix_seed(1, 1, 0));
        assert_ne!(a, mix_seed(1, 0, 1));
        assert_eq!(a, mix_seed(1, 0, 0));
    }
}
