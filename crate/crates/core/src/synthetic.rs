//! Seeded random interval datasets for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::interval::{Dataset, Interval};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub objects: usize,
    pub attributes: usize,
    /// Values are drawn from the integer levels `0..levels`.
    pub levels: usize,
    /// Probability that a cell is a proper interval rather than a point.
    pub interval_rate: f64,
    /// Objects are spread around this many centers; `0` draws uniformly.
    pub clusters: usize,
}

impl SyntheticSpec {
    pub fn uniform(objects: usize, attributes: usize, levels: usize) -> Self {
        SyntheticSpec { objects, attributes, levels, interval_rate: 0.3, clusters: 0 }
    }
}

pub fn generate(spec: &SyntheticSpec, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = spec.levels.max(1);
    let centers: Vec<Vec<f64>> = (0..spec.clusters)
        .map(|_| (0..spec.attributes).map(|_| rng.gen_range(0..levels) as f64).collect())
        .collect();
    let top = (levels - 1) as f64;
    let rows = (0..spec.objects)
        .map(|g| {
            let center = (!centers.is_empty()).then(|| &centers[rng.gen_range(0..centers.len())]);
            let cells = (0..spec.attributes)
                .map(|m| {
                    let v = match center {
                        Some(c) => {
                            let spread = (levels / 8).max(1) as i64;
                            (c[m] + rng.gen_range(-spread..=spread) as f64).clamp(0.0, top)
                        }
                        None => rng.gen_range(0..levels) as f64,
                    };
                    if rng.gen_bool(spec.interval_rate.clamp(0.0, 1.0)) {
                        let w = rng.gen_range(1..=2) as f64;
                        Interval { lo: v, hi: (v + w).min(top) }
                    } else {
                        Interval::point(v)
                    }
                })
                .collect();
            (format!("g{}", g + 1), cells)
        })
        .collect();
    let names = (0..spec.attributes).map(|m| format!("m{}", m + 1)).collect();
    Dataset::build(rows, names).expect("generated rows are well formed")
}

/// A small dataset with random shape: up to `max_objects` objects, up to
/// `max_attributes` attributes and up to `max_levels` distinct levels each.
pub fn small_random(seed: u64, max_objects: usize, max_attributes: usize, max_levels: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    let spec = SyntheticSpec {
        objects: rng.gen_range(1..=max_objects.max(1)),
        attributes: rng.gen_range(1..=max_attributes.max(1)),
        levels: rng.gen_range(1..=max_levels.max(1)),
        interval_rate: rng.gen_range(0.0..0.6),
        clusters: 0,
    };
    generate(&spec, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let spec = SyntheticSpec::uniform(50, 3, 5);
        let a = generate(&spec, 7);
        let b = generate(&spec, 7);
        assert_eq!(crate::io::write_dataset(&a), crate::io::write_dataset(&b));
        for m in 0..3 {
            assert!(a.value_set(m).len() <= 5);
        }
        for seed in 0..50 {
            let d = small_random(seed, 10, 3, 4);
            assert!(d.num_objects() <= 10 && d.num_attributes() <= 3);
            assert!(d.value_sets().iter().all(|w| w.len() <= 4));
        }
    }
}
