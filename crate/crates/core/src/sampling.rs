//! Seeded random inputs for the randomized checks.

use rand::Rng;

use crate::measure_fn::StepFunction;
use crate::tree_sim::LeafVector;

/// A random leaf vector with values in [0, 10], mixing a few shapes: dense
/// uniform noise, sparse spikes, and a decaying profile with noise.
pub fn random_leaf_vector<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> LeafVector {
    let n = 1usize << depth;
    let shape = rng.random_range(0..3u8);
    let values: Vec<f64> = match shape {
        0 => (0..n).map(|_| 10.0 * rng.random::<f64>()).collect(),
        1 => {
            let density = rng.random_range(0.001..0.2);
            (0..n)
                .map(|_| {
                    if rng.random_bool(density) {
                        10.0 * rng.random::<f64>()
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        _ => {
            let decay = rng.random_range(0.1..0.9);
            let start = rng.random_range(0..n);
            (0..n)
                .map(|i| {
                    let d = (i as f64 - start as f64).abs() / n as f64 + 1.0 / n as f64;
                    (d.powf(-decay) * rng.random::<f64>()).min(10.0)
                })
                .collect()
        }
    };
    LeafVector::new(depth, values).expect("sampled leaf values are finite and >= 0")
}

/// A random nonincreasing step function with `1..=max_pieces` pieces and
/// positive values; piece lengths are drawn on a log scale so short tall
/// pieces appear near 0.
pub fn random_nonincreasing_step<R: Rng + ?Sized>(rng: &mut R, max_pieces: usize) -> StepFunction {
    let pieces = rng.random_range(1..=max_pieces.max(1));
    let mut cuts: Vec<f64> = (0..pieces - 1)
        .map(|_| 10f64.powf(-6.0 * rng.random::<f64>()))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut breaks = Vec::with_capacity(cuts.len() + 2);
    breaks.push(0.0);
    breaks.extend(cuts.into_iter().filter(|&c| c > 1e-9 && c < 1.0 - 1e-9));
    breaks.push(1.0);
    let mut values: Vec<f64> = (0..breaks.len() - 1)
        .map(|_| 10f64.powf(4.0 * rng.random::<f64>() - 2.0))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    StepFunction::new(breaks, values).expect("sampled step function is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_nonincreasing_step(&mut a, 8);
            assert!(g.is_nonincreasing());
            assert_eq!(g, random_nonincreasing_step(&mut b, 8));
            let phi = random_leaf_vector(&mut a, 6);
            assert_eq!(phi, random_leaf_vector(&mut b, 6));
        }
    }
}
