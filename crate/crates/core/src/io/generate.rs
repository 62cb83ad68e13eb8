use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::geometry::{Circle, Point2};

/// `n` centres uniform in `[-limit, limit]²` with radii uniform in
/// `[0.01 limit, 0.02 limit]`.
pub fn gen_random(n: usize, limit: f64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circles = (0..n)
        .map(|_| {
            let x = rng.gen_range(-limit..=limit);
            let y = rng.gen_range(-limit..=limit);
            let r = rng.gen_range(0.01 * limit..=0.02 * limit);
            Circle::new(Point2::new(x, y), r)
        })
        .collect();
    Instance::new(format!("random-{n}-{seed}"), circles)
}

/// A jittered `⌊√n⌋ × ⌊√n⌋` integer grid; leftover points are uniform over
/// the grid area. Radii are uniform in `[0.2, 0.5]`.
pub fn gen_structured(n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = n.isqrt();
    let mut circles = Vec::with_capacity(n);
    for i in 0..side {
        for j in 0..side {
            let x = i as f64 + rng.gen_range(-0.1..=0.1);
            let y = j as f64 + rng.gen_range(-0.1..=0.1);
            circles.push(Circle::new(Point2::new(x, y), rng.gen_range(0.2..=0.5)));
        }
    }
    let extent = side.saturating_sub(1).max(1) as f64;
    while circles.len() < n {
        let x = rng.gen_range(0.0..=extent);
        let y = rng.gen_range(0.0..=extent);
        circles.push(Circle::new(Point2::new(x, y), rng.gen_range(0.2..=0.5)));
    }
    Instance::new(format!("structured-{n}-{seed}"), circles)
}
