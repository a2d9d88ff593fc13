//! Seeded random sources shared by the generators and Monte Carlo estimators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Generator for `(seed, stream)`. Distinct streams are independent, which
/// lets parallel chunks reproduce the same sequence regardless of
/// scheduling.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex standard normal: `E|z|^2 = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform point on the unit sphere of `C^r` (normalized complex Gaussian).
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R, r: usize) -> Vec<Complex64> {
    loop {
        let z: Vec<Complex64> = (0..r).map(|_| complex_normal(rng)).collect();
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return z.into_iter().map(|c| c / norm).collect();
        }
    }
}
