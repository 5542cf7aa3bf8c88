//! Seeded direction sampling shared by the witness searches.

use rand::Rng;
use rand_distr::StandardNormal;

/// Uniform on the unit sphere of `ℝᵏ` (`k ≥ 1`).
pub(crate) fn unit_sphere<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let n = crate::linalg::norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform in the closed ball of radius `r`.
pub(crate) fn ball<R: Rng>(rng: &mut R, k: usize, r: f64) -> Vec<f64> {
    let u: f64 = rng.gen();
    let s = r * u.powf(1.0 / k as f64);
    unit_sphere(rng, k).into_iter().map(|x| x * s).collect()
}
