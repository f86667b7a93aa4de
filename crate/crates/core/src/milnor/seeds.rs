use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::poly::CPoint;

/// Per-operation salts so that different searches draw independent streams
/// from the same user seed.
pub(crate) mod salt {
    pub const TANGENCY: u64 = 0x7461_6e67;
    pub const COMMON_ZEROS: u64 = 0x636f_6d6d;
    pub const CRITICAL: u64 = 0x6372_6974;
    pub const TRACE: u64 = 0x7472_6163;
    pub const LOCUS: u64 = 0x6c6f_6375;
}

pub(crate) fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.rotate_left(17))
}

/// Uniform point on the sphere of radius `r`, from a normalized 4-d Gaussian.
pub(crate) fn on_sphere(rng: &mut ChaCha8Rng, r: f64) -> CPoint {
    loop {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            return CPoint::from_real(g.map(|v| v / n * r));
        }
    }
}

/// Random direction with a log-uniform radius in `[lo, hi]`.
pub(crate) fn log_radial(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> CPoint {
    let t: f64 = rng.random();
    let r = (lo.ln() + t * (hi.ln() - lo.ln())).exp();
    on_sphere(rng, r)
}
