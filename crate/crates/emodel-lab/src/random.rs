//! Seeded sampling of algebra and group elements.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{CMat, C64};
use crate::doubles::iwasawa_decompose_unchecked;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

pub fn complex_gaussian(rng: &mut Rng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

pub fn complex_vector(n: usize, rng: &mut Rng) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn complex_matrix(n: usize, rng: &mut Rng) -> CMat {
    CMat::from_fn(n, n, |_, _| complex_gaussian(rng))
}

fn remove_trace(mut x: CMat) -> CMat {
    let n = x.nrows();
    let t = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= t;
    }
    x
}

/// Gaussian element of `sl(N, C)`.
pub fn sl_element(n: usize, rng: &mut Rng) -> CMat {
    remove_trace(complex_matrix(n, rng))
}

/// Gaussian element of `su(N)`.
pub fn su_element(n: usize, rng: &mut Rng) -> CMat {
    let a = complex_matrix(n, rng);
    remove_trace((&a - a.adjoint()).scale(0.5))
}

/// Random diagonal element of the Cartan subalgebra of `su(N)`.
pub fn cartan_element(n: usize, rng: &mut Rng) -> CMat {
    let mut d: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    d.iter_mut().for_each(|x| *x -= mean);
    CMat::from_fn(n, n, |i, j| if i == j { C64::new(0.0, d[i]) } else { C64::new(0.0, 0.0) })
}

/// Haar-distributed element of `SU(N)` (QR of a Ginibre matrix, then det fixing).
pub fn special_unitary(n: usize, rng: &mut Rng) -> CMat {
    let g = iwasawa_decompose_unchecked(&complex_matrix(n, rng)).0;
    let det = g.determinant();
    let phase = C64::from_polar(1.0, -det.arg() / n as f64);
    g * phase
}

/// `exp(scale·X)` for Gaussian `X ∈ sl(N, C)`, normalised to det 1.
pub fn sl_group_element(n: usize, scale: f64, rng: &mut Rng) -> CMat {
    let x = sl_element(n, rng) * C64::new(scale, 0.0);
    x.exp()
}

/// Uniform point `(a, b)` on the unit 3-sphere in `C²`.
pub fn unit_pair(rng: &mut Rng) -> (C64, C64) {
    loop {
        let a = complex_gaussian(rng);
        let b = complex_gaussian(rng);
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if r > 1e-3 {
            return (a / r, b / r);
        }
    }
}
