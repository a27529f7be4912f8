#![allow(dead_code)]

use emodel_lab::algebra::{CMat, C64, I};
use emodel_lab::dynamics::{BiYbModel, TStarModel};
use emodel_lab::integrability::{BiYbSpectral, PcmSpectral};
use nalgebra::DVector;

/// `i·diag(1, …, 1, -(N-1))`.
pub fn block_xi(n: usize) -> CMat {
    let mut d = vec![I; n];
    d[n - 1] = I * -((n - 1) as f64);
    CMat::from_diagonal(&DVector::from_vec(d))
}

/// Regular Cartan element `i·diag(N-1, N-3, …, 1-N)`.
pub fn regular_xi(n: usize) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(
        n,
        (0..n).map(|a| I * ((n - 1) as f64 - 2.0 * a as f64)),
    ))
}

pub fn pcm(n: usize) -> PcmSpectral {
    PcmSpectral::new(TStarModel::new(block_xi(n)).unwrap())
}

pub fn biyb(xi: CMat, eta: f64, mu: f64) -> BiYbSpectral {
    BiYbSpectral::new(BiYbModel::new(xi, eta, mu).unwrap())
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub type V3 = [f64; 3];

fn axpy(a: f64, x: V3, y: V3) -> V3 {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

fn dot3(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Particle on the unit sphere under the constant force `g e₃`, written out by hand:
/// `ẍ = g e₃ - g x₃ x - |ẋ|² x`. Returns positions at every step.
pub fn spherical_pendulum(x0: V3, v0: V3, g: f64, t_end: f64, dt: f64) -> Vec<V3> {
    let acc = |x: V3, v: V3| {
        let mut a = [0.0, 0.0, g];
        a = axpy(-g * x[2] - dot3(v, v), x, a);
        a
    };
    let steps = (t_end / dt).round() as usize;
    let (mut x, mut v) = (x0, v0);
    let mut out = vec![x];
    for _ in 0..steps {
        let k1x = v;
        let k1v = acc(x, v);
        let (x2, v2) = (axpy(dt / 2.0, k1x, x), axpy(dt / 2.0, k1v, v));
        let k2x = v2;
        let k2v = acc(x2, v2);
        let (x3, v3) = (axpy(dt / 2.0, k2x, x), axpy(dt / 2.0, k2v, v));
        let k3x = v3;
        let k3v = acc(x3, v3);
        let (x4, v4) = (axpy(dt, k3x, x), axpy(dt, k3v, v));
        let k4x = v4;
        let k4v = acc(x4, v4);
        for i in 0..3 {
            x[i] += dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        out.push(x);
    }
    out
}

/// Unit vector and a tangent velocity from five numbers.
pub fn sphere_state(theta: f64, phi: f64, a: f64, b: f64) -> (V3, V3) {
    let x = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let e_theta = [theta.cos() * phi.cos(), theta.cos() * phi.sin(), -theta.sin()];
    let e_phi = [-phi.sin(), phi.cos(), 0.0];
    (x, axpy(b, e_phi, [a * e_theta[0], a * e_theta[1], a * e_theta[2]]))
}
