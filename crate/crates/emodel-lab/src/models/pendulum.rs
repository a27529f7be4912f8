//! `T*SU(2)` with `ζ = diag(i, -i)`: the spherical pendulum.
//!
//! The sphere point is `x` with `k ζ k⁻¹ = i x·σ`.

use nalgebra::DVector;

use crate::algebra::{commutator, CMat, LinearSpace, C64, I};
use crate::doubles::TStarPoint;
use crate::dynamics::{integrate, rk4_trajectory, IntegrationOptions, Observables, TStarModel};
use crate::error::{Error, Result};
use crate::models::SuiteReport;
use crate::random::{gaussian, rng_from_seed, Rng};

pub type Vec3 = [f64; 3];

pub fn zeta() -> CMat {
    CMat::from_diagonal(&DVector::from_vec(vec![I, -I]))
}

pub fn model() -> TStarModel {
    TStarModel::new(zeta()).expect("diag(i,-i) lies in su(2)")
}

/// `i x·σ`.
pub fn from_pauli(x: Vec3) -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, x[2]),
            C64::new(x[1], x[0]),
            C64::new(-x[1], x[0]),
            C64::new(0.0, -x[2]),
        ],
    )
}

/// Inverse of [`from_pauli`] on `su(2)`.
pub fn pauli_coordinates(m: &CMat) -> Vec3 {
    [m[(0, 1)].im, m[(0, 1)].re, m[(0, 0)].im]
}

fn check_su2(k: &CMat) -> Result<()> {
    if k.nrows() != 2 || k.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: k.nrows(),
        });
    }
    Ok(())
}

pub fn sphere_point(k: &CMat) -> Result<Vec3> {
    check_su2(k)?;
    Ok(pauli_coordinates(&(k * zeta() * k.adjoint())))
}

/// `ẋ` from `ṅ = [[κ, n], n]`.
pub fn sphere_velocity(l: &TStarPoint) -> Result<Vec3> {
    check_su2(&l.k)?;
    let n = &l.k * zeta() * l.k.adjoint();
    Ok(pauli_coordinates(&commutator(&commutator(&l.kappa, &n), &n)))
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Phase-space point with sphere position `x` and tangent velocity `ẋ`.
///
/// `k` has `u = cos(θ/2)`, `v = sin(θ/2) e^{iφ}`; `κ = -ṅ/4` is the unique momentum
/// in `Ad_k 𝒦⊥` producing `ẋ`.
pub fn state(x: Vec3, xdot: Vec3) -> Result<TStarPoint> {
    let norm = dot(x, x).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("must lie on the unit sphere, |x| = {norm}"),
        });
    }
    if dot(x, xdot).abs() > 1e-10 {
        return Err(Error::InvalidParameter {
            name: "xdot",
            reason: "must be tangent to the sphere".into(),
        });
    }
    let theta = x[2].clamp(-1.0, 1.0).acos();
    let phi = x[1].atan2(x[0]);
    let u = C64::new((theta / 2.0).cos(), 0.0);
    let v = C64::from_polar((theta / 2.0).sin(), phi);
    let k = CMat::from_row_slice(2, 2, &[u, -v.conj(), v, u.conj()]);
    let kappa = from_pauli(xdot).scale(-0.25);
    Ok(TStarPoint { k, kappa })
}

/// E-model energy in sphere variables: `¼|ẋ|² + 2 - 2x₃`.
pub fn energy(x: Vec3, xdot: Vec3) -> f64 {
    0.25 * dot(xdot, xdot) + 2.0 - 2.0 * x[2]
}

/// Position and velocity of a particle constrained to the unit sphere in `R³`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereState {
    pub x: Vec3,
    pub v: Vec3,
}

impl LinearSpace for SphereState {
    fn zero_like(&self) -> Self {
        Self { x: [0.0; 3], v: [0.0; 3] }
    }

    fn add_scaled(&mut self, a: f64, o: &Self) {
        for i in 0..3 {
            self.x[i] += a * o.x[i];
            self.v[i] += a * o.v[i];
        }
    }

    fn scale(&self, a: f64) -> Self {
        Self {
            x: self.x.map(|c| a * c),
            v: self.v.map(|c| a * c),
        }
    }

    fn frob_norm(&self) -> f64 {
        (dot(self.x, self.x) + dot(self.v, self.v)).sqrt()
    }

    fn all_finite(&self) -> bool {
        self.x.iter().chain(&self.v).all(|c| c.is_finite())
    }
}

/// `ẍ = g e₃ - g x₃ x - |ẋ|² x`: Lagrangian `½|ẋ|² + g x₃` on the unit sphere.
///
/// The E-model flow corresponds to `g = 4`.
pub fn sphere_rhs(s: &SphereState, gravity: f64) -> SphereState {
    let v2 = dot(s.v, s.v);
    let gx = gravity * s.x[2];
    SphereState {
        x: s.v,
        v: [
            -(gx + v2) * s.x[0],
            -(gx + v2) * s.x[1],
            gravity - (gx + v2) * s.x[2],
        ],
    }
}

/// Random unit `x` and tangent `ẋ` of Gaussian size.
pub fn random_state(rng: &mut Rng) -> SphereState {
    let mut x = [gaussian(rng), gaussian(rng), gaussian(rng)];
    let n = dot(x, x).sqrt();
    x = x.map(|c| c / n);
    let w = [gaussian(rng), gaussian(rng), gaussian(rng)];
    let wx = dot(w, x);
    SphereState {
        x,
        v: [w[0] - wx * x[0], w[1] - wx * x[1], w[2] - wx * x[2]],
    }
}

fn max_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt())
        .fold(0.0, f64::max)
}

/// E-model trajectories against the constrained sphere flow.
///
/// Gated: the flow with `g = 4`, energy conservation, the two fixed points. Noted: the
/// `g = 2` flow, which agrees only after `t ↦ √2 t`.
pub fn pendulum_suite(samples: usize, seed: u64, t_end: f64, dt: f64) -> Result<SuiteReport> {
    let m = model();
    let mut rng = rng_from_seed(seed);
    let mut rep = SuiteReport::new("pendulum", seed, samples);
    let opts = IntegrationOptions::rk4(t_end, dt);
    for _ in 0..samples {
        let s0 = random_state(&mut rng);
        let traj = integrate(&m, &state(s0.x, s0.v)?, &opts, &Observables::none())?;
        let xs: Vec<Vec3> = traj.points.iter().map(|l| sphere_point(&l.k)).collect::<Result<_>>()?;
        let vs: Vec<Vec3> = traj.points.iter().map(sphere_velocity).collect::<Result<_>>()?;
        let sphere = rk4_trajectory(&s0, t_end, dt, |s| sphere_rhs(s, 4.0));
        let ys: Vec<Vec3> = sphere.iter().map(|s| s.x).collect();
        rep.record("trajectory-vs-sphere-flow", max_distance(&xs, &ys), 1e-6);

        let e0 = energy(xs[0], vs[0]);
        let drift = xs.iter().zip(&vs).map(|(x, v)| (energy(*x, *v) - e0).abs()).fold(0.0, f64::max);
        rep.record("energy-drift", drift / e0.abs().max(1.0), 1e-8);
        rep.record("hamiltonian-drift", traj.energy_drift(), 1e-8);

        let slow = SphereState {
            x: s0.x,
            v: s0.v.map(|c| c / 2f64.sqrt()),
        };
        let literal = rk4_trajectory(&slow, t_end * 2f64.sqrt(), dt * 2f64.sqrt(), |s| sphere_rhs(s, 2.0));
        let zs: Vec<Vec3> = literal.iter().map(|s| s.x).collect();
        rep.note("g2-flow-after-time-rescale", max_distance(&xs, &zs));
        let unscaled = rk4_trajectory(&s0, t_end, dt, |s| sphere_rhs(s, 2.0));
        let us: Vec<Vec3> = unscaled.iter().map(|s| s.x).collect();
        rep.note("g2-flow-without-rescale", max_distance(&xs, &us));
    }
    // x₃ = -1 is unstable and k still turns along the fibre, so both poles are checked on
    // the sphere over a short window; round-off grows like e^{2t}
    let short = IntegrationOptions::rk4(0.1, dt.min(1e-3));
    for pole in [1.0, -1.0] {
        let x = [0.0, 0.0, pole];
        let traj = integrate(&m, &state(x, [0.0; 3])?, &short, &Observables::none())?;
        let xs: Vec<Vec3> = traj.points.iter().map(|l| sphere_point(&l.k)).collect::<Result<_>>()?;
        rep.record("fixed-points", max_distance(&xs, &vec![x; xs.len()]), 1e-12);
    }
    let x = [0.0, 0.0, 1.0];
    let traj = integrate(&m, &state(x, [0.0; 3])?, &opts, &Observables::none())?;
    let xs: Vec<Vec3> = traj.points.iter().map(|l| sphere_point(&l.k)).collect::<Result<_>>()?;
    rep.record("stable-fixed-point", max_distance(&xs, &vec![x; xs.len()]), 1e-12);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{current_of, hamiltonian};

    #[test]
    fn pauli_round_trip() {
        let x = [0.3, -0.4, 0.5];
        assert_eq!(pauli_coordinates(&from_pauli(x)), x);
    }

    #[test]
    fn state_reproduces_position_velocity_and_energy() {
        let x = [0.6, 0.0, 0.8];
        let xdot = [-0.8 * 0.7, 0.3, 0.6 * 0.7];
        let l = state(x, xdot).unwrap();
        let m = model();
        let got = sphere_point(&l.k).unwrap();
        let vel = sphere_velocity(&l).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-14);
            assert!((vel[i] - xdot[i]).abs() < 1e-14);
        }
        let h = hamiltonian(&m, &current_of(&m, &l));
        assert!((h - energy(x, xdot)).abs() < 1e-13);
    }

    #[test]
    fn off_sphere_is_rejected() {
        assert!(state([1.0, 1.0, 0.0], [0.0; 3]).is_err());
        assert!(state([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]).is_err());
    }
}
