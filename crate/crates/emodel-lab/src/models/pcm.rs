//! Second-order form of the point particle principal chiral model on `T*SU(N)`.
//!
//! The point derivative is `k' = ζk - kζ`, so `k'k⁻¹ = ζ - Ad_k ζ`.

use serde::Serialize;

use crate::algebra::{commutator, max_abs, CMat, Stabilizer, C64, ONE};
use crate::dynamics::{current_of, five_point_derivative, integrate, IntegrationOptions, Observables, TStarModel};
use crate::error::{Error, Result};
use crate::integrability::{lax_pair, PcmSpectral};
use crate::models::SuiteReport;
use crate::random::{complex_gaussian, rng_from_seed, special_unitary, su_element};

/// `k'k⁻¹ = ζ - k ζ k⁻¹`.
pub fn k_prime_k_inv(zeta: &CMat, k: &CMat) -> CMat {
    zeta - k * zeta * k.adjoint()
}

/// `k⁻¹k' = k⁻¹ζk - ζ`.
pub fn k_inv_k_prime(zeta: &CMat, k: &CMat) -> CMat {
    k.adjoint() * zeta * k - zeta
}

/// `L(λ) = ζ - (k'k⁻¹ - λ k ρ' k⁻¹)/(1-λ²)`, `M(λ) = -(λ k'k⁻¹ - k ρ' k⁻¹)/(1-λ²)`.
pub fn lax_closed_form(zeta: &CMat, k: &CMat, rho_prime: &CMat, lambda: C64) -> Result<(CMat, CMat)> {
    let d = ONE - lambda * lambda;
    if d.norm() < crate::integrability::POLE_TOL {
        return Err(Error::Pole {
            denominator: "1-lambda^2",
        });
    }
    let w = k_prime_k_inv(zeta, k);
    let r = k * rho_prime * k.adjoint();
    let l = zeta - (&w - &r * lambda) / d;
    let m = -(&w * lambda - r) / d;
    Ok((l, m))
}

/// `½(-(P⊥k⁻¹k̇, P⊥k⁻¹k̇) + (k⁻¹k', k⁻¹k'))` with the Killing form `Re tr`.
pub fn second_order_integrand(zeta: &CMat, k: &CMat, kdot: &CMat) -> Result<f64> {
    let stab = Stabilizer::new(zeta)?;
    let pv = stab.project_perp(&(k.adjoint() * kdot));
    let kk = k_inv_k_prime(zeta, k);
    Ok(0.5 * (-(&pv * &pv).trace().re + (&kk * &kk).trace().re))
}

/// Residuals of the two `λ`-coefficients of the Lax equation along a sampled path `k(t)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SecondOrderResidual {
    /// `-∂(k'k⁻¹) + [ζ, A] - [k'k⁻¹, A]` with `A = k P⊥(k⁻¹k̇) k⁻¹`; vanishes for any path.
    pub bianchi: f64,
    /// `[ζ, k'k⁻¹] - ∂A`; vanishes on solutions.
    pub eom: f64,
}

/// Evaluates both residuals with nested five-point differences (needs at least 9 samples).
pub fn second_order_residual(zeta: &CMat, ks: &[CMat], dt: f64) -> Result<SecondOrderResidual> {
    if ks.len() < 9 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("need at least 9 samples, got {}", ks.len()),
        });
    }
    let stab = Stabilizer::new(zeta)?;
    let n = ks.len();
    let w: Vec<CMat> = ks.iter().map(|k| k_prime_k_inv(zeta, k)).collect();
    let mut a = vec![CMat::zeros(zeta.nrows(), zeta.ncols()); n];
    for i in 2..n - 2 {
        let kdot = five_point_derivative(ks, i, dt);
        let k = &ks[i];
        a[i] = k * stab.project_perp(&(k.adjoint() * kdot)) * k.adjoint();
    }
    let mut out = SecondOrderResidual { bianchi: 0.0, eom: 0.0 };
    for i in 4..n - 4 {
        let wdot = five_point_derivative(&w, i, dt);
        let adot = five_point_derivative(&a, i, dt);
        let bia = -wdot + commutator(zeta, &a[i]) - commutator(&w[i], &a[i]);
        let te = commutator(zeta, &w[i]) - adot;
        out.bianchi = out.bianchi.max(bia.norm());
        out.eom = out.eom.max(te.norm());
    }
    Ok(out)
}

/// The `λ`-split of the Lax equation on three kinds of path, and the closed-form Lax pair.
///
/// The equation-of-motion residual of a generic path is reported as a note: it should be
/// of order one.
pub fn pcm_suite(zeta: &CMat, samples: usize, seed: u64) -> Result<SuiteReport> {
    let model = TStarModel::new(zeta.clone())?;
    let stab = Stabilizer::new(zeta)?;
    let n = zeta.nrows();
    let sd = PcmSpectral::new(model.clone());
    let mut rng = rng_from_seed(seed);
    let mut rep = SuiteReport::new("pcm-second-order", seed, samples);
    let dt = 1e-3;
    for _ in 0..samples {
        let k0 = special_unitary(n, &mut rng);
        let a = su_element(n, &mut rng);
        let b = su_element(n, &mut rng);
        let path: Vec<CMat> = (0..41)
            .map(|i| {
                let t = i as f64 * dt;
                &k0 * (a.scale(t) + b.scale(t * t)).exp()
            })
            .collect();
        let r = second_order_residual(zeta, &path, dt)?;
        rep.record("bianchi-generic-path", r.bianchi, 1e-6);
        rep.note("eom-generic-path", r.eom);

        // a constant path solves the equations only if k commutes with ζ
        let h = stab.project(&su_element(n, &mut rng)).exp();
        let r = second_order_residual(zeta, &vec![h; 9], dt)?;
        rep.record("constant-stabilizer-path", r.bianchi.max(r.eom), 1e-12);

        let rho = stab.project_perp(&su_element(n, &mut rng));
        let l0 = model.point_from_rho(&k0, &rho);
        let traj = integrate(&model, &l0, &IntegrationOptions::rk4(40.0 * dt, dt), &Observables::none())?;
        let ks: Vec<CMat> = traj.points.iter().map(|p| p.k.clone()).collect();
        let r = second_order_residual(zeta, &ks, dt)?;
        rep.record("bianchi-solution", r.bianchi, 1e-6);
        rep.record("eom-solution", r.eom, 1e-6);

        // closed-form Lax pair at the initial point
        let lambda = complex_gaussian(&mut rng) * 0.5;
        if (ONE - lambda * lambda).norm() > 1e-2 {
            let rho_prime = commutator(zeta, &rho);
            let (l, m) = lax_closed_form(zeta, &k0, &rho_prime, lambda)?;
            let generic = lax_pair(&sd, &current_of(&model, &l0), lambda)?;
            rep.record("lax-closed-form", max_abs(&(l - generic.l)).max(max_abs(&(m - generic.m))), 1e-12);
        }
    }
    Ok(rep)
}
