mod common;

use emodel_lab::algebra::{CMat, C64, I};
use emodel_lab::dynamics::{integrate, IntegrationOptions, Observables};
use emodel_lab::models::biyb::BiYbGeometry;
use emodel_lab::models::cpn::{self, CVec};
use emodel_lab::models::reduction::{random_chart, HomogeneousState};
use emodel_lab::models::{su3, pcm, pendulum};
use emodel_lab::random::{rng_from_seed, special_unitary, su_element};
use emodel_lab::Error;
use proptest::prelude::*;

fn cvec(parts: &[(f64, f64)]) -> CVec {
    CVec::from_iterator(parts.len(), parts.iter().map(|&(a, b)| C64::new(a, b)))
}

fn max_dist(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(p, q)| (0..3).map(move |i| (p[i] - q[i]).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn pendulum_follows_a_hand_written_sphere_integrator() {
    let m = pendulum::model();
    let opts = IntegrationOptions::rk4(5.0, 1e-3);
    for &(theta, phi, a, b) in &[(0.4, 0.1, 0.3, -0.8), (2.0, -1.3, 1.2, 0.4), (1.0, 2.5, -0.2, 0.0)] {
        let (x, v) = common::sphere_state(theta, phi, a, b);
        let traj = integrate(&m, &pendulum::state(x, v).unwrap(), &opts, &Observables::none()).unwrap();
        let xs: Vec<_> = traj.points.iter().map(|l| pendulum::sphere_point(&l.k).unwrap()).collect();
        let oracle = common::spherical_pendulum(x, v, 4.0, 5.0, 1e-3);
        assert_eq!(xs.len(), oracle.len());
        assert!(max_dist(&xs, &oracle) < 1e-6);
    }
}

#[test]
fn half_strength_gravity_is_a_different_flow() {
    let (x, v) = common::sphere_state(0.9, 0.0, 0.5, 0.5);
    let traj = integrate(
        &pendulum::model(),
        &pendulum::state(x, v).unwrap(),
        &IntegrationOptions::rk4(5.0, 1e-3),
        &Observables::none(),
    )
    .unwrap();
    let xs: Vec<_> = traj.points.iter().map(|l| pendulum::sphere_point(&l.k).unwrap()).collect();
    assert!(max_dist(&xs, &common::spherical_pendulum(x, v, 2.0, 5.0, 1e-3)) > 0.1);
}

#[test]
fn pendulum_state_rejects_off_sphere_data() {
    assert!(matches!(pendulum::state([1.0, 1.0, 0.0], [0.0; 3]), Err(Error::InvalidParameter { .. })));
    assert!(matches!(pendulum::state([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]), Err(Error::InvalidParameter { .. })));
}

/// `k⁻¹ζk - ζ` straight from matrices.
fn k_inv_k_prime_oracle(n: usize, chi: &CVec) -> CMat {
    let k = cpn::chart_embed(chi).unwrap();
    let zeta = cpn::zeta(n);
    k.adjoint() * &zeta * &k - zeta
}

#[test]
fn cpn_killing_norm_from_matrices() {
    let mut rng = rng_from_seed(5);
    for n in 1..=4 {
        for _ in 0..20 {
            let (chi, _) = random_chart(n, 0.2 + 0.7 * rand::Rng::gen::<f64>(&mut rng), &mut rng);
            let x = k_inv_k_prime_oracle(n, &chi);
            let norm = (&x * &x).trace().re;
            let n1 = n as f64 + 1.0;
            assert!((norm + 2.0 * n1 * n1 * chi.norm_squared()).abs() < 1e-12 * n1 * n1);
            assert!((x - cpn::k_inv_k_prime(&chi).unwrap()).camax() < 1e-12);
        }
    }
}

#[test]
fn chart_embedding_is_special_unitary_with_last_column_z() {
    let chi = cvec(&[(0.3, -0.2), (0.1, 0.4)]);
    let k = cpn::chart_embed(&chi).unwrap();
    assert!((&k * k.adjoint() - CMat::identity(3, 3)).camax() < 1e-14);
    assert!((k.determinant() - C64::new(1.0, 0.0)).norm() < 1e-14);
    let (z, _) = cpn::gauge_fix(&chi, &chi).unwrap();
    // k maps e_{N+1} to (χ, √(1-|χ|²))
    let col = k.column(2).into_owned();
    assert!((col - z).camax() < 1e-15);
}

#[test]
fn chart_velocity_matches_finite_difference() {
    let chi = cvec(&[(0.3, -0.2), (0.1, 0.4), (-0.2, 0.05)]);
    let dchi = cvec(&[(0.7, 0.1), (-0.3, 0.2), (0.0, -0.5)]);
    let h = 1e-5;
    let f = |t: f64| cpn::chart_embed(&(&chi + &dchi * C64::new(t, 0.0))).unwrap();
    let fd = (f(-2.0 * h) - f(-h) * C64::new(8.0, 0.0) + f(h) * C64::new(8.0, 0.0) - f(2.0 * h)) / C64::new(12.0 * h, 0.0);
    assert!((fd - cpn::chart_embed_velocity(&chi, &dchi).unwrap()).camax() < 1e-9);
}

#[test]
fn chart_domain_is_enforced() {
    let chi = cvec(&[(0.8, 0.0), (0.0, 0.6)]);
    assert!(matches!(cpn::chart_embed(&chi), Err(Error::ChartDomain { .. })));
}

#[test]
fn fubini_study_on_the_riemann_sphere() {
    // affine coordinate u = Z₁/Z₂, metric |du|²/(1+|u|²)²
    let chi = cvec(&[(0.3, 0.4)]);
    let dchi = cvec(&[(-0.2, 0.7)]);
    let (z, dz) = cpn::gauge_fix(&chi, &dchi).unwrap();
    let u = z[0] / z[1];
    let du = (dz[0] * z[1] - z[0] * dz[1]) / (z[1] * z[1]);
    let expected = du.norm_sqr() / (1.0 + u.norm_sqr()).powi(2);
    assert!((cpn::fubini_study(&z, &dz) - expected).abs() < 1e-14);
    // invariant under Z ↦ e^{iφ}Z with a time-dependent phase
    let phase = C64::from_polar(1.0, 0.7);
    let z2 = &z * phase;
    let dz2 = &dz * phase + &z * (phase * I * 0.3);
    assert!((cpn::fubini_study(&z2, &dz2) - expected).abs() < 1e-14);
}

fn rk4_pair(chi: &CVec, p: &CVec, dt: f64) -> (CVec, CVec) {
    let f = |c: &CVec, q: &CVec| cpn::hamilton_rhs(c, q).unwrap();
    let h = C64::new(dt, 0.0);
    let half = C64::new(dt / 2.0, 0.0);
    let (a1, b1) = f(chi, p);
    let (a2, b2) = f(&(chi + &a1 * half), &(p + &b1 * half));
    let (a3, b3) = f(&(chi + &a2 * half), &(p + &b2 * half));
    let (a4, b4) = f(&(chi + &a3 * h), &(p + &b3 * h));
    let sixth = C64::new(dt / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    (
        chi + (a1 + &a2 * two + &a3 * two + a4) * sixth,
        p + (b1 + &b2 * two + &b3 * two + b4) * sixth,
    )
}

#[test]
fn chart_hamilton_flow_conserves_energy() {
    let mut rng = rng_from_seed(17);
    let (chi0, w0) = random_chart(2, 0.3, &mut rng);
    let w0 = &w0 * C64::new(0.2, 0.0);
    let p0 = cpn::p_of_w(&chi0, &w0).unwrap();
    let h0 = cpn::hamiltonian_p(&chi0, &p0).unwrap();
    let (mut chi, mut p) = (chi0, p0);
    let mut drift: f64 = 0.0;
    for _ in 0..10_000 {
        (chi, p) = rk4_pair(&chi, &p, 1e-3);
        // the flow stays inside the chart for this amplitude
        drift = drift.max((cpn::hamiltonian_p(&chi, &p).unwrap() - h0).abs());
    }
    assert!(drift / h0.abs().max(1.0) < 1e-8);
}

#[test]
fn undeformed_bi_yb_reduces_to_the_principal_model_continuously() {
    let mut rng = rng_from_seed(23);
    let xi = cpn::zeta(1);
    for _ in 0..10 {
        let k = special_unitary(2, &mut rng);
        let kdot = &k * su_element(2, &mut rng);
        let l0 = pcm::second_order_integrand(&xi, &k, &kdot).unwrap();
        let exact = BiYbGeometry::new(xi.clone(), 0.0, 0.0).unwrap().lagrangian(&k, &kdot).unwrap();
        assert!((exact - l0).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for delta in [1e-2, 1e-3, 1e-4] {
            let l = BiYbGeometry::new(xi.clone(), delta, 0.5 * delta).unwrap().lagrangian(&k, &kdot).unwrap();
            let err = (l - l0).abs();
            assert!(err <= last + 1e-12);
            last = err;
        }
        assert!(last < 1e-2);
    }
}

#[test]
fn su2_closed_form_is_the_even_part_of_the_generic_lagrangian() {
    let mut rng = rng_from_seed(29);
    let (eta, mu) = (0.6, 0.9);
    let g = BiYbGeometry::new(cpn::zeta(1), eta, mu).unwrap();
    for _ in 0..20 {
        let k = special_unitary(2, &mut rng);
        let kdot = &k * su_element(2, &mut rng);
        let plus = g.lagrangian(&k, &kdot).unwrap();
        let minus = g.lagrangian(&k, &(-&kdot)).unwrap();
        let (x, xd) = emodel_lab::models::biyb::su2::sphere(&k, &kdot);
        let closed = emodel_lab::models::biyb::su2::lagrangian(x, xd, eta, mu);
        assert!((0.5 * (plus + minus) - closed).abs() < 1e-9);
    }
}

#[test]
fn negative_deformations_are_rejected() {
    assert!(BiYbGeometry::new(cpn::zeta(1), -0.1, 0.0).is_err());
    assert!(BiYbGeometry::new(cpn::zeta(1), 0.1, -1.0).is_err());
}

#[test]
fn su3_chart_rejects_the_pole() {
    let ch = su3::Chart::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), 0.3).unwrap();
    assert!(matches!(ch.scalars(0.7, 0.3), Err(Error::Pole { .. })));
}

#[test]
fn su3_uncorrected_differs_from_corrected() {
    let mut rng = rng_from_seed(31);
    let (ch, v) = su3::random_point(&mut rng);
    let a = su3::lagrangian(&ch, &v, 0.7, 0.3, su3::SignConvention::Uncorrected).unwrap();
    let b = su3::lagrangian(&ch, &v, 0.7, 0.3, su3::SignConvention::Corrected).unwrap();
    assert!((a - b).abs() > 1e-6);
}

fn chart_strategy(n: usize) -> impl Strategy<Value = (CVec, CVec)> {
    (
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n),
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n),
        0.05..0.9f64,
    )
        .prop_filter_map("nonzero χ", |(c, w, r)| {
            let chi = cvec(&c);
            let norm = chi.norm();
            (norm > 1e-3).then(|| (&chi * C64::new(r / norm, 0.0), cvec(&w)))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn momentum_maps_are_mutually_inverse((chi, w) in chart_strategy(3)) {
        let p = cpn::p_of_w(&chi, &w).unwrap();
        prop_assert!((cpn::w_of_p(&chi, &p).unwrap() - &w).camax() < 1e-10);
        let xi = cpn::xi_of_w(&chi, &w).unwrap();
        prop_assert!((cpn::w_of_xi(&chi, &xi).unwrap() - &w).camax() < 1e-10);
        let hw = cpn::hamiltonian_w(&chi, &w).unwrap();
        let hp = cpn::hamiltonian_p(&chi, &p).unwrap();
        prop_assert!((hw - hp).abs() < 1e-12 * hw.abs().max(1.0));
    }

    #[test]
    fn homogeneous_lift_satisfies_the_constraints((chi, w) in chart_strategy(2), beta in -3.0..3.0f64) {
        let s = HomogeneousState::from_chart(&chi, &w).unwrap();
        for t in [s.clone(), s.phase_flow(beta), s.shift_flow(beta)] {
            let (unit, ortho) = t.constraints();
            prop_assert!(unit.abs() < 1e-12 && ortho.norm() < 1e-12);
            let r = t.reduce();
            let r0 = s.reduce();
            prop_assert!((&r.w - &r0.w).camax() < 1e-12 && (&r.j - &r0.j).camax() < 1e-12);
        }
    }

    #[test]
    fn chart_recovery_inverts_the_lift((chi, w) in chart_strategy(2)) {
        let l = cpn::tstar_point(&chi, &w).unwrap();
        let j = emodel_lab::dynamics::current_of(&cpn::model(2), &l);
        let (chi2, p2) = cpn::chart_of_current(&cpn::zeta(2), &j).unwrap();
        prop_assert!((chi2 - &chi).camax() < 1e-9);
        prop_assert!((p2 - cpn::p_of_w(&chi, &w).unwrap()).camax() < 1e-9);
    }

    #[test]
    fn sigma_tau_identity(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (ch, _) = su3::random_point(&mut rng);
        if let Ok(sc) = ch.scalars(0.7, 0.3) {
            prop_assert!((sc.sigma * sc.sigma + sc.tau * sc.tau - sc.ab2).abs() < 1e-12);
        }
    }

    #[test]
    fn pendulum_energy_is_the_emodel_hamiltonian(theta in 0.1..3.0f64, phi in -3.0..3.0f64, a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let (x, v) = common::sphere_state(theta, phi, a, b);
        let l = pendulum::state(x, v).unwrap();
        let m = pendulum::model();
        let h = emodel_lab::dynamics::hamiltonian(&m, &emodel_lab::dynamics::current_of(&m, &l));
        prop_assert!((h - pendulum::energy(x, v)).abs() < 1e-12);
    }
}
