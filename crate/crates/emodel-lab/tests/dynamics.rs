use emodel_lab::algebra::{LinearSpace, C64};
use emodel_lab::dynamics::{
    current_of, eom_rhs, hamiltonian, integrate, integrate_current, poisson_bracket_current, BiYbModel, EModel,
    IntegrationOptions, Observables, Scheme, TStarModel,
};
use emodel_lab::integrability::{lax_observables, BiYbSpectral, PcmSpectral, SpectralData};
use emodel_lab::models::{block_xi, regular_xi};
use emodel_lab::random::rng_from_seed;
use emodel_lab::Error;
use proptest::prelude::*;

#[test]
fn csv_layout() {
    let sd = PcmSpectral::new(TStarModel::new(block_xi(2)).unwrap());
    let lambdas = [C64::new(0.3, 0.0), C64::new(-0.4, 0.1)];
    let obs = lax_observables(&sd, &lambdas, &[2, 3]).unwrap();
    let mut rng = rng_from_seed(4);
    let l0 = sd.model().random_point(0.4, &mut rng);
    let traj = integrate(sd.model(), &l0, &IntegrationOptions::rk4(0.5, 1e-2), &obs).unwrap();
    let csv = traj.to_csv(sd.model());
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    for col in ["reL_inv_2@0.3+0i", "imL_inv_3@-0.4+0.1i", "H"] {
        assert!(header.contains(&col), "missing {col}");
    }
    let mut last = f64::NEG_INFINITY;
    let mut rows = 0;
    for row in lines {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), header.len());
        let t: f64 = cells[0].parse().unwrap();
        assert!(t > last);
        last = t;
        // 17 significant digits round-trip exactly
        let h: f64 = cells[header.iter().position(|c| *c == "H").unwrap()].parse().unwrap();
        assert_eq!(h, traj.hamiltonian[rows]);
        rows += 1;
    }
    assert_eq!(rows, 51);
    assert!(!csv.contains('\r'));
}

#[test]
fn energy_is_conserved_on_both_doubles() {
    let mut rng = rng_from_seed(8);
    let tstar = TStarModel::new(block_xi(3)).unwrap();
    let l0 = tstar.random_point(0.5, &mut rng);
    let traj = integrate(&tstar, &l0, &IntegrationOptions::rk4(10.0, 1e-3), &Observables::none()).unwrap();
    assert!(traj.energy_drift() < 1e-8);
    assert!(traj.defect.iter().all(|d| *d < 1e-8));

    let biyb = BiYbModel::new(regular_xi(2), 0.8, 0.5).unwrap();
    let l0 = biyb.random_point(0.3, &mut rng);
    let traj = integrate(&biyb, &l0, &IntegrationOptions::rk4(10.0, 1e-3), &Observables::none()).unwrap();
    assert!(traj.energy_drift() < 1e-8);
}

#[test]
fn group_flow_projects_to_the_current_flow() {
    let mut rng = rng_from_seed(9);
    let m = BiYbModel::new(regular_xi(3), 1.2, 0.4).unwrap();
    let l0 = m.random_point(0.3, &mut rng);
    let traj = integrate(&m, &l0, &IntegrationOptions::rk4(1.0, 1e-3), &Observables::none()).unwrap();
    let js = integrate_current(&m, &current_of(&m, &l0), 1.0, 1e-3).unwrap();
    let last = traj.currents.last().unwrap();
    assert!(last.minus(js.last().unwrap()).frob_norm() < 1e-9);
}

#[test]
fn adaptive_and_fixed_step_agree() {
    let mut rng = rng_from_seed(10);
    let m = TStarModel::new(block_xi(2)).unwrap();
    let l0 = m.random_point(0.5, &mut rng);
    let fixed = integrate(&m, &l0, &IntegrationOptions::rk4(2.0, 1e-3), &Observables::none()).unwrap();
    let opts = IntegrationOptions {
        scheme: Scheme::Dopri,
        ..IntegrationOptions::rk4(2.0, 1e-2)
    };
    let adaptive = integrate(&m, &l0, &opts, &Observables::none()).unwrap();
    let a = current_of(&m, fixed.points.last().unwrap());
    let b = current_of(&m, adaptive.points.last().unwrap());
    assert!(a.minus(&b).frob_norm() < 1e-7);
}

#[test]
fn bad_options_are_rejected() {
    let m = TStarModel::new(block_xi(2)).unwrap();
    let l0 = m.identity();
    for (t, dt) in [(1.0, 0.0), (1.0, -1e-3), (0.0, 1e-3), (1.0, f64::NAN)] {
        let r = integrate(&m, &l0, &IntegrationOptions::rk4(t, dt), &Observables::none());
        assert!(matches!(r, Err(Error::InvalidParameter { .. })));
    }
}

#[test]
fn trajectories_end_at_t_end() {
    let mut rng = rng_from_seed(11);
    let m = TStarModel::new(block_xi(2)).unwrap();
    let l0 = m.random_point(0.5, &mut rng);
    for (dt, rows) in [(0.3, 5), (1e300, 2), (0.25, 5)] {
        for scheme in [Scheme::Rk4, Scheme::Dopri] {
            let opts = IntegrationOptions {
                scheme,
                ..IntegrationOptions::rk4(1.0, dt)
            };
            let traj = integrate(&m, &l0, &opts, &Observables::none()).unwrap();
            assert_eq!(traj.times.len(), rows, "dt={dt}");
            assert_eq!(*traj.times.last().unwrap(), 1.0);
        }
    }
    // a shortened last step lands on the same state as a uniform grid
    let a = integrate(&m, &l0, &IntegrationOptions::rk4(1.0, 1e-3), &Observables::none()).unwrap();
    let b = integrate(&m, &l0, &IntegrationOptions::rk4(1.0, 0.0011), &Observables::none()).unwrap();
    let (ja, jb) = (current_of(&m, a.points.last().unwrap()), current_of(&m, b.points.last().unwrap()));
    assert!(ja.minus(&jb).frob_norm() < 1e-9);
}

#[test]
fn lambda_observables_reject_poles() {
    let pcm = PcmSpectral::new(TStarModel::new(block_xi(2)).unwrap());
    for l in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)] {
        assert!(matches!(lax_observables(&pcm, &[l], &[2]), Err(Error::Pole { .. })));
    }
    // the bi-Yang-Baxter coefficients are entire in λ
    let biyb = BiYbSpectral::new(BiYbModel::new(regular_xi(2), 0.5, 0.2).unwrap());
    assert!(lax_observables(&biyb, &[C64::new(1.0, 0.0), C64::new(0.0, 3.0)], &[2]).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamiltonian_generates_the_equations_of_motion(seed in any::<u64>(), eta in 0.3..2.0f64, mu in 0.0..2.0f64) {
        // dH/dt along the flow vanishes and (j, T) evolves by the Poisson bracket with H
        let mut rng = rng_from_seed(seed);
        let m = BiYbModel::new(regular_xi(2), eta, mu).unwrap();
        let j = current_of(&m, &m.random_point(0.4, &mut rng));
        let jdot = eom_rhs(&m, &j);
        let dh = m.form(&j, &m.e(&jdot));
        prop_assert!(dh.abs() < 1e-9 * hamiltonian(&m, &j).abs().max(1.0));
        // {(j,T), H} = (j, [T, E j]) + (T, [ξ, E j]) must equal (jdot, T)
        let ej = m.e(&j);
        for t in m.basis() {
            let pb = poisson_bracket_current(&m, &t, &ej, &j);
            prop_assert!((pb - m.form(&jdot, &t)).abs() < 1e-9 * j.frob_norm().max(1.0));
        }
    }

    #[test]
    fn current_of_identity_is_zero(n in 2usize..5) {
        let m = TStarModel::new(block_xi(n)).unwrap();
        prop_assert!(current_of(&m, &m.identity()).frob_norm() < 1e-15);
    }
}
