mod common;

use common::*;
use emodel_lab::algebra::{LinearSpace, RealBasis};
use emodel_lab::dynamics::{current_of, EModel};
use emodel_lab::integrability::*;
use emodel_lab::random::{rng_from_seed, su_element};

#[test]
fn pcm_conditions_hold() {
    for n in [2, 3] {
        for r in verify_conditions(&pcm(n), 200, 11, 1e-10).unwrap() {
            println!("pcm N={n} {:?} {:e}", r.condition, r.max_residual);
            assert!(r.pass, "{r:?}");
        }
    }
}

#[test]
fn biyb_conditions_hold() {
    for (xi, eta, mu) in [(block_xi(2), 0.7, 0.3), (regular_xi(3), 1.3, 0.8), (block_xi(3), 0.5, 0.0)] {
        for r in verify_conditions(&biyb(xi.clone(), eta, mu), 200, 12, 1e-10).unwrap() {
            println!("biyb N={} {:?} {:e}", xi.nrows(), r.condition, r.max_residual);
            assert!(r.pass, "{r:?}");
        }
    }
}

#[test]
fn transposed_r_breaks_the_jacobi_type_condition() {
    let sd = BiYbSpectral::negative_control(emodel_lab::dynamics::BiYbModel::new(regular_xi(3), 0.7, 0.3).unwrap());
    let reports = verify_conditions(&sd, 50, 3, 1e-10).unwrap();
    let one = reports.iter().find(|r| r.condition == Condition::DualBracket).unwrap();
    assert!(one.max_residual > 1e-3, "{one:?}");
}

#[test]
fn rmatrix_relation() {
    let mut rng = rng_from_seed(5);
    let sd = pcm(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let j = sd.model().random_elem(&mut rng);
        let (x, y) = (su_element(3, &mut rng), su_element(3, &mut rng));
        let (lhs, rhs) = rmatrix_identity(&sd, &j, &x, &y, c(0.3, 0.2), c(-0.4, 0.1)).unwrap();
        worst = worst.max((lhs - rhs).norm());
    }
    let sd = biyb(regular_xi(3), 0.7, 0.3);
    for _ in 0..50 {
        let l = sd.model().random_point(0.5, &mut rng);
        let j = current_of(sd.model(), &l);
        let (x, y) = (su_element(3, &mut rng), su_element(3, &mut rng));
        let (lhs, rhs) = rmatrix_identity(&sd, &j, &x, &y, c(0.3, 0.2), c(-0.4, 0.1)).unwrap();
        worst = worst.max((lhs - rhs).norm());
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn rmatrix_tensor_is_basis_independent() {
    let sd = biyb(regular_xi(3), 0.7, 0.3);
    let (l, r) = (c(0.3, 0.2), c(-0.4, 0.1));
    let a = rmatrix_tensor(&sd, l, r, &RealBasis::su_roots(3)).unwrap();
    let b = rmatrix_tensor(&sd, l, r, &RealBasis::su3_x()).unwrap();
    assert!((a.to_kronecker() - b.to_kronecker()).norm() < 1e-10);
    let mut rng = rng_from_seed(9);
    let (x, y) = (su_element(3, &mut rng), su_element(3, &mut rng));
    let direct = emodel_lab::algebra::trace_product(&x, &sd.rhat(l, r, &y).unwrap());
    assert!((a.contract(&x, &y) - direct).norm() < 1e-10);
}

#[test]
fn lax_defect_vanishes_on_the_equations_of_motion() {
    let mut rng = rng_from_seed(2);
    let sd = pcm(3);
    let j = current_of(sd.model(), &sd.model().random_point(0.7, &mut rng));
    assert!(lax_defect(&sd, &j, c(0.3, 0.4)).unwrap() < 1e-12);
    let sd = biyb(block_xi(3), 0.7, 0.3);
    let j = current_of(sd.model(), &sd.model().random_point(0.5, &mut rng));
    assert!(lax_defect(&sd, &j, c(0.3, 0.4)).unwrap() < 1e-11);
    let _ = j.frob_norm();
}
