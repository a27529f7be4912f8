use emodel_lab::algebra::{
    ad_unitary, killing_form, r_twisted, yang_baxter_r, CMat, LinearSpace, RealBasis, Stabilizer, TStarAlgebraElement,
};
use emodel_lab::doubles::{e_biyb, e_tstar, iwasawa_decompose, SLPoint};
use emodel_lab::dynamics::{e_axioms, form_signature, BiYbModel, EModel, TStarModel};
use emodel_lab::models::{block_xi, regular_xi};
use emodel_lab::random::{rng_from_seed, sl_group_element, special_unitary, su_element};
use emodel_lab::Error;
use proptest::prelude::*;

fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

#[test]
fn e_axioms_hold_on_both_doubles() {
    for n in 2..=6 {
        let ax = e_axioms(&TStarModel::new(block_xi(n)).unwrap());
        assert!(ax.involution < 1e-10 && ax.symmetry < 1e-10 && ax.min_gram_eigenvalue > 0.0);
    }
    for n in 2..=4 {
        for eta in [0.3, 1.0, 2.0] {
            for mu in [0.0, 0.3, 1.0, 2.0] {
                let ax = e_axioms(&BiYbModel::new(regular_xi(n), eta, mu).unwrap());
                assert!(ax.involution < 1e-10, "eta={eta} mu={mu}: {ax:?}");
                assert!(ax.symmetry < 1e-10);
                assert!(ax.min_gram_eigenvalue > 0.0);
            }
        }
    }
}

#[test]
fn doubles_have_split_signature() {
    for n in 2..=4 {
        let d = n * n - 1;
        assert_eq!(form_signature(&TStarModel::new(block_xi(n)).unwrap()), (d, d));
        assert_eq!(form_signature(&BiYbModel::new(regular_xi(n), 0.7, 0.4).unwrap()), (d, d));
    }
}

#[test]
fn r_satisfies_the_modified_yang_baxter_equation() {
    let mut rng = rng_from_seed(1);
    for n in 2..=4 {
        for _ in 0..20 {
            let x = su_element(n, &mut rng);
            let y = su_element(n, &mut rng);
            let (rx, ry) = (yang_baxter_r(&x), yang_baxter_r(&y));
            let lhs = commutator(&rx, &ry) - yang_baxter_r(&(commutator(&rx, &y) + commutator(&x, &ry)));
            assert!((lhs - commutator(&x, &y)).camax() < 1e-12);
            // R is skew for the trace form
            assert!((killing_form(&rx, &y).unwrap() + killing_form(&x, &ry).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn twisted_r_rejects_non_unitary_input() {
    let k = CMat::identity(2, 2) * emodel_lab::algebra::C64::new(2.0, 0.0);
    assert!(matches!(r_twisted(&k, &CMat::zeros(2, 2)), Err(Error::NotUnitary { .. })));
}

#[test]
fn stabilizer_projections_split_the_algebra() {
    let mut rng = rng_from_seed(2);
    for (xi, rank) in [(block_xi(3), 4), (regular_xi(3), 6), (block_xi(4), 6)] {
        let st = Stabilizer::new(&xi).unwrap();
        assert_eq!(st.perp_rank(), rank);
        let x = su_element(3.max(xi.nrows()), &mut rng);
        let (p, q) = (st.project(&x), st.project_perp(&x));
        assert!((&p + &q - &x).camax() < 1e-12);
        assert!(commutator(&p, &xi).camax() < 1e-12);
        assert!(killing_form(&p, &q).unwrap().abs() < 1e-12);
        assert!((st.project(&p) - &p).camax() < 1e-12);
    }
}

#[test]
fn basis_coordinates_round_trip() {
    let mut rng = rng_from_seed(3);
    for b in [RealBasis::su(3), RealBasis::sl(3), RealBasis::su3_x()] {
        let x = su_element(3, &mut rng);
        assert!((b.element(&b.coordinates(&x)) - &x).camax() < 1e-12);
    }
}

#[test]
fn singular_matrices_are_not_points_of_sl() {
    assert!(SLPoint::new(CMat::zeros(2, 2)).is_err());
    let mut anti = CMat::zeros(2, 2);
    anti[(0, 1)] = emodel_lab::algebra::C64::new(1.0, 0.0);
    anti[(1, 0)] = emodel_lab::algebra::C64::new(-1.0, 0.0);
    // det = 1 with a zero diagonal still has a regular Iwasawa factorisation
    assert!(iwasawa_decompose(&SLPoint::new(anti).unwrap()).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iwasawa_factors_have_the_right_shape(seed in any::<u64>(), n in 2usize..5, scale in 0.1..1.5f64) {
        let mut rng = rng_from_seed(seed);
        let l = SLPoint::new(sl_group_element(n, scale, &mut rng)).unwrap();
        let f = iwasawa_decompose(&l).unwrap();
        prop_assert!((f.compose() - &l.l).camax() < 1e-10 * l.l.camax().max(1.0));
        prop_assert!((f.g.adjoint() * &f.g - CMat::identity(n, n)).camax() < 1e-12);
        for i in 0..n {
            prop_assert!(f.a[(i, i)].re > 0.0 && f.a[(i, i)].im == 0.0);
            prop_assert!((f.n[(i, i)].re - 1.0).abs() < 1e-15);
            for j in 0..i {
                prop_assert!(f.n[(i, j)].norm() == 0.0);
            }
        }
    }

    #[test]
    fn tstar_bracket_and_form(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let m = TStarModel::new(block_xi(n)).unwrap();
        let (x, y, z) = (m.random_elem(&mut rng), m.random_elem(&mut rng), m.random_elem(&mut rng));
        // invariance ([x,y], z) = (x, [y,z]) and antisymmetry
        let lhs = m.form(&m.bracket(&x, &y), &z);
        let rhs = m.form(&x, &m.bracket(&y, &z));
        prop_assert!((lhs - rhs).abs() < 1e-10);
        let anti = m.bracket(&x, &y).plus(&m.bracket(&y, &x));
        prop_assert!(anti.frob_norm() < 1e-12);
        // Jacobi
        let jac = m.bracket(&x, &m.bracket(&y, &z))
            .plus(&m.bracket(&y, &m.bracket(&z, &x)))
            .plus(&m.bracket(&z, &m.bracket(&x, &y)));
        prop_assert!(jac.frob_norm() < 1e-10);
        // E swaps the two halves with a sign
        let ex: TStarAlgebraElement = e_tstar(&x);
        prop_assert!((&ex.first + &x.second).camax() < 1e-15 && (&ex.second + &x.first).camax() < 1e-15);
    }

    #[test]
    fn adjoint_action_preserves_the_form(seed in any::<u64>(), n in 2usize..5, eta in 0.2..2.0f64, mu in 0.0..2.0f64) {
        let mut rng = rng_from_seed(seed);
        let m = BiYbModel::new(regular_xi(n), eta, mu).unwrap();
        let l = m.random_point(0.5, &mut rng);
        let (x, y) = (m.random_elem(&mut rng), m.random_elem(&mut rng));
        let before = m.form(&x, &y);
        let after = m.form(&m.adjoint(&l, &x), &m.adjoint(&l, &y));
        prop_assert!((before - after).abs() < 1e-9 * before.abs().max(1.0));
        let ex = e_biyb(&x, eta, mu).unwrap();
        prop_assert!((e_biyb(&ex, eta, mu).unwrap() - &x).camax() < 1e-10);
    }

    #[test]
    fn unitary_adjoint_preserves_killing(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let k = special_unitary(n, &mut rng);
        let (x, y) = (su_element(n, &mut rng), su_element(n, &mut rng));
        let a = killing_form(&ad_unitary(&k, &x), &ad_unitary(&k, &y)).unwrap();
        prop_assert!((a - killing_form(&x, &y).unwrap()).abs() < 1e-11);
    }
}
