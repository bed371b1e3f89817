use super::*;
use crate::coupling::{Coupling, CouplingSpec};
use crate::linalg::{hermiticity_residual, max_abs};
use crate::sun_algebra::build_su_basis;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn modes() -> ModeSet {
    ModeSet::new(1.0, vec![-1.0, -0.3, 0.4, 1.2]).unwrap()
}

fn su2(y: [f64; 3]) -> CouplingEigen {
    Coupling::new(&CouplingSpec::vector(y.to_vec()), &build_su_basis(2).unwrap()).unwrap().eigen
}

fn theta(l: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, l, l, 0.0])
}

fn deformed(l: f64) -> DeformedFock {
    DeformedFock::new(FockBasis::new(modes(), 3), theta(l), su2([0.3, -0.5, 0.8]), 1.0).unwrap()
}

fn random_smearing(rng: &mut ChaCha8Rng, k: usize) -> SmearingFunction {
    let mut z = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let plus = (0..k).map(|_| z()).collect();
    let minus = (0..k).map(|_| z()).collect();
    SmearingFunction { plus, minus }
}

#[test]
fn basis_dimension_and_ladders() {
    let b = FockBasis::new(modes(), 3);
    assert_eq!(b.dim(), 35);
    assert_eq!(b.vacuum(), 0);
    let a = b.annihilator(2);
    assert!(a.column(b.vacuum()).iter().all(|z| z.norm() == 0.0));
    let one = b.index_of(&[0, 0, 1, 0]).unwrap();
    assert_eq!(b.creator(2)[(one, b.vacuum())], c(1.0, 0.0));
    let two = b.index_of(&[0, 0, 2, 0]).unwrap();
    assert!((b.creator(2)[(two, one)].re - 2f64.sqrt()).abs() < 1e-15);
    assert!(b.ccr_residual() < 1e-14);
}

#[test]
fn rejects_bad_modes() {
    assert!(ModeSet::new(0.0, vec![1.0]).is_err());
    assert!(ModeSet::new(1.0, vec![1.0, 1.0]).is_err());
    assert!(DeformedFock::new(FockBasis::new(modes(), 2), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]), su2([0.0, 0.0, 1.0]), 1.0).is_err());
}

#[test]
fn deformed_ladders() {
    for l in [0.0, 0.4, 1.3] {
        let r = ladder_check(&deformed(l));
        assert!(r.creator_adjoint_vs_closed < 1e-14, "{r:?}");
        assert!(r.vacuum_annihilated == 0.0, "{r:?}");
        assert!(r.norm_preservation < 1e-14, "{r:?}");
    }
    let df = deformed(0.0);
    assert!(max_abs(&(df.annihilator(1) - df.undeformed_annihilator(1))) < 1e-15);
}

#[test]
fn field_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let df = deformed(0.7);
    let f = random_smearing(&mut rng, 4);
    let g = random_smearing(&mut rng, 4);
    let r = field_check(&df, &f, &g, c(0.3, -1.1));
    assert!(r.hermiticity < 1e-11, "{r:?}");
    assert!(r.vacuum_action < 1e-14, "{r:?}");
    assert!(r.bound_slack >= 0.0 && r.power_slack >= 0.0, "{r:?}");
    assert!(r.linearity < 1e-13, "{r:?}");
    let real = SmearingFunction::real(f.plus.clone());
    assert!(hermiticity_residual(&df.field(&real)) < 1e-14);
    let imag = real.scale(c(0.0, 1.0));
    assert!(max_abs(&(df.field(&imag).adjoint() + df.field(&imag.conj().scale(c(-1.0, 0.0))))) < 1e-14);
    let zero = SmearingFunction { plus: vec![c(0.0, 0.0); 4], minus: vec![c(0.0, 0.0); 4] };
    assert_eq!(max_abs(&df.field(&zero)), 0.0);
    assert!(max_abs(&(deformed(0.0).field(&f) - deformed(0.0).free_field(&f))) < 1e-15);
}

#[test]
fn vacuum_is_translation_invariant() {
    let df = deformed(0.9);
    let om = df.vacuum_vector(&[c(0.6, 0.0), c(0.0, 0.8)]);
    let u = df.translation([0.7, -1.4]);
    assert!((&u * &om - &om).norm() < 1e-15);
    assert!(hermiticity_residual(&(&u * u.adjoint())) < 1e-14);
}

#[test]
fn twist_matrix_examples() {
    let df = DeformedFock::new(FockBasis::new(modes(), 3), theta(0.5), su2([0.0, 0.0, 1.0]), 1.0).unwrap();
    let p1 = df.basis.modes.four_momentum(0);
    let p2 = df.basis.modes.four_momentum(3);
    assert!(max_abs(&(df.twist_matrix(&[p1], 1.0) - CMat::identity(2, 2))) < 1e-15);
    // p1·Θp2 with Θ = [[0,l],[l,0]], Minkowski pairing: l(p1⁰p2¹ − p1¹p2⁰)
    let w = 0.5 * (p1[0] * p2[1] - p1[1] * p2[0]);
    let s = df.twist_matrix(&[p1, p2], 1.0);
    assert!((s[(0, 0)] - cis(w / 2.0)).norm() < 1e-15);
    assert!((s[(1, 1)] - cis(-w / 2.0)).norm() < 1e-15);
    assert!(s[(0, 1)].norm() < 1e-15);
    let flat = DeformedFock::new(FockBasis::new(modes(), 3), theta(0.0), su2([0.0, 0.0, 1.0]), 1.0).unwrap();
    assert!(max_abs(&(flat.twist_matrix(&[p1, p2, p1], 1.0) - CMat::identity(2, 2))) < 1e-15);
}

#[test]
fn twisted_symmetrization() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for sigma in [1.0, -1.0] {
        let df = DeformedFock::new(FockBasis::new(modes(), 3), theta(0.8), su2([0.3, -0.5, 0.8]), sigma).unwrap();
        let e = [c(0.6, 0.2), c(-0.1, 0.7)];
        for k in 1..=3 {
            let fs: Vec<Vec<C64>> = (0..k).map(|_| (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
            let lhs = twisted_product_vector(&df, &fs, &e);
            let rhs = symmetrized_twisted_vector(&df, &fs, &e, -sigma).unwrap();
            assert!((&lhs - &rhs).norm() < 1e-10, "k={k} sigma={sigma}");
            if k >= 2 {
                let wrong = symmetrized_twisted_vector(&df, &fs, &e, sigma).unwrap();
                assert!((&lhs - &wrong).norm() > 1e-3);
                let mut swapped = fs.clone();
                swapped.swap(0, 1);
                let lhs2 = twisted_product_vector(&df, &swapped, &e);
                assert!((&lhs2 - symmetrized_twisted_vector(&df, &swapped, &e, -sigma).unwrap()).norm() < 1e-10);
                assert!((&lhs2 - &lhs).norm() > 1e-3);
            }
        }
    }
}

#[test]
fn untwisted_pair_is_symmetric() {
    let df = deformed(0.0);
    let f1 = vec![c(1.0, 0.0), c(0.0, 0.5), c(0.2, 0.0), c(0.0, 0.0)];
    let f2 = vec![c(0.0, 0.0), c(0.3, 0.0), c(0.0, -1.0), c(0.7, 0.0)];
    let e = [c(1.0, 0.0), c(0.0, 0.0)];
    let a = twisted_product_vector(&df, &[f1.clone(), f2.clone()], &e);
    let b = twisted_product_vector(&df, &[f2, f1], &e);
    assert!((&a - &b).norm() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn field_hermiticity_random(seed in 0u64..1000, l in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let df = deformed(l);
        let f = random_smearing(&mut rng, 4);
        let phi = df.field(&f);
        prop_assert!(max_abs(&(phi.adjoint() - df.field(&f.conj()))) < 1e-11);
    }
}
