use super::*;
use crate::coupling::{Coupling, CouplingSpec};
use crate::sun_algebra::build_su_basis;
use proptest::prelude::*;

fn pair() -> (WedgeTestFunction, WedgeTestFunction) {
    (WedgeTestFunction::new([0.0, 1.2], 1.0, Side::Right).unwrap(), WedgeTestFunction::new([0.0, -1.2], 1.0, Side::Left).unwrap())
}

fn su2(y: [f64; 3]) -> Coupling {
    Coupling::new(&CouplingSpec::vector(y.to_vec()), &build_su_basis(2).unwrap()).unwrap()
}

fn positive_family() -> Coupling {
    Coupling::new(&CouplingSpec::diagonal_family(0.2, 0.1, 1.0, -0.5), &build_su_basis(2).unwrap()).unwrap()
}

/// Plain 2D tensor Gauss–Legendre over the bounding box of the support.
fn brute_transform(f: &WedgeTestFunction, k: [f64; 2], sign: f64) -> C64 {
    let r = crate::quadrature::composite_legendre(-1.0, 1.0, 60, 10);
    let s = f.scale;
    let mut acc = c(0.0, 0.0);
    for (&y0, &w0) in r.nodes.iter().zip(&r.weights) {
        for (&y1, &w1) in r.nodes.iter().zip(&r.weights) {
            let x = [f.center[0] + s * y0, f.center[1] + s * y1];
            let kx = k[0] * x[0] - k[1] * x[1];
            acc += Complex64::from_polar(f.eval(x), sign * kx) * (w0 * w1 * s * s);
        }
    }
    acc
}

#[test]
fn admissible_forms() {
    let t = AdmissibleTheta::new(2, 0.3, 0.0).unwrap();
    assert!(is_admissible(&t.displayed()));
    assert_eq!(t.displayed(), DMatrix::from_row_slice(2, 2, &[0.0, 0.3, 0.3, 0.0]));
    assert!(!is_admissible(&DMatrix::from_row_slice(2, 2, &[0.0, -0.3, -0.3, 0.0])));
    assert!(AdmissibleTheta::new(2, -0.1, 0.0).is_err());
    let t4 = AdmissibleTheta::new(4, 0.5, -1.5).unwrap();
    assert!(is_admissible(&t4.displayed()));
    let mut bad = t4.displayed();
    bad[(0, 2)] = 0.2;
    bad[(2, 0)] = -0.2;
    assert!(!is_admissible(&bad));
    let c = t4.contravariant();
    assert_eq!(c.clone() + c.transpose(), DMatrix::zeros(4, 4));
}

#[test]
fn gamma_map_examples() {
    let th = AdmissibleTheta::new(2, 0.4, 0.0).unwrap().contravariant();
    assert_eq!(gamma_map(&DMatrix::identity(2, 2), &th).unwrap(), th);
    assert!((gamma_map(&boost(0.7), &th).unwrap() - &th).abs().max() < 1e-14);
    assert!((gamma_map(&reflection(2), &th).unwrap() + &th).abs().max() < 1e-15);
    // the displayed array itself is not boost invariant under plain conjugation
    let d = AdmissibleTheta::new(2, 0.4, 0.0).unwrap().displayed();
    assert!((boost(0.7) * &d * boost(0.7).transpose() - &d).abs().max() > 0.1);
    let not_lorentz = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
    assert!(matches!(gamma_map(&not_lorentz, &th), Err(NawcError::NotLorentz(_))));
    let t4 = AdmissibleTheta::new(4, 0.4, 0.9).unwrap().contravariant();
    let mut b4 = DMatrix::identity(4, 4);
    b4.view_mut((0, 0), (2, 2)).copy_from(&boost(-0.3));
    assert!((gamma_map(&b4, &t4).unwrap() - &t4).abs().max() < 1e-14);
}

#[test]
fn support_validation() {
    assert!(WedgeTestFunction::new([0.0, 1.0], 1.0, Side::Right).is_err());
    assert!(WedgeTestFunction::new([0.5, 1.2], 1.0, Side::Right).is_err());
    assert!(WedgeTestFunction::new([0.0, 1.2], 1.0, Side::Left).is_err());
    let (f, _) = pair();
    assert!(f.transformed(&boost(2.0)).is_ok());
    assert_eq!(f.transformed(&reflection(2)).unwrap().side, Side::Left);
    assert!(f.eval([0.0, 0.1]) == 0.0 && f.eval([0.0, 1.2]) > 0.0);
}

#[test]
fn bump_transform_matches_brute_force() {
    let (f, _) = pair();
    let g = WedgeTestFunction::new([0.3, 2.0], 0.8, Side::Right).unwrap();
    for h in [&f, &g] {
        for t in [-1.3, 0.0, 0.4, 2.0] {
            let p = on_shell(1.0, c(t, 0.0));
            let k = [p[0].re, p[1].re];
            for sign in [1.0, -1.0] {
                let fast = h.transform_at(p, sign, false);
                assert!((fast - brute_transform(h, k, sign)).norm() < 1e-10, "t={t}");
            }
        }
    }
}

#[test]
fn transform_properties() {
    let (f, _) = pair();
    let grid = RapidityGrid::new(6.0, 101).unwrap();
    let tr = mass_shell_transform(&f, 1.3, &grid, false);
    for (p, m) in tr.plus.iter().zip(&tr.minus) {
        assert!((p.conj() - m).norm() < 1e-15);
    }
    assert!(transform_self_convergence(&f, 1.3, &grid) < 1e-9);
    let a = [0.2, 0.5];
    let fa = f.translated(a).unwrap();
    for &t in &[0.0, 0.7, -2.0] {
        let p = on_shell(1.3, c(t, 0.0));
        let pa = p[0] * a[0] - p[1] * a[1];
        for sign in [1.0, -1.0] {
            let want = f.transform_at(p, sign, false) * (Complex64::i() * sign * pa).exp();
            assert!((fa.transform_at(p, sign, false) - want).norm() < 1e-14);
        }
    }
    for m in [1.0, 2.0] {
        assert!(continuation_residual(&f, m, &[0.5, -1.0, 3.0]) < 1e-9);
    }
}

#[test]
fn kernel_vanishes_for_identical_arrays_at_origin() {
    let (f, _) = pair();
    let grid = RapidityGrid::default();
    let tr = mass_shell_transform(&f, 1.0, &grid, false);
    let th = AdmissibleTheta::new(2, 0.4, 0.0).unwrap().contravariant();
    let inp = KernelInput { f: &tr, g: &tr, grid: &grid, mass: 1.0, theta_contra: &th };
    assert!(kernel_value(&inp, -0.5, [0.0, 0.0]).0.norm() < 1e-15);
}

fn scan(coupling: &Coupling, lambda: f64) -> KernelScan {
    let (f, g) = pair();
    let grid = RapidityGrid::default();
    let (ft, gt) = (mass_shell_transform(&f, 1.0, &grid, false), mass_shell_transform(&g, 1.0, &grid, false));
    let th = AdmissibleTheta::new(2, lambda, 0.0).unwrap().contravariant();
    let inp = KernelInput { f: &ft, g: &gt, grid: &grid, mass: 1.0, theta_contra: &th };
    commutator_kernel(&inp, &coupling.eigen, &default_z_samples())
}

#[test]
fn verdicts_follow_eigenvalue_sign() {
    let pos = positive_family();
    let s = scan(&pos, 0.4);
    assert!(s.max_abs() < 1e-6 && s.diagnostics.is_empty());
    let v = wedge_locality_verdict(&s, pos.class(), 0.4);
    assert_eq!((v.verdict, v.agrees), (Verdict::Local, Some(true)));

    let mixed = su2([0.6, 0.0, 0.8]);
    let s = scan(&mixed, 0.4);
    assert!(s.max_abs() > 1e-2);
    let v = wedge_locality_verdict(&s, mixed.class(), 0.4);
    assert_eq!((v.verdict, v.agrees), (Verdict::NotLocal, Some(true)));

    let s = scan(&mixed, 0.0);
    assert!(s.max_abs() < 1e-15);
    assert_eq!(wedge_locality_verdict(&s, mixed.class(), 0.0).verdict, Verdict::Local);

    let neg = Coupling::new(&CouplingSpec::diagonal_family(0.2, 0.1, -1.0, 0.5), &build_su_basis(2).unwrap()).unwrap();
    let v = wedge_locality_verdict(&scan(&neg, 0.4), neg.class(), 0.4);
    assert_eq!(v.prediction, Prediction::None);
    assert_eq!(v.agrees, None);
}

#[test]
fn uniform_coupling_reduces_to_abelian_kernel() {
    let cp = Coupling::from_matrix(crate::linalg::eye(2) * c(0.7, 0.0)).unwrap();
    let (f, g) = pair();
    let grid = RapidityGrid::new(8.0, 800).unwrap();
    let (ft, gt) = (mass_shell_transform(&f, 1.0, &grid, false), mass_shell_transform(&g, 1.0, &grid, false));
    let th = AdmissibleTheta::new(2, 0.4, 0.0).unwrap().contravariant();
    let scaled = &th * 0.7;
    let inp = KernelInput { f: &ft, g: &gt, grid: &grid, mass: 1.0, theta_contra: &th };
    let inp_ab = KernelInput { theta_contra: &scaled, ..inp };
    let zs = default_z_samples();
    let s = commutator_kernel(&KernelInput { f: &ft, g: &gt, grid: &grid, mass: 1.0, theta_contra: &th }, &cp.eigen, &zs);
    for p in &s.points {
        assert!((p.values[0] - abelian_kernel(&inp_ab, p.z)).norm() < 1e-15);
    }
}

#[test]
fn boost_covariance() {
    let (f, g) = pair();
    let grid = RapidityGrid::new(8.0, 400).unwrap();
    let th = AdmissibleTheta::new(2, 0.4, 0.0).unwrap();
    let zs = default_z_samples();
    let r0 = covariance_kernel_check(&f, &g, 0.0, 1.0, &th, -0.5, &grid, &zs).unwrap();
    assert_eq!(r0.phase, 0.0);
    assert!(r0.integrand < 1e-14);
    let r = covariance_kernel_check(&f, &g, 0.3, 1.0, &th, -0.5, &grid, &zs).unwrap();
    assert!(r.integrand < 1e-8 && r.phase < 1e-10, "{r:?}");
}

#[test]
fn reflection_flips_phase_sign() {
    let th = AdmissibleTheta::new(2, 0.4, 0.0).unwrap().contravariant();
    let j = reflection(2);
    let thj = gamma_map(&j, &th).unwrap();
    let p = [1.3, 0.4];
    let z = [1.0, 0.2];
    let jz = [-z[0], -z[1]];
    let jp = [-p[0], -p[1]];
    assert!((theta_form(&thj, p, jz) + theta_form(&th, jp, z)).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn boosts_fix_admissible_theta(beta in -3.0f64..3.0, lambda in 0.0f64..2.0) {
        let th = AdmissibleTheta::new(2, lambda, 0.0).unwrap().contravariant();
        let l = boost(beta);
        prop_assert!(lorentz_residual(&l) < 1e-10 * beta.cosh().powi(2));
        prop_assert!((gamma_map(&l, &th).unwrap() - &th).abs().max() < 1e-12 * beta.cosh().powi(2));
    }

    #[test]
    fn kernel_is_linear(a in -2.0f64..2.0, z0 in 0.0f64..3.0) {
        let (f, g) = pair();
        let grid = RapidityGrid::new(8.0, 300).unwrap();
        let (ft, gt) = (mass_shell_transform(&f, 1.0, &grid, false), mass_shell_transform(&g, 1.0, &grid, false));
        let scaled = Transforms { plus: ft.plus.iter().map(|v| v * a).collect(), minus: ft.minus.iter().map(|v| v * a).collect() };
        let th = AdmissibleTheta::new(2, 0.4, 0.0).unwrap().contravariant();
        let base = kernel_value(&KernelInput { f: &ft, g: &gt, grid: &grid, mass: 1.0, theta_contra: &th }, -0.5, [z0, 0.0]).0;
        let sc = kernel_value(&KernelInput { f: &scaled, g: &gt, grid: &grid, mass: 1.0, theta_contra: &th }, -0.5, [z0, 0.0]).0;
        prop_assert!((sc - base * a).norm() < 1e-15);
    }
}
