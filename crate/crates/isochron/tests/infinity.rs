use isochron::hamiltonian::atypical_values;
use isochron::infinity::*;
use isochron::poly::{discriminant_in_y_float, BivarPolyH, GaussianRational, Ring};
use isochron::HomogeneousHamiltonianSystem;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sys(n: usize, a: &[f64]) -> HomogeneousHamiltonianSystem {
    HomogeneousHamiltonianSystem::real(n, a).unwrap()
}

fn px(s: &HomogeneousHamiltonianSystem) -> InfinitePoint {
    points_at_infinity(s).unwrap().into_iter().find(|p| p.is_px).unwrap()
}

fn all_residues(s: &HomogeneousHamiltonianSystem, h: Complex64) -> Vec<(InfinitePoint, PuiseuxBranch, Complex64)> {
    let k = default_truncation(s);
    let mut out = Vec::new();
    for p in points_at_infinity(s).unwrap() {
        for (b, r) in residue_at_infinity(s, h, &p, k).unwrap() {
            out.push((p.clone(), b, r));
        }
    }
    out
}

#[test]
fn condition_one_branch_has_residue_minus_one() {
    // H = xy + x y^2 + y^3
    let s = sys(2, &[0.0, 0.0, 1.0, 1.0]);
    let h = c(0.01, 0.02);
    let res = residue_at_infinity(&s, h, &px(&s), default_truncation(&s)).unwrap();
    let (b, r) = res.iter().find(|(b, _)| b.x_exponent == 1 && b.y_valuation == 2).unwrap();
    assert!((b.y_leading - h).norm() < 1e-14);
    assert!((r + 1.0).norm() < 1e-12, "{r}");
}

#[test]
fn mixed_residues_vanish() {
    let s = sys(2, &[1.0, 0.0, 0.0, 1.0]);
    for h in [c(0.2, 0.1), c(-0.5, 0.3), c(0.0, -1.0)] {
        for (_, _, r) in all_residues(&s, h) {
            assert!(r.norm() < 1e-9, "{r}");
        }
    }
}

#[test]
fn atypical_values_include_every_critical_value() {
    // x^3 + y^3: three Morse points on 1 + 27 x^3 = 0, all with value 1/27
    let mut v = atypical_values(&sys(2, &[1.0, 0.0, 0.0, 1.0])).unwrap();
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert_eq!(v.len(), 2);
    assert!(v[0].norm() < 1e-12);
    assert!((v[1] - c(1.0 / 27.0, 0.0)).norm() < 1e-12);

    // x y^2 + y^3: the finite critical point (3, -1) has value -1
    let mut v = atypical_values(&sys(2, &[0.0, 0.0, 1.0, 1.0])).unwrap();
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert_eq!(v.len(), 2);
    assert!((v[0] + 1.0).norm() < 1e-12);
    assert!(v[1].norm() < 1e-12);
}

#[test]
fn lambda_of_quintic_example() {
    // y^2 (x^3 + y^3)
    let z = GaussianRational::from_i64(0);
    let one = GaussianRational::from_i64(1);
    let a = vec![z.clone(), z.clone(), one.clone(), z.clone(), z.clone(), one.clone()];
    let s = HomogeneousHamiltonianSystem::from_exact(4, a).unwrap();
    assert_eq!(lambda_index(&s, &z).unwrap(), 1);
    assert_eq!(lambda_indices(&s, &[one, GaussianRational::from_ints(2, -3)]).unwrap(), vec![0, 0]);
    let by_point = lambda_indices_by_point(&s, c(0.0, 0.0)).unwrap();
    for (p, k) in &by_point {
        assert_eq!(*k, usize::from(p.is_px));
    }
    assert_eq!(lambda_index_c(&s, c(0.0, 0.0)).unwrap(), 1);
}

#[test]
fn polygon_with_bend_at_p_x() {
    let mut a = vec![0.0; 6];
    a[3] = 1.0;
    a[5] = 1.0;
    let s = sys(4, &a);
    let poly = newton_polygon(&chart_polynomial(&s, c(0.3, 0.2), &px(&s))).unwrap();
    assert_eq!(poly.vertices(), vec![(0, 3), (3, 1), (5, 0)]);
    assert_eq!(poly.segments[0].slope, (-2, 3));
    assert_eq!(poly.segments[1].slope, (-1, 2));
}

#[test]
fn polygon_single_segment_when_mixed() {
    let mut a = vec![0.0; 6];
    a[2] = 1.0;
    a[5] = 1.0;
    let s = sys(4, &a);
    let poly = newton_polygon(&chart_polynomial(&s, c(0.3, 0.2), &px(&s))).unwrap();
    assert_eq!(poly.vertices(), vec![(0, 2), (5, 0)]);
}

#[test]
fn infinite_points_of_fermat_cubic() {
    let pts = points_at_infinity(&sys(2, &[1.0, 0.0, 0.0, 1.0])).unwrap();
    assert_eq!(pts.len(), 3);
    for p in &pts {
        assert_eq!(p.multiplicity, 1);
        assert!(!p.is_px && !p.is_py);
        // x^3 + y^3 = 0 on the direction
        assert!((p.beta.powu(3) + p.alpha.powu(3)).norm() < 1e-12);
    }
}

fn small_rational() -> impl Strategy<Value = GaussianRational> {
    (-9i64..=9, -9i64..=9).prop_map(|(re, im)| GaussianRational::from_ints(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residues_sum_to_zero(re in proptest::collection::vec(-1.0f64..1.0, 5), im in proptest::collection::vec(-1.0f64..1.0, 5), hr in 0.05f64..1.0, ht in 0.0f64..std::f64::consts::TAU) {
        let a: Vec<Complex64> = re.iter().zip(&im).map(|(&r, &i)| c(r, i)).collect();
        let s = HomogeneousHamiltonianSystem::new(3, a).unwrap();
        let atyp = atypical_values(&s).unwrap();
        let h = Complex64::from_polar(hr, ht);
        prop_assume!(atyp.iter().all(|v| (v - h).norm() > 1e-2));
        let total: Complex64 = all_residues(&s, h).iter().map(|(_, _, r)| r).sum();
        prop_assert!(total.norm() < 1e-8, "{}", total);
    }

    #[test]
    fn exact_and_float_discriminants_agree(a in proptest::collection::vec(small_rational(), 4), h in small_rational(), x in small_rational()) {
        let s = HomogeneousHamiltonianSystem::from_exact(2, a).unwrap();
        prop_assume!(!s.is_linear());
        let exact = exact_discriminant(&s).unwrap().unwrap();
        let float = discriminant_in_y_float(&BivarPolyH::minus_h(&s.build_h())).unwrap();
        let e = exact.eval(&h, &x).to_complex();
        let f = float.eval_c(h.to_complex(), x.to_complex());
        prop_assert!((e - f).norm() <= 1e-9 * e.norm().max(1.0));
    }
}
