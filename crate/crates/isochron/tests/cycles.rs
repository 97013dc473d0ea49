use std::f64::consts::PI;

use isochron::cycles::*;
use isochron::hamiltonian::l0_extra_critical_points;
use isochron::HomogeneousHamiltonianSystem;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sys(n: usize, a: &[f64]) -> HomogeneousHamiltonianSystem {
    HomogeneousHamiltonianSystem::real(n, a).unwrap()
}

fn two_pi_i() -> Complex64 {
    c(0.0, 2.0 * PI)
}

#[test]
fn quadratic_hamiltonian_has_constant_period() {
    let s = sys(2, &[0.0; 4]);
    for h in [c(1e-3, 0.0), c(0.0, 0.05), c(-0.3, 0.2)] {
        let lp = lift_origin_loop(&s, h, DEFAULT_SAMPLES).unwrap();
        let t = period(&s, &lp).unwrap();
        assert!((t.t - two_pi_i()).norm() < 1e-12, "{}", t.t);
        assert!(lp.residual(&s) < 1e-12);
    }
}

#[test]
fn isochronous_scan_stays_on_two_pi_i() {
    // condition II: x^4 + x^3 y
    let s = sys(3, &[1.0, 0.5, 0.0, 0.0, 0.0]);
    let grid: Vec<Complex64> = [1e-3, 1e-2, 1e-1].iter().map(|&r| Complex64::from_polar(r, 1.1)).collect();
    let scan = period_scan(&s, &grid, DEFAULT_SAMPLES).unwrap();
    assert!(scan.errors.is_empty());
    assert_eq!(scan.samples.len(), 3);
    assert!(scan.statistic < 1e-8, "{}", scan.statistic);
}

#[test]
fn mixed_scan_moves_off_two_pi_i() {
    let s = sys(2, &[1.0, 0.0, 0.0, 1.0]);
    let grid = [c(0.01, 0.01), c(0.0, 0.1)];
    let scan = period_scan(&s, &grid, DEFAULT_SAMPLES).unwrap();
    assert!(scan.errors.is_empty());
    assert!(scan.statistic > 1e-4, "{}", scan.statistic);
}

#[test]
fn scan_is_deterministic() {
    let s = sys(3, &[0.4, -0.2, 0.7, 0.1, 0.3]);
    let grid = [c(0.02, 0.01), c(-0.05, 0.03), c(0.0, -0.08)];
    let a = period_scan(&s, &grid, DEFAULT_SAMPLES).unwrap();
    let b = period_scan(&s, &grid, DEFAULT_SAMPLES).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scan_rejects_atypical_points() {
    let s = sys(2, &[1.0, 0.0, 0.0, 1.0]);
    let scan = period_scan(&s, &[c(1.0 / 27.0, 0.0), c(0.01, 0.0)], DEFAULT_SAMPLES).unwrap();
    assert_eq!(scan.errors.len(), 1);
    assert_eq!(scan.samples.len(), 1);
}

#[test]
fn contractible_circle_preserves_the_period() {
    // atypical values 0 and 1/27; the circle about 0.02 of radius 0.005 encloses neither
    let s = sys(2, &[1.0, 0.0, 0.0, 1.0]);
    let h0 = c(0.025, 0.0);
    let small = lift_origin_loop(&s, c(5e-5, 0.0), DEFAULT_SAMPLES).unwrap();
    let lp = continue_loop(&s, &small, &HPath::line(c(5e-5, 0.0), h0)).unwrap();
    let t0 = period(&s, &lp).unwrap().t;
    let back = continue_loop(&s, &lp, &HPath::circle(c(0.02, 0.0), h0)).unwrap();
    let t1 = period(&s, &back).unwrap().t;
    assert!((t1 - t0).norm() < 1e-8, "{t0} -> {t1}");
}

#[test]
fn circle_about_the_origin_fixes_its_vanishing_cycle() {
    let s = sys(2, &[1.0, 0.0, 0.0, 1.0]);
    let h0 = c(0.01, 0.0);
    let lp = lift_origin_loop(&s, h0, DEFAULT_SAMPLES).unwrap();
    let t0 = period(&s, &lp).unwrap().t;
    let back = continue_loop(&s, &lp, &HPath::circle(c(0.0, 0.0), h0)).unwrap();
    let t1 = period(&s, &back).unwrap().t;
    assert!((t1 - t0).norm() < 1e-8, "{t0} -> {t1}");
}

#[test]
fn saddle_period_tends_to_pi_i() {
    let s = sys(3, &[0.0, 1.0, 0.0, 0.0, 1.0]);
    let saddles = l0_extra_critical_points(&s);
    assert_eq!(saddles.len(), 2);
    let mut last = f64::INFINITY;
    for r in [1e-2, 1e-3, 1e-4] {
        let lp = lift_saddle_loop(&s, Complex64::from_polar(r, 0.5), &saddles[0], 0, DEFAULT_SAMPLES).unwrap();
        let e = (period(&s, &lp).unwrap().t - c(0.0, PI)).norm();
        assert!(e < last);
        last = e;
    }
    assert!(last < 1e-6);
}

#[test]
fn infinity_cycles_of_septic_example() {
    // y^3 (x^5 + y^5): one loop of period 2 pi i and two of period pi i
    let mut a = vec![0.0; 9];
    a[3] = 1.0;
    a[8] = 1.0;
    let s = sys(7, &a);
    let px = isochron::infinity::points_at_infinity(&s).unwrap().into_iter().find(|p| p.is_px).unwrap();
    let loops = lift_infinity_cycles(&s, c(1e-3, 0.0), &px, DEFAULT_SAMPLES).unwrap();
    let mut t: Vec<f64> = loops.iter().map(|lp| period(&s, lp).unwrap().t.im).collect();
    t.sort_by(f64::total_cmp);
    assert!((t[0] - PI).abs() < 1e-6 && (t[1] - PI).abs() < 1e-6 && (t[2] - 2.0 * PI).abs() < 1e-6, "{t:?}");
}

#[test]
fn infinity_cycles_need_a_mixed_system() {
    let s = sys(2, &[0.0, 0.0, 1.0, 1.0]);
    let px = isochron::infinity::points_at_infinity(&s).unwrap().into_iter().find(|p| p.is_px).unwrap();
    assert!(matches!(
        lift_infinity_cycles(&s, c(1e-3, 0.0), &px, DEFAULT_SAMPLES),
        Err(isochron::Error::HypothesisNotMet(_))
    ));
}

#[test]
fn monodromy_case_one() {
    let r = monodromy_lattice_check(&sys(2, &[1.0, 0.0, 0.0, 1.0]), 1, DEFAULT_SAMPLES).unwrap();
    assert!(r.passed);
    assert_ne!(r.m, 0);
    assert!(r.residual < 1e-6);
}

#[test]
fn monodromy_rejects_wrong_case_and_isochronous_systems() {
    let mixed = sys(2, &[1.0, 0.0, 0.0, 1.0]);
    assert!(matches!(monodromy_lattice_check(&mixed, 3, DEFAULT_SAMPLES), Err(isochron::Error::CaseMismatch(..))));
    let iso = sys(2, &[0.0, 0.0, 1.0, 1.0]);
    assert!(monodromy_lattice_check(&iso, 2, DEFAULT_SAMPLES).is_err());
}
