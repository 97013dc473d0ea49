use std::f64::consts::PI;

use num_complex::Complex64;

use super::scan::{clearance, direct_radius, origin_loop_at};
use super::{continue_loop_with, lift_saddle_loop, period, HPath};
use crate::error::{Error, Result};
use crate::hamiltonian::{atypical_values, l0_extra_critical_points};
use crate::HomogeneousHamiltonianSystem;

/// Accepted distance of `-shift / coefficient` from the nearest integer.
pub const LATTICE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyReport {
    pub case: u8,
    pub base_h: Complex64,
    /// The nonzero atypical value circled first.
    pub encircled: Complex64,
    pub lasso_radius: f64,
    pub period_gamma: Complex64,
    pub period_delta: Complex64,
    pub period_after: Complex64,
    /// Periods of the `L_0` saddle cycles at the base point.
    pub saddle_periods: Vec<Complex64>,
    pub shift: Complex64,
    /// `shift = -m * coefficient` on the predicted lattice.
    pub coefficient: Complex64,
    pub m: i64,
    pub residual: f64,
    pub passed: bool,
    pub warnings: Vec<String>,
}

fn multiplicities(sys: &HomogeneousHamiltonianSystem) -> (usize, usize) {
    let n1 = sys.n() + 1;
    let lo = (0..=n1).find(|&j| !sys.coeff_is_zero(j)).unwrap_or(0);
    let hi = (0..=n1).rev().find(|&j| !sys.coeff_is_zero(j)).unwrap_or(n1);
    (lo, n1 - hi)
}

fn check_case(sys: &HomogeneousHamiltonianSystem, case: u8) -> Result<()> {
    let n = sys.n();
    let z = |j: usize| sys.coeff_is_zero(j);
    let (n1, n2) = multiplicities(sys);
    let ok = match case {
        1 => !z(0) && !z(n + 1),
        2 => (z(0) && !z(1) && !z(n + 1)) || (z(n + 1) && !z(n) && !z(0)),
        3 => z(0) && z(n + 1) && !z(1) && !z(n),
        4 => (n1 > 1 && z(n + 1) && !z(n)) || (n2 > 1 && z(0) && !z(1)),
        5 => n1 > 1 && n2 > 1,
        _ => return Err(Error::CaseMismatch(case, "cases are numbered 1 to 5".into())),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::CaseMismatch(case, "coefficient pattern does not match".into()))
    }
}

fn infinity_term(big_n: usize) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * big_n as f64 / (big_n as f64 - 1.0))
}

/// Transports `gamma_h` once around a nonzero atypical value and then once around `0`,
/// and checks that the period shift is a nonzero integer multiple of the case's coefficient.
///
/// Coefficients: case 1 `T`, case 2 `T + T_s`, case 3 `T + 2 T_s`, with `T` and `T_s` the
/// measured periods of the origin and saddle cycles at the base point; cases 4 and 5 add the
/// limiting infinity-cycle terms `2 pi i N / (N - 1)`.
pub fn monodromy_lattice_check(sys: &HomogeneousHamiltonianSystem, case: u8, samples: usize) -> Result<MonodromyReport> {
    check_case(sys, case)?;
    if sys.classify().is_isochronous() {
        return Err(Error::HypothesisNotMet("monodromy check needs a mixed system".into()));
    }
    let atypical = atypical_values(sys)?;
    let mut targets: Vec<Complex64> = atypical.iter().copied().filter(|a| a.norm() > 1e-9).collect();
    if targets.is_empty() {
        return Err(Error::HypothesisNotMet("no nonzero atypical value to encircle".into()));
    }
    targets.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    let rmin = targets[0].norm();
    let clear = clearance(&atypical);
    let saddles = l0_extra_critical_points(sys);
    let mut last = None;
    for &target in &targets {
        let base = target / target.norm() * (0.5 * rmin);
        let gamma = origin_loop_at(sys, base, None, &atypical, samples)?;
        let t_gamma = period(sys, &gamma)?.t;

        let mut warnings = Vec::new();
        let mut saddle_periods = Vec::new();
        if matches!(case, 2..=4) {
            let small = base / base.norm() * direct_radius(sys, &atypical).min(0.5 * rmin) * 0.1;
            for (i, s) in saddles.iter().enumerate() {
                let lp = lift_saddle_loop(sys, small, s, i, samples)?;
                let lp = continue_loop_with(sys, &lp, &HPath::line(small, base), &atypical)?;
                saddle_periods.push(period(sys, &lp)?.t);
            }
            if saddle_periods.is_empty() {
                return Err(Error::HypothesisNotMet("no saddles on L_0".into()));
            }
            let spread = saddle_periods.iter().map(|t| (t - saddle_periods[0]).norm()).fold(0.0, f64::max);
            if spread > LATTICE_TOL {
                warnings.push(format!("saddle periods differ by {spread:e}; the lattice uses the first"));
            }
        }

        let others = atypical.iter().filter(|&&a| a != target).map(|a| (a - target).norm()).fold(f64::INFINITY, f64::min);
        let radius = 0.4 * (target - base).norm().min(others);
        let lasso = HPath::lasso(base, target, radius, &atypical, clear);
        let delta = continue_loop_with(sys, &gamma, &lasso, &atypical)?;
        let t_delta = period(sys, &delta)?.t;
        let after = continue_loop_with(sys, &delta, &HPath::circle(Complex64::new(0.0, 0.0), base), &atypical)?;
        let t_after = period(sys, &after)?.t;
        let shift = t_after - t_delta;

        let (n1, n2) = multiplicities(sys);
        let ts = saddle_periods.first().copied().unwrap_or_default();
        let coefficient = match case {
            1 => t_gamma,
            2 => t_gamma + ts,
            3 => t_gamma + ts * 2.0,
            4 => t_gamma + ts + infinity_term(n1.max(n2)),
            _ => t_gamma + infinity_term(n1) + infinity_term(n2),
        };
        let ratio = -shift / coefficient;
        let m = ratio.re.round() as i64;
        let residual = (ratio - Complex64::new(m as f64, 0.0)).norm();
        let passed = m != 0 && residual < LATTICE_TOL;
        let report = MonodromyReport {
            case,
            base_h: base,
            encircled: target,
            lasso_radius: radius,
            period_gamma: t_gamma,
            period_delta: t_delta,
            period_after: t_after,
            saddle_periods,
            shift,
            coefficient,
            m,
            residual,
            passed,
            warnings,
        };
        if passed {
            return Ok(report);
        }
        last = Some(report);
    }
    Ok(last.expect("at least one target"))
}
