use num_complex::Complex64;

use super::HomogeneousHamiltonianSystem;
use crate::error::{Error, Result};
use crate::poly::{
    discriminant_in_y_float, resultant_in_y_float, univariate_roots, BivarPoly, BivarPolyH, Var, ZERO_THRESHOLD,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub x: Complex64,
    pub y: Complex64,
    pub value: Complex64,
    pub hessian_rank: u8,
    pub milnor_number: usize,
    /// `k` of the A_k type; 0 when the Hessian vanishes.
    pub ak_type: usize,
    pub isolated: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CriticalPoints {
    pub points: Vec<CriticalPoint>,
    pub warnings: Vec<String>,
}

const RESIDUAL_TOL: f64 = 1e-10;
const DEDUP_TOL: f64 = 1e-8;

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Singular values of the symmetric 2x2 Hessian.
fn hessian_rank(sys: &HomogeneousHamiltonianSystem, x: Complex64, y: Complex64) -> u8 {
    let j = sys.jet(x, y);
    let fro2 = j.hxx.norm_sqr() + 2.0 * j.hxy.norm_sqr() + j.hyy.norm_sqr();
    let det = (j.hxx * j.hyy - j.hxy * j.hxy).norm();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s_max = ((fro2 + disc) / 2.0).sqrt();
    let s_min = if s_max > 0.0 { det / s_max } else { 0.0 };
    let tol = 1e-7 * s_max.max(1.0);
    (s_max > tol) as u8 + (s_min > tol) as u8
}

/// Newton iteration on `(H_x, H_y) = 0`; returns the point and the final residual.
pub fn polish_critical_point(
    sys: &HomogeneousHamiltonianSystem,
    x: Complex64,
    y: Complex64,
) -> (Complex64, Complex64, f64) {
    let (mut x, mut y) = (x, y);
    for _ in 0..50 {
        let j = sys.jet(x, y);
        let det = j.hxx * j.hyy - j.hxy * j.hxy;
        if det.norm() == 0.0 {
            break;
        }
        let dx = -(j.hyy * j.hx - j.hxy * j.hy) / det;
        let dy = -(j.hxx * j.hy - j.hxy * j.hx) / det;
        if !(dx.is_finite() && dy.is_finite()) {
            break;
        }
        x += dx;
        y += dy;
        if (dx.norm_sqr() + dy.norm_sqr()).sqrt() < 1e-13 * (1.0 + x.norm() + y.norm()) {
            break;
        }
    }
    let j = sys.jet(x, y);
    (x, y, j.grad_norm())
}

fn classify_point(
    sys: &HomogeneousHamiltonianSystem,
    x: Complex64,
    y: Complex64,
    residual: f64,
) -> CriticalPoint {
    let rank = hessian_rank(sys, x, y);
    CriticalPoint {
        x,
        y,
        value: sys.eval(x, y),
        hessian_rank: rank,
        milnor_number: 1,
        ak_type: if rank == 2 { 1 } else { 0 },
        isolated: true,
        residual,
    }
}

fn poly_in_y(p: &BivarPoly<Complex64>, x: Complex64) -> Vec<Complex64> {
    let d = p.degree_in(Var::Y).unwrap_or(0) as usize;
    let mut v = vec![c0(); d + 1];
    for (&(i, j), c) in p.terms() {
        v[j as usize] += c * x.powu(i);
    }
    v
}

fn trimmed(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let m = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while v.last().is_some_and(|c| c.norm() <= ZERO_THRESHOLD * m) {
        v.pop();
    }
    v
}

/// Eliminating polynomial in x of the system `H_x = H_y = 0`.
fn eliminant(hx: &BivarPoly<Complex64>, hy: &BivarPoly<Complex64>) -> Result<Vec<Complex64>> {
    let as_x = |p: &BivarPoly<Complex64>| {
        let d = p.degree_in(Var::X).unwrap_or(0) as usize;
        let mut v = vec![c0(); d + 1];
        for (&(i, _), c) in p.terms() {
            v[i as usize] += c;
        }
        v
    };
    if hy.degree_in(Var::Y) == Some(0) {
        return Ok(as_x(hy));
    }
    if hx.degree_in(Var::Y) == Some(0) {
        return Ok(as_x(hx));
    }
    let r = resultant_in_y_float(&BivarPolyH::constant(hx), &BivarPolyH::constant(hy))?;
    let v: Vec<Complex64> = r.coeffs().iter().map(|c| c.coeff(0)).collect();
    Ok(trimmed(v))
}

/// All finite critical points, by elimination of y, back-substitution and Newton polish.
pub fn finite_critical_points(sys: &HomogeneousHamiltonianSystem) -> Result<CriticalPoints> {
    if sys.non_isolated_locus() {
        return Err(Error::NonIsolatedSingularities);
    }
    let h = sys.build_h();
    let hx = h.partial(Var::X);
    let hy = h.partial(Var::Y);
    let elim = eliminant(&hx, &hy)?;
    if elim.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::NonIsolatedSingularities);
    }
    let xroots = univariate_roots(&elim)?;
    let mut out = CriticalPoints::default();
    let mut found: Vec<(Complex64, Complex64, f64)> = Vec::new();
    for &(x0, _) in &xroots {
        let gx = trimmed(poly_in_y(&hx, x0));
        let gy = trimmed(poly_in_y(&hy, x0));
        let pick = match (gx.len(), gy.len()) {
            (a, b) if a >= 2 && (b < 2 || a <= b) => &gx,
            (_, b) if b >= 2 => &gy,
            _ => continue,
        };
        for (y0, _) in univariate_roots(pick)? {
            let (x1, y1, res) = polish_critical_point(sys, x0, y0);
            if res >= RESIDUAL_TOL {
                continue;
            }
            let scale = 1.0 + x1.norm() + y1.norm();
            if !found.iter().any(|p| ((p.0 - x1).norm() + (p.1 - y1).norm()) < DEDUP_TOL * scale) {
                found.push((x1, y1, res));
            }
        }
    }
    let mut points: Vec<CriticalPoint> = found.iter().map(|&(x, y, r)| classify_point(sys, x, y, r)).collect();
    let near = |a: Complex64, b: Complex64| (a - b).norm() < 1e-5 * a.norm().max(1.0);
    for k in 0..points.len() {
        if points[k].hessian_rank == 2 {
            continue;
        }
        let Some(&(x0, m)) = xroots.iter().min_by(|a, b| {
            (a.0 - points[k].x).norm().total_cmp(&(b.0 - points[k].x).norm())
        }) else {
            continue;
        };
        let others = points
            .iter()
            .enumerate()
            .filter(|(i, p)| *i != k && near(p.x, x0))
            .count();
        let mu = m.saturating_sub(others);
        if mu < 2 {
            out.warnings.push(format!(
                "degenerate point ({:.6}, {:.6}): eliminant multiplicity {m} leaves mu = {mu}",
                points[k].x, points[k].y
            ));
        }
        points[k].milnor_number = mu.max(2);
        if points[k].hessian_rank == 1 {
            points[k].ak_type = points[k].milnor_number;
        }
    }
    points.sort_by(|a, b| {
        (a.x.norm() + a.y.norm())
            .total_cmp(&(b.x.norm() + b.y.norm()))
            .then(a.x.re.total_cmp(&b.x.re))
            .then(a.x.im.total_cmp(&b.x.im))
            .then(a.y.re.total_cmp(&b.y.re))
            .then(a.y.im.total_cmp(&b.y.im))
    });
    out.points = points;
    Ok(out)
}

/// Saddles on `L_0` besides the origin: `(x_j, 0)` with `1 + a_1 x^{n-1} = 0` when
/// `a_0 = 0 != a_1`, and `(0, y_j)` with `1 + a_n y^{n-1} = 0` when `a_{n+1} = 0 != a_n`.
pub fn l0_extra_critical_points(sys: &HomogeneousHamiltonianSystem) -> Vec<CriticalPoint> {
    let n = sys.n();
    let mut out = Vec::new();
    let mut axis = |coef: Complex64, on_x: bool| {
        let mut p = vec![c0(); n];
        p[0] = Complex64::new(1.0, 0.0);
        p[n - 1] = coef;
        for (r, _) in univariate_roots(&p).unwrap_or_default() {
            let (x, y) = if on_x { (r, c0()) } else { (c0(), r) };
            let (x, y, res) = polish_critical_point(sys, x, y);
            out.push(classify_point(sys, x, y, res));
        }
    };
    if sys.coeff_is_zero(0) && !sys.coeff_is_zero(1) {
        axis(sys.a()[1], true);
    }
    if sys.coeff_is_zero(n + 1) && !sys.coeff_is_zero(n) {
        axis(sys.a()[n], false);
    }
    out
}

/// Critical values together with the values where the x-degree of the discriminant drops.
pub fn atypical_values(sys: &HomogeneousHamiltonianSystem) -> Result<Vec<Complex64>> {
    let cps = finite_critical_points(sys)?;
    let mut vals: Vec<Complex64> = cps.points.iter().map(|p| p.value).collect();
    let h = sys.build_h();
    if h.degree_in(Var::Y).unwrap_or(0) >= 2 {
        let d = discriminant_in_y_float(&BivarPolyH::minus_h(&h))?;
        if let Some(top) = d.coeffs().last() {
            let lead = trimmed(top.coeffs().to_vec());
            if lead.len() > 1 {
                vals.extend(univariate_roots(&lead)?.into_iter().map(|r| r.0));
            }
        }
    }
    let mut merged: Vec<Complex64> = Vec::new();
    for v in vals {
        let v = if v.norm() < 1e-12 { c0() } else { v };
        if !merged.iter().any(|m| (m - v).norm() < 1e-9) {
            merged.push(v);
        }
    }
    merged.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(merged)
}
