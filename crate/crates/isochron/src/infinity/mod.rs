//! The projective closure of `L_h` at the line at infinity.

pub mod laurent;
pub mod newton;

pub use newton::{branch_residual_order, newton_polygon, puiseux_branches, ChartTag, NewtonPolygon, PuiseuxBranch, Segment};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{atypical_values, HomogeneousHamiltonianSystem};
use crate::poly::{
    degree_drop_at, discriminant_in_y_exact, discriminant_in_y_float, univariate_roots, BivarPoly, BivarPolyH,
    GaussianRational, UniPolyOverH, Var,
};
use laurent::Laurent;

#[derive(Clone, Debug, PartialEq)]
pub struct InfinitePoint {
    /// `[beta : alpha : 0]`, larger-magnitude entry equal to 1.
    pub beta: Complex64,
    pub alpha: Complex64,
    pub multiplicity: usize,
    pub is_px: bool,
    pub is_py: bool,
}

impl InfinitePoint {
    fn chart(&self) -> ChartTag {
        if self.is_px {
            ChartTag::AtPx
        } else if self.is_py {
            ChartTag::AtPy
        } else {
            ChartTag::Rotated(self.alpha / self.beta)
        }
    }

    /// Chordal distance in CP^1 from the direction `[x : y]`.
    pub fn distance_to_direction(&self, x: Complex64, y: Complex64) -> f64 {
        let num = (x * self.alpha - y * self.beta).norm();
        let den = (x.norm_sqr() + y.norm_sqr()).sqrt() * (self.alpha.norm_sqr() + self.beta.norm_sqr()).sqrt();
        num / den
    }
}

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn points_at_infinity(sys: &HomogeneousHamiltonianSystem) -> Result<Vec<InfinitePoint>> {
    let nz: Vec<usize> = (0..=sys.n() + 1).filter(|&j| !sys.coeff_is_zero(j)).collect();
    let (Some(&lo), Some(&hi)) = (nz.first(), nz.last()) else {
        return Err(Error::LinearSystem);
    };
    let n1 = sys.n() + 1;
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    if lo > 0 {
        out.push(InfinitePoint { beta: one, alpha: c0(), multiplicity: lo, is_px: true, is_py: false });
    }
    if hi > lo {
        let coeffs: Vec<Complex64> = (lo..=hi).map(|j| sys.a()[j]).collect();
        for (t, m) in univariate_roots(&coeffs)? {
            let (beta, alpha) = if t.norm() <= 1.0 { (one, t) } else { (t.inv(), one) };
            out.push(InfinitePoint { beta, alpha, multiplicity: m, is_px: false, is_py: false });
        }
    }
    if hi < n1 {
        out.push(InfinitePoint { beta: c0(), alpha: one, multiplicity: n1 - hi, is_px: false, is_py: true });
    }
    Ok(out)
}

/// Drops coefficients below `1e-11` of the largest; shears leave rounding residue in
/// coefficients that vanish exactly.
fn clean(p: BivarPoly<Complex64>) -> BivarPoly<Complex64> {
    let m = p.max_abs_coeff();
    BivarPoly::from_terms(p.terms().filter(|(_, c)| c.norm() > 1e-11 * m).map(|(e, c)| (*e, *c)))
}

/// `X^{n+1} (G(1/X, Y/X) - h)` for a polynomial `G` of degree `n + 1`.
fn px_chart(g: &BivarPoly<Complex64>, n1: u32, h: Complex64) -> BivarPoly<Complex64> {
    let mut terms: Vec<((u32, u32), Complex64)> =
        g.terms().map(|(&(i, j), &c)| ((n1 - i - j, j), c)).collect();
    terms.push(((n1, 0), -h));
    clean(BivarPoly::from_terms(terms))
}

/// Chart polynomial `F*(X, Y)` of `H - h` with the point at the origin.
pub fn chart_polynomial(sys: &HomogeneousHamiltonianSystem, h: Complex64, p: &InfinitePoint) -> BivarPoly<Complex64> {
    let n1 = sys.n() as u32 + 1;
    let hh = sys.build_h();
    match p.chart() {
        ChartTag::AtPx | ChartTag::Affine => px_chart(&hh, n1, h),
        ChartTag::AtPy => px_chart(&hh.swap(), n1, h),
        ChartTag::Rotated(t) => px_chart(&clean(hh.shear(&t)), n1, h),
    }
}

/// `(x(s), y(s))` of a branch in the original coordinates.
fn branch_xy(b: &PuiseuxBranch) -> (Laurent, Laurent) {
    let prec = b.y_series.len();
    let p = b.x_exponent as i64;
    let q = b.y_valuation as i64;
    let rho = Laurent::from_coeffs(0, b.y_series.clone());
    let xinv = Laurent::monomial(Complex64::new(1.0, 0.0), -p, prec);
    match b.chart {
        ChartTag::AtPx | ChartTag::Affine => (xinv, Laurent::from_coeffs(q - p, b.y_series.clone())),
        ChartTag::AtPy => {
            // (X, Y) = (1/y, x/y)
            (Laurent::from_coeffs(q - p, b.y_series.clone()), xinv)
        }
        ChartTag::Rotated(t) => {
            let ytil = rho.mul(&Laurent::monomial(Complex64::new(1.0, 0.0), q - p, prec));
            let y = Laurent::sum(&[xinv.scale(t), ytil.scale(Complex64::new(-1.0, 0.0))]);
            (xinv, y)
        }
    }
}

fn eval_series(poly: &BivarPoly<Complex64>, x: &Laurent, y: &Laurent, prec: usize) -> Laurent {
    let terms: Vec<Laurent> = poly
        .terms()
        .map(|(&(i, j), &c)| x.pow(i, prec).mul(&y.pow(j, prec)).scale(c))
        .collect();
    Laurent::sum(&terms)
}

/// Residue of `omega = dx/H_y` at one place.
pub fn branch_residue(sys: &HomogeneousHamiltonianSystem, b: &PuiseuxBranch) -> Result<Complex64> {
    let prec = b.y_series.len();
    let (x, y) = branch_xy(b);
    let h = sys.build_h();
    let hy = eval_series(&h.partial(Var::Y), &x, &y, prec);
    let (num, den) = if !hy.is_zero() {
        (x.derivative(), hy)
    } else {
        let hx = eval_series(&h.partial(Var::X), &x, &y, prec);
        if hx.is_zero() {
            return Err(Error::BranchFailure("gradient vanishes along the branch".into()));
        }
        (y.derivative().scale(Complex64::new(-1.0, 0.0)), hx)
    };
    if num.is_zero() {
        return Err(Error::BranchFailure("chart coordinate constant along the branch".into()));
    }
    let omega = num.mul(&den.inv());
    omega
        .coeff(-1)
        .ok_or_else(|| Error::BranchFailure(format!("precision O(s^{}) too low for the residue", omega.abs_prec())))
}

/// Residues of `dx/H_y` on every branch through `P`; `k` is the Puiseux truncation order.
pub fn residue_at_infinity(
    sys: &HomogeneousHamiltonianSystem,
    h: Complex64,
    p: &InfinitePoint,
    k: usize,
) -> Result<Vec<(PuiseuxBranch, Complex64)>> {
    let f = chart_polynomial(sys, h, p);
    let mut kk = k;
    loop {
        let branches = puiseux_branches(&f, kk, p.chart())?;
        let res: Result<Vec<_>> = branches
            .into_iter()
            .map(|b| branch_residue(sys, &b).map(|r| (b, r)))
            .collect();
        match res {
            Err(Error::BranchFailure(msg)) if msg.starts_with("precision") && kk < 8 * k => kk *= 2,
            other => return other,
        }
    }
}

pub fn default_truncation(sys: &HomogeneousHamiltonianSystem) -> usize {
    2 * (sys.n() + 1)
}

/// Exact discriminant of `H - h` in y; `None` when H is linear in y.
pub fn exact_discriminant(sys: &HomogeneousHamiltonianSystem) -> Result<Option<UniPolyOverH<GaussianRational>>> {
    let h = sys.build_h_exact();
    if h.degree_in(Var::Y).unwrap_or(0) < 2 {
        return Ok(None);
    }
    discriminant_in_y_exact(&BivarPolyH::minus_h(&h)).map(Some)
}

/// `lambda^h(H)`, the exact x-degree drop of the discriminant at `h`.
///
/// A Hamiltonian of degree one in y has no ramification points; its index is 0.
pub fn lambda_index(sys: &HomogeneousHamiltonianSystem, h: &GaussianRational) -> Result<usize> {
    Ok(lambda_indices(sys, std::slice::from_ref(h))?[0])
}

pub fn lambda_indices(sys: &HomogeneousHamiltonianSystem, hs: &[GaussianRational]) -> Result<Vec<usize>> {
    if sys.is_linear() {
        return Err(Error::LinearSystem);
    }
    Ok(match exact_discriminant(sys)? {
        Some(d) => hs.iter().map(|h| degree_drop_at(&d, h)).collect(),
        None => vec![0; hs.len()],
    })
}

pub fn lambda_index_c(sys: &HomogeneousHamiltonianSystem, h: Complex64) -> Result<usize> {
    let hq = GaussianRational::from_complex(h).ok_or_else(|| Error::InvalidInput("non-finite h".into()))?;
    lambda_index(sys, &hq)
}

struct RamPoint {
    x: Complex64,
    y: Complex64,
}

fn ram_points(
    sys: &HomogeneousHamiltonianSystem,
    d: &UniPolyOverH<Complex64>,
    hq: Complex64,
) -> Result<Vec<RamPoint>> {
    let coeffs = d.at_h_trimmed(hq);
    if coeffs.len() < 2 {
        return Ok(Vec::new());
    }
    let h = sys.build_h();
    let n = sys.n();
    let mut out = Vec::new();
    for (x, m) in univariate_roots(&coeffs)? {
        let mut py = vec![c0(); n + 2];
        for (&(i, j), c) in h.terms() {
            py[j as usize] += c * x.powu(i);
        }
        py[0] -= hq;
        let mut ys: Vec<Complex64> = Vec::new();
        let mut cand: Vec<(f64, Complex64)> = Vec::new();
        let roots = univariate_roots(&trim(py))?;
        for (y, my) in &roots {
            if *my >= 2 {
                cand.push((0.0, *y));
            }
        }
        for a in 0..roots.len() {
            for b in a + 1..roots.len() {
                let (ya, yb) = (roots[a].0, roots[b].0);
                cand.push(((ya - yb).norm() / (1.0 + ya.norm()), (ya + yb) / 2.0));
            }
        }
        cand.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, y) in cand.into_iter().take(m) {
            ys.push(y);
        }
        out.extend(ys.into_iter().map(|y| RamPoint { x, y }));
    }
    Ok(out)
}

fn trim(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let m = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while v.last().is_some_and(|c| c.norm() <= 1e-13 * m) {
        v.pop();
    }
    v
}

fn affine_distance(a: &RamPoint, b: &RamPoint) -> f64 {
    let d = ((a.x - b.x).norm_sqr() + (a.y - b.y).norm_sqr()).sqrt();
    let na = (a.x.norm_sqr() + a.y.norm_sqr()).sqrt();
    let nb = (b.x.norm_sqr() + b.y.norm_sqr()).sqrt();
    d / (1.0 + na.min(nb))
}

fn track_once(
    sys: &HomogeneousHamiltonianSystem,
    d: &UniPolyOverH<Complex64>,
    h: Complex64,
    theta: f64,
    t0: f64,
) -> Result<Vec<(Vec<f64>, RamPoint)>> {
    let dir = Complex64::from_polar(1.0, theta);
    let t_end = 1e-6 * t0;
    let mut t = t0;
    let mut pts = ram_points(sys, d, h + dir * t)?;
    // per-point history of the chordal distance to the line at infinity
    let inf_w = |p: &RamPoint| 1.0 / (1.0 + p.x.norm_sqr() + p.y.norm_sqr()).sqrt();
    let mut hist: Vec<Vec<f64>> = pts.iter().map(|p| vec![inf_w(p)]).collect();
    let mut ratio: f64 = 0.8;
    while t > t_end {
        let tn = (t * ratio).max(t_end);
        let next = ram_points(sys, d, h + dir * tn)?;
        let mut ok = next.len() == pts.len();
        let mut assign = vec![usize::MAX; pts.len()];
        if ok {
            let mut taken = vec![false; next.len()];
            for (i, p) in pts.iter().enumerate() {
                let mut ds: Vec<(f64, usize)> =
                    next.iter().enumerate().map(|(j, q)| (affine_distance(p, q), j)).collect();
                ds.sort_by(|a, b| a.0.total_cmp(&b.0));
                let (d1, j1) = ds[0];
                let d2 = ds.get(1).map_or(f64::INFINITY, |e| e.0);
                if taken[j1] || d1 > 0.5 * d2 {
                    ok = false;
                    break;
                }
                taken[j1] = true;
                assign[i] = j1;
            }
        }
        if !ok {
            ratio = ratio.sqrt();
            if ratio > 0.995 {
                return Err(Error::TrackingLost(tn));
            }
            continue;
        }
        let mut next = next.into_iter().map(Some).collect::<Vec<_>>();
        pts = assign.iter().map(|&j| next[j].take().unwrap()).collect();
        for (hst, p) in hist.iter_mut().zip(&pts) {
            hst.push(inf_w(p));
        }
        t = tn;
        ratio = (ratio * ratio).max(0.8);
    }
    Ok(hist.into_iter().zip(pts).collect())
}

/// Number of ramification points of `L_{h'}` tending to `P` as `h' -> h` along a ray.
pub fn lambda_index_at_point(
    sys: &HomogeneousHamiltonianSystem,
    h: Complex64,
    p: &InfinitePoint,
) -> Result<usize> {
    Ok(lambda_indices_by_point(sys, h)?
        .into_iter()
        .find(|(q, _)| q == p)
        .map_or(0, |(_, c)| c))
}

/// `lambda_P^h` for every infinite point.
pub fn lambda_indices_by_point(
    sys: &HomogeneousHamiltonianSystem,
    h: Complex64,
) -> Result<Vec<(InfinitePoint, usize)>> {
    let points = points_at_infinity(sys)?;
    let hh = sys.build_h();
    if hh.degree_in(Var::Y).unwrap_or(0) < 2 {
        return Ok(points.into_iter().map(|p| (p, 0)).collect());
    }
    let d = discriminant_in_y_float(&BivarPolyH::minus_h(&hh))?;
    let others: f64 = atypical_values(sys)?
        .iter()
        .filter(|a| (*a - h).norm() > 1e-9)
        .map(|a| (a - h).norm())
        .fold(1.0, f64::min);
    let t0 = 0.25 * others;
    let tracked = match track_once(sys, &d, h, 0.3, t0) {
        Err(Error::TrackingLost(_)) => track_once(sys, &d, h, 1.6, t0)?,
        other => other?,
    };
    let mut counts = vec![0usize; points.len()];
    for (w, pt) in tracked {
        let k = w.len();
        if k < 5 {
            continue;
        }
        let last = w[k - 1];
        let slope = (w[k - 1] / w[k - 5]).ln() / (0.8f64.powi(4)).ln();
        if last < 1e-2 && slope > 0.2 {
            let best = points
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    a.1.distance_to_direction(pt.x, pt.y).total_cmp(&b.1.distance_to_direction(pt.x, pt.y))
                })
                .map(|e| e.0);
            if let Some(i) = best {
                counts[i] += 1;
            }
        }
    }
    Ok(points.into_iter().zip(counts).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(n: usize, a: &[f64]) -> HomogeneousHamiltonianSystem {
        HomogeneousHamiltonianSystem::real(n, a).unwrap()
    }

    #[test]
    fn points_of_a_cubic() {
        // y^2 (x + y)
        let pts = points_at_infinity(&sys(2, &[0.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[0].is_px && pts[0].multiplicity == 2);
        assert_eq!(pts[1].multiplicity, 1);
        assert!(pts[1].distance_to_direction(Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)) < 1e-14);
    }

    #[test]
    fn monomial_top_form() {
        let pts = points_at_infinity(&sys(3, &[0.0, 0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().any(|p| p.is_px && p.multiplicity == 2));
        assert!(pts.iter().any(|p| p.is_py && p.multiplicity == 2));
        assert_eq!(points_at_infinity(&sys(2, &[0.0; 4])), Err(Error::LinearSystem));
    }

    #[test]
    fn linear_fiber_residues() {
        let s = sys(2, &[0.0, 0.0, 0.0, 1.0]);
        let h = Complex64::new(0.3, 0.2);
        let mut total = c0();
        for p in points_at_infinity(&s).unwrap() {
            for (_, r) in residue_at_infinity(&s, h, &p, 8).unwrap() {
                total += r;
            }
        }
        assert!(total.norm() < 1e-10);
    }
}
