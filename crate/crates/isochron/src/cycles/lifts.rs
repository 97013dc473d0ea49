use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;

use super::{adapt_resolution, orient_upward, term_scale, FiberLoop, LoopAnchor, Orientation};
use crate::error::{Error, Result};
use crate::hamiltonian::CriticalPoint;
use crate::infinity::InfinitePoint;
use crate::poly::univariate_roots;
use crate::HomogeneousHamiltonianSystem;

const MAX_HALVINGS: usize = 8;

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Local frame `p = center + u e1 + v e2` in which `H - value ~ kappa u v`.
struct MorseFrame {
    center: (Complex64, Complex64),
    e1: (Complex64, Complex64),
    e2: (Complex64, Complex64),
    kappa: Complex64,
}

impl MorseFrame {
    fn at(&self, u: Complex64, v: Complex64) -> (Complex64, Complex64) {
        (self.center.0 + u * self.e1.0 + v * self.e2.0, self.center.1 + u * self.e1.1 + v * self.e2.1)
    }
}

/// Roots of `a + 2 b t + c t^2` with `|c| >= |a|`.
fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let d = (b * b - a * c).sqrt();
    let q = if (-b + d).norm() >= (-b - d).norm() { -b + d } else { -b - d };
    // q / c and a / q are the two roots
    (q / c, a / q)
}

/// Null directions of the Hessian at a Morse point.
fn morse_frame(sys: &HomogeneousHamiltonianSystem, x: Complex64, y: Complex64) -> Result<MorseFrame> {
    let j = sys.jet(x, y);
    let (m11, m12, m22) = (j.hxx, j.hxy, j.hyy);
    let one = Complex64::new(1.0, 0.0);
    let (e1, e2) = if m11.norm() < 1e-14 * j.hess_norm() && m22.norm() < 1e-14 * j.hess_norm() {
        ((one, c0()), (c0(), one))
    } else if m22.norm() >= m11.norm() {
        let (t1, t2) = quadratic(m11, m12, m22);
        ((one, t1), (one, t2))
    } else {
        let (s1, s2) = quadratic(m22, m12, m11);
        ((s1, one), (s2, one))
    };
    let kappa = e1.0 * (m11 * e2.0 + m12 * e2.1) + e1.1 * (m12 * e2.0 + m22 * e2.1);
    if !kappa.is_finite() || kappa.norm() < 1e-10 * j.hess_norm().max(1e-300) {
        return Err(Error::HypothesisNotMet("critical point is not Morse".into()));
    }
    Ok(MorseFrame { center: (x, y), e1, e2, kappa })
}

/// Loop `u = rho e^{i theta}` in a Morse frame, `v` by Newton from the seed `(h - value) / (kappa u)`.
fn lift_in_frame(
    sys: &HomogeneousHamiltonianSystem,
    frame: &MorseFrame,
    value: Complex64,
    h: Complex64,
    samples: usize,
    rho: f64,
) -> Result<Vec<(Complex64, Complex64)>> {
    let dh = h - value;
    let mut pts = Vec::with_capacity(samples);
    let mut vs = Vec::with_capacity(samples);
    for i in 0..samples {
        let u = Complex64::from_polar(rho, 2.0 * PI * i as f64 / samples as f64);
        let mut v = dh / (frame.kappa * u);
        let mut ok = false;
        for _ in 0..50 {
            let p = frame.at(u, v);
            let jt = sys.jet(p.0, p.1);
            let r = jt.h - h;
            if r.norm() <= 1e-14 * (term_scale(sys, p.0, p.1) + h.norm()) {
                ok = true;
                break;
            }
            let d = jt.hx * frame.e2.0 + jt.hy * frame.e2.1;
            if d.norm() == 0.0 {
                break;
            }
            v -= r / d;
            if !v.is_finite() {
                break;
            }
        }
        if !ok {
            let p = frame.at(u, v);
            if !((sys.eval(p.0, p.1) - h).norm() <= 1e-12 * (term_scale(sys, p.0, p.1) + h.norm())) {
                return Err(Error::NewtonDivergence(format!("fiber lift at sample {i}")));
            }
        }
        vs.push(v);
        pts.push(frame.at(u, v));
    }
    let vscale = (dh / frame.kappa).norm() / rho;
    for i in 0..samples {
        if (vs[(i + 1) % samples] - vs[i]).norm() >= vscale.max(rho) / 4.0 {
            return Err(Error::BranchJump);
        }
    }
    Ok(pts)
}

fn lift_morse(
    sys: &HomogeneousHamiltonianSystem,
    frame: &MorseFrame,
    value: Complex64,
    h: Complex64,
    samples: usize,
    anchor: LoopAnchor,
) -> Result<FiberLoop> {
    let dh = h - value;
    if dh.norm() == 0.0 {
        return Err(Error::InvalidInput("h equals the critical value".into()));
    }
    if samples < 8 {
        return Err(Error::InvalidInput("at least 8 samples are needed".into()));
    }
    let mut c = 1.0;
    for _ in 0..=MAX_HALVINGS {
        let rho = c * (dh / frame.kappa).norm().sqrt();
        match lift_in_frame(sys, frame, value, h, samples, rho) {
            Ok(pts) => {
                let lp = FiberLoop::from_periodic(h, pts, Orientation::Standard, anchor);
                return adapt_resolution(sys, lp, samples);
            }
            Err(Error::BranchJump) => c /= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BranchJump)
}

/// The vanishing cycle at the origin: `x = rho e^{i theta}`, `rho = |h|^{1/2}`, `y` by Newton from `h / x`.
pub fn lift_origin_loop(sys: &HomogeneousHamiltonianSystem, h: Complex64, samples: usize) -> Result<FiberLoop> {
    let one = Complex64::new(1.0, 0.0);
    let frame = MorseFrame { center: (c0(), c0()), e1: (one, c0()), e2: (c0(), one), kappa: one };
    lift_morse(sys, &frame, c0(), h, samples, LoopAnchor::Origin)
}

/// The vanishing cycle at a Morse critical point, oriented so that its period has positive imaginary part.
pub fn lift_saddle_loop(
    sys: &HomogeneousHamiltonianSystem,
    h: Complex64,
    saddle: &CriticalPoint,
    index: usize,
    samples: usize,
) -> Result<FiberLoop> {
    let j = sys.jet(saddle.x, saddle.y);
    if j.grad_norm() > 1e-8 * (1.0 + saddle.x.norm() + saddle.y.norm()) {
        return Err(Error::HypothesisNotMet("not a critical point".into()));
    }
    if saddle.x.norm() + saddle.y.norm() < 1e-12 {
        return Err(Error::HypothesisNotMet("the origin is handled by lift_origin_loop".into()));
    }
    let frame = morse_frame(sys, saddle.x, saddle.y)?;
    let lp = lift_morse(sys, &frame, j.h, h, samples, LoopAnchor::Saddle(index))?;
    orient_upward(sys, lp)
}

/// `F(u, v) = v (1 + sum_{j >= N} a_j u^{(j-N)(n-1)} v^{j-1})` and `dF/dv`.
fn blowup_f(a: &[Complex64], n: usize, big_n: usize, u: Complex64, v: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mut f = v;
    let mut fv = one;
    for (j, &aj) in a.iter().enumerate().skip(big_n) {
        if aj == c0() {
            continue;
        }
        let up = u.powu(((j - big_n) * (n - 1)) as u32);
        f += aj * up * v.powu(j as u32);
        fv += aj * up * j as f64 * v.powu(j as u32 - 1);
    }
    (f, fv)
}

/// The `N` cycles near a multiple point at infinity, built in the chart
/// `x = u^{-(N-1)}, y = u^{n-N} v`, where `H = u^k F(u, v)` with `k = n + 1 - 2N`.
///
/// The first loop circles `v = 0`; the others circle the roots of `1 + a_N v^{N-1}`.
pub fn lift_infinity_cycles(
    sys: &HomogeneousHamiltonianSystem,
    h: Complex64,
    p: &InfinitePoint,
    samples: usize,
) -> Result<Vec<FiberLoop>> {
    if sys.classify().is_isochronous() {
        return Err(Error::HypothesisNotMet("infinity cycles need a mixed system".into()));
    }
    if !(p.is_px || p.is_py) {
        return Err(Error::HypothesisNotMet("only P_x and P_y carry a blow-up".into()));
    }
    let n = sys.n();
    let big_n = p.multiplicity;
    if !(big_n > 1 && 2 * big_n < n + 1) {
        return Err(Error::HypothesisNotMet(format!("multiplicity {big_n} outside 1 < N < (n+1)/2")));
    }
    if h.norm() == 0.0 {
        return Err(Error::InvalidInput("h = 0".into()));
    }
    let mut a = sys.a().to_vec();
    if p.is_py {
        a.reverse();
    }
    let k = n + 1 - 2 * big_n;
    let g = k.gcd(&(big_n - 1));
    let an = a[big_n];
    let mut char_poly = vec![c0(); big_n];
    char_poly[0] = Complex64::new(1.0, 0.0);
    char_poly[big_n - 1] = an;
    let mut centers: Vec<Complex64> = univariate_roots(&char_poly)?.into_iter().map(|r| r.0).collect();
    centers.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    centers.insert(0, c0());

    let r = h.norm().powf(1.0 / (2.0 * k as f64));
    if r > 0.5 {
        return Err(Error::BlowupChartFailure(format!("|h| too large for the chart, radius {r}")));
    }
    let mut out = Vec::new();
    for (idx, &vc) in centers.iter().enumerate() {
        let arc = if idx == 0 { 2.0 * PI / (big_n - 1) as f64 } else { 2.0 * PI / g as f64 };
        let fv0 = blowup_f(&a, n, big_n, c0(), vc).1;
        let vrad = h.norm() / (r.powi(k as i32) * fv0.norm());
        let mut vs = Vec::with_capacity(samples);
        let mut pts = Vec::with_capacity(samples);
        for i in 0..samples {
            let u = Complex64::from_polar(r, arc * i as f64 / samples as f64);
            let uk = u.powu(k as u32);
            let mut v = vc + h / (uk * fv0);
            let mut ok = false;
            for _ in 0..50 {
                let (f, fv) = blowup_f(&a, n, big_n, u, v);
                let res = uk * f - h;
                if res.norm() <= 1e-15 * (1.0 + h.norm()) {
                    ok = true;
                    break;
                }
                v -= res / (uk * fv);
            }
            if !ok {
                let (f, _) = blowup_f(&a, n, big_n, u, v);
                if !((uk * f - h).norm() <= 1e-13 * (1.0 + h.norm())) {
                    return Err(Error::BlowupChartFailure(format!("Newton failed near v = {vc}")));
                }
            }
            if (v - vc).norm() > 0.5 * centers.iter().filter(|&&c| c != vc).map(|c| (c - vc).norm()).fold(f64::INFINITY, f64::min) {
                return Err(Error::BlowupChartFailure("loop reaches another saddle".into()));
            }
            vs.push(v);
            let x = u.powi(-((big_n - 1) as i32));
            let y = u.powu((n - big_n) as u32) * v;
            pts.push(if p.is_py { (y, x) } else { (x, y) });
        }
        // v itself need not close up (u covers only an arc); the chart image must
        let gaps: Vec<f64> = (0..samples)
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % samples]);
                ((a.0 - b.0).norm_sqr() + (a.1 - b.1).norm_sqr()).sqrt()
            })
            .collect();
        let mean = gaps.iter().sum::<f64>() / samples as f64;
        if gaps.iter().any(|&d| d > 3.0 * mean) {
            return Err(Error::BranchJump);
        }
        for i in 0..samples - 1 {
            if (vs[i + 1] - vs[i]).norm() >= vrad / 4.0 + 1e-300 {
                return Err(Error::BranchJump);
            }
        }
        let anchor = LoopAnchor::InfinityCycle { at_px: p.is_px, branch: idx };
        let lp = FiberLoop::from_periodic(h, pts, Orientation::Standard, anchor);
        let lp = adapt_resolution(sys, lp, samples)?;
        out.push(orient_upward(sys, lp)?);
    }
    Ok(out)
}
