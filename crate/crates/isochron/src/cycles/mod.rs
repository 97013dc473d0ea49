//! Loops on fibers `H = h`, their periods `oint dx / H_y`, transport of loops
//! along paths in the h-plane, and the period-shift checks built on top.

mod lifts;
mod monodromy;
mod path;
mod scan;
mod spectral;
mod transport;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::HomogeneousHamiltonianSystem;

pub use lifts::{lift_infinity_cycles, lift_origin_loop, lift_saddle_loop};
pub use monodromy::{monodromy_lattice_check, MonodromyReport};
pub use path::{HPath, PathPiece};
pub use scan::{period_scan, PeriodScan, ScanError};
pub use transport::{continue_loop, continue_loop_with};

/// Default number of samples on a freshly lifted loop.
pub const DEFAULT_SAMPLES: usize = 512;
/// Accepted bound on the quadrature error estimate.
pub const QUADRATURE_TOL: f64 = 1e-9;

const REFINE_TAIL: f64 = 1e-12;
const COARSEN_TAIL: f64 = 1e-14;
const MAX_SAMPLES: usize = 1 << 17;
/// Largest tolerated ratio of sample speeds before the loop is resampled.
const EQUALIZE_RATIO: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Standard,
    Reversed,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoopAnchor {
    Origin,
    /// Index into the saddles passed by the caller.
    Saddle(usize),
    InfinityCycle { at_px: bool, branch: usize },
    Continued(Box<LoopAnchor>),
}

impl LoopAnchor {
    pub fn continued(&self) -> Self {
        match self {
            LoopAnchor::Continued(_) => self.clone(),
            other => LoopAnchor::Continued(Box::new(other.clone())),
        }
    }
}

/// A closed loop on `H = h`, sampled at equispaced parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberLoop {
    pub h: Complex64,
    /// The last sample repeats the first.
    pub samples: Vec<(Complex64, Complex64)>,
    pub orientation: Orientation,
    pub anchor: LoopAnchor,
}

impl FiberLoop {
    pub(crate) fn from_periodic(
        h: Complex64,
        mut pts: Vec<(Complex64, Complex64)>,
        orientation: Orientation,
        anchor: LoopAnchor,
    ) -> Self {
        pts.push(pts[0]);
        Self { h, samples: pts, orientation, anchor }
    }

    /// Distinct samples, without the closing repeat.
    pub fn points(&self) -> &[(Complex64, Complex64)] {
        &self.samples[..self.samples.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn residual(&self, sys: &HomogeneousHamiltonianSystem) -> f64 {
        self.points().iter().map(|&(x, y)| (sys.eval(x, y) - self.h).norm()).fold(0.0, f64::max)
    }

    pub fn reversed(&self) -> Self {
        let mut pts: Vec<_> = self.points().to_vec();
        pts[1..].reverse();
        let orientation = match self.orientation {
            Orientation::Standard => Orientation::Reversed,
            Orientation::Reversed => Orientation::Standard,
        };
        Self::from_periodic(self.h, pts, orientation, self.anchor.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodSample {
    pub h: Complex64,
    pub t: Complex64,
    pub anchor: LoopAnchor,
    pub quadrature_error: f64,
}

/// Summed magnitude of the monomials of `H` at a point; sets the residual scale.
pub(crate) fn term_scale(sys: &HomogeneousHamiltonianSystem, x: Complex64, y: Complex64) -> f64 {
    let n1 = sys.n() as i32 + 1;
    let (ax, ay) = (x.norm(), y.norm());
    let mut s = ax * ay;
    for (j, c) in sys.a().iter().enumerate() {
        if c.norm() > 0.0 {
            s += c.norm() * ax.powi(n1 - j as i32) * ay.powi(j as i32);
        }
    }
    s
}

/// Minimal-norm Newton projection onto `H = h`.
pub(crate) fn project(
    sys: &HomogeneousHamiltonianSystem,
    mut x: Complex64,
    mut y: Complex64,
    h: Complex64,
    max_iter: usize,
) -> Option<(Complex64, Complex64)> {
    for _ in 0..max_iter {
        let j = sys.jet(x, y);
        let r = j.h - h;
        let tol = 1e-14 * (term_scale(sys, x, y) + h.norm());
        if r.norm() <= tol {
            return Some((x, y));
        }
        let g2 = j.hx.norm_sqr() + j.hy.norm_sqr();
        if g2 == 0.0 || !g2.is_finite() {
            return None;
        }
        x -= r * j.hx.conj() / g2;
        y -= r * j.hy.conj() / g2;
    }
    let r = (sys.eval(x, y) - h).norm();
    (r <= 1e-12 * (term_scale(sys, x, y) + h.norm())).then_some((x, y))
}

fn raw_period(sys: &HomogeneousHamiltonianSystem, pts: &[(Complex64, Complex64)]) -> Complex64 {
    let xs: Vec<Complex64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<Complex64> = pts.iter().map(|p| p.1).collect();
    let dx = spectral::derivative(&xs);
    let dy = spectral::derivative(&ys);
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, &(x, y)) in pts.iter().enumerate() {
        let j = sys.jet(x, y);
        // dt/dtheta, least squares over (x', y') = tau (H_y, -H_x)
        let g2 = j.hx.norm_sqr() + j.hy.norm_sqr();
        sum += (j.hy.conj() * dx[i] - j.hx.conj() * dy[i]) / g2;
    }
    sum * (2.0 * PI / pts.len() as f64)
}

fn estimate(sys: &HomogeneousHamiltonianSystem, pts: &[(Complex64, Complex64)]) -> (Complex64, f64) {
    let full = raw_period(sys, pts);
    let half: Vec<_> = pts.iter().step_by(2).copied().collect();
    let coarse = raw_period(sys, &half);
    (full, (full - coarse).norm())
}

/// Doubles the sample count by trigonometric interpolation followed by projection.
pub(crate) fn refine(sys: &HomogeneousHamiltonianSystem, lp: &FiberLoop) -> Result<FiberLoop> {
    let pts = lp.points();
    if pts.len() * 2 > MAX_SAMPLES {
        return Err(Error::QuadratureStall(f64::NAN));
    }
    let xs: Vec<Complex64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<Complex64> = pts.iter().map(|p| p.1).collect();
    let ux = spectral::upsample(&xs);
    let uy = spectral::upsample(&ys);
    let mut out = Vec::with_capacity(ux.len());
    for i in 0..ux.len() {
        if i % 2 == 0 {
            out.push(pts[i / 2]);
        } else {
            let p = project(sys, ux[i], uy[i], lp.h, 30)
                .ok_or_else(|| Error::NewtonDivergence("projection of an interpolated sample".into()))?;
            out.push(p);
        }
    }
    Ok(FiberLoop::from_periodic(lp.h, out, lp.orientation, lp.anchor.clone()))
}

fn tail(lp: &FiberLoop, frac: usize) -> f64 {
    let xs: Vec<Complex64> = lp.points().iter().map(|p| p.0).collect();
    let ys: Vec<Complex64> = lp.points().iter().map(|p| p.1).collect();
    spectral::tail_ratio(&xs, frac).max(spectral::tail_ratio(&ys, frac))
}

/// Resamples the loop at equal arclength when the sample spacing has drifted, then projects.
pub(crate) fn equalize(sys: &HomogeneousHamiltonianSystem, lp: &FiberLoop) -> Option<FiberLoop> {
    let pts = lp.points();
    let n = pts.len();
    let xs: Vec<Complex64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<Complex64> = pts.iter().map(|p| p.1).collect();
    let dx = spectral::derivative(&xs);
    let dy = spectral::derivative(&ys);
    let speed: Vec<f64> = (0..n).map(|i| (dx[i].norm_sqr() + dy[i].norm_sqr()).sqrt()).collect();
    let (lo, hi) = speed.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi <= EQUALIZE_RATIO * lo {
        return None;
    }
    // dev(theta) = S(theta) / mean - theta; equal arclength wants dev(theta') + theta' = theta_j
    let dev = spectral::cumulative_deviation(&speed);
    let dev_c: Vec<Complex64> = dev.iter().map(|&d| Complex64::new(d, 0.0)).collect();
    let (fx, fy, fd) = (spectral::Interpolant::new(&xs), spectral::Interpolant::new(&ys), spectral::Interpolant::new(&dev_c));
    let mean = speed.iter().sum::<f64>() / n as f64;
    let rel_speed = |t: f64| (fx.derivative_at(t).norm_sqr() + fy.derivative_at(t).norm_sqr()).sqrt() / mean;
    let mut out = Vec::with_capacity(n);
    let mut theta = -dev[0];
    for j in 0..n {
        let target = 2.0 * PI * j as f64 / n as f64;
        for _ in 0..30 {
            let g = theta + fd.eval(theta).re - target;
            theta -= g / rel_speed(theta).max(1e-3);
            if g.abs() < 1e-15 {
                break;
            }
        }
        out.push(project(sys, fx.eval(theta), fy.eval(theta), lp.h, 8)?);
        theta += 2.0 * PI / n as f64 / rel_speed(theta).max(0.1);
    }
    Some(FiberLoop::from_periodic(lp.h, out, lp.orientation, lp.anchor.clone()))
}

/// Low-passes the sample positions and projects them back onto the fiber. The loop stays in
/// its homotopy class since the displacement is far below the local scale.
pub(crate) fn relax(sys: &HomogeneousHamiltonianSystem, lp: &FiberLoop, frac: usize) -> Option<FiberLoop> {
    let xs: Vec<Complex64> = lp.points().iter().map(|p| p.0).collect();
    let ys: Vec<Complex64> = lp.points().iter().map(|p| p.1).collect();
    let (sx, sy) = (spectral::smooth(&xs, frac), spectral::smooth(&ys, frac));
    let mut out = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        out.push(project(sys, sx[i], sy[i], lp.h, 8)?);
    }
    Some(FiberLoop::from_periodic(lp.h, out, lp.orientation, lp.anchor.clone()))
}

/// Refines until the top quarter of the spectrum is negligible; coarsens down to `floor` samples.
pub(crate) fn adapt_resolution(sys: &HomogeneousHamiltonianSystem, mut lp: FiberLoop, floor: usize) -> Result<FiberLoop> {
    while tail(&lp, 4) > REFINE_TAIL {
        lp = refine(sys, &lp)?;
    }
    while lp.len() >= 2 * floor && lp.len().is_multiple_of(2) && tail(&lp, 8) < COARSEN_TAIL {
        let pts: Vec<_> = lp.points().iter().step_by(2).copied().collect();
        lp = FiberLoop::from_periodic(lp.h, pts, lp.orientation, lp.anchor.clone());
    }
    Ok(lp)
}

/// `oint dx / H_y` by the trapezoid rule; the error estimate compares against every other sample.
pub fn period(sys: &HomogeneousHamiltonianSystem, lp: &FiberLoop) -> Result<PeriodSample> {
    let mut cur = lp.clone();
    let mut err = f64::INFINITY;
    for attempt in 0..3 {
        let (t, e) = estimate(sys, cur.points());
        err = e;
        if e.is_finite() && e < QUADRATURE_TOL {
            return Ok(PeriodSample { h: lp.h, t, anchor: lp.anchor.clone(), quadrature_error: e });
        }
        if attempt < 2 {
            cur = match refine(sys, &cur) {
                Ok(c) => c,
                Err(_) => break,
            };
        }
    }
    Err(Error::QuadratureStall(err))
}

/// Reverses the loop when its period has negative imaginary part.
pub(crate) fn orient_upward(sys: &HomogeneousHamiltonianSystem, lp: FiberLoop) -> Result<FiberLoop> {
    let t = period(sys, &lp)?.t;
    Ok(if t.im < 0.0 { lp.reversed() } else { lp })
}
