use num_complex::Complex64;

use super::{adapt_resolution, equalize, project, relax, FiberLoop, HPath, PathPiece};
use crate::error::{Error, Result};
use crate::hamiltonian::atypical_values;
use crate::HomogeneousHamiltonianSystem;

/// `|dh|` relative to the distance from the nearest atypical value.
const STEP_FRACTION: f64 = 0.02;
/// Largest sample displacement per step, in units of the local scale `|grad H| / |Hess H|`.
const MAX_DISPLACEMENT: f64 = 0.3;
/// Positions are low-passed above about `n / (2 RELAX_FRAC)` after each resampling.
const RELAX_FRAC: usize = 4;
/// Coarsening stops here; the spectral tail test decides how far above it a loop sits.
const MIN_SAMPLES: usize = 64;

fn nearest(h: Complex64, atypical: &[Complex64]) -> f64 {
    atypical.iter().map(|a| (a - h).norm()).fold(f64::INFINITY, f64::min)
}

/// Moves every sample from its level to `H = h1` along the horizontal lift
/// `dp = conj(grad H) dh / |grad H|^2`, then projects back onto the fiber.
fn step(sys: &HomogeneousHamiltonianSystem, pts: &[(Complex64, Complex64)], h1: Complex64) -> Option<Vec<(Complex64, Complex64)>> {
    let mut out = Vec::with_capacity(pts.len());
    for &(x, y) in pts {
        let j = sys.jet(x, y);
        let g2 = j.hx.norm_sqr() + j.hy.norm_sqr();
        if g2 == 0.0 {
            return None;
        }
        let dh = h1 - j.h;
        let scale = g2.sqrt() / j.hess_norm().max(1e-300);
        let (dx, dy) = (j.hx.conj() * dh / g2, j.hy.conj() * dh / g2);
        if (dx.norm_sqr() + dy.norm_sqr()).sqrt() > MAX_DISPLACEMENT * scale {
            return None;
        }
        let (nx, ny) = project(sys, x + dx, y + dy, h1, 8)?;
        if ((nx - x).norm_sqr() + (ny - y).norm_sqr()).sqrt() > 1.5 * MAX_DISPLACEMENT * scale {
            return None;
        }
        out.push((nx, ny));
    }
    Some(out)
}

fn along_piece(
    sys: &HomogeneousHamiltonianSystem,
    mut lp: FiberLoop,
    piece: &PathPiece,
    atypical: &[Complex64],
    floor: usize,
) -> Result<FiberLoop> {
    let len = piece.length();
    if len == 0.0 {
        return Ok(lp);
    }
    let mut s: f64 = 0.0;
    let mut ds: f64 = 1.0;
    while s < 1.0 {
        let h0 = piece.at(s);
        let d = nearest(h0, atypical);
        if d == 0.0 {
            return Err(Error::RamificationCollision(format!("path meets an atypical value at {h0}")));
        }
        ds = ds.min(STEP_FRACTION * d / len).min(1.0 - s);
        let s1 = if 1.0 - s - ds < 1e-12 { 1.0 } else { s + ds };
        let h1 = piece.at(s1);
        match step(sys, lp.points(), h1) {
            Some(pts) => {
                lp = FiberLoop::from_periodic(h1, pts, lp.orientation, lp.anchor.clone());
                // a loop that needs resampling is also twisting; relaxing keeps it taut,
                // without it the sample count runs away
                if let Some(eq) = equalize(sys, &lp) {
                    lp = relax(sys, &eq, RELAX_FRAC).unwrap_or(eq);
                }
                lp = adapt_resolution(sys, lp, floor)?;
                s = s1;
                ds *= 2.0;
            }
            None => {
                ds *= 0.5;
                if ds * len < 1e-10 * d {
                    return Err(Error::RamificationCollision(format!("step collapsed near h = {h0}")));
                }
            }
        }
    }
    Ok(lp)
}

/// Carries a loop along `path`, keeping every sample on the moving fiber.
pub fn continue_loop_with(
    sys: &HomogeneousHamiltonianSystem,
    lp: &FiberLoop,
    path: &HPath,
    atypical: &[Complex64],
) -> Result<FiberLoop> {
    let Some(start) = path.start() else {
        return Ok(lp.clone());
    };
    if (start - lp.h).norm() > 1e-12 * (1.0 + lp.h.norm()) {
        return Err(Error::InvalidInput(format!("path starts at {start}, loop lives over {}", lp.h)));
    }
    let floor = lp.len().min(MIN_SAMPLES);
    let mut cur = FiberLoop { h: start, anchor: lp.anchor.continued(), ..lp.clone() };
    for piece in &path.pieces {
        cur = along_piece(sys, cur, piece, atypical, floor)?;
    }
    Ok(cur)
}

pub fn continue_loop(sys: &HomogeneousHamiltonianSystem, lp: &FiberLoop, path: &HPath) -> Result<FiberLoop> {
    let atypical = atypical_values(sys)?;
    continue_loop_with(sys, lp, path, &atypical)
}
