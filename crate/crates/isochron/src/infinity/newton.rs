//! Newton polygons and Puiseux branches at the origin of a plane curve `F(X, Y) = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::poly::{univariate_roots, BivarPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: (i64, i64),
    pub end: (i64, i64),
    /// `dl/dk` as a reduced fraction `(num, den)` with `den > 0`.
    pub slope: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    pub fn vertices(&self) -> Vec<(i64, i64)> {
        let mut v: Vec<(i64, i64)> = self.segments.iter().map(|s| s.start).collect();
        if let Some(last) = self.segments.last() {
            v.push(last.end);
        }
        v
    }
}

/// Which chart of the projective closure a branch lives in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartTag {
    AtPx,
    AtPy,
    /// Point `[1 : t : 0]`, chart coordinates from `(x, t x - y)`.
    Rotated(Complex64),
    /// A bare polynomial with no projective meaning.
    Affine,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxBranch {
    /// `X = s^p`.
    pub x_exponent: u32,
    /// `Y = s^q (d_0 + d_1 s + ...)`.
    pub y_valuation: u32,
    pub y_leading: Complex64,
    /// `d_0 .. d_K`.
    pub y_series: Vec<Complex64>,
    pub segment: Segment,
    pub chart: ChartTag,
}

fn carrier(f: &BivarPoly<Complex64>) -> Vec<(i64, i64)> {
    f.terms().map(|(&(k, l), _)| (k as i64, l as i64)).collect()
}

/// Lower-left convex boundary of the carrier, axes excluded.
pub fn newton_polygon(f: &BivarPoly<Complex64>) -> Result<NewtonPolygon> {
    let pts = carrier(f);
    if pts.is_empty() {
        return Err(Error::EmptyCarrier);
    }
    if pts.contains(&(0, 0)) {
        return Err(Error::InvalidInput("F(0,0) != 0".into()));
    }
    let start = *pts.iter().min_by_key(|p| (p.0, p.1)).unwrap();
    let end = *pts.iter().min_by_key(|p| (p.1, p.0)).unwrap();
    let mut segments = Vec::new();
    let mut cur = start;
    while cur != end {
        // most negative slope, ties to the farthest point
        let next = pts
            .iter()
            .filter(|p| p.0 > cur.0 && p.1 < cur.1)
            .min_by(|a, b| {
                let sa = (a.1 - cur.1) * (b.0 - cur.0);
                let sb = (b.1 - cur.1) * (a.0 - cur.0);
                sa.cmp(&sb).then(b.0.cmp(&a.0))
            })
            .copied()
            .expect("end point is always a candidate");
        let (dl, dk) = (next.1 - cur.1, next.0 - cur.0);
        let g = dl.gcd(&dk);
        segments.push(Segment { start: cur, end: next, slope: (dl / g, dk / g) });
        cur = next;
    }
    Ok(NewtonPolygon { segments })
}

fn segment_terms(f: &BivarPoly<Complex64>, seg: &Segment, p: i64, q: i64) -> Vec<(i64, i64, Complex64)> {
    let c = p * seg.start.0 + q * seg.start.1;
    f.terms()
        .map(|(&(k, l), &b)| (k as i64, l as i64, b))
        .filter(|&(k, l, _)| p * k + q * l == c)
        .collect()
}

/// `[s^0..s^K]` of `G(s, W(s)) = s^{-c} F(s^p, s^q (d0 + W(s)))`.
fn g_series(f: &BivarPoly<Complex64>, p: i64, q: i64, c: i64, rho: &[Complex64], kmax: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; kmax + 1];
    let maxl = f.terms().map(|(e, _)| e.1).max().unwrap_or(0) as usize;
    let mut powers: Vec<Vec<Complex64>> = vec![{
        let mut v = vec![zero; kmax + 1];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }];
    for l in 1..=maxl {
        let prev = &powers[l - 1];
        let mut v = vec![zero; kmax + 1];
        for (i, a) in prev.iter().enumerate() {
            if *a == zero {
                continue;
            }
            for (j, b) in rho.iter().take(kmax + 1 - i).enumerate() {
                v[i + j] += a * b;
            }
        }
        powers.push(v);
    }
    for (&(k, l), &b) in f.terms() {
        let shift = p * k as i64 + q * l as i64 - c;
        if shift < 0 || shift as usize > kmax {
            continue;
        }
        for (j, a) in powers[l as usize].iter().enumerate() {
            let idx = shift as usize + j;
            if idx <= kmax {
                out[idx] += b * a;
            }
        }
    }
    out
}

/// One branch per orbit of nonzero roots of each segment's characteristic polynomial.
pub fn puiseux_branches(f: &BivarPoly<Complex64>, k: usize, chart: ChartTag) -> Result<Vec<PuiseuxBranch>> {
    let poly = newton_polygon(f)?;
    let scale = f.max_abs_coeff();
    let mut out = Vec::new();
    for seg in &poly.segments {
        let dk = seg.end.0 - seg.start.0;
        let dl = seg.start.1 - seg.end.1;
        let g = dk.gcd(&dl);
        let (p, q) = (dl / g, dk / g);
        let c = p * seg.start.0 + q * seg.start.1;
        let terms = segment_terms(f, seg, p, q);
        let l2 = seg.end.1;
        let mut psi = vec![Complex64::new(0.0, 0.0); (dl + 1) as usize];
        for &(_, l, b) in &terms {
            psi[(l - l2) as usize] += b;
        }
        if psi[dl as usize].norm() == 0.0 || psi[0].norm() == 0.0 {
            return Err(Error::CharacteristicDegenerate(seg.start, seg.end));
        }
        let roots = univariate_roots(&psi)?;
        if roots.iter().any(|r| r.1 > 1) {
            return Err(Error::CharacteristicDegenerate(seg.start, seg.end));
        }
        let mut used = vec![false; roots.len()];
        for i in 0..roots.len() {
            if used[i] {
                continue;
            }
            let d0 = roots[i].0;
            for m in 0..p {
                let target = d0 * Complex64::from_polar(1.0, 2.0 * PI * m as f64 / p as f64);
                if let Some(j) = (0..roots.len()).find(|&j| !used[j] && (roots[j].0 - target).norm() < 1e-6 * d0.norm()) {
                    used[j] = true;
                }
            }
            let gw: Complex64 = terms.iter().map(|&(_, l, b)| b * l as f64 * d0.powi(l as i32 - 1)).sum();
            let mut rho = vec![Complex64::new(0.0, 0.0); k + 1];
            rho[0] = d0;
            for i in 1..=k {
                let gs = g_series(f, p, q, c, &rho, i);
                rho[i] = -gs[i] / gw;
            }
            let res = g_series(f, p, q, c, &rho, k);
            let worst = res.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let tol = 1e-8 * scale.max(1.0) * (1.0 + rho.iter().map(|z| z.norm()).fold(0.0, f64::max)).powi(f.degree().unwrap_or(1) as i32);
            if !worst.is_finite() || worst > tol {
                return Err(Error::BranchFailure(format!("residual {worst:e} on segment {:?}-{:?}", seg.start, seg.end)));
            }
            out.push(PuiseuxBranch {
                x_exponent: p as u32,
                y_valuation: q as u32,
                y_leading: d0,
                y_series: rho,
                segment: seg.clone(),
                chart,
            });
        }
    }
    Ok(out)
}

/// `s`-order of `F(s^p, s^q rho(s))` minus the segment value; exceeds `K` for a valid branch.
pub fn branch_residual_order(f: &BivarPoly<Complex64>, b: &PuiseuxBranch, tol: f64) -> usize {
    let (p, q) = (b.x_exponent as i64, b.y_valuation as i64);
    let c = p * b.segment.start.0 + q * b.segment.start.1;
    let k = b.y_series.len() - 1;
    let gs = g_series(f, p, q, c, &b.y_series, k);
    gs.iter().position(|z| z.norm() > tol).unwrap_or(k + 1)
}
