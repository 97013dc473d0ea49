use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub enum PathPiece {
    Line { from: Complex64, to: Complex64 },
    /// `center + radius e^{i (start + s sweep)}`, `s` in `[0, 1]`.
    Arc { center: Complex64, radius: f64, start: f64, sweep: f64 },
}

impl PathPiece {
    pub fn at(&self, s: f64) -> Complex64 {
        match *self {
            PathPiece::Line { from, to } => from + (to - from) * s,
            PathPiece::Arc { center, radius, start, sweep } => center + Complex64::from_polar(radius, start + s * sweep),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathPiece::Line { from, to } => (to - from).norm(),
            PathPiece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }
}

/// A piecewise path in the h-plane.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HPath {
    pub pieces: Vec<PathPiece>,
    /// Atypical values encircled, with winding numbers.
    pub encircles: Vec<(Complex64, i32)>,
}

impl HPath {
    pub fn start(&self) -> Option<Complex64> {
        self.pieces.first().map(|p| p.at(0.0))
    }

    pub fn end(&self) -> Option<Complex64> {
        self.pieces.last().map(|p| p.at(1.0))
    }

    pub fn line(from: Complex64, to: Complex64) -> Self {
        Self { pieces: vec![PathPiece::Line { from, to }], encircles: Vec::new() }
    }

    /// Counterclockwise circle about `center` through `start`.
    pub fn circle(center: Complex64, start: Complex64) -> Self {
        let d = start - center;
        Self {
            pieces: vec![PathPiece::Arc { center, radius: d.norm(), start: d.arg(), sweep: 2.0 * PI }],
            encircles: vec![(center, 1)],
        }
    }

    /// Straight segment that replaces each stretch passing within `clearance` of an
    /// avoided value by the short arc around it, staying in the same homotopy class.
    pub fn line_avoiding(from: Complex64, to: Complex64, avoid: &[Complex64], clearance: f64) -> Self {
        let d = to - from;
        let len = d.norm();
        if len == 0.0 {
            return Self::default();
        }
        let dir = d / len;
        let mut hits: Vec<(f64, Complex64, f64)> = Vec::new();
        for &c in avoid {
            let w = (c - from) * dir.conj();
            let (t0, off) = (w.re, w.im.abs());
            if off >= clearance {
                continue;
            }
            let half = (clearance * clearance - off * off).sqrt();
            if t0 - half <= 0.0 || t0 + half >= len {
                continue;
            }
            hits.push((t0, c, half));
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut pieces = Vec::new();
        let mut cur = from;
        for (t0, c, half) in hits {
            let entry = from + dir * (t0 - half);
            let exit = from + dir * (t0 + half);
            if (entry - cur).norm() > 0.0 {
                pieces.push(PathPiece::Line { from: cur, to: entry });
            }
            let a0 = (entry - c).arg();
            let a1 = (exit - c).arg();
            let mut sweep = a1 - a0;
            while sweep > PI {
                sweep -= 2.0 * PI;
            }
            while sweep <= -PI {
                sweep += 2.0 * PI;
            }
            pieces.push(PathPiece::Arc { center: c, radius: clearance, start: a0, sweep });
            cur = exit;
        }
        pieces.push(PathPiece::Line { from: cur, to });
        Self { pieces, encircles: Vec::new() }
    }

    /// Out from `base` towards `target`, once counterclockwise around it at `radius`, and back.
    pub fn lasso(base: Complex64, target: Complex64, radius: f64, avoid: &[Complex64], clearance: f64) -> Self {
        let d = base - target;
        let touch = target + d / d.norm() * radius;
        let others: Vec<Complex64> = avoid.iter().copied().filter(|&c| c != target).collect();
        let mut p = Self::line_avoiding(base, touch, &others, clearance);
        let back = Self::line_avoiding(touch, base, &others, clearance);
        p.pieces.extend(Self::circle(target, touch).pieces);
        p.pieces.extend(back.pieces);
        p.encircles = vec![(target, 1)];
        p
    }

    pub fn then(mut self, other: HPath) -> Self {
        self.pieces.extend(other.pieces);
        for (c, w) in other.encircles {
            match self.encircles.iter_mut().find(|e| e.0 == c) {
                Some(e) => e.1 += w,
                None => self.encircles.push((c, w)),
            }
        }
        self
    }

    /// Polyline through the piece endpoints and `per_arc` points on each arc.
    pub fn waypoints(&self, per_arc: usize) -> Vec<Complex64> {
        let mut out = Vec::new();
        for p in &self.pieces {
            match p {
                PathPiece::Line { from, .. } => out.push(*from),
                PathPiece::Arc { .. } => out.extend((0..per_arc.max(1)).map(|i| p.at(i as f64 / per_arc.max(1) as f64))),
            }
        }
        if let Some(e) = self.end() {
            out.push(e);
        }
        out
    }

    /// Smallest distance from the path to any of `pts`.
    pub fn clearance_from(&self, pts: &[Complex64]) -> f64 {
        let poly = self.waypoints(256);
        let mut best = f64::INFINITY;
        for w in poly.windows(2) {
            let (a, b) = (w[0], w[1]);
            let ab = b - a;
            for &c in pts {
                let t = if ab.norm_sqr() == 0.0 { 0.0 } else { (((c - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0) };
                best = best.min((a + ab * t - c).norm());
            }
        }
        best
    }
}
