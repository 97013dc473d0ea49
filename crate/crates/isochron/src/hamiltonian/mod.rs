//! The family `H = xy + sum_j a_j x^{n+1-j} y^j`: construction, evaluation and
//! the isochronicity classifier.

mod critical;

pub use critical::{
    atypical_values, finite_critical_points, l0_extra_critical_points, polish_critical_point, CriticalPoint,
    CriticalPoints,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{BivarPoly, GaussianRational, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousHamiltonianSystem {
    n: usize,
    a: Vec<Complex64>,
    exact: Option<Vec<GaussianRational>>,
}

/// Value and derivatives of H up to second order at one point.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub h: Complex64,
    pub hx: Complex64,
    pub hy: Complex64,
    pub hxx: Complex64,
    pub hxy: Complex64,
    pub hyy: Complex64,
}

impl Jet {
    pub fn grad_norm(&self) -> f64 {
        (self.hx.norm_sqr() + self.hy.norm_sqr()).sqrt()
    }

    pub fn hess_norm(&self) -> f64 {
        (self.hxx.norm_sqr() + 2.0 * self.hxy.norm_sqr() + self.hyy.norm_sqr()).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    IsochronousConditionI,
    IsochronousConditionII,
    IsochronousBoth,
    NotIsochronous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Witness {
    Pair(usize, usize),
    Resonant(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsochronicityVerdict {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl IsochronicityVerdict {
    pub fn is_isochronous(&self) -> bool {
        self.verdict != Verdict::NotIsochronous
    }
}

impl HomogeneousHamiltonianSystem {
    pub fn new(n: usize, a: Vec<Complex64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("degree n = {n}, need n >= 2")));
        }
        if a.len() != n + 2 {
            return Err(Error::LengthMismatch { expected: n + 2, got: a.len() });
        }
        if a.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { n, a, exact: None })
    }

    pub fn from_exact(n: usize, a: Vec<GaussianRational>) -> Result<Self> {
        let mut s = Self::new(n, a.iter().map(Ring::to_complex).collect())?;
        s.exact = Some(a);
        Ok(s)
    }

    /// Convenience constructor from real coefficients.
    pub fn real(n: usize, a: &[f64]) -> Result<Self> {
        Self::new(n, a.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact coefficients; floating inputs convert without rounding.
    pub fn exact_coeffs(&self) -> Vec<GaussianRational> {
        match &self.exact {
            Some(e) => e.clone(),
            None => self
                .a
                .iter()
                .map(|&z| GaussianRational::from_complex(z).expect("finite coefficients"))
                .collect(),
        }
    }

    pub fn coeff_is_zero(&self, j: usize) -> bool {
        match &self.exact {
            Some(e) => e[j].is_zero(),
            None => self.a[j] == Complex64::new(0.0, 0.0),
        }
    }

    fn nonzero(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.n + 1).filter(|&j| !self.coeff_is_zero(j))
    }

    pub fn is_linear(&self) -> bool {
        self.nonzero().next().is_none()
    }

    pub fn build_h(&self) -> BivarPoly<Complex64> {
        self.layout(&self.a)
    }

    pub fn build_h_exact(&self) -> BivarPoly<GaussianRational> {
        self.layout(&self.exact_coeffs())
    }

    fn layout<R: Ring>(&self, a: &[R]) -> BivarPoly<R> {
        let n1 = self.n as u32 + 1;
        let mut terms = vec![((1, 1), R::one())];
        terms.extend(a.iter().enumerate().map(|(j, c)| ((n1 - j as u32, j as u32), c.clone())));
        BivarPoly::from_terms(terms)
    }

    pub fn top_form(&self) -> BivarPoly<Complex64> {
        self.build_h().homogeneous_part(self.n as u32 + 1)
    }

    pub fn jet(&self, x: Complex64, y: Complex64) -> Jet {
        let n1 = self.n + 1;
        let mut px = vec![Complex64::new(1.0, 0.0); n1 + 1];
        let mut py = vec![Complex64::new(1.0, 0.0); n1 + 1];
        for k in 1..=n1 {
            px[k] = px[k - 1] * x;
            py[k] = py[k - 1] * y;
        }
        let one = Complex64::new(1.0, 0.0);
        let mut j = Jet { h: x * y, hx: y, hy: x, hxx: 0.0 * one, hxy: one, hyy: 0.0 * one };
        for (jj, &c) in self.a.iter().enumerate() {
            if c == 0.0 * one {
                continue;
            }
            let i = n1 - jj;
            let (fi, fj) = (i as f64, jj as f64);
            j.h += c * px[i] * py[jj];
            if i >= 1 {
                j.hx += c * fi * px[i - 1] * py[jj];
            }
            if jj >= 1 {
                j.hy += c * fj * px[i] * py[jj - 1];
            }
            if i >= 2 {
                j.hxx += c * fi * (fi - 1.0) * px[i - 2] * py[jj];
            }
            if i >= 1 && jj >= 1 {
                j.hxy += c * fi * fj * px[i - 1] * py[jj - 1];
            }
            if jj >= 2 {
                j.hyy += c * fj * (fj - 1.0) * px[i] * py[jj - 2];
            }
        }
        j
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.jet(x, y).h
    }

    /// `(dx/dt, dy/dt) = (H_y, -H_x)`.
    pub fn vector_field(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        let j = self.jet(x, y);
        (j.hy, -j.hx)
    }

    pub fn classify(&self) -> IsochronicityVerdict {
        let n1 = self.n + 1;
        let low: Vec<usize> = self.nonzero().filter(|&j| 2 * j <= n1).collect();
        let high: Vec<usize> = self.nonzero().filter(|&j| 2 * j >= n1).collect();
        let verdict = match (low.is_empty(), high.is_empty()) {
            (true, true) => Verdict::IsochronousBoth,
            (true, false) => Verdict::IsochronousConditionI,
            (false, true) => Verdict::IsochronousConditionII,
            (false, false) => Verdict::NotIsochronous,
        };
        let witness = (verdict == Verdict::NotIsochronous).then(|| {
            if self.resonance_obstruction() {
                Witness::Resonant(n1 / 2)
            } else {
                Witness::Pair(low[0], *high.last().unwrap())
            }
        });
        IsochronicityVerdict { verdict, witness }
    }

    pub fn resonance_obstruction(&self) -> bool {
        self.n % 2 == 1 && !self.coeff_is_zero(self.n.div_ceil(2))
    }

    pub fn non_isolated_locus(&self) -> bool {
        let big_n = self.n.div_ceil(2);
        self.n % 2 == 1 && self.nonzero().eq(std::iter::once(big_n))
    }

    /// Resonance integers `n + 1 - 2j` of the nonzero monomials (eigenvalues 1, -1).
    pub fn resonance_integers(&self) -> Vec<i64> {
        let n = self.n as i64;
        let mut s = Vec::new();
        for j in self.nonzero() {
            let j = j as i64;
            if j < n + 1 {
                s.push((n + 1 - j) - (j - 1) - 1);
            }
            if j > 0 {
                s.push((n - j) - j + 1);
            }
        }
        s
    }

    pub fn admissible_nonlinearities(&self) -> bool {
        let s = self.resonance_integers();
        s.iter().all(|&v| v > 0) || s.iter().all(|&v| v < 0)
    }
}
