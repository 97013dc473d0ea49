use std::collections::BTreeMap;

use num_complex::Complex64;

use super::ring::Ring;
use super::univar::UniPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Sparse polynomial in x, y. Keys are exponent pairs `(i, j)` of `x^i y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivarPoly<R> {
    terms: BTreeMap<(u32, u32), R>,
}

impl<R: Ring> Default for BivarPoly<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Ring> BivarPoly<R> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), R)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: (u32, u32), c: R) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&e) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &R)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> R {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms
            .keys()
            .map(|&(i, j)| if v == Var::X { i } else { j })
            .max()
    }

    pub fn homogeneous_part(&self, k: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&(i, j), _)| i + j == k)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn partial(&self, v: Var) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(&(i, j), c)| {
            let (k, e) = match v {
                Var::X => (i, (i.checked_sub(1)?, j)),
                Var::Y => (j, (i, j.checked_sub(1)?)),
            };
            Some((e, c.mul(&R::from_i64(k as i64))))
        }))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, c.neg());
        }
        p
    }

    pub fn scale(&self, s: &R) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c.mul(s))))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                p.add_term((i + k, j + l), a.mul(b));
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::from_terms([((0, 0), R::one())]);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coefficient of `y^j` as a polynomial in x.
    pub fn y_coeff(&self, j: u32) -> UniPoly<R> {
        let deg = self
            .terms
            .keys()
            .filter(|e| e.1 == j)
            .map(|e| e.0)
            .max();
        let Some(deg) = deg else {
            return UniPoly::zero();
        };
        let mut v = vec![R::zero(); deg as usize + 1];
        for (&(i, jj), c) in &self.terms {
            if jj == j {
                v[i as usize] = c.clone();
            }
        }
        UniPoly::new(v)
    }

    /// Horner evaluation in y with Horner-evaluated x-coefficients.
    pub fn eval(&self, x: &R, y: &R) -> R {
        let Some(dy) = self.degree_in(Var::Y) else {
            return R::zero();
        };
        let mut acc = R::zero();
        for j in (0..=dy).rev() {
            acc = acc.mul(y).add(&self.y_coeff(j).eval(x));
        }
        acc
    }

    pub fn to_complex(&self) -> BivarPoly<Complex64> {
        BivarPoly::from_terms(self.terms.iter().map(|(e, c)| (*e, c.to_complex())))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> BivarPoly<S> {
        BivarPoly::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    /// Substitutes `x -> x`, `y -> t x - y`.
    pub fn shear(&self, t: &R) -> Self {
        let lin = Self::from_terms([((1, 0), t.clone()), ((0, 1), R::one().neg())]);
        let mut out = Self::zero();
        let dy = self.degree_in(Var::Y).unwrap_or(0);
        let mut powers = vec![Self::from_terms([((0, 0), R::one())])];
        for k in 1..=dy as usize {
            powers.push(powers[k - 1].mul(&lin));
        }
        for (&(i, j), c) in &self.terms {
            let xi = Self::from_terms([((i, 0), c.clone())]);
            out = out.add(&xi.mul(&powers[j as usize]));
        }
        out
    }

    /// Exchanges the roles of x and y.
    pub fn swap(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())))
    }
}

impl BivarPoly<Complex64> {
    pub fn eval_c(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c * x.powu(i) * y.powu(j))
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Polynomial in x, y whose coefficients are polynomials in the parameter h.
#[derive(Clone, Debug, PartialEq)]
pub struct BivarPolyH<R> {
    terms: BTreeMap<(u32, u32), UniPoly<R>>,
}

impl<R: Ring> BivarPolyH<R> {
    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), UniPoly<R>)>) -> Self {
        let mut m: BTreeMap<(u32, u32), UniPoly<R>> = BTreeMap::new();
        for (e, c) in terms {
            let v = match m.remove(&e) {
                Some(old) => old.add(&c),
                None => c,
            };
            if !v.is_zero() {
                m.insert(e, v);
            }
        }
        Self { terms: m }
    }

    /// `p` with no h-dependence.
    pub fn constant(p: &BivarPoly<R>) -> Self {
        Self::from_terms(p.terms().map(|(e, c)| (*e, UniPoly::constant(c.clone()))))
    }

    /// `p - h`.
    pub fn minus_h(p: &BivarPoly<R>) -> Self {
        let mut t: Vec<_> = p.terms().map(|(e, c)| (*e, UniPoly::constant(c.clone()))).collect();
        t.push(((0, 0), UniPoly::monomial(R::one().neg(), 1)));
        Self::from_terms(t)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &UniPoly<R>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_in_y(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.1).max()
    }

    pub fn degree_in_x(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.0).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.0 + e.1).max()
    }

    pub fn degree_in_h(&self) -> usize {
        self.terms.values().filter_map(UniPoly::degree).max().unwrap_or(0)
    }

    pub fn partial_y(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e.1 > 0).map(|(&(i, j), c)| {
            ((i, j - 1), c.scale(&R::from_i64(j as i64)))
        }))
    }

    pub fn eval_h(&self, h: &R) -> BivarPoly<R> {
        BivarPoly::from_terms(self.terms.iter().map(|(e, c)| (*e, c.eval(h))))
    }

    /// Leading y-coefficient as a polynomial in x and h.
    pub fn leading_y(&self) -> Self {
        let d = self.degree_in_y().unwrap_or(0);
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| e.1 == d)
                .map(|(&(i, _), c)| ((i, 0), c.clone())),
        )
    }

    pub fn to_complex(&self) -> BivarPolyH<Complex64> {
        BivarPolyH::from_terms(self.terms.iter().map(|(e, c)| (*e, c.to_complex())))
    }
}
