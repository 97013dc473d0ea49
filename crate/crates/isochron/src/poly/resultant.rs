use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;

use super::bivar::{BivarPoly, BivarPolyH};
use super::ring::{GaussInt, GaussianRational, Ring};
use super::univar::UniPoly;
use crate::error::{Error, Result};

/// Relative threshold below which a floating coefficient counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-10;

/// Polynomial in x whose coefficients are dense polynomials in h.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPolyOverH<R> {
    coeffs: Vec<UniPoly<R>>,
}

impl<R: Ring> UniPolyOverH<R> {
    pub fn new(mut coeffs: Vec<UniPoly<R>>) -> Self {
        while coeffs.last().is_some_and(UniPoly::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Entry `k` is the coefficient of `x^k`.
    pub fn coeffs(&self) -> &[UniPoly<R>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn at_h(&self, h: &R) -> UniPoly<R> {
        UniPoly::new(self.coeffs.iter().map(|c| c.eval(h)).collect())
    }

    pub fn eval(&self, h: &R, x: &R) -> R {
        self.at_h(h).eval(x)
    }

    pub fn to_complex(&self) -> UniPolyOverH<Complex64> {
        UniPolyOverH::new(self.coeffs.iter().map(UniPoly::to_complex).collect())
    }
}

impl UniPolyOverH<Complex64> {
    pub fn eval_c(&self, h: Complex64, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.eval(&h);
        }
        acc
    }

    /// x-coefficients at `h`, trailing entries below the relative threshold removed.
    pub fn at_h_trimmed(&self, h: Complex64) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self.coeffs.iter().map(|c| c.eval(&h)).collect();
        let m = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while v.last().is_some_and(|c| c.norm() < ZERO_THRESHOLD * m) {
            v.pop();
        }
        v
    }
}

/// Generic x-degree minus the x-degree at `h0`, exact.
pub fn degree_drop_at(d: &UniPolyOverH<GaussianRational>, h0: &GaussianRational) -> usize {
    let generic = d.x_degree().unwrap_or(0);
    let at = d.at_h(h0).degree().unwrap_or(0);
    generic - at
}

/// Floating variant; leading coefficients below the relative threshold count as zero.
pub fn degree_drop_at_float(d: &UniPolyOverH<Complex64>, h0: Complex64) -> usize {
    let scale = d
        .coeffs
        .iter()
        .flat_map(|c| c.coeffs().iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    let generic = d
        .coeffs
        .iter()
        .rposition(|c| c.coeffs().iter().any(|z| z.norm() >= ZERO_THRESHOLD * scale))
        .unwrap_or(0);
    let at = d.at_h_trimmed(h0).len().saturating_sub(1);
    generic.saturating_sub(at)
}

fn y_coeffs<R: Ring>(p: &BivarPoly<R>, d: u32) -> Vec<UniPoly<R>> {
    (0..=d).map(|j| p.y_coeff(j)).collect()
}

/// Sylvester matrix of two polynomials given by y-coefficient lists (low to high).
fn sylvester<T: Clone>(pc: &[T], qc: &[T], zero: T) -> Vec<Vec<T>> {
    let dp = pc.len() - 1;
    let dq = qc.len() - 1;
    let n = dp + dq;
    let mut m = vec![vec![zero; n]; n];
    for r in 0..dq {
        for k in 0..=dp {
            m[r][r + k] = pc[dp - k].clone();
        }
    }
    for r in 0..dp {
        for k in 0..=dq {
            m[dq + r][r + k] = qc[dq - k].clone();
        }
    }
    m
}

/// Fraction-free determinant over an integral domain of polynomials.
fn bareiss<R: Ring>(mut m: Vec<Vec<UniPoly<R>>>) -> UniPoly<R> {
    let n = m.len();
    if n == 0 {
        return UniPoly::constant(R::one());
    }
    let mut prev = UniPoly::constant(R::one());
    let mut negate = false;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return UniPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

/// Determinant with partial pivoting.
pub fn det_float(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&a, &b| m[a][k].norm().total_cmp(&m[b][k].norm()))
            .unwrap();
        if m[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let piv = m[k][k];
        det *= piv;
        for i in k + 1..n {
            let f = m[i][k] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let t = m[k][j];
                m[i][j] -= f * t;
            }
        }
    }
    det
}

fn denominators_lcm(p: &BivarPoly<GaussianRational>) -> BigInt {
    p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(&c.denominator_lcm()))
}

/// Exact `Res_y(p, q)` of two constant-in-h polynomials over Q(i).
fn resultant_node(
    p: &BivarPoly<GaussianRational>,
    q: &BivarPoly<GaussianRational>,
    dp: u32,
    dq: u32,
) -> UniPoly<GaussianRational> {
    let lp = denominators_lcm(p);
    let lq = denominators_lcm(q);
    let to_int = |u: UniPoly<GaussianRational>, l: &BigInt| u.map(|c| c.scaled_to_int(l));
    let pc: Vec<_> = y_coeffs(p, dp).into_iter().map(|u| to_int(u, &lp)).collect();
    let qc: Vec<_> = y_coeffs(q, dq).into_iter().map(|u| to_int(u, &lq)).collect();
    let det = bareiss(sylvester(&pc, &qc, UniPoly::<GaussInt>::zero()));
    let scale = lp.pow(dq) * lq.pow(dp);
    let s = GaussianRational::from_gauss_int(&GaussInt::new(scale, 0.into()));
    det.map(|c| GaussianRational::from_gauss_int(c).exact_div(&s))
}

/// Coefficients in monomial basis of the polynomial through `(nodes[k], vals[k])`.
fn interpolate(nodes: &[GaussianRational], vals: &[GaussianRational]) -> UniPoly<GaussianRational> {
    let n = nodes.len();
    let mut dd = vals.to_vec();
    for lvl in 1..n {
        for k in (lvl..n).rev() {
            let num = dd[k].sub(&dd[k - 1]);
            let den = nodes[k].sub(&nodes[k - lvl]);
            dd[k] = num.exact_div(&den);
        }
    }
    let mut acc = UniPoly::constant(dd[n - 1].clone());
    for k in (0..n - 1).rev() {
        let lin = UniPoly::new(vec![nodes[k].neg(), GaussianRational::one()]);
        acc = acc.mul(&lin).add(&UniPoly::constant(dd[k].clone()));
    }
    acc
}

fn check_args<R: Ring>(p: &BivarPolyH<R>, q: &BivarPolyH<R>) -> Result<(u32, u32)> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::DegenerateResultant);
    }
    match (p.degree_in_y(), q.degree_in_y()) {
        (Some(a), Some(b)) if a > 0 && b > 0 => Ok((a, b)),
        _ => Err(Error::DegenerateResultant),
    }
}

fn exact_over_h(
    p: &BivarPolyH<GaussianRational>,
    q: &BivarPolyH<GaussianRational>,
    divide_by_lc: bool,
) -> Result<UniPolyOverH<GaussianRational>> {
    let (dp, dq) = check_args(p, q)?;
    let dh = p.degree_in_h() * dq as usize + q.degree_in_h() * dp as usize;
    let lc = p.leading_y();
    let mut nodes = Vec::new();
    let mut per_node = Vec::new();
    let mut k = 0i64;
    while nodes.len() < dh + 1 {
        let h = GaussianRational::from_i64(k);
        k += 1;
        let lch = lc.eval_h(&h).y_coeff(0);
        if divide_by_lc && lch.is_zero() {
            continue;
        }
        let mut r = resultant_node(&p.eval_h(&h), &q.eval_h(&h), dp, dq);
        if divide_by_lc {
            r = r.exact_div(&lch);
        }
        nodes.push(h);
        per_node.push(r);
    }
    let dx = per_node.iter().filter_map(UniPoly::degree).max();
    let Some(dx) = dx else {
        return Ok(UniPolyOverH::new(Vec::new()));
    };
    let coeffs = (0..=dx)
        .map(|i| {
            let vals: Vec<_> = per_node.iter().map(|r| r.coeff(i)).collect();
            interpolate(&nodes, &vals)
        })
        .collect();
    Ok(UniPolyOverH::new(coeffs))
}

/// Exact `Res_y(p, q)` by Bareiss elimination at integer h-nodes and interpolation in h.
pub fn resultant_in_y_exact(
    p: &BivarPolyH<GaussianRational>,
    q: &BivarPolyH<GaussianRational>,
) -> Result<UniPolyOverH<GaussianRational>> {
    exact_over_h(p, q, false)
}

fn disc_sign(d: u32) -> i64 {
    if (d as u64 * (d as u64 - 1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Exact discriminant `(-1)^{d(d-1)/2} Res_y(p, p_y) / lc_y(p)`.
pub fn discriminant_in_y_exact(
    p: &BivarPolyH<GaussianRational>,
) -> Result<UniPolyOverH<GaussianRational>> {
    let d = p.degree_in_y().ok_or(Error::DegenerateResultant)?;
    if d < 2 {
        return Err(Error::DegreeInYTooLow(d as usize));
    }
    let r = exact_over_h(p, &p.partial_y(), true)?;
    let s = GaussianRational::from_i64(disc_sign(d));
    Ok(UniPolyOverH::new(r.coeffs().iter().map(|c| c.scale(&s)).collect()))
}

fn y_coeffs_at(p: &BivarPolyH<Complex64>, d: u32, h: Complex64, x: Complex64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d as usize + 1];
    for (&(i, j), c) in p.terms() {
        v[j as usize] += c.eval(&h) * x.powu(i);
    }
    v
}

/// Floating `Res_y(p, q)` at a point `(h, x)`.
pub fn resultant_at(p: &BivarPolyH<Complex64>, q: &BivarPolyH<Complex64>, h: Complex64, x: Complex64) -> Result<Complex64> {
    let (dp, dq) = check_args(p, q)?;
    let pc = y_coeffs_at(p, dp, h, x);
    let qc = y_coeffs_at(q, dq, h, x);
    Ok(det_float(sylvester(&pc, &qc, Complex64::new(0.0, 0.0))))
}

/// Floating discriminant of `p` in y at a point `(h, x)`.
pub fn discriminant_at(p: &BivarPolyH<Complex64>, h: Complex64, x: Complex64) -> Result<Complex64> {
    let d = p.degree_in_y().ok_or(Error::DegenerateResultant)?;
    if d < 2 {
        return Err(Error::DegreeInYTooLow(d as usize));
    }
    let r = resultant_at(p, &p.partial_y(), h, x)?;
    let lc = y_coeffs_at(p, d, h, x)[d as usize];
    Ok(r / lc * disc_sign(d) as f64)
}

fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect()
}

fn float_over_h(
    p: &BivarPolyH<Complex64>,
    q: &BivarPolyH<Complex64>,
    divide_by_lc: bool,
) -> Result<UniPolyOverH<Complex64>> {
    let (dp, dq) = check_args(p, q)?;
    let px = p.degree_in_x().unwrap_or(0) as usize;
    let qx = q.degree_in_x().unwrap_or(0) as usize;
    let row_bound = dq as usize * px + dp as usize * qx;
    let tot_bound = p.total_degree().unwrap_or(0) as usize * q.total_degree().unwrap_or(0) as usize;
    let dx = row_bound.min(tot_bound.max(1));
    let dh = p.degree_in_h() * dq as usize + q.degree_in_h() * dp as usize;
    let (mx, mh) = (dx + 1, dh + 1);
    let xs = roots_of_unity(mx);
    let hs = roots_of_unity(mh);
    let mut vals = vec![vec![Complex64::new(0.0, 0.0); mx]; mh];
    for (k, &h) in hs.iter().enumerate() {
        for (l, &x) in xs.iter().enumerate() {
            let pc = y_coeffs_at(p, dp, h, x);
            let qc = y_coeffs_at(q, dq, h, x);
            let mut v = det_float(sylvester(&pc, &qc, Complex64::new(0.0, 0.0)));
            if divide_by_lc {
                v /= pc[dp as usize];
            }
            vals[k][l] = v;
        }
    }
    let mut c = vec![vec![Complex64::new(0.0, 0.0); mh]; mx];
    let mut scale: f64 = 0.0;
    for (a, ca) in c.iter_mut().enumerate() {
        for (b, cab) in ca.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, row) in vals.iter().enumerate() {
                let hk = hs[(b * k) % mh].conj();
                for (l, v) in row.iter().enumerate() {
                    s += v * hk * xs[(a * l) % mx].conj();
                }
            }
            *cab = s / (mx * mh) as f64;
            scale = scale.max(cab.norm());
        }
    }
    let coeffs = c
        .into_iter()
        .map(|col| {
            UniPoly::new(
                col.into_iter()
                    .map(|z| if z.norm() < ZERO_THRESHOLD * scale { Complex64::new(0.0, 0.0) } else { z })
                    .collect(),
            )
        })
        .collect();
    Ok(UniPolyOverH::new(coeffs))
}

/// Floating `Res_y(p, q)`: pivoted determinants on a roots-of-unity grid, inverted by DFT.
pub fn resultant_in_y_float(p: &BivarPolyH<Complex64>, q: &BivarPolyH<Complex64>) -> Result<UniPolyOverH<Complex64>> {
    float_over_h(p, q, false)
}

pub fn discriminant_in_y_float(p: &BivarPolyH<Complex64>) -> Result<UniPolyOverH<Complex64>> {
    let d = p.degree_in_y().ok_or(Error::DegenerateResultant)?;
    if d < 2 {
        return Err(Error::DegreeInYTooLow(d as usize));
    }
    let r = float_over_h(p, &p.partial_y(), true)?;
    let s = Complex64::new(disc_sign(d) as f64, 0.0);
    Ok(UniPolyOverH::new(r.coeffs().iter().map(|c| c.scale(&s)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> GaussianRational {
        GaussianRational::from_i64(v)
    }

    fn bp(terms: &[((u32, u32), i64)]) -> BivarPoly<GaussianRational> {
        BivarPoly::from_terms(terms.iter().map(|&(e, c)| (e, q(c))))
    }

    #[test]
    fn resultant_of_parabola_and_line() {
        // Res_y(y^2 - x, y) = x up to sign
        let p = BivarPolyH::constant(&bp(&[((0, 2), 1), ((1, 0), -1)]));
        let l = BivarPolyH::constant(&bp(&[((0, 1), 1)]));
        let r = resultant_in_y_exact(&p, &l).unwrap();
        assert_eq!(r.x_degree(), Some(1));
        let c = r.coeffs()[1].coeff(0);
        assert!(c == q(1) || c == q(-1));
        assert!(r.coeffs()[0].is_zero());
        let l2 = BivarPolyH::constant(&bp(&[((0, 1), 2)]));
        let r2 = resultant_in_y_exact(&p, &l2).unwrap();
        let c2 = r2.coeffs()[1].coeff(0);
        assert!(c2 == q(4) || c2 == q(-4));
    }

    #[test]
    fn resultant_with_itself_vanishes() {
        let p = BivarPolyH::minus_h(&bp(&[((1, 1), 1), ((0, 3), 2), ((2, 1), -1)]));
        assert!(resultant_in_y_exact(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn quadratic_discriminant() {
        // y^2 + xy - h -> x^2 + 4h
        let p = BivarPolyH::minus_h(&bp(&[((0, 2), 1), ((1, 1), 1)]));
        let d = discriminant_in_y_exact(&p).unwrap();
        assert_eq!(d.x_degree(), Some(2));
        assert_eq!(d.coeffs()[2], UniPoly::constant(q(1)));
        assert!(d.coeffs()[1].is_zero());
        assert_eq!(d.coeffs()[0], UniPoly::monomial(q(4), 1));
        let df = discriminant_in_y_float(&p.to_complex()).unwrap();
        assert!((df.eval_c(Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.7))
            - (Complex64::new(-0.2, 0.7).powu(2) + 4.0 * Complex64::new(0.3, 0.1)))
        .norm()
            < 1e-12);
    }

    #[test]
    fn linear_in_y_is_rejected() {
        let p = BivarPolyH::minus_h(&bp(&[((1, 1), 1)]));
        assert_eq!(discriminant_in_y_exact(&p), Err(Error::DegreeInYTooLow(1)));
        assert_eq!(
            resultant_in_y_exact(&BivarPolyH::constant(&BivarPoly::zero()), &p),
            Err(Error::DegenerateResultant)
        );
    }

    #[test]
    fn degree_drop_examples() {
        // D = x^2 + 4h
        let d = UniPolyOverH::new(vec![UniPoly::monomial(q(4), 1), UniPoly::zero(), UniPoly::constant(q(1))]);
        assert_eq!(degree_drop_at(&d, &q(1)), 0);
        // D = h x^3 + x
        let d2 = UniPolyOverH::new(vec![
            UniPoly::zero(),
            UniPoly::constant(q(1)),
            UniPoly::zero(),
            UniPoly::monomial(q(1), 1),
        ]);
        assert_eq!(degree_drop_at(&d2, &q(0)), 2);
        assert_eq!(degree_drop_at_float(&d2.to_complex(), Complex64::new(0.0, 0.0)), 2);
        assert_eq!(degree_drop_at_float(&d2.to_complex(), Complex64::new(0.5, 0.0)), 0);
    }

    #[test]
    fn bareiss_matches_float_determinant() {
        let p = bp(&[((0, 3), 2), ((1, 2), -1), ((2, 0), 3), ((1, 1), 1)]);
        let ph = BivarPolyH::minus_h(&p);
        let exact = resultant_in_y_exact(&ph, &ph.partial_y()).unwrap();
        let f = ph.to_complex();
        for &(h, x) in &[(0.3, -1.1), (-2.0, 0.25), (1.5, 1.5)] {
            let (h, x) = (Complex64::new(h, 0.1), Complex64::new(x, -0.3));
            let a = exact.to_complex().eval_c(h, x);
            let b = resultant_at(&f, &f.partial_y(), h, x).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
        }
    }
}
