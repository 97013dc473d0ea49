//! Simultaneous (Aberth-Ehrlich) root finding with multiplicity recovery.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots closer than this (relative to `max(1, |z|)`) are merged outright.
pub const CLUSTER_RADIUS: f64 = 1e-7;
/// Wider radius within which a merge is accepted only if the derivatives vanish.
const MERGE_RADIUS: f64 = 1e-3;
const MERGE_TOL: f64 = 1e-9;
const MAX_ITER: usize = 600;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `p(z) / p'(z)`, evaluated through the reversed polynomial when `|z| > 1`.
fn newton_ratio(c: &[Complex64], z: Complex64) -> Complex64 {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let (mut p, mut dp) = (zero(), zero());
        for a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        return p / dp;
    }
    let w = z.inv();
    let (mut r, mut dr) = (zero(), zero());
    for a in c.iter() {
        dr = dr * w + r;
        r = r * w + a;
    }
    // p(z) = z^n r(1/z); p'/p = n/z - r'(w) w^2 / r(w)
    let log_deriv = n as f64 * w - dr * w * w / r;
    log_deriv.inv()
}

/// Initial guesses on circles read off the upper convex hull of `log|c_k|`.
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(k, a)| (k, a.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(n);
    let mut idx = 0;
    for w in hull.windows(2) {
        let (k1, l1) = w[0];
        let (k2, l2) = w[1];
        let m = k2 - k1;
        let r = ((l1 - l2) / m as f64).exp();
        for j in 0..m {
            let ang = 2.0 * PI * j as f64 / m as f64 + 0.4 + 0.7 * idx as f64 / n as f64;
            out.push(Complex64::from_polar(r, ang));
            idx += 1;
        }
    }
    out
}

fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let mut z = initial_guesses(c);
    let n = z.len();
    for _ in 0..MAX_ITER {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ratio = newton_ratio(c, z[i]);
            if !ratio.is_finite() {
                continue;
            }
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                worst = worst.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect()
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(zero(), |acc, a| acc * z + a)
}

fn abs_bound(c: &[Complex64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
}

/// Refines `z` as a simple root of `p^{(m-1)}` and checks that `p, ..., p^{(m-1)}` vanish.
fn verify_multiple(c: &[Complex64], z: Complex64, m: usize) -> Option<Complex64> {
    let mut ders = vec![c.to_vec()];
    for _ in 1..m {
        let d = derivative(ders.last().unwrap());
        ders.push(d);
    }
    let target = &ders[m - 1];
    let mut z = z;
    if target.len() > 1 {
        for _ in 0..8 {
            let step = newton_ratio(target, z);
            if !step.is_finite() {
                break;
            }
            z -= step;
            if step.norm() < 1e-16 * z.norm().max(1.0) {
                break;
            }
        }
    }
    let r = z.norm();
    for d in &ders[..m - 1] {
        if horner(d, z).norm() > MERGE_TOL * abs_bound(d, r) {
            return None;
        }
    }
    Some(z)
}

/// Roots with multiplicities. Multiplicities sum to the degree.
pub fn univariate_roots(coeffs: &[Complex64]) -> Result<Vec<(Complex64, usize)>> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|a| *a == zero()) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let zeros = c.iter().take_while(|a| **a == zero()).count();
    let c = c[zeros..].to_vec();
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    if zeros > 0 {
        out.push((zero(), zeros));
    }
    if c.len() == 1 {
        return Ok(out);
    }
    let mut z = aberth(&c);
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let s = newton_ratio(&c, *zi);
            if s.is_finite() && s.norm() < 1e-3 * zi.norm().max(1.0) {
                *zi -= s;
            }
        }
    }
    let mut clusters: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for zi in z {
        let hit = clusters
            .iter_mut()
            .find(|(_, m)| m.iter().any(|w| (w - zi).norm() < CLUSTER_RADIUS * zi.norm().max(1.0)));
        match hit {
            Some((_, m)) => m.push(zi),
            None => clusters.push((zi, vec![zi])),
        }
    }
    for cl in clusters.iter_mut() {
        let mean = cl.1.iter().sum::<Complex64>() / cl.1.len() as f64;
        cl.0 = if cl.1.len() > 1 {
            verify_multiple(&c, mean, cl.1.len()).unwrap_or(mean)
        } else {
            mean
        };
    }
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let d = (clusters[i].0 - clusters[j].0).norm();
                if d < MERGE_RADIUS * clusters[i].0.norm().max(1.0) && best.is_none_or(|b| d < b.2) {
                    best = Some((i, j, d));
                }
            }
        }
        let Some((i, j, _)) = best else { break };
        let m = clusters[i].1.len() + clusters[j].1.len();
        let members: Vec<Complex64> = clusters[i].1.iter().chain(clusters[j].1.iter()).copied().collect();
        let mean = members.iter().sum::<Complex64>() / m as f64;
        match verify_multiple(&c, mean, m) {
            Some(center) => {
                clusters[i] = (center, members);
                clusters.remove(j);
            }
            None => break,
        }
    }
    out.extend(clusters.into_iter().map(|(z, m)| (z, m.len())));
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(out)
}

/// Coefficients of `prod (z - r)^m` times `lead`.
pub fn from_roots(roots: &[(Complex64, usize)], lead: Complex64) -> Vec<Complex64> {
    let mut p = vec![lead];
    for &(r, m) in roots {
        for _ in 0..m {
            let mut q = vec![zero(); p.len() + 1];
            for (k, a) in p.iter().enumerate() {
                q[k + 1] += a;
                q[k] -= a * r;
            }
            p = q;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn z_squared_plus_one() {
        let r = univariate_roots(&[c(1.0, 0.0), zero(), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].0 - c(0.0, -1.0)).norm() < 1e-14 || (r[0].0 - c(0.0, 1.0)).norm() < 1e-14);
        assert!((r[0].0 + r[1].0).norm() < 1e-14);
    }

    #[test]
    fn z_cubed() {
        let r = univariate_roots(&[zero(), zero(), zero(), c(1.0, 0.0)]).unwrap();
        assert_eq!(r, vec![(zero(), 3)]);
    }

    #[test]
    fn zero_polynomial_errors() {
        assert_eq!(univariate_roots(&[zero(), zero()]), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn recovers_double_and_triple_roots() {
        let want = [(c(0.5, 0.25), 2), (c(-1.0, 0.7), 3), (c(2.0, -1.0), 1)];
        let p = from_roots(&want, c(1.5, -0.5));
        let got = univariate_roots(&p).unwrap();
        assert_eq!(got.len(), 3);
        for (z, m) in want {
            let hit = got.iter().find(|g| (g.0 - z).norm() < 1e-7).expect("root missing");
            assert_eq!(hit.1, m);
        }
    }

    #[test]
    fn wide_dynamic_range() {
        let want = [(c(1e-4, 0.0), 1), (c(3.0, 1.0), 1), (c(0.0, 2e4), 1), (c(-7.0, 0.0), 1)];
        let p = from_roots(&want, c(1.0, 0.0));
        let got = univariate_roots(&p).unwrap();
        assert_eq!(got.len(), 4);
        for (z, _) in want {
            assert!(got.iter().any(|g| (g.0 - z).norm() < 1e-9 * z.norm().max(1.0)));
        }
    }
}
