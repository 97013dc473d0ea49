use num_complex::Complex64;

/// Truncated Laurent series `s^val (c_0 + c_1 s + ... ) + O(s^{val + c.len()})`.
///
/// An empty `c` is the zero series known up to `O(s^val)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub val: i64,
    pub c: Vec<Complex64>,
}

/// Leading coefficients below this fraction of the summed term magnitudes are cancellation noise.
const CANCEL_TOL: f64 = 1e-9;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Laurent {
    pub fn monomial(coef: Complex64, val: i64, prec: usize) -> Self {
        let mut c = vec![zero(); prec];
        if prec > 0 {
            c[0] = coef;
        }
        Self { val, c }
    }

    pub fn from_coeffs(val: i64, c: Vec<Complex64>) -> Self {
        Self { val, c }
    }

    pub fn abs_prec(&self) -> i64 {
        self.val + self.c.len() as i64
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Coefficient of `s^k`, `None` when beyond the known precision.
    pub fn coeff(&self, k: i64) -> Option<Complex64> {
        if k >= self.abs_prec() {
            return None;
        }
        if k < self.val {
            return Some(zero());
        }
        Some(self.c[(k - self.val) as usize])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let len = self.c.len().min(o.c.len());
        let mut c = vec![zero(); len];
        for (i, a) in self.c.iter().take(len).enumerate() {
            for (j, b) in o.c.iter().take(len - i).enumerate() {
                c[i + j] += a * b;
            }
        }
        Self { val: self.val + o.val, c }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { val: self.val, c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn pow(&self, e: u32, prec: usize) -> Self {
        let mut acc = Self::monomial(Complex64::new(1.0, 0.0), 0, prec.max(self.c.len()));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Requires a nonzero leading coefficient.
    pub fn inv(&self) -> Self {
        let n = self.c.len();
        let mut out = vec![zero(); n];
        let a0 = self.c[0];
        out[0] = a0.inv();
        for k in 1..n {
            let s: Complex64 = (1..=k).map(|j| self.c[j] * out[k - j]).sum();
            out[k] = -s / a0;
        }
        Self { val: -self.val, c: out }
    }

    pub fn derivative(&self) -> Self {
        let c: Vec<Complex64> = self
            .c
            .iter()
            .enumerate()
            .map(|(k, a)| a * (self.val + k as i64) as f64)
            .collect();
        let mut d = Self { val: self.val - 1, c };
        d.strip_exact();
        d
    }

    fn strip_exact(&mut self) {
        let lead = self.c.iter().take_while(|a| **a == zero()).count();
        self.c.drain(..lead);
        self.val += lead as i64;
    }

    /// Sum of several series, dropping leading coefficients lost to cancellation.
    pub fn sum(terms: &[Laurent]) -> Laurent {
        let Some(lo) = terms.iter().map(|t| t.val).min() else {
            return Self { val: 0, c: Vec::new() };
        };
        let hi = terms.iter().map(Laurent::abs_prec).min().unwrap();
        if hi <= lo {
            return Self { val: hi, c: Vec::new() };
        }
        let len = (hi - lo) as usize;
        let mut c = vec![zero(); len];
        let mut mag = vec![0.0; len];
        for t in terms {
            for (k, a) in t.c.iter().enumerate() {
                let idx = t.val + k as i64 - lo;
                if idx >= 0 && (idx as usize) < len {
                    c[idx as usize] += a;
                    mag[idx as usize] += a.norm();
                }
            }
        }
        let lead = c
            .iter()
            .zip(&mag)
            .take_while(|(a, m)| a.norm() <= CANCEL_TOL * **m)
            .count();
        c.drain(..lead);
        Self { val: lo + lead as i64, c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_geometric_series() {
        // 1/(1 - s) = 1 + s + s^2 + ...
        let one = Complex64::new(1.0, 0.0);
        let a = Laurent::from_coeffs(-2, vec![one, -one, zero(), zero()]);
        let b = a.inv();
        assert_eq!(b.val, 2);
        assert!(b.c.iter().all(|z| (z - one).norm() < 1e-15));
    }

    #[test]
    fn cancellation_raises_valuation() {
        let one = Complex64::new(1.0, 0.0);
        let a = Laurent::from_coeffs(0, vec![one, one, one]);
        let b = Laurent::from_coeffs(0, vec![-one, zero(), one]);
        let s = Laurent::sum(&[a, b]);
        assert_eq!(s.val, 1);
        assert_eq!(s.c.len(), 2);
    }
}
