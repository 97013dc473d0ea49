//! FFT helpers for periodic samples on `[0, 2pi)`.

use num_complex::Complex64;
use rustfft::FftPlanner;

fn freq(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Fourier coefficients `c_k` with `v_j = sum_k c_k e^{i k theta_j}`.
pub(crate) fn spectrum(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let mut buf = v.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= s);
    buf
}

fn synthesize(mut c: Vec<Complex64>) -> Vec<Complex64> {
    let n = c.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut c);
    c
}

pub(crate) fn derivative(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let mut c = spectrum(v);
    for (k, ck) in c.iter_mut().enumerate() {
        let f = freq(k, n);
        *ck = if n.is_multiple_of(2) && k == n / 2 { Complex64::new(0.0, 0.0) } else { *ck * Complex64::new(0.0, f as f64) };
    }
    synthesize(c)
}

fn filter_factor(f: i64, n: usize) -> f64 {
    (-36.0 * (f.abs() as f64 / (n / 2) as f64).powi(8)).exp()
}

/// Exponential low-pass filter keeping roughly `|k| < n / (2 frac)`.
pub(crate) fn smooth(v: &[Complex64], frac: usize) -> Vec<Complex64> {
    let n = v.len();
    let mut c = spectrum(v);
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= filter_factor(freq(k, n) * frac as i64, n);
    }
    synthesize(c)
}

/// Zero-mean `Phi(theta) - theta` where `Phi` is the normalized cumulative integral of `w > 0`.
pub(crate) fn cumulative_deviation(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let wc: Vec<Complex64> = w.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut c = spectrum(&wc);
    let mean = c[0].re;
    for (k, ck) in c.iter_mut().enumerate() {
        let f = freq(k, n);
        let filter = filter_factor(f, n);
        *ck = if f == 0 || (n.is_multiple_of(2) && k == n / 2) {
            Complex64::new(0.0, 0.0)
        } else {
            *ck * filter / (Complex64::new(0.0, f as f64) * mean)
        };
    }
    synthesize(c).into_iter().map(|z| z.re).collect()
}

/// Largest coefficient with `|k| > n / frac`, relative to the largest overall.
pub(crate) fn tail_ratio(v: &[Complex64], frac: usize) -> f64 {
    let n = v.len();
    let c = spectrum(v);
    let top = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let cut = (n / frac) as i64;
    let tail = c
        .iter()
        .enumerate()
        .filter(|(k, _)| freq(*k, n).abs() > cut)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    tail / top
}

/// Trigonometric interpolation onto twice as many equispaced points.
pub(crate) fn upsample(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let c = spectrum(v);
    let mut d = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (k, ck) in c.iter().enumerate() {
        let f = freq(k, n);
        if n.is_multiple_of(2) && k == n / 2 {
            d[n / 2] += ck * 0.5;
            d[2 * n - n / 2] += ck * 0.5;
        } else {
            let idx = if f >= 0 { f as usize } else { (2 * n as i64 + f) as usize };
            d[idx] += ck;
        }
    }
    synthesize(d)
}

/// Evaluates a trigonometric interpolant anywhere on the circle by a Taylor series about the
/// nearest point of a finer grid.
pub(crate) struct Interpolant {
    /// `ders[m][i]` is the `m`-th derivative at the `i`-th fine grid point.
    ders: Vec<Vec<Complex64>>,
}

const TAYLOR_ORDER: usize = 16;
const OVERSAMPLE: usize = 2;

impl Interpolant {
    pub(crate) fn new(v: &[Complex64]) -> Self {
        let n = v.len();
        let m = n * OVERSAMPLE;
        let c = spectrum(v);
        let mut ders = Vec::with_capacity(TAYLOR_ORDER + 1);
        for order in 0..=TAYLOR_ORDER {
            let mut d = vec![Complex64::new(0.0, 0.0); m];
            for (k, ck) in c.iter().enumerate() {
                let f = freq(k, n);
                let w = Complex64::new(0.0, f as f64).powu(order as u32);
                if n.is_multiple_of(2) && k == n / 2 {
                    // the Nyquist mode is split evenly between +n/2 and -n/2
                    d[n / 2] += ck * 0.5 * w;
                    d[m - n / 2] += ck * 0.5 * Complex64::new(0.0, -(f as f64)).powu(order as u32);
                } else {
                    let idx = if f >= 0 { f as usize } else { (m as i64 + f) as usize };
                    d[idx] += ck * w;
                }
            }
            ders.push(synthesize(d));
        }
        Self { ders }
    }

    pub(crate) fn eval(&self, theta: f64) -> Complex64 {
        self.taylor(theta, 0)
    }

    pub(crate) fn derivative_at(&self, theta: f64) -> Complex64 {
        self.taylor(theta, 1)
    }

    fn taylor(&self, theta: f64, from: usize) -> Complex64 {
        let m = self.ders[0].len();
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let pos = theta.rem_euclid(2.0 * std::f64::consts::PI) / step;
        let i = pos.round() as usize % m;
        let delta = (pos - pos.round()) * step;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut fac = 1.0;
        for (order, d) in self.ders[from..].iter().enumerate() {
            if order > 0 {
                fac *= delta / order as f64;
            }
            acc += d[i] * fac;
        }
        acc
    }
}
