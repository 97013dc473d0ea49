use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{continue_loop_with, lift_origin_loop, period, FiberLoop, HPath, PeriodSample};
use crate::error::{Error, Result};
use crate::hamiltonian::atypical_values;
use crate::HomogeneousHamiltonianSystem;

/// Environment variable holding the worker count for period scans.
pub const THREADS_ENV: &str = "ISOCHRON_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub struct ScanError {
    pub h: Complex64,
    pub error: Error,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodScan {
    /// In grid order; failed points are absent here and listed in `errors`.
    pub samples: Vec<PeriodSample>,
    pub errors: Vec<ScanError>,
    /// `max |T(h) - 2 pi i|` over the accepted samples.
    pub statistic: f64,
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
    })
}

/// Radius around `h = 0` where the origin loop is lifted directly.
///
/// Ramification points of the projection to `x` sit near `|x| ~ (n A)^{1/(n+1)} |h|^{n/(n+1)}`
/// (`A` the largest coefficient); the lift circle `|x| = |h|^{1/2}` must stay well outside.
pub(crate) fn direct_radius(sys: &HomogeneousHamiltonianSystem, atypical: &[Complex64]) -> f64 {
    let m = atypical.iter().map(|a| a.norm()).filter(|&r| r > 1e-9).fold(f64::INFINITY, f64::min);
    let n = sys.n() as f64;
    let amax = sys.a().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let ram = if amax > 0.0 { (0.25 / (n * amax).powf(1.0 / (n + 1.0))).powf(2.0 * (n + 1.0) / (n - 1.0)) } else { f64::INFINITY };
    (0.1 * m).min(0.05).min(ram)
}

pub(crate) fn clearance(atypical: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for (i, a) in atypical.iter().enumerate() {
        for b in &atypical[i + 1..] {
            m = m.min((a - b).norm());
        }
    }
    if m.is_finite() {
        0.1 * m
    } else {
        0.1
    }
}

/// `gamma_h` at `h`, lifted directly when `|h|` is small, else transported out from `from`
/// (or from a direct lift on the same ray).
pub(crate) fn origin_loop_at(
    sys: &HomogeneousHamiltonianSystem,
    h: Complex64,
    from: Option<&FiberLoop>,
    atypical: &[Complex64],
    samples: usize,
) -> Result<FiberLoop> {
    let r0 = direct_radius(sys, atypical);
    if h.norm() <= r0 {
        return lift_origin_loop(sys, h, samples);
    }
    let start = match from {
        Some(lp) => lp.clone(),
        None => lift_origin_loop(sys, h / h.norm() * r0, samples)?,
    };
    let path = HPath::line_avoiding(start.h, h, atypical, clearance(atypical));
    continue_loop_with(sys, &start, &path, atypical)
}

fn ray_key(h: Complex64) -> i64 {
    (h.arg() * 1e9).round() as i64
}

/// Periods of `gamma_h` over a grid. Points on a common ray share one transported loop.
pub fn period_scan(sys: &HomogeneousHamiltonianSystem, grid: &[Complex64], samples: usize) -> Result<PeriodScan> {
    let atypical = atypical_values(sys)?;
    let mut rays: Vec<(i64, Vec<usize>)> = Vec::new();
    for (i, h) in grid.iter().enumerate() {
        let key = ray_key(*h);
        match rays.iter_mut().find(|r| r.0 == key) {
            Some(r) => r.1.push(i),
            None => rays.push((key, vec![i])),
        }
    }
    for r in &mut rays {
        r.1.sort_by(|&a, &b| grid[a].norm().total_cmp(&grid[b].norm()));
    }
    let run_ray = |idx: &Vec<usize>| -> Vec<(usize, Result<PeriodSample>)> {
        let mut prev: Option<FiberLoop> = None;
        let mut out = Vec::new();
        for &i in idx {
            let h = grid[i];
            let near = atypical.iter().map(|a| (a - h).norm()).fold(f64::INFINITY, f64::min);
            let res = if near < 1e-9 {
                Err(Error::InvalidInput(format!("h = {h} is an atypical value")))
            } else {
                origin_loop_at(sys, h, prev.as_ref(), &atypical, samples).and_then(|lp| {
                    let p = period(sys, &lp);
                    prev = Some(lp);
                    p
                })
            };
            if res.is_err() {
                prev = None;
            }
            out.push((i, res));
        }
        out
    };
    let results: Vec<Vec<(usize, Result<PeriodSample>)>> =
        pool().install(|| rays.par_iter().map(|r| run_ray(&r.1)).collect());
    let mut flat: Vec<(usize, Result<PeriodSample>)> = results.into_iter().flatten().collect();
    flat.sort_by_key(|e| e.0);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut samples_out = Vec::new();
    let mut errors = Vec::new();
    for (i, r) in flat {
        match r {
            Ok(s) => samples_out.push(s),
            Err(error) => errors.push(ScanError { h: grid[i], error }),
        }
    }
    let statistic = if samples_out.is_empty() {
        f64::INFINITY
    } else {
        samples_out.iter().map(|s| (s.t - two_pi_i).norm()).fold(0.0, f64::max)
    };
    Ok(PeriodScan { samples: samples_out, errors, statistic })
}
