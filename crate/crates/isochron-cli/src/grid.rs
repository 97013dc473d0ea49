use std::f64::consts::PI;

use num_complex::Complex64;

use crate::spec::ParseError;

/// Phase of the first ray; keeps grids off the real axis, where the critical values of
/// real systems accumulate.
const RAY_PHASE: f64 = 0.7;

/// Parses `--h-grid`.
///
/// * `log:R0:R1:COUNT:RAYS` gives `COUNT` log-spaced moduli in `[R0, R1]` on each of `RAYS`
///   equally spaced rays.
/// * `RE,IM;RE,IM;...` lists points explicitly.
pub fn parse_grid(text: &str) -> Result<Vec<Complex64>, ParseError> {
    let bad = |why: &str| ParseError(format!("--h-grid \"{text}\": {why}"));
    if let Some(rest) = text.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 4 {
            return Err(bad("expected log:R0:R1:COUNT:RAYS"));
        }
        let r0: f64 = parts[0].parse().map_err(|_| bad("R0 is not a number"))?;
        let r1: f64 = parts[1].parse().map_err(|_| bad("R1 is not a number"))?;
        let count: usize = parts[2].parse().map_err(|_| bad("COUNT is not a positive integer"))?;
        let rays: usize = parts[3].parse().map_err(|_| bad("RAYS is not a positive integer"))?;
        if !(r0 > 0.0 && r1 >= r0) || count == 0 || rays == 0 {
            return Err(bad("need 0 < R0 <= R1 and COUNT, RAYS >= 1"));
        }
        return Ok(log_grid(r0, r1, count, rays));
    }
    let mut out = Vec::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (re, im) = item.split_once(',').unwrap_or((item, "0"));
        let re: f64 = re.trim().parse().map_err(|_| bad(&format!("\"{item}\" is not RE,IM")))?;
        let im: f64 = im.trim().parse().map_err(|_| bad(&format!("\"{item}\" is not RE,IM")))?;
        out.push(Complex64::new(re, im));
    }
    if out.is_empty() {
        return Err(bad("no points"));
    }
    Ok(out)
}

pub fn log_grid(r0: f64, r1: f64, count: usize, rays: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(count * rays);
    for k in 0..rays {
        let theta = RAY_PHASE + 2.0 * PI * k as f64 / rays as f64;
        for i in 0..count {
            let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            let r = r0 * (r1 / r0).powf(t);
            out.push(Complex64::from_polar(r, theta));
        }
    }
    out
}

/// The default scan: 20 points, `|h|` from `1e-3` to `1e-1`.
pub fn default_scan_grid() -> Vec<Complex64> {
    log_grid(1e-3, 1e-1, 5, 4)
}
