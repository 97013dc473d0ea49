use std::f64::consts::PI;

use isochron::cycles::{lift_infinity_cycles, lift_saddle_loop, monodromy_lattice_check, period, period_scan};
use isochron::hamiltonian::{atypical_values, finite_critical_points, l0_extra_critical_points};
use isochron::infinity::{
    chart_polynomial, default_truncation, lambda_index, lambda_index_c, lambda_indices_by_point, newton_polygon,
    points_at_infinity, residue_at_infinity, InfinitePoint,
};
use isochron::poly::{GaussianRational, Ring};
use isochron::{Error, HomogeneousHamiltonianSystem};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::default_scan_grid;
use crate::report::*;
use crate::spec::{Field, SystemSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;

const ISOCHRONOUS_TOL: f64 = 1e-8;
const MIXED_MIN_DEVIATION: f64 = 1e-4;
const RESIDUE_TOL: f64 = 1e-9;
const ASYMPTOTIC_TOL: f64 = 1e-2;
const LATTICE_TOL: f64 = 1e-6;
/// Random values of `h` keep at least this distance from the atypical set.
const ATYPICAL_CLEARANCE: f64 = 1e-3;
const RANDOM_H_COUNT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Theorem {
    Main,
    SaddlePeriod,
    NoPole,
    Lambda,
    InfinityCycles,
    Monodromy,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::Main => "main",
            Theorem::SaddlePeriod => "saddle-period",
            Theorem::NoPole => "no-pole",
            Theorem::Lambda => "lambda",
            Theorem::InfinityCycles => "infinity-cycles",
            Theorem::Monodromy => "monodromy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    CriticalPoints,
    Infinity,
    Lambda,
    Periods,
    Monodromy,
    Verify(Theorem),
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::CriticalPoints => "critical-points",
            Command::Infinity => "infinity",
            Command::Lambda => "lambda",
            Command::Periods => "periods",
            Command::Monodromy => "monodromy",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub h_grid: Option<Vec<Complex64>>,
    pub samples: usize,
    pub seed: u64,
    pub field: Option<Field>,
    pub truncation_order: Option<usize>,
    pub case: Option<u8>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            h_grid: None,
            samples: isochron::cycles::DEFAULT_SAMPLES,
            seed: 0,
            field: None,
            truncation_order: None,
            case: None,
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::HypothesisNotMet(_) | Error::CaseMismatch(..) | Error::NonIsolatedSingularities | Error::LinearSystem => {
            EXIT_HYPOTHESIS
        }
        Error::InvalidInput(_) | Error::LengthMismatch { .. } => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

struct Ctx<'a> {
    sys: HomogeneousHamiltonianSystem,
    opts: &'a Options,
    rng: ChaCha8Rng,
    report: Report,
    numerical_failure: bool,
}

impl Ctx<'_> {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.report.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    fn truncation(&self) -> usize {
        self.opts.truncation_order.unwrap_or_else(|| default_truncation(&self.sys))
    }

    fn random_h(&mut self, atypical: &[Complex64]) -> Complex64 {
        loop {
            let h = Complex64::from_polar(self.rng.gen_range(0.01..1.0), self.rng.gen_range(0.0..2.0 * PI));
            if atypical.iter().all(|a| (a - h).norm() > ATYPICAL_CLEARANCE) {
                return h;
            }
        }
    }

    fn random_exact_h(&mut self, atypical: &[Complex64]) -> GaussianRational {
        loop {
            let mut part = || BigRational::new(BigInt::from(self.rng.gen_range(-20..=20)), BigInt::from(self.rng.gen_range(1..=9)));
            let h = GaussianRational::new(part(), part());
            if atypical.iter().all(|a| (a - h.to_complex()).norm() > ATYPICAL_CLEARANCE) {
                return h;
            }
        }
    }

    /// A seeded ray direction for asymptotic checks.
    fn random_phase(&mut self) -> f64 {
        self.rng.gen_range(0.0..2.0 * PI)
    }
}

/// Runs one command on one spec. Never panics on bad numerics; failures land in the report.
pub fn run(spec: &SystemSpec, cmd: Command, opts: &Options) -> Report {
    let theorem = match cmd {
        Command::Verify(t) => Some(t.name()),
        _ => None,
    };
    let mut report = Report::new(cmd.name(), theorem, opts.seed, spec.clone());
    let sys = match spec.system(opts.field) {
        Ok(s) => s,
        Err(e) => {
            report.error = Some(ErrorOut { kind: "ParseError".into(), message: e.0 });
            report.exit_code = EXIT_USAGE;
            return report;
        }
    };
    report.verdict = Some(VerdictOut::new(&sys, sys.classify()));
    let mut ctx = Ctx { sys, opts, rng: ChaCha8Rng::seed_from_u64(opts.seed), report, numerical_failure: false };
    let outcome = match cmd {
        Command::Classify => Ok(()),
        Command::CriticalPoints => critical_points(&mut ctx),
        Command::Infinity => infinity(&mut ctx, None),
        Command::Lambda => lambda(&mut ctx),
        Command::Periods => periods(&mut ctx),
        Command::Monodromy => monodromy(&mut ctx),
        Command::Verify(t) => verify(&mut ctx, t),
    };
    let mut report = ctx.report;
    report.exit_code = match outcome {
        Err(e) => {
            let code = exit_code_for(&e);
            report.error = Some(ErrorOut { kind: error_kind(&e), message: e.to_string() });
            code
        }
        Ok(()) if ctx.numerical_failure => EXIT_NUMERICAL,
        Ok(()) if report.checks.iter().any(|c| !c.passed) => EXIT_ASSERTION,
        Ok(()) => EXIT_PASS,
    };
    report
}

fn critical_points(ctx: &mut Ctx) -> Result<(), Error> {
    let cps = finite_critical_points(&ctx.sys)?;
    let extra = l0_extra_critical_points(&ctx.sys);
    let atypical = atypical_values(&ctx.sys)?;
    ctx.report.warnings.extend(cps.warnings.iter().cloned());
    ctx.report.critical_points = Some(CriticalOut {
        points: cps.points.iter().map(CriticalPointOut::from).collect(),
        l0_saddles: extra.iter().map(CriticalPointOut::from).collect(),
        atypical_values: atypical.into_iter().map(cx).collect(),
    });
    Ok(())
}

fn residues_at(
    sys: &HomogeneousHamiltonianSystem,
    h: Complex64,
    p: &InfinitePoint,
    k: usize,
) -> Result<ResiduesAt, Error> {
    let polygon = newton_polygon(&chart_polynomial(sys, h, p))?.vertices();
    let coarse = residue_at_infinity(sys, h, p, k)?;
    let fine = residue_at_infinity(sys, h, p, 2 * k)?;
    let branches = coarse
        .iter()
        .map(|(b, r)| {
            let twin = fine
                .iter()
                .filter(|(f, _)| f.segment == b.segment && f.x_exponent == b.x_exponent)
                .min_by(|(f, _), (g, _)| (f.y_leading - b.y_leading).norm().total_cmp(&(g.y_leading - b.y_leading).norm()));
            BranchOut {
                segment_start: b.segment.start,
                segment_end: b.segment.end,
                x_exponent: b.x_exponent,
                y_valuation: b.y_valuation,
                y_leading: cx(b.y_leading),
                residue: cx(*r),
                residue_error: twin.map_or(f64::NAN, |(_, t)| (t - r).norm()),
            }
        })
        .collect();
    Ok(ResiduesAt { h: cx(h), newton_polygon: polygon, branches })
}

/// Newton polygons and branch residues at every infinite point, for each `h`.
fn infinity(ctx: &mut Ctx, hs: Option<Vec<Complex64>>) -> Result<(), Error> {
    let points = points_at_infinity(&ctx.sys)?;
    let atypical = atypical_values(&ctx.sys)?;
    let hs = hs.or_else(|| ctx.opts.h_grid.clone()).unwrap_or_else(|| vec![Complex64::new(0.05, 0.02)]);
    let k = ctx.truncation();
    let mut out: Vec<InfinitePointOut> = points.iter().map(InfinitePointOut::new).collect();
    for &h in &hs {
        if atypical.iter().any(|a| (a - h).norm() < 1e-9) {
            ctx.report.warnings.push(format!("h = {h} is an atypical value; skipped"));
            continue;
        }
        for (p, o) in points.iter().zip(out.iter_mut()) {
            o.residues.push(residues_at(&ctx.sys, h, p, k)?);
        }
    }
    ctx.report.infinite_points = Some(out);
    Ok(())
}

fn lambda(ctx: &mut Ctx) -> Result<(), Error> {
    let atypical = atypical_values(&ctx.sys)?;
    let mut rows = Vec::new();
    let mut push = |ctx: &mut Ctx, h: Complex64, exact: Option<GaussianRational>| -> Result<(), Error> {
        let lambda = match &exact {
            Some(e) => lambda_index(&ctx.sys, e)?,
            None => lambda_index_c(&ctx.sys, h)?,
        };
        let per_point: Vec<PointLambda> = lambda_indices_by_point(&ctx.sys, h)?
            .into_iter()
            .map(|(p, l)| PointLambda { beta: cx(p.beta), alpha: cx(p.alpha), lambda: l })
            .collect();
        let per_point_sum = per_point.iter().map(|p| p.lambda).sum();
        rows.push(LambdaRow { h: cx(h), h_exact: exact.map(|e| e.to_string()), lambda, per_point, per_point_sum });
        Ok(())
    };
    match ctx.opts.h_grid.clone() {
        Some(grid) => {
            for h in grid {
                push(ctx, h, GaussianRational::from_complex(h))?;
            }
        }
        None => {
            push(ctx, Complex64::new(0.0, 0.0), Some(GaussianRational::from_i64(0)))?;
            for &a in atypical.iter().filter(|a| a.norm() > 1e-9) {
                push(ctx, a, None)?;
            }
            for _ in 0..RANDOM_H_COUNT {
                let h = ctx.random_exact_h(&atypical);
                push(ctx, h.to_complex(), Some(h))?;
            }
        }
    }
    ctx.report.lambda_table = Some(rows);
    Ok(())
}

fn periods(ctx: &mut Ctx) -> Result<(), Error> {
    let grid = ctx.opts.h_grid.clone().unwrap_or_else(default_scan_grid);
    let scan = period_scan(&ctx.sys, &grid, ctx.opts.samples)?;
    for e in &scan.errors {
        ctx.report.warnings.push(format!("h = {}: {}", e.h, e.error));
    }
    ctx.report.period_scan = Some(ScanOut::from(&scan));
    Ok(())
}

fn monodromy(ctx: &mut Ctx) -> Result<(), Error> {
    let cases: Vec<u8> = match ctx.opts.case {
        Some(c) => vec![c],
        None => (1..=5).collect(),
    };
    for case in cases {
        match monodromy_lattice_check(&ctx.sys, case, ctx.opts.samples) {
            Err(Error::CaseMismatch(..)) if ctx.opts.case.is_none() => continue,
            Err(e) => return Err(e),
            Ok(r) => {
                ctx.report.warnings.extend(r.warnings.iter().cloned());
                ctx.report.monodromy = Some(MonodromyOut::from(&r));
                return Ok(());
            }
        }
    }
    Err(Error::HypothesisNotMet("coefficients match none of the monodromy cases".into()))
}

/// Nonzero `a_j`, `a_k` with `2j < n + 1 < 2k`.
fn strictly_mixed(sys: &HomogeneousHamiltonianSystem) -> bool {
    let n1 = sys.n() + 1;
    let low = (0..=n1).any(|j| 2 * j < n1 && !sys.coeff_is_zero(j));
    let high = (0..=n1).any(|j| 2 * j > n1 && !sys.coeff_is_zero(j));
    low && high
}

fn verify(ctx: &mut Ctx, theorem: Theorem) -> Result<(), Error> {
    match theorem {
        Theorem::Main => verify_main(ctx),
        Theorem::SaddlePeriod => verify_saddle(ctx),
        Theorem::NoPole => verify_no_pole(ctx),
        Theorem::Lambda => verify_lambda(ctx),
        Theorem::InfinityCycles => verify_infinity_cycles(ctx),
        Theorem::Monodromy => {
            monodromy(ctx)?;
            let m = ctx.report.monodromy.clone().expect("set by monodromy");
            ctx.check(
                "period shift on the lattice",
                m.m != 0 && m.residual < LATTICE_TOL,
                format!("case {}: m = {}, residual {:.3e}", m.case, m.m, m.residual),
            );
            Ok(())
        }
    }
}

fn verify_main(ctx: &mut Ctx) -> Result<(), Error> {
    let verdict = ctx.report.verdict.clone().expect("verdict is always set");
    ctx.check(
        "admissibility agrees with the verdict",
        verdict.consistent,
        format!("verdict {}, admissible nonlinearities {}", verdict.verdict, verdict.admissible_nonlinearities),
    );
    periods(ctx)?;
    let scan = ctx.report.period_scan.clone().expect("set by periods");
    if !scan.failures.is_empty() {
        ctx.numerical_failure = true;
    }
    let stat = scan.statistic.unwrap_or(f64::NAN);
    if verdict.verdict == "Not" {
        ctx.check(
            "period is not constant",
            stat > MIXED_MIN_DEVIATION,
            format!("max |T - 2 pi i| = {stat:.3e}, required > {MIXED_MIN_DEVIATION:e}"),
        );
    } else {
        ctx.check(
            "period equals 2 pi i",
            stat < ISOCHRONOUS_TOL,
            format!("max |T - 2 pi i| = {stat:.3e}, required < {ISOCHRONOUS_TOL:e}"),
        );
    }
    Ok(())
}

fn loop_period(
    sys: &HomogeneousHamiltonianSystem,
    label: String,
    lp: &isochron::cycles::FiberLoop,
    target: Complex64,
) -> Result<LoopPeriod, Error> {
    let s = period(sys, lp)?;
    Ok(LoopPeriod {
        label,
        h: cx(s.h),
        t: cx(s.t),
        quadrature_error: s.quadrature_error,
        target: cx(target),
        deviation: (s.t - target).norm(),
    })
}

fn verify_saddle(ctx: &mut Ctx) -> Result<(), Error> {
    let saddles = l0_extra_critical_points(&ctx.sys);
    if saddles.is_empty() {
        return Err(Error::HypothesisNotMet("L_0 carries no saddle besides the origin".into()));
    }
    let theta = ctx.random_phase();
    let target = Complex64::new(0.0, PI);
    let mut out = Vec::new();
    for (i, cp) in saddles.iter().enumerate() {
        let mut devs = Vec::new();
        for r in [1e-3, 1e-4] {
            let h = Complex64::from_polar(r, theta);
            let lp = lift_saddle_loop(&ctx.sys, h, cp, i, ctx.opts.samples)?;
            let p = loop_period(&ctx.sys, format!("saddle {i} at |h| = {r:e}"), &lp, target)?;
            devs.push(p.deviation);
            out.push(p);
        }
        ctx.check(
            format!("saddle {i}: period near pi i"),
            devs[0] < ASYMPTOTIC_TOL,
            format!("|T - pi i| = {:.3e} at |h| = 1e-3", devs[0]),
        );
        ctx.check(
            format!("saddle {i}: error decreases"),
            devs[1] < devs[0],
            format!("{:.3e} at 1e-3, {:.3e} at 1e-4", devs[0], devs[1]),
        );
    }
    ctx.report.saddle_periods = Some(out);
    Ok(())
}

fn verify_no_pole(ctx: &mut Ctx) -> Result<(), Error> {
    if !strictly_mixed(&ctx.sys) {
        return Err(Error::HypothesisNotMet("needs a_j a_k != 0 with j < (n+1)/2 < k".into()));
    }
    let atypical = atypical_values(&ctx.sys)?;
    let hs = match ctx.opts.h_grid.clone() {
        Some(g) => g,
        None => (0..RANDOM_H_COUNT).map(|_| ctx.random_h(&atypical)).collect(),
    };
    infinity(ctx, Some(hs))?;
    let worst = ctx
        .report
        .infinite_points
        .iter()
        .flatten()
        .flat_map(|p| p.residues.iter())
        .flat_map(|r| r.branches.iter())
        .map(|b| Complex64::new(b.residue[0], b.residue[1]).norm())
        .fold(0.0, f64::max);
    ctx.check("no residue at infinity", worst < RESIDUE_TOL, format!("max |residue| = {worst:.3e}"));
    Ok(())
}

fn verify_lambda(ctx: &mut Ctx) -> Result<(), Error> {
    if ctx.sys.is_linear() {
        return Err(Error::LinearSystem);
    }
    lambda(ctx)?;
    let rows = ctx.report.lambda_table.clone().expect("set by lambda");
    let atypical = atypical_values(&ctx.sys)?;
    for row in &rows {
        let h = Complex64::new(row.h[0], row.h[1]);
        ctx.check(
            format!("lambda at h = {h} splits over the infinite points"),
            row.lambda == row.per_point_sum,
            format!("lambda {} vs per-point sum {}", row.lambda, row.per_point_sum),
        );
        if atypical.iter().all(|a| (a - h).norm() > ATYPICAL_CLEARANCE) {
            ctx.check(
                format!("lambda vanishes at the typical value {h}"),
                row.lambda == 0,
                format!("lambda {}", row.lambda),
            );
        }
    }
    Ok(())
}

fn verify_infinity_cycles(ctx: &mut Ctx) -> Result<(), Error> {
    let n = ctx.sys.n();
    let n1 = n + 1;
    if !strictly_mixed(&ctx.sys) {
        return Err(Error::HypothesisNotMet("needs a_j a_k != 0 with j < (n+1)/2 < k".into()));
    }
    let low = (0..=n1).find(|&j| !ctx.sys.coeff_is_zero(j)).unwrap_or(0);
    let high = (0..=n1).rev().find(|&j| !ctx.sys.coeff_is_zero(j)).unwrap_or(n1);
    let targets: Vec<(bool, usize)> = [(true, low), (false, n1 - high)]
        .into_iter()
        .filter(|&(_, m)| m > 1 && 2 * m < n1)
        .collect();
    if targets.is_empty() {
        return Err(Error::HypothesisNotMet("no point at infinity of multiplicity 1 < N < (n+1)/2".into()));
    }
    let points = points_at_infinity(&ctx.sys)?;
    let theta = ctx.random_phase();
    let mut out = Vec::new();
    for (at_px, big_n) in targets {
        let name = if at_px { "P_x" } else { "P_y" };
        let p = points.iter().find(|p| if at_px { p.is_px } else { p.is_py }).expect("multiple point present");
        let rest = Complex64::new(0.0, 2.0 * PI / (big_n as f64 - 1.0));
        let mut devs: Vec<Vec<f64>> = Vec::new();
        for r in [1e-3, 1e-4] {
            let h = Complex64::from_polar(r, theta);
            let loops = lift_infinity_cycles(&ctx.sys, h, p, ctx.opts.samples)?;
            ctx.check(
                format!("{name} at |h| = {r:e}: {big_n} cycles"),
                loops.len() == big_n,
                format!("{} loops returned", loops.len()),
            );
            let mut d = Vec::new();
            for (i, lp) in loops.iter().enumerate() {
                let target = if i == 0 { Complex64::new(0.0, 2.0 * PI) } else { rest };
                let lpp = loop_period(&ctx.sys, format!("{name} loop {i} at |h| = {r:e}"), lp, target)?;
                d.push(lpp.deviation);
                out.push(lpp);
            }
            devs.push(d);
        }
        ctx.check(
            format!("{name}: one period near 2 pi i, the others near 2 pi i / {}", big_n - 1),
            devs[0].iter().all(|&d| d < ASYMPTOTIC_TOL),
            format!("deviations at |h| = 1e-3: {:?}", devs[0].iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>()),
        );
        ctx.check(
            format!("{name}: errors decrease"),
            devs[0].iter().zip(&devs[1]).all(|(a, b)| b <= a || *b < 1e-12),
            format!("deviations at |h| = 1e-4: {:?}", devs[1].iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>()),
        );
    }
    ctx.report.infinity_cycles = Some(out);
    Ok(())
}

pub fn scan_csv(scan: &ScanOut) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["h_re", "h_im", "T_re", "T_im", "|T−2πi|", "quadrature_error"]).expect("in-memory write");
    for s in &scan.samples {
        w.serialize((s.h[0], s.h[1], s.t[0], s.t[1], s.deviation, s.quadrature_error)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
