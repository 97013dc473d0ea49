use isochron::cycles::{MonodromyReport, PeriodScan};
use isochron::hamiltonian::{CriticalPoint, IsochronicityVerdict, Verdict, Witness};
use isochron::infinity::InfinitePoint;
use isochron::HomogeneousHamiltonianSystem;
use num_complex::Complex64;
use serde::Serialize;

use crate::spec::SystemSpec;

/// `[re, im]`.
pub type Cx = [f64; 2];

pub fn cx(z: Complex64) -> Cx {
    [z.re, z.im]
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    pub seed: u64,
    pub spec: SystemSpec,
    pub verdict: Option<VerdictOut>,
    pub critical_points: Option<CriticalOut>,
    pub infinite_points: Option<Vec<InfinitePointOut>>,
    pub lambda_table: Option<Vec<LambdaRow>>,
    pub period_scan: Option<ScanOut>,
    pub monodromy: Option<MonodromyOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saddle_periods: Option<Vec<LoopPeriod>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infinity_cycles: Option<Vec<LoopPeriod>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub error: Option<ErrorOut>,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &str, theorem: Option<&str>, seed: u64, spec: SystemSpec) -> Self {
        Report {
            command: command.to_string(),
            theorem: theorem.map(str::to_string),
            seed,
            spec,
            verdict: None,
            critical_points: None,
            infinite_points: None,
            lambda_table: None,
            period_scan: None,
            monodromy: None,
            saddle_periods: None,
            infinity_cycles: None,
            checks: Vec::new(),
            warnings: Vec::new(),
            error: None,
            exit_code: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictOut {
    pub verdict: &'static str,
    pub witness: Option<WitnessOut>,
    pub admissible_nonlinearities: bool,
    pub resonance_integers: Vec<i64>,
    /// The verdict and the admissibility test agree.
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum WitnessOut {
    /// Nonzero `a_j`, `a_k` with `2j < n + 1 < 2k`.
    Pair { j: usize, k: usize },
    /// Nonzero middle coefficient `a_{(n+1)/2}`.
    Resonant { j: usize },
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::IsochronousConditionI => "ConditionI",
        Verdict::IsochronousConditionII => "ConditionII",
        Verdict::IsochronousBoth => "Both",
        Verdict::NotIsochronous => "Not",
    }
}

impl VerdictOut {
    pub fn new(sys: &HomogeneousHamiltonianSystem, v: IsochronicityVerdict) -> Self {
        let admissible = sys.admissible_nonlinearities();
        VerdictOut {
            verdict: verdict_name(v.verdict),
            witness: v.witness.map(|w| match w {
                Witness::Pair(j, k) => WitnessOut::Pair { j, k },
                Witness::Resonant(j) => WitnessOut::Resonant { j },
            }),
            admissible_nonlinearities: admissible,
            resonance_integers: sys.resonance_integers(),
            consistent: admissible == v.is_isochronous(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriticalPointOut {
    pub x: Cx,
    pub y: Cx,
    pub value: Cx,
    pub hessian_rank: u8,
    pub milnor_number: usize,
    pub ak_type: usize,
    pub isolated: bool,
    /// `|grad H|` after polishing.
    pub residual: f64,
}

impl From<&CriticalPoint> for CriticalPointOut {
    fn from(p: &CriticalPoint) -> Self {
        CriticalPointOut {
            x: cx(p.x),
            y: cx(p.y),
            value: cx(p.value),
            hessian_rank: p.hessian_rank,
            milnor_number: p.milnor_number,
            ak_type: p.ak_type,
            isolated: p.isolated,
            residual: p.residual,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriticalOut {
    pub points: Vec<CriticalPointOut>,
    /// Saddles on `L_0` other than the origin.
    pub l0_saddles: Vec<CriticalPointOut>,
    pub atypical_values: Vec<Cx>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BranchOut {
    pub segment_start: (i64, i64),
    pub segment_end: (i64, i64),
    pub x_exponent: u32,
    pub y_valuation: u32,
    pub y_leading: Cx,
    pub residue: Cx,
    /// Change of the residue when the truncation order is doubled.
    pub residue_error: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResiduesAt {
    pub h: Cx,
    pub newton_polygon: Vec<(i64, i64)>,
    pub branches: Vec<BranchOut>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InfinitePointOut {
    pub beta: Cx,
    pub alpha: Cx,
    pub multiplicity: usize,
    pub is_px: bool,
    pub is_py: bool,
    pub residues: Vec<ResiduesAt>,
}

impl InfinitePointOut {
    pub fn new(p: &InfinitePoint) -> Self {
        InfinitePointOut {
            beta: cx(p.beta),
            alpha: cx(p.alpha),
            multiplicity: p.multiplicity,
            is_px: p.is_px,
            is_py: p.is_py,
            residues: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PointLambda {
    pub beta: Cx,
    pub alpha: Cx,
    pub lambda: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LambdaRow {
    pub h: Cx,
    /// The value used for the exact degree count, when it was exact.
    pub h_exact: Option<String>,
    pub lambda: usize,
    pub per_point: Vec<PointLambda>,
    pub per_point_sum: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleOut {
    pub h: Cx,
    pub t: Cx,
    /// `|T - 2 pi i|`.
    pub deviation: f64,
    pub quadrature_error: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FailureOut {
    pub h: Cx,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanOut {
    pub samples: Vec<SampleOut>,
    /// `max |T - 2 pi i|` over the accepted samples; null when none succeeded.
    pub statistic: Option<f64>,
    pub failures: Vec<FailureOut>,
}

impl From<&PeriodScan> for ScanOut {
    fn from(s: &PeriodScan) -> Self {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        ScanOut {
            samples: s
                .samples
                .iter()
                .map(|p| SampleOut {
                    h: cx(p.h),
                    t: cx(p.t),
                    deviation: (p.t - two_pi_i).norm(),
                    quadrature_error: p.quadrature_error,
                })
                .collect(),
            statistic: s.statistic.is_finite().then_some(s.statistic),
            failures: s.errors.iter().map(|e| FailureOut { h: cx(e.h), error: e.error.to_string() }).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MonodromyOut {
    pub case: u8,
    pub base_h: Cx,
    pub encircled: Cx,
    pub lasso_radius: f64,
    pub period_gamma: Cx,
    pub period_delta: Cx,
    pub period_after: Cx,
    pub saddle_periods: Vec<Cx>,
    pub shift: Cx,
    pub coefficient: Cx,
    pub m: i64,
    /// `|shift / -coefficient - m|`.
    pub residual: f64,
    pub passed: bool,
}

impl From<&MonodromyReport> for MonodromyOut {
    fn from(r: &MonodromyReport) -> Self {
        MonodromyOut {
            case: r.case,
            base_h: cx(r.base_h),
            encircled: cx(r.encircled),
            lasso_radius: r.lasso_radius,
            period_gamma: cx(r.period_gamma),
            period_delta: cx(r.period_delta),
            period_after: cx(r.period_after),
            saddle_periods: r.saddle_periods.iter().map(|&t| cx(t)).collect(),
            shift: cx(r.shift),
            coefficient: cx(r.coefficient),
            m: r.m,
            residual: r.residual,
            passed: r.passed,
        }
    }
}

/// A period attached to a named loop, with the target it is checked against.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LoopPeriod {
    pub label: String,
    pub h: Cx,
    pub t: Cx,
    pub quadrature_error: f64,
    pub target: Cx,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorOut {
    pub kind: String,
    pub message: String,
}
