use std::path::{Path, PathBuf};

use igusa_core::bracket::{adjugate_identity_in, point_report_in, PointReport};
use igusa_core::covering::{check_candidate, thresholds_for, CandidateRecord, TensorCheck};
use igusa_core::module_lab::{
    generation_check_mminus, generation_check_mplus, hilbert_table, intersection_check,
    koszul_second_syzygy_holds, syzygy_check_mminus, syzygy_check_mplus, ModuleTag,
};
use igusa_core::real::MpFloat;
use igusa_core::theta::{
    all_quadrics, eval_f, eval_f_jet, SecondKindIndex, SiegelPoint, ThetaCharacteristic, ThetaEvaluator,
    TruncationPolicy,
};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_json, read_text, RunConfig};
use crate::error::CliError;
use crate::report::{Check, VerificationReport};

pub const TENSOR_FIXTURE: &str = include_str!("../fixtures/tensor_candidates.json");

fn computation(e: impl std::fmt::Display) -> CliError {
    CliError::Computation(e.to_string())
}

fn char_label(m: ThetaCharacteristic) -> String {
    format!("{}{}{}{}", m.m1[0], m.m1[1], m.m2[0], m.m2[1])
}

fn point_label(i: usize, z: &SiegelPoint) -> String {
    if z.is_diagonal() {
        format!("point{i}-diag")
    } else {
        format!("point{i}")
    }
}

/// Runs `body` with an evaluator in the configured precision.
fn with_evaluator<T>(
    cfg: &RunConfig,
    z: &SiegelPoint,
    policy: &TruncationPolicy,
    body: impl Fn(&dyn EvaluatorOps) -> Result<T, CliError>,
) -> Result<T, CliError> {
    match cfg.precision_bits {
        Some(bits) => body(&ThetaEvaluator::<MpFloat>::new(z, policy, bits)),
        None => body(&ThetaEvaluator::double(z, policy)),
    }
}

/// The evaluator operations the commands need, independent of precision.
trait EvaluatorOps {
    fn report(&self) -> Result<PointReport, CliError>;
    fn c5_gap(&self, c5: Complex64) -> Result<f64, CliError>;
}

impl<R: igusa_core::real::Real> EvaluatorOps for ThetaEvaluator<R> {
    fn report(&self) -> Result<PointReport, CliError> {
        point_report_in(self).map_err(computation)
    }

    fn c5_gap(&self, c5: Complex64) -> Result<f64, CliError> {
        let r = adjugate_identity_in(self, Some(c5)).map_err(computation)?;
        Ok(r.c5_gap.unwrap_or(f64::NAN))
    }
}

/// Largest `|∂_k f_a − central difference|` over the four series and three
/// coordinates.
fn derivative_gap(z: &SiegelPoint, policy: &TruncationPolicy, h: f64) -> Result<f64, CliError> {
    let step = Complex64::new(h, 0.0);
    let mut worst = 0.0f64;
    for a in SecondKindIndex::all() {
        let jet = eval_f_jet(a, z, policy).map_err(computation)?;
        for k in 0..3 {
            let plus = eval_f(a, &z.shifted(k, step).map_err(computation)?, policy).map_err(computation)?;
            let minus = eval_f(a, &z.shifted(k, -step).map_err(computation)?, policy).map_err(computation)?;
            worst = worst.max((jet.d[k] - (plus - minus) / (2.0 * h)).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct C5Statistics {
    pub mean: [f64; 2],
    /// `max_i |c_i − mean| / |mean|`.
    pub spread: f64,
    pub count: usize,
}

pub fn c5_statistics(estimates: &[Complex64]) -> Option<C5Statistics> {
    if estimates.len() < 2 {
        return None;
    }
    let mean = estimates.iter().sum::<Complex64>() / estimates.len() as f64;
    let spread = estimates.iter().map(|c| (c - mean).norm()).fold(0.0, f64::max) / mean.norm();
    Some(C5Statistics { mean: [mean.re, mean.im], spread, count: estimates.len() })
}

fn estimates_of(reports: &[PointReport]) -> Vec<Complex64> {
    reports.iter().filter_map(|r| r.c5_estimate).map(|[re, im]| Complex64::new(re, im)).collect()
}

fn point_reports(cfg: &RunConfig, points: &[SiegelPoint]) -> Result<Vec<PointReport>, CliError> {
    let policy = cfg.policy()?;
    points.iter().map(|z| with_evaluator(cfg, z, &policy, |e| e.report())).collect()
}

#[derive(Serialize)]
struct Inputs<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    points: &'a [SiegelPoint],
    extra: T,
}

/// Every numeric identity at every sample point.
pub fn verify(cfg: &RunConfig) -> Result<VerificationReport, CliError> {
    let (checks, data) = verify_checks(cfg)?;
    let points = cfg.sample_points();
    let inputs = Inputs { command: "verify", config: cfg, points: &points, extra: () };
    Ok(VerificationReport::new("verify", &inputs, checks, Some(data)))
}

fn verify_checks(cfg: &RunConfig) -> Result<(Vec<Check>, serde_json::Value), CliError> {
    let policy = cfg.policy()?;
    let points = cfg.sample_points();
    let t = &cfg.thresholds;
    let reports = point_reports(cfg, &points)?;
    let mut checks = Vec::new();
    for (i, (z, rep)) in points.iter().zip(&reports).enumerate() {
        let label = point_label(i, z);
        let res = &rep.residuals;
        for (n, r) in res.relations().iter().enumerate() {
            checks.push(Check::below(format!("{label}/R{}", n + 1), *r, t.relations));
        }
        checks.push(Check::below(format!("{label}/thetalink"), res.thetalink_max, t.thetalink));
        match res.chi5_sq {
            Some(rel) if !z.is_diagonal() => checks.push(Check::below(format!("{label}/chi5-squared"), rel, t.chi5_squared)),
            _ => checks.push(Check::below(format!("{label}/chi5-vanishes"), res.chi5_abs, t.chi5_diagonal)),
        }
        checks.push(Check::below(format!("{label}/adjugate"), res.adjugate, t.adjugate));
        let gap = derivative_gap(z, &policy, t.finite_difference_step)?;
        checks.push(Check::below(format!("{label}/derivatives"), gap, t.derivative));
    }
    let stats = c5_statistics(&estimates_of(&reports));
    if let Some(s) = stats {
        checks.push(Check::below("c5/spread", s.spread, t.c5_spread));
        let mean = Complex64::new(s.mean[0], s.mean[1]);
        for (i, (z, rep)) in points.iter().zip(&reports).enumerate() {
            if rep.c5_estimate.is_some() {
                let gap = with_evaluator(cfg, z, &policy, |e| e.c5_gap(mean))?;
                checks.push(Check::below(format!("{}/det-c5-chi5", point_label(i, z)), gap, t.adjugate));
            }
        }
    }
    let data = json!({ "points": reports, "c5": stats });
    Ok((checks, data))
}

pub fn estimate_c5(cfg: &RunConfig) -> Result<VerificationReport, CliError> {
    let points = cfg.sample_points();
    let reports = point_reports(cfg, &points)?;
    let estimates = estimates_of(&reports);
    let stats = c5_statistics(&estimates);
    let checks = match stats {
        Some(s) => vec![Check::below("c5/spread", s.spread, cfg.thresholds.c5_spread)],
        None => vec![Check::flag("c5/estimates", false).with_detail("fewer than two points away from the ramification locus")],
    };
    let per_point: Vec<_> = points
        .iter()
        .zip(&reports)
        .map(|(z, r)| json!({ "point": z, "estimate": r.c5_estimate }))
        .collect();
    let inputs = Inputs { command: "estimate-c5", config: cfg, points: &points, extra: () };
    Ok(VerificationReport::new("estimate-c5", &inputs, checks, Some(json!({ "c5": stats, "estimates": per_point }))))
}

/// Largest `max_r` each table accepts.
pub fn degree_limit(tag: ModuleTag) -> u32 {
    match tag {
        ModuleTag::MPlus => 16,
        ModuleTag::MMinus => 18,
        ModuleTag::TrivialCombined => 8,
        ModuleTag::Scalar | ModuleTag::ScalarTwisted | ModuleTag::ScalarTrivial => 400,
    }
}

pub fn default_max_r(tag: ModuleTag) -> u32 {
    match tag {
        ModuleTag::MPlus => 10,
        ModuleTag::MMinus => 12,
        ModuleTag::TrivialCombined => 5,
        ModuleTag::Scalar | ModuleTag::ScalarTwisted | ModuleTag::ScalarTrivial => 20,
    }
}

fn check_limit(what: String, max_r: u32, limit: u32) -> Result<(), CliError> {
    if max_r > limit {
        return Err(CliError::DegreeTooLarge { module: what, max_r, limit });
    }
    Ok(())
}

fn hilbert_checks(tag: ModuleTag, max_r: u32) -> Result<(Vec<Check>, serde_json::Value), CliError> {
    check_limit(tag.to_string(), max_r, degree_limit(tag))?;
    let table = hilbert_table(tag, max_r);
    let checks = table.iter().map(|h| Check::count(format!("hilbert/{tag}/r={}", h.r), h.computed, h.formula)).collect();
    Ok((checks, serde_json::to_value(&table).expect("table serializes")))
}

pub fn hilbert(cfg: &RunConfig, tag: ModuleTag) -> Result<VerificationReport, CliError> {
    let max_r = cfg.max_r.unwrap_or_else(|| default_max_r(tag));
    let (checks, data) = hilbert_checks(tag, max_r)?;
    let inputs = Inputs { command: "hilbert", config: cfg, points: &[], extra: (tag, max_r) };
    Ok(VerificationReport::new("hilbert", &inputs, checks, Some(data)))
}

fn generation_checks(max_plus: u32, max_minus: u32) -> Vec<Check> {
    let mut checks = Vec::new();
    for r in 0..=max_plus {
        let g = generation_check_mplus(r);
        let detail = format!("generated {} / kernel {}", g.generated_dim, g.kernel_dim);
        checks.push(Check::flag(format!("generation/M+/r={r}"), g.equal).with_detail(detail));
    }
    for r in 0..=max_minus {
        let g = generation_check_mminus(r);
        let detail = format!("generated {} / kernel {}", g.generated_dim, g.kernel_dim);
        checks.push(Check::flag(format!("generation/M-/r={r}"), g.equal).with_detail(detail));
    }
    checks
}

/// First degrees carrying relations among the generators.
pub const FIRST_SYZYGY_DEGREE_MPLUS: u32 = 3;
pub const FIRST_SYZYGY_DEGREE_MMINUS: u32 = 6;
const SYZYGY_LIMIT: u32 = 10;

fn syzygy_checks(modules: &[ModuleTag], max_r: u32) -> Result<(Vec<Check>, serde_json::Value), CliError> {
    check_limit("syzygy".into(), max_r, SYZYGY_LIMIT)?;
    let mut checks = vec![Check::flag("syzygy/koszul-second-syzygy", koszul_second_syzygy_holds())];
    let mut reports = Vec::new();
    for &tag in modules {
        let (first, run): (u32, fn(u32) -> _) = match tag {
            ModuleTag::MPlus => (FIRST_SYZYGY_DEGREE_MPLUS, syzygy_check_mplus),
            ModuleTag::MMinus => (FIRST_SYZYGY_DEGREE_MMINUS, syzygy_check_mminus),
            other => return Err(CliError::Config(format!("no syzygy check for {other}"))),
        };
        if max_r < first {
            return Err(CliError::DegreeTooSmall { what: format!("{tag} syzygies"), max_r, min: first });
        }
        for r in first..=max_r {
            let s = run(r);
            let detail = format!("relation space {} / spanned {} / formal {}", s.full_dim, s.span_dim, s.formal_count);
            checks.push(Check::flag(format!("syzygy/{tag}/r={r}/relations-hold"), s.relations_hold));
            checks.push(Check::flag(format!("syzygy/{tag}/r={r}/spanned"), s.spanned).with_detail(detail));
            reports.push(s);
        }
    }
    Ok((checks, serde_json::to_value(&reports).expect("reports serialize")))
}

pub fn syzygy(cfg: &RunConfig, modules: &[ModuleTag]) -> Result<VerificationReport, CliError> {
    let max_r = cfg.max_r.unwrap_or(8);
    let (checks, data) = syzygy_checks(modules, max_r)?;
    let inputs = Inputs { command: "syzygy", config: cfg, points: &[], extra: (modules, max_r) };
    Ok(VerificationReport::new("syzygy", &inputs, checks, Some(data)))
}

pub const FIRST_INTERSECTION_DEGREE: u32 = 6;
const INTERSECTION_LIMIT: u32 = 12;

fn intersect_checks(max_r: u32) -> Result<(Vec<Check>, serde_json::Value), CliError> {
    check_limit("intersect".into(), max_r, INTERSECTION_LIMIT)?;
    if max_r < FIRST_INTERSECTION_DEGREE {
        return Err(CliError::DegreeTooSmall { what: "intersect".into(), max_r, min: FIRST_INTERSECTION_DEGREE });
    }
    let reports: Vec<_> = (FIRST_INTERSECTION_DEGREE..=max_r).map(intersection_check).collect();
    let checks = reports
        .iter()
        .map(|x| {
            Check::flag(format!("intersect/r={}", x.r), x.equal_as_subspaces)
                .with_detail(format!("intersection {} / product {}", x.lhs_dim, x.rhs_dim))
        })
        .collect();
    Ok((checks, serde_json::to_value(&reports).expect("reports serialize")))
}

pub fn intersect(cfg: &RunConfig) -> Result<VerificationReport, CliError> {
    let max_r = cfg.max_r.unwrap_or(10);
    let (checks, data) = intersect_checks(max_r)?;
    let inputs = Inputs { command: "intersect", config: cfg, points: &[], extra: max_r };
    Ok(VerificationReport::new("intersect", &inputs, checks, Some(data)))
}

fn quadric_checks(cfg: &RunConfig) -> Result<(Vec<Check>, serde_json::Value), CliError> {
    let policy = cfg.policy()?;
    let points = cfg.sample_points();
    let evaluators: Vec<_> = points.iter().map(|z| ThetaEvaluator::double(z, &policy)).collect();
    let mut checks = Vec::new();
    let mut data = Vec::new();
    for (m, q) in all_quadrics() {
        let mut worst = 0.0f64;
        for e in &evaluators {
            worst = worst.max(e.thetalink_residual(m).map_err(computation)?);
        }
        let detail = serde_json::to_string(&q.coeffs).expect("matrix serializes");
        checks.push(Check::below(format!("quadric/m={}", char_label(m)), worst, cfg.thresholds.thetalink).with_detail(detail));
        data.push(json!({ "characteristic": m, "matrix": q.coeffs }));
    }
    Ok((checks, serde_json::Value::Array(data)))
}

pub fn quadrics(cfg: &RunConfig) -> Result<VerificationReport, CliError> {
    let (checks, data) = quadric_checks(cfg)?;
    let points = cfg.sample_points();
    let inputs = Inputs { command: "quadrics", config: cfg, points: &points, extra: () };
    Ok(VerificationReport::new("quadrics", &inputs, checks, Some(data)))
}

/// `"pass"`, or `"fail-"` followed by the first failing condition.
pub fn classification(c: &TensorCheck) -> String {
    match c.membership.failed().first() {
        None => "pass".into(),
        Some(cond) => format!("fail-{cond}"),
    }
}

/// `d = D` whenever `(a+1) | k`, over `a ≤ 4`, `k ≤ 24`.
pub fn thresholds_grid_holds() -> bool {
    (1..=4u32).all(|a| {
        (0..=24u64).filter(|k| k % (a as u64 + 1) == 0).all(|k| {
            let t = thresholds_for(&[a], k).expect("nonempty");
            t.d == t.big_d
        })
    })
}

fn tensor_checks(text: &str, path: &Path) -> Result<(Vec<Check>, serde_json::Value), CliError> {
    let records: Vec<CandidateRecord> = parse_json(path, text)?;
    let mut checks = vec![Check::flag("tensor/thresholds-grid", thresholds_grid_holds())];
    let mut results = Vec::new();
    for (i, mut rec) in records.into_iter().enumerate() {
        let name = rec.name.clone().unwrap_or_else(|| format!("candidate{i}"));
        rec.name = Some(name.clone());
        let expect = rec.expect.clone();
        let result = check_candidate(rec).map_err(|e| CliError::Computation(format!("{name}: {e}")))?;
        let class = classification(&result);
        let check = match &expect {
            Some(want) => Check::flag(format!("tensor/{name}/classification"), &class == want)
                .with_detail(format!("got {class}, expected {want}")),
            None => Check::flag(format!("tensor/{name}/member"), result.membership.member).with_detail(class),
        };
        checks.push(check);
        if let Some(agree) = result.oracle_agrees {
            checks.push(Check::flag(format!("tensor/{name}/oracle"), agree));
        }
        results.push(result);
    }
    Ok((checks, serde_json::to_value(&results).expect("results serialize")))
}

pub fn tensor_check(cfg: &RunConfig, candidates: Option<&PathBuf>) -> Result<VerificationReport, CliError> {
    let builtin = PathBuf::from("<builtin tensor candidates>");
    let (text, path) = match candidates {
        Some(p) => (read_text(p)?, p.clone()),
        None => (TENSOR_FIXTURE.to_string(), builtin),
    };
    let (checks, data) = tensor_checks(&text, &path)?;
    let inputs = Inputs { command: "tensor-check", config: cfg, points: &[], extra: &text };
    Ok(VerificationReport::new("tensor-check", &inputs, checks, Some(data)))
}

/// Every check at the default acceptance ranges, in a fixed order.
pub fn suite(cfg: &RunConfig) -> Result<VerificationReport, CliError> {
    let mut checks = verify_checks(cfg)?.0;
    for (tag, max_r) in [(ModuleTag::MPlus, 10), (ModuleTag::MMinus, 12), (ModuleTag::TrivialCombined, 5)] {
        checks.extend(hilbert_checks(tag, max_r)?.0);
    }
    checks.extend(generation_checks(8, 10));
    checks.extend(syzygy_checks(&[ModuleTag::MPlus, ModuleTag::MMinus], 8)?.0);
    checks.extend(intersect_checks(10)?.0);
    checks.extend(quadric_checks(cfg)?.0);
    checks.extend(tensor_checks(TENSOR_FIXTURE, &PathBuf::from("<builtin tensor candidates>"))?.0);
    let points = cfg.sample_points();
    let inputs = Inputs { command: "suite", config: cfg, points: &points, extra: TENSOR_FIXTURE };
    Ok(VerificationReport::new("suite", &inputs, checks, None))
}
