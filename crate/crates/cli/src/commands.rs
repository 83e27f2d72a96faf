use std::fmt;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use tailbound::bounds::{
    self, BoundReport, FirstPProfile, FourthProfile, MomentProfile, PthProfile,
};
use tailbound::chaos::{self, io as chaos_io, ChaosCoefficients, HilbertMode, Model, VectorSystem};
use tailbound::distributions::{self, DiscreteDistribution};
use tailbound::oracle::{self, MomentConstraintSet, SupportGrid, Verdict};
use tailbound::{chaos_positivity_constant, Error, Event};

use crate::{ChaosInputArgs, ChaosMode, ChaosModel, Family, OracleMethod, ProfileArgs};

/// Tolerance for the `sharp` flag of `extremal`.
const SHARP_TOL: f64 = 1e-9;

pub struct Outcome {
    pub output: Output,
    pub exit: u8,
}

pub enum Output {
    Report(Value),
    /// Pre-rendered text, written as is regardless of `--format`.
    Text(String),
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { output: Output::Report(report), exit: 0 }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(Error::Domain(_) | Error::Input(_)) => 2,
            Failure::Core(Error::Infeasible) => 3,
            Failure::Core(Error::Dimension { .. } | Error::Convergence(_)) => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => f.write_str(msg),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

fn profiles(args: &ProfileArgs) -> Result<Vec<MomentProfile>, Failure> {
    let mut out = Vec::new();
    match (args.p, args.c1p, args.cp2) {
        (None, Some(_), _) => return Err(usage("--c1p needs --p")),
        (None, _, Some(_)) => return Err(usage("--cp2 needs --p")),
        (Some(_), None, None) => return Err(usage("--p needs --c1p or --cp2")),
        _ => {}
    }
    if let (Some(p), Some(c)) = (args.p, args.c1p) {
        out.push(FirstPProfile::new(p, c)?.into());
    }
    if let Some(x) = args.c42_fourth {
        out.push(FourthProfile::new(x)?.into());
    }
    if let (Some(p), Some(r)) = (args.p, args.cp2) {
        out.push(PthProfile::new(p, r)?.into());
    }
    if out.is_empty() {
        return Err(usage("supply --p with --c1p or --cp2, or --c42-fourth"));
    }
    Ok(out)
}

fn single_profile(args: &ProfileArgs) -> Result<MomentProfile, Failure> {
    let mut all = profiles(args)?;
    if all.len() != 1 {
        return Err(usage("exactly one moment profile is needed here"));
    }
    Ok(all.remove(0))
}

pub fn bound(args: &ProfileArgs, all: bool) -> Result<Outcome, Failure> {
    let profiles = profiles(args)?;
    let mut reports: Vec<BoundReport> = Vec::new();
    for profile in &profiles {
        let mut these = vec![bounds::classical_bound(profile)?, bounds::improved_bound(profile)?];
        if all {
            if let MomentProfile::FirstP(fp) = profile {
                these.push(bounds::bound_first_p_explicit(fp)?);
                if fp.p() == 2.0 {
                    these.push(bounds::bound_first_p(fp)?);
                }
            }
        }
        these.sort_by_key(|b| b.method);
        reports.extend(these);
    }
    let best = bounds::best_bound(&profiles)?;
    Ok(Outcome::ok(json!({ "bounds": to_value(&reports), "best": to_value(&best) })))
}

fn verification(d: &DiscreteDistribution, p: Option<f64>) -> Value {
    let m2 = d.raw_moment(2);
    let m4 = d.raw_moment(4);
    let mut v = json!({
        "mean": d.raw_moment(1),
        "abs_first_moment": d.abs_moment(1.0),
        "second_moment": m2,
        "fourth_moment": m4,
        "kurtosis": m4 / (m2 * m2),
        "total_mass": d.total_mass(),
        "prob_ge": d.prob_event(Event::GeZero),
        "prob_gt": d.prob_event(Event::GtZero),
        "prob_le": d.prob_event(Event::LeZero),
        "prob_lt": d.prob_event(Event::LtZero),
    });
    if let Some(p) = p {
        v["abs_p_moment"] = json!(d.abs_moment(p));
    }
    v
}

pub fn extremal(args: &ProfileArgs, epsilon: Option<f64>) -> Result<Outcome, Failure> {
    let profile = single_profile(args)?;
    let (witness, eps, p) = match profile {
        MomentProfile::FirstP(fp) => {
            if epsilon.is_some() {
                return Err(usage("--epsilon only applies to --c42-fourth"));
            }
            (distributions::extremal_first_p(fp.p(), fp.c1p())?, None, Some(fp.p()))
        }
        MomentProfile::Fourth(f) => {
            let x = f.x();
            match epsilon {
                None if x < bounds::fourth_splice_point() => {
                    (distributions::extremal_fourth_twopoint(x)?, None, None)
                }
                eps => {
                    let eps = eps.unwrap_or(0.0);
                    let member = distributions::extremal_fourth_family(x, eps)?;
                    (member.distribution, Some(eps), None)
                }
            }
        }
        MomentProfile::Pth(_) => {
            return Err(usage("no extremal distribution is known for the --cp2 profile"));
        }
    };
    let bound = bounds::improved_bound(&profile)?;
    // The bound covers X and -X, so the witness attains it on one side.
    let attained = witness.prob_event(Event::GtZero).min(witness.prob_event(Event::LtZero));
    let sharp = (attained - bound.value).abs() <= SHARP_TOL;

    let mut report = json!({
        "profile": to_value(&profile),
        "distribution": to_value(&witness),
    });
    if let Some(eps) = eps {
        report["epsilon"] = json!(eps);
    }
    report["verification"] = verification(&witness, p);
    report["bound"] = to_value(&bound);
    report["sharp"] = json!(sharp);
    Ok(Outcome::ok(report))
}

pub struct OracleArgs {
    pub profile: ProfileArgs,
    pub grid_points: usize,
    pub event: Event,
    pub method: OracleMethod,
    pub atoms: usize,
    pub one_sided_cap: bool,
    pub tol: f64,
}

pub fn oracle(args: &OracleArgs) -> Result<Outcome, Failure> {
    let profile = single_profile(&args.profile)?;
    if !(args.tol.is_finite() && args.tol >= 0.0) {
        return Err(usage("--tol must be a non-negative number"));
    }
    let mut cs = match &profile {
        MomentProfile::FirstP(fp) => MomentConstraintSet::first_p(fp),
        MomentProfile::Fourth(f) => MomentConstraintSet::fourth(f),
        MomentProfile::Pth(pp) => MomentConstraintSet::pth(pp),
    };
    if args.one_sided_cap {
        cs = cs.with_one_sided_cap();
    }
    let result = match args.method {
        OracleMethod::Lp => {
            let grid = SupportGrid::for_constraints(&cs, args.grid_points)?;
            oracle::min_prob_lp(&cs, &grid, args.event)?
        }
        OracleMethod::Parametric => oracle::min_prob_parametric(&cs, args.atoms, args.event)?,
    };
    let bound = bounds::improved_bound(&profile)?;
    let verdict = oracle::certify(&bound, &result, args.tol);
    let report = json!({
        "result": to_value(&result),
        "bound": to_value(&bound),
        "tol": args.tol,
        "verdict": to_value(&verdict),
    });
    let exit = if verdict == Verdict::BoundTooHigh { 4 } else { 0 };
    Ok(Outcome { output: Output::Report(report), exit })
}

enum ChaosInput {
    Matrix(ChaosCoefficients),
    Vectors(VectorSystem),
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn chaos_input(args: &ChaosInputArgs) -> Result<ChaosInput, Failure> {
    if let Some(path) = &args.matrix {
        return Ok(ChaosInput::Matrix(chaos_io::parse_matrix(&read(path)?)?));
    }
    if let Some(path) = &args.vectors {
        return Ok(ChaosInput::Vectors(chaos_io::parse_vectors_json(&read(path)?)?));
    }
    match args.all_ones {
        Some(0) => Err(usage("--all-ones needs n >= 1")),
        Some(n) => Ok(ChaosInput::Matrix(ChaosCoefficients::all_ones(n))),
        None => Err(usage("supply --matrix, --vectors or --all-ones")),
    }
}

/// `(ratio, ratio^4)` from second and fourth moments, `None` when `m2 = 0`.
fn ratios(m2: f64, m4: f64) -> Option<(f64, f64)> {
    (m2 > 0.0).then(|| (m4.powf(0.25) / m2.sqrt(), m4 / (m2 * m2)))
}

fn ratio_fields(report: &mut Value, m2: f64, m4: f64) -> Result<(), Failure> {
    let limit = 15f64.powf(0.25);
    match ratios(m2, m4) {
        Some((ratio, ratio4)) => {
            report["ratio"] = json!(ratio);
            report["ratio_fourth"] = json!(ratio4);
            let bound = bounds::bound_fourth(&FourthProfile::new(ratio4.max(1.0))?)?;
            report["fourth_moment_bound"] = json!(bound.value);
            report["checks"]["ratio_limit"] = json!(limit);
            report["checks"]["ratio_ok"] = json!(ratio <= limit + 1e-9);
        }
        None => {
            report["ratio"] = Value::Null;
            report["ratio_fourth"] = Value::Null;
        }
    }
    Ok(())
}

pub fn chaos(
    args: &ChaosInputArgs,
    mode: ChaosMode,
    samples: u64,
    model: ChaosModel,
    seed: u64,
) -> Result<Outcome, Failure> {
    let input = chaos_input(args)?;
    let floor = chaos_positivity_constant();
    if mode == ChaosMode::Mc && samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let mut report = match input {
        ChaosInput::Matrix(c) => {
            let mut report = json!({
                "input": { "kind": "matrix", "n": c.n() },
                "mode": mode_name(mode),
                "checks": { "positivity_constant": floor },
            });
            match mode {
                ChaosMode::Enum => {
                    let e = chaos::rademacher_enumerate(&c)?;
                    report["enumeration"] = to_value(&e);
                    ratio_fields(&mut report, e.m2, e.m4)?;
                    report["checks"]["prob_ge_ok"] = json!(e.prob_ge >= floor);
                    report["checks"]["prob_gt_ok"] =
                        if c.is_zero() { Value::Null } else { json!(e.prob_gt >= floor) };
                }
                ChaosMode::Spectral => {
                    let s = chaos::eigen_symmetric(&c)?;
                    let (m2, m4) = chaos::gaussian_chaos_moments(&s);
                    report["spectrum"] = json!({
                        "eigenvalues": s.eigenvalues,
                        "trace": s.trace(),
                        "frobenius_sq": s.frobenius_sq,
                        "fourth_power_sum": s.fourth_power_sum,
                    });
                    report["m2"] = json!(m2);
                    report["m4"] = json!(m4);
                    ratio_fields(&mut report, m2, m4)?;
                }
                ChaosMode::Mc => {
                    let model = match model {
                        ChaosModel::Rademacher => Model::Rademacher,
                        ChaosModel::Gaussian => Model::Gaussian,
                    };
                    let ge = chaos::mc_estimate(&c, model, Event::GeZero, samples, seed)?;
                    let gt = chaos::mc_estimate(&c, model, Event::GtZero, samples, seed)?;
                    report["model"] = to_value(&model);
                    report["prob_ge"] = to_value(&ge);
                    report["prob_gt"] = to_value(&gt);
                    report["checks"]["prob_ge_ok"] = json!(ge.estimate + 3.0 * ge.std_error >= floor);
                    report["checks"]["prob_gt_ok"] = if c.is_zero() {
                        Value::Null
                    } else {
                        json!(gt.estimate + 3.0 * gt.std_error >= floor)
                    };
                }
            }
            report
        }
        ChaosInput::Vectors(v) => {
            let hilbert_mode = match mode {
                ChaosMode::Enum => HilbertMode::Exact,
                ChaosMode::Mc => HilbertMode::Mc { samples, seed },
                ChaosMode::Spectral => {
                    return Err(usage("--mode spectral needs a coefficient matrix"));
                }
            };
            let h = chaos::hilbert_norm_probs(&v, hilbert_mode)?;
            let mut report = json!({
                "input": { "kind": "vectors", "n": v.len(), "dim": v.vectors()[0].len() },
                "mode": mode_name(mode),
                "norm_sq_sum": v.norm_sq_sum(),
                "p_upper": h.p_upper,
                "p_lower": h.p_lower,
                "checks": { "positivity_constant": floor },
            });
            match h.mc {
                Some((up, lo)) => {
                    report["mc_upper"] = to_value(&up);
                    report["mc_lower"] = to_value(&lo);
                    report["checks"]["p_upper_ok"] = json!(up.estimate + 3.0 * up.std_error >= floor);
                    report["checks"]["p_lower_ok"] = json!(lo.estimate + 3.0 * lo.std_error >= floor);
                }
                None => {
                    report["checks"]["p_upper_ok"] = json!(h.p_upper >= floor);
                    report["checks"]["p_lower_ok"] = json!(h.p_lower >= floor);
                }
            }
            report
        }
    };
    if mode == ChaosMode::Mc {
        report["samples"] = json!(samples);
        report["seed"] = json!(seed);
    }
    Ok(Outcome::ok(report))
}

fn mode_name(mode: ChaosMode) -> &'static str {
    match mode {
        ChaosMode::Enum => "enum",
        ChaosMode::Mc => "mc",
        ChaosMode::Spectral => "spectral",
    }
}

fn family_name(family: Family) -> &'static str {
    match family {
        Family::FirstP => "first-p",
        Family::Fourth => "fourth",
        Family::Pth => "pth",
    }
}

/// One CSV row: `x, classical, improved[, explicit]`.
fn curve_row(family: Family, p: f64, x: f64) -> Result<Vec<f64>, Failure> {
    let profile: MomentProfile = match family {
        Family::FirstP => FirstPProfile::new(p, x)?.into(),
        Family::Fourth => FourthProfile::new(x)?.into(),
        Family::Pth => PthProfile::new(p, x)?.into(),
    };
    let mut row = vec![x, bounds::classical_bound(&profile)?.value, bounds::improved_bound(&profile)?.value];
    if let MomentProfile::FirstP(fp) = profile {
        row.push(bounds::bound_first_p_explicit(&fp)?.value);
    }
    Ok(row)
}

pub fn curve(
    family: Family,
    p: Option<f64>,
    (lo, hi): (f64, f64),
    steps: usize,
    out: Option<&Path>,
) -> Result<Outcome, Failure> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(usage(format!("invalid range {lo}:{hi}; need LO < HI")));
    }
    if steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    let p = match (family, p) {
        (Family::Fourth, None) => f64::NAN,
        (Family::Fourth, Some(_)) => return Err(usage("--p does not apply to the fourth family")),
        (_, Some(p)) => p,
        (_, None) => return Err(usage("--p is required for this family")),
    };

    let mut header = vec!["x", "classical", "improved"];
    if family == Family::FirstP {
        header.push("explicit");
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&header).map_err(|e| usage(e.to_string()))?;
    for i in 0..=steps {
        let x = (lo * (steps - i) as f64 + hi * i as f64) / steps as f64;
        // Snap to 15 significant digits so 0.1:1 gives 0.3 rather than 0.30000000000000004.
        let x: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
        let row = curve_row(family, p, x)?;
        writer
            .write_record(row.iter().map(f64::to_string))
            .map_err(|e| usage(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| usage(e.to_string()))?;

    match out {
        Some(path) => {
            fs::write(path, &bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Outcome::ok(json!({
                "family": family_name(family),
                "out": path.display().to_string(),
                "rows": steps + 1,
                "columns": header,
            })))
        }
        None => {
            let text = String::from_utf8(bytes).expect("CSV output is UTF-8");
            Ok(Outcome { output: Output::Text(text), exit: 0 })
        }
    }
}
