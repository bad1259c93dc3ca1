//! Command bodies behind the `hypiso` binary: build a family from a
//! [`RunConfig`], run measurements and verdicts, and write CSV and JSON.
//!
//! Reports are deterministic for a fixed config. Floats are written with 17
//! significant digits and wall-clock timings go to a separate `timings.json`
//! so that `report.json` is byte-identical across runs.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::families::{geodesic_cap, Submanifold, SubmanifoldDocument};
use crate::measure::{monotonicity_curve, DensityEstimate, MonotonicityCurve, VolumeReport};
use crate::verify::{
    candidate_densities, check_laplacian_lemma, check_monotonicity,
    classical_isoperimetric_verdict, escalate_boundary_bound, linear_isoperimetric_verdict,
    max_density, measure, mobius_isoperimetric_verdict, mobius_volume,
    reverse_totally_geodesic_verdict, volume_lower_bound_verdict, InequalityVerdict,
    LaplacianReport, MobiusTarget, MobiusVolumeResult, TheoremId,
};

pub use config::{CurvePerturbation, FamilySpec, MeasureSettings, RunConfig, SweepSettings};

pub const REPORT_SCHEMA: &str = "hypiso-report-v1";

pub const SWEEP_HEADER: [&str; 6] = [
    "theta",
    "vol_sigma",
    "vol_boundary",
    "linear_slack",
    "classical_status",
    "reverse_slack",
];

/// Mathematical outcome of a command; numerical breakdown is an `Err` instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    /// `0` when every applicable verdict passed, `1` otherwise.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub vol_sigma: f64,
    pub vol_boundary: f64,
    pub linear_slack: f64,
    pub classical_status: String,
    pub reverse_slack: f64,
}

fn status(v: &InequalityVerdict) -> &'static str {
    if v.not_applicable {
        "not-applicable"
    } else if v.pass {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema: String,
    pub command: String,
    pub config: RunConfig,
    pub label: Option<String>,
    pub volume: Option<VolumeReport>,
    pub curve: Option<MonotonicityCurve>,
    pub densities: Vec<DensityEstimate>,
    pub verdicts: Vec<InequalityVerdict>,
    pub laplacian: Option<LaplacianReport>,
    pub mobius: Option<MobiusVolumeResult>,
    pub mobius_submanifold: Option<MobiusVolumeResult>,
    pub sweep: Vec<SweepRow>,
}

impl ReportBundle {
    fn new(command: &str, config: &RunConfig) -> Self {
        ReportBundle {
            schema: REPORT_SCHEMA.to_string(),
            command: command.to_string(),
            config: config.clone(),
            label: None,
            volume: None,
            curve: None,
            densities: Vec::new(),
            verdicts: Vec::new(),
            laplacian: None,
            mobius: None,
            mobius_submanifold: None,
            sweep: Vec::new(),
        }
    }

    /// Every applicable verdict passed, the Laplacian side checks held and
    /// any optimizer run converged.
    pub fn outcome(&self) -> Outcome {
        let verdicts = self.verdicts.iter().all(|v| v.acceptable());
        let laplacian = self.laplacian.as_ref().map_or(true, |l| l.passed());
        Outcome::from_pass(verdicts && laplacian)
    }

    pub fn verdict(&self, id: TheoremId) -> Option<&InequalityVerdict> {
        self.verdicts.iter().find(|v| v.theorem_id == id)
    }
}

/// Wall-clock seconds per stage, kept out of the deterministic report.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
pub struct Timings {
    pub stages: Vec<(String, f64)>,
}

impl Timings {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages
            .push((stage.to_string(), start.elapsed().as_secs_f64()));
        out
    }
}

/// Rewrite every non-integer number with 17 significant digits.
fn fix_digits(v: &mut Value) {
    match v {
        Value::Number(num) if !(num.is_i64() || num.is_u64()) => {
            if let Some(x) = num.as_f64() {
                if let Ok(fixed) = format!("{x:.16e}").parse::<Number>() {
                    *num = fixed;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(fix_digits),
        Value::Object(map) => map.values_mut().for_each(fix_digits),
        _ => {}
    }
}

/// Pretty JSON with floats at 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    fix_digits(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            fmt(r.theta),
            fmt(r.vol_sigma),
            fmt(r.vol_boundary),
            fmt(r.linear_slack),
            r.classical_status.clone(),
            fmt(r.reverse_slack),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_history_csv<W: Write>(result: &MobiusVolumeResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = result.maximizer.dim();
    let mut header = vec!["restart".to_string()];
    header.extend((1..=n).map(|i| format!("a{i}")));
    header.extend(["volume".to_string(), "best_so_far".to_string()]);
    w.write_record(&header)?;
    for step in &result.history {
        let mut rec = vec![step.restart.to_string()];
        rec.extend(step.translation.iter().map(|x| fmt(*x)));
        rec.push(step.volume.map_or(String::new(), fmt));
        rec.push(fmt(step.best_so_far));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// One cap per angle: volumes and the linear, classical and reverse verdicts.
pub fn sweep_theta(config: &RunConfig) -> Result<ReportBundle> {
    config.validate()?;
    let (k, n) = (config.sweep.k, config.sweep.n);
    let axis = nalgebra::DVector::from_fn(n, |i, _| if i + 1 == n { 1.0 } else { 0.0 });
    let results: Vec<Result<(SweepRow, [InequalityVerdict; 3])>> = config
        .sweep
        .grid()
        .par_iter()
        .map(|&theta| {
            let cap = geodesic_cap(k, n, theta, axis.clone())?;
            let m = measure(&cap, config.measure.truncation)?;
            let linear = linear_isoperimetric_verdict(&m);
            let classical = classical_isoperimetric_verdict(&m);
            let reverse = reverse_totally_geodesic_verdict(&m);
            let row = SweepRow {
                theta,
                vol_sigma: m.vol(),
                vol_boundary: m.boundary(),
                linear_slack: linear.slack,
                classical_status: status(&classical).to_string(),
                reverse_slack: reverse.slack,
            };
            Ok((row, [linear, classical, reverse]))
        })
        .collect();
    let mut bundle = ReportBundle::new("sweep-theta", config);
    for r in results {
        let (row, verdicts) = r?;
        bundle.sweep.push(row);
        bundle
            .verdicts
            .extend(verdicts.into_iter().filter(|v| config.wants(v.theorem_id)));
    }
    Ok(bundle)
}

fn perturbed(mut curve: MonotonicityCurve, config: &RunConfig) -> MonotonicityCurve {
    if let Some(p) = &config.perturb_curve {
        curve.ratios[p.index] += p.delta;
    }
    curve
}

/// The ratio `Vol_R(Σ ∩ B_r)/rᵏ` on the configured grid and its verdict.
pub fn monotonicity(config: &RunConfig) -> Result<ReportBundle> {
    config.validate()?;
    let sigma = config.family.build()?;
    let curve = perturbed(
        monotonicity_curve(&sigma, config.measure.grid_size)?,
        config,
    );
    let mut bundle = ReportBundle::new("monotonicity", config);
    bundle.label = Some(sigma.label.clone());
    bundle.verdicts.push(check_monotonicity(&curve));
    bundle.curve = Some(curve);
    Ok(bundle)
}

/// Möbius volume of the configured family or of its ideal boundary.
pub fn mobius(config: &RunConfig) -> Result<ReportBundle> {
    config.validate()?;
    let sigma = config.family.build()?;
    let opt = optimizer_config(config);
    let result = mobius_volume(&sigma, config.mobius_target, &opt)?;
    let mut bundle = ReportBundle::new("mobius", config);
    bundle.label = Some(sigma.label.clone());
    match config.mobius_target {
        MobiusTarget::IdealBoundary => bundle.mobius = Some(result),
        MobiusTarget::Submanifold => bundle.mobius_submanifold = Some(result),
    }
    Ok(bundle)
}

fn optimizer_config(config: &RunConfig) -> crate::verify::MobiusConfig {
    crate::verify::MobiusConfig {
        seed: config.seed,
        ..config.optimizer.clone()
    }
}

/// Every applicable verdict for the configured family.
pub fn verify_all(config: &RunConfig, timings: &mut Timings) -> Result<ReportBundle> {
    config.validate()?;
    let sigma = timings.time("build", || config.family.build())?;
    let mut bundle = ReportBundle::new("verify-all", config);
    bundle.label = Some(sigma.label.clone());
    let m = timings.time("volumes", || measure(&sigma, config.measure.truncation))?;
    let push = |v: InequalityVerdict, bundle: &mut ReportBundle| {
        if config.wants(v.theorem_id) {
            bundle.verdicts.push(v);
        }
    };
    push(linear_isoperimetric_verdict(&m), &mut bundle);
    push(classical_isoperimetric_verdict(&m), &mut bundle);
    if sigma.totally_geodesic {
        push(reverse_totally_geodesic_verdict(&m), &mut bundle);
    }
    push(volume_lower_bound_verdict(&sigma, &m), &mut bundle);
    bundle.volume = Some(m.volume.clone());

    if config.wants(TheoremId::Monotonicity) {
        let curve = timings.time("monotonicity", || {
            monotonicity_curve(&sigma, config.measure.grid_size)
        })?;
        let curve = perturbed(curve, config);
        push(check_monotonicity(&curve), &mut bundle);
        bundle.curve = Some(curve);
    }
    if config.wants(TheoremId::LaplacianLemma) {
        let lap = timings.time("laplacian", || {
            check_laplacian_lemma(&sigma, config.measure.laplacian_samples, config.seed)
        })?;
        push(lap.verdict.clone(), &mut bundle);
        bundle.laplacian = Some(lap);
    }
    let wants_mobius = [
        TheoremId::MobiusBoundary,
        TheoremId::MobiusDensity,
        TheoremId::MobiusIsop,
    ]
    .iter()
    .any(|id| config.wants(*id));
    if wants_mobius {
        mobius_verdicts(&sigma, config, &mut bundle, timings)?;
    }
    Ok(bundle)
}

fn mobius_verdicts(
    sigma: &Submanifold,
    config: &RunConfig,
    bundle: &mut ReportBundle,
    timings: &mut Timings,
) -> Result<()> {
    let opt = optimizer_config(config);
    let mut boundary = timings.time("mobius-boundary", || {
        mobius_volume(sigma, MobiusTarget::IdealBoundary, &opt)
    })?;
    if config.wants(TheoremId::MobiusBoundary) {
        let (v, b) =
            escalate_boundary_bound(sigma, &opt, boundary, 1.0, 0.0, TheoremId::MobiusBoundary)?;
        boundary = b;
        bundle.verdicts.push(v);
    }
    if config.wants(TheoremId::MobiusDensity) {
        let dens = timings.time("densities", || candidate_densities(sigma))?;
        let (theta, theta_err) = max_density(&dens);
        let (v, b) = escalate_boundary_bound(
            sigma,
            &opt,
            boundary,
            theta,
            theta_err,
            TheoremId::MobiusDensity,
        )?;
        boundary = b;
        bundle.verdicts.push(v);
        bundle.densities = dens;
    }
    if config.wants(TheoremId::MobiusIsop) {
        let interior = timings.time("mobius-submanifold", || {
            mobius_volume(sigma, MobiusTarget::Submanifold, &opt)
        })?;
        bundle.verdicts.push(mobius_isoperimetric_verdict(
            sigma.k, &interior, &boundary, &opt,
        ));
        bundle.mobius_submanifold = Some(interior);
    }
    bundle.mobius = Some(boundary);
    Ok(())
}

/// Files written by a command.
#[derive(Debug, Clone)]
pub struct Written {
    pub outcome: Outcome,
    pub files: Vec<PathBuf>,
}

/// Run a subcommand by name and write its outputs under `config.out_dir`.
pub fn run_command(command: &str, config: &RunConfig) -> Result<Written> {
    let dir = config.out_dir.clone();
    std::fs::create_dir_all(&dir)?;
    let mut timings = Timings::default();
    let mut files = Vec::new();
    let bundle = match command {
        "sweep-theta" => {
            let b = timings.time("sweep", || sweep_theta(config))?;
            write_sweep_csv(&b.sweep, create(&dir, "sweep.csv")?)?;
            files.push(dir.join("sweep.csv"));
            b
        }
        "monotonicity" => {
            let b = timings.time("monotonicity", || monotonicity(config))?;
            if let Some(c) = &b.curve {
                c.write_csv(create(&dir, "monotonicity.csv")?)?;
                files.push(dir.join("monotonicity.csv"));
            }
            b
        }
        "mobius" => {
            let b = timings.time("mobius", || mobius(config))?;
            let result = b
                .mobius
                .as_ref()
                .or(b.mobius_submanifold.as_ref())
                .expect("mobius result");
            write_json(&dir.join("mobius.json"), result)?;
            files.push(dir.join("mobius.json"));
            if config.history_csv {
                write_history_csv(result, create(&dir, "mobius_history.csv")?)?;
                files.push(dir.join("mobius_history.csv"));
            }
            b
        }
        "verify-all" => {
            let b = verify_all(config, &mut timings)?;
            if let Some(c) = &b.curve {
                c.write_csv(create(&dir, "monotonicity.csv")?)?;
                files.push(dir.join("monotonicity.csv"));
            }
            let sigma = config.family.build()?;
            write_json(
                &dir.join("submanifold.json"),
                &SubmanifoldDocument::new(&sigma, config.measure.document_grid),
            )?;
            files.push(dir.join("submanifold.json"));
            b
        }
        other => return Err(Error::Config(format!("unknown command {other}"))),
    };
    write_json(&dir.join("report.json"), &bundle)?;
    files.push(dir.join("report.json"));
    write_json(&dir.join("timings.json"), &timings)?;
    files.push(dir.join("timings.json"));

    let mut outcome = bundle.outcome();
    if command == "mobius" {
        let converged = bundle
            .mobius
            .iter()
            .chain(bundle.mobius_submanifold.iter())
            .all(|r| r.converged);
        if !converged {
            outcome = Outcome::Fail;
        }
    }
    Ok(Written { outcome, files })
}
