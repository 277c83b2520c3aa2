use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;
use ysqht_core::io::{
    parse_count_log, parse_list, parse_range, write_count_log, write_sweep_csv, RunManifest, RunParams, SweepParams,
};
use ysqht_core::sim::{aggregation_rng, Aggregate, PoissonCrossCheck, SimAxis, SimulatedPoint};
use ysqht_core::ys::{verdict, DeltaThreshold, FeasibilityBounds, SweepTable};
use ysqht_core::{
    aggregate, delta_threshold, estimate_ratios, gamma2_threshold, outcome_probabilities, run_acquisition,
    simulate_sweep, small_angle_threshold, sweep_delta, sweep_gamma2, AcquisitionConfig, AggregationMode, Angle,
    NoiseParams, RatioEstimate, ScenarioParams, Threshold, YsVerdict,
};

use crate::args::{AcquisitionArgs, AnalyzeArgs, Axis, Cli, Command, SimulateArgs, SweepArgs, TheoryArgs};
use crate::error::CliError;

/// Seed used when neither `--seed` nor `YSQHT_SEED` is given.
pub const DEFAULT_SEED: u64 = 0;

pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Theory(args) => theory(args),
        Command::Simulate(args) => simulate(args).map(|_| ExitCode::SUCCESS),
        Command::Analyze(args) => analyze(args).map(|_| ExitCode::SUCCESS),
        Command::Sweep(args) => sweep(args).map(|_| ExitCode::SUCCESS),
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn angle_unit(degrees: bool) -> f64 {
    if degrees {
        std::f64::consts::PI / 180.0
    } else {
        1.0
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

#[derive(Debug, Serialize)]
struct TheoryReport {
    theta: f64,
    delta_std: Option<f64>,
    smearing: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    p1: f64,
    q1: f64,
    p2: Option<f64>,
    q2: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    q1_over_p1: f64,
    q2_over_p2: Option<f64>,
    q_over_p: Option<f64>,
    gamma2_threshold: Option<Threshold<f64>>,
    delta_threshold: Option<DeltaThreshold>,
    small_angle_smearing_threshold: Option<f64>,
    feasibility: Option<FeasibilityReport>,
    verdict: Option<YsVerdict>,
    /// Quantities that could not be evaluated, with the reason.
    notes: Vec<String>,
}

#[derive(Debug, Serialize)]
struct FeasibilityReport {
    #[serde(flatten)]
    bounds: FeasibilityBounds,
    smearing_below_loose: Option<bool>,
    smearing_below_tight: Option<bool>,
}

fn theory_report(args: &TheoryArgs) -> Result<TheoryReport, CliError> {
    let unit = angle_unit(args.degrees);
    let theta = Angle::new(args.theta * unit)?;
    let noise = args.delta_std.map(|d| NoiseParams::new(d * unit)).transpose()?;
    let mut notes = Vec::new();

    // gamma values only enter the aggregated quantities
    let g1 = args.gamma1.unwrap_or(0.0);
    let g2 = args.gamma2.unwrap_or(0.0);
    let base = ScenarioParams::new(theta, noise.unwrap_or(NoiseParams::noiseless()), g1, g2)?;
    let probs = outcome_probabilities(&base);

    let mut report = TheoryReport {
        theta: theta.radians(),
        delta_std: noise.map(|n| n.delta_std()),
        smearing: noise.map(|n| n.smearing()),
        gamma1: args.gamma1,
        gamma2: args.gamma2,
        p1: probs.p1,
        q1: probs.q1,
        p2: None,
        q2: None,
        p: None,
        q: None,
        q1_over_p1: probs.q1_over_p1(),
        q2_over_p2: None,
        q_over_p: None,
        gamma2_threshold: None,
        delta_threshold: None,
        small_angle_smearing_threshold: None,
        feasibility: None,
        verdict: None,
        notes: Vec::new(),
    };

    if noise.is_some() {
        report.p2 = Some(probs.p2);
        report.q2 = Some(probs.q2);
        report.q2_over_p2 = Some(probs.q2_over_p2());
        if args.gamma1.is_some() && args.gamma2.is_some() {
            report.p = Some(probs.p);
            report.q = Some(probs.q);
            report.q_over_p = Some(probs.q_over_p());
            report.verdict = Some(verdict(&probs));
        }
    }

    match FeasibilityBounds::for_theta(theta) {
        Ok(bounds) => {
            report.feasibility = Some(FeasibilityReport {
                bounds,
                smearing_below_loose: noise.map(|n| bounds.satisfies_loose(n.smearing())),
                smearing_below_tight: noise.map(|n| bounds.admits_reversal(n.smearing())),
            })
        }
        Err(e) => notes.push(format!("thresholds: {e}")),
    }
    if report.feasibility.is_some() {
        if let (Some(g1), Some(n)) = (args.gamma1, noise) {
            match gamma2_threshold(g1, theta, &n) {
                Ok(t) => report.gamma2_threshold = Some(t),
                Err(e) => notes.push(format!("gamma2 threshold: {e}")),
            }
        }
        if let (Some(g1), Some(g2)) = (args.gamma1, args.gamma2) {
            report.delta_threshold = Some(delta_threshold(g1, g2, theta)?);
            match small_angle_threshold(g1, g2, theta) {
                Ok(t) => report.small_angle_smearing_threshold = Some(t),
                Err(e) => notes.push(format!("small-angle threshold: {e}")),
            }
        }
    }
    report.notes = notes;
    Ok(report)
}

fn fmt_threshold(t: &Threshold<f64>) -> String {
    match t {
        Threshold::Reachable(v) => format!("{v:.6}"),
        Threshold::Unreachable => "unreachable".into(),
    }
}

fn render_theory(r: &TheoryReport) -> String {
    let mut s = String::new();
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
    let _ = writeln!(s, "theta      = {:.6} rad", r.theta);
    let _ = writeln!(s, "delta_std  = {} rad   smearing = {}", opt(r.delta_std), opt(r.smearing));
    let _ = writeln!(s, "gamma1     = {}   gamma2 = {}", opt(r.gamma1), opt(r.gamma2));
    let _ = writeln!(s, "p1 = {:.6}   q1 = {:.6}   q1/p1 = {:.6}", r.p1, r.q1, r.q1_over_p1);
    let _ = writeln!(s, "p2 = {}   q2 = {}   q2/p2 = {}", opt(r.p2), opt(r.q2), opt(r.q2_over_p2));
    let _ = writeln!(s, "p  = {}   q  = {}   q/p   = {}", opt(r.p), opt(r.q), opt(r.q_over_p));
    if let Some(t) = &r.gamma2_threshold {
        let _ = writeln!(s, "gamma2 threshold        : {}", fmt_threshold(t));
    }
    if let Some(t) = &r.delta_threshold {
        match t.threshold {
            Threshold::Reachable(n) => {
                let _ = writeln!(s, "noise threshold         : delta_std > {:.6} rad (smearing < {:.6})", n.delta_std, n.smearing);
            }
            Threshold::Unreachable => {
                let _ = writeln!(s, "noise threshold         : unreachable");
            }
        }
    }
    if let Some(t) = r.small_angle_smearing_threshold {
        let _ = writeln!(s, "small-angle smearing thr: {t:.6}");
    }
    if let Some(f) = &r.feasibility {
        let flag = |b: Option<bool>| b.map_or("-".to_string(), |b| b.to_string());
        let _ = writeln!(
            s,
            "feasibility             : smearing < 2cos2theta = {:.6}: {}; smearing < cos2theta = {:.6}: {}",
            f.bounds.loose,
            flag(f.smearing_below_loose),
            f.bounds.tight,
            flag(f.smearing_below_tight)
        );
    }
    if let Some(v) = &r.verdict {
        let _ = writeln!(
            s,
            "partitioned favor A     : {} / {}   aggregated favor B: {}   reversal: {}",
            v.partitioned_favor_a.0, v.partitioned_favor_a.1, v.aggregated_favor_b, v.reversal
        );
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn theory(args: TheoryArgs) -> Result<ExitCode, CliError> {
    let report = theory_report(&args)?;
    if args.json {
        print_json(&report);
    } else {
        print!("{}", render_theory(&report));
    }
    let reversal = report.verdict.is_some_and(|v| v.reversal);
    Ok(if args.check_reversal && reversal { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn acquisition_config(args: &AcquisitionArgs, delta_std: f64) -> Result<AcquisitionConfig, CliError> {
    let unit = angle_unit(args.degrees);
    let mut config = AcquisitionConfig::new(
        Angle::new(args.theta * unit)?,
        NoiseParams::new(delta_std * unit)?,
        args.seed.unwrap_or(DEFAULT_SEED),
    );
    config.iterations = args.iterations;
    config.mean_rate = args.rate;
    config.window_seconds = args.window;
    config.validate()?;
    Ok(config)
}

fn acquisition_params(config: &AcquisitionConfig) -> RunParams {
    RunParams {
        theta: config.theta.radians(),
        delta_std: Some(config.noise.delta_std()),
        iterations: Some(config.iterations),
        mean_rate: Some(config.mean_rate),
        window_seconds: Some(config.window_seconds),
        seed: Some(config.seed),
        ..RunParams::default()
    }
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    if args.acquisition.seed.is_none() {
        log::warn!("no --seed or YSQHT_SEED given, using {DEFAULT_SEED}");
    }
    let config = acquisition_config(&args.acquisition, args.delta_std)?;
    let records = run_acquisition(&config)?;
    let manifest = RunManifest::new("simulate", acquisition_params(&config), timestamp());
    let out = create(&args.out)?;
    write_count_log(out, &manifest, &records).map_err(|e| CliError::io(&args.out, e))?;
    eprintln!("wrote {} records to {}", records.len(), args.out.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    log: PathBuf,
    theta: f64,
    delta_std: Option<f64>,
    gamma1: f64,
    gamma2: f64,
    mode: AggregationMode,
    seed: u64,
    iterations: usize,
    excluded: usize,
    q1_over_p1: RatioEstimate,
    p2: RatioEstimate,
    q2: RatioEstimate,
    q2_over_p2: RatioEstimate,
    p: RatioEstimate,
    q: RatioEstimate,
    q_over_p: RatioEstimate,
    poisson: PoissonCrossCheck,
    analytic: Option<AnalyticRatios>,
}

#[derive(Debug, Serialize)]
struct AnalyticRatios {
    q1_over_p1: f64,
    p2: f64,
    q2: f64,
    q2_over_p2: f64,
    q_over_p: f64,
}

fn analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let file = File::open(&args.log).map_err(|e| CliError::io(&args.log, e))?;
    let log = parse_count_log(BufReader::new(file)).map_err(|e| CliError::from_log(&args.log, e))?;
    let params = &log.manifest.params;
    let seed = args.seed.or(params.seed).unwrap_or(DEFAULT_SEED);
    let mode = AggregationMode::from(args.mode);

    let data_err = |e: ysqht_core::Error| CliError::Corrupt(format!("{}: {e}", args.log.display()));
    let ratios = estimate_ratios(&log.records).map_err(data_err)?;
    let mut rng = aggregation_rng(seed);
    let agg: Aggregate = match aggregate(&log.records, args.gamma1, args.gamma2, &mut rng, mode) {
        Ok(a) => a,
        Err(e @ ysqht_core::Error::InvalidArgument(_)) => return Err(e.into()),
        Err(e) => return Err(data_err(e)),
    };

    let analytic = match params.delta_std {
        Some(d) => {
            let scenario = ScenarioParams::new(Angle::new(params.theta)?, NoiseParams::new(d)?, args.gamma1, args.gamma2);
            scenario.ok().map(|s| {
                let probs = outcome_probabilities(&s);
                AnalyticRatios {
                    q1_over_p1: probs.q1_over_p1(),
                    p2: probs.p2,
                    q2: probs.q2,
                    q2_over_p2: probs.q2_over_p2(),
                    q_over_p: probs.q_over_p(),
                }
            })
        }
        None => None,
    };

    let report = AnalyzeReport {
        log: args.log.clone(),
        theta: params.theta,
        delta_std: params.delta_std,
        gamma1: args.gamma1,
        gamma2: args.gamma2,
        mode,
        seed,
        iterations: log.records.len(),
        excluded: ratios.excluded,
        q1_over_p1: ratios.q1_over_p1,
        p2: ratios.p2,
        q2: ratios.q2,
        q2_over_p2: ratios.q2_over_p2,
        p: agg.p,
        q: agg.q,
        q_over_p: agg.q_over_p,
        poisson: ratios.poisson,
        analytic,
    };
    if args.json {
        print_json(&report);
    } else {
        print!("{}", render_analysis(&report));
    }
    Ok(())
}

fn render_analysis(r: &AnalyzeReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: {} iterations ({} excluded), gamma1 = {}, gamma2 = {}, mode = {}, seed = {}",
        r.log.display(),
        r.iterations,
        r.excluded,
        r.gamma1,
        r.gamma2,
        r.mode,
        r.seed
    );
    let rows: [(&str, &RatioEstimate, Option<f64>); 7] = [
        ("q1/p1", &r.q1_over_p1, r.analytic.as_ref().map(|a| a.q1_over_p1)),
        ("p2", &r.p2, r.analytic.as_ref().map(|a| a.p2)),
        ("q2", &r.q2, r.analytic.as_ref().map(|a| a.q2)),
        ("q2/p2", &r.q2_over_p2, r.analytic.as_ref().map(|a| a.q2_over_p2)),
        ("p", &r.p, None),
        ("q", &r.q, None),
        ("q/p", &r.q_over_p, r.analytic.as_ref().map(|a| a.q_over_p)),
    ];
    for (name, e, theory) in rows {
        let _ = write!(s, "{name:>6} = {:.6} ± {:.6}", e.value, e.std_error);
        if let Some(t) = theory {
            let _ = write!(s, "   (theory {t:.6}, z = {:+.2})", e.z_score(t));
        }
        s.push('\n');
    }
    let p = &r.poisson;
    let _ = writeln!(s, "poisson cross-check on summed counts:");
    for (name, e) in [("q1/p1", p.q1_over_p1), ("p2", p.p2), ("q2", p.q2), ("q2/p2", p.q2_over_p2)] {
        let _ = writeln!(s, "{name:>6} = {:.6} ± {:.6}", e.value, e.std_error);
    }
    s
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let unit = angle_unit(args.acquisition.degrees);
    let range = parse_range(&args.range)?;
    let range = match args.axis {
        Axis::Delta => range.scaled(unit)?,
        Axis::Gamma2 => range,
    };
    let grid = range.values();
    let gamma1 = parse_list(&args.gamma1)?;
    let config = acquisition_config(&args.acquisition, args.delta_std)?;
    let theta = config.theta;

    let table: SweepTable = match args.axis {
        Axis::Delta => sweep_delta(theta, &gamma1, args.gamma2, &grid)?,
        Axis::Gamma2 => sweep_gamma2(theta, config.noise, &gamma1, &grid)?,
    };
    let mode = AggregationMode::from(args.mode);
    let simulated: Option<Vec<SimulatedPoint>> = if args.with_sim {
        let axis = match args.axis {
            Axis::Delta => SimAxis::Delta { grid: grid.clone(), gamma2: args.gamma2 },
            Axis::Gamma2 => SimAxis::Gamma2 { grid: grid.clone() },
        };
        Some(simulate_sweep(&config, &axis, &gamma1, mode)?)
    } else {
        None
    };

    let out = create(&args.out)?;
    write_sweep_csv(out, &table, simulated.as_deref()).map_err(|e| CliError::Io {
        path: args.out.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    })?;

    let mut params = RunParams {
        theta: theta.radians(),
        gamma1: gamma1.clone(),
        sweep: Some(SweepParams {
            axis: match args.axis {
                Axis::Delta => "delta".into(),
                Axis::Gamma2 => "gamma2".into(),
            },
            min: range.min,
            max: range.max,
            points: range.points,
            with_sim: args.with_sim,
        }),
        ..RunParams::default()
    };
    match args.axis {
        Axis::Delta => params.gamma2 = Some(args.gamma2),
        Axis::Gamma2 => params.delta_std = Some(config.noise.delta_std()),
    }
    if args.with_sim {
        let acq = acquisition_params(&config);
        params.iterations = acq.iterations;
        params.mean_rate = acq.mean_rate;
        params.window_seconds = acq.window_seconds;
        params.seed = acq.seed;
        params.mode = Some(mode);
    }
    let manifest = RunManifest::new("sweep", params, timestamp());
    let mpath = manifest_path(&args.out);
    let mut mfile = create(&mpath)?;
    writeln!(mfile, "{}", serde_json::to_string_pretty(&manifest).expect("manifest serializes"))
        .and_then(|_| mfile.flush())
        .map_err(|e| CliError::io(&mpath, e))?;

    eprintln!("wrote {} rows to {} (manifest {})", table.rows.len(), args.out.display(), mpath.display());
    for (i, g1) in gamma1.iter().enumerate() {
        for c in table.crossings(i)? {
            eprintln!(
                "gamma1 = {g1}: q/p crosses 1 between {} = {} and {} (refined {:.6})",
                table.axis.name(),
                c.lower,
                c.upper,
                c.refined
            );
        }
    }
    Ok(())
}
