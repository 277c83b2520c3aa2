//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ysqht_core::qubit::{born_probability, dephase, pure_state, Analyzer};
use ysqht_core::sim::{aggregation_rng, SimAxis};
use ysqht_core::{
    aggregate, delta_threshold, dephase_oracle, estimate_ratios, gamma2_threshold, outcome_probabilities,
    run_acquisition, simulate_sweep, small_angle_threshold, sweep_delta, sweep_gamma2, ys_reversal,
    AcquisitionConfig, AggregationMode, Angle, NoiseParams, RatioEstimate, ScenarioParams, Threshold,
};

const THETA_25: f64 = 5.0 * PI / 36.0;
const DELTA_40: f64 = 2.0 * PI / 9.0;
/// Seed shared by the simulated reproductions; the CLI default.
const SEED: u64 = 0;

type Outcome = Result<String, String>;

fn angle(x: f64) -> Angle {
    Angle::new(x).unwrap()
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    check(elapsed < budget, format!("took {elapsed:?}, budget {budget:?}"))?;
    Ok(elapsed)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let dt = delta_threshold(0.1, 0.8, angle(THETA_25)).map_err(|e| e.to_string())?;
    let elapsed = within_budget(start, Duration::from_millis(1))?;
    let t = dt.threshold.reachable().ok_or("threshold unreachable")?;
    check((t.delta_std - 0.5576).abs() <= 0.001, format!("delta_th = {}", t.delta_std))?;
    Ok(format!("delta_th = {:.6} rad (target 0.5576 +- 0.001) in {elapsed:?}", t.delta_std))
}

fn criterion_2() -> Outcome {
    let noise = NoiseParams::new(DELTA_40).unwrap();
    let start = Instant::now();
    let t = gamma2_threshold(0.05, angle(THETA_25), &noise).map_err(|e| e.to_string())?;
    let elapsed = within_budget(start, Duration::from_millis(1))?;
    let t = t.reachable().ok_or("threshold unreachable")?;
    check((t - 0.4145).abs() <= 0.001, format!("gamma2_th = {t}"))?;
    Ok(format!("gamma2_th = {t:.6} (target 0.4145 +- 0.001) in {elapsed:?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let rho0 = pure_state(Angle::zero());
    let mut worst: f64 = 0.0;
    for i in 1..=20 {
        let noise = NoiseParams::new(1.2 * i as f64 / 20.0).unwrap();
        for j in 0..20 {
            let analyzer = Analyzer::new(angle(FRAC_PI_4 * j as f64 / 19.0));
            let closed = born_probability(&dephase(&rho0, &noise), &analyzer);
            let oracle = dephase_oracle(&rho0, &noise, &analyzer).map_err(|e| e.to_string())?;
            worst = worst.max((closed - oracle).abs());
        }
    }
    let elapsed = within_budget(start, Duration::from_secs(5))?;
    check(worst <= 1e-8, format!("max deviation {worst:e}"))?;
    Ok(format!("max |closed - quadrature| = {worst:.2e} over 20x20 grid in {elapsed:?}"))
}

/// Coverage of simulated points against analytic values.
#[derive(Default)]
struct Coverage {
    total: usize,
    within_2: usize,
    within_3: usize,
    worst_z: f64,
}

impl Coverage {
    fn add(&mut self, est: &RatioEstimate, target: f64) {
        let z = est.z_score(target).abs();
        self.total += 1;
        self.within_2 += usize::from(z <= 2.0);
        self.within_3 += usize::from(z <= 3.0);
        self.worst_z = self.worst_z.max(z);
    }

    fn check(&self) -> Result<String, String> {
        let frac2 = self.within_2 as f64 / self.total as f64;
        let summary = format!(
            "{}/{} within 3 sigma, {:.1}% within 2 sigma, worst |z| = {:.2}",
            self.within_3,
            self.total,
            100.0 * frac2,
            self.worst_z
        );
        check(self.within_3 == self.total && frac2 >= 0.95, summary.clone())?;
        Ok(summary)
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let theta = angle(THETA_25);
    let grid: Vec<f64> = (0..23).map(|i| 1.1 * i as f64 / 22.0).collect();
    let table = sweep_delta(theta, &[0.1], 0.8, &grid).map_err(|e| e.to_string())?;
    let base = AcquisitionConfig::new(theta, NoiseParams::noiseless(), SEED);
    let axis = SimAxis::Delta { grid: grid.clone(), gamma2: 0.8 };
    let sim = simulate_sweep(&base, &axis, &[0.1], AggregationMode::Stochastic).map_err(|e| e.to_string())?;
    let elapsed = within_budget(start, Duration::from_secs(30))?;

    let mut coverage = Coverage::default();
    for (row, point) in table.rows.iter().zip(&sim) {
        coverage.add(&point.q2_over_p2, row.q2_over_p2);
        coverage.add(&point.q_over_p[0], row.q_over_p[0]);
    }
    // both parts are reported even when one fails
    let coverage = coverage.check();
    let dt = delta_threshold(0.1, 0.8, theta).unwrap().threshold.reachable().unwrap().delta_std;
    let flag = (|| {
        let flips: Vec<usize> =
            table.rows.windows(2).enumerate().filter(|(_, w)| w[0].reversal[0] != w[1].reversal[0]).map(|(i, _)| i).collect();
        check(flips.len() == 1, format!("reversal flag flips {} times", flips.len()))?;
        let (lo, hi) = (table.rows[flips[0]].axis_value, table.rows[flips[0] + 1].axis_value);
        check(lo < dt && dt < hi && !table.rows[flips[0]].reversal[0], format!("flip at [{lo}, {hi}] misses {dt}"))?;
        Ok(format!("flag flips on [{lo:.3}, {hi:.3}] around {dt:.4}"))
    })();
    match (coverage, flag) {
        (Ok(c), Ok(f)) => Ok(format!("{c}; {f}; {elapsed:?}")),
        (c, f) => Err(format!("{}; {}", c.unwrap_or_else(|e| e), f.unwrap_or_else(|e| e))),
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let theta = angle(THETA_25);
    let noise = NoiseParams::new(DELTA_40).unwrap();
    let grid: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
    let gamma1 = [0.05, 0.4];
    let table = sweep_gamma2(theta, noise, &gamma1, &grid).map_err(|e| e.to_string())?;
    let base = AcquisitionConfig::new(theta, noise, SEED);
    let sim = simulate_sweep(&base, &SimAxis::Gamma2 { grid: grid.clone() }, &gamma1, AggregationMode::Stochastic)
        .map_err(|e| e.to_string())?;
    let elapsed = within_budget(start, Duration::from_secs(30))?;

    // simulated q2/p2 is constant: every point within 3 sigma of the weighted mean
    let weights: Vec<f64> = sim.iter().map(|p| p.q2_over_p2.std_error.powi(-2)).collect();
    let mean = sim.iter().zip(&weights).map(|(p, w)| p.q2_over_p2.value * w).sum::<f64>() / weights.iter().sum::<f64>();
    let worst = sim.iter().map(|p| p.q2_over_p2.z_score(mean).abs()).fold(0.0, f64::max);
    check(worst <= 3.0, format!("simulated q2/p2 deviates {worst:.2} sigma from its mean {mean}"))?;
    let analytic = table.rows[0].q2_over_p2;
    check(table.rows.iter().all(|r| r.q2_over_p2 == analytic), "analytic q2/p2 varies with gamma2")?;

    let crossings = table.crossings(0).map_err(|e| e.to_string())?;
    check(crossings.len() == 1, format!("gamma1 = 0.05 crosses {} times", crossings.len()))?;
    let c = crossings[0];
    check(c.lower <= 0.414 && 0.414 <= c.upper, format!("crossing bracket [{}, {}] misses 0.414", c.lower, c.upper))?;

    let below = table.rows.iter().filter(|r| r.axis_value <= 0.9 + 1e-12).all(|r| r.q_over_p[1] < 1.0);
    check(below, "q/p for gamma1 = 0.4 reaches 1 at gamma2 <= 0.9")?;
    Ok(format!(
        "sim q2/p2 mean {mean:.4} (analytic {analytic:.4}), worst dev {worst:.2} sigma; gamma1=0.05 crosses on [{:.2}, {:.2}] at {:.4}; gamma1=0.4 below 1 up to 0.9; {elapsed:?}",
        c.lower, c.upper, c.refined
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut reversals = 0;
    for n in 0..1000 {
        let t = rng.random_range(1e-6..FRAC_PI_4);
        let d = rng.random_range(1e-3..=1.2);
        let (g1, g2) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        let theta = angle(t);
        let noise = NoiseParams::new(d).unwrap();
        let params = ScenarioParams::new(theta, noise, g1, g2).unwrap();
        let reversal = ys_reversal(&params).reversal;
        let by_gamma2 = match gamma2_threshold(g1, theta, &noise).map_err(|e| e.to_string())? {
            Threshold::Reachable(th) => g2 > th,
            Threshold::Unreachable => false,
        };
        let by_delta = match delta_threshold(g1, g2, theta).map_err(|e| e.to_string())?.threshold {
            Threshold::Reachable(th) => noise.smearing() < th.smearing,
            Threshold::Unreachable => false,
        };
        check(
            reversal == by_gamma2 && reversal == by_delta,
            format!("point {n}: theta={t} delta={d} g1={g1} g2={g2}: {reversal} {by_gamma2} {by_delta}"),
        )?;
        let probs = outcome_probabilities(&params);
        check(probs.p1 >= probs.q1 && probs.p2 >= probs.q2, format!("point {n}: partitioned data favor B"))?;
        reversals += usize::from(reversal);
    }
    let elapsed = within_budget(start, Duration::from_secs(1))?;
    Ok(format!("1000 points agree ({reversals} reversals) in {elapsed:?}"))
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_ysqht"))
        .args(args)
        .env_remove("YSQHT_SEED")
        .output()
        .map_err(|e| e.to_string())
}

fn record_lines(path: &Path) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    Ok(text.lines().skip(1).map(String::from).collect())
}

fn json_estimate(v: &serde_json::Value, key: &str) -> Result<RatioEstimate, String> {
    serde_json::from_value(v[key].clone()).map_err(|e| format!("{key}: {e}"))
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for out in [&a, &b] {
        let status = run_cli(&["simulate", "--seed", "2024", "--out", out.to_str().unwrap()])?.status;
        check(status.success(), format!("simulate exited with {status}"))?;
    }
    let (la, lb) = (record_lines(&a)?, record_lines(&b)?);
    check(la.len() == 200 && la == lb, "record lines differ between identical runs")?;

    let out = run_cli(&["analyze", a.to_str().unwrap(), "--gamma1", "0.1", "--gamma2", "0.8", "--seed", "99", "--json"])?;
    check(out.status.success(), format!("analyze exited with {}", out.status))?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;

    let config = AcquisitionConfig::new(angle(THETA_25), NoiseParams::new(DELTA_40).unwrap(), 2024);
    let records = run_acquisition(&config).map_err(|e| e.to_string())?;
    let ratios = estimate_ratios(&records).map_err(|e| e.to_string())?;
    let agg = aggregate(&records, 0.1, 0.8, &mut aggregation_rng(99), AggregationMode::Stochastic)
        .map_err(|e| e.to_string())?;
    let pairs = [
        ("q1_over_p1", ratios.q1_over_p1),
        ("p2", ratios.p2),
        ("q2", ratios.q2),
        ("q2_over_p2", ratios.q2_over_p2),
        ("p", agg.p),
        ("q", agg.q),
        ("q_over_p", agg.q_over_p),
    ];
    for (key, expected) in pairs {
        let got = json_estimate(&report, key)?;
        check(got == expected, format!("{key}: analyze gave {got:?}, in-memory {expected:?}"))?;
    }
    Ok("200 byte-identical record lines; analyze reproduces 7 in-memory estimates exactly".into())
}

fn criterion_8() -> Outcome {
    let err = |t: f64| -> Result<f64, String> {
        let exact = delta_threshold(0.1, 0.8, angle(t))
            .map_err(|e| e.to_string())?
            .threshold
            .reachable()
            .ok_or("unreachable")?
            .smearing;
        let approx = small_angle_threshold(0.1, 0.8, angle(t)).map_err(|e| e.to_string())?;
        Ok((exact - approx).abs())
    };
    let (e05, e10, e20) = (err(0.05)?, err(0.1)?, err(0.2)?);
    check(e10 <= 3e-4, format!("error at theta = 0.1 is {e10:e}"))?;
    let slope_lo = (e10 / e05).log2();
    let slope_hi = (e20 / e10).log2();
    for s in [slope_lo, slope_hi] {
        check((s - 4.0).abs() <= 0.1, format!("error scales as theta^{s:.3}, expected theta^4"))?;
    }
    Ok(format!("error {e10:.3e} at theta = 0.1; log-log slopes {slope_lo:.3}, {slope_hi:.3}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 noise threshold checkpoint", criterion_1),
        ("2 gamma2 threshold checkpoint", criterion_2),
        ("3 closed form vs quadrature", criterion_3),
        ("4 delta sweep reproduction", criterion_4),
        ("5 gamma2 sweep reproduction", criterion_5),
        ("6 reversal property suite", criterion_6),
        ("7 determinism and round trip", criterion_7),
        ("8 small-angle approximation", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
