//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Run with `cargo test -p tstar-cli --test acceptance`.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tstar_cli::bench::{draw_conditions, is_timing_column, run_bench, BenchConfig, BenchRecord, BenchReport, COLUMNS};
use tstar_core::bounds::lower_bound;
use tstar_core::dubins::{dubins_candidates, dubins_shortest, Pose};
use tstar_core::gridworld::{collision_free, generate_scenario, Transition};
use tstar_core::oracle::{all_classes, canonicalize, Family, OracleMemo, TransitionOracle};
use tstar_core::planner::lattice;
use tstar_core::{BoundKind, Scenario, VehicleParams, WindVector};

/// Cost comparisons between planners and against Dijkstra.
const COST_TOL: f64 = 1e-9;
/// Dubins endpoint reconstruction.
const DUBINS_TOL: f64 = 1e-9;
/// Slack for bound and sandwich comparisons on oracle costs.
const BOUND_TOL: f64 = 1e-9;
const EPSILONS: [f64; 7] = [0.0, 0.1, 0.3, 0.5, 1.0, 2.0, 3.0];
const CALM_CLASSES: usize = 68;
const WIND_CLASSES: usize = 512;
/// Mean ε = 1 cost ratio observed under wind in the original experiments.
const PAPER_WIND_RATIO: f64 = 1.15;

struct Gate {
    failed: Vec<usize>,
}

impl Gate {
    fn report(&mut self, id: usize, name: &str, pass: bool, detail: String, started: Instant) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {name}: {detail} ({:.1}s)", started.elapsed().as_secs_f64());
        if !pass {
            self.failed.push(id);
        }
    }
}

fn corpus(n: u64) -> Vec<(String, Scenario)> {
    (0..n).map(|seed| (format!("scenario_{seed:04}"), generate_scenario(seed, 14, 14, 0.25).expect("corpus scenario"))).collect()
}

fn runs<'a>(r: &'a BenchReport, algorithm: &'a str, eps: f64, s1: bool) -> impl Iterator<Item = &'a BenchRecord> + 'a {
    r.records.iter().filter(move |x| x.algorithm == algorithm && x.epsilon == eps && (x.s1 == s1 || algorithm == "tstar"))
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn criterion_1(gate: &mut Gate) {
    let t = Instant::now();
    let calm = all_classes(&WindVector::CALM).len();
    let all = Transition::all_local();
    let mut ok = calm == CALM_CLASSES;
    let mut counts = Vec::new();
    for w in [WindVector::new(0.2, 0.1), WindVector::from_polar(1e-6, 2.0), WindVector::new(0.0, -0.3)] {
        let keys: HashSet<_> = all.iter().map(|t| canonicalize(t, &w).key).collect();
        ok &= keys.len() == all.len() && all_classes(&w).len() == WIND_CLASSES;
        counts.push(keys.len());
    }
    gate.report(1, "canonical classes", ok, format!("calm {calm}, wind {counts:?} of {}", all.len()), t);
}

/// Criteria 2, 6 and 7 share one corpus run.
fn criteria_2_6_7(gate: &mut Gate, scenarios: &[(String, Scenario)]) -> BenchReport {
    let t = Instant::now();
    let cfg = BenchConfig { epsilons: EPSILONS.to_vec(), s1_modes: vec![true, false], ..Default::default() };
    let report = run_bench(scenarios, &cfg).expect("static bench");
    let errors = report.records.iter().filter(|r| r.status.starts_with("error")).count();

    let mut worst = 0.0f64;
    let mut violations = 0;
    let mut eps0_mismatch = 0;
    let mut unsolved = 0;
    for r in report.records.iter().filter(|r| r.algorithm == "tstar-eps") {
        if !r.is_solved() {
            unsolved += 1;
            continue;
        }
        let slack = r.cost - (1.0 + r.epsilon) * r.optimal_cost;
        worst = worst.max(r.cost_ratio);
        if slack > COST_TOL {
            violations += 1;
        }
        if r.epsilon == 0.0 && (r.cost - r.optimal_cost).abs() > COST_TOL {
            eps0_mismatch += 1;
        }
    }
    let optimal_unsolved = runs(&report, "tstar", 0.0, false).filter(|r| !r.is_solved()).count();
    gate.report(
        2,
        "bounded suboptimality",
        errors == 0 && violations == 0 && eps0_mismatch == 0 && unsolved == 0 && optimal_unsolved == 0,
        format!(
            "{} T*ε runs, {violations} over (1+ε)·c*, {eps0_mismatch} ε=0 mismatches, {unsolved} unsolved, {errors} errors, worst ratio {worst:.4}",
            report.records.iter().filter(|r| r.algorithm == "tstar-eps").count()
        ),
        t,
    );

    let t = Instant::now();
    let calls: Vec<f64> = EPSILONS.iter().map(|&e| mean(runs(&report, "tstar-eps", e, true).map(|r| r.oracle_calls as f64))).collect();
    let monotone = calls.windows(2).all(|w| w[1] <= w[0]);
    let below = calls[1..].iter().all(|&c| c < CALM_CLASSES as f64);
    let shown: Vec<String> = EPSILONS.iter().zip(&calls).map(|(e, c)| format!("{e}:{c:.2}")).collect();
    gate.report(6, "laziness monotonicity", monotone && below, format!("mean calls by ε {}", shown.join(" ")), t);

    let t = Instant::now();
    let mut ok = true;
    let mut shown = Vec::new();
    for &e in EPSILONS.iter().filter(|&&e| e >= 0.1) {
        let with = mean(runs(&report, "tstar-eps", e, true).map(|r| r.oracle_calls as f64));
        let without = mean(runs(&report, "tstar-eps", e, false).map(|r| r.oracle_calls as f64));
        ok &= with <= without;
        shown.push(format!("{e}:{with:.2}/{without:.2} ({:+.1}%)", 100.0 * (with - without) / without));
    }
    gate.report(7, "S1 efficacy", ok, format!("calls with/without S1 by ε {}", shown.join(" ")), t);
    report
}

fn criterion_3(gate: &mut Gate, scenarios: &[(String, Scenario)], report: &BenchReport) {
    let t = Instant::now();
    let mut mismatches = Vec::new();
    for (id, s) in scenarios.iter().take(20) {
        let oracle = TransitionOracle::new(s.params, s.wind, s.map.cell_size).unwrap();
        let dijkstra = lattice::shortest_path(&s.map, &s.start, &s.goal, |tr| {
            let eval = oracle.evaluate_class(oracle.canonicalize(tr).key).unwrap();
            let m = oracle.realize(tr, &eval, s.map.pose_of(&tr.from));
            collision_free(&m, &s.map).then_some(eval.cost)
        })
        .map_or(f64::INFINITY, |(c, _)| c);
        let tstar = runs(report, "tstar", 0.0, false).find(|r| &r.scenario_id == id).unwrap().cost;
        if !((tstar - dijkstra).abs() <= COST_TOL || (tstar.is_infinite() && dijkstra.is_infinite())) {
            mismatches.push(format!("{id}: {tstar} vs {dijkstra}"));
        }
    }
    gate.report(3, "T* optimal on the oracle graph", mismatches.is_empty(), format!("20 scenarios, mismatches {mismatches:?}"), t);
}

/// Criteria 4 and 5 share the oracle sweep.
fn criteria_4_5(gate: &mut Gate) {
    let t = Instant::now();
    let transitions = Transition::all_local();
    let mut lb_violations: Vec<String> = Vec::new();
    let mut order_violations = 0;
    let mut calm_mismatch = 0;
    let mut sandwich_violations = 0;
    let mut settings_without_strict = Vec::new();
    let mut settings = 0;
    for v_min in [0.4, 0.5, 0.7, 0.9] {
        let params = VehicleParams::with_v_min(v_min).unwrap();
        for frac in [0.0, 0.1, 0.2, 0.3] {
            let dirs: Vec<f64> = if frac == 0.0 { vec![0.0] } else { (0..8).map(|k| k as f64 * TAU / 8.0).collect() };
            for dir in dirs {
                settings += 1;
                let wind = WindVector::from_polar(frac * v_min, dir);
                let wind = if frac == 0.0 { WindVector::CALM } else { wind };
                let oracle = TransitionOracle::new(params, wind, 1.0).unwrap();
                let memo = Arc::new(OracleMemo::new(*oracle.settings()));
                let oracle = oracle.with_memo(memo);
                let mut kinds_over = [0usize; 5];
                let mut worst = [0.0f64; 5];
                let mut strict = 0;
                for tr in &transitions {
                    let (cost, _) = oracle.true_cost(tr).unwrap();
                    let (a, b) = oracle.local_poses(tr);
                    let lb: Vec<f64> = BoundKind::ALL.iter().map(|&k| lower_bound(&a, &b, k, &params, &wind).unwrap()).collect();
                    for (i, &v) in lb.iter().enumerate() {
                        if v > cost + BOUND_TOL {
                            kinds_over[i] += 1;
                            worst[i] = worst[i].max(v / cost);
                        }
                    }
                    let (lb1, lb2, dub) = (lb[3], lb[4], lb[1]);
                    if lb1 > lb2 + BOUND_TOL {
                        order_violations += 1;
                    }
                    if wind.is_calm() && !(lb1 == lb2 && lb1 == dub) {
                        calm_mismatch += 1;
                    }
                    let (lo, hi) = oracle.baseline_times(tr);
                    let cap = lo.unwrap_or(f64::INFINITY).min(hi.unwrap_or(f64::INFINITY));
                    if cost > cap + BOUND_TOL {
                        sandwich_violations += 1;
                    }
                    let family = oracle.evaluate_class(oracle.canonicalize(tr).key).unwrap().family;
                    if cost < cap - BOUND_TOL && matches!(family, Family::MixedDubins | Family::VariableRadius) {
                        strict += 1;
                    }
                }
                for (i, k) in BoundKind::ALL.iter().enumerate() {
                    if kinds_over[i] > 0 {
                        lb_violations.push(format!(
                            "{k} v_min={v_min} |w|={:.2} dir={:.2}: {} transitions, worst LB/c {:.4}",
                            wind.magnitude(),
                            dir,
                            kinds_over[i],
                            worst[i]
                        ));
                    }
                }
                if strict == 0 {
                    settings_without_strict.push(format!("v_min={v_min} |w|={:.2}", wind.magnitude()));
                }
            }
        }
    }
    let lb_ok = lb_violations.is_empty() && order_violations == 0 && calm_mismatch == 0;
    let mut detail = format!(
        "{settings} settings x 512 transitions; LB1>LB2 {order_violations}, calm LB1/LB2/Dubins mismatches {calm_mismatch}, settings with a bound above c: {}",
        lb_violations.len()
    );
    for v in &lb_violations {
        detail.push_str("\n       ");
        detail.push_str(v);
    }
    gate.report(4, "lower-bound admissibility", lb_ok, detail, t);

    gate.report(
        5,
        "oracle sandwich",
        sandwich_violations == 0 && settings_without_strict.is_empty(),
        format!(
            "{sandwich_violations} above a single-speed baseline; settings without a strict mixed-speed improvement {settings_without_strict:?}"
        ),
        t,
    );
}

fn criterion_8(gate: &mut Gate, scenarios: &[(String, Scenario)]) {
    let t = Instant::now();
    let eps: Vec<f64> = EPSILONS.iter().copied().filter(|&e| e > 0.0).collect();
    let cfg =
        BenchConfig { epsilons: eps.clone(), draws: draw_conditions(2021, 10, (0.14, 0.41), (0.4, 0.9)).unwrap(), ..Default::default() };
    let report = run_bench(scenarios, &cfg).expect("wind bench");
    let errors = report.records.iter().filter(|r| r.status.starts_with("error")).count();
    let instances = runs(&report, "tstar", 0.0, false).count();
    let unsolvable = runs(&report, "tstar", 0.0, false).filter(|r| !r.is_solved()).count();
    let at_one: Vec<&BenchRecord> = runs(&report, "tstar-eps", 1.0, true).filter(|r| r.is_solved()).collect();
    let over = at_one.iter().filter(|r| r.cost_ratio > 2.0).count();
    let bound_breaks = report
        .records
        .iter()
        .filter(|r| r.algorithm == "tstar-eps" && r.is_solved())
        .filter(|r| r.cost > (1.0 + r.epsilon) * r.optimal_cost + COST_TOL)
        .count();
    let mean_ratio = mean(at_one.iter().map(|r| r.cost_ratio));
    let max_ratio = at_one.iter().map(|r| r.cost_ratio).fold(0.0, f64::max);
    let reference = mean(runs(&report, "tstar", 0.0, false).filter(|r| r.is_solved()).map(|r| r.oracle_calls as f64));
    let mut calls_ok = true;
    let mut shown = Vec::new();
    for &e in &eps {
        let c = mean(runs(&report, "tstar-eps", e, true).filter(|r| r.is_solved()).map(|r| r.oracle_calls as f64));
        calls_ok &= c < WIND_CLASSES as f64;
        shown.push(format!("{e}:{c:.1} ({:.1}x)", reference / c));
    }
    let missing_solutions = runs(&report, "tstar-eps", 1.0, true).filter(|r| !r.is_solved() && r.optimal_cost.is_finite()).count();
    gate.report(
        8,
        "wind benchmark",
        errors == 0 && over == 0 && calls_ok && missing_solutions == 0,
        format!(
            "{instances} instances ({unsolvable} without any solution, excluded), {errors} errors; ε=1 ratio mean {mean_ratio:.4} (reference {PAPER_WIND_RATIO}), max {max_ratio:.4}, {over} above 2; \
             runs above (1+ε)·c* at any ε: {bound_breaks}; mean calls (T* {reference:.0}) by ε {}",
            shown.join(" ")
        ),
        t,
    );
}

fn criterion_9(gate: &mut Gate) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pose = |rng: &mut ChaCha8Rng| Pose::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(0.0..TAU));
    let (mut recon, mut not_min, mut below_euclid) = (0, 0, 0);
    let mut worst_err = 0.0f64;
    for _ in 0..10_000 {
        let q0 = pose(&mut rng);
        let q1 = pose(&mut rng);
        let rho = rng.gen_range(0.05..3.0);
        let p = dubins_shortest(&q0, &q1, rho);
        let end = p.endpoint();
        let err = end.position_error(&q1).max(end.heading_error(&q1));
        worst_err = worst_err.max(err);
        if err >= DUBINS_TOL {
            recon += 1;
        }
        if dubins_candidates(&q0, &q1, rho).iter().any(|c| c.length() < p.length()) {
            not_min += 1;
        }
        if p.length() < q0.distance(&q1) {
            below_euclid += 1;
        }
    }
    gate.report(
        9,
        "Dubins solver",
        recon == 0 && not_min == 0 && below_euclid == 0,
        format!("10000 samples; reconstruction errors {recon} (worst {worst_err:.2e}), not minimal {not_min}, below Euclid {below_euclid}"),
        t,
    );
}

fn stripped_csv(r: &BenchReport) -> Vec<Vec<String>> {
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let keep: Vec<usize> = (0..COLUMNS.len()).filter(|&i| !is_timing_column(COLUMNS[i])).collect();
    reader
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            keep.iter().map(|&i| rec[i].to_string()).collect()
        })
        .collect()
}

fn criterion_10(gate: &mut Gate, scenarios: &[(String, Scenario)]) {
    let t = Instant::now();
    let small = &scenarios[..10];
    let run = |jobs| {
        let cfg = BenchConfig {
            epsilons: vec![0.0, 0.5, 2.0],
            s1_modes: vec![true, false],
            draws: draw_conditions(77, 2, (0.14, 0.41), (0.4, 0.9)).unwrap(),
            jobs,
            ..Default::default()
        };
        stripped_csv(&run_bench(small, &cfg).unwrap())
    };
    let a = run(1);
    let b = run(1);
    let c = run(3);
    let calm = |jobs| {
        let cfg = BenchConfig { epsilons: vec![0.0, 1.0], jobs, ..Default::default() };
        stripped_csv(&run_bench(small, &cfg).unwrap())
    };
    let same = a == b && a == c && calm(1) == calm(2);
    gate.report(10, "determinism", same, format!("{} rows compared across repeats and 1/3 workers", a.len()), t);
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut gate = Gate { failed: Vec::new() };
    let scenarios = corpus(100);
    criterion_1(&mut gate);
    let report = criteria_2_6_7(&mut gate, &scenarios);
    criterion_3(&mut gate, &scenarios, &report);
    criteria_4_5(&mut gate);
    criterion_8(&mut gate, &scenarios);
    criterion_9(&mut gate);
    criterion_10(&mut gate, &scenarios);
    println!(
        "acceptance: {} of 10 criteria passed in {:.0}s{}",
        10 - gate.failed.len(),
        started.elapsed().as_secs_f64(),
        if gate.failed.is_empty() { String::new() } else { format!(", failed {:?}", gate.failed) }
    );
    if gate.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
