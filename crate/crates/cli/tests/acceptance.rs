//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use enersched::machine::MachineState::{self, Off, Proc};
use enersched::master::Cut;
use enersched::oracle::{brute_force, cheapest_trace, for_each_schedule};
use enersched::precedence::compute_md;
use enersched::random::{self, tiny_instance, TinyParams};
use enersched::solution::{evaluate_objective, validate_solution};
use enersched::subproblem::FixedStarts;
use enersched::{run_lbbd, Instance, LbbdConfig, ObjectiveWeights, RunResult, RunStatus, SpacesTable, Task, TransitionSystem};
use enersched_cli::generate::{generate_instance, random_bases, Density, GenerateConfig};
use enersched_cli::tariff::parse_costs_csv;
use rand_chacha::rand_core::RngCore;

const ALPHAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
const SUITE: u64 = 300;
const EPS: f64 = 1e-9;

type Outcome = Result<String, String>;

fn check(cond: bool, failures: &mut Vec<String>, msg: impl FnOnce() -> String) {
    if !cond && failures.len() < 10 {
        failures.push(msg());
    }
}

fn verdict(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

// ---------------------------------------------------------------- 1

fn worked_example() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example.json");
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_enersched"))
        .args(["solve", "--alpha", "0.75"])
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let tec = v["tec"].as_f64().ok_or("no tec")?;
    let cmax = v["makespan"].as_u64().ok_or("no makespan")?;
    let objective = v["objective"].as_f64().ok_or("no objective")?;
    let lb_tec = v["lb_tec"]["value"].as_f64().ok_or("no lb_tec")?;
    let lb_rcpsp = v["lb_rcpsp"]["value"].as_f64().ok_or("no lb_rcpsp")?;

    let inst = Instance::worked_example();
    // independent normalizer checks: least resource-feasible makespan by
    // enumeration, and lb_tec may not exceed the cheapest feasible energy cost
    let mut least = usize::MAX;
    for_each_schedule(&inst, |s| {
        let c = s.iter().zip(inst.tasks()).map(|(&s, t)| s + t.duration - 1).max().unwrap();
        least = least.min(c);
    })
    .map_err(|e| e.to_string())?;
    let w1 = ObjectiveWeights::new(1.0, 1.0, 1.0).unwrap();
    let cheapest = brute_force(&inst, &w1).map_err(|e| e.to_string())?.best.ok_or("oracle found nothing")?.tec;

    let w = ObjectiveWeights::new(0.75, lb_tec, lb_rcpsp).map_err(|e| e.to_string())?;
    let oracle = brute_force(&inst, &w).map_err(|e| e.to_string())?;
    let best = oracle.best.ok_or("oracle found nothing")?;
    let ties: Vec<String> = oracle.ties.iter().map(|(t, c)| format!("(tec {t}, cmax {c})")).collect();

    let mut failures = Vec::new();
    check(cmax == 12 && tec == 172.0, &mut failures, || format!("got cmax {cmax}, tec {tec}"));
    check(lb_rcpsp == least as f64, &mut failures, || format!("lb_rcpsp {lb_rcpsp} but enumeration gives {least}"));
    check(lb_tec <= cheapest + EPS, &mut failures, || format!("lb_tec {lb_tec} exceeds cheapest energy cost {cheapest}"));
    check((best.objective - objective).abs() <= EPS, &mut failures, || {
        format!("oracle optimum {} differs from {objective}", best.objective)
    });
    check(
        oracle.ties.iter().any(|&(t, c)| (t - 172.0).abs() <= EPS && c == 12),
        &mut failures,
        || format!("(172, 12) is not an oracle optimum; oracle optima {}", ties.join(", ")),
    );
    check(elapsed < Duration::from_secs(5), &mut failures, || format!("took {:.2}s", secs(elapsed)));
    verdict(
        failures,
        format!(
            "cmax {cmax}, tec {tec}, objective {objective:.6}, lb_tec {lb_tec}, lb_rcpsp {lb_rcpsp}, oracle optima {}, {:.3}s",
            ties.join(" "),
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------- 2

/// Cheapest block sequence covering `l..m` found by listing every sequence
/// of transitions and filtering it afterwards.
fn gap_by_enumeration(ts: &TransitionSystem, tariff: &[f64], l: usize, m: usize) -> Option<f64> {
    let h = tariff.len();
    let start = if l == 1 { Off } else { Proc };
    let goal = if m == h + 1 { Off } else { Proc };
    let mut seqs: Vec<Vec<(MachineState, MachineState, usize)>> = Vec::new();
    fn list(
        ts: &TransitionSystem,
        state: MachineState,
        t: usize,
        m: usize,
        cur: &mut Vec<(MachineState, MachineState, usize)>,
        out: &mut Vec<Vec<(MachineState, MachineState, usize)>>,
    ) {
        if t == m {
            out.push(cur.clone());
            return;
        }
        for to in MachineState::ALL {
            if let Some(d) = ts.time(state, to) {
                if t + d <= m {
                    cur.push((state, to, t));
                    list(ts, to, t + d, m, cur, out);
                    cur.pop();
                }
            }
        }
    }
    list(ts, start, l, m, &mut Vec::new(), &mut seqs);
    seqs.into_iter()
        .filter(|seq| {
            let end = seq.last().map_or(start, |b| b.1);
            let no_proc_dwell = seq.iter().all(|&(a, b, _)| !(a == Proc && b == Proc));
            let first_off = l != 1 || seq.first().is_some_and(|&(a, b, _)| a == Off && b == Off);
            let last_off = m != h + 1 || seq.last().is_some_and(|&(a, b, _)| a == Off && b == Off);
            end == goal && no_proc_dwell && first_off && last_off
        })
        .map(|seq| {
            seq.iter()
                .map(|&(a, b, t)| {
                    let d = ts.time(a, b).unwrap();
                    let p = f64::from(ts.power(a, b).unwrap());
                    (t..t + d).map(|i| tariff[i - 1] * p).sum::<f64>()
                })
                .sum::<f64>()
        })
        .min_by(f64::total_cmp)
}

fn spaces_correctness() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut pairs = 0;
    let mut finite = 0;
    for seed in 0..50u64 {
        let mut rng = random::rng(9_000 + seed);
        let ts = random::transition_system(&mut rng);
        let h = random::between(&mut rng, 2, 12);
        let tariff: Vec<f64> =
            (0..h).map(|_| (rng.next_u64() % 2_001) as f64 / 100.0 - 5.0).collect();
        let table = SpacesTable::build(&ts, &tariff);
        for l in 1..=h {
            for m in l + 1..=h + 1 {
                pairs += 1;
                let want = gap_by_enumeration(&ts, &tariff, l, m);
                let got = table.cost(l, m);
                finite += usize::from(got.is_some());
                let ok = match (want, got) {
                    (None, None) => true,
                    (Some(a), Some(b)) => (a - b).abs() <= EPS,
                    _ => false,
                };
                check(ok, &mut failures, || format!("system {seed} gap ({l},{m}): table {got:?}, enumeration {want:?}"));
            }
        }
    }
    let elapsed = t.elapsed();
    check(elapsed < Duration::from_secs(30), &mut failures, || format!("took {:.2}s", secs(elapsed)));
    verdict(failures, format!("50 systems, {pairs} gaps ({finite} finite) match, {:.2}s", secs(elapsed)))
}

// ---------------------------------------------------------- 3, 4, 5b, 7

#[derive(Default)]
struct SuiteTally {
    compared: usize,
    mismatches: Vec<String>,
    skipped: usize,
    infeasible: usize,
    lb_rcpsp_mismatch: Vec<String>,
    feasibility_cuts: usize,
    unsound_feasibility: Vec<String>,
    optimality_cuts: usize,
    unsound_optimality: Vec<String>,
    nogood_cuts: usize,
    tails_checked: usize,
    tails_violations: Vec<String>,
    nondeterministic: Vec<String>,
    elapsed: Duration,
}

fn run_suite() -> SuiteTally {
    let mut tally = SuiteTally::default();
    let start = Instant::now();
    for seed in 0..SUITE {
        let inst = tiny_instance(seed, TinyParams::default());
        let runs: Vec<RunResult> = ALPHAS
            .iter()
            .map(|&a| run_lbbd(&inst, &LbbdConfig::default().with_alpha(a), None).expect("alpha is valid"))
            .collect();

        // 3: objective equivalence with the oracle
        for (&alpha, r) in ALPHAS.iter().zip(&runs) {
            match r.status {
                RunStatus::Optimal => {
                    let w = r.weights.expect("optimal runs carry weights");
                    let oracle = brute_force(&inst, &w).expect("tiny instances fit the oracle");
                    let ok = match (&oracle.best, r.objective, &r.solution) {
                        (Some(b), Some(obj), Some(sol)) => {
                            let valid = validate_solution(&inst, sol).is_ok();
                            let recomputed = evaluate_objective(&inst, sol, &w).unwrap_or(f64::NAN);
                            valid && (b.objective - obj).abs() <= EPS && (recomputed - obj).abs() <= EPS
                        }
                        _ => false,
                    };
                    tally.compared += 1;
                    if !ok && tally.mismatches.len() < 10 {
                        tally.mismatches.push(format!(
                            "seed {seed} alpha {alpha}: lbbd {:?}, oracle {:?}",
                            r.objective,
                            oracle.best.map(|b| b.objective)
                        ));
                    }
                }
                RunStatus::Infeasible => {
                    let w = ObjectiveWeights::new(alpha, 1.0, 1.0).unwrap();
                    let oracle = brute_force(&inst, &w).expect("tiny instances fit the oracle");
                    tally.compared += 1;
                    tally.infeasible += 1;
                    if oracle.best.is_some() && tally.mismatches.len() < 10 {
                        tally.mismatches.push(format!("seed {seed} alpha {alpha}: lbbd infeasible, oracle found a schedule"));
                    }
                }
                _ => tally.skipped += 1,
            }
        }

        // one enumeration of resource-feasible schedules serves 4 and 5
        let md = compute_md(&inst);
        let energy = inst.energy_tasks().to_vec();
        let tails: Vec<usize> = energy
            .iter()
            .map(|&j| {
                let p = inst.duration(j);
                (0..inst.len())
                    .filter_map(|s| md.get(j, s).map(|d| d + inst.duration(s)))
                    .fold(p, usize::max)
                    - 1
            })
            .collect();
        let mut least: BTreeMap<FixedStarts, usize> = BTreeMap::new();
        let mut traceable: BTreeMap<FixedStarts, bool> = BTreeMap::new();
        let mut bounds = (0usize, Vec::new());
        for_each_schedule(&inst, |starts| {
            let key = FixedStarts::from_starts(&inst, starts);
            let cmax = starts.iter().zip(inst.tasks()).map(|(&s, t)| s + t.duration - 1).max().unwrap();
            let e = least.entry(key.clone()).or_insert(usize::MAX);
            *e = (*e).min(cmax);
            let ok = *traceable.entry(key).or_insert_with(|| cheapest_trace(&inst, starts).is_some());
            if !ok {
                return;
            }
            bounds.0 += 1;
            for (k, &j) in energy.iter().enumerate() {
                if cmax < starts[j] + tails[k] && bounds.1.len() < 5 {
                    bounds.1.push(format!("seed {seed}: cmax {cmax} < start {} + tail {} of task {j}", starts[j], tails[k]));
                }
            }
            for u in 0..inst.len() {
                for v in 0..inst.len() {
                    if let Some(d) = md.get(u, v) {
                        if starts[v] < starts[u] + d && bounds.1.len() < 5 {
                            bounds.1.push(format!("seed {seed}: start {v} - start {u} < md {d}"));
                        }
                    }
                }
            }
        })
        .expect("tiny instances fit the oracle");
        tally.tails_checked += bounds.0;
        tally.tails_violations.extend(bounds.1);

        // independent lb_rcpsp: least makespan over all schedules
        let overall = least.values().copied().min();
        if let Some(r) = runs.iter().find(|r| r.lb_sub.is_some_and(|n| n.proven)) {
            let raw = r.lb_sub.unwrap().raw;
            if overall.map(|c| c as f64) != Some(raw) && tally.lb_rcpsp_mismatch.len() < 5 {
                tally.lb_rcpsp_mismatch.push(format!("seed {seed}: lb_rcpsp {raw}, enumeration {overall:?}"));
            }
        }

        // 4: cut soundness
        let big_m = inst.horizon() as u64 + 1;
        for r in &runs {
            for cut in r.cuts.cuts() {
                match cut {
                    Cut::Feasibility { members } => {
                        tally.feasibility_cuts += 1;
                        if let Some(hit) = least.keys().find(|k| cut.deviations(k) == 0) {
                            if tally.unsound_feasibility.len() < 5 {
                                tally.unsound_feasibility.push(format!(
                                    "seed {seed}: cut {:?} removes feasible {:?}",
                                    members.pairs(),
                                    hit.pairs()
                                ));
                            }
                        }
                    }
                    Cut::Optimality { obj_sub, assignment, big_m: m } => {
                        tally.optimality_cuts += 1;
                        let mut bad = Vec::new();
                        if *m != big_m {
                            bad.push(format!("big M {m}, expected {big_m}"));
                        }
                        match least.get(assignment) {
                            Some(&c) if *obj_sub <= c as u64 => {}
                            other => bad.push(format!("snapshot bound {obj_sub} vs least makespan {other:?}")),
                        }
                        for (key, &c) in &least {
                            let dev = cut.deviations(key) as i128;
                            if dev == 0 {
                                continue;
                            }
                            let rhs = *obj_sub as i128 - (*m as i128) * dev;
                            if rhs > 0 || rhs > c as i128 {
                                bad.push(format!("active at {:?} with rhs {rhs}", key.pairs()));
                                break;
                            }
                        }
                        if !bad.is_empty() && tally.unsound_optimality.len() < 5 {
                            tally.unsound_optimality.push(format!("seed {seed}: {}", bad.join(", ")));
                        }
                    }
                    Cut::NoGood { .. } => tally.nogood_cuts += 1,
                }
            }
        }

        // 7: same inputs, same result
        for (&alpha, r) in ALPHAS.iter().zip(&runs) {
            let again = run_lbbd(&inst, &LbbdConfig::default().with_alpha(alpha), None).unwrap();
            if &again != r && tally.nondeterministic.len() < 5 {
                tally.nondeterministic.push(format!("seed {seed} alpha {alpha}"));
            }
        }
    }
    tally.elapsed = start.elapsed();
    tally
}

fn oracle_equivalence(t: &SuiteTally) -> Outcome {
    let mut failures = t.mismatches.clone();
    failures.extend(t.lb_rcpsp_mismatch.iter().cloned());
    check(t.elapsed < Duration::from_secs(600), &mut failures, || format!("took {:.1}s", secs(t.elapsed)));
    verdict(
        failures,
        format!(
            "{SUITE} instances x {} alphas: {} compared ({} infeasible), {} mismatches, {} not proven optimal, {:.1}s including the checks of 4, 5 and 7",
            ALPHAS.len(),
            t.compared,
            t.infeasible,
            t.mismatches.len(),
            t.skipped,
            secs(t.elapsed)
        ),
    )
}

fn cut_soundness(t: &SuiteTally) -> Outcome {
    let mut failures = t.unsound_feasibility.clone();
    failures.extend(t.unsound_optimality.iter().cloned());
    verdict(
        failures,
        format!(
            "{} feasibility cuts and {} optimality cuts verified exhaustively ({} no-good cuts not covered)",
            t.feasibility_cuts, t.optimality_cuts, t.nogood_cuts
        ),
    )
}

// ---------------------------------------------------------------- 5

/// Longest `u -> v` path weight by listing all paths: `p_u` plus the
/// durations strictly between.
fn md_by_paths(durations: &[usize], succ: &[Vec<usize>], u: usize, v: usize) -> Option<usize> {
    fn walk(durations: &[usize], succ: &[Vec<usize>], at: usize, v: usize, acc: usize, best: &mut Option<usize>) {
        for &next in &succ[at] {
            if next == v {
                *best = Some(best.map_or(acc, |b| b.max(acc)));
            } else {
                walk(durations, succ, next, v, acc + durations[next], best);
            }
        }
    }
    let mut best = None;
    walk(durations, succ, u, v, durations[u], &mut best);
    best
}

fn md_correctness(t: &SuiteTally) -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for seed in 0..200u64 {
        let mut rng = random::rng(70_000 + seed);
        let n = random::between(&mut rng, 1, 8);
        let durations: Vec<usize> = (0..n).map(|_| random::between(&mut rng, 1, 4)).collect();
        // random labels so that ids are not a topological order
        let mut label: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            label.swap(i, random::between(&mut rng, 0, i));
        }
        let mut succ = vec![Vec::new(); n];
        let mut arcs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if random::chance(&mut rng, 2, 5) {
                    arcs.push((label[a], label[b]));
                    succ[label[a]].push(label[b]);
                }
            }
        }
        let tasks: Vec<Task> = durations
            .iter()
            .enumerate()
            .map(|(j, &p)| Task::new(p, if j == 0 { vec![1, 0] } else { vec![0, 1] }))
            .collect();
        let h = durations.iter().sum::<usize>() + 4;
        let inst = Instance::new(tasks, vec![1, 1], arcs, h, vec![1.0; h], TransitionSystem::example())
            .expect("random DAG instance is valid");
        let md = compute_md(&inst);
        for u in 0..n {
            for v in 0..n {
                pairs += 1;
                let want = md_by_paths(&durations, &succ, u, v);
                let got = md.get(u, v);
                check(want == got, &mut failures, || format!("dag {seed} md({u},{v}): {got:?} vs paths {want:?}"));
            }
        }
    }
    failures.extend(t.tails_violations.iter().cloned());
    verdict(
        failures,
        format!(
            "200 DAGs, {pairs} pairs match path enumeration; separation and makespan tail bounds hold on {} oracle-enumerated feasible schedules",
            t.tails_checked
        ),
    )
}

// ---------------------------------------------------------------- 6

fn desk_benchmark() -> Vec<Instance> {
    let tariff = parse_costs_csv(include_str!("../data/day_prices.csv")).unwrap();
    (0..20u64)
        .map(|seed| {
            let bases = random_bases(seed, 2, 6, 5);
            let config = GenerateConfig { density: Density::Dense, seed, ..GenerateConfig::default() };
            generate_instance(&bases, &tariff, &config).expect("benchmark instance generates").instance
        })
        .collect()
}

fn run_desk(instances: &[Instance]) -> Vec<Vec<RunResult>> {
    instances
        .iter()
        .map(|inst| {
            ALPHAS
                .iter()
                .map(|&a| run_lbbd(inst, &LbbdConfig::default().with_alpha(a), None).unwrap())
                .collect()
        })
        .collect()
}

fn cut_trend(results: &[Vec<RunResult>]) -> Outcome {
    let count = results.len() as f64;
    let means: Vec<f64> = (0..ALPHAS.len())
        .map(|k| {
            results
                .iter()
                .map(|r| (r[k].stats.feasibility_cuts + r[k].stats.optimality_cuts) as f64)
                .sum::<f64>()
                / count
        })
        .collect();
    let optimal = results.iter().flatten().filter(|r| r.status == RunStatus::Optimal).count();
    let opt_at_one: usize = results.iter().map(|r| r[ALPHAS.len() - 1].stats.optimality_cuts).sum();
    let mut failures = Vec::new();
    for k in 1..means.len() {
        check(means[k] <= means[k - 1], &mut failures, || {
            format!("mean cuts rise from {} at alpha {} to {} at alpha {}", means[k - 1], ALPHAS[k - 1], means[k], ALPHAS[k])
        });
    }
    check(opt_at_one == 0, &mut failures, || format!("{opt_at_one} optimality cuts at alpha 1"));
    let shown: Vec<String> = ALPHAS.iter().zip(&means).map(|(a, m)| format!("{a}: {m:.2}")).collect();
    verdict(
        failures,
        format!(
            "mean feasibility+optimality cuts per alpha [{}], {opt_at_one} optimality cuts at alpha 1, {optimal}/{} runs optimal",
            shown.join(", "),
            results.len() * ALPHAS.len()
        ),
    )
}

// ---------------------------------------------------------------- 7

fn determinism(t: &SuiteTally, desk: &[Instance], first: &[Vec<RunResult>]) -> Outcome {
    let mut failures = t.nondeterministic.clone();
    let second = run_desk(desk);
    for (i, (a, b)) in first.iter().zip(&second).enumerate() {
        check(a == b, &mut failures, || format!("benchmark instance {i}"));
    }
    let total = SUITE as usize * ALPHAS.len() + desk.len() * ALPHAS.len();
    verdict(failures, format!("{total} runs repeated with identical results"))
}

fn main() {
    let mut all_pass = true;
    let mut report = |id: &str, title: &str, outcome: Outcome| {
        match outcome {
            Ok(detail) => println!("PASS {id} {title}: {detail}"),
            Err(detail) => {
                all_pass = false;
                println!("FAIL {id} {title}: {detail}");
            }
        }
    };
    report("1", "worked example", worked_example());
    report("2", "transition table", spaces_correctness());
    let suite = run_suite();
    report("3", "oracle equivalence", oracle_equivalence(&suite));
    report("4", "cut soundness", cut_soundness(&suite));
    report("5", "distances and tail bounds", md_correctness(&suite));
    let desk = desk_benchmark();
    let results = run_desk(&desk);
    report("6", "cut trend over alpha", cut_trend(&results));
    report("7", "determinism", determinism(&suite, &desk, &results));
    if !all_pass {
        std::process::exit(1);
    }
}
