use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::instance::Task;
use crate::machine::TransitionSystem;
use crate::oracle::{brute_force, cheapest_trace, for_each_schedule};
use crate::random::{tiny_instance, TinyParams};
use proptest::prelude::*;

const FIGURE: [usize; 8] = [1, 4, 5, 7, 5, 9, 5, 11];

fn run(inst: &Instance, alpha: f64) -> RunResult {
    run_lbbd(inst, &LbbdConfig::default().with_alpha(alpha), None).unwrap()
}

fn single_task(h: usize) -> Instance {
    Instance::new(vec![Task::new(2, vec![1])], vec![1], vec![], h, vec![1.0; h], TransitionSystem::example()).unwrap()
}

#[test]
fn assembles_figure_schedule() {
    let inst = Instance::worked_example();
    let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
    let sol = assemble_solution(&inst, &spaces, &FIGURE).unwrap();
    assert_eq!(validate_solution(&inst, &sol), Ok(()));
    assert_eq!(evaluate_tec(&inst, &sol).unwrap(), 172.0);
    assert_eq!(evaluate_makespan(&inst, &sol), 12);
}

#[test]
fn assembly_rejects_overlap() {
    let inst = Instance::worked_example();
    let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
    let mut starts = FIGURE;
    starts[5] = 5;
    assert!(assemble_solution(&inst, &spaces, &starts).is_err());
}

#[test]
fn warmstart_is_valid() {
    let inst = Instance::worked_example();
    let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
    let sol = warmstart_fsws(&inst, &spaces, 0, 8).unwrap();
    assert_eq!(validate_solution(&inst, &sol), Ok(()));
}

#[test]
fn warmstart_tight_horizon() {
    // off, two ramp-up intervals, two processing, one ramp-down, off
    let inst = single_task(7);
    let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
    let sol = warmstart_fsws(&inst, &spaces, 0, 8).unwrap();
    assert_eq!(sol.starts, vec![4]);
    let short = single_task(6);
    let spaces = SpacesTable::build(short.transitions(), short.tariff());
    assert_eq!(warmstart_fsws(&short, &spaces, 0, 8), None);
}

#[test]
fn warmstart_matches_serial_feasibility() {
    for seed in 0..60 {
        let inst = tiny_instance(seed, TinyParams::default());
        let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
        if let Some(sol) = warmstart_fsws(&inst, &spaces, seed, 16) {
            assert_eq!(validate_solution(&inst, &sol), Ok(()), "seed {seed}");
        }
    }
}

#[test]
fn normalizers_on_example() {
    let inst = Instance::worked_example();
    let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
    let rc = compute_lb_rcpsp(&inst, Limits::UNLIMITED, None).unwrap();
    assert!(rc.proven && !rc.guarded);
    assert_eq!(rc.value, critical_path(&inst) as f64);
    let tec = compute_lb_tec(&inst, &spaces, Limits::UNLIMITED, None).unwrap();
    assert!(tec.proven);
    // no schedule can beat the relaxation
    let w = ObjectiveWeights::new(1.0, 1.0, 1.0).unwrap();
    let best = brute_force(&inst, &w).unwrap().best.unwrap();
    assert!(tec.value <= best.tec + 1e-9);
}

#[test]
fn guard_replaces_nonpositive_normalizer() {
    let n = Normalizer::new(-3.0, true);
    assert_eq!((n.value, n.guarded), (3.0, true));
    let n = Normalizer::new(0.0, true);
    assert_eq!((n.value, n.guarded), (1.0, true));
    let n = Normalizer::new(0.5, true);
    assert_eq!((n.value, n.guarded), (0.5, false));
}

#[test]
fn example_matches_oracle_across_alpha() {
    let inst = Instance::worked_example();
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        let r = run(&inst, alpha);
        assert_eq!(r.status, RunStatus::Optimal, "alpha {alpha}");
        let sol = r.solution.as_ref().unwrap();
        assert_eq!(validate_solution(&inst, sol), Ok(()));
        let w = r.weights.unwrap();
        let want = brute_force(&inst, &w).unwrap().best.unwrap();
        let got = r.objective.unwrap();
        assert!((got - want.objective).abs() <= 1e-6, "alpha {alpha}: {got} vs {}", want.objective);
        assert!((w.combine(r.tec.unwrap(), r.makespan.unwrap() as f64) - got).abs() <= 1e-9 || alpha == 1.0);
        assert!((r.bound - got).abs() <= 1e-9);
    }
}

#[test]
fn energy_only_optimum_has_minimal_tec() {
    let inst = Instance::worked_example();
    let r = run(&inst, 1.0);
    let w = ObjectiveWeights::new(1.0, 1.0, 1.0).unwrap();
    let want = brute_force(&inst, &w).unwrap().best.unwrap();
    assert!((r.tec.unwrap() - want.tec).abs() < 1e-9);
}

#[test]
fn deterministic_runs() {
    let inst = Instance::worked_example();
    let a = run(&inst, 0.5);
    let b = run(&inst, 0.5);
    assert_eq!(a, b);
}

#[test]
fn infeasible_horizon() {
    let r = run(&single_task(6), 0.5);
    assert_eq!(r.status, RunStatus::Infeasible);
    assert!(r.solution.is_none());
}

#[test]
fn starved_subproblem_never_claims_optimality() {
    let inst = Instance::worked_example();
    let cfg = LbbdConfig { subproblem: Limits::nodes(0), warmstart: false, ..LbbdConfig::default() };
    let r = run_lbbd(&inst, &cfg, None).unwrap();
    assert_ne!(r.status, RunStatus::Optimal);
    assert!(r.stats.nogood_cuts > 0);
    assert_eq!(r.stats.nogood_cuts, r.cuts.count(CutKind::NoGood));
}

#[test]
fn rejects_bad_alpha() {
    let inst = Instance::worked_example();
    assert_eq!(run_lbbd(&inst, &LbbdConfig::default().with_alpha(1.5), None), Err(LbbdError::Alpha(1.5)));
    assert_eq!(run_lbbd(&inst, &LbbdConfig::default().with_alpha(0.0), None), Err(LbbdError::Alpha(0.0)));
}

#[test]
fn zero_tariff_normalizer_is_guarded() {
    let inst = Instance::worked_example().with_tariff(vec![0.0; 16]).unwrap();
    let r = run(&inst, 0.5);
    assert_eq!(r.status, RunStatus::Optimal);
    assert!(r.lb_tec.unwrap().guarded);
}

/// Weighted tardiness optimum by enumeration under a capacity profile.
fn tardiness_oracle(v: &TardinessInstance, w: &ObjectiveWeights) -> Option<f64> {
    let inst = v.base();
    let mut best: Option<f64> = None;
    for_each_schedule(inst, |starts| {
        let fits = (0..inst.resource_count()).all(|k| {
            (1..=inst.horizon()).all(|t| {
                let used: u32 = (0..inst.len())
                    .filter(|&j| starts[j] <= t && t < starts[j] + inst.duration(j))
                    .map(|j| inst.task(j).demand[k])
                    .sum();
                used <= v.profile()[k][t - 1]
            })
        });
        if !fits {
            return;
        }
        if let Some((tec, _)) = cheapest_trace(inst, starts) {
            let obj = w.combine(tec, v.tardiness(starts) as f64);
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
    })
    .unwrap();
    best
}

#[test]
fn tardiness_variant_matches_oracle() {
    let mut checked = 0;
    for seed in 0..40u64 {
        let inst = tiny_instance(seed, TinyParams { max_tasks: 5, max_energy: 2, max_horizon: 13 });
        let h = inst.horizon();
        let n = inst.len();
        let due: Vec<usize> = (0..n).map(|j| 3 + (j * 5 + seed as usize) % (h - 3)).collect();
        let weights: Vec<u32> = (0..n).map(|j| 1 + (j as u32 + seed as u32) % 3).collect();
        let mut profile: Vec<Vec<u32>> = inst.capacities().iter().map(|&c| vec![c; h]).collect();
        if seed % 2 == 0 {
            profile[1][h / 2] = 0;
        }
        let v = TardinessInstance::new(inst, due, weights, profile).unwrap();
        let r = run_lbbd_tardiness(&v, &LbbdConfig::default(), None).unwrap();
        match r.status {
            RunStatus::Optimal => {
                let w = r.weights.unwrap();
                let want = tardiness_oracle(&v, &w).unwrap();
                assert!((r.objective.unwrap() - want).abs() <= 1e-6, "seed {seed}: {:?} vs {want} {r:?}", r.objective);
                let sol = r.solution.unwrap();
                assert_eq!(v.tardiness(&sol.starts), r.sub_objective.unwrap());
                checked += 1;
            }
            RunStatus::Infeasible => {}
            s => panic!("seed {seed}: {s:?}"),
        }
    }
    assert!(checked >= 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]
    #[test]
    fn matches_brute_force(seed in any::<u64>(), a in 0usize..4) {
        let alpha = [0.25, 0.5, 0.75, 1.0][a];
        let inst = tiny_instance(seed, TinyParams { max_tasks: 6, max_energy: 3, max_horizon: 14 });
        let r = run(&inst, alpha);
        match r.status {
            RunStatus::Optimal => {
                let w = r.weights.unwrap();
                let want = brute_force(&inst, &w).unwrap().best.unwrap();
                let sol = r.solution.as_ref().unwrap();
                prop_assert_eq!(validate_solution(&inst, sol), Ok(()));
                prop_assert!((r.objective.unwrap() - want.objective).abs() <= 1e-6);
            }
            RunStatus::Infeasible => {
                let w = ObjectiveWeights::new(0.5, 1.0, 1.0).unwrap();
                prop_assert!(brute_force(&inst, &w).unwrap().best.is_none());
            }
            s => prop_assert!(false, "unexpected {:?}", s),
        }
    }
}


/// Two predecessors of the energy task share a unit resource, so they run in
/// series, but the master only sees them in parallel and reaches for the
/// cheap interval 5.
fn clash_instance() -> Instance {
    let tasks = vec![Task::new(1, vec![1, 0]), Task::new(3, vec![0, 1]), Task::new(3, vec![0, 1])];
    let mut tariff = vec![5.0; 14];
    tariff[4] = 0.0;
    Instance::new(tasks, vec![1, 1], vec![(1, 0), (2, 0)], 14, tariff, TransitionSystem::example()).unwrap()
}

#[test]
fn first_master_optimum_is_cut_off() {
    let inst = clash_instance();
    let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
    let md = compute_md(&inst);
    let mut model = build_master(&inst, &spaces, &md, ObjectiveWeights::new(1.0, 1.0, 1.0).unwrap()).unwrap();
    let first = solve_master(&mut model, &mut Budget::unlimited(), None, &mut NoCallback).incumbent.unwrap();
    assert!(first.starts.get(0).unwrap() < 7);

    let cfg = LbbdConfig { warmstart: false, ..LbbdConfig::default().with_alpha(1.0) };
    let r = run_lbbd(&inst, &cfg, None).unwrap();
    assert_eq!(r.status, RunStatus::Optimal);
    assert!(r.stats.feasibility_cuts >= 1);
    let sol = r.solution.unwrap();
    assert!(sol.starts[0] >= 7);
    let want = brute_force(&inst, &r.weights.unwrap()).unwrap().best.unwrap();
    assert!((r.objective.unwrap() - want.objective).abs() < 1e-9);
}

#[test]
fn lb_tec_is_best_master_feasible_cost() {
    let inst = Instance::worked_example();
    let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
    let md = compute_md(&inst);
    let model = build_master(&inst, &spaces, &md, ObjectiveWeights::new(1.0, 1.0, 1.0).unwrap()).unwrap();
    let h = inst.horizon();
    let mut best = f64::INFINITY;
    for a in 1..=h {
        for b in 1..=h {
            for c in 1..=h {
                if let Some(t) = model.energy_cost(&FixedStarts::new([(1, a), (5, b), (6, c)])) {
                    best = best.min(t);
                }
            }
        }
    }
    let lb = compute_lb_tec(&inst, &spaces, Limits::UNLIMITED, None).unwrap();
    assert!((lb.value - best).abs() < 1e-9);
}

#[test]
fn incumbents_improve_and_stats_match_pool() {
    for seed in 0..40 {
        let inst = tiny_instance(seed, TinyParams::default());
        for alpha in [0.25, 1.0] {
            let r = run(&inst, alpha);
            assert!(r.incumbents.windows(2).all(|w| w[1] <= w[0]), "seed {seed}");
            assert_eq!(r.stats.feasibility_cuts, r.cuts.count(CutKind::Feasibility));
            assert_eq!(r.stats.optimality_cuts, r.cuts.count(CutKind::Optimality));
            assert_eq!(r.stats.nogood_cuts, r.cuts.count(CutKind::NoGood));
            if alpha == 1.0 {
                assert_eq!(r.stats.optimality_cuts, 0);
            }
        }
    }
}
