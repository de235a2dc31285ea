//! Logic-based Benders decomposition: the master fixes energy-task starts,
//! the subproblem schedules the rest and answers with cuts.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::budget::{Budget, Clock, Limits};
use crate::instance::Instance;
use crate::machine::{MachineState, Step};
use crate::master::{
    build_master, solve_master, Candidate, Cut, CutKind, CutPool, LazyCallback, MasterError, MasterStatus, NoCallback,
    Verdict,
};
use crate::precedence::{compute_md, start_windows, Windows};
use crate::random;
use crate::solution::{evaluate_makespan, evaluate_tec, validate_solution, ObjectiveWeights, Solution, Violation};
use crate::spaces::SpacesTable;
use crate::subproblem::{
    extract_min_conflict, extract_min_conflict_blocking, minimize_makespan, solve_blocking_twt, solve_feasibility,
    Conflict, FixedStarts, SubproblemResult, TardinessInstance,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbbdConfig {
    pub alpha: f64,
    pub master: Limits,
    /// Per subproblem call.
    pub subproblem: Limits,
    /// Per feasibility re-check while shrinking a conflict.
    pub conflict_check: Limits,
    /// For each normalizer computation.
    pub normalizer: Limits,
    pub warmstart: bool,
    pub seed: u64,
    /// Priority-rule restarts of the warm-start heuristic.
    pub warmstart_attempts: usize,
}

impl Default for LbbdConfig {
    fn default() -> Self {
        LbbdConfig {
            alpha: 0.5,
            master: Limits::UNLIMITED,
            subproblem: Limits::nodes(200_000),
            conflict_check: Limits::nodes(50_000),
            normalizer: Limits::nodes(2_000_000),
            warmstart: true,
            seed: 0,
            warmstart_attempts: 64,
        }
    }
}

impl LbbdConfig {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Optimal,
    /// A solution whose optimality is not proven.
    FeasibleUnproven,
    Infeasible,
    /// Budget ran out before any solution was found.
    Budget,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Optimal => "optimal",
            RunStatus::FeasibleUnproven => "feasible-unproven",
            RunStatus::Infeasible => "infeasible",
            RunStatus::Budget => "budget",
        }
    }
}

/// A normalizing constant for one objective component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    /// Value used in the weights.
    pub value: f64,
    /// What the computation returned.
    pub raw: f64,
    pub proven: bool,
    /// `raw` was not positive and was replaced by `max(|raw|, 1)`.
    pub guarded: bool,
}

impl Normalizer {
    fn new(raw: f64, proven: bool) -> Self {
        if raw > 0.0 {
            Normalizer { value: raw, raw, proven, guarded: false }
        } else {
            Normalizer { value: raw.abs().max(1.0), raw, proven, guarded: true }
        }
    }
}

/// Seconds per phase; all zero without a clock.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimes {
    pub normalizers: f64,
    pub warmstart: f64,
    pub search: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub master_nodes: u64,
    pub subproblem_calls: usize,
    pub feasibility_cuts: usize,
    pub nogood_cuts: usize,
    pub optimality_cuts: usize,
    /// Summed size of the conflicts behind feasibility cuts.
    pub conflict_members: usize,
    pub non_minimal_conflicts: usize,
    /// Subproblems that ran out of budget or returned unproven optima.
    pub inconclusive: usize,
    pub times: PhaseTimes,
}

impl RunStats {
    pub fn mean_conflict_size(&self) -> Option<f64> {
        (self.feasibility_cuts > 0).then(|| self.conflict_members as f64 / self.feasibility_cuts as f64)
    }

    pub fn total_cuts(&self) -> usize {
        self.feasibility_cuts + self.nogood_cuts + self.optimality_cuts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: RunStatus,
    pub solution: Option<Solution>,
    pub tec: Option<f64>,
    pub makespan: Option<usize>,
    /// Makespan, or weighted tardiness for the blocking variant.
    pub sub_objective: Option<u64>,
    pub objective: Option<f64>,
    /// Proven lower bound on the objective, `-inf` when none is known.
    pub bound: f64,
    pub weights: Option<ObjectiveWeights>,
    pub lb_tec: Option<Normalizer>,
    /// Normalizer of the second component (makespan or tardiness).
    pub lb_sub: Option<Normalizer>,
    pub warmstart_objective: Option<f64>,
    /// Objectives of successive incumbents.
    pub incumbents: Vec<f64>,
    pub cuts: CutPool,
    pub stats: RunStats,
}

impl RunResult {
    fn infeasible() -> Self {
        RunResult {
            status: RunStatus::Infeasible,
            solution: None,
            tec: None,
            makespan: None,
            sub_objective: None,
            objective: None,
            bound: f64::INFINITY,
            weights: None,
            lb_tec: None,
            lb_sub: None,
            warmstart_objective: None,
            incumbents: Vec::new(),
            cuts: CutPool::new(),
            stats: RunStats::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LbbdError {
    Alpha(f64),
    /// Starts that do not fit the energy machine.
    Assembly { task: usize },
    /// The assembled solution breaks a rule; indicates a bug.
    Invalid(Vec<Violation>),
}

impl fmt::Display for LbbdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LbbdError::Alpha(a) => write!(f, "alpha {a} is outside (0, 1]"),
            LbbdError::Assembly { task } => write!(f, "cannot build a machine trace around task {task}"),
            LbbdError::Invalid(v) => {
                write!(f, "assembled solution is invalid")?;
                for x in v {
                    write!(f, "; {x}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for LbbdError {}

/// Builds the machine trace for a start vector: cheapest transitions in the
/// gaps between energy tasks and proc dwells while they run.
pub fn assemble_solution(instance: &Instance, spaces: &SpacesTable, starts: &[usize]) -> Result<Solution, LbbdError> {
    let h = instance.horizon();
    let mut seq: Vec<(usize, usize)> = instance.energy_tasks().iter().map(|&j| (starts[j], j)).collect();
    seq.sort_unstable();
    let mut trace = Vec::with_capacity(h);
    let mut cur_end = 0;
    for &(s, j) in &seq {
        if s <= cur_end || s == 0 {
            return Err(LbbdError::Assembly { task: j });
        }
        if cur_end == 0 || s > cur_end + 1 {
            let gap = spaces.reconstruct(cur_end + 1, s).map_err(|_| LbbdError::Assembly { task: j })?;
            trace.extend(gap);
        }
        let p = instance.duration(j);
        trace.extend(core::iter::repeat(Step::dwell(MachineState::Proc)).take(p));
        cur_end = s + p - 1;
    }
    if cur_end > h {
        return Err(LbbdError::Assembly { task: seq.last().map_or(0, |x| x.1) });
    }
    let tail = spaces
        .reconstruct(cur_end + 1, h + 1)
        .map_err(|_| LbbdError::Assembly { task: seq.last().map_or(0, |x| x.1) })?;
    trace.extend(tail);
    Ok(Solution::new(starts.to_vec(), trace))
}

/// Serial schedule generation honouring the energy machine: tasks are placed
/// at their earliest resource-feasible start in priority order, energy tasks
/// additionally after the previous one with a reachable gap. Retries with
/// seeded random priorities.
pub fn warmstart_fsws(
    instance: &Instance,
    spaces: &SpacesTable,
    seed: u64,
    attempts: usize,
) -> Option<Solution> {
    let windows = start_windows(instance).ok()?;
    let caps = constant_profile(instance);
    let starts = fsws_starts(instance, spaces, &windows, &caps, seed, attempts)?;
    assemble_solution(instance, spaces, &starts).ok()
}

fn constant_profile(instance: &Instance) -> Vec<Vec<u32>> {
    instance.capacities().iter().map(|&c| vec![c; instance.horizon()]).collect()
}

fn fsws_starts(
    instance: &Instance,
    spaces: &SpacesTable,
    windows: &Windows,
    caps: &[Vec<u32>],
    seed: u64,
    attempts: usize,
) -> Option<Vec<usize>> {
    if let Some(s) = serial_sgs(instance, spaces, windows, caps, instance.topological_order()) {
        return Some(s);
    }
    let mut rng = random::rng(seed);
    for _ in 1..attempts {
        let order = random_topological_order(instance, &mut rng);
        if let Some(s) = serial_sgs(instance, spaces, windows, caps, &order) {
            return Some(s);
        }
    }
    None
}

fn random_topological_order(instance: &Instance, rng: &mut impl rand_chacha::rand_core::RngCore) -> Vec<usize> {
    let n = instance.len();
    let mut indeg: Vec<usize> = (0..n).map(|j| instance.predecessors(j).len()).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        let k = random::between(rng, 0, ready.len() - 1);
        let j = ready.swap_remove(k);
        order.push(j);
        for &s in instance.successors(j) {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(s);
            }
        }
    }
    order
}

fn serial_sgs(
    instance: &Instance,
    spaces: &SpacesTable,
    windows: &Windows,
    caps: &[Vec<u32>],
    order: &[usize],
) -> Option<Vec<usize>> {
    let h = instance.horizon();
    let mut usage = vec![vec![0u32; h]; caps.len()];
    let mut starts = vec![0usize; instance.len()];
    let mut last_end = 0;
    for &j in order {
        let p = instance.duration(j);
        let demand = &instance.task(j).demand;
        let energy = instance.is_energy(j);
        let mut lo = instance.predecessors(j).iter().map(|&a| starts[a] + instance.duration(a)).max().unwrap_or(1);
        let mut hi = h + 1 - p;
        if energy {
            lo = lo.max(windows.earliest[j]).max(last_end + 1);
            hi = hi.min(windows.latest[j]);
        }
        let fits = |s: usize| {
            (s..s + p).all(|t| demand.iter().enumerate().all(|(k, &d)| usage[k][t - 1] + d <= caps[k][t - 1]))
        };
        let gap_ok = |s: usize| {
            if last_end == 0 {
                spaces.cost(1, s).is_some()
            } else {
                s == last_end + 1 || spaces.cost(last_end + 1, s).is_some()
            }
        };
        let s = (lo..=hi).find(|&s| (!energy || gap_ok(s)) && fits(s))?;
        for t in s..s + p {
            for (k, &d) in demand.iter().enumerate() {
                usage[k][t - 1] += d;
            }
        }
        starts[j] = s;
        if energy {
            last_end = s + p - 1;
        }
    }
    spaces.cost(last_end + 1, h + 1)?;
    Some(starts)
}

/// Cheapest energy cost ignoring everything but the machine and the
/// precedence distances between energy tasks.
pub fn compute_lb_tec(instance: &Instance, spaces: &SpacesTable, limits: Limits, clock: Option<&dyn Clock>) -> Option<Normalizer> {
    let md = compute_md(instance);
    let unit = ObjectiveWeights::new(1.0, 1.0, 1.0).expect("unit weights are valid");
    let mut model = build_master(instance, spaces, &md, unit).ok()?;
    let mut budget = make_budget(limits, clock);
    let out = solve_master(&mut model, &mut budget, None, &mut NoCallback);
    match out.status {
        MasterStatus::Optimal => Some(Normalizer::new(out.incumbent?.tec, true)),
        MasterStatus::Infeasible => None,
        _ => match out.incumbent {
            Some(i) => Some(Normalizer::new(i.tec, false)),
            None if out.bound.is_finite() => Some(Normalizer::new(out.bound, false)),
            None => Some(Normalizer::new(1.0, false)),
        },
    }
}

/// Optimal makespan of the project without the energy machine. Falls back on
/// the critical path when the budget runs out; `None` if no schedule exists.
pub fn compute_lb_rcpsp(instance: &Instance, limits: Limits, clock: Option<&dyn Clock>) -> Option<Normalizer> {
    let mut budget = make_budget(limits, clock);
    match minimize_makespan(instance, &FixedStarts::default(), &mut budget).expect("empty fixed set is valid") {
        SubproblemResult::Feasible { objective, proven_optimal, .. } => {
            Some(Normalizer::new(objective as f64, proven_optimal))
        }
        SubproblemResult::Infeasible { .. } => None,
        SubproblemResult::Unknown => Some(Normalizer::new(critical_path(instance) as f64, false)),
    }
}

fn critical_path(instance: &Instance) -> usize {
    let mut finish = vec![0usize; instance.len()];
    for &j in instance.topological_order() {
        let start = instance.predecessors(j).iter().map(|&a| finish[a]).max().unwrap_or(0);
        finish[j] = start + instance.duration(j);
    }
    finish.into_iter().max().unwrap_or(0)
}

fn make_budget<'c>(limits: Limits, clock: Option<&'c dyn Clock>) -> Budget<'c> {
    match clock {
        Some(c) => Budget::with_clock(limits, c),
        None => Budget::new(limits),
    }
}

fn now(clock: Option<&dyn Clock>) -> f64 {
    clock.map_or(0.0, |c| c.seconds())
}

/// The second stage seen by the decomposition.
trait Stage {
    fn instance(&self) -> &Instance;
    fn capacities(&self) -> Vec<Vec<u32>>;
    fn feasibility(&self, fixed: &FixedStarts, budget: &mut Budget<'_>) -> SubproblemResult;
    fn optimize(&self, fixed: &FixedStarts, budget: &mut Budget<'_>) -> SubproblemResult;
    fn conflict(&self, fixed: &FixedStarts, per_check: Limits, clock: Option<&dyn Clock>) -> Conflict;
    fn objective_of(&self, starts: &[usize]) -> u64;
    fn big_m(&self) -> Option<u64>;
}

struct MakespanStage<'a>(&'a Instance);

impl Stage for MakespanStage<'_> {
    fn instance(&self) -> &Instance {
        self.0
    }

    fn capacities(&self) -> Vec<Vec<u32>> {
        constant_profile(self.0)
    }

    fn feasibility(&self, fixed: &FixedStarts, budget: &mut Budget<'_>) -> SubproblemResult {
        solve_feasibility(self.0, fixed, budget).expect("master assignments are well formed")
    }

    fn optimize(&self, fixed: &FixedStarts, budget: &mut Budget<'_>) -> SubproblemResult {
        minimize_makespan(self.0, fixed, budget).expect("master assignments are well formed")
    }

    fn conflict(&self, fixed: &FixedStarts, per_check: Limits, clock: Option<&dyn Clock>) -> Conflict {
        extract_min_conflict(self.0, fixed, per_check, clock).expect("master assignments are well formed")
    }

    fn objective_of(&self, starts: &[usize]) -> u64 {
        starts.iter().enumerate().map(|(j, &s)| (s + self.0.duration(j) - 1) as u64).max().unwrap_or(0)
    }

    fn big_m(&self) -> Option<u64> {
        None
    }
}

struct TardinessStage<'a>(&'a TardinessInstance);

impl Stage for TardinessStage<'_> {
    fn instance(&self) -> &Instance {
        self.0.base()
    }

    fn capacities(&self) -> Vec<Vec<u32>> {
        self.0.profile().to_vec()
    }

    fn feasibility(&self, fixed: &FixedStarts, budget: &mut Budget<'_>) -> SubproblemResult {
        // no separate feasibility search under a blocked profile
        self.optimize(fixed, budget)
    }

    fn optimize(&self, fixed: &FixedStarts, budget: &mut Budget<'_>) -> SubproblemResult {
        solve_blocking_twt(self.0, fixed, budget).expect("master assignments are well formed")
    }

    fn conflict(&self, fixed: &FixedStarts, per_check: Limits, clock: Option<&dyn Clock>) -> Conflict {
        extract_min_conflict_blocking(self.0, fixed, per_check, clock).expect("master assignments are well formed")
    }

    fn objective_of(&self, starts: &[usize]) -> u64 {
        self.0.tardiness(starts)
    }

    fn big_m(&self) -> Option<u64> {
        Some(self.0.tardiness_bound() + 1)
    }
}

struct Record {
    starts: Vec<usize>,
    objective: u64,
}

struct Dispatcher<'s, 'c> {
    stage: &'s dyn Stage,
    optimize: bool,
    config: &'s LbbdConfig,
    clock: Option<&'c dyn Clock>,
    big_m: u64,
    stats: RunStats,
    solved: BTreeMap<FixedStarts, Record>,
    /// The instance has no schedule at all.
    infeasible: bool,
    /// A no-good or unproven optimality cut was added.
    downgraded: bool,
}

impl LazyCallback for Dispatcher<'_, '_> {
    fn candidate(&mut self, cand: &Candidate) -> Verdict {
        if self.solved.contains_key(&cand.starts) {
            return Verdict::Cuts(Vec::new());
        }
        self.stats.subproblem_calls += 1;
        let mut budget = make_budget(self.config.subproblem, self.clock);
        let result = if self.optimize {
            self.stage.optimize(&cand.starts, &mut budget)
        } else {
            self.stage.feasibility(&cand.starts, &mut budget)
        };
        match result {
            SubproblemResult::Feasible { starts, objective, proven_optimal } => {
                let mut cuts = Vec::new();
                if self.optimize {
                    if !proven_optimal {
                        self.stats.inconclusive += 1;
                        self.downgraded = true;
                    }
                    self.stats.optimality_cuts += 1;
                    cuts.push(Cut::Optimality {
                        obj_sub: objective,
                        assignment: cand.starts.clone(),
                        big_m: self.big_m,
                    });
                }
                self.solved.insert(cand.starts.clone(), Record { starts, objective });
                Verdict::Cuts(cuts)
            }
            SubproblemResult::Infeasible { .. } => {
                let conflict = self.stage.conflict(&cand.starts, self.config.conflict_check, self.clock);
                if conflict.members.is_empty() {
                    self.infeasible = true;
                    return Verdict::Stop;
                }
                self.stats.feasibility_cuts += 1;
                self.stats.conflict_members += conflict.members.len();
                if !conflict.minimal {
                    self.stats.non_minimal_conflicts += 1;
                }
                Verdict::Cuts(vec![Cut::Feasibility { members: conflict.members }])
            }
            SubproblemResult::Unknown => {
                self.stats.inconclusive += 1;
                self.stats.nogood_cuts += 1;
                self.downgraded = true;
                Verdict::Cuts(vec![Cut::NoGood { assignment: cand.starts.clone() }])
            }
        }
    }
}

/// Solves the energy-aware project scheduling problem to optimality within
/// the configured budgets.
pub fn run_lbbd(instance: &Instance, config: &LbbdConfig, clock: Option<&dyn Clock>) -> Result<RunResult, LbbdError> {
    check_alpha(config)?;
    let t0 = now(clock);
    let Some(lb_sub) = compute_lb_rcpsp(instance, config.normalizer, clock) else {
        return Ok(RunResult::infeasible());
    };
    drive(&MakespanStage(instance), lb_sub, config, clock, t0)
}

/// The same decomposition with weighted tardiness as second objective under
/// a blocked capacity profile.
pub fn run_lbbd_tardiness(
    variant: &TardinessInstance,
    config: &LbbdConfig,
    clock: Option<&dyn Clock>,
) -> Result<RunResult, LbbdError> {
    check_alpha(config)?;
    let t0 = now(clock);
    let mut budget = make_budget(config.normalizer, clock);
    let lb_sub = match solve_blocking_twt(variant, &FixedStarts::default(), &mut budget)
        .expect("empty fixed set is valid")
    {
        SubproblemResult::Feasible { objective, proven_optimal, .. } => Normalizer::new(objective as f64, proven_optimal),
        SubproblemResult::Infeasible { .. } => return Ok(RunResult::infeasible()),
        SubproblemResult::Unknown => Normalizer::new(0.0, false),
    };
    drive(&TardinessStage(variant), lb_sub, config, clock, t0)
}

fn check_alpha(config: &LbbdConfig) -> Result<(), LbbdError> {
    if config.alpha > 0.0 && config.alpha <= 1.0 {
        Ok(())
    } else {
        Err(LbbdError::Alpha(config.alpha))
    }
}

fn drive(
    stage: &dyn Stage,
    lb_sub: Normalizer,
    config: &LbbdConfig,
    clock: Option<&dyn Clock>,
    t0: f64,
) -> Result<RunResult, LbbdError> {
    let instance = stage.instance();
    let spaces = SpacesTable::build(instance.transitions(), instance.tariff());
    let Some(lb_tec) = compute_lb_tec(instance, &spaces, config.normalizer, clock) else {
        return Ok(RunResult::infeasible());
    };
    let weights = ObjectiveWeights::new(config.alpha, lb_tec.value, lb_sub.value).expect("normalizers are positive");
    let t_norm = now(clock);

    let md = compute_md(instance);
    let mut model = match build_master(instance, &spaces, &md, weights) {
        Ok(m) => m,
        Err(MasterError::Window(_)) => return Ok(RunResult::infeasible()),
        Err(MasterError::NegativeWeight) => unreachable!("normalizers are positive"),
    };
    if let Some(m) = stage.big_m() {
        model.generic_objective(m);
    }
    let warm = if config.warmstart {
        fsws_starts(instance, &spaces, model.windows(), &stage.capacities(), config.seed, config.warmstart_attempts)
    } else {
        None
    };
    let warm_fixed = warm.as_ref().map(|s| FixedStarts::from_starts(instance, s));
    let warmstart_objective = warm.as_ref().and_then(|s| {
        let fixed = FixedStarts::from_starts(instance, s);
        let tec = model.energy_cost(&fixed)?;
        Some(weights.combine(tec, stage.objective_of(s) as f64))
    });
    let t_warm = now(clock);

    let mut dispatcher = Dispatcher {
        stage,
        optimize: config.alpha < 1.0,
        config,
        clock,
        big_m: model.big_m(),
        stats: RunStats::default(),
        solved: BTreeMap::new(),
        infeasible: false,
        downgraded: false,
    };
    let mut budget = make_budget(config.master, clock);
    let out = solve_master(&mut model, &mut budget, warm_fixed.as_ref(), &mut dispatcher);
    let t_search = now(clock);

    let mut stats = core::mem::take(&mut dispatcher.stats);
    stats.master_nodes = out.nodes;
    let cuts = model.cuts().clone();
    debug_assert_eq!(cuts.count(CutKind::Feasibility), stats.feasibility_cuts);

    let mut result = RunResult {
        status: RunStatus::Budget,
        solution: None,
        tec: None,
        makespan: None,
        sub_objective: None,
        objective: None,
        bound: f64::NEG_INFINITY,
        weights: Some(weights),
        lb_tec: Some(lb_tec),
        lb_sub: Some(lb_sub),
        warmstart_objective,
        incumbents: out.trace.clone(),
        cuts,
        stats,
    };
    if dispatcher.infeasible {
        result.status = RunStatus::Infeasible;
        result.bound = f64::INFINITY;
        return Ok(finish(result, clock, t0, t_norm, t_warm, t_search));
    }
    result.status = match out.status {
        MasterStatus::Optimal if !dispatcher.downgraded => RunStatus::Optimal,
        MasterStatus::Infeasible if !dispatcher.downgraded => RunStatus::Infeasible,
        _ if out.incumbent.is_some() => RunStatus::FeasibleUnproven,
        _ => RunStatus::Budget,
    };
    if !dispatcher.downgraded {
        result.bound = out.bound;
    }
    if let Some(inc) = &out.incumbent {
        let record = dispatcher.solved.get(&inc.starts).expect("every incumbent passed the subproblem");
        let mut starts = record.starts.clone();
        let mut sub = record.objective;
        if !dispatcher.optimize {
            // the objective ignores the second stage; still report a good schedule
            let mut budget = make_budget(config.subproblem, clock);
            if let SubproblemResult::Feasible { starts: s, objective, .. } = stage.optimize(&inc.starts, &mut budget) {
                starts = s;
                sub = objective;
            } else {
                sub = stage.objective_of(&starts);
            }
        }
        let solution = assemble_solution(instance, &spaces, &starts)?;
        validate_solution(instance, &solution).map_err(LbbdError::Invalid)?;
        let tec = evaluate_tec(instance, &solution).expect("validated trace");
        debug_assert!((tec - inc.tec).abs() <= 1e-6 * (1.0 + tec.abs()));
        result.tec = Some(tec);
        result.makespan = Some(evaluate_makespan(instance, &solution));
        result.sub_objective = Some(sub);
        result.objective = Some(weights.combine(tec, sub as f64));
        result.solution = Some(solution);
    }
    Ok(finish(result, clock, t0, t_norm, t_warm, t_search))
}

fn finish(mut r: RunResult, clock: Option<&dyn Clock>, t0: f64, t_norm: f64, t_warm: f64, t_search: f64) -> RunResult {
    r.stats.times = PhaseTimes {
        normalizers: t_norm - t0,
        warmstart: t_warm - t_norm,
        search: t_search - t_warm,
        total: now(clock) - t0,
    };
    r
}

#[cfg(test)]
mod tests;
