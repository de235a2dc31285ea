//! Result documents: the JSON printed by `solve` and the CSV rows of `bench`.

use enersched::lbbd::{Normalizer, RunStats};
use enersched::oracle::OracleResult;
use enersched::{RunResult, RunStatus};
use serde::Serialize;

use crate::format::SolutionFile;

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizerReport {
    pub value: f64,
    pub raw: f64,
    pub proven: bool,
    pub guarded: bool,
}

impl From<Normalizer> for NormalizerReport {
    fn from(n: Normalizer) -> Self {
        NormalizerReport { value: n.value, raw: n.raw, proven: n.proven, guarded: n.guarded }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub master_nodes: u64,
    pub subproblem_calls: usize,
    pub feasibility_cuts: usize,
    pub nogood_cuts: usize,
    pub optimality_cuts: usize,
    pub mean_conflict_size: Option<f64>,
    pub non_minimal_conflicts: usize,
    pub inconclusive_subproblems: usize,
    pub incumbents: usize,
    pub warmstart_objective: Option<f64>,
    pub seconds_normalizers: f64,
    pub seconds_warmstart: f64,
    pub seconds_search: f64,
}

impl StatsReport {
    fn new(stats: &RunStats, incumbents: usize, warmstart_objective: Option<f64>) -> Self {
        StatsReport {
            master_nodes: stats.master_nodes,
            subproblem_calls: stats.subproblem_calls,
            feasibility_cuts: stats.feasibility_cuts,
            nogood_cuts: stats.nogood_cuts,
            optimality_cuts: stats.optimality_cuts,
            mean_conflict_size: stats.mean_conflict_size(),
            non_minimal_conflicts: stats.non_minimal_conflicts,
            inconclusive_subproblems: stats.inconclusive,
            incumbents,
            warmstart_objective,
            seconds_normalizers: stats.times.normalizers,
            seconds_warmstart: stats.times.warmstart,
            seconds_search: stats.times.search,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    /// Start vectors that admit a machine trace.
    pub feasible_schedules: usize,
    /// Schedules sharing the optimal objective.
    pub optimal_schedules: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub instance: String,
    pub method: String,
    pub alpha: f64,
    pub status: String,
    pub objective: Option<f64>,
    pub tec: Option<f64>,
    pub makespan: Option<usize>,
    pub bound: Option<f64>,
    pub lb_tec: Option<NormalizerReport>,
    pub lb_rcpsp: Option<NormalizerReport>,
    pub solution: Option<SolutionFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    pub seconds: f64,
}

impl SolveReport {
    pub fn from_run(instance: &str, alpha: f64, r: &RunResult, seconds: f64) -> Self {
        SolveReport {
            instance: instance.to_string(),
            method: "lbbd".into(),
            alpha,
            status: r.status.name().into(),
            objective: r.objective,
            tec: r.tec,
            makespan: r.makespan,
            bound: finite(r.bound),
            lb_tec: r.lb_tec.map(Into::into),
            lb_rcpsp: r.lb_sub.map(Into::into),
            solution: r.solution.as_ref().map(SolutionFile::from_solution),
            stats: Some(StatsReport::new(&r.stats, r.incumbents.len(), r.warmstart_objective)),
            oracle: None,
            seconds,
        }
    }

    pub fn from_oracle(
        instance: &str,
        alpha: f64,
        normalizers: Option<(Normalizer, Normalizer)>,
        r: &OracleResult,
        seconds: f64,
    ) -> Self {
        let best = r.best.as_ref();
        let status = if best.is_some() { RunStatus::Optimal } else { RunStatus::Infeasible };
        SolveReport {
            instance: instance.to_string(),
            method: "oracle".into(),
            alpha,
            status: status.name().into(),
            objective: best.map(|b| b.objective),
            tec: best.map(|b| b.tec),
            makespan: best.map(|b| b.makespan),
            bound: best.map(|b| b.objective),
            lb_tec: normalizers.map(|n| n.0.into()),
            lb_rcpsp: normalizers.map(|n| n.1.into()),
            solution: best.map(|b| SolutionFile::from_solution(&b.solution)),
            stats: None,
            oracle: Some(OracleReport { feasible_schedules: r.feasible, optimal_schedules: r.ties.len() }),
            seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// One `bench` row. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub tasks: usize,
    pub energy_tasks: usize,
    pub horizon: usize,
    pub alpha: f64,
    pub status: String,
    pub objective: Option<f64>,
    pub tec: Option<f64>,
    pub makespan: Option<usize>,
    pub bound: Option<f64>,
    pub lb_tec: Option<f64>,
    pub lb_rcpsp: Option<f64>,
    pub feasibility_cuts: usize,
    pub nogood_cuts: usize,
    pub optimality_cuts: usize,
    pub total_cuts: usize,
    pub mean_conflict_size: Option<f64>,
    pub master_nodes: u64,
    pub subproblem_calls: usize,
    pub seconds: f64,
}

pub const BENCH_COLUMNS: [&str; 20] = [
    "instance",
    "tasks",
    "energy_tasks",
    "horizon",
    "alpha",
    "status",
    "objective",
    "tec",
    "makespan",
    "bound",
    "lb_tec",
    "lb_rcpsp",
    "feasibility_cuts",
    "nogood_cuts",
    "optimality_cuts",
    "total_cuts",
    "mean_conflict_size",
    "master_nodes",
    "subproblem_calls",
    "seconds",
];

impl BenchRow {
    pub fn new(name: &str, instance: &enersched::Instance, alpha: f64, r: &RunResult, seconds: f64) -> Self {
        BenchRow {
            instance: name.to_string(),
            tasks: instance.len(),
            energy_tasks: instance.energy_tasks().len(),
            horizon: instance.horizon(),
            alpha,
            status: r.status.name().into(),
            objective: r.objective,
            tec: r.tec,
            makespan: r.makespan,
            bound: finite(r.bound),
            lb_tec: r.lb_tec.map(|n| n.value),
            lb_rcpsp: r.lb_sub.map(|n| n.value),
            feasibility_cuts: r.stats.feasibility_cuts,
            nogood_cuts: r.stats.nogood_cuts,
            optimality_cuts: r.stats.optimality_cuts,
            total_cuts: r.stats.total_cuts(),
            mean_conflict_size: r.stats.mean_conflict_size(),
            master_nodes: r.stats.master_nodes,
            subproblem_calls: r.stats.subproblem_calls,
            seconds,
        }
    }
}

/// Rows sorted by instance name, then alpha.
pub fn bench_csv(rows: &mut [BenchRow]) -> String {
    rows.sort_by(|a, b| a.instance.cmp(&b.instance).then(a.alpha.total_cmp(&b.alpha)));
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(BENCH_COLUMNS).expect("in-memory write");
    }
    for row in rows.iter() {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}
