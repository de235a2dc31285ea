//! Solutions, their validation, and objective evaluation.
//!
//! A solution is a start interval per task plus a machine trace with one
//! [`Step`] per interval of the horizon. A task started at `s` with duration
//! `p` occupies intervals `s..=s+p-1` and completes at the end of interval
//! `s+p-1`, so the makespan is `max(s+p-1)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::Instance;
use crate::machine::{MachineState, Step};

/// Absolute tolerance for all cost comparisons.
pub const COST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// 1-based start interval per task.
    pub starts: Vec<usize>,
    /// Machine trace, `trace[i - 1]` for interval `i`.
    pub trace: Vec<Step>,
}

impl Solution {
    pub fn new(starts: Vec<usize>, trace: Vec<Step>) -> Self {
        Solution { starts, trace }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub alpha: f64,
    pub lb_tec: f64,
    pub lb_rcpsp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightsError {
    AlphaOutOfRange(f64),
    ZeroNormalizer,
}

impl fmt::Display for WeightsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightsError::AlphaOutOfRange(a) => write!(f, "alpha {a} is outside [0, 1]"),
            WeightsError::ZeroNormalizer => f.write_str("normalizers must be finite and nonzero"),
        }
    }
}

impl core::error::Error for WeightsError {}

impl ObjectiveWeights {
    pub fn new(alpha: f64, lb_tec: f64, lb_rcpsp: f64) -> Result<Self, WeightsError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(WeightsError::AlphaOutOfRange(alpha));
        }
        if lb_tec == 0.0 || lb_rcpsp == 0.0 || !lb_tec.is_finite() || !lb_rcpsp.is_finite() {
            return Err(WeightsError::ZeroNormalizer);
        }
        Ok(ObjectiveWeights { alpha, lb_tec, lb_rcpsp })
    }

    /// Coefficient applied to the energy cost.
    #[inline]
    pub fn energy_weight(&self) -> f64 {
        self.alpha / self.lb_tec
    }

    /// Coefficient applied to the makespan.
    #[inline]
    pub fn makespan_weight(&self) -> f64 {
        (1.0 - self.alpha) / self.lb_rcpsp
    }

    #[inline]
    pub fn combine(&self, tec: f64, makespan: f64) -> f64 {
        self.energy_weight() * tec + self.makespan_weight() * makespan
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalError {
    TraceLength { expected: usize, found: usize },
    InfinitePower { interval: usize },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::TraceLength { expected, found } => {
                write!(f, "trace has {found} steps, horizon is {expected}")
            }
            EvalError::InfinitePower { interval } => write!(f, "infeasible transition at interval {interval}"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Total energy cost: sum over intervals of price times step power.
pub fn evaluate_tec(instance: &Instance, solution: &Solution) -> Result<f64, EvalError> {
    if solution.trace.len() != instance.horizon() {
        return Err(EvalError::TraceLength { expected: instance.horizon(), found: solution.trace.len() });
    }
    let ts = instance.transitions();
    let mut total = 0.0;
    for (i, step) in solution.trace.iter().enumerate() {
        let power = ts.power(step.from, step.to).ok_or(EvalError::InfinitePower { interval: i + 1 })?;
        total += instance.tariff()[i] * f64::from(power);
    }
    Ok(total)
}

/// Completion of the last task, `max(start + duration - 1)`.
pub fn evaluate_makespan(instance: &Instance, solution: &Solution) -> usize {
    solution
        .starts
        .iter()
        .zip(instance.tasks())
        .map(|(&s, t)| s + t.duration - 1)
        .max()
        .unwrap_or(0)
}

pub fn evaluate_objective(
    instance: &Instance,
    solution: &Solution,
    weights: &ObjectiveWeights,
) -> Result<f64, EvalError> {
    let tec = evaluate_tec(instance, solution)?;
    Ok(weights.combine(tec, evaluate_makespan(instance, solution) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Shape,
    StartOutsideHorizon,
    Overload,
    Precedence,
    UncoveredProcessing,
    ProcWithoutTask,
    BoundaryNotOff,
    InfeasibleTransition,
    WrongDuration,
    BrokenChain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    StartCount { expected: usize, found: usize },
    TraceLength { expected: usize, found: usize },
    StartOutsideHorizon { task: usize, start: usize },
    Overload { resource: usize, interval: usize, usage: u32, capacity: u32 },
    Precedence { before: usize, after: usize },
    /// An energy task runs at `interval` but the machine is not dwelling in proc.
    UncoveredProcessing { task: usize, interval: usize },
    /// The machine dwells in proc while no energy task runs.
    ProcWithoutTask { interval: usize },
    BoundaryNotOff { interval: usize },
    InfeasibleTransition { interval: usize, step: Step },
    WrongDuration { interval: usize, step: Step, expected: usize, found: usize },
    BrokenChain { interval: usize },
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::StartCount { .. } | Violation::TraceLength { .. } => ViolationKind::Shape,
            Violation::StartOutsideHorizon { .. } => ViolationKind::StartOutsideHorizon,
            Violation::Overload { .. } => ViolationKind::Overload,
            Violation::Precedence { .. } => ViolationKind::Precedence,
            Violation::UncoveredProcessing { .. } => ViolationKind::UncoveredProcessing,
            Violation::ProcWithoutTask { .. } => ViolationKind::ProcWithoutTask,
            Violation::BoundaryNotOff { .. } => ViolationKind::BoundaryNotOff,
            Violation::InfeasibleTransition { .. } => ViolationKind::InfeasibleTransition,
            Violation::WrongDuration { .. } => ViolationKind::WrongDuration,
            Violation::BrokenChain { .. } => ViolationKind::BrokenChain,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::StartCount { expected, found } => write!(f, "{found} starts given for {expected} tasks"),
            Violation::TraceLength { expected, found } => write!(f, "trace has {found} steps, horizon is {expected}"),
            Violation::StartOutsideHorizon { task, start } => {
                write!(f, "task {task} starting at {start} does not fit the horizon")
            }
            Violation::Overload { resource, interval, usage, capacity } => {
                write!(f, "resource {resource} uses {usage} > {capacity} at interval {interval}")
            }
            Violation::Precedence { before, after } => write!(f, "task {after} starts before task {before} completes"),
            Violation::UncoveredProcessing { task, interval } => {
                write!(f, "task {task} runs at interval {interval} while the machine is not processing")
            }
            Violation::ProcWithoutTask { interval } => write!(f, "machine processes at interval {interval} with no task"),
            Violation::BoundaryNotOff { interval } => write!(f, "machine must be off at interval {interval}"),
            Violation::InfeasibleTransition { interval, step } => {
                write!(f, "infeasible step {step} at interval {interval}")
            }
            Violation::WrongDuration { interval, step, expected, found } => {
                write!(f, "step {step} at interval {interval} lasts {found}, expected {expected}")
            }
            Violation::BrokenChain { interval } => write!(f, "step at interval {interval} does not continue the previous one"),
        }
    }
}

/// Checks a solution against every feasibility rule and returns all
/// violations found. Never panics on malformed input.
pub fn validate_solution(instance: &Instance, solution: &Solution) -> Result<(), Vec<Violation>> {
    let h = instance.horizon();
    let n = instance.len();
    let mut out = Vec::new();
    if solution.starts.len() != n {
        out.push(Violation::StartCount { expected: n, found: solution.starts.len() });
    }
    if solution.trace.len() != h {
        out.push(Violation::TraceLength { expected: h, found: solution.trace.len() });
    }
    if !out.is_empty() {
        return Err(out);
    }
    for (j, &s) in solution.starts.iter().enumerate() {
        if s == 0 || s + instance.duration(j) - 1 > h {
            out.push(Violation::StartOutsideHorizon { task: j, start: s });
        }
    }
    if !out.is_empty() {
        return Err(out);
    }

    // resources
    for k in 0..instance.resource_count() {
        let mut usage = vec![0u32; h + 1];
        for (j, task) in instance.tasks().iter().enumerate() {
            let d = task.demand[k];
            if d == 0 {
                continue;
            }
            let s = solution.starts[j];
            for u in &mut usage[s..s + task.duration] {
                *u += d;
            }
        }
        let cap = instance.capacities()[k];
        for (i, &u) in usage.iter().enumerate().skip(1) {
            if u > cap {
                out.push(Violation::Overload { resource: k, interval: i, usage: u, capacity: cap });
            }
        }
    }

    // precedences
    for &(u, v) in instance.arcs() {
        if solution.starts[u] + instance.duration(u) > solution.starts[v] {
            out.push(Violation::Precedence { before: u, after: v });
        }
    }

    // exact cover of every interval by processing or a transition
    let mut running: Vec<Option<usize>> = vec![None; h + 1];
    for &j in instance.energy_tasks() {
        let s = solution.starts[j];
        for slot in &mut running[s..s + instance.duration(j)] {
            slot.get_or_insert(j);
        }
    }
    let proc_dwell = Step::dwell(MachineState::Proc);
    for i in 1..=h {
        let step = solution.trace[i - 1];
        match running[i] {
            Some(j) if step != proc_dwell => out.push(Violation::UncoveredProcessing { task: j, interval: i }),
            None if step == proc_dwell => out.push(Violation::ProcWithoutTask { interval: i }),
            _ => {}
        }
    }

    // boundary
    let off_dwell = Step::dwell(MachineState::Off);
    if solution.trace[0] != off_dwell {
        out.push(Violation::BoundaryNotOff { interval: 1 });
    }
    if solution.trace[h - 1] != off_dwell && h > 1 {
        out.push(Violation::BoundaryNotOff { interval: h });
    }

    // step durations and chaining, run by run
    let ts = instance.transitions();
    let mut i = 0;
    let mut previous: Option<Step> = None;
    while i < h {
        let step = solution.trace[i];
        let mut len = 1;
        while i + len < h && solution.trace[i + len] == step {
            len += 1;
        }
        if let Some(prev) = previous {
            if prev.to != step.from {
                out.push(Violation::BrokenChain { interval: i + 1 });
            }
        }
        match (ts.time(step.from, step.to), ts.power(step.from, step.to)) {
            (Some(t), Some(_)) => {
                let ok = if step == proc_dwell {
                    true
                } else if step.is_dwell() {
                    len % t == 0
                } else {
                    len == t
                };
                if !ok {
                    out.push(Violation::WrongDuration { interval: i + 1, step, expected: t, found: len });
                }
            }
            _ => out.push(Violation::InfeasibleTransition { interval: i + 1, step }),
        }
        previous = Some(step);
        i += len;
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
