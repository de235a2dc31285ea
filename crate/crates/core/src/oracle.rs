//! Exhaustive reference solver for tiny instances.
//!
//! Enumerates every resource- and precedence-feasible start vector and prices
//! the machine by its own recursion over transition blocks, sharing nothing
//! with the decomposition beyond the instance itself.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use alloc::format;
use alloc::string::String;

use crate::instance::Instance;
use crate::lp::{x, z, LpWriter};
use crate::machine::{MachineState, Step};
use crate::solution::{ObjectiveWeights, Solution};
use crate::spaces::SpacesTable;

pub const MAX_TASKS: usize = 10;
pub const MAX_HORIZON: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    TooLarge { tasks: usize, horizon: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { tasks, horizon } => write!(
                f,
                "brute force is limited to {MAX_TASKS} tasks and horizon {MAX_HORIZON}, got {tasks} and {horizon}"
            ),
        }
    }
}

impl core::error::Error for OracleError {}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBest {
    pub solution: Solution,
    pub tec: f64,
    pub makespan: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `None` when no feasible schedule exists.
    pub best: Option<OracleBest>,
    /// Start vectors that admit a machine trace.
    pub feasible: usize,
    /// Schedules within `1e-9` of the best objective, as `(tec, makespan)`.
    pub ties: Vec<(f64, usize)>,
}

const TIE: f64 = 1e-9;

fn check_size(instance: &Instance) -> Result<(), OracleError> {
    if instance.len() > MAX_TASKS || instance.horizon() > MAX_HORIZON {
        return Err(OracleError::TooLarge { tasks: instance.len(), horizon: instance.horizon() });
    }
    Ok(())
}

/// Calls `visit` with every start vector that respects precedences and
/// resource capacities, in lexicographic order of the topological sequence.
pub fn for_each_schedule(instance: &Instance, mut visit: impl FnMut(&[usize])) -> Result<(), OracleError> {
    check_size(instance)?;
    let h = instance.horizon();
    let order = instance.topological_order().to_vec();
    let mut usage = vec![vec![0u32; h + 1]; instance.resource_count()];
    let mut starts = vec![0usize; instance.len()];
    place(instance, &order, 0, &mut usage, &mut starts, &mut visit);
    Ok(())
}

fn place(
    instance: &Instance,
    order: &[usize],
    depth: usize,
    usage: &mut [Vec<u32>],
    starts: &mut [usize],
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == order.len() {
        visit(starts);
        return;
    }
    let j = order[depth];
    let task = instance.task(j);
    let p = task.duration;
    let lo = instance.predecessors(j).iter().map(|&a| starts[a] + instance.duration(a)).max().unwrap_or(1);
    let h = instance.horizon();
    if lo + p > h + 1 {
        return;
    }
    for s in lo..=h + 1 - p {
        let fits = task
            .demand
            .iter()
            .enumerate()
            .all(|(k, &d)| d == 0 || (s..s + p).all(|t| usage[k][t] + d <= instance.capacities()[k]));
        if !fits {
            continue;
        }
        for (k, &d) in task.demand.iter().enumerate() {
            for t in s..s + p {
                usage[k][t] += d;
            }
        }
        starts[j] = s;
        place(instance, order, depth + 1, usage, starts, visit);
        for (k, &d) in task.demand.iter().enumerate() {
            for t in s..s + p {
                usage[k][t] -= d;
            }
        }
    }
    starts[j] = 0;
}

/// Cheapest machine trace with processing exactly on `busy` intervals.
struct Pricing<'a> {
    instance: &'a Instance,
    busy: Vec<bool>,
    /// Keyed by `(interval, state, previous block was an off dwell)`.
    memo: BTreeMap<(usize, MachineState, bool), Option<f64>>,
}

impl Pricing<'_> {
    /// Blocks that may start at interval `t` from `state`.
    fn blocks(&self, t: usize, state: MachineState) -> Vec<(MachineState, usize, f64)> {
        let ts = self.instance.transitions();
        let h = self.instance.horizon();
        let mut out = Vec::new();
        for to in MachineState::ALL {
            let (Some(mut len), Some(power)) = (ts.time(state, to), ts.power(state, to)) else { continue };
            let proc = state == MachineState::Proc && to == MachineState::Proc;
            if proc {
                len = 1;
            }
            if t + len > h + 1 {
                continue;
            }
            if (t..t + len).any(|i| self.busy[i] != proc) {
                continue;
            }
            let price: f64 = (t..t + len).map(|i| self.instance.price(i)).sum();
            out.push((to, len, price * f64::from(power)));
        }
        out
    }

    fn cost(&mut self, t: usize, state: MachineState, off_dwell: bool) -> Option<f64> {
        let h = self.instance.horizon();
        if t == h + 1 {
            return off_dwell.then_some(0.0);
        }
        if let Some(&v) = self.memo.get(&(t, state, off_dwell)) {
            return v;
        }
        let mut best: Option<f64> = None;
        for (to, len, c) in self.blocks(t, state) {
            if t == 1 && !(state == MachineState::Off && to == MachineState::Off) {
                continue;
            }
            let dwell = state == MachineState::Off && to == MachineState::Off;
            if let Some(rest) = self.cost(t + len, to, dwell) {
                let total = c + rest;
                if best.map_or(true, |b| total < b) {
                    best = Some(total);
                }
            }
        }
        self.memo.insert((t, state, off_dwell), best);
        best
    }

    fn trace(&mut self) -> Option<(f64, Vec<Step>)> {
        let total = self.cost(1, MachineState::Off, false)?;
        let mut steps = Vec::new();
        let (mut t, mut state, mut remaining) = (1, MachineState::Off, total);
        let h = self.instance.horizon();
        while t <= h {
            let mut next = None;
            for (to, len, c) in self.blocks(t, state) {
                if t == 1 && !(state == MachineState::Off && to == MachineState::Off) {
                    continue;
                }
                let dwell = state == MachineState::Off && to == MachineState::Off;
                if let Some(rest) = self.cost(t + len, to, dwell) {
                    if (c + rest - remaining).abs() <= 1e-9 * (1.0 + remaining.abs()) {
                        next = Some((to, len, c));
                        break;
                    }
                }
            }
            let (to, len, c) = next.expect("optimal value is attained by some block");
            steps.extend(core::iter::repeat(Step::new(state, to)).take(len));
            remaining -= c;
            t += len;
            state = to;
        }
        Some((total, steps))
    }
}

/// Least energy cost of any machine trace for the given starts, with one
/// such trace. `None` if no trace exists.
pub fn cheapest_trace(instance: &Instance, starts: &[usize]) -> Option<(f64, Vec<Step>)> {
    let mut busy = vec![false; instance.horizon() + 2];
    for &j in instance.energy_tasks() {
        for i in starts[j]..starts[j] + instance.duration(j) {
            busy[i] = true;
        }
    }
    Pricing { instance, busy, memo: BTreeMap::new() }.trace()
}

/// Optimum of the weighted objective by full enumeration. Ties within `1e-9`
/// go to the lower energy cost, then the lower makespan, then the
/// lexicographically smaller start vector.
pub fn brute_force(instance: &Instance, weights: &ObjectiveWeights) -> Result<OracleResult, OracleError> {
    let mut priced: BTreeMap<Vec<usize>, Option<(f64, Vec<Step>)>> = BTreeMap::new();
    let energy = instance.energy_tasks().to_vec();
    let mut feasible = 0;
    let mut best: Option<(f64, f64, usize, Vec<usize>, Vec<Step>)> = None;
    let mut ties: Vec<(f64, usize)> = Vec::new();
    for_each_schedule(instance, |starts| {
        let key: Vec<usize> = energy.iter().map(|&j| starts[j]).collect();
        let entry = priced.entry(key).or_insert_with(|| cheapest_trace(instance, starts));
        let Some((tec, trace)) = entry else { return };
        feasible += 1;
        let makespan = starts.iter().enumerate().map(|(j, &s)| s + instance.duration(j) - 1).max().unwrap_or(0);
        let obj = weights.combine(*tec, makespan as f64);
        match &best {
            Some((bo, ..)) if obj < bo - TIE => ties.clear(),
            Some((bo, ..)) if obj > bo + TIE => {}
            _ => {
                if !ties.iter().any(|t| (t.0 - *tec).abs() <= TIE && t.1 == makespan) {
                    ties.push((*tec, makespan));
                }
            }
        }
        if best.as_ref().is_some_and(|b| obj < b.0 - TIE) {
            ties.push((*tec, makespan));
        }
        let better = match &best {
            None => true,
            Some((bo, bt, bm, bs, _)) => {
                if obj < bo - TIE {
                    true
                } else if obj > bo + TIE {
                    false
                } else if *tec < bt - TIE {
                    true
                } else if *tec > bt + TIE {
                    false
                } else {
                    (makespan, starts) < (*bm, bs.as_slice())
                }
            }
        };
        if better {
            best = Some((obj, *tec, makespan, starts.to_vec(), trace.clone()));
        }
    })?;
    ties.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(OracleResult {
        best: best.map(|(objective, tec, makespan, starts, trace)| OracleBest {
            solution: Solution::new(starts, trace),
            tec,
            makespan,
            objective,
        }),
        feasible,
        ties,
    })
}

/// The compact time-indexed model over all tasks in LP format. Task `n + 1`
/// is a dummy whose start equals the makespan. Starts ruled out by the
/// boundary condition of the energy machine are fixed to 0.
pub fn monolithic_lp(instance: &Instance, weights: &ObjectiveWeights) -> String {
    let h = instance.horizon();
    let n = instance.len();
    let spaces = SpacesTable::build(instance.transitions(), instance.tariff());
    let ts = instance.transitions();
    let up = ts.min_duration(MachineState::Off, MachineState::Proc);
    let down = ts.min_duration(MachineState::Proc, MachineState::Off);
    let proc = f64::from(ts.proc_power());
    let we = weights.energy_weight();
    let wm = weights.makespan_weight();
    let starts = |j: usize| 1..=h + 1 - instance.duration(j);
    let mut lp = LpWriter::new("compact time-indexed model");

    let mut gaps = Vec::new();
    for l in 1..=h {
        for m in l + 1..=h + 1 {
            if let Some(c) = spaces.cost(l, m) {
                gaps.push((l, m, c));
            }
        }
    }
    let mut obj = Vec::new();
    for &j in instance.energy_tasks() {
        let p = instance.duration(j);
        for s in starts(j) {
            let c: f64 = (s..s + p).map(|i| instance.price(i)).sum::<f64>() * proc;
            obj.push((we * c, x(j, s)));
        }
    }
    obj.extend(gaps.iter().map(|&(l, m, c)| (we * c, z(l, m))));
    obj.extend((1..=h).map(|t| (wm * t as f64, x(n, t))));
    lp.objective(&obj);

    let running = |j: usize, i: usize| {
        let p = instance.duration(j);
        (i.saturating_sub(p - 1).max(1)..=i).filter(move |&s| s + p <= h + 1)
    };
    for k in 0..instance.resource_count() {
        for i in 1..=h {
            let row: Vec<_> = (0..n)
                .filter(|&j| instance.task(j).demand[k] > 0)
                .flat_map(|j| running(j, i).map(move |s| (f64::from(instance.task(j).demand[k]), x(j, s))))
                .collect();
            if !row.is_empty() {
                lp.row(&format!("cap_{k}_{i}"), &row, "<=", f64::from(instance.capacities()[k]));
            }
        }
    }
    for j in 0..n {
        let row: Vec<_> = starts(j).map(|s| (1.0, x(j, s))).collect();
        lp.row(&format!("once_{}", j + 1), &row, "=", 1.0);
    }
    let row: Vec<_> = (1..=h).map(|t| (1.0, x(n, t))).collect();
    lp.row(&format!("once_{}", n + 1), &row, "=", 1.0);
    for &(u, v) in instance.arcs() {
        let mut row: Vec<_> = starts(v).map(|s| (s as f64, x(v, s))).collect();
        row.extend(starts(u).map(|s| (-(s as f64), x(u, s))));
        lp.row(&format!("prec_{}_{}", u + 1, v + 1), &row, ">=", instance.duration(u) as f64);
    }
    for i in 1..=h {
        let mut row: Vec<_> = instance
            .energy_tasks()
            .iter()
            .flat_map(|&j| running(j, i).map(move |s| (1.0, x(j, s))))
            .collect();
        row.extend(gaps.iter().filter(|g| g.0 <= i && i < g.1).map(|g| (1.0, z(g.0, g.1))));
        lp.row(&format!("cover_{i}"), &row, "=", 1.0);
    }
    for j in 0..n {
        // the dummy starts no earlier than the last occupied interval of j
        let mut row: Vec<_> = (1..=h).map(|t| (t as f64, x(n, t))).collect();
        row.extend(starts(j).map(|s| (-(s as f64), x(j, s))));
        lp.row(&format!("last_{}", j + 1), &row, ">=", instance.duration(j) as f64 - 1.0);
    }
    for &j in instance.energy_tasks() {
        let p = instance.duration(j);
        for s in starts(j) {
            let early = up.map_or(true, |u| s <= 1 + u);
            let late = down.map_or(true, |d| s + d + p > h);
            if early || late {
                lp.fix(x(j, s), 0.0);
            }
        }
    }
    for j in 0..n {
        starts(j).for_each(|s| lp.binary(x(j, s)));
    }
    (1..=h).for_each(|t| lp.binary(x(n, t)));
    gaps.iter().for_each(|&(l, m, _)| lp.binary(z(l, m)));
    lp.finish()
}


#[cfg(test)]
mod export_tests {
    use alloc::string::String;

    use super::*;
    use crate::lp::parse::parse;
    use crate::master::export_tests::{evaluate, figure_values};

    #[test]
    fn monolithic_structure() {
        let inst = Instance::worked_example();
        let w = ObjectiveWeights::new(0.75, 150.0, 11.0).unwrap();
        let lp = parse(&monolithic_lp(&inst, &w));
        let once = lp.rows.iter().filter(|r| r.0.starts_with("once_")).count();
        assert_eq!(once, 9);
        // boundary fixings for T2 (p = 1): starts 1..=3 and 15..=16
        for s in [1, 2, 3, 15, 16] {
            assert_eq!(lp.fixed.get(&x(1, s)), Some(&0.0), "start {s}");
        }
        assert!(!lp.fixed.contains_key(&x(1, 4)));
        assert!(!lp.fixed.contains_key(&x(1, 14)));
        let spaces = SpacesTable::build(inst.transitions(), inst.tariff());
        for s in 4..=13 {
            assert_eq!(lp.objective[&x(1, s)], spaces.job_cost(1, s).unwrap() * 0.75 / 150.0);
        }
    }

    #[test]
    fn figure_schedule_satisfies_monolithic_rows() {
        let inst = Instance::worked_example();
        let w = ObjectiveWeights::new(0.75, 150.0, 11.0).unwrap();
        let lp = parse(&monolithic_lp(&inst, &w));
        let mut values = figure_values();
        for (j, s) in [(0, 1), (2, 5), (3, 7), (4, 5), (7, 11)] {
            values.insert(x(j, s), 1.0);
        }
        values.insert(x(8, 12), 1.0);
        let obj = evaluate(&lp, &values).unwrap();
        assert!((obj - w.combine(172.0, 12.0)).abs() < 1e-12);
        // a dummy below the makespan is rejected
        values.remove(&x(8, 12));
        values.insert(x(8, 11), 1.0);
        assert_eq!(evaluate(&lp, &values).unwrap_err(), String::from("last_8"));
    }
}
