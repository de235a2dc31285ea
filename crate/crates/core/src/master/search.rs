//! Chronological depth-first branch and bound over energy-task starts.
//!
//! Each level places the next task on the energy machine, so a path from the
//! root lists an assignment in start order and every assignment is reached
//! at most once.

use alloc::vec;
use alloc::vec::Vec;

use super::{Cut, MasterModel, OBJ_EPS};
use crate::budget::Budget;
use crate::subproblem::FixedStarts;

/// A full assignment that would improve the incumbent.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub starts: FixedStarts,
    pub tec: f64,
    /// Makespan estimate before the callback runs.
    pub q: u64,
    pub objective: f64,
}

pub enum Verdict {
    /// Cuts to add; an empty list accepts the candidate as is.
    Cuts(Vec<Cut>),
    /// Abandon the search.
    Stop,
}

pub trait LazyCallback {
    fn candidate(&mut self, candidate: &Candidate) -> Verdict;
}

/// Accepts every candidate.
pub struct NoCallback;

impl LazyCallback for NoCallback {
    fn candidate(&mut self, _: &Candidate) -> Verdict {
        Verdict::Cuts(Vec::new())
    }
}

impl<F: FnMut(&Candidate) -> Verdict> LazyCallback for F {
    fn candidate(&mut self, candidate: &Candidate) -> Verdict {
        self(candidate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    pub starts: FixedStarts,
    pub tec: f64,
    pub q: u64,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MasterStatus {
    /// Search closed; the incumbent is optimal.
    Optimal,
    /// Search closed without any acceptable assignment.
    Infeasible,
    /// Node or time budget ran out.
    Budget,
    /// The callback asked to stop.
    Stopped,
}

#[derive(Debug, Clone)]
pub struct MasterOutcome {
    pub status: MasterStatus,
    pub incumbent: Option<Incumbent>,
    /// Proven lower bound on the optimum, infinite when infeasible.
    pub bound: f64,
    pub nodes: u64,
    /// Objectives of the accepted incumbents, in order.
    pub trace: Vec<f64>,
}

#[derive(Clone)]
struct Node {
    /// Start per energy index, 0 while unplaced.
    starts: Vec<usize>,
    placed: usize,
    cur_end: usize,
    committed: f64,
    q_floor: usize,
    bound: f64,
}

struct Solver<'m, 'a, 'c> {
    model: &'m mut MasterModel<'a>,
    callback: &'c mut dyn LazyCallback,
    incumbent: Option<Incumbent>,
    trace: Vec<f64>,
    stopped: bool,
}

/// Solves the master to optimality under the current cut pool, invoking
/// `callback` on every assignment that would improve the incumbent. Cuts it
/// returns are added to the model before the assignment is re-assessed.
/// A warm start, if given, is assessed the same way first.
pub fn solve_master(
    model: &mut MasterModel<'_>,
    budget: &mut Budget<'_>,
    warmstart: Option<&FixedStarts>,
    callback: &mut dyn LazyCallback,
) -> MasterOutcome {
    let e = model.energy.len();
    let mut solver = Solver { model, callback, incumbent: None, trace: Vec::new(), stopped: false };
    if let Some(ws) = warmstart {
        if let Some(tec) = solver.model.energy_cost(ws) {
            let q = solver.model.makespan_bound(ws);
            solver.leaf(ws.clone(), tec, q);
        }
    }
    let mut root = Node { starts: vec![0; e], placed: 0, cur_end: 0, committed: 0.0, q_floor: 0, bound: 0.0 };
    let mut stack = Vec::new();
    if let Some(b) = solver.bound(&root) {
        root.bound = b;
        stack.push(root);
    }
    let mut nodes = 0;
    while !solver.stopped {
        let Some(node) = stack.pop() else { break };
        if solver.pruned(node.bound) {
            continue;
        }
        if !budget.tick() {
            stack.push(node);
            let open = stack.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
            let best = solver.incumbent.as_ref().map_or(f64::INFINITY, |i| i.objective);
            return MasterOutcome {
                status: MasterStatus::Budget,
                bound: open.min(best),
                incumbent: solver.incumbent,
                nodes,
                trace: solver.trace,
            };
        }
        nodes += 1;
        solver.expand(node, &mut stack);
    }
    let status = if solver.stopped {
        MasterStatus::Stopped
    } else if solver.incumbent.is_some() {
        MasterStatus::Optimal
    } else {
        MasterStatus::Infeasible
    };
    let bound = match (status, &solver.incumbent) {
        (MasterStatus::Optimal, Some(i)) => i.objective,
        (MasterStatus::Infeasible, _) => f64::INFINITY,
        _ => f64::NEG_INFINITY,
    };
    MasterOutcome { status, incumbent: solver.incumbent, bound, nodes, trace: solver.trace }
}

impl Solver<'_, '_, '_> {
    fn pruned(&self, bound: f64) -> bool {
        !bound.is_finite() || self.incumbent.as_ref().is_some_and(|i| bound >= i.objective - OBJ_EPS)
    }

    fn assignment(&self, starts: &[usize]) -> FixedStarts {
        FixedStarts::new(self.model.energy.iter().zip(starts).map(|(&j, &s)| (j, s)))
    }

    /// Lowest start of unplaced energy task `k` given the placed ones.
    fn lowest_start(&self, node: &Node, k: usize) -> Option<usize> {
        let m = &self.model;
        let mut lo = m.windows.earliest[m.energy[k]].max(node.cur_end + 1);
        for &(a, d) in &m.energy_anc[k] {
            if node.starts[a] == 0 {
                return None;
            }
            lo = lo.max(node.starts[a] + d);
        }
        Some(lo)
    }

    fn bound(&self, node: &Node) -> Option<f64> {
        let m = &self.model;
        let h = m.instance.horizon();
        let mut tec = node.committed;
        let mut q = node.q_floor;
        let mut rest = 0;
        let mut remaining = 0;
        for k in 0..m.energy.len() {
            if node.starts[k] != 0 {
                continue;
            }
            remaining += 1;
            let j = m.energy[k];
            // ancestors still unplaced: fall back on the machine position
            let lo = self.lowest_start(node, k).unwrap_or(m.windows.earliest[j].max(node.cur_end + 1));
            if lo > h {
                return None;
            }
            tec += m.sufmin[k][lo];
            if m.makespan_q {
                q = q.max(lo + m.tail[k]);
            }
            rest += m.instance.duration(j);
        }
        if remaining == 0 {
            tec += m.spaces.cost(node.cur_end + 1, h + 1)?;
        } else {
            tec += remaining as f64 * m.gap_lb + m.final_min[(node.cur_end + 2).min(h + 2)];
            if m.makespan_q {
                q = q.max(node.cur_end + rest);
            }
        }
        if !tec.is_finite() {
            return None;
        }
        Some(m.weights.energy_weight() * tec + m.weights.makespan_weight() * q as f64)
    }

    fn expand(&mut self, node: Node, stack: &mut Vec<Node>) {
        let e = self.model.energy.len();
        if node.placed == e {
            let tec = node.committed
                + self
                    .model
                    .spaces
                    .cost(node.cur_end + 1, self.model.instance.horizon() + 1)
                    .expect("closing gap was checked by the bound");
            let starts = self.assignment(&node.starts);
            self.leaf(starts, tec, node.q_floor as u64);
            return;
        }
        let mut children: Vec<(f64, usize, usize, Node)> = Vec::new();
        for k in 0..e {
            if node.starts[k] != 0 {
                continue;
            }
            let Some(lo) = self.lowest_start(&node, k) else { continue };
            let j = self.model.energy[k];
            let p = self.model.instance.duration(j);
            for s in lo..=self.model.windows.latest[j] {
                let Some(gap) = self.model.gap_cost(node.cur_end, s) else { continue };
                let cost = gap + self.model.jobcost[k][s];
                let starts = &node.starts;
                let forbidden = self.model.cuts.completes_forbidden((j, s), &|t| {
                    let idx = self.model.energy.binary_search(&t).expect("cut names an energy task");
                    if idx == k {
                        s
                    } else {
                        starts[idx]
                    }
                });
                if forbidden {
                    continue;
                }
                let mut child = node.clone();
                child.starts[k] = s;
                child.placed += 1;
                child.cur_end = s + p - 1;
                child.committed += cost;
                if self.model.makespan_q {
                    child.q_floor = child.q_floor.max(s + self.model.tail[k]);
                }
                let Some(b) = self.bound(&child) else { continue };
                if self.pruned(b) {
                    continue;
                }
                child.bound = b;
                children.push((cost, s, j, child));
            }
        }
        children.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        stack.extend(children.into_iter().rev().map(|c| c.3));
    }

    /// Assesses a complete assignment against the cuts, consults the callback
    /// when it would improve, and records it if it still does afterwards.
    fn leaf(&mut self, starts: FixedStarts, tec: f64, q_static: u64) {
        if self.model.cuts.forbids(&starts) {
            return;
        }
        let q = q_static.max(self.model.cuts.makespan_floor(&starts));
        let objective = self.model.objective(tec, q);
        if !self.improves(objective) {
            return;
        }
        let cand = Candidate { starts, tec, q, objective };
        match self.callback.candidate(&cand) {
            Verdict::Stop => {
                self.stopped = true;
                return;
            }
            Verdict::Cuts(cuts) => {
                for cut in cuts {
                    self.model.add_cut(cut);
                }
            }
        }
        if self.model.cuts.forbids(&cand.starts) {
            return;
        }
        let q = q.max(self.model.cuts.makespan_floor(&cand.starts));
        let objective = self.model.objective(tec, q);
        if self.improves(objective) {
            self.trace.push(objective);
            self.incumbent = Some(Incumbent { starts: cand.starts, tec, q, objective });
        }
    }

    fn improves(&self, objective: f64) -> bool {
        self.incumbent.as_ref().map_or(true, |i| objective < i.objective - OBJ_EPS)
    }
}
