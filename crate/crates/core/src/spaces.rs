//! Cheapest machine transitions between processing intervals.
//!
//! Nodes of the time-expanded graph are `(state, t)`: the machine is in
//! `state` at the start of interval `t`. A transition `s -> s'` leaving at `t`
//! arrives at `t + T(s, s')` and costs `P(s, s')` times the price of every
//! interval it spans. The graph is layered by `t`, so a single forward sweep
//! per source gives exact shortest paths even with negative prices.
//!
//! A gap `(l, m)` covers intervals `l..m`. It leaves proc at `l` (or starts
//! off when `l == 1`) and arrives in proc at `m` (or ends off when
//! `m == h + 1`). Dwelling in proc inside a gap is not allowed since a proc
//! dwell means a task is running. The first and last interval of the horizon
//! are spent dwelling off.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::machine::{MachineState, Step, TransitionSystem};
use crate::solution::COST_EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpacesError {
    OutOfRange { l: usize, m: usize },
    Unreachable { l: usize, m: usize },
    JobOutsideHorizon { start: usize, duration: usize },
}

impl fmt::Display for SpacesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpacesError::OutOfRange { l, m } => write!(f, "gap ({l}, {m}) is outside the table"),
            SpacesError::Unreachable { l, m } => write!(f, "no transition spans gap ({l}, {m})"),
            SpacesError::JobOutsideHorizon { start, duration } => {
                write!(f, "job of length {duration} starting at {start} leaves the horizon")
            }
        }
    }
}

impl core::error::Error for SpacesError {}

#[derive(Debug, Clone, Copy)]
struct Label {
    cost: f64,
    /// Arrival time of the first move into off, `usize::MAX` if none yet.
    first_off: usize,
    /// Number of state changes so far.
    moves: usize,
}

impl Label {
    fn beats(&self, other: &Label) -> bool {
        self.cost < other.cost - COST_EPS
            || ((self.cost - other.cost).abs() <= COST_EPS
                && (self.first_off, self.moves) < (other.first_off, other.moves))
    }
}

type Layer = [Option<Label>; 3];
type PredLayer = [Option<(MachineState, usize)>; 3];

/// Optimal gap costs for every `1 <= l < m <= h + 1`.
#[derive(Debug, Clone)]
pub struct SpacesTable {
    horizon: usize,
    tariff: Vec<f64>,
    transitions: TransitionSystem,
    cstar: Vec<Option<f64>>,
}

impl SpacesTable {
    /// Builds the table with one forward sweep per source interval.
    pub fn build(transitions: &TransitionSystem, tariff: &[f64]) -> Self {
        let h = tariff.len();
        let mut table = SpacesTable {
            horizon: h,
            tariff: tariff.to_vec(),
            transitions: transitions.clone(),
            cstar: vec![None; h * (h + 1)],
        };
        for l in 1..=h {
            let (dist, _) = table.sweep(l, false);
            for m in l + 1..=h + 1 {
                let target = Self::target_state(h, m);
                table.cstar[(l - 1) * (h + 1) + (m - 1)] = dist[m - l][target.index()].map(|lab| lab.cost);
            }
        }
        table
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn transitions(&self) -> &TransitionSystem {
        &self.transitions
    }

    fn source_state(l: usize) -> MachineState {
        if l == 1 {
            MachineState::Off
        } else {
            MachineState::Proc
        }
    }

    fn target_state(h: usize, m: usize) -> MachineState {
        if m == h + 1 {
            MachineState::Off
        } else {
            MachineState::Proc
        }
    }

    fn sweep(&self, l: usize, with_pred: bool) -> (Vec<Layer>, Vec<PredLayer>) {
        let h = self.horizon;
        let width = h + 2 - l;
        let mut dist: Vec<Layer> = vec![[None; 3]; width];
        let mut pred: Vec<PredLayer> = if with_pred { vec![[None; 3]; width] } else { Vec::new() };
        let start = Self::source_state(l);
        dist[0][start.index()] = Some(Label {
            cost: 0.0,
            first_off: if start == MachineState::Off { l } else { usize::MAX },
            moves: 0,
        });
        for t in l..=h {
            for from in MachineState::ALL {
                let Some(label) = dist[t - l][from.index()] else { continue };
                for to in MachineState::ALL {
                    if from == MachineState::Proc && to == MachineState::Proc {
                        continue;
                    }
                    // interval 1 is an off dwell
                    if t == 1 && to != MachineState::Off {
                        continue;
                    }
                    let Some(dur) = self.transitions.time(from, to) else { continue };
                    let arrive = t + dur;
                    if arrive > h + 1 {
                        continue;
                    }
                    // interval h is an off dwell
                    if arrive == h + 1 && to == MachineState::Off && from != MachineState::Off {
                        continue;
                    }
                    let power = f64::from(self.transitions.power(from, to).expect("finite with time"));
                    let mut cost = label.cost;
                    for i in t..arrive {
                        cost += self.tariff[i - 1] * power;
                    }
                    let first_off = if label.first_off == usize::MAX && to == MachineState::Off {
                        arrive
                    } else {
                        label.first_off
                    };
                    let moves = label.moves + usize::from(from != to);
                    let cand = Label { cost, first_off, moves };
                    let slot = &mut dist[arrive - l][to.index()];
                    if slot.map_or(true, |cur| cand.beats(&cur)) {
                        *slot = Some(cand);
                        if with_pred {
                            pred[arrive - l][to.index()] = Some((from, t));
                        }
                    }
                }
            }
        }
        (dist, pred)
    }

    /// Gap cost with no range check; `None` when no sequence fits exactly.
    #[inline]
    pub fn cost(&self, l: usize, m: usize) -> Option<f64> {
        self.cstar[(l - 1) * (self.horizon + 1) + (m - 1)]
    }

    /// Checked lookup of the cheapest transition over intervals `l..m`.
    pub fn transition_cost(&self, l: usize, m: usize) -> Result<Option<f64>, SpacesError> {
        if l == 0 || l >= m || m > self.horizon + 1 {
            return Err(SpacesError::OutOfRange { l, m });
        }
        Ok(self.cost(l, m))
    }

    /// Cost of processing a job of `duration` intervals from `start`.
    pub fn job_cost(&self, duration: usize, start: usize) -> Result<f64, SpacesError> {
        if start == 0 || duration == 0 || start + duration - 1 > self.horizon {
            return Err(SpacesError::JobOutsideHorizon { start, duration });
        }
        let power = f64::from(self.transitions.proc_power());
        let mut total = 0.0;
        for i in start..start + duration {
            total += self.tariff[i - 1] * power;
        }
        Ok(total)
    }

    /// The per-interval steps of one cheapest transition over `l..m`.
    pub fn reconstruct(&self, l: usize, m: usize) -> Result<Vec<Step>, SpacesError> {
        if self.transition_cost(l, m)?.is_none() {
            return Err(SpacesError::Unreachable { l, m });
        }
        let (_, pred) = self.sweep(l, true);
        let mut state = Self::target_state(self.horizon, m);
        let mut t = m;
        let mut steps = Vec::with_capacity(m - l);
        while t > l {
            let (from, left) = pred[t - l][state.index()].expect("reachable node has a predecessor");
            for _ in left..t {
                steps.push(Step::new(from, state));
            }
            state = from;
            t = left;
        }
        steps.reverse();
        Ok(steps)
    }

    /// Smallest finite gap cost in the table.
    pub fn min_cost(&self) -> Option<f64> {
        self.cstar.iter().flatten().copied().reduce(f64::min)
    }

    /// `l,m,cost` rows for every gap, `inf` when unreachable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,m,cost\n");
        for l in 1..=self.horizon {
            for m in l + 1..=self.horizon + 1 {
                match self.cost(l, m) {
                    Some(c) => writeln!(out, "{l},{m},{c}"),
                    None => writeln!(out, "{l},{m},inf"),
                }
                .expect("writing to a String cannot fail");
            }
        }
        out
    }
}
