//! The three-state energy machine and its transition tables.

use core::fmt;

/// Operating state of the energy-intensive machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MachineState {
    Proc,
    Idle,
    Off,
}

impl MachineState {
    pub const ALL: [MachineState; 3] = [MachineState::Proc, MachineState::Idle, MachineState::Off];

    #[inline]
    pub const fn index(self) -> usize {
        match self {
            MachineState::Proc => 0,
            MachineState::Idle => 1,
            MachineState::Off => 2,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            MachineState::Proc => "proc",
            MachineState::Idle => "idle",
            MachineState::Off => "off",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "proc" => Some(MachineState::Proc),
            "idle" => Some(MachineState::Idle),
            "off" => Some(MachineState::Off),
            _ => None,
        }
    }
}

impl fmt::Display for MachineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One entry of the per-interval machine trace: the machine is moving from
/// `from` to `to` (or dwelling when both are equal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub from: MachineState,
    pub to: MachineState,
}

impl Step {
    pub const fn new(from: MachineState, to: MachineState) -> Self {
        Step { from, to }
    }

    pub const fn dwell(state: MachineState) -> Self {
        Step { from: state, to: state }
    }

    #[inline]
    pub fn is_dwell(self) -> bool {
        self.from == self.to
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitionError {
    /// A finite transition time of zero.
    ZeroDuration(MachineState, MachineState),
    /// Exactly one of time and power is infinite.
    MismatchedInfinity(MachineState, MachineState),
    /// A state cannot dwell.
    MissingSelfLoop(MachineState),
}

impl fmt::Display for TransitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionError::ZeroDuration(a, b) => write!(f, "transition {a}->{b} has zero duration"),
            TransitionError::MismatchedInfinity(a, b) => {
                write!(f, "transition {a}->{b} must have both time and power finite or both infinite")
            }
            TransitionError::MissingSelfLoop(s) => write!(f, "state {s} has no finite self-loop"),
        }
    }
}

impl core::error::Error for TransitionError {}

/// Transition time `T` (intervals) and power `P` per ordered state pair.
/// `None` stands for an infeasible transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    time: [[Option<usize>; 3]; 3],
    power: [[Option<u32>; 3]; 3],
}

impl TransitionSystem {
    pub fn new(
        time: [[Option<usize>; 3]; 3],
        power: [[Option<u32>; 3]; 3],
    ) -> Result<Self, TransitionError> {
        for from in MachineState::ALL {
            for to in MachineState::ALL {
                let (t, p) = (time[from.index()][to.index()], power[from.index()][to.index()]);
                if t.is_some() != p.is_some() {
                    return Err(TransitionError::MismatchedInfinity(from, to));
                }
                if t == Some(0) {
                    return Err(TransitionError::ZeroDuration(from, to));
                }
            }
            if time[from.index()][from.index()].is_none() {
                return Err(TransitionError::MissingSelfLoop(from));
            }
        }
        Ok(TransitionSystem { time, power })
    }

    /// The proc/idle/off machine used throughout the worked example:
    /// ramp-up off->proc takes 2 intervals at power 5, everything else 1 interval.
    pub fn example() -> Self {
        const INF: Option<usize> = None;
        TransitionSystem::new(
            [
                [Some(1), Some(1), Some(1)],
                [Some(1), Some(1), INF],
                [Some(2), INF, Some(1)],
            ],
            [
                [Some(4), Some(2), Some(1)],
                [Some(2), Some(2), None],
                [Some(5), None, Some(0)],
            ],
        )
        .expect("example transition system is valid")
    }

    #[inline]
    pub fn time(&self, from: MachineState, to: MachineState) -> Option<usize> {
        self.time[from.index()][to.index()]
    }

    #[inline]
    pub fn power(&self, from: MachineState, to: MachineState) -> Option<u32> {
        self.power[from.index()][to.index()]
    }

    pub fn time_table(&self) -> &[[Option<usize>; 3]; 3] {
        &self.time
    }

    pub fn power_table(&self) -> &[[Option<u32>; 3]; 3] {
        &self.power
    }

    /// Power drawn while processing a task.
    pub fn proc_power(&self) -> u32 {
        self.power(MachineState::Proc, MachineState::Proc)
            .expect("proc self-loop is finite")
    }

    /// Fewest intervals needed to go from `from` to `to` without dwelling in
    /// proc along the way. `None` if unreachable.
    pub fn min_duration(&self, from: MachineState, to: MachineState) -> Option<usize> {
        // Bellman-Ford style relaxation over 3 nodes; durations are positive.
        let mut dist = [None::<usize>; 3];
        for mid in MachineState::ALL {
            if from == MachineState::Proc && mid == MachineState::Proc {
                continue;
            }
            if let Some(t) = self.time(from, mid) {
                dist[mid.index()] = Some(t);
            }
        }
        for _ in 0..3 {
            for a in MachineState::ALL {
                let Some(da) = dist[a.index()] else { continue };
                for b in MachineState::ALL {
                    if a == MachineState::Proc && b == MachineState::Proc {
                        continue;
                    }
                    if let Some(t) = self.time(a, b) {
                        let cand = da + t;
                        if dist[b.index()].map_or(true, |d| cand < d) {
                            dist[b.index()] = Some(cand);
                        }
                    }
                }
            }
        }
        dist[to.index()]
    }
}
