//! Problem instances: tasks, renewable resources, precedences, horizon and tariff.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::machine::{TransitionError, TransitionSystem};

/// Index of the unary, energy-intensive resource.
pub const ENERGY_RESOURCE: usize = 0;

/// A non-preemptive task. Its identity is its position in [`Instance::tasks`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    /// Processing time in intervals.
    pub duration: usize,
    /// Demand per resource; `demand[0]` is the energy resource.
    pub demand: Vec<u32>,
}

impl Task {
    pub fn new(duration: usize, demand: Vec<u32>) -> Self {
        Task { duration, demand }
    }

    #[inline]
    pub fn is_energy_intensive(&self) -> bool {
        self.demand.first().copied().unwrap_or(0) > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    NoTasks,
    EmptyHorizon,
    TariffLength { expected: usize, found: usize },
    NonFiniteTariff { interval: usize },
    NoResources,
    EnergyCapacity(u32),
    DemandArity { task: usize, expected: usize, found: usize },
    ZeroDuration { task: usize },
    /// An energy task must demand exactly one unit of R0 and nothing else.
    EnergyDemand { task: usize },
    NoEnergyTask,
    UnknownTask { arc: (usize, usize) },
    SelfArc { task: usize },
    /// The precedence graph has a cycle; the payload lists it in order.
    Cycle(Vec<usize>),
    Transitions(TransitionError),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::NoTasks => f.write_str("instance has no tasks"),
            InstanceError::EmptyHorizon => f.write_str("horizon must be at least one interval"),
            InstanceError::TariffLength { expected, found } => {
                write!(f, "tariff has {found} entries, horizon needs {expected}")
            }
            InstanceError::NonFiniteTariff { interval } => write!(f, "tariff at interval {interval} is not finite"),
            InstanceError::NoResources => f.write_str("instance declares no resources"),
            InstanceError::EnergyCapacity(c) => write!(f, "energy resource capacity must be 1, got {c}"),
            InstanceError::DemandArity { task, expected, found } => {
                write!(f, "task {task} lists {found} demands, expected {expected}")
            }
            InstanceError::ZeroDuration { task } => write!(f, "task {task} has zero duration"),
            InstanceError::EnergyDemand { task } => {
                write!(f, "energy task {task} must demand exactly 1 of R0 and nothing else")
            }
            InstanceError::NoEnergyTask => f.write_str("instance has no energy-intensive task"),
            InstanceError::UnknownTask { arc } => write!(f, "precedence {}->{} names an unknown task", arc.0, arc.1),
            InstanceError::SelfArc { task } => write!(f, "task {task} precedes itself"),
            InstanceError::Cycle(cycle) => write!(f, "precedence cycle through tasks {cycle:?}"),
            InstanceError::Transitions(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for InstanceError {}

impl From<TransitionError> for InstanceError {
    fn from(e: TransitionError) -> Self {
        InstanceError::Transitions(e)
    }
}

/// A validated instance. Intervals are 1-based: `1..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    tasks: Vec<Task>,
    capacities: Vec<u32>,
    arcs: Vec<(usize, usize)>,
    horizon: usize,
    tariff: Vec<f64>,
    transitions: TransitionSystem,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
    topo: Vec<usize>,
    energy: Vec<usize>,
}

impl Instance {
    pub fn new(
        tasks: Vec<Task>,
        capacities: Vec<u32>,
        arcs: Vec<(usize, usize)>,
        horizon: usize,
        tariff: Vec<f64>,
        transitions: TransitionSystem,
    ) -> Result<Self, InstanceError> {
        if tasks.is_empty() {
            return Err(InstanceError::NoTasks);
        }
        if horizon == 0 {
            return Err(InstanceError::EmptyHorizon);
        }
        if tariff.len() != horizon {
            return Err(InstanceError::TariffLength { expected: horizon, found: tariff.len() });
        }
        if let Some(i) = tariff.iter().position(|c| !c.is_finite()) {
            return Err(InstanceError::NonFiniteTariff { interval: i + 1 });
        }
        match capacities.first() {
            None => return Err(InstanceError::NoResources),
            Some(&c) if c != 1 => return Err(InstanceError::EnergyCapacity(c)),
            _ => {}
        }
        for (j, task) in tasks.iter().enumerate() {
            if task.demand.len() != capacities.len() {
                return Err(InstanceError::DemandArity {
                    task: j,
                    expected: capacities.len(),
                    found: task.demand.len(),
                });
            }
            if task.duration == 0 {
                return Err(InstanceError::ZeroDuration { task: j });
            }
            if task.is_energy_intensive()
                && (task.demand[0] != 1 || task.demand[1..].iter().any(|&d| d != 0))
            {
                return Err(InstanceError::EnergyDemand { task: j });
            }
        }
        let energy: Vec<usize> = (0..tasks.len()).filter(|&j| tasks[j].is_energy_intensive()).collect();
        if energy.is_empty() {
            return Err(InstanceError::NoEnergyTask);
        }
        let n = tasks.len();
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        for &(u, v) in &arcs {
            if u >= n || v >= n {
                return Err(InstanceError::UnknownTask { arc: (u, v) });
            }
            if u == v {
                return Err(InstanceError::SelfArc { task: u });
            }
            if !successors[u].contains(&v) {
                successors[u].push(v);
                predecessors[v].push(u);
            }
        }
        for list in successors.iter_mut().chain(predecessors.iter_mut()) {
            list.sort_unstable();
        }
        let topo = topological_order(&successors).map_err(InstanceError::Cycle)?;
        Ok(Instance {
            tasks,
            capacities,
            arcs,
            horizon,
            tariff,
            transitions,
            successors,
            predecessors,
            topo,
            energy,
        })
    }

    /// The 8-task, 16-interval instance with three resources used as the
    /// running example (energy tasks are T2, T6, T7, i.e. indices 1, 5, 6).
    pub fn worked_example() -> Self {
        let table: [(usize, [u32; 3]); 8] = [
            (2, [0, 5, 2]),
            (1, [1, 0, 0]),
            (2, [0, 2, 1]),
            (1, [0, 3, 1]),
            (3, [0, 2, 2]),
            (2, [1, 0, 0]),
            (2, [1, 0, 0]),
            (2, [0, 3, 2]),
        ];
        let tasks = table.iter().map(|&(p, d)| Task::new(p, d.to_vec())).collect();
        let arcs = vec![
            (0, 6),
            (6, 3),
            (0, 1),
            (1, 2),
            (2, 3),
            (1, 4),
            (3, 5),
            (4, 5),
            (6, 5),
            (5, 7),
        ];
        let tariff = vec![2., 1., 2., 1., 6., 16., 14., 3., 2., 5., 3., 15., 3., 2., 1., 2.];
        Instance::new(tasks, vec![1, 5, 3], arcs, 16, tariff, TransitionSystem::example())
            .expect("worked example is valid")
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task(&self, j: usize) -> &Task {
        &self.tasks[j]
    }

    #[inline]
    pub fn duration(&self, j: usize) -> usize {
        self.tasks[j].duration
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacities
    }

    pub fn resource_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Tariff indexed from 0 (interval `i` is `tariff()[i - 1]`).
    pub fn tariff(&self) -> &[f64] {
        &self.tariff
    }

    /// Price of 1-based interval `i`.
    #[inline]
    pub fn price(&self, i: usize) -> f64 {
        self.tariff[i - 1]
    }

    pub fn transitions(&self) -> &TransitionSystem {
        &self.transitions
    }

    pub fn successors(&self, j: usize) -> &[usize] {
        &self.successors[j]
    }

    pub fn predecessors(&self, j: usize) -> &[usize] {
        &self.predecessors[j]
    }

    /// Tasks in a topological order of the precedence graph.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Energy-intensive tasks in increasing index order.
    pub fn energy_tasks(&self) -> &[usize] {
        &self.energy
    }

    pub fn is_energy(&self, j: usize) -> bool {
        self.tasks[j].is_energy_intensive()
    }

    /// Same instance with a different horizon and tariff.
    pub fn with_tariff(&self, tariff: Vec<f64>) -> Result<Self, InstanceError> {
        Instance::new(
            self.tasks.clone(),
            self.capacities.clone(),
            self.arcs.clone(),
            tariff.len(),
            tariff,
            self.transitions.clone(),
        )
    }
}

/// Kahn's algorithm with a min-index ready queue, so the order is
/// deterministic. On failure, returns one cycle.
pub fn topological_order(successors: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = successors.len();
    let mut indegree = vec![0usize; n];
    for list in successors {
        for &v in list {
            indegree[v] += 1;
        }
    }
    let mut ready: alloc::collections::BinaryHeap<core::cmp::Reverse<usize>> =
        (0..n).filter(|&v| indegree[v] == 0).map(core::cmp::Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(core::cmp::Reverse(u)) = ready.pop() {
        order.push(u);
        for &v in &successors[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                ready.push(core::cmp::Reverse(v));
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    Err(find_cycle(successors, &indegree))
}

fn find_cycle(successors: &[Vec<usize>], indegree: &[usize]) -> Vec<usize> {
    // A leftover node always has a leftover predecessor, so walking
    // predecessors must eventually repeat a node.
    let n = successors.len();
    let mut predecessors = vec![Vec::new(); n];
    for (u, list) in successors.iter().enumerate() {
        for &v in list {
            predecessors[v].push(u);
        }
    }
    let start = (0..n).find(|&v| indegree[v] > 0).expect("a cycle exists");
    let mut seen_at = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut u = start;
    loop {
        if seen_at[u] != usize::MAX {
            let mut cycle = path[seen_at[u]..].to_vec();
            cycle.reverse();
            return cycle;
        }
        seen_at[u] = path.len();
        path.push(u);
        u = *predecessors[u]
            .iter()
            .find(|&&v| indegree[v] > 0)
            .expect("a leftover node has a leftover predecessor");
    }
}
