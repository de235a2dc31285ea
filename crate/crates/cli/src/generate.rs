//! Instance generation from PSPLIB bases: merge, mark energy tasks, size
//! the horizon, attach a tariff.

use std::fmt;
use std::str::FromStr;

use enersched::lbbd::warmstart_fsws;
use enersched::random;
use enersched::{Instance, InstanceError, MachineState, SpacesTable, Task, TransitionSystem};

use crate::psplib::BaseRcpsp;
use crate::tariff::tile;

/// Non-energy resources every generated instance carries, besides R0.
pub const OTHER_RESOURCES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Sparse,
    Standard,
    Dense,
    Custom(f64),
}

impl Density {
    pub fn rho(self) -> f64 {
        match self {
            Density::Sparse => 0.05,
            Density::Standard => 0.175,
            Density::Dense => 0.5,
            Density::Custom(r) => r,
        }
    }

    pub fn name(self) -> String {
        match self {
            Density::Sparse => "sparse".into(),
            Density::Standard => "standard".into(),
            Density::Dense => "dense".into(),
            Density::Custom(r) => format!("{r}"),
        }
    }

    /// `floor(rho * n)`, at least one.
    pub fn energy_count(self, n: usize) -> usize {
        ((self.rho() * n as f64).floor() as usize).clamp(1, n)
    }
}

impl FromStr for Density {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sparse" => Ok(Density::Sparse),
            "standard" => Ok(Density::Standard),
            "dense" => Ok(Density::Dense),
            _ => match s.parse::<f64>() {
                Ok(r) if r > 0.0 && r <= 1.0 => Ok(Density::Custom(r)),
                _ => Err(format!("density must be sparse, standard, dense or a fraction in (0, 1], got \"{s}\"")),
            },
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone)]
pub struct GenerateConfig {
    pub density: Density,
    /// Horizon slack factor.
    pub gamma: f64,
    pub seed: u64,
    /// Merge randomly drawn bases (with repetition) until at least this many
    /// tasks exist. `None` merges every base once, in order.
    pub target_tasks: Option<usize>,
    pub transitions: TransitionSystem,
    /// Priority-rule restarts for the feasibility post-check.
    pub check_attempts: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            density: Density::Standard,
            gamma: 2.0,
            seed: 0,
            target_tasks: None,
            transitions: TransitionSystem::example(),
            check_attempts: 64,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("at least one base instance is required")]
    NoBases,
    #[error("base {base} has {found} resources, at most {OTHER_RESOURCES} are supported")]
    TooManyResources { base: usize, found: usize },
    #[error("tariff is empty")]
    EmptyTariff,
    #[error("gamma must be positive, got {0}")]
    Gamma(f64),
    #[error("the machine cannot go from off to proc and back")]
    Machine,
    #[error("{0}")]
    Instance(#[from] InstanceError),
    #[error("no warm-start schedule fits horizon {horizon}; increase gamma")]
    Horizon { horizon: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub instance: Instance,
    /// Indices into the given bases, in merge order.
    pub used: Vec<usize>,
}

/// Longest chain of durations; equals the least makespan without resources.
pub fn critical_path(durations: &[usize], arcs: &[(usize, usize)]) -> usize {
    let n = durations.len();
    let mut succ = vec![Vec::new(); n];
    for &(u, v) in arcs {
        succ[u].push(v);
    }
    let order = enersched::instance::topological_order(&succ).expect("merged bases are acyclic");
    let mut finish = vec![0usize; n];
    for &u in &order {
        finish[u] += durations[u];
        for &v in &succ[u] {
            finish[v] = finish[v].max(finish[u]);
        }
    }
    finish.into_iter().max().unwrap_or(0)
}

/// A random single-project RCPSP in the style of the PSPLIB sets: durations
/// in `1..=max_duration`, [`OTHER_RESOURCES`] resources, one to three
/// successors per task among later ones.
pub fn random_base(seed: u64, tasks: usize, max_duration: usize) -> BaseRcpsp {
    let mut rng = random::rng(seed);
    let rng = &mut rng;
    let durations = (0..tasks).map(|_| random::between(rng, 1, max_duration.max(1))).collect();
    let demands: Vec<Vec<u32>> = (0..tasks)
        .map(|_| {
            (0..OTHER_RESOURCES)
                .map(|_| if random::chance(rng, 1, 2) { random::between(rng, 1, 6) as u32 } else { 0 })
                .collect()
        })
        .collect();
    let mut arcs = Vec::new();
    for u in 0..tasks.saturating_sub(1) {
        let count = random::between(rng, 1, 3);
        let mut succ: Vec<usize> = (0..count).map(|_| random::between(rng, u + 1, tasks - 1)).collect();
        succ.sort_unstable();
        succ.dedup();
        arcs.extend(succ.into_iter().map(|v| (u, v)));
    }
    let capacities = (0..OTHER_RESOURCES)
        .map(|k| {
            let peak = demands.iter().map(|d| d[k]).max().unwrap_or(0).max(1);
            peak + random::between(rng, 0, peak as usize) as u32
        })
        .collect();
    BaseRcpsp { durations, demands, arcs, capacities }
}

/// `count` random bases for one dataset seed.
pub fn random_bases(seed: u64, count: usize, tasks: usize, max_duration: usize) -> Vec<BaseRcpsp> {
    (0..count as u64)
        .map(|b| random_base(seed.wrapping_mul(100).wrapping_add(b), tasks, max_duration))
        .collect()
}

pub fn generate_instance(
    bases: &[BaseRcpsp],
    tariff: &[f64],
    config: &GenerateConfig,
) -> Result<Generated, GenerateError> {
    if bases.is_empty() {
        return Err(GenerateError::NoBases);
    }
    if tariff.is_empty() {
        return Err(GenerateError::EmptyTariff);
    }
    if !(config.gamma > 0.0) {
        return Err(GenerateError::Gamma(config.gamma));
    }
    if let Some((base, b)) = bases.iter().enumerate().find(|(_, b)| b.capacities.len() > OTHER_RESOURCES) {
        return Err(GenerateError::TooManyResources { base, found: b.capacities.len() });
    }
    let ts = &config.transitions;
    let up = ts.min_duration(MachineState::Off, MachineState::Proc).ok_or(GenerateError::Machine)?;
    let down = ts.min_duration(MachineState::Proc, MachineState::Off).ok_or(GenerateError::Machine)?;

    let mut rng = random::rng(config.seed);
    let used: Vec<usize> = match config.target_tasks {
        None => (0..bases.len()).collect(),
        Some(target) => {
            let mut picked = Vec::new();
            let mut total = 0;
            while total < target.max(1) {
                let b = random::between(&mut rng, 0, bases.len() - 1);
                total += bases[b].len();
                picked.push(b);
                if bases.iter().all(BaseRcpsp::is_empty) {
                    break;
                }
            }
            picked
        }
    };

    // disjoint union; each resource keeps the largest capacity among bases
    let mut durations = Vec::new();
    let mut demands: Vec<Vec<u32>> = Vec::new();
    let mut arcs = Vec::new();
    let mut capacities = vec![1u32; OTHER_RESOURCES];
    for &b in &used {
        let base = &bases[b];
        let offset = durations.len();
        durations.extend_from_slice(&base.durations);
        for d in &base.demands {
            let mut row = vec![0u32; OTHER_RESOURCES];
            row[..d.len()].copy_from_slice(d);
            demands.push(row);
        }
        arcs.extend(base.arcs.iter().map(|&(u, v)| (u + offset, v + offset)));
        for (k, &c) in base.capacities.iter().enumerate() {
            capacities[k] = capacities[k].max(c);
        }
    }
    let n = durations.len();
    if n == 0 {
        return Err(GenerateError::Instance(InstanceError::NoTasks));
    }

    let e = config.density.energy_count(n);
    let mut ids: Vec<usize> = (0..n).collect();
    for i in 0..e {
        let k = random::between(&mut rng, i, n - 1);
        ids.swap(i, k);
    }
    let mut energy = vec![false; n];
    for &j in &ids[..e] {
        energy[j] = true;
    }

    let tasks: Vec<Task> = (0..n)
        .map(|j| {
            let mut demand = vec![0u32; OTHER_RESOURCES + 1];
            if energy[j] {
                demand[0] = 1;
            } else {
                demand[1..].copy_from_slice(&demands[j]);
            }
            Task::new(durations[j], demand)
        })
        .collect();
    let energy_work: usize = (0..n).filter(|&j| energy[j]).map(|j| durations[j]).sum();
    let base_len = critical_path(&durations, &arcs) + energy_work + up + down;
    let horizon = (config.gamma * base_len as f64).ceil() as usize;

    let mut caps = vec![1u32];
    caps.extend(capacities);
    let instance = Instance::new(tasks, caps, arcs, horizon, tile(tariff, horizon), ts.clone())?;
    let spaces = SpacesTable::build(instance.transitions(), instance.tariff());
    if warmstart_fsws(&instance, &spaces, config.seed, config.check_attempts).is_none() {
        return Err(GenerateError::Horizon { horizon });
    }
    Ok(Generated { instance, used })
}
