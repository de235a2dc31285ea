//! Versioned JSON documents for instances and solutions.

use enersched::{Instance, InstanceError, MachineState, Solution, Step, Task, TransitionSystem};
use serde::{Deserialize, Serialize};

pub const INSTANCE_FORMAT: &str = "enersched-instance";
pub const INSTANCE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: String,
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub metadata: Metadata,
    pub horizon: usize,
    /// `capacities[0]` is the energy machine and must be 1.
    pub capacities: Vec<u32>,
    pub tasks: Vec<TaskEntry>,
    /// `[before, after]` pairs of 0-based task indices.
    pub precedences: Vec<[usize; 2]>,
    /// One price per interval, interval 1 first.
    pub tariff: Vec<f64>,
    pub machine: MachineEntry,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskEntry {
    pub duration: usize,
    pub demand: Vec<u32>,
}

/// Rows and columns in the order proc, idle, off; `null` marks an
/// infeasible transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineEntry {
    pub time: [[Option<usize>; 3]; 3],
    pub power: [[Option<u32>; 3]; 3],
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("expected format \"{INSTANCE_FORMAT}\", found \"{0}\"")]
    Format(String),
    #[error("unsupported version {0}, this build reads version {INSTANCE_VERSION}")]
    Version(u32),
    #[error("{0}")]
    Instance(#[from] InstanceError),
    #[error("unknown machine state \"{0}\"")]
    State(String),
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, name: &str, metadata: Metadata) -> Self {
        let ts = instance.transitions();
        InstanceFile {
            format: INSTANCE_FORMAT.to_string(),
            version: INSTANCE_VERSION,
            name: name.to_string(),
            metadata,
            horizon: instance.horizon(),
            capacities: instance.capacities().to_vec(),
            tasks: instance
                .tasks()
                .iter()
                .map(|t| TaskEntry { duration: t.duration, demand: t.demand.clone() })
                .collect(),
            precedences: instance.arcs().iter().map(|&(u, v)| [u, v]).collect(),
            tariff: instance.tariff().to_vec(),
            machine: MachineEntry { time: *ts.time_table(), power: *ts.power_table() },
        }
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let ts = TransitionSystem::new(self.machine.time, self.machine.power).map_err(InstanceError::from)?;
        let tasks = self.tasks.iter().map(|t| Task::new(t.duration, t.demand.clone())).collect();
        let arcs = self.precedences.iter().map(|a| (a[0], a[1])).collect();
        Ok(Instance::new(tasks, self.capacities.clone(), arcs, self.horizon, self.tariff.clone(), ts)?)
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.format != INSTANCE_FORMAT {
            return Err(FormatError::Format(file.format));
        }
        if file.version != INSTANCE_VERSION {
            return Err(FormatError::Version(file.version));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

/// Starts and machine trace. A trace entry is a state name for a dwell
/// (`"off"`) or `"from->to"` for a transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub starts: Vec<usize>,
    pub trace: Vec<String>,
}

impl SolutionFile {
    pub fn from_solution(solution: &Solution) -> Self {
        SolutionFile {
            starts: solution.starts.clone(),
            trace: solution
                .trace
                .iter()
                .map(|s| {
                    if s.is_dwell() {
                        s.from.name().to_string()
                    } else {
                        format!("{}->{}", s.from, s.to)
                    }
                })
                .collect(),
        }
    }

    pub fn to_solution(&self) -> Result<Solution, FormatError> {
        let state = |s: &str| MachineState::from_name(s).ok_or_else(|| FormatError::State(s.to_string()));
        let trace = self
            .trace
            .iter()
            .map(|entry| match entry.split_once("->") {
                Some((a, b)) => Ok(Step::new(state(a.trim())?, state(b.trim())?)),
                None => Ok(Step::dwell(state(entry.trim())?)),
            })
            .collect::<Result<_, FormatError>>()?;
        Ok(Solution::new(self.starts.clone(), trace))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use enersched::random::{tiny_instance, TinyParams};

    #[test]
    fn example_round_trips() {
        let inst = Instance::worked_example();
        let file = InstanceFile::from_instance(&inst, "example", Metadata::default());
        let back = InstanceFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_instance().unwrap(), inst);
    }

    #[test]
    fn random_instances_round_trip() {
        for seed in 0..100 {
            let inst = tiny_instance(seed, TinyParams::default());
            let meta = Metadata { seed: Some(seed), rho: Some(0.1 * seed as f64), ..Metadata::default() };
            let file = InstanceFile::from_instance(&inst, &format!("tiny{seed}"), meta);
            let back = InstanceFile::parse(&file.to_json()).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.to_instance().unwrap(), inst);
        }
    }

    #[test]
    fn rejects_other_versions() {
        let file = InstanceFile::from_instance(&Instance::worked_example(), "x", Metadata::default());
        let text = file.to_json().replace("\"version\": 1", "\"version\": 7");
        assert!(matches!(InstanceFile::parse(&text), Err(FormatError::Version(7))));
        let text = file.to_json().replace(INSTANCE_FORMAT, "other");
        assert!(matches!(InstanceFile::parse(&text), Err(FormatError::Format(_))));
    }

    #[test]
    fn invalid_contents_surface_instance_errors() {
        let mut file = InstanceFile::from_instance(&Instance::worked_example(), "x", Metadata::default());
        file.precedences.push([5, 0]);
        assert!(matches!(file.to_instance(), Err(FormatError::Instance(InstanceError::Cycle(_)))));
    }

    #[test]
    fn solution_round_trip() {
        let s = Solution::new(
            vec![1, 2],
            vec![Step::dwell(MachineState::Off), Step::new(MachineState::Off, MachineState::Proc)],
        );
        let file = SolutionFile::from_solution(&s);
        assert_eq!(file.trace, ["off", "off->proc"]);
        let text = serde_json::to_string(&file).unwrap();
        let back: SolutionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_solution().unwrap(), s);
        let bad = SolutionFile { starts: vec![1], trace: vec!["on->off".into()] };
        assert!(bad.to_solution().is_err());
    }
}
