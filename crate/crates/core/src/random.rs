//! Seeded generators for small random instances, transition systems and
//! tariffs. Used by tests and benchmarks.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Task};
use crate::machine::{MachineState, TransitionSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `lo..=hi`.
pub fn between(rng: &mut impl RngCore, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

/// `true` with probability `num / den`.
pub fn chance(rng: &mut impl RngCore, num: u32, den: u32) -> bool {
    (rng.next_u32() % den) < num
}

/// A valid transition system with times in `1..=3`, powers in `0..=6`, and
/// some infeasible pairs. Off and proc stay mutually reachable.
pub fn transition_system(rng: &mut impl RngCore) -> TransitionSystem {
    loop {
        let mut time = [[None; 3]; 3];
        let mut power = [[None; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                if a == b || !chance(rng, 1, 4) {
                    time[a][b] = Some(if a == b { 1 } else { between(rng, 1, 3) });
                    power[a][b] = Some(between(rng, 0, 6) as u32);
                }
            }
        }
        let ts = TransitionSystem::new(time, power).expect("generated tables are consistent");
        if ts.min_duration(MachineState::Off, MachineState::Proc).is_some()
            && ts.min_duration(MachineState::Proc, MachineState::Off).is_some()
        {
            return ts;
        }
    }
}

/// Integer prices in `-2..=12`, mostly nonnegative.
pub fn tariff(rng: &mut impl RngCore, horizon: usize) -> Vec<f64> {
    (0..horizon)
        .map(|_| {
            if chance(rng, 1, 8) {
                -(between(rng, 1, 2) as f64)
            } else {
                between(rng, 0, 12) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyParams {
    pub max_tasks: usize,
    pub max_energy: usize,
    pub max_horizon: usize,
}

impl Default for TinyParams {
    fn default() -> Self {
        TinyParams { max_tasks: 8, max_energy: 4, max_horizon: 16 }
    }
}

/// A small instance with one extra resource. The horizon is a little above
/// a simple lower bound, capped at `max_horizon`, so some draws are infeasible.
pub fn tiny_instance(seed: u64, params: TinyParams) -> Instance {
    let mut rng = rng(seed);
    let rng = &mut rng;
    let n = between(rng, 2, params.max_tasks.max(2));
    let e = between(rng, 1, params.max_energy.min(n).max(1));
    let ts = if chance(rng, 1, 2) { TransitionSystem::example() } else { transition_system(rng) };
    let cap = between(rng, 1, 3) as u32;

    // energy tasks are a random subset
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        ids.swap(i, between(rng, 0, i));
    }
    let mut energy = vec![false; n];
    for &j in &ids[..e] {
        energy[j] = true;
    }
    let tasks: Vec<Task> = (0..n)
        .map(|j| {
            if energy[j] {
                Task::new(between(rng, 1, 2), vec![1, 0])
            } else {
                Task::new(between(rng, 1, 3), vec![0, between(rng, 0, cap as usize) as u32])
            }
        })
        .collect();
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if chance(rng, 1, 3) {
                arcs.push((u, v));
            }
        }
    }

    let up = ts.min_duration(MachineState::Off, MachineState::Proc).unwrap();
    let down = ts.min_duration(MachineState::Proc, MachineState::Off).unwrap();
    let mut finish = vec![0usize; n];
    for v in 0..n {
        let ready = arcs.iter().filter(|a| a.1 == v).map(|a| finish[a.0]).max().unwrap_or(0);
        finish[v] = ready + tasks[v].duration;
    }
    let critical = finish.iter().copied().max().unwrap_or(0);
    let energy_work: usize = (0..n).filter(|&j| energy[j]).map(|j| tasks[j].duration).sum();
    let lower = critical.max(energy_work) + up + down + 2;
    let h = (lower + between(rng, 0, 4)).min(params.max_horizon).max(lower.min(params.max_horizon));
    let tariff = tariff(rng, h);
    Instance::new(tasks, vec![1, cap], arcs, h, tariff, ts).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = tiny_instance(7, TinyParams::default());
        let b = tiny_instance(7, TinyParams::default());
        assert_eq!(a, b);
    }

    #[test]
    fn respects_limits() {
        for seed in 0..200 {
            let inst = tiny_instance(seed, TinyParams::default());
            assert!(inst.len() <= 8);
            assert!(inst.energy_tasks().len() <= 4);
            assert!(inst.horizon() <= 16);
        }
    }
}
