//! Benders cuts and the pool that indexes them by `(task, start)`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::subproblem::FixedStarts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cut {
    /// Not all of these starts may hold together.
    Feasibility { members: FixedStarts },
    /// Forbids exactly this full assignment.
    NoGood { assignment: FixedStarts },
    /// `q >= obj_sub - big_m * (number of tasks moved away from the snapshot)`.
    Optimality { obj_sub: u64, assignment: FixedStarts, big_m: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CutKind {
    Feasibility,
    NoGood,
    Optimality,
}

impl CutKind {
    pub fn name(self) -> &'static str {
        match self {
            CutKind::Feasibility => "feasibility",
            CutKind::NoGood => "nogood",
            CutKind::Optimality => "optimality",
        }
    }
}

impl Cut {
    pub fn kind(&self) -> CutKind {
        match self {
            Cut::Feasibility { .. } => CutKind::Feasibility,
            Cut::NoGood { .. } => CutKind::NoGood,
            Cut::Optimality { .. } => CutKind::Optimality,
        }
    }

    pub fn members(&self) -> &FixedStarts {
        match self {
            Cut::Feasibility { members } => members,
            Cut::NoGood { assignment } | Cut::Optimality { assignment, .. } => assignment,
        }
    }

    /// Right-hand side of the linear form: the cap on matching starts for
    /// feasibility and no-good cuts, `obj_sub` for optimality cuts.
    pub fn rhs(&self) -> i64 {
        match self {
            Cut::Feasibility { members } => members.len() as i64 - 1,
            Cut::NoGood { assignment } => assignment.len() as i64 - 1,
            Cut::Optimality { obj_sub, .. } => *obj_sub as i64,
        }
    }

    /// Number of members whose start differs in `full`.
    pub fn deviations(&self, full: &FixedStarts) -> usize {
        self.members()
            .pairs()
            .iter()
            .filter(|&&(j, s)| full.get(j) != Some(s))
            .count()
    }

    /// Whether the full assignment `full` satisfies this cut, given makespan
    /// variable value `q`.
    pub fn satisfied_by(&self, full: &FixedStarts, q: u64) -> bool {
        let dev = self.deviations(full);
        match self {
            Cut::Feasibility { .. } | Cut::NoGood { .. } => dev >= 1,
            Cut::Optimality { obj_sub, big_m, .. } => {
                *obj_sub as i128 - (*big_m as i128) * dev as i128 <= q as i128
            }
        }
    }
}

/// Cuts in insertion order, with lookups for the master search.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CutPool {
    cuts: Vec<Cut>,
    by_member: BTreeMap<(usize, usize), Vec<usize>>,
    makespan: BTreeMap<FixedStarts, u64>,
}

impl CutPool {
    pub fn new() -> Self {
        CutPool::default()
    }

    pub fn add(&mut self, cut: Cut) {
        let idx = self.cuts.len();
        match &cut {
            Cut::Feasibility { members: m } | Cut::NoGood { assignment: m } => {
                assert!(!m.is_empty(), "cuts need at least one member");
                for &pair in m.pairs() {
                    self.by_member.entry(pair).or_default().push(idx);
                }
            }
            Cut::Optimality { obj_sub, assignment, .. } => {
                let e = self.makespan.entry(assignment.clone()).or_insert(0);
                *e = (*e).max(*obj_sub);
            }
        }
        self.cuts.push(cut);
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn count(&self, kind: CutKind) -> usize {
        self.cuts.iter().filter(|c| c.kind() == kind).count()
    }

    /// Whether placing `pair` completes a forbidden combination, where
    /// `start_of` reports current starts (0 when unplaced).
    pub(crate) fn completes_forbidden(&self, pair: (usize, usize), start_of: &dyn Fn(usize) -> usize) -> bool {
        self.by_member.get(&pair).is_some_and(|list| {
            list.iter()
                .any(|&i| self.cuts[i].members().pairs().iter().all(|&(j, s)| start_of(j) == s))
        })
    }

    /// Whether some feasibility or no-good cut excludes `full`.
    pub fn forbids(&self, full: &FixedStarts) -> bool {
        full.pairs().iter().any(|&pair| {
            self.by_member.get(&pair).is_some_and(|list| {
                list.iter().any(|&i| self.cuts[i].deviations(full) == 0)
            })
        })
    }

    /// Smallest `q` allowed at `full` by the optimality cuts.
    pub fn makespan_floor(&self, full: &FixedStarts) -> u64 {
        self.makespan.get(full).copied().unwrap_or(0)
    }

    /// `kind,members,rhs` rows; members are `task:start` pairs joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,members,rhs\n");
        for cut in &self.cuts {
            let members: Vec<String> = cut
                .members()
                .pairs()
                .iter()
                .map(|&(j, s)| alloc::format!("{j}:{s}"))
                .collect();
            writeln!(out, "{},{},{}", cut.kind().name(), members.join(";"), cut.rhs())
                .expect("writing to a String cannot fail");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(p: &[(usize, usize)]) -> FixedStarts {
        FixedStarts::new(p.iter().copied())
    }

    #[test]
    fn feasibility_cut_semantics() {
        let mut pool = CutPool::new();
        pool.add(Cut::Feasibility { members: fs(&[(1, 4), (5, 9)]) });
        assert!(pool.forbids(&fs(&[(1, 4), (5, 9), (6, 5)])));
        assert!(!pool.forbids(&fs(&[(1, 4), (5, 10), (6, 5)])));
        let starts = [0, 4, 0, 0, 0, 0, 0];
        assert!(pool.completes_forbidden((5, 9), &|j| if j == 5 { 9 } else { starts[j] }));
        assert_eq!(pool.cuts()[0].rhs(), 1);
    }

    #[test]
    fn full_feasibility_cut_acts_like_nogood() {
        let snap = fs(&[(1, 4), (5, 9), (6, 5)]);
        let a = Cut::Feasibility { members: snap.clone() };
        let b = Cut::NoGood { assignment: snap.clone() };
        for other in [snap.clone(), fs(&[(1, 4), (5, 9), (6, 6)])] {
            assert_eq!(a.satisfied_by(&other, 0), b.satisfied_by(&other, 0));
        }
    }

    #[test]
    fn optimality_cut_only_binds_at_snapshot() {
        let h = 16u64;
        let snap = fs(&[(1, 4), (5, 9), (6, 5)]);
        let cut = Cut::Optimality { obj_sub: 12, assignment: snap.clone(), big_m: h + 1 };
        assert!(!cut.satisfied_by(&snap, 11));
        assert!(cut.satisfied_by(&snap, 12));
        let moved = fs(&[(1, 4), (5, 10), (6, 5)]);
        assert!(cut.satisfied_by(&moved, 0));
        let mut pool = CutPool::new();
        pool.add(cut);
        assert_eq!(pool.makespan_floor(&snap), 12);
        assert_eq!(pool.makespan_floor(&moved), 0);
        assert!(!pool.forbids(&snap));
    }

    #[test]
    fn csv_rows() {
        let mut pool = CutPool::new();
        pool.add(Cut::Feasibility { members: fs(&[(1, 4)]) });
        pool.add(Cut::Optimality { obj_sub: 12, assignment: fs(&[(1, 4), (5, 9)]), big_m: 17 });
        assert_eq!(pool.to_csv(), "kind,members,rhs\nfeasibility,1:4,0\noptimality,1:4;5:9,12\n");
        assert_eq!(pool.count(CutKind::Optimality), 1);
    }
}
