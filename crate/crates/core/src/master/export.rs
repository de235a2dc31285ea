//! LP export of the master with every `z` materialized.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Cut, MasterModel};
use crate::lp::{x, z, LpWriter};

impl MasterModel<'_> {
    /// The master as an LP-format model over `x_<task>_<start>` for energy
    /// tasks, `z_<l>_<m>` for every finite gap and the makespan estimate `q`,
    /// including the current cuts. Starts outside the windows are fixed to 0.
    pub fn to_lp(&self) -> String {
        let inst = self.instance;
        let h = inst.horizon();
        let we = self.weights.energy_weight();
        let wm = self.weights.makespan_weight();
        let mut lp = LpWriter::new("energy-task master");

        let starts = |j: usize| 1..=h + 1 - inst.duration(j);
        let mut obj = Vec::new();
        for (k, &j) in self.energy.iter().enumerate() {
            for s in starts(j) {
                let c = if self.windows.contains(j, s) { self.jobcost[k][s] } else { 0.0 };
                obj.push((we * c, x(j, s)));
            }
        }
        let gaps = self.gaps();
        for &(l, m, c) in &gaps {
            obj.push((we * c, z(l, m)));
        }
        obj.push((wm, String::from("q")));
        lp.objective(&obj);

        for &j in &self.energy {
            let row: Vec<_> = starts(j).map(|s| (1.0, x(j, s))).collect();
            lp.row(&format!("once_{}", j + 1), &row, "=", 1.0);
        }
        for &u in &self.energy {
            for &v in &self.energy {
                let Some(d) = self.md.get(u, v) else { continue };
                let mut row: Vec<_> = starts(v).map(|s| (s as f64, x(v, s))).collect();
                row.extend(starts(u).map(|s| (-(s as f64), x(u, s))));
                lp.row(&format!("sep_{}_{}", u + 1, v + 1), &row, ">=", d as f64);
            }
        }
        for i in 1..=h {
            let running: Vec<_> = self
                .energy
                .iter()
                .flat_map(|&j| {
                    let p = inst.duration(j);
                    (i.saturating_sub(p - 1).max(1)..=i).filter(move |&s| s + p <= h + 1).map(move |s| (1.0, x(j, s)))
                })
                .collect();
            lp.row(&format!("unary_{i}"), &running, "<=", 1.0);
            let mut cover = running;
            cover.extend(gaps.iter().filter(|g| g.0 <= i && i < g.1).map(|g| (1.0, z(g.0, g.1))));
            lp.row(&format!("cover_{i}"), &cover, "=", 1.0);
        }
        if self.makespan_q {
            for (k, &j) in self.energy.iter().enumerate() {
                // q >= start + tail, tail already folds md and the successor duration
                let mut row = vec_q();
                row.extend(starts(j).map(|s| (-(s as f64), x(j, s))));
                lp.row(&format!("mk_{}", j + 1), &row, ">=", self.tail[k] as f64);
            }
        }
        for (n, cut) in self.cuts.cuts().iter().enumerate() {
            let picks: Vec<_> = cut.members().pairs().iter().map(|&(j, s)| x(j, s)).collect();
            match cut {
                Cut::Feasibility { .. } | Cut::NoGood { .. } => {
                    let row: Vec<_> = picks.into_iter().map(|v| (1.0, v)).collect();
                    lp.row(&format!("{}_{n}", cut.kind().name()), &row, "<=", cut.rhs() as f64);
                }
                Cut::Optimality { obj_sub, big_m, assignment } => {
                    let mut row = vec_q();
                    row.extend(picks.into_iter().map(|v| (-(*big_m as f64), v)));
                    let rhs = *obj_sub as f64 - (*big_m * assignment.len() as u64) as f64;
                    lp.row(&format!("optimality_{n}"), &row, ">=", rhs);
                }
            }
        }
        for &j in &self.energy {
            for s in starts(j) {
                if !self.windows.contains(j, s) {
                    lp.fix(x(j, s), 0.0);
                }
                lp.binary(x(j, s));
            }
        }
        for &(l, m, _) in &gaps {
            lp.binary(z(l, m));
        }
        lp.general(String::from("q"));
        lp.finish()
    }

    /// Every finite gap `(l, m, cost)`.
    fn gaps(&self) -> Vec<(usize, usize, f64)> {
        let h = self.instance.horizon();
        let mut out = Vec::new();
        for l in 1..=h {
            for m in l + 1..=h + 1 {
                if let Some(c) = self.spaces.cost(l, m) {
                    out.push((l, m, c));
                }
            }
        }
        out
    }
}

fn vec_q() -> Vec<(f64, String)> {
    alloc::vec![(1.0, String::from("q"))]
}
