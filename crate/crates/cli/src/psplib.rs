//! Reader for single-mode PSPLIB `.sm` files.

use enersched::instance::topological_order;

/// A plain RCPSP without the format's dummy source and sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseRcpsp {
    pub durations: Vec<usize>,
    /// `demands[j][k]` for renewable resource `k`.
    pub demands: Vec<Vec<u32>>,
    /// 0-based task indices.
    pub arcs: Vec<(usize, usize)>,
    pub capacities: Vec<u32>,
}

impl BaseRcpsp {
    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct PsplibError {
    /// 1-based; 0 when the problem is not tied to one line.
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> PsplibError {
    PsplibError { line, message: message.into() }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Other,
    Precedence,
    Requests,
    Availability,
}

fn numbers(line: usize, text: &str) -> Result<Vec<u64>, PsplibError> {
    text.split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|_| err(line, format!("expected an integer, found \"{t}\""))))
        .collect()
}

/// Value after the colon of a `key : value` header line.
fn header_value(line: usize, text: &str) -> Result<usize, PsplibError> {
    let value = text.split_once(':').map(|(_, v)| v).unwrap_or("");
    value
        .split_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(line, "header without a numeric value"))
}

pub fn parse_psplib(text: &str) -> Result<BaseRcpsp, PsplibError> {
    let mut jobs = None;
    let mut renewable = None;
    let mut succ: Vec<Option<Vec<usize>>> = Vec::new();
    let mut rows: Vec<Option<(usize, Vec<u32>)>> = Vec::new();
    let mut capacities = None;
    let mut section = Section::Other;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.starts_with('*') {
            section = Section::Other;
            continue;
        }
        if t.is_empty() {
            continue;
        }
        if t.starts_with("jobs (incl. supersource/sink") {
            let n = header_value(line, t)?;
            if n < 2 {
                return Err(err(line, "need at least the dummy source and sink"));
            }
            jobs = Some(n);
            succ = vec![None; n];
            rows = vec![None; n];
            continue;
        }
        if t.starts_with("- renewable") {
            renewable = Some(header_value(line, t)?);
            continue;
        }
        match t {
            "PRECEDENCE RELATIONS:" => section = Section::Precedence,
            "REQUESTS/DURATIONS:" => section = Section::Requests,
            "RESOURCEAVAILABILITIES:" => section = Section::Availability,
            _ if t.starts_with("jobnr.") || t.starts_with('-') || t.starts_with('R') => {}
            _ => match section {
                Section::Other => {}
                Section::Precedence => {
                    let n = jobs.ok_or_else(|| err(line, "precedences before the job count"))?;
                    let v = numbers(line, t)?;
                    if v.len() < 3 {
                        return Err(err(line, "precedence row needs job, modes and successor count"));
                    }
                    let job = v[0] as usize;
                    if job == 0 || job > n {
                        return Err(err(line, format!("job {job} is out of range 1..={n}")));
                    }
                    if v[1] != 1 {
                        return Err(err(line, format!("job {job} has {} modes, only single-mode files are supported", v[1])));
                    }
                    let count = v[2] as usize;
                    if v.len() != 3 + count {
                        return Err(err(line, format!("job {job} announces {count} successors, lists {}", v.len() - 3)));
                    }
                    let mut list = Vec::with_capacity(count);
                    for &s in &v[3..] {
                        let s = s as usize;
                        if s == 0 || s > n {
                            return Err(err(line, format!("successor {s} is out of range 1..={n}")));
                        }
                        list.push(s - 1);
                    }
                    if succ[job - 1].replace(list).is_some() {
                        return Err(err(line, format!("job {job} listed twice")));
                    }
                }
                Section::Requests => {
                    let n = jobs.ok_or_else(|| err(line, "requests before the job count"))?;
                    let r = renewable.ok_or_else(|| err(line, "requests before the resource count"))?;
                    let v = numbers(line, t)?;
                    if v.len() < 3 + r {
                        return Err(err(line, format!("request row needs {} columns, found {}", 3 + r, v.len())));
                    }
                    let job = v[0] as usize;
                    if job == 0 || job > n {
                        return Err(err(line, format!("job {job} is out of range 1..={n}")));
                    }
                    if v[1] != 1 {
                        return Err(err(line, format!("job {job} uses mode {}, only mode 1 is supported", v[1])));
                    }
                    let demand = v[3..3 + r].iter().map(|&d| d as u32).collect();
                    if rows[job - 1].replace((v[2] as usize, demand)).is_some() {
                        return Err(err(line, format!("job {job} listed twice")));
                    }
                }
                Section::Availability => {
                    let r = renewable.ok_or_else(|| err(line, "availabilities before the resource count"))?;
                    let v = numbers(line, t)?;
                    if v.len() < r {
                        return Err(err(line, format!("expected {r} capacities, found {}", v.len())));
                    }
                    capacities = Some(v[..r].iter().map(|&c| c as u32).collect::<Vec<u32>>());
                }
            },
        }
    }

    let n = jobs.ok_or_else(|| err(0, "missing job count header"))?;
    let capacities = capacities.ok_or_else(|| err(0, "missing RESOURCEAVAILABILITIES section"))?;
    let succ: Vec<Vec<usize>> = succ
        .into_iter()
        .enumerate()
        .map(|(j, s)| s.ok_or_else(|| err(0, format!("job {} has no precedence row", j + 1))))
        .collect::<Result<_, _>>()?;
    let rows: Vec<(usize, Vec<u32>)> = rows
        .into_iter()
        .enumerate()
        .map(|(j, r)| r.ok_or_else(|| err(0, format!("job {} has no request row", j + 1))))
        .collect::<Result<_, _>>()?;
    if let Err(cycle) = topological_order(&succ) {
        let named: Vec<String> = cycle.iter().map(|j| (j + 1).to_string()).collect();
        return Err(err(0, format!("precedence cycle through jobs {}", named.join(" -> "))));
    }

    // jobs 1 and n are the zero-length source and sink
    let real = 1..n - 1;
    for j in [0, n - 1] {
        if rows[j].0 != 0 {
            return Err(err(0, format!("dummy job {} has nonzero duration", j + 1)));
        }
    }
    let mut arcs = Vec::new();
    for u in real.clone() {
        for &v in &succ[u] {
            if real.contains(&v) {
                arcs.push((u - 1, v - 1));
            }
        }
    }
    for (j, (d, demand)) in rows.iter().enumerate().take(n - 1).skip(1) {
        if *d == 0 {
            return Err(err(0, format!("job {} has zero duration", j + 1)));
        }
        if let Some(k) = demand.iter().zip(&capacities).position(|(d, c)| d > c) {
            return Err(err(0, format!("job {} exceeds the capacity of resource {}", j + 1, k + 1)));
        }
    }
    Ok(BaseRcpsp {
        durations: rows[real.clone()].iter().map(|r| r.0).collect(),
        demands: rows[real].iter().map(|r| r.1.clone()).collect(),
        arcs,
        capacities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = include_str!("../data/three_tasks.sm");

    #[test]
    fn fixture_has_three_tasks_and_two_arcs() {
        let base = parse_psplib(FIXTURE).unwrap();
        assert_eq!(base.durations, vec![3, 2, 4]);
        assert_eq!(base.demands, vec![vec![2, 0, 1, 0], vec![1, 3, 0, 0], vec![0, 1, 1, 2]]);
        assert_eq!(base.arcs, vec![(0, 2), (1, 2)]);
        assert_eq!(base.capacities, vec![3, 4, 2, 2]);
    }

    #[test]
    fn injected_cycle_is_rejected() {
        // make job 4 precede job 2
        let text = FIXTURE.replace("   4        1          1           5", "   4        1          2           5   2");
        assert_ne!(text, FIXTURE);
        let e = parse_psplib(&text).unwrap_err();
        assert!(e.message.contains("cycle"), "{e}");
    }

    #[test]
    fn no_precedences_between_real_tasks() {
        let text = FIXTURE
            .replace("   2        1          1           4", "   2        1          1           5")
            .replace("   3        1          1           4", "   3        1          1           5");
        let base = parse_psplib(&text).unwrap();
        assert!(base.arcs.is_empty());
        assert_eq!(base.len(), 3);
    }

    #[test]
    fn malformed_rows_report_their_line() {
        let text = FIXTURE.replace("   2        1          1           4", "   2        1          x           4");
        let e = parse_psplib(&text).unwrap_err();
        let line = FIXTURE.lines().position(|l| l.starts_with("   2        1          1")).unwrap() + 1;
        assert_eq!(e.line, line);
        let text = FIXTURE.replace("   3        1          1           4", "   3        1          2           4");
        assert!(parse_psplib(&text).unwrap_err().message.contains("announces 2"));
    }

    #[test]
    fn multi_mode_is_rejected() {
        let text = FIXTURE.replace("   2        1          1           4", "   2        2          1           4");
        assert!(parse_psplib(&text).unwrap_err().message.contains("single-mode"));
    }

    #[test]
    fn missing_sections() {
        assert_eq!(parse_psplib("").unwrap_err().line, 0);
        let cut = FIXTURE.split("RESOURCEAVAILABILITIES").next().unwrap();
        assert!(parse_psplib(cut).unwrap_err().message.contains("RESOURCEAVAILABILITIES"));
    }
}
