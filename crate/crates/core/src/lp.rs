//! Minimal writer for the CPLEX LP text format.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

const TERMS_PER_LINE: usize = 6;

pub(crate) struct LpWriter {
    out: String,
    bounds: Vec<String>,
    binaries: Vec<String>,
    generals: Vec<String>,
    rows: bool,
}

impl LpWriter {
    pub fn new(comment: &str) -> Self {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "\\ {line}");
        }
        LpWriter { out, bounds: Vec::new(), binaries: Vec::new(), generals: Vec::new(), rows: false }
    }

    fn terms(&mut self, terms: &[(f64, String)]) {
        let mut written = 0;
        for (c, v) in terms {
            if *c == 0.0 {
                continue;
            }
            if written > 0 && written % TERMS_PER_LINE == 0 {
                self.out.push_str("\n   ");
            }
            let sign = if *c < 0.0 { '-' } else { '+' };
            if written == 0 && sign == '+' {
                let _ = write!(self.out, " {} {v}", c.abs());
            } else {
                let _ = write!(self.out, " {sign} {} {v}", c.abs());
            }
            written += 1;
        }
        if written == 0 {
            // LP readers need a nonempty expression
            if let Some((_, v)) = terms.first() {
                let _ = write!(self.out, " 0 {v}");
            }
        }
    }

    /// Must be called once, before any row.
    pub fn objective(&mut self, terms: &[(f64, String)]) {
        self.out.push_str("Minimize\n obj:");
        self.terms(terms);
        self.out.push('\n');
    }

    pub fn row(&mut self, name: &str, terms: &[(f64, String)], sense: &str, rhs: f64) {
        if !self.rows {
            self.out.push_str("Subject To\n");
            self.rows = true;
        }
        let _ = write!(self.out, " {name}:");
        self.terms(terms);
        let _ = writeln!(self.out, " {sense} {rhs}");
    }

    pub fn fix(&mut self, var: String, value: f64) {
        self.bounds.push(alloc::format!(" {var} = {value}"));
    }

    pub fn binary(&mut self, var: String) {
        self.binaries.push(var);
    }

    pub fn general(&mut self, var: String) {
        self.generals.push(var);
    }

    pub fn finish(mut self) -> String {
        if !self.rows {
            self.out.push_str("Subject To\n");
        }
        if !self.bounds.is_empty() {
            self.out.push_str("Bounds\n");
            for b in &self.bounds {
                self.out.push_str(b);
                self.out.push('\n');
            }
        }
        for (title, vars) in [("Binary", &self.binaries), ("General", &self.generals)] {
            if vars.is_empty() {
                continue;
            }
            let _ = writeln!(self.out, "{title}");
            for chunk in vars.chunks(TERMS_PER_LINE * 2) {
                let _ = writeln!(self.out, " {}", chunk.join(" "));
            }
        }
        self.out.push_str("End\n");
        self.out
    }
}

/// `x_<task>_<start>` with 1-based task numbers.
pub(crate) fn x(task: usize, start: usize) -> String {
    alloc::format!("x_{}_{start}", task + 1)
}

pub(crate) fn z(l: usize, m: usize) -> String {
    alloc::format!("z_{l}_{m}")
}

#[cfg(test)]
pub(crate) mod parse {
    //! Just enough of a reader to check exported models in tests.

    use alloc::collections::BTreeMap;
    use alloc::string::String;
    use alloc::vec::Vec;

    #[derive(Debug, Default)]
    pub struct Model {
        pub objective: BTreeMap<String, f64>,
        /// Name, coefficients, sense, right-hand side.
        pub rows: Vec<(String, BTreeMap<String, f64>, String, f64)>,
        pub fixed: BTreeMap<String, f64>,
        pub binaries: Vec<String>,
        pub generals: Vec<String>,
    }

    fn expr(tokens: &[&str]) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        let mut sign = 1.0;
        let mut coef = None;
        for &t in tokens {
            match t {
                "+" => sign = 1.0,
                "-" => sign = -1.0,
                _ => match t.parse::<f64>() {
                    Ok(c) => coef = Some(c),
                    Err(_) => {
                        *out.entry(String::from(t)).or_insert(0.0) += sign * coef.unwrap_or(1.0);
                        sign = 1.0;
                        coef = None;
                    }
                },
            }
        }
        out
    }

    pub fn parse(text: &str) -> Model {
        let mut model = Model::default();
        let mut section = "";
        let mut pending: Vec<String> = Vec::new();
        let flush = |pending: &mut Vec<String>, section: &str, model: &mut Model| {
            if pending.is_empty() {
                return;
            }
            let joined = pending.join(" ");
            pending.clear();
            let (name, body) = joined.split_once(':').expect("row has a name");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if section == "Minimize" {
                model.objective = expr(&tokens);
            } else {
                let n = tokens.len();
                model.rows.push((
                    String::from(name.trim()),
                    expr(&tokens[..n - 2]),
                    String::from(tokens[n - 2]),
                    tokens[n - 1].parse().expect("numeric rhs"),
                ));
            }
        };
        for line in text.lines() {
            if line.starts_with('\\') {
                continue;
            }
            let trimmed = line.trim();
            if matches!(trimmed, "Minimize" | "Subject To" | "Bounds" | "Binary" | "General" | "End") {
                flush(&mut pending, section, &mut model);
                section = match trimmed {
                    "Minimize" => "Minimize",
                    "Subject To" => "Subject To",
                    "Bounds" => "Bounds",
                    "Binary" => "Binary",
                    "General" => "General",
                    _ => "End",
                };
                continue;
            }
            match section {
                "Minimize" | "Subject To" => {
                    if trimmed.contains(':') {
                        flush(&mut pending, section, &mut model);
                    }
                    pending.push(String::from(trimmed));
                }
                "Bounds" => {
                    let t: Vec<&str> = trimmed.split_whitespace().collect();
                    assert_eq!(t[1], "=");
                    model.fixed.insert(String::from(t[0]), t[2].parse().unwrap());
                }
                "Binary" => model.binaries.extend(trimmed.split_whitespace().map(String::from)),
                "General" => model.generals.extend(trimmed.split_whitespace().map(String::from)),
                _ => {}
            }
        }
        model
    }
}
