//! Time-of-use price files: CSV with header `idx,cost`, `idx` from 0.

use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum TariffError {
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("header must be exactly `idx,cost`")]
    Header,
    #[error("no prices")]
    Empty,
    #[error("index {0} appears more than once")]
    Duplicate(usize),
    #[error("index {0} is missing")]
    Gap(usize),
    #[error("price at index {0} is not finite")]
    NotFinite(usize),
}

#[derive(Deserialize)]
struct Row {
    idx: usize,
    cost: f64,
}

/// Prices ordered by index. Rows may come in any order.
pub fn parse_costs_csv(text: &str) -> Result<Vec<f64>, TariffError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers()?;
    if header.len() != 2 || &header[0] != "idx" || &header[1] != "cost" {
        return Err(TariffError::Header);
    }
    let mut rows: Vec<Row> = reader.deserialize().collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err(TariffError::Empty);
    }
    rows.sort_by_key(|r| r.idx);
    for (expect, pair) in rows.iter().enumerate() {
        if pair.idx < expect {
            return Err(TariffError::Duplicate(pair.idx));
        }
        if pair.idx > expect {
            return Err(TariffError::Gap(expect));
        }
        if !pair.cost.is_finite() {
            return Err(TariffError::NotFinite(pair.idx));
        }
    }
    Ok(rows.into_iter().map(|r| r.cost).collect())
}

/// Repeats `prices` until `horizon` entries exist, or truncates.
pub fn tile(prices: &[f64], horizon: usize) -> Vec<f64> {
    assert!(!prices.is_empty(), "cannot tile an empty tariff");
    prices.iter().copied().cycle().take(horizon).collect()
}

pub fn to_csv(prices: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["idx", "cost"]).expect("in-memory write");
    for (i, c) in prices.iter().enumerate() {
        w.write_record([i.to_string(), c.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}
