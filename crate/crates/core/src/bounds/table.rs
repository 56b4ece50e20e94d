use std::fmt::Write as _;

use serde::Serialize;

/// One line of a bounds table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub quantity: String,
    pub graph: String,
    pub law: String,
    pub decay_rate: f64,
    pub growth_constant: f64,
    /// Derived threshold (`n0`, `l0`, edge count) or empty.
    pub threshold: Option<u64>,
    pub value: f64,
    pub tail: f64,
    pub cutoff: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundsTable {
    pub rows: Vec<BoundsRow>,
}

const HEADER: &str = "quantity,graph,law,decay_rate,growth_constant,threshold,value,tail,cutoff";

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl BoundsTable {
    pub fn push(&mut self, row: BoundsRow) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:e},{:e},{}",
                r.quantity,
                r.graph,
                r.law,
                r.decay_rate,
                r.growth_constant,
                opt(r.threshold),
                r.value,
                r.tail,
                opt(r.cutoff)
            );
        }
        out
    }
}
