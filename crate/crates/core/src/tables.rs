//! The published numeric tables, recomputed from the shipped fixtures.

use std::fmt::Write as _;

use crate::error::Result;
use crate::model_file::{fixtures, parse_model_str};
use crate::reinsurance::Aggregation;

/// Threshold pairs for the joint-tail table. The published rows are
/// labelled `(20,15)` to `(35,30)`; the last pair is added because the
/// published values line up with the pair one row below their label.
pub const JOINT_TAIL_THRESHOLDS: [(f64, f64); 5] =
    [(20.0, 15.0), (25.0, 20.0), (30.0, 25.0), (35.0, 30.0), (40.0, 35.0)];

pub const RISK_MEASURE_LEVELS: [f64; 7] = [0.9, 0.925, 0.95, 0.975, 0.99, 0.995, 0.999];

pub const DIVERSIFICATION_LEVELS: [f64; 4] = [0.95, 0.975, 0.99, 0.999];

pub const DEFAULT_LEVELS: [f64; 4] = [0.95, 0.975, 0.99, 0.999];

pub const CASES: [&str; 3] = ["independence", "laplace", "fgm"];

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: &'static str,
    /// Decimals shown by default; `None` for text columns.
    pub digits: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub number: u8,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

fn text(name: &'static str) -> Column {
    Column { name, digits: None }
}

fn num(name: &'static str, digits: usize) -> Column {
    Column { name, digits: Some(digits) }
}

fn level_label(p: f64) -> Cell {
    Cell::Text(format!("{p}"))
}

impl Table {
    fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// First row whose text cells equal `keys` in order, then the named column.
    pub fn lookup(&self, keys: &[&str], column: &str) -> Option<f64> {
        let c = self.column(column)?;
        self.rows
            .iter()
            .find(|row| {
                let texts: Vec<&str> = row
                    .iter()
                    .filter_map(|cell| match cell {
                        Cell::Text(t) => Some(t.as_str()),
                        Cell::Num(_) => None,
                    })
                    .collect();
                texts.len() >= keys.len() && texts[..keys.len()] == *keys
            })
            .and_then(|row| match row[c] {
                Cell::Num(v) => Some(v),
                Cell::Text(_) => None,
            })
    }

    /// CSV with a `table` column first; `digits` overrides every numeric column.
    pub fn to_csv(&self, digits: Option<usize>) -> String {
        let mut out = String::from("table");
        for c in &self.columns {
            out.push(',');
            out.push_str(c.name);
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{}", self.number).unwrap();
            for (cell, col) in row.iter().zip(&self.columns) {
                out.push(',');
                match cell {
                    Cell::Text(t) => out.push_str(t),
                    Cell::Num(v) => {
                        let d = digits.or(col.digits).unwrap_or(5);
                        write!(out, "{v:.d$}").unwrap();
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Closed-form engines for the three fixture models, in [`CASES`] order.
pub struct TableModels {
    pub cases: Vec<(&'static str, Aggregation)>,
}

impl TableModels {
    /// Admissibility failures of the fixtures are not enforced here.
    pub fn load() -> Result<Self> {
        let mut cases = Vec::new();
        for (name, json) in fixtures::ALL {
            let l = parse_model_str(json)?;
            cases.push((name, Aggregation::new(&l.model, &l.program)?));
        }
        Ok(Self { cases })
    }

    pub fn case(&self, name: &str) -> &Aggregation {
        &self.cases.iter().find(|(n, _)| *n == name).expect("known case").1
    }

    pub fn table(&self, number: u8) -> Result<Table> {
        match number {
            3 => self.joint_tail_table(),
            4 => self.risk_measure_table(),
            5 => self.diversification_table(),
            6 => self.allocation_table(),
            7 => self.default_table(),
            _ => Err(crate::error::Error::Domain(format!("no table {number}; tables 3 to 7 are available"))),
        }
    }

    fn joint_tail_table(&self) -> Result<Table> {
        let mut columns = vec![text("u1"), text("u2")];
        columns.extend(CASES.iter().map(|c| num(c, 4)));
        let mut rows = Vec::new();
        for (u1, u2) in JOINT_TAIL_THRESHOLDS {
            let mut row = vec![Cell::Text(format!("{u1}")), Cell::Text(format!("{u2}"))];
            for (_, a) in &self.cases {
                row.push(Cell::Num(a.joint_tail(u1, u2)?));
            }
            rows.push(row);
        }
        Ok(Table { number: 3, columns, rows })
    }

    fn risk_measure_table(&self) -> Result<Table> {
        let columns = vec![
            text("p"),
            num("var_independence", 2),
            num("tvar_independence", 2),
            num("var_laplace", 2),
            num("tvar_laplace", 2),
            num("var_fgm", 2),
            num("tvar_fgm", 2),
        ];
        let mut rows = Vec::new();
        for p in RISK_MEASURE_LEVELS {
            let mut row = vec![level_label(p)];
            for (_, a) in &self.cases {
                let v = a.var_tvar(p)?;
                row.push(Cell::Num(v.var));
                row.push(Cell::Num(v.tvar));
            }
            rows.push(row);
        }
        Ok(Table { number: 4, columns, rows })
    }

    fn diversification_table(&self) -> Result<Table> {
        let columns = vec![
            text("case"),
            text("p"),
            num("tvar_r", 2),
            num("tvar_t1", 2),
            num("tvar_t2", 2),
            num("d_pct", 2),
        ];
        let mut rows = Vec::new();
        for (name, a) in &self.cases {
            let t1 = a.standalone(crate::reinsurance::Portfolio::First)?;
            let t2 = a.standalone(crate::reinsurance::Portfolio::Second)?;
            for p in DIVERSIFICATION_LEVELS {
                let r = a.var_tvar(p)?.tvar;
                let (a1, a2) = (t1.var_tvar(p)?.tvar, t2.var_tvar(p)?.tvar);
                rows.push(vec![
                    Cell::Text(name.to_string()),
                    level_label(p),
                    Cell::Num(r),
                    Cell::Num(a1),
                    Cell::Num(a2),
                    Cell::Num(100.0 * (1.0 - r / (a1 + a2))),
                ]);
            }
        }
        Ok(Table { number: 5, columns, rows })
    }

    fn allocation_table(&self) -> Result<Table> {
        let columns = vec![text("case"), text("p"), num("tvar", 2), num("k1", 2), num("k2", 2)];
        let mut rows = Vec::new();
        for (name, a) in self.cases.iter().filter(|(n, _)| *n != "independence") {
            for p in RISK_MEASURE_LEVELS {
                let al = a.tvar_allocate(p)?;
                rows.push(vec![
                    Cell::Text(name.to_string()),
                    level_label(p),
                    Cell::Num(al.tvar),
                    Cell::Num(al.k1),
                    Cell::Num(al.k2),
                ]);
            }
        }
        Ok(Table { number: 6, columns, rows })
    }

    fn default_table(&self) -> Result<Table> {
        let columns = vec![
            text("case"),
            text("p"),
            num("k", 2),
            num("phi", 5),
            num("u", 5),
            num("k1", 2),
            num("u1", 5),
            num("k2", 2),
            num("u2", 5),
        ];
        let mut rows = Vec::new();
        for (name, a) in &self.cases {
            for p in DEFAULT_LEVELS {
                let al = a.tvar_allocate(p)?;
                let k = al.tvar;
                let (u1, u2) = a.unpaid_losses(al.k1, al.k2)?;
                rows.push(vec![
                    Cell::Text(name.to_string()),
                    level_label(p),
                    Cell::Num(k),
                    Cell::Num(a.default_prob(k)?),
                    Cell::Num(a.default_value(k)?),
                    Cell::Num(al.k1),
                    Cell::Num(u1),
                    Cell::Num(al.k2),
                    Cell::Num(u2),
                ]);
            }
        }
        Ok(Table { number: 7, columns, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_lookup() {
        let m = TableModels::load().unwrap();
        let t = m.table(3).unwrap();
        let csv = t.to_csv(None);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("table,u1,u2,independence,laplace,fgm"));
        assert!(lines.next().unwrap().starts_with("3,20,15,0."));
        let v = t.lookup(&["25", "20"], "fgm").unwrap();
        assert!((v - 0.1573).abs() < 3e-4);
        assert!(m.table(8).is_err());
        let t4 = m.table(4).unwrap();
        assert!((t4.lookup(&["0.95"], "tvar_independence").unwrap() - 30.10).abs() < 0.02);
        assert!(t4.to_csv(Some(3)).lines().nth(1).unwrap().starts_with("4,0.9,11.7"));
    }
}
