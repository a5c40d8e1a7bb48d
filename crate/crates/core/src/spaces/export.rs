//! CSV export of norm evaluations.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::Result;

/// One norm evaluation. Fields that do not apply to a norm kind are left
/// empty in the CSV (`None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub norm_kind: String,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub rho: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub value: f64,
}

pub const NORM_COLUMNS: [&str; 8] = ["norm_kind", "s", "p", "q", "rho", "t1", "t2", "value"];

pub fn write_norm_records<W: Write>(w: W, records: &[NormRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_documented_columns() {
        let rec = NormRecord {
            norm_kind: "besov".into(),
            s: Some(-0.25),
            p: Some(4.0),
            q: Some(4.0),
            rho: None,
            t1: None,
            t2: None,
            value: 1.5,
        };
        let mut out = Vec::new();
        write_norm_records(&mut out, &[rec]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), NORM_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "besov,-0.25,4.0,4.0,,,,1.5");
    }
}
