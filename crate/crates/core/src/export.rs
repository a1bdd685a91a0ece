//! CSV emitters for scans, branches, windows and iterate graphs.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! reading a file back yields the exact same `f64` values.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::periodic::Branch;
use crate::scan::{BifurcationScan, Window};

pub const SCAN_HEADER: [&str; 4] = ["b", "seed", "iter", "x"];
pub const BRANCH_HEADER: [&str; 4] = ["b", "P", "multiplier", "dPdb"];
pub const WINDOWS_HEADER: [&str; 7] = [
    "b_lo",
    "b_hi",
    "period",
    "rotation_kind",
    "rotation_number",
    "hopping_peak",
    "hopping_edges",
];
pub const GRAPH_HEADER: [&str; 2] = ["x", "Fn_x"];

/// One line of a scan file. `iter` counts iterates from the seed, so the
/// first stored sample has `iter = transient + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub b: f64,
    pub seed: String,
    pub iter: usize,
    pub x: f64,
}

fn num(x: f64) -> String {
    x.to_string()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Rows in file order: by column, then seed, then iterate.
pub fn scan_rows(scan: &BifurcationScan) -> Vec<ScanRow> {
    let mut rows = Vec::new();
    for col in &scan.columns {
        for (role, pts) in scan.seeds.iter().zip(&col.points) {
            for (i, &x) in pts.iter().enumerate() {
                rows.push(ScanRow {
                    b: col.param,
                    seed: role.as_str().to_string(),
                    iter: scan.transient + 1 + i,
                    x,
                });
            }
        }
    }
    rows
}

pub fn write_scan_csv<W: Write>(scan: &BifurcationScan, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(SCAN_HEADER)?;
    for r in scan_rows(scan) {
        out.write_record([num(r.b), r.seed, r.iter.to_string(), num(r.x)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_scan_csv<R: Read>(r: R) -> Result<Vec<ScanRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().ne(SCAN_HEADER) {
        return Err(Error::InvalidParameter("scan CSV header".into()));
    }
    let parse_err = |what: &str| Error::InvalidParameter(format!("unparsable {what} in scan CSV"));
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(ScanRow {
                b: rec[0].parse().map_err(|_| parse_err("b"))?,
                seed: rec[1].to_string(),
                iter: rec[2].parse().map_err(|_| parse_err("iter"))?,
                x: rec[3].parse().map_err(|_| parse_err("x"))?,
            })
        })
        .collect()
}

pub fn write_branch_csv<W: Write>(branch: &Branch, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(BRANCH_HEADER)?;
    for (s, &(_, d)) in branch.samples.iter().zip(&branch.derivative_estimates) {
        out.write_record([num(s.b), num(s.position), num(s.multiplier), num(d)])?;
    }
    out.flush()?;
    Ok(())
}

/// Missing rotation or hopping data leaves the field empty.
pub fn write_windows_csv<W: Write>(windows: &[Window], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(WINDOWS_HEADER)?;
    for win in windows {
        let (kind, rot) = match &win.rotation {
            Some(r) => (
                r.kind.as_str().to_string(),
                r.rotation_number.map(|q| q.to_string()).unwrap_or_default(),
            ),
            None => (String::new(), String::new()),
        };
        let (peak, edges) = match win.hopping {
            Some(h) => (num(h.slope_peak), num(h.slope_edges)),
            None => (String::new(), String::new()),
        };
        out.write_record([
            num(win.param_interval.0),
            num(win.param_interval.1),
            win.period.to_string(),
            kind,
            rot,
            peak,
            edges,
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_graph_csv<W: Write>(rows: &[(f64, f64)], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(GRAPH_HEADER)?;
    for &(x, y) in rows {
        out.write_record([num(x), num(y)])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::BranchSample;

    #[test]
    fn graph_csv_layout() {
        let mut buf = Vec::new();
        write_graph_csv(&[(0.0, 0.5), (-0.25, 1e-20)], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next(), Some("x,Fn_x"));
        assert!(s.ends_with('\n'));
        let last: f64 = s
            .lines()
            .last()
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(last, 1e-20);
    }

    #[test]
    fn branch_csv_has_one_row_per_sample() {
        let samples = (0..4)
            .map(|i| BranchSample {
                b: i as f64,
                position: 2.0 * i as f64,
                multiplier: 0.5,
            })
            .collect();
        let br = Branch::from_samples((0.0, 3.0), 1, 0, samples);
        let mut buf = Vec::new();
        write_branch_csv(&br, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "b,P,multiplier,dPdb");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "1,2,0.5,2");
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_scan_csv("b,x\n0,0\n".as_bytes()).is_err());
    }
}
