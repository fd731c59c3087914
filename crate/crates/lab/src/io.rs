//! Text formats: signal matrices and trace tables.
//!
//! Both are comma-separated, UTF-8, LF-terminated. Floats are written with
//! the shortest representation that parses back to the same value.

use std::fmt::Write as _;
use std::path::Path;

use framelet_core::TraceRow;
use ndarray::Array2;

use crate::error::{LabError, Result};

pub const TRACE_HEADER: &str = "step,norm,dirichlet_normalized,total_energy,rayleigh";

/// Upper bound on matrix entries accepted from a signal file.
pub const MAX_SIGNAL_CELLS: usize = 1 << 24;

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn parse_err(what: &'static str, line: usize, message: impl Into<String>) -> LabError {
    LabError::Parse {
        what,
        line,
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| LabError::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| LabError::io(path, e))
}

/// Parses an `n×c` matrix: one row per line, no header. Blank lines are
/// skipped; every row must have the same number of finite values.
pub fn parse_signal(text: &str) -> Result<Array2<f64>> {
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for token in line.split(',') {
            let token = token.trim();
            let v: f64 = token
                .parse()
                .map_err(|_| parse_err("signal", line_no, format!("not a number: {token:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(
                    "signal",
                    line_no,
                    format!("non-finite value {token:?}"),
                ));
            }
            values.push(v);
            count += 1;
            if values.len() > MAX_SIGNAL_CELLS {
                return Err(parse_err("signal", line_no, "matrix too large"));
            }
        }
        match cols {
            None => cols = Some(count),
            Some(c) if c != count => {
                return Err(parse_err(
                    "signal",
                    line_no,
                    format!("expected {c} columns, found {count}"),
                ));
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err("signal", 0, "signal file is empty"))?;
    Array2::from_shape_vec((rows, cols), values).map_err(|e| parse_err("signal", 0, e.to_string()))
}

pub fn format_signal(h: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in h.rows() {
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One parsed trace line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub norm: f64,
    pub dirichlet_normalized: f64,
    pub total_energy: f64,
    pub rayleigh: f64,
}

impl From<&TraceRow> for TraceRecord {
    fn from(r: &TraceRow) -> Self {
        Self {
            step: r.step,
            norm: r.norm,
            dirichlet_normalized: r.dirichlet_normalized,
            total_energy: r.total_energy,
            rayleigh: r.rayleigh,
        }
    }
}

pub fn format_trace<'a>(rows: impl IntoIterator<Item = &'a TraceRow>) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.step,
            format_float(r.norm),
            format_float(r.dirichlet_normalized),
            format_float(r.total_energy),
            format_float(r.rayleigh)
        );
    }
    out
}

/// Parses a trace table. The header must match exactly and steps must be
/// consecutive from zero.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == TRACE_HEADER => {}
        _ => {
            return Err(parse_err(
                "trace",
                1,
                format!("expected header {TRACE_HEADER:?}"),
            ))
        }
    }
    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(
                "trace",
                line_no,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let step: usize = fields[0]
            .parse()
            .map_err(|_| parse_err("trace", line_no, format!("bad step {:?}", fields[0])))?;
        if step != out.len() {
            return Err(parse_err(
                "trace",
                line_no,
                format!("expected step {}, found {step}", out.len()),
            ));
        }
        let mut nums = [0.0; 4];
        for (slot, f) in nums.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| parse_err("trace", line_no, format!("not a number: {f:?}")))?;
        }
        out.push(TraceRecord {
            step,
            norm: nums[0],
            dirichlet_normalized: nums[1],
            total_energy: nums[2],
            rayleigh: nums[3],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn float_formatting_round_trips() {
        for x in [
            0.0,
            -0.0,
            1.0,
            0.1,
            1e-7,
            -3.5e20,
            123456.789,
            f64::MIN_POSITIVE,
            f64::MAX,
            1.0 / 3.0,
        ] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(1e-7), "1e-7");
    }

    #[test]
    fn signal_round_trip() {
        let h = arr2(&[[1.0, -2.5], [1e-9, 3.0]]);
        assert_eq!(parse_signal(&format_signal(&h)).unwrap(), h);
        assert_eq!(
            parse_signal("1, 2\r\n3,4\r\n").unwrap(),
            arr2(&[[1.0, 2.0], [3.0, 4.0]])
        );
    }

    #[test]
    fn signal_errors() {
        assert!(matches!(
            parse_signal(""),
            Err(LabError::Parse { line: 0, .. })
        ));
        assert!(matches!(
            parse_signal("1,2\n3"),
            Err(LabError::Parse { line: 2, .. })
        ));
        assert!(parse_signal("1,x").is_err());
        assert!(parse_signal("1,NaN").is_err());
        assert!(parse_signal("1,,2").is_err());
    }

    #[test]
    fn trace_round_trip() {
        let rows = [
            TraceRow {
                step: 0,
                norm: 2.0,
                dirichlet_normalized: 0.25,
                total_energy: -1e-12,
                rayleigh: 0.5,
                elapsed_secs: 0.1,
            },
            TraceRow {
                step: 1,
                norm: 1.5,
                dirichlet_normalized: 0.125,
                total_energy: 3.0,
                rayleigh: 0.25,
                elapsed_secs: 0.2,
            },
        ];
        let text = format_trace(&rows);
        let back = parse_trace(&text).unwrap();
        assert_eq!(back, rows.iter().map(TraceRecord::from).collect::<Vec<_>>());
    }

    #[test]
    fn trace_errors() {
        assert!(parse_trace("").is_err());
        assert!(parse_trace("step,norm\n0,1").is_err());
        assert!(parse_trace(&format!("{TRACE_HEADER}\n1,1,0,0,0\n")).is_err());
        assert!(parse_trace(&format!("{TRACE_HEADER}\n0,1,0,0\n")).is_err());
    }
}
