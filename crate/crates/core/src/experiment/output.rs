use std::fmt::Write as _;
use std::path::Path;

use super::run::{ResultRow, ResultTable};
use crate::complexity::CurveRow;
use crate::error::{Error, Result};

pub const RESULT_HEADER: &str = "snr_db,method,constraint,csi,mean_wsr,std_err,mean_iters,clamp_count,failed_trials";
pub const COMPLEXITY_HEADER: &str = "K,method,total_flops,total_feedback";

/// Six significant digits, trailing zeros trimmed, in the style of `%g`.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round first so that the exponent accounts for carries (999999.7 -> 1e6).
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row_line(row: &ResultRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        format_sig(row.snr_db),
        row.method.label(),
        row.constraint.label(),
        row.csi.label(),
        format_sig(row.mean_wsr),
        format_sig(row.std_err),
        format_sig(row.mean_iters),
        row.clamp_count,
        row.failed
    )
}

pub fn result_csv(table: &ResultTable) -> String {
    let mut out = String::from(RESULT_HEADER);
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row_line(row));
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    write_file(path, &result_csv(table))
}

/// Reads back a table written by [`result_csv`]. Numbers come back with six
/// significant digits.
pub fn parse_csv(text: &str, origin: &str) -> Result<ResultTable> {
    let err = |line: usize, msg: String| Error::Parse { origin: origin.to_string(), line, msg };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == RESULT_HEADER => {}
        _ => return Err(err(1, format!("expected header {RESULT_HEADER:?}"))),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 9 {
            return Err(err(line_no, format!("expected 9 fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(line_no, format!("{s:?}: {e}")));
        let int = |s: &str| s.parse::<usize>().map_err(|e| err(line_no, format!("{s:?}: {e}")));
        rows.push(ResultRow {
            snr_db: num(f[0])?,
            method: f[1].parse().map_err(|m| err(line_no, m))?,
            constraint: f[2].parse().map_err(|m| err(line_no, m))?,
            csi: f[3].parse().map_err(|m| err(line_no, m))?,
            mean_wsr: num(f[4])?,
            std_err: num(f[5])?,
            mean_iters: num(f[6])?,
            clamp_count: int(f[7])?,
            failed: int(f[8])?,
        });
    }
    Ok(ResultTable { rows })
}

pub fn complexity_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(COMPLEXITY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.k,
            r.method.label(),
            format_sig(r.total_flops),
            format_sig(r.total_feedback)
        );
    }
    out
}

pub fn emit_complexity_curves(rows: &[CurveRow], path: &Path) -> Result<()> {
    write_file(path, &complexity_csv(rows))
}

/// Fixed-width table for terminals.
pub fn summary(table: &ResultTable) -> String {
    let mut out = format!(
        "{:>7}  {:<12} {:<8} {:<8} {:>10} {:>9} {:>8} {:>6} {:>6}\n",
        "snr_db", "method", "power", "csi", "mean_wsr", "std_err", "iters", "clamps", "failed"
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:>7}  {:<12} {:<8} {:<8} {:>10.4} {:>9.4} {:>8.1} {:>6} {:>6}",
            format_sig(r.snr_db),
            r.method.label(),
            r.constraint.label(),
            r.csi.label(),
            r.mean_wsr,
            r.std_err,
            r.mean_iters,
            r.clamp_count,
            r.failed
        );
    }
    out
}
