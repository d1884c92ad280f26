//! CSV series and summary files.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{ScenarioError, SummaryReport};
use crate::arrivals::ArrivalSeries;

pub const CSV_HEADER: &str = "t,pi,pi_plus,pi_minus,flux";

/// Decimal notation with 12 significant digits, trailing zeros trimmed.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Let the formatter do the rounding, then move the decimal point.
    let sci = format!("{:.11e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut out = String::new();
    if x < 0.0 {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

pub fn write_csv<W: Write>(series: &ArrivalSeries, mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for p in &series.points {
        writeln!(
            w,
            "{},{},{},{},{}",
            format_sig12(p.t),
            format_sig12(p.pi),
            format_sig12(p.pi_plus),
            format_sig12(p.pi_minus),
            format_sig12(p.flux)
        )?;
    }
    w.flush()
}

fn sink_error(path: &Path, source: io::Error) -> ScenarioError {
    ScenarioError::Sink {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>) -> Result<(), ScenarioError> {
    let file = fs::File::create(path).map_err(|e| sink_error(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| sink_error(path, e))
}

pub fn emit_csv(series: &ArrivalSeries, path: &Path) -> Result<(), ScenarioError> {
    write_file(path, |w| write_csv(series, w))
}

/// Rows of a CSV produced by [`write_csv`]: `[t, pi, pi_plus, pi_minus, flux]`.
pub fn read_csv(text: &str) -> Result<Vec<[f64; 5]>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let mut row = [0.0; 5];
            let mut fields = line.split(',');
            for slot in &mut row {
                let field = fields.next().ok_or_else(|| format!("row {}: too few fields", i + 1))?;
                *slot = field.parse().map_err(|e| format!("row {}: {e}", i + 1))?;
            }
            if fields.next().is_some() {
                return Err(format!("row {}: too many fields", i + 1));
            }
            Ok(row)
        })
        .collect()
}

pub fn summary_text(reports: &[SummaryReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("== {} ==\n", r.label));
        if let Some(s) = r.statistics {
            out.push_str(&format!("statistics          {s}\n"));
        }
        out.push_str(&format!("integral            {:.6}\n", r.integral));
        out.push_str(&format!("  from the left     {:.6}\n", r.integral_plus));
        out.push_str(&format!("  from the right    {:.6}\n", r.integral_minus));
        out.push_str(&format!("mean arrival time   {:.6}\n", r.mean_arrival_time));
        out.push_str(&format!(
            "peaks               {} (prominence >= {} of max)\n",
            r.peaks.len(),
            r.peak_prominence
        ));
        for p in &r.peaks {
            out.push_str(&format!("  t = {:<10.4} pi = {:.6}\n", p.t, p.value));
        }
        if let Some(f) = &r.flux {
            out.push_str(&format!("flux integral       {:.6}\n", f.integral));
            out.push_str(&format!("max |j - pi| / peak {:.3e}\n", f.max_deviation));
            out.push_str(&format!("min flux            {:.6}\n", f.min_flux));
        }
        out.push_str(&format!(
            "window              boundary/peak {:.3e} [{}]\n",
            r.audit.boundary_ratio,
            if r.audit.window_ok {
                "ok"
            } else {
                "WARNING: window cuts off arrivals"
            }
        ));
        match &r.audit.convergence {
            Some(c) => out.push_str(&format!(
                "convergence         relative change {:.3e} at {} points [{}]\n",
                c.relative_change,
                c.refined_points,
                if c.ok { "ok" } else { "FAILED" }
            )),
            None => out.push_str("convergence         not run\n"),
        }
        out.push_str(&format!("runtime             {:.3} s\n\n", r.runtime_seconds));
    }
    out
}

/// `label.key=value` lines.
pub fn summary_key_values(reports: &[SummaryReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let l = &r.label;
        let mut kv = |k: &str, v: String| out.push_str(&format!("{l}.{k}={v}\n"));
        if let Some(s) = r.statistics {
            kv("statistics", s.to_string());
        }
        kv("integral", format_sig12(r.integral));
        kv("integral_plus", format_sig12(r.integral_plus));
        kv("integral_minus", format_sig12(r.integral_minus));
        kv("mean_arrival_time", format_sig12(r.mean_arrival_time));
        kv("peak_prominence", format_sig12(r.peak_prominence));
        kv("peak_count", r.peaks.len().to_string());
        let times: Vec<String> = r.peaks.iter().map(|p| format_sig12(p.t)).collect();
        let values: Vec<String> = r.peaks.iter().map(|p| format_sig12(p.value)).collect();
        kv("peak_times", times.join(";"));
        kv("peak_values", values.join(";"));
        if let Some(f) = &r.flux {
            kv("flux_integral", format_sig12(f.integral));
            kv("flux_max_deviation", format_sig12(f.max_deviation));
            kv("flux_min", format_sig12(f.min_flux));
        }
        kv("boundary_ratio", format_sig12(r.audit.boundary_ratio));
        kv("window_ok", r.audit.window_ok.to_string());
        if let Some(c) = &r.audit.convergence {
            kv("convergence_relative_change", format_sig12(c.relative_change));
            kv("convergence_ok", c.ok.to_string());
        }
        kv("runtime_seconds", format!("{:.3}", r.runtime_seconds));
    }
    out
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct WrittenFiles {
    pub series: Vec<PathBuf>,
    pub summary_text: PathBuf,
    pub summary_kv: PathBuf,
}

/// Writes `<prefix>_<label>.csv` per variant plus `<prefix>_summary.txt`
/// and `<prefix>_summary.kv` into `dir`.
pub fn write_outputs(
    dir: &Path,
    prefix: &str,
    series: &[ArrivalSeries],
    reports: &[SummaryReport],
) -> Result<WrittenFiles, ScenarioError> {
    fs::create_dir_all(dir).map_err(|e| sink_error(dir, e))?;
    let mut paths = Vec::with_capacity(series.len());
    for (s, r) in series.iter().zip(reports) {
        let path = dir.join(format!("{prefix}_{}.csv", r.label));
        emit_csv(s, &path)?;
        paths.push(path);
    }
    let summary_text_path = dir.join(format!("{prefix}_summary.txt"));
    write_file(&summary_text_path, |w| w.write_all(summary_text(reports).as_bytes()))?;
    let summary_kv_path = dir.join(format!("{prefix}_summary.kv"));
    write_file(&summary_kv_path, |w| {
        w.write_all(summary_key_values(reports).as_bytes())
    })?;
    Ok(WrittenFiles {
        series: paths,
        summary_text: summary_text_path,
        summary_kv: summary_kv_path,
    })
}
