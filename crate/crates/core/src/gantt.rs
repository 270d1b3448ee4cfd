//! Job-oriented Gantt charts: one row per job, one bar per stage.
//!
//! Bars keep exact times; floating point only appears when rendering.

use std::fmt::Write as _;

use serde::Serialize;

use crate::model::{Instance, Schedule};
use crate::time::QTime;
use crate::validate::{validate_schedule, ScheduleViolation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GanttBar {
    pub stage: usize,
    pub machine: usize,
    pub start: QTime,
    pub end: QTime,
    /// `M_i^(k)` with 1-based stage `i` and machine `k`.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GanttRow {
    pub job: usize,
    pub release: QTime,
    pub bars: Vec<GanttBar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GanttChart {
    pub rows: Vec<GanttRow>,
    pub horizon: QTime,
}

pub fn machine_label(stage: usize, machine: usize) -> String {
    format!("M_{}^({})", stage + 1, machine + 1)
}

pub fn gantt_chart(inst: &Instance, sched: &Schedule) -> Result<GanttChart, ScheduleViolation> {
    validate_schedule(inst, sched)?;
    let mut rows: Vec<GanttRow> = (0..inst.num_jobs())
        .map(|j| GanttRow {
            job: j,
            release: inst.release(j),
            bars: Vec::new(),
        })
        .collect();
    let mut horizon = QTime::zero();
    for b in &sched.batches {
        let end = &b.start + &inst.stages[b.stage].processing_time;
        if end > horizon {
            horizon = end.clone();
        }
        for &j in &b.jobs {
            rows[j].bars.push(GanttBar {
                stage: b.stage,
                machine: b.machine,
                start: b.start.clone(),
                end: end.clone(),
                label: machine_label(b.stage, b.machine),
            });
        }
    }
    for row in &mut rows {
        row.bars.sort_by_key(|bar| bar.stage);
    }
    Ok(GanttChart { rows, horizon })
}

/// Six significant digits, trailing zeros dropped.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".into()
        } else {
            x.to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn stage_glyph(stage: usize) -> char {
    char::from_digit((stage + 1) as u32, 10).unwrap_or('*')
}

/// Text rendering, `width` columns for the whole horizon. `#` marks the
/// time before a job's release, digits the stage a job is processed at.
pub fn render_ascii(chart: &GanttChart, width: usize) -> String {
    let mut out = String::new();
    if chart.rows.is_empty() {
        return out;
    }
    let horizon = chart.horizon.to_f64().max(f64::MIN_POSITIVE);
    let cell = |c: usize| (c as f64 + 0.5) * horizon / width as f64;
    let name_width = format!("J{}", chart.rows.len()).len();
    for row in &chart.rows {
        let release = row.release.to_f64();
        let line: String = (0..width)
            .map(|c| {
                let t = cell(c);
                if t < release {
                    return '#';
                }
                row.bars
                    .iter()
                    .find(|b| b.start.to_f64() <= t && t < b.end.to_f64())
                    .map_or('.', |b| stage_glyph(b.stage))
            })
            .collect();
        let bars: Vec<String> = row
            .bars
            .iter()
            .map(|b| {
                format!(
                    "{}[{}, {})",
                    b.label,
                    format_sig6(b.start.to_f64()),
                    format_sig6(b.end.to_f64())
                )
            })
            .collect();
        let _ = writeln!(
            out,
            "{:<name_width$} |{}| {}",
            format!("J{}", row.job + 1),
            line,
            bars.join(" ")
        );
    }
    let _ = writeln!(
        out,
        "{:<name_width$} 0{:>w$}",
        "",
        format_sig6(chart.horizon.to_f64()),
        w = width + 1
    );
    out
}

const ROW_HEIGHT: f64 = 24.0;
const LEFT: f64 = 40.0;

/// SVG rendering with `scale` pixels per time unit.
pub fn render_svg(chart: &GanttChart, scale: f64) -> String {
    let x = |t: &QTime| format_sig6(LEFT + t.to_f64() * scale);
    let w = |a: &QTime, b: &QTime| format_sig6((b.to_f64() - a.to_f64()) * scale);
    let width = format_sig6(LEFT + chart.horizon.to_f64() * scale + 10.0);
    let height = format_sig6(ROW_HEIGHT * chart.rows.len() as f64 + 10.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="10">"#
    );
    for (r, row) in chart.rows.iter().enumerate() {
        let y = ROW_HEIGHT * r as f64 + 5.0;
        let top = format_sig6(y);
        let mid = format_sig6(y + ROW_HEIGHT / 2.0 + 3.0);
        let _ = writeln!(out, r#"  <text x="4" y="{mid}">J{}</text>"#, row.job + 1);
        if row.release > QTime::zero() {
            let _ = writeln!(
                out,
                r#"  <rect class="unreleased" x="{}" y="{top}" width="{}" height="20" fill="black"/>"#,
                x(&QTime::zero()),
                w(&QTime::zero(), &row.release)
            );
        }
        for b in &row.bars {
            let _ = writeln!(
                out,
                r#"  <rect class="batch" x="{}" y="{top}" width="{}" height="20" fill="white" stroke="black"/>"#,
                x(&b.start),
                w(&b.start, &b.end)
            );
            let _ = writeln!(
                out,
                r#"  <text x="{}" y="{mid}">{}</text>"#,
                format_sig6(LEFT + b.start.to_f64() * scale + 2.0),
                b.label
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
