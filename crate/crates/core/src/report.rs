//! Ranked run reports, CSV histograms and bar-chart SVGs.
//!
//! Correctness flags are always recomputed with the exhaustive verifier from
//! the constraint set, never taken from the quantum run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::encoding::{ParamBitstring, BIT_CONVENTION};
use crate::error::Result;
use crate::grover::{GroverRun, OracleKind};
use crate::netmodel::ConstraintSet;
use crate::qsim::NoiseModel;
use crate::satcore::CompiledConstraints;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub convention: String,
    pub config: ReportConfig,
    pub measured: MeasuredSummary,
    pub rows: Vec<ReportRow>,
    pub totals: ReportTotals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub variables: Vec<String>,
    pub target: String,
    pub samples: usize,
    pub oracle: OracleKind,
    pub shots: u64,
    pub seed: u64,
    pub iterations: usize,
    pub solutions: u64,
    pub noise: NoiseModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top: Option<usize>,
    pub circuit_width: usize,
    pub gate_counts: BTreeMap<String, usize>,
}

/// Whole-histogram figures; unaffected by row truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredSummary {
    pub distinct_bitstrings: usize,
    pub correct_bitstrings: usize,
    pub solution_mass_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub position: usize,
    pub bitstring: String,
    pub count: u64,
    pub probability_pct: f64,
    pub expression: String,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTotals {
    pub rows: usize,
    pub shown_probability_pct: f64,
    /// Mass of measured bitstrings left out of `rows`.
    pub unshown_probability_pct: f64,
    pub correct_rows: usize,
    pub correct_probability_pct: f64,
}

/// One measured bitstring with its grade; shared by reports, CSV and SVG.
#[derive(Debug, Clone)]
struct Graded {
    bitstring: ParamBitstring,
    count: u64,
    correct: bool,
}

fn grade(run: &GroverRun, constraints: &ConstraintSet) -> Result<Vec<Graded>> {
    let k = constraints.k();
    let verifier = CompiledConstraints::new(constraints);
    let mut graded = run
        .histogram
        .counts
        .iter()
        .map(|(&value, &count)| {
            let bitstring = ParamBitstring::from_index(k, value)?;
            Ok(Graded { bitstring, count, correct: verifier.accepts(&bitstring.decode()) })
        })
        .collect::<Result<Vec<_>>>()?;
    graded.sort_by(|a, b| b.count.cmp(&a.count).then(a.bitstring.cmp(&b.bitstring)));
    Ok(graded)
}

fn pct(count: u64, shots: u64) -> f64 {
    100.0 * count as f64 / shots as f64
}

impl RunReport {
    pub fn build(
        run: &GroverRun,
        constraints: &ConstraintSet,
        input: Option<String>,
        top: Option<usize>,
    ) -> Result<Self> {
        let shots = run.histogram.shots;
        let graded = grade(run, constraints)?;
        let correct_count: u64 = graded.iter().filter(|g| g.correct).map(|g| g.count).sum();
        let measured = MeasuredSummary {
            distinct_bitstrings: graded.len(),
            correct_bitstrings: graded.iter().filter(|g| g.correct).count(),
            solution_mass_pct: pct(correct_count, shots),
        };
        let rows = graded
            .iter()
            .take(top.unwrap_or(usize::MAX))
            .enumerate()
            .map(|(i, g)| {
                Ok(ReportRow {
                    position: i + 1,
                    bitstring: g.bitstring.to_string(),
                    count: g.count,
                    probability_pct: pct(g.count, shots),
                    expression: g.bitstring.decode().format(constraints.variables())?,
                    correct: g.correct,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let config = ReportConfig {
            input,
            variables: constraints.variables().to_vec(),
            target: constraints.target().to_string(),
            samples: constraints.len(),
            oracle: run.oracle,
            shots,
            seed: run.histogram.metadata.seed,
            iterations: run.iterations,
            solutions: run.solutions,
            noise: run.histogram.metadata.noise,
            top,
            circuit_width: run.circuit_width,
            gate_counts: run.gate_counts.clone(),
        };
        let totals = totals_for(&rows, shots);
        Ok(Self { convention: BIT_CONVENTION.to_string(), config, measured, rows, totals })
    }

    /// Re-sorts rows (count descending, then bitstring ascending), renumbers
    /// them and recomputes the totals.
    pub fn rerank(&self) -> Self {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.bitstring.cmp(&b.bitstring)));
        for (i, r) in rows.iter_mut().enumerate() {
            r.position = i + 1;
        }
        let totals = totals_for(&rows, self.config.shots);
        Self { rows, totals, ..self.clone() }
    }

    pub fn to_json_pretty(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plain data");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Plain-text table in the `Position / Bitstring / Probability / Expression`
    /// layout; correct rows are marked with `*`.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>8}  {:<width$}  {:>9}  expression",
            "position",
            "bitstring",
            "prob (%)",
            width = 2 * self.config.variables.len()
        );
        for r in &self.rows {
            let mark = if r.correct { '*' } else { ' ' };
            let _ = writeln!(
                out,
                "{:>8}  {}  {:>9.2}  {}{}",
                r.position, r.bitstring, r.probability_pct, mark, r.expression
            );
        }
        let _ = writeln!(
            out,
            "shown {:.2}% of {} shots ({} rows, {:.2}% unshown); * = satisfies all {} samples",
            self.totals.shown_probability_pct,
            self.config.shots,
            self.totals.rows,
            self.totals.unshown_probability_pct,
            self.config.samples
        );
        out
    }
}

fn totals_for(rows: &[ReportRow], shots: u64) -> ReportTotals {
    let shown: u64 = rows.iter().map(|r| r.count).sum();
    let correct: u64 = rows.iter().filter(|r| r.correct).map(|r| r.count).sum();
    ReportTotals {
        rows: rows.len(),
        shown_probability_pct: pct(shown, shots),
        unshown_probability_pct: pct(shots - shown, shots),
        correct_rows: rows.iter().filter(|r| r.correct).count(),
        correct_probability_pct: pct(correct, shots),
    }
}

/// `bitstring,count,probability,is_solution`, one line per measured bitstring
/// in rank order.
pub fn histogram_csv(run: &GroverRun, constraints: &ConstraintSet) -> Result<String> {
    let shots = run.histogram.shots as f64;
    let mut out = String::from("bitstring,count,probability,is_solution\n");
    for g in grade(run, constraints)? {
        let _ = writeln!(out, "{},{},{},{}", g.bitstring, g.count, g.count as f64 / shots, g.correct);
    }
    Ok(out)
}

/// Bar chart of the ranked histogram (at most `max_bars` bars). Correct
/// bitstrings are drawn green.
pub fn histogram_svg(run: &GroverRun, constraints: &ConstraintSet, max_bars: usize) -> Result<String> {
    let graded = grade(run, constraints)?;
    let bars = &graded[..graded.len().min(max_bars)];
    let bar_w = 14.0;
    let gap = 4.0;
    let plot_h = 240.0;
    let (left, top, bottom) = (48.0, 24.0, 110.0);
    let width = left + 16.0 + bars.len().max(1) as f64 * (bar_w + gap);
    let height = top + plot_h + bottom;
    let max = bars.iter().map(|g| g.count).max().unwrap_or(1).max(1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="monospace" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="14">{} shots, target {}, m = {}, t = {}</text>"#,
        run.histogram.shots,
        xml_escape(constraints.target()),
        run.iterations,
        run.solutions
    );
    let axis_y = top + plot_h;
    let _ = writeln!(s, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{axis_y}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{axis_y}" x2="{:.1}" y2="{axis_y}" stroke="black"/>"#, width - 8.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 4.0, top + 4.0, max as u64);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{axis_y}" text-anchor="end">0</text>"#, left - 4.0);
    for (i, g) in bars.iter().enumerate() {
        let x = left + 8.0 + i as f64 * (bar_w + gap);
        let h = plot_h * g.count as f64 / max;
        let fill = if g.correct { "#2e7d32" } else { "#9e9e9e" };
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{:.1}" width="{bar_w}" height="{h:.1}" fill="{fill}"><title>{} {}</title></rect>"#,
            axis_y - h,
            g.bitstring,
            g.count
        );
        let lx = x + bar_w / 2.0 + 3.0;
        let ly = axis_y + 6.0;
        let _ = writeln!(
            s,
            r#"<text x="{lx:.1}" y="{ly:.1}" transform="rotate(90 {lx:.1} {ly:.1})">{}</text>"#,
            g.bitstring
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
