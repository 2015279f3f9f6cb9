use std::io::{self, Write};

use galperin_core::backend::BackendKind;
use galperin_core::{BoundaryFlag, CountPrediction, DriftReport, MassRatio, Outcome, RotationModel, TraceRow};
use serde::Serialize;

pub fn write_json<W: Write, T: Serialize + ?Sized>(out: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

pub fn write_csv<W: Write, I>(out: &mut W, rows: I) -> io::Result<()>
where
    I: IntoIterator,
    I::Item: Serialize,
{
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

#[derive(Debug, Serialize)]
pub struct CountReport {
    pub alpha: String,
    pub backend: BackendKind,
    pub n: u64,
    pub theta: Option<f64>,
    pub drift: DriftReport,
    pub elapsed_ms: f64,
    pub final_v: String,
    pub final_big_v: String,
    pub final_numerator_digits: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct CountCsvRow<'a> {
    alpha: &'a str,
    backend: BackendKind,
    n: u64,
    theta: Option<f64>,
    energy_rel_drift: f64,
    momentum_rel_drift: f64,
    elapsed_ms: f64,
    final_v: &'a str,
    final_big_v: &'a str,
    final_numerator_digits: Option<u64>,
}

impl CountReport {
    pub fn new(out: &Outcome, theta: Option<f64>, elapsed_ms: f64) -> Self {
        let fin = out.final_state_rendered();
        CountReport {
            alpha: out.ratio().to_string(),
            backend: out.backend_kind(),
            n: out.count(),
            theta,
            drift: out.drift(),
            elapsed_ms,
            final_v: fin.small,
            final_big_v: fin.big,
            final_numerator_digits: out.final_numerator_digits(),
        }
    }

    pub fn csv_row(&self) -> CountCsvRow<'_> {
        CountCsvRow {
            alpha: &self.alpha,
            backend: self.backend,
            n: self.n,
            theta: self.theta,
            energy_rel_drift: self.drift.energy_rel_drift,
            momentum_rel_drift: self.drift.momentum_rel_drift,
            elapsed_ms: self.elapsed_ms,
            final_v: &self.final_v,
            final_big_v: &self.final_big_v,
            final_numerator_digits: self.final_numerator_digits,
        }
    }

    pub fn write_text<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "alpha    {}", self.alpha)?;
        writeln!(out, "backend  {}", self.backend)?;
        writeln!(out, "N        {}", self.n)?;
        if let Some(theta) = self.theta {
            writeln!(out, "theta    {theta}")?;
        }
        writeln!(out, "energy drift    {:e}", self.drift.energy_rel_drift)?;
        writeln!(out, "momentum drift  {:e}", self.drift.momentum_rel_drift)?;
        writeln!(out, "final v  {}", shorten(&self.final_v))?;
        writeln!(out, "final V  {}", shorten(&self.final_big_v))?;
        if let Some(d) = self.final_numerator_digits {
            writeln!(out, "final numerator digits  {d}")?;
        }
        writeln!(out, "elapsed  {:.3} ms", self.elapsed_ms)
    }
}

/// Exact fractions get long; text output only shows their ends.
fn shorten(s: &str) -> String {
    const KEEP: usize = 24;
    if s.len() <= 3 * KEEP {
        return s.to_owned();
    }
    format!("{}...{} ({} chars)", &s[..KEEP], &s[s.len() - KEEP..], s.len())
}

#[derive(Debug, Serialize)]
pub struct PredictReport {
    pub alpha: String,
    pub theta: f64,
    pub turns_to_pi: f64,
    pub n_exact_formula: u64,
    pub n_paper_floor: u64,
    pub n_sqrt_approx: u64,
    pub boundary_flag: BoundaryFlag,
    pub approximation_agrees: bool,
    pub elapsed_ms: f64,
}

impl PredictReport {
    pub fn new(alpha: MassRatio, model: &RotationModel, p: &CountPrediction, elapsed_ms: f64) -> Self {
        PredictReport {
            alpha: alpha.to_string(),
            theta: model.theta,
            turns_to_pi: p.turns_to_pi,
            n_exact_formula: p.n_exact_formula,
            n_paper_floor: p.n_paper_floor,
            n_sqrt_approx: p.n_sqrt_approx,
            boundary_flag: p.boundary_flag,
            approximation_agrees: p.approximation_agrees(),
            elapsed_ms,
        }
    }

    pub fn write_text<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "alpha            {}", self.alpha)?;
        writeln!(out, "theta            {}", self.theta)?;
        writeln!(out, "2 pi / theta     {}", self.turns_to_pi)?;
        writeln!(out, "n_exact_formula  {}", self.n_exact_formula)?;
        writeln!(out, "n_paper_floor    {}", self.n_paper_floor)?;
        writeln!(out, "n_sqrt_approx    {}", self.n_sqrt_approx)?;
        writeln!(out, "boundary_flag    {:?}", self.boundary_flag)
    }
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    #[serde(skip)]
    pub ratio: MassRatio,
    pub alpha: String,
    pub backend: BackendKind,
    pub n: u64,
    pub expected: u64,
    pub predicted: u64,
    pub n_sqrt_approx: u64,
    pub theta: f64,
    pub matches: bool,
    pub elapsed_ms: f64,
}

impl TableRow {
    pub fn new(ratio: MassRatio, expected: u64, out: &Outcome, p: &CountPrediction, elapsed_ms: f64) -> Self {
        let n = out.count();
        TableRow {
            ratio,
            alpha: ratio.to_string(),
            backend: out.backend_kind(),
            n,
            expected,
            predicted: p.n_exact_formula,
            n_sqrt_approx: p.n_sqrt_approx,
            theta: rotation_theta(ratio),
            matches: n == expected && p.n_exact_formula == expected,
            elapsed_ms,
        }
    }
}

pub fn write_table_markdown<W: Write>(out: &mut W, rows: &[TableRow]) -> io::Result<()> {
    writeln!(
        out,
        "| alpha | N | predicted | floor(pi sqrt(M/m)) | backend | match | ms |"
    )?;
    writeln!(out, "|---|---|---|---|---|---|---|")?;
    for r in rows {
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {:.1} |",
            r.alpha,
            r.n,
            r.predicted,
            r.n_sqrt_approx,
            r.backend,
            if r.matches { "yes" } else { "NO" },
            r.elapsed_ms
        )?;
    }
    let ok = rows.iter().filter(|r| r.matches).count();
    writeln!(out, "\n{ok}/{} rows match", rows.len())
}

#[derive(Debug, Default, Serialize)]
pub struct TraceSummary {
    pub alpha: String,
    pub backend: Option<BackendKind>,
    pub n: u64,
    pub rows: u64,
    pub min_abs_v_index: u64,
    pub min_abs_v: f64,
    pub min_abs_big_v_index: u64,
    pub min_abs_big_v: f64,
    pub final_abs_big_v: f64,
    pub elapsed_ms: f64,
}

impl TraceSummary {
    pub fn observe(&mut self, row: &TraceRow) {
        self.rows += 1;
        let s = row.speeds;
        if row.index == 1 || (row.index > 1 && s.small < self.min_abs_v) {
            self.min_abs_v = s.small;
            self.min_abs_v_index = row.index;
        }
        if row.index == 0 || s.big < self.min_abs_big_v {
            self.min_abs_big_v = s.big;
            self.min_abs_big_v_index = row.index;
        }
        self.final_abs_big_v = s.big;
    }

    pub fn finish(&mut self, out: &Outcome, elapsed_ms: f64) {
        self.alpha = out.ratio().to_string();
        self.backend = Some(out.backend_kind());
        self.n = out.count();
        self.elapsed_ms = elapsed_ms;
    }

    pub fn write_text<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "alpha {}  backend {}",
            self.alpha,
            self.backend.map_or("?".into(), |b| b.to_string())
        )?;
        writeln!(out, "N = {} ({} rows)", self.n, self.rows)?;
        writeln!(out, "min |v| = {} at event {}", self.min_abs_v, self.min_abs_v_index)?;
        writeln!(
            out,
            "min |V| = {} at event {}",
            self.min_abs_big_v, self.min_abs_big_v_index
        )?;
        writeln!(out, "final |V| = {}", self.final_abs_big_v)
    }
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub alpha: String,
    pub backend: BackendKind,
    pub status: &'static str,
    pub n: Option<u64>,
    pub elapsed_ms: Option<f64>,
    pub events_per_sec: Option<f64>,
    pub final_numerator_digits: Option<u64>,
}

impl BenchRow {
    pub fn completed(alpha: MassRatio, out: &Outcome, elapsed_ms: f64) -> Self {
        let n = out.count();
        BenchRow {
            alpha: alpha.to_string(),
            backend: out.backend_kind(),
            status: "ok",
            n: Some(n),
            elapsed_ms: Some(elapsed_ms),
            events_per_sec: Some(n as f64 / (elapsed_ms / 1e3).max(f64::MIN_POSITIVE)),
            final_numerator_digits: out.final_numerator_digits(),
        }
    }

    pub fn skipped(alpha: MassRatio, backend: BackendKind) -> Self {
        BenchRow {
            alpha: alpha.to_string(),
            backend,
            status: "skipped (cutoff)",
            n: None,
            elapsed_ms: None,
            events_per_sec: None,
            final_numerator_digits: None,
        }
    }
}

pub fn write_bench_text<W: Write>(out: &mut W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(
        out,
        "{:<16} {:<8} {:>9} {:>11} {:>14} {:>8}",
        "alpha", "backend", "N", "ms", "events/s", "digits"
    )?;
    for r in rows {
        let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{:<16} {:<8} {:>9} {:>11} {:>14} {:>8}",
            r.alpha,
            r.backend.to_string(),
            opt(r.n.map(|n| n.to_string())),
            opt(r.elapsed_ms.map(|m| format!("{m:.3}"))),
            opt(r.events_per_sec.map(|e| format!("{e:.0}"))),
            opt(r.final_numerator_digits.map(|d| d.to_string())),
        )?;
        if r.n.is_none() {
            writeln!(out, "{:>16} {}", "", r.status)?;
        }
    }
    Ok(())
}

fn rotation_theta(ratio: MassRatio) -> f64 {
    galperin_core::rotation_angle(&ratio).map_or(f64::NAN, |m| m.theta)
}
