//! End-to-end run: load → align → window → correlate → relations → hierarchy
//! → measures → analysis, writing every artifact under the output directory.
//!
//! Output layout (relative to the output directory):
//!
//! ```text
//! manifest.json
//! windows/<YYYY>H<h>/correlation.csv   signs.csv   decomposition.json   hierarchy.json
//! series/rho_R<m>.{csv,json}           series/leave_one_out.{csv,json}
//! plot/rho_R<m>.dat                    plot/rho_R<m-1>_without_<ID>.dat
//! plot/rho_R<m>_scaled_for_<ID>.dat
//! trends.{csv,json}                    reactions.{csv,json}
//! ```
//!
//! All files are written in a fixed order with fixed formatting, so equal
//! inputs give byte-identical outputs. Timings stay in memory only.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::analysis::{envelope_trend, sector_reaction_report, ReactionEvent, TrendLine};
use crate::config::{ReturnsMode, RunConfig};
use crate::correlation::{corr_matrix, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::format::{sig6, y_coord};
use crate::hierarchy::{hierarchy_dump, MAX_SECTORS};
use crate::ingest::{
    align_with, load_series, partition_windows, AlignOptions, AlignedPanel, SkippedWindow, WindowId,
    WindowPartition, FORWARD_FILL_MAX_GAP_DAYS,
};
use crate::measures::{hierarchy_series, leave_one_out, scale_overlay, HierarchySeries};
use crate::relations::{decompose, preorder_cover, sign_matrix, Plaquette, PlaquetteDecomposition, Sign, SignMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneratePairRecord {
    pub a: String,
    pub b: String,
    pub rho: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowDiagnostics {
    pub window: WindowId,
    pub rows: usize,
    pub degenerate_pairs: Vec<DegeneratePairRecord>,
}

/// Record of one run: configuration echo, diagnostics and written artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub panel_rows: usize,
    pub windows: Vec<WindowDiagnostics>,
    pub skipped_windows: Vec<SkippedWindow>,
    /// Analysis steps that could not run on this data, with the reason.
    pub notes: Vec<String>,
    /// Paths relative to the output directory, in write order.
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

/// Loaded, aligned and windowed input of a run.
pub struct PreparedInput {
    pub panel: AlignedPanel<f64>,
    pub partition: WindowPartition<f64>,
}

/// Load, align, optionally transform, and window the configured series.
pub fn prepare_input(config: &RunConfig) -> Result<PreparedInput> {
    config.validate()?;
    let series = config
        .sectors
        .iter()
        .map(|s| load_series::<f64>(&s.path, &s.id).map_err(|e| e.context(format!("sector {}", s.id))))
        .collect::<Result<Vec<_>>>()?;
    let opts = AlignOptions {
        forward_fill_days: config.forward_fill.then_some(FORWARD_FILL_MAX_GAP_DAYS),
    };
    let mut panel = align_with(&series, opts)?;
    if config.returns == ReturnsMode::Log {
        panel = panel.log_returns()?;
    }
    let partition = partition_windows(&panel, config.min_obs);
    Ok(PreparedInput { panel, partition })
}

/// Per-window results kept for series construction.
struct WindowResult {
    matrix: CorrelationMatrix<f64>,
}

struct Writer {
    root: PathBuf,
    artifacts: Vec<String>,
}

impl Writer {
    fn write(&mut self, rel: &str, contents: &str) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, contents).map_err(|source| Error::Io { path, source })?;
        self.artifacts.push(rel.to_string());
        Ok(())
    }

    fn write_json<V: Serialize>(&mut self, rel: &str, value: &V) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable output");
        text.push('\n');
        self.write(rel, &text)
    }
}

#[derive(Serialize)]
struct DecompositionReport<'a> {
    window: WindowId,
    sectors: &'a [String],
    transitive: Vec<[&'a str; 3]>,
    frustrated: Vec<[&'a str; 3]>,
    degenerate: Vec<[&'a str; 3]>,
    preorder_cover: bool,
}

fn decomposition_report(dec: &PlaquetteDecomposition) -> DecompositionReport<'_> {
    let names = |v: &[Plaquette]| v.iter().map(|p| p.names(&dec.sectors)).collect();
    DecompositionReport {
        window: dec.window,
        sectors: &dec.sectors,
        transitive: names(&dec.transitive),
        frustrated: names(&dec.frustrated),
        degenerate: names(&dec.degenerate),
        preorder_cover: preorder_cover(dec, &dec.sectors),
    }
}

fn signs_csv(sm: &SignMatrix) -> String {
    let mut out = String::from("sector");
    for s in sm.sectors() {
        let _ = write!(out, ",{s}");
    }
    out.push('\n');
    for (i, s) in sm.sectors().iter().enumerate() {
        out.push_str(s);
        for j in 0..sm.len() {
            let v = if i == j { 1 } else { sm.get(i, j).map_or(0, Sign::value) };
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct SeriesPoint {
    y: f64,
    rho_n: f64,
}

#[derive(Serialize)]
struct SeriesRecord<'a> {
    label: &'a str,
    members: Vec<String>,
    level: usize,
    points: Vec<SeriesPoint>,
}

fn series_record<'a>(s: &'a HierarchySeries<f64>, sectors: &[String]) -> SeriesRecord<'a> {
    SeriesRecord {
        label: &s.label,
        members: s.subset.names(sectors),
        level: s.level,
        points: s.points.iter().map(|&(y, rho_n)| SeriesPoint { y, rho_n }).collect(),
    }
}

fn series_csv<'a>(series: impl IntoIterator<Item = &'a HierarchySeries<f64>>) -> String {
    let mut out = String::from("y,subset,level,rho_n\n");
    for s in series {
        for &(y, v) in &s.points {
            let _ = writeln!(out, "{},{},{},{}", y_coord(y), s.label, s.level, sig6(v));
        }
    }
    out
}

fn plot_dat(title: &str, s: &HierarchySeries<f64>) -> String {
    let mut out = format!("# {title}\n# y rho_n\n");
    for &(y, v) in &s.points {
        let _ = writeln!(out, "{} {}", y_coord(y), sig6(v));
    }
    out
}

#[derive(Serialize)]
struct TrendRecord {
    series: String,
    side: &'static str,
    slope: f64,
    intercept: f64,
}

fn side_name(side: Sign) -> &'static str {
    match side {
        Sign::Plus => "positive",
        Sign::Minus => "negative",
    }
}

/// Executes the full pipeline and writes every artifact under `config.out_dir`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunManifest> {
    let mut timings = Vec::new();
    let t0 = Instant::now();
    let input = prepare_input(config)?;
    timings.push(("ingest".to_string(), t0.elapsed()));
    let m = input.panel.n_sectors();
    if m > MAX_SECTORS {
        return Err(Error::Validation(format!("{m} sectors exceed the supported maximum of {MAX_SECTORS}")));
    }
    if input.partition.windows.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no window has at least {} observations",
            config.min_obs
        )));
    }

    let mut writer = Writer {
        root: config.out_dir.clone(),
        artifacts: Vec::new(),
    };
    let mut notes = Vec::new();
    let mut diagnostics = Vec::new();
    let mut results = Vec::new();
    let zero_tol = config.zero_tol;

    let t1 = Instant::now();
    for wp in &input.partition.windows {
        let label = wp.window.label();
        let ctx = |e: Error| e.context(format!("window {label}"));
        let matrix = corr_matrix(wp).map_err(ctx)?;
        let sm = sign_matrix(&matrix, zero_tol);
        let dec = decompose(&sm);
        let dump = hierarchy_dump(&sm).map_err(ctx)?;

        let degenerate_pairs = sm
            .zero_pairs()
            .iter()
            .map(|&(i, j)| DegeneratePairRecord {
                a: sm.sectors()[i].clone(),
                b: sm.sectors()[j].clone(),
                rho: matrix.get(i, j),
                reason: format!("|rho| <= zero_tol {zero_tol}"),
            })
            .collect();
        diagnostics.push(WindowDiagnostics {
            window: wp.window,
            rows: wp.panel.n_rows(),
            degenerate_pairs,
        });

        let dir = format!("windows/{label}");
        writer.write(&format!("{dir}/correlation.csv"), &matrix.to_csv())?;
        writer.write(&format!("{dir}/signs.csv"), &signs_csv(&sm))?;
        writer.write_json(&format!("{dir}/decomposition.json"), &decomposition_report(&dec))?;
        writer.write_json(&format!("{dir}/hierarchy.json"), &dump)?;
        results.push(WindowResult { matrix });
    }
    timings.push(("windows".to_string(), t1.elapsed()));

    let t2 = Instant::now();
    let matrices: Vec<CorrelationMatrix<f64>> = results.into_iter().map(|r| r.matrix).collect();
    let sectors = input.panel.sectors().to_vec();
    let full = hierarchy_series(&matrices, m)?.pop().expect("one full-system series");
    let loo = leave_one_out(&matrices)?;
    let top = format!("rho_R{m}");
    let reduced = format!("rho_R{}", m - 1);

    if config.format.csv() {
        writer.write(&format!("series/{top}.csv"), &series_csv([&full]))?;
        writer.write("series/leave_one_out.csv", &series_csv(loo.values()))?;
    }
    if config.format.json() {
        writer.write_json(&format!("series/{top}.json"), &series_record(&full, &sectors))?;
        let records: Vec<SeriesRecord> = loo.values().map(|s| series_record(s, &sectors)).collect();
        writer.write_json("series/leave_one_out.json", &records)?;
    }

    writer.write(&format!("plot/{top}.dat"), &plot_dat(&format!("{top} of {}", full.label), &full))?;
    for (id, s) in &loo {
        writer.write(
            &format!("plot/{reduced}_without_{id}.dat"),
            &plot_dat(&format!("{reduced} without {id}"), s),
        )?;
        let scaled = scale_overlay(&full, s)?;
        writer.write(
            &format!("plot/{top}_scaled_for_{id}.dat"),
            &plot_dat(&format!("{top} scaled to {reduced} without {id}"), &scaled),
        )?;
    }

    let mut trends = Vec::new();
    let named: Vec<(String, &HierarchySeries<f64>)> = std::iter::once((top.clone(), &full))
        .chain(loo.iter().map(|(id, s)| (format!("{reduced}_without_{id}"), s)))
        .collect();
    for (name, s) in &named {
        for side in [Sign::Plus, Sign::Minus] {
            match envelope_trend(s, side) {
                Ok(TrendLine { slope, intercept, .. }) => trends.push(TrendRecord {
                    series: name.clone(),
                    side: side_name(side),
                    slope,
                    intercept,
                }),
                Err(e) => notes.push(format!("{} envelope of {name} skipped: {e}", side_name(side))),
            }
        }
    }
    if config.format.csv() {
        let mut csv = String::from("series,side,slope,intercept\n");
        for t in &trends {
            let _ = writeln!(csv, "{},{},{},{}", t.series, t.side, sig6(t.slope), sig6(t.intercept));
        }
        writer.write("trends.csv", &csv)?;
    }
    if config.format.json() {
        writer.write_json("trends.json", &trends)?;
    }

    let events: Vec<ReactionEvent> = if full.points.len() >= 3 {
        sector_reaction_report(&full, &loo, config.eps_frac, config.pick_frac)?
    } else {
        notes.push(format!(
            "reaction analysis skipped: {} window(s), pick detection needs 3",
            full.points.len()
        ));
        Vec::new()
    };
    if config.format.csv() {
        let mut csv = String::from("sector,y,before,after,reaction\n");
        for e in &events {
            let _ = writeln!(csv, "{},{},{},{},{}", e.sector, y_coord(e.y), e.before, e.after, e.reaction);
        }
        writer.write("reactions.csv", &csv)?;
    }
    if config.format.json() {
        writer.write_json("reactions.json", &events)?;
    }
    timings.push(("series".to_string(), t2.elapsed()));

    let mut manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        panel_rows: input.panel.n_rows(),
        windows: diagnostics,
        skipped_windows: input.partition.skipped.clone(),
        notes,
        artifacts: Vec::new(),
        timings,
    };
    writer.artifacts.push("manifest.json".to_string());
    manifest.artifacts = writer.artifacts.clone();
    let mut text = serde_json::to_string_pretty(&manifest).expect("serializable manifest");
    text.push('\n');
    let path = config.out_dir.join("manifest.json");
    fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
    Ok(manifest)
}

/// Input-stage summary printed by `ingest-check`.
#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub sectors: Vec<String>,
    pub rows: usize,
    pub first_date: String,
    pub last_date: String,
    pub windows: Vec<(WindowId, usize)>,
    pub skipped_windows: Vec<SkippedWindow>,
}

pub fn ingest_check(config: &RunConfig) -> Result<IngestSummary> {
    let input = prepare_input(config)?;
    let dates = input.panel.dates();
    Ok(IngestSummary {
        sectors: input.panel.sectors().to_vec(),
        rows: input.panel.n_rows(),
        first_date: dates.first().map(|d| d.to_string()).unwrap_or_default(),
        last_date: dates.last().map(|d| d.to_string()).unwrap_or_default(),
        windows: input
            .partition
            .windows
            .iter()
            .map(|w| (w.window, w.panel.n_rows()))
            .collect(),
        skipped_windows: input.partition.skipped,
    })
}

/// Human-readable summary of a finished run directory.
pub fn summarize_run(out_dir: &Path) -> Result<String> {
    let read = |rel: &str| -> Result<serde_json::Value> {
        let path = out_dir.join(rel);
        let text = fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path,
            line: e.line(),
            message: e.to_string(),
        })
    };
    let manifest = read("manifest.json")?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {}: {} windows, {} skipped, {} artifacts",
        manifest["tool"].as_str().unwrap_or("?"),
        manifest["version"].as_str().unwrap_or("?"),
        manifest["windows"].as_array().map_or(0, Vec::len),
        manifest["skipped_windows"].as_array().map_or(0, Vec::len),
        manifest["artifacts"].as_array().map_or(0, Vec::len),
    );
    for note in manifest["notes"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "note: {}", note.as_str().unwrap_or(""));
    }
    let artifacts: Vec<&str> = manifest["artifacts"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|a| a.as_str())
        .collect();

    let mut by_window: BTreeMap<String, (usize, usize, bool)> = BTreeMap::new();
    for a in artifacts.iter().filter(|a| a.ends_with("decomposition.json")) {
        let d = read(a)?;
        let label = a.trim_start_matches("windows/").trim_end_matches("/decomposition.json");
        by_window.insert(
            label.to_string(),
            (
                d["transitive"].as_array().map_or(0, Vec::len),
                d["frustrated"].as_array().map_or(0, Vec::len),
                d["preorder_cover"].as_bool().unwrap_or(false),
            ),
        );
    }
    let _ = writeln!(out, "\nwindow   |V_T| |V_F| cover");
    for (w, (t, f, c)) in &by_window {
        let _ = writeln!(out, "{w:<8} {t:>5} {f:>5} {c}");
    }

    if let Some(top) = artifacts.iter().find(|a| a.starts_with("series/rho_R") && a.ends_with(".json")) {
        let s = read(top)?;
        let _ = writeln!(out, "\n{} ({})", top.trim_start_matches("series/").trim_end_matches(".json"), s["label"].as_str().unwrap_or(""));
        for p in s["points"].as_array().into_iter().flatten() {
            let _ = writeln!(
                out,
                "  {} {}",
                y_coord(p["y"].as_f64().unwrap_or(f64::NAN)),
                sig6(p["rho_n"].as_f64().unwrap_or(f64::NAN))
            );
        }
    }
    if artifacts.contains(&"reactions.json") {
        let events = read("reactions.json")?;
        let _ = writeln!(out, "\nreactions:");
        for e in events.as_array().into_iter().flatten() {
            let _ = writeln!(
                out,
                "  {:<5} y={} {}->{}  {} ({})",
                e["sector"].as_str().unwrap_or(""),
                y_coord(e["y"].as_f64().unwrap_or(f64::NAN)),
                e["before"].as_str().unwrap_or(""),
                e["after"].as_str().unwrap_or(""),
                e["reaction"].as_str().unwrap_or(""),
                e["interpretation"].as_str().unwrap_or(""),
            );
        }
    }
    Ok(out)
}
