//! Loading, validating, aligning and windowing raw index series.
//!
//! Each sector arrives as its own `date,value` CSV file. Series are joined on
//! their common calendar dates (inner join by default, optional bounded
//! forward-fill) and the resulting panel is cut into calendar half-years.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum number of observations per window unless configured otherwise.
pub const DEFAULT_MIN_OBS: usize = 20;

/// Raw level series for one sector, sorted by date.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries<T> {
    pub sector: String,
    pub observations: Vec<(NaiveDate, T)>,
}

impl<T: Scalar> IndexSeries<T> {
    /// Builds a series from unordered observations, enforcing the series
    /// invariants: sorted, no duplicate dates, finite positive levels, and at
    /// least two observations.
    pub fn new(sector: impl Into<String>, mut observations: Vec<(NaiveDate, T)>) -> Result<Self> {
        let sector = sector.into();
        if sector.trim().is_empty() {
            return Err(Error::Validation("sector id must not be empty".into()));
        }
        for (date, level) in &observations {
            if !level.is_finite() {
                return Err(Error::InvalidData {
                    sector: sector.clone(),
                    message: format!("non-finite level on {date}"),
                });
            }
            if *level <= T::zero() {
                return Err(Error::InvalidData {
                    sector: sector.clone(),
                    message: format!("non-positive level {level} on {date}"),
                });
            }
        }
        observations.sort_by_key(|(d, _)| *d);
        if let Some(w) = observations.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateDate {
                sector,
                date: w[0].0,
            });
        }
        if observations.len() < 2 {
            return Err(Error::InvalidData {
                sector,
                message: format!("need at least 2 observations, got {}", observations.len()),
            });
        }
        Ok(IndexSeries {
            sector,
            observations,
        })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.observations.iter().map(|(d, _)| *d)
    }
}

/// Reads a `date,value` CSV file into a validated series.
pub fn load_series<T: Scalar>(path: impl AsRef<Path>, sector: &str) -> Result<IndexSeries<T>> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    parse_series(&text, sector, path)
}

/// Parses CSV text with a `date,value` header. `origin` labels parse errors.
pub fn parse_series<T: Scalar>(text: &str, sector: &str, origin: &Path) -> Result<IndexSeries<T>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let header = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let columns: Vec<&str> = header.1.split(',').map(|c| c.trim().trim_start_matches('\u{feff}')).collect();
    if columns != ["date", "value"] {
        return Err(parse_err(
            header.0,
            format!("expected header `date,value`, found `{}`", header.1),
        ));
    }

    let mut observations = Vec::new();
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (date, value) = match (fields.next(), fields.next(), fields.next()) {
            (Some(d), Some(v), None) => (d, v),
            _ => return Err(parse_err(line_no, format!("expected 2 fields in `{line}`"))),
        };
        let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|e| parse_err(line_no, format!("bad date `{date}`: {e}")))?;
        let value = value
            .parse::<T>()
            .map_err(|_| parse_err(line_no, format!("bad level `{value}`")))?;
        observations.push((date, value));
    }
    IndexSeries::new(sector, observations)
}

/// Date-aligned matrix of levels, one column per sector.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel<T> {
    sectors: Vec<String>,
    dates: Vec<NaiveDate>,
    /// Row-major, `dates.len() × sectors.len()`.
    values: Vec<T>,
}

impl<T: Scalar> AlignedPanel<T> {
    pub fn new(sectors: Vec<String>, dates: Vec<NaiveDate>, values: Vec<T>) -> Result<Self> {
        check_sector_ids(&sectors)?;
        if values.len() != dates.len() * sectors.len() {
            return Err(Error::Validation(format!(
                "panel shape mismatch: {} values for {} rows × {} sectors",
                values.len(),
                dates.len(),
                sectors.len()
            )));
        }
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("panel dates must be strictly increasing".into()));
        }
        Ok(AlignedPanel {
            sectors,
            dates,
            values,
        })
    }

    pub fn sectors(&self) -> &[String] {
        &self.sectors
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn n_rows(&self) -> usize {
        self.dates.len()
    }

    pub fn n_sectors(&self) -> usize {
        self.sectors.len()
    }

    pub fn value(&self, row: usize, col: usize) -> T {
        self.values[row * self.sectors.len() + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        let m = self.sectors.len();
        &self.values[row * m..(row + 1) * m]
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        (0..self.n_rows()).map(|r| self.value(r, col)).collect()
    }

    /// Rows `range` as a new panel with the same sectors.
    pub fn slice_rows(&self, range: std::ops::Range<usize>) -> Self {
        let m = self.sectors.len();
        AlignedPanel {
            sectors: self.sectors.clone(),
            dates: self.dates[range.clone()].to_vec(),
            values: self.values[range.start * m..range.end * m].to_vec(),
        }
    }

    /// Splits the panel back into per-sector series.
    pub fn to_series(&self) -> Vec<IndexSeries<T>> {
        self.sectors
            .iter()
            .enumerate()
            .map(|(j, s)| IndexSeries {
                sector: s.clone(),
                observations: self.dates.iter().copied().zip(self.column(j)).collect(),
            })
            .collect()
    }

    /// Log-returns `ln(v_t / v_{t-1})`, dated at `t`; drops the first row.
    pub fn log_returns(&self) -> Result<Self> {
        if self.n_rows() < 2 {
            return Err(Error::InsufficientData(
                "log-returns need at least 2 panel rows".into(),
            ));
        }
        let m = self.n_sectors();
        let mut values = Vec::with_capacity((self.n_rows() - 1) * m);
        for r in 1..self.n_rows() {
            for c in 0..m {
                values.push((self.value(r, c) / self.value(r - 1, c)).ln());
            }
        }
        Ok(AlignedPanel {
            sectors: self.sectors.clone(),
            dates: self.dates[1..].to_vec(),
            values,
        })
    }
}

fn check_sector_ids(sectors: &[String]) -> Result<()> {
    if sectors.len() < 3 {
        return Err(Error::Validation(format!(
            "at least 3 sectors required, got {}",
            sectors.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for s in sectors {
        if !seen.insert(s.as_str()) {
            return Err(Error::Validation(format!("duplicate sector id {s}")));
        }
    }
    Ok(())
}

/// How gaps between series are treated during alignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignOptions {
    /// Carry the last observation forward for at most this many calendar days.
    /// `None` means a strict inner join.
    pub forward_fill_days: Option<u32>,
}

/// Forward-fill gap used when the fill flag is switched on.
pub const FORWARD_FILL_MAX_GAP_DAYS: u32 = 5;

/// Inner-joins the series on their common dates. Column order follows input order.
pub fn align<T: Scalar>(series: &[IndexSeries<T>]) -> Result<AlignedPanel<T>> {
    align_with(series, AlignOptions::default())
}

pub fn align_with<T: Scalar>(series: &[IndexSeries<T>], opts: AlignOptions) -> Result<AlignedPanel<T>> {
    let sectors: Vec<String> = series.iter().map(|s| s.sector.clone()).collect();
    check_sector_ids(&sectors)?;
    let lookups: Vec<BTreeMap<NaiveDate, T>> = series
        .iter()
        .map(|s| s.observations.iter().copied().collect())
        .collect();

    let mut dates = Vec::new();
    let mut values = Vec::new();
    match opts.forward_fill_days {
        None => {
            let mut common: BTreeSet<NaiveDate> = series[0].dates().collect();
            for s in &series[1..] {
                let other: BTreeSet<NaiveDate> = s.dates().collect();
                common = common.intersection(&other).copied().collect();
            }
            for d in common {
                dates.push(d);
                values.extend(lookups.iter().map(|l| l[&d]));
            }
        }
        Some(max_gap) => {
            let start = series
                .iter()
                .filter_map(|s| s.observations.first().map(|o| o.0))
                .max();
            let all: BTreeSet<NaiveDate> = series.iter().flat_map(|s| s.dates()).collect();
            for d in all.into_iter().filter(|d| Some(*d) >= start) {
                let row: Option<Vec<T>> = lookups
                    .iter()
                    .map(|l| {
                        l.range(..=d).next_back().and_then(|(obs_date, v)| {
                            let gap = (d - *obs_date).num_days();
                            (gap <= i64::from(max_gap)).then_some(*v)
                        })
                    })
                    .collect();
                if let Some(row) = row {
                    dates.push(d);
                    values.extend(row);
                }
            }
        }
    }
    if dates.is_empty() {
        return Err(Error::Alignment(format!(
            "series {} share no common dates",
            sectors.join(", ")
        )));
    }
    AlignedPanel::new(sectors, dates, values)
}

/// Calendar half-year a window covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "WindowRecord", try_from = "WindowRecord")]
pub struct WindowId {
    year: i32,
    half: u8,
}

impl WindowId {
    pub fn new(year: i32, half: u8) -> Result<Self> {
        if half != 1 && half != 2 {
            return Err(Error::Validation(format!("half must be 1 or 2, got {half}")));
        }
        Ok(WindowId { year, half })
    }

    /// Window containing `date`: Jan 1–Jun 30 is half 1, Jul 1–Dec 31 half 2.
    pub fn containing(date: NaiveDate) -> Self {
        WindowId {
            year: date.year(),
            half: if date.month() <= 6 { 1 } else { 2 },
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn half(&self) -> u8 {
        self.half
    }

    /// `Y = year − 1900`, plus 0.5 for the second half.
    pub fn y_coordinate(&self) -> f64 {
        f64::from(self.year - 1900) + if self.half == 2 { 0.5 } else { 0.0 }
    }

    pub fn from_y_coordinate(y: f64) -> Result<Self> {
        let doubled = y * 2.0;
        if !doubled.is_finite() || doubled.fract() != 0.0 {
            return Err(Error::Validation(format!(
                "y coordinate {y} is not on the half-year grid"
            )));
        }
        let doubled = doubled as i64;
        let year = 1900 + doubled.div_euclid(2);
        let half = if doubled.rem_euclid(2) == 0 { 1 } else { 2 };
        let year = i32::try_from(year)
            .map_err(|_| Error::Validation(format!("y coordinate {y} out of range")))?;
        WindowId::new(year, half)
    }

    /// Inclusive first and last calendar dates of the window.
    pub fn date_range(&self) -> (NaiveDate, NaiveDate) {
        let (start, end) = if self.half == 1 {
            ((1, 1), (6, 30))
        } else {
            ((7, 1), (12, 31))
        };
        (
            NaiveDate::from_ymd_opt(self.year, start.0, start.1).expect("valid calendar date"),
            NaiveDate::from_ymd_opt(self.year, end.0, end.1).expect("valid calendar date"),
        )
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        let (a, b) = self.date_range();
        a <= date && date <= b
    }

    /// Short label such as `1987H2`.
    pub fn label(&self) -> String {
        format!("{}H{}", self.year, self.half)
    }
}

#[derive(Serialize, Deserialize)]
struct WindowRecord {
    year: i32,
    half: u8,
    y: f64,
}

impl From<WindowId> for WindowRecord {
    fn from(w: WindowId) -> Self {
        WindowRecord {
            year: w.year,
            half: w.half,
            y: w.y_coordinate(),
        }
    }
}

impl TryFrom<WindowRecord> for WindowId {
    type Error = Error;

    fn try_from(r: WindowRecord) -> Result<Self> {
        let w = WindowId::new(r.year, r.half)?;
        if w.y_coordinate() != r.y {
            return Err(Error::Validation(format!("y {} does not match {w}", r.y)));
        }
        Ok(w)
    }
}

impl std::fmt::Display for WindowId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// A panel restricted to one half-year window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPanel<T> {
    pub window: WindowId,
    pub panel: AlignedPanel<T>,
}

/// A window dropped because it held fewer than `min_obs` rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedWindow {
    pub window: WindowId,
    pub rows: usize,
    pub min_obs: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowPartition<T> {
    pub windows: Vec<WindowPanel<T>>,
    pub skipped: Vec<SkippedWindow>,
}

/// Cuts the panel into calendar half-years, dropping windows shorter than `min_obs`.
pub fn partition_windows<T: Scalar>(panel: &AlignedPanel<T>, min_obs: usize) -> WindowPartition<T> {
    let mut windows = Vec::new();
    let mut skipped = Vec::new();
    let dates = panel.dates();
    let mut start = 0;
    while start < dates.len() {
        let window = WindowId::containing(dates[start]);
        let end = start
            + dates[start..]
                .iter()
                .take_while(|d| window.contains(**d))
                .count();
        let rows = end - start;
        if rows >= min_obs {
            windows.push(WindowPanel {
                window,
                panel: panel.slice_rows(start..end),
            });
        } else {
            skipped.push(SkippedWindow {
                window,
                rows,
                min_obs,
                reason: format!("{rows} observations < min_obs {min_obs}"),
            });
        }
        start = end;
    }
    WindowPartition { windows, skipped }
}
