//! Continuous transitivity measures: ρ of a subset is the product of all its
//! pairwise correlations. Its sign is Φ, its magnitude says how strongly the
//! subset is transitive or frustrated.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::hierarchy::SectorSubset;
use crate::ingest::WindowId;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureValue<T> {
    pub window: WindowId,
    pub subset: SectorSubset,
    pub rho_n: T,
}

/// Product of the pairwise correlations of `s`, largest magnitudes first.
pub fn rho_measure<T: Scalar>(cm: &CorrelationMatrix<T>, s: &SectorSubset) -> Result<MeasureValue<T>> {
    let members = s.members();
    if members.last().is_some_and(|&x| x >= cm.len()) {
        return Err(Error::Validation(format!(
            "subset {members:?} has a sector outside the {}-sector matrix",
            cm.len()
        )));
    }
    let mut factors: Vec<T> = Vec::with_capacity(members.len() * (members.len() - 1) / 2);
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            factors.push(cm.get(i, j));
        }
    }
    factors.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).expect("finite correlations"));
    let rho_n = factors.into_iter().fold(T::one(), |acc, r| acc * r);
    Ok(MeasureValue {
        window: cm.window(),
        subset: s.clone(),
        rho_n,
    })
}

/// Measure of one subset across windows, ordered by y coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchySeries<T> {
    pub subset: SectorSubset,
    /// Member names joined with `+`.
    pub label: String,
    pub level: usize,
    pub points: Vec<(f64, T)>,
}

impl<T: Scalar> HierarchySeries<T> {
    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn values(&self) -> Vec<T> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn value_at(&self, y: f64) -> Option<T> {
        self.points.iter().find(|p| p.0 == y).map(|p| p.1)
    }

    pub fn max_abs(&self) -> T {
        self.points.iter().fold(T::zero(), |m, p| m.max(p.1.abs()))
    }
}

/// Checks the windows share a sector list and returns them ordered by y.
fn ordered_windows<T: Scalar>(windows: &[CorrelationMatrix<T>]) -> Result<Vec<&CorrelationMatrix<T>>> {
    let first = windows
        .first()
        .ok_or_else(|| Error::InsufficientData("no windows".into()))?;
    if let Some(bad) = windows.iter().find(|w| w.sectors() != first.sectors()) {
        return Err(Error::Validation(format!(
            "window {} has sectors {:?}, expected {:?}",
            bad.window(),
            bad.sectors(),
            first.sectors()
        )));
    }
    let mut ordered: Vec<&CorrelationMatrix<T>> = windows.iter().collect();
    ordered.sort_by_key(|w| w.window());
    if let Some(pair) = ordered.windows(2).find(|p| p[0].window() == p[1].window()) {
        return Err(Error::Validation(format!("window {} given twice", pair[0].window())));
    }
    Ok(ordered)
}

fn series_for<T: Scalar>(ordered: &[&CorrelationMatrix<T>], s: SectorSubset) -> Result<HierarchySeries<T>> {
    let points = ordered
        .iter()
        .map(|cm| Ok((cm.window().y_coordinate(), rho_measure(cm, &s)?.rho_n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HierarchySeries {
        label: s.label(ordered[0].sectors()),
        level: s.len(),
        subset: s,
        points,
    })
}

/// One series per k-subset, in lexicographic subset order.
pub fn hierarchy_series<T: Scalar>(windows: &[CorrelationMatrix<T>], k: usize) -> Result<Vec<HierarchySeries<T>>> {
    let ordered = ordered_windows(windows)?;
    let m = ordered[0].len();
    if k < 2 || k > m {
        return Err(Error::Validation(format!("level {k} outside 2..={m}")));
    }
    SectorSubset::all_of_size(m, k)
        .map(|s| series_for(&ordered, s))
        .collect()
}

/// For each sector, the level-(m−1) series of the system without it.
pub fn leave_one_out<T: Scalar>(windows: &[CorrelationMatrix<T>]) -> Result<BTreeMap<String, HierarchySeries<T>>> {
    let ordered = ordered_windows(windows)?;
    let m = ordered[0].len();
    if m < 3 {
        return Err(Error::Validation(format!("leave-one-out needs at least 3 sectors, got {m}")));
    }
    let full = SectorSubset::full(m)?;
    ordered[0]
        .sectors()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let rest = full.without(i).expect("m >= 3");
            Ok((name.clone(), series_for(&ordered, rest)?))
        })
        .collect()
}

/// Multiplies `base` by `max|target| / max|base|` so both series are on a
/// comparable magnitude scale. A base that is identically zero is returned
/// unchanged.
pub fn scale_overlay<T: Scalar>(base: &HierarchySeries<T>, target: &HierarchySeries<T>) -> Result<HierarchySeries<T>> {
    if base.ys() != target.ys() {
        return Err(Error::Validation(format!(
            "series {} and {} are on different y grids",
            base.label, target.label
        )));
    }
    let factor = overlay_factor(base, target);
    Ok(HierarchySeries {
        points: base.points.iter().map(|&(y, v)| (y, v * factor)).collect(),
        ..base.clone()
    })
}

/// Scale factor applied by [`scale_overlay`].
pub fn overlay_factor<T: Scalar>(base: &HierarchySeries<T>, target: &HierarchySeries<T>) -> T {
    let b = base.max_abs();
    if b == T::zero() {
        T::one()
    } else {
        target.max_abs() / b
    }
}
