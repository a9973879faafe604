//! Pearson correlation matrices and least-squares line fits per window.
//!
//! Covariances use the two-pass (mean-subtracted) algorithm. The sample vs.
//! population normalization cancels in ρ, so none is applied at all.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{WindowId, WindowPanel};
use crate::scalar::Scalar;

/// Centered second moments of a pair of vectors.
struct Moments<T> {
    mean_x: T,
    mean_y: T,
    sxx: T,
    syy: T,
    sxy: T,
}

fn moments<T: Scalar>(x: &[T], y: &[T]) -> Result<Moments<T>> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 observations, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite value in input".into()));
    }
    let n = T::from_usize(x.len()).expect("length representable");
    let mean = |v: &[T]| v.iter().fold(T::zero(), |acc, &a| acc + a) / n;
    let (mean_x, mean_y) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
        sxy = sxy + dx * dy;
    }
    Ok(Moments {
        mean_x,
        mean_y,
        sxx,
        syy,
        sxy,
    })
}

/// Sample Pearson coefficient, clamped to [−1, 1].
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    let m = moments(x, y)?;
    if m.sxx <= T::zero() || m.syy <= T::zero() {
        return Err(Error::DegenerateVariance(
            "zero variance in correlation input".into(),
        ));
    }
    let r = m.sxy / (m.sxx * m.syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// Symmetric correlation matrix of one window, unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix<T> {
    window: WindowId,
    sectors: Vec<String>,
    /// Row-major m × m.
    rho: Vec<T>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    /// Builds a matrix from off-diagonal entries given as `(a, b, ρ)`; every
    /// unordered pair must appear exactly once, in either orientation.
    pub fn from_pairs(window: WindowId, sectors: Vec<String>, pairs: &[(&str, &str, T)]) -> Result<Self> {
        let m = sectors.len();
        let index = |name: &str| {
            sectors
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::Validation(format!("unknown sector {name}")))
        };
        let mut rho = vec![T::nan(); m * m];
        for i in 0..m {
            rho[i * m + i] = T::one();
        }
        for &(a, b, r) in pairs {
            let (i, j) = (index(a)?, index(b)?);
            if i == j {
                return Err(Error::Validation(format!("diagonal entry {a},{b} given")));
            }
            if !rho[i * m + j].is_nan() {
                return Err(Error::Validation(format!("pair {a},{b} given twice")));
            }
            rho[i * m + j] = r;
            rho[j * m + i] = r;
        }
        Self::from_dense(window, sectors, rho)
    }

    /// Builds a matrix from a dense row-major array, checking the invariants
    /// and clamping entries that overshoot ±1 by at most 1e-12.
    pub fn from_dense(window: WindowId, sectors: Vec<String>, mut rho: Vec<T>) -> Result<Self> {
        let m = sectors.len();
        if rho.len() != m * m {
            return Err(Error::Validation(format!(
                "expected {} entries for {m} sectors, got {}",
                m * m,
                rho.len()
            )));
        }
        let tol = T::from_f64_lossy(1e-12);
        for i in 0..m {
            for j in 0..m {
                let v = rho[i * m + j];
                if v.is_nan() {
                    return Err(Error::Validation(format!(
                        "missing correlation for {}, {}",
                        sectors[i], sectors[j]
                    )));
                }
                if v.abs() > T::one() + tol {
                    return Err(Error::Validation(format!(
                        "correlation {v} for {}, {} outside [-1, 1]",
                        sectors[i], sectors[j]
                    )));
                }
                if (v - rho[j * m + i]).abs() > tol {
                    return Err(Error::Validation(format!(
                        "asymmetric entries for {}, {}",
                        sectors[i], sectors[j]
                    )));
                }
            }
            if rho[i * m + i] != T::one() {
                return Err(Error::Validation(format!("diagonal of {} is not 1", sectors[i])));
            }
        }
        for i in 0..m {
            for j in 0..i {
                let v = rho[i * m + j].max(-T::one()).min(T::one());
                rho[i * m + j] = v;
                rho[j * m + i] = v;
            }
        }
        Ok(CorrelationMatrix { window, sectors, rho })
    }

    pub fn window(&self) -> WindowId {
        self.window
    }

    pub fn sectors(&self) -> &[String] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rho[i * self.sectors.len() + j]
    }

    pub fn index_of(&self, sector: &str) -> Option<usize> {
        self.sectors.iter().position(|s| s == sector)
    }

    /// Correlation between two named sectors.
    pub fn between(&self, a: &str, b: &str) -> Result<T> {
        let i = self
            .index_of(a)
            .ok_or_else(|| Error::Validation(format!("unknown sector {a}")))?;
        let j = self
            .index_of(b)
            .ok_or_else(|| Error::Validation(format!("unknown sector {b}")))?;
        Ok(self.get(i, j))
    }

    /// CSV dump: header row and column of sector ids, 6 decimal places.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sector");
        for s in &self.sectors {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (i, s) in self.sectors.iter().enumerate() {
            out.push_str(s);
            for j in 0..self.sectors.len() {
                let _ = write!(out, ",{:.6}", self.get(i, j).to_f64_lossy());
            }
            out.push('\n');
        }
        out
    }
}

/// Correlation matrix of every column pair in the window.
pub fn corr_matrix<T: Scalar>(wp: &WindowPanel<T>) -> Result<CorrelationMatrix<T>> {
    let panel = &wp.panel;
    let m = panel.n_sectors();
    let columns: Vec<Vec<T>> = (0..m).map(|j| panel.column(j)).collect();
    for (j, col) in columns.iter().enumerate() {
        let mo = moments(col, col)?;
        if mo.sxx <= T::zero() {
            return Err(Error::DegenerateVariance(format!(
                "sector {} is constant in window {}",
                panel.sectors()[j],
                wp.window
            )));
        }
    }
    let mut rho = vec![T::one(); m * m];
    for i in 0..m {
        for j in 0..i {
            let r = pearson(&columns[i], &columns[j]).map_err(|e| {
                e.context(format!(
                    "{} vs {} in window {}",
                    panel.sectors()[i],
                    panel.sectors()[j],
                    wp.window
                ))
            })?;
            rho[i * m + j] = r;
            rho[j * m + i] = r;
        }
    }
    Ok(CorrelationMatrix {
        window: wp.window,
        sectors: panel.sectors().to_vec(),
        rho,
    })
}

/// Straight line `y = slope · x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> LinearFit<T> {
    pub fn identity() -> Self {
        LinearFit {
            slope: T::one(),
            intercept: T::zero(),
        }
    }

    pub fn eval(&self, x: T) -> T {
        self.slope * x + self.intercept
    }
}

/// Least-squares regression of `y` on `x`. Same preconditions as [`pearson`],
/// so the slope sign always matches the correlation sign.
pub fn ls_fit<T: Scalar>(x: &[T], y: &[T]) -> Result<LinearFit<T>> {
    let m = moments(x, y)?;
    if m.sxx <= T::zero() || m.syy <= T::zero() {
        return Err(Error::DegenerateVariance(
            "zero variance in regression input".into(),
        ));
    }
    Ok(line_from_moments(&m))
}

/// Least-squares line needing only a non-constant regressor; `y` may be constant.
pub fn fit_line<T: Scalar>(x: &[T], y: &[T]) -> Result<LinearFit<T>> {
    let m = moments(x, y)?;
    if m.sxx <= T::zero() {
        return Err(Error::DegenerateVariance("regressor is constant".into()));
    }
    Ok(line_from_moments(&m))
}

fn line_from_moments<T: Scalar>(m: &Moments<T>) -> LinearFit<T> {
    let slope = m.sxy / m.sxx;
    LinearFit {
        slope,
        intercept: m.mean_y - slope * m.mean_x,
    }
}

/// Substitutes `y = f1(x)` into `z = f2(y)`, giving `z` as a line in `x`.
pub fn compose_fits<T: Scalar>(f1: LinearFit<T>, f2: LinearFit<T>) -> LinearFit<T> {
    LinearFit {
        slope: f1.slope * f2.slope,
        intercept: f1.intercept * f2.slope + f2.intercept,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::AlignedPanel;
    use chrono::NaiveDate;

    fn panel(cols: &[Vec<f64>]) -> WindowPanel<f64> {
        let n = cols[0].len();
        let start = NaiveDate::from_ymd_opt(1987, 7, 1).unwrap();
        let dates = (0..n).map(|i| start + chrono::Days::new(i as u64)).collect();
        let sectors = (0..cols.len()).map(|j| format!("S{j}")).collect();
        let values = (0..n).flat_map(|r| cols.iter().map(move |c| c[r])).collect();
        WindowPanel {
            window: WindowId::new(1987, 2).unwrap(),
            panel: AlignedPanel::new(sectors, dates, values).unwrap(),
        }
    }

    #[test]
    fn exact_linear_dependence() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(pearson(&[1.0f32, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            Error::DegenerateVariance(_)
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn linear_columns_matrix() {
        let t: Vec<f64> = (1..=10).map(f64::from).collect();
        let wp = panel(&[
            t.clone(),
            t.iter().map(|v| 2.0 * v).collect(),
            t.iter().map(|v| 100.0 - v).collect(),
        ]);
        let cm = corr_matrix(&wp).unwrap();
        assert_eq!(cm.get(0, 1), 1.0);
        assert_eq!(cm.get(0, 2), -1.0);
        assert_eq!(cm.get(1, 2), -1.0);
        assert_eq!(cm.get(2, 1), -1.0);
        assert_eq!(cm.get(1, 1), 1.0);
    }

    #[test]
    fn degenerate_column_names_sector() {
        let wp = panel(&[vec![1.0, 2.0, 3.0], vec![5.0, 5.0, 5.0], vec![3.0, 1.0, 2.0]]);
        let msg = corr_matrix(&wp).unwrap_err().to_string();
        assert!(msg.contains("S1"), "{msg}");
    }

    #[test]
    fn exact_line_fit() {
        let f = ls_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_eq!(f.slope, 2.0);
        assert_eq!(f.intercept, 1.0);
        assert!(ls_fit(&[0.0, 1.0, 2.0], &[4.0, 4.0, 4.0]).is_err());
        let flat = fit_line(&[0.0, 1.0, 2.0], &[4.0, 4.0, 4.0]).unwrap();
        assert_eq!((flat.slope, flat.intercept), (0.0, 4.0));
    }

    #[test]
    fn composition() {
        let c = compose_fits(
            LinearFit { slope: 2.0, intercept: 1.0 },
            LinearFit { slope: 3.0, intercept: -1.0 },
        );
        assert_eq!(c, LinearFit { slope: 6.0, intercept: 2.0 });
        let f = LinearFit { slope: -0.5, intercept: 7.0 };
        assert_eq!(compose_fits(LinearFit::identity(), f), f);
        for a1 in [-2.0f64, 2.0] {
            for a2 in [-3.0, 3.0] {
                let c = compose_fits(
                    LinearFit { slope: a1, intercept: 0.3 },
                    LinearFit { slope: a2, intercept: -0.1 },
                );
                assert_eq!(c.slope.signum(), a1.signum() * a2.signum());
                // composing then evaluating equals evaluating twice
                let x = 1.7;
                let twice = a2 * (a1 * x + 0.3) - 0.1;
                assert!((c.eval(x) - twice).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn from_pairs_validates() {
        let w = WindowId::new(1987, 2).unwrap();
        let s: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let ok = CorrelationMatrix::from_pairs(w, s.clone(), &[("A", "B", 0.5), ("C", "A", -0.2), ("B", "C", 0.1)]).unwrap();
        assert_eq!(ok.between("A", "C").unwrap(), -0.2);
        assert!(CorrelationMatrix::from_pairs(w, s.clone(), &[("A", "B", 0.5), ("C", "A", -0.2)]).is_err());
        assert!(CorrelationMatrix::from_pairs(w, s.clone(), &[("A", "B", 1.5), ("C", "A", -0.2), ("B", "C", 0.1)]).is_err());
        assert!(CorrelationMatrix::from_pairs(w, s, &[("A", "X", 0.5)]).is_err());
    }

    #[test]
    fn csv_dump_format() {
        let w = WindowId::new(1987, 2).unwrap();
        let s: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let cm = CorrelationMatrix::from_pairs(w, s, &[("A", "B", 0.5), ("C", "A", -0.2), ("B", "C", 0.1)]).unwrap();
        assert_eq!(
            cm.to_csv(),
            "sector,A,B,C\nA,1.000000,0.500000,-0.200000\nB,0.500000,1.000000,0.100000\nC,-0.200000,0.100000,1.000000\n"
        );
    }
}
