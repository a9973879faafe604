//! Pick detection, envelope trends and the reaction taxonomy for removed sectors.
//!
//! A sector's role is read off by comparing the full-system measure (scaled to
//! the reduced system's magnitude) with the measure of the system without that
//! sector, at every pick of either series.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::correlation::fit_line;
use crate::error::{Error, Result};
use crate::measures::{scale_overlay, HierarchySeries};
use crate::relations::Sign;
use crate::scalar::Scalar;

/// Zero band as a fraction of the reduced series' largest magnitude.
pub const DEFAULT_EPS_FRAC: f64 = 0.10;
/// Pick threshold as a fraction of a series' largest magnitude.
pub const DEFAULT_PICK_FRAC: f64 = 0.25;

/// Transitive (above the zero band), frustrated (below it) or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateClass {
    Transitive,
    Frustrated,
    Zero,
}

impl StateClass {
    pub const ALL: [StateClass; 3] = [StateClass::Frustrated, StateClass::Zero, StateClass::Transitive];

    pub fn label(self) -> &'static str {
        match self {
            StateClass::Transitive => "T",
            StateClass::Frustrated => "F",
            StateClass::Zero => "0",
        }
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for StateClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// `T` above `eps`, `F` below `−eps`, `0` in between (inclusive).
pub fn classify_state<T: Scalar>(value: T, eps: T) -> StateClass {
    if value > eps {
        StateClass::Transitive
    } else if value < -eps {
        StateClass::Frustrated
    } else {
        StateClass::Zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pick<T> {
    pub y: f64,
    pub value: T,
    pub polarity: Sign,
    pub prominence: T,
}

/// Interior local extrema with `|value| ≥ threshold`.
///
/// A positive pick is a positive local maximum, a negative pick a negative
/// local minimum. Flat tops count once, at their left edge. Prominence is
/// `|value|` minus the larger neighbouring magnitude, floored at zero.
pub fn detect_picks<T: Scalar>(series: &HierarchySeries<T>, threshold: T) -> Result<Vec<Pick<T>>> {
    if series.points.len() < 3 {
        return Err(Error::Validation(format!(
            "pick detection needs at least 3 points, series {} has {}",
            series.label,
            series.points.len()
        )));
    }
    if threshold.is_nan() || threshold < T::zero() {
        return Err(Error::Validation(format!("pick threshold {threshold} must be non-negative")));
    }
    let p = &series.points;
    let mut picks = Vec::new();
    for i in 1..p.len() - 1 {
        let (prev, v, next) = (p[i - 1].1, p[i].1, p[i + 1].1);
        let polarity = if v > T::zero() && v > prev && v >= next {
            Sign::Plus
        } else if v < T::zero() && v < prev && v <= next {
            Sign::Minus
        } else {
            continue;
        };
        if v.abs() < threshold {
            continue;
        }
        let prominence = (v.abs() - prev.abs().max(next.abs())).max(T::zero());
        picks.push(Pick {
            y: p[i].0,
            value: v,
            polarity,
            prominence,
        });
    }
    Ok(picks)
}

/// How a pick's state changes when a sector is removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reaction {
    Invariant,
    FrustrationToTransitivity,
    TransitivityToFrustration,
    FrustrationToZero,
    TransitivityToZero,
    ZeroToFrustration,
    ZeroToTransitivity,
}

impl Reaction {
    pub const ALL: [Reaction; 7] = [
        Reaction::Invariant,
        Reaction::FrustrationToTransitivity,
        Reaction::TransitivityToFrustration,
        Reaction::FrustrationToZero,
        Reaction::TransitivityToZero,
        Reaction::ZeroToFrustration,
        Reaction::ZeroToTransitivity,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Reaction::Invariant => "Invariant",
            Reaction::FrustrationToTransitivity => "F->T",
            Reaction::TransitivityToFrustration => "T->F",
            Reaction::FrustrationToZero => "F->0",
            Reaction::TransitivityToZero => "T->0",
            Reaction::ZeroToFrustration => "0->F",
            Reaction::ZeroToTransitivity => "0->T",
        }
    }

    /// What the reaction says about the removed sector.
    pub fn interpretation(self) -> &'static str {
        match self {
            Reaction::Invariant => "No active",
            Reaction::FrustrationToTransitivity | Reaction::FrustrationToZero => "Frustration's generator",
            Reaction::TransitivityToFrustration | Reaction::TransitivityToZero => "Transitivity's generator",
            Reaction::ZeroToFrustration => "Frustration's annihilator",
            Reaction::ZeroToTransitivity => "Transitivity's annihilator",
        }
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Reaction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

pub fn classify_reaction(before: StateClass, after: StateClass) -> Reaction {
    use StateClass::*;
    match (before, after) {
        (a, b) if a == b => Reaction::Invariant,
        (Frustrated, Transitive) => Reaction::FrustrationToTransitivity,
        (Transitive, Frustrated) => Reaction::TransitivityToFrustration,
        (Frustrated, Zero) => Reaction::FrustrationToZero,
        (Transitive, Zero) => Reaction::TransitivityToZero,
        (Zero, Frustrated) => Reaction::ZeroToFrustration,
        (Zero, Transitive) => Reaction::ZeroToTransitivity,
        _ => unreachable!("equal states handled above"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReactionEvent {
    pub sector: String,
    pub y: f64,
    /// State of the scaled full-system measure.
    pub before: StateClass,
    /// State of the measure without `sector`.
    pub after: StateClass,
    pub reaction: Reaction,
    pub interpretation: &'static str,
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} must lie in (0, 1), got {v}")))
    }
}

fn pick_ys<T: Scalar>(series: &HierarchySeries<T>, frac: T) -> Result<Vec<f64>> {
    let threshold = frac * series.max_abs();
    Ok(detect_picks(series, threshold)?.into_iter().map(|p| p.y).collect())
}

/// Reaction events for every removed sector, at the union of the picks of the
/// scaled full-system series and the reduced series.
pub fn sector_reaction_report<T: Scalar>(
    full: &HierarchySeries<T>,
    reduced: &BTreeMap<String, HierarchySeries<T>>,
    eps_frac: f64,
    pick_threshold_frac: f64,
) -> Result<Vec<ReactionEvent>> {
    check_fraction("eps_frac", eps_frac)?;
    check_fraction("pick_threshold_frac", pick_threshold_frac)?;
    let eps_frac = T::from_f64_lossy(eps_frac);
    let pick_frac = T::from_f64_lossy(pick_threshold_frac);

    let mut events = Vec::new();
    for (sector, r4) in reduced {
        let scaled = scale_overlay(full, r4).map_err(|e| e.context(format!("sector {sector}")))?;
        let eps = eps_frac * r4.max_abs();
        let mut ys = pick_ys(&scaled, pick_frac)?;
        ys.extend(pick_ys(r4, pick_frac)?);
        ys.sort_by(|a, b| a.partial_cmp(b).expect("finite y"));
        ys.dedup();
        for y in ys {
            let before = classify_state(scaled.value_at(y).expect("shared grid"), eps);
            let after = classify_state(r4.value_at(y).expect("shared grid"), eps);
            let reaction = classify_reaction(before, after);
            events.push(ReactionEvent {
                sector: sector.clone(),
                y,
                before,
                after,
                reaction,
                interpretation: reaction.interpretation(),
            });
        }
    }
    Ok(events)
}

/// Least-squares line through the points of one polarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendLine<T> {
    pub slope: T,
    pub intercept: T,
    pub side: Sign,
}

pub fn envelope_trend<T: Scalar>(series: &HierarchySeries<T>, side: Sign) -> Result<TrendLine<T>> {
    let (ys, vs): (Vec<T>, Vec<T>) = series
        .points
        .iter()
        .filter(|p| Sign::of(p.1) == Some(side))
        .map(|p| (T::from_f64_lossy(p.0), p.1))
        .unzip();
    if ys.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "series {} has {} point(s) of sign {}, need 2",
            series.label,
            ys.len(),
            side.symbol()
        )));
    }
    let fit = fit_line(&ys, &vs).map_err(|e| e.context(format!("envelope of {}", series.label)))?;
    Ok(TrendLine {
        slope: fit.slope,
        intercept: fit.intercept,
        side,
    })
}
