//! The n-ary relation hierarchy over sign matrices.
//!
//! For a k-subset of sectors, Φ is the product of all C(k,2) pair signs. It can
//! be evaluated directly or by the recurrence that peels off the last member;
//! both routes are exposed so they can be checked against each other.
//!
//! # Superposition parity
//!
//! For `n + 1` points `X₀, X₁ … Xₙ` the superposition rule compares
//! `∏ᵢ Φₙ(X₀, all but Xᵢ)` with `Φₙ(X₁ … Xₙ)`. On the left every edge `X₀Xⱼ`
//! appears `n − 1` times and every other edge `n − 2` times, so the two sides
//! differ by `∏ (all edges)^(n−1)`. The rule is therefore an identity for odd
//! `n` and fails on generic sign matrices for even `n` (n = 2 reduces to the
//! plaquette test). [`superposition_check`] reports both sides rather than
//! assuming the rule, and [`parity_survey`] confirms the pattern exhaustively.
//! In particular the four-triangle product on any four points is always `+`,
//! so the level-3 transitivity test is vacuous.

use std::sync::OnceLock;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::WindowId;
use crate::relations::{Sign, SignMatrix};

/// Largest supported sector count.
pub const MAX_SECTORS: usize = 12;

/// Unordered set of at least two sector indices, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SectorSubset(Vec<usize>);

impl SectorSubset {
    /// Validates membership against a universe of `m` sectors.
    pub fn new(mut members: Vec<usize>, m: usize) -> Result<Self> {
        if m > MAX_SECTORS {
            return Err(Error::Validation(format!(
                "{m} sectors exceed the supported maximum of {MAX_SECTORS}"
            )));
        }
        members.sort_unstable();
        if members.len() < 2 {
            return Err(Error::Validation("subset needs at least 2 members".into()));
        }
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!("repeated member in {members:?}")));
        }
        if members.last().is_some_and(|&x| x >= m) {
            return Err(Error::Validation(format!(
                "member out of range for {m} sectors: {members:?}"
            )));
        }
        Ok(SectorSubset(members))
    }

    /// Subset given by sector names within `sm`.
    pub fn named(sm: &SignMatrix, names: &[&str]) -> Result<Self> {
        SectorSubset::new(sm.indices(names)?, sm.len())
    }

    /// Every sector of an `m`-sector universe.
    pub fn full(m: usize) -> Result<Self> {
        SectorSubset::new((0..m).collect(), m)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn without(&self, i: usize) -> Option<SectorSubset> {
        let rest: Vec<usize> = self.0.iter().copied().filter(|&x| x != i).collect();
        (rest.len() >= 2 && rest.len() < self.0.len()).then_some(SectorSubset(rest))
    }

    pub fn mask(&self) -> u32 {
        self.0.iter().fold(0, |m, &i| m | (1 << i))
    }

    pub fn names(&self, sectors: &[String]) -> Vec<String> {
        self.0.iter().map(|&i| sectors[i].clone()).collect()
    }

    /// Label such as `CRB+SPX+USB`.
    pub fn label(&self, sectors: &[String]) -> String {
        self.0.iter().map(|&i| sectors[i].as_str()).join("+")
    }

    /// All k-subsets of `0..m` in lexicographic order.
    pub fn all_of_size(m: usize, k: usize) -> impl Iterator<Item = SectorSubset> {
        (0..m).combinations(k).map(SectorSubset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiValue {
    pub subset: SectorSubset,
    pub level: usize,
    pub phi: Sign,
}

impl PhiValue {
    fn new(subset: SectorSubset, phi: Sign) -> Self {
        PhiValue {
            level: subset.len(),
            subset,
            phi,
        }
    }

    /// Frustration at a level means Φ = −1.
    pub fn is_frustrated(&self) -> bool {
        self.phi == Sign::Minus
    }
}

/// Product of all pair signs among `members`, in any order.
pub fn sign_product(sm: &SignMatrix, members: &[usize]) -> Result<Sign> {
    let mut phi = Sign::Plus;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            phi = phi * sm.pair_sign(i, j)?;
        }
    }
    Ok(phi)
}

/// Φ of the subset as the product over all of its pairs.
pub fn phi_direct(sm: &SignMatrix, s: &SectorSubset) -> Result<PhiValue> {
    check_universe(sm, s)?;
    Ok(PhiValue::new(s.clone(), sign_product(sm, s.members())?))
}

/// Φ of the subset via `Φₙ(X₁…Xₙ) = Φₙ₋₁(X₁…Xₙ₋₁) · ∏ᵢ Φ₂(Xᵢ, Xₙ)`.
pub fn phi_recurrence(sm: &SignMatrix, s: &SectorSubset) -> Result<PhiValue> {
    check_universe(sm, s)?;
    Ok(PhiValue::new(s.clone(), recurrence(sm, s.members())?))
}

fn recurrence(sm: &SignMatrix, members: &[usize]) -> Result<Sign> {
    let (&last, prefix) = members.split_last().expect("at least two members");
    if prefix.len() == 1 {
        return sm.pair_sign(prefix[0], last);
    }
    let mut phi = recurrence(sm, prefix)?;
    for &x in prefix {
        phi = phi * sm.pair_sign(x, last)?;
    }
    Ok(phi)
}

fn check_universe(sm: &SignMatrix, s: &SectorSubset) -> Result<()> {
    match s.members().last() {
        Some(&x) if x < sm.len() => Ok(()),
        _ => Err(Error::Validation(format!(
            "subset {:?} outside a {}-sector matrix",
            s.members(),
            sm.len()
        ))),
    }
}

/// Both sides of the superposition rule for one choice of `X₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuperpositionCheck {
    pub lhs: Sign,
    pub rhs: Sign,
    pub holds: bool,
}

fn check_points(sm: &SignMatrix, points: &[usize], n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Validation(format!("level must be at least 2, got {n}")));
    }
    if points.len() != n + 1 {
        return Err(Error::Validation(format!(
            "level {n} needs {} points, got {}",
            n + 1,
            points.len()
        )));
    }
    SectorSubset::new(points.to_vec(), sm.len()).map(|_| ())
}

/// Evaluates `∏ᵢ Φₙ(X₀, X₁ … X̂ᵢ … Xₙ)` against `Φₙ(X₁ … Xₙ)`, where
/// `points[0]` is `X₀`. Holds identically for odd `n` (see module docs).
pub fn superposition_check(sm: &SignMatrix, points: &[usize], n: usize) -> Result<SuperpositionCheck> {
    check_points(sm, points, n)?;
    let rest = &points[1..];
    let mut lhs = Sign::Plus;
    for skip in 0..n {
        let face: Vec<usize> = points
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip + 1)
            .map(|(_, &p)| p)
            .collect();
        lhs = lhs * sign_product(sm, &face)?;
    }
    let rhs = sign_product(sm, rest)?;
    Ok(SuperpositionCheck {
        lhs,
        rhs,
        holds: lhs == rhs,
    })
}

/// Whether the level-`n` relation is transitive on the `n + 1` points with
/// `points[0]` as `X₀`; `false` marks the point set frustrated at level `n`.
pub fn nary_transitive(sm: &SignMatrix, points: &[usize], n: usize) -> Result<bool> {
    Ok(superposition_check(sm, points, n)?.holds)
}

/// Whether the superposition rule is an identity at level `n`.
pub fn superposition_is_identity(n: usize) -> bool {
    n % 2 == 1
}

/// The `n` leave-one-out Φ values of the next lower level whose conjunction
/// defines membership of `s` at level `n = |s|`. Ordered by removed member.
pub fn conjunction_relation(sm: &SignMatrix, s: &SectorSubset) -> Result<Vec<PhiValue>> {
    if s.len() < 3 {
        return Err(Error::Validation(format!(
            "conjunction needs at least 3 members, got {}",
            s.len()
        )));
    }
    s.members()
        .iter()
        .map(|&x| phi_direct(sm, &s.without(x).expect("|s| >= 3")))
        .collect()
}

/// Per-window memo of Φ by subset, filled through the recurrence.
///
/// Each slot is written at most once, so a shared cache can be populated
/// from several threads without locking.
pub struct PhiCache<'a> {
    sm: &'a SignMatrix,
    slots: Vec<OnceLock<Option<Sign>>>,
}

impl<'a> PhiCache<'a> {
    pub fn new(sm: &'a SignMatrix) -> Result<Self> {
        if sm.len() > MAX_SECTORS {
            return Err(Error::Validation(format!(
                "{} sectors exceed the supported maximum of {MAX_SECTORS}",
                sm.len()
            )));
        }
        Ok(PhiCache {
            sm,
            slots: (0..1usize << sm.len()).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn get(&self, s: &SectorSubset) -> Result<PhiValue> {
        check_universe(self.sm, s)?;
        match self.lookup(s.members()) {
            Some(phi) => Ok(PhiValue::new(s.clone(), phi)),
            // re-run the direct product to name the offending pair
            None => phi_direct(self.sm, s),
        }
    }

    fn lookup(&self, members: &[usize]) -> Option<Sign> {
        let mask = members.iter().fold(0usize, |m, &i| m | (1 << i));
        *self.slots[mask].get_or_init(|| {
            let (&last, prefix) = members.split_last()?;
            if prefix.len() == 1 {
                return self.sm.get(prefix[0], last);
            }
            let mut phi = self.lookup(prefix)?;
            for &x in prefix {
                phi = phi * self.sm.get(x, last)?;
            }
            Some(phi)
        })
    }
}

/// Outcome of enumerating every sign assignment on `n + 1` points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParitySurvey {
    pub level: usize,
    pub assignments: usize,
    pub holds: usize,
    /// Negative edges `(i, j)` of the first assignment where the rule fails.
    pub counterexample: Option<Vec<(usize, usize)>>,
}

/// Exhaustively evaluates the superposition rule at level `n` over all
/// `2^C(n+1,2)` sign assignments, with point 0 as `X₀`.
pub fn parity_survey(n: usize) -> Result<ParitySurvey> {
    let m = n + 1;
    if m > 8 {
        return Err(Error::Validation(format!(
            "exhaustive survey limited to 8 points, level {n} needs {m}"
        )));
    }
    let edges: Vec<(usize, usize)> = (0..m).tuple_combinations().collect();
    let sectors: Vec<String> = (0..m).map(|i| format!("P{i}")).collect();
    let points: Vec<usize> = (0..m).collect();
    let window = WindowId::new(1900, 1)?;
    let mut survey = ParitySurvey {
        level: n,
        assignments: 1 << edges.len(),
        holds: 0,
        counterexample: None,
    };
    for bits in 0u64..(1 << edges.len()) {
        let sm = SignMatrix::from_fn(window, sectors.clone(), |i, j| {
            let k = edges.iter().position(|&e| e == (i, j)).expect("edge");
            Some(if bits >> k & 1 == 1 { Sign::Minus } else { Sign::Plus })
        });
        if superposition_check(&sm, &points, n)?.holds {
            survey.holds += 1;
        } else if survey.counterexample.is_none() {
            survey.counterexample = Some(
                edges
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| bits >> k & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect(),
            );
        }
    }
    Ok(survey)
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetEntry {
    pub members: Vec<String>,
    /// `None` when the subset contains a zero pair.
    pub phi: Option<Sign>,
    pub transitive: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelEntry {
    pub level: usize,
    pub subsets: Vec<SubsetEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperpositionEntry {
    pub level: usize,
    pub x0: String,
    pub points: Vec<String>,
    pub lhs: Sign,
    pub rhs: Sign,
    pub holds: bool,
}

/// Every subset by level with Φ, plus every superposition check.
#[derive(Debug, Clone, Serialize)]
pub struct HierarchyDump {
    pub window: WindowId,
    pub sectors: Vec<String>,
    pub levels: Vec<LevelEntry>,
    pub superposition: Vec<SuperpositionEntry>,
}

pub fn hierarchy_dump(sm: &SignMatrix) -> Result<HierarchyDump> {
    let m = sm.len();
    let cache = PhiCache::new(sm)?;
    let sectors = sm.sectors().to_vec();
    let levels = (2..=m)
        .map(|k| LevelEntry {
            level: k,
            subsets: SectorSubset::all_of_size(m, k)
                .map(|s| {
                    let phi = cache.get(&s).ok().map(|v| v.phi);
                    SubsetEntry {
                        members: s.names(&sectors),
                        phi,
                        transitive: phi.map(Sign::is_plus),
                    }
                })
                .collect(),
        })
        .collect();

    let mut superposition = Vec::new();
    for n in 2..m {
        for s in SectorSubset::all_of_size(m, n + 1) {
            for &x0 in s.members() {
                let mut points = vec![x0];
                points.extend(s.members().iter().copied().filter(|&p| p != x0));
                if let Ok(c) = superposition_check(sm, &points, n) {
                    superposition.push(SuperpositionEntry {
                        level: n,
                        x0: sectors[x0].clone(),
                        points: points.iter().map(|&p| sectors[p].clone()).collect(),
                        lhs: c.lhs,
                        rhs: c.rhs,
                        holds: c.holds,
                    });
                }
            }
        }
    }
    Ok(HierarchyDump {
        window: sm.window(),
        sectors,
        levels,
        superposition,
    })
}
