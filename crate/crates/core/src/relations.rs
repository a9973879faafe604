//! The binary sign relation between sectors and its plaquette transitivity.
//!
//! A plaquette (three distinct sectors) is transitive when the product of its
//! three edge signs is `+`, frustrated when it is `−`. Pairs whose correlation
//! is within the zero tolerance carry no sign; any plaquette touching one is
//! set aside as degenerate.

use std::collections::BTreeSet;
use std::ops::{Mul, Neg};

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::ingest::WindowId;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }

    /// Sign of a real number; `None` for zero and NaN.
    pub fn of<T: Scalar>(v: T) -> Option<Sign> {
        if v > T::zero() {
            Some(Sign::Plus)
        } else if v < T::zero() {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn product(signs: impl IntoIterator<Item = Sign>) -> Sign {
        signs.into_iter().fold(Sign::Plus, |a, b| a * b)
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

/// Pairwise correlation signs of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct SignMatrix {
    window: WindowId,
    sectors: Vec<String>,
    /// Row-major m × m; `None` marks a zero pair.
    signs: Vec<Option<Sign>>,
    zero_pairs: BTreeSet<(usize, usize)>,
}

impl SignMatrix {
    /// Builds a matrix from a sign for every pair `i < j`.
    pub fn from_fn(
        window: WindowId,
        sectors: Vec<String>,
        mut edge: impl FnMut(usize, usize) -> Option<Sign>,
    ) -> Self {
        let m = sectors.len();
        let mut signs = vec![Some(Sign::Plus); m * m];
        let mut zero_pairs = BTreeSet::new();
        for i in 0..m {
            for j in i + 1..m {
                let s = edge(i, j);
                if s.is_none() {
                    zero_pairs.insert((i, j));
                }
                signs[i * m + j] = s;
                signs[j * m + i] = s;
            }
        }
        SignMatrix {
            window,
            sectors,
            signs,
            zero_pairs,
        }
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

    /// Sign of the pair, `None` if it is a zero pair.
    pub fn get(&self, i: usize, j: usize) -> Option<Sign> {
        self.signs[i * self.sectors.len() + j]
    }

    /// Sign of the pair, or a degenerate-pair error naming both sectors.
    pub fn pair_sign(&self, i: usize, j: usize) -> Result<Sign> {
        self.get(i, j)
            .ok_or_else(|| Error::DegeneratePair(self.sectors[i].clone(), self.sectors[j].clone()))
    }

    /// Zero pairs as `(i, j)` with `i < j`.
    pub fn zero_pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.zero_pairs
    }

    pub fn index_of(&self, sector: &str) -> Option<usize> {
        self.sectors.iter().position(|s| s == sector)
    }

    /// Resolves sector names to indices.
    pub fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.index_of(n)
                    .ok_or_else(|| Error::Validation(format!("unknown sector {n}")))
            })
            .collect()
    }

    /// Copy with every edge incident to sector `k` negated.
    pub fn with_sector_flipped(&self, k: usize) -> SignMatrix {
        SignMatrix::from_fn(self.window, self.sectors.clone(), |i, j| {
            let s = self.get(i, j);
            if i == k || j == k {
                s.map(Neg::neg)
            } else {
                s
            }
        })
    }
}

/// Signs of every correlation; pairs with `|ρ| ≤ zero_tol` become zero pairs.
pub fn sign_matrix<T: Scalar>(cm: &CorrelationMatrix<T>, zero_tol: T) -> SignMatrix {
    SignMatrix::from_fn(cm.window(), cm.sectors().to_vec(), |i, j| {
        let r = cm.get(i, j);
        if r > zero_tol {
            Some(Sign::Plus)
        } else if r < -zero_tol {
            Some(Sign::Minus)
        } else {
            None
        }
    })
}

/// Unordered triple of distinct sector indices, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plaquette([usize; 3]);

impl Plaquette {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        let mut m = [a, b, c];
        m.sort_unstable();
        if m[0] == m[1] || m[1] == m[2] {
            return Err(Error::Validation(format!(
                "plaquette needs 3 distinct members, got {a}, {b}, {c}"
            )));
        }
        Ok(Plaquette(m))
    }

    pub fn members(&self) -> [usize; 3] {
        self.0
    }

    pub fn names<'a>(&self, sectors: &'a [String]) -> [&'a str; 3] {
        self.0.map(|i| sectors[i].as_str())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }
}

/// Product of the three edge signs.
pub fn plaquette_phi(sm: &SignMatrix, p: Plaquette) -> Result<Sign> {
    let [a, b, c] = p.0;
    Ok(sm.pair_sign(a, b)? * sm.pair_sign(b, c)? * sm.pair_sign(a, c)?)
}

pub fn is_transitive_triple(sm: &SignMatrix, p: Plaquette) -> Result<bool> {
    Ok(plaquette_phi(sm, p)?.is_plus())
}

/// Split of all C(m,3) plaquettes into transitive, frustrated and degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaquetteDecomposition {
    pub window: WindowId,
    pub sectors: Vec<String>,
    pub transitive: Vec<Plaquette>,
    pub frustrated: Vec<Plaquette>,
    pub degenerate: Vec<Plaquette>,
}

impl PlaquetteDecomposition {
    pub fn total(&self) -> usize {
        self.transitive.len() + self.frustrated.len() + self.degenerate.len()
    }
}

/// Classifies every plaquette, in lexicographic member order.
pub fn decompose(sm: &SignMatrix) -> PlaquetteDecomposition {
    let mut dec = PlaquetteDecomposition {
        window: sm.window(),
        sectors: sm.sectors().to_vec(),
        transitive: Vec::new(),
        frustrated: Vec::new(),
        degenerate: Vec::new(),
    };
    for t in (0..sm.len()).combinations(3) {
        let p = Plaquette([t[0], t[1], t[2]]);
        match plaquette_phi(sm, p) {
            Ok(Sign::Plus) => dec.transitive.push(p),
            Ok(Sign::Minus) => dec.frustrated.push(p),
            Err(_) => dec.degenerate.push(p),
        }
    }
    dec
}

/// Whether the transitive plaquettes jointly contain every sector.
pub fn preorder_cover(dec: &PlaquetteDecomposition, sectors: &[String]) -> bool {
    let covered: BTreeSet<&str> = dec
        .transitive
        .iter()
        .flat_map(|p| p.names(&dec.sectors))
        .collect();
    let all: BTreeSet<&str> = sectors.iter().map(String::as_str).collect();
    !all.is_empty() && covered == all
}
