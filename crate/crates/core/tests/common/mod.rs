#![allow(dead_code)]

use frustration::relations::{Sign, SignMatrix};
use frustration::WindowId;
use rand::Rng;

pub fn names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("S{i}")).collect()
}

pub fn window() -> WindowId {
    WindowId::new(2000, 1).unwrap()
}

/// Upper-triangle edges in row-major order.
pub fn edges(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

/// Bit k set means edge k is negative.
pub fn sign_matrix_from_bits(m: usize, bits: u64) -> SignMatrix {
    let e = edges(m);
    SignMatrix::from_fn(window(), names(m), |i, j| {
        let k = e.iter().position(|&x| x == (i, j)).unwrap();
        Some(if bits >> k & 1 == 1 { Sign::Minus } else { Sign::Plus })
    })
}

pub fn random_sign_matrix(rng: &mut impl Rng, m: usize) -> SignMatrix {
    let bits = rng.gen::<u64>() & ((1u64 << edges(m).len()) - 1);
    sign_matrix_from_bits(m, bits)
}

/// Movement of `to` implied by `from` moving `up` under a relation of sign `s`:
/// a positive relation moves both the same way, a negative one opposite ways.
fn implied(up: bool, s: Sign) -> bool {
    up == s.is_plus()
}

/// Transitivity of a triangle from the implication reading of the relation:
/// for every ordering (x, y, z) and both directions of x, going x → y → z
/// must imply the same movement of z as going x → z directly.
pub fn implication_transitive(s: impl Fn(usize, usize) -> Sign) -> bool {
    let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    orders.iter().all(|&[x, y, z]| {
        [true, false].iter().all(|&up| {
            let via = implied(implied(up, s(x, y)), s(y, z));
            via == implied(up, s(x, z))
        })
    })
}

/// Textbook Pearson coefficient, no shared code with the library.
pub fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}
