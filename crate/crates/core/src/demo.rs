//! Worked example on the reference 1987 correlation table of the five
//! intermarket sectors (first half above the diagonal, second half below).

use std::fmt::Write as _;

use serde::Serialize;

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::hierarchy::{phi_direct, SectorSubset};
use crate::ingest::WindowId;
use crate::measures::rho_measure;
use crate::relations::{decompose, preorder_cover, sign_matrix, PlaquetteDecomposition, Sign, SignMatrix};
use crate::scalar::Scalar;

/// Bundled literal coefficients, `half,row,col,rho`.
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

/// Sector order of the reference table.
pub const TABLE1_SECTORS: [&str; 5] = ["CRB", "USB", "SPX", "USD", "XAU"];

/// Correlation matrix of 1987 half `half` from the bundled constants.
pub fn table1_matrix<T: Scalar>(half: u8) -> Result<CorrelationMatrix<T>> {
    let window = WindowId::new(1987, half)?;
    let mut pairs = Vec::new();
    for (i, line) in TABLE1_CSV.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let [h, a, b, r] = fields[..] else {
            return Err(Error::Validation(format!("table1 line {}: expected 4 fields", i + 1)));
        };
        if h.parse::<u8>().ok() != Some(half) {
            continue;
        }
        let r: T = r
            .parse()
            .map_err(|_| Error::Validation(format!("table1 line {}: bad coefficient {r}", i + 1)))?;
        pairs.push((a, b, r));
    }
    let sectors = TABLE1_SECTORS.iter().map(|s| s.to_string()).collect();
    CorrelationMatrix::from_pairs(window, sectors, &pairs)
}

/// Everything the worked example reports.
#[derive(Debug, Clone, Serialize)]
pub struct Table1Demo {
    pub window: WindowId,
    pub sectors: Vec<String>,
    /// `(a, b, ρ, sign)` for each pair in table order.
    pub relation: Vec<(String, String, f64, Sign)>,
    pub transitive: Vec<Vec<String>>,
    pub frustrated: Vec<Vec<String>>,
    pub degenerate: Vec<Vec<String>>,
    pub preorder_cover: bool,
    pub phi_r4_crb_spx_usb_usd: Sign,
    pub phi_r4_xau_spx_usb_usd: Sign,
    pub phi_r5: Sign,
    pub rho_r5: f64,
    /// Φ of the system without each sector.
    pub phi_without: Vec<(String, Sign)>,
}

fn plaquette_names(dec: &PlaquetteDecomposition, list: &[crate::relations::Plaquette]) -> Vec<Vec<String>> {
    list.iter()
        .map(|p| p.names(&dec.sectors).iter().map(|s| s.to_string()).collect())
        .collect()
}

fn phi_of(sm: &SignMatrix, names: &[&str]) -> Result<Sign> {
    Ok(phi_direct(sm, &SectorSubset::named(sm, names)?)?.phi)
}

/// Runs the worked example on `matrix` (normally [`table1_matrix`]`(2)`).
pub fn emit_table1_demo(matrix: &CorrelationMatrix<f64>) -> Result<Table1Demo> {
    let sm = sign_matrix(matrix, 0.0);
    let dec = decompose(&sm);
    let m = matrix.len();
    let sectors = matrix.sectors().to_vec();
    let mut relation = Vec::new();
    for i in 0..m {
        for j in 0..i {
            let r = matrix.get(i, j);
            relation.push((sectors[i].clone(), sectors[j].clone(), r, sm.pair_sign(i, j)?));
        }
    }
    let full = SectorSubset::full(m)?;
    let phi_without = (0..m)
        .map(|i| Ok((sectors[i].clone(), phi_direct(&sm, &full.without(i).expect("m >= 3"))?.phi)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1Demo {
        window: matrix.window(),
        relation,
        transitive: plaquette_names(&dec, &dec.transitive),
        frustrated: plaquette_names(&dec, &dec.frustrated),
        degenerate: plaquette_names(&dec, &dec.degenerate),
        preorder_cover: preorder_cover(&dec, &sectors),
        phi_r4_crb_spx_usb_usd: phi_of(&sm, &["CRB", "SPX", "USB", "USD"])?,
        phi_r4_xau_spx_usb_usd: phi_of(&sm, &["XAU", "SPX", "USB", "USD"])?,
        phi_r5: phi_direct(&sm, &full)?.phi,
        rho_r5: rho_measure(matrix, &full)?.rho_n,
        phi_without,
        sectors,
    })
}

impl Table1Demo {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Window {} (y = {})", self.window, self.window.y_coordinate());
        let _ = writeln!(out, "\nSign relation:");
        for (a, b, r, s) in &self.relation {
            let _ = writeln!(out, "  {a} R {b} = {}   (rho = {r:+.3})", s.symbol());
        }
        let join = |v: &[Vec<String>]| {
            v.iter().map(|p| format!("{{{}}}", p.join(","))).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(out, "\nTransitive plaquettes ({}): {}", self.transitive.len(), join(&self.transitive));
        let _ = writeln!(out, "Frustrated plaquettes ({}): {}", self.frustrated.len(), join(&self.frustrated));
        if !self.degenerate.is_empty() {
            let _ = writeln!(out, "Degenerate plaquettes ({}): {}", self.degenerate.len(), join(&self.degenerate));
        }
        let _ = writeln!(out, "Transitive plaquettes cover all sectors: {}", self.preorder_cover);
        let _ = writeln!(out, "\nPhi_R4(CRB,SPX,USB,USD) = {:+}", self.phi_r4_crb_spx_usb_usd.value());
        let _ = writeln!(out, "Phi_R4(XAU,SPX,USB,USD) = {:+}", self.phi_r4_xau_spx_usb_usd.value());
        let _ = writeln!(out, "Phi_R5(S) = {:+}", self.phi_r5.value());
        let _ = writeln!(out, "rho_R5(S) = {:.6e}", self.rho_r5);
        let _ = writeln!(out, "\nWithout one sector:");
        for (s, phi) in &self.phi_without {
            let state = if phi.is_plus() { "transitive" } else { "frustrated" };
            let _ = writeln!(out, "  S\\{{{s}}}: Phi = {:+} ({state})", phi.value());
        }
        out
    }
}
