//! Regenerates `fixtures/*.csv`: five synthetic index series over 1987-1988.
//!
//! The two 1987 halves are built so their level correlations equal the
//! bundled 1987 table exactly; the 1988 halves are seeded random mixtures.
//!
//! cargo run --example make_fixture -- crates/core/fixtures

use std::fmt::Write as _;
use std::path::PathBuf;

use chrono::{Datelike, NaiveDate, Weekday};
use frustration::demo::{table1_matrix, TABLE1_SECTORS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 19871019;

fn weekdays(from: NaiveDate, to: NaiveDate) -> Vec<NaiveDate> {
    from.iter_days()
        .take_while(|d| *d <= to)
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect()
}

fn cholesky(c: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = c.len();
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = c[i][i] - s;
                assert!(d > 0.0, "matrix not positive definite");
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (c[i][j] - s) / l[j][j];
            }
        }
    }
    l
}

/// Columns with zero mean, unit norm and zero mutual inner products.
fn orthonormal_columns(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    while out.len() < cols {
        let mut v: Vec<f64> = (0..rows).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = v.iter().sum::<f64>() / rows as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        // twice for numerical orthogonality
        for _ in 0..2 {
            for u in &out {
                let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
    }
    out
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/core/fixtures".into()));
    std::fs::create_dir_all(&dir).expect("create fixture dir");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let m = TABLE1_SECTORS.len();
    let base = [250.0, 95.0, 300.0, 100.0, 420.0];
    let scale = [40.0, 12.0, 60.0, 10.0, 80.0];
    let mut rows: Vec<(NaiveDate, Vec<f64>)> = Vec::new();

    let halves = [
        (NaiveDate::from_ymd_opt(1987, 1, 1), NaiveDate::from_ymd_opt(1987, 6, 30)),
        (NaiveDate::from_ymd_opt(1987, 7, 1), NaiveDate::from_ymd_opt(1987, 12, 31)),
        (NaiveDate::from_ymd_opt(1988, 1, 1), NaiveDate::from_ymd_opt(1988, 6, 30)),
        (NaiveDate::from_ymd_opt(1988, 7, 1), NaiveDate::from_ymd_opt(1988, 12, 31)),
    ];
    for (h, (from, to)) in halves.into_iter().enumerate() {
        let dates = weekdays(from.unwrap(), to.unwrap());
        let n = dates.len();
        let z = orthonormal_columns(&mut rng, n, m);
        let mix: Vec<Vec<f64>> = if h < 2 {
            let cm = table1_matrix::<f64>(h as u8 + 1).expect("bundled table");
            let c: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| cm.get(i, j)).collect()).collect();
            cholesky(&c)
        } else {
            (0..m).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
        };
        for (r, date) in dates.into_iter().enumerate() {
            let values = (0..m)
                .map(|i| {
                    let y: f64 = (0..m).map(|k| mix[i][k] * z[k][r]).sum();
                    base[i] + scale[i] * (n as f64).sqrt() * y / 4.0
                })
                .collect();
            rows.push((date, values));
        }
    }

    for (i, sector) in TABLE1_SECTORS.iter().enumerate() {
        let mut text = String::from("date,value\n");
        for (date, values) in &rows {
            let _ = writeln!(text, "{date},{}", values[i]);
        }
        if *sector == "XAU" {
            // weekend quotes that only this series has; the inner join drops them
            for extra in ["1987-03-14", "1988-09-10"] {
                let _ = writeln!(text, "{extra},{}", base[i]);
            }
        }
        std::fs::write(dir.join(format!("{sector}.csv")), text).expect("write fixture");
    }
    println!("wrote {} rows per sector to {}", rows.len(), dir.display());
}
