//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{implication_transitive, random_sign_matrix, sign_matrix_from_bits};
use frustration::analysis::{classify_reaction, Reaction, StateClass};
use frustration::demo::{emit_table1_demo, table1_matrix};
use frustration::hierarchy::{parity_survey, phi_direct, phi_recurrence, SectorSubset};
use frustration::relations::{is_transitive_triple, plaquette_phi, Plaquette, Sign};
use frustration::{decompose, ls_fit, pearson, preorder_cover, sign_matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Second half of 1987, below the diagonal, in table order.
const H2: [(&str, &str, f64); 10] = [
    ("USB", "CRB", -0.144),
    ("SPX", "CRB", 0.376),
    ("SPX", "USB", 0.617),
    ("USD", "CRB", 0.129),
    ("USD", "USB", -0.085),
    ("USD", "SPX", 0.456),
    ("XAU", "CRB", 0.750),
    ("XAU", "USB", -0.081),
    ("XAU", "SPX", 0.235),
    ("XAU", "USD", -0.351),
];

type Outcome = Result<String, String>;
type Tree = Vec<(String, Vec<u8>)>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let cm = table1_matrix::<f64>(2).map_err(|e| e.to_string())?;
    for (a, b, r) in H2 {
        ensure(cm.between(a, b).unwrap() == r, format!("{a}-{b} not loaded verbatim"))?;
    }
    let demo = emit_table1_demo(&cm).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let got = (demo.phi_r4_crb_spx_usb_usd.value(), demo.phi_r4_xau_spx_usb_usd.value(), demo.phi_r5.value());
    ensure(got == (1, -1, 1), format!("got {got:?}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("Phi_R4(CRB,SPX,USB,USD)=+1 Phi_R4(XAU,SPX,USB,USD)=-1 Phi_R5=+1 in {elapsed:?}"))
}

fn c2() -> Outcome {
    let cm = table1_matrix::<f64>(2).map_err(|e| e.to_string())?;
    let dec = decompose(&sign_matrix(&cm, 0.0));
    let counts = (dec.transitive.len(), dec.frustrated.len(), dec.degenerate.len());
    let cover = preorder_cover(&dec, cm.sectors());
    ensure(counts == (4, 6, 0) && cover, format!("counts {counts:?} cover {cover}"))?;
    Ok("|V_T|=4 |V_F|=6 degenerate=0 cover=true".into())
}

fn c3() -> Outcome {
    let cm = table1_matrix::<f64>(2).map_err(|e| e.to_string())?;
    let rho = frustration::rho_measure(&cm, &SectorSubset::full(5).unwrap()).map_err(|e| e.to_string())?.rho_n;
    let direct: f64 = H2.iter().map(|t| t.2).product();
    let rel = ((rho - direct) / direct).abs();
    ensure(rel <= 1e-12 && rho > 0.0, format!("rho {rho:e} direct {direct:e} rel {rel:e}"))?;
    Ok(format!("rho_R5={rho:e} direct={direct:e} rel.err={rel:.1e}"))
}

fn c4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut subsets = 0usize;
    let mut mismatches = 0usize;
    for _ in 0..1000 {
        let m = rng.gen_range(3..=8);
        let sm = random_sign_matrix(&mut rng, m);
        for k in 2..=m {
            for s in SectorSubset::all_of_size(m, k) {
                subsets += 1;
                if phi_recurrence(&sm, &s).unwrap().phi != phi_direct(&sm, &s).unwrap().phi {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(mismatches == 0, format!("{mismatches} mismatches"))?;
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("1000 matrices, {subsets} subsets, 0 mismatches in {elapsed:?}"))
}

fn c5() -> Outcome {
    let mut agree = 0;
    for bits in 0..8u64 {
        let sm = sign_matrix_from_bits(3, bits);
        let got = is_transitive_triple(&sm, Plaquette::new(0, 1, 2).unwrap()).unwrap();
        if got == implication_transitive(|a, b| sm.pair_sign(a, b).unwrap()) {
            agree += 1;
        }
    }
    ensure(agree == 8, format!("{agree}/8"))?;
    Ok("8/8 triangle assignments match the implication oracle".into())
}

fn c6() -> Outcome {
    let faces = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let mut plus = 0;
    for bits in 0..64u64 {
        let sm = sign_matrix_from_bits(4, bits);
        let p = Sign::product(faces.iter().map(|&[a, b, c]| plaquette_phi(&sm, Plaquette::new(a, b, c).unwrap()).unwrap()));
        if p == Sign::Plus {
            plus += 1;
        }
    }
    ensure(plus == 64, format!("{plus}/64"))?;
    Ok("64/64 face products are +1".into())
}

fn c7() -> Outcome {
    let three = parity_survey(3).map_err(|e| e.to_string())?;
    let four = parity_survey(4).map_err(|e| e.to_string())?;
    ensure(
        three.assignments == 64 && three.holds == 64,
        format!("n=3: {}/{}", three.holds, three.assignments),
    )?;
    ensure(four.assignments == 1024, format!("n=4: {} assignments", four.assignments))?;
    let ce = four.counterexample.clone().ok_or("n=4: no counterexample")?;
    Ok(format!(
        "n=3 holds {}/{}; n=4 holds {}/{}, first counterexample negative edges {ce:?}",
        three.holds, three.assignments, four.holds, four.assignments
    ))
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut slope_checks = 0;
    for case in 0..100 {
        let n = rng.gen_range(5..200);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| rng.gen_range(-1.0..1.0) * 10.0 + rng.gen_range(-1.0..1.0) * v).collect();
        let r = pearson(&x, &y).map_err(|e| e.to_string())?;
        let a = rng.gen_range(0.001..1000.0);
        let b = rng.gen_range(-1000.0..1000.0);
        let xt: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let c = rng.gen_range(0.001..1000.0);
        let d = rng.gen_range(-1000.0..1000.0);
        let yt: Vec<f64> = y.iter().map(|v| c * v + d).collect();
        let rt = pearson(&xt, &yt).map_err(|e| e.to_string())?;
        worst = worst.max((rt - r).abs());
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        ensure(pearson(&neg, &y).unwrap() == -r, format!("case {case}: negation not exact"))?;
        if r != 0.0 {
            let fit = ls_fit(&x, &y).map_err(|e| e.to_string())?;
            ensure(fit.slope.signum() == r.signum(), format!("case {case}: slope sign"))?;
            slope_checks += 1;
        }
    }
    ensure(worst < 1e-12, format!("affine change up to {worst:e}"))?;
    Ok(format!("100 pairs, max affine change {worst:.1e}, negation exact, {slope_checks} slope signs agree"))
}

fn c9() -> Outcome {
    use StateClass::*;
    let table = [
        (Transitive, Transitive, "Invariant", "No active"),
        (Frustrated, Frustrated, "Invariant", "No active"),
        (Zero, Zero, "Invariant", "No active"),
        (Frustrated, Transitive, "F->T", "Frustration's generator"),
        (Transitive, Frustrated, "T->F", "Transitivity's generator"),
        (Frustrated, Zero, "F->0", "Frustration's generator"),
        (Transitive, Zero, "T->0", "Transitivity's generator"),
        (Zero, Frustrated, "0->F", "Frustration's annihilator"),
        (Zero, Transitive, "0->T", "Transitivity's annihilator"),
    ];
    let mut labels = std::collections::BTreeSet::new();
    for &before in &StateClass::ALL {
        for &after in &StateClass::ALL {
            let r = classify_reaction(before, after);
            let row = table
                .iter()
                .find(|t| t.0 == before && t.1 == after)
                .ok_or("grid cell missing from table")?;
            ensure(r.label() == row.2 && r.interpretation() == row.3, format!("{before:?}->{after:?} gave {r}"))?;
            ensure(Reaction::ALL.iter().filter(|&&x| x == r).count() == 1, "label not unique")?;
            labels.insert(r.label());
        }
    }
    ensure(labels.len() == 7, format!("{} distinct labels", labels.len()))?;
    Ok("9/9 state pairs map to the 7 labels and interpretations".into())
}

fn read_tree(root: &Path) -> Tree {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn c10() -> Outcome {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fixture.conf");
    let run = || -> Result<(tempfile::TempDir, Tree), String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let status = Command::new(env!("CARGO_BIN_EXE_frustration"))
            .arg("analyze")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(dir.path())
            .stderr(std::process::Stdio::null())
            .stdout(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), format!("analyze exited with {status}"))?;
        let files = read_tree(dir.path());
        Ok((dir, files))
    };
    let (_a, first) = run()?;
    let (_b, second) = run()?;
    ensure(!first.is_empty(), "no output files")?;
    ensure(first == second, "outputs differ between runs")?;
    let bytes: usize = first.iter().map(|f| f.1.len()).sum();
    Ok(format!("{} files, {bytes} bytes identical across two runs", first.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("table-1 phi values", c1),
        ("plaquette decomposition", c2),
        ("rho_R5 direct product", c3),
        ("recurrence = direct", c4),
        ("triangle implication oracle", c5),
        ("K4 face identity", c6),
        ("superposition parity", c7),
        ("pearson invariance", c8),
        ("reaction taxonomy", c9),
        ("end-to-end determinism", c10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
