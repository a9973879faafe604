mod common;

use common::{fixture_dir, naive_pearson};
use frustration::config::{PartialConfig, ReturnsMode, RunConfig};
use frustration::demo::table1_matrix;
use frustration::hierarchy::{phi_direct, SectorSubset};
use frustration::pipeline::{prepare_input, run_pipeline};
use frustration::{corr_matrix, decompose, preorder_cover, sign_matrix, Sign};

fn fixture_config(out: &std::path::Path) -> RunConfig {
    let mut cfg = PartialConfig::load(&fixture_dir().join("fixture.conf")).unwrap().finish().unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg
}

#[test]
fn inner_join_drops_extra_weekend_rows() {
    let input = prepare_input(&fixture_config(std::path::Path::new("unused"))).unwrap();
    assert_eq!(input.panel.n_rows(), 522);
    assert_eq!(input.partition.windows.len(), 4);
    assert!(input.partition.skipped.is_empty());
}

#[test]
fn correlations_match_textbook_formula() {
    let input = prepare_input(&fixture_config(std::path::Path::new("unused"))).unwrap();
    for wp in &input.partition.windows {
        let cm = corr_matrix(wp).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { naive_pearson(&wp.panel.column(i), &wp.panel.column(j)) };
                assert!((cm.get(i, j) - want).abs() < 1e-12, "{} {i} {j}", wp.window);
            }
        }
    }
}

#[test]
fn second_half_1987_reproduces_bundled_table() {
    let input = prepare_input(&fixture_config(std::path::Path::new("unused"))).unwrap();
    let wp = input.partition.windows.iter().find(|w| w.window.label() == "1987H2").unwrap();
    let cm = corr_matrix(wp).unwrap();
    let table = table1_matrix::<f64>(2).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            assert!((cm.get(i, j) - table.get(i, j)).abs() < 1e-12);
        }
    }
    let sm = sign_matrix(&cm, 0.0);
    let dec = decompose(&sm);
    assert_eq!((dec.transitive.len(), dec.frustrated.len(), dec.degenerate.len()), (4, 6, 0));
    assert!(preorder_cover(&dec, cm.sectors()));
    assert_eq!(phi_direct(&sm, &SectorSubset::full(5).unwrap()).unwrap().phi, Sign::Plus);
}

#[test]
fn pipeline_writes_series_for_every_level_four_subset() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = run_pipeline(&fixture_config(dir.path())).unwrap();
    assert_eq!(manifest.windows.len(), 4);
    let loo: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("series/leave_one_out.json")).unwrap()).unwrap();
    let loo = loo.as_array().unwrap();
    assert_eq!(loo.len(), 5);
    for s in loo {
        assert_eq!(s["level"], 4);
        assert_eq!(s["points"].as_array().unwrap().len(), 4);
    }
    for a in &manifest.artifacts {
        assert!(dir.path().join(a).is_file(), "{a}");
    }
    let top = std::fs::read_to_string(dir.path().join("series/rho_R5.csv")).unwrap();
    assert!(top.contains("87.5,CRB+USB+SPX+USD+XAU,5,8.37009e-7"));
}

#[test]
fn log_returns_mode_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fixture_config(dir.path());
    cfg.returns = ReturnsMode::Log;
    let manifest = run_pipeline(&cfg).unwrap();
    assert_eq!(manifest.windows.len(), 4);
}

#[test]
fn short_windows_are_skipped_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fixture_config(dir.path());
    cfg.min_obs = 131;
    let manifest = run_pipeline(&cfg).unwrap();
    assert!(!manifest.skipped_windows.is_empty());
    assert_eq!(manifest.windows.len() + manifest.skipped_windows.len(), 4);
}
