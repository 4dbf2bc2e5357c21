//! Config handling, report determinism, and the run modes end to end on
//! small fixtures.

use std::io::Write;

use tempfile::TempDir;

use pstab_cli::config::{Algorithm, ConfigFile, ExperimentConfig, Mode};
use pstab_cli::error::AppError;
use pstab_cli::estimate::run_estimate;
use pstab_cli::kernel_exp::run_kernel_experiment;
use pstab_cli::report::write_json;
use pstab_cli::sparse_exp::run_sparse_experiment;

fn base_config(mode: &str) -> ConfigFile {
    ConfigFile {
        mode: Some(mode.to_string()),
        ..ConfigFile::default()
    }
}

fn resolve(file: ConfigFile) -> ExperimentConfig {
    ExperimentConfig::resolve(file).unwrap()
}

#[test]
fn config_file_parses_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("exp.toml");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(
        f,
        "mode = \"sparse\"\n\
         matrix = \"synth:tridiag:50\"\n\
         k = 20\n\
         seed = 9\n\
         candidates = [\"identity\", \"blk:5\"]\n"
    )
    .unwrap();
    let file = ConfigFile::load(&path).unwrap();
    let overrides = ConfigFile {
        k: Some(50),
        ..ConfigFile::default()
    };
    let cfg = resolve(file.merged_with(overrides));
    assert_eq!(cfg.mode, Mode::Sparse);
    assert_eq!(cfg.k, 50, "flag must beat the file");
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.candidates, vec!["identity", "blk:5"]);
    assert_eq!(cfg.algorithm, Algorithm::Alg2);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "mode = \"sparse\"\nnot_a_key = 1\n").unwrap();
    assert!(ConfigFile::load(&path).is_err());
}

#[test]
fn missing_mode_is_a_config_error() {
    let err = ExperimentConfig::resolve(ConfigFile::default()).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn numerical_failures_map_to_exit_code_two() {
    let err: AppError = pstab::Error::Breakdown { iteration: 3 }.into();
    assert_eq!(err.exit_code(), 2);
    let err: AppError = pstab::Error::InvalidParameter("k".into()).into();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn estimate_mode_requires_exactly_one_candidate() {
    let mut file = base_config("estimate");
    file.matrix = Some("synth:tridiag:10".into());
    file.candidates = Some(vec!["identity".into(), "blk:2".into()]);
    let err = run_estimate(&resolve(file)).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn estimate_on_full_block_candidate_is_zero() {
    let mut file = base_config("estimate");
    file.matrix = Some("synth:tridiag:30".into());
    file.candidates = Some(vec!["blk:30".into()]);
    file.exact = Some(true);
    file.k = Some(5);
    let report = run_estimate(&resolve(file)).unwrap();
    assert!(report.estimate <= 1e-10);
    assert_eq!(report.exact.unwrap(), 0.0);
}

#[test]
fn estimate_report_is_byte_identical_across_runs() {
    let mut file = base_config("estimate");
    file.matrix = Some("synth:blockdiag:40:5".into());
    file.candidates = Some(vec!["blk:5".into()]);
    file.seed = Some(1234);
    file.exact = Some(true);
    let cfg = resolve(file);
    let dir = TempDir::new().unwrap();
    let out1 = dir.path().join("a").to_str().unwrap().to_string();
    let out2 = dir.path().join("b").to_str().unwrap().to_string();
    let r1 = run_estimate(&cfg).unwrap();
    write_json(&out1, &r1).unwrap();
    let r2 = run_estimate(&cfg).unwrap();
    write_json(&out2, &r2).unwrap();
    let b1 = std::fs::read(format!("{out1}.json")).unwrap();
    let b2 = std::fs::read(format!("{out2}.json")).unwrap();
    assert_eq!(b1, b2);
}

#[test]
fn estimate_concentrates_at_large_k() {
    let mut file = base_config("estimate");
    file.matrix = Some("synth:blockdiag:30:6".into());
    file.candidates = Some(vec!["blk:3".into()]);
    file.k = Some(10_000);
    file.exact = Some(true);
    file.seed = Some(42);
    let report = run_estimate(&resolve(file)).unwrap();
    assert!(
        report.relative_error.unwrap() <= 0.05,
        "relative error {} too large at k = 10,000",
        report.relative_error.unwrap()
    );
}

#[test]
fn sparse_experiment_ratios_are_at_least_one() {
    let mut file = base_config("sparse");
    file.matrix = Some("synth:tridiag:100".into());
    file.candidates = Some(vec!["identity".into(), "blk:1".into(), "blk:10".into()]);
    file.k = Some(10);
    file.trials = Some(100);
    file.seed = Some(3);
    let report = run_sparse_experiment(&resolve(file)).unwrap();
    assert!(report.ratio.selector_min >= 1.0);
    assert!(report.ratio.selector_mean >= 1.0);
    assert!(report.ratio.worst_case >= 1.0);
    assert!(report.ratio.random >= 1.0);
    assert_eq!(report.chosen_counts.iter().sum::<u64>(), 100);
}

#[test]
fn single_candidate_makes_every_ratio_one() {
    let mut file = base_config("sparse");
    file.matrix = Some("synth:tridiag:60".into());
    file.candidates = Some(vec!["blk:6".into()]);
    file.trials = Some(10);
    let report = run_sparse_experiment(&resolve(file)).unwrap();
    assert_eq!(report.ratio.worst_case, 1.0);
    assert_eq!(report.ratio.random, 1.0);
    assert_eq!(report.ratio.selector_min, 1.0);
    assert_eq!(report.ratio.selector_mean, 1.0);
    assert_eq!(report.ratio.selector_max, 1.0);
}

#[test]
fn block_structured_matrix_selector_beats_random_policy() {
    let mut file = base_config("sparse");
    file.matrix = Some("synth:blockdiag:300:10".into());
    file.candidates = Some(vec![
        "identity".into(),
        "blk:1".into(),
        "blk:10".into(),
        "blk:25".into(),
    ]);
    file.k = Some(10);
    file.trials = Some(100);
    file.seed = Some(17);
    let report = run_sparse_experiment(&resolve(file)).unwrap();
    assert!(
        report.ratio.selector_mean <= report.ratio.random,
        "selector {} vs random {}",
        report.ratio.selector_mean,
        report.ratio.random
    );
}

#[test]
fn sparse_report_files_are_written_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("exp").to_str().unwrap().to_string();
    let mut file = base_config("sparse");
    file.matrix = Some("synth:blockdiag:80:8".into());
    file.candidates = Some(vec!["identity".into(), "blk:8".into()]);
    file.trials = Some(20);
    file.seed = Some(5);
    file.out = Some(out.clone());
    let cfg = resolve(file);
    run_sparse_experiment(&cfg).unwrap();
    let json1 = std::fs::read(format!("{out}.json")).unwrap();
    let iters_csv = std::fs::read_to_string(format!("{out}_iterations.csv")).unwrap();
    let ratios_csv = std::fs::read_to_string(format!("{out}_ratios.csv")).unwrap();
    assert!(iters_csv.starts_with("candidate,iterations,converged"));
    assert!(ratios_csv.contains("synth:blockdiag:80:8"));
    run_sparse_experiment(&cfg).unwrap();
    let json2 = std::fs::read(format!("{out}.json")).unwrap();
    assert_eq!(json1, json2);
}

#[test]
fn unconverged_candidates_are_censored_with_the_cap() {
    let mut file = base_config("sparse");
    file.matrix = Some("synth:tridiag:200".into());
    file.candidates = Some(vec!["identity".into(), "blk:200".into()]);
    file.max_iterations = Some(3); // nothing nontrivial converges in 3
    file.trials = Some(5);
    let report = run_sparse_experiment(&resolve(file)).unwrap();
    assert!(report.ratio.censored);
    let identity = &report.candidates[0];
    assert!(!identity.converged);
    // the exact-factorization candidate converges in one iteration even here
    assert!(report.candidates[1].converged);
    assert_eq!(report.ratio.worst_case, 3.0);
}

#[test]
fn adaptive_algorithm_runs_through_the_harness() {
    let mut file = base_config("sparse");
    file.matrix = Some("synth:blockdiag:120:10".into());
    file.candidates = Some(vec!["identity".into(), "blk:1".into(), "blk:10".into()]);
    file.algorithm = Some("alg3".into());
    file.epsilon = Some(0.25);
    file.delta = Some(0.2);
    file.trials = Some(10);
    let report = run_sparse_experiment(&resolve(file)).unwrap();
    assert_eq!(report.algorithm, "alg3");
    assert!(report.k.is_none());
    assert!(report.epsilon.is_some());
    assert!(report.ratio.selector_mean >= 1.0);
}

#[test]
fn kernel_smoke_cell_has_all_counts_and_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("kern").to_str().unwrap().to_string();
    let mut file = base_config("kernel");
    file.dataset = Some("synth:blobs:40:3:4".into());
    file.length_scales = Some(vec![0.5]);
    file.noise_levels = Some(vec![1e-2]);
    file.rank = Some(5);
    file.seed = Some(8);
    file.out = Some(out.clone());
    let report = run_kernel_experiment(&resolve(file)).unwrap();
    assert_eq!(report.cells.len(), 1);
    let cell = &report.cells[0];
    assert!(cell.iters_none >= 1);
    assert!(cell.iters_block >= 1);
    assert!(cell.iters_lowrank >= 1);
    assert!(cell.iters_selected >= 1);
    let grid = std::fs::read_to_string(format!("{out}_grid.csv")).unwrap();
    assert!(grid.lines().count() == 2);
    assert!(std::fs::metadata(format!("{out}.json")).unwrap().len() > 0);
}

#[test]
fn kernel_reports_are_thread_count_independent() {
    let mut file = base_config("kernel");
    file.dataset = Some("synth:blobs:60:4:5".into());
    file.length_scales = Some(vec![0.1, 1.0]);
    file.noise_levels = Some(vec![1e-2]);
    file.rank = Some(5);
    file.seed = Some(21);
    let cfg = resolve(file);
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_kernel_experiment(&cfg).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_kernel_experiment(&cfg).unwrap());
    assert_eq!(serial.cells, parallel.cells);
}

#[test]
fn csv_dataset_ingestion_reads_features_and_target() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("data.csv");
    std::fs::write(&path, "x1,x2,y\n0.0,1.0,2.0\n1.0,0.5,-1.0\n3.0,2.0,0.25\n").unwrap();
    let data =
        pstab_cli::dataset_io::read_csv_dataset(&path, Some("y")).unwrap();
    assert_eq!(data.n_points(), 3);
    assert_eq!(data.n_features(), 2);
    assert_eq!(data.targets(), &[2.0, -1.0, 0.25]);
    assert_eq!(data.point(1), &[1.0, 0.5]);
    // default target column is the last one
    let data2 = pstab_cli::dataset_io::read_csv_dataset(&path, None).unwrap();
    assert_eq!(data2.targets(), &[2.0, -1.0, 0.25]);
    // unknown target column is a config error
    assert!(pstab_cli::dataset_io::read_csv_dataset(&path, Some("nope")).is_err());
    // non-numeric cells are rejected with position info
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1.0,2.0\noops,3.0\n").unwrap();
    let err = pstab_cli::dataset_io::read_csv_dataset(&bad, None)
        .unwrap_err()
        .to_string();
    assert!(err.contains("row 3"), "{err}");
}
