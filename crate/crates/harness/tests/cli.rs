//! Command-line behavior: exit codes, file outputs, and reproducibility.

use lasso_lab_harness::cli::{run, OUT_DIR_ENV};

fn lasso_lab(args: &[&str]) -> i32 {
    let argv: Vec<String> = std::iter::once("lasso-lab".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    run(argv)
}

#[test]
fn unknown_flag_exits_two() {
    assert_eq!(lasso_lab(&["--bogus"]), 2);
    assert_eq!(lasso_lab(&["table1", "--sigmas", "banana"]), 2);
    assert_eq!(lasso_lab(&["nonexistent-subcommand"]), 2);
}

#[test]
fn help_exits_zero() {
    assert_eq!(lasso_lab(&["--help"]), 0);
}

#[test]
fn table1_noiseless_d4_writes_csv_cell_41() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = lasso_lab(&[
        "table1",
        "--dims",
        "4",
        "--sigmas",
        "inf",
        "--precision",
        "extended",
        "--out",
        out,
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert_eq!(csv, "1/SNR,d=4\ninf,41\n");
}

#[test]
fn table1_reruns_are_byte_identical() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    for dir in [&dir1, &dir2] {
        let code = lasso_lab(&[
            "table1",
            "--dims",
            "3,4",
            "--sigmas",
            "inf,4",
            "--trials",
            "6",
            "--seed",
            "11",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let a = std::fs::read(dir1.path().join("table1.csv")).unwrap();
    let b = std::fs::read(dir2.path().join("table1.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn oracle_check_passes_and_exits_zero() {
    assert_eq!(
        lasso_lab(&["oracle-check", "--d", "3", "--trials", "10", "--seed", "7"]),
        0
    );
}

#[test]
fn oracle_check_rejects_oversized_dimension() {
    assert_eq!(lasso_lab(&["oracle-check", "--d", "15"]), 2);
}

#[test]
fn path_writes_records_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = lasso_lab(&[
        "path",
        "--gen",
        "adversarial",
        "--d",
        "4",
        "--precision",
        "extended",
        "--format",
        "json",
        "--save-instance",
        "--out",
        out,
    ]);
    assert_eq!(code, 0);
    let path_json = std::fs::read_to_string(dir.path().join("path.json")).unwrap();
    let rec: lasso_lab_core::records::PathRecord = serde_json::from_str(&path_json).unwrap();
    assert_eq!(rec.count, 41);
    let restored = rec.into_path::<lasso_lab_core::dd::Dd>().unwrap();
    assert_eq!(restored.count(), 41);

    let inst_json = std::fs::read_to_string(dir.path().join("instance.json")).unwrap();
    let irec: lasso_lab_core::records::InstanceRecord = serde_json::from_str(&inst_json).unwrap();
    let inst = irec.into_instance().unwrap();
    assert_eq!(inst.d(), 4);

    // Solving the reloaded instance from the file gives the same path.
    let dir2 = tempfile::tempdir().unwrap();
    let code = lasso_lab(&[
        "path",
        "--file",
        dir.path().join("instance.json").to_str().unwrap(),
        "--precision",
        "extended",
        "--format",
        "json",
        "--out",
        dir2.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let again = std::fs::read_to_string(dir2.path().join("path.json")).unwrap();
    let rec2: lasso_lab_core::records::PathRecord = serde_json::from_str(&again).unwrap();
    assert_eq!(rec2.count, 41);
}

#[test]
fn bounds_subcommand_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let code = lasso_lab(&[
        "bounds",
        "--gen",
        "gaussian",
        "--n",
        "20",
        "--d",
        "8",
        "--seed",
        "4",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.path().join("bounds.json")).unwrap();
    assert!(text.contains("lipschitz_w_ok"));
}

#[test]
fn out_dir_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    // Env mutation is process-global; run the child binary instead.
    let exe = env!("CARGO_BIN_EXE_lasso-lab");
    let status = std::process::Command::new(exe)
        .args(["table1", "--dims", "3", "--sigmas", "inf", "--trials", "1"])
        .env(OUT_DIR_ENV, dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("table1.csv").exists());
}

#[test]
fn mnist_subcommand_runs_on_synthetic_idx_file() {
    let dir = tempfile::tempdir().unwrap();
    // Write a small synthetic IDX file.
    let side = 28usize;
    let count = 40usize;
    let mut pixels = vec![0u8; count * side * side];
    for img in 0..count {
        let cx = (img * 7) % side;
        let cy = (img * 13) % side;
        for r in 0..side {
            for c in 0..side {
                let dr = r as f64 - cx as f64;
                let dc = c as f64 - cy as f64;
                let v = 255.0 * (-((dr * dr + dc * dc) / side as f64)).exp();
                pixels[(img * side + r) * side + c] = v as u8;
            }
        }
    }
    let ds = lasso_lab_harness::ImageDataset {
        count,
        rows: side,
        cols: side,
        pixels,
        source_digest: 0,
    };
    let idx_path = dir.path().join("imgs.idx");
    std::fs::write(&idx_path, lasso_lab_harness::write_idx_images(&ds)).unwrap();

    let code = lasso_lab(&[
        "mnist",
        "--images",
        idx_path.to_str().unwrap(),
        "--n",
        "30",
        "--patch-sizes",
        "3",
        "--trials",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("mnist.csv")).unwrap();
    assert!(csv.starts_with("patch_size,feature_dim,mean_count"));
    assert!(csv.lines().nth(1).unwrap().starts_with("3,8,"));
}

#[test]
fn mnist_subcommand_missing_file_exits_one() {
    assert_eq!(
        lasso_lab(&["mnist", "--images", "/nonexistent/file.idx"]),
        1
    );
}
