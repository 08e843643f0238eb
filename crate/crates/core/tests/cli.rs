use std::path::Path;
use std::process::{Command, Output};

use qtraj::cli::{COMPARISON_FILE, HISTOGRAMS_FILE, MANIFEST_FILE, TRAJECTORIES_FILE};
use qtraj::config::{load_config, parse_config, Overrides};
use qtraj::ensemble::{ks_test, oracle, slice_report, slice_values, KS_ALPHA};
use qtraj::io::{
    file_digest, read_histograms, read_manifest, read_trajectories, write_histograms, write_trajectories,
    HistogramDocument, RunSection,
};
use qtraj::{run_ensemble, Observable, QtrajError, Theory};
use sha2::{Digest, Sha256};

const SMALL: &str = "\
# quick run
n_traj = 150
t_final_ps = 1.0
dt_ps = 0.02
slices_ps = 0, 0.5, 1
bins = 40
";

fn qtraj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtraj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn sha256_hex(path: &Path) -> String {
    Sha256::digest(std::fs::read(path).unwrap())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[test]
fn run_is_byte_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let status = qtraj(&["run", "--config", &cfg, "--seed", "5", "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    }
    for file in [TRAJECTORIES_FILE, HISTOGRAMS_FILE] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn manifest_lists_every_output_with_its_digest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    assert!(qtraj(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let manifest = read_manifest(&out.join(MANIFEST_FILE)).unwrap();
    let mut listed: Vec<&str> = manifest.outputs.iter().map(|o| o.file.as_str()).collect();
    listed.sort();
    assert_eq!(listed, [HISTOGRAMS_FILE, TRAJECTORIES_FILE]);
    for entry in &manifest.outputs {
        let path = out.join(&entry.file);
        assert_eq!(entry.sha256, sha256_hex(&path));
        assert_eq!(entry.bytes, std::fs::metadata(&path).unwrap().len());
    }
    assert_eq!(manifest.config.ensemble.n_traj, 150);
    assert_eq!(manifest.master_seed, 1);
    assert!(manifest.finished_unix >= manifest.started_unix);
    let total: usize = manifest.status_counts.iter().map(|(_, c)| c.completed + c.exited_domain + c.node_stalled).sum();
    assert_eq!(total, 150);

    // the echoed configuration reproduces the data files
    let echo = manifest.config.clone();
    let result = run_ensemble(&echo.ensemble, &echo.params()).unwrap();
    let again = dir.path().join("again.csv");
    write_trajectories(&result, &again).unwrap();
    assert_eq!(sha256_hex(&again), sha256_hex(&out.join(TRAJECTORIES_FILE)));
}

#[test]
fn trajectory_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config(Some(SMALL), &Overrides::default()).unwrap();
    let result = run_ensemble(&config.ensemble, &config.params()).unwrap();
    let path = dir.path().join(TRAJECTORIES_FILE);
    write_trajectories(&result, &path).unwrap();

    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("traj_id,t,x,p,status\n"));
    assert!(text.ends_with('\n'));
    let rows = read_trajectories(&path).unwrap();
    let expected: usize = result.trajectories.iter().map(|t| t.samples.len()).sum();
    assert_eq!(rows.len(), expected);
    assert_eq!(text.lines().count(), expected + 1);

    let mut it = rows.iter();
    for (id, traj) in result.trajectories.iter().enumerate() {
        for s in &traj.samples {
            let row = it.next().unwrap();
            assert_eq!(row.traj_id, id);
            assert_eq!((row.t.to_bits(), row.x.to_bits(), row.p.to_bits()), (s.t.to_bits(), s.x.to_bits(), s.p.to_bits()));
            assert_eq!(row.status, traj.status.as_str());
        }
    }
}

#[test]
fn four_bin_histogram_document() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SMALL}bins = 4\n").replace("bins = 40\n", "");
    let config = parse_config(Some(&text), &Overrides::default()).unwrap();
    let params = config.params();
    let result = run_ensemble(&config.ensemble, &params).unwrap();
    let report = slice_report(&result, 0.5, Observable::Position).unwrap();
    let doc = HistogramDocument::new(vec![RunSection {
        theory: result.config.theory,
        config_digest: result.config_digest.clone(),
        status_counts: result.status_counts(),
        slices: vec![report.clone()],
    }]);
    let path = dir.path().join(HISTOGRAMS_FILE);
    write_histograms(&doc, &path).unwrap();

    let raw: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let slice = &raw["runs"][0]["slices"][0];
    assert_eq!(slice["histogram"]["edges"].as_array().unwrap().len(), 5);
    assert_eq!(slice["histogram"]["counts"].as_array().unwrap().len(), 4);
    assert_eq!(slice["oracle_density"].as_array().unwrap().len(), 4);

    let back = read_histograms(&path).unwrap();
    let h = &back.runs[0].slices[0].histogram;
    let mass: f64 = h.density.iter().enumerate().map(|(i, d)| d * h.bin_width(i)).sum();
    assert!((mass - 1.0).abs() < 1e-12);

    let values = slice_values(&result, 0.5, Observable::Position).unwrap().values;
    let cdf = oracle::position_cdf(&params, 0.5);
    assert_eq!(back.runs[0].slices[0].ks, ks_test(&values, |x| cdf.eval(x), KS_ALPHA));
    assert_eq!(back, doc);
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "theory = dbb\nseed = 3\nout_dir = from-file\n");
    let overrides = Overrides { theory: Some(Theory::Revised), seed: Some(7), ..Default::default() };
    let config = load_config(Some(Path::new(&cfg)), &overrides).unwrap();
    assert_eq!(config.ensemble.theory, Theory::Revised);
    assert_eq!(config.ensemble.master_seed, 7);
    assert_eq!(config.out_dir, Path::new("from-file"));

    let plain = load_config(Some(Path::new(&cfg)), &Overrides::default()).unwrap();
    assert_eq!(plain.ensemble.theory, Theory::Dbb);
    assert_eq!(plain.ensemble.master_seed, 3);
}

#[test]
fn empty_config_gives_the_reference_setup() {
    let config = parse_config(None, &Overrides::default()).unwrap();
    assert_eq!((config.x_half_nm, config.sigma_nm, config.mass_me), (50.0, 10.0, 1.0));
    assert_eq!(config.ensemble.n_traj, 40_000);
    assert_eq!(config.ensemble.schedule.t0, 0.0);
    assert_eq!(config.ensemble.schedule.t_final, 5.0);
    assert_eq!(config.ensemble.slice_times, [0.0, 3.5, 5.0]);
}

#[test]
fn invalid_values_name_their_key() {
    for (text, key) in [
        ("sigma_nm = 0", "sigma_nm"),
        ("colour = blue", "colour"),
        ("theory = newtonian", "theory"),
        ("slices_ps = 0, 9", "slices_ps"),
    ] {
        match parse_config(Some(text), &Overrides::default()) {
            Err(QtrajError::Config { key: k, .. }) => assert_eq!(k, key, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn bad_config_exits_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sigma_nm = 0\n");
    let out = qtraj(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma_nm"));
}

#[test]
fn verify_passes_on_defaults() {
    let out = qtraj(&["verify"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(!stdout.contains("[FAIL]"));
    assert!(stdout.matches("[PASS]").count() >= 4);
}

#[test]
fn compare_writes_a_side_by_side_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("cmp");
    let status = qtraj(&["compare", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let table = std::fs::read_to_string(out.join(COMPARISON_FILE)).unwrap();
    let mut lines = table.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert!(header.contains(&"dip_ratio") && header.contains(&"ks_statistic"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    // 3 slices x 2 observables x 2 theories
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.len() == header.len()));
    assert!(rows.iter().any(|r| r[2] == "dbb") && rows.iter().any(|r| r[2] == "revised"));
    let manifest = read_manifest(&out.join(MANIFEST_FILE)).unwrap();
    assert_eq!(manifest.status_counts.len(), 2);
    for entry in &manifest.outputs {
        assert_eq!(entry, &file_digest(&out.join(&entry.file)).unwrap());
    }
}
