use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn maass(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maass"))
        .args(args)
        .current_dir(cwd)
        .env_remove("MAASS_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn record_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json") && !n.contains("verify"))
        .collect();
    names.sort();
    names
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = maass(&["search", "--r-min", "5", "--r-max", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("r_min"));
    assert_eq!(maass(&["search", "--bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(maass(&["verify", "missing.json"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("bad.toml"), "eps = -1\n").unwrap();
    let o = maass(&["--config", "bad.toml", "search", "--r-min", "1", "--r-max", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_verify_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["search", "--symmetry", "odd", "--r-min", "9", "--r-max", "10.5", "--output-dir", "out"];
    let o = maass(&args, d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = d.join("out");
    assert_eq!(record_files(&out), vec!["odd_9.533695261354.json".to_string()]);
    let record = out.join("odd_9.533695261354.json");
    let first = fs::read(&record).unwrap();

    let csv = fs::read_to_string(out.join("odd_9.533695261354.coefficients.csv")).unwrap();
    assert!(csv.starts_with("index,value\n1,1.0000000000000000e0\n"));

    let log = fs::read_to_string(out.join("search-odd.log")).unwrap();
    let points = log.lines().filter(|l| !l.starts_with('#')).count();
    assert!(points > 5);
    assert!(log.contains("# accepted r=9.53369526135"));

    // a second run must choose: resume or overwrite
    assert_eq!(maass(&args, d).status.code(), Some(2));
    let mut again = args.to_vec();
    again.push("--overwrite");
    assert!(maass(&again, d).status.success());
    assert_eq!(fs::read(&record).unwrap(), first);
    let mut resume = args.to_vec();
    resume.push("--resume");
    assert!(maass(&resume, d).status.success());
    let mut other = resume.clone();
    other[6] = "11";
    assert_eq!(maass(&other, d).status.code(), Some(2), "resume with a different range");

    let v = maass(&["verify", record.to_str().unwrap(), "--output-dir", "out"], d);
    assert!(v.status.success(), "{}", stdout(&v));
    assert!(stdout(&v).contains("result     PASS"));
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("odd_9.533695261354.verify.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);

    // corrupt a_2
    let mut rec: serde_json::Value = serde_json::from_slice(&first).unwrap();
    let a2 = rec["coefficients"][1].as_f64().unwrap();
    rec["coefficients"][1] = (a2 + 1e-3).into();
    fs::write(d.join("corrupt.json"), serde_json::to_vec(&rec).unwrap()).unwrap();
    let v = maass(&["verify", "corrupt.json", "--output-dir", "out"], d);
    assert_eq!(v.status.code(), Some(1));
    let text = stdout(&v);
    let hecke = text.lines().find(|l| l.starts_with("hecke")).unwrap();
    assert!(hecke.ends_with("FAIL"), "{hecke}");

    // a record missing a field names it
    rec.as_object_mut().unwrap().remove("symmetry");
    fs::write(d.join("broken.json"), serde_json::to_vec(&rec).unwrap()).unwrap();
    let v = maass(&["verify", "broken.json"], d);
    assert_eq!(v.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&v.stderr).contains("symmetry"));

    // stats on the record
    let s = maass(&["stats", record.to_str().unwrap(), "--grid-n", "32", "--output-dir", "out"], d);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let sd = out.join("odd_9.533695261354.stats");
    let grid = fs::read_to_string(sd.join("waveform_grid.csv")).unwrap();
    assert_eq!(grid.lines().next(), Some("x,y,f"));
    assert_eq!(grid.lines().count(), 1 + 1024);
    for (name, header) in [
        ("value_histogram.csv", "bin_center,empirical_density,gaussian_density"),
        ("value_cdf.csv", "value,empirical_cdf,gaussian_cdf"),
        ("sato_tate_histogram.csv", "bin_center,empirical_density,semicircle_density"),
        ("sato_tate_cdf.csv", "a_p,empirical_cdf,semicircle_cdf"),
    ] {
        let text = fs::read_to_string(sd.join(name)).unwrap();
        assert_eq!(text.lines().next(), Some(header), "{name}");
    }
    // grid values are written with 17 significant digits and parse back exactly
    let row: Vec<f64> = grid.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row.len(), 3);

    let s = maass(&["stats", record.to_str().unwrap(), "--grid-n", "32", "--region", "reference", "--output-dir", "reference"], d);
    assert!(s.status.success());
    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(d.join("reference/odd_9.533695261354.stats/stats.json")).unwrap()).unwrap();
    assert_eq!(meta["region_choice"], "reference");
    assert_eq!(meta["region"]["x_min"].as_f64(), Some(-0.3));
    assert_eq!(meta["region"]["x_max"].as_f64(), Some(-0.29215));
    assert_eq!(meta["region"]["y_min"].as_f64(), Some(1.1));
    assert_eq!(meta["region"]["y_max"].as_f64(), Some(1.10785));
}

#[test]
fn output_dir_from_environment_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = Command::new(env!("CARGO_BIN_EXE_maass"))
        .args(["eisenstein", "--r", "3", "--n-max", "50", "--output", "e.json"])
        .current_dir(d)
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_maass"))
        .args(["verify", "e.json"])
        .env("MAASS_OUTPUT_DIR", "from-env")
        .current_dir(d)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(d.join("from-env/e.verify.json").exists());
    fs::write(d.join("c.toml"), "output_dir = \"from-file\"\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_maass"))
        .args(["--config", "c.toml", "verify", "e.json"])
        .env("MAASS_OUTPUT_DIR", "from-env")
        .current_dir(d)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(d.join("from-file/e.verify.json").exists());
}

#[test]
fn eisenstein_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(maass(&["eisenstein", "--r", "12.5", "--n-max", "500", "--output", "eis.json"], d).status.success());
    let v = maass(&["verify", "eis.json", "--output-dir", "out"], d);
    assert!(v.status.success());
    let text = stdout(&v);
    assert!(text.contains("holds trivially"), "{text}");
    assert!(text.lines().find(|l| l.starts_with("hecke")).unwrap().ends_with("PASS"));
}

#[test]
fn bessel_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = maass(&["bessel", "--r", "100", "--x-min", "0.5", "--x-max", "200", "--n-points", "400"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,value,regime,est_error"));
    let rows: Vec<(f64, f64, String)> = lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[1].parse().unwrap(), c[2].to_string())
        })
        .collect();
    assert_eq!(rows.len(), 400);
    let below: Vec<f64> = rows.iter().filter(|r| r.0 < 100.0).map(|r| r.1).collect();
    assert!(below.windows(2).filter(|w| w[0] * w[1] < 0.0).count() > 10);
    assert!(rows.iter().filter(|r| r.0 > 120.0).all(|r| r.1 > 0.0));
    assert!(rows.iter().any(|r| r.2 == "transitional"));

    let o = maass(&["bessel", "--r", "0", "--x-min", "1", "--x-max", "1", "--n-points", "1"], dir.path());
    let text = stdout(&o);
    let v: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.421_024_438_240_708_3).abs() < 1e-13);

    let o = maass(&["bessel", "--r", "10", "--x-min", "0", "--x-max", "1", "--n-points", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
