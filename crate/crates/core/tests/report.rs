use cwdlab::report::*;
use cwdlab::Error;
use std::fs;
use std::path::Path;

fn cfg(group: &str, verb: &str) -> RunConfig {
    RunConfig { group: group.into(), verb: verb.into(), normalized: true, ..Default::default() }
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn sg_spectrum_example() {
    let mut c = cfg("pcf", "spectrum");
    c.params.dim = Some(3);
    let rep = run(&c).unwrap();
    let t = rep.table("spectrum").unwrap();
    let mut full: Vec<f64> = t
        .rows
        .iter()
        .filter(|r| r[0] == Cell::Text("full".into()))
        .map(|r| r[1].as_f64().unwrap())
        .collect();
    full.sort_by(f64::total_cmp);
    full.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let want = [1.0 / 6.0, 4.0 / 6.0, 1.0];
    assert_eq!(full.len(), 3);
    for (g, w) in full.iter().zip(want) {
        assert!((g - w).abs() < 1e-12);
    }
    assert!(rep.verdict("sg_quotient_eigenvalues").unwrap().pass);
}

#[test]
fn vicsek_example() {
    let mut c = cfg("pcf", "vicsek");
    c.params.r = Some(0.25);
    c.params.level = Some(4);
    let rep = run(&c).unwrap();
    assert!(rep.passed());
    assert!(rep.verdict("off_diagonal_mass_zero").unwrap().pass);
}

#[test]
fn constant_density_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("x,g\n");
    for i in 0..=256 {
        text.push_str(&format!("{},1\n", i as f64 / 256.0));
    }
    let mut c = cfg("diag", "g1d");
    c.inputs.density = Some(write(dir.path(), "g.csv", &text));
    let rep = run(&c).unwrap();
    let v = rep.verdict("gaussian_admissible").unwrap();
    assert!(v.pass);
    assert!((v.constants["c"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn normalized_runs_are_byte_identical() {
    let mut c = cfg("diag", "cap");
    c.params.fractal = Some("path".into());
    c.params.points = Some(257);
    let a = run(&c).unwrap().to_json().unwrap();
    let b = run(&c).unwrap().to_json().unwrap();
    assert_eq!(a, b);
    assert!(!a.contains("wall_time_ms"));
}

#[test]
fn report_json_round_trip() {
    let mut t = Table::new("x", &[("a", ColumnKind::Float), ("b", ColumnKind::Int), ("c", ColumnKind::Text)]);
    t.push(vec![f64::INFINITY.into(), 3i64.into(), "hi, there".into()]);
    t.push(vec![f64::NAN.into(), (-1i64).into(), "".into()]);
    t.push(vec![f64::NEG_INFINITY.into(), 0i64.into(), "z".into()]);
    t.push(vec![0.1.into(), 7i64.into(), "w".into()]);
    let mut c = cfg("pcf", "spectrum");
    c.params.dim = Some(3);
    let mut rep = run(&c).unwrap();
    rep.tables.push(t);
    let text = rep.to_json().unwrap();
    let back = Report::from_json(&text).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
    let col = back.table("x").unwrap().column("a").unwrap();
    assert!(col[1].as_f64().unwrap().is_nan());
    assert_eq!(col[0].as_f64(), Some(f64::INFINITY));
    assert_eq!(col[2].as_f64(), Some(f64::NEG_INFINITY));
    assert_eq!(col[3].as_f64(), Some(0.1));
}

#[test]
fn csv_escapes_and_spells_non_finite() {
    let mut t = Table::new("x", &[("a", ColumnKind::Float), ("c", ColumnKind::Text)]);
    t.push(vec![f64::INFINITY.into(), "a,b".into()]);
    let csv = t.to_csv().unwrap();
    assert_eq!(csv, "a,c\ninf,\"a,b\"\n");
}

#[test]
fn artifacts_written_under_out() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg("pcf", "spectrum");
    c.params.dim = Some(3);
    c.csv = true;
    c.json = true;
    c.out = Some(dir.path().to_path_buf());
    let rep = run(&c).unwrap();
    assert!(!rep.artifacts.is_empty());
    for a in &rep.artifacts {
        assert!(dir.path().join(a).is_file(), "{a}");
    }
    assert!(dir.path().join("report.json").is_file());
    assert!(dir.path().join("tables/spectrum.csv").is_file());
    let on_disk = fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(Report::from_json(&on_disk).unwrap().meta.config_hash, c.hash());
}

#[test]
fn config_hash_ignores_output_location() {
    let mut a = cfg("diag", "rh");
    let mut b = a.clone();
    a.out = Some("one".into());
    b.out = Some("two".into());
    assert_eq!(a.hash(), b.hash());
    b.params.t = Some(-0.5);
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn toml_config_with_flag_overlay() {
    let text = "group = \"filling\"\nverb = \"build\"\nseed = 4\n[params]\na = 10.0\nlambda = 8.0\n";
    let mut c = RunConfig::from_toml(text).unwrap();
    assert_eq!(c.params.a, Some(10.0));
    let mut flags = RunConfig::default();
    flags.params.a = Some(12.0);
    flags.csv = true;
    c.overlay(&flags);
    assert_eq!((c.params.a, c.params.lambda, c.seed, c.csv), (Some(12.0), Some(8.0), Some(4), true));
    assert!(c.validate().is_ok());
    assert!(matches!(RunConfig::from_toml("bogus = 1\n"), Err(Error::Config(_))));
}

#[test]
fn validate_rejects_bad_parameters() {
    let mut c = cfg("filling", "build");
    c.params.lambda = Some(2.0);
    assert!(matches!(c.validate(), Err(Error::Config(_))));
    let mut c = cfg("diag", "rh");
    c.params.t = Some(-1.0);
    assert!(c.validate().is_err());
    assert!(cfg("diag", "nope").validate().is_err());
    assert!(cfg("nope", "cap").validate().is_err());
    let mut c = cfg("filling", "build");
    c.params.alpha = Some(9.0);
    assert!(c.validate().is_err());
}

#[test]
fn ingest_distance_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.csv", "id,a,b,c\na,0,1,2\nb,1,0,1.5\nc,2,1.5,0\n");
    let s = ingest_points(&p).unwrap();
    assert_eq!(s.len(), 3);
    assert_eq!(s.dist(0, 2), 2.0);
    assert_eq!(s.dist(2, 1), 1.5);
}

#[test]
fn ingest_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.csv", "id,x,y\np,0,0\nq,3,4\n");
    assert_eq!(ingest_points(&p).unwrap().dist(0, 1), 5.0);
}

#[test]
fn asymmetric_matrix_names_the_entry() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.csv", "id,a,b,c\na,0,1,2\nb,1,0,1.5\nc,2,1.7,0\n");
    match ingest_points(&p) {
        Err(Error::Invariant { row, col, .. }) => assert!(row >= 2 && col >= 2, "{row},{col}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bad_number_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.csv", "id,x\na,0\nb,zz\n");
    assert!(matches!(ingest_points(&p), Err(Error::Parse { row: 3, col: 2, .. })));
}

#[test]
fn negative_density_is_an_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "g.csv", "x,g\n0,1\n0.5,-2\n1,1\n");
    assert!(matches!(ingest_density(&p), Err(Error::Invariant { row: 3, .. })));
}

#[test]
fn graph_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "g.csv", "kind,a,b,value\ne,u,v,2\ne,v,w,1\nm,w,,3\n");
    let g = ingest_graph(&p).unwrap();
    assert_eq!(g.len(), 3);
    assert_eq!(g.measure(), &[1.0, 1.0, 3.0]);
    let bad = write(dir.path(), "b.csv", "kind,a,b,value\ne,u,v,2\ne,v,v,1\n");
    assert!(matches!(ingest_graph(&bad), Err(Error::Invariant { row: 3, col: 3, .. })));
    let neg = write(dir.path(), "n.csv", "kind,a,b,value\ne,u,v,-2\n");
    assert!(matches!(ingest_graph(&neg), Err(Error::Invariant { row: 2, col: 4, .. })));
    let kind = write(dir.path(), "k.csv", "kind,a,b,value\nx,u,v,2\n");
    assert!(matches!(ingest_graph(&kind), Err(Error::Parse { row: 2, col: 1, .. })));
}

#[test]
fn cap_on_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("kind,a,b,value\n");
    for i in 0..64 {
        text.push_str(&format!("e,{i},{},1\n", i + 1));
    }
    let mut c = cfg("diag", "ehi");
    c.inputs.graph = Some(write(dir.path(), "g.csv", &text));
    let rep = run(&c).unwrap();
    assert!(!rep.verdicts.is_empty());
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_cwdlab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_exit_codes() {
    let (code, text) = cli(&["diag", "rh", "--t", "-0.5", "--normalized"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("PASS a_infinity"));
    let (code, text) = cli(&["diag", "g1d", "--fractal", "half"]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("FAIL gaussian_admissible"));
    assert_eq!(cli(&["diag", "nope"]).0, 2);
    assert_eq!(cli(&["filling", "build", "--lambda", "2"]).0, 2);
}

#[test]
fn cli_config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "group = \"pcf\"\nverb = \"spectrum\"\n[params]\ndim = 2\n");
    let out = dir.path().join("o");
    let (code, _) = cli(&[
        "pcf", "spectrum", "--config", cfg.to_str().unwrap(), "--dim", "4", "--normalized", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let rep = Report::from_json(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let n = rep.table("spectrum").unwrap().rows.iter().filter(|r| r[0] == Cell::Text("quotient".into())).count();
    assert_eq!(n, 4);
}
