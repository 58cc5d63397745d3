use hgr_core::io::document::parse_document;
use hgr_core::io::report::{compare_rows, write_compare};
use hgr_core::io::{generate_mosaic, run, FloorplanDocument, RunConfig};
use hgr_core::router::RouteMode;
use std::path::Path;
use std::process::Command;

fn write_instance(dir: &Path, n: usize, k: usize, seed: u64) -> std::path::PathBuf {
    let path = dir.join(format!("fp{n}_{k}_{seed}.txt"));
    std::fs::write(&path, generate_mosaic(n, k, seed).serialize()).unwrap();
    path
}

#[test]
fn csv_and_json_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_instance(dir.path(), 30, 50, 5);
    let outputs: Vec<(String, String, String)> = (0..2)
        .map(|i| {
            let mut cfg = RunConfig::new(&input);
            cfg.json = Some(dir.path().join(format!("r{i}.json")));
            let out = run(&cfg).unwrap();
            let mut csv_cfg = RunConfig::new(&input);
            csv_cfg.csv = Some(dir.path().join(format!("r{i}.csv")));
            run(&csv_cfg).unwrap();
            (
                out.stdout,
                std::fs::read_to_string(dir.path().join(format!("r{i}.csv"))).unwrap(),
                std::fs::read_to_string(dir.path().join(format!("r{i}.json"))).unwrap(),
            )
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].0, outputs[0].1);
    assert!(outputs[0].0.starts_with("net_id,degree,hpwl,routed_length,vias,status\n"));
    let json: serde_json::Value = serde_json::from_str(&outputs[0].2).unwrap();
    assert_eq!(json["nets"].as_array().unwrap().len(), 50);
}

#[test]
fn generated_document_round_trips() {
    let doc = generate_mosaic(10, 15, 9);
    let text = doc.serialize();
    let parsed = parse_document(&text).unwrap();
    assert_eq!(parsed, doc);
    let fp = parsed.to_floorplan().unwrap();
    let again = FloorplanDocument::from_floorplan(&fp);
    assert_eq!(again.to_floorplan().unwrap(), fp);
    assert_eq!(parse_document(&again.serialize()).unwrap(), again);
}

#[test]
fn compare_delta_is_the_difference_of_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_instance(dir.path(), 40, 60, 2);
    let single = |mode| {
        let mut cfg = RunConfig::new(&input);
        cfg.router.mode = mode;
        run(&cfg).unwrap().results.remove(0).1
    };
    let h = single(RouteMode::Hybrid);
    let s = single(RouteMode::StaircaseOnly);
    let mut cfg = RunConfig::new(&input);
    cfg.compare = true;
    cfg.csv = Some(dir.path().join("cmp.csv"));
    let out = run(&cfg).unwrap();
    assert!(out.stdout.is_empty());
    let table = std::fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    assert_eq!(table, write_compare(&compare_rows(&h, &s)));
    for line in table.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let v: Vec<f64> = f[1..].iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[0] - v[1] - v[2]).abs() < 1e-6, "{line}");
    }
    let total = table.lines().find(|l| l.starts_with("total_vias,")).unwrap();
    assert_eq!(total, format!("total_vias,{},{},{}", h.total_vias, s.total_vias, h.total_vias as i64 - s.total_vias as i64));
    for tag in ["hybrid", "staircase-only"] {
        assert!(dir.path().join(format!("cmp.{tag}.csv")).exists());
    }
}

fn hgr(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hgr")).args(args).output().unwrap()
}

#[test]
fn cli_generates_routes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let fp = p("fp.txt");
    assert!(hgr(&["gen", "--blocks", "12", "--nets", "20", "--seed", "4", "--out", &fp]).status.success());
    let out = hgr(&["route", &fp, "--json", &p("r.json"), "--svg", &p("svg")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let nets = csv.split("\n\n").next().unwrap();
    assert_eq!(nets.lines().count(), 21);
    assert!(csv.contains("\nmetric,value\n"));
    assert!(dir.path().join("svg/routes.svg").exists());
    assert!(dir.path().join("svg/congestion_M8.svg").exists());

    let cmp = hgr(&["route", &fp, "--compare", "--epe", "--cap", "s0:1=0"]);
    assert!(cmp.status.success(), "{}", String::from_utf8_lossy(&cmp.stderr));
    assert!(String::from_utf8(cmp.stdout).unwrap().starts_with("metric,hybrid,staircase_only,delta\n"));

    let bad = hgr(&["route", &p("missing.txt")]);
    assert!(!bad.status.success());
    assert!(String::from_utf8(bad.stderr).unwrap().starts_with("hgr: "));
    let odd = hgr(&["route", &fp, "--layers", "7"]);
    assert!(!odd.status.success());
}
