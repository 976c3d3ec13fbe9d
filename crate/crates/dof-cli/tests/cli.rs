use dof_cli::{run_args, EXIT_DECODE_FAILURE, EXIT_INVALID_INPUT, EXIT_OK, EXIT_UNSUPPORTED};
use dof_core::math::{parse_rat, to_f64};
use serde_json::Value;

fn dof(args: &[&str]) -> dof_cli::Invocation {
    run_args(std::iter::once("dof").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let inv = dof(args);
    assert_eq!(inv.code, EXIT_OK, "{args:?}: {}", inv.stderr);
    serde_json::from_str(&inv.stdout).unwrap()
}

#[test]
fn corner_reports_exact_point_and_durations() {
    let v = json(&["corner", "--config", "3,3,4,7"]);
    assert_eq!(v["p0"], serde_json::json!(["14/11", "14/11", "28/11"]));
    assert_eq!(v["p0_decimal"][0], "1.272727273");
    assert_eq!(v["durations"]["t23"], "7");
    assert_eq!(v["alpha"], "33");
    assert_eq!(v["identities_hold"], true);
}

#[test]
fn region_vertices_include_the_symmetric_corner() {
    let v = json(&["region", "--config", "1,1,1,2", "--messages", "order2"]);
    let verts = v["vertices"].as_array().unwrap();
    assert!(verts.contains(&serde_json::json!(["2/5", "2/5", "2/5"])));
}

#[test]
fn simulate_succeeds_and_matches_expected() {
    let v = json(&["simulate", "--config", "2,2,3,5"]);
    assert_eq!(v["achieved_matches_expected"], true);
    assert_eq!(v["report"]["success"], true);
    let v = json(&["simulate", "--config", "1,2,3,4", "--messages", "order2", "--target", "1/10,1/5,1/10"]);
    assert_eq!(v["report"]["success"], true);
}

#[test]
fn compare_verdicts_are_reported() {
    let v = json(&["compare", "--config", "1,2,3,3", "--messages", "order2"]);
    let verdicts = v["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().any(|e| e["pair"] == "nocsit_vs_delayed" && e["verdict"] == "no-CSIT strictly inside"));
    assert!(verdicts.iter().any(|e| e["pair"] == "delayed_vs_outer" && e["verdict"] == "equal"));
}

#[test]
fn scan_finds_the_smallest_equality_row() {
    let v = json(&["scan-corollary1", "--max", "4"]);
    assert_eq!(v, serde_json::json!([{"n1": 3, "n2": 3, "n3": 4, "m_from": 7, "m_to": 7, "regions_equal": true}]));
}

#[test]
fn csv_decimals_track_exact_columns() {
    let inv = dof(&["--format", "csv", "sweep", "--pattern", "15,15,x,31", "--from", "16", "--to", "24"]);
    assert_eq!(inv.code, EXIT_OK, "{}", inv.stderr);
    let mut r = csv::Reader::from_reader(inv.stdout.as_bytes());
    let headers = r.headers().unwrap().clone();
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        rows += 1;
        for (i, h) in headers.iter().enumerate() {
            if let Some(base) = h.strip_suffix("_dec") {
                let exact = rec.get(headers.iter().position(|x| x == base).unwrap()).unwrap();
                let want = format!("{:.9}", to_f64(&parse_rat(exact).unwrap()));
                assert_eq!(rec.get(i).unwrap(), want, "{h} in row {rows}");
            }
        }
    }
    assert_eq!(rows, 9);
}

#[test]
fn sweep_marks_negative_durations_as_skipped() {
    let v = json(&["sweep", "--pattern", "15,15,x,40", "--from", "21", "--to", "21"]);
    assert_eq!(v[0]["status"], "SKIP");
}

#[test]
fn output_is_byte_stable() {
    let args = ["--format", "csv", "sweep", "--pattern", "14,15,x,x+15", "--from", "15", "--to", "20"];
    assert_eq!(dof(&args).stdout, dof(&args).stdout);
    let args = ["simulate", "--config", "1,1,1,2", "--seed", "9"];
    assert_eq!(dof(&args).stdout, dof(&args).stdout);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = std::env::temp_dir().join(format!("dof-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corner.json");
    let inv = dof(&["corner", "--config", "3,3,4,7", "--out", path.to_str().unwrap()]);
    assert_eq!(inv.code, EXIT_OK);
    assert!(inv.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["alpha"], "33");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(dof(&["corner", "--config", "1,2,3,3"]).code, EXIT_UNSUPPORTED);
    assert_eq!(dof(&["corner", "--config", "2,2,3,7"]).code, EXIT_UNSUPPORTED);
    assert_eq!(dof(&["simulate", "--config", "1,1,1,4"]).code, EXIT_DECODE_FAILURE);
    assert_eq!(dof(&["simulate", "--config", "1,1,1,3", "--target", "1,1,1"]).code, EXIT_INVALID_INPUT);
    assert_eq!(dof(&["corner", "--config", "0,1,2,3"]).code, EXIT_INVALID_INPUT);
    assert_eq!(dof(&["bogus"]).code, EXIT_INVALID_INPUT);
    assert_eq!(dof(&["sweep", "--pattern", "1,2,y,4", "--from", "1", "--to", "2"]).code, EXIT_INVALID_INPUT);
    assert_eq!(dof(&["--help"]).code, EXIT_OK);
    let inv = dof(&["corner", "--config", "1,2,3,3"]);
    assert!(inv.stderr.starts_with("error:"), "{}", inv.stderr);
}
