use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localp2"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn rows<'a>(v: &'a Value, table: &str) -> &'a Vec<Value> {
    v["tables"][table]["rows"].as_array().unwrap()
}

/// Parses `# table: name` blocks into `(name, header, records)`.
fn csv_tables(text: &str) -> Vec<(String, Vec<String>, Vec<Vec<String>>)> {
    text.split("# table: ")
        .filter(|b| !b.trim().is_empty())
        .map(|block| {
            let (name, body) = block.split_once('\n').unwrap();
            let mut rdr = csv::ReaderBuilder::new().from_reader(body.trim().as_bytes());
            let header = rdr.headers().unwrap().iter().map(String::from).collect();
            let recs = rdr
                .records()
                .map(|r| r.unwrap().iter().map(String::from).collect())
                .collect();
            (name.trim().to_string(), header, recs)
        })
        .collect()
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[test]
fn dp_curve_values() {
    let v = json(&["dp-curve", "--mu-lo", "0", "--mu-hi", "1", "--points", "3"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "dp-curve");
    let deltas: Vec<f64> = rows(&v, "curve").iter().map(|r| r[1].as_f64().unwrap()).collect();
    assert_eq!(deltas, vec![1.0, 0.625, 1.0]);
}

#[test]
fn csv_matches_json() {
    let args = [
        "dp-curve", "--mu-lo", "-0.5", "--mu-hi", "0.5", "--points", "7", "--depth", "4",
    ];
    let v = json(&args);
    let mut csv_args = vec!["--format", "csv"];
    csv_args.extend_from_slice(&args);
    let out = run(&csv_args);
    assert!(out.status.success());
    let tables = csv_tables(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(tables.len(), v["tables"].as_object().unwrap().len());
    for (name, header, recs) in tables {
        let t = &v["tables"][&name];
        let cols: Vec<String> = t["columns"].as_array().unwrap().iter().map(cell_text).collect();
        assert_eq!(header, cols);
        let jrows = t["rows"].as_array().unwrap();
        assert_eq!(recs.len(), jrows.len());
        for (rec, row) in recs.iter().zip(jrows) {
            for (text, cell) in rec.iter().zip(row.as_array().unwrap()) {
                match cell.as_f64() {
                    Some(x) => {
                        let y: f64 = text.parse().unwrap();
                        assert!((x - y).abs() <= 1e-15 * x.abs(), "table {name}: {text} vs {cell}");
                    }
                    None => assert_eq!(*text, cell_text(cell), "table {name}"),
                }
            }
        }
    }
}

#[test]
fn chamber_test_exit_codes() {
    assert_eq!(
        run(&["chamber-test", "--a", "0,2", "--b", "2,0"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["chamber-test", "--a", "0,1", "--b", "-1,0"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["chamber-test", "--a", "x", "--b", "1,1"]).status.code(), Some(2));
    assert_eq!(run(&["chamber-test", "--a", "0,2"]).status.code(), Some(2));
    assert_eq!(run(&["--order", "1", "constants"]).status.code(), Some(2));
}

#[test]
fn mutate_words() {
    let standard = json(&["mutate", "--word", ""]);
    let back = json(&["mutate", "--word", "r r r"]);
    assert_eq!(rows(&standard, "classes"), rows(&back, "classes"));
    let undo = json(&["mutate", "--word", "t1 t1'"]);
    assert_eq!(rows(&standard, "classes"), rows(&undo, "classes"));
    let b = rows(&standard, "bundles");
    assert_eq!((b[1][1].as_i64(), b[1][2].as_i64()), (Some(2), Some(-1)));
    assert_eq!(run(&["mutate", "--word", "t7"]).status.code(), Some(2));
}

#[test]
fn deterministic_output() {
    let args = ["--samples", "40", "--seed", "3", "--depth", "8", "mirror-verify"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn mirror_eval_orbifold() {
    let v = json(&["mirror-eval", "--psi", "0,0"]);
    let text = v.to_string();
    assert!(text.contains("-0.5"));
    assert!(run(&["mirror-eval", "--z", "0.5,0"]).status.code() == Some(2));
}

#[test]
fn out_file() {
    let dir = std::env::temp_dir().join(format!("localp2-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.json");
    let out = run(&[
        "--out",
        path.to_str().unwrap(),
        "exc-list",
        "--lo",
        "0",
        "--hi",
        "1",
        "--depth",
        "2",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "exc-list");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn monodromy_check_passes() {
    let out = run(&["monodromy-check", "--segments", "32"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
