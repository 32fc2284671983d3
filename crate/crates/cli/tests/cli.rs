use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_persivol"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn small_spec() -> Value {
    json!({
        "specVersion": 1,
        "shape": {"dim": 2, "kind": "ball", "radius": 0.3},
        "sampleSize": 800,
        "estimator": {"epsilon": 0.03, "rMax": 0.3, "gridSpacing": 0.02, "mcSamples": 150, "seed": 5, "dim": 2}
    })
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn schema(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Minimal JSON-Schema check: `$ref`, `type`, `required`, `properties`,
/// `additionalProperties: false`, `items`, `const`, `enum`, `anyOf`.
fn conforms(v: &Value, s: &Value, root: &Value, path: &str) -> Result<(), String> {
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let (file, pointer) = r.split_once('#').unwrap_or((r, ""));
        let doc = if file.is_empty() {
            root.clone()
        } else {
            schema(file)
        };
        let target = doc.pointer(pointer).ok_or(format!("bad $ref {r}"))?.clone();
        return conforms(v, &target, &doc, path);
    }
    if let Some(c) = s.get("const") {
        if v != c {
            return Err(format!("{path}: expected {c}, got {v}"));
        }
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{path}: {v} not in {e:?}"));
        }
    }
    if let Some(any) = s.get("anyOf").and_then(Value::as_array) {
        if !any.iter().any(|alt| conforms(v, alt, root, path).is_ok()) {
            return Err(format!("{path}: {v} matches no alternative"));
        }
    }
    if let Some(t) = s.get("type").and_then(Value::as_str) {
        let ok = match t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "number" => v.is_number(),
            "integer" => v.is_u64() || v.is_i64(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            _ => true,
        };
        if !ok {
            return Err(format!("{path}: expected {t}, got {v}"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = s.get("properties").and_then(Value::as_object);
        for key in s
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            if !obj.contains_key(key.as_str().unwrap()) {
                return Err(format!("{path}: missing {key}"));
            }
        }
        for (k, child) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(cs) => conforms(child, cs, root, &format!("{path}.{k}"))?,
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{path}: unexpected key {k}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            conforms(child, items, root, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn check_schema(v: &Value, name: &str) {
    let s = schema(name);
    if let Err(e) = conforms(v, &s, &s, "$") {
        panic!("{name}: {e}");
    }
}

#[test]
fn estimate_report_is_reproducible_and_conforms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &small_spec());
    let out = dir.path().join("report.json");
    let o = run(&[
        "estimate",
        "--config",
        cfg.to_str().unwrap(),
        "--workers",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    check_schema(&report, "report.schema.json");
    check_schema(&report["spec"], "config.schema.json");
    assert_eq!(report["truth"].as_array().unwrap().len(), 3);
    assert_eq!(report["absError"].as_array().unwrap().len(), 3);

    // The embedded spec reproduces the report, whatever the worker count.
    let again = dir.path().join("again.json");
    let o = run(&[
        "estimate",
        "--config",
        out.to_str().unwrap(),
        "--workers",
        "4",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&again).unwrap(), text);
    let spec_only = write(dir.path(), "spec.json", &report["spec"]);
    let o = run(&[
        "estimate",
        "--config",
        spec_only.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&again).unwrap(), text);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &small_spec());
    let out = dir.path().join("r.json");
    let trace = dir.path().join("trace.csv");
    let o = run(&[
        "estimate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--samples",
        "20",
        "--out",
        out.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["spec"]["estimator"]["seed"], 9);
    assert_eq!(report["estimate"]["samplesUsed"], 20);
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.starts_with("sample_index,x0,x1,v0,v1,v2,bars_in_window"));
    assert_eq!(lines.lines().count(), 21);
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &small_spec());
    let c = cfg.to_str().unwrap();
    let out = dir.path().join("r.json");
    let o = out.to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "estimate",
            "--config",
            c,
            "--out",
            "/definitely/missing/r.json"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "estimate",
            "--config",
            c,
            "--epsilon",
            "0",
            "--out",
            o
        ])),
        2
    );
    assert_eq!(
        code(&run(&["estimate", "--config", "/missing.json", "--out", o])),
        2
    );
    let mut bad = small_spec();
    bad["specVersion"] = json!(2);
    let b = write(dir.path(), "bad.json", &bad);
    assert_eq!(
        code(&run(&[
            "estimate",
            "--config",
            b.to_str().unwrap(),
            "--out",
            o
        ])),
        2
    );
    let mut unknown = small_spec();
    unknown["estimator"]["bogus"] = json!(1);
    let u = write(dir.path(), "unknown.json", &unknown);
    assert_eq!(
        code(&run(&[
            "estimate",
            "--config",
            u.to_str().unwrap(),
            "--out",
            o
        ])),
        2
    );
    assert_eq!(
        code(&run(&["sweep", "--config", c, "--eps", "0.02", "--out", o])),
        2
    );
    assert_eq!(code(&run(&["oracle-check", "--max-cells", "1000000"])), 2);
    assert_eq!(
        code(&run(&["baseline", "--shape", "annulus", "--dim", "2"])),
        2
    );
    assert_eq!(code(&run(&["estimate"])), 2);
}

#[test]
fn sweep_table_has_rows_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = small_spec();
    spec["estimator"]["mcSamples"] = json!(60);
    let cfg = write(dir.path(), "cfg.json", &spec);
    let out = dir.path().join("t.csv");
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--eps",
        "0.04,0.02,0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.len(), 1 + 5 * 3);
    assert_eq!(&header[..4], ["epsilon", "v0", "v1", "v2"]);
    assert!(header.contains(&"abs_error1".to_string()));
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[3][0], "slope");
    assert!(
        rows[3][header.iter().position(|h| h == "abs_error1").unwrap()]
            .parse::<f64>()
            .is_ok()
    );

    // Non-convex shapes: no truth columns and no slope row.
    spec["shape"] = json!({"dim": 2, "kind": "annulus", "innerRadius": 0.1, "outerRadius": 0.3});
    let cfg = write(dir.path(), "ann.json", &spec);
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--eps",
        "0.04,0.02,0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(&out).unwrap();
    assert_eq!(r.headers().unwrap().len(), 1 + 3 * 3);
    assert_eq!(r.records().count(), 3);
}

#[test]
fn oracle_check_passes() {
    let o = run(&[
        "oracle-check",
        "--count",
        "50",
        "--max-cells",
        "100",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS"));
}

#[test]
fn baseline_reports_disk_values() {
    let o = run(&[
        "baseline", "--shape", "ball", "--dim", "2", "--radius", "1", "--offset", "0.04",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    check_schema(&v, "baseline.schema.json");
    let vols: Vec<f64> = v["intrinsicVolumes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let pi = std::f64::consts::PI;
    for (got, want) in vols.iter().zip([1.0, 1.04 * pi, 1.0816 * pi]) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    let q0 = v["steiner"][0]["value"].as_f64().unwrap();
    assert!((q0 - 1.0816 * pi).abs() < 1e-12);
    let o = run(&["baseline", "--shape", "box", "--dim", "2", "--sides", "1,1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["intrinsicVolumes"], json!([1.0, 2.0, 1.0]));
}
