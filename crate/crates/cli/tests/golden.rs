use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn seed(name: &str) -> String {
    root().join("seeds").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cluster-theta")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

/// Compares against `tests/golden/<name>`; set `UPDATE_GOLDEN=1` to rewrite the file.
fn golden(name: &str, actual: &str) {
    let path = root().join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).expect("json output")
}

fn ints(v: &Value) -> Vec<i64> {
    v.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect()
}

#[test]
fn scatter_a2_has_one_outgoing_ray() {
    let o = run(&["scatter", "--seed", &seed("a2.json"), "--order", "6"]);
    let d = json(&o);
    let walls = d["walls"].as_array().unwrap();
    assert_eq!(walls.len(), 3);
    let rays: Vec<&Value> = walls.iter().filter(|w| w["kind"] == "ray").collect();
    assert_eq!(rays.len(), 1);
    assert_eq!(ints(&rays[0]["direction"]), [1, -1]);
    assert_eq!(ints(&rays[0]["normal"]), [1, 1]);
    assert_eq!(ints(&rays[0]["function"]["base_exponent"]["m"]), [-1, 1]);
    assert_eq!(ints(&rays[0]["function"]["base_exponent"]["q"]), [1, 1]);
    assert_eq!(ints(&rays[0]["function"]["coeffs"]), [1]);
    golden("scatter_a2.json", &stdout(&o));
    assert_eq!(stdout(&run(&["scatter", "--seed", "a2", "--order", "6"])), stdout(&o));
}

#[test]
fn scatter_empty_seed() {
    let d = json(&run(&["scatter", "--seed", &seed("empty.json")]));
    assert!(d["walls"].as_array().unwrap().is_empty());
}

#[test]
fn scatter_kronecker_coefficients_are_positive() {
    let o = run(&["scatter", "--seed", &seed("kronecker.json"), "--order", "5"]);
    let d = json(&o);
    for w in d["walls"].as_array().unwrap() {
        assert!(ints(&w["function"]["coeffs"]).iter().all(|c| *c >= 0), "{w}");
    }
    golden("scatter_kronecker.json", &stdout(&o));
}

#[test]
fn scatter_writes_json_and_svg() {
    let dir = std::env::temp_dir().join(format!("cluster-theta-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let prefix = dir.join("a2");
    let o = run(&["scatter", "--seed", "a2", "--order", "4", "--out", prefix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(with_ext(&prefix, "svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("class=\"chamber\""));
    golden("scatter_a2.svg", &svg);
    let d: Value = serde_json::from_str(&std::fs::read_to_string(with_ext(&prefix, "json")).unwrap()).unwrap();
    assert_eq!(d["order"], 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    PathBuf::from(format!("{}.{ext}", prefix.display()))
}

fn terms(t: &Value) -> Vec<(Vec<i64>, Vec<i64>, i64)> {
    t["series"].as_array().unwrap().iter().map(|s| (ints(&s["m"]), ints(&s["q"]), s["c"].as_i64().unwrap())).collect()
}

#[test]
fn theta_kronecker_loop_element() {
    let o = run(&["theta", "--seed", "kronecker", "--index", "1,-1", "--order", "4"]);
    let t = json(&o);
    assert_eq!(t["stabilized"], true);
    let mut got = terms(&t);
    got.sort();
    let mut want = vec![(vec![1, -1], vec![0, 0], 1), (vec![-1, -1], vec![0, 1], 1), (vec![-1, 1], vec![1, 1], 1)];
    want.sort();
    assert_eq!(got, want);
    golden("theta_kronecker.json", &stdout(&o));
}

#[test]
fn theta_torus_is_a_monomial() {
    for chamber in ["+", "-", "1/2,-3"] {
        let t = json(&run(&["theta", "--seed", "torus", "--index", "3,-2", "--chamber", chamber]));
        assert_eq!(terms(&t), vec![(vec![3, -2], vec![], 1)]);
    }
}

#[test]
fn theta_three_wall_is_finite_and_positive() {
    let t = json(&run(&["theta", "--seed", "three-wall", "--index", "1,0", "--order", "4"]));
    assert_eq!(t["stabilized"], true);
    let ts = terms(&t);
    assert!(!ts.is_empty() && ts.iter().all(|(_, _, c)| *c > 0));
}

#[test]
fn theta_writes_a_line_trace() {
    let dir = std::env::temp_dir().join(format!("cluster-theta-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let prefix = dir.join("loop");
    let o = run(&["theta", "--seed", "kronecker", "--index", "1,-1", "--order", "4", "--out", prefix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Value = serde_json::from_str(&std::fs::read_to_string(with_ext(&prefix, "lines.json")).unwrap()).unwrap();
    assert_eq!(lines.as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn val_on_the_positive_cone_is_the_pairing() {
    let v = json(&run(&["val", "--seed", "a2", "--index", "1,0", "--covector", "-1,2", "--order", "4"]));
    assert_eq!(v["value"], "-1");
    assert_eq!(v["certified"], "exact");
    assert_eq!(v["witness_taut"], true);
}

#[test]
fn trop_csv() {
    let o = run(&["trop", "--seed", "kronecker", "--index", "1,-1", "--order", "4", "--rays", "6", "--box", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("u,v,value,certified,order"));
    // values are the minimum over the three x-exponents of the loop element
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let (u, v): (i64, i64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let min = [(1, -1), (-1, -1), (-1, 1)].iter().map(|(a, b)| a * u + b * v).min().unwrap();
        assert_eq!(f[2], min.to_string(), "{row}");
        assert_eq!(f[3], "exact");
    }
    golden("trop_kronecker.csv", &text);
}

#[test]
fn checks_pass_on_the_fixtures() {
    for (which, seed, extra) in [
        ("reciprocity", "a2", vec![]),
        ("vit", "torus", vec![]),
        ("vit", "a2", vec!["--order", "4", "--box", "1"]),
        ("newton", "kronecker", vec!["--order", "4", "--box", "1"]),
        ("specialize", "kronecker", vec!["--order", "4", "--box", "1"]),
        ("adjunction", "a2", vec!["--order", "3", "--box", "1"]),
        ("extension", "kronecker", vec![]),
        ("reciprocity", "kronecker", vec!["--order", "4", "--box", "1", "--duality", "langlands"]),
    ] {
        let mut args = vec!["check", which, "--seed", seed];
        args.extend(extra);
        let o = run(&args);
        let rep = json(&o);
        assert_eq!(rep["failures"].as_array().unwrap().len(), 0, "{which} on {seed}");
        assert!(rep["passes"].as_u64().unwrap() > 0, "{which} on {seed}: {rep}");
    }
}

#[test]
fn reciprocity_report_golden() {
    let o = run(&["check", "reciprocity", "--seed", "a2", "--order", "3", "--box", "1"]);
    let rep = json(&o);
    assert_eq!(rep["name"], "reciprocity-chiral");
    golden("reciprocity_a2.json", &stdout(&o));
}

#[test]
fn render_draws_lines() {
    let o = run(&["render", "--seed", "kronecker", "--index", "1,-1;0,1", "--order", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let svg = stdout(&o);
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
    golden("render_kronecker.svg", &svg);
}

#[test]
fn usage_and_validation_errors_exit_with_two() {
    for args in [
        vec!["bogus"],
        vec!["theta", "--index", "1"],
        vec!["theta", "--index", "1,0", "--order", "1"],
        vec!["scatter", "--box", "0"],
        vec!["scatter", "--seed", "/nonexistent/seed.json"],
        vec!["val", "--index", "1,0", "--covector", "a,b"],
        vec!["check", "adjunction", "--matrix", "2,0;0,1"],
        vec!["theta", "--index", "1,0", "--perturb", "0,0;0,0"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
    let o = run(&["scatter", "--seed", &seed("not_skew.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("skew"));
}
