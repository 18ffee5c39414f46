use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clusterd")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn expand_two_radii_with_every_method() {
    let o = run(&["expand", "--fixture", "two-radii", "--method", "all"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(x2^2*x4 + 2*x2*x4 + x4 + x1*x3)/(x1*x2*x3)\n");
}

#[test]
fn expand_an_arc_of_the_triangulation() {
    let o = run(&["expand", "--n", "4", "--triangulation", "R(0),R(1),R(2),R(3)", "--arc", "R(2)", "--method", "all"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x3\n");
}

#[test]
fn expand_json_reports_agreement() {
    let o = run(&["--json", "expand", "--n", "5", "--arc", "RN(3)", "--method", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["agree"], true);
    assert_eq!(v["methods"].as_object().unwrap().len(), 3);
}

#[test]
fn path_listings() {
    let o = run(&["paths", "--fixture", "around-folded"]);
    assert_eq!(stdout(&o).lines().count(), 9);
    let o = run(&["paths", "--fixture", "loop-on-wheel"]);
    assert_eq!(
        stdout(&o),
        "(b1,1,2,2,3,3,t)\n(t,1,b2,2,3,3,t)\n(t,1,1,2,b3,3,t)\n(t,1,1,2,2,3,b4)\n"
    );
}

#[test]
fn matchings_of_the_folded_snake() {
    let o = run(&["matchings", "--fixture", "around-folded"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 9);
    let o = run(&["snake", "--fixture", "around-folded"]);
    assert!(stdout(&o).starts_with("5 tiles, 12 vertices, 16 edges\n"));
}

#[test]
fn seeds_of_the_square() {
    let o = run(&["--json", "seeds", "--n", "4"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let seeds = v["seeds"].as_array().unwrap();
    assert_eq!(seeds.len(), 50);
    assert!(seeds.iter().all(|s| s["neighbors"].as_array().unwrap().len() == 4));
}

#[test]
fn malformed_arc_is_a_usage_error() {
    let o = run(&["expand", "--n", "4", "--arc", "P(1,x)"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("byte 4"), "{err}");
    assert!(err.contains("      ^"), "{err}");
}

#[test]
fn malformed_triangulation_points_into_the_braces() {
    let o = run(&["paths", "--n", "4", "--triangulation", "{R(0), Q(1)}", "--arc", "P(0,2)"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("byte 7"), "{err}");
}

#[test]
fn bound_is_enforced() {
    let o = run(&["verify", "--n", "6", "--seed-bound", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn render_is_deterministic() {
    let args = ["render", "--fixture", "two-radii"];
    let a = run(&args);
    let b = run(&["--threads", "1", "render", "--fixture", "two-radii"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let svg = stdout(&a);
    assert!(svg.contains("<svg") && svg.contains("stroke-dasharray"));
    assert_eq!(svg.matches("#c0392b").count(), 2 * 3);
}

#[test]
fn render_writes_a_file() {
    let path = std::env::temp_dir().join(format!("clusterd-{}.svg", std::process::id()));
    let o = run(&["render", "--fixture", "folded-square", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(svg.matches("<path").count(), 4);
}

#[test]
fn verify_small_square() {
    let o = run(&["--json", "verify", "--n", "4", "--suite", "bijection"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
}

#[test]
fn atomic_single_lemma() {
    let o = run(&["atomic", "--n", "4", "--lemma", "central-doublecross"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("central-doublecross"));
    let o = run(&["atomic", "--n", "4", "--lemma", "no-such-lemma"]);
    assert_eq!(o.status.code(), Some(2));
}
