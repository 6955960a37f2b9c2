use std::path::{Path, PathBuf};

use rootsplit::simnet::{parse_scenario, run_scenario, ScenarioOutcome};

fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn run(name: &str) -> ScenarioOutcome {
    let dir = examples_dir();
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    run_scenario(&parse_scenario(&text).unwrap(), &dir).unwrap()
}

/// Compares against tests/golden/<name>.out. Set ROOTSPLIT_BLESS=1 to rewrite.
fn check_golden(name: &str, rendered: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.out"));
    if std::env::var_os("ROOTSPLIT_BLESS").is_some() {
        std::fs::write(&path, rendered).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(rendered, expected, "{name} drifted from its golden");
}

fn field<'a>(rendered: &'a str, key: &str) -> Vec<&'a str> {
    rendered
        .lines()
        .filter_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .collect()
}

#[test]
fn redundant_survives_three_failures() {
    let out = run("k3n6_fail3.scn");
    let text = out.render();
    assert!(out.all_retrievable());
    assert_eq!(field(&text, "placement"), ["7,24,13,9,23,4"]);
    assert_eq!(field(&text, "shares_available"), ["3"]);
    assert_eq!(field(&text, "adversary_shares"), ["2"]);
    assert_eq!(field(&text, "adversary_learns_data"), ["false"]);
    assert_eq!(run("k3n6_fail3.scn").render(), text);
    check_golden("k3n6_fail3", &text);
}

#[test]
fn root_k_single_failure_is_fatal() {
    let out = run("k3_root_fail1.scn");
    let text = out.render();
    assert!(!out.all_retrievable());
    assert_eq!(field(&text, "retrievable"), ["false"]);
    assert_eq!(
        field(&text, "error"),
        ["unrecoverable: 2 distinct shares reachable, 3 needed"]
    );
    check_golden("k3_root_fail1", &text);
}

#[test]
fn composite_key_gates_adversary() {
    let out = run("composite_capture_all.scn");
    let text = out.render();
    assert_eq!(field(&text, "adversary_shares"), ["3", "3"]);
    assert_eq!(field(&text, "adversary_learns_data"), ["false", "true"]);
    check_golden("composite_capture_all", &text);
}
