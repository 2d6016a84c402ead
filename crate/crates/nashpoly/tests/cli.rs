use std::path::{Path, PathBuf};

use nashpoly::cli::run;
use nashpoly::phc::{read_solutions, read_system};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn nashpoly(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("nashpoly").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn start_system_for_three_binary_players() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let (code, out, err) = nashpoly(&["start-system", "--format", "3:2,2,2", "--out", path(dir.path()), "--cache", path(&cache)]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("3 equations, 2 roots"), "{out}");
    let system = read_system(&std::fs::read_to_string(dir.path().join("gameof2x2x2_start_phc")).unwrap()).unwrap();
    assert_eq!(system.len(), 3);
    assert_eq!(system.names(), ["s11", "s21", "s31"]);
    let roots = read_solutions(&std::fs::read_to_string(dir.path().join("gameof2x2x2_start_phc.roots")).unwrap()).unwrap();
    let values: Vec<Vec<f64>> = roots.iter().map(|r| r.values().iter().map(|z| z.re).collect()).collect();
    assert_eq!(values, [[0.25, 1.0, 0.5], [0.5, 0.25, 1.0]]);
    assert!(cache.join("3_2-2-2_pow2.json").exists());
}

#[test]
fn track_then_validate_the_listed_target() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = nashpoly(&["start-system", "--format", "3:3,3,3", "--out", path(dir.path())]);
    assert_eq!(code, 0, "{err}");
    let tracked = dir.path().join("gameof3x3x3_phc.roots");
    let start = dir.path().join("gameof3x3x3_start_phc");
    let (code, _, err) = nashpoly(&[
        "track",
        "--start",
        path(&start),
        "--roots",
        path(&data("gameof3x3x3_start_phc.roots")),
        "--target",
        path(&data("gameof3x3x3_phc")),
        "--out",
        path(&tracked),
        "--workers",
        "2",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("10 paths, 10 converged"), "{err}");
    let records = read_solutions(&std::fs::read_to_string(&tracked).unwrap()).unwrap();
    assert_eq!(records.len(), 10);
    assert!(records.iter().all(|r| r.t.re == 1.0 && r.res <= 1e-10));

    let (code, out, err) = nashpoly(&[
        "validate",
        "--system",
        path(&data("gameof3x3x3_phc")),
        "--solutions",
        path(&tracked),
        "--digits",
        "16",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("THE RESIDUALS with 16 decimal places :\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("residual ")).count(), 10);
    assert!(!out.contains("flagged"), "{out}");
}

#[test]
fn tracking_from_roots_of_another_system_fails() {
    // The listed start system is not the one its roots were computed from.
    let (code, _, err) = nashpoly(&[
        "track",
        "--start",
        path(&data("gameof3x3x3_start_phc")),
        "--roots",
        path(&data("gameof3x3x3_start_phc.roots")),
        "--target",
        path(&data("gameof3x3x3_phc")),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("not a root of the start system"), "{err}");
}

#[test]
fn validate_listed_real_roots() {
    let (code, out, _) = nashpoly(&[
        "validate",
        "--system",
        path(&data("gameof3x3x3_phc")),
        "--solutions",
        path(&data("gameof3x3x3_phc.real_roots")),
        "--digits",
        "16",
    ]);
    assert_eq!(code, 0);
    let residuals: Vec<f64> = out
        .lines()
        .filter_map(|l| l.strip_prefix("residual "))
        .map(|l| l.split(':').nth(1).unwrap().trim().parse().unwrap())
        .collect();
    assert_eq!(residuals.len(), 2);
    assert!(residuals.iter().all(|&r| r <= 1e-12), "{residuals:?}");
}

#[test]
fn pure_and_solve_on_a_coordination_game() {
    let game = data("coordination.json");
    let (code, out, _) = nashpoly(&["pure", path(&game)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("2 pure strict equilibria"));
    let (code, out, _) = nashpoly(&["solve", path(&game), "--json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let eq = doc["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 3);
    let mixed = &eq[2]["probabilities"];
    assert!((mixed[0][0].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((mixed[1][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!(doc.get("candidates").is_none());
}

#[test]
fn totally_mixed_supports_only() {
    let (code, out, _) = nashpoly(&["solve", path(&data("coordination.json")), "--supports", "totally-mixed", "--json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["equilibria"].as_array().unwrap().len(), 1);
    assert_eq!(doc["supports"], 1);
}

#[test]
fn all_candidates_include_rejections() {
    let (code, out, _) = nashpoly(&["solve", path(&data("three_player.json")), "--json", "--all-candidates"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let kinds: Vec<&str> = doc["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["classification"].as_str().unwrap())
        .collect();
    assert!(kinds.iter().any(|k| *k != "nash"), "{kinds:?}");
    let (code, _, err) = nashpoly(&["solve", path(&data("three_player.json")), "--all-candidates"]);
    assert_ne!(code, 0, "--all-candidates requires --json: {err}");
}

#[test]
fn solve_is_reproducible() {
    let game = data("three_player.json");
    let run_with = |workers: &str, seed: &str| {
        let (code, out, err) = nashpoly(&["solve", path(&game), "--json", "--all-candidates", "--workers", workers, "--seed", seed]);
        assert_eq!(code, 0, "{err}");
        out
    };
    let first = run_with("1", "7");
    assert_eq!(first, run_with("1", "7"));
    assert_eq!(first.replace("\"seed\": 7", ""), run_with("4", "7").replace("\"seed\": 7", ""));
    let direct = nashpoly(&["solve", path(&game), "--method", "direct", "--json"]).1;
    let library = nashpoly(&["solve", path(&game), "--json"]).1;
    let equilibria = |s: &str| serde_json::from_str::<serde_json::Value>(s).unwrap()["equilibria"].as_array().unwrap().len();
    assert_eq!(equilibria(&direct), equilibria(&library));
}

#[test]
fn solve_reuses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let game = data("three_player.json");
    let args = ["solve", path(&game), "--json", "--cache", path(dir.path())];
    let (code, first, _) = nashpoly(&args);
    assert_eq!(code, 0);
    let file = dir.path().join("3_2-2-2_pow2.json");
    let written = std::fs::metadata(&file).unwrap().modified().unwrap();
    let (code, second, _) = nashpoly(&args);
    assert_eq!(code, 0);
    assert_eq!(first, second);
    assert_eq!(std::fs::metadata(&file).unwrap().modified().unwrap(), written);

    std::fs::write(&file, "{ not json").unwrap();
    let (code, _, err) = nashpoly(&args);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn errors_are_diagnosed() {
    for args in [
        vec!["start-system", "--format", "3:2,2"],
        vec!["start-system", "--format", "2:1,2"],
        vec!["solve", "/no/such/game.json"],
        vec!["solve", "x.json", "--supports", "some"],
        vec!["validate", "--system", "/no/such/file", "--solutions", "x"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = nashpoly(&args);
        assert_ne!(code, 0, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (code, _, err) = nashpoly(&[
        "validate",
        "--system",
        path(&data("gameof3x3x3_phc")),
        "--solutions",
        path(&data("coordination.json")),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("line 1"), "{err}");
}
