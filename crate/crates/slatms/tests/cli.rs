use std::path::{Path, PathBuf};

use tempfile::TempDir;

const REACTION: &str =
    "(dir reactants down) :- (active reaction) : [2/3, 1]\n(active reaction) : [1/4, 2/3]\n";

fn fig5() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/fig5.slp")
        .to_str()
        .unwrap()
        .to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = slatms::cli::run(
        std::iter::once("slatms").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn program(text: &str) -> (TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path: PathBuf = dir.path().join("p.slp");
    std::fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap().to_string();
    (dir, p)
}

#[test]
fn check_reports_counts() {
    let (code, out, err) = run(&["check", &fig5()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("ok: 18 statements"), "{out}");
    assert!(out.contains("6 one-ofs"));
}

#[test]
fn invalid_pair_is_a_problem_error() {
    let (_d, p) = program("(Q1 = Q2): [.8, .5]\n");
    let (code, _, err) = run(&["check", &p]);
    assert_eq!(code, 1);
    assert!(err.contains("1:12: error:"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let (code, _, err) = run(&["check", "/nonexistent/p.slp"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&[]).0, 1);
}

#[test]
fn query_reaction() {
    let (_d, p) = program(REACTION);
    let (code, out, _) = run(&["query", &p, "(dir reactants down)"]);
    assert_eq!(code, 0);
    assert_eq!(out, "(dir reactants down): [0.167, 1.000]\n");
    let (_, out, _) = run(&["query", "--precision", "6", &p, "( dir  reactants down )"]);
    assert_eq!(out, "(dir reactants down): [0.166667, 1.000000]\n");
}

#[test]
fn unknown_prop_suggests_neighbours() {
    let (_d, p) = program(REACTION);
    let (code, _, err) = run(&["query", &p, "(dir reactant down)"]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown proposition `(dir reactant down)`"), "{err}");
    assert!(err.lines().nth(1).unwrap().contains("(dir reactants down)"), "{err}");
}

#[test]
fn kernel_and_clamp() {
    let (_d, p) = program(REACTION);
    let q = "(dir reactants down)";
    let plain = run(&["query", &p, q]);
    assert_eq!(run(&["query", "--kernel", "", &p, q]), plain);
    assert_eq!(run(&["query", "--kernel", "e0+,r0+", &p, q]), plain);
    let (_, out, _) = run(&["query", "--clamp", "e0+=0", &p, q]);
    assert_eq!(out, format!("{q}: [0.000, 1.000]\n"));
    let (_, out, _) = run(&["query", "--clamp", "r0+=1/2", &p, q]);
    assert_eq!(out, format!("{q}: [0.125, 1.000]\n"));

    let (code, _, err) = run(&["query", "--clamp", "e9+=0", &p, q]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown assumption"), "{err}");
    assert_eq!(run(&["query", "--clamp", "e0+=2", &p, q]).0, 1);
    assert_eq!(run(&["query", "--clamp", "e0+", &p, q]).0, 1);
}

#[test]
fn kernel_excludes_one_of_siblings() {
    let (_d, p) = program(
        "(one-of (a on) (a off))\n(a on): [.5, 1]\n",
    );
    let (_, out, _) = run(&["query", &p, "(a on)"]);
    assert_eq!(out, "(a on): [0.500, 1.000]\n");
    let (_, out, _) = run(&["query", "--kernel", "(a off)", &p, "(a on)"]);
    assert_eq!(out, "(a on): [0.000, 1.000]\n");
}

#[test]
fn json_matches_text() {
    let (_d, p) = program(REACTION);
    let (_, out, _) = run(&["query", "--json", &p, "(dir reactants down)"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["lower"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(v["upper"].as_f64().unwrap(), 1.0);
    assert_eq!(v["prop"], "(dir reactants down)");
    assert_eq!(v["label"][0]["status"], "included");
    assert_eq!(v["approximated"], false);
}

#[test]
fn explain_shows_trace() {
    let (_d, p) = program(REACTION);
    let (_, out, _) = run(&["query", "--explain", &p, "(dir reactants down)"]);
    assert!(out.contains("env 0: {r0+ (0.667), e0+ (0.250)} = 0.167 for"), "{out}");
    assert!(out.contains("step: group 0"));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["solve", "--precision", "9", &fig5()]);
    let b = run(&["solve", "--precision", "9", &fig5()]);
    assert_eq!(a, b);
    let a = run(&["oracle", &fig5()]);
    assert_eq!(a, run(&["oracle", &fig5()]));
}

#[test]
fn solve_json_lists_solutions() {
    let (code, out, _) = run(&["solve", "--json", &fig5()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["solutions"].as_array().map(Vec::len), Some(4), "{out}");
}

#[test]
fn compare_noisy_or_is_in_regime() {
    let (_d, p) = program("(a): [.3, 1]\n(b): [.4, 1]\n(c) :- (a) : [1, 1]\n(c) :- (b) : [1, 1]\n");
    let (code, out, _) = run(&["compare", &p]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("(c): evidence [0.580, 1.000] oracle [0.580, 1.000]"), "{out}");
    assert!(out.contains("regime: equivalence"), "{out}");
}

#[test]
fn compare_fig5_is_outside_regime() {
    let (code, out, _) = run(&["compare", &fig5()]);
    assert_eq!(code, 0);
    assert!(out.contains("regime: non-equivalence regime"), "{out}");
}

#[test]
fn solve_without_one_ofs_is_empty() {
    let (_d, p) = program("(a): [.5, 1]\n");
    let (code, out, _) = run(&["solve", &p]);
    assert_eq!((code, out.as_str()), (0, ""));
}

#[test]
fn independent_uniform_frames_tie() {
    let (_d, p) = program(
        "(one-of (a on) (a off))\n(one-of (b on) (b off))\n\
         (a on): [.5, .5]\n(a off): [.5, .5]\n(b on): [.5, .5]\n(b off): [.5, .5]\n",
    );
    let (code, out, err) = run(&["solve", &p]);
    assert_eq!(code, 0, "{err}");
    let pairs: Vec<&str> = out.lines().map(|l| &l[l.rfind('[').unwrap()..]).collect();
    assert_eq!(pairs.len(), 4, "{out}");
    assert!(pairs.iter().all(|q| *q == pairs[0]), "{out}");
}

#[test]
fn directives_run_in_order() {
    let (_d, p) = program(&format!("{REACTION}?- (active reaction)\n?- (dir reactants down)\n"));
    let (code, out, _) = run(&["query", &p]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "(active reaction): [0.250, 0.667]\n(dir reactants down): [0.167, 1.000]\n"
    );
    let (_d2, p2) = program(REACTION);
    assert_eq!(run(&["query", &p2]).0, 1);
}
