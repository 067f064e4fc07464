//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slatms::compile::{compile, Compiled};
use slatms::lang::{lex, parse, Program, TokenKind};
use slatms::model::{static_regime_violation, OracleModel};
use slatms_core::evidence::{EnvStatus, EvalOptions, Side};
use slatms_core::oracle::{pair_to_mass, Frame, WorldSet};
use slatms_core::{slp_combine, Database, NodeId, Origin, Reasoner, SupportPair};

fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/fig5.slp")
}

fn golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fig5_solutions.txt")
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = slatms::cli::run(
        std::iter::once("slatms").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

// 1 ------------------------------------------------------------------

fn inference_reproduction() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("reaction.slp");
    std::fs::write(
        &file,
        "(dir reactants down) :- (active reaction) : [2/3, 1]\n(active reaction) : [1/4, 2/3]\n",
    )
    .map_err(|e| e.to_string())?;
    let path = file.to_str().unwrap();
    let start = Instant::now();
    let (code, out, err) = run_cli(&["query", "--json", path, "(dir reactants down)"]);
    let elapsed = start.elapsed();
    check(code == 0, || format!("exit {code}: {err}"))?;
    let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let (l, u) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    check((l - 1.0 / 6.0).abs() <= 1e-9 && (u - 1.0).abs() <= 1e-9, || {
        format!("got [{l}, {u}], want [1/6, 1]")
    })?;
    within(elapsed, Duration::from_millis(10))?;
    Ok(format!("[{l:.12}, {u:.12}] in {elapsed:?}"))
}

// 2 ------------------------------------------------------------------

fn combination_formula() -> Result<String, String> {
    let a = SupportPair::new(0.25, 2.0 / 3.0).unwrap();
    let b = SupportPair::new(0.5, 0.75).unwrap();
    let c = slp_combine(a, b).map_err(|e| e.to_string())?;
    let frame = Frame::new(["P", "not P"]).unwrap();
    let m = pair_to_mass(a, 0, &frame)
        .unwrap()
        .dempster_combine(&pair_to_mass(b, 0, &frame).unwrap())
        .map_err(|e| e.to_string())?;
    let p = WorldSet::singleton(2, 0);
    let (bel, pl) = (m.belief(&p), m.plausibility(&p));
    check(
        (c.lower() - bel).abs() <= 1e-12 && (c.upper() - pl).abs() <= 1e-12,
        || format!("slp_combine [{}, {}] vs oracle [{bel}, {pl}]", c.lower(), c.upper()),
    )?;
    check(
        (bel - 19.0 / 37.0).abs() <= 1e-12 && (pl - 24.0 / 37.0).abs() <= 1e-12,
        || format!("oracle [{bel}, {pl}] is not [19/37, 24/37]"),
    )?;
    check((c.lower() - 22.0 / 37.0).abs() > 1e-3, || {
        "result coincides with [22/37, 34/37]".into()
    })?;
    Ok(format!("[{:.12}, {:.12}] = [19/37, 24/37]", c.lower(), c.upper()))
}

// 3 ------------------------------------------------------------------

fn structural_reproduction() -> Result<String, String> {
    let path = fixture_path();
    let start = Instant::now();
    let (code, out, err) = run_cli(&["solve", "--precision", "6", path.to_str().unwrap()]);
    let elapsed = start.elapsed();
    check(code == 0, || format!("exit {code}: {err}"))?;
    let states: Vec<BTreeSet<&str>> = out
        .lines()
        .map(|l| {
            let body = l.strip_prefix("Solution: ").unwrap_or(l);
            let props = &body[..body.rfind(": [").unwrap_or(body.len())];
            props
                .split(") (")
                .map(|p| p.trim_matches(|c| c == '(' || c == ')'))
                .collect()
        })
        .collect();
    let want: Vec<BTreeSet<&str>> = [
        ["x on", "y off", "z off"],
        ["y on", "x off", "z off"],
        ["z on", "x off", "y off"],
        ["x off", "y off", "z off"],
    ]
    .iter()
    .map(|s| s.iter().copied().collect())
    .collect();
    check(states.len() == 4, || format!("{} solutions:\n{out}", states.len()))?;
    for w in &want {
        check(states.contains(w), || format!("missing {w:?} in\n{out}"))?;
    }
    let golden = std::fs::read_to_string(golden_path()).map_err(|e| e.to_string())?;
    check(out == golden, || format!("differs from golden file:\n{out}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("4 solutions, golden match, {elapsed:?}"))
}

// 4 ------------------------------------------------------------------

/// Horn clauses over assumptions `0..assumptions` and derived nodes after
/// them; a `None` head is the false node.
#[derive(Debug, Clone)]
struct Fixture {
    assumptions: usize,
    derived: usize,
    rules: Vec<(Vec<usize>, Option<usize>)>,
}

fn random_fixture(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assumptions = rng.gen_range(6..=12);
    let derived = rng.gen_range(4..=8);
    let total = assumptions + derived;
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(10..=22) {
        let n = rng.gen_range(1..=3);
        let mut ants: Vec<usize> = (0..total).collect();
        ants.shuffle(&mut rng);
        ants.truncate(n);
        ants.sort();
        let head = if rng.gen_bool(0.15) {
            None
        } else {
            Some(assumptions + rng.gen_range(0..derived))
        };
        if head.map_or(true, |h| !ants.contains(&h)) {
            rules.push((ants, head));
        }
    }
    Fixture {
        assumptions,
        derived,
        rules,
    }
}

fn fixtures() -> Vec<Fixture> {
    let mut out = vec![
        // diamond with a nogood on one branch
        Fixture {
            assumptions: 4,
            derived: 3,
            rules: vec![
                (vec![0], Some(4)),
                (vec![1], Some(4)),
                (vec![4, 2], Some(5)),
                (vec![4, 3], Some(5)),
                (vec![5], Some(6)),
                (vec![1, 3], None),
            ],
        },
        // three-way exclusive choice feeding a cycle
        Fixture {
            assumptions: 5,
            derived: 3,
            rules: vec![
                (vec![0, 1], None),
                (vec![0, 2], None),
                (vec![1, 2], None),
                (vec![0], Some(5)),
                (vec![5, 3], Some(6)),
                (vec![6], Some(7)),
                (vec![7], Some(5)),
                (vec![2, 4], Some(7)),
            ],
        },
    ];
    out.extend((0..10).map(|s| random_fixture(0x5eed + s)));
    out
}

fn closure(f: &Fixture, chosen: u32) -> (BTreeSet<usize>, bool) {
    let mut known: BTreeSet<usize> = (0..f.assumptions).filter(|i| chosen >> i & 1 == 1).collect();
    let mut contradiction = false;
    loop {
        let mut grew = false;
        for (ants, head) in &f.rules {
            if ants.iter().all(|a| known.contains(a)) {
                match head {
                    Some(h) => grew |= known.insert(*h),
                    None => contradiction = true,
                }
            }
        }
        if !grew {
            return (known, contradiction);
        }
    }
}

fn truth_table_labels(f: &Fixture) -> Vec<BTreeSet<Vec<usize>>> {
    let mut holds: Vec<Vec<u32>> = vec![Vec::new(); f.assumptions + f.derived];
    for chosen in 0u32..(1 << f.assumptions) {
        let (known, bad) = closure(f, chosen);
        if !bad {
            for n in known {
                holds[n].push(chosen);
            }
        }
    }
    holds
        .into_iter()
        .map(|sets| {
            sets.iter()
                .filter(|&&s| !sets.iter().any(|&t| t != s && t & s == t))
                .map(|&s| (0..f.assumptions).filter(|i| s >> i & 1 == 1).collect())
                .collect()
        })
        .collect()
}

enum Op {
    Assume(usize),
    Justify(usize),
}

fn name(f: &Fixture, i: usize) -> String {
    if i < f.assumptions {
        format!("A{i}")
    } else {
        format!("n{}", i - f.assumptions)
    }
}

fn install(f: &Fixture, ops: &[Op]) -> Result<Vec<BTreeSet<Vec<usize>>>, String> {
    let mut db = Database::new();
    for op in ops {
        match op {
            Op::Assume(i) => {
                db.create_assumption(1.0, Origin::Plain, &name(f, *i))
                    .map_err(|e| e.to_string())?;
            }
            Op::Justify(r) => {
                let (ants, head) = &f.rules[*r];
                let ants: Vec<NodeId> = ants.iter().map(|&i| db.create_node(&name(f, i))).collect();
                let head = head.map_or(db.false_node(), |h| db.create_node(&name(f, h)));
                db.add_justification(&ants, head, "j").map_err(|e| e.to_string())?;
            }
        }
        let v = db.violations();
        if !v.is_empty() {
            return Err(format!("invariant broken: {v:?}"));
        }
    }
    Ok((0..f.assumptions + f.derived)
        .map(|i| {
            let Some(n) = db.node_by_datum(&name(f, i)) else {
                return BTreeSet::new();
            };
            db.label_sets(n)
                .into_iter()
                .map(|env| {
                    let mut v: Vec<usize> = db
                        .env_names(env)
                        .iter()
                        .map(|s| s[1..].parse().unwrap())
                        .collect();
                    v.sort();
                    v
                })
                .collect()
        })
        .collect())
}

fn atms_properties() -> Result<String, String> {
    let start = Instant::now();
    let all = fixtures();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut installs = 0;
    for (k, f) in all.iter().enumerate() {
        check(f.assumptions <= 12, || format!("fixture {k} too large"))?;
        let want = truth_table_labels(f);
        let mut ops: Vec<Op> = (0..f.assumptions)
            .map(Op::Assume)
            .chain((0..f.rules.len()).map(Op::Justify))
            .collect();
        for round in 0..21 {
            if round > 0 {
                ops.shuffle(&mut rng);
            }
            let got = install(f, &ops).map_err(|e| format!("fixture {k}: {e}"))?;
            check(got == want, || {
                format!("fixture {k} order {round}: labels {got:?} expected {want:?}")
            })?;
            installs += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("{} fixtures, {installs} installs, {elapsed:?}", all.len()))
}

// 5 ------------------------------------------------------------------

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0..=20) as f64 / 20.0
}

fn random_program(rng: &mut ChaCha8Rng) -> String {
    let props = rng.gen_range(2..=6);
    let mut text = String::new();
    let mut heads = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=6) {
        let head = rng.gen_range(0..props);
        let mut body: Vec<usize> = (0..props).filter(|&p| p != head).collect();
        body.shuffle(rng);
        body.truncate(rng.gen_range(1..=2));
        let body: Vec<String> = body.iter().map(|b| format!("(p{b})")).collect();
        text.push_str(&format!("(p{head}) :- {} : [1, 1]\n", body.join(" & ")));
        heads.insert(head);
    }
    for p in 0..props {
        if rng.gen_bool(0.7) {
            let a = unit(rng);
            let (l, u) = if heads.contains(&p) {
                (a, 1.0)
            } else {
                let b = unit(rng);
                (a.min(b), a.max(b))
            };
            text.push_str(&format!("(p{p}) : [{l}, {u}]\n"));
        }
    }
    text
}

fn compare_program(program: &Program, compiled: &Compiled) -> Result<Option<f64>, String> {
    if static_regime_violation(program).is_some() {
        return Ok(None);
    }
    let model = match OracleModel::build(program) {
        Ok(m) if m.conflict == 0.0 => m,
        _ => return Ok(None),
    };
    let r = &compiled.reasoner;
    let mut worst: f64 = 0.0;
    for p in model.props() {
        let s = model.support(p).unwrap();
        let node = r.atms().node_by_datum(&p.datum()).ok_or("missing node")?;
        let Ok(ev) = r.evaluate(node) else {
            return Ok(None);
        };
        if ev.plan.approximated() {
            return Ok(None);
        }
        worst = worst
            .max((ev.pair.lower() - s.belief).abs())
            .max((ev.pair.upper() - s.plausibility).abs());
    }
    Ok(Some(worst))
}

fn oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut accepted, mut tried) = (0, 0);
    let mut worst: f64 = 0.0;
    while accepted < 150 && tried < 5000 {
        tried += 1;
        let text = random_program(&mut rng);
        let program = parse(&text).map_err(|d| format!("{d}\n{text}"))?;
        let compiled = compile(&program).map_err(|d| format!("{d}\n{text}"))?;
        if let Some(delta) = compare_program(&program, &compiled)? {
            check(delta <= 1e-9, || format!("delta {delta:e} on\n{text}"))?;
            worst = worst.max(delta);
            accepted += 1;
        }
    }
    check(accepted >= 100, || format!("only {accepted} programs in regime"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "{accepted} programs ({tried} generated), max delta {worst:.1e}, {elapsed:?}"
    ))
}

// 6 ------------------------------------------------------------------

fn noisy_or_and_chains() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..1000 {
        let len = 2 + i % 5;
        let mut r = Reasoner::new();
        let mut prev = r.atms_mut().create_node("(p0)");
        let s0: f64 = rng.gen();
        r.assert_evidence(prev, SupportPair::simple(s0).unwrap()).unwrap();
        let mut product = s0;
        let mut stepwise = SupportPair::simple(s0).unwrap();
        for k in 1..=len {
            let next = r.atms_mut().create_node(&format!("(p{k})"));
            let s: f64 = rng.gen();
            let strength = SupportPair::simple(s).unwrap();
            r.compile_rule(&[prev], next, strength).unwrap();
            product *= s;
            stepwise = slatms_core::slp_propagate(strength, stepwise);
            prev = next;
        }
        let got = r.evaluate(prev).map_err(|e| e.to_string())?.pair;
        check(
            (got.lower() - product).abs() <= 1e-9
                && (got.upper() - 1.0).abs() <= 1e-9
                && (stepwise.lower() - product).abs() <= 1e-9,
            || format!("chain of {len}: [{}, {}] vs {product}", got.lower(), got.upper()),
        )?;
    }
    for _ in 0..1000 {
        let (s, t): (f64, f64) = (rng.gen(), rng.gen());
        let c = slp_combine(SupportPair::simple(s).unwrap(), SupportPair::simple(t).unwrap())
            .map_err(|e| e.to_string())?;
        check(
            (c.lower() - (s + t - s * t)).abs() <= 1e-9 && (c.upper() - 1.0).abs() <= 1e-9,
            || format!("[{s},1] + [{t},1] gave [{}, {}]", c.lower(), c.upper()),
        )?;
    }
    Ok("1000 chains (lengths 2-6), 1000 noisy-or pairs".into())
}

// 7 ------------------------------------------------------------------

fn sensitivity_fixtures() -> Vec<(String, Compiled)> {
    let mut texts = vec![
        (
            "fig5".to_string(),
            std::fs::read_to_string(fixture_path()).unwrap(),
        ),
        (
            "reaction".to_string(),
            "(dir reactants down) :- (active reaction) : [2/3, 1]\n(active reaction) : [1/4, 2/3]\n"
                .to_string(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        texts.push((format!("random {i}"), random_program(&mut rng)));
    }
    texts
        .into_iter()
        .map(|(n, t)| (n, compile(&parse(&t).unwrap()).unwrap()))
        .collect()
}

fn sensitivity_contracts() -> Result<String, String> {
    let (mut kernels, mut clamps) = (0, 0);
    for (name, c) in sensitivity_fixtures() {
        let r = &c.reasoner;
        for node in r.atms().nodes() {
            let Ok(base) = r.evaluate(node.id) else { continue };
            let k = r.evaluate_with_kernel(node.id, &[]).map_err(|e| e.to_string())?;
            check(k == base, || format!("{name} {}: kernel {{}} differs", node.datum))?;
            kernels += 1;

            // one assumption shared by every contributing environment
            let included: Vec<_> = base
                .plan
                .terms
                .iter()
                .filter(|t| t.status == EnvStatus::Included)
                .collect();
            if included.is_empty() || included.iter().any(|t| t.side == Side::Negative) {
                continue;
            }
            let common = included[0].members.iter().find(|a| {
                r.atms().assumptions()[a.index()].origin != Origin::Plain
                    && included.iter().all(|t| t.members.contains(a))
            });
            let Some(&a) = common else { continue };
            let opts = EvalOptions::with_overrides(BTreeMap::from([(a, 0.0)]));
            let ev = r.evaluate_with(node.id, &opts).map_err(|e| e.to_string())?;
            check(ev.pair == SupportPair::VACUOUS, || {
                format!("{name} {}: clamp gave {:?}", node.datum, ev.pair)
            })?;
            clamps += 1;
        }
    }
    check(clamps > 0, || "no node had a unique supporting assumption".into())?;
    Ok(format!("{kernels} kernel checks, {clamps} clamp checks"))
}

// 8 ------------------------------------------------------------------

fn parser_robustness() -> Result<String, String> {
    let text = std::fs::read_to_string(fixture_path()).map_err(|e| e.to_string())?;
    let program = parse(&text).map_err(|d| d.to_string())?;
    check(program.statements.len() == 18, || {
        format!("{} statements", program.statements.len())
    })?;
    let again = parse(&program.to_string()).map_err(|d| d.to_string())?;
    check(again.structure() == program.structure(), || "round trip changed the AST".into())?;

    let tokens: Vec<String> = lex(&text)
        .map_err(|d| d.to_string())?
        .into_iter()
        .filter(|t| t.kind != TokenKind::Eof)
        .map(|t| text[t.span.start..t.span.end].to_string())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut rejected, mut accepted) = (0, 0);
    for i in 0..10_000 {
        let mut t = tokens.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let at = rng.gen_range(0..t.len());
            match rng.gen_range(0..4) {
                0 => {
                    t.remove(at);
                }
                1 => {
                    let dup = t[at].clone();
                    t.insert(at, dup);
                }
                2 => {
                    let other = rng.gen_range(0..t.len());
                    t.swap(at, other);
                }
                _ => {
                    let other = tokens[rng.gen_range(0..tokens.len())].clone();
                    t[at] = other;
                }
            }
            if t.is_empty() {
                break;
            }
        }
        let mutated = t.join(" ");
        let outcome = catch_unwind(AssertUnwindSafe(|| match parse(&mutated) {
            Ok(p) => {
                let _ = compile(&p);
                Ok(())
            }
            Err(d) => Err(d),
        }))
        .map_err(|_| format!("panic on mutation {i}: {mutated}"))?;
        match outcome {
            Ok(()) => accepted += 1,
            Err(d) => {
                check(
                    d.span.line >= 1 && d.span.col >= 1 && d.span.start <= mutated.len(),
                    || format!("bad span {:?} on {mutated}", d.span),
                )?;
                rejected += 1;
            }
        }
    }
    Ok(format!(
        "round trip ok, 10000 mutations ({rejected} diagnosed, {accepted} still valid)"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Result<String, String>); 8] = [
        ("inference reproduction", inference_reproduction),
        ("combination formula", combination_formula),
        ("structural reproduction", structural_reproduction),
        ("ATMS property suite", atms_properties),
        ("oracle equivalence", oracle_equivalence),
        ("noisy-or and chaining", noisy_or_and_chains),
        ("sensitivity contracts", sensitivity_contracts),
        ("parser robustness", parser_robustness),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    let _ = std::panic::take_hook();
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
