//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion, then
//! checks the exit codes of the `og` binary, and exits non-zero if anything
//! failed.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use og_core::oracle::{nash_oracle, spe_oracle, NormalFormSpec, SequentialSpec};
use og_core::profile_json::profile_to_json;
use og_core::stdgames::{self, CournotParams, UltimatumParams, UltimatumVariant};
use og_core::{equilibria, laws, ClosedGame, FiniteType, Scaled, SearchConfig, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn og(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_og"))
        .args(args)
        .env_remove("OG_WORKERS")
        .output()
        .expect("spawn og");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn og_json(args: &[&str]) -> Result<Json, String> {
    let r = og(args);
    if r.code != 0 {
        return Err(format!(
            "og {} exited {}: {}",
            args.join(" "),
            r.code,
            r.stderr.trim()
        ));
    }
    serde_json::from_str(&r.stdout).map_err(|e| format!("bad JSON from og {}: {e}", args.join(" ")))
}

fn untimed(mut j: Json) -> String {
    if let Some(o) = j.as_object_mut() {
        o.remove("elapsed_ms");
    }
    j.to_string()
}

fn eq_set(file: &str, extra: &[&str]) -> Result<Json, String> {
    let f = fixture(file);
    let mut args = vec!["eq", f.as_str()];
    args.extend_from_slice(extra);
    Ok(og_json(&args)?["equilibria"].clone())
}

fn within(limit: Duration, start: Instant, result: Outcome) -> Outcome {
    let took = start.elapsed();
    let detail = result?;
    if took > limit {
        Err(format!("{detail}; took {took:.2?}, limit {limit:?}"))
    } else {
        Ok(format!("{detail} in {took:.2?}"))
    }
}

fn expect_eq(found: &Json, expected: &Json) -> Outcome {
    if found == expected {
        Ok(format!(
            "{} equilibria as expected",
            found.as_array().map_or(0, |a| a.len())
        ))
    } else {
        Err(format!("expected {expected}, found {found}"))
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let r = eq_set("meeting_ny.og", &[]).and_then(|found| {
        expect_eq(
            &found,
            &json!([{ "P1": "GCT", "P2": "GCT" }, { "P1": "ES", "P2": "ES" }]),
        )
    });
    within(Duration::from_secs(1), start, r)
}

fn actions(n: usize) -> FiniteType {
    FiniteType::labels((0..n).map(|i| format!("a{i}"))).unwrap()
}

struct Bimatrix {
    y1: FiniteType,
    y2: FiniteType,
    cols: usize,
    pay: Arc<Vec<(f64, f64)>>,
}

impl Bimatrix {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let (rows, cols) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let pay =
            (0..rows * cols).map(|_| (rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64));
        Bimatrix {
            y1: actions(rows),
            y2: actions(cols),
            cols,
            pay: Arc::new(pay.collect()),
        }
    }

    fn payoff(&self) -> impl Fn(&Value, &Value) -> (f64, f64) + Clone + Send + Sync + 'static {
        let (y1, y2, cols, pay) = (
            self.y1.clone(),
            self.y2.clone(),
            self.cols,
            self.pay.clone(),
        );
        move |a, b| pay[y1.index_of(a).unwrap() as usize * cols + y2.index_of(b).unwrap() as usize]
    }
}

fn bimatrix_games() -> Vec<Bimatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (0..50).map(|_| Bimatrix::random(&mut rng)).collect()
}

/// Equilibria of every game, rendered as JSON, and whether each matched the oracle.
fn bimatrix_run(workers: usize) -> Result<(Json, usize), String> {
    let cfg = SearchConfig::default().with_workers(workers);
    let mut rendered = Vec::new();
    let mut mismatches = 0;
    for (i, b) in bimatrix_games().iter().enumerate() {
        let u = b.payoff();
        let g = stdgames::bimatrix(&b.y1, &b.y2, u.clone()).map_err(|e| e.to_string())?;
        let eqs = equilibria(&g, &cfg).map_err(|e| format!("game {i}: {e}"))?;
        let found: Vec<Vec<Value>> = eqs
            .iter()
            .map(|p| p.leaves().iter().map(|t| t[0].clone()).collect())
            .collect();
        let spec = NormalFormSpec {
            choices: vec![b.y1.clone(), b.y2.clone()],
            utility: Arc::new(move |p| {
                let (x, y) = u(&p[0], &p[1]);
                vec![x, y]
            }),
        };
        if found != nash_oracle(&spec, cfg.tol).map_err(|e| e.to_string())? {
            mismatches += 1;
        }
        let space = g.game().sigma();
        rendered.push(Json::Array(
            eqs.iter()
                .map(|p| profile_to_json(space, p))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?,
        ));
    }
    Ok((Json::Array(rendered), mismatches))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let r = bimatrix_run(1).and_then(|(_, bad)| match bad {
        0 => Ok("50 games agree with the Nash oracle".to_string()),
        n => Err(format!("{n} of 50 games disagree with the Nash oracle")),
    });
    within(Duration::from_secs(10), start, r)
}

/// Renders oracle pairs `(y1, σ2)` as profiles of `g`.
fn oracle_json(g: &ClosedGame, pairs: Vec<(Value, Vec<Value>)>) -> Result<Json, String> {
    let space = g.game().sigma();
    let mut out = Vec::new();
    for (y, table) in pairs {
        let p = space
            .from_leaves(vec![vec![y], table])
            .map_err(|e| e.to_string())?;
        out.push(profile_to_json(space, &p).map_err(|e| e.to_string())?);
    }
    Ok(Json::Array(out))
}

fn ultimatum_oracle(n: i64) -> Result<Json, String> {
    let resp = FiniteType::labels(["A", "R"]).unwrap();
    let accepted = |r: &Value| r.label_name() == Some("A");
    let spec = SequentialSpec {
        leader: FiniteType::int_range(0, n).unwrap(),
        follower: resp,
        u1: Arc::new(move |o, r| {
            if accepted(r) {
                o.as_f64().unwrap()
            } else {
                0.0
            }
        }),
        u2: Arc::new(move |o, r| {
            if accepted(r) {
                n as f64 - o.as_f64().unwrap()
            } else {
                0.0
            }
        }),
    };
    let g = stdgames::ultimatum(UltimatumParams { n }, UltimatumVariant::Separate)
        .map_err(|e| e.to_string())?;
    oracle_json(&g, spe_oracle(&spec, 1e-9).map_err(|e| e.to_string())?)
}

fn c3() -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let n3 = ["--param", "N=3"];
        let (separate, combined) = (
            eq_set("ultimatum.og", &n3)?,
            eq_set("ultimatum_combined.og", &n3)?,
        );
        if separate != combined {
            return Err(format!("variants differ: {separate} vs {combined}"));
        }
        let expected = ultimatum_oracle(3)?;
        let named = json!([
            { "P1": 2, "P2": [[0, "A"], [1, "A"], [2, "A"], [3, "R"]] },
            { "P1": 3, "P2": [[0, "A"], [1, "A"], [2, "A"], [3, "A"]] },
        ]);
        if expected != named {
            return Err(format!("oracle gave {expected}"));
        }
        expect_eq(&separate, &expected).map(|s| format!("{s}, both variants"))
    })();
    within(Duration::from_secs(1), start, r)
}

fn c4() -> Outcome {
    let start = Instant::now();
    let r = eq_set("cournot_13_1_1.og", &[])
        .and_then(|found| expect_eq(&found, &json!([{ "P1": 4, "P2": 4, "Pi": {} }])));
    within(Duration::from_secs(5), start, r)
}

fn stackelberg_oracle() -> Result<Json, String> {
    let grid = FiniteType::num_set([0, 2, 3, 4, 6].map(Scaled::from_int)).unwrap();
    let (a, b, c) = (13.0, 1.0, 1.0);
    let profit = move |own: f64, other: f64| own * (a - b * (own + other)) - c * own;
    let spec = SequentialSpec {
        leader: grid.clone(),
        follower: grid.clone(),
        u1: Arc::new(move |x, y| profit(x.as_f64().unwrap(), y.as_f64().unwrap())),
        u2: Arc::new(move |x, y| profit(y.as_f64().unwrap(), x.as_f64().unwrap())),
    };
    let g = stdgames::stackelberg(&CournotParams { a, b, c, grid }).map_err(|e| e.to_string())?;
    oracle_json(&g, spe_oracle(&spec, 1e-9).map_err(|e| e.to_string())?)
}

fn c5() -> Outcome {
    let start = Instant::now();
    let r = eq_set("stackelberg.og", &[]).and_then(|found| {
        let eqs = found.as_array().cloned().unwrap_or_default();
        if eqs.is_empty() {
            return Err("no equilibria".into());
        }
        for e in &eqs {
            let follows = e["P2"]
                .as_array()
                .and_then(|t| t.iter().find(|row| row[0] == json!(6)));
            if e["P1"] != json!(6) || follows.map(|row| &row[1]) != Some(&json!(3)) {
                return Err(format!("equilibrium {e} does not have leader 6 with 6 ↦ 3"));
            }
        }
        expect_eq(&found, &stackelberg_oracle()?).map(|s| format!("{s}, leader 6, follower 6 ↦ 3"))
    });
    within(Duration::from_secs(30), start, r)
}

fn table(entries: &[(i64, i64)]) -> Json {
    Json::Array(entries.iter().map(|(p, q)| json!([p, q])).collect())
}

fn monopolist_profile(price: i64, d1: &[(i64, i64)], d2: &[(i64, i64)]) -> String {
    json!({ "M": price, "PiM": { "D1": table(d1), "D2": table(d2) } }).to_string()
}

fn verify(file: &str, params: &[&str], profile: &str) -> Result<Json, String> {
    let f = fixture(file);
    let mut args = vec!["verify", f.as_str(), "--profile", profile];
    args.extend_from_slice(params);
    og_json(&args)
}

fn named_deviation(report: &Json, player: &str) -> bool {
    report["deviations"].as_array().is_some_and(|d| {
        d.iter()
            .any(|d| d["player"] == json!(player) && !d["to"].is_null())
    })
}

fn c6() -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let reply: Vec<(i64, i64)> = (0..=4).map(|i| (3 * i, (12 - 3 * i) / 3)).collect();
        let canonical = verify(
            "monopolist_duopoly.og",
            &[],
            &monopolist_profile(6, &reply, &reply),
        )?;
        if canonical["equilibrium"] != json!(true) {
            return Err(format!(
                "canonical profile rejected: {}",
                canonical["deviations"]
            ));
        }
        let mut greedy = reply.clone();
        greedy[2].1 = 3;
        let perturbed = [
            ("price 3", monopolist_profile(3, &reply, &reply), "M"),
            ("price 9", monopolist_profile(9, &reply, &reply), "M"),
            ("price 12", monopolist_profile(12, &reply, &reply), "M"),
            (
                "D1 overproduces at 6",
                monopolist_profile(6, &greedy, &reply),
                "PiM/D1",
            ),
        ];
        for (what, profile, player) in &perturbed {
            let report = verify("monopolist_duopoly.og", &[], profile)?;
            if report["equilibrium"] != json!(false) || !named_deviation(&report, player) {
                return Err(format!(
                    "{what}: expected rejection naming {player}, got {report}"
                ));
            }
        }
        Ok(format!(
            "canonical profile accepted, {} perturbations rejected",
            perturbed.len()
        ))
    })();
    within(Duration::from_secs(60), start, r)
}

fn repeated_profile(first: i64) -> String {
    let constant = |v: i64| json!({ "default": 2, "overrides": if v == 2 { json!([]) } else { json!([[[], v]]) } });
    json!({
        "Stage": { "P1": constant(first), "P2": constant(2) },
        "Stage#2": { "P1": constant(2), "P2": constant(2) },
    })
    .to_string()
}

fn c7() -> Outcome {
    let start = Instant::now();
    let r = (|| {
        for beta in ["0", "0.5", "1"] {
            let param = format!("beta={beta}");
            let params = ["--param", param.as_str()];
            let markov = verify("repeated_cournot.og", &params, &repeated_profile(2))?;
            if markov["equilibrium"] != json!(true) {
                return Err(format!(
                    "beta {beta}: Markov profile rejected: {}",
                    markov["deviations"]
                ));
            }
            let deviant = verify("repeated_cournot.og", &params, &repeated_profile(3))?;
            if deviant["equilibrium"] != json!(false) || !named_deviation(&deviant, "Stage/P1") {
                return Err(format!(
                    "beta {beta}: period-1 deviation not rejected: {deviant}"
                ));
            }
        }
        Ok("accepted and deviation rejected for beta 0, 0.5, 1".to_string())
    })();
    within(Duration::from_secs(60), start, r)
}

fn c8() -> Outcome {
    let start = Instant::now();
    let r = (|| {
        for law in laws::LAWS {
            for seed in 0..20 {
                laws::check(law, seed).map_err(|m| format!("{law} seed {seed}: {}", m.0))?;
            }
        }
        Ok(format!("{} laws x 20 instances", laws::LAWS.len()))
    })();
    within(Duration::from_secs(60), start, r)
}

fn c9() -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let bend = og(&["check", &fixture("invalid/yanking.og")]);
        if bend.code != 2 || !bend.stderr.contains("upward bend not permitted") {
            return Err(format!(
                "yanking fixture: exit {} {}",
                bend.code,
                bend.stderr.trim()
            ));
        }
        let mut n = 0;
        for entry in std::fs::read_dir(root().join("fixtures")).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.extension().is_some_and(|e| e == "og") {
                let r = og(&["check", &path.display().to_string()]);
                if r.code != 0 {
                    return Err(format!("{}: {}", path.display(), r.stderr.trim()));
                }
                n += 1;
            }
        }
        Ok(format!("unit bend rejected, {n} fixtures typecheck"))
    })();
    within(Duration::from_secs(1), start, r)
}

fn determinism_snapshot(w: usize) -> Result<Vec<String>, String> {
    let ws = w.to_string();
    let flag = ["--workers", ws.as_str()];
    let run = |file: &str, extra: &[&str]| -> Result<String, String> {
        let f = fixture(file);
        let mut args = vec!["eq", f.as_str()];
        args.extend_from_slice(extra);
        args.extend_from_slice(&flag);
        og_json(&args).map(untimed)
    };
    Ok(vec![
        run("meeting_ny.og", &[])?,
        bimatrix_run(w)?.0.to_string(),
        run("ultimatum.og", &["--param", "N=3"])?,
        run("ultimatum_combined.og", &["--param", "N=3"])?,
        run("cournot_13_1_1.og", &[])?,
        run("stackelberg.og", &[])?,
    ])
}

fn c10() -> Outcome {
    let base = determinism_snapshot(1)?;
    for w in [2, 8] {
        let other = determinism_snapshot(w)?;
        for (i, (a, b)) in base.iter().zip(&other).enumerate() {
            if a != b {
                return Err(format!("output {i} differs between 1 and {w} workers"));
            }
        }
    }
    Ok(format!(
        "{} outputs identical at 1, 2 and 8 workers",
        base.len()
    ))
}

fn exit_code_checks() -> Vec<(&'static str, Result<(), String>)> {
    let meeting = fixture("meeting_ny.og");
    let missing = root().join("fixtures/missing.og").display().to_string();
    let cases: Vec<(&str, Vec<&str>, i32)> = vec![
        ("check succeeds", vec!["check", &meeting], 0),
        ("help", vec!["--help"], 0),
        ("unknown subcommand", vec!["solve", &meeting], 1),
        ("missing file argument", vec!["eq"], 1),
        ("zero budget", vec!["eq", &meeting, "--budget", "0"], 1),
        ("negative tolerance", vec!["eq", &meeting, "--tol", "-1"], 1),
        ("unknown format", vec!["eq", &meeting, "--format", "xml"], 1),
        ("parse error", vec!["check", "__PARSE__"], 2),
        ("composition mismatch", vec!["check", "__MISMATCH__"], 2),
        ("open game", vec!["eq", "__DECISION__"], 2),
        (
            "unknown parameter",
            vec!["eq", &meeting, "--param", "Z=1"],
            2,
        ),
        (
            "malformed profile",
            vec!["verify", &meeting, "--profile", "{\"P1\":"],
            2,
        ),
        (
            "profile shape",
            vec![
                "verify",
                &meeting,
                "--profile",
                "{\"P1\":\"X\",\"P2\":\"ES\"}",
            ],
            2,
        ),
        ("space over budget", vec!["eq", "__MONOPOLIST__"], 3),
        ("budget exhausted", vec!["eq", &meeting, "--budget", "4"], 3),
        ("missing file", vec!["check", &missing], 4),
        (
            "unwritable output",
            vec!["dot", &meeting, "--out", "/nonexistent/dir/x.dot"],
            4,
        ),
    ];
    let parse_bad = std::env::temp_dir().join(format!("og-parse-{}.og", std::process::id()));
    std::fs::write(&parse_bad, "diagram = (copy[").unwrap();
    let subst = |a: &str| -> String {
        match a {
            "__PARSE__" => parse_bad.display().to_string(),
            "__MISMATCH__" => fixture("invalid/mismatch.og"),
            "__DECISION__" => fixture("decision.og"),
            "__MONOPOLIST__" => fixture("monopolist_duopoly.og"),
            other => other.to_string(),
        }
    };
    let mut out: Vec<(&'static str, Result<(), String>)> = cases
        .into_iter()
        .map(|(name, args, want)| {
            let args: Vec<String> = args.iter().map(|a| subst(a)).collect();
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let r = og(&refs);
            let res = if r.code == want {
                Ok(())
            } else {
                Err(format!(
                    "exit {} (want {want}): {}",
                    r.code,
                    r.stderr.trim()
                ))
            };
            (name, res)
        })
        .collect();
    let _ = std::fs::remove_file(&parse_bad);

    let env_workers = Command::new(env!("CARGO_BIN_EXE_og"))
        .args(["eq", &meeting])
        .env("OG_WORKERS", "0")
        .output()
        .map(|o| o.status.code());
    out.push((
        "OG_WORKERS is validated",
        match env_workers {
            Ok(Some(1)) => Ok(()),
            other => Err(format!("{other:?}")),
        },
    ));

    let dot = std::env::temp_dir().join(format!("og-meeting-{}.dot", std::process::id()));
    let r = og(&["dot", &meeting, "--out", &dot.display().to_string()]);
    let written = std::fs::read_to_string(&dot).unwrap_or_default();
    let _ = std::fs::remove_file(&dot);
    out.push((
        "dot writes --out",
        if r.code == 0 && written.starts_with("digraph") && written == og(&["dot", &meeting]).stdout
        {
            Ok(())
        } else {
            Err(format!("exit {}, {} bytes", r.code, written.len()))
        },
    ));

    let verdict = og(&[
        "verify",
        &meeting,
        "--profile",
        "{\"P1\":\"GCT\",\"P2\":\"ES\"}",
    ]);
    out.push((
        "verify exits 0 on a rejected profile",
        if verdict.code == 0 && verdict.stdout.contains("\"equilibrium\": false") {
            Ok(())
        } else {
            Err(format!("exit {}", verdict.code))
        },
    ));
    out
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("meeting in New York", c1),
        ("bimatrix games match the Nash oracle", c2),
        ("ultimatum N=3", c3),
        ("Cournot 13/1/1 unique (4,4)", c4),
        ("Stackelberg", c5),
        ("monopolist-duopoly verify", c6),
        ("repeated Cournot verify", c7),
        ("algebraic laws", c8),
        ("well-formedness", c9),
        ("determinism across workers", c10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        match run() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL  {name}: {detail}");
                failed.push(format!("criterion {n}"));
            }
        }
    }
    for (name, result) in exit_code_checks() {
        match result {
            Ok(()) => println!("exit code   PASS  {name}"),
            Err(detail) => {
                println!("exit code   FAIL  {name}: {detail}");
                failed.push(format!("exit code check `{name}`"));
            }
        }
    }
    if !failed.is_empty() {
        println!("\nfailed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
