//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines print in order; exits non-zero if any check fails.

mod common;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use hsf::stats::working_set_bytes;
use hsf::tokenizer::{segment_surface, ClassRef};
use hsf::{enumerate_variants, round_trip_check, Engine, TokenKind};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_compound(engine: &Engine) -> Check {
    let input = "鼠标左键双击（19，16），随后等待7秒，复制当前选中内容，缩小页面，关闭当前页面，并按下回车键";
    let want = "双击（19，16），等7秒，拷，缩小，关页，回车";
    let t0 = Instant::now();
    let got = engine.normalize(input).map_err(|e| e.to_string())?;
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    ensure(got == want, || format!("got {got:?}"))?;
    ensure(ms < 50.0, || format!("took {ms:.2} ms"))?;
    Ok(format!("byte-exact, {ms:.3} ms"))
}

fn url_and_program_pairs(engine: &Engine) -> Check {
    let t = engine.parse("打开www.baidu.com").map_err(|e| e.to_string())?;
    ensure(t.canonical == "开www.baidu.com", || format!("url: got {:?}", t.canonical))?;
    let l1 = &t.sentences[0].layers[0];
    let has_tuple = l1
        .digested
        .iter()
        .any(|w| w.representative == "“www.baidu.com”" && w.label == "网址");
    ensure(has_tuple, || "no (“www.baidu.com”, 网址) tuple in the trace".into())?;
    let fw = t.sentences[0].layers[1].framework.as_deref();
    ensure(fw == Some("open-url"), || format!("url framework {fw:?}"))?;

    let t = engine.parse("启动WPS").map_err(|e| e.to_string())?;
    ensure(t.canonical == "开WPS", || format!("program: got {:?}", t.canonical))?;
    let fw = t.sentences[0].layers[1].framework.as_deref();
    ensure(fw == Some("open-program"), || format!("program framework {fw:?}"))?;
    Ok("开www.baidu.com via open-url, 开WPS via open-program".into())
}

fn multiplication_rule(engine: &Engine) -> Check {
    let vs = enumerate_variants(engine, "close-program", &slots(&[])).map_err(|e| e.to_string())?;
    ensure(vs.variants.len() == 30 && vs.expected_count == 30, || {
        format!("{} variants, expected_count {}", vs.variants.len(), vs.expected_count)
    })?;
    let report = round_trip_check(engine, &vs);
    ensure(report.expected == "关程序", || format!("canonical {:?}", report.expected))?;
    ensure(report.passed(), || format!("{} round-trip failures", report.failures.len()))?;
    Ok("30 variants, 0 round-trip failures".into())
}

fn footprint(engine: &Engine) -> Check {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo.json");
    let on_disk = std::fs::metadata(path).map_err(|e| e.to_string())?.len();
    ensure(on_disk < 2 * 1024 * 1024, || format!("ruleset is {on_disk} bytes"))?;

    // corpus lines plus one input of exactly 1000 characters
    let mut long = String::new();
    for l in CORPUS.lines().cycle() {
        if long.chars().count() + l.chars().count() + 1 > 1000 {
            break;
        }
        if !long.is_empty() {
            long.push('，');
        }
        long.push_str(l);
    }
    while long.chars().count() < 1000 {
        long.push('页');
    }
    let mut peak = 0;
    for input in CORPUS.lines().chain(std::iter::once(long.as_str())) {
        if let Ok(t) = engine.parse(input) {
            peak = peak.max(working_set_bytes(engine, &t));
        }
    }
    ensure(peak < 10 * 1024 * 1024, || format!("estimated working set {peak} bytes"))?;
    Ok(format!("{on_disk} bytes on disk, peak estimate {peak} bytes"))
}

fn long_input(engine: &Engine) -> Check {
    let mut text = String::new();
    let mut chars = 0;
    for l in CORPUS.lines().cycle() {
        if chars >= 100_000 {
            break;
        }
        if !text.is_empty() {
            text.push('，');
            chars += 1;
        }
        text.push_str(l);
        chars += l.chars().count();
    }
    let t0 = Instant::now();
    let trace = engine.parse(&text).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    let rate = chars as f64 / secs;
    ensure(!trace.canonical.is_empty(), || "empty output".into())?;
    ensure(rate >= 1e5, || format!("{rate:.0} chars/s"))?;
    Ok(format!("{chars} chars in {:.1} ms, {rate:.0} chars/s", secs * 1e3))
}

fn run_prop<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn property_suites(engine: &Engine) -> Check {
    // (a) partition and reconstruction
    let text = prop::collection::vec(prop::sample::select(MIXED_ALPHABET), 1..80).prop_map(|cs| cs.into_iter().collect::<String>());
    run_prop(1000, text, |text| {
        let chars: Vec<char> = text.chars().collect();
        let tokens = segment_surface(&engine.layers()[0], &chars);
        let mut pos = 0;
        for t in &tokens {
            prop_assert_eq!(t.span.start, pos);
            prop_assert!(!t.span.is_empty());
            pos = t.span.end;
        }
        prop_assert_eq!(pos, chars.len());
        prop_assert_eq!(tokens.iter().map(|t| t.surface.as_str()).collect::<String>(), text);
        Ok(())
    })
    .map_err(|e| format!("(a) {e}"))?;

    // (b) keyword pass against brute force on lexicons of at most 50 members
    let alphabet = prop::sample::select(&['a', 'b', 'c', '开', '关'][..]);
    let member = prop::collection::vec(alphabet.clone(), 1..5).prop_map(|cs| cs.into_iter().collect::<String>());
    let lexicon = (
        prop::collection::btree_set(member, 1..=50),
        prop::collection::vec(1usize..5, 1..20),
        prop::collection::vec(alphabet, 0..40),
    );
    run_prop(500, lexicon, |(members, sizes, text)| {
        let classes = into_classes(members.into_iter().collect(), &sizes);
        let layer = lexicon_layer(&classes);
        let got: Vec<(usize, usize, u32)> = segment_surface(&layer, &text)
            .into_iter()
            .filter_map(|t| match (t.kind, t.class_ref) {
                (TokenKind::Keyword, ClassRef::Class(c)) => Some((t.span.start, t.span.end, c.0)),
                _ => None,
            })
            .collect();
        prop_assert_eq!(got, oracle_keywords(&classes, &text));
        Ok(())
    })
    .map_err(|e| format!("(b) {e}"))?;

    // (c) idempotence on fully known corpus lines
    let known = known_corpus_lines(engine);
    for l in &known {
        let once = engine.normalize(l).map_err(|e| e.to_string())?;
        let twice = engine.normalize(&once).map_err(|e| e.to_string())?;
        ensure(once == twice, || format!("(c) {l:?}: {once:?} then {twice:?}"))?;
    }

    // (d) representatives are fixed points
    let mut reps = 0;
    for layer in engine.layers() {
        for class in &layer.layer.classes {
            let surface = class.representative.joined();
            let connector = layer.layer.connector_label.as_deref() == Some(class.label.as_str());
            let (rep, label) = if connector {
                let t = engine.tokenize(&surface).map_err(|e| e.to_string())?;
                ensure(t.len() == 1, || format!("(d) {surface} splits"))?;
                (t[0].surface.clone(), t[0].label.clone().unwrap_or_default())
            } else {
                let w = engine.digest_at(&surface, layer.id()).map_err(|e| e.to_string())?;
                ensure(w.len() == 1, || format!("(d) {surface} splits"))?;
                (w[0].representative.clone(), w[0].label.clone())
            };
            ensure(rep == surface && label == class.label, || format!("(d) {surface} -> ({rep}, {label})"))?;
            reps += 1;
        }
    }

    // (e) determinism over two full corpus runs
    let run = || {
        let fresh = demo();
        CORPUS
            .lines()
            .map(|l| match fresh.parse(l) {
                Ok(t) => serde_json::to_string(&t).unwrap(),
                Err(e) => e.to_string(),
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    ensure(run() == run(), || "(e) corpus outputs differ between runs".into())?;

    Ok(format!(
        "(a) 1000 cases, (b) 500 cases, (c) {} lines, (d) {reps} classes, (e) identical",
        known.len()
    ))
}

fn validator_faults() -> Check {
    let mut named = Vec::new();
    for (diag, v) in faulty_rulesets() {
        let mut f = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
        f.write_all(v.to_string().as_bytes()).map_err(|e| e.to_string())?;
        let (code, out, _) = run_cli(&["validate", "-r", f.path().to_str().unwrap()], "");
        ensure(code == 2, || format!("{diag}: exit {code}"))?;
        ensure(out.contains(&format!("error: {diag}:")), || format!("{diag}: not reported in {out:?}"))?;
        named.push(diag);
    }
    Ok(format!("exit 2 for {}", named.join(", ")))
}

fn main() -> ExitCode {
    let engine = demo();
    let checks: Vec<(&str, Check)> = vec![
        ("golden compound command", golden_compound(&engine)),
        ("url and program commands", url_and_program_pairs(&engine)),
        ("multiplication rule for 关程序", multiplication_rule(&engine)),
        ("footprint", footprint(&engine)),
        ("100k-character input", long_input(&engine)),
        ("property suites", property_suites(&engine)),
        ("validator fault injection", validator_faults()),
    ];
    let mut failed = 0;
    for (name, result) in &checks {
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
