//! Golden runs of the corpus and syntax round trips.

use std::collections::BTreeMap;
use std::path::PathBuf;

use ellipsis_core::report::{run, run_corpus, RunOptions, Status};
use ellipsis_core::syntax::{parse_problem, parse_readable, render, to_sexpr, ProblemFile};
use ellipsis_core::term::{alpha_equal, Term};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn files() -> Vec<(String, String)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "ell"))
        .map(|p| {
            let name = p.file_name().unwrap().to_str().unwrap().to_string();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn parsed() -> Vec<(String, ProblemFile)> {
    files()
        .into_iter()
        .map(|(n, text)| {
            let f = parse_problem(&text, &n).unwrap_or_else(|e| panic!("{n}: {e}"));
            (n, f)
        })
        .collect()
}

#[test]
fn every_expectation_holds() {
    for (name, f) in parsed() {
        if f.exploratory {
            continue;
        }
        let mut settings: Vec<Option<bool>> = f.expectations.iter().map(|e| e.linking).collect();
        settings.push(None);
        for linking in settings {
            let r = run(&f, &name, &RunOptions { linking, ..RunOptions::default() });
            assert_eq!(r.status, Status::Pass, "{name} linking {linking:?}:\n{}", r.to_text());
        }
    }
}

#[test]
fn corpus_covers_the_worked_examples() {
    let names: Vec<String> = parsed().into_iter().map(|(_, f)| f.name).collect();
    for want in [
        "golf",
        "wife",
        "pleonastic",
        "wescoat",
        "polarity",
        "poem",
        "fool",
        "greet-when",
        "greet-that",
        "gave-every",
        "type-raising",
        "revise-teacher",
        "bill-harry",
        "edith",
    ] {
        assert!(names.iter().any(|n| n == want), "{want}");
    }
}

#[test]
fn reports_are_deterministic() {
    let opts = RunOptions::default();
    let a = run_corpus(&corpus_dir(), &opts).unwrap().to_json();
    let b = run_corpus(&corpus_dir(), &opts).unwrap().to_json();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    for run in v["runs"].as_array().unwrap() {
        for key in ["readings", "counts", "failures", "status"] {
            assert!(run.get(key).is_some(), "{key}");
        }
        let c = &run["counts"];
        assert!(c["raw"].as_u64() >= c["primary"].as_u64());
        assert!(c["primary"].as_u64() >= c["linking"].as_u64());
    }
}

fn same(a: &Term, b: &Term) -> bool {
    alpha_equal(a, b) && a == b
}

#[test]
fn problem_terms_survive_printing_and_reparsing() {
    for (name, f) in parsed() {
        let mut decls = String::new();
        for n in f.env.names() {
            if let Some(ty) = f.env.lookup(n) {
                if &**n != "and" && &**n != "Δ" {
                    decls += &format!("(decl {n} {})\n", ellipsis_core::syntax::type_sexpr(ty));
                }
            }
        }
        let assumes: String = f
            .vars
            .keys()
            .map(|v| format!("(assume (bind {v}))\n"))
            .collect();
        let text = format!("{decls}{assumes}(source {})\n", to_sexpr(&f.problem.source));
        let again = parse_problem(&text, "again").unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert!(same(&again.problem.source, &f.problem.source), "{name}");
    }
}

#[test]
fn rendering_is_a_fixpoint() {
    for (name, f) in parsed() {
        let free: BTreeMap<_, _> = f.free_types();
        let r = run(&f, &name, &RunOptions::default());
        for reading in &r.readings {
            let t = parse_readable(&reading.text, &f.env, &free).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(render(&t), reading.text);
        }
        for e in &f.expectations {
            for x in &e.readings {
                let text = render(&x.term);
                assert_eq!(render(&parse_readable(&text, &f.env, &free).unwrap()), text);
            }
        }
    }
}
