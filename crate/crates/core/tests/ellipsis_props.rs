//! Invariants of ellipsis resolution, over the corpus and random problems.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use ellipsis_core::ellipsis::{placeholder, Clause, EllipsisProblem, SOURCE};
use ellipsis_core::scope::enumerate_derivations;
use ellipsis_core::syntax::{parse_problem, ProblemFile};
use ellipsis_core::term::{normalize, Term};
use ellipsis_core::unify::SearchBudget;
use ellipsis_core::Type;
use proptest::prelude::*;

fn corpus() -> Vec<ProblemFile> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "ell"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|f| parse_problem(&std::fs::read_to_string(f).unwrap(), "corpus").unwrap())
        .collect()
}

fn reading_set(p: &EllipsisProblem, linking: bool) -> BTreeSet<Term> {
    enumerate_derivations(p, &SearchBudget::default(), linking)
        .unwrap()
        .readings
        .into_iter()
        .map(|r| r.term)
        .collect()
}

#[test]
fn linking_only_removes_readings() {
    for f in corpus() {
        let off = reading_set(&f.problem, false);
        let on = reading_set(&f.problem, true);
        assert!(on.is_subset(&off), "{}", f.name);
    }
}

#[test]
fn readings_are_closed_and_unmarked() {
    for f in corpus() {
        let r = enumerate_derivations(&f.problem, &SearchBudget::default(), f.linking).unwrap();
        for x in &r.readings {
            assert!(!x.term.contains_prim(), "{}", f.name);
            assert!(x.term.free_vars().is_empty(), "{}", f.name);
            assert!(x.term.is_locally_closed(), "{}", f.name);
            assert_eq!(ellipsis_core::term::type_in_context(&x.term, &[]).unwrap(), Type::Truth);
        }
        let c = r.counts;
        assert!(c.raw >= c.primary && c.primary >= c.linking, "{}", f.name);
    }
}

#[test]
fn clause_order_does_not_matter() {
    for f in corpus().into_iter().filter(|f| f.problem.clauses.len() > 1) {
        let mut rev = f.problem.clone();
        rev.clauses.reverse();
        for linking in [false, true] {
            assert_eq!(reading_set(&f.problem, linking), reading_set(&rev, linking), "{}", f.name);
        }
    }
}

#[test]
fn bindings_recover_the_source() {
    // Problems whose only clause reads the source clause directly.
    for f in corpus() {
        let p = &f.problem;
        if p.clauses.len() != 1 || !p.assumptions.is_empty() {
            continue;
        }
        let c = &p.clauses[0];
        if c.rhs != Term::var(&placeholder(SOURCE)) {
            continue;
        }
        let r = enumerate_derivations(p, &SearchBudget::default(), f.linking).unwrap();
        for x in &r.readings {
            let b = &x.bindings[&c.unknown];
            let applied = normalize(&Term::apply(b.clone(), c.parallels.iter().map(|(s, _)| s.clone())));
            assert_eq!(applied.strip(), normalize(&p.source.strip()), "{}", f.name);
        }
    }
}

/// A single-parallel problem with one primary occurrence of `a` and `k`
/// secondary ones, spread over a random conjunction.
fn strict_sloppy(seed: u64, k: usize) -> EllipsisProblem {
    use rand::Rng;
    let mut r = common::rng(seed);
    let a = common::ent("a");
    let preds = ["p", "q", "s"];
    let mut conjuncts = vec![Term::app(common::k("p", Type::predicate()), Term::prim(a.clone()))];
    for _ in 0..k {
        let p = preds[r.gen_range(0..preds.len())];
        let arg = if r.gen_bool(0.5) {
            a.clone()
        } else {
            Term::app(common::k("f", Type::func(Type::Entity, Type::Entity)), a.clone())
        };
        conjuncts.insert(r.gen_range(0..=conjuncts.len()), Term::app(common::k(p, Type::predicate()), arg));
    }
    let mut source = conjuncts.pop().unwrap();
    while let Some(c) = conjuncts.pop() {
        source = Term::and(c, source);
    }
    EllipsisProblem {
        assumptions: vec![],
        source,
        clauses: vec![Clause {
            unknown: "P".into(),
            parallels: vec![(a, common::ent("b"))],
            rhs: Term::var(&placeholder(SOURCE)),
            links: vec![],
        }],
        frame: Term::var(&placeholder("P")),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strict_sloppy_count_law(seed in any::<u64>(), k in 0usize..6) {
        let p = strict_sloppy(seed, k);
        let r = ellipsis_core::ellipsis::solve_system(&p, &SearchBudget::default(), false).unwrap();
        prop_assert_eq!(r.counts.primary, 1 << k);
        prop_assert_eq!(r.readings.len(), 1 << k);
    }
}
