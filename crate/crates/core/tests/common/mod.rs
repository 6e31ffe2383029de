//! Random well-typed terms and independent reference implementations used as
//! oracles by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ellipsis_core::term::{Term, FST, SND};
use ellipsis_core::Type;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn e() -> Type {
    Type::Entity
}

pub fn t() -> Type {
    Type::Truth
}

pub fn k(name: &str, ty: Type) -> Term {
    Term::constant(name, ty)
}

pub fn ent(name: &str) -> Term {
    k(name, e())
}

/// A constant named after its type, so every type has an inhabitant.
fn constant_of(ty: &Type, rng: &mut ChaCha8Rng) -> Term {
    let pick = rng.gen_range(0..2);
    k(&format!("c{pick}:{ty}"), ty.clone())
}

fn small_type(rng: &mut ChaCha8Rng) -> Type {
    match rng.gen_range(0..5) {
        0 | 1 => e(),
        2 => t(),
        3 => Type::predicate(),
        _ => Type::pair(e(), t()),
    }
}

/// A random term of type `ty` in a context of bound-variable types (innermost
/// last), with at most `depth` levels of structure. Redexes, projections and
/// markers are all generated.
pub fn gen_term(rng: &mut ChaCha8Rng, ty: &Type, ctx: &mut Vec<Type>, depth: usize) -> Term {
    if depth == 0 || rng.gen_ratio(1, 6) {
        return leaf(rng, ty, ctx);
    }
    match rng.gen_range(0..10) {
        0..=2 => match ty {
            Type::Func(a, b) => {
                ctx.push((**a).clone());
                let body = gen_term(rng, b, ctx, depth - 1);
                ctx.pop();
                Term::Abs((**a).clone(), Box::new(body))
            }
            Type::Pair(a, b) => Term::pair(gen_term(rng, a, ctx, depth - 1), gen_term(rng, b, ctx, depth - 1)),
            _ => leaf(rng, ty, ctx),
        },
        3..=6 => {
            let arg_ty = small_type(rng);
            let fty = Type::func(arg_ty.clone(), ty.clone());
            // Prefer an explicit abstraction in head position, to create redexes.
            let f = if rng.gen_bool(0.5) {
                ctx.push(arg_ty.clone());
                let body = gen_term(rng, ty, ctx, depth - 1);
                ctx.pop();
                Term::Abs(arg_ty.clone(), Box::new(body))
            } else {
                gen_term(rng, &fty, ctx, depth - 1)
            };
            Term::app(f, gen_term(rng, &arg_ty, ctx, depth - 1))
        }
        7 => {
            let other = small_type(rng);
            if rng.gen_bool(0.5) {
                let pty = Type::pair(ty.clone(), other);
                Term::app(Term::fst(&pty), gen_term(rng, &pty, ctx, depth - 1))
            } else {
                let pty = Type::pair(other, ty.clone());
                Term::app(Term::snd(&pty), gen_term(rng, &pty, ctx, depth - 1))
            }
        }
        8 => Term::prim(gen_term(rng, ty, ctx, depth - 1)),
        _ => leaf(rng, ty, ctx),
    }
}

fn leaf(rng: &mut ChaCha8Rng, ty: &Type, ctx: &[Type]) -> Term {
    let bound: Vec<u32> = ctx
        .iter()
        .rev()
        .enumerate()
        .filter(|(_, t)| *t == ty)
        .map(|(i, _)| i as u32)
        .collect();
    if !bound.is_empty() && rng.gen_bool(0.6) {
        return Term::Bound(bound[rng.gen_range(0..bound.len())]);
    }
    constant_of(ty, rng)
}

pub fn random_type(rng: &mut ChaCha8Rng, depth: usize) -> Type {
    if depth == 0 {
        return if rng.gen_bool(0.5) { e() } else { t() };
    }
    match rng.gen_range(0..4) {
        0 => e(),
        1 => t(),
        2 => Type::func(random_type(rng, depth - 1), random_type(rng, depth - 1)),
        _ => Type::pair(random_type(rng, depth - 1), random_type(rng, depth - 1)),
    }
}

/// A closed well-typed term of a random type.
pub fn closed_term(seed: u64, depth: usize) -> (Term, Type) {
    let mut r = rng(seed);
    let ty = random_type(&mut r, 2);
    (gen_term(&mut r, &ty, &mut Vec::new(), depth), ty)
}

// Reference β-reducer on de Bruijn terms, written independently of the library.

fn lift(t: &Term, by: u32, cutoff: u32) -> Term {
    match t {
        Term::Bound(i) if *i >= cutoff => Term::Bound(i + by),
        Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(lift(b, by, cutoff + 1))),
        Term::App(a, b) => Term::App(Box::new(lift(a, by, cutoff)), Box::new(lift(b, by, cutoff))),
        Term::Pair(a, b) => Term::Pair(Box::new(lift(a, by, cutoff)), Box::new(lift(b, by, cutoff))),
        Term::Prim(a) => Term::Prim(Box::new(lift(a, by, cutoff))),
        other => other.clone(),
    }
}

/// `body[0 := arg]`, lowering the other loose indices.
fn subst_top(body: &Term, arg: &Term, depth: u32) -> Term {
    match body {
        Term::Bound(i) if *i == depth => lift(arg, depth, 0),
        Term::Bound(i) if *i > depth => Term::Bound(i - 1),
        Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(subst_top(b, arg, depth + 1))),
        Term::App(a, b) => Term::App(Box::new(subst_top(a, arg, depth)), Box::new(subst_top(b, arg, depth))),
        Term::Pair(a, b) => Term::Pair(Box::new(subst_top(a, arg, depth)), Box::new(subst_top(b, arg, depth))),
        Term::Prim(a) => Term::Prim(Box::new(subst_top(a, arg, depth))),
        other => other.clone(),
    }
}

fn peel(t: &Term) -> &Term {
    match t {
        Term::Prim(x) => peel(x),
        other => other,
    }
}

/// Contracts the redex at the root, if there is one.
fn contract(t: &Term) -> Option<Term> {
    let Term::App(f, a) = t else { return None };
    match peel(f) {
        Term::Abs(_, body) => Some(subst_top(body, a, 0)),
        Term::Const(n, _) if &**n == FST || &**n == SND => match peel(a) {
            Term::Pair(x, y) => Some(if &**n == FST { (**x).clone() } else { (**y).clone() }),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Leftmost outermost redex first.
    Normal,
    /// Leftmost innermost redex first.
    Applicative,
}

/// One reduction step by `strategy`.
pub fn step(t: &Term, strategy: Strategy) -> Option<Term> {
    if strategy == Strategy::Normal {
        if let Some(r) = contract(t) {
            return Some(r);
        }
    }
    let inner = match t {
        Term::Abs(ty, b) => step(b, strategy).map(|b| Term::Abs(ty.clone(), Box::new(b))),
        Term::Prim(x) => step(x, strategy).map(|x| Term::Prim(Box::new(x))),
        Term::App(a, b) => match step(a, strategy) {
            Some(a) => Some(Term::App(Box::new(a), b.clone())),
            None => step(b, strategy).map(|b| Term::App(a.clone(), Box::new(b))),
        },
        Term::Pair(a, b) => match step(a, strategy) {
            Some(a) => Some(Term::Pair(Box::new(a), b.clone())),
            None => step(b, strategy).map(|b| Term::Pair(a.clone(), Box::new(b))),
        },
        _ => None,
    };
    if inner.is_some() {
        return inner;
    }
    if strategy == Strategy::Applicative {
        return contract(t);
    }
    None
}

/// Reduces to β/projection normal form, counting steps.
pub fn reduce(t: &Term, strategy: Strategy) -> (Term, usize) {
    let mut cur = t.clone();
    let mut n = 0;
    while let Some(next) = step(&cur, strategy) {
        cur = next;
        n += 1;
        assert!(n < 100_000, "reduction does not terminate");
    }
    (cur, n)
}

// Reference enumeration of ground abstractions.

fn strip(t: &Term) -> Term {
    match t {
        Term::Prim(x) => strip(x),
        Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(strip(b))),
        Term::App(a, b) => Term::App(Box::new(strip(a)), Box::new(strip(b))),
        Term::Pair(a, b) => Term::Pair(Box::new(strip(a)), Box::new(strip(b))),
        other => other.clone(),
    }
}

/// Every body obtained from `rhs` by choosing, for each occurrence of an
/// argument, to keep it or to replace it by that argument's variable. The
/// choices are enumerated over all occurrences independently; choices under a
/// replaced occurrence have no effect and collapse in the resulting set.
pub fn occurrence_subsets(args: &[Term], rhs: &Term) -> BTreeSet<Term> {
    let rhs = strip(rhs);
    let mut occurrences = 0;
    count(&rhs, args, &mut occurrences);
    let choices: Vec<Vec<Option<usize>>> = {
        let mut per = Vec::new();
        collect(&rhs, args, &mut per);
        per
    };
    assert_eq!(choices.len(), occurrences);
    let mut out = BTreeSet::new();
    let total: usize = choices.iter().map(Vec::len).product();
    for mut code in 0..total {
        let picks: Vec<Option<usize>> = choices
            .iter()
            .map(|c| {
                let p = c[code % c.len()];
                code /= c.len();
                p
            })
            .collect();
        let mut at = 0;
        out.insert(build(&rhs, args, &picks, &mut at, 0));
    }
    out
}

fn matching(t: &Term, args: &[Term]) -> Vec<usize> {
    args.iter().enumerate().filter(|(_, a)| **a == *t).map(|(i, _)| i).collect()
}

fn count(t: &Term, args: &[Term], n: &mut usize) {
    if !matching(t, args).is_empty() {
        *n += 1;
    }
    match t {
        Term::Abs(_, b) => count(b, args, n),
        Term::App(a, b) | Term::Pair(a, b) => {
            count(a, args, n);
            count(b, args, n);
        }
        _ => {}
    }
}

fn collect(t: &Term, args: &[Term], out: &mut Vec<Vec<Option<usize>>>) {
    let m = matching(t, args);
    if !m.is_empty() {
        out.push(std::iter::once(None).chain(m.into_iter().map(Some)).collect());
    }
    match t {
        Term::Abs(_, b) => collect(b, args, out),
        Term::App(a, b) | Term::Pair(a, b) => {
            collect(a, args, out);
            collect(b, args, out);
        }
        _ => {}
    }
}

/// Rebuilds `t` at binder depth `d` under the `n` argument binders.
fn build(t: &Term, args: &[Term], picks: &[Option<usize>], at: &mut usize, d: u32) -> Term {
    let n = args.len() as u32;
    let mut replaced = None;
    if !matching(t, args).is_empty() {
        replaced = picks[*at];
        *at += 1;
    }
    let mut skip = |t: &Term| {
        // Consume the choices of occurrences nested inside a replaced node.
        let mut k = 0;
        count(t, args, &mut k);
        *at += k;
    };
    if let Some(i) = replaced {
        match t {
            Term::Abs(_, b) => skip(b),
            Term::App(a, b) | Term::Pair(a, b) => {
                skip(a);
                skip(b);
            }
            _ => {}
        }
        return Term::Bound(d + n - 1 - i as u32);
    }
    match t {
        Term::Bound(i) if *i >= d => Term::Bound(i + n),
        Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(build(b, args, picks, at, d + 1))),
        Term::App(a, b) => {
            let a = build(a, args, picks, at, d);
            Term::App(Box::new(a), Box::new(build(b, args, picks, at, d)))
        }
        Term::Pair(a, b) => {
            let a = build(a, args, picks, at, d);
            Term::Pair(Box::new(a), Box::new(build(b, args, picks, at, d)))
        }
        other => other.clone(),
    }
}

/// A random ground problem: a truth-valued rhs of the given depth over a
/// small first-order signature, and one or two distinct entity arguments
/// drawn from its subterms.
pub fn ground_problem(seed: u64, depth: usize) -> (Vec<Term>, Term) {
    let mut r = rng(seed);
    let rhs = ground_truth(&mut r, depth);
    let mut ents = Vec::new();
    entity_subterms(&rhs, &mut ents);
    ents.sort();
    ents.dedup();
    let mut args = Vec::new();
    let n = if ents.len() > 1 && r.gen_bool(0.4) { 2 } else { 1 };
    while args.len() < n && !ents.is_empty() {
        let a = ents.remove(r.gen_range(0..ents.len()));
        args.push(a);
    }
    (args, rhs)
}

fn ground_entity(r: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth == 0 || r.gen_bool(0.4) {
        return ent(["a", "b", "c"][r.gen_range(0..3)]);
    }
    if r.gen_bool(0.6) {
        Term::app(k("f", Type::func(e(), e())), ground_entity(r, depth - 1))
    } else {
        Term::apply(
            k("g", Type::arrows([e(), e()], e())),
            [ground_entity(r, depth - 1), ground_entity(r, depth - 1)],
        )
    }
}

fn ground_truth(r: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth <= 1 {
        return Term::app(k("p", Type::predicate()), ground_entity(r, 0));
    }
    match r.gen_range(0..3) {
        0 => Term::app(k("p", Type::predicate()), ground_entity(r, depth - 1)),
        1 => Term::apply(
            k("r", Type::arrows([e(), e()], t())),
            [ground_entity(r, depth - 1), ground_entity(r, depth - 1)],
        ),
        _ => Term::and(ground_truth(r, depth - 1), ground_truth(r, depth - 1)),
    }
}

fn entity_subterms(t: &Term, out: &mut Vec<Term>) {
    if let Ok(Type::Entity) = ellipsis_core::term::type_in_context(t, &[]) {
        out.push(t.clone());
    }
    if let Term::App(a, b) = t {
        entity_subterms(a, out);
        entity_subterms(b, out);
    }
}

/// `λx1..xn. body` with entity binders.
pub fn close(n: usize, body: Term) -> Term {
    (0..n).fold(body, |acc, _| Term::Abs(e(), Box::new(acc)))
}

/// Declares every constant used in `t` in a fresh environment.
pub fn env_for(terms: &[&Term]) -> ellipsis_core::Env {
    fn go(t: &Term, env: &mut ellipsis_core::Env) {
        match t {
            Term::Const(n, ty) if !ellipsis_core::term::is_builtin(n) => {
                if env.lookup(n).is_none() {
                    env.declare(n.clone(), ty.clone()).unwrap();
                }
            }
            Term::Abs(_, b) | Term::Prim(b) => go(b, env),
            Term::App(a, b) | Term::Pair(a, b) => {
                go(a, env);
                go(b, env);
            }
            _ => {}
        }
    }
    let mut env = ellipsis_core::Env::new();
    for t in terms {
        go(t, &mut env);
    }
    env
}
