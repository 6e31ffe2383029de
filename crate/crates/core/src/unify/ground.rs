//! Matchers for `P(s1..sn) = s` with ground arguments and right-hand side,
//! built by replacing chosen occurrences of each `si` in `s` by `xi`.

use super::Substitution;
use crate::term::{normalize, type_in_context, Term, Var};

/// An argument for which occurrence replacement is complete: no
/// abstractions, pairs or loose indices, so substituting it back creates no
/// redex.
pub(crate) fn is_plain(t: &Term) -> bool {
    match t {
        Term::Abs(..) | Term::Pair(..) | Term::Bound(_) => false,
        Term::App(f, a) => is_plain(f) && is_plain(a),
        Term::Prim(x) => is_plain(x),
        _ => true,
    }
}

/// Every binding `λx1..xn. s'` where `s'` is `s` with some occurrences of the
/// `si` replaced by `xi`. Choices are made per maximal occurrence: replacing
/// an occurrence removes the occurrences nested inside it. A replaced
/// occurrence loses its marker; all other markers are kept.
pub fn ground_abstractions(unknown: &Var, args: &[Term], rhs: &Term) -> Vec<Substitution> {
    let stripped: Vec<Term> = args.iter().map(|a| normalize(&a.strip())).collect();
    let tys: Vec<_> = args
        .iter()
        .map(|a| type_in_context(a, &[]).expect("well-typed argument"))
        .collect();
    let rhs = normalize(rhs);
    let mut out: Vec<Substitution> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for body in alternatives(&rhs, 0, &stripped) {
        let t = tys
            .iter()
            .rev()
            .fold(body, |acc, ty| Term::Abs(ty.clone(), Box::new(acc)));
        let t = normalize(&t);
        if seen.insert(t.strip()) {
            out.push(Substitution::single(unknown.clone(), t));
        }
    }
    out
}

/// Variants of `t` (at binder depth `d`) with some occurrences abstracted.
/// Variants keeping `t`'s own root come first, then whole replacements.
fn alternatives(t: &Term, d: u32, args: &[Term]) -> Vec<Term> {
    let (mut keep, replace) = split_alternatives(t, d, args);
    keep.extend(replace);
    keep
}

fn split_alternatives(t: &Term, d: u32, args: &[Term]) -> (Vec<Term>, Vec<Term>) {
    if let Term::Prim(x) = t {
        let (keep, replace) = split_alternatives(x, d, args);
        return (keep.into_iter().map(Term::prim).collect(), replace);
    }
    let n = args.len() as u32;
    let plain = t.strip();
    let replace = args
        .iter()
        .enumerate()
        .filter(|(_, a)| **a == plain)
        .map(|(i, _)| Term::Bound(d + n - 1 - i as u32))
        .collect();
    let keep = match t {
        Term::Abs(ty, b) => alternatives(b, d + 1, args)
            .into_iter()
            .map(|b| Term::Abs(ty.clone(), Box::new(b)))
            .collect(),
        Term::App(f, a) => product(&alternatives(f, d, args), &alternatives(a, d, args), Term::app),
        Term::Pair(a, b) => product(&alternatives(a, d, args), &alternatives(b, d, args), Term::pair),
        leaf => vec![leaf.clone()],
    };
    (keep, replace)
}

fn product(xs: &[Term], ys: &[Term], f: fn(Term, Term) -> Term) -> Vec<Term> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in xs {
        for y in ys {
            out.push(f(x.clone(), y.clone()));
        }
    }
    out
}
