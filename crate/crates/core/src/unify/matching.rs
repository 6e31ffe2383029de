//! Second-order matching: `lhs = rhs` with `rhs` free of unknowns and every
//! unknown of order at most two. Solved by direct recursion over the
//! right-hand side, which only shrinks along each branch except through
//! identity-like arguments; the depth budget cuts those.

use std::collections::{BTreeMap, BTreeSet};

use super::{candidates, Equation, Fresh, SearchBudget, Substitution, UnifyError};
use crate::term::{long_in, normalize, normalize_beta, replace_free, spine, type_in_context, Term, Var};
use crate::types::Type;

#[derive(Clone, Debug)]
struct State {
    subst: BTreeMap<Var, Term>,
    open: BTreeMap<Var, usize>,
}

struct Matcher {
    budget: SearchBudget,
    fresh: Fresh,
    truncated: bool,
}

/// The complete set of matchers, deduplicated up to α and markers.
pub fn second_order_match(eq: &Equation, budget: &SearchBudget) -> Result<Vec<Substitution>, UnifyError> {
    match_with_status(eq, budget).map(|(found, _)| found)
}

pub(crate) fn match_with_status(
    eq: &Equation,
    budget: &SearchBudget,
) -> Result<(Vec<Substitution>, bool), UnifyError> {
    for u in &eq.unknowns {
        if u.ty.order() > 2 || eq.rhs.has_free(u) {
            return Err(UnifyError::NotSecondOrder(u.clone()));
        }
    }
    let ty = type_in_context(&eq.lhs, &[])?;
    let mut ctx = Vec::new();
    let lhs = long_in(&normalize_beta(&eq.lhs.strip()), &ty, &mut ctx);
    let rhs = long_in(&normalize_beta(&eq.rhs.strip()), &ty, &mut ctx);
    let start = State {
        subst: BTreeMap::new(),
        open: eq.unknowns.iter().map(|u| (u.clone(), 0)).collect(),
    };
    let mut m = Matcher {
        budget: *budget,
        fresh: Fresh::default(),
        truncated: false,
    };
    let states = m.go(&mut ctx, &lhs, &rhs, start);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for st in states {
        let bindings: BTreeMap<Var, Term> = eq
            .unknowns
            .iter()
            .filter_map(|u| st.subst.get(u).map(|t| (u.clone(), normalize(t))))
            .collect();
        let sol = Substitution {
            bindings,
            constraints: Vec::new(),
        };
        if seen.insert(sol.stripped()) {
            out.push(sol);
        }
    }
    Ok((out, m.truncated))
}

impl Matcher {
    fn go(&mut self, ctx: &mut Vec<Type>, p: &Term, r: &Term, st: State) -> Vec<State> {
        let p = if st.subst.is_empty() {
            p.clone()
        } else {
            let t = normalize_beta(&replace_free(p, &st.subst));
            let ty = type_in_context(&t, ctx).expect("well-typed pattern");
            long_in(&t, &ty, ctx)
        };
        if !st.open.keys().any(|u| p.has_free(u)) {
            return if p == *r { vec![st] } else { Vec::new() };
        }
        match (&p, r) {
            (Term::Abs(ty, pb), Term::Abs(_, rb)) => {
                ctx.push(ty.clone());
                let out = self.go(ctx, pb, rb, st);
                ctx.pop();
                return out;
            }
            (Term::Pair(a, b), Term::Pair(c, d)) => {
                return self.go_all(ctx, &[(a, c), (b, d)], st);
            }
            (Term::Pair(a, b), other) => {
                let Ok(ty) = type_in_context(other, ctx) else {
                    return Vec::new();
                };
                let fst = normalize_beta(&Term::app(Term::fst(&ty), other.clone()));
                let snd = normalize_beta(&Term::app(Term::snd(&ty), other.clone()));
                let (fa, fb) = ty.as_pair().expect("pair type");
                let fst = long_in(&fst, fa, ctx);
                let snd = long_in(&snd, fb, ctx);
                return self.go_all(ctx, &[(a, &fst), (b, &snd)], st);
            }
            _ => {}
        }
        let ps = spine(&p);
        if let Term::Free(f) = ps.head {
            if let Some(&depth) = st.open.get(f) {
                return self.flex(ctx, &p, f.clone(), depth, r, st);
            }
        }
        let rs = spine(r);
        if ps.head != rs.head || ps.args.len() != rs.args.len() {
            return Vec::new();
        }
        let pairs: Vec<(&Term, &Term)> = ps.args.iter().copied().zip(rs.args.iter().copied()).collect();
        self.go_all(ctx, &pairs, st)
    }

    fn go_all(&mut self, ctx: &mut Vec<Type>, pairs: &[(&Term, &Term)], st: State) -> Vec<State> {
        let mut states = vec![st];
        for (p, r) in pairs {
            let mut next = Vec::new();
            for s in states {
                next.extend(self.go(ctx, p, r, s));
            }
            if next.is_empty() {
                return next;
            }
            states = next;
        }
        states
    }

    fn flex(&mut self, ctx: &mut Vec<Type>, p: &Term, f: Var, depth: usize, r: &Term, st: State) -> Vec<State> {
        if depth >= self.budget.max_depth {
            self.truncated = true;
            return Vec::new();
        }
        let mut out = Vec::new();
        for (binding, new) in candidates(&f, r, &mut self.fresh) {
            let mut next = st.clone();
            next.open.remove(&f);
            for h in new {
                next.open.insert(h, depth + 1);
            }
            let mut one = BTreeMap::new();
            one.insert(f.clone(), binding.clone());
            for v in next.subst.values_mut() {
                *v = normalize_beta(&replace_free(v, &one));
            }
            next.subst.insert(f.clone(), binding);
            out.extend(self.go(ctx, p, r, next));
        }
        out
    }
}
