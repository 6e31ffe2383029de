//! Huet's pre-unification procedure, bounded by a search budget.

use std::collections::{BTreeMap, BTreeSet};

use super::{candidates, Equation, Fresh, SearchBudget, Substitution};
use crate::term::{long_in, normalize, normalize_beta, replace_free, spine, type_in_context, Term, Var};
use crate::types::Type;

/// A disagreement pair under a context of bound-variable types.
#[derive(Clone, Debug)]
struct Pair {
    ctx: Vec<Type>,
    l: Term,
    r: Term,
}

#[derive(Clone, Debug)]
struct Node {
    pairs: Vec<Pair>,
    subst: BTreeMap<Var, Term>,
    /// Unsolved unknowns and their depth in the search tree.
    open: BTreeMap<Var, usize>,
}

enum Outcome {
    Fail { occurs: bool },
    Solved(Vec<Pair>),
    Branch(Var, Term),
}

/// Lazy enumeration of unifiers in depth-first order: imitation before
/// projections, projections by argument index. Duplicates (up to α and
/// markers) are skipped.
pub struct HuetSearch {
    stack: Vec<Node>,
    originals: Vec<Var>,
    budget: SearchBudget,
    fresh: Fresh,
    seen: BTreeSet<Substitution>,
    truncated: bool,
    occurs: bool,
}

pub fn huet_unify(eqs: &[Equation], budget: &SearchBudget) -> HuetSearch {
    let mut originals = BTreeSet::new();
    let mut pairs = Vec::new();
    for eq in eqs {
        originals.extend(eq.unknowns.iter().cloned());
        let ty = type_in_context(&eq.lhs, &[]).expect("well-typed equation");
        let mut ctx = Vec::new();
        pairs.push(Pair {
            l: long_in(&normalize_beta(&eq.lhs.strip()), &ty, &mut ctx),
            r: long_in(&normalize_beta(&eq.rhs.strip()), &ty, &mut ctx),
            ctx,
        });
    }
    let open = originals.iter().map(|v| (v.clone(), 0)).collect();
    HuetSearch {
        stack: vec![Node {
            pairs,
            subst: BTreeMap::new(),
            open,
        }],
        originals: originals.into_iter().collect(),
        budget: *budget,
        fresh: Fresh::default(),
        seen: BTreeSet::new(),
        truncated: false,
        occurs: false,
    }
}

impl HuetSearch {
    /// Whether some branch was cut by the depth bound.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Whether some branch failed by the occurs check.
    pub fn occurs_failure(&self) -> bool {
        self.occurs
    }

    fn expand(&mut self, node: Node, f: Var, rigid: Term) {
        let depth = node.open[&f];
        if depth >= self.budget.max_depth {
            self.truncated = true;
            return;
        }
        let mut children = Vec::new();
        for (binding, new) in candidates(&f, &rigid, &mut self.fresh) {
            let mut child = node.clone();
            child.open.remove(&f);
            for h in new {
                child.open.insert(h, depth + 1);
            }
            bind(&mut child, &f, &binding);
            children.push(child);
        }
        // The stack is LIFO: push the first candidate last.
        self.stack.extend(children.into_iter().rev());
    }

    fn solution(&self, node: &Node, rest: Vec<Pair>) -> Substitution {
        let bindings = self
            .originals
            .iter()
            .filter_map(|v| node.subst.get(v).map(|t| (v.clone(), normalize(t))))
            .collect();
        let close = |ctx: &[Type], t: &Term| {
            let t = ctx
                .iter()
                .rev()
                .fold(t.clone(), |acc, ty| Term::Abs(ty.clone(), Box::new(acc)));
            normalize(&t)
        };
        let constraints = rest
            .iter()
            .map(|p| (close(&p.ctx, &p.l), close(&p.ctx, &p.r)))
            .collect();
        Substitution {
            bindings,
            constraints,
        }
    }
}

impl Iterator for HuetSearch {
    type Item = Substitution;

    fn next(&mut self) -> Option<Substitution> {
        while let Some(node) = self.stack.pop() {
            match simplify(&node) {
                Outcome::Fail { occurs } => self.occurs |= occurs,
                Outcome::Branch(f, rigid) => self.expand(node, f, rigid),
                Outcome::Solved(rest) => {
                    let sol = self.solution(&node, rest);
                    if self.seen.insert(sol.stripped()) {
                        return Some(sol);
                    }
                }
            }
        }
        None
    }
}

fn bind(node: &mut Node, f: &Var, t: &Term) {
    let mut one = BTreeMap::new();
    one.insert(f.clone(), t.clone());
    for v in node.subst.values_mut() {
        *v = normalize_beta(&replace_free(v, &one));
    }
    node.subst.insert(f.clone(), t.clone());
    for p in &mut node.pairs {
        p.l = relong(&replace_free(&p.l, &one), &mut p.ctx);
        p.r = relong(&replace_free(&p.r, &one), &mut p.ctx);
    }
}

fn relong(t: &Term, ctx: &mut Vec<Type>) -> Term {
    let t = normalize_beta(t);
    let ty = type_in_context(&t, ctx).expect("well-typed pair");
    long_in(&t, &ty, ctx)
}

fn flex_head<'a>(t: &'a Term, open: &BTreeMap<Var, usize>) -> Option<&'a Var> {
    match spine(t).head {
        Term::Free(v) if open.contains_key(v) => Some(v),
        _ => None,
    }
}

fn simplify(node: &Node) -> Outcome {
    let mut work: Vec<Pair> = node.pairs.iter().rev().cloned().collect();
    let mut flex_rigid = None;
    let mut rest = Vec::new();
    while let Some(mut p) = work.pop() {
        if p.l == p.r {
            continue;
        }
        if let (Term::Abs(ty, lb), Term::Abs(_, rb)) = (&p.l, &p.r) {
            p.ctx.push(ty.clone());
            work.push(Pair {
                ctx: p.ctx,
                l: (**lb).clone(),
                r: (**rb).clone(),
            });
            continue;
        }
        match (flex_head(&p.l, &node.open), flex_head(&p.r, &node.open)) {
            (Some(_), Some(_)) => rest.push(p),
            (Some(f), None) => {
                if occurs_rigidly(f, &p.l, &p.r, &node.open) {
                    return Outcome::Fail { occurs: true };
                }
                if flex_rigid.is_none() {
                    flex_rigid = Some((f.clone(), p.r.clone()));
                }
                rest.push(p);
            }
            (None, Some(f)) => {
                if occurs_rigidly(f, &p.r, &p.l, &node.open) {
                    return Outcome::Fail { occurs: true };
                }
                if flex_rigid.is_none() {
                    flex_rigid = Some((f.clone(), p.l.clone()));
                }
                rest.push(p);
            }
            (None, None) => match decompose(p) {
                Some(sub) => work.extend(sub.into_iter().rev()),
                None => return Outcome::Fail { occurs: false },
            },
        }
    }
    match flex_rigid {
        Some((f, rigid)) => Outcome::Branch(f, rigid),
        None => Outcome::Solved(rest),
    }
}

/// Splits a rigid-rigid pair into argument pairs, or `None` on a clash.
fn decompose(p: Pair) -> Option<Vec<Pair>> {
    let Pair { mut ctx, l, r } = p;
    match (&l, &r) {
        (Term::Pair(a, b), Term::Pair(c, d)) => {
            return Some(vec![
                Pair { ctx: ctx.clone(), l: (**a).clone(), r: (**c).clone() },
                Pair { ctx, l: (**b).clone(), r: (**d).clone() },
            ])
        }
        (Term::Pair(a, b), other) | (other, Term::Pair(a, b)) => {
            let ty = type_in_context(other, &ctx).ok()?;
            let fst = relong(&Term::app(Term::fst(&ty), other.clone()), &mut ctx);
            let snd = relong(&Term::app(Term::snd(&ty), other.clone()), &mut ctx);
            return Some(vec![
                Pair { ctx: ctx.clone(), l: (**a).clone(), r: fst },
                Pair { ctx, l: (**b).clone(), r: snd },
            ]);
        }
        _ => {}
    }
    let ls = spine(&l);
    let rs = spine(&r);
    if ls.head != rs.head || ls.args.len() != rs.args.len() {
        return None;
    }
    Some(
        ls.args
            .iter()
            .zip(&rs.args)
            .map(|(a, b)| Pair {
                ctx: ctx.clone(),
                l: (*a).clone(),
                r: (*b).clone(),
            })
            .collect(),
    )
}

fn is_atom(t: &Term, open: &BTreeMap<Var, usize>) -> bool {
    match t {
        Term::Bound(_) | Term::Const(..) => true,
        Term::Free(v) => !open.contains_key(v),
        _ => false,
    }
}

/// Detects `F(ū) = C[F(v̄)]` with `C` a rigid context and all of `ū`, `v̄`
/// atoms. No substitution can solve it: both sides would have to be the same
/// size although the right one strictly contains a copy of the left.
fn occurs_rigidly(f: &Var, flex: &Term, rigid: &Term, open: &BTreeMap<Var, usize>) -> bool {
    if !spine(flex).args.iter().all(|a| is_atom(a, open)) {
        return false;
    }
    fn walk(f: &Var, t: &Term, open: &BTreeMap<Var, usize>) -> bool {
        let sp = spine(t);
        match sp.head {
            Term::Free(v) if v == f => sp.args.iter().all(|a| is_atom(a, open)),
            Term::Free(v) if open.contains_key(v) => false,
            Term::Abs(_, b) if sp.args.is_empty() => walk(f, b, open),
            Term::Pair(a, b) if sp.args.is_empty() => walk(f, a, open) || walk(f, b, open),
            _ => sp.args.iter().any(|a| walk(f, a, open)),
        }
    }
    walk(f, rigid, open)
}
