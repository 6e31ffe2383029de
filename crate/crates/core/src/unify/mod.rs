//! Solving term equations: Huet's procedure, second-order matching and the
//! ground-argument enumerator.

mod align;
mod ground;
mod huet;
mod matching;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::{normalize, replace_free, spine, type_in_context, Term, TermError, Var};
use crate::types::Type;

pub use align::{abstraction_sites, mark_abstractions, remark};
pub use ground::ground_abstractions;
pub use huet::{huet_unify, HuetSearch};
pub use matching::second_order_match;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum UnifyError {
    #[error("not unifiable{}", if *.occurs_check { " (occurs check)" } else { "" })]
    NotUnifiable { occurs_check: bool },
    #[error("search budget exhausted before any unifier was found")]
    BudgetExhausted,
    #[error("`{0}` is not at most second-order, or the right-hand side is not closed")]
    NotSecondOrder(Var),
    #[error(transparent)]
    Type(#[from] TermError),
}

/// `lhs = rhs`, where only `unknowns` may be instantiated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub unknowns: BTreeSet<Var>,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term, unknowns: BTreeSet<Var>) -> Result<Equation, TermError> {
        let lt = type_in_context(&lhs, &[])?;
        let rt = type_in_context(&rhs, &[])?;
        if lt != rt {
            return Err(TermError::TypeMismatch {
                expected: lt,
                found: rt,
                context: "equation sides".into(),
            });
        }
        Ok(Equation { lhs, rhs, unknowns })
    }

    /// The unknown at the head of the left-hand side and its arguments, when the
    /// left-hand side has the shape `P(s1, ..., sn)`.
    pub fn flex_lhs(&self) -> Option<(&Var, Vec<&Term>)> {
        let sp = spine(&self.lhs);
        match sp.head {
            Term::Free(v) if self.unknowns.contains(v) => Some((v, sp.args)),
            _ => None,
        }
    }

    fn mentions_unknown(&self, t: &Term) -> bool {
        self.unknowns.iter().any(|u| t.has_free(u))
    }
}

/// A unifier. Flex-flex pairs left unsolved are kept as constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    pub bindings: BTreeMap<Var, Term>,
    pub constraints: Vec<(Term, Term)>,
}

impl Substitution {
    pub fn single(v: Var, t: Term) -> Substitution {
        let mut bindings = BTreeMap::new();
        bindings.insert(v, t);
        Substitution {
            bindings,
            constraints: Vec::new(),
        }
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    /// Instantiates and normalizes `t`.
    pub fn apply(&self, t: &Term) -> Term {
        normalize(&replace_free(t, &self.bindings))
    }

    /// Marker-free form used for deduplication.
    pub fn stripped(&self) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .map(|(v, t)| (v.clone(), t.strip()))
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|(a, b)| (a.strip(), b.strip()))
                .collect(),
        }
    }

    pub fn contains_prim(&self) -> bool {
        self.bindings.values().any(Term::contains_prim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Unknowns introduced this many branching steps below an original unknown
    /// are not expanded further.
    pub max_depth: usize,
    pub max_solutions: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 10,
            max_solutions: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solutions {
    pub unifiers: Vec<Substitution>,
    /// True when the search stopped early, so more unifiers may exist.
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ground,
    SecondOrder,
    Huet,
}

/// The procedure `solve` picks for an equation.
pub fn method_for(eq: &Equation) -> Method {
    let Some((_, args)) = eq.flex_lhs() else {
        return Method::Huet;
    };
    if eq.mentions_unknown(&eq.rhs) || args.iter().any(|a| eq.mentions_unknown(a)) {
        return Method::Huet;
    }
    if args.iter().all(|a| ground::is_plain(&normalize(a))) {
        return Method::Ground;
    }
    if eq.unknowns.iter().all(|u| u.ty.order() <= 2) {
        return Method::SecondOrder;
    }
    Method::Huet
}

/// Solves one equation with the cheapest complete procedure that applies.
/// Bindings carry the primary markers of the right-hand side occurrences
/// they keep.
pub fn solve(eq: &Equation, budget: &SearchBudget) -> Result<Solutions, UnifyError> {
    let (mut unifiers, mut truncated, occurs) = match method_for(eq) {
        Method::Ground => {
            let (v, args) = eq.flex_lhs().expect("ground method needs a flex lhs");
            let args: Vec<Term> = args.into_iter().cloned().collect();
            (ground_abstractions(v, &args, &eq.rhs), false, false)
        }
        Method::SecondOrder => {
            let (found, truncated) = matching::match_with_status(eq, budget)?;
            (found, truncated, false)
        }
        Method::Huet => {
            let mut search = huet_unify(std::slice::from_ref(eq), budget);
            let found: Vec<Substitution> =
                search.by_ref().take(budget.max_solutions + 1).collect();
            (found, search.truncated(), search.occurs_failure())
        }
    };
    if unifiers.len() > budget.max_solutions {
        unifiers.truncate(budget.max_solutions);
        truncated = true;
    }
    if unifiers.is_empty() {
        if truncated {
            return Err(UnifyError::BudgetExhausted);
        }
        return Err(UnifyError::NotUnifiable {
            occurs_check: occurs,
        });
    }
    if let Some((v, args)) = eq.flex_lhs() {
        let n = args.len();
        for u in &mut unifiers {
            if let Some(b) = u.bindings.get_mut(v) {
                *b = remark(b, n, &eq.rhs);
            }
        }
    }
    Ok(Solutions {
        unifiers,
        truncated,
    })
}

/// True iff `v` occurs free in `t`.
pub fn occurs_check(v: &Var, t: &Term) -> bool {
    t.has_free(v)
}

/// Fresh-name source for unknowns introduced during search. Names start with
/// `?`, which the surface syntax never produces.
#[derive(Debug, Default, Clone)]
pub(crate) struct Fresh(usize);

impl Fresh {
    pub(crate) fn var(&mut self, ty: Type) -> Var {
        self.0 += 1;
        Var::new(format!("?{}", self.0), ty)
    }
}

/// Builds `λy1..yn. body(ȳ)` for an unknown of type `A1 -> .. -> An -> B`,
/// where `body` receives the bound variables and a fresh-unknown maker that
/// returns `H(ȳ)` for a new `H : A1 -> .. -> An -> C`.
pub(crate) fn binding_with<F>(ty: &Type, fresh: &mut Fresh, new: &mut Vec<Var>, body: F) -> Option<Term>
where
    F: FnOnce(&[Term], &mut dyn FnMut(Type) -> Term) -> Option<Term>,
{
    let (args, _) = ty.unarrow();
    let n = args.len();
    let ys: Vec<Term> = (0..n).map(|i| Term::Bound((n - 1 - i) as u32)).collect();
    let arg_tys: Vec<Type> = args.into_iter().cloned().collect();
    let mut make = |c: Type| {
        let h = fresh.var(Type::arrows(arg_tys.iter().cloned(), c));
        new.push(h.clone());
        Term::apply(Term::Free(h), ys.iter().cloned())
    };
    let inner = body(&ys, &mut make)?;
    let t = arg_tys
        .iter()
        .rev()
        .fold(inner, |acc, a| Term::Abs(a.clone(), Box::new(acc)));
    Some(crate::term::eta_long(&t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Step {
    Apply(Type),
    Fst(Type),
    Snd(Type),
}

/// Ways of using a term of type `ty` to produce a term of type `target`:
/// apply it to arguments and project out of pairs.
pub(crate) fn access_paths(ty: &Type, target: &Type) -> Vec<Vec<Step>> {
    if ty == target {
        return vec![Vec::new()];
    }
    let prefixed = |step: Step, rest: Vec<Vec<Step>>| {
        rest.into_iter()
            .map(|mut p| {
                p.insert(0, step.clone());
                p
            })
            .collect::<Vec<_>>()
    };
    match ty {
        Type::Func(d, c) => prefixed(Step::Apply((**d).clone()), access_paths(c, target)),
        Type::Pair(a, b) => {
            let mut out = prefixed(Step::Fst(ty.clone()), access_paths(a, target));
            out.extend(prefixed(Step::Snd(ty.clone()), access_paths(b, target)));
            out
        }
        _ => Vec::new(),
    }
}

pub(crate) fn follow(mut t: Term, path: &[Step], make: &mut dyn FnMut(Type) -> Term) -> Term {
    for step in path {
        t = match step {
            Step::Apply(d) => Term::app(t, make(d.clone())),
            Step::Fst(ty) => Term::app(Term::fst(ty), t),
            Step::Snd(ty) => Term::app(Term::snd(ty), t),
        };
    }
    t
}

/// Builds a term from a generator of fresh arguments of the given types.
type Shape = Box<dyn Fn(&mut dyn FnMut(Type) -> Term) -> Term>;

/// Imitation (first) and projection bindings for a flex unknown `f` facing a
/// rigid term. Each candidate comes with the fresh unknowns it introduces.
pub(crate) fn candidates(f: &Var, rigid: &Term, fresh: &mut Fresh) -> Vec<(Term, Vec<Var>)> {
    let (arg_tys, target) = f.ty.unarrow();
    let target = target.clone();
    let mut out = Vec::new();
    let sp = spine(rigid);
    let imitation: Option<Shape> = match sp.head {
        Term::Const(..) | Term::Free(_) => {
            let head = sp.head.clone();
            let head_ty = type_in_context(&head, &[]).expect("typed head");
            let m = sp.args.len();
            let doms: Vec<Type> = head_ty.unarrow().0.into_iter().take(m).cloned().collect();
            Some(Box::new(move |make| {
                Term::apply(head.clone(), doms.iter().map(|d| make(d.clone())))
            }))
        }
        Term::Pair(..) => {
            let (a, b) = target.as_pair().map(|(a, b)| (a.clone(), b.clone())).expect("pair type");
            Some(Box::new(move |make| Term::pair(make(a.clone()), make(b.clone()))))
        }
        _ => None,
    };
    if let Some(build) = imitation {
        let mut new = Vec::new();
        if let Some(t) = binding_with(&f.ty, fresh, &mut new, |_, make| Some(build(make))) {
            out.push((t, new));
        }
    }
    for (i, a) in arg_tys.iter().enumerate() {
        for path in access_paths(a, &target) {
            let mut new = Vec::new();
            let t = binding_with(&f.ty, fresh, &mut new, |ys, make| {
                Some(follow(ys[i].clone(), &path, make))
            });
            if let Some(t) = t {
                out.push((t, new));
            }
        }
    }
    out
}
