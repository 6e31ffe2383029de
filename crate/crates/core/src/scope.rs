//! Assumption-store semantics: quantifier and bind assumptions, discharge,
//! the correspondence between pair quantifiers and generalized quantifiers.

use thiserror::Error;

use std::collections::BTreeSet;

use crate::ellipsis::{
    dedup_readings, placeholder, solve_branch, Clause, EllipsisError, EllipsisProblem, Link, Resolution, SOURCE,
};
use crate::term::{find_paths, normalize, Name, Path, Term, TermError, Var};
use crate::types::Type;
use crate::unify::SearchBudget;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ScopeError {
    #[error("no pending assumption introduces `{0}`")]
    NotPending(Name),
    #[error("cannot discharge `{var}`: it is free in the pending assumption for `{blocker}`")]
    DischargeOrderViolation { var: Name, blocker: Name },
    #[error("`{0}` is introduced by a bind assumption, not a quantifier")]
    NotQuantifier(Name),
    #[error(transparent)]
    Type(#[from] TermError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assumption {
    /// `⟨det x restriction⟩` with `det` a pair quantifier.
    Quant { det: Term, var: Var, restriction: Term },
    Bind { var: Var },
}

impl Assumption {
    pub fn var(&self) -> &Var {
        match self {
            Assumption::Quant { var, .. } | Assumption::Bind { var } => var,
        }
    }

    /// Whether `v` is free in this assumption (other than as the variable it introduces).
    pub fn depends_on(&self, v: &Var) -> bool {
        match self {
            Assumption::Quant { restriction, .. } => restriction.has_free(v),
            Assumption::Bind { .. } => false,
        }
    }
}

/// `Γ ⊢ m`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub assumptions: Vec<Assumption>,
    pub matrix: Term,
}

impl Interpretation {
    pub fn new(assumptions: Vec<Assumption>, matrix: Term) -> Interpretation {
        Interpretation {
            assumptions,
            matrix,
        }
    }

    pub fn find(&self, var: &Var) -> Option<&Assumption> {
        self.assumptions.iter().find(|a| a.var() == var)
    }

    fn take(&self, var: &Var) -> Result<(Assumption, Vec<Assumption>), ScopeError> {
        let pos = self
            .assumptions
            .iter()
            .position(|a| a.var() == var)
            .ok_or_else(|| ScopeError::NotPending(var.name.clone()))?;
        let mut rest = self.assumptions.clone();
        let a = rest.remove(pos);
        if let Some(blocker) = rest.iter().find(|b| b.depends_on(var)) {
            return Err(ScopeError::DischargeOrderViolation {
                var: var.name.clone(),
                blocker: blocker.var().name.clone(),
            });
        }
        Ok((a, rest))
    }

    /// Assumptions that may be discharged next.
    pub fn dischargeable(&self) -> Vec<&Var> {
        self.assumptions
            .iter()
            .map(Assumption::var)
            .filter(|v| !self.assumptions.iter().any(|b| b.var() != *v && b.depends_on(v)))
            .collect()
    }
}

/// `det(λx. ⟨restriction, matrix⟩)`, removing the assumption for `var`.
///
/// When the matrix marks `x` as primary, the quantified phrase as a whole is
/// a parallel element, so the discharged term is marked too.
pub fn discharge_quant(i: &Interpretation, var: &Var) -> Result<Interpretation, ScopeError> {
    let (a, rest) = i.take(var)?;
    let Assumption::Quant { det, var, restriction } = a else {
        return Err(ScopeError::NotQuantifier(var.name.clone()));
    };
    let primary = marks_free(&i.matrix, &var);
    let body = Term::lam(&var, Term::pair(restriction, i.matrix.clone()));
    let mut matrix = Term::app(det, body);
    if primary {
        matrix = Term::prim(matrix);
    }
    Ok(Interpretation::new(rest, matrix))
}

fn marks_free(t: &Term, v: &Var) -> bool {
    match t {
        Term::Prim(x) => matches!(x.peel_prims().0, Term::Free(w) if w == v) || marks_free(x, v),
        Term::Abs(_, b) => marks_free(b, v),
        Term::App(a, b) | Term::Pair(a, b) => marks_free(a, v) || marks_free(b, v),
        _ => false,
    }
}

/// `λz. nominal(z) ∧ matrix[var ↦ z]`, the modified-nominal property.
pub fn discharge_bind(i: &Interpretation, var: &Var, nominal: &Term) -> Result<Term, ScopeError> {
    let (a, _) = i.take(var)?;
    if !matches!(a, Assumption::Bind { .. }) {
        return Err(ScopeError::NotPending(var.name.clone()));
    }
    Ok(relative(nominal, var, &i.matrix))
}

/// `λz. nominal(z) ∧ body[var ↦ z]`
pub fn relative(nominal: &Term, var: &Var, body: &Term) -> Term {
    let conj = Term::and(Term::app(nominal.clone(), Term::var(var)), body.clone());
    normalize(&Term::lam(var, conj))
}

/// `λS. det(λx. ⟨restriction, S(x)⟩)`, the generalized-quantifier contribution
/// of the noun phrase that introduced `var`.
pub fn np_contribution(i: &Interpretation, var: &Var) -> Result<Term, ScopeError> {
    match i.find(var) {
        Some(Assumption::Quant { det, var, restriction }) => Ok(contribution(det, var, restriction)),
        Some(Assumption::Bind { .. }) => Err(ScopeError::NotQuantifier(var.name.clone())),
        None => Err(ScopeError::NotPending(var.name.clone())),
    }
}

pub(crate) fn contribution(det: &Term, var: &Var, restriction: &Term) -> Term {
    let s = Var::new(fresh_name("S", &[restriction, det]), Type::predicate());
    let body = Term::lam(
        var,
        Term::pair(restriction.clone(), Term::app(Term::var(&s), Term::var(var))),
    );
    Term::lam(&s, Term::app(det.clone(), body))
}

fn fresh_name(base: &str, avoid: &[&Term]) -> String {
    let mut n = 0;
    loop {
        let name = if n == 0 { base.to_string() } else { format!("{base}{n}") };
        if !avoid.iter().any(|t| t.mentions(&name)) {
            return name;
        }
        n += 1;
    }
}

/// 𝒢(P) = λr. λs. P(λx. ⟨r(x), s(x)⟩), normalized.
pub fn gq_of_pair(p: &Term) -> Result<Term, TermError> {
    expect_type(p, &Type::pair_quantifier())?;
    let pred = Type::predicate();
    let body = Term::app(
        shift2(p),
        Term::Abs(
            Type::Entity,
            Box::new(Term::pair(
                Term::app(Term::Bound(2), Term::Bound(0)),
                Term::app(Term::Bound(1), Term::Bound(0)),
            )),
        ),
    );
    let t = Term::Abs(pred.clone(), Box::new(Term::Abs(pred, Box::new(body))));
    Ok(normalize(&t))
}

/// 𝒫(Q) = λp. Q(λu. fst(p(u)))(λv. snd(p(v))), normalized.
pub fn pair_of_gq(q: &Term) -> Result<Term, TermError> {
    expect_type(q, &Type::gq_determiner())?;
    let tt = Type::pair(Type::Truth, Type::Truth);
    let proj = |f: Term| {
        Term::Abs(
            Type::Entity,
            Box::new(Term::app(f, Term::app(Term::Bound(1), Term::Bound(0)))),
        )
    };
    let body = Term::apply(
        crate::term::shift(q, 1, 0),
        [proj(Term::fst(&tt)), proj(Term::snd(&tt))],
    );
    let t = Term::Abs(Type::func(Type::Entity, tt), Box::new(body));
    Ok(normalize(&t))
}

fn shift2(t: &Term) -> Term {
    crate::term::shift(t, 2, 0)
}

fn expect_type(t: &Term, want: &Type) -> Result<(), TermError> {
    let found = crate::term::type_in_context(t, &[])?;
    if &found != want {
        return Err(TermError::TypeMismatch {
            expected: want.clone(),
            found,
            context: "quantifier conversion".into(),
        });
    }
    Ok(())
}

/// `λR. R(a)`
pub fn type_raise(a: &Term) -> Result<Term, TermError> {
    let ty = crate::term::type_in_context(a, &[])?;
    let r = Type::func(ty, Type::Truth);
    Ok(Term::Abs(
        r,
        Box::new(Term::app(Term::Bound(0), crate::term::shift(a, 1, 0))),
    ))
}

/// Every reading of an ellipsis problem over every interleaving of discharge
/// and ellipsis resolution.
///
/// An assumption may be discharged in the source clause before the ellipsis
/// is resolved; a parallel element naming its variable then stands for the
/// whole noun phrase. The rest are discharged over the full sentence.
pub fn enumerate_derivations(
    problem: &EllipsisProblem,
    budget: &SearchBudget,
    linking: bool,
) -> Result<Resolution, EllipsisError> {
    let start = Interpretation::new(problem.assumptions.clone(), problem.source.clone());
    let mut seen = BTreeSet::new();
    let mut branches = Vec::new();
    pre_discharges(&start, &mut Vec::new(), &mut seen, &mut branches);

    let mut res = Resolution::default();
    let mut readings = Vec::new();
    for (order, interp) in branches {
        let clauses = problem
            .clauses
            .iter()
            .map(|c| lift_clause(c, &order, problem))
            .collect();
        let branch_problem = EllipsisProblem {
            assumptions: interp.assumptions,
            source: interp.matrix,
            clauses,
            frame: problem.frame.clone(),
        };
        let label = format!(
            "before [{}]",
            order.iter().map(|v| v.name.to_string()).collect::<Vec<_>>().join(" ")
        );
        readings.extend(solve_branch(
            &branch_problem,
            budget,
            linking,
            &label,
            &mut res.counts,
            &mut res.failures,
        )?);
    }
    res.readings = dedup_readings(readings);
    Ok(res)
}

/// Legal discharge sequences in the source clause, the empty one first.
/// Sequences reaching the same store and matrix are kept once.
fn pre_discharges(
    i: &Interpretation,
    order: &mut Vec<Var>,
    seen: &mut BTreeSet<(Vec<Var>, Term)>,
    out: &mut Vec<(Vec<Var>, Interpretation)>,
) {
    let mut key: Vec<Var> = i.assumptions.iter().map(|a| a.var().clone()).collect();
    key.sort();
    if !seen.insert((key, i.matrix.strip())) {
        return;
    }
    out.push((order.clone(), i.clone()));
    for v in i.dischargeable() {
        if let Ok(next) = discharge_quant(i, v) {
            order.push(v.clone());
            pre_discharges(&next, order, seen, out);
            order.pop();
        }
    }
}

/// The clause as seen after discharging `order` in the source clause.
fn lift_clause(c: &Clause, order: &[Var], problem: &EllipsisProblem) -> Clause {
    let parallels = c
        .parallels
        .iter()
        .map(|(s, t)| {
            let s = match s.peel_prims().0 {
                Term::Free(v) if order.contains(v) => problem
                    .assumptions
                    .iter()
                    .find_map(|a| match a {
                        Assumption::Quant { det, var, restriction } if var == v => {
                            Some(contribution(det, var, restriction))
                        }
                        _ => None,
                    })
                    .unwrap_or_else(|| s.clone()),
                _ => s.clone(),
            };
            (s, t.clone())
        })
        .collect();
    // Each discharge pushes the old matrix under `det(λx. ⟨r, _⟩)`.
    let prefix: Path = order.iter().flat_map(|_| [1, 0, 2]).collect();
    let holes = find_paths(&c.rhs, &Term::var(&placeholder(SOURCE)));
    let lift = |p: &Path| match holes.as_slice() {
        [h] if p.starts_with(h) => h.iter().chain(&prefix).chain(&p[h.len()..]).copied().collect(),
        _ => p.clone(),
    };
    let links = c
        .links
        .iter()
        .map(|l| Link {
            anaphor: lift(&l.anaphor),
            antecedent: lift(&l.antecedent),
        })
        .collect();
    Clause {
        unknown: c.unknown.clone(),
        parallels,
        rhs: c.rhs.clone(),
        links,
    }
}
