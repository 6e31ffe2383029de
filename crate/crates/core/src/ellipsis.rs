//! Ellipsis equations, the primary-occurrence and antecedent-linking filters,
//! and resolution of systems of elliptical clauses.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::scope::{discharge_quant, type_raise, Assumption, Interpretation};
use crate::term::{
    find_paths, normalize, positions, replace_free, subterm_at, type_in_context, Name, Path, Term,
    TermError, Var,
};
use crate::types::Type;
use crate::unify::{
    abstraction_sites, mark_abstractions, solve, Equation, SearchBudget, Substitution, UnifyError,
};

/// Name of the placeholder standing for the source clause.
pub const SOURCE: &str = "source";

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EllipsisError {
    #[error("parallel element {0} does not occur in the source")]
    ElementNotFound(String),
    #[error("clause `{0}` is declared twice")]
    DuplicateClause(Name),
    #[error("placeholder `{0}` does not name a clause")]
    UnknownPlaceholder(Name),
    #[error(transparent)]
    Type(#[from] TermError),
    #[error(transparent)]
    Unify(#[from] UnifyError),
}

/// A clause placeholder: a truth-valued free variable named `@name`. `@source`
/// is the source clause; `@P` is the clause resolved through unknown `P`.
pub fn placeholder(name: &str) -> Var {
    Var::new(format!("@{name}"), Type::Truth)
}

pub fn placeholder_name(v: &Var) -> Option<&str> {
    v.name.strip_prefix('@').filter(|_| v.ty == Type::Truth)
}

/// "If the anaphor occurrence is abstracted, so must the antecedent be."
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Link {
    pub anaphor: Path,
    pub antecedent: Path,
}

/// One elliptical clause: `unknown(s1..sn) = rhs`, read at `unknown(t1..tn)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub unknown: Name,
    /// Source and target parallel elements.
    pub parallels: Vec<(Term, Term)>,
    /// The source interpretation for this clause, possibly mentioning placeholders.
    pub rhs: Term,
    pub links: Vec<Link>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipsisProblem {
    /// Pending assumptions of the source clause.
    pub assumptions: Vec<Assumption>,
    /// The source clause matrix, with primary markers.
    pub source: Term,
    pub clauses: Vec<Clause>,
    /// The whole sentence, in terms of placeholders.
    pub frame: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reading {
    /// Closed, normalized, marker-free.
    pub term: Term,
    /// The binding chosen for each unknown.
    pub bindings: BTreeMap<Name, Term>,
    pub branch: String,
}

/// Solution counts per filter stage, summed over every equation solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub raw: usize,
    pub primary: usize,
    pub linking: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.raw += o.raw;
        self.primary += o.primary;
        self.linking += o.linking;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailureKind {
    OccursCheck,
    NotUnifiable,
    BudgetExhausted,
    /// Search stopped early; the solutions found so far were used.
    Truncated,
    /// Unifiers exist but none survives the filters.
    Filtered,
    /// No equation of the system can be scheduled.
    Circular,
    Type,
}

impl FailureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureKind::OccursCheck => "occurs-check",
            FailureKind::NotUnifiable => "not-unifiable",
            FailureKind::BudgetExhausted => "budget-exhausted",
            FailureKind::Truncated => "truncated",
            FailureKind::Filtered => "filtered",
            FailureKind::Circular => "circular",
            FailureKind::Type => "type-error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub branch: String,
    pub unknown: Option<Name>,
    pub kind: FailureKind,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Resolution {
    /// Deduplicated up to α, in canonical order.
    pub readings: Vec<Reading>,
    pub counts: Counts,
    pub failures: Vec<Failure>,
}

/// `unknown(s1..sn) = source`, with the unknown's type read off the elements.
pub fn build_equation(source: &Term, parallels: &[(Term, Term)], unknown: &str) -> Result<Equation, EllipsisError> {
    let elems: Vec<Term> = parallels.iter().map(|(s, _)| s.clone()).collect();
    for s in &elems {
        let plain = normalize(&s.strip());
        let exempt = plain == crate::term::pleonastic() || contains_abs(&plain);
        if !exempt && find_paths(&normalize(source), &plain).is_empty() {
            return Err(EllipsisError::ElementNotFound(format!("{plain:?}")));
        }
    }
    let var = unknown_var(unknown, &elems, source)?;
    let lhs = Term::apply(Term::var(&var), elems);
    Ok(Equation::new(lhs, source.clone(), BTreeSet::from([var]))?)
}

fn contains_abs(t: &Term) -> bool {
    match t {
        Term::Abs(..) => true,
        Term::App(a, b) | Term::Pair(a, b) => contains_abs(a) || contains_abs(b),
        Term::Prim(x) => contains_abs(x),
        _ => false,
    }
}

fn unknown_var(name: &str, elems: &[Term], source: &Term) -> Result<Var, TermError> {
    let target = type_in_context(source, &[])?;
    let tys = elems
        .iter()
        .map(|s| type_in_context(s, &[]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Var::new(name, Type::arrows(tys, target)))
}

/// Drops every unifier whose bindings keep a primary occurrence.
pub fn filter_primary(solutions: Vec<Substitution>) -> Vec<Substitution> {
    solutions.into_iter().filter(|s| !s.contains_prim()).collect()
}

/// Drops every unifier that abstracts an anaphor occurrence while keeping its
/// antecedent occurrence. Identity when `enabled` is false.
pub fn filter_antecedent_linking(
    solutions: Vec<Substitution>,
    eq: &Equation,
    links: &[Link],
    enabled: bool,
) -> Vec<Substitution> {
    if !enabled || links.is_empty() {
        return solutions;
    }
    let Some((p, args)) = eq.flex_lhs() else {
        return solutions;
    };
    let n = args.len();
    solutions
        .into_iter()
        .filter(|s| {
            let Some(b) = s.get(p) else { return true };
            let sites = abstraction_sites(b, n, &eq.rhs);
            let abstracted = |path: &Path| sites.iter().any(|site| path.starts_with(site));
            links
                .iter()
                .all(|l| !abstracted(&l.anaphor) || abstracted(&l.antecedent))
        })
        .collect()
}

/// Applies `binding` to the target elements, marking as primary the target
/// occurrences that fill positions primary in the equation's right-hand side.
pub fn mark_derived_primaries(eq: &Equation, binding: &Term, targets: &[Term]) -> Term {
    let n = targets.len();
    let marked = mark_abstractions(binding, n, &eq.rhs);
    normalize(&Term::apply(marked, targets.iter().cloned()))
}

/// Gives two parallel elements a common type by raising an entity to
/// `λR. R(a)` against a generalized quantifier.
pub fn type_align(source: &Term, target: &Term) -> Result<(Term, Term), TermError> {
    let st = type_in_context(source, &[])?;
    let tt = type_in_context(target, &[])?;
    if st == tt {
        return Ok((source.clone(), target.clone()));
    }
    let gq = Type::generalized_quantifier();
    match (&st, &tt) {
        (Type::Entity, t) if *t == gq => Ok((type_raise(source)?, target.clone())),
        (s, Type::Entity) if *s == gq => Ok((source.clone(), type_raise(target)?)),
        _ => Err(TermError::TypeMismatch {
            expected: st,
            found: tt,
            context: "parallel elements".into(),
        }),
    }
}

#[derive(Clone, Debug)]
struct Solved {
    binding: Term,
    /// The unknown applied to its targets, with derived markers.
    instance: Term,
    /// Right-hand side of the equation that was solved.
    rhs: Term,
}

struct Aligned<'a> {
    clause: &'a Clause,
    sources: Vec<Term>,
    targets: Vec<Term>,
}

/// Resolves every clause against `problem.source`, instantiates the frame,
/// and discharges the pending assumptions in every legal order.
pub fn solve_system(
    problem: &EllipsisProblem,
    budget: &SearchBudget,
    linking: bool,
) -> Result<Resolution, EllipsisError> {
    let mut res = Resolution::default();
    let readings = solve_branch(problem, budget, linking, "", &mut res.counts, &mut res.failures)?;
    res.readings = dedup_readings(readings);
    Ok(res)
}

pub(crate) fn dedup_readings(readings: Vec<Reading>) -> Vec<Reading> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<(String, Reading)> = Vec::new();
    for r in readings {
        if seen.insert(r.term.clone()) {
            out.push((crate::syntax::render(&r.term), r));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, r)| r).collect()
}

pub(crate) fn solve_branch(
    problem: &EllipsisProblem,
    budget: &SearchBudget,
    linking: bool,
    branch: &str,
    counts: &mut Counts,
    failures: &mut Vec<Failure>,
) -> Result<Vec<Reading>, EllipsisError> {
    let mut names = BTreeSet::new();
    let mut aligned = Vec::new();
    for c in &problem.clauses {
        if !names.insert(c.unknown.clone()) {
            return Err(EllipsisError::DuplicateClause(c.unknown.clone()));
        }
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        for (s, t) in &c.parallels {
            let (s, t) = type_align(s, t)?;
            sources.push(s);
            targets.push(t);
        }
        aligned.push(Aligned {
            clause: c,
            sources,
            targets,
        });
    }
    for t in std::iter::once(&problem.frame)
        .chain(aligned.iter().map(|a| &a.clause.rhs))
    {
        for v in t.free_vars() {
            if let Some(n) = placeholder_name(&v) {
                if n != SOURCE && !names.contains(n) {
                    return Err(EllipsisError::UnknownPlaceholder(n.into()));
                }
            }
        }
    }

    let mut ctx = SystemCtx {
        aligned: &aligned,
        source: &problem.source,
        budget,
        linking,
        branch,
        counts,
        failures,
        results: Vec::new(),
    };
    ctx.search(BTreeMap::new())?;
    let results = std::mem::take(&mut ctx.results);

    let mut readings = Vec::new();
    for solved in results {
        let frame = instantiate(&problem.frame, &problem.source, &solved);
        let assumptions: Vec<Assumption> = problem
            .assumptions
            .iter()
            .map(|a| match a {
                Assumption::Quant { det, var, restriction } => Assumption::Quant {
                    det: det.clone(),
                    var: var.clone(),
                    restriction: instantiate(restriction, &problem.source, &solved),
                },
                other => other.clone(),
            })
            .collect();
        let bindings: BTreeMap<Name, Term> = solved
            .iter()
            .map(|(k, s)| (k.clone(), normalize(&s.binding.strip())))
            .collect();
        for (order, term) in discharge_all(&Interpretation::new(assumptions, frame)) {
            let label = describe(branch, &order);
            readings.push(Reading {
                term: normalize(&term.strip()),
                bindings: bindings.clone(),
                branch: label,
            });
        }
    }
    Ok(readings)
}

fn describe(branch: &str, post: &[Name]) -> String {
    let post = format!("after [{}]", post.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "));
    if branch.is_empty() {
        post
    } else {
        format!("{branch}; {post}")
    }
}

/// Every complete discharge of the store, in every legal order, with the
/// order used. Orders giving the same term are reported once.
pub(crate) fn discharge_all(i: &Interpretation) -> Vec<(Vec<Name>, Term)> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    fn go(i: &Interpretation, order: &mut Vec<Name>, seen: &mut BTreeSet<Term>, out: &mut Vec<(Vec<Name>, Term)>) {
        if i.assumptions.is_empty() {
            if seen.insert(i.matrix.strip()) {
                out.push((order.clone(), i.matrix.clone()));
            }
            return;
        }
        for v in i.dischargeable() {
            if let Ok(next) = discharge_quant(i, v) {
                order.push(v.name.clone());
                go(&next, order, seen, out);
                order.pop();
            }
        }
    }
    go(i, &mut Vec::new(), &mut seen, &mut out);
    out
}

fn instantiate(t: &Term, source: &Term, solved: &BTreeMap<Name, Solved>) -> Term {
    let mut cur = t.clone();
    // The source clause itself may mention other clauses.
    for _ in 0..2 {
        let mut map = BTreeMap::new();
        for v in cur.free_vars() {
            match placeholder_name(&v) {
                Some(SOURCE) => {
                    map.insert(v.clone(), source.strip());
                }
                Some(n) => {
                    if let Some(s) = solved.get(n) {
                        map.insert(v.clone(), s.instance.strip());
                    }
                }
                None => {}
            }
        }
        if map.is_empty() {
            break;
        }
        cur = replace_free(&cur, &map);
    }
    normalize(&cur)
}

/// Keeps only the markers sitting on one of `elems`.
fn keep_marks_on(t: &Term, elems: &[Term]) -> Term {
    let plain: Vec<Term> = elems.iter().map(|e| normalize(&e.strip())).collect();
    fn go(t: &Term, elems: &[Term]) -> Term {
        match t {
            Term::Prim(x) => {
                let inner = go(x, elems);
                if elems.contains(&x.strip()) {
                    Term::prim(inner)
                } else {
                    inner
                }
            }
            Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(go(b, elems))),
            Term::App(a, b) => Term::app(go(a, elems), go(b, elems)),
            Term::Pair(a, b) => Term::pair(go(a, elems), go(b, elems)),
            leaf => leaf.clone(),
        }
    }
    go(t, &plain)
}

struct SystemCtx<'a, 'b> {
    aligned: &'b [Aligned<'a>],
    source: &'b Term,
    budget: &'b SearchBudget,
    linking: bool,
    branch: &'b str,
    counts: &'b mut Counts,
    failures: &'b mut Vec<Failure>,
    results: Vec<BTreeMap<Name, Solved>>,
}

impl SystemCtx<'_, '_> {
    fn fail(&mut self, unknown: &Name, kind: FailureKind, detail: String) {
        self.failures.push(Failure {
            branch: self.branch.to_string(),
            unknown: Some(unknown.clone()),
            kind,
            detail,
        });
    }

    /// The clause's right-hand side with the source clause filled in.
    fn template(&self, a: &Aligned) -> Term {
        let map = BTreeMap::from([(placeholder(SOURCE), self.source.clone())]);
        replace_free(&a.clause.rhs, &map)
    }

    fn pending(&self, a: &Aligned, solved: &BTreeMap<Name, Solved>) -> Vec<Name> {
        self.template(a)
            .free_vars()
            .iter()
            .filter_map(|v| placeholder_name(v))
            .filter(|n| *n != SOURCE && !solved.contains_key(*n))
            .map(Name::from)
            .collect()
    }

    fn search(&mut self, solved: BTreeMap<Name, Solved>) -> Result<(), EllipsisError> {
        let open: Vec<&Aligned> = self
            .aligned
            .iter()
            .filter(|a| !solved.contains_key(&a.clause.unknown))
            .collect();
        if open.is_empty() {
            self.results.push(solved);
            return Ok(());
        }
        if let Some(a) = open.iter().find(|a| self.pending(a, &solved).is_empty()) {
            return self.solve_clause(a, solved);
        }
        for a in open {
            self.attempt_circular(a, &solved)?;
        }
        Ok(())
    }

    /// Expands placeholders in a clause's right-hand side. Unsolved clauses
    /// become their unknown applied to their targets.
    fn expand(&self, a: &Aligned, solved: &BTreeMap<Name, Solved>) -> Result<(Term, BTreeSet<Var>, Vec<Link>), EllipsisError> {
        let mut map = BTreeMap::new();
        let mut unknowns = BTreeSet::new();
        let mut links = a.clause.links.clone();
        let template = &self.template(a);
        for v in template.free_vars() {
            let Some(name) = placeholder_name(&v) else { continue };
            if let Some(s) = solved.get(name) {
                map.insert(v.clone(), keep_marks_on(&s.instance, &a.sources));
            } else {
                let other = self
                    .aligned
                    .iter()
                    .find(|o| &*o.clause.unknown == name)
                    .ok_or_else(|| EllipsisError::UnknownPlaceholder(name.into()))?;
                let var = unknown_var(name, &other.sources, self.source)?;
                unknowns.insert(var.clone());
                map.insert(v.clone(), Term::apply(Term::var(&var), other.targets.iter().cloned()));
            }
        }
        let rhs = normalize(&replace_free(template, &map));
        // Occurrences copied out of a solved clause are linked to the
        // corresponding occurrences of that clause's own source, when that
        // source appears verbatim in this right-hand side.
        let plain_rhs = rhs.strip();
        for v in template.free_vars() {
            let Some(name) = placeholder_name(&v) else { continue };
            let Some(s) = solved.get(name) else { continue };
            let holes = find_paths(template, &Term::var(&v));
            let homes = find_paths(&plain_rhs, &s.rhs);
            if holes.len() != 1 || homes.len() != 1 {
                continue;
            }
            let (pi, kappa) = (&holes[0], &homes[0]);
            let copy = s.instance.strip();
            for (rho, sub) in positions(&copy) {
                if !a.sources.iter().any(|e| normalize(&e.strip()) == *sub) {
                    continue;
                }
                let anaphor: Path = pi.iter().chain(&rho).copied().collect();
                let antecedent: Path = kappa.iter().chain(&rho).copied().collect();
                if subterm_at(&plain_rhs, &antecedent) == Some(sub) {
                    links.push(Link { anaphor, antecedent });
                }
            }
        }
        Ok((rhs, unknowns, links))
    }

    fn solve_clause(&mut self, a: &Aligned, solved: BTreeMap<Name, Solved>) -> Result<(), EllipsisError> {
        let name = a.clause.unknown.clone();
        let (rhs, _, links) = self.expand(a, &solved)?;
        let eq = match build_equation(&rhs, &pairs(a), &name) {
            Ok(eq) => eq,
            Err(e @ EllipsisError::ElementNotFound(_)) => return Err(e),
            Err(e) => {
                self.fail(&name, FailureKind::Type, e.to_string());
                return Ok(());
            }
        };
        let sols = match solve(&eq, self.budget) {
            Ok(s) => s,
            Err(e) => {
                let kind = unify_failure(&e);
                self.fail(&name, kind, e.to_string());
                return Ok(());
            }
        };
        if sols.truncated {
            self.fail(&name, FailureKind::Truncated, "search budget reached; using the unifiers found".into());
        }
        let raw = sols.unifiers.len();
        let primary = filter_primary(sols.unifiers);
        let n_primary = primary.len();
        let linked = filter_antecedent_linking(primary, &eq, &links, self.linking);
        *self.counts += Counts {
            raw,
            primary: n_primary,
            linking: linked.len(),
        };
        if linked.is_empty() {
            self.fail(&name, FailureKind::Filtered, format!("{raw} unifiers, none satisfies the constraints"));
            return Ok(());
        }
        let (p, _) = eq.flex_lhs().expect("clause equation");
        let p = p.clone();
        for sol in linked {
            let Some(binding) = sol.get(&p).cloned() else { continue };
            let instance = mark_derived_primaries(&eq, &binding, &a.targets);
            let mut next = solved.clone();
            next.insert(
                name.clone(),
                Solved {
                    binding,
                    instance,
                    rhs: eq.rhs.strip(),
                },
            );
            self.search(next)?;
        }
        Ok(())
    }

    fn attempt_circular(&mut self, a: &Aligned, solved: &BTreeMap<Name, Solved>) -> Result<(), EllipsisError> {
        let name = a.clause.unknown.clone();
        let (rhs, mut unknowns, _) = self.expand(a, solved)?;
        let var = unknown_var(&name, &a.sources, &rhs)?;
        unknowns.insert(var.clone());
        let lhs = Term::apply(Term::var(&var), a.sources.iter().cloned());
        let eq = Equation::new(lhs, rhs, unknowns)?;
        match solve(&eq, self.budget) {
            Err(e) => {
                let kind = unify_failure(&e);
                self.fail(&name, kind, e.to_string());
            }
            Ok(_) => self.fail(
                &name,
                FailureKind::Circular,
                "the clause depends on itself; its unifiers are not used".into(),
            ),
        }
        Ok(())
    }
}

fn pairs(a: &Aligned) -> Vec<(Term, Term)> {
    a.sources.iter().cloned().zip(a.targets.iter().cloned()).collect()
}

fn unify_failure(e: &UnifyError) -> FailureKind {
    match e {
        UnifyError::NotUnifiable { occurs_check: true } => FailureKind::OccursCheck,
        UnifyError::NotUnifiable { .. } => FailureKind::NotUnifiable,
        UnifyError::BudgetExhausted => FailureKind::BudgetExhausted,
        UnifyError::NotSecondOrder(_) | UnifyError::Type(_) => FailureKind::Type,
    }
}
