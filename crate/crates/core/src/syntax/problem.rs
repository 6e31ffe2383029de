//! The problem-file language.
//!
//! ```text
//! (problem golf)
//! (decl like (-> e e t))
//! (decl dan e) (decl george e) (decl golf e)
//! (source (like (prim dan) golf))
//! (ellipsis P (parallel dan george))
//! (frame (and @source @P))
//! (expect "and(like(dan, golf), like(george, golf))")
//! ```
//!
//! Other forms: `(assume (quant DET X RESTRICTION))`, `(assume (bind X))`,
//! `(rhs TERM)` and `(link (occ PATH..) (occ PATH..))` inside an ellipsis
//! block, `(linking on|off)`, `(budget (depth N) (solutions N))`,
//! `(expect (linking on) (includes) (reading LABEL TERM) ..)`,
//! `(expect-failure P occurs-check)` and `(exploratory)`.
//!
//! Terms: `(lam x TYPE BODY)`, `(app F A ..)` or `(F A ..)`, `(pair A B)`,
//! `(fst P)`, `(snd P)`, `(prim T)`, `(q DET x RESTRICTION SCOPE)`. Types:
//! `e`, `t`, `(-> A .. B)`, `(* A B)`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::readable::{parse_readable, ReadableError};
use super::sexpr::{read_all, Pos, ReadError, Sexp};
use crate::ellipsis::{placeholder, placeholder_name, Clause, EllipsisProblem, FailureKind, Link, SOURCE};
use crate::scope::Assumption;
use crate::term::{subterm_at, type_in_context, Env, Name, Path, Term, TermError, Var, FST, SND};
use crate::types::Type;
use crate::unify::SearchBudget;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error("{pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unknown name `{name}`")]
    Unknown { pos: Pos, name: String },
    #[error("{pos}: in `{term}`: {error}")]
    Type { pos: Pos, term: String, error: TermError },
    #[error("{pos}: occurrence {path:?} not found in the right-hand side of `{clause}`")]
    UnresolvedSelector { pos: Pos, clause: Name, path: Path },
    #[error("{pos}: expected reading `{text}`: {error}")]
    Expected { pos: Pos, text: String, error: ReadableError },
}

impl ParseError {
    fn syntax<T>(pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos,
            message: message.into(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub label: Option<String>,
    pub term: Term,
}

/// Expected readings, for one linking setting or for both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub linking: Option<bool>,
    /// When false the listed readings need only be among those found.
    pub exact: bool,
    pub readings: Vec<Expected>,
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub name: String,
    pub env: Env,
    /// Assumption variables, by name.
    pub vars: BTreeMap<String, Var>,
    pub problem: EllipsisProblem,
    pub linking: bool,
    pub budget: SearchBudget,
    pub expectations: Vec<Expectation>,
    pub expected_failures: Vec<(Name, FailureKind)>,
    /// Not part of the pass/fail corpus.
    pub exploratory: bool,
}

impl ProblemFile {
    pub fn expectation(&self, linking: bool) -> Option<&Expectation> {
        self.expectations
            .iter()
            .find(|e| e.linking == Some(linking))
            .or_else(|| self.expectations.iter().find(|e| e.linking.is_none()))
    }

    /// Free variables that may appear in canonical reading text.
    pub fn free_types(&self) -> BTreeMap<String, Type> {
        self.vars.iter().map(|(k, v)| (k.clone(), v.ty.clone())).collect()
    }
}

pub fn parse_type_sexp(x: &Sexp) -> Result<Type, ParseError> {
    match x {
        Sexp::Atom(a, pos) => match a.as_str() {
            "e" => Ok(Type::Entity),
            "t" => Ok(Type::Truth),
            other => ParseError::syntax(*pos, format!("unknown type `{other}`")),
        },
        Sexp::List(items, pos) => match (items.first().and_then(Sexp::atom), items.len()) {
            (Some("->"), n) if n >= 3 => {
                let tys = items[1..]
                    .iter()
                    .map(parse_type_sexp)
                    .collect::<Result<Vec<_>, _>>()?;
                let (target, args) = tys.split_last().expect("at least two");
                Ok(Type::arrows(args.to_vec(), target.clone()))
            }
            (Some("*"), 3) => Ok(Type::pair(parse_type_sexp(&items[1])?, parse_type_sexp(&items[2])?)),
            _ => ParseError::syntax(*pos, format!("malformed type `{x}`")),
        },
        Sexp::Str(_, pos) => ParseError::syntax(*pos, "expected a type"),
    }
}

/// Elaborates s-expression terms against declarations and assumption variables.
pub struct Elaborator<'a> {
    pub env: &'a Env,
    pub vars: &'a BTreeMap<String, Var>,
    scope: Vec<(String, Type)>,
}

impl<'a> Elaborator<'a> {
    pub fn new(env: &'a Env, vars: &'a BTreeMap<String, Var>) -> Elaborator<'a> {
        Elaborator {
            env,
            vars,
            scope: Vec::new(),
        }
    }

    fn checked(&self, t: Term, x: &Sexp) -> Result<Term, ParseError> {
        let ctx: Vec<Type> = self.scope.iter().map(|(_, ty)| ty.clone()).collect();
        match type_in_context(&t, &ctx) {
            Ok(_) => Ok(t),
            Err(error) => Err(ParseError::Type {
                pos: x.pos(),
                term: x.to_string(),
                error,
            }),
        }
    }

    fn type_of(&self, t: &Term, x: &Sexp) -> Result<Type, ParseError> {
        let ctx: Vec<Type> = self.scope.iter().map(|(_, ty)| ty.clone()).collect();
        type_in_context(t, &ctx).map_err(|error| ParseError::Type {
            pos: x.pos(),
            term: x.to_string(),
            error,
        })
    }

    fn name(&self, name: &str, pos: Pos) -> Result<Term, ParseError> {
        if let Some(i) = self.scope.iter().rposition(|(n, _)| n == name) {
            return Ok(Term::Bound((self.scope.len() - 1 - i) as u32));
        }
        if let Some(v) = self.vars.get(name) {
            return Ok(Term::var(v));
        }
        if let Some(p) = name.strip_prefix('@') {
            if !p.is_empty() {
                return Ok(Term::var(&placeholder(p)));
            }
        }
        self.env.constant(name).ok_or_else(|| ParseError::Unknown {
            pos,
            name: name.to_string(),
        })
    }

    fn binder<'s>(&self, x: &'s Sexp) -> Result<&'s str, ParseError> {
        match x.atom() {
            Some(a) if !a.starts_with('@') => Ok(a),
            _ => ParseError::syntax(x.pos(), "expected a variable name"),
        }
    }

    fn under<T>(&mut self, name: &str, ty: Type, f: impl FnOnce(&mut Self) -> Result<T, ParseError>) -> Result<T, ParseError> {
        self.scope.push((name.to_string(), ty));
        let r = f(self);
        self.scope.pop();
        r
    }

    pub fn term(&mut self, x: &Sexp) -> Result<Term, ParseError> {
        let (items, pos) = match x {
            Sexp::Atom(a, pos) => return self.name(a, *pos),
            Sexp::Str(_, pos) => return ParseError::syntax(*pos, "unexpected string in a term"),
            Sexp::List(items, pos) => (items, *pos),
        };
        let bound = |n: &str| self.scope.iter().any(|(b, _)| b == n);
        let head = items.first().and_then(Sexp::atom).filter(|h| !bound(h));
        let t = match (head, items.len()) {
            (_, 0) => return ParseError::syntax(pos, "empty term"),
            (Some("lam"), 4) => {
                let v = self.binder(&items[1])?;
                let ty = parse_type_sexp(&items[2])?;
                let body = self.under(v, ty.clone(), |e| e.term(&items[3]))?;
                Term::Abs(ty, Box::new(body))
            }
            (Some("lam"), _) => return ParseError::syntax(pos, "expected (lam VAR TYPE BODY)"),
            (Some("q"), 5) => {
                let det = self.term(&items[1])?;
                let v = self.binder(&items[2])?;
                let (r, s) = self.under(v, Type::Entity, |e| Ok((e.term(&items[3])?, e.term(&items[4])?)))?;
                Term::app(det, Term::Abs(Type::Entity, Box::new(Term::pair(r, s))))
            }
            (Some("q"), _) => return ParseError::syntax(pos, "expected (q DET VAR RESTRICTION SCOPE)"),
            (Some("prim"), 2) => Term::prim(self.term(&items[1])?),
            (Some("pair"), 3) => Term::pair(self.term(&items[1])?, self.term(&items[2])?),
            (Some(p), 2) if p == FST || p == SND => {
                let a = self.term(&items[1])?;
                let ty = self.type_of(&a, &items[1])?;
                if ty.as_pair().is_none() {
                    return Err(ParseError::Type {
                        pos,
                        term: x.to_string(),
                        error: TermError::NotAPair { name: p.into(), found: ty },
                    });
                }
                let proj = if p == FST { Term::fst(&ty) } else { Term::snd(&ty) };
                Term::app(proj, a)
            }
            (Some(kw @ ("prim" | "pair")), _) => return ParseError::syntax(pos, format!("wrong number of operands to `{kw}`")),
            (Some("app"), n) if n >= 2 => {
                let f = self.term(&items[1])?;
                let args = items[2..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                Term::apply(f, args)
            }
            _ => {
                let f = self.term(&items[0])?;
                let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                Term::apply(f, args)
            }
        };
        self.checked(t, x)
    }

    /// A closed-world term: every placeholder must be known.
    pub fn top(&mut self, x: &Sexp, placeholders: &BTreeSet<String>) -> Result<Term, ParseError> {
        let t = self.term(x)?;
        for v in t.free_vars() {
            if let Some(n) = placeholder_name(&v) {
                if n != SOURCE && !placeholders.contains(n) {
                    return Err(ParseError::Unknown {
                        pos: x.pos(),
                        name: format!("@{n}"),
                    });
                }
            }
        }
        Ok(t)
    }
}

fn number(x: &Sexp) -> Result<usize, ParseError> {
    x.atom()
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| ParseError::Syntax {
            pos: x.pos(),
            message: format!("expected a number, found `{x}`"),
        })
}

fn occ(x: &Sexp) -> Result<Path, ParseError> {
    match x.list() {
        Some([head, rest @ ..]) if head.atom() == Some("occ") => rest.iter().map(number).collect(),
        _ => ParseError::syntax(x.pos(), "expected (occ STEP ..)"),
    }
}

fn switch(x: &Sexp) -> Result<bool, ParseError> {
    match x.atom() {
        Some("on") => Ok(true),
        Some("off") => Ok(false),
        _ => ParseError::syntax(x.pos(), "expected `on` or `off`"),
    }
}

fn failure_kind(x: &Sexp) -> Result<FailureKind, ParseError> {
    let kinds = [
        FailureKind::OccursCheck,
        FailureKind::NotUnifiable,
        FailureKind::BudgetExhausted,
        FailureKind::Truncated,
        FailureKind::Filtered,
        FailureKind::Circular,
        FailureKind::Type,
    ];
    kinds
        .into_iter()
        .find(|k| Some(k.as_str()) == x.atom())
        .ok_or_else(|| ParseError::Syntax {
            pos: x.pos(),
            message: format!("unknown failure kind `{x}`"),
        })
}

struct RawClause<'s> {
    name: Name,
    parallels: Vec<(&'s Sexp, &'s Sexp)>,
    rhs: Option<&'s Sexp>,
    links: Vec<(&'s Sexp, &'s Sexp)>,
}

pub fn parse_problem(text: &str, default_name: &str) -> Result<ProblemFile, ParseError> {
    let forms = read_all(text)?;
    let mut name = default_name.to_string();
    let mut env = Env::new();
    let mut assumes = Vec::new();
    let mut source = None;
    let mut frame = None;
    let mut clauses: Vec<RawClause> = Vec::new();
    let mut linking = false;
    let mut budget = SearchBudget::default();
    let mut expects = Vec::new();
    let mut expected_failures = Vec::new();
    let mut exploratory = false;

    for f in &forms {
        let Some(items) = f.list() else {
            return ParseError::syntax(f.pos(), "expected a top-level form");
        };
        let pos = f.pos();
        match (f.head(), items.len()) {
            (Some("problem"), 2) => name = items[1].to_string(),
            (Some("decl"), 3) => {
                let n = items[1].atom().ok_or_else(|| ParseError::Syntax {
                    pos: items[1].pos(),
                    message: "expected a constant name".into(),
                })?;
                let ty = parse_type_sexp(&items[2])?;
                env.declare(n, ty).map_err(|error| ParseError::Type {
                    pos,
                    term: n.to_string(),
                    error,
                })?;
            }
            (Some("assume"), 2) => assumes.push(&items[1]),
            (Some("source"), 2) => source = Some(&items[1]),
            (Some("frame"), 2) => frame = Some(&items[1]),
            (Some("linking"), 2) => linking = switch(&items[1])?,
            (Some("exploratory"), 1) => exploratory = true,
            (Some("budget"), _) => {
                for opt in &items[1..] {
                    match (opt.head(), opt.list().map(<[Sexp]>::len)) {
                        (Some("depth"), Some(2)) => budget.max_depth = number(&opt.list().unwrap()[1])?,
                        (Some("solutions"), Some(2)) => budget.max_solutions = number(&opt.list().unwrap()[1])?,
                        _ => return ParseError::syntax(opt.pos(), "expected (depth N) or (solutions N)"),
                    }
                }
                if budget.max_depth == 0 || budget.max_solutions == 0 {
                    return ParseError::syntax(pos, "budget limits must be positive");
                }
            }
            (Some("ellipsis"), n) if n >= 2 => {
                let cname: Name = items[1].atom().filter(|a| !a.starts_with('@')).unwrap_or("").into();
                if cname.is_empty() || &*cname == SOURCE {
                    return ParseError::syntax(items[1].pos(), "expected an unknown name");
                }
                if clauses.iter().any(|c| c.name == cname) {
                    return ParseError::syntax(items[1].pos(), format!("ellipsis `{cname}` declared twice"));
                }
                let mut c = RawClause {
                    name: cname,
                    parallels: Vec::new(),
                    rhs: None,
                    links: Vec::new(),
                };
                for part in &items[2..] {
                    let p = part.list().unwrap_or(&[]);
                    match (part.head(), p.len()) {
                        (Some("parallel"), 3) => c.parallels.push((&p[1], &p[2])),
                        (Some("rhs"), 2) => c.rhs = Some(&p[1]),
                        (Some("link"), 3) => c.links.push((&p[1], &p[2])),
                        _ => {
                            return ParseError::syntax(part.pos(), "expected (parallel S T), (rhs TERM) or (link ANAPHOR ANTECEDENT)")
                        }
                    }
                }
                if c.parallels.is_empty() {
                    return ParseError::syntax(pos, "an ellipsis needs at least one parallel pair");
                }
                clauses.push(c);
            }
            (Some("expect"), _) => expects.push(f),
            (Some("expect-failure"), 3) => {
                let u: Name = items[1].to_string().into();
                expected_failures.push((u, failure_kind(&items[2])?));
            }
            _ => return ParseError::syntax(pos, format!("unknown form `{}`", f.head().unwrap_or("?"))),
        }
    }

    // Assumption variables are entities, visible everywhere.
    let mut vars = BTreeMap::new();
    for a in &assumes {
        let v = match (a.head(), a.list().unwrap_or(&[])) {
            (Some("quant"), [_, _, v, _]) | (Some("bind"), [_, v]) => v,
            _ => return ParseError::syntax(a.pos(), "expected (quant DET VAR RESTRICTION) or (bind VAR)"),
        };
        let n = v.atom().ok_or_else(|| ParseError::Syntax {
            pos: v.pos(),
            message: "expected a variable name".into(),
        })?;
        if env.lookup(n).is_some() || vars.contains_key(n) {
            return ParseError::syntax(v.pos(), format!("`{n}` is already declared"));
        }
        vars.insert(n.to_string(), Var::new(n, Type::Entity));
    }
    let placeholders: BTreeSet<String> = clauses.iter().map(|c| c.name.to_string()).collect();
    let mut el = Elaborator::new(&env, &vars);

    let mut assumptions = Vec::new();
    for a in &assumes {
        let items = a.list().unwrap();
        let var = vars[items[if a.head() == Some("quant") { 2 } else { 1 }].atom().unwrap()].clone();
        if a.head() == Some("quant") {
            let det = el.top(&items[1], &placeholders)?;
            let restriction = el.top(&items[3], &placeholders)?;
            let pq = Type::pair_quantifier();
            if el.type_of(&det, &items[1])? != pq {
                return Err(ParseError::Type {
                    pos: items[1].pos(),
                    term: items[1].to_string(),
                    error: TermError::TypeMismatch {
                        expected: pq,
                        found: el.type_of(&det, &items[1])?,
                        context: "determiner".into(),
                    },
                });
            }
            expect_truth(&el, &restriction, &items[3])?;
            assumptions.push(Assumption::Quant { det, var, restriction });
        } else {
            assumptions.push(Assumption::Bind { var });
        }
    }

    let Some(source_x) = source else {
        return ParseError::syntax(Pos { line: 1, col: 1 }, "missing (source TERM)");
    };
    let source = el.top(source_x, &BTreeSet::new())?;
    expect_truth(&el, &source, source_x)?;

    let mut built = Vec::new();
    for c in &clauses {
        let mut parallels = Vec::new();
        for (s, t) in &c.parallels {
            parallels.push((el.top(s, &BTreeSet::new())?, el.top(t, &BTreeSet::new())?));
        }
        let rhs = match c.rhs {
            Some(r) => {
                let t = el.top(r, &placeholders)?;
                expect_truth(&el, &t, r)?;
                t
            }
            None => Term::var(&placeholder(SOURCE)),
        };
        let visible = crate::term::replace_free(&rhs, &BTreeMap::from([(placeholder(SOURCE), source.clone())]));
        let mut links = Vec::new();
        for (an, ant) in &c.links {
            let (anaphor, antecedent) = (occ(an)?, occ(ant)?);
            for (path, x) in [(&anaphor, an), (&antecedent, ant)] {
                if subterm_at(&visible, path).is_none() {
                    return Err(ParseError::UnresolvedSelector {
                        pos: x.pos(),
                        clause: c.name.clone(),
                        path: path.clone(),
                    });
                }
            }
            links.push(Link { anaphor, antecedent });
        }
        built.push(Clause {
            unknown: c.name.clone(),
            parallels,
            rhs,
            links,
        });
    }

    let frame = match frame {
        Some(x) => {
            let t = el.top(x, &placeholders)?;
            expect_truth(&el, &t, x)?;
            t
        }
        None => default_frame(&built),
    };

    let free = vars.iter().map(|(k, v)| (k.clone(), v.ty.clone())).collect::<BTreeMap<_, _>>();
    let mut expectations = Vec::new();
    for f in expects {
        let items = &f.list().unwrap()[1..];
        let mut e = Expectation {
            linking: None,
            exact: true,
            readings: Vec::new(),
        };
        for item in items {
            match (item.head(), item.list()) {
                (Some("linking"), Some([_, s])) => e.linking = Some(switch(s)?),
                (Some("includes"), Some([_])) => e.exact = false,
                (Some("reading"), Some([_, label, body])) => e.readings.push(Expected {
                    label: Some(label.to_string()),
                    term: expected_term(&mut el, body, &free)?,
                }),
                _ => e.readings.push(Expected {
                    label: None,
                    term: expected_term(&mut el, item, &free)?,
                }),
            }
        }
        expectations.push(e);
    }

    Ok(ProblemFile {
        name,
        env: env.clone(),
        vars: vars.clone(),
        problem: EllipsisProblem {
            assumptions,
            source,
            clauses: built,
            frame,
        },
        linking,
        budget,
        expectations,
        expected_failures,
        exploratory,
    })
}

/// `and(@source, and(@P, ..))` over the clauses in order.
pub fn default_frame(clauses: &[Clause]) -> Term {
    let mut parts: Vec<Term> = std::iter::once(SOURCE)
        .chain(clauses.iter().map(|c| &*c.unknown))
        .map(|n| Term::var(&placeholder(n)))
        .collect();
    let mut acc = parts.pop().expect("source is always present");
    while let Some(p) = parts.pop() {
        acc = Term::and(p, acc);
    }
    acc
}

fn expect_truth(el: &Elaborator, t: &Term, x: &Sexp) -> Result<(), ParseError> {
    let ty = el.type_of(t, x)?;
    if ty != Type::Truth {
        return Err(ParseError::Type {
            pos: x.pos(),
            term: x.to_string(),
            error: TermError::TypeMismatch {
                expected: Type::Truth,
                found: ty,
                context: "clause".into(),
            },
        });
    }
    Ok(())
}

fn expected_term(el: &mut Elaborator, x: &Sexp, free: &BTreeMap<String, Type>) -> Result<Term, ParseError> {
    let t = match x {
        Sexp::Str(text, pos) => parse_readable(text, el.env, free).map_err(|error| ParseError::Expected {
            pos: *pos,
            text: text.clone(),
            error,
        })?,
        _ => el.top(x, &BTreeSet::new())?,
    };
    expect_truth(el, &t, x)?;
    Ok(crate::term::normalize(&t.strip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::collect_primaries;

    const GOLF: &str = r#"
        (problem golf)
        (decl like (-> e e t))
        (decl dan e) (decl george e) (decl golf e)
        (source (like (prim dan) golf))
        (ellipsis P (parallel dan george))
        (expect "and(like(dan, golf), like(george, golf))")
    "#;

    #[test]
    fn golf_file() {
        let f = parse_problem(GOLF, "x").unwrap();
        assert_eq!(f.name, "golf");
        assert_eq!(collect_primaries(&f.problem.source), vec![vec![1]]);
        assert_eq!(f.problem.clauses.len(), 1);
        assert_eq!(f.expectations[0].readings.len(), 1);
        assert!(!f.linking);
        let frame = crate::syntax::render(&f.problem.frame);
        assert_eq!(frame, "and(@source, @P)");
    }

    #[test]
    fn reports_positions() {
        let e = parse_problem("(decl like (-> e e t))\n(source (like dan golf))", "x").unwrap_err();
        assert!(matches!(e, ParseError::Unknown { pos: Pos { line: 2, col: 15 }, .. }), "{e}");
        let e = parse_problem("(decl like (-> e e t))\n(decl p t)\n(source (like p p))", "x").unwrap_err();
        assert!(matches!(e, ParseError::Type { .. }), "{e}");
    }

    #[test]
    fn unresolved_selector() {
        let text = format!("{GOLF}\n(ellipsis Q (parallel dan george) (link (occ 3) (occ 1)))");
        let e = parse_problem(&text, "x").unwrap_err();
        assert!(matches!(e, ParseError::UnresolvedSelector { .. }), "{e}");
    }

    #[test]
    fn quantifier_sugar_and_assumptions() {
        let text = r#"
            (decl every (-> (-> e (* t t)) t))
            (decl person (-> e t)) (decl greet (-> e e t)) (decl john e) (decl bill e)
            (assume (quant every x (and (person x) @P)))
            (source (greet (prim john) x))
            (ellipsis P (parallel john bill))
            (frame @source)
            (expect (q every y (and (person y) (greet bill y)) (greet john y)))
        "#;
        let f = parse_problem(text, "greet").unwrap();
        assert_eq!(f.problem.assumptions.len(), 1);
        assert_eq!(
            crate::syntax::render(&f.expectations[0].readings[0].term),
            "every(x1, and(person(x1), greet(bill, x1)), greet(john, x1))"
        );
    }
}
