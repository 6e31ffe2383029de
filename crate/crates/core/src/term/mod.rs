//! Typed lambda terms.
//!
//! Bound variables are de Bruijn indices, so alpha-equivalent terms are
//! structurally equal once primary markers are stripped. Free variables
//! (unknowns, assumption variables) and constants carry their types.

mod normalize;
mod path;
mod typecheck;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::types::Type;

pub use normalize::{eta_long, long_in, normalize, normalize_beta};
pub use path::{child, collect_primaries, find_paths, positions, spine, subterm_at, Path, Spine};
pub use typecheck::{type_in_context, typecheck};

pub type Name = Arc<str>;

pub const FST: &str = "fst";
pub const SND: &str = "snd";
pub const PLEONASTIC: &str = "Δ";
pub const AND: &str = "and";

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch {
        expected: Type,
        found: Type,
        context: String,
    },
    #[error("unknown constant `{0}`")]
    UnknownConstant(Name),
    #[error("constant `{name}` declared as {declared}, used at {used}")]
    ConstantType { name: Name, declared: Type, used: Type },
    #[error("`{0}` is already declared")]
    DuplicateDeclaration(Name),
    #[error("loose bound variable #{0}")]
    UnboundIndex(u32),
    #[error("cannot apply non-function of type {0}")]
    NotAFunction(Type),
    #[error("`{name}` applied to non-pair of type {found}")]
    NotAPair { name: Name, found: Type },
}

/// A named, typed free variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var {
    pub name: Name,
    pub ty: Type,
}

impl Var {
    pub fn new(name: impl Into<Name>, ty: Type) -> Var {
        Var {
            name: name.into(),
            ty,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    /// de Bruijn index; 0 is the innermost binder.
    Bound(u32),
    Free(Var),
    Const(Name, Type),
    /// Abstraction over a variable of the given type.
    Abs(Type, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    /// Primary-occurrence marker. Transparent to typing, reduction and
    /// alpha-equivalence; preserved by substitution.
    Prim(Box<Term>),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Free(v.clone())
    }

    pub fn constant(name: impl Into<Name>, ty: Type) -> Term {
        Term::Const(name.into(), ty)
    }

    /// `λv. body`, binding the free variable `v`.
    pub fn lam(v: &Var, body: Term) -> Term {
        Term::Abs(v.ty.clone(), Box::new(abstract_var(&body, v)))
    }

    pub fn lams(vars: &[Var], body: Term) -> Term {
        vars.iter().rev().fold(body, |acc, v| Term::lam(v, acc))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apply<I: IntoIterator<Item = Term>>(f: Term, args: I) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn prim(t: Term) -> Term {
        Term::Prim(Box::new(t))
    }

    /// The built-in first projection at pair type `pair_ty`.
    pub fn fst(pair_ty: &Type) -> Term {
        let (a, _) = pair_ty.as_pair().expect("fst needs a pair type");
        Term::Const(FST.into(), Type::func(pair_ty.clone(), a.clone()))
    }

    pub fn snd(pair_ty: &Type) -> Term {
        let (_, b) = pair_ty.as_pair().expect("snd needs a pair type");
        Term::Const(SND.into(), Type::func(pair_ty.clone(), b.clone()))
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::apply(Term::constant(AND, and_type()), [a, b])
    }

    /// Removes every primary marker.
    pub fn strip(&self) -> Term {
        match self {
            Term::Prim(t) => t.strip(),
            Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(b.strip())),
            Term::App(f, a) => Term::app(f.strip(), a.strip()),
            Term::Pair(a, b) => Term::pair(a.strip(), b.strip()),
            leaf => leaf.clone(),
        }
    }

    pub fn contains_prim(&self) -> bool {
        match self {
            Term::Prim(_) => true,
            Term::Abs(_, b) => b.contains_prim(),
            Term::App(a, b) | Term::Pair(a, b) => a.contains_prim() || b.contains_prim(),
            _ => false,
        }
    }

    /// Peels outer primary markers, returning the inner term and how many were removed.
    pub fn peel_prims(&self) -> (&Term, usize) {
        let mut cur = self;
        let mut n = 0;
        while let Term::Prim(inner) = cur {
            cur = inner;
            n += 1;
        }
        (cur, n)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Prim(t) => t.size(),
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(a, b) | Term::Pair(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// True when no de Bruijn index escapes the term.
    pub fn is_locally_closed(&self) -> bool {
        fn go(t: &Term, depth: u32) -> bool {
            match t {
                Term::Bound(i) => *i < depth,
                Term::Abs(_, b) => go(b, depth + 1),
                Term::App(a, b) | Term::Pair(a, b) => go(a, depth) && go(b, depth),
                Term::Prim(x) => go(x, depth),
                _ => true,
            }
        }
        go(self, 0)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Free(v) => {
                out.insert(v.clone());
            }
            Term::Abs(_, b) | Term::Prim(b) => b.collect_free(out),
            Term::App(a, b) | Term::Pair(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            _ => {}
        }
    }

    pub fn has_free(&self, v: &Var) -> bool {
        match self {
            Term::Free(w) => w == v,
            Term::Abs(_, b) | Term::Prim(b) => b.has_free(v),
            Term::App(a, b) | Term::Pair(a, b) => a.has_free(v) || b.has_free(v),
            _ => false,
        }
    }

    /// True when a free variable with this name (of any type) occurs.
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Free(w) => &*w.name == name,
            Term::Abs(_, b) | Term::Prim(b) => b.mentions(name),
            Term::App(a, b) | Term::Pair(a, b) => a.mentions(name) || b.mentions(name),
            _ => false,
        }
    }

    pub fn is_bound_free(&self, index: u32) -> bool {
        match self {
            Term::Bound(i) => *i == index,
            Term::Abs(_, b) => b.is_bound_free(index + 1),
            Term::Prim(b) => b.is_bound_free(index),
            Term::App(a, b) | Term::Pair(a, b) => a.is_bound_free(index) || b.is_bound_free(index),
            _ => false,
        }
    }
}

pub fn and_type() -> Type {
    Type::arrows([Type::Truth, Type::Truth], Type::Truth)
}

/// Adds `delta` to every loose index at or above `cutoff`.
pub fn shift(t: &Term, delta: i64, cutoff: u32) -> Term {
    if delta == 0 {
        return t.clone();
    }
    match t {
        Term::Bound(i) if *i >= cutoff => {
            let n = i64::from(*i) + delta;
            Term::Bound(u32::try_from(n).expect("negative de Bruijn index"))
        }
        Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(shift(b, delta, cutoff + 1))),
        Term::App(a, b) => Term::app(shift(a, delta, cutoff), shift(b, delta, cutoff)),
        Term::Pair(a, b) => Term::pair(shift(a, delta, cutoff), shift(b, delta, cutoff)),
        Term::Prim(x) => Term::prim(shift(x, delta, cutoff)),
        leaf => leaf.clone(),
    }
}

/// Replaces index 0 of an abstraction body by `arg` (which lives outside the binder).
pub fn instantiate(body: &Term, arg: &Term) -> Term {
    fn go(t: &Term, depth: u32, arg: &Term) -> Term {
        match t {
            Term::Bound(i) if *i == depth => shift(arg, i64::from(depth), 0),
            Term::Bound(i) if *i > depth => Term::Bound(i - 1),
            Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(go(b, depth + 1, arg))),
            Term::App(a, b) => Term::app(go(a, depth, arg), go(b, depth, arg)),
            Term::Pair(a, b) => Term::pair(go(a, depth, arg), go(b, depth, arg)),
            Term::Prim(x) => Term::prim(go(x, depth, arg)),
            leaf => leaf.clone(),
        }
    }
    go(body, 0, arg)
}

/// Turns free occurrences of `v` into index 0, producing the body of `λv. t`.
pub fn abstract_var(t: &Term, v: &Var) -> Term {
    fn go(t: &Term, depth: u32, v: &Var) -> Term {
        match t {
            Term::Free(w) if w == v => Term::Bound(depth),
            Term::Bound(i) if *i >= depth => Term::Bound(i + 1),
            Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(go(b, depth + 1, v))),
            Term::App(a, b) => Term::app(go(a, depth, v), go(b, depth, v)),
            Term::Pair(a, b) => Term::pair(go(a, depth, v), go(b, depth, v)),
            Term::Prim(x) => Term::prim(go(x, depth, v)),
            leaf => leaf.clone(),
        }
    }
    go(t, 0, v)
}

/// Simultaneous replacement of free variables. Replacements are shifted
/// under binders, so capture cannot occur.
pub fn replace_free(t: &Term, map: &BTreeMap<Var, Term>) -> Term {
    fn go(t: &Term, depth: u32, map: &BTreeMap<Var, Term>) -> Term {
        match t {
            Term::Free(v) => match map.get(v) {
                Some(n) => shift(n, i64::from(depth), 0),
                None => t.clone(),
            },
            Term::Abs(ty, b) => Term::Abs(ty.clone(), Box::new(go(b, depth + 1, map))),
            Term::App(a, b) => Term::app(go(a, depth, map), go(b, depth, map)),
            Term::Pair(a, b) => Term::pair(go(a, depth, map), go(b, depth, map)),
            Term::Prim(x) => Term::prim(go(x, depth, map)),
            leaf => leaf.clone(),
        }
    }
    if map.is_empty() {
        return t.clone();
    }
    go(t, 0, map)
}

/// `t[x ↦ n]`, capture-avoiding. Primary markers inside `t` and `n` survive.
pub fn substitute(t: &Term, x: &Var, n: &Term) -> Result<Term, TermError> {
    let found = type_in_context(n, &[])?;
    if found != x.ty {
        return Err(TermError::TypeMismatch {
            expected: x.ty.clone(),
            found,
            context: format!("substitution for {x}"),
        });
    }
    let mut map = BTreeMap::new();
    map.insert(x.clone(), n.clone());
    Ok(replace_free(t, &map))
}

/// Prim-transparent alpha-equivalence.
pub fn alpha_equal(a: &Term, b: &Term) -> bool {
    a.strip() == b.strip()
}

/// Constant declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Env {
    consts: BTreeMap<Name, Type>,
}

impl Default for Env {
    fn default() -> Self {
        Env::new()
    }
}

impl Env {
    /// An environment holding the pleonastic constant `Δ : e` and the
    /// conjunction `and : t -> t -> t`.
    pub fn new() -> Env {
        let mut consts = BTreeMap::new();
        consts.insert(Name::from(PLEONASTIC), Type::Entity);
        consts.insert(Name::from(AND), and_type());
        Env { consts }
    }

    pub fn declare(&mut self, name: impl Into<Name>, ty: Type) -> Result<(), TermError> {
        let name = name.into();
        if self.consts.contains_key(&name) || is_builtin(&name) {
            return Err(TermError::DuplicateDeclaration(name));
        }
        self.consts.insert(name, ty);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.consts.get(name)
    }

    /// A constant term for a declared name.
    pub fn constant(&self, name: &str) -> Option<Term> {
        self.consts
            .get_key_value(name)
            .map(|(n, ty)| Term::Const(n.clone(), ty.clone()))
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.consts.keys()
    }
}

pub fn is_builtin(name: &str) -> bool {
    name == FST || name == SND
}

pub fn pleonastic() -> Term {
    Term::constant(PLEONASTIC, Type::Entity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e() -> Type {
        Type::Entity
    }

    fn like() -> Term {
        Term::constant("like", Type::arrows([e(), e()], Type::Truth))
    }

    fn c(name: &str) -> Term {
        Term::constant(name, e())
    }

    #[test]
    fn substitution_fills_argument() {
        let x = Var::new("x", e());
        let t = Term::apply(like(), [Term::var(&x), c("golf")]);
        let out = substitute(&t, &x, &c("dan")).unwrap();
        assert_eq!(out, Term::apply(like(), [c("dan"), c("golf")]));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λy. x)[x ↦ y] is λy'. y, not λy. y
        let x = Var::new("x", e());
        let y = Var::new("y", e());
        let t = Term::lam(&y, Term::var(&x));
        let out = substitute(&t, &x, &Term::var(&y)).unwrap();
        assert_eq!(out, Term::Abs(e(), Box::new(Term::var(&y))));
        assert_ne!(out, Term::lam(&y, Term::var(&y)));
    }

    #[test]
    fn substitution_keeps_markers() {
        let realize = Term::constant("realize", Type::arrows([e(), Type::Truth], Type::Truth));
        let fool = Term::constant("fool", Type::predicate());
        let x = Var::new("x", e());
        let t = Term::apply(
            realize.clone(),
            [Term::prim(Term::var(&x)), Term::app(fool.clone(), Term::var(&x))],
        );
        let out = substitute(&t, &x, &c("bill")).unwrap();
        let expected = Term::apply(
            realize,
            [Term::prim(c("bill")), Term::app(fool, c("bill"))],
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn substitution_rejects_wrong_type() {
        let x = Var::new("x", e());
        let err = substitute(&Term::var(&x), &x, &Term::constant("rain", Type::Truth)).unwrap_err();
        assert!(matches!(err, TermError::TypeMismatch { .. }));
    }

    #[test]
    fn alpha_equality() {
        let x = Var::new("x", e());
        let y = Var::new("y", e());
        let a = Term::lam(&x, Term::apply(like(), [Term::var(&x), c("golf")]));
        let b = Term::lam(&y, Term::apply(like(), [Term::var(&y), c("golf")]));
        assert!(alpha_equal(&a, &b));
        let vac = Term::lam(&x, Term::apply(like(), [c("dan"), c("golf")]));
        assert!(!alpha_equal(&vac, &a));
        let marked = Term::apply(like(), [Term::prim(c("dan")), c("golf")]);
        let plain = Term::apply(like(), [c("dan"), c("golf")]);
        assert!(alpha_equal(&marked, &plain));
        assert_ne!(marked, plain);
    }

    #[test]
    fn env_rejects_redeclaration() {
        let mut env = Env::new();
        env.declare("dan", e()).unwrap();
        assert!(env.declare("dan", e()).is_err());
        assert!(env.declare(FST, e()).is_err());
        assert_eq!(env.lookup(PLEONASTIC), Some(&Type::Entity));
    }
}
