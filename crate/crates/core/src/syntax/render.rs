//! Canonical text for terms and types.
//!
//! Bound variables are named by binding depth (`x1` outermost), so α-variants
//! render to the same string. A discharged quantifier `det(λx.⟨r, s⟩)` is
//! written `det(x1, r, s)`.

use std::fmt::Write;

use crate::term::Term;
use crate::types::Type;

pub fn render(t: &Term) -> String {
    let mut out = String::new();
    readable(t, 0, &mut out);
    out
}

pub fn bound_name(level: usize) -> String {
    format!("x{level}")
}

/// `det(λx.⟨r, s⟩)` with `det` a constant of pair-quantifier type.
pub(crate) fn as_quantified(t: &Term) -> Option<(&Term, &Term, &Term)> {
    let Term::App(f, a) = t else { return None };
    let Term::Const(_, ty) = f.as_ref() else { return None };
    if *ty != Type::pair_quantifier() {
        return None;
    }
    match a.as_ref() {
        Term::Abs(Type::Entity, body) => match body.as_ref() {
            Term::Pair(r, s) => Some((f, r, s)),
            _ => None,
        },
        _ => None,
    }
}

fn readable(t: &Term, depth: usize, out: &mut String) {
    match t {
        Term::Bound(i) => {
            let i = *i as usize;
            if i < depth {
                out.push_str(&bound_name(depth - i));
            } else {
                let _ = write!(out, "#{i}");
            }
        }
        Term::Free(v) => out.push_str(&v.name),
        Term::Const(n, _) => out.push_str(n),
        Term::Prim(x) => {
            out.push_str("prim(");
            readable(x, depth, out);
            out.push(')');
        }
        Term::Abs(ty, b) => {
            let _ = write!(out, "lam {}:{}. ", bound_name(depth + 1), ty);
            readable(b, depth + 1, out);
        }
        Term::Pair(a, b) => {
            out.push('<');
            readable(a, depth, out);
            out.push_str(", ");
            readable(b, depth, out);
            out.push('>');
        }
        Term::App(..) => {
            if let Some((det, r, s)) = as_quantified(t) {
                readable(det, depth, out);
                let _ = write!(out, "({}, ", bound_name(depth + 1));
                readable(r, depth + 1, out);
                out.push_str(", ");
                readable(s, depth + 1, out);
                out.push(')');
                return;
            }
            let mut args = Vec::new();
            let mut head = t;
            while let Term::App(f, a) = head {
                args.push(a.as_ref());
                head = f;
            }
            args.reverse();
            if matches!(head, Term::Abs(..) | Term::Pair(..)) {
                out.push('(');
                readable(head, depth, out);
                out.push(')');
            } else {
                readable(head, depth, out);
            }
            out.push('(');
            for (i, a) in args.into_iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                readable(a, depth, out);
            }
            out.push(')');
        }
    }
}

/// The term in the problem-file syntax.
pub fn to_sexpr(t: &Term) -> String {
    let mut out = String::new();
    sexpr(t, 0, &mut out);
    out
}

pub fn type_sexpr(ty: &Type) -> String {
    match ty {
        Type::Entity => "e".into(),
        Type::Truth => "t".into(),
        Type::Func(..) => {
            let (args, target) = ty.unarrow();
            let mut s = String::from("(->");
            for a in args {
                s.push(' ');
                s.push_str(&type_sexpr(a));
            }
            s.push(' ');
            s.push_str(&type_sexpr(target));
            s.push(')');
            s
        }
        Type::Pair(a, b) => format!("(* {} {})", type_sexpr(a), type_sexpr(b)),
    }
}

fn sexpr(t: &Term, depth: usize, out: &mut String) {
    match t {
        Term::Bound(i) => {
            let i = *i as usize;
            if i < depth {
                out.push_str(&bound_name(depth - i));
            } else {
                let _ = write!(out, "#{i}");
            }
        }
        Term::Free(v) => out.push_str(&v.name),
        Term::Const(n, _) => out.push_str(n),
        Term::Prim(x) => {
            out.push_str("(prim ");
            sexpr(x, depth, out);
            out.push(')');
        }
        Term::Abs(ty, b) => {
            let _ = write!(out, "(lam {} {} ", bound_name(depth + 1), type_sexpr(ty));
            sexpr(b, depth + 1, out);
            out.push(')');
        }
        Term::Pair(a, b) => {
            out.push_str("(pair ");
            sexpr(a, depth, out);
            out.push(' ');
            sexpr(b, depth, out);
            out.push(')');
        }
        Term::App(..) => {
            let mut args = Vec::new();
            let mut head = t;
            while let Term::App(f, a) = head {
                args.push(a.as_ref());
                head = f;
            }
            args.reverse();
            let plain = matches!(head, Term::Const(..) | Term::Free(..) | Term::Bound(..));
            out.push('(');
            if !plain {
                out.push_str("app ");
            }
            sexpr(head, depth, out);
            for a in args {
                out.push(' ');
                sexpr(a, depth, out);
            }
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Var;

    fn e() -> Type {
        Type::Entity
    }

    #[test]
    fn canonical_names_by_depth() {
        let like = Term::constant("like", Type::arrows([e(), e()], Type::Truth));
        let golf = Term::constant("golf", e());
        let x = Var::new("x", e());
        let y = Var::new("whatever", e());
        let a = Term::lam(&x, Term::apply(like.clone(), [Term::var(&x), golf.clone()]));
        let b = Term::lam(&y, Term::apply(like, [Term::var(&y), golf]));
        assert_eq!(render(&a), "lam x1:e. like(x1, golf)");
        assert_eq!(render(&a), render(&b));
    }

    #[test]
    fn quantifier_abbreviation() {
        let every = Term::constant("every", Type::pair_quantifier());
        let person = Term::constant("person", Type::predicate());
        let greet = Term::constant("greet", Type::arrows([e(), e()], Type::Truth));
        let j = Term::constant("j", e());
        let x = Var::new("x", e());
        let body = Term::pair(
            Term::app(person, Term::var(&x)),
            Term::apply(greet, [j, Term::var(&x)]),
        );
        let t = Term::app(every, Term::lam(&x, body));
        assert_eq!(render(&t), "every(x1, person(x1), greet(j, x1))");
        assert_eq!(
            to_sexpr(&t),
            "(every (lam x1 e (pair (person x1) (greet j x1))))"
        );
    }

    #[test]
    fn types_in_sexpr_form() {
        assert_eq!(type_sexpr(&Type::pair_quantifier()), "(-> (-> e (* t t)) t)");
    }
}
