use super::{instantiate, shift, spine, type_in_context, Term, FST, SND};
use crate::types::Type;

/// β-normal, η-short form, with `fst`/`snd` reduction and surjective pairing
/// (`⟨fst M, snd M⟩ → M`). Primary markers stay on residual subterms.
pub fn normalize(t: &Term) -> Term {
    nf(t, true)
}

/// Like [`normalize`] but without η-contraction or surjective pairing.
pub fn normalize_beta(t: &Term) -> Term {
    nf(t, false)
}

fn nf(t: &Term, eta: bool) -> Term {
    match t {
        Term::Bound(_) | Term::Free(_) | Term::Const(..) => t.clone(),
        Term::Prim(x) => Term::prim(nf(x, eta)),
        Term::Abs(ty, b) => {
            let body = nf(b, eta);
            if eta {
                if let Some(f) = eta_contract(&body) {
                    return f;
                }
            }
            Term::Abs(ty.clone(), Box::new(body))
        }
        Term::App(f, a) => {
            let f = nf(f, eta);
            let a = nf(a, eta);
            reduce_app(f, a, eta)
        }
        Term::Pair(a, b) => {
            let a = nf(a, eta);
            let b = nf(b, eta);
            if eta {
                if let Some(m) = surjective(&a, &b) {
                    return m;
                }
            }
            Term::pair(a, b)
        }
    }
}

/// β-normal, η-long form of a closed term. Function-typed subterms become
/// abstractions and every spine carries all its arguments; pairs are left as is.
pub fn eta_long(t: &Term) -> Term {
    let ty = type_in_context(t, &[]).expect("eta_long needs a well-typed term");
    long_in(&normalize_beta(t), &ty, &mut Vec::new())
}

/// η-long form of β-normal `t` of type `ty` in bound context `ctx` (innermost last).
pub fn long_in(t: &Term, ty: &Type, ctx: &mut Vec<Type>) -> Term {
    if let Type::Func(a, b) = ty {
        let (inner, wraps) = t.peel_prims();
        ctx.push((**a).clone());
        let body = if let Term::Abs(_, body) = inner {
            long_in(body, b, ctx)
        } else {
            let var = long_in(&Term::Bound(0), a, ctx);
            long_in(&Term::app(shift(t, 1, 0), var), b, ctx)
        };
        ctx.pop();
        let mut out = Term::Abs((**a).clone(), Box::new(body));
        if matches!(inner, Term::Abs(..)) {
            for _ in 0..wraps {
                out = Term::prim(out);
            }
        }
        return out;
    }
    let sp = spine(t);
    let wrap = |mut t: Term, k: usize| {
        for _ in sp.prims.iter().filter(|&&p| p == k) {
            t = Term::prim(t);
        }
        t
    };
    if let Term::Pair(a, b) = sp.head {
        let (ta, tb) = ty.as_pair().expect("pair at non-pair type");
        return wrap(Term::pair(long_in(a, ta, ctx), long_in(b, tb, ctx)), 0);
    }
    let head_ty = match sp.head {
        Term::Bound(i) => ctx[ctx.len() - 1 - *i as usize].clone(),
        Term::Free(v) => v.ty.clone(),
        Term::Const(_, ty) => ty.clone(),
        other => panic!("eta-long form of non-normal term {other:?}"),
    };
    let mut cur = wrap(sp.head.clone(), 0);
    let mut fty = &head_ty;
    for (j, arg) in sp.args.iter().enumerate() {
        let (dom, cod) = fty.as_func().expect("too many arguments");
        cur = wrap(Term::app(cur, long_in(arg, dom, ctx)), j + 1);
        fty = cod;
    }
    cur
}

/// Applies normal `f` to normal `a`, contracting any redex at the head.
fn reduce_app(f: Term, a: Term, eta: bool) -> Term {
    let (head, _) = f.peel_prims();
    match head {
        Term::Abs(_, body) => nf(&instantiate(body, &a), eta),
        Term::Const(name, _) if &**name == FST || &**name == SND => {
            if let (Term::Pair(x, y), _) = a.peel_prims() {
                if &**name == FST {
                    return (**x).clone();
                }
                return (**y).clone();
            }
            Term::app(f, a)
        }
        _ => Term::app(f, a),
    }
}

/// `λ. f 0` with index 0 not free in `f` contracts to `f` shifted down.
fn eta_contract(body: &Term) -> Option<Term> {
    let (inner, wraps) = body.peel_prims();
    if let Term::App(f, arg) = inner {
        if matches!(arg.peel_prims().0, Term::Bound(0)) && !f.is_bound_free(0) {
            let mut out = shift(f, -1, 0);
            for _ in 0..wraps {
                out = Term::prim(out);
            }
            return Some(out);
        }
    }
    None
}

fn surjective(a: &Term, b: &Term) -> Option<Term> {
    let proj = |t: &Term, which: &str| -> Option<Term> {
        if let Term::App(f, m) = t.peel_prims().0 {
            if let Term::Const(name, _) = f.peel_prims().0 {
                if &**name == which {
                    return Some((**m).clone());
                }
            }
        }
        None
    };
    let m = proj(a, FST)?;
    let n = proj(b, SND)?;
    (m.strip() == n.strip()).then_some(m)
}
