use super::{Env, Term, TermError, FST, SND};
use crate::types::Type;

/// Type of `t` in a context of bound-variable types (innermost last).
/// Constants are trusted to carry their declared types.
pub fn type_in_context(t: &Term, ctx: &[Type]) -> Result<Type, TermError> {
    let mut ctx = ctx.to_vec();
    infer(t, &mut ctx)
}

/// Type of `t`, checking every constant against `env`.
pub fn typecheck(t: &Term, env: &Env) -> Result<Type, TermError> {
    check_constants(t, env)?;
    type_in_context(t, &[])
}

fn check_constants(t: &Term, env: &Env) -> Result<(), TermError> {
    match t {
        Term::Const(name, ty) if &**name == FST || &**name == SND => {
            projection_type(name, ty).map(|_| ())
        }
        Term::Const(name, ty) => match env.lookup(name) {
            None => Err(TermError::UnknownConstant(name.clone())),
            Some(declared) if declared != ty => Err(TermError::ConstantType {
                name: name.clone(),
                declared: declared.clone(),
                used: ty.clone(),
            }),
            Some(_) => Ok(()),
        },
        Term::Abs(_, b) | Term::Prim(b) => check_constants(b, env),
        Term::App(a, b) | Term::Pair(a, b) => {
            check_constants(a, env)?;
            check_constants(b, env)
        }
        _ => Ok(()),
    }
}

fn projection_type(name: &super::Name, ty: &Type) -> Result<(), TermError> {
    let bad = || TermError::NotAPair {
        name: name.clone(),
        found: ty.clone(),
    };
    let (dom, cod) = ty.as_func().ok_or_else(bad)?;
    let (a, b) = dom.as_pair().ok_or_else(bad)?;
    let want = if &**name == FST { a } else { b };
    if want != cod {
        return Err(TermError::TypeMismatch {
            expected: want.clone(),
            found: cod.clone(),
            context: format!("result of `{name}`"),
        });
    }
    Ok(())
}

fn infer(t: &Term, ctx: &mut Vec<Type>) -> Result<Type, TermError> {
    match t {
        Term::Bound(i) => {
            let i = *i as usize;
            if i >= ctx.len() {
                return Err(TermError::UnboundIndex(i as u32));
            }
            Ok(ctx[ctx.len() - 1 - i].clone())
        }
        Term::Free(v) => Ok(v.ty.clone()),
        Term::Const(name, ty) => {
            if &**name == FST || &**name == SND {
                projection_type(name, ty)?;
            }
            Ok(ty.clone())
        }
        Term::Abs(ty, body) => {
            ctx.push(ty.clone());
            let b = infer(body, ctx);
            ctx.pop();
            Ok(Type::func(ty.clone(), b?))
        }
        Term::App(f, a) => {
            let ft = infer(f, ctx)?;
            let at = infer(a, ctx)?;
            match ft {
                Type::Func(dom, cod) => {
                    if *dom != at {
                        return Err(TermError::TypeMismatch {
                            expected: *dom,
                            found: at,
                            context: "application argument".into(),
                        });
                    }
                    Ok(*cod)
                }
                other => Err(TermError::NotAFunction(other)),
            }
        }
        Term::Pair(a, b) => Ok(Type::pair(infer(a, ctx)?, infer(b, ctx)?)),
        Term::Prim(x) => infer(x, ctx),
    }
}
