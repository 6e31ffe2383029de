//! Aligning a binding `λx1..xn. b` with the right-hand side `s` it was
//! solved against. Positions where `b` has the same rigid structure as `s`
//! are kept occurrences; positions where `b` has some `xi` are abstracted.

use crate::term::{eta_long, long_in, normalize, spine, type_in_context, Path, Term};
use crate::types::Type;

/// Copies the markers of `rhs` onto the occurrences the binding keeps.
pub fn remark(binding: &Term, n: usize, rhs: &Term) -> Term {
    align(binding, n, rhs, false).0
}

/// Like [`remark`], and additionally marks every abstraction variable that
/// stands where `rhs` has a marked occurrence.
pub fn mark_abstractions(binding: &Term, n: usize, rhs: &Term) -> Term {
    align(binding, n, rhs, true).0
}

/// Paths into `rhs` whose occurrences the binding abstracts over.
pub fn abstraction_sites(binding: &Term, n: usize, rhs: &Term) -> Vec<Path> {
    align(binding, n, rhs, false).1
}

fn align(binding: &Term, n: usize, rhs: &Term, mark_vars: bool) -> (Term, Vec<Path>) {
    let long = eta_long(&binding.strip());
    let mut tys: Vec<Type> = Vec::new();
    let mut body = &long;
    for _ in 0..n {
        match body {
            Term::Abs(ty, b) => {
                tys.push(ty.clone());
                body = b;
            }
            _ => return (normalize(binding), Vec::new()),
        }
    }
    let rty = match type_in_context(rhs, &[]) {
        Ok(ty) => ty,
        Err(_) => return (normalize(binding), Vec::new()),
    };
    let r = long_in(&crate::term::normalize_beta(rhs), &rty, &mut Vec::new());
    let mut a = Aligner {
        mark_vars,
        sites: Vec::new(),
    };
    let out = a.go(body, &r, 0, &mut Vec::new());
    let t = tys
        .into_iter()
        .rev()
        .fold(out, |acc, ty| Term::Abs(ty, Box::new(acc)));
    (normalize(&t), a.sites)
}

struct Aligner {
    mark_vars: bool,
    sites: Vec<Path>,
}

fn wrap(mut t: Term, count: usize) -> Term {
    for _ in 0..count {
        t = Term::prim(t);
    }
    t
}

impl Aligner {
    /// `b` lives under `d` binders of its own plus the abstraction prefix;
    /// `r` under the same `d` binders.
    fn go(&mut self, b: &Term, r: &Term, d: u32, path: &mut Path) -> Term {
        let bs = spine(b);
        let rs = spine(r);
        let marks = |k: usize| rs.prims.iter().filter(|&&p| p == k).count();
        let is_var = matches!(bs.head, Term::Bound(i) if *i >= d);
        let (kb, kr) = (bs.args.len(), rs.args.len());

        if is_var {
            if kb > kr {
                return b.clone();
            }
            let skip = kr - kb;
            if kr == 0 {
                self.sites.push(path.clone());
            } else {
                for j in 0..=skip {
                    let mut p = path.clone();
                    p.push(j);
                    self.sites.push(p);
                }
            }
            let head_marks = if self.mark_vars && skip == 0 { marks(0) } else { 0 };
            let mut cur = wrap(bs.head.clone(), head_marks);
            for (j, arg) in bs.args.iter().enumerate() {
                path.push(skip + j + 1);
                let a = self.go(arg, rs.args[skip + j], d, path);
                path.pop();
                cur = Term::app(cur, a);
            }
            return cur;
        }

        if kb != kr {
            return b.clone();
        }
        if kb == 0 {
            let out = match (bs.head, rs.head) {
                (Term::Abs(ty, bb), Term::Abs(_, rb)) => {
                    path.push(0);
                    let inner = self.go(bb, rb, d + 1, path);
                    path.pop();
                    Term::Abs(ty.clone(), Box::new(inner))
                }
                (Term::Pair(b1, b2), Term::Pair(r1, r2)) => {
                    path.push(1);
                    let x = self.go(b1, r1, d, path);
                    path.pop();
                    path.push(2);
                    let y = self.go(b2, r2, d, path);
                    path.pop();
                    Term::pair(x, y)
                }
                (bh, rh) if bh == rh => bh.clone(),
                _ => return b.clone(),
            };
            return wrap(out, marks(0));
        }
        if bs.head != rs.head {
            return b.clone();
        }
        let mut cur = wrap(bs.head.clone(), marks(0));
        for (j, arg) in bs.args.iter().enumerate() {
            path.push(j + 1);
            let a = self.go(arg, rs.args[j], d, path);
            path.pop();
            cur = wrap(Term::app(cur, a), marks(j + 1));
        }
        cur
    }
}
