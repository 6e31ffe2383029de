//! Occurrence paths.
//!
//! A path is a list of steps from the root. At an application spine `h a1 .. an`
//! step 0 selects the head and step `i` the `i`-th argument; the body of an
//! abstraction is step 0 and the components of a pair are steps 1 and 2.
//! Primary markers are skipped over and do not consume steps.

use super::Term;

pub type Path = Vec<usize>;

/// An application spine with primary markers peeled off.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spine<'a> {
    /// Never an application or a marker.
    pub head: &'a Term,
    pub args: Vec<&'a Term>,
    /// For each marker found, how many arguments the marked prefix carries.
    pub prims: Vec<usize>,
}

pub fn spine(t: &Term) -> Spine<'_> {
    let mut args = Vec::new();
    let mut marks = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Prim(inner) => {
                marks.push(args.len());
                cur = inner;
            }
            Term::App(f, a) => {
                args.push(a.as_ref());
                cur = f;
            }
            _ => break,
        }
    }
    args.reverse();
    let n = args.len();
    let prims = marks.into_iter().map(|seen| n - seen).collect();
    Spine {
        head: cur,
        args,
        prims,
    }
}

impl Spine<'_> {
    /// Whether some marker wraps the whole spine (or the head, for `k == 0`).
    pub fn marked_with(&self, k: usize) -> bool {
        self.prims.contains(&k)
    }
}

/// The subterm at `path`, without its outer markers.
pub fn subterm_at<'a>(t: &'a Term, path: &[usize]) -> Option<&'a Term> {
    let mut cur = t;
    for &step in path {
        cur = child(cur, step)?;
    }
    Some(cur.peel_prims().0)
}

/// One step down. Returns the child as written, markers included.
pub fn child(t: &Term, step: usize) -> Option<&Term> {
    let sp = spine(t);
    if sp.args.is_empty() {
        return match (sp.head, step) {
            (Term::Abs(_, b), 0) => Some(b),
            (Term::Pair(a, _), 1) => Some(a),
            (Term::Pair(_, b), 2) => Some(b),
            _ => None,
        };
    }
    if step == 0 {
        return Some(head_with_marks(t, sp.args.len()));
    }
    sp.args.get(step - 1).copied()
}

/// The head of a spine with `n` arguments, keeping markers that wrap it alone.
fn head_with_marks(t: &Term, n: usize) -> &Term {
    let mut cur = t;
    let mut seen = 0;
    loop {
        match cur {
            Term::Prim(inner) if seen < n => cur = inner,
            Term::App(f, _) => {
                seen += 1;
                cur = f;
            }
            _ => return cur,
        }
    }
}

/// Every addressable position with the subterm found there (markers peeled),
/// in preorder.
pub fn positions(t: &Term) -> Vec<(Path, &Term)> {
    fn go<'a>(t: &'a Term, path: &mut Path, out: &mut Vec<(Path, &'a Term)>) {
        out.push((path.clone(), t.peel_prims().0));
        let sp = spine(t);
        let n = sp.args.len();
        let mut kids: Vec<(usize, &Term)> = Vec::new();
        if n == 0 {
            match sp.head {
                Term::Abs(_, b) => kids.push((0, b)),
                Term::Pair(a, b) => {
                    kids.push((1, a));
                    kids.push((2, b));
                }
                _ => {}
            }
        } else {
            kids.push((0, head_with_marks(t, n)));
            kids.extend(sp.args.iter().enumerate().map(|(i, a)| (i + 1, *a)));
        }
        for (step, k) in kids {
            path.push(step);
            go(k, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Paths at which `needle` occurs, ignoring markers.
pub fn find_paths(t: &Term, needle: &Term) -> Vec<Path> {
    let needle = needle.strip();
    positions(t)
        .into_iter()
        .filter(|(_, s)| s.strip() == needle)
        .map(|(p, _)| p)
        .collect()
}

/// Paths of all marked occurrences, outermost first (preorder).
pub fn collect_primaries(t: &Term) -> Vec<Path> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(t, &mut path, &mut out);
    out
}

fn walk(t: &Term, path: &mut Path, out: &mut Vec<Path>) {
    let sp = spine(t);
    let n = sp.args.len();
    if !sp.prims.is_empty() && (sp.prims.iter().any(|&k| k != 0) || n == 0) {
        out.push(path.clone());
    }
    if n == 0 {
        match sp.head {
            Term::Abs(_, b) => descend(b, 0, path, out),
            Term::Pair(a, b) => {
                descend(a, 1, path, out);
                descend(b, 2, path, out);
            }
            _ => {}
        }
        return;
    }
    descend(head_with_marks(t, n), 0, path, out);
    for (i, a) in sp.args.iter().enumerate() {
        descend(a, i + 1, path, out);
    }
}

fn descend(t: &Term, step: usize, path: &mut Path, out: &mut Vec<Path>) {
    path.push(step);
    walk(t, path, out);
    path.pop();
}
