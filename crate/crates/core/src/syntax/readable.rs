//! Parser for the canonical text produced by [`render`](super::render).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::term::{type_in_context, Env, Term, TermError, Var, FST, SND};
use crate::types::Type;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ReadableError {
    #[error("column {col}: {message}")]
    Syntax { col: usize, message: String },
    #[error("unknown name `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Type(#[from] TermError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Punct(&'static str),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ReadableError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let ident = |c: char| c.is_alphanumeric() || matches!(c, '_' | '@' | '\'' | '#' | '?');
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let col = i + 1;
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Punct("->"), col));
            i += 2;
            continue;
        }
        if let Some(p) = ["(", ")", ",", ".", ":", "<", ">", "*"].iter().find(|p| p.starts_with(c)) {
            out.push((Tok::Punct(p), col));
            i += 1;
            continue;
        }
        if ident(c) {
            let mut s = String::new();
            while i < chars.len() {
                let c = chars[i];
                let hyphen = c == '-' && chars.get(i + 1) != Some(&'>');
                if ident(c) || hyphen {
                    s.push(c);
                    i += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), col));
            continue;
        }
        return Err(ReadableError::Syntax {
            col,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    env: &'a Env,
    free: &'a BTreeMap<String, Type>,
    /// Bound names with their types, innermost last.
    scope: Vec<(String, Type)>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.at).map_or_else(|| self.toks.last().map_or(1, |(_, c)| c + 1), |(_, c)| *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ReadableError> {
        Err(ReadableError::Syntax {
            col: self.col(),
            message: message.into(),
        })
    }

    fn eat(&mut self, p: &'static str) -> bool {
        if self.peek() == Some(&Tok::Punct(p)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &'static str) -> Result<(), ReadableError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ReadableError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn ty(&mut self) -> Result<Type, ReadableError> {
        let dom = self.ty_pair()?;
        if self.eat("->") {
            Ok(Type::func(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn ty_pair(&mut self) -> Result<Type, ReadableError> {
        let a = self.ty_atom()?;
        if self.eat("*") {
            Ok(Type::pair(a, self.ty_atom()?))
        } else {
            Ok(a)
        }
    }

    fn ty_atom(&mut self) -> Result<Type, ReadableError> {
        if self.eat("(") {
            let t = self.ty()?;
            self.expect(")")?;
            return Ok(t);
        }
        match self.ident()?.as_str() {
            "e" => Ok(Type::Entity),
            "t" => Ok(Type::Truth),
            other => self.err(format!("unknown type `{other}`")),
        }
    }

    fn type_of(&self, t: &Term) -> Result<Type, ReadableError> {
        let ctx: Vec<Type> = self.scope.iter().map(|(_, ty)| ty.clone()).collect();
        Ok(type_in_context(t, &ctx)?)
    }

    fn expr(&mut self) -> Result<Term, ReadableError> {
        if self.peek() == Some(&Tok::Ident("lam".into())) {
            self.at += 1;
            let name = self.ident()?;
            self.expect(":")?;
            let ty = self.ty()?;
            self.expect(".")?;
            self.scope.push((name, ty.clone()));
            let body = self.expr();
            self.scope.pop();
            return Ok(Term::Abs(ty, Box::new(body?)));
        }
        let mut t = self.primary()?;
        while self.eat("(") {
            let args = self.args()?;
            t = Term::apply(t, args);
        }
        Ok(t)
    }

    fn args(&mut self) -> Result<Vec<Term>, ReadableError> {
        let mut args = vec![self.expr()?];
        while self.eat(",") {
            args.push(self.expr()?);
        }
        self.expect(")")?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Term, ReadableError> {
        if self.eat("(") {
            let t = self.expr()?;
            self.expect(")")?;
            return Ok(t);
        }
        if self.eat("<") {
            let a = self.expr()?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect(">")?;
            return Ok(Term::pair(a, b));
        }
        let name = self.ident()?;
        let call = self.peek() == Some(&Tok::Punct("("));
        if call && (name == "prim" || name == FST || name == SND) && !self.shadowed(&name) {
            self.expect("(")?;
            let x = self.expr()?;
            self.expect(")")?;
            if name == "prim" {
                return Ok(Term::prim(x));
            }
            let ty = self.type_of(&x)?;
            if ty.as_pair().is_none() {
                return Err(TermError::NotAPair { name: name.as_str().into(), found: ty }.into());
            }
            let proj = if name == FST { Term::fst(&ty) } else { Term::snd(&ty) };
            return Ok(Term::app(proj, x));
        }
        if call && !self.shadowed(&name) && self.env.lookup(&name) == Some(&Type::pair_quantifier()) {
            if let Some(t) = self.quantified(&name)? {
                return Ok(t);
            }
        }
        self.name(&name)
    }

    fn shadowed(&self, name: &str) -> bool {
        self.scope.iter().any(|(n, _)| n == name) || self.free.contains_key(name)
    }

    /// `det(x, restriction, scope)`; backtracks when it is an ordinary call.
    fn quantified(&mut self, det: &str) -> Result<Option<Term>, ReadableError> {
        let save = self.at;
        self.expect("(")?;
        let binder = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => {
                self.at = save;
                return Ok(None);
            }
        };
        self.at += 1;
        if !self.eat(",") {
            self.at = save;
            return Ok(None);
        }
        self.scope.push((binder, Type::Entity));
        let parts = (|| {
            let r = self.expr()?;
            self.expect(",")?;
            let s = self.expr()?;
            self.expect(")")?;
            Ok::<_, ReadableError>((r, s))
        })();
        self.scope.pop();
        let (r, s) = parts?;
        let det = self.env.constant(det).expect("looked up above");
        Ok(Some(Term::app(det, Term::Abs(Type::Entity, Box::new(Term::pair(r, s))))))
    }

    fn name(&self, name: &str) -> Result<Term, ReadableError> {
        if let Some(pos) = self.scope.iter().rposition(|(n, _)| n == name) {
            return Ok(Term::Bound((self.scope.len() - 1 - pos) as u32));
        }
        if let Some(ty) = self.free.get(name) {
            return Ok(Term::var(&Var::new(name, ty.clone())));
        }
        self.env
            .constant(name)
            .ok_or_else(|| ReadableError::Unknown(name.to_string()))
    }
}

/// Parses canonical text. Free variables must be listed in `free`.
pub fn parse_readable(text: &str, env: &Env, free: &BTreeMap<String, Type>) -> Result<Term, ReadableError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        env,
        free,
        scope: Vec::new(),
    };
    let t = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    type_in_context(&t, &[])?;
    Ok(t)
}

pub fn parse_type(text: &str) -> Result<Type, ReadableError> {
    let env = Env::new();
    let free = BTreeMap::new();
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        env: &env,
        free: &free,
        scope: Vec::new(),
    };
    let t = p.ty()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::render;

    fn env() -> Env {
        let e = Type::Entity;
        let mut env = Env::new();
        env.declare("like", Type::arrows([e.clone(), e.clone()], Type::Truth)).unwrap();
        env.declare("wife-of", Type::func(e.clone(), e.clone())).unwrap();
        env.declare("golf", e.clone()).unwrap();
        env.declare("dan", e.clone()).unwrap();
        env.declare("person", Type::predicate()).unwrap();
        env.declare("every", Type::pair_quantifier()).unwrap();
        env
    }

    #[test]
    fn fixpoint_on_samples() {
        let env = env();
        let free = BTreeMap::new();
        for text in [
            "like(dan, golf)",
            "lam x1:e. like(x1, wife-of(x1))",
            "every(x1, person(x1), like(x1, golf))",
            "and(like(dan, golf), every(x1, person(x1), prim(like(x1, dan))))",
            "lam x1:e -> t. lam x2:e. x1(x2)",
            "lam x1:e. fst(<person(x1), like(x1, golf)>)",
            "(lam x1:e. like(x1, golf))(dan)",
            "lam x1:(e -> t) -> t. x1(lam x2:e. like(x2, golf))",
        ] {
            let t = parse_readable(text, &env, &free).unwrap();
            assert_eq!(render(&t), text);
        }
    }

    #[test]
    fn names_are_alpha_insensitive() {
        let env = env();
        let free = BTreeMap::new();
        let a = parse_readable("lam y:e. like(y, golf)", &env, &free).unwrap();
        let b = parse_readable("lam z:e. like(z, golf)", &env, &free).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_ill_typed_and_unknown() {
        let env = env();
        let free = BTreeMap::new();
        assert!(parse_readable("like(dan)", &env, &free).is_ok());
        assert!(matches!(parse_readable("like(person, golf)", &env, &free), Err(ReadableError::Type(_))));
        assert!(matches!(parse_readable("likes(dan, golf)", &env, &free), Err(ReadableError::Unknown(_))));
        assert!(matches!(parse_readable("like(dan, golf", &env, &free), Err(ReadableError::Syntax { .. })));
    }

    #[test]
    fn types() {
        assert_eq!(parse_type("(e -> t) -> t").unwrap(), Type::generalized_quantifier());
        assert_eq!(parse_type("(e -> t * t) -> t").unwrap(), Type::pair_quantifier());
    }
}
