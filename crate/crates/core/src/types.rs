//! Simple types: entities, truth values, functions and pairs.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Type {
    Entity,
    Truth,
    Func(Box<Type>, Box<Type>),
    Pair(Box<Type>, Box<Type>),
}

impl Type {
    pub fn func(domain: Type, codomain: Type) -> Type {
        Type::Func(Box::new(domain), Box::new(codomain))
    }

    pub fn pair(first: Type, second: Type) -> Type {
        Type::Pair(Box::new(first), Box::new(second))
    }

    /// `a1 -> a2 -> ... -> target`
    pub fn arrows<I>(args: I, target: Type) -> Type
    where
        I: IntoIterator<Item = Type>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter()
            .rev()
            .fold(target, |acc, arg| Type::func(arg, acc))
    }

    /// `e -> t`
    pub fn predicate() -> Type {
        Type::func(Type::Entity, Type::Truth)
    }

    /// Generalized-quantifier type `(e -> t) -> t`.
    pub fn generalized_quantifier() -> Type {
        Type::func(Type::predicate(), Type::Truth)
    }

    /// Pair-quantifier (determiner) type `(e -> t * t) -> t`.
    pub fn pair_quantifier() -> Type {
        Type::func(
            Type::func(Type::Entity, Type::pair(Type::Truth, Type::Truth)),
            Type::Truth,
        )
    }

    /// Barwise-Cooper determiner type `(e -> t) -> (e -> t) -> t`.
    pub fn gq_determiner() -> Type {
        Type::func(Type::predicate(), Type::generalized_quantifier())
    }

    pub fn is_func(&self) -> bool {
        matches!(self, Type::Func(..))
    }

    pub fn as_func(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Func(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Splits `a1 -> ... -> an -> b` (b not a function) into `([a1..an], b)`.
    pub fn unarrow(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Func(a, b) = cur {
            args.push(a.as_ref());
            cur = b;
        }
        (args, cur)
    }

    pub fn arity(&self) -> usize {
        self.unarrow().0.len()
    }

    /// Base types have order 0; `A -> B` has order `max(order(A) + 1, order(B))`.
    /// Pairs take the maximum of their components.
    pub fn order(&self) -> usize {
        match self {
            Type::Entity | Type::Truth => 0,
            Type::Func(a, b) => (a.order() + 1).max(b.order()),
            Type::Pair(a, b) => a.order().max(b.order()),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Entity => f.write_str("e"),
            Type::Truth => f.write_str("t"),
            Type::Func(a, b) => {
                if a.is_func() {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
            Type::Pair(a, b) => {
                let wrap = |t: &Type| matches!(t, Type::Func(..) | Type::Pair(..));
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str(" * ")?;
                if wrap(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}
