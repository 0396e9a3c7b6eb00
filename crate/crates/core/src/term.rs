//! Concrete terms of a validated inductive type and the generic fold over
//! them.
//!
//! Traversals that follow the recursive structure (`fold`, `check_wf`,
//! equality, hashing, cloning, dropping) run on explicit worklists so that
//! deep terms do not exhaust the thread stack.

use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::registry::Registry;
use crate::syntax::{ArgSpec, ConstrsType};
use crate::Nat;

const MIN_STACK_RED_ZONE: usize = 32 * 1024;
const STACK_GROWTH_SIZE: usize = 1024 * 1024;

#[derive(Debug)]
pub enum Arg {
    /// A base-type value, stored as its code under the base's encoder.
    Base {
        base: Arc<str>,
        code: Nat,
    },
    Rec(Term),
}

impl Arg {
    pub fn base(base: &str, code: impl Into<Nat>) -> Self {
        Arg::Base { base: Arc::from(base), code: code.into() }
    }
}

/// Constructor index plus arguments, positionally matching the
/// constructor's [`ArgSpec`] list.
#[derive(Debug)]
pub struct Term {
    pub ctor: usize,
    pub args: Vec<Arg>,
}

impl Term {
    pub fn new(ctor: usize, args: Vec<Arg>) -> Self {
        Term { ctor, args }
    }

    pub fn leaf(ctor: usize) -> Self {
        Term { ctor, args: Vec::new() }
    }

    pub fn rec_children(&self) -> impl DoubleEndedIterator<Item = &Term> {
        self.args.iter().filter_map(|a| match a {
            Arg::Rec(t) => Some(t),
            Arg::Base { .. } => None,
        })
    }

    pub fn base_codes(&self) -> Vec<&Nat> {
        self.args
            .iter()
            .filter_map(|a| match a {
                Arg::Base { code, .. } => Some(code),
                Arg::Rec(_) => None,
            })
            .collect()
    }

    /// Total number of constructor nodes.
    pub fn node_count(&self) -> usize {
        postorder(self, |_, kids: Vec<usize>| Ok::<_, TermError>(1 + kids.iter().sum::<usize>())).expect("infallible")
    }

    /// Sum of the bit lengths of every base code in the term.
    pub fn base_bits(&self) -> u64 {
        postorder(self, |t, kids: Vec<u64>| {
            Ok::<_, TermError>(t.base_codes().iter().map(|c| c.bits()).sum::<u64>() + kids.iter().sum::<u64>())
        })
        .expect("infallible")
    }
}

impl Drop for Term {
    fn drop(&mut self) {
        let mut stack: Vec<Term> = Vec::new();
        let drain = |args: &mut Vec<Arg>, stack: &mut Vec<Term>| {
            for a in args.drain(..) {
                if let Arg::Rec(t) = a {
                    stack.push(t);
                }
            }
        };
        drain(&mut self.args, &mut stack);
        while let Some(mut t) = stack.pop() {
            drain(&mut t.args, &mut stack);
        }
    }
}

impl Clone for Term {
    fn clone(&self) -> Self {
        postorder(self, |t, mut kids: Vec<Term>| {
            kids.reverse();
            let args = t
                .args
                .iter()
                .map(|a| match a {
                    Arg::Base { base, code } => Arg::Base { base: Arc::clone(base), code: code.clone() },
                    Arg::Rec(_) => Arg::Rec(kids.pop().expect("one result per child")),
                })
                .collect();
            Ok::<_, TermError>(Term { ctor: t.ctor, args })
        })
        .expect("infallible")
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            if a.ctor != b.ctor || a.args.len() != b.args.len() {
                return false;
            }
            for pair in a.args.iter().zip(&b.args) {
                match pair {
                    (Arg::Base { base: b1, code: c1 }, Arg::Base { base: b2, code: c2 }) => {
                        if b1 != b2 || c1 != c2 {
                            return false;
                        }
                    }
                    (Arg::Rec(x), Arg::Rec(y)) => stack.push((x, y)),
                    _ => return false,
                }
            }
        }
        true
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            t.ctor.hash(state);
            t.args.len().hash(state);
            for a in t.args.iter() {
                match a {
                    Arg::Base { base, code } => {
                        0u8.hash(state);
                        base.hash(state);
                        code.hash(state);
                    }
                    Arg::Rec(_) => 1u8.hash(state),
                }
            }
            stack.extend(t.rec_children().rev());
        }
    }
}

impl PartialEq for Arg {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Arg::Base { base: b1, code: c1 }, Arg::Base { base: b2, code: c2 }) => b1 == b2 && c1 == c2,
            (Arg::Rec(x), Arg::Rec(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Arg {}

impl Clone for Arg {
    fn clone(&self) -> Self {
        match self {
            Arg::Base { base, code } => Arg::Base { base: Arc::clone(base), code: code.clone() },
            Arg::Rec(t) => Arg::Rec(t.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("constructor index {index} out of range ({count} constructors)")]
    UnknownConstructorIndex { index: usize, count: usize },
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("constructor `{ctor}` expects {expected} arguments, got {found}")]
    Arity { ctor: String, expected: usize, found: usize },
    #[error("argument {position} of `{ctor}` should be {expected}")]
    SpecMismatch { ctor: String, position: usize, expected: String },
    #[error("unknown base type `{0}`")]
    UnknownBase(String),
    #[error("code {code} is not a value of base type `{base}`")]
    UndecodableBase { base: String, code: Nat },
    #[error("`{text}` is not a literal of base type `{base}`")]
    Literal { base: String, text: String },
    #[error("term syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("fold needs one clause per constructor: {expected} expected, {found} given")]
    ParaArity { expected: usize, found: usize },
}

fn describe(spec: &ArgSpec, constrs: &ConstrsType) -> String {
    match spec {
        ArgSpec::Base(b) => format!("a `{b}` value"),
        ArgSpec::Rec => format!("a `{}` term", constrs.type_name),
    }
}

/// Checks one node against its constructor signature (not its children).
fn check_node(t: &Term, constrs: &ConstrsType) -> Result<(), TermError> {
    let sig = constrs
        .constructors
        .get(t.ctor)
        .ok_or(TermError::UnknownConstructorIndex { index: t.ctor, count: constrs.len() })?;
    if sig.args.len() != t.args.len() {
        return Err(TermError::Arity { ctor: sig.name.clone(), expected: sig.args.len(), found: t.args.len() });
    }
    for (position, (spec, arg)) in sig.args.iter().zip(&t.args).enumerate() {
        let ok = match (spec, arg) {
            (ArgSpec::Base(b), Arg::Base { base, .. }) => b.as_str() == base.as_ref(),
            (ArgSpec::Rec, Arg::Rec(_)) => true,
            _ => false,
        };
        if !ok {
            return Err(TermError::SpecMismatch {
                ctor: sig.name.clone(),
                position,
                expected: describe(spec, constrs),
            });
        }
    }
    Ok(())
}

/// Post-order traversal on an explicit stack. `visit` receives a node and
/// the results for its recursive children, in argument order.
fn postorder<'t, R, E>(root: &'t Term, mut visit: impl FnMut(&'t Term, Vec<R>) -> Result<R, E>) -> Result<R, E> {
    enum Frame<'t> {
        Enter(&'t Term),
        Exit(&'t Term),
    }
    let mut frames = vec![Frame::Enter(root)];
    let mut results: Vec<R> = Vec::new();
    while let Some(frame) = frames.pop() {
        match frame {
            Frame::Enter(t) => {
                frames.push(Frame::Exit(t));
                frames.extend(t.rec_children().rev().map(Frame::Enter));
            }
            Frame::Exit(t) => {
                let n = t.rec_children().count();
                let kids = results.split_off(results.len() - n);
                results.push(visit(t, kids)?);
            }
        }
    }
    Ok(results.pop().expect("root result"))
}

/// Verifies the term against `constrs` recursively, including that every
/// base code is accepted by its registered encoder.
pub fn check_wf(t: &Term, constrs: &ConstrsType, registry: &Registry) -> Result<(), TermError> {
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        check_node(t, constrs)?;
        for a in &t.args {
            match a {
                Arg::Base { base, code } => {
                    let codec = registry.get(base).ok_or_else(|| TermError::UnknownBase(base.to_string()))?;
                    if !codec.accepts(code) {
                        return Err(TermError::UndecodableBase { base: base.to_string(), code: code.clone() });
                    }
                }
                Arg::Rec(child) => stack.push(child),
            }
        }
    }
    Ok(())
}

type Clause<'f, R> = Box<dyn Fn(&[&Nat], Vec<R>) -> R + 'f>;

/// One clause per constructor. Clause `i` receives the base codes of a
/// constructor-`i` node and the folded results of its recursive arguments,
/// both in argument order.
pub struct FoldPara<'f, R> {
    clauses: Vec<Clause<'f, R>>,
}

impl<'f, R> FoldPara<'f, R> {
    pub fn new() -> Self {
        FoldPara { clauses: Vec::new() }
    }

    pub fn clause(mut self, f: impl Fn(&[&Nat], Vec<R>) -> R + 'f) -> Self {
        self.clauses.push(Box::new(f));
        self
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Applies clause `ctor` directly: the right-hand side of the
    /// recursion equation.
    pub fn apply(&self, ctor: usize, base_codes: &[&Nat], rec_results: Vec<R>) -> R {
        (self.clauses[ctor])(base_codes, rec_results)
    }
}

impl<'f, R> Default for FoldPara<'f, R> {
    fn default() -> Self {
        Self::new()
    }
}

/// Structural recursion: for `t = C_i(args)`,
/// `fold(t) = para_i(base codes of t, [fold(s) for recursive s])`.
pub fn fold<R>(constrs: &ConstrsType, para: &FoldPara<'_, R>, t: &Term) -> Result<R, TermError> {
    if para.len() != constrs.len() {
        return Err(TermError::ParaArity { expected: constrs.len(), found: para.len() });
    }
    postorder(t, |node, kids| {
        check_node(node, constrs)?;
        Ok(para.apply(node.ctor, &node.base_codes(), kids))
    })
}

/// `1 + sum of recursive results` for every constructor.
pub fn rank_para<'f>(constrs: &ConstrsType) -> FoldPara<'f, usize> {
    (0..constrs.len()).fold(FoldPara::new(), |p, _| p.clause(|_, rs: Vec<usize>| 1 + rs.iter().sum::<usize>()))
}

/// Rebuilds each node from its pieces; folding with it is the identity.
pub fn identity_para(constrs: &ConstrsType) -> FoldPara<'_, Term> {
    constrs.constructors.iter().enumerate().fold(FoldPara::new(), |p, (index, sig)| {
        p.clause(move |codes: &[&Nat], rs: Vec<Term>| {
            let mut codes = codes.iter();
            let mut rs = rs.into_iter();
            let args = sig
                .args
                .iter()
                .map(|spec| match spec {
                    ArgSpec::Base(b) => Arg::base(b, (*codes.next().expect("base code")).clone()),
                    ArgSpec::Rec => Arg::Rec(rs.next().expect("recursive result")),
                })
                .collect();
            Term::new(index, args)
        })
    })
}

/// `1 + sum of the ranks of the recursive arguments`; base arguments
/// contribute nothing.
pub fn rank(constrs: &ConstrsType, t: &Term) -> Result<usize, TermError> {
    fold(constrs, &rank_para(constrs), t)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormLeaf<'a> {
    Base { base: &'a str, code: &'a Nat },
    Rec(&'a Term),
}

/// A value of the one-level unfolding: `InR^i (InL (Tuple(.., UnitV)))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormValue<'a> {
    InL(Box<NormValue<'a>>),
    InR(Box<NormValue<'a>>),
    Tuple(NormLeaf<'a>, Box<NormValue<'a>>),
    UnitV,
}

impl NormValue<'_> {
    /// Number of `InR` wrappers before the first `InL`.
    pub fn branch_depth(&self) -> usize {
        let mut depth = 0;
        let mut cur = self;
        while let NormValue::InR(inner) = cur {
            depth += 1;
            cur = inner;
        }
        depth
    }
}

/// Unfolds exactly one constructor layer.
pub fn pattern_match<'a>(constrs: &ConstrsType, t: &'a Term) -> Result<NormValue<'a>, TermError> {
    check_node(t, constrs)?;
    let product = t.args.iter().rev().fold(NormValue::UnitV, |tail, arg| {
        let leaf = match arg {
            Arg::Base { base, code } => NormLeaf::Base { base, code },
            Arg::Rec(sub) => NormLeaf::Rec(sub),
        };
        NormValue::Tuple(leaf, Box::new(tail))
    });
    Ok((0..t.ctor).fold(NormValue::InL(Box::new(product)), |v, _| NormValue::InR(Box::new(v))))
}

#[derive(Debug)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Drop for Sexp {
    fn drop(&mut self) {
        if let Sexp::List(items, _) = self {
            let mut stack = std::mem::take(items);
            while let Some(mut item) = stack.pop() {
                if let Sexp::List(inner, _) = &mut item {
                    stack.append(inner);
                }
            }
        }
    }
}

impl Sexp {
    fn offset(&self) -> usize {
        match self {
            Sexp::Atom(_, o) | Sexp::List(_, o) => *o,
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            Sexp::Atom(a, _) => out.push_str(a),
            Sexp::List(items, _) => {
                out.push('(');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    stacker::maybe_grow(MIN_STACK_RED_ZONE, STACK_GROWTH_SIZE, || item.write(out));
                }
                out.push(')');
            }
        }
    }
}

fn read_sexp(text: &str) -> Result<Sexp, TermError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' || c == ')' {
            tokens.push((c.to_string(), i));
            chars.next();
        } else {
            let mut atom = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                atom.push(c);
                chars.next();
            }
            tokens.push((atom, i));
        }
    }

    fn parse(tokens: &[(String, usize)], pos: &mut usize, end: usize) -> Result<Sexp, TermError> {
        let (tok, offset) = tokens
            .get(*pos)
            .ok_or_else(|| TermError::Syntax { offset: end, message: "unexpected end of input".into() })?;
        *pos += 1;
        match tok.as_str() {
            "(" => {
                let mut items = Vec::new();
                loop {
                    match tokens.get(*pos) {
                        Some((t, _)) if t == ")" => {
                            *pos += 1;
                            return Ok(Sexp::List(items, *offset));
                        }
                        Some(_) => items.push(stacker::maybe_grow(MIN_STACK_RED_ZONE, STACK_GROWTH_SIZE, || {
                            parse(tokens, pos, end)
                        })?),
                        None => {
                            return Err(TermError::Syntax { offset: end, message: "unclosed `(`".into() });
                        }
                    }
                }
            }
            ")" => Err(TermError::Syntax { offset: *offset, message: "unexpected `)`".into() }),
            _ => Ok(Sexp::Atom(tok.clone(), *offset)),
        }
    }

    let mut pos = 0;
    let sexp = parse(&tokens, &mut pos, text.len())?;
    if let Some((_, offset)) = tokens.get(pos) {
        return Err(TermError::Syntax { offset: *offset, message: "trailing input after term".into() });
    }
    Ok(sexp)
}

/// Whether `item` looks like a term of this type rather than a literal.
fn names_constructor(item: &Sexp, constrs: &ConstrsType) -> bool {
    let head = match item {
        Sexp::Atom(a, _) => Some(a),
        Sexp::List(items, _) => match items.first() {
            Some(Sexp::Atom(a, _)) => Some(a),
            _ => None,
        },
    };
    head.is_some_and(|h| constrs.index_of(h).is_some())
}

fn term_of_sexp(sexp: &Sexp, constrs: &ConstrsType, registry: &Registry) -> Result<Term, TermError> {
    let (head, rest): (&str, &[Sexp]) = match sexp {
        Sexp::Atom(a, _) => (a, &[]),
        Sexp::List(items, o) => match items.split_first() {
            Some((Sexp::Atom(a, _), rest)) => (a, rest),
            Some((other, _)) => {
                return Err(TermError::Syntax { offset: other.offset(), message: "expected a constructor name".into() })
            }
            None => return Err(TermError::Syntax { offset: *o, message: "empty application `()`".into() }),
        },
    };
    let ctor = constrs.index_of(head).ok_or_else(|| TermError::UnknownConstructor(head.to_string()))?;
    let sig = &constrs.constructors[ctor];
    if sig.args.len() != rest.len() {
        return Err(TermError::Arity { ctor: sig.name.clone(), expected: sig.args.len(), found: rest.len() });
    }
    let mut args = Vec::with_capacity(rest.len());
    for (position, (spec, item)) in sig.args.iter().zip(rest).enumerate() {
        match spec {
            ArgSpec::Base(b) => {
                let codec = registry.get(b).ok_or_else(|| TermError::UnknownBase(b.clone()))?;
                let mut literal = String::new();
                item.write(&mut literal);
                match codec.encode_literal(&literal) {
                    Some(code) => args.push(Arg::base(b, code)),
                    None if names_constructor(item, constrs) => {
                        return Err(TermError::SpecMismatch {
                            ctor: sig.name.clone(),
                            position,
                            expected: describe(spec, constrs),
                        })
                    }
                    None => return Err(TermError::Literal { base: b.clone(), text: literal }),
                }
            }
            ArgSpec::Rec => {
                let sub = stacker::maybe_grow(MIN_STACK_RED_ZONE, STACK_GROWTH_SIZE, || {
                    term_of_sexp(item, constrs, registry)
                });
                match sub {
                    Ok(t) => args.push(Arg::Rec(t)),
                    Err(TermError::UnknownConstructor(name)) if matches!(item, Sexp::Atom(..)) => {
                        let literal_elsewhere = constrs
                            .bases()
                            .iter()
                            .any(|b| registry.get(b).is_some_and(|c| c.encode_literal(&name).is_some()));
                        return Err(if literal_elsewhere {
                            TermError::SpecMismatch {
                                ctor: sig.name.clone(),
                                position,
                                expected: describe(spec, constrs),
                            }
                        } else {
                            TermError::UnknownConstructor(name)
                        });
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(Term::new(ctor, args))
}

/// Reads `(Cons 3 (Cons 5 Nil))`-style text. Nullary constructors may be
/// written bare or in parentheses; base literals are parsed by the
/// registered codec.
pub fn parse_term(text: &str, constrs: &ConstrsType, registry: &Registry) -> Result<Term, TermError> {
    let sexp = read_sexp(text)?;
    let t = term_of_sexp(&sexp, constrs, registry)?;
    drop(sexp);
    Ok(t)
}

fn render_into(t: &Term, constrs: &ConstrsType, registry: &Registry, out: &mut String) -> Result<(), TermError> {
    check_node(t, constrs)?;
    let name = &constrs.constructors[t.ctor].name;
    if t.args.is_empty() {
        out.push_str(name);
        return Ok(());
    }
    let _ = write!(out, "({name}");
    for a in &t.args {
        out.push(' ');
        match a {
            Arg::Base { base, code } => {
                let codec = registry.get(base).ok_or_else(|| TermError::UnknownBase(base.to_string()))?;
                let lit = codec
                    .decode_code(code)
                    .ok_or_else(|| TermError::UndecodableBase { base: base.to_string(), code: code.clone() })?;
                out.push_str(&lit);
            }
            Arg::Rec(sub) => {
                stacker::maybe_grow(MIN_STACK_RED_ZONE, STACK_GROWTH_SIZE, || render_into(sub, constrs, registry, out))?
            }
        }
    }
    out.push(')');
    Ok(())
}

/// Canonical S-expression: nullary constructors bare, single spaces.
pub fn render_term(t: &Term, constrs: &ConstrsType, registry: &Registry) -> Result<String, TermError> {
    let mut out = String::new();
    render_into(t, constrs, registry, &mut out)?;
    Ok(out)
}
