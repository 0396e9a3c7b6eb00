//! The inductive-definition language.
//!
//! ```text
//! program := decl+
//! decl    := "Inductive" IDENT [":" "Type"] ":=" ["|"] [branch ("|" branch)*]
//!            ("with" IDENT [":" "Type"] ":=" ...)* "."
//! branch  := IDENT ":" type
//! type    := atom ("->" type)?
//! atom    := IDENT | "(" type ")"
//! ```
//!
//! Comments are `(* ... *)` and nest. A parenthesized arrow in argument
//! position parses fine and is rejected later by [`validate`].

use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// An identifier with its source position. Equality ignores the position.
#[derive(Clone, Debug)]
pub struct Ident {
    pub text: String,
    pub span: Span,
}

impl Ident {
    pub fn new(text: impl Into<String>) -> Self {
        Ident { text: text.into(), span: Span::default() }
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Ident {}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Surface type of a constructor, before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeAst {
    Name(Ident),
    Arrow(Box<TypeAst>, Box<TypeAst>),
}

impl TypeAst {
    /// Splits `a -> b -> r` into `([a, b], r)`.
    pub fn uncurry(&self) -> (Vec<&TypeAst>, &TypeAst) {
        let mut args = Vec::new();
        let mut cur = self;
        while let TypeAst::Arrow(dom, cod) = cur {
            args.push(dom.as_ref());
            cur = cod;
        }
        (args, cur)
    }

    fn span(&self) -> Span {
        match self {
            TypeAst::Name(id) => id.span,
            TypeAst::Arrow(dom, _) => dom.span(),
        }
    }
}

impl fmt::Display for TypeAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeAst::Name(id) => write!(f, "{id}"),
            TypeAst::Arrow(dom, cod) => match dom.as_ref() {
                TypeAst::Arrow(..) => write!(f, "({dom}) -> {cod}"),
                TypeAst::Name(_) => write!(f, "{dom} -> {cod}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub name: Ident,
    pub ty: TypeAst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductiveDef {
    pub type_name: Ident,
    pub constructors: Vec<ConstructorDecl>,
    /// Index of the `Inductive ... with ...` block this definition came from.
    pub block: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub defs: Vec<InductiveDef>,
}

impl Program {
    pub fn def(&self, name: &str) -> Option<&InductiveDef> {
        self.defs.iter().find(|d| d.type_name.text == name)
    }

    fn block_size(&self, block: usize) -> usize {
        self.defs.iter().filter(|d| d.block == block).count()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, def) in self.defs.iter().enumerate() {
            let continues = self.defs.get(i + 1).is_some_and(|next| next.block == def.block);
            let opener = if i > 0 && self.defs[i - 1].block == def.block { "with" } else { "Inductive" };
            write!(f, "{opener} {} :=", def.type_name)?;
            for (j, c) in def.constructors.iter().enumerate() {
                let sep = if j == 0 { "  " } else { "| " };
                write!(f, "\n  {sep}{} : {}", c.name, c.ty)?;
            }
            if continues {
                writeln!(f)?;
            } else {
                writeln!(f, ".")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: duplicate type name `{name}`")]
    DuplicateType { span: Span, name: String },
    #[error("{span}: duplicate constructor `{name}` in `{type_name}`")]
    DuplicateConstructor { span: Span, name: String, type_name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Inductive,
    With,
    ColonEq,
    Colon,
    Pipe,
    Arrow,
    Dot,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Inductive => f.write_str("`Inductive`"),
            Tok::With => f.write_str("`with`"),
            Tok::ColonEq => f.write_str("`:=`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
        }
    }
}

fn syntax(span: Span, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { span, message: message.into() }
}

fn lex(text: &str) -> Result<(Vec<(Tok, Span)>, Span), ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    return Err(syntax(span, "unterminated comment"));
                }
                if chars[i] == '(' && chars.get(i + 1) == Some(&'*') {
                    depth += 1;
                    advance(&mut i, &mut line, &mut col, 2);
                } else if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    depth -= 1;
                    advance(&mut i, &mut line, &mut col, 2);
                    if depth == 0 {
                        break;
                    }
                } else {
                    advance(&mut i, &mut line, &mut col, 1);
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let tok = match word.as_str() {
                "Inductive" => Tok::Inductive,
                "with" => Tok::With,
                _ => Tok::Ident(word),
            };
            toks.push((tok, span));
            continue;
        }
        let (tok, width) = match (c, chars.get(i + 1)) {
            (':', Some('=')) => (Tok::ColonEq, 2),
            (':', _) => (Tok::Colon, 1),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('|', _) => (Tok::Pipe, 1),
            ('.', _) => (Tok::Dot, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            _ => return Err(syntax(span, format!("unexpected character `{c}`"))),
        };
        toks.push((tok, span));
        advance(&mut i, &mut line, &mut col, width);
    }
    Ok((toks, Span { line, column: col }))
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    eof: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.eof, |(_, s)| *s)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => syntax(self.span(), format!("expected {expected}, found {t}")),
            None => syntax(self.span(), format!("expected {expected}, found end of input")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), span)) => {
                let id = Ident { text: s.clone(), span: *span };
                self.pos += 1;
                Ok(id)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn header(&mut self) -> Result<Ident, ParseError> {
        let name = self.ident()?;
        if self.eat(&Tok::Colon) {
            let sort = self.ident()?;
            if sort.text != "Type" {
                return Err(syntax(sort.span, "only `Type` is accepted as a type annotation"));
            }
        }
        self.expect(Tok::ColonEq)?;
        Ok(name)
    }

    fn ty(&mut self) -> Result<TypeAst, ParseError> {
        let dom = if self.eat(&Tok::LParen) {
            let inner = self.ty()?;
            self.expect(Tok::RParen)?;
            inner
        } else {
            let id = self.ident()?;
            if let Some(Tok::Ident(_) | Tok::LParen) = self.peek() {
                return Err(syntax(
                    self.span(),
                    format!("type application is not supported (nested occurrence after `{id}`)"),
                ));
            }
            TypeAst::Name(id)
        };
        if self.eat(&Tok::Arrow) {
            let cod = stacker::maybe_grow(32 * 1024, 1024 * 1024, || self.ty())?;
            Ok(TypeAst::Arrow(Box::new(dom), Box::new(cod)))
        } else {
            Ok(dom)
        }
    }

    fn branches(&mut self) -> Result<Vec<ConstructorDecl>, ParseError> {
        let mut out = Vec::new();
        let leading_pipe = self.eat(&Tok::Pipe);
        if !leading_pipe && !matches!(self.peek(), Some(Tok::Ident(_))) {
            return Ok(out);
        }
        loop {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            out.push(ConstructorDecl { name, ty });
            if !self.eat(&Tok::Pipe) {
                return Ok(out);
            }
        }
    }
}

/// Parses a whole program. Duplicate type names anywhere in the file and
/// duplicate constructor names within one definition are rejected here.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let (toks, eof) = lex(text)?;
    let mut p = Parser { toks, pos: 0, eof };
    let mut defs: Vec<InductiveDef> = Vec::new();
    let mut block = 0;
    loop {
        p.expect(Tok::Inductive)?;
        loop {
            let type_name = p.header()?;
            let constructors = p.branches()?;
            if defs.iter().any(|d| d.type_name == type_name) {
                return Err(ParseError::DuplicateType { span: type_name.span, name: type_name.text });
            }
            let mut seen = BTreeSet::new();
            for c in &constructors {
                if !seen.insert(c.name.text.as_str()) {
                    return Err(ParseError::DuplicateConstructor {
                        span: c.name.span,
                        name: c.name.text.clone(),
                        type_name: type_name.text.clone(),
                    });
                }
            }
            defs.push(InductiveDef { type_name, constructors, block });
            if !p.eat(&Tok::With) {
                break;
            }
        }
        p.expect(Tok::Dot)?;
        block += 1;
        if p.peek().is_none() {
            return Ok(Program { defs });
        }
    }
}

/// One argument slot of a constructor: a countable base type or the type
/// being defined.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArgSpec {
    Base(String),
    Rec,
}

impl fmt::Display for ArgSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgSpec::Base(b) => write!(f, "Some {b}"),
            ArgSpec::Rec => f.write_str("None"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstructorSig {
    pub name: String,
    pub args: Vec<ArgSpec>,
}

impl ConstructorSig {
    pub fn new(name: impl Into<String>, args: Vec<ArgSpec>) -> Self {
        ConstructorSig { name: name.into(), args }
    }

    pub fn rec_arity(&self) -> usize {
        self.args.iter().filter(|a| **a == ArgSpec::Rec).count()
    }
}

/// A validated definition: ordered constructor signatures. Constructor
/// order fixes branch indices everywhere downstream.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstrsType {
    pub type_name: String,
    pub constructors: Vec<ConstructorSig>,
}

impl ConstrsType {
    pub fn new(type_name: impl Into<String>, constructors: Vec<ConstructorSig>) -> Self {
        ConstrsType { type_name: type_name.into(), constructors }
    }

    pub fn len(&self) -> usize {
        self.constructors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constructors.is_empty()
    }

    pub fn index_of(&self, ctor: &str) -> Option<usize> {
        self.constructors.iter().position(|c| c.name == ctor)
    }

    /// Distinct base names, in first-occurrence order.
    pub fn bases(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for c in &self.constructors {
            for a in &c.args {
                if let ArgSpec::Base(b) = a {
                    if !out.contains(&b.as_str()) {
                        out.push(b);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for ConstrsType {
    /// `[ _[ [Some nat; None], Cons ]_; _[ [], Nil ]_ ]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[ ")?;
        for (i, c) in self.constructors.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let args: Vec<String> = c.args.iter().map(ToString::to_string).collect();
            write!(f, "_[ [{}], {} ]_", args.join("; "), c.name)?;
        }
        f.write_str(" ]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("{span}: HigherOrderArg: argument `{arg}` of constructor `{ctor}` is a function type")]
    HigherOrderArg { ctor: String, arg: String, span: Span },
    #[error("{span}: UnknownBase: `{name}` (constructor `{ctor}`) is not a registered countable type")]
    UnknownBase { ctor: String, name: String, span: Span },
    #[error("{span}: BadResultType: constructor `{ctor}` returns `{found}`, expected `{expected}`")]
    BadResultType { ctor: String, found: String, expected: String, span: Span },
    #[error("{span}: MutualOrForwardReference: {detail}")]
    MutualOrForwardReference { detail: String, span: Span },
}

/// Name sets consulted by [`validate`].
#[derive(Clone, Debug, Default)]
pub struct Scope<'a> {
    /// Registered countable base types.
    pub known_bases: BTreeSet<&'a str>,
    /// Types declared later in the same file, or siblings in a mutual block.
    pub pending: BTreeSet<&'a str>,
    /// Whether the definition is part of an `Inductive ... with ...` block.
    pub mutual_block: bool,
}

/// Checks the first-order, non-mutual, non-nested restrictions and resolves
/// every argument to `Base` or `Rec`. Reports every violation found.
pub fn validate(def: &InductiveDef, scope: &Scope<'_>) -> Result<ConstrsType, Vec<ValidationError>> {
    let mut errors = Vec::new();
    let type_name = def.type_name.text.as_str();
    if scope.mutual_block {
        errors.push(ValidationError::MutualOrForwardReference {
            detail: format!("`{type_name}` is declared in a mutual block, which is not supported"),
            span: def.type_name.span,
        });
    }
    let mut constructors = Vec::with_capacity(def.constructors.len());
    for decl in &def.constructors {
        let ctor = decl.name.text.clone();
        let (arg_tys, result) = decl.ty.uncurry();
        match result {
            TypeAst::Name(id) if id.text == type_name => {}
            other => errors.push(ValidationError::BadResultType {
                ctor: ctor.clone(),
                found: other.to_string(),
                expected: type_name.to_string(),
                span: other.span(),
            }),
        }
        let mut args = Vec::with_capacity(arg_tys.len());
        for arg in arg_tys {
            match arg {
                TypeAst::Arrow(..) => errors.push(ValidationError::HigherOrderArg {
                    ctor: ctor.clone(),
                    arg: format!("({arg})"),
                    span: arg.span(),
                }),
                TypeAst::Name(id) if id.text == type_name => args.push(ArgSpec::Rec),
                TypeAst::Name(id) if scope.known_bases.contains(id.text.as_str()) => {
                    args.push(ArgSpec::Base(id.text.clone()))
                }
                TypeAst::Name(id) if scope.pending.contains(id.text.as_str()) => {
                    errors.push(ValidationError::MutualOrForwardReference {
                        detail: format!(
                            "constructor `{ctor}` of `{type_name}` refers to `{}`, which is not yet defined",
                            id.text
                        ),
                        span: id.span,
                    })
                }
                TypeAst::Name(id) => errors.push(ValidationError::UnknownBase {
                    ctor: ctor.clone(),
                    name: id.text.clone(),
                    span: id.span,
                }),
            }
        }
        constructors.push(ConstructorSig { name: ctor, args });
    }
    if errors.is_empty() {
        Ok(ConstrsType { type_name: type_name.to_string(), constructors })
    } else {
        Err(errors)
    }
}

/// Builds the [`Scope`] for `program.defs[index]` given the registered bases.
pub fn scope_for<'a>(program: &'a Program, index: usize, known_bases: impl IntoIterator<Item = &'a str>) -> Scope<'a> {
    let def = &program.defs[index];
    let pending = program
        .defs
        .iter()
        .enumerate()
        .filter(|(i, d)| *i > index || (d.block == def.block && *i != index))
        .map(|(_, d)| d.type_name.text.as_str())
        .collect();
    Scope { known_bases: known_bases.into_iter().collect(), pending, mutual_block: program.block_size(def.block) > 1 }
}

/// Shape language for one-level unfoldings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Sum(Box<TypeExpr>, Box<TypeExpr>),
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    UnitT,
    VoidT,
    BaseT(String),
    X,
}

impl TypeExpr {
    fn level(&self) -> u8 {
        match self {
            TypeExpr::Sum(..) => 2,
            TypeExpr::Prod(..) => 1,
            _ => 0,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, max_level: u8) -> fmt::Result {
        if self.level() > max_level {
            f.write_str("(")?;
            self.fmt_at(f, 2)?;
            return f.write_str(")");
        }
        match self {
            // Both operators associate to the left, so a right operand of
            // the same level needs parentheses.
            TypeExpr::Sum(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" + ")?;
                r.fmt_at(f, 1)
            }
            TypeExpr::Prod(l, r) => {
                l.fmt_at(f, 1)?;
                f.write_str(" * ")?;
                r.fmt_at(f, 0)
            }
            TypeExpr::UnitT => f.write_str("unit"),
            TypeExpr::VoidT => f.write_str("void"),
            TypeExpr::BaseT(b) => f.write_str(b),
            TypeExpr::X => f.write_str("X"),
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 2)
    }
}

/// Right-nested sum over constructors of right-nested products over their
/// arguments; `Rec` slots become `hole`.
pub fn normtype_of(constrs: &ConstrsType, hole: &TypeExpr) -> TypeExpr {
    constrs.constructors.iter().rev().fold(TypeExpr::VoidT, |sum, ctor| {
        let prod = ctor.args.iter().rev().fold(TypeExpr::UnitT, |prod, arg| {
            let leaf = match arg {
                ArgSpec::Base(b) => TypeExpr::BaseT(b.clone()),
                ArgSpec::Rec => hole.clone(),
            };
            TypeExpr::Prod(Box::new(leaf), Box::new(prod))
        });
        TypeExpr::Sum(Box::new(prod), Box::new(sum))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const NATLIST: &str = "Inductive natlist :=  Cons : nat -> natlist -> natlist
                          | Nil  : natlist.";
    const BINTREE: &str = "Inductive bintree :=  Node : nat -> bintree -> bintree -> bintree
                          | Leaf : bintree.";
    const EXPR: &str = "Inductive expr := andp   : expr -> expr -> expr
                      | orp    : expr -> expr -> expr
                      | impp   : expr -> expr -> expr
                      | falsep : expr
                      | varp   : nat -> expr.";
    const INF_TREE: &str = "Inductive inf_tree: Type :=
    | inf_tree_leaf: inf_tree
    | inf_tree_node: nat -> (nat -> inf_tree) -> inf_tree.";

    fn only(src: &str) -> InductiveDef {
        let mut p = parse_program(src).unwrap();
        assert_eq!(p.defs.len(), 1);
        p.defs.remove(0)
    }

    fn bases<'a>(names: &[&'a str]) -> Scope<'a> {
        Scope { known_bases: names.iter().copied().collect(), ..Scope::default() }
    }

    #[test]
    fn parses_listings() {
        let natlist = only(NATLIST);
        let names: Vec<_> = natlist.constructors.iter().map(|c| c.name.text.as_str()).collect();
        assert_eq!(names, ["Cons", "Nil"]);

        let expr = only(EXPR);
        let names: Vec<_> = expr.constructors.iter().map(|c| c.name.text.as_str()).collect();
        assert_eq!(names, ["andp", "orp", "impp", "falsep", "varp"]);
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_program("Inductive t :="), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("(* only a comment *)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("Inductive t := a : t"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("Inductive t := a : t | ."), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("Inductive t : Set := a : t."), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("Inductive t := a : list t -> t."), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_program("Inductive t := a : t. (* open"), Err(ParseError::Syntax { .. })));
        match parse_program("Inductive t :=\n  a : t #") {
            Err(ParseError::Syntax { span, .. }) => assert_eq!(span, Span { line: 2, column: 9 }),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_names() {
        assert!(matches!(
            parse_program("Inductive t := a : t. Inductive t := b : t."),
            Err(ParseError::DuplicateType { .. })
        ));
        assert!(matches!(
            parse_program("Inductive t := a : t | a : t -> t."),
            Err(ParseError::DuplicateConstructor { .. })
        ));
    }

    #[test]
    fn comments_and_whitespace() {
        let p = parse_program("(* a (* nested *) comment *)Inductive\tt:=a:t|b:t->t.").unwrap();
        assert_eq!(p.defs[0].constructors.len(), 2);
        let empty = parse_program("Inductive e := .").unwrap();
        assert!(empty.defs[0].constructors.is_empty());
    }

    #[test]
    fn validate_natlist() {
        let c = validate(&only(NATLIST), &bases(&["nat"])).unwrap();
        assert_eq!(c.constructors[0].args, vec![ArgSpec::Base("nat".into()), ArgSpec::Rec]);
        assert!(c.constructors[1].args.is_empty());
        assert_eq!(c.to_string(), "[ _[ [Some nat; None], Cons ]_; _[ [], Nil ]_ ]");
    }

    #[test]
    fn validate_rejections() {
        let errs = validate(&only(INF_TREE), &bases(&["nat"])).unwrap_err();
        assert!(matches!(&errs[..], [ValidationError::HigherOrderArg { arg, .. }] if arg == "(nat -> inf_tree)"));

        let errs = validate(&only("Inductive p := mk : real -> p."), &bases(&["nat"])).unwrap_err();
        assert!(matches!(&errs[..], [ValidationError::UnknownBase { name, .. }] if name == "real"));

        let errs = validate(&only("Inductive p := mk : nat -> nat."), &bases(&["nat"])).unwrap_err();
        assert!(matches!(&errs[..], [ValidationError::BadResultType { .. }]));

        let prog = parse_program("Inductive a := A0 : a | A1 : b -> a. Inductive b := B0 : b.").unwrap();
        let errs = validate(&prog.defs[0], &scope_for(&prog, 0, ["nat"])).unwrap_err();
        assert!(matches!(&errs[..], [ValidationError::MutualOrForwardReference { .. }]));

        let prog = parse_program("Inductive a := A0 : a | A1 : b -> a with b := B0 : b | B1 : a -> b.").unwrap();
        assert_eq!(prog.defs[1].block, prog.defs[0].block);
        for i in 0..2 {
            let errs = validate(&prog.defs[i], &scope_for(&prog, i, ["nat"])).unwrap_err();
            assert!(errs.iter().all(|e| matches!(e, ValidationError::MutualOrForwardReference { .. })));
        }
    }

    #[test]
    fn normtype_goldens() {
        let natlist = validate(&only(NATLIST), &bases(&["nat"])).unwrap();
        let nt = normtype_of(&natlist, &TypeExpr::X);
        let expected = TypeExpr::Sum(
            Box::new(TypeExpr::Prod(
                Box::new(TypeExpr::BaseT("nat".into())),
                Box::new(TypeExpr::Prod(Box::new(TypeExpr::X), Box::new(TypeExpr::UnitT))),
            )),
            Box::new(TypeExpr::Sum(Box::new(TypeExpr::UnitT), Box::new(TypeExpr::VoidT))),
        );
        assert_eq!(nt, expected);
        assert_eq!(nt.to_string(), "nat * (X * unit) + (unit + void)");

        let bintree = validate(&only(BINTREE), &bases(&["nat"])).unwrap();
        assert_eq!(normtype_of(&bintree, &TypeExpr::X).to_string(), "nat * (X * (X * unit)) + (unit + void)");
        assert_eq!(normtype_of(&ConstrsType::new("e", vec![]), &TypeExpr::X), TypeExpr::VoidT);
    }

    #[test]
    fn display_left_nesting() {
        let s = |l, r| TypeExpr::Sum(Box::new(l), Box::new(r));
        let p = |l, r| TypeExpr::Prod(Box::new(l), Box::new(r));
        use TypeExpr::{UnitT, VoidT, X};
        assert_eq!(s(s(X, UnitT), VoidT).to_string(), "X + unit + void");
        assert_eq!(p(s(X, UnitT), VoidT).to_string(), "(X + unit) * void");
        assert_eq!(p(p(X, UnitT), X).to_string(), "X * unit * X");
    }

    /// Spines of a right-nested normtype: one per constructor, each the
    /// list of product factors.
    fn spines(t: &TypeExpr) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = t;
        while let TypeExpr::Sum(prod, rest) = cur {
            let mut n = 0;
            let mut p = prod.as_ref();
            while let TypeExpr::Prod(_, tail) = p {
                n += 1;
                p = tail;
            }
            assert_eq!(*p, TypeExpr::UnitT);
            out.push(n);
            cur = rest;
        }
        assert_eq!(*cur, TypeExpr::VoidT);
        out
    }

    fn arb_constrs() -> impl Strategy<Value = ConstrsType> {
        let arg =
            prop_oneof![Just(ArgSpec::Rec), Just(ArgSpec::Base("nat".into())), Just(ArgSpec::Base("bool".into()))];
        prop::collection::vec(prop::collection::vec(arg, 0..4), 0..6).prop_map(|ctors| {
            ConstrsType::new(
                "t",
                ctors.into_iter().enumerate().map(|(i, args)| ConstructorSig::new(format!("C{i}"), args)).collect(),
            )
        })
    }

    fn to_program(c: &ConstrsType) -> String {
        let branches: Vec<String> = c
            .constructors
            .iter()
            .map(|k| {
                let mut parts: Vec<String> = k
                    .args
                    .iter()
                    .map(|a| match a {
                        ArgSpec::Base(b) => b.clone(),
                        ArgSpec::Rec => c.type_name.clone(),
                    })
                    .collect();
                parts.push(c.type_name.clone());
                format!("{} : {}", k.name, parts.join(" -> "))
            })
            .collect();
        format!("Inductive {} := {}.", c.type_name, branches.join(" | "))
    }

    proptest! {
        #[test]
        fn normtype_is_structural(c in arb_constrs()) {
            let arities: Vec<usize> = c.constructors.iter().map(|k| k.args.len()).collect();
            prop_assert_eq!(spines(&normtype_of(&c, &TypeExpr::X)), arities);
        }

        #[test]
        fn print_parse_roundtrip(c in arb_constrs(), mutual in any::<bool>()) {
            let mut text = to_program(&c);
            if mutual {
                text = text.trim_end_matches('.').to_string() + " with u := U0 : u.";
            }
            let program = parse_program(&text).unwrap();
            let reparsed = parse_program(&program.to_string()).unwrap();
            prop_assert_eq!(reparsed, program);
        }

        #[test]
        fn validate_commutes_with_permutation(c in arb_constrs(), seed in any::<u64>()) {
            let mut order: Vec<usize> = (0..c.constructors.len()).collect();
            let mut s = seed;
            for i in (1..order.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                order.swap(i, (s >> 33) as usize % (i + 1));
            }
            let permuted = ConstrsType::new(
                "t",
                order.iter().map(|&i| c.constructors[i].clone()).collect(),
            );
            let scope = bases(&["nat", "bool"]);
            let a = validate(&only(&to_program(&c)), &scope).unwrap();
            let b = validate(&only(&to_program(&permuted)), &scope).unwrap();
            let reordered: Vec<_> = order.iter().map(|&i| a.constructors[i].clone()).collect();
            prop_assert_eq!(b.constructors, reordered);
        }
    }
}
