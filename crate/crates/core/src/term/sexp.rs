//! Canonical s-expression serialization of terms and declarations.
//!
//! The encoding is lossless (binder names included), so reading back what
//! was written yields a structurally identical value. See `docs/sexp.md`
//! for the tag set.

use std::rc::Rc;

use lexpr::Value;
use thiserror::Error;

use super::{ConstructorDecl, Context, Decl, Definition, InductiveDecl, Name, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexpError {
    #[error("s-expression syntax error: {0}")]
    Syntax(String),
    #[error("malformed {what}: {found}")]
    Malformed { what: &'static str, found: String },
}

type Result<T> = std::result::Result<T, SexpError>;

fn sym(s: &str) -> Value {
    Value::symbol(s)
}

fn num(n: usize) -> Value {
    Value::from(n as u64)
}

fn list(items: impl IntoIterator<Item = Value>) -> Value {
    Value::list(items.into_iter().collect::<Vec<_>>())
}

fn render(v: &Value) -> String {
    lexpr::to_string(v).expect("writing to a string cannot fail")
}

pub fn name_value(na: &Name) -> Value {
    match na {
        Name::Anonymous => sym("anon"),
        Name::Named(s) => list([sym("name"), Value::string(&**s)]),
    }
}

pub fn sort_value(s: Sort) -> Value {
    match s {
        Sort::Prop => sym("prop"),
        Sort::Type(i) => list([sym("type"), num(i as usize)]),
    }
}

pub fn term_value(t: &Term) -> Value {
    match t {
        Term::Sort(s) => list([sym("sort"), sort_value(*s)]),
        Term::Rel(i) => list([sym("rel"), num(*i)]),
        Term::Prod(na, a, b) => list([sym("prod"), name_value(na), term_value(a), term_value(b)]),
        Term::Lam(na, a, b) => list([sym("lam"), name_value(na), term_value(a), term_value(b)]),
        Term::LetIn(na, v, ty, b) => list([sym("let"), name_value(na), term_value(v), term_value(ty), term_value(b)]),
        Term::App(f, a) => list([sym("app"), term_value(f), term_value(a)]),
        Term::Ind(n) => list([sym("ind"), Value::string(&**n)]),
        Term::Construct(n, i) => list([sym("construct"), Value::string(&**n), num(*i)]),
        Term::Const(n) => list([sym("const"), Value::string(&**n)]),
        Term::Case {
            ind,
            motive,
            scrutinee,
            branches,
        } => list([
            sym("case"),
            Value::string(&**ind),
            term_value(motive),
            term_value(scrutinee),
            list(std::iter::once(sym("branches")).chain(branches.iter().map(term_value))),
        ]),
        Term::Fix {
            name,
            struct_arg,
            ty,
            body,
        } => list([sym("fix"), name_value(name), num(*struct_arg), term_value(ty), term_value(body)]),
    }
}

fn decl_value(d: &Decl) -> Value {
    let mut items = vec![sym("decl"), name_value(&d.name), term_value(&d.ty)];
    if let Some(b) = &d.body {
        items.push(term_value(b));
    }
    list(items)
}

fn context_value(tag: &str, ctx: &Context) -> Value {
    list(std::iter::once(sym(tag)).chain(ctx.decls().iter().map(decl_value)))
}

pub fn inductive_value(decl: &InductiveDecl) -> Value {
    let ctors = decl
        .ctors
        .iter()
        .map(|c| list([sym("ctor"), Value::string(&*c.name), term_value(&c.ty)]));
    list([
        sym("inductive"),
        Value::string(&*decl.name),
        context_value("params", &decl.params),
        context_value("indices", &decl.indices),
        sort_value(decl.sort),
        list(std::iter::once(sym("ctors")).chain(ctors)),
    ])
}

pub fn definition_value(def: &Definition) -> Value {
    list([
        sym("definition"),
        Value::string(&*def.name),
        term_value(&def.ty),
        term_value(&def.body),
    ])
}

pub fn term_to_sexp(t: &Term) -> String {
    render(&term_value(t))
}

pub fn inductive_to_sexp(decl: &InductiveDecl) -> String {
    render(&inductive_value(decl))
}

pub fn definition_to_sexp(def: &Definition) -> String {
    render(&definition_value(def))
}

fn parse(s: &str) -> Result<Value> {
    lexpr::from_str(s).map_err(|e| SexpError::Syntax(e.to_string()))
}

pub fn term_from_sexp(s: &str) -> Result<Term> {
    read_term(&parse(s)?)
}

pub fn inductive_from_sexp(s: &str) -> Result<InductiveDecl> {
    read_inductive(&parse(s)?)
}

pub fn definition_from_sexp(s: &str) -> Result<Definition> {
    read_definition(&parse(s)?)
}

fn malformed(what: &'static str, v: &Value) -> SexpError {
    SexpError::Malformed {
        what,
        found: render(v),
    }
}

/// Splits `(tag item...)` into its tag and items.
fn tagged<'v>(what: &'static str, v: &'v Value) -> Result<(&'v str, Vec<&'v Value>)> {
    let items = v.to_ref_vec().ok_or_else(|| malformed(what, v))?;
    let tag = items.first().and_then(|t| t.as_symbol()).ok_or_else(|| malformed(what, v))?;
    Ok((tag, items[1..].to_vec()))
}

fn read_usize(v: &Value) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| malformed("natural number", v))
}

fn read_str(v: &Value) -> Result<Rc<str>> {
    v.as_str().map(Rc::from).ok_or_else(|| malformed("string", v))
}

fn read_name(v: &Value) -> Result<Name> {
    if v.as_symbol() == Some("anon") {
        return Ok(Name::Anonymous);
    }
    match tagged("name", v)? {
        ("name", items) if items.len() == 1 => Ok(Name::Named(read_str(items[0])?)),
        _ => Err(malformed("name", v)),
    }
}

fn read_sort(v: &Value) -> Result<Sort> {
    if v.as_symbol() == Some("prop") {
        return Ok(Sort::Prop);
    }
    match tagged("sort", v)? {
        ("type", items) if items.len() == 1 => {
            let level = read_usize(items[0])?;
            u32::try_from(level)
                .ok()
                .filter(|l| *l <= Sort::MAX_LEVEL)
                .map(Sort::Type)
                .ok_or_else(|| malformed("universe level", v))
        }
        _ => Err(malformed("sort", v)),
    }
}

pub fn read_term(v: &Value) -> Result<Term> {
    let (tag, items) = tagged("term", v)?;
    let t = match (tag, items.as_slice()) {
        ("sort", [s]) => Term::Sort(read_sort(s)?),
        ("rel", [i]) => Term::Rel(read_usize(i)?),
        ("prod", [na, a, b]) => Term::prod(read_name(na)?, read_term(a)?, read_term(b)?),
        ("lam", [na, a, b]) => Term::lam(read_name(na)?, read_term(a)?, read_term(b)?),
        ("let", [na, val, ty, b]) => Term::let_in(read_name(na)?, read_term(val)?, read_term(ty)?, read_term(b)?),
        ("app", [f, a]) => Term::app(read_term(f)?, read_term(a)?),
        ("ind", [n]) => Term::Ind(read_str(n)?),
        ("construct", [n, i]) => Term::Construct(read_str(n)?, read_usize(i)?),
        ("const", [n]) => Term::Const(read_str(n)?),
        ("case", [ind, motive, scrutinee, branches]) => {
            let (btag, bitems) = tagged("branches", branches)?;
            if btag != "branches" {
                return Err(malformed("branches", branches));
            }
            Term::Case {
                ind: read_str(ind)?,
                motive: Rc::new(read_term(motive)?),
                scrutinee: Rc::new(read_term(scrutinee)?),
                branches: bitems.into_iter().map(read_term).collect::<Result<_>>()?,
            }
        }
        ("fix", [na, k, ty, body]) => Term::fix(read_name(na)?, read_usize(k)?, read_term(ty)?, read_term(body)?),
        _ => return Err(malformed("term", v)),
    };
    Ok(t)
}

fn read_decl(v: &Value) -> Result<Decl> {
    match tagged("decl", v)? {
        ("decl", items) => match items.as_slice() {
            [na, ty] => Ok(Decl::new(read_name(na)?, read_term(ty)?)),
            [na, ty, body] => Ok(Decl::with_body(read_name(na)?, read_term(ty)?, read_term(body)?)),
            _ => Err(malformed("decl", v)),
        },
        _ => Err(malformed("decl", v)),
    }
}

fn read_context(tag: &'static str, v: &Value) -> Result<Context> {
    match tagged(tag, v)? {
        (t, items) if t == tag => Ok(Context::from(items.into_iter().map(read_decl).collect::<Result<Vec<_>>>()?)),
        _ => Err(malformed(tag, v)),
    }
}

pub fn read_inductive(v: &Value) -> Result<InductiveDecl> {
    let (tag, items) = tagged("inductive", v)?;
    let ("inductive", [name, params, indices, sort, ctors]) = (tag, items.as_slice()) else {
        return Err(malformed("inductive", v));
    };
    let (ctag, citems) = tagged("ctors", ctors)?;
    if ctag != "ctors" {
        return Err(malformed("ctors", ctors));
    }
    let ctors = citems
        .into_iter()
        .map(|c| match tagged("ctor", c)? {
            ("ctor", parts) if parts.len() == 2 => Ok(ConstructorDecl {
                name: read_str(parts[0])?,
                ty: read_term(parts[1])?,
            }),
            _ => Err(malformed("ctor", c)),
        })
        .collect::<Result<_>>()?;
    Ok(InductiveDecl {
        name: read_str(name)?,
        params: read_context("params", params)?,
        indices: read_context("indices", indices)?,
        sort: read_sort(sort)?,
        ctors,
    })
}

pub fn read_definition(v: &Value) -> Result<Definition> {
    let (tag, items) = tagged("definition", v)?;
    let ("definition", [name, ty, body]) = (tag, items.as_slice()) else {
        return Err(malformed("definition", v));
    };
    Ok(Definition {
        name: read_str(name)?,
        ty: read_term(ty)?,
        body: read_term(body)?,
    })
}
