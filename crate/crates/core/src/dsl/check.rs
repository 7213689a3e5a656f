use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::combinators::{
    boxed, braid, const_fn, copy_fn, counit, delete_fn, identity, lift, lift_player_strands,
    seq_all, tensor_all,
};
use crate::error::{Error, Result};
use crate::game::{Func, OpenGame, Selection, Variance};
use crate::interface::{reduce_strands, show_boundary, Dir, Interface, NormalInterface, Strand};
use crate::types::{FiniteType, Scaled, Value};

use super::ast::*;
use super::expr::{compile, eval, number, Code, Scope};

const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// A diagram node annotated with its interface.
#[derive(Clone, Debug)]
pub struct Typed {
    pub iface: Interface,
    pub normal: NormalInterface,
    pub kind: TypedKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum TypedKind {
    Seq(Vec<Typed>),
    Tensor(Vec<Typed>),
    Player(String),
    Fun { name: String, contra: bool },
    Copy { ty: FiniteType, contra: bool },
    Delete { ty: FiniteType, contra: bool },
    Const { value: Value, ty: FiniteType, contra: bool },
    Id(Vec<Strand>),
    Counit(FiniteType),
    Braid { perm: Vec<usize>, strands: Vec<Strand> },
    /// An occurrence of a `let` box.
    Let(String, Arc<Typed>),
}

/// A typechecked program, ready to elaborate.
#[derive(Debug)]
pub struct Checked {
    pub program: Program,
    pub diagram: Typed,
    funs: HashMap<String, Func>,
    players: HashMap<String, OpenGame>,
}

fn type_err(span: Span, message: impl Into<String>) -> Error {
    Error::Type { line: span.line, col: span.col, message: message.into() }
}

fn variance(contra: bool) -> Variance {
    if contra {
        Variance::Contravariant
    } else {
        Variance::Covariant
    }
}

fn lifted_iface(dom: Vec<FiniteType>, cod: Vec<FiniteType>, contra: bool) -> Interface {
    if contra {
        Interface::new(vec![], cod, vec![], dom)
    } else {
        Interface::new(dom, vec![], cod, vec![])
    }
}

fn typed(iface: Interface, kind: TypedKind, span: Span) -> Typed {
    let normal = iface.reduce();
    Typed { iface, normal, kind, span }
}

#[derive(Default)]
struct Env {
    types: HashMap<String, FiniteType>,
    params: HashMap<String, Value>,
    labels: HashMap<String, Value>,
    funs: HashMap<String, Func>,
    players: HashMap<String, OpenGame>,
    lets: HashMap<String, Arc<Typed>>,
}

/// Typechecks a program. `overrides` replace the values of `param`
/// declarations by name.
pub fn typecheck(program: &Program, overrides: &[(String, String)]) -> Result<Checked> {
    let mut env = Env::default();
    for (name, _) in overrides {
        let declared = program
            .decls
            .iter()
            .any(|d| matches!(d, Decl::Param { name: n, .. } if n == name));
        if !declared {
            return Err(Error::Param(format!("no parameter named `{name}`")));
        }
    }
    for d in &program.decls {
        match d {
            Decl::Type { name, ty, span } => {
                let t = env.resolve(ty, *span)?;
                env.types.insert(name.clone(), t);
            }
            Decl::Param { name, value, span } => {
                let text = overrides
                    .iter()
                    .rev()
                    .find(|(n, _)| n == name)
                    .map(|(_, v)| v.as_str())
                    .unwrap_or(value);
                let v = number(text).ok_or_else(|| {
                    if text == value {
                        type_err(*span, format!("`{text}` is not a number"))
                    } else {
                        Error::Param(format!("`{text}` is not a valid value for `{name}`"))
                    }
                })?;
                env.params.insert(name.clone(), v);
            }
            Decl::Fun(f) => {
                let func = env.fun(f)?;
                env.funs.insert(f.name.clone(), func);
            }
            Decl::Player(p) => {
                let g = env.player(p)?;
                env.players.insert(p.name.clone(), g);
            }
            Decl::Let { name, expr, .. } => {
                let t = env.expr(expr)?;
                env.lets.insert(name.clone(), Arc::new(t));
            }
        }
    }
    let diagram = env.expr(&program.diagram)?;
    Ok(Checked { program: program.clone(), diagram, funs: env.funs, players: env.players })
}

impl Env {
    fn num(&self, n: &Num, span: Span) -> Result<Scaled> {
        let (text, span) = match n {
            Num::Lit(t) => (t.clone(), span),
            Num::Param(p, s) => {
                let v = self
                    .params
                    .get(p)
                    .ok_or_else(|| type_err(*s, format!("undeclared parameter `{p}`")))?;
                (v.to_string(), *s)
            }
        };
        Scaled::parse(&text)
            .or_else(|| text.parse::<f64>().ok().and_then(Scaled::from_f64))
            .ok_or_else(|| type_err(span, format!("`{text}` is not an exact decimal")))
    }

    fn int(&self, n: &Num, span: Span) -> Result<i64> {
        let s = self.num(n, span)?;
        if s.is_integral() {
            Ok(s.0 / crate::types::SCALE)
        } else {
            Err(type_err(span, format!("`{s}` is not an integer")))
        }
    }

    fn resolve(&mut self, t: &TypeExpr, span: Span) -> Result<FiniteType> {
        let wrap = |e: Error| type_err(span, e.to_string());
        Ok(match t {
            TypeExpr::Unit => FiniteType::Unit,
            TypeExpr::Real => FiniteType::Real,
            TypeExpr::Labels(names) => {
                let ty = FiniteType::labels(names).map_err(wrap)?;
                for n in names {
                    if !self.labels.contains_key(n) {
                        self.labels.insert(n.clone(), ty.label(n).unwrap_or(Value::Unit));
                    }
                }
                ty
            }
            TypeExpr::Nums(ns) => {
                let vals = ns.iter().map(|n| self.num(n, span)).collect::<Result<Vec<_>>>()?;
                FiniteType::num_set(vals).map_err(wrap)?
            }
            TypeExpr::Int(lo, hi) => FiniteType::int_range(self.int(lo, span)?, self.int(hi, span)?).map_err(wrap)?,
            TypeExpr::Grid(lo, hi, step) => {
                FiniteType::grid(self.num(lo, span)?, self.num(hi, span)?, self.num(step, span)?)
                    .map_err(wrap)?
            }
            TypeExpr::Product(parts) => {
                FiniteType::product(parts.iter().map(|p| self.resolve(p, span)).collect::<Result<Vec<_>>>()?)
            }
            TypeExpr::List(elem, n) => {
                let e = self.resolve(elem, span)?;
                let n = self.int(n, span)?;
                if n < 0 {
                    return Err(type_err(span, "list length must be non-negative"));
                }
                FiniteType::bounded_list(e, n as usize)
            }
            TypeExpr::Named(name, s) => self
                .types
                .get(name)
                .cloned()
                .ok_or_else(|| type_err(*s, format!("undeclared type `{name}`")))?,
        })
    }

    fn scope<'a>(&'a self, args: &'a [String]) -> Scope<'a> {
        Scope { args, params: &self.params, labels: &self.labels }
    }

    fn literal(&self, e: &FExpr, ty: &FiniteType) -> Result<Value> {
        let code = compile(e, &self.scope(&[]))?;
        let v = eval(&code, &[]).map_err(|m| type_err(e.span, m))?;
        ty.coerce(v).map_err(|err| type_err(e.span, err.to_string()))
    }

    fn fun(&mut self, f: &FunDecl) -> Result<Func> {
        let dom = f.params.iter().map(|(_, t)| self.resolve(t, f.span)).collect::<Result<Vec<_>>>()?;
        let cod = f.cod.iter().map(|t| self.resolve(t, f.span)).collect::<Result<Vec<_>>>()?;
        let func = match &f.body {
            FunBody::Expr(e) => {
                let names: Vec<String> = f.params.iter().map(|(n, _)| n.clone()).collect();
                let code = compile(e, &self.scope(&names))?;
                expr_func(&f.name, dom.clone(), cod.clone(), code)
            }
            FunBody::Table(rows) => self.table_func(f, &dom, &cod, rows)?,
        };
        let product = reduce_strands(&dom);
        if let Some(n) = product.cardinality().filter(|n| *n <= EXHAUSTIVE_LIMIT) {
            for i in 0..n {
                let x = product.value_at(i).unwrap_or(Value::Unit);
                let args = expand(&x, &dom);
                let strands: Vec<Value> =
                    args.into_iter().zip(&dom).filter(|(_, t)| **t != FiniteType::Unit).map(|(v, _)| v).collect();
                func.apply(&strands).map_err(|e| type_err(f.span, format!("{e} (at input {x})")))?;
            }
        }
        Ok(func)
    }

    fn table_func(
        &self,
        f: &FunDecl,
        dom: &[FiniteType],
        cod: &[FiniteType],
        rows: &[(Vec<FExpr>, Vec<FExpr>)],
    ) -> Result<Func> {
        let product = reduce_strands(dom);
        if product.cardinality().is_none() {
            return Err(type_err(f.span, format!("table `{}` needs a finite domain, not {product}", f.name)));
        }
        let mut map: BTreeMap<Vec<Value>, Vec<Value>> = BTreeMap::new();
        for (args, outs) in rows {
            let span = args.first().or(outs.first()).map(|e| e.span).unwrap_or(f.span);
            if args.len() != dom.len() || outs.len() != cod.len() {
                return Err(type_err(
                    span,
                    format!("table rows of `{}` need {} input(s) and {} output(s)", f.name, dom.len(), cod.len()),
                ));
            }
            let key = args.iter().zip(dom).map(|(e, t)| self.literal(e, t)).collect::<Result<Vec<_>>>()?;
            let val = outs.iter().zip(cod).map(|(e, t)| self.literal(e, t)).collect::<Result<Vec<_>>>()?;
            if map.insert(key.clone(), val).is_some() {
                return Err(type_err(span, format!("table `{}` lists {} twice", f.name, show_args(&key))));
            }
        }
        for x in product.values()? {
            let args = expand(&x, dom);
            if !map.contains_key(&args) {
                return Err(type_err(
                    f.span,
                    format!("table `{}` is not total: no row for {}", f.name, show_args(&args)),
                ));
            }
        }
        let name = f.name.clone();
        Ok(Func::new(&f.name, dom.to_vec(), cod.to_vec(), move |xs| {
            map.get(xs).cloned().ok_or_else(|| Error::Function {
                name: name.clone(),
                message: format!("no row for {}", show_args(xs)),
            })
        }))
    }

    fn player(&mut self, p: &PlayerDecl) -> Result<OpenGame> {
        let obs = p.obs.iter().map(|t| self.resolve(t, p.span)).collect::<Result<Vec<_>>>()?;
        let choice = self.resolve(&p.choice, p.span)?;
        let sel = match &p.selection {
            SelectionExpr::Argmax => Selection::Argmax,
            SelectionExpr::Fixpoint => Selection::Fixpoint,
            SelectionExpr::Match => Selection::MatchObservation,
            SelectionExpr::Prefer(t) => Selection::Prefer(self.resolve(t, p.span)?),
        };
        lift_player_strands(&p.name, obs, choice, sel).map_err(|e| type_err(p.span, e.to_string()))
    }

    fn strands(&mut self, ss: &[StrandExpr], span: Span) -> Result<Vec<Strand>> {
        ss.iter()
            .map(|s| {
                let ty = self.resolve(&s.ty, span)?;
                Ok(Strand { ty, dir: if s.up { Dir::Up } else { Dir::Down } })
            })
            .collect()
    }

    fn expr(&mut self, e: &Expr) -> Result<Typed> {
        match e {
            Expr::Seq(items, span) => {
                let parts = items.iter().map(|i| self.expr(i)).collect::<Result<Vec<_>>>()?;
                let mut acc = parts[0].iface.clone();
                for t in &parts[1..] {
                    let next = &t.iface;
                    if acc.fwd_out != next.fwd_in || acc.bwd_in != next.bwd_out {
                        let err = Error::Compose {
                            left: acc.to_string(),
                            right: next.to_string(),
                            bottom: show_boundary(&acc.bottom()),
                            top: show_boundary(&next.top()),
                        };
                        return Err(type_err(t.span, err.to_string()));
                    }
                    acc = Interface {
                        fwd_in: acc.fwd_in,
                        bwd_out: acc.bwd_out,
                        fwd_out: next.fwd_out.clone(),
                        bwd_in: next.bwd_in.clone(),
                    };
                }
                Ok(typed(acc, TypedKind::Seq(parts), *span))
            }
            Expr::Tensor(items, span) => {
                let parts = items.iter().map(|i| self.expr(i)).collect::<Result<Vec<_>>>()?;
                let cat = |f: fn(&Interface) -> &Vec<FiniteType>| -> Vec<FiniteType> {
                    parts.iter().flat_map(|t| f(&t.iface).iter().cloned()).collect()
                };
                let iface = Interface {
                    fwd_in: cat(|i| &i.fwd_in),
                    bwd_out: cat(|i| &i.bwd_out),
                    fwd_out: cat(|i| &i.fwd_out),
                    bwd_in: cat(|i| &i.bwd_in),
                };
                Ok(typed(iface, TypedKind::Tensor(parts), *span))
            }
            Expr::Atom(a) => self.atom(a),
        }
    }

    fn atom(&mut self, a: &Atom) -> Result<Typed> {
        let span = a.span;
        let bend = || type_err(span, "upward bend not permitted");
        let no_contra = |what: &str| -> Result<()> {
            if a.contra {
                Err(type_err(span, format!("only functions can be lifted contravariantly, not {what}")))
            } else {
                Ok(())
            }
        };
        let contra = a.contra;
        Ok(match &a.kind {
            AtomKind::Cup(_) => return Err(bend()),
            AtomKind::Counit(_) if contra => return Err(bend()),
            AtomKind::Counit(t) => {
                let ty = self.resolve(t, span)?;
                typed(Interface::new(vec![ty.clone()], vec![ty.clone()], vec![], vec![]), TypedKind::Counit(ty), span)
            }
            AtomKind::Copy(t) => {
                let ty = self.resolve(t, span)?;
                let iface = lifted_iface(vec![ty.clone()], vec![ty.clone(), ty.clone()], contra);
                typed(iface, TypedKind::Copy { ty, contra }, span)
            }
            AtomKind::Delete(t) => {
                let ty = self.resolve(t, span)?;
                let iface = lifted_iface(vec![ty.clone()], vec![], contra);
                typed(iface, TypedKind::Delete { ty, contra }, span)
            }
            AtomKind::Const(e, t) => {
                let ty = self.resolve(t, span)?;
                let value = self.literal(e, &ty)?;
                let iface = lifted_iface(vec![], vec![ty.clone()], contra);
                typed(iface, TypedKind::Const { value, ty, contra }, span)
            }
            AtomKind::Id(ss) => {
                no_contra("an identity")?;
                let strands = self.strands(ss, span)?;
                let (down, up) = split_dirs(&strands);
                let iface = Interface::new(down.clone(), up.clone(), down, up);
                typed(iface, TypedKind::Id(strands), span)
            }
            AtomKind::Braid(perm, ss) => {
                no_contra("a braid")?;
                let strands = self.strands(ss, span)?;
                let probe = braid(perm, &strands).map_err(|e| type_err(span, e.to_string()))?;
                typed(probe.interface().clone(), TypedKind::Braid { perm: perm.clone(), strands }, span)
            }
            AtomKind::Name(n) => {
                if let Some(f) = self.funs.get(n) {
                    let iface = lifted_iface(f.dom().to_vec(), f.cod().to_vec(), contra);
                    typed(iface, TypedKind::Fun { name: n.clone(), contra }, span)
                } else if let Some(g) = self.players.get(n) {
                    no_contra(&format!("player `{n}`"))?;
                    typed(g.interface().clone(), TypedKind::Player(n.clone()), span)
                } else if let Some(t) = self.lets.get(n) {
                    no_contra(&format!("box `{n}`"))?;
                    typed(t.iface.clone(), TypedKind::Let(n.clone(), t.clone()), span)
                } else if self.types.contains_key(n) || self.params.contains_key(n) {
                    return Err(type_err(span, format!("`{n}` is not a game")));
                } else {
                    return Err(type_err(span, format!("undeclared identifier `{n}`")));
                }
            }
        })
    }
}

fn split_dirs(strands: &[Strand]) -> (Vec<FiniteType>, Vec<FiniteType>) {
    let pick = |d: Dir| strands.iter().filter(|s| s.dir == d).map(|s| s.ty.clone()).collect();
    (pick(Dir::Down), pick(Dir::Up))
}

/// Splits a domain value into one value per declared argument.
fn expand(x: &Value, dom: &[FiniteType]) -> Vec<Value> {
    match dom.len() {
        0 => vec![],
        1 => vec![x.clone()],
        n => match x {
            Value::Tuple(items) if items.len() == n => items.clone(),
            _ => vec![x.clone()],
        },
    }
}

fn show_args(xs: &[Value]) -> String {
    format!("({})", xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))
}

fn expr_func(name: &str, dom: Vec<FiniteType>, cod: Vec<FiniteType>, code: Code) -> Func {
    let fname = name.to_string();
    let out_types = cod.clone();
    Func::new(name, dom, cod, move |xs| {
        let fail = |message: String| Error::Function { name: fname.clone(), message };
        let v = eval(&code, xs).map_err(fail)?;
        let parts = match (out_types.len(), v) {
            (1, v) => vec![v],
            (n, Value::Tuple(items)) if items.len() == n => items,
            (0, Value::Unit) => vec![],
            (n, v) => return Err(fail(format!("expected {n} results, got `{v}`"))),
        };
        parts
            .into_iter()
            .zip(&out_types)
            .map(|(v, t)| {
                let shown = v.to_string();
                t.coerce(v).map_err(|_| fail(format!("result `{shown}` escapes the codomain {t}")))
            })
            .collect()
    })
}

impl Checked {
    /// Builds the open game. Each `let` box is elaborated once and shared by
    /// all of its occurrences.
    pub fn elaborate(&self) -> Result<OpenGame> {
        let mut memo = HashMap::new();
        self.build(&self.diagram, &mut memo)
    }

    fn build(&self, t: &Typed, memo: &mut HashMap<String, OpenGame>) -> Result<OpenGame> {
        Ok(match &t.kind {
            TypedKind::Seq(items) => {
                let games = items.iter().map(|i| self.build(i, memo)).collect::<Result<Vec<_>>>()?;
                seq_all(&games)?
            }
            TypedKind::Tensor(items) => {
                let games = items.iter().map(|i| self.build(i, memo)).collect::<Result<Vec<_>>>()?;
                tensor_all(&games)?
            }
            TypedKind::Player(n) => self.players[n].clone(),
            TypedKind::Fun { name, contra } => lift(self.funs[name].clone(), variance(*contra)),
            TypedKind::Copy { ty, contra } => lift(copy_fn(ty.clone()), variance(*contra)),
            TypedKind::Delete { ty, contra } => lift(delete_fn(ty.clone()), variance(*contra)),
            TypedKind::Const { value, ty, contra } => lift(const_fn(value.clone(), ty.clone())?, variance(*contra)),
            TypedKind::Id(strands) => identity(strands),
            TypedKind::Counit(ty) => counit(ty.clone()),
            TypedKind::Braid { perm, strands } => braid(perm, strands)?,
            TypedKind::Let(name, body) => match memo.get(name) {
                Some(g) => g.clone(),
                None => {
                    let g = boxed(name, &self.build(body, memo)?);
                    memo.insert(name.clone(), g.clone());
                    g
                }
            },
        })
    }

    /// Declared functions by name.
    pub fn function(&self, name: &str) -> Option<&Func> {
        self.funs.get(name)
    }
}
