use std::fmt::Write;

use super::ast::*;

/// Renders a program as source text that parses back to an equal tree.
pub fn print(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.decls {
        out.push_str(&decl(d));
        out.push('\n');
    }
    let _ = writeln!(out, "diagram = {}", expr(&p.diagram));
    out
}

fn decl(d: &Decl) -> String {
    match d {
        Decl::Type { name, ty, .. } => format!("type {name} = {}", type_expr(ty)),
        Decl::Param { name, value, .. } => format!("param {name} = {value}"),
        Decl::Let { name, expr: e, .. } => format!("let {name} = {}", expr(e)),
        Decl::Player(p) => {
            let sel = match &p.selection {
                SelectionExpr::Argmax => "argmax".to_string(),
                SelectionExpr::Fixpoint => "fixpoint".to_string(),
                SelectionExpr::Match => "match".to_string(),
                SelectionExpr::Prefer(t) => format!("prefer({})", type_expr(t)),
            };
            format!("player {} : {} -> {} {sel}", p.name, types(&p.obs), type_expr(&p.choice))
        }
        Decl::Fun(f) => {
            let params: Vec<String> =
                f.params.iter().map(|(n, t)| format!("{n}: {}", type_expr(t))).collect();
            let body = match &f.body {
                FunBody::Expr(e) => fexpr(e),
                FunBody::Table(rows) => {
                    let rows: Vec<String> = rows
                        .iter()
                        .map(|(a, o)| format!("    {} => {}", fexprs(a), fexprs(o)))
                        .collect();
                    format!("table {{\n{}\n}}", rows.join(";\n"))
                }
            };
            format!("fun {}({}) -> {} = {body}", f.name, params.join(", "), types(&f.cod))
        }
    }
}

fn types(ts: &[TypeExpr]) -> String {
    ts.iter().map(type_expr).collect::<Vec<_>>().join(", ")
}

fn num(n: &Num) -> &str {
    match n {
        Num::Lit(s) | Num::Param(s, _) => s,
    }
}

pub fn type_expr(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Unit => "unit".into(),
        TypeExpr::Real => "real".into(),
        TypeExpr::Labels(names) => format!("{{{}}}", names.join(", ")),
        TypeExpr::Nums(ns) => format!("{{{}}}", ns.iter().map(num).collect::<Vec<_>>().join(", ")),
        TypeExpr::Int(lo, hi) => format!("int({}, {})", num(lo), num(hi)),
        TypeExpr::Grid(lo, hi, s) => format!("grid({}, {}, {})", num(lo), num(hi), num(s)),
        TypeExpr::Product(parts) => format!("({})", types(parts)),
        TypeExpr::List(elem, n) => format!("list({}, {})", type_expr(elem), num(n)),
        TypeExpr::Named(n, _) => n.clone(),
    }
}

fn strands(ss: &[StrandExpr]) -> String {
    ss.iter()
        .map(|s| format!("{}{}", type_expr(&s.ty), if s.up { "*" } else { "" }))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::Seq(items, _) => items
            .iter()
            .map(|i| match i {
                Expr::Seq(..) => format!("({})", expr(i)),
                _ => expr(i),
            })
            .collect::<Vec<_>>()
            .join(" >> "),
        Expr::Tensor(items, _) => items
            .iter()
            .map(|i| match i {
                Expr::Atom(_) => expr(i),
                _ => format!("({})", expr(i)),
            })
            .collect::<Vec<_>>()
            .join(" || "),
        Expr::Atom(a) => {
            let body = match &a.kind {
                AtomKind::Copy(t) => format!("copy[{}]", type_expr(t)),
                AtomKind::Delete(t) => format!("delete[{}]", type_expr(t)),
                AtomKind::Counit(t) => format!("counit[{}]", type_expr(t)),
                AtomKind::Cup(t) => format!("cup[{}]", type_expr(t)),
                AtomKind::Id(ss) => format!("id[{}]", strands(ss)),
                AtomKind::Braid(perm, ss) => {
                    let perm: Vec<String> = perm.iter().map(|i| i.to_string()).collect();
                    format!("braid[{}; {}]", perm.join(", "), strands(ss))
                }
                AtomKind::Const(v, t) => format!("const({} : {})", fexpr(v), type_expr(t)),
                AtomKind::Name(n) => n.clone(),
            };
            if a.contra {
                format!("{body}^*")
            } else {
                body
            }
        }
    }
}

fn fexprs(es: &[FExpr]) -> String {
    es.iter().map(fexpr).collect::<Vec<_>>().join(", ")
}

/// Binary operations are fully parenthesised.
pub fn fexpr(e: &FExpr) -> String {
    match &e.kind {
        FKind::Num(n) => n.clone(),
        FKind::Name(n) => n.clone(),
        FKind::Neg(x) => format!("-{}", atomic(x)),
        FKind::Not(x) => format!("not {}", atomic(x)),
        FKind::Bin(op, a, b) => format!("({} {} {})", fexpr(a), op.symbol(), fexpr(b)),
        FKind::If(c, t, f) => format!("(if {} then {} else {})", fexpr(c), fexpr(t), fexpr(f)),
        FKind::Call(n, args) => format!("{n}({})", fexprs(args)),
        FKind::Tuple(items) => format!("({})", fexprs(items)),
        FKind::List(items) => format!("[{}]", fexprs(items)),
    }
}

fn atomic(e: &FExpr) -> String {
    match &e.kind {
        FKind::Neg(_) | FKind::Not(_) => format!("({})", fexpr(e)),
        _ => fexpr(e),
    }
}
