use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::types::{FiniteType, Scaled};

use super::ast::*;
use super::lexer::{lex, Tok, Token};

const KEYWORDS: &[&str] = &[
    "type", "param", "fun", "player", "let", "diagram", "unit", "real", "int", "grid", "list",
    "copy", "delete", "id", "counit", "cup", "braid", "const", "argmax", "prefer", "fixpoint",
    "match", "table", "if", "then", "else", "and", "or", "not",
];

pub fn parse(src: &str) -> Result<Program> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    p.program()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let s = self.span();
        Err(Error::Syntax { line: s.line, col: s.col, message: message.into() })
    }

    fn found(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.found()))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(format!("expected `{k}`, found {}", self.found()))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected an identifier, found {}", self.found())),
        }
    }

    fn program(&mut self) -> Result<Program> {
        let mut decls = Vec::new();
        let mut seen: HashMap<String, Span> = HashMap::new();
        loop {
            while self.eat_sym(";") {}
            if self.is_kw("diagram") {
                break;
            }
            let decl = match self.peek() {
                Tok::Ident(k) if k == "type" => self.type_decl()?,
                Tok::Ident(k) if k == "param" => self.param_decl()?,
                Tok::Ident(k) if k == "fun" => self.fun_decl()?,
                Tok::Ident(k) if k == "player" => self.player_decl()?,
                Tok::Ident(k) if k == "let" => self.let_decl()?,
                Tok::Eof => return self.err("missing `diagram = ...`"),
                _ => return self.err(format!("expected a declaration, found {}", self.found())),
            };
            if let Some(prev) = seen.insert(decl.name().to_string(), decl.span()) {
                let s = decl.span();
                return Err(Error::Syntax {
                    line: s.line,
                    col: s.col,
                    message: format!(
                        "duplicate identifier `{}` (first declared at {}:{})",
                        decl.name(),
                        prev.line,
                        prev.col
                    ),
                });
            }
            decls.push(decl);
        }
        self.expect_kw("diagram")?;
        self.expect_sym("=")?;
        let diagram = self.expr()?;
        while self.eat_sym(";") {}
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected {} after the diagram", self.found()));
        }
        Ok(Program { decls, diagram })
    }

    fn type_decl(&mut self) -> Result<Decl> {
        let span = self.bump().span;
        let name = self.ident()?;
        self.expect_sym("=")?;
        let ty = self.type_expr()?;
        Ok(Decl::Type { name, ty, span })
    }

    fn param_decl(&mut self) -> Result<Decl> {
        let span = self.bump().span;
        let name = self.ident()?;
        self.expect_sym("=")?;
        let value = self.signed_number()?;
        Ok(Decl::Param { name, value, span })
    }

    fn signed_number(&mut self) -> Result<String> {
        let neg = self.eat_sym("-");
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(if neg { format!("-{n}") } else { n })
            }
            _ => self.err(format!("expected a number, found {}", self.found())),
        }
    }

    fn num(&mut self) -> Result<Num> {
        if let Tok::Ident(_) = self.peek() {
            let span = self.span();
            return Ok(Num::Param(self.ident()?, span));
        }
        Ok(Num::Lit(self.signed_number()?))
    }

    fn type_expr(&mut self) -> Result<TypeExpr> {
        let span = self.span();
        if self.eat_kw("unit") {
            return Ok(TypeExpr::Unit);
        }
        if self.eat_kw("real") {
            return Ok(TypeExpr::Real);
        }
        if self.eat_kw("int") {
            self.expect_sym("(")?;
            let lo = self.num()?;
            self.expect_sym(",")?;
            let hi = self.num()?;
            self.expect_sym(")")?;
            return Ok(TypeExpr::Int(lo, hi));
        }
        if self.eat_kw("grid") {
            self.expect_sym("(")?;
            let lo = self.num()?;
            self.expect_sym(",")?;
            let hi = self.num()?;
            self.expect_sym(",")?;
            let step = self.num()?;
            self.expect_sym(")")?;
            if let (Num::Lit(a), Num::Lit(b), Num::Lit(c)) = (&lo, &hi, &step) {
                let exact = |t: &str| {
                    Scaled::parse(t).ok_or_else(|| Error::Syntax {
                        line: span.line,
                        col: span.col,
                        message: format!("`{t}` has more than 6 decimal places"),
                    })
                };
                FiniteType::grid(exact(a)?, exact(b)?, exact(c)?).map_err(|e| Error::Syntax {
                    line: span.line,
                    col: span.col,
                    message: e.to_string(),
                })?;
            }
            return Ok(TypeExpr::Grid(lo, hi, step));
        }
        if self.eat_kw("list") {
            self.expect_sym("(")?;
            let elem = self.type_expr()?;
            self.expect_sym(",")?;
            let n = self.num()?;
            self.expect_sym(")")?;
            return Ok(TypeExpr::List(Box::new(elem), n));
        }
        if self.eat_sym("{") {
            if self.eat_sym("}") {
                return Ok(TypeExpr::Labels(Vec::new()));
            }
            if matches!(self.peek(), Tok::Number(_)) || self.is_sym("-") {
                let mut nums = vec![Num::Lit(self.signed_number()?)];
                while self.eat_sym(",") {
                    nums.push(Num::Lit(self.signed_number()?));
                }
                self.expect_sym("}")?;
                return Ok(TypeExpr::Nums(nums));
            }
            let mut names = vec![self.ident()?];
            while self.eat_sym(",") {
                names.push(self.ident()?);
            }
            self.expect_sym("}")?;
            return Ok(TypeExpr::Labels(names));
        }
        if self.eat_sym("(") {
            let mut parts = vec![self.type_expr()?];
            while self.eat_sym(",") {
                parts.push(self.type_expr()?);
            }
            self.expect_sym(")")?;
            return Ok(if parts.len() == 1 { parts.remove(0) } else { TypeExpr::Product(parts) });
        }
        match self.peek() {
            Tok::Ident(_) => Ok(TypeExpr::Named(self.ident()?, span)),
            _ => self.err(format!("expected a type, found {}", self.found())),
        }
    }

    fn type_list(&mut self) -> Result<Vec<TypeExpr>> {
        let mut out = vec![self.type_expr()?];
        while self.eat_sym(",") {
            out.push(self.type_expr()?);
        }
        Ok(out)
    }

    fn fun_decl(&mut self) -> Result<Decl> {
        let span = self.bump().span;
        let name = self.ident()?;
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if !self.is_sym(")") {
            loop {
                let p = self.ident()?;
                self.expect_sym(":")?;
                params.push((p, self.type_expr()?));
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        self.expect_sym("->")?;
        let cod = self.type_list()?;
        self.expect_sym("=")?;
        let body = if self.eat_kw("table") {
            self.expect_sym("{")?;
            let mut rows = Vec::new();
            while !self.eat_sym("}") {
                let args = if self.is_sym("=>") { Vec::new() } else { self.fexpr_list()? };
                self.expect_sym("=>")?;
                let outs = self.fexpr_list()?;
                rows.push((args, outs));
                if !self.eat_sym(";") {
                    self.expect_sym("}")?;
                    break;
                }
            }
            FunBody::Table(rows)
        } else {
            FunBody::Expr(self.fexpr()?)
        };
        Ok(Decl::Fun(FunDecl { name, params, cod, body, span }))
    }

    fn player_decl(&mut self) -> Result<Decl> {
        let span = self.bump().span;
        let name = self.ident()?;
        self.expect_sym(":")?;
        let obs = self.type_list()?;
        self.expect_sym("->")?;
        let choice = self.type_expr()?;
        let selection = if self.eat_kw("argmax") {
            SelectionExpr::Argmax
        } else if self.eat_kw("fixpoint") {
            SelectionExpr::Fixpoint
        } else if self.eat_kw("match") {
            SelectionExpr::Match
        } else if self.eat_kw("prefer") {
            self.expect_sym("(")?;
            let t = self.type_expr()?;
            self.expect_sym(")")?;
            SelectionExpr::Prefer(t)
        } else {
            return self.err(format!(
                "expected `argmax`, `prefer`, `fixpoint` or `match`, found {}",
                self.found()
            ));
        };
        Ok(Decl::Player(PlayerDecl { name, obs, choice, selection, span }))
    }

    fn let_decl(&mut self) -> Result<Decl> {
        let span = self.bump().span;
        let name = self.ident()?;
        self.expect_sym("=")?;
        let expr = self.expr()?;
        Ok(Decl::Let { name, expr, span })
    }

    fn expr(&mut self) -> Result<Expr> {
        let span = self.span();
        let mut items = vec![self.term()?];
        while self.eat_sym(">>") {
            items.push(self.term()?);
        }
        Ok(if items.len() == 1 { items.remove(0) } else { Expr::Seq(items, span) })
    }

    fn term(&mut self) -> Result<Expr> {
        let span = self.span();
        let mut items = vec![self.factor()?];
        while self.eat_sym("||") {
            items.push(self.factor()?);
        }
        Ok(if items.len() == 1 { items.remove(0) } else { Expr::Tensor(items, span) })
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat_sym("(") {
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        let span = self.span();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.err(format!("expected a diagram, found {}", self.found())),
        };
        let kind = match kw.as_str() {
            "copy" | "delete" | "counit" | "cup" => {
                self.bump();
                self.expect_sym("[")?;
                let t = self.type_expr()?;
                self.expect_sym("]")?;
                match kw.as_str() {
                    "copy" => AtomKind::Copy(t),
                    "delete" => AtomKind::Delete(t),
                    "counit" => AtomKind::Counit(t),
                    _ => AtomKind::Cup(t),
                }
            }
            "id" => {
                self.bump();
                self.expect_sym("[")?;
                let strands = self.strands()?;
                self.expect_sym("]")?;
                AtomKind::Id(strands)
            }
            "braid" => {
                self.bump();
                self.expect_sym("[")?;
                let mut perm = Vec::new();
                loop {
                    match self.peek().clone() {
                        Tok::Number(n) => {
                            self.bump();
                            perm.push(n.parse::<usize>().or_else(|_| {
                                self.err(format!("`{n}` is not a strand index"))
                            })?);
                        }
                        _ => return self.err(format!("expected a strand index, found {}", self.found())),
                    }
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")?;
                let strands = self.strands()?;
                self.expect_sym("]")?;
                AtomKind::Braid(perm, strands)
            }
            "const" => {
                self.bump();
                self.expect_sym("(")?;
                let v = self.fexpr()?;
                self.expect_sym(":")?;
                let t = self.type_expr()?;
                self.expect_sym(")")?;
                AtomKind::Const(v, t)
            }
            _ => AtomKind::Name(self.ident()?),
        };
        let contra = if self.is_sym("^") {
            self.bump();
            self.expect_sym("*")?;
            true
        } else {
            false
        };
        Ok(Expr::Atom(Atom { kind, contra, span }))
    }

    fn strands(&mut self) -> Result<Vec<StrandExpr>> {
        let mut out = Vec::new();
        if self.is_sym("]") {
            return Ok(out);
        }
        loop {
            let ty = self.type_expr()?;
            let up = self.eat_sym("*");
            out.push(StrandExpr { ty, up });
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn fexpr_list(&mut self) -> Result<Vec<FExpr>> {
        let mut out = vec![self.fexpr()?];
        while self.eat_sym(",") {
            out.push(self.fexpr()?);
        }
        Ok(out)
    }

    fn fexpr(&mut self) -> Result<FExpr> {
        if self.is_kw("if") {
            let span = self.bump().span;
            let c = self.fexpr()?;
            self.expect_kw("then")?;
            let t = self.fexpr()?;
            self.expect_kw("else")?;
            let e = self.fexpr()?;
            return Ok(FExpr { kind: FKind::If(Box::new(c), Box::new(t), Box::new(e)), span });
        }
        self.binary(0)
    }

    fn binop(&self) -> Option<(BinOp, u8)> {
        let op = match self.peek() {
            Tok::Ident(k) if k == "or" => BinOp::Or,
            Tok::Ident(k) if k == "and" => BinOp::And,
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            Tok::Sym("/") => BinOp::Div,
            _ => return None,
        };
        let prec = match op {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div => 5,
        };
        Some((op, prec))
    }

    fn binary(&mut self, min: u8) -> Result<FExpr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.binop() {
            if prec <= min {
                break;
            }
            let span = self.bump().span;
            let rhs = self.binary(prec)?;
            lhs = FExpr { kind: FKind::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<FExpr> {
        let span = self.span();
        if self.eat_sym("-") {
            let e = self.unary()?;
            return Ok(FExpr { kind: FKind::Neg(Box::new(e)), span });
        }
        if self.eat_kw("not") {
            let e = self.unary()?;
            return Ok(FExpr { kind: FKind::Not(Box::new(e)), span });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<FExpr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(FExpr { kind: FKind::Num(n), span })
            }
            Tok::Sym("(") => {
                self.bump();
                let mut items = vec![self.fexpr()?];
                while self.eat_sym(",") {
                    items.push(self.fexpr()?);
                }
                self.expect_sym(")")?;
                Ok(if items.len() == 1 {
                    items.remove(0)
                } else {
                    FExpr { kind: FKind::Tuple(items), span }
                })
            }
            Tok::Sym("[") => {
                self.bump();
                let items = if self.is_sym("]") { Vec::new() } else { self.fexpr_list()? };
                self.expect_sym("]")?;
                Ok(FExpr { kind: FKind::List(items), span })
            }
            Tok::Ident(k) if k == "if" => self.fexpr(),
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.eat_sym("(") {
                    let args = if self.is_sym(")") { Vec::new() } else { self.fexpr_list()? };
                    self.expect_sym(")")?;
                    Ok(FExpr { kind: FKind::Call(name, args), span })
                } else {
                    Ok(FExpr { kind: FKind::Name(name), span })
                }
            }
            _ => self.err(format!("expected an expression, found {}", self.found())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let p = parse("diagram = id[unit]").unwrap();
        assert!(p.decls.is_empty());
        assert!(matches!(p.diagram, Expr::Atom(Atom { kind: AtomKind::Id(_), contra: false, .. })));
    }

    #[test]
    fn empty_diagram_is_a_syntax_error_at_eof() {
        let err = parse("diagram = ").unwrap_err();
        assert_eq!(err.to_string(), "1:11: syntax error: expected a diagram, found end of input");
    }

    #[test]
    fn tensor_binds_tighter_than_seq() {
        let p = parse("player A : unit -> {x} argmax\ndiagram = A || A >> A").unwrap();
        match p.diagram {
            Expr::Seq(items, _) => {
                assert_eq!(items.len(), 2);
                assert!(matches!(items[0], Expr::Tensor(..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_identifiers_are_rejected() {
        let err = parse("type T = {a}\ntype T = {b}\ndiagram = id[T]").unwrap_err();
        assert!(err.to_string().starts_with("2:1: syntax error: duplicate identifier `T`"), "{err}");
    }

    #[test]
    fn unbalanced_parentheses() {
        assert!(matches!(parse("diagram = (id[unit]"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("diagram = id[unit])"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn grid_bounds_must_sit_on_the_step() {
        let err = parse("type P = grid(0, 10, 3)\ndiagram = id[P]").unwrap_err();
        assert!(err.to_string().contains("multiples of the step"), "{err}");
        assert!(parse("type P = grid(0, 12, 3)\ndiagram = id[P]").is_ok());
    }

    #[test]
    fn arithmetic_precedence() {
        let p = parse("fun f(x: int(0, 3)) -> real = 1 + 2 * x - 3\ndiagram = f").unwrap();
        let Decl::Fun(f) = &p.decls[0] else { panic!() };
        let FunBody::Expr(e) = &f.body else { panic!() };
        let FKind::Bin(BinOp::Sub, lhs, _) = &e.kind else { panic!("{e:?}") };
        assert!(matches!(lhs.kind, FKind::Bin(BinOp::Add, _, _)));
    }

    #[test]
    fn contravariant_suffix_and_tables() {
        let src = "type T = {a, b}\nfun f(x: T) -> T = table { a => b; b => a }\ndiagram = f^* >> copy[T]^*";
        let p = parse(src).unwrap();
        let Expr::Seq(items, _) = &p.diagram else { panic!() };
        assert!(matches!(items[0], Expr::Atom(Atom { contra: true, .. })));
    }
}
