//! Syntax tree of `.og` files. Spans never take part in equality, so a
//! printed and re-parsed tree compares equal to the original.

#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub diagram: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Type { name: String, ty: TypeExpr, span: Span },
    Param { name: String, value: String, span: Span },
    Fun(FunDecl),
    Player(PlayerDecl),
    Let { name: String, expr: Expr, span: Span },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Type { name, .. } | Decl::Param { name, .. } | Decl::Let { name, .. } => name,
            Decl::Fun(f) => &f.name,
            Decl::Player(p) => &p.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Decl::Type { span, .. } | Decl::Param { span, .. } | Decl::Let { span, .. } => *span,
            Decl::Fun(f) => f.span,
            Decl::Player(p) => p.span,
        }
    }
}

/// A number in a type expression: a literal or a `param` name.
#[derive(Clone, Debug, PartialEq)]
pub enum Num {
    Lit(String),
    Param(String, Span),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeExpr {
    Unit,
    Real,
    Labels(Vec<String>),
    Nums(Vec<Num>),
    Int(Num, Num),
    Grid(Num, Num, Num),
    Product(Vec<TypeExpr>),
    List(Box<TypeExpr>, Num),
    Named(String, Span),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrandExpr {
    pub ty: TypeExpr,
    pub up: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunDecl {
    pub name: String,
    pub params: Vec<(String, TypeExpr)>,
    pub cod: Vec<TypeExpr>,
    pub body: FunBody,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunBody {
    Expr(FExpr),
    /// Rows of argument literals and result literals.
    Table(Vec<(Vec<FExpr>, Vec<FExpr>)>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SelectionExpr {
    Argmax,
    Prefer(TypeExpr),
    Fixpoint,
    Match,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerDecl {
    pub name: String,
    pub obs: Vec<TypeExpr>,
    pub choice: TypeExpr,
    pub selection: SelectionExpr,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FExpr {
    pub kind: FKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FKind {
    Num(String),
    Name(String),
    Neg(Box<FExpr>),
    Not(Box<FExpr>),
    Bin(BinOp, Box<FExpr>, Box<FExpr>),
    If(Box<FExpr>, Box<FExpr>, Box<FExpr>),
    Call(String, Vec<FExpr>),
    Tuple(Vec<FExpr>),
    List(Vec<FExpr>),
}

/// A diagram expression. `Seq` and `Tensor` hold at least two items.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Seq(Vec<Expr>, Span),
    Tensor(Vec<Expr>, Span),
    Atom(Atom),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Seq(_, s) | Expr::Tensor(_, s) => *s,
            Expr::Atom(a) => a.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub kind: AtomKind,
    /// Written with the `^*` suffix.
    pub contra: bool,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AtomKind {
    Copy(TypeExpr),
    Delete(TypeExpr),
    Id(Vec<StrandExpr>),
    Counit(TypeExpr),
    Cup(TypeExpr),
    Braid(Vec<usize>, Vec<StrandExpr>),
    Const(FExpr, TypeExpr),
    Name(String),
}
