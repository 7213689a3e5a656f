//! Function bodies: names are resolved once, then the code is evaluated on
//! argument values.
//!
//! Integers stay integers under `+`, `-` and `*`; anything else is computed
//! in `f64`. Comparisons and boolean operators yield `1` or `0`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::types::{Scaled, Value};

use super::ast::{BinOp, FExpr, FKind};

#[derive(Clone, Copy, Debug)]
pub(crate) enum Builtin {
    Max,
    Min,
    Abs,
    Cons,
    Take,
    Len,
}

#[derive(Clone, Debug)]
pub(crate) enum Code {
    Const(Value),
    Arg(usize),
    Neg(Box<Code>),
    Not(Box<Code>),
    Bin(BinOp, Box<Code>, Box<Code>),
    If(Box<Code>, Box<Code>, Box<Code>),
    Call(Builtin, Vec<Code>),
    Tuple(Vec<Code>),
    List(Vec<Code>),
}

/// Names visible inside a function body, innermost first.
pub(crate) struct Scope<'a> {
    pub args: &'a [String],
    pub params: &'a HashMap<String, Value>,
    pub labels: &'a HashMap<String, Value>,
}

pub(crate) fn number(text: &str) -> Option<Value> {
    if let Ok(i) = text.parse::<i64>() {
        return Some(Value::Int(i));
    }
    Scaled::parse(text)?;
    text.parse::<f64>().ok().map(Value::Real)
}

fn type_err(e: &FExpr, message: String) -> Error {
    Error::Type { line: e.span.line, col: e.span.col, message }
}

pub(crate) fn compile(e: &FExpr, scope: &Scope<'_>) -> Result<Code> {
    let sub = |x: &FExpr| compile(x, scope).map(Box::new);
    Ok(match &e.kind {
        FKind::Num(n) => {
            Code::Const(number(n).ok_or_else(|| type_err(e, format!("`{n}` is not a number")))?)
        }
        FKind::Name(n) => {
            if let Some(i) = scope.args.iter().position(|a| a == n) {
                Code::Arg(i)
            } else if let Some(v) = scope.params.get(n).or_else(|| scope.labels.get(n)) {
                Code::Const(v.clone())
            } else {
                return Err(type_err(e, format!("undeclared identifier `{n}`")));
            }
        }
        FKind::Neg(x) => Code::Neg(sub(x)?),
        FKind::Not(x) => Code::Not(sub(x)?),
        FKind::Bin(op, a, b) => Code::Bin(*op, sub(a)?, sub(b)?),
        FKind::If(c, t, f) => Code::If(sub(c)?, sub(t)?, sub(f)?),
        FKind::Tuple(items) => Code::Tuple(items.iter().map(|i| compile(i, scope)).collect::<Result<_>>()?),
        FKind::List(items) => Code::List(items.iter().map(|i| compile(i, scope)).collect::<Result<_>>()?),
        FKind::Call(name, args) => {
            let (b, arity) = match name.as_str() {
                "max" => (Builtin::Max, None),
                "min" => (Builtin::Min, None),
                "abs" => (Builtin::Abs, Some(1)),
                "cons" => (Builtin::Cons, Some(2)),
                "take" => (Builtin::Take, Some(2)),
                "len" => (Builtin::Len, Some(1)),
                _ => return Err(type_err(e, format!("unknown function `{name}`"))),
            };
            match arity {
                Some(n) if n != args.len() => {
                    return Err(type_err(e, format!("`{name}` takes {n} argument(s), got {}", args.len())))
                }
                None if args.is_empty() => {
                    return Err(type_err(e, format!("`{name}` needs at least one argument")))
                }
                _ => {}
            }
            Code::Call(b, args.iter().map(|i| compile(i, scope)).collect::<Result<_>>()?)
        }
    })
}

enum Num {
    I(i64),
    F(f64),
}

fn num(v: &Value) -> std::result::Result<Num, String> {
    match v {
        Value::Int(i) => Ok(Num::I(*i)),
        _ => v.as_f64().map(Num::F).ok_or_else(|| format!("`{v}` is not a number")),
    }
}

fn float(n: &Num) -> f64 {
    match n {
        Num::I(i) => *i as f64,
        Num::F(x) => *x,
    }
}

fn boolean(b: bool) -> Value {
    Value::Int(b as i64)
}

fn truthy(v: &Value) -> std::result::Result<bool, String> {
    Ok(float(&num(v)?) != 0.0)
}

fn arith(op: BinOp, a: &Value, b: &Value) -> std::result::Result<Value, String> {
    let (x, y) = (num(a)?, num(b)?);
    if let (Num::I(i), Num::I(j)) = (&x, &y) {
        let r = match op {
            BinOp::Add => i.checked_add(*j),
            BinOp::Sub => i.checked_sub(*j),
            BinOp::Mul => i.checked_mul(*j),
            _ => None,
        };
        if let Some(r) = r {
            return Ok(Value::Int(r));
        }
    }
    let (x, y) = (float(&x), float(&y));
    let r = match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div if y == 0.0 => return Err("division by zero".into()),
        BinOp::Div => x / y,
        _ => unreachable!(),
    };
    if r.is_finite() {
        Ok(Value::Real(r))
    } else {
        Err(format!("{x} {} {y} is not finite", op.symbol()))
    }
}

pub(crate) fn eval(code: &Code, args: &[Value]) -> std::result::Result<Value, String> {
    Ok(match code {
        Code::Const(v) => v.clone(),
        Code::Arg(i) => args[*i].clone(),
        Code::Neg(x) => match num(&eval(x, args)?)? {
            Num::I(i) => Value::Int(i.checked_neg().ok_or("integer overflow")?),
            Num::F(f) => Value::Real(-f),
        },
        Code::Not(x) => boolean(!truthy(&eval(x, args)?)?),
        Code::Bin(op, a, b) => {
            let a = eval(a, args)?;
            match op {
                BinOp::And => return Ok(boolean(truthy(&a)? && truthy(&eval(b, args)?)?)),
                BinOp::Or => return Ok(boolean(truthy(&a)? || truthy(&eval(b, args)?)?)),
                _ => {}
            }
            let b = eval(b, args)?;
            match op {
                BinOp::Eq => boolean(a.loose_eq(&b)),
                BinOp::Ne => boolean(!a.loose_eq(&b)),
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                    let (x, y) = (float(&num(&a)?), float(&num(&b)?));
                    boolean(match op {
                        BinOp::Lt => x < y,
                        BinOp::Le => x <= y,
                        BinOp::Gt => x > y,
                        _ => x >= y,
                    })
                }
                _ => arith(*op, &a, &b)?,
            }
        }
        Code::If(c, t, f) => {
            if truthy(&eval(c, args)?)? {
                eval(t, args)?
            } else {
                eval(f, args)?
            }
        }
        Code::Tuple(items) => Value::Tuple(items.iter().map(|i| eval(i, args)).collect::<std::result::Result<_, _>>()?),
        Code::List(items) => Value::List(items.iter().map(|i| eval(i, args)).collect::<std::result::Result<_, _>>()?),
        Code::Call(b, items) => {
            let vals: Vec<Value> = items.iter().map(|i| eval(i, args)).collect::<std::result::Result<_, _>>()?;
            call(*b, vals)?
        }
    })
}

fn call(b: Builtin, mut vals: Vec<Value>) -> std::result::Result<Value, String> {
    match b {
        Builtin::Max | Builtin::Min => {
            let nums: Vec<Num> = vals.iter().map(num).collect::<std::result::Result<_, _>>()?;
            let pick = |x: f64, y: f64| if matches!(b, Builtin::Max) { x > y } else { x < y };
            let mut best = 0;
            for (i, n) in nums.iter().enumerate() {
                if pick(float(n), float(&nums[best])) {
                    best = i;
                }
            }
            Ok(vals.swap_remove(best))
        }
        Builtin::Abs => Ok(match num(&vals[0])? {
            Num::I(i) => Value::Int(i.checked_abs().ok_or("integer overflow")?),
            Num::F(f) => Value::Real(f.abs()),
        }),
        Builtin::Cons => {
            let list = vals.pop().unwrap_or(Value::Unit);
            let head = vals.pop().unwrap_or(Value::Unit);
            match list {
                Value::List(mut items) => {
                    items.insert(0, head);
                    Ok(Value::List(items))
                }
                other => Err(format!("cons expects a list, got `{other}`")),
            }
        }
        Builtin::Take => {
            let n = match num(&vals[1])? {
                Num::I(i) if i >= 0 => i as usize,
                _ => return Err(format!("take expects a count, got `{}`", vals[1])),
            };
            match &vals[0] {
                Value::List(items) => Ok(Value::List(items.iter().take(n).cloned().collect())),
                other => Err(format!("take expects a list, got `{other}`")),
            }
        }
        Builtin::Len => match &vals[0] {
            Value::List(items) => Ok(Value::Int(items.len() as i64)),
            other => Err(format!("len expects a list, got `{other}`")),
        },
    }
}
