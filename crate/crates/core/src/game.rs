//! Open games as the 4-tuple (Σ, P, C, E).
//!
//! Games are evaluated on strand vectors: `play` maps the values on the
//! downward strands entering the top to those leaving the bottom, `coplay`
//! maps top inputs and upward strands entering the bottom to the upward
//! strands leaving the top. The public entry points accept values of the
//! reduced [`NormalInterface`] types instead.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interface::{pack, unpack, Interface, NormalInterface};
use crate::strategy::{Leaf, Profile, StrategySpace};
use crate::types::{FiniteType, Value};

type Body = dyn Fn(&[Value]) -> Result<Vec<Value>> + Send + Sync;

/// A named total function between strand lists.
#[derive(Clone)]
pub struct Func {
    name: Arc<str>,
    dom: Vec<FiniteType>,
    cod: Vec<FiniteType>,
    body: Arc<Body>,
}

impl fmt::Debug for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Func({}: {:?} -> {:?})", self.name, self.dom, self.cod)
    }
}

impl Func {
    /// `body` receives one value per entry of `dom`, unit strands included,
    /// and must return one value per entry of `cod`.
    pub fn new<F>(name: &str, dom: Vec<FiniteType>, cod: Vec<FiniteType>, body: F) -> Self
    where
        F: Fn(&[Value]) -> Result<Vec<Value>> + Send + Sync + 'static,
    {
        Func { name: name.into(), dom, cod, body: Arc::new(body) }
    }

    /// A function of one strand to one strand.
    pub fn unary<F>(name: &str, dom: FiniteType, cod: FiniteType, body: F) -> Self
    where
        F: Fn(&Value) -> Value + Send + Sync + 'static,
    {
        Func::new(name, vec![dom], vec![cod], move |xs| Ok(vec![body(&xs[0])]))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dom(&self) -> &[FiniteType] {
        &self.dom
    }

    pub fn cod(&self) -> &[FiniteType] {
        &self.cod
    }

    /// Applies the function to values on the non-unit strands of its domain
    /// and returns the non-unit strands of its codomain.
    pub fn apply(&self, strands: &[Value]) -> Result<Vec<Value>> {
        let mut args = Vec::with_capacity(self.dom.len());
        let mut it = strands.iter();
        for t in &self.dom {
            if *t == FiniteType::Unit {
                args.push(Value::Unit);
            } else {
                args.push(it.next().cloned().ok_or_else(|| self.arity("too few inputs"))?);
            }
        }
        if it.next().is_some() {
            return Err(self.arity("too many inputs"));
        }
        let out = (self.body)(&args)?;
        if out.len() != self.cod.len() {
            return Err(self.arity("wrong number of outputs"));
        }
        let mut result = Vec::with_capacity(out.len());
        for (v, t) in out.into_iter().zip(&self.cod) {
            if !t.contains(&v) {
                return Err(Error::Function {
                    name: self.name.to_string(),
                    message: format!("result `{v}` escapes the codomain {t}"),
                });
            }
            if *t != FiniteType::Unit {
                result.push(v);
            }
        }
        Ok(result)
    }

    fn arity(&self, what: &str) -> Error {
        Error::Function { name: self.name.to_string(), message: what.to_string() }
    }
}

/// How a player selects among choices given a continuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    /// Maximise a real-valued outcome.
    Argmax,
    /// Maximise in the canonical order of a finite outcome type.
    Prefer(FiniteType),
    /// Choose a fixed point of the continuation; outcome type equals choice type.
    Fixpoint,
    /// Choose the observed value; observation type equals choice type.
    MatchObservation,
}

impl Selection {
    /// Type of the outcome string returned to the player, if it has one.
    pub fn outcome_type(&self, choice: &FiniteType) -> Option<FiniteType> {
        match self {
            Selection::Argmax => Some(FiniteType::Real),
            Selection::Prefer(t) => Some(t.clone()),
            Selection::Fixpoint => Some(choice.clone()),
            Selection::MatchObservation => None,
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Argmax => write!(f, "argmax"),
            Selection::Prefer(t) => write!(f, "prefer({t})"),
            Selection::Fixpoint => write!(f, "fixpoint"),
            Selection::MatchObservation => write!(f, "match"),
        }
    }
}

/// A total map from choices `Y` to outcomes `R`.
#[derive(Clone)]
pub struct Continuation {
    domain: FiniteType,
    f: Arc<dyn Fn(&Value) -> Value + Send + Sync>,
}

impl fmt::Debug for Continuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Continuation({})", self.domain)
    }
}

impl Continuation {
    pub fn new<F>(domain: FiniteType, f: F) -> Self
    where
        F: Fn(&Value) -> Value + Send + Sync + 'static,
    {
        Continuation { domain, f: Arc::new(f) }
    }

    pub fn constant(domain: FiniteType, v: Value) -> Self {
        Continuation::new(domain, move |_| v.clone())
    }

    /// The continuation of a closed game.
    pub fn trivial() -> Self {
        Continuation::constant(FiniteType::Unit, Value::Unit)
    }

    /// Looks outcomes up in a table; missing entries map to `Unit`.
    pub fn from_table(domain: FiniteType, table: Vec<(Value, Value)>) -> Self {
        let map: std::collections::BTreeMap<Value, Value> = table.into_iter().collect();
        Continuation::new(domain, move |y| map.get(y).cloned().unwrap_or(Value::Unit))
    }

    pub fn domain(&self) -> &FiniteType {
        &self.domain
    }

    pub fn apply(&self, y: &Value) -> Value {
        (self.f)(y)
    }

    /// All `(y, k(y))` pairs in canonical order of `y`.
    pub fn tabulate(&self) -> Result<Vec<(Value, Value)>> {
        Ok(self.domain.values()?.map(|y| {
            let r = self.apply(&y);
            (y, r)
        }).collect())
    }
}

/// The choices a selection function admits for a tabulated context.
pub fn select(sel: &Selection, k: &Continuation, tol: f64) -> Result<Vec<Value>> {
    let table = k.tabulate()?;
    if table.is_empty() {
        return Err(Error::Selection("empty choice type".into()));
    }
    match sel {
        Selection::Argmax => {
            let scores: Vec<f64> = table
                .iter()
                .map(|(_, r)| r.as_f64().ok_or_else(|| non_numeric(r)))
                .collect::<Result<_>>()?;
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok(table
                .into_iter()
                .zip(scores)
                .filter(|(_, s)| *s >= max - tol)
                .map(|((y, _), _)| y)
                .collect())
        }
        Selection::Prefer(_) => {
            let max = table.iter().map(|(_, r)| r).max().cloned().unwrap_or(Value::Unit);
            Ok(table.into_iter().filter(|(_, r)| *r == max).map(|(y, _)| y).collect())
        }
        Selection::Fixpoint => Ok(table.into_iter().filter(|(y, r)| y == r).map(|(y, _)| y).collect()),
        Selection::MatchObservation => Err(Error::Selection(
            "match selection depends on the observation, not on the continuation".into(),
        )),
    }
}

fn non_numeric(r: &Value) -> Error {
    Error::Selection(format!("argmax needs numeric outcomes, got `{r}`"))
}

/// A player atom: observation strands, one choice strand, and an outcome
/// strand determined by its selection function.
#[derive(Debug)]
pub struct PlayerAtom {
    pub leaf: Arc<Leaf>,
    pub obs_strands: Vec<FiniteType>,
    pub selection: Selection,
}

impl PlayerAtom {
    fn choice_strands(&self, c: &Value) -> Vec<Value> {
        if self.leaf.choice == FiniteType::Unit {
            Vec::new()
        } else {
            vec![c.clone()]
        }
    }

    fn lookup(&self, table: &[Value], x: &[Value]) -> Result<(Value, Value)> {
        let obs = pack(x);
        let idx = self.leaf.obs.index_of(&obs).ok_or_else(|| Error::NotInhabitant {
            value: obs.to_string(),
            ty: self.leaf.obs.to_string(),
        })?;
        let chosen = table
            .get(idx as usize)
            .cloned()
            .ok_or_else(|| Error::ProfileShape(format!("table of `{}` too short", self.leaf.name)))?;
        Ok((obs, chosen))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

#[derive(Debug)]
pub(crate) enum Node {
    Player(Arc<PlayerAtom>),
    Lift(Func, Variance),
    Counit,
    Seq(OpenGame, OpenGame),
    Tensor(OpenGame, OpenGame),
    Boxed(OpenGame),
}

#[derive(Debug)]
struct Inner {
    iface: Interface,
    normal: NormalInterface,
    sigma: StrategySpace,
    node: Node,
    leaves: usize,
}

/// An open game. Cheap to clone; immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct OpenGame(Arc<Inner>);

/// How the universal quantifier over the first factor's strategies in
/// sequential composition is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Quantifier {
    /// Quantify over the set of values the first factor can play, which is
    /// exactly `{P_G(σ′, x) | σ′ ∈ Σ_G}` computed structurally.
    #[default]
    Reachable,
    /// Iterate every `σ′ ∈ Σ_G` by index.
    Literal,
}

/// What a player's equilibrium check found.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerEvent {
    /// Position of the player among the game's leaves.
    pub leaf: usize,
    pub player: Arc<str>,
    pub obs: Value,
    pub chosen: Value,
    pub chosen_outcome: Value,
    /// First best choice in canonical order with its outcome, if any.
    pub best: Option<(Value, Value)>,
    pub ok: bool,
    /// Whether the observation is the one reached by the profile itself.
    pub on_path: bool,
}

/// Evaluation parameters shared by one equilibrium check.
pub struct EvalCtx<'a> {
    pub tol: f64,
    pub budget: u64,
    pub used: &'a AtomicU64,
    pub quantifier: Quantifier,
    pub short_circuit: bool,
    pub events: Option<&'a RefCell<Vec<PlayerEvent>>>,
}

impl EvalCtx<'_> {
    fn tick(&self) -> Result<()> {
        let n = self.used.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        if n > self.budget {
            Err(Error::BudgetExceeded(self.budget))
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy)]
struct Pos {
    leaf: usize,
    on_path: bool,
}

type Cont<'a> = &'a dyn Fn(&[Value]) -> Result<Vec<Value>>;

/// Forward values of one play, shaped like the game tree. A counit keeps
/// its input, which is also what it sends back up.
struct Trace {
    out: Vec<Value>,
    kids: Kids,
}

enum Kids {
    Atom { x: Vec<Value> },
    Two(Box<Trace>, Box<Trace>),
}

impl OpenGame {
    pub(crate) fn build(iface: Interface, sigma: StrategySpace, node: Node) -> Self {
        let leaves = sigma.leaves().len();
        let normal = iface.reduce();
        OpenGame(Arc::new(Inner { iface, normal, sigma, node, leaves }))
    }

    pub fn interface(&self) -> &Interface {
        &self.0.iface
    }

    pub fn normal(&self) -> &NormalInterface {
        &self.0.normal
    }

    pub fn sigma(&self) -> &StrategySpace {
        &self.0.sigma
    }

    /// Number of player leaves.
    pub fn leaf_count(&self) -> usize {
        self.0.leaves
    }

    /// Σ is a singleton and E always holds.
    pub fn is_trivial(&self) -> bool {
        self.0.leaves == 0
    }

    /// `P(σ, x)` on normal-interface values.
    pub fn play(&self, sigma: &Profile, x: &Value) -> Result<Value> {
        self.0.sigma.check(sigma)?;
        let xs = self.unpack_in(x, &self.0.iface.fwd_in, &self.0.normal.x)?;
        Ok(pack(&self.play_strands(sigma, &xs)?))
    }

    /// `C(σ, x, r)` on normal-interface values.
    pub fn coplay(&self, sigma: &Profile, x: &Value, r: &Value) -> Result<Value> {
        self.0.sigma.check(sigma)?;
        let xs = self.unpack_in(x, &self.0.iface.fwd_in, &self.0.normal.x)?;
        let rs = self.unpack_in(r, &self.0.iface.bwd_in, &self.0.normal.r)?;
        Ok(pack(&self.coplay_strands(sigma, &xs, &rs)?))
    }

    /// `σ ∈ E(x, k)` with default evaluation settings.
    pub fn eq_member(&self, sigma: &Profile, x: &Value, k: &Continuation) -> Result<bool> {
        let used = AtomicU64::new(0);
        let ctx = EvalCtx {
            tol: 1e-9,
            budget: u64::MAX,
            used: &used,
            quantifier: Quantifier::Reachable,
            short_circuit: true,
            events: None,
        };
        self.eq_member_with(sigma, x, k, &ctx)
    }

    pub fn eq_member_with(
        &self,
        sigma: &Profile,
        x: &Value,
        k: &Continuation,
        ctx: &EvalCtx<'_>,
    ) -> Result<bool> {
        self.0.sigma.check(sigma)?;
        let xs = self.unpack_in(x, &self.0.iface.fwd_in, &self.0.normal.x)?;
        let n_r = self.0.iface.bwd_in.len();
        let r_ty = self.0.normal.r.clone();
        let kk = move |ys: &[Value]| -> Result<Vec<Value>> {
            let r = k.apply(&pack(ys));
            if !r_ty.contains(&r) {
                return Err(Error::NotInhabitant { value: r.to_string(), ty: r_ty.to_string() });
            }
            unpack(&r, n_r).ok_or_else(|| Error::NotInhabitant {
                value: r.to_string(),
                ty: r_ty.to_string(),
            })
        };
        self.eq(sigma, &xs, &kk, ctx, Pos { leaf: 0, on_path: true })
    }

    fn unpack_in(&self, v: &Value, strands: &[FiniteType], ty: &FiniteType) -> Result<Vec<Value>> {
        if !ty.contains(v) {
            return Err(Error::NotInhabitant { value: v.to_string(), ty: ty.to_string() });
        }
        unpack(v, strands.len())
            .ok_or_else(|| Error::NotInhabitant { value: v.to_string(), ty: ty.to_string() })
    }

    pub(crate) fn play_strands(&self, sigma: &Profile, x: &[Value]) -> Result<Vec<Value>> {
        match &self.0.node {
            Node::Player(atom) => {
                let table = player_table(sigma)?;
                let (_, chosen) = atom.lookup(table, x)?;
                Ok(atom.choice_strands(&chosen))
            }
            Node::Lift(f, Variance::Covariant) => f.apply(x),
            Node::Lift(_, Variance::Contravariant) | Node::Counit => Ok(Vec::new()),
            Node::Seq(g, h) => {
                let (s1, s2) = sigma.split()?;
                h.play_strands(s2, &g.play_strands(s1, x)?)
            }
            Node::Tensor(g, h) => {
                let (s1, s2) = sigma.split()?;
                let (x1, x2) = x.split_at(g.0.iface.fwd_in.len());
                let mut out = g.play_strands(s1, x1)?;
                out.extend(h.play_strands(s2, x2)?);
                Ok(out)
            }
            Node::Boxed(g) => g.play_strands(sigma, x),
        }
    }

    pub(crate) fn coplay_strands(&self, sigma: &Profile, x: &[Value], r: &[Value]) -> Result<Vec<Value>> {
        let t = self.forward(sigma, x)?;
        self.backward(sigma, &t, r)
    }

    /// Runs play and records what coplay needs, so a later backward pass
    /// does not recompute it.
    fn forward(&self, sigma: &Profile, x: &[Value]) -> Result<Trace> {
        Ok(match &self.0.node {
            Node::Player(_) | Node::Lift(..) => {
                Trace { out: self.play_strands(sigma, x)?, kids: Kids::Atom { x: Vec::new() } }
            }
            Node::Counit => Trace { out: Vec::new(), kids: Kids::Atom { x: x.to_vec() } },
            Node::Seq(g, h) => {
                let (s1, s2) = sigma.split()?;
                let tg = g.forward(s1, x)?;
                let th = h.forward(s2, &tg.out)?;
                Trace { out: th.out.clone(), kids: Kids::Two(Box::new(tg), Box::new(th)) }
            }
            Node::Tensor(g, h) => {
                let (s1, s2) = sigma.split()?;
                let (x1, x2) = x.split_at(g.0.iface.fwd_in.len());
                let tg = g.forward(s1, x1)?;
                let th = h.forward(s2, x2)?;
                let mut out = tg.out.clone();
                out.extend(th.out.iter().cloned());
                Trace { out, kids: Kids::Two(Box::new(tg), Box::new(th)) }
            }
            Node::Boxed(g) => g.forward(sigma, x)?,
        })
    }

    fn backward(&self, sigma: &Profile, t: &Trace, r: &[Value]) -> Result<Vec<Value>> {
        match (&self.0.node, &t.kids) {
            (Node::Player(_) | Node::Lift(_, Variance::Covariant), _) => Ok(Vec::new()),
            (Node::Lift(f, Variance::Contravariant), _) => f.apply(r),
            (Node::Counit, Kids::Atom { x }) => Ok(x.clone()),
            (Node::Seq(g, h), Kids::Two(tg, th)) => {
                let (s1, s2) = sigma.split()?;
                let s = h.backward(s2, th, r)?;
                g.backward(s1, tg, &s)
            }
            (Node::Tensor(g, h), Kids::Two(tg, th)) => {
                let (s1, s2) = sigma.split()?;
                let (r1, r2) = r.split_at(g.0.iface.bwd_in.len());
                let mut out = g.backward(s1, tg, r1)?;
                out.extend(h.backward(s2, th, r2)?);
                Ok(out)
            }
            (Node::Boxed(g), _) => g.backward(sigma, t, r),
            _ => Err(Error::ProfileShape("trace does not match the game".into())),
        }
    }

    /// Every value `P(σ, x)` for some σ ∈ Σ, in canonical order.
    pub(crate) fn reach(&self, x: &[Value], ctx: &EvalCtx<'_>) -> Result<BTreeSet<Vec<Value>>> {
        if self.is_trivial() {
            return Ok(BTreeSet::from([self.play_strands(&self.0.sigma.decode(0)?, x)?]));
        }
        let out = match &self.0.node {
            Node::Player(atom) => atom
                .leaf
                .choice
                .values()?
                .map(|c| atom.choice_strands(&c))
                .collect(),
            Node::Lift(f, Variance::Covariant) => BTreeSet::from([f.apply(x)?]),
            Node::Lift(_, Variance::Contravariant) | Node::Counit => BTreeSet::from([Vec::new()]),
            Node::Seq(g, h) => {
                let mut out = BTreeSet::new();
                for y in g.reach(x, ctx)? {
                    out.extend(h.reach(&y, ctx)?);
                    self.guard(out.len(), ctx)?;
                }
                out
            }
            Node::Tensor(g, h) => {
                let (x1, x2) = x.split_at(g.0.iface.fwd_in.len());
                let left = g.reach(x1, ctx)?;
                let right = h.reach(x2, ctx)?;
                self.guard(left.len().saturating_mul(right.len()), ctx)?;
                let mut out = BTreeSet::new();
                for a in &left {
                    for b in &right {
                        let mut v = a.clone();
                        v.extend(b.iter().cloned());
                        out.insert(v);
                    }
                }
                out
            }
            Node::Boxed(g) => g.reach(x, ctx)?,
        };
        Ok(out)
    }

    fn guard(&self, n: usize, ctx: &EvalCtx<'_>) -> Result<()> {
        if n as u64 > ctx.budget {
            Err(Error::BudgetExceeded(ctx.budget))
        } else {
            Ok(())
        }
    }

    fn eq(&self, sigma: &Profile, x: &[Value], k: Cont<'_>, ctx: &EvalCtx<'_>, pos: Pos) -> Result<bool> {
        ctx.tick()?;
        if self.is_trivial() {
            return Ok(true);
        }
        match &self.0.node {
            Node::Player(atom) => player_eq(atom, player_table(sigma)?, x, k, ctx, pos),
            Node::Lift(..) | Node::Counit => Ok(true),
            Node::Seq(g, h) => {
                let (s1, s2) = sigma.split()?;
                let k_prime = |y: &[Value]| -> Result<Vec<Value>> {
                    let t = h.forward(s2, y)?;
                    let r = k(&t.out)?;
                    h.backward(s2, &t, &r)
                };
                let first = g.is_trivial() || g.eq(s1, x, &k_prime, ctx, pos)?;
                if !first && ctx.short_circuit {
                    return Ok(false);
                }
                if h.is_trivial() {
                    return Ok(first);
                }
                let actual = g.play_strands(s1, x)?;
                let inner = |y: &[Value]| -> Result<bool> {
                    let p = Pos { leaf: pos.leaf + g.0.leaves, on_path: pos.on_path && y == actual.as_slice() };
                    h.eq(s2, y, k, ctx, p)
                };
                let mut second = true;
                match ctx.quantifier {
                    Quantifier::Reachable => {
                        for y in g.reach(x, ctx)? {
                            if !inner(&y)? {
                                second = false;
                                if ctx.short_circuit {
                                    break;
                                }
                            }
                        }
                    }
                    Quantifier::Literal => {
                        let space = g.sigma();
                        let card = space.cardinality().ok_or_else(|| Error::SpaceTooLarge {
                            cardinality: space.big_cardinality().to_string(),
                            budget: ctx.budget,
                        })?;
                        for i in 0..card {
                            let alt = space.decode(i)?;
                            let y = g.play_strands(&alt, x)?;
                            if !inner(&y)? {
                                second = false;
                                if ctx.short_circuit {
                                    break;
                                }
                            }
                        }
                    }
                }
                Ok(first && second)
            }
            Node::Tensor(g, h) => {
                let (s1, s2) = sigma.split()?;
                let (x1, x2) = x.split_at(g.0.iface.fwd_in.len());
                let y1 = g.play_strands(s1, x1)?;
                let y2 = h.play_strands(s2, x2)?;
                let n1 = g.0.iface.bwd_in.len();
                let k1 = |a: &[Value]| -> Result<Vec<Value>> {
                    let mut full = a.to_vec();
                    full.extend(y2.iter().cloned());
                    let mut r = k(&full)?;
                    r.truncate(n1);
                    Ok(r)
                };
                let k2 = |b: &[Value]| -> Result<Vec<Value>> {
                    let mut full = y1.clone();
                    full.extend_from_slice(b);
                    let r = k(&full)?;
                    Ok(r[n1..].to_vec())
                };
                let left = g.eq(s1, x1, &k1, ctx, pos)?;
                if !left && ctx.short_circuit {
                    return Ok(false);
                }
                let right_pos = Pos { leaf: pos.leaf + g.0.leaves, on_path: pos.on_path };
                let right = h.eq(s2, x2, &k2, ctx, right_pos)?;
                Ok(left && right)
            }
            Node::Boxed(g) => g.eq(sigma, x, k, ctx, pos),
        }
    }
}

fn player_table(sigma: &Profile) -> Result<&[Value]> {
    match sigma {
        Profile::Table(t) => Ok(t),
        _ => Err(Error::ProfileShape("expected a player table".into())),
    }
}

fn player_eq(
    atom: &PlayerAtom,
    table: &[Value],
    x: &[Value],
    k: Cont<'_>,
    ctx: &EvalCtx<'_>,
    pos: Pos,
) -> Result<bool> {
    let (obs, chosen) = atom.lookup(table, x)?;
    let outcome = |c: &Value| -> Result<Value> { Ok(pack(&k(&atom.choice_strands(c))?)) };
    let (ok, chosen_outcome, best) = match &atom.selection {
        Selection::MatchObservation => {
            let ok = chosen == obs;
            (ok, Value::Unit, Some((obs.clone(), Value::Unit)))
        }
        Selection::Argmax => {
            let mine = outcome(&chosen)?;
            let score = mine.as_f64().ok_or_else(|| non_numeric(&mine))?;
            let mut best: Option<(Value, Value, f64)> = None;
            for c in atom.leaf.choice.values()? {
                let r = outcome(&c)?;
                let s = r.as_f64().ok_or_else(|| non_numeric(&r))?;
                if best.as_ref().is_none_or(|(_, _, b)| s > *b) {
                    best = Some((c, r, s));
                }
            }
            let (bc, br, bs) = best.ok_or_else(|| Error::EmptyChoice(atom.leaf.name.to_string()))?;
            (score >= bs - ctx.tol, mine, Some((bc, br)))
        }
        Selection::Prefer(_) => {
            let mine = outcome(&chosen)?;
            let mut best: Option<(Value, Value)> = None;
            for c in atom.leaf.choice.values()? {
                let r = outcome(&c)?;
                if best.as_ref().is_none_or(|(_, b)| r > *b) {
                    best = Some((c, r));
                }
            }
            let ok = best.as_ref().is_some_and(|(_, b)| mine >= *b);
            (ok, mine, best)
        }
        Selection::Fixpoint => {
            let mine = outcome(&chosen)?;
            let ok = mine == chosen;
            let mut best = None;
            if !ok {
                for c in atom.leaf.choice.values()? {
                    let r = outcome(&c)?;
                    if r == c {
                        best = Some((c, r));
                        break;
                    }
                }
            }
            (ok, mine, best.or_else(|| ok.then(|| (chosen.clone(), chosen.clone()))))
        }
    };
    if let Some(events) = ctx.events {
        let ev = PlayerEvent {
            leaf: pos.leaf,
            player: atom.leaf.name.clone(),
            obs,
            chosen,
            chosen_outcome,
            best,
            ok,
            on_path: pos.on_path,
        };
        let mut events = events.borrow_mut();
        if !events.contains(&ev) {
            events.push(ev);
        }
    }
    Ok(ok)
}
