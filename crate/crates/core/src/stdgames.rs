//! Builders for the standard example games.
//!
//! Each builder produces a game that agrees pointwise with the matching file
//! under `fixtures/`: same player names, same leaf order, same play, coplay
//! and equilibrium predicate. Outcome boxes are built from one lifted
//! function and counits rather than the wire-level plumbing of the files.

use std::sync::Arc;

use crate::combinators::{
    boxed, braid, compose_seq, constant, copy, counit, lift_contravariant, lift_covariant,
    lift_player, seq_all, tensor_all,
};
use crate::equilibrium::ClosedGame;
use crate::error::{Error, Result};
use crate::game::{Func, OpenGame, Selection};
use crate::interface::Strand;
use crate::oracle::SequentialSpec;
use crate::types::{FiniteType, Value};

/// Linear inverse demand `P = a − b·Q` with constant unit cost `c`.
#[derive(Clone, Debug)]
pub struct CournotParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Quantities each firm may choose.
    pub grid: FiniteType,
}

#[derive(Clone, Debug)]
pub struct RepeatedParams {
    pub stage: CournotParams,
    pub periods: usize,
    pub beta: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct UltimatumParams {
    pub n: i64,
}

/// The two drawings of the ultimatum game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UltimatumVariant {
    /// One utility function per player.
    Separate,
    /// A single function returning both utilities.
    Combined,
}

fn num(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Function { name: "payoff".into(), message: format!("`{v}` is not a number") })
}

fn reals(n: usize) -> Vec<FiniteType> {
    vec![FiniteType::Real; n]
}

fn ids(strands: Vec<Strand>) -> OpenGame {
    crate::combinators::identity(&strands)
}

fn down(types: &[FiniteType]) -> OpenGame {
    ids(types.iter().cloned().map(Strand::down).collect())
}

fn up_reals(n: usize) -> OpenGame {
    ids(reals(n).into_iter().map(Strand::up).collect())
}

fn counits(n: usize) -> Result<OpenGame> {
    tensor_all(&vec![counit(FiniteType::Real); n])
}

fn tensor_of(parts: &[OpenGame]) -> OpenGame {
    tensor_all(parts).expect("non-empty tensor")
}

/// `x ↦ (x, ..., x)` with `n` outputs.
fn fan(t: &FiniteType, n: usize) -> Func {
    Func::new("copy", vec![t.clone()], vec![t.clone(); n], move |x| Ok(vec![x[0].clone(); n]))
}

fn payoff_fn<F>(name: &str, dom: Vec<FiniteType>, players: usize, f: F) -> Func
where
    F: Fn(&[Value]) -> Result<Vec<f64>> + Send + Sync + 'static,
{
    Func::new(name, dom, reals(players), move |xs| Ok(f(xs)?.into_iter().map(Value::Real).collect()))
}

/// `(f ⊗ id[real*ⁿ]) ; τⁿ`: every player is paid its entry of `f`.
fn outcome(f: Func) -> Result<OpenGame> {
    let n = f.cod().len();
    seq_all(&[tensor_of(&[lift_covariant(f), up_reals(n)]), counits(n)?])
}

fn argmax(name: &str, obs: FiniteType, choice: &FiniteType) -> Result<OpenGame> {
    lift_player(name, obs, choice.clone(), Selection::Argmax)
}

fn closed(g: OpenGame) -> Result<ClosedGame> {
    ClosedGame::try_from(g)
}

/// Two simultaneous utility maximisers with payoffs `u(y1, y2)`.
pub fn bimatrix<F>(y1: &FiniteType, y2: &FiniteType, u: F) -> Result<ClosedGame>
where
    F: Fn(&Value, &Value) -> (f64, f64) + Send + Sync + 'static,
{
    let players = tensor_of(&[argmax("P1", FiniteType::Unit, y1)?, argmax("P2", FiniteType::Unit, y2)?]);
    let f = payoff_fn("U", vec![y1.clone(), y2.clone()], 2, move |x| {
        let (a, b) = u(&x[0], &x[1]);
        Ok(vec![a, b])
    });
    closed(compose_seq(&players, &outcome(f)?)?)
}

/// Meeting in New York: both players receive the one shared utility.
pub fn meeting_ny() -> Result<ClosedGame> {
    let place = FiniteType::labels(["GCT", "ES"])?;
    let players =
        tensor_of(&[argmax("P1", FiniteType::Unit, &place)?, argmax("P2", FiniteType::Unit, &place)?]);
    let u = Func::new("U", vec![place.clone(), place], vec![FiniteType::Real], |x| {
        let score = match (x[0].label_name(), x[1].label_name()) {
            (Some("GCT"), Some("GCT")) => 2.0,
            (Some("ES"), Some("ES")) => 1.0,
            _ => 0.0,
        };
        Ok(vec![Value::Real(score)])
    });
    closed(seq_all(&[
        players,
        tensor_of(&[lift_covariant(u), up_reals(2)]),
        tensor_of(&[copy(FiniteType::Real), up_reals(2)]),
        counits(2)?,
    ])?)
}

/// A leader `P1` whose choice is observed by a follower `P2`.
pub fn sequential_game(spec: &SequentialSpec) -> Result<ClosedGame> {
    let (u1, u2) = (spec.u1.clone(), spec.u2.clone());
    let u = payoff_fn("U", vec![spec.leader.clone(), spec.follower.clone()], 2, move |x| {
        Ok(vec![u1(&x[0], &x[1]), u2(&x[0], &x[1])])
    });
    closed(seq_all(&[leader_follower(&spec.leader, &spec.follower)?, outcome(u)?])?)
}

/// `P1 ; (copy ⊗ id) ; (id ⊗ id ⊗ P2)`, leaving `Y1 ⊗ Y2` below.
fn leader_follower(y1: &FiniteType, y2: &FiniteType) -> Result<OpenGame> {
    seq_all(&[
        argmax("P1", FiniteType::Unit, y1)?,
        tensor_of(&[copy(y1.clone()), up_reals(1)]),
        tensor_of(&[down(std::slice::from_ref(y1)), up_reals(1), argmax("P2", y1.clone(), y2)?]),
    ])
}

/// Proposer offers `o ∈ 0..=N`; the responder accepts or rejects it.
pub fn ultimatum(p: UltimatumParams, variant: UltimatumVariant) -> Result<ClosedGame> {
    let n = p.n;
    let offer = FiniteType::int_range(0, n)?;
    let resp = FiniteType::labels(["A", "R"])?;
    let accepted = |r: &Value| r.label_name() == Some("A");
    match variant {
        UltimatumVariant::Combined => sequential_game(&SequentialSpec {
            leader: offer,
            follower: resp,
            u1: Arc::new(move |o, r| if accepted(r) { num(o).unwrap_or(0.0) } else { 0.0 }),
            u2: Arc::new(move |o, r| if accepted(r) { n as f64 - num(o).unwrap_or(0.0) } else { 0.0 }),
        }),
        UltimatumVariant::Separate => {
            let dom = vec![offer.clone(), resp.clone()];
            let u1 = payoff_fn("U1", dom.clone(), 1, move |x| {
                Ok(vec![if accepted(&x[1]) { num(&x[0])? } else { 0.0 }])
            });
            let u2 = payoff_fn("U2", dom, 1, move |x| {
                Ok(vec![if accepted(&x[1]) { n as f64 - num(&x[0])? } else { 0.0 }])
            });
            let strands: Vec<Strand> =
                [&offer, &offer, &resp, &resp].into_iter().cloned().map(Strand::down).collect();
            closed(seq_all(&[
                leader_follower(&offer, &resp)?,
                tensor_of(&[copy(offer.clone()), copy(resp.clone()), up_reals(2)]),
                tensor_of(&[braid(&[0, 2, 1, 3], &strands)?, up_reals(2)]),
                tensor_of(&[lift_covariant(u1), lift_covariant(u2), up_reals(2)]),
                counits(2)?,
            ])?)
        }
    }
}

/// The boxed profit function `Pi : Q ⊗ ℝ ⊗ Q ⊗ ℝ* ⊗ ℝ* → I`; the middle
/// strand carries the unit cost.
fn cournot_pi(p: &CournotParams) -> Result<OpenGame> {
    let (a, b) = (p.a, p.b);
    let f = payoff_fn("Pi", vec![p.grid.clone(), FiniteType::Real, p.grid.clone()], 2, move |x| {
        let (q1, c, q2) = (num(&x[0])?, num(&x[1])?, num(&x[2])?);
        let margin = a - b * (q1 + q2) - c;
        Ok(vec![margin * q1, margin * q2])
    });
    Ok(boxed("Pi", &outcome(f)?))
}

fn unit_cost(p: &CournotParams) -> Result<OpenGame> {
    constant(Value::Real(p.c), FiniteType::Real)
}

/// Simultaneous quantity competition.
pub fn cournot(p: &CournotParams) -> Result<ClosedGame> {
    let firms = tensor_of(&[
        argmax("P1", FiniteType::Unit, &p.grid)?,
        unit_cost(p)?,
        argmax("P2", FiniteType::Unit, &p.grid)?,
    ]);
    closed(compose_seq(&firms, &cournot_pi(p)?)?)
}

/// Quantity leadership: `P2` observes `P1`'s quantity.
pub fn stackelberg(p: &CournotParams) -> Result<ClosedGame> {
    let q = &p.grid;
    closed(seq_all(&[
        argmax("P1", FiniteType::Unit, q)?,
        tensor_of(&[copy(q.clone()), up_reals(1)]),
        tensor_of(&[down(std::slice::from_ref(q)), unit_cost(p)?, up_reals(1), argmax("P2", q.clone(), q)?]),
        cournot_pi(p)?,
    ])?)
}

/// History of past plays, most recent first.
fn history_type(elem: &FiniteType, periods: usize) -> FiniteType {
    FiniteType::bounded_list(elem.clone(), periods)
}

/// One period: `H ⊗ (ℝ*)ⁿ → H ⊗ (ℝ*)ⁿ`. Players observe the history and
/// receive their stage profit plus `β` times what the rest of the game
/// reports for them.
fn stage(p: &RepeatedParams, names: &[&str]) -> Result<OpenGame> {
    let n = names.len();
    let q = &p.stage.grid;
    let elem = if n == 1 { q.clone() } else { FiniteType::product(vec![q.clone(); n]) };
    let h = history_type(&elem, p.periods);

    let mut players = vec![down(std::slice::from_ref(&h))];
    for name in names {
        players.push(argmax(name, h.clone(), q)?);
    }
    players.push(up_reals(n));

    let (a, b, c, periods) = (p.stage.a, p.stage.b, p.stage.c, p.periods);
    let h_out = h.clone();
    let mut dom = vec![h.clone()];
    dom.extend(vec![q.clone(); n]);
    let mut cod = vec![h.clone()];
    cod.extend(reals(n));
    let step = Func::new("stage", dom, cod, move |x| {
        let qs = &x[1..];
        let total = qs.iter().map(num).sum::<Result<f64>>()?;
        let played = if qs.len() == 1 { qs[0].clone() } else { Value::Tuple(qs.to_vec()) };
        let Value::List(past) = &x[0] else {
            return Err(Error::Function { name: "stage".into(), message: format!("`{}` is not a history", x[0]) });
        };
        let mut next = vec![played];
        next.extend(past.iter().take(periods - 1).cloned());
        let mut out = vec![h_out.coerce(Value::List(next))?];
        for qi in qs {
            out.push(Value::Real((a - b * total - c) * num(qi)?));
        }
        Ok(out)
    });

    let beta = p.beta;
    let back = Func::new("accumulate", reals(2 * n), reals(2 * n), move |x| {
        let (u, s) = x.split_at(n);
        let v: Vec<Value> = u
            .iter()
            .zip(s)
            .map(|(u, s)| Ok(Value::Real(num(u)? + beta * num(s)?)))
            .collect::<Result<_>>()?;
        Ok([v.clone(), v].concat())
    });

    let mut last = vec![down(std::slice::from_ref(&h))];
    last.extend(vec![counit(FiniteType::Real); n]);
    last.push(up_reals(n));

    seq_all(&[
        tensor_of(&[lift_covariant(fan(&h, n + 1)), up_reals(n)]),
        tensor_of(&players),
        tensor_of(&[lift_covariant(step), up_reals(2 * n)]),
        tensor_of(&[down(std::slice::from_ref(&h)), down(&reals(n)), lift_contravariant(back)]),
        tensor_of(&last),
    ])
}

fn repeat(p: &RepeatedParams, names: &[&str]) -> Result<ClosedGame> {
    if p.periods == 0 {
        return Err(Error::Arity("a repeated game needs at least one period".into()));
    }
    let n = names.len();
    let q = &p.stage.grid;
    let elem = if n == 1 { q.clone() } else { FiniteType::product(vec![q.clone(); n]) };
    let h = history_type(&elem, p.periods);
    let g = boxed("Stage", &stage(p, names)?);

    let swallow = lift_contravariant(Func::new("delete", vec![FiniteType::Real], vec![], |_| Ok(vec![])));
    let mut start = vec![constant(Value::List(vec![]), h.clone())?];
    start.extend(vec![swallow; n]);
    let end = lift_contravariant(Func::new("copy", vec![FiniteType::Real], reals(n), move |x| {
        Ok(vec![x[0].clone(); n])
    }));
    let zero = lift_contravariant(Func::new("const 0", vec![], reals(1), |_| Ok(vec![Value::Real(0.0)])));

    let mut parts = vec![tensor_of(&start)];
    parts.extend(vec![g; p.periods]);
    parts.push(tensor_of(&[crate::combinators::delete(h), end]));
    parts.push(zero);
    closed(seq_all(&parts)?)
}

/// Cournot duopoly played `periods` times with discount factor `β`.
pub fn repeated(p: &RepeatedParams) -> Result<ClosedGame> {
    repeat(p, &["P1", "P2"])
}

/// A single firm facing the same demand curve over `periods` periods.
pub fn repeated_decision(p: &RepeatedParams) -> Result<ClosedGame> {
    repeat(p, &["D"])
}

/// An upstream monopolist `M` sets a price; `D1` and `D2` observe it and
/// choose quantities. `M` earns `p·(q1 + q2)`.
pub fn monopolist_duopoly(
    a: f64,
    b: f64,
    price_grid: &FiniteType,
    qty_grid: &FiniteType,
) -> Result<ClosedGame> {
    let (pg, qg) = (price_grid, qty_grid);
    let f = payoff_fn("profits", vec![pg.clone(), qg.clone(), qg.clone()], 3, move |x| {
        let (p, q1, q2) = (num(&x[0])?, num(&x[1])?, num(&x[2])?);
        let margin = a - b * (q1 + q2) - p;
        Ok(vec![margin * q1, margin * q2, p * (q1 + q2)])
    });
    let pim = seq_all(&[
        tensor_of(&[lift_covariant(fan(pg, 3)), up_reals(1)]),
        tensor_of(&[
            down(std::slice::from_ref(pg)),
            argmax("D1", pg.clone(), qg)?,
            argmax("D2", pg.clone(), qg)?,
            up_reals(1),
        ]),
        tensor_of(&[lift_covariant(f), up_reals(3)]),
        counits(3)?,
    ])?;
    closed(compose_seq(&argmax("M", FiniteType::Unit, pg)?, &boxed("PiM", &pim))?)
}

/// `G1` wants its choice to be a fixed point of `G2`'s reply; `G2` sees
/// `G1`'s choice. With `symmetric` unset, `G2` copies what it sees. With it
/// set, `G2` also seeks a fixed point, of `G1`'s choice.
pub fn coordination(t: &FiniteType, symmetric: bool) -> Result<ClosedGame> {
    let g1 = lift_player("G1", FiniteType::Unit, t.clone(), Selection::Fixpoint)?;
    let up_t = ids(vec![Strand::up(t.clone())]);
    if !symmetric {
        let g2 = lift_player("G2", t.clone(), t.clone(), Selection::MatchObservation)?;
        return closed(seq_all(&[g1, tensor_of(&[g2, up_t]), counit(t.clone())])?);
    }
    let g2 = lift_player("G2", t.clone(), t.clone(), Selection::Fixpoint)?;
    let both = [Strand::down(t.clone()), Strand::down(t.clone())];
    closed(seq_all(&[
        g1,
        tensor_of(&[copy(t.clone()), up_t.clone()]),
        tensor_of(&[g2, down(std::slice::from_ref(t)), up_t]),
        tensor_of(&[braid(&[1, 0], &both)?, ids(vec![Strand::up(t.clone()); 2])]),
        tensor_of(&[counit(t.clone()), counit(t.clone())]),
    ])?)
}
