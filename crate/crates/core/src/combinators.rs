//! Atomic open games and the two composition operators.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{Func, Node, OpenGame, PlayerAtom, Selection, Variance};
use crate::interface::{reduce_strands, show_boundary, Dir, Interface, Strand};
use crate::strategy::{Leaf, StrategySpace};
use crate::types::{FiniteType, Value};

/// A player observing a single strand.
pub fn lift_player(name: &str, obs: FiniteType, choice: FiniteType, sel: Selection) -> Result<OpenGame> {
    lift_player_strands(name, vec![obs], choice, sel)
}

/// A player observing several strands; its observation type is their product.
pub fn lift_player_strands(
    name: &str,
    obs: Vec<FiniteType>,
    choice: FiniteType,
    sel: Selection,
) -> Result<OpenGame> {
    if choice.cardinality() == Some(0) {
        return Err(Error::EmptyChoice(name.to_string()));
    }
    if !choice.is_finite() {
        return Err(Error::NotFinite(choice.to_string()));
    }
    let iface = Interface::new(obs, vec![], vec![choice.clone()], vec![]);
    let obs_ty = reduce_strands(&iface.fwd_in);
    if !obs_ty.is_finite() {
        return Err(Error::NotFinite(obs_ty.to_string()));
    }
    match &sel {
        Selection::MatchObservation if obs_ty != choice => {
            return Err(Error::Selection(format!(
                "player `{name}` matches its observation, so it must observe {choice}, not {obs_ty}"
            )));
        }
        Selection::Prefer(t) if !t.is_finite() => {
            return Err(Error::Selection(format!("prefer needs a finite outcome type, not {t}")));
        }
        _ => {}
    }
    let outcome: Vec<FiniteType> = sel.outcome_type(&choice).into_iter().collect();
    let iface = Interface::new(iface.fwd_in, vec![], iface.fwd_out, outcome);
    let leaf = Arc::new(Leaf { name: name.into(), obs: obs_ty, choice });
    let atom = PlayerAtom { leaf: leaf.clone(), obs_strands: iface.fwd_in.clone(), selection: sel };
    Ok(OpenGame::build(iface, StrategySpace::Player(leaf), Node::Player(Arc::new(atom))))
}

/// `P(x) = f(x)`, `C = •`.
pub fn lift_covariant(f: Func) -> OpenGame {
    let iface = Interface::new(f.dom().to_vec(), vec![], f.cod().to_vec(), vec![]);
    OpenGame::build(iface, StrategySpace::Trivial, Node::Lift(f, Variance::Covariant))
}

/// `P = •`, `C(•, r) = f(r)`: takes `dom(f)` from below, returns `cod(f)` above.
pub fn lift_contravariant(f: Func) -> OpenGame {
    let iface = Interface::new(vec![], f.cod().to_vec(), vec![], f.dom().to_vec());
    OpenGame::build(iface, StrategySpace::Trivial, Node::Lift(f, Variance::Contravariant))
}

pub fn lift(f: Func, variance: Variance) -> OpenGame {
    match variance {
        Variance::Covariant => lift_covariant(f),
        Variance::Contravariant => lift_contravariant(f),
    }
}

/// `τ_X : X ⊗ X* → I` with `C(x, •) = x`.
pub fn counit(t: FiniteType) -> OpenGame {
    let iface = Interface::new(vec![t.clone()], vec![t], vec![], vec![]);
    OpenGame::build(iface, StrategySpace::Trivial, Node::Counit)
}

pub fn copy_fn(t: FiniteType) -> Func {
    Func::new("copy", vec![t.clone()], vec![t.clone(), t], |x| Ok(vec![x[0].clone(), x[0].clone()]))
}

pub fn delete_fn(t: FiniteType) -> Func {
    Func::new("delete", vec![t], vec![], |_| Ok(vec![]))
}

pub fn const_fn(v: Value, t: FiniteType) -> Result<Func> {
    if !t.contains(&v) {
        return Err(Error::NotInhabitant { value: v.to_string(), ty: t.to_string() });
    }
    Ok(Func::new(&format!("const {v}"), vec![], vec![t], move |_| Ok(vec![v.clone()])))
}

pub fn identity_fn(types: Vec<FiniteType>) -> Func {
    Func::new("id", types.clone(), types, |x| Ok(x.to_vec()))
}

/// Output `i` carries input `perm[i]`.
pub fn braid_fn(perm: &[usize], types: Vec<FiniteType>) -> Result<Func> {
    check_permutation(perm, types.len())?;
    let cod: Vec<FiniteType> = perm.iter().map(|&i| types[i].clone()).collect();
    let perm = perm.to_vec();
    Ok(Func::new("braid", types, cod, move |x| Ok(perm.iter().map(|&i| x[i].clone()).collect())))
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::Arity(format!(
            "braid permutation has {} entries for {n} strands",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Arity(format!("{perm:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

pub fn copy(t: FiniteType) -> OpenGame {
    lift_covariant(copy_fn(t))
}

pub fn delete(t: FiniteType) -> OpenGame {
    lift_covariant(delete_fn(t))
}

pub fn constant(v: Value, t: FiniteType) -> Result<OpenGame> {
    Ok(lift_covariant(const_fn(v, t)?))
}

/// Identity on a list of strands of either direction.
pub fn identity(strands: &[Strand]) -> OpenGame {
    let mut parts = strands.iter().map(|s| {
        let f = identity_fn(vec![s.ty.clone()]);
        match s.dir {
            Dir::Down => lift_covariant(f),
            Dir::Up => lift_contravariant(f),
        }
    });
    match parts.next() {
        None => lift_covariant(identity_fn(vec![])),
        Some(first) => parts.fold(first, |acc, g| tensor(&acc, &g)),
    }
}

/// Crossing of strands that all flow in one direction. For downward strands
/// the types are listed at the top; for upward strands at the bottom.
pub fn braid(perm: &[usize], strands: &[Strand]) -> Result<OpenGame> {
    let dir = strands.first().map(|s| s.dir).unwrap_or(Dir::Down);
    if strands.iter().any(|s| s.dir != dir) {
        return Err(Error::Arity("braid strands must all flow in the same direction".into()));
    }
    let f = braid_fn(perm, strands.iter().map(|s| s.ty.clone()).collect())?;
    Ok(match dir {
        Dir::Down => lift_covariant(f),
        Dir::Up => lift_contravariant(f),
    })
}

/// `H ∘ G`: `g` on top, `h` below. Interfaces must match exactly.
pub fn compose_seq(g: &OpenGame, h: &OpenGame) -> Result<OpenGame> {
    let gi = g.interface();
    let hi = h.interface();
    if gi.fwd_out != hi.fwd_in || gi.bwd_in != hi.bwd_out {
        return Err(Error::Compose {
            left: gi.to_string(),
            right: hi.to_string(),
            bottom: show_boundary(&gi.bottom()),
            top: show_boundary(&hi.top()),
        });
    }
    let iface = Interface {
        fwd_in: gi.fwd_in.clone(),
        bwd_out: gi.bwd_out.clone(),
        fwd_out: hi.fwd_out.clone(),
        bwd_in: hi.bwd_in.clone(),
    };
    let sigma = StrategySpace::pair(g.sigma().clone(), h.sigma().clone());
    Ok(OpenGame::build(iface, sigma, Node::Seq(g.clone(), h.clone())))
}

/// `G ⊗ H`: side by side, `g` on the left.
pub fn tensor(g: &OpenGame, h: &OpenGame) -> OpenGame {
    let gi = g.interface();
    let hi = h.interface();
    let cat = |a: &[FiniteType], b: &[FiniteType]| [a, b].concat();
    let iface = Interface {
        fwd_in: cat(&gi.fwd_in, &hi.fwd_in),
        bwd_out: cat(&gi.bwd_out, &hi.bwd_out),
        fwd_out: cat(&gi.fwd_out, &hi.fwd_out),
        bwd_in: cat(&gi.bwd_in, &hi.bwd_in),
    };
    let sigma = StrategySpace::pair(g.sigma().clone(), h.sigma().clone());
    OpenGame::build(iface, sigma, Node::Tensor(g.clone(), h.clone()))
}

/// Names a subgame. Semantics are those of `g`.
pub fn boxed(name: &str, g: &OpenGame) -> OpenGame {
    let sigma = StrategySpace::Boxed(name.into(), Arc::new(g.sigma().clone()));
    OpenGame::build(g.interface().clone(), sigma, Node::Boxed(g.clone()))
}

/// Sequential composition of a non-empty list, top to bottom.
pub fn seq_all(games: &[OpenGame]) -> Result<OpenGame> {
    let (first, rest) = games
        .split_first()
        .ok_or_else(|| Error::Arity("nothing to compose".into()))?;
    rest.iter().try_fold(first.clone(), |acc, g| compose_seq(&acc, g))
}

/// Tensor of a non-empty list, left to right.
pub fn tensor_all(games: &[OpenGame]) -> Result<OpenGame> {
    let (first, rest) = games
        .split_first()
        .ok_or_else(|| Error::Arity("nothing to tensor".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, g| tensor(&acc, g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{select, Continuation};
    use crate::strategy::Profile;

    fn cd() -> FiniteType {
        FiniteType::labels(["C", "D"]).unwrap()
    }

    fn lbl(t: &FiniteType, n: &str) -> Value {
        t.label(n).unwrap()
    }

    #[test]
    fn player_plays_its_table() {
        let lr = FiniteType::labels(["L", "R"]).unwrap();
        let ab = FiniteType::labels(["a", "b"]).unwrap();
        let p = lift_player("p", lr.clone(), ab.clone(), Selection::Argmax).unwrap();
        assert_eq!(p.sigma().cardinality(), Some(4));
        let sigma = Profile::table(vec![lbl(&ab, "b"), lbl(&ab, "a")]);
        assert_eq!(p.play(&sigma, &lbl(&lr, "L")).unwrap(), lbl(&ab, "b"));
        assert_eq!(p.coplay(&sigma, &lbl(&lr, "L"), &Value::Real(1.0)).unwrap(), Value::Unit);
    }

    #[test]
    fn argmax_player_against_row_context() {
        let t = cd();
        let p = lift_player("row", FiniteType::Unit, t.clone(), Selection::Argmax).unwrap();
        let k = Continuation::new(t.clone(), |y| {
            Value::Real(if y.label_name() == Some("D") { 1.0 } else { 0.0 })
        });
        let plays_d = Profile::table(vec![lbl(&t, "D")]);
        let plays_c = Profile::table(vec![lbl(&t, "C")]);
        assert!(p.eq_member(&plays_d, &Value::Unit, &k).unwrap());
        assert!(!p.eq_member(&plays_c, &Value::Unit, &k).unwrap());
    }

    #[test]
    fn empty_choice_is_rejected() {
        let empty = FiniteType::labels(Vec::<String>::new()).unwrap();
        assert!(matches!(
            lift_player("p", FiniteType::Unit, empty, Selection::Argmax),
            Err(Error::EmptyChoice(_))
        ));
    }

    #[test]
    fn fixpoint_of_identity_selects_everything() {
        let t = FiniteType::int_range(0, 2).unwrap();
        let k = Continuation::new(t.clone(), |y| y.clone());
        assert_eq!(select(&Selection::Fixpoint, &k, 1e-9).unwrap().len(), 3);
    }

    #[test]
    fn argmax_selection_examples() {
        let t = FiniteType::labels(["A", "B"]).unwrap();
        let k = Continuation::from_table(
            t.clone(),
            vec![(lbl(&t, "A"), Value::Real(2.0)), (lbl(&t, "B"), Value::Real(0.0))],
        );
        assert_eq!(select(&Selection::Argmax, &k, 1e-9).unwrap(), vec![lbl(&t, "A")]);
        let tie = Continuation::constant(t.clone(), Value::Real(1.0));
        assert_eq!(select(&Selection::Argmax, &tie, 1e-9).unwrap().len(), 2);
    }

    #[test]
    fn counit_routes_forward_value_back() {
        let t = FiniteType::labels(["GCT", "ES"]).unwrap();
        let c = counit(t.clone());
        let gct = lbl(&t, "GCT");
        assert_eq!(c.coplay(&Profile::Trivial, &gct, &Value::Unit).unwrap(), gct);
        assert_eq!(c.play(&Profile::Trivial, &gct).unwrap(), Value::Unit);
        let unit = counit(FiniteType::Unit);
        assert!(unit.interface().is_closed());
    }

    #[test]
    fn contravariant_lift_applies_on_the_way_up() {
        let t = FiniteType::int_range(0, 4).unwrap();
        let dbl = Func::unary("double", t.clone(), t.clone(), |v| match v {
            Value::Int(i) => Value::Int(2 * i),
            _ => unreachable!(),
        });
        let g = lift_contravariant(dbl);
        assert_eq!(g.coplay(&Profile::Trivial, &Value::Unit, &Value::Int(2)).unwrap(), Value::Int(4));
    }

    #[test]
    fn codomain_escape_is_an_error() {
        let t = FiniteType::int_range(0, 2).unwrap();
        let dbl = Func::unary("double", t.clone(), t.clone(), |v| match v {
            Value::Int(i) => Value::Int(2 * i),
            _ => unreachable!(),
        });
        let g = lift_contravariant(dbl);
        assert!(g.coplay(&Profile::Trivial, &Value::Unit, &Value::Int(2)).is_err());
    }

    #[test]
    fn copy_and_braid() {
        let t = FiniteType::labels(["A", "B"]).unwrap();
        let a = lbl(&t, "A");
        let out = copy(t.clone()).play(&Profile::Trivial, &a).unwrap();
        assert_eq!(out, Value::Tuple(vec![a.clone(), a.clone()]));
        let u = FiniteType::int_range(0, 1).unwrap();
        let sw = braid(&[1, 0], &[Strand::down(t.clone()), Strand::down(u.clone())]).unwrap();
        let x = Value::Tuple(vec![a.clone(), Value::Int(1)]);
        assert_eq!(sw.play(&Profile::Trivial, &x).unwrap(), Value::Tuple(vec![Value::Int(1), a]));
        assert!(braid(&[0, 0], &[Strand::down(t.clone()), Strand::down(t)]).is_err());
    }

    #[test]
    fn constant_plays_its_value() {
        let t = FiniteType::int_range(0, 5).unwrap();
        let c = constant(Value::Int(3), t.clone()).unwrap();
        assert_eq!(c.play(&Profile::Trivial, &Value::Unit).unwrap(), Value::Int(3));
        assert!(constant(Value::Int(9), t).is_err());
    }

    #[test]
    fn composition_mismatch_names_both_interfaces() {
        let a = FiniteType::labels(["a"]).unwrap();
        let b = FiniteType::labels(["b"]).unwrap();
        let c = FiniteType::labels(["c"]).unwrap();
        let f = lift_covariant(Func::unary("f", a.clone(), b.clone(), |_| Value::Unit));
        let g = lift_covariant(Func::unary("g", c.clone(), a, |_| Value::Unit));
        let err = compose_seq(&f, &g).unwrap_err().to_string();
        assert!(err.contains("{b}") && err.contains("{c}"), "{err}");
    }
}
