//! Structural laws of open games, checked pointwise on random small games.
//!
//! Two games are pointwise equal when their interfaces agree and, for every
//! profile (leaves matched up by a permutation), every input and a sample of
//! coutilities and continuations, they give the same play, coplay and
//! equilibrium verdict. Verdicts are compared under both quantifier modes,
//! which must also agree with each other.

use std::collections::BTreeMap;
use std::sync::atomic::AtomicU64;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinators::{
    boxed, braid, compose_seq, copy, counit, delete, delete_fn, identity, lift_contravariant, lift_covariant,
    lift_player, tensor,
};
use crate::error::Result;
use crate::game::{Continuation, EvalCtx, Func, OpenGame, Quantifier, Selection};
use crate::interface::Strand;
use crate::strategy::Profile;
use crate::types::{FiniteType, Value};

/// Every law the suite checks.
pub const LAWS: [&str; 8] = [
    "associativity",
    "identity",
    "interchange",
    "counit",
    "braid involution",
    "braid naturality",
    "comonoid",
    "trivial closure",
];

const PROFILE_LIMIT: u64 = 64;
/// Literal quantification walks all of Σ, so it is only compared on small games.
const LITERAL_LIMIT: u64 = 4096;

/// Deterministic generator of small games and test data.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// One of a few small enumerable types.
    pub fn small_type(&mut self) -> FiniteType {
        match self.rng.gen_range(0..4) {
            0 => FiniteType::labels(["a", "b"]).unwrap(),
            1 => FiniteType::labels(["a", "b", "c"]).unwrap(),
            2 => FiniteType::int_range(0, 2).unwrap(),
            _ => FiniteType::int_range(-1, 0).unwrap(),
        }
    }

    /// A random inhabitant; reals are small integers.
    pub fn value(&mut self, ty: &FiniteType) -> Value {
        match ty {
            FiniteType::Real => Value::Real(self.rng.gen_range(-3..=3) as f64),
            FiniteType::Product(parts) => Value::Tuple(parts.iter().map(|p| self.value(p)).collect()),
            t => {
                let n = t.cardinality().unwrap_or(1).max(1);
                t.value_at(self.rng.gen_range(0..n)).unwrap_or(Value::Unit)
            }
        }
    }

    fn table_fn(&mut self, name: &str, dom: &FiniteType, cod: &FiniteType) -> Func {
        let map: BTreeMap<Value, Value> =
            dom.values().unwrap().map(|x| (x, self.value(cod))).collect();
        Func::unary(name, dom.clone(), cod.clone(), move |x| map[x].clone())
    }

    fn affine(&mut self, outputs: usize) -> Func {
        let coef: Vec<(f64, f64)> = (0..outputs)
            .map(|_| (self.rng.gen_range(-2..=2) as f64, self.rng.gen_range(-2..=2) as f64))
            .collect();
        Func::new("affine", vec![FiniteType::Real], vec![FiniteType::Real; outputs], move |x| {
            let r = x[0].as_f64().unwrap_or(0.0);
            Ok(coef.iter().map(|(a, b)| Value::Real(a * r + b)).collect())
        })
    }

    /// A random game `x ⊗ ℝ* → y ⊗ ℝ*` with at most `depth` levels of
    /// sequential nesting.
    pub fn game(&mut self, x: &FiniteType, y: &FiniteType, depth: usize) -> OpenGame {
        let pick = if depth == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..4) };
        match pick {
            0 => {
                let f = self.table_fn("f", x, y);
                tensor(&lift_covariant(f), &lift_contravariant(self.affine(1)))
            }
            1 => {
                let name = ["A", "B", "C"].choose(&mut self.rng).unwrap().to_string();
                let p = lift_player(&name, x.clone(), y.clone(), Selection::Argmax).unwrap();
                let top = tensor(&p, &up_real());
                let bottom = tensor(&identity(&[Strand::down(y.clone())]), &lift_contravariant(self.affine(2)));
                compose_seq(&top, &bottom).unwrap()
            }
            2 => {
                let mid = self.small_type();
                let g = self.game(x, &mid, depth - 1);
                let h = self.game(&mid, y, depth - 1);
                compose_seq(&g, &h).unwrap()
            }
            _ => boxed("B", &self.game(x, y, depth - 1)),
        }
    }

    /// A strategically trivial game `x → y`.
    pub fn trivial_game(&mut self, x: &FiniteType, y: &FiniteType, depth: usize) -> OpenGame {
        let pick = if depth == 0 { 0 } else { self.rng.gen_range(0..3) };
        match pick {
            0 => lift_covariant(self.table_fn("f", x, y)),
            1 => {
                let mid = self.small_type();
                let g = self.trivial_game(x, &mid, depth - 1);
                compose_seq(&g, &self.trivial_game(&mid, y, depth - 1)).unwrap()
            }
            _ => {
                let mid = self.small_type();
                let h = lift_covariant(self.table_fn("h", x, &mid));
                let bent = compose_seq(&tensor(&h, &lift_contravariant(delete_fn(mid.clone()))), &counit(mid))
                    .unwrap();
                let body = tensor(&self.trivial_game(x, y, depth - 1), &bent);
                compose_seq(&copy(x.clone()), &body).unwrap()
            }
        }
    }

    fn continuation(&mut self, g: &OpenGame) -> Continuation {
        let n = g.normal();
        let table: Vec<(Value, Value)> = n.y.values().unwrap().map(|y| (y, self.value(&n.r))).collect();
        Continuation::from_table(n.y.clone(), table)
    }
}

fn up_real() -> OpenGame {
    identity(&[Strand::up(FiniteType::Real)])
}

/// A pointwise disagreement, with enough context to reproduce it.
#[derive(Clone, Debug)]
pub struct Mismatch(pub String);

fn quantified(g: &OpenGame, s: &Profile, x: &Value, k: &Continuation, q: Quantifier) -> Result<bool> {
    let used = AtomicU64::new(0);
    let ctx = EvalCtx { tol: 1e-9, budget: u64::MAX, used: &used, quantifier: q, short_circuit: true, events: None };
    g.eq_member_with(s, x, k, &ctx)
}

/// Which continuations to test equilibrium verdicts against.
#[derive(Clone, Debug)]
pub enum Contexts {
    /// Arbitrary tables from choices to outcomes.
    Any,
    /// For a game whose bottom is `y1 ⊗ y2 ⊗ ℝ* ⊗ ℝ*`: the first outcome
    /// depends on `y1` only and the second on `y2` only.
    Separable(FiniteType, FiniteType),
}

impl Sampler {
    fn contexts(&mut self, g: &OpenGame, which: &Contexts) -> Vec<Continuation> {
        (0..3)
            .map(|_| match which {
                Contexts::Any => self.continuation(g),
                Contexts::Separable(y1, y2) => {
                    let mut side = |t: &FiniteType| -> BTreeMap<Value, Value> {
                        t.values().unwrap().map(|y| (y, self.value(&FiniteType::Real))).collect()
                    };
                    let (k1, k2) = (side(y1), side(y2));
                    Continuation::new(g.normal().y.clone(), move |y| match y {
                        Value::Tuple(p) if p.len() == 2 => Value::Tuple(vec![k1[&p[0]].clone(), k2[&p[1]].clone()]),
                        _ => Value::Unit,
                    })
                }
            })
            .collect()
    }
}

/// Compares `lhs` and `rhs` pointwise. Leaf `i` of `rhs` takes the table of
/// leaf `perm[i]` of `lhs`.
pub fn pointwise(
    lhs: &OpenGame,
    rhs: &OpenGame,
    perm: &[usize],
    contexts: &Contexts,
    sampler: &mut Sampler,
) -> std::result::Result<(), Mismatch> {
    let fail = |m: String| Err(Mismatch(m));
    if lhs.interface() != rhs.interface() {
        return fail(format!("interfaces differ: {} vs {}", lhs.interface(), rhs.interface()));
    }
    let space = lhs.sigma();
    let profiles: Vec<Profile> = match space.cardinality() {
        Some(n) if n <= PROFILE_LIMIT => (0..n).map(|i| space.decode(i).unwrap()).collect(),
        _ => (0..PROFILE_LIMIT).map(|_| random_profile(lhs, sampler)).collect(),
    };
    let n = lhs.normal();
    let xs: Vec<Value> = n.x.values().map(|v| v.collect()).unwrap_or_else(|_| vec![sampler.value(&n.x)]);
    let ks = sampler.contexts(lhs, contexts);
    let modes: &[Quantifier] = match space.cardinality() {
        Some(n) if n <= LITERAL_LIMIT => &[Quantifier::Reachable, Quantifier::Literal],
        _ => &[Quantifier::Reachable],
    };
    for s in &profiles {
        let tables: Vec<Vec<Value>> = s.leaves().iter().map(|t| t.to_vec()).collect();
        let mapped: Vec<Vec<Value>> = perm.iter().map(|&i| tables[i].clone()).collect();
        let t = match rhs.sigma().from_leaves(mapped) {
            Ok(t) => t,
            Err(e) => return fail(format!("profile does not transfer: {e}")),
        };
        for x in &xs {
            let (p, q) = (lhs.play(s, x), rhs.play(&t, x));
            if p.as_ref().ok() != q.as_ref().ok() {
                return fail(format!("play differs at {x}: {p:?} vs {q:?}"));
            }
            let r = sampler.value(&n.r);
            let (c, d) = (lhs.coplay(s, x, &r), rhs.coplay(&t, x, &r));
            if c.as_ref().ok() != d.as_ref().ok() {
                return fail(format!("coplay differs at {x}, {r}: {c:?} vs {d:?}"));
            }
            for k in &ks {
                let mut verdicts = Vec::new();
                for &q in modes {
                    verdicts.push(quantified(lhs, s, x, k, q).map_err(|e| Mismatch(e.to_string()))?);
                    verdicts.push(quantified(rhs, &t, x, k, q).map_err(|e| Mismatch(e.to_string()))?);
                }
                if verdicts.iter().any(|v| *v != verdicts[0]) {
                    return fail(format!("equilibrium verdicts differ at {x}: {verdicts:?}"));
                }
            }
        }
    }
    Ok(())
}

fn random_profile(g: &OpenGame, sampler: &mut Sampler) -> Profile {
    let tables: Vec<Vec<Value>> = g
        .sigma()
        .leaves()
        .iter()
        .map(|l| {
            let n = l.obs.cardinality().unwrap_or(1);
            (0..n).map(|_| sampler.value(&l.choice)).collect()
        })
        .collect();
    g.sigma().from_leaves(tables).unwrap()
}

fn id_perm(g: &OpenGame) -> Vec<usize> {
    (0..g.leaf_count()).collect()
}

fn down(t: &FiniteType) -> OpenGame {
    identity(&[Strand::down(t.clone())])
}

fn swap_both(a: &FiniteType, b: &FiniteType) -> OpenGame {
    let d = braid(&[1, 0], &[Strand::down(a.clone()), Strand::down(b.clone())]).unwrap();
    let u = braid(&[1, 0], &[Strand::up(FiniteType::Real), Strand::up(FiniteType::Real)]).unwrap();
    tensor(&d, &u)
}

type Four = (FiniteType, FiniteType, FiniteType, FiniteType);

/// `(g1 ⊗ h1) ; (g2 ⊗ h2)` against `(g1 ; g2) ⊗ (h1 ; h2)`.
fn interchange(s: &mut Sampler, (a, b, c, d): Four, entangled: bool) -> std::result::Result<(), Mismatch> {
    let (e, f) = (s.small_type(), s.small_type());
    let (g1, g2) = (s.game(&a, &b, 1), s.game(&b, &c, 1));
    let (h1, h2) = (s.game(&d, &e, 1), s.game(&e, &f, 1));
    let l = compose_seq(&tensor(&g1, &h1), &tensor(&g2, &h2)).unwrap();
    let r = tensor(&compose_seq(&g1, &g2).unwrap(), &compose_seq(&h1, &h2).unwrap());
    let (n1, n2, m1) = (g1.leaf_count(), g2.leaf_count(), h1.leaf_count());
    let m2 = h2.leaf_count();
    // l: g1 h1 g2 h2; r: g1 g2 h1 h2.
    let mut perm: Vec<usize> = (0..n1).collect();
    perm.extend(n1 + m1..n1 + m1 + n2);
    perm.extend(n1..n1 + m1);
    perm.extend(n1 + m1 + n2..n1 + m1 + n2 + m2);
    let contexts = if entangled { Contexts::Any } else { Contexts::Separable(c, f) };
    pointwise(&l, &r, &perm, &contexts, s)
}

/// The interchange instance for `seed`, but tested against arbitrary
/// continuations, where a player's outcome may depend on the other side's
/// move. Sequential composition checks the second factor at every
/// reachable input, so the two bracketings can then disagree.
pub fn interchange_entangled(seed: u64) -> std::result::Result<(), Mismatch> {
    let mut s = Sampler::new(seed);
    let four = (s.small_type(), s.small_type(), s.small_type(), s.small_type());
    interchange(&mut s, four, true)
}

/// Checks one randomly drawn instance of `law`.
pub fn check(law: &str, seed: u64) -> std::result::Result<(), Mismatch> {
    let mut s = Sampler::new(seed);
    let (a, b, c, d) = (s.small_type(), s.small_type(), s.small_type(), s.small_type());
    match law {
        "associativity" => {
            let (f, g, h) = (s.game(&a, &b, 1), s.game(&b, &c, 1), s.game(&c, &d, 1));
            let l = compose_seq(&compose_seq(&f, &g).unwrap(), &h).unwrap();
            let r = compose_seq(&f, &compose_seq(&g, &h).unwrap()).unwrap();
            pointwise(&l, &r, &id_perm(&l), &Contexts::Any, &mut s)?;
            let l = tensor(&tensor(&f, &g), &h);
            let r = tensor(&f, &tensor(&g, &h));
            pointwise(&l, &r, &id_perm(&l), &Contexts::Any, &mut s)
        }
        "identity" => {
            let g = s.game(&a, &b, 1);
            let top = tensor(&down(&a), &up_real());
            let bottom = tensor(&down(&b), &up_real());
            pointwise(&g, &compose_seq(&top, &g).unwrap(), &id_perm(&g), &Contexts::Any, &mut s)?;
            pointwise(&g, &compose_seq(&g, &bottom).unwrap(), &id_perm(&g), &Contexts::Any, &mut s)
        }
        "interchange" => interchange(&mut s, (a, b, c, d), false),
        "counit" => {
            let f = s.table_fn("f", &a, &b);
            let l = compose_seq(&tensor(&lift_covariant(f.clone()), &identity(&[Strand::up(b.clone())])), &counit(b.clone())).unwrap();
            let r = compose_seq(&tensor(&down(&a), &lift_contravariant(f)), &counit(a.clone())).unwrap();
            pointwise(&l, &r, &[], &Contexts::Any, &mut s)
        }
        "braid involution" => {
            let strands: Vec<Strand> = [&a, &b, &c].into_iter().cloned().map(Strand::down).collect();
            let mut perm = vec![0, 1, 2];
            perm.shuffle(&mut s.rng);
            let fwd = braid(&perm, &strands).unwrap();
            let mut inv = vec![0; 3];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            let permuted: Vec<Strand> = perm.iter().map(|&i| strands[i].clone()).collect();
            let back = braid(&inv, &permuted).unwrap();
            pointwise(&compose_seq(&fwd, &back).unwrap(), &identity(&strands), &[], &Contexts::Any, &mut s)
        }
        "braid naturality" => {
            let (g, h) = (s.game(&a, &b, 1), s.game(&c, &d, 1));
            let l = compose_seq(&tensor(&g, &h), &swap_both(&b, &d)).unwrap();
            let r = compose_seq(&swap_both(&a, &c), &tensor(&h, &g)).unwrap();
            let (n, m) = (g.leaf_count(), h.leaf_count());
            let perm: Vec<usize> = (n..n + m).chain(0..n).collect();
            pointwise(&l, &r, &perm, &Contexts::Any, &mut s)
        }
        "comonoid" => {
            let copy_a = copy(a.clone());
            let l = compose_seq(&copy_a, &tensor(&copy(a.clone()), &down(&a))).unwrap();
            let r = compose_seq(&copy_a, &tensor(&down(&a), &copy(a.clone()))).unwrap();
            pointwise(&l, &r, &[], &Contexts::Any, &mut s)?;
            for unit in [tensor(&delete(a.clone()), &down(&a)), tensor(&down(&a), &delete(a.clone()))] {
                pointwise(&compose_seq(&copy_a, &unit).unwrap(), &down(&a), &[], &Contexts::Any, &mut s)?;
            }
            let swap = braid(&[1, 0], &[Strand::down(a.clone()), Strand::down(a.clone())]).unwrap();
            pointwise(&compose_seq(&copy_a, &swap).unwrap(), &copy_a, &[], &Contexts::Any, &mut s)
        }
        "trivial closure" => {
            let (f, g) = (s.trivial_game(&a, &b, 2), s.trivial_game(&c, &d, 2));
            for h in [compose_seq(&f, &s.trivial_game(&b, &c, 2)).unwrap(), tensor(&f, &g)] {
                if h.sigma().cardinality() != Some(1) || !h.is_trivial() {
                    return Err(Mismatch("composite of trivial games has a player".into()));
                }
                let profile = h.sigma().decode(0).unwrap();
                let n = h.normal();
                for x in n.x.values().unwrap() {
                    let k = s.continuation(&h);
                    for q in [Quantifier::Reachable, Quantifier::Literal] {
                        if !quantified(&h, &profile, &x, &k, q).map_err(|e| Mismatch(e.to_string()))? {
                            return Err(Mismatch(format!("trivial game fails its equilibrium check at {x}")));
                        }
                    }
                }
            }
            Ok(())
        }
        other => Err(Mismatch(format!("unknown law `{other}`"))),
    }
}
