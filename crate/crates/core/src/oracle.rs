//! Brute-force reference solvers that do not use the open-game machinery.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::types::{FiniteType, Value};

const ORACLE_LIMIT: u64 = 1_000_000;

pub type Utility = Arc<dyn Fn(&[Value]) -> Vec<f64> + Send + Sync>;
pub type Payoff = Arc<dyn Fn(&Value, &Value) -> f64 + Send + Sync>;

/// An n-player simultaneous game.
#[derive(Clone)]
pub struct NormalFormSpec {
    pub choices: Vec<FiniteType>,
    /// Payoff of every player for a choice tuple.
    pub utility: Utility,
}

/// A leader-follower game: the follower observes the leader's choice.
#[derive(Clone)]
pub struct SequentialSpec {
    pub leader: FiniteType,
    pub follower: FiniteType,
    pub u1: Payoff,
    pub u2: Payoff,
}

fn all_values(t: &FiniteType) -> Result<Vec<Value>> {
    Ok(t.values()?.collect())
}

fn overflow(what: &str) -> Error {
    Error::Overflow(format!("{what} exceeds the oracle limit of {ORACLE_LIMIT} profiles"))
}

/// Pure profiles where no player gains more than `tol` by deviating alone,
/// ordered with the first player's choice most significant.
pub fn nash_oracle(spec: &NormalFormSpec, tol: f64) -> Result<Vec<Vec<Value>>> {
    let sets: Vec<Vec<Value>> = spec.choices.iter().map(all_values).collect::<Result<_>>()?;
    let total = sets
        .iter()
        .try_fold(1u64, |acc, s| acc.checked_mul(s.len() as u64))
        .filter(|n| *n <= ORACLE_LIMIT)
        .ok_or_else(|| overflow("normal-form game"))?;
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut profile = vec![Value::Unit; sets.len()];
        for (slot, set) in profile.iter_mut().zip(&sets).rev() {
            *slot = set[(rem % set.len() as u64) as usize].clone();
            rem /= set.len() as u64;
        }
        let base = (spec.utility)(&profile);
        let stable = sets.iter().enumerate().all(|(i, set)| {
            set.iter().all(|alt| {
                let mut dev = profile.clone();
                dev[i] = alt.clone();
                (spec.utility)(&dev)[i] <= base[i] + tol
            })
        });
        if stable {
            out.push(profile);
        }
    }
    Ok(out)
}

/// Pairs `(y1, σ2)` where `σ2(y1')` is a best reply for every `y1'` and
/// `y1` is a best reply to `σ2`. Ordered by `y1`, then by `σ2`
/// lexicographically.
pub fn spe_oracle(spec: &SequentialSpec, tol: f64) -> Result<Vec<(Value, Vec<Value>)>> {
    let y1s = all_values(&spec.leader)?;
    let y2s = all_values(&spec.follower)?;
    let tables = (y2s.len() as u64)
        .checked_pow(y1s.len() as u32)
        .filter(|n| n.saturating_mul(y1s.len() as u64) <= ORACLE_LIMIT)
        .ok_or_else(|| overflow("follower strategy space"))?;
    let best2: Vec<f64> = y1s
        .iter()
        .map(|a| y2s.iter().map(|b| (spec.u2)(a, b)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mut out = Vec::new();
    for y1 in &y1s {
        for t in 0..tables {
            let mut rem = t;
            let mut table = vec![Value::Unit; y1s.len()];
            for slot in table.iter_mut().rev() {
                *slot = y2s[(rem % y2s.len() as u64) as usize].clone();
                rem /= y2s.len() as u64;
            }
            let follower_ok = y1s
                .iter()
                .zip(&table)
                .zip(&best2)
                .all(|((a, b), m)| (spec.u2)(a, b) >= m - tol);
            if !follower_ok {
                continue;
            }
            let mine = (spec.u1)(y1, &table[position(&y1s, y1)]);
            let leader_ok = y1s
                .iter()
                .zip(&table)
                .all(|(a, b)| (spec.u1)(a, b) <= mine + tol);
            if leader_ok {
                out.push((y1.clone(), table));
            }
        }
    }
    Ok(out)
}

fn position(vals: &[Value], v: &Value) -> usize {
    vals.iter().position(|x| x == v).unwrap_or(0)
}
