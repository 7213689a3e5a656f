//! Strategy spaces and profiles.
//!
//! A strategy space is a tree mirroring the composition syntax. Every
//! profile of a space whose cardinality fits in a `u64` has an integer index;
//! index order is lexicographic over leaf tables, with earlier leaves and
//! earlier observations more significant.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::types::{FiniteType, Value};

/// A player leaf: total tables from `obs` to `choice`.
#[derive(Debug, PartialEq, Eq)]
pub struct Leaf {
    pub name: Arc<str>,
    pub obs: FiniteType,
    pub choice: FiniteType,
}

impl Leaf {
    pub fn cardinality(&self) -> Option<u64> {
        let n = self.choice.cardinality()?;
        let m = u32::try_from(self.obs.cardinality()?).ok()?;
        n.checked_pow(m)
    }

    pub fn big_cardinality(&self) -> BigUint {
        let n = BigUint::from(self.choice.cardinality().unwrap_or(0));
        let m = self.obs.cardinality().unwrap_or(0);
        let mut out = BigUint::from(1u32);
        for _ in 0..m {
            out *= &n;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategySpace {
    /// The singleton `{•}` of strategically trivial games.
    Trivial,
    Player(Arc<Leaf>),
    Pair(Arc<StrategySpace>, Arc<StrategySpace>),
    /// A named subgame; transparent for indexing.
    Boxed(Arc<str>, Arc<StrategySpace>),
}

/// A point of a [`StrategySpace`]. Boxes leave no trace in profiles.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Profile {
    Trivial,
    /// Choices indexed by the canonical position of the observation.
    Table(Arc<[Value]>),
    Pair(Arc<Profile>, Arc<Profile>),
}

impl Profile {
    pub fn pair(a: Profile, b: Profile) -> Self {
        Profile::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn table(choices: Vec<Value>) -> Self {
        Profile::Table(choices.into())
    }

    pub fn split(&self) -> Result<(&Profile, &Profile)> {
        match self {
            Profile::Pair(a, b) => Ok((a, b)),
            _ => Err(Error::ProfileShape("expected a pair".into())),
        }
    }

    /// Leaf tables in left-to-right order.
    pub fn leaves(&self) -> Vec<&[Value]> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a [Value]>) {
        match self {
            Profile::Trivial => {}
            Profile::Table(t) => out.push(t),
            Profile::Pair(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }
}

impl StrategySpace {
    pub fn pair(a: StrategySpace, b: StrategySpace) -> Self {
        StrategySpace::Pair(Arc::new(a), Arc::new(b))
    }

    /// `|Σ|`, or `None` if it does not fit in a `u64`.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            StrategySpace::Trivial => Some(1),
            StrategySpace::Player(leaf) => leaf.cardinality(),
            StrategySpace::Pair(a, b) => a.cardinality()?.checked_mul(b.cardinality()?),
            StrategySpace::Boxed(_, inner) => inner.cardinality(),
        }
    }

    pub fn big_cardinality(&self) -> BigUint {
        match self {
            StrategySpace::Trivial => BigUint::from(1u32),
            StrategySpace::Player(leaf) => leaf.big_cardinality(),
            StrategySpace::Pair(a, b) => a.big_cardinality() * b.big_cardinality(),
            StrategySpace::Boxed(_, inner) => inner.big_cardinality(),
        }
    }

    pub fn leaves(&self) -> Vec<&Arc<Leaf>> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Arc<Leaf>>) {
        match self {
            StrategySpace::Trivial => {}
            StrategySpace::Player(leaf) => out.push(leaf),
            StrategySpace::Pair(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
            StrategySpace::Boxed(_, inner) => inner.collect_leaves(out),
        }
    }

    /// The profile with index `idx`.
    pub fn decode(&self, idx: u64) -> Result<Profile> {
        let card = self.cardinality().ok_or_else(|| self.too_large())?;
        if idx >= card {
            return Err(Error::ProfileShape(format!("index {idx} out of range 0..{card}")));
        }
        Ok(self.decode_unchecked(idx))
    }

    fn decode_unchecked(&self, idx: u64) -> Profile {
        match self {
            StrategySpace::Trivial => Profile::Trivial,
            StrategySpace::Player(leaf) => {
                let n = leaf.choice.cardinality().unwrap_or(1);
                let m = leaf.obs.cardinality().unwrap_or(0) as usize;
                let mut digits = vec![Value::Unit; m];
                let mut rem = idx;
                for slot in digits.iter_mut().rev() {
                    *slot = leaf.choice.value_at(rem % n).unwrap_or(Value::Unit);
                    rem /= n;
                }
                Profile::table(digits)
            }
            StrategySpace::Pair(a, b) => {
                let nb = b.cardinality().unwrap_or(1);
                Profile::pair(a.decode_unchecked(idx / nb), b.decode_unchecked(idx % nb))
            }
            StrategySpace::Boxed(_, inner) => inner.decode_unchecked(idx),
        }
    }

    /// Index of a conforming profile.
    pub fn encode(&self, p: &Profile) -> Result<u64> {
        self.check(p)?;
        self.cardinality().ok_or_else(|| self.too_large())?;
        Ok(self.encode_unchecked(p))
    }

    fn encode_unchecked(&self, p: &Profile) -> u64 {
        match (self, p) {
            (StrategySpace::Player(leaf), Profile::Table(t)) => {
                let n = leaf.choice.cardinality().unwrap_or(1);
                t.iter()
                    .fold(0, |acc, v| acc * n + leaf.choice.index_of(v).unwrap_or(0))
            }
            (StrategySpace::Pair(a, b), Profile::Pair(pa, pb)) => {
                a.encode_unchecked(pa) * b.cardinality().unwrap_or(1) + b.encode_unchecked(pb)
            }
            (StrategySpace::Boxed(_, inner), p) => inner.encode_unchecked(p),
            _ => 0,
        }
    }

    /// Verifies that `p` is a point of this space.
    pub fn check(&self, p: &Profile) -> Result<()> {
        match (self, p) {
            (StrategySpace::Trivial, Profile::Trivial) => Ok(()),
            (StrategySpace::Player(leaf), Profile::Table(t)) => {
                let m = leaf.obs.cardinality().unwrap_or(0);
                if t.len() as u64 != m {
                    return Err(Error::ProfileShape(format!(
                        "player `{}` needs a table of {m} entries, got {}",
                        leaf.name,
                        t.len()
                    )));
                }
                for v in t.iter() {
                    if !leaf.choice.contains(v) {
                        return Err(Error::ProfileShape(format!(
                            "player `{}` chooses `{v}`, which is not in {}",
                            leaf.name, leaf.choice
                        )));
                    }
                }
                Ok(())
            }
            (StrategySpace::Pair(a, b), Profile::Pair(pa, pb)) => {
                a.check(pa)?;
                b.check(pb)
            }
            (StrategySpace::Boxed(_, inner), p) => inner.check(p),
            _ => Err(Error::ProfileShape("profile tree does not mirror the game".into())),
        }
    }

    /// Builds a profile from leaf tables given in left-to-right order.
    pub fn from_leaves(&self, tables: Vec<Vec<Value>>) -> Result<Profile> {
        let mut it = tables.into_iter();
        let p = self.fill(&mut it)?;
        if it.next().is_some() {
            return Err(Error::ProfileShape("too many leaf tables".into()));
        }
        self.check(&p)?;
        Ok(p)
    }

    fn fill(&self, it: &mut impl Iterator<Item = Vec<Value>>) -> Result<Profile> {
        Ok(match self {
            StrategySpace::Trivial => Profile::Trivial,
            StrategySpace::Player(_) => Profile::table(
                it.next()
                    .ok_or_else(|| Error::ProfileShape("too few leaf tables".into()))?,
            ),
            StrategySpace::Pair(a, b) => {
                let pa = a.fill(it)?;
                Profile::pair(pa, b.fill(it)?)
            }
            StrategySpace::Boxed(_, inner) => inner.fill(it)?,
        })
    }

    fn too_large(&self) -> Error {
        Error::SpaceTooLarge {
            cardinality: self.big_cardinality().to_string(),
            budget: u64::MAX,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(name: &str, obs: FiniteType, choice: FiniteType) -> StrategySpace {
        StrategySpace::Player(Arc::new(Leaf { name: name.into(), obs, choice }))
    }

    fn lr() -> FiniteType {
        FiniteType::labels(["L", "R"]).unwrap()
    }

    fn ab() -> FiniteType {
        FiniteType::labels(["a", "b"]).unwrap()
    }

    #[test]
    fn player_leaf_cardinality_is_exponential() {
        assert_eq!(leaf("p", lr(), ab()).cardinality(), Some(4));
        let y1 = FiniteType::int_range(0, 3).unwrap();
        let ultimatum = StrategySpace::pair(
            leaf("p1", FiniteType::Unit, y1.clone()),
            leaf("p2", y1, FiniteType::labels(["A", "R"]).unwrap()),
        );
        assert_eq!(ultimatum.cardinality(), Some(64));
    }

    #[test]
    fn decode_is_lexicographic() {
        let s = leaf("p", lr(), ab());
        let shown: Vec<Vec<String>> = (0..4)
            .map(|i| s.decode(i).unwrap().leaves()[0].iter().map(|v| v.to_string()).collect())
            .collect();
        assert_eq!(shown, [["a", "a"], ["a", "b"], ["b", "a"], ["b", "b"]]);
    }

    #[test]
    fn encode_inverts_decode() {
        let s = StrategySpace::pair(
            leaf("p", lr(), ab()),
            StrategySpace::Boxed("box".into(), Arc::new(leaf("q", FiniteType::Unit, lr()))),
        );
        for i in 0..s.cardinality().unwrap() {
            assert_eq!(s.encode(&s.decode(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn huge_spaces_report_exact_size() {
        let h = FiniteType::int_range(0, 90).unwrap();
        let s = leaf("p", h, FiniteType::int_range(1, 3).unwrap());
        assert_eq!(s.cardinality(), None);
        assert_eq!(s.big_cardinality(), BigUint::from(3u32).pow(91));
    }

    #[test]
    fn check_rejects_partial_tables() {
        let s = leaf("p", lr(), ab());
        let bad = Profile::table(vec![ab().value_at(0).unwrap()]);
        assert!(s.check(&bad).is_err());
    }
}
