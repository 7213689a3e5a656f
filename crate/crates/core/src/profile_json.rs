//! JSON rendering of strategy profiles.
//!
//! A profile is an object keyed by player and box names in diagram order;
//! boxes nest. Repeated names within one object get `#2`, `#3`, ... suffixes.
//! A player table is an array of `[observation, choice]` pairs in canonical
//! observation order, or the bare choice when the player observes nothing.
//! When reading, a table may also be given as
//! `{"default": choice, "overrides": [[observation, choice], ...]}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{Map, Value as Json};

use crate::error::{Error, Result};
use crate::strategy::{Leaf, Profile, StrategySpace};
use crate::types::{FiniteType, Value};

enum Entry<'a> {
    Player(&'a Arc<Leaf>),
    Boxed(&'a StrategySpace),
}

/// Named children of one JSON object, in order, with unique keys.
fn entries(space: &StrategySpace) -> Vec<(String, Entry<'_>)> {
    let mut raw = Vec::new();
    collect(space, &mut raw);
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    raw.into_iter()
        .map(|(name, e)| {
            let n = seen.entry(name.clone()).or_insert(0);
            *n += 1;
            let key = if *n == 1 { name } else { format!("{name}#{n}") };
            (key, e)
        })
        .collect()
}

fn collect<'a>(space: &'a StrategySpace, out: &mut Vec<(String, Entry<'a>)>) {
    match space {
        StrategySpace::Trivial => {}
        StrategySpace::Player(leaf) => out.push((leaf.name.to_string(), Entry::Player(leaf))),
        StrategySpace::Pair(a, b) => {
            collect(a, out);
            collect(b, out);
        }
        StrategySpace::Boxed(name, inner) => out.push((name.to_string(), Entry::Boxed(inner))),
    }
}

/// Slash-separated path of every player leaf, in leaf order.
pub fn leaf_paths(space: &StrategySpace) -> Vec<String> {
    let mut out = Vec::new();
    paths_into(space, "", &mut out);
    out
}

fn paths_into(space: &StrategySpace, prefix: &str, out: &mut Vec<String>) {
    for (key, e) in entries(space) {
        let path = if prefix.is_empty() { key } else { format!("{prefix}/{key}") };
        match e {
            Entry::Player(_) => out.push(path),
            Entry::Boxed(inner) => paths_into(inner, &path, out),
        }
    }
}

pub fn profile_to_json(space: &StrategySpace, p: &Profile) -> Result<Json> {
    space.check(p)?;
    let leaves = p.leaves();
    let mut it = leaves.into_iter();
    Ok(object(space, &mut it))
}

fn object<'a>(space: &StrategySpace, tables: &mut impl Iterator<Item = &'a [Value]>) -> Json {
    let mut map = Map::new();
    for (key, e) in entries(space) {
        let v = match e {
            Entry::Player(leaf) => table_json(leaf, tables.next().unwrap_or(&[])),
            Entry::Boxed(inner) => object(inner, tables),
        };
        map.insert(key, v);
    }
    Json::Object(map)
}

fn table_json(leaf: &Leaf, table: &[Value]) -> Json {
    if leaf.obs == FiniteType::Unit {
        return table.first().map(Value::to_json).unwrap_or(Json::Null);
    }
    let obs = leaf.obs.values().into_iter().flatten();
    Json::Array(
        obs.zip(table)
            .map(|(o, c)| Json::Array(vec![o.to_json(), c.to_json()]))
            .collect(),
    )
}

pub fn profile_from_json(space: &StrategySpace, json: &Json) -> Result<Profile> {
    let mut tables = Vec::new();
    read_object(space, json, "", &mut tables)?;
    space.from_leaves(tables)
}

fn read_object(space: &StrategySpace, json: &Json, path: &str, out: &mut Vec<Vec<Value>>) -> Result<()> {
    let map = json.as_object().ok_or_else(|| shape(path, "expected an object"))?;
    let expected = entries(space);
    for key in map.keys() {
        if !expected.iter().any(|(k, _)| k == key) {
            return Err(shape(path, &format!("unknown key `{key}`")));
        }
    }
    for (key, e) in expected {
        let sub = if path.is_empty() { key.clone() } else { format!("{path}/{key}") };
        let v = map.get(&key).ok_or_else(|| shape(path, &format!("missing key `{key}`")))?;
        match e {
            Entry::Player(leaf) => out.push(read_table(leaf, v, &sub)?),
            Entry::Boxed(inner) => read_object(inner, v, &sub, out)?,
        }
    }
    Ok(())
}

fn read_table(leaf: &Leaf, json: &Json, path: &str) -> Result<Vec<Value>> {
    if leaf.obs == FiniteType::Unit {
        return Ok(vec![leaf.choice.parse_json(json).map_err(|e| shape(path, &e.to_string()))?]);
    }
    let n = leaf.obs.cardinality().unwrap_or(0) as usize;
    let mut slots: Vec<Option<Value>> = vec![None; n];
    let pairs = match json {
        Json::Array(items) => items.as_slice(),
        Json::Object(obj) => {
            let default = obj
                .get("default")
                .ok_or_else(|| shape(path, "table object needs a `default`"))?;
            let c = leaf.choice.parse_json(default).map_err(|e| shape(path, &e.to_string()))?;
            slots.iter_mut().for_each(|s| *s = Some(c.clone()));
            if obj.keys().any(|k| k != "default" && k != "overrides") {
                return Err(shape(path, "table object accepts only `default` and `overrides`"));
            }
            match obj.get("overrides") {
                None => &[],
                Some(Json::Array(items)) => items.as_slice(),
                Some(_) => return Err(shape(path, "`overrides` must be an array of pairs")),
            }
        }
        _ => return Err(shape(path, "expected an array of [observation, choice] pairs")),
    };
    let mut given = vec![false; n];
    for pair in pairs {
        let (o, c) = match pair.as_array().map(Vec::as_slice) {
            Some([o, c]) => (o, c),
            _ => return Err(shape(path, &format!("`{pair}` is not an [observation, choice] pair"))),
        };
        let o = leaf.obs.parse_json(o).map_err(|e| shape(path, &e.to_string()))?;
        let c = leaf.choice.parse_json(c).map_err(|e| shape(path, &e.to_string()))?;
        let i = leaf.obs.index_of(&o).unwrap_or(0) as usize;
        if std::mem::replace(&mut given[i], true) {
            return Err(shape(path, &format!("observation `{o}` listed twice")));
        }
        slots[i] = Some(c);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| {
                let o = leaf.obs.value_at(i as u64).map(|v| v.to_string()).unwrap_or_default();
                shape(path, &format!("no choice for observation `{o}`"))
            })
        })
        .collect()
}

fn shape(path: &str, msg: &str) -> Error {
    if path.is_empty() {
        Error::ProfileShape(msg.to_string())
    } else {
        Error::ProfileShape(format!("{path}: {msg}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(name: &str, obs: FiniteType, choice: FiniteType) -> StrategySpace {
        StrategySpace::Player(Arc::new(Leaf { name: name.into(), obs, choice }))
    }

    fn space() -> StrategySpace {
        let y1 = FiniteType::int_range(0, 2).unwrap();
        let ar = FiniteType::labels(["A", "R"]).unwrap();
        let stage = StrategySpace::pair(leaf("P", FiniteType::Unit, y1.clone()), leaf("P", y1, ar));
        StrategySpace::pair(
            StrategySpace::Boxed("Stage".into(), Arc::new(stage.clone())),
            StrategySpace::Boxed("Stage".into(), Arc::new(stage)),
        )
    }

    #[test]
    fn round_trip_every_profile() {
        let s = space();
        for i in (0..s.cardinality().unwrap()).step_by(7) {
            let p = s.decode(i).unwrap();
            let j = profile_to_json(&s, &p).unwrap();
            assert_eq!(profile_from_json(&s, &j).unwrap(), p);
        }
    }

    #[test]
    fn duplicate_names_are_suffixed() {
        let s = space();
        let j = profile_to_json(&s, &s.decode(0).unwrap()).unwrap();
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["Stage", "Stage#2"]);
        let inner: Vec<&String> = j["Stage"].as_object().unwrap().keys().collect();
        assert_eq!(inner, ["P", "P#2"]);
        assert_eq!(leaf_paths(&s), ["Stage/P", "Stage/P#2", "Stage#2/P", "Stage#2/P#2"]);
    }

    #[test]
    fn default_form_and_errors() {
        let s = leaf("Q", FiniteType::int_range(0, 2).unwrap(), FiniteType::labels(["A", "R"]).unwrap());
        let p = profile_from_json(&s, &serde_json::json!({"Q": {"default": "A", "overrides": [[2, "R"]]}})).unwrap();
        assert_eq!(p.leaves()[0].iter().map(|v| v.to_string()).collect::<String>(), "AAR");
        assert!(profile_from_json(&s, &serde_json::json!({"Q": [[0, "A"]]})).is_err());
        assert!(profile_from_json(&s, &serde_json::json!({"Z": []})).is_err());
    }
}
