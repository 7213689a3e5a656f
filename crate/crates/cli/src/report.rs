//! JSON reports and their plain-text renderings.

use std::time::Duration;

use og_core::profile_json::{leaf_paths, profile_to_json};
use og_core::{ClosedGame, Diagnosis, OpenGame, PlayerEvent, Profile, Result, StrategySpace};
use serde_json::{json, Value as Json};

fn cardinality(space: &StrategySpace) -> Json {
    match space.cardinality() {
        Some(n) => json!(n),
        None => json!(space.big_cardinality().to_string()),
    }
}

fn millis(d: Duration) -> Json {
    json!((d.as_secs_f64() * 1000.0 * 1000.0).round() / 1000.0)
}

pub fn check_report(name: &str, game: &OpenGame) -> Json {
    json!({
        "game": name,
        "interface": game.interface().to_string(),
        "closed": game.normal().is_closed(),
        "players": leaf_paths(game.sigma()),
        "cardinality": cardinality(game.sigma()),
    })
}

pub fn eq_report(name: &str, g: &ClosedGame, eqs: &[Profile], elapsed: Duration) -> Result<Json> {
    let space = g.game().sigma();
    let profiles = eqs
        .iter()
        .map(|p| profile_to_json(space, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "game": name,
        "cardinality": cardinality(space),
        "count": profiles.len(),
        "equilibria": profiles,
        "elapsed_ms": millis(elapsed),
    }))
}

fn gain(e: &PlayerEvent) -> Json {
    match (&e.best, e.chosen_outcome.as_f64()) {
        (Some((_, b)), Some(c)) => b.as_f64().map(|b| json!(b - c)).unwrap_or(Json::Null),
        _ => Json::Null,
    }
}

fn event_json(path: &str, e: &PlayerEvent) -> Json {
    json!({
        "player": path,
        "observation": e.obs.to_json(),
        "choice": e.chosen.to_json(),
        "payoff": e.chosen_outcome.to_json(),
        "best": e.best.as_ref().map(|(c, o)| json!({ "choice": c.to_json(), "payoff": o.to_json() })),
        "ok": e.ok,
    })
}

pub fn verify_report(name: &str, g: &ClosedGame, d: &Diagnosis, elapsed: Duration) -> Json {
    let paths = leaf_paths(g.game().sigma());
    let path = |e: &PlayerEvent| {
        paths
            .get(e.leaf)
            .cloned()
            .unwrap_or_else(|| e.player.to_string())
    };
    let players: Vec<Json> = (0..paths.len())
        .filter_map(|leaf| d.events.iter().find(|e| e.leaf == leaf && e.on_path))
        .map(|e| event_json(&path(e), e))
        .collect();
    let mut seen: Vec<&PlayerEvent> = Vec::new();
    let mut deviations = Vec::new();
    for e in d.events.iter().filter(|e| !e.ok) {
        if seen.contains(&e) {
            continue;
        }
        seen.push(e);
        deviations.push(json!({
            "player": path(e),
            "observation": e.obs.to_json(),
            "on_path": e.on_path,
            "from": e.chosen.to_json(),
            "to": e.best.as_ref().map(|(c, _)| c.to_json()),
            "gain": gain(e),
        }));
    }
    json!({
        "game": name,
        "equilibrium": d.equilibrium,
        "players": players,
        "deviations": deviations,
        "elapsed_ms": millis(elapsed),
    })
}

fn s(j: &Json) -> String {
    match j {
        Json::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn check_text(r: &Json) -> String {
    let mut out = format!("{}: {}\n", s(&r["game"]), s(&r["interface"]));
    out += &format!("closed: {}\n", r["closed"]);
    out += &format!("strategy profiles: {}\n", s(&r["cardinality"]));
    for p in r["players"].as_array().into_iter().flatten() {
        out += &format!("player {}\n", s(p));
    }
    out
}

pub fn eq_text(r: &Json) -> String {
    let mut out = format!(
        "{}: {} equilibria among {} profiles ({} ms)\n",
        s(&r["game"]),
        r["count"],
        s(&r["cardinality"]),
        r["elapsed_ms"]
    );
    for p in r["equilibria"].as_array().into_iter().flatten() {
        out += &format!("  {p}\n");
    }
    out
}

pub fn verify_text(r: &Json) -> String {
    let verdict = if r["equilibrium"] == json!(true) {
        "equilibrium"
    } else {
        "not an equilibrium"
    };
    let mut out = format!("{}: {verdict} ({} ms)\n", s(&r["game"]), r["elapsed_ms"]);
    for p in r["players"].as_array().into_iter().flatten() {
        out += &format!(
            "  {} at {}: plays {} for {}, best {}\n",
            s(&p["player"]),
            p["observation"],
            p["choice"],
            p["payoff"],
            p["best"]
        );
    }
    for d in r["deviations"].as_array().into_iter().flatten() {
        out += &format!(
            "  deviation: {} at {} from {} to {} gains {}\n",
            s(&d["player"]),
            d["observation"],
            d["from"],
            d["to"],
            d["gain"]
        );
    }
    out
}
