//! Equilibrium search and verification for closed games.

use std::cell::RefCell;
use std::ops::Range;
use std::sync::atomic::AtomicU64;

use crate::error::{Error, Result};
use crate::game::{Continuation, EvalCtx, OpenGame, PlayerEvent, Quantifier};
use crate::strategy::Profile;
use crate::types::Value;

/// A game of type `I → I`.
#[derive(Clone, Debug)]
pub struct ClosedGame(OpenGame);

impl TryFrom<OpenGame> for ClosedGame {
    type Error = Error;

    fn try_from(g: OpenGame) -> Result<Self> {
        if g.normal().is_closed() {
            Ok(ClosedGame(g))
        } else {
            Err(Error::NotClosed(g.interface().to_string()))
        }
    }
}

impl ClosedGame {
    pub fn game(&self) -> &OpenGame {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Tie tolerance for argmax players.
    pub tol: f64,
    /// Maximum number of equilibrium checks, counting every sub-check.
    pub budget: u64,
    pub workers: usize,
    pub quantifier: Quantifier,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { tol: 1e-9, budget: 10_000_000, workers: 1, quantifier: Quantifier::Reachable }
    }
}

impl SearchConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

/// Outcome of checking one profile with full diagnostics.
#[derive(Clone, Debug)]
pub struct Diagnosis {
    pub equilibrium: bool,
    /// One entry per distinct player check, in evaluation order.
    pub events: Vec<PlayerEvent>,
}

/// Every equilibrium of `g`, in canonical profile order.
pub fn equilibria(g: &ClosedGame, cfg: &SearchConfig) -> Result<Vec<Profile>> {
    let space = g.0.sigma();
    let card = match space.cardinality() {
        Some(n) if n <= cfg.budget => n,
        _ => {
            return Err(Error::SpaceTooLarge {
                cardinality: space.big_cardinality().to_string(),
                budget: cfg.budget,
            })
        }
    };
    let used = AtomicU64::new(0);
    let chunks = partition(card, cfg.workers);
    let results = scan_chunks(g, cfg, &used, &chunks);
    let mut out = Vec::new();
    for r in results {
        for idx in r? {
            out.push(space.decode(idx)?);
        }
    }
    Ok(out)
}

/// Contiguous ranges covering `0..card`, several per worker.
pub fn partition(card: u64, workers: usize) -> Vec<Range<u64>> {
    let pieces = (workers.max(1) as u64 * 4).min(card.max(1));
    let size = card.div_ceil(pieces).max(1);
    (0..pieces)
        .map(|i| (i * size).min(card)..((i + 1) * size).min(card))
        .filter(|r| !r.is_empty())
        .collect()
}

fn scan(g: &ClosedGame, cfg: &SearchConfig, used: &AtomicU64, range: Range<u64>) -> Result<Vec<u64>> {
    let space = g.0.sigma();
    let k = Continuation::trivial();
    let ctx = EvalCtx {
        tol: cfg.tol,
        budget: cfg.budget,
        used,
        quantifier: cfg.quantifier,
        short_circuit: true,
        events: None,
    };
    let mut hits = Vec::new();
    for idx in range {
        let sigma = space.decode(idx)?;
        if g.0.eq_member_with(&sigma, &Value::Unit, &k, &ctx)? {
            hits.push(idx);
        }
    }
    Ok(hits)
}

#[cfg(feature = "parallel")]
fn scan_chunks(
    g: &ClosedGame,
    cfg: &SearchConfig,
    used: &AtomicU64,
    chunks: &[Range<u64>],
) -> Vec<Result<Vec<u64>>> {
    use rayon::prelude::*;
    if cfg.workers <= 1 || chunks.len() <= 1 {
        return scan_sequential(g, cfg, used, chunks);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(pool) => pool.install(|| {
            chunks
                .par_iter()
                .map(|r| scan(g, cfg, used, r.clone()))
                .collect()
        }),
        Err(_) => scan_sequential(g, cfg, used, chunks),
    }
}

#[cfg(not(feature = "parallel"))]
fn scan_chunks(
    g: &ClosedGame,
    cfg: &SearchConfig,
    used: &AtomicU64,
    chunks: &[Range<u64>],
) -> Vec<Result<Vec<u64>>> {
    scan_sequential(g, cfg, used, chunks)
}

fn scan_sequential(
    g: &ClosedGame,
    cfg: &SearchConfig,
    used: &AtomicU64,
    chunks: &[Range<u64>],
) -> Vec<Result<Vec<u64>>> {
    chunks.iter().map(|r| scan(g, cfg, used, r.clone())).collect()
}

/// `σ ∈ E(•, •)`.
pub fn check_profile(g: &ClosedGame, sigma: &Profile, cfg: &SearchConfig) -> Result<bool> {
    let used = AtomicU64::new(0);
    let ctx = EvalCtx {
        tol: cfg.tol,
        budget: cfg.budget,
        used: &used,
        quantifier: cfg.quantifier,
        short_circuit: true,
        events: None,
    };
    g.0.eq_member_with(sigma, &Value::Unit, &Continuation::trivial(), &ctx)
}

/// Checks `sigma` without short-circuiting and records every player check.
pub fn diagnose(g: &ClosedGame, sigma: &Profile, cfg: &SearchConfig) -> Result<Diagnosis> {
    let used = AtomicU64::new(0);
    let events = RefCell::new(Vec::new());
    let ctx = EvalCtx {
        tol: cfg.tol,
        budget: cfg.budget,
        used: &used,
        quantifier: cfg.quantifier,
        short_circuit: false,
        events: Some(&events),
    };
    let equilibrium = g.0.eq_member_with(sigma, &Value::Unit, &Continuation::trivial(), &ctx)?;
    Ok(Diagnosis { equilibrium, events: events.into_inner() })
}
