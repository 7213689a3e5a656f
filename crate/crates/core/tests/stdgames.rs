use std::path::PathBuf;

use og_core::profile_json::{leaf_paths, profile_to_json};
use og_core::stdgames::*;
use og_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str, params: &[(&str, &str)]) -> ClosedGame {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let src = std::fs::read_to_string(path).unwrap();
    let params: Vec<(String, String)> = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    ClosedGame::try_from(dsl::elaborate(&src, &params).unwrap()).unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn eq_json(g: &ClosedGame) -> Vec<String> {
    equilibria(g, &cfg())
        .unwrap()
        .iter()
        .map(|p| profile_to_json(g.game().sigma(), p).unwrap().to_string())
        .collect()
}

fn random_tables(g: &ClosedGame, rng: &mut ChaCha8Rng) -> Vec<Vec<Value>> {
    g.game()
        .sigma()
        .leaves()
        .iter()
        .map(|leaf| {
            let choices: Vec<Value> = leaf.choice.values().unwrap().collect();
            let n = leaf.obs.cardinality().unwrap();
            (0..n).map(|_| choices[rng.gen_range(0..choices.len())].clone()).collect()
        })
        .collect()
}

fn events(g: &ClosedGame, tables: Vec<Vec<Value>>) -> (bool, Vec<String>) {
    let p = g.game().sigma().from_leaves(tables).unwrap();
    let d = diagnose(g, &p, &cfg()).unwrap();
    let mut ev: Vec<String> = d
        .events
        .iter()
        .map(|e| format!("{} {} {} {} {:?} {}", e.player, e.obs, e.chosen, e.chosen_outcome, e.best, e.ok))
        .collect();
    ev.sort();
    ev.dedup();
    (d.equilibrium, ev)
}

/// Same leaves, and the same verdict and player outcomes on random profiles.
fn assert_agree(built: &ClosedGame, file: &ClosedGame, samples: usize) {
    assert_eq!(leaf_paths(built.game().sigma()), leaf_paths(file.game().sigma()));
    assert_eq!(built.game().interface(), file.game().interface());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..samples {
        let t = random_tables(built, &mut rng);
        assert_eq!(events(built, t.clone()), events(file, t));
    }
}

fn labels(names: &[&str]) -> FiniteType {
    FiniteType::labels(names).unwrap()
}

fn cournot_13() -> CournotParams {
    CournotParams { a: 13.0, b: 1.0, c: 1.0, grid: FiniteType::int_range(0, 12).unwrap() }
}

fn stackelberg_grid() -> CournotParams {
    let grid = FiniteType::num_set([0, 2, 3, 4, 6].map(Scaled::from_int)).unwrap();
    CournotParams { grid, ..cournot_13() }
}

fn repeated_params(beta: f64) -> RepeatedParams {
    RepeatedParams {
        stage: CournotParams { a: 7.0, b: 1.0, c: 1.0, grid: FiniteType::int_range(1, 3).unwrap() },
        periods: 2,
        beta,
    }
}

#[test]
fn meeting_matches_fixture() {
    let g = meeting_ny().unwrap();
    assert_agree(&g, &fixture("meeting_ny.og", &[]), 20);
    assert_eq!(eq_json(&g), [r#"{"P1":"GCT","P2":"GCT"}"#, r#"{"P1":"ES","P2":"ES"}"#]);
}

#[test]
fn prisoners_dilemma_matches_fixture() {
    let cd = labels(&["C", "D"]);
    let g = bimatrix(&cd, &cd, |a, b| match (a.label_name(), b.label_name()) {
        (Some("C"), Some("C")) => (2.0, 2.0),
        (Some("C"), _) => (0.0, 3.0),
        (_, Some("C")) => (3.0, 0.0),
        _ => (1.0, 1.0),
    })
    .unwrap();
    assert_agree(&g, &fixture("bimatrix_pd.og", &[]), 20);
    assert_eq!(eq_json(&g), [r#"{"P1":"D","P2":"D"}"#]);
}

#[test]
fn constant_bimatrix_everything_is_an_equilibrium() {
    let cd = labels(&["C", "D"]);
    let g = bimatrix(&cd, &cd, |_, _| (1.0, 1.0)).unwrap();
    assert_eq!(eq_json(&g).len(), 4);
}

#[test]
fn ultimatum_variants_match_fixtures() {
    for n in [1, 3] {
        let p = UltimatumParams { n };
        let sep = ultimatum(p, UltimatumVariant::Separate).unwrap();
        let com = ultimatum(p, UltimatumVariant::Combined).unwrap();
        let ns = n.to_string();
        assert_agree(&sep, &fixture("ultimatum.og", &[("N", &ns)]), 30);
        assert_agree(&com, &fixture("ultimatum_combined.og", &[("N", &ns)]), 30);
        assert_eq!(eq_json(&sep), eq_json(&com));
    }
}

#[test]
fn cournot_matches_fixture() {
    let g = cournot(&cournot_13()).unwrap();
    assert_agree(&g, &fixture("cournot_13_1_1.og", &[]), 30);
    assert_eq!(
        eq_json(&g),
        [r#"{"P1":3,"P2":5,"Pi":{}}"#, r#"{"P1":4,"P2":4,"Pi":{}}"#, r#"{"P1":5,"P2":3,"Pi":{}}"#]
    );
}

#[test]
fn cournot_equilibria_are_symmetric() {
    let p = CournotParams { a: 10.0, b: 1.0, c: 1.0, grid: FiniteType::int_range(0, 6).unwrap() };
    let g = cournot(&p).unwrap();
    let eqs = equilibria(&g, &cfg()).unwrap();
    let pairs: Vec<Vec<Value>> = eqs
        .iter()
        .map(|e| e.leaves().iter().map(|t| t[0].clone()).collect())
        .collect();
    for pr in &pairs {
        assert!(pairs.contains(&vec![pr[1].clone(), pr[0].clone()]));
    }
    assert!(pairs.contains(&vec![Value::Int(3), Value::Int(3)]));
}

#[test]
fn stackelberg_matches_fixture() {
    let g = stackelberg(&stackelberg_grid()).unwrap();
    assert_agree(&g, &fixture("stackelberg.og", &[]), 30);
}

#[test]
fn stackelberg_single_point_grid() {
    let p = CournotParams { grid: FiniteType::int_range(2, 2).unwrap(), ..cournot_13() };
    let g = stackelberg(&p).unwrap();
    assert_eq!(g.game().sigma().cardinality(), Some(1));
    assert_eq!(eq_json(&g).len(), 1);
}

#[test]
fn repeated_matches_fixture() {
    for beta in ["0", "0.5", "1"] {
        let g = repeated(&repeated_params(beta.parse().unwrap())).unwrap();
        assert_agree(&g, &fixture("repeated_cournot.og", &[("beta", beta)]), 15);
    }
}

#[test]
fn repeated_markov_profile_is_subgame_perfect() {
    for beta in [0.0, 0.5, 1.0] {
        let g = repeated(&repeated_params(beta)).unwrap();
        let leaves = g.game().sigma().leaves();
        let twos: Vec<Vec<Value>> = leaves
            .iter()
            .map(|l| vec![Value::Int(2); l.obs.cardinality().unwrap() as usize])
            .collect();
        let p = g.game().sigma().from_leaves(twos.clone()).unwrap();
        assert!(check_profile(&g, &p, &cfg()).unwrap());

        let mut dev = twos;
        dev[0][0] = Value::Int(3);
        let p = g.game().sigma().from_leaves(dev).unwrap();
        assert!(!check_profile(&g, &p, &cfg()).unwrap());
    }
}

#[test]
fn one_period_repeated_game_is_cournot() {
    let p = RepeatedParams { periods: 1, ..repeated_params(0.5) };
    let rg = repeated(&p).unwrap();
    let cg = cournot(&p.stage).unwrap();
    let obs = rg.game().sigma().leaves()[0].obs.cardinality().unwrap() as usize;
    for q1 in 1..=3 {
        for q2 in 1..=3 {
            let r = rg.game().sigma().from_leaves(vec![vec![Value::Int(q1); obs], vec![Value::Int(q2); obs]]);
            let c = cg.game().sigma().from_leaves(vec![vec![Value::Int(q1)], vec![Value::Int(q2)]]);
            assert_eq!(
                check_profile(&rg, &r.unwrap(), &cfg()).unwrap(),
                check_profile(&cg, &c.unwrap(), &cfg()).unwrap()
            );
        }
    }
}

#[test]
fn single_firm_repeated_decision() {
    let g = repeated_decision(&repeated_params(0.5)).unwrap();
    let space = g.game().sigma();
    let n = space.leaves()[0].obs.cardinality().unwrap() as usize;
    assert_eq!(space.leaves().len(), 2);
    let constant = |q: i64| space.from_leaves(vec![vec![Value::Int(q); n]; 2]).unwrap();
    assert!(check_profile(&g, &constant(3), &cfg()).unwrap());
    assert!(!check_profile(&g, &constant(2), &cfg()).unwrap());
}

fn monopolist() -> ClosedGame {
    let prices = FiniteType::grid(Scaled::from_int(0), Scaled::from_int(12), Scaled::from_int(3)).unwrap();
    monopolist_duopoly(12.0, 1.0, &prices, &FiniteType::int_range(0, 6).unwrap()).unwrap()
}

fn monopolist_profile(g: &ClosedGame, price: i64) -> Profile {
    let p = Value::Fixed(Scaled::from_int(price));
    let table: Vec<Value> = [4, 3, 2, 1, 0].map(Value::Int).to_vec();
    g.game().sigma().from_leaves(vec![vec![p], table.clone(), table]).unwrap()
}

#[test]
fn monopolist_matches_fixture() {
    let g = monopolist();
    assert_agree(&g, &fixture("monopolist_duopoly.og", &[]), 30);
    assert!(check_profile(&g, &monopolist_profile(&g, 6), &cfg()).unwrap());
    for price in [0, 3, 9, 12] {
        assert!(!check_profile(&g, &monopolist_profile(&g, price), &cfg()).unwrap());
    }
}

#[test]
fn monopolist_at_a_fixed_price_is_cournot() {
    let qty = FiniteType::int_range(0, 6).unwrap();
    let price = FiniteType::num_set([Scaled::from_int(3)]).unwrap();
    let m = monopolist_duopoly(12.0, 1.0, &price, &qty).unwrap();
    let c = cournot(&CournotParams { a: 12.0, b: 1.0, c: 3.0, grid: qty }).unwrap();
    let project = |g: &ClosedGame, skip: usize| -> Vec<Vec<Value>> {
        equilibria(g, &cfg())
            .unwrap()
            .iter()
            .map(|e| e.leaves().iter().skip(skip).map(|t| t[0].clone()).collect())
            .collect()
    };
    assert_eq!(project(&m, 1), project(&c, 0));
}

#[test]
fn coordination_matches_fixture() {
    let t = labels(&["A", "B"]);
    let g = coordination(&t, false).unwrap();
    assert_agree(&g, &fixture("coordination.og", &[]), 8);
    assert_eq!(
        eq_json(&g),
        [r#"{"G1":"A","G2":[["A","A"],["B","B"]]}"#, r#"{"G1":"B","G2":[["A","A"],["B","B"]]}"#]
    );
}

#[test]
fn coordination_variants() {
    let one = labels(&["A"]);
    assert_eq!(eq_json(&coordination(&one, false).unwrap()).len(), 1);
    let t = labels(&["A", "B"]);
    let sym = eq_json(&coordination(&t, true).unwrap());
    assert_eq!(sym, eq_json(&coordination(&t, false).unwrap()));
}
