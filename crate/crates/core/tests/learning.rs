use omegalearn::analysis::{evaluate_strategy, max_satisfaction_prob, ReachOptions};
use omegalearn::corpus;
use omegalearn::learn::{
    extract_strategy, learn_product, make_env, q_learning, rabin_q_learning, run_seed, Env, LearnConfig,
    RabinRewardConfig, BASELINE_STEP_SIZE,
};
use omegalearn::model::{Choice, Mdp};
use omegalearn::product::{augment, build_product, Product, ProductOptions};
use omegalearn::{parse_model, ModelFormat};

fn product(name: &str, p: Option<f64>) -> Product {
    let e = corpus::entry(name).unwrap();
    build_product(&e.mdp(p).unwrap(), &e.automaton(), ProductOptions::default()).unwrap()
}

fn rabin_product(name: &str, p: Option<f64>) -> Product {
    let e = corpus::entry(name).unwrap();
    build_product(&e.mdp(p).unwrap(), &e.rabin_automaton(), ProductOptions::default()).unwrap()
}

fn chain_model(prefix: usize) -> Product {
    // `prefix` plain steps, then an accepting self-loop
    let n = prefix + 1;
    let mut text = format!("states {n}\ninitial 0\nap acc\n");
    for s in 0..n {
        let label = if s == prefix { "acc" } else { "" };
        text += &format!("state {s} label {label}\ntrans {s} go 1 {}\n", (s + 1).min(prefix));
    }
    let m = parse_model(&text, ModelFormat::Explicit, &Default::default()).unwrap();
    build_product(&m, &corpus::entry("deferred").unwrap().automaton(), ProductOptions::default()).unwrap()
}

fn episode_rewards(env: &mut Env, episodes: u64) -> Vec<f64> {
    (0..episodes)
        .map(|e| {
            env.reset(e);
            let mut total = 0.0;
            loop {
                let st = env.step(0).unwrap();
                total += st.reward;
                if st.done || st.truncated {
                    break total;
                }
            }
        })
        .collect()
}

#[test]
fn no_accepting_transitions_no_reward() {
    let text = "states 2\ninitial 0\nap acc\nstate 0 label\nstate 1 label\ntrans 0 go 0.5 0\ntrans 0 go 0.5 1\ntrans 1 go 1 0\n";
    let m = parse_model(text, ModelFormat::Explicit, &Default::default()).unwrap();
    let p = build_product(&m, &corpus::entry("deferred").unwrap().automaton(), ProductOptions::default()).unwrap();
    let aug = augment(&p, 0.5).unwrap();
    let mut env = Env::reach(&aug, 20, 3);
    assert!(episode_rewards(&mut env, 500).iter().all(|&r| r == 0.0));
}

#[test]
fn first_step_leaks_with_one_minus_zeta() {
    let p = chain_model(0);
    let aug = augment(&p, 0.5).unwrap();
    let mut env = Env::reach(&aug, 1, 11);
    let rewards = episode_rewards(&mut env, 100_000);
    let freq = rewards.iter().sum::<f64>() / rewards.len() as f64;
    assert!((freq - 0.5).abs() < 0.01, "{freq}");
}

#[test]
fn pumping_frequency_matches_closed_form() {
    let prefix = 30;
    let p = chain_model(prefix);
    let zeta: f64 = 0.99;
    let aug = augment(&p, zeta).unwrap();
    let mut env = Env::reach(&aug, 80, 5);
    let rewards = episode_rewards(&mut env, 20_000);
    let freq = rewards.iter().sum::<f64>() / rewards.len() as f64;
    let k = (80 - prefix) as i32;
    assert!((freq - (1.0 - zeta.powi(k))).abs() < 0.01, "{freq}");
}

#[test]
fn disabled_choice_is_an_error() {
    let p = chain_model(2);
    let aug = augment(&p, 0.5).unwrap();
    let mut env = Env::reach(&aug, 5, 0);
    env.reset(0);
    assert!(env.step(1).is_err());
}

#[test]
fn estimates_a_known_reach_probability() {
    // 0 reaches the target 1 w.p. 0.3 and the absorbing 2 otherwise
    let m = Mdp::new(
        vec!["0".into(), "1".into(), "2".into()],
        vec!["go".into()],
        vec![
            vec![Choice::new(0, vec![(1, 0.3), (2, 0.7)])],
            vec![Choice::new(0, vec![(1, 1.0)])],
            vec![Choice::new(0, vec![(2, 1.0)])],
        ],
        vec![],
        vec![vec![]; 3],
        0,
    )
    .unwrap();
    let cfg = LearnConfig {
        episodes: 100_000,
        alpha: 5e-4,
        seed: 9,
        ..Default::default()
    };
    let mut env = Env::reaching(&m, 1, cfg.episode_length, cfg.seed);
    let q = q_learning(&mut env, &cfg).unwrap();
    let v = q.get(0, 0).unwrap();
    assert!((v - 0.3).abs() < 0.02, "{v}");
}

#[test]
fn learning_is_reproducible() {
    let p = product("twoPairs", None);
    let cfg = LearnConfig {
        episodes: 500,
        seed: 42,
        ..Default::default()
    };
    let (q1, _) = learn_product(&p, &cfg).unwrap();
    let (q2, _) = learn_product(&p, &cfg).unwrap();
    assert_eq!(q1, q2);
    let (q3, _) = learn_product(&p, &LearnConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(q1, q3);
}

fn learned_satisfaction(p: &Product, cfg: &LearnConfig) -> f64 {
    let (q, _) = learn_product(p, cfg).unwrap();
    let mut sigma = extract_strategy(&q, cfg.tie_tol);
    sigma.fill_uniform(p.mdp());
    evaluate_strategy(p, &sigma, None).unwrap().a[p.mdp().initial()]
}

#[test]
fn deferred_high_zeta_picks_b() {
    let p = product("deferred", None);
    let cfg = LearnConfig {
        zeta: 0.99,
        seed: 1,
        ..Default::default()
    };
    let (q, aug) = learn_product(&p, &cfg).unwrap();
    let sigma = extract_strategy(&q, cfg.tie_tol);
    let s0 = aug.mdp().initial();
    let b = p.mdp().choice_index(s0, "b").unwrap();
    assert_eq!(sigma.support(s0), vec![b]);
    assert_eq!(learned_satisfaction(&p, &cfg), 1.0);
}

#[test]
fn deferred_low_zeta_mixes() {
    let p = product("deferred", None);
    let cfg = LearnConfig {
        zeta: 0.05,
        seed: 1,
        ..Default::default()
    };
    let (q, _) = learn_product(&p, &cfg).unwrap();
    let row = q.row(p.mdp().initial()).unwrap();
    assert!((row[0] - row[1]).abs() <= cfg.tie_tol, "{row:?}");
    assert!((learned_satisfaction(&p, &cfg) - 0.5).abs() < 1e-12);
}

#[test]
fn learned_strategies_never_beat_the_optimum() {
    for name in ["twoPairs", "riskReward", "deferred"] {
        let p = product(name, None);
        let opt = max_satisfaction_prob(&p, &ReachOptions::default()).unwrap().values[p.mdp().initial()];
        for run in 0..5 {
            let cfg = LearnConfig {
                seed: run_seed(7, run),
                ..Default::default()
            };
            let a = learned_satisfaction(&p, &cfg);
            assert!(a <= opt + 1e-9);
            assert!((a - opt).abs() < 0.01 || run == 4, "{name} run {run}: {a}");
        }
    }
}

#[test]
fn make_env_checks_config() {
    let p = chain_model(1);
    let aug = augment(&p, 0.5).unwrap();
    let bad = LearnConfig {
        alpha: 0.0,
        ..Default::default()
    };
    assert!(make_env(&aug, &bad).is_err());
}

fn rabin_satisfaction(p: &Product, pair: usize, seed: u64) -> f64 {
    let cfg = LearnConfig {
        seed,
        step_size: BASELINE_STEP_SIZE,
        ..Default::default()
    };
    let rcfg = RabinRewardConfig {
        pair,
        ..Default::default()
    };
    let q = rabin_q_learning(p, &cfg, &rcfg).unwrap();
    let mut sigma = extract_strategy(&q, 1e-9);
    sigma.fill_uniform(p.mdp());
    evaluate_strategy(p, &sigma, None).unwrap().a[p.mdp().initial()]
}

#[test]
fn rabin_baseline_falls_short_on_two_pairs() {
    let p = rabin_product("twoPairs", Some(0.5));
    for pair in [0, 1] {
        let hits = (0..5)
            .filter(|&r| (rabin_satisfaction(&p, pair, run_seed(3, r)) - 2.0 / 3.0).abs() < 1e-9)
            .count();
        assert!(hits >= 4, "pair {pair}: {hits}/5");
    }
}

#[test]
fn rabin_baseline_gambles_on_risk_reward() {
    let p = rabin_product("riskReward", Some(0.75));
    let hits = (0..5)
        .filter(|&r| (rabin_satisfaction(&p, 0, run_seed(3, r)) - 0.75).abs() < 1e-9)
        .count();
    assert!(hits >= 4, "{hits}/5");
}

#[test]
fn relative_value_learner_on_a_unichain_product() {
    // 0 (accepting) may loop or visit 1, which always returns
    let text = "states 2\ninitial 0\nap acc\nstate 0 label acc\nstate 1 label\n\
                trans 0 loop 1 0\ntrans 0 go 1 1\ntrans 1 back 1 0\n";
    let m = parse_model(text, ModelFormat::Explicit, &Default::default()).unwrap();
    let p = build_product(&m, &corpus::entry("deferred").unwrap().automaton(), ProductOptions::default()).unwrap();
    let cfg = LearnConfig {
        episodes: 2_000,
        seed: 4,
        ..Default::default()
    };
    let rcfg = RabinRewardConfig {
        mode: omegalearn::learn::RewardMode::Average,
        ..Default::default()
    };
    let q = rabin_q_learning(&p, &cfg, &rcfg).unwrap();
    let s0 = p.mdp().initial();
    let lp = p.mdp().choice_index(s0, "loop").unwrap();
    assert_eq!(extract_strategy(&q, 1e-9).support(s0), vec![lp]);
    // the reference value settles at the optimal gain
    assert!((q.max(s0) - 1.0).abs() < 0.1, "{:?}", q.row(s0));
}
