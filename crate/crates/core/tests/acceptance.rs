//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::path::Path;
use std::time::Instant;

use bor_depth::agents::{rollout, train_tabular, FixedKPolicy, Learner, Policy, TabularHyperparams};
use bor_depth::config::{run_sweep, Manifest, Sweep, MANIFEST_FILE};
use bor_depth::env::{Episode, EpisodeConfig, RelevantCount, RewardKind};
use bor_depth::harness::{generate_synthetic, prepare_episodes, run_experiment, ExperimentSpec, Method, SyntheticSpec};
use bor_depth::metric::{self, bor, bor_max, bor_opt, doubling_delta, p_rand, p_rand_log_space, SelectionContext};
use bor_depth::report::{EvalReport, REPORT_FILES};
use bor_depth::scorer::{rank, ScoreVector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = (bool, String);

fn ctx(n: u64, r: u64, k: u64) -> SelectionContext {
    SelectionContext::new(n, r, k).unwrap()
}

/// `C(n, k)` exactly; fine for n <= 60.
fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |c, i| c * (n - i) as u128 / (i + 1) as u128)
}

fn metric_exactness() -> Check {
    // Exact rational oracle over every small case.
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=30u64 {
        for r in 1..=5.min(n) {
            for k in 1..=n {
                let total = binomial(n, k);
                let miss = if k <= n - r { binomial(n - r, k) } else { 0 };
                let exact = (total - miss) as f64 / total as f64;
                for p in [p_rand(ctx(n, r, k)), p_rand_log_space(ctx(n, r, k))] {
                    worst = worst.max((p - exact).abs() / exact);
                }
                cases += 1;
            }
        }
    }
    let exact_ok = worst <= 1e-12;

    // Monte Carlo: relevant items are indices 0..R of a uniform K-subset.
    let draws = 1_000_000u32;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst_z = 0.0f64;
    for (n, r, k) in [(30u64, 1u64, 3u64), (20, 3, 5), (100, 5, 10), (50, 2, 25)] {
        let hits = (0..draws)
            .filter(|_| {
                index::sample(&mut rng, n as usize, k as usize)
                    .iter()
                    .any(|i| (i as u64) < r)
            })
            .count();
        let p = p_rand(ctx(n, r, k));
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        worst_z = worst_z.max((hits as f64 / draws as f64 - p).abs() / se);
    }
    let mc_ok = worst_z <= 3.0;

    // R = 1 shortcut against the general log-space path, every K <= N <= 10^4.
    let mut worst_r1 = 0.0f64;
    let mut worst_lgamma = 0.0f64;
    for n in 1..=10_000u64 {
        for k in 1..=n {
            let c = ctx(n, 1, k);
            let short = p_rand(c);
            worst_r1 = worst_r1.max((short - p_rand_log_space(c)).abs() / short);
            if k < n {
                let lg = -libm::expm1(metric::ln_binomial(n - 1, k) - metric::ln_binomial(n, k));
                worst_lgamma = worst_lgamma.max((short - lg).abs() / short);
            }
        }
    }
    let r1_ok = worst_r1 <= 1e-12;
    (
        exact_ok && mc_ok && r1_ok,
        format!(
            "{cases} exact cases, max rel err {worst:.1e}; Monte Carlo max |z| {worst_z:.2} (10^6 draws x 4); \
             R=1 vs log-space max rel err {worst_r1:.1e} over N<=1e4 (pure lgamma differences reach {worst_lgamma:.1e})"
        ),
    )
}

fn reference_values() -> Check {
    let a = bor_max(ctx(500, 1, 3)).value();
    let b = bor_max(ctx(500, 1, 100)).value();
    let c = bor_opt(100, 50).unwrap().value();
    let ten = bor(1.0, 1.0 / 1024.0).unwrap().value();
    let ten_b = bor(0.5, 0.5 / 1024.0).unwrap().value();
    let near = [1023.0, 1025.0].map(|ratio| bor(1.0, 1.0 / ratio).unwrap().value());
    let ok = (a - 7.381).abs() <= 1e-3
        && (b - 2.322).abs() <= 1e-3
        && (c - 1.0).abs() <= 5e-4
        && ten == 10.0
        && ten_b == 10.0
        && near.iter().all(|&v| v != 10.0);
    (
        ok,
        format!(
            "bor_max(500,1,3)={a:.4}, bor_max(500,1,100)={b:.4}, bor_opt(100,50)={c:.4}, \
             ratio 1024 -> {ten} bits, 1023/1025 -> {:.5}/{:.5}",
            near[0], near[1]
        ),
    )
}

fn doubling_rule() -> Check {
    let n = 100_000u64;
    let plateau = 0.83;
    let at = |k: u64| bor(plateau, p_rand(ctx(n, 1, k))).unwrap().value();
    // Exact at the reported precision; the residue is log2 rounding.
    let mut worst_double = 0.0f64;
    let mut printed_exact = true;
    for k in 1..=n / 2 {
        let delta = at(2 * k) - at(k);
        worst_double = worst_double.max((delta + 1.0).abs());
        printed_exact &= format!("{delta:.3}") == "-1.000";
    }
    let mut worst_pair = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100_000 {
        let k1 = rng.random_range(1..=n);
        let k2 = rng.random_range(1..=n);
        let expected = -libm::log2(k2 as f64 / k1 as f64);
        let measured = at(k2) - at(k1);
        let closed = doubling_delta(k1, k2).unwrap().value();
        worst_pair = worst_pair
            .max((measured - expected).abs())
            .max((closed - expected).abs());
    }
    (
        printed_exact && worst_double <= 1e-12 && worst_pair <= 1e-9,
        format!(
            "K->2K on a plateau: every dBoR prints -1.000, max |dBoR + 1| = {worst_double:.1e} over K<=5e4; \
             arbitrary K1->K2: max err {worst_pair:.1e}"
        ),
    )
}

fn toy_instance(rng: &mut ChaCha8Rng, id: usize) -> (Episode, EpisodeConfig, Option<usize>) {
    let n = rng.random_range(2..=32usize);
    let mut scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    scores.sort_by(|a, b| b.total_cmp(a));
    let ranked = rank(&ScoreVector {
        query_id: format!("toy{id}"),
        entries: scores
            .iter()
            .enumerate()
            .map(|(i, &s)| (format!("t{i:02}"), s))
            .collect(),
    });
    // One toy in ten has its gold tool outside the list.
    let gold_rank = (rng.random::<f64>() >= 0.1).then(|| rng.random_range(1..=n));
    let gold = match gold_rank {
        Some(r) => ranked.entries()[r - 1].tool_id.clone(),
        None => "absent".into(),
    };
    let cfg = EpisodeConfig {
        reward_kind: [RewardKind::Bor, RewardKind::F1][rng.random_range(0..2)],
        gamma: [0.9, 0.95, 1.0][rng.random_range(0..3)],
        step_cost: [0.0, 0.005, 0.01, 0.05][rng.random_range(0..4)],
        relevant_count: RelevantCount::Oracle,
    };
    let ep = Episode {
        query_id: format!("toy{id}"),
        ranked,
        gold: vec![gold],
    };
    (ep, cfg, gold_rank)
}

/// Discounted return of stopping at each depth, from the closed form.
fn enumerate_returns(n: usize, gold_rank: Option<usize>, cfg: &EpisodeConfig) -> Vec<f64> {
    (1..=n)
        .map(|k| {
            let costs: f64 = (0..k - 1).map(|t| -cfg.step_cost * cfg.gamma.powi(t as i32)).sum();
            let found = gold_rank.is_some_and(|r| r <= k);
            let terminal = match (found, cfg.reward_kind) {
                (false, _) => 0.0,
                (true, RewardKind::Bor) => libm::log2(n as f64 / k as f64),
                (true, RewardKind::F1) => 2.0 / (k as f64 + 1.0),
                (true, RewardKind::ConstantOne) => 1.0,
            };
            costs + cfg.gamma.powi(k as i32 - 1) * terminal
        })
        .collect()
}

fn toy_optimality() -> Check {
    let hp = TabularHyperparams {
        epochs: 3000,
        learning_rate: 0.5,
        visit_decay: 0.0,
        initial_value: 10.0,
        optimism: 0.0,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut matched = 0;
    let mut misses = Vec::new();
    for i in 0..100 {
        let (ep, cfg, gold_rank) = toy_instance(&mut rng, i);
        let returns = enumerate_returns(ep.ranked.len(), gold_rank, &cfg);
        let best = returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (policy, _) = train_tabular(std::slice::from_ref(&ep), &cfg, &hp, i as u64).unwrap();
        let depth = rollout(&Policy::Tabular(policy), &ep, &cfg).unwrap().depth;
        if returns[depth - 1] >= best - 1e-9 {
            matched += 1;
        } else {
            misses.push(format!("toy{i}: K={depth}"));
        }
    }
    (
        matched >= 95,
        format!(
            "{matched}/100 greedy depths optimal (need 95){}",
            if misses.is_empty() {
                String::new()
            } else {
                format!("; misses {}", misses.join(", "))
            }
        ),
    )
}

fn synthetic_report(preset: &str) -> EvalReport {
    let bench = generate_synthetic(&SyntheticSpec::preset(preset).unwrap(), 0).unwrap();
    let spec = ExperimentSpec {
        name: preset.into(),
        ..ExperimentSpec::default()
    };
    run_experiment(&bench, &spec).unwrap()
}

fn self_pruning() -> Check {
    let strong = synthetic_report("strong");
    let weak = synthetic_report("weak");
    let (sb, sf) = (strong.method("bor_q").unwrap(), strong.method("fixed_k1").unwrap());
    let wb = weak.method("bor_q").unwrap();
    let gain = sb.found_pct.mean - sf.found_pct.mean;
    let ratio = wb.mean_k.mean / sb.mean_k.mean;
    (
        sb.mean_k.mean < 10.0 && gain >= 5.0 && ratio >= 3.0,
        format!(
            "strong: bor K={:.2}, found {:.1}% vs fixed_k1 {:.1}% (+{gain:.1}); weak: bor K={:.2} ({ratio:.1}x strong)",
            sb.mean_k.mean, sb.found_pct.mean, sf.found_pct.mean, wb.mean_k.mean
        ),
    )
}

fn difficulty_adaptation() -> Check {
    let report = synthetic_report("mixed");
    let ks = |m: &str| -> Vec<f64> { report.bucket_rows(m).map(|b| b.mean_k.unwrap_or(f64::NAN)).collect() };
    let bor_k = ks("bor_q");
    let f1_k = ks("f1_q");
    let f1_mean = report.method("f1_q").unwrap().mean_k.mean;
    let monotone = bor_k.windows(2).all(|w| w[0] <= w[1]);
    let spread = bor_k[3] >= 1.5 * bor_k[0];
    let f1_flat = f1_k.iter().all(|k| (k - f1_mean).abs() <= 1.0);
    let fmt = |v: &[f64]| v.iter().map(|k| format!("{k:.2}")).collect::<Vec<_>>().join(" / ");
    (
        monotone && spread && f1_flat,
        format!(
            "bor K by bucket {} (very_hard {:.1}x easy); f1 K by bucket {} around {f1_mean:.2}",
            fmt(&bor_k),
            bor_k[3] / bor_k[0],
            fmt(&f1_k)
        ),
    )
}

fn f1_values() -> Check {
    let f1 = EpisodeConfig {
        reward_kind: RewardKind::F1,
        ..Default::default()
    };
    let got = [1, 4, 9].map(|k| f1.terminal_reward(true, k, 100, 1));
    let constant = EpisodeConfig {
        reward_kind: RewardKind::ConstantOne,
        ..Default::default()
    };
    let flat = (1..=100).all(|k| constant.terminal_reward(true, k, 100, 1) == 1.0);
    let misses = [f1, constant]
        .iter()
        .all(|c| c.terminal_reward(false, 3, 100, 1) == 0.0);
    (
        got == [1.0, 0.4, 0.2] && flat && misses,
        format!("F1 at K=1,4,9: {got:?}; constant_one is 1.0 at every K<=100"),
    )
}

fn fixed_k_oracle() -> Check {
    let bench = generate_synthetic(&SyntheticSpec::preset("mixed").unwrap(), 3).unwrap();
    let n = bench.registry.len();
    let spec = ExperimentSpec {
        name: "fixed".into(),
        seeds: vec![0],
        methods: (1..=n)
            .map(|k| Method::new(format!("k{k}"), Learner::Fixed { k }))
            .collect(),
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&bench, &spec).unwrap();
    let test = prepare_episodes(&bench, &spec).unwrap().test;
    let scores = bench.scores.as_ref().unwrap();
    // Gold rank straight from the raw scores: tools strictly ahead of it.
    let ranks: Vec<usize> = test
        .iter()
        .map(|ep| {
            let q = bench.queries.iter().find(|q| q.query_id == ep.query_id).unwrap();
            let v = &scores[&q.query_id];
            let gold = &q.gold_ids[0];
            let g = v.score_of(gold).unwrap();
            1 + v
                .entries
                .iter()
                .filter(|(id, s)| *s > g || (*s == g && id < gold))
                .count()
        })
        .collect();
    let mut mismatched = Vec::new();
    for k in 1..=n {
        let hits = ranks.iter().filter(|&&r| r <= k).count();
        let expected = 100.0 * hits as f64 / ranks.len() as f64;
        let got = report.method(&format!("k{k}")).unwrap().found_pct.mean;
        if got != expected {
            mismatched.push(k);
        }
    }
    // The policy alone, outside the harness.
    let direct = (1..=n).all(|k| {
        let p = Policy::Fixed(FixedKPolicy::new(k).unwrap());
        test.iter().all(|ep| rollout(&p, ep, &spec.episode).unwrap().depth == k)
    });
    (
        mismatched.is_empty() && direct,
        format!(
            "{} test queries, k = 1..={n}: {} mismatches",
            ranks.len(),
            mismatched.len()
        ),
    )
}

fn big_n_safety() -> Check {
    let n = 8_841_823u64;
    let mut ok = true;
    let mut strict = true;
    let mut evaluated = 0usize;
    let mut prev_row: Vec<f64> = Vec::new();
    for r in 1..=500u64 {
        let mut row = Vec::with_capacity(1000);
        let mut prev = 0.0;
        for k in 1..=1000u64 {
            let p = p_rand(ctx(n, r, k));
            let b = bor_max(ctx(n, r, k)).value();
            ok &= p.is_finite() && p > 0.0 && p <= 1.0 && b.is_finite() && b >= 0.0;
            ok &= p >= prev;
            strict &= p > prev;
            prev = p;
            row.push(p);
            evaluated += 1;
        }
        if !prev_row.is_empty() {
            ok &= row.iter().zip(&prev_row).all(|(a, b)| a >= b);
        }
        prev_row = row;
    }
    let mut prev_opt = f64::INFINITY;
    for k in 1..=1000u64 {
        let o = bor_opt(n, k).unwrap().value();
        ok &= o.is_finite() && o <= prev_opt;
        prev_opt = o;
    }
    let top = bor_opt(n, 1).unwrap().value();
    let p_last = p_rand(ctx(n, 500, 1000));
    (
        ok,
        format!(
            "N={n}: {evaluated} (R,K) pairs finite and monotone in K and R (strict in K: {strict}); \
             bor_opt(N,1)={top:.3}, p_rand(R=500,K=1000)={p_last:.6}"
        ),
    )
}

const SWEEP: &str = r#"
name = "repro"

[benchmark]
synthetic = { preset = "mixed", seed = 11, num_queries = 400 }

[experiment]
seeds = [0, 1, 2]
candidates = { size = 40, hard_count = 5 }

[[experiment.methods]]
name = "fixed_k1"
learner = { kind = "fixed", k = 1 }

[[experiment.methods]]
name = "q"
learner = { kind = "tabular", epochs = 10 }

[[experiment.methods]]
name = "dqn"
learner = { kind = "neural", epochs = 2, batch_size = 16 }

[grid]
"experiment.episode.reward_kind" = ["bor", "f1"]
"#;

fn files_equal(a: &Path, b: &Path, names: &[&str]) -> bool {
    names
        .iter()
        .all(|n| matches!((std::fs::read(a.join(n)), std::fs::read(b.join(n))), (Ok(x), Ok(y)) if x == y))
}

fn reproducibility() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let sweep = Sweep::parse(SWEEP, tmp.path(), &[]).unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    let ok_a = run_sweep(&sweep, &a, 1).unwrap().iter().all(|o| o.result.is_ok());
    let ok_b = run_sweep(&sweep, &b, 4).unwrap().iter().all(|o| o.result.is_ok());
    let replayed = Manifest::load(&a.join(MANIFEST_FILE)).unwrap().sweep().unwrap();
    let ok_c = run_sweep(&replayed, &c, 2).unwrap().iter().all(|o| o.result.is_ok());
    let mut same = replayed == sweep;
    let mut compared = 0;
    for other in [&b, &c] {
        same &= files_equal(&a, other, &["summary.csv", "summary.txt", MANIFEST_FILE]);
        for cell in &sweep.cells {
            same &= files_equal(&a.join(&cell.name), &other.join(&cell.name), &REPORT_FILES);
            compared += REPORT_FILES.len();
        }
    }
    (
        ok_a && ok_b && ok_c && same,
        format!(
            "{} cells run with 1 and 4 workers and replayed from the manifest: {compared} report files byte-identical: {same}",
            sweep.cells.len()
        ),
    )
}

fn main() {
    let checks: [(&str, fn() -> Check); 10] = [
        ("metric exactness", metric_exactness),
        ("reference values", reference_values),
        ("doubling rule", doubling_rule),
        ("toy MDP optimality", toy_optimality),
        ("self-pruning", self_pruning),
        ("difficulty adaptation", difficulty_adaptation),
        ("F1 reward values", f1_values),
        ("FixedK oracle", fixed_k_oracle),
        ("big-N safety", big_n_safety),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let (pass, detail) = check();
        let secs = start.elapsed().as_secs_f64();
        failed += usize::from(!pass);
        println!("{} {name} ({secs:.1}s): {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!(
        "acceptance: {} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
