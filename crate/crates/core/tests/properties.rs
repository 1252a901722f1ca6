use bor_depth::env::EpisodeTrace;
use bor_depth::harness::{bucketize, BucketScheme};
use bor_depth::metric::{bor, bor_max, p_rand, SelectionContext};
use bor_depth::report::{summarize, MethodRun, SeedRun, StdConvention};
use bor_depth::scorer::{rank, Bm25Index, Bm25Params, ScoreVector, Tool};
use proptest::prelude::*;

fn ctx(n: u64, r: u64, k: u64) -> SelectionContext {
    SelectionContext::new(n, r, k).unwrap()
}

fn tool(id: &str, description: &str) -> Tool {
    Tool {
        id: id.into(),
        name: String::new(),
        description: description.into(),
        parameters: vec![],
    }
}

proptest! {
    #[test]
    fn p_rand_is_a_probability_monotone_in_depth_and_relevance(
        n in 1u64..5_000_000,
        r_frac in 0.0f64..1.0,
        k_frac in 0.0f64..1.0,
    ) {
        let r = 1 + ((n - 1) as f64 * r_frac * r_frac) as u64;
        let k = 1 + ((n - 1) as f64 * k_frac) as u64;
        let p = p_rand(ctx(n, r, k));
        prop_assert!(p > 0.0 && p <= 1.0);
        if k < n {
            prop_assert!(p_rand(ctx(n, r, k + 1)) >= p);
        }
        if r < n {
            prop_assert!(p_rand(ctx(n, r + 1, k)) >= p);
        }
        // A perfect shortlist scores the ceiling.
        prop_assert_eq!(bor(1.0, p).unwrap(), bor_max(ctx(n, r, k)));
    }

    #[test]
    fn ranking_ignores_input_order(
        scores in prop::collection::vec(-5i32..5, 1..40),
        rotation in 0usize..40,
    ) {
        let entries: Vec<(String, f64)> = scores
            .iter()
            .enumerate()
            .map(|(i, &s)| (format!("t{i:03}"), s as f64 / 2.0))
            .collect();
        let mut shuffled = entries.clone();
        shuffled.rotate_left(rotation % entries.len());
        shuffled.reverse();
        let a = rank(&ScoreVector { query_id: "q".into(), entries });
        let b = rank(&ScoreVector { query_id: "q".into(), entries: shuffled });
        prop_assert_eq!(&a, &b);
        let s: Vec<f64> = a.entries().iter().map(|e| e.score).collect();
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    /// Swapping a filler word for a query term keeps the document length
    /// and never lowers that document's score.
    #[test]
    fn bm25_monotone_in_term_frequency(
        tf in 0usize..6,
        filler in 1usize..6,
        others in prop::collection::vec(0usize..4, 1..6),
        k1 in 0.0f64..3.0,
        b in 0.0f64..1.0,
    ) {
        let doc = |tf: usize| {
            let mut words = vec!["alpha"; tf];
            words.extend(vec!["filler"; filler + 1 - tf.min(filler + 1)]);
            words.join(" ")
        };
        let registry = |tf: usize| {
            let mut tools = vec![tool("target", &doc(tf))];
            tools.extend(others.iter().enumerate().map(|(i, &a)| {
                tool(&format!("o{i}"), &format!("{} beta gamma", "alpha ".repeat(a)))
            }));
            tools
        };
        let params = Bm25Params { k1, b };
        let score = |tf: usize| {
            let index = Bm25Index::build(&registry(tf), params).unwrap();
            index.score("q", "alpha").score_of("target").unwrap()
        };
        if tf < filler + 1 {
            prop_assert!(score(tf + 1) >= score(tf) - 1e-12);
        }
        prop_assert!(score(tf) >= 0.0);
    }

    /// Buckets partition the test set and the overall found rate is the
    /// size-weighted mean of the bucket found rates.
    #[test]
    fn buckets_partition_and_reweight(
        queries in prop::collection::vec((prop::option::weighted(0.9, 1usize..=60), 1usize..=60), 1..80),
        narrow in any::<bool>(),
    ) {
        let scheme = if narrow { BucketScheme::Narrow } else { BucketScheme::Wide };
        let traces: Vec<EpisodeTrace> = queries
            .iter()
            .enumerate()
            .map(|(i, &(gold_rank, depth))| EpisodeTrace {
                query_id: format!("q{i}"),
                depth,
                found: gold_rank.is_some_and(|r| r <= depth),
                terminal_reward: 0.0,
                episode_return: 0.0,
                gold_rank,
                relevant: 1,
                candidate_count: 60,
            })
            .collect();
        let run = MethodRun {
            method: "m".into(),
            deterministic: true,
            seeds: vec![SeedRun { seed: 0, traces: traces.clone() }],
        };
        let report = summarize("c", scheme, StdConvention::Sample, vec![run]).unwrap();
        let rows: Vec<_> = report.bucket_rows("m").collect();
        prop_assert_eq!(rows.iter().map(|r| r.n).sum::<usize>(), traces.len());
        for (b, row) in rows.iter().enumerate() {
            let n = traces.iter().filter(|t| bucketize(t.gold_rank, scheme) == b).count();
            prop_assert_eq!(row.n, n);
            prop_assert_eq!(row.found_pct.is_none(), n == 0);
        }
        let weighted: f64 = rows
            .iter()
            .filter_map(|r| r.found_pct.map(|f| f * r.n as f64))
            .sum::<f64>() / traces.len() as f64;
        prop_assert!((weighted - report.method("m").unwrap().found_pct.mean).abs() < 1e-9);
    }
}
