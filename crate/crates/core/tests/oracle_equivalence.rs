mod common;

use cooc::naive::nt_co_counts;
use cooc::oracle::{oracle_co_counts, oracle_topk};
use cooc::pt::{find_desirable_nodes, pt_co_counts};
use cooc::tidset::nti_co_counts;
use cooc::{CoOccurrenceIndex, EngineKind, NsOrder, TaConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_engine_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..300 {
        let db = common::random_db(&mut rng, 300);
        let index = CoOccurrenceIndex::build(db);
        for _ in 0..3 {
            let q = common::random_query(&mut rng, index.db(), index.order());
            let expected = oracle_topk(index.db(), index.order(), &q);
            for engine in EngineKind::ALL {
                let got = index.run(engine, &q);
                assert_eq!(
                    got.result,
                    expected,
                    "case {case}, {engine}, query {:?}",
                    q.items()
                );
                assert!(got.result.exact_counts);
            }
        }
    }
}

#[test]
fn descending_count_visit_order_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..150 {
        let index =
            CoOccurrenceIndex::build_for(common::random_db(&mut rng, 200), &[EngineKind::PtTa])
                .with_ta_config(TaConfig {
                    ns_order: NsOrder::DescendingCount,
                    ..TaConfig::default()
                });
        let q = common::random_query(&mut rng, index.db(), index.order());
        assert_eq!(
            index.run(EngineKind::PtTa, &q).result,
            oracle_topk(index.db(), index.order(), &q)
        );
    }
}

#[test]
fn full_tables_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let index = CoOccurrenceIndex::build(common::random_db(&mut rng, 120));
        let q = common::random_query(&mut rng, index.db(), index.order());
        let expected = oracle_co_counts(index.db(), &q);
        assert_eq!(pt_co_counts(index.tree().unwrap(), &q), expected);
        assert_eq!(nt_co_counts(index.db(), &q), expected);
        assert_eq!(
            nti_co_counts(index.db(), index.tidsets().unwrap(), &q),
            expected
        );
    }
}

#[test]
fn desirable_node_counts_give_query_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let index = CoOccurrenceIndex::build(common::random_db(&mut rng, 150));
        let q = common::random_query(&mut rng, index.db(), index.order());
        let ns = find_desirable_nodes(index.tree().unwrap(), &q);
        let support = u64::from(index.db().support_count(q.items()));
        assert_eq!(ns.support(index.tree().unwrap()), support);
        assert_eq!(index.tidsets().unwrap().project(&q).len() as u64, support);
    }
}

#[test]
fn unknown_tokens_give_empty_results() {
    let index = CoOccurrenceIndex::build(common::sample_db());
    for engine in EngineKind::ALL {
        let out = index.run_tokens(engine, &["a", "nope"], 2).unwrap();
        assert!(out.result.is_empty());
        assert_eq!(out.work, 0);
    }
    assert!(index.run_tokens(EngineKind::Pt, &[] as &[&str], 2).is_err());
    assert!(index.run_tokens(EngineKind::Pt, &["a"], 0).is_err());
}
