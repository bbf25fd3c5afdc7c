use std::collections::BTreeSet;

use chrono::Duration;
use proptest::prelude::*;

use tls_core::corpus::{Timeline, TimelineEntry};
use tls_core::evaluation::{align_rouge_f1, date_f1, evaluate_pair, rouge_n, EvalReport, PairScores};
use tls_core::NaiveDate;

fn base() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 6, 1).unwrap()
}

fn timeline(entries: Vec<(i64, Vec<String>)>) -> Timeline {
    Timeline::from_entries(
        "t",
        entries
            .into_iter()
            .map(|(off, words)| TimelineEntry {
                date: base() + Duration::days(off),
                summary: vec![words.join(" ")],
            })
            .collect(),
    )
}

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]), 2..8)
        .prop_map(|w| w.into_iter().map(String::from).collect())
}

fn timelines() -> impl Strategy<Value = Timeline> {
    prop::collection::vec((0i64..60, words()), 1..10).prop_map(timeline)
}

fn naive_rouge(pred: &[String], reference: &[String], n: usize) -> (f64, f64) {
    let grams = |t: &[String]| -> Vec<Vec<String>> {
        if t.len() < n {
            vec![]
        } else {
            (0..=t.len() - n).map(|i| t[i..i + n].to_vec()).collect()
        }
    };
    let (p, r) = (grams(pred), grams(reference));
    let mut overlap = 0;
    let mut done: Vec<&Vec<String>> = Vec::new();
    for g in &p {
        if done.contains(&g) {
            continue;
        }
        done.push(g);
        let cp = p.iter().filter(|x| *x == g).count();
        let cr = r.iter().filter(|x| *x == g).count();
        overlap += cp.min(cr);
    }
    let prec = if p.is_empty() { 0.0 } else { overlap as f64 / p.len() as f64 };
    let rec = if r.is_empty() { 0.0 } else { overlap as f64 / r.len() as f64 };
    (prec, rec)
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0 + 1e-12).contains(&x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn date_f1_matches_set_oracle(p in prop::collection::btree_set(0i64..40, 0..15), r in prop::collection::btree_set(0i64..40, 1..15)) {
        let mk = |s: &BTreeSet<i64>| timeline(s.iter().map(|&o| (o, vec!["x".to_string()])).collect());
        let got = date_f1(&mk(&p), &mk(&r)).unwrap();
        let hits = p.intersection(&r).count() as f64;
        let (ep, er) = if p.is_empty() { (0.0, 0.0) } else { (hits / p.len() as f64, hits / r.len() as f64) };
        prop_assert_eq!(got.precision, ep);
        prop_assert_eq!(got.recall, er);
        let ef = if ep + er > 0.0 { 2.0 * ep * er / (ep + er) } else { 0.0 };
        prop_assert_eq!(got.f1, ef);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rouge_matches_naive_counts(p in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 0..20),
                                  r in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 0..20),
                                  n in 1usize..=2) {
        let p: Vec<String> = p.into_iter().map(String::from).collect();
        let r: Vec<String> = r.into_iter().map(String::from).collect();
        let got = rouge_n(&p, &r, n);
        let (ep, er) = naive_rouge(&p, &r, n);
        prop_assert_eq!(got.precision, ep);
        prop_assert_eq!(got.recall, er);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn self_alignment_is_perfect(t in timelines()) {
        for n in 1..=2 {
            let s = align_rouge_f1(&t, &t, n).unwrap();
            prop_assert!((s.f1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_invariance(p in timelines(), r in timelines(), delta in -400i64..400) {
        let shift = |t: &Timeline| Timeline::from_entries(
            "t",
            t.entries().iter().map(|e| TimelineEntry { date: e.date + Duration::days(delta), summary: e.summary.clone() }).collect(),
        );
        let a = evaluate_pair(&p, &r).unwrap();
        let b = evaluate_pair(&shift(&p), &shift(&r)).unwrap();
        prop_assert_eq!(a, b);
        for prf in [a.date_f1, a.ar1, a.ar2] {
            prop_assert!(in_unit(prf.precision) && in_unit(prf.recall) && in_unit(prf.f1));
        }
    }
}

#[test]
fn report_equals_direct_calls() {
    let w = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
    let pred = timeline(vec![(0, w("storm hits the coast")), (3, w("rescue teams arrive"))]);
    let reference = timeline(vec![(0, w("storm hits coast")), (2, w("teams arrive to rescue")), (9, w("rebuilding starts"))]);
    let scores = evaluate_pair(&pred, &reference).unwrap();
    assert_eq!(scores.date_f1, date_f1(&pred, &reference).unwrap());
    assert_eq!(scores.ar1, align_rouge_f1(&pred, &reference, 1).unwrap());
    assert_eq!(scores.ar2, align_rouge_f1(&pred, &reference, 2).unwrap());
    let pairs = vec![
        PairScores { topic: "x".into(), reference: "r1".into(), scores },
        PairScores { topic: "x".into(), reference: "r2".into(), scores: evaluate_pair(&reference, &reference).unwrap() },
    ];
    let report = EvalReport::new("m", pairs);
    assert!((report.macro_avg.ar1.f1 - (scores.ar1.f1 + 1.0) / 2.0).abs() < 1e-15);
    assert!((report.macro_avg.date_f1.f1 - (0.4 + 1.0) / 2.0).abs() < 1e-15);
    let table = report.to_table();
    assert!(table.lines().next().unwrap().contains("AR1-F"));
    assert_eq!(table.lines().count(), 6);
}
