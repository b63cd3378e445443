use num_bigint::BigInt;

use littlewood::constructor::{build_beta_thm1, build_beta_thm2, build_beta_thm3, ConstructionDoc, ConstructionRecord, GrowthSpec, MarkerRule, PhiFunction};
use littlewood::verifier::{aggregate, append_to_store, certify_construction, read_store, Verdict, WidthPolicy};
use littlewood::{CfStream, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn t2() -> ConstructionRecord {
    let alpha: CfStream = "0; | (2)".parse().unwrap();
    build_beta_thm2(alpha, 2, r(1, 2), MarkerRule::Default, GrowthSpec::Ratio(r(19, 1))).unwrap()
}

#[test]
fn t2_schedule_matches_the_worked_example() {
    let rec = t2();
    let n: Vec<u64> = (1..=4).map(|j| rec.n(j).unwrap()).collect();
    let m: Vec<u64> = (1..=4).map(|j| rec.m(j).unwrap()).collect();
    assert_eq!(n, [1, 19, 361, 6859]);
    assert_eq!(m, [1, 21, 383, 7243]);
}

#[test]
fn t1_schedule_matches_the_worked_example() {
    let alpha: CfStream = "0; | (2)".parse().unwrap();
    let rec = build_beta_thm1(alpha, PhiFunction::power(r(1, 2)).unwrap(), MarkerRule::Default).unwrap();
    let n: Vec<u64> = (2..=4).map(|j| rec.n(j).unwrap()).collect();
    assert_eq!(n, [45, 853, 15863]);
}

#[test]
fn record_survives_a_json_round_trip() {
    let rec = t2();
    let doc = rec.to_doc(4, 200).unwrap();
    let text = serde_json::to_string_pretty(&doc).unwrap();
    let back: ConstructionDoc = serde_json::from_str(&text).unwrap();
    let rebuilt = ConstructionRecord::from_doc(&back).unwrap();
    assert_eq!(rebuilt.beta().prefix(400).unwrap(), rec.beta().prefix(400).unwrap());
    assert_eq!(rebuilt.to_doc(4, 200).unwrap(), doc);
}

#[test]
fn tampered_prefix_is_rejected() {
    let mut doc = t2().to_doc(3, 60).unwrap();
    let mut text = serde_json::to_value(&doc).unwrap();
    text["beta_prefix"][5] = serde_json::json!(1);
    doc = serde_json::from_value(text).unwrap();
    assert!(ConstructionRecord::from_doc(&doc).is_err());
}

#[test]
fn certificates_round_trip_through_the_store() {
    let rec = t2();
    let certs = certify_construction(&rec, 2..=3, &WidthPolicy::default()).unwrap();
    assert_eq!(aggregate(&certs), Verdict::Pass);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("certs.jsonl");
    append_to_store(&path, &certs).unwrap();
    append_to_store(&path, &certs[..1]).unwrap();
    let stored = read_store(&path).unwrap();
    assert_eq!(stored.len(), 3);
    assert_eq!(stored[0], certs[0]);
    assert_eq!(stored[2], certs[0]);
}

#[test]
fn certification_is_deterministic_apart_from_timestamps() {
    let rec = t2();
    let strip = |mut v: Vec<littlewood::verifier::Certificate>| {
        v.iter_mut().for_each(|c| c.timestamp = 0);
        v
    };
    let a = strip(certify_construction(&rec, 2..=3, &WidthPolicy::default()).unwrap());
    let b = strip(certify_construction(&rec, 2..=3, &WidthPolicy::default()).unwrap());
    assert_eq!(a, b);
}

#[test]
fn t3_pair_certifies_against_each_alpha() {
    let alphas: Vec<CfStream> = ["0; | (2)", "0; | (1)"].iter().map(|s| s.parse().unwrap()).collect();
    let rec = build_beta_thm3(alphas, PhiFunction::power(r(1, 2)).unwrap(), MarkerRule::Default, None).unwrap();
    let certs = certify_construction(&rec, 2..=2, &WidthPolicy::default()).unwrap();
    assert!(!certs.is_empty());
    assert!(certs.iter().all(|c| c.verdict != Verdict::Fail));
}

#[test]
fn low_indices_are_rejected() {
    assert!(certify_construction(&t2(), 1..=2, &WidthPolicy::default()).is_err());
}
