use std::fs;

use dbleu::corpus_io::{
    load_hypotheses, load_ratings, load_references, validate_study, write_hypotheses, write_ratings, write_references,
    Format, RatingScale, ReadOptions, Severity,
};
use dbleu::metrics::corpus_dbleu;
use dbleu::{Error, MetricConfig, MetricKind};

const REFS: &str = "\
segment_id\tref_id\tweight\tis_original\ttext
s2\torig\t0.8\t1\tsee you there
s1\torig\t0.5\t1\tA b
s1\tmined\t1.0\t0\ta c
";

const HYPS: &str = "s1\tsysA\ta b\r\ns2\tsysA\tsee you\r\n";
const RATINGS: &str = "s1\tsysA\t4\ns2\tsysA\t2\n";

#[test]
fn load_score_and_rewrite() {
    let dir = tempfile::tempdir().unwrap();
    let refs_path = dir.path().join("refs.tsv");
    let hyps_path = dir.path().join("hyps.tsv");
    let ratings_path = dir.path().join("ratings.tsv");
    fs::write(&refs_path, REFS).unwrap();
    fs::write(&hyps_path, HYPS).unwrap();
    fs::write(&ratings_path, RATINGS).unwrap();

    let with_header = ReadOptions {
        header: true,
        normalize: true,
        ..ReadOptions::default()
    };
    let loaded = load_references(&refs_path, &with_header).unwrap();
    assert_eq!(loaded.segments.iter().map(|s| s.id()).collect::<Vec<_>>(), ["s1", "s2"]);
    assert_eq!(loaded.segments[0].references()[1].tokens.to_text(), "a b");

    let hyps = load_hypotheses(&hyps_path, &ReadOptions::default()).unwrap();
    let ratings = load_ratings(&ratings_path, &ReadOptions::default(), RatingScale::default(), true).unwrap();
    assert_eq!(ratings["sysA"]["s1"], 0.5);
    assert_eq!(ratings["sysA"]["s2"], -0.5);

    let report = validate_study(&loaded.segments, &hyps, &ratings);
    assert_eq!(report.worst(), None);

    let one: dbleu::Hypotheses = hyps["sysA"]
        .iter()
        .filter(|(k, _)| *k == "s1")
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let s1 = &loaded.segments[..1];
    let score = corpus_dbleu(&one, s1, &MetricConfig::new(MetricKind::Dbleu))
        .unwrap()
        .score;
    assert!((score - 0.612_372).abs() < 1e-6);

    // canonical output reloads to the same data
    let mut buf = Vec::new();
    write_references(&loaded.segments, &mut buf).unwrap();
    let again_path = dir.path().join("again.tsv");
    fs::write(&again_path, &buf).unwrap();
    assert_eq!(
        load_references(&again_path, &ReadOptions::default()).unwrap().segments,
        loaded.segments
    );

    let mut buf = Vec::new();
    write_hypotheses(&hyps, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "s1\tsysA\ta b\ns2\tsysA\tsee you\n");

    let mut buf = Vec::new();
    write_ratings(&ratings, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "s1\tsysA\t0.5\ns2\tsysA\t-0.5\n");
}

#[test]
fn jsonl_matches_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("refs.jsonl");
    fs::write(
        &jsonl,
        "{\"segment_id\":\"s1\",\"ref_id\":\"orig\",\"weight\":0.5,\"is_original\":true,\"text\":\"a b\"}\n\
         {\"segment_id\":\"s1\",\"ref_id\":\"mined\",\"weight\":1.0,\"is_original\":false,\"text\":\"a c\"}\n",
    )
    .unwrap();
    let tsv = dir.path().join("refs.tsv");
    fs::write(&tsv, "s1\torig\t0.5\t1\ta b\ns1\tmined\t1.0\t0\ta c\n").unwrap();
    assert_eq!(Format::from_path(&jsonl), Format::Jsonl);
    let opts = |format| ReadOptions {
        format,
        ..ReadOptions::default()
    };
    assert_eq!(
        load_references(&jsonl, &opts(Format::Jsonl)).unwrap(),
        load_references(&tsv, &opts(Format::Tsv)).unwrap()
    );
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_references(dir.path().join("absent.tsv"), &ReadOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("absent.tsv"));
}

#[test]
fn validation_flags_unknown_segments() {
    let dir = tempfile::tempdir().unwrap();
    let refs_path = dir.path().join("refs.tsv");
    fs::write(&refs_path, "s1\torig\t0.5\t1\ta b\n").unwrap();
    let loaded = load_references(&refs_path, &ReadOptions::default()).unwrap();
    let hyps = dbleu::corpus_io::parse_hypotheses(
        std::path::Path::new("hyps.tsv"),
        "s1\tA\ta\ns9\tA\tb\n",
        &ReadOptions::default(),
    )
    .unwrap();
    let report = validate_study(&loaded.segments, &hyps, &Default::default());
    assert_eq!(report.worst(), Some(Severity::Error));
}
