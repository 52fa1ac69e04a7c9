mod common;

use common::{fixture, random_document};
use cuneitext::corpus::{
    build_corpus, export_dataset, load_dir, read_dataset_dir, stratified_split, Catalogue,
    CatalogueEntry, DatasetStats, SplitRatios,
};
use cuneitext::translit::NormalizeOptions;
use cuneitext::SignList;

fn synthetic(n: usize) -> (Vec<cuneitext::corpus::CdlDocument>, Catalogue) {
    let list = SignList::mini();
    let mut rng = cuneitext::rng::stream(20);
    let docs: Vec<_> = (0..n)
        .map(|i| random_document(&mut rng, &format!("P{i:04}"), &list))
        .collect();
    let periods = [
        "Ur III",
        "Old Akkadian (ca. 2340-2200 BC)",
        "Lagash II",
        "ED IIIb",
    ];
    let genres = [
        "Administrative",
        "Royal Inscription",
        "Lexical",
        "Letter",
        "Legal",
    ];
    let catalogue = Catalogue(
        docs.iter()
            .enumerate()
            .map(|(i, d)| {
                let entry = CatalogueEntry {
                    period: Some(periods[i % periods.len()].into()),
                    genre: Some(genres[i % genres.len()].into()),
                };
                (d.textid.clone(), entry)
            })
            .collect(),
    );
    (docs, catalogue)
}

#[test]
fn twenty_documents_build_twenty_records() {
    let (docs, catalogue) = synthetic(20);
    let corpus = build_corpus(
        &docs,
        &catalogue,
        &SignList::mini(),
        NormalizeOptions::default(),
    )
    .unwrap();
    assert_eq!(corpus.records.len(), 20);
    assert!(corpus.skipped.is_empty());
    assert!(corpus.records.iter().all(|r| r.has_parity()));
    let ids: std::collections::BTreeSet<_> = corpus.records.iter().map(|r| &r.id).collect();
    assert_eq!(ids.len(), 20);
}

#[test]
fn worker_count_does_not_change_the_corpus() {
    let (docs, catalogue) = synthetic(60);
    let list = SignList::mini();
    let build = |workers| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap()
            .install(|| {
                build_corpus(&docs, &catalogue, &list, NormalizeOptions::default()).unwrap()
            })
    };
    assert_eq!(build(1), build(4));
}

#[test]
fn export_round_trips_and_is_byte_stable() {
    let (docs, catalogue) = synthetic(40);
    let list = SignList::mini();
    let corpus = build_corpus(&docs, &catalogue, &list, NormalizeOptions::default()).unwrap();
    let assignment = stratified_split(&corpus.records, &SplitRatios::default(), 5).unwrap();

    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    export_dataset(&corpus.records, &assignment, a.path()).unwrap();
    export_dataset(&corpus.records, &assignment, b.path()).unwrap();
    for name in ["train.jsonl", "validation.jsonl", "test.jsonl"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap()
        );
    }

    let mut back: Vec<_> = read_dataset_dir(a.path(), Some(&list))
        .unwrap()
        .into_iter()
        .flat_map(|(_, records)| records)
        .collect();
    back.sort_by(|x, y| x.id.cmp(&y.id));
    assert_eq!(back, corpus.records);

    let stats = DatasetStats::compute(&corpus.records, &assignment, corpus.stats);
    assert_eq!(stats.tablets.total, 40);
    assert_eq!(
        stats
            .by_genre
            .iter()
            .find(|c| c.label == "Lexical")
            .unwrap()
            .validation,
        0
    );
}

#[test]
fn fixture_exports_surface_first() {
    let dir = fixture("");
    let docs = load_dir(&dir).unwrap();
    let catalogue = Catalogue::load(&fixture("catalogue.json")).unwrap();
    let corpus = build_corpus(
        &docs,
        &catalogue,
        &SignList::mini(),
        NormalizeOptions::default(),
    )
    .unwrap();
    let assignment = stratified_split(&corpus.records, &SplitRatios::default(), 0).unwrap();
    let out = tempfile::tempdir().unwrap();
    export_dataset(&corpus.records, &assignment, out.path()).unwrap();
    let train = std::fs::read_to_string(out.path().join("train.jsonl")).unwrap();
    let row: serde_json::Value = serde_json::from_str(train.lines().next().unwrap()).unwrap();
    assert_eq!(row["id"], "Q001103");
    assert_eq!(row["period"], "Early Dynastic IIIb");
    assert_eq!(row["genre"], "Royal Inscription");
    assert!(row["glyphs"]
        .as_str()
        .unwrap()
        .starts_with("<SURFACE>\n𒀭𒂗𒆤\n"));
    let keys: Vec<_> = row.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 5);
}
