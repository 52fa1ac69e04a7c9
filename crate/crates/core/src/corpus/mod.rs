//! Corpus construction: document ingestion, record assembly, splitting and
//! dataset export.

pub mod build;
pub mod catalogue;
pub mod cdl;
pub mod export;
pub mod record;
pub mod split;

pub use build::{
    build_corpus, build_tablet, build_tablet_with, BuildReport, BuiltCorpus, BuiltTablet,
};
pub use catalogue::{Catalogue, CatalogueEntry, Genre, Period};
pub use cdl::{load_dir, parse_cdl, CdlDocument, CdlNode, RawItem, RawText};
pub use export::{export_dataset, read_dataset_dir, DatasetStats};
pub use record::{
    count_readings, glyph_frequencies, read_jsonl, write_jsonl, Aligned, DatasetRow, TabletRecord,
};
pub use split::{allocate, stratified_split, Split, SplitAssignment, SplitRatios};
